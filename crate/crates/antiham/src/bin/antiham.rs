use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use num_complex::Complex64;

use antiham::{
    gen_admissible_term, gen_commuting_time_reversal, inject_term, run_suites, trial_rng,
    AntilinearTerm, CampaignConfig, ComplexMatrix, DoubledSpace, QuantumSystem, RealLinearOp,
    Suite, SystemLabel, UTransform, Vector,
};

#[derive(Parser)]
#[command(
    name = "antiham",
    version,
    about = "Toolkit for quantum systems with a hidden vacuum degeneracy and antilinear Hamiltonian terms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the randomized verification campaign and report per-property results.
    Verify {
        /// Dimension of the base Hilbert space.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Number of random trials per suite.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Master seed; the ANTIHAM_SEED environment variable overrides it.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Deviation threshold for numeric properties.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Restrict to the named suites (repeatable); all suites when absent.
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
        /// Write the full JSON report here.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Print a small worked example.
    Demo {
        /// One of: scalar, pauli, timereversal, inject.
        #[arg(long)]
        example: String,
    },
    /// Read a system description and emit its doubled or transformed version.
    Transform {
        /// JSON file holding the original system.
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Target presentation: B (doubled) or C (transformed).
        #[arg(long, value_name = "B|C")]
        to: String,
        /// Output JSON file.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Verify {
            dim,
            trials,
            seed,
            tol,
            suites,
            out,
        } => verify(dim, trials, seed, tol, &suites, out.as_deref()),
        Command::Demo { example } => {
            demo(&example)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform { input, to, out } => {
            transform(&input, &to, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verify(
    dim: usize,
    trials: usize,
    mut seed: u64,
    tol: f64,
    suite_names: &[String],
    out: Option<&std::path::Path>,
) -> anyhow::Result<ExitCode> {
    if let Ok(raw) = std::env::var("ANTIHAM_SEED") {
        seed = raw
            .trim()
            .parse()
            .with_context(|| format!("ANTIHAM_SEED must be an unsigned integer, got {raw:?}"))?;
        eprintln!("seed {seed} taken from ANTIHAM_SEED");
    }
    let suites = if suite_names.is_empty() {
        Suite::ALL.to_vec()
    } else {
        suite_names
            .iter()
            .map(|name| Suite::from_str(name).map_err(anyhow::Error::msg))
            .collect::<anyhow::Result<Vec<_>>>()?
    };
    let config = CampaignConfig {
        base_dim: dim,
        trials,
        tol,
        seed,
        ..CampaignConfig::default()
    };
    let report = run_suites(&suites, &config);

    for pr in &report.reports {
        println!(
            "[{}] {}/{} ({}): trials={} failures={} max_deviation={:.3e}",
            if pr.pass { "PASS" } else { "FAIL" },
            pr.suite,
            pr.property,
            pr.paper_anchor,
            pr.trials,
            pr.failures,
            pr.max_deviation,
        );
    }
    println!(
        "overall: {} ({} properties, seed {})",
        if report.overall_pass { "PASS" } else { "FAIL" },
        report.reports.len(),
        seed,
    );

    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&report)?;
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
        println!("report written to {}", path.display());
    }
    Ok(if report.overall_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn fmt_complex(z: Complex64) -> String {
    let round = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (round(z.re), round(z.im));
    if im == 0.0 {
        format!("{re:.3}")
    } else if re == 0.0 {
        format!("{im:.3}i")
    } else {
        format!("{re:.3}{im:+.3}i")
    }
}

fn print_matrix(label: &str, m: &ComplexMatrix) {
    println!("{label}:");
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| fmt_complex(m.get(i, j))).collect();
        println!("  [ {} ]", row.join("  "));
    }
}

fn print_vector(label: &str, v: &Vector) {
    let parts: Vec<String> = v.entries().iter().map(|&z| fmt_complex(z)).collect();
    println!("{label}: ( {} )", parts.join(", "));
}

fn demo(example: &str) -> anyhow::Result<()> {
    match example {
        "scalar" => demo_scalar(),
        "pauli" => demo_pauli(),
        "timereversal" => demo_timereversal(),
        "inject" => demo_inject(),
        other => bail!("unknown example {other:?}, expected scalar, pauli, timereversal, or inject"),
    }
}

fn demo_scalar() -> anyhow::Result<()> {
    println!("One-dimensional base space: the doubled space is two-dimensional");
    println!("and the operator j acts there as a real stand-in for i.\n");
    let space = DoubledSpace::new(1)?;
    print_matrix("V", &space.v());
    print_matrix("j = V+ - V", &space.j());
    print_matrix("L = VV+ - V+V", &space.l());
    let ut = UTransform::new(space);
    println!();
    let i_op = RealLinearOp::scalar(space.dim(), Complex64::I);
    let turned = ut.transform_op(&i_op)?.try_into_matrix(1e-12)?;
    print_matrix("U i U^-1", &turned);
    println!("  (equals j: multiplication by i has become a real matrix)\n");
    for (name, psi) in [
        ("U (1, 0)", Vector::basis(2, 0)),
        ("U (i, 0)", Vector::basis(2, 0).scale(Complex64::I)),
        ("U (0, 1)", Vector::basis(2, 1)),
    ] {
        print_vector(name, &ut.map_state(&psi)?);
    }
    Ok(())
}

fn demo_pauli() -> anyhow::Result<()> {
    println!("The Pauli matrix with imaginary entries turns into a purely real");
    println!("observable on the doubled space, with the same measured values.\n");
    let sigma_y = ComplexMatrix::from_rows(&[
        vec![(0.0, 0.0), (0.0, -1.0)],
        vec![(0.0, 1.0), (0.0, 0.0)],
    ])?;
    print_matrix("O^A", &sigma_y);
    let space = DoubledSpace::new(2)?;
    let ut = UTransform::new(space);
    let lifted = space.lift_matrix(&sigma_y)?;
    print_matrix("\nO^B (lifted)", &lifted);
    let transformed = ut.observable_closed_form(&lifted)?;
    print_matrix("\nO^C = U O^B U^-1", &transformed);
    let (vals_b, _) = lifted.eigh()?;
    let (vals_c, _) = transformed.eigh()?;
    println!("\nspectrum of O^B: {vals_b:.3?}");
    println!("spectrum of O^C: {vals_c:.3?}");
    Ok(())
}

fn demo_timereversal() -> anyhow::Result<()> {
    println!("An antiunitary time-reversal operator commuting with the Hamiltonian");
    println!("becomes a plain unitary matrix after the transform, yet still");
    println!("reverses the dynamics.\n");
    let mut r = trial_rng(7, "demo_timereversal", 0);
    let n = 2;
    let (h_a, t_a) = gen_commuting_time_reversal(&mut r, n, false);
    let space = DoubledSpace::new(n)?;
    let ut = UTransform::new(space);
    let sys_b = space.build_system_b(&QuantumSystem::closed(
        SystemLabel::A,
        h_a,
        vec![],
        1e-9,
    )?)?;
    let bundle = ut.build_system_c(&sys_b)?;
    let tr = antiham::build_time_reversal(&ut, &t_a, 1e-9)?;
    print_matrix("T^C", &tr.transformed);
    let id = ComplexMatrix::identity(space.dim());
    println!(
        "\n|| (T^C)+ T^C - 1 ||        = {:.3e}",
        (&tr.transformed.dagger() * &tr.transformed).max_abs_diff(&id)
    );
    println!(
        "|| [T^C, energy observable] || = {:.3e}",
        tr.transformed
            .commutator(&bundle.system.energy_observable)?
            .max_abs()
    );
    println!(
        "|| {{T^C, H^C}} ||             = {:.3e}",
        tr.transformed
            .anticommutator(&bundle.system.hamiltonian)?
            .max_abs()
    );
    let t = 1.0;
    let forward = bundle.system.propagator(t)?;
    let backward = bundle.system.propagator(-t)?;
    println!(
        "|| T^C e^(-iH^C t) - e^(+iH^C t) T^C || = {:.3e}",
        tr.transformed
            .checked_mul(&forward)?
            .max_abs_diff(&backward.checked_mul(&tr.transformed)?)
    );
    Ok(())
}

fn demo_inject() -> anyhow::Result<()> {
    println!("An antilinear term with antisymmetric matrix cannot be added to the");
    println!("Hamiltonian directly, but its transform is an ordinary self-adjoint");
    println!("summand on the doubled space.\n");
    let mut r = trial_rng(7, "demo_inject", 0);
    let n = 2;
    let space = DoubledSpace::new(n)?;
    let ut = UTransform::new(space);
    let h_a = antiham::gen_hermitian(&mut r, n);
    print_matrix("H^A", &h_a);
    let sys_b = space.build_system_b(&QuantumSystem::closed(
        SystemLabel::A,
        h_a,
        vec![],
        1e-9,
    )?)?;
    let bundle = ut.build_system_c(&sys_b)?;
    let term = gen_admissible_term(&mut r, n);
    print_matrix("\nantilinear term matrix (antisymmetric)", term.matrix());
    let injected = inject_term(&ut, &bundle.system.hamiltonian, &term, 1e-9)?;
    print_matrix("\nH^C_2 (transformed term)", &injected.term);
    println!(
        "\nself-adjointness deviation of H^C + H^C_2: {:.3e}",
        injected.total_hamiltonian.hermiticity_error()
    );
    let bad = AntilinearTerm::new(ComplexMatrix::identity(n))?;
    match inject_term(&ut, &bundle.system.hamiltonian, &bad, 1e-9) {
        Err(err) => println!("symmetric term rejected as expected: {err}"),
        Ok(_) => bail!("a symmetric antilinear term must be rejected"),
    }
    Ok(())
}

fn transform(input: &std::path::Path, to: &str, out: &std::path::Path) -> anyhow::Result<()> {
    let raw = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let system: QuantumSystem =
        serde_json::from_str(&raw).with_context(|| format!("parsing {}", input.display()))?;
    let space = DoubledSpace::new(system.dim)?;
    let sys_b = space.build_system_b(&system)?;
    let json = match to.to_ascii_uppercase().as_str() {
        "B" => serde_json::to_string_pretty(&sys_b)?,
        "C" => {
            let ut = UTransform::new(space);
            let bundle = ut.build_system_c(&sys_b)?;
            serde_json::to_string_pretty(&bundle)?
        }
        other => bail!("unknown target {other:?}, expected B or C"),
    };
    fs::write(out, json).with_context(|| format!("writing {}", out.display()))?;
    println!(
        "{} system written to {}",
        to.to_ascii_uppercase(),
        out.display()
    );
    Ok(())
}
