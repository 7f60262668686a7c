//! Randomized verification campaigns over the whole toolkit.
//!
//! A campaign draws random systems, states, and operators, replays every
//! claimed identity and equivalence on them, and aggregates the observed
//! deviations into per-property reports. Trials are deterministic: each one
//! derives its own seed from the master seed, the suite name, and the trial
//! index, so any failure can be replayed in isolation. A fifth of the trials
//! use Hamiltonians with degenerate spectra, since that is where eigenspace
//! bookkeeping tends to break.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::applications::{
    check_generator, check_injection_condition, evolve_real_linear, inject_term, realify,
    AntilinearTerm,
};
use crate::ctransform::UTransform;
use crate::doubling::DoubledSpace;
use crate::matrix::{exp_hermitian, ComplexMatrix, Vector};
use crate::reallinear::{adjoint_pairing, inner_from_real_parts, real_inner, RealLinearOp};
use crate::system::{DensityMatrix, QuantumSystem, SpectralDecomposition, SystemLabel};

/// Knobs of a verification campaign.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub base_dim: usize,
    pub trials: usize,
    pub tol: f64,
    pub time_points: Vec<f64>,
    pub seed: u64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            base_dim: 3,
            trials: 100,
            tol: 1e-9,
            time_points: vec![0.3, 1.0, 2.5],
            seed: 42,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    AppendixCalculus,
    Doubling,
    CTransform,
    AntilinearInjection,
    TimeReversal,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::AppendixCalculus,
        Suite::Doubling,
        Suite::CTransform,
        Suite::AntilinearInjection,
        Suite::TimeReversal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::AppendixCalculus => "appendix_calculus",
            Suite::Doubling => "doubling",
            Suite::CTransform => "c_transform",
            Suite::AntilinearInjection => "antilinear_injection",
            Suite::TimeReversal => "time_reversal",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite {s:?}, expected one of {}", names.join(", "))
            })
    }
}

/// Aggregated outcome of replaying one property across all trials.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct PropertyReport {
    pub suite: Suite,
    pub property: String,
    pub paper_anchor: String,
    pub trials: usize,
    pub failures: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub reports: Vec<PropertyReport>,
    pub overall_pass: bool,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Deterministic per-trial seed derived from the campaign seed, the suite
/// name, and the trial index.
pub fn trial_seed(master: u64, suite: &str, trial: u64) -> u64 {
    splitmix(splitmix(master ^ fnv1a(suite)) ^ trial)
}

pub fn trial_rng(master: u64, suite: &str, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, suite, trial))
}

fn degenerate_trial(trial: usize) -> bool {
    trial % 5 == 0
}

pub fn gen_complex(r: &mut impl Rng) -> Complex64 {
    Complex64::new(r.random::<f64>() * 2.0 - 1.0, r.random::<f64>() * 2.0 - 1.0)
}

pub fn gen_matrix(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| gen_complex(r))
}

pub fn gen_hermitian(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = gen_matrix(r, n);
    (&g + &g.dagger()).scale(Complex64::new(0.5, 0.0))
}

/// Unitary matrix, taken as the eigenbasis of a random Hermitian matrix.
pub fn gen_unitary(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let (_, vecs) = gen_hermitian(r, n)
        .eigh()
        .expect("eigendecomposition of a random Hermitian matrix");
    ComplexMatrix::from_fn(n, n, |i, j| vecs[j].get(i))
}

/// Hermitian matrix whose spectrum contains genuine repeats.
pub fn gen_degenerate_hermitian(r: &mut impl Rng, n: usize) -> ComplexMatrix {
    let distinct = (n / 2).max(1);
    let values: Vec<f64> = (0..distinct).map(|_| r.random::<f64>() * 4.0 - 2.0).collect();
    let w = gen_unitary(r, n);
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(values[i % distinct], 0.0)
        } else {
            Complex64::ZERO
        }
    });
    &(&w * &d) * &w.dagger()
}

pub fn gen_hamiltonian(r: &mut impl Rng, n: usize, degenerate: bool) -> ComplexMatrix {
    if degenerate && n > 1 {
        gen_degenerate_hermitian(r, n)
    } else {
        gen_hermitian(r, n)
    }
}

pub fn gen_state(r: &mut impl Rng, n: usize) -> Vector {
    Vector::from_vec((0..n).map(|_| gen_complex(r)).collect()).normalized()
}

/// Full-rank random density matrix (normalized Gram matrix).
pub fn gen_density(r: &mut impl Rng, n: usize) -> DensityMatrix {
    let g = gen_matrix(r, n);
    let gram = &g * &g.dagger();
    let trace = gram.trace().re;
    DensityMatrix::new(gram.scale(Complex64::new(1.0 / trace, 0.0)), 1e-7)
        .expect("normalized Gram matrix is a density matrix")
}

pub fn gen_real_linear(r: &mut impl Rng, n: usize) -> RealLinearOp {
    RealLinearOp::from_parts(gen_matrix(r, n), gen_matrix(r, n)).expect("matching square parts")
}

/// Antilinear term satisfying the admissibility condition, built as X - Xᵀ.
pub fn gen_admissible_term(r: &mut impl Rng, n: usize) -> AntilinearTerm {
    let x = gen_matrix(r, n);
    AntilinearTerm::new(&x - &x.transpose()).expect("square by construction")
}

/// Closed system with a random Hamiltonian and two random observables.
pub fn gen_system_a(r: &mut impl Rng, n: usize, degenerate: bool) -> QuantumSystem {
    let h = gen_hamiltonian(r, n, degenerate);
    let obs = vec![gen_hermitian(r, n), gen_hermitian(r, n)];
    QuantumSystem::closed(SystemLabel::A, h, obs, 1e-8).expect("random Hermitian data")
}

/// Real symmetric matrix, optionally with repeated eigenvalues.
pub fn gen_real_symmetric(r: &mut impl Rng, n: usize, degenerate: bool) -> ComplexMatrix {
    if degenerate && n > 1 {
        let distinct = (n / 2).max(1);
        let values: Vec<f64> = (0..distinct).map(|_| r.random::<f64>() * 4.0 - 2.0).collect();
        let base = {
            let g = gen_matrix(r, n);
            let s = &g + &g.transpose();
            ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(s.get(i, j).re, 0.0))
        };
        let (_, vecs) = base.eigh().expect("real symmetric eigendecomposition");
        let o = ComplexMatrix::from_fn(n, n, |i, j| vecs[j].get(i));
        let d = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i % distinct], 0.0)
            } else {
                Complex64::ZERO
            }
        });
        &(&o * &d) * &o.dagger()
    } else {
        let g = gen_matrix(r, n);
        let s = &g + &g.transpose();
        ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(s.get(i, j).re, 0.0))
    }
}

/// A Hamiltonian together with an antiunitary operator commuting with it,
/// built as H = W S W† and T = W K W† for real symmetric S and unitary W.
pub fn gen_commuting_time_reversal(
    r: &mut impl Rng,
    n: usize,
    degenerate: bool,
) -> (ComplexMatrix, RealLinearOp) {
    let s = gen_real_symmetric(r, n, degenerate);
    let w = gen_unitary(r, n);
    let h = &(&w * &s) * &w.dagger();
    let t = RealLinearOp::from_linear(w.clone())
        .expect("square")
        .compose(&RealLinearOp::conjugation(n))
        .expect("matching dims")
        .compose(&RealLinearOp::from_linear(w.dagger()).expect("square"))
        .expect("matching dims");
    (h, t)
}

struct Recorder {
    property: &'static str,
    anchor: &'static str,
    threshold: f64,
    trials: usize,
    failures: usize,
    max_deviation: f64,
}

impl Recorder {
    fn new(property: &'static str, anchor: &'static str, threshold: f64) -> Self {
        Self {
            property,
            anchor,
            threshold,
            trials: 0,
            failures: 0,
            max_deviation: 0.0,
        }
    }

    fn record(&mut self, deviation: f64) {
        self.trials += 1;
        if !(deviation <= self.threshold) {
            self.failures += 1;
        }
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = deviation;
        }
    }

    fn record_check(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { 1.0 });
    }

    fn finish(self, suite: Suite) -> PropertyReport {
        PropertyReport {
            suite,
            property: self.property.to_string(),
            paper_anchor: self.anchor.to_string(),
            trials: self.trials,
            failures: self.failures,
            max_deviation: self.max_deviation,
            pass: self.failures == 0,
        }
    }
}

fn probability_gap(lhs: &[f64], rhs: &[f64]) -> f64 {
    if lhs.len() != rhs.len() {
        return 1.0;
    }
    lhs.iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn sorted_value_gap(mut lhs: Vec<f64>, mut rhs: Vec<f64>) -> f64 {
    if lhs.len() != rhs.len() {
        return 1.0;
    }
    lhs.sort_by(f64::total_cmp);
    rhs.sort_by(f64::total_cmp);
    lhs.iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn run_appendix_calculus(cfg: &CampaignConfig) -> Vec<PropertyReport> {
    let suite = Suite::AppendixCalculus;
    let tol = cfg.tol;
    let mut split = Recorder::new("split_uniqueness", "eAD2a", tol);
    let mut linearity = Recorder::new("real_linearity", "eAD1a", tol);
    let mut pairing = Recorder::new("adjoint_real_pairing", "eAD4b", tol);
    let mut involution = Recorder::new("adjoint_involution", "eAD8w", tol);
    let mut product = Recorder::new("adjoint_product_rule", "eAD8y", tol);
    let mut scalar = Recorder::new("adjoint_scalar_rule", "eSC6r", tol);
    let mut reconstruction = Recorder::new("inner_reconstruction", "eSC5b", tol);
    let mut pairing_full = Recorder::new("adjoint_full_pairing", "eSC6y", tol);
    let mut trace = Recorder::new("real_trace_cyclic", "eTR2a", tol);
    let mut realified = Recorder::new("realified_adjoint_transpose", "eSC6x", tol);

    for trial in 0..cfg.trials {
        let n = cfg.base_dim;
        let mut r = trial_rng(cfg.seed, suite.name(), trial as u64);
        let m = gen_real_linear(&mut r, n);
        let other = gen_real_linear(&mut r, n);
        let u = gen_state(&mut r, n);
        let v = gen_state(&mut r, n);
        let alpha = gen_complex(&mut r);

        let probe = RealLinearOp::from_action(n, |psi| m.apply(psi).expect("matching dim"));
        split.record(probe.max_abs_diff(&m));

        let a = r.random::<f64>() * 2.0 - 1.0;
        let b = r.random::<f64>() * 2.0 - 1.0;
        let combo = &u.scale(Complex64::new(a, 0.0)) + &v.scale(Complex64::new(b, 0.0));
        let lhs = m.apply(&combo).expect("dim");
        let rhs = &m.apply(&u).expect("dim").scale(Complex64::new(a, 0.0))
            + &m.apply(&v).expect("dim").scale(Complex64::new(b, 0.0));
        linearity.record(lhs.max_abs_diff(&rhs));

        let adj = m.adjoint();
        pairing.record(
            (real_inner(&adj.apply(&u).expect("dim"), &v)
                - real_inner(&u, &m.apply(&v).expect("dim")))
            .abs(),
        );
        involution.record(adj.adjoint().max_abs_diff(&m));
        product.record(
            m.compose(&other)
                .expect("dim")
                .adjoint()
                .max_abs_diff(&other.adjoint().compose(&adj).expect("dim")),
        );
        scalar.record(
            m.scale_right(alpha)
                .adjoint()
                .max_abs_diff(&adj.scale_left(alpha.conj())),
        );

        reconstruction.record((inner_from_real_parts(&u, &v) - u.inner(&v)).norm());
        let via_adjoint = adjoint_pairing(&m, &u, &v).expect("dim");
        pairing_full.record((via_adjoint - m.apply(&u).expect("dim").inner(&v)).norm());

        let mn = m.compose(&other).expect("dim");
        let nm = other.compose(&m).expect("dim");
        trace.record((mn.real_trace() - nm.real_trace()).abs());

        realified.record(realify(&adj).max_abs_diff(&realify(&m).transpose()));
    }

    vec![
        split.finish(suite),
        linearity.finish(suite),
        pairing.finish(suite),
        involution.finish(suite),
        product.finish(suite),
        scalar.finish(suite),
        reconstruction.finish(suite),
        pairing_full.finish(suite),
        trace.finish(suite),
        realified.finish(suite),
    ]
}

fn run_doubling(cfg: &CampaignConfig) -> Vec<PropertyReport> {
    let suite = Suite::Doubling;
    let tol = cfg.tol;
    let mut ladder = Recorder::new("ladder_algebra", "eVV2a", tol);
    let mut j_alg = Recorder::new("j_algebra", "eVV3b", tol);
    let mut l_alg = Recorder::new("l_algebra", "eJM2a", tol);
    let mut commutant = Recorder::new("lift_commutant", "eVV4a", tol);
    let mut homomorphism = Recorder::new("lift_homomorphism", "eVD2t", tol);
    let mut trace_double = Recorder::new("trace_doubling", "eVD2tr", tol);
    let mut roundtrip = Recorder::new("unlift_roundtrip", "eVV4f", tol);
    let mut probs = Recorder::new("probability_equivalence", "eVP4b", tol);
    let mut evolution = Recorder::new("evolution_correspondence", "eVP2b", tol);
    let mut collapse = Recorder::new("collapse_correspondence", "eVP4c", tol);
    let mut symmetrization = Recorder::new("symmetrization_indistinguishable", "eVO1a", tol);
    let mut partner = Recorder::new("degenerate_partner_indistinguishable", "s24", tol);
    let mut mixture = Recorder::new("pure_lift_mixture", "eVO9a", tol);

    for trial in 0..cfg.trials {
        let n = cfg.base_dim;
        let mut r = trial_rng(cfg.seed, suite.name(), trial as u64);
        let space = DoubledSpace::new(n).expect("positive dim");
        let sys_a = gen_system_a(&mut r, n, degenerate_trial(trial));
        let sys_b = space.build_system_b(&sys_a).expect("lift of a valid system");
        let id = ComplexMatrix::identity(space.dim());

        let v = space.v();
        let vd = space.v_dag();
        let j = space.j();
        let l = space.l();
        ladder.record(
            (&v * &v)
                .max_abs()
                .max((&(&v * &vd) + &(&vd * &v)).max_abs_diff(&id))
                .max((&(&v * &vd) * &v).max_abs_diff(&v)),
        );
        j_alg.record(
            (&j * &j)
                .max_abs_diff(&id.scale(-Complex64::ONE))
                .max(j.dagger().max_abs_diff(&j.scale(-Complex64::ONE))),
        );
        l_alg.record(
            (&l * &l)
                .max_abs_diff(&id)
                .max((&l * &v).max_abs_diff(&v))
                .max((&v * &l).max_abs_diff(&v.scale(-Complex64::ONE)))
                .max(l.anticommutator(&j).expect("dim").max_abs())
                .max((&j * &l).max_abs_diff(&(&v + &vd))),
        );

        let m = gen_matrix(&mut r, n);
        let m2 = gen_matrix(&mut r, n);
        let lifted = space.lift_matrix(&m).expect("dim");
        let lifted2 = space.lift_matrix(&m2).expect("dim");
        let lifted_op = RealLinearOp::from_linear(lifted.clone()).expect("square");
        commutant.record(
            space
                .lift_violation(&lifted_op)
                .expect("dim")
                .max(lifted.commutator(&j).expect("dim").max_abs()),
        );
        homomorphism.record(
            space
                .lift_matrix(&(&m * &m2))
                .expect("dim")
                .max_abs_diff(&(&lifted * &lifted2))
                .max(
                    space
                        .lift_matrix(&(&m + &m2))
                        .expect("dim")
                        .max_abs_diff(&(&lifted + &lifted2)),
                ),
        );
        trace_double.record((lifted.trace() - m.trace().scale(2.0)).norm());
        roundtrip.record(
            space
                .unlift_matrix(&lifted, tol)
                .expect("liftable by construction")
                .max_abs_diff(&m),
        );

        let rho_a = gen_density(&mut r, n);
        let rho_b = space.lift_density(&rho_a).expect("dim");
        let obs_a = &sys_a.observables[0];
        let obs_b = &sys_b.observables[0];
        let dec_a = SpectralDecomposition::of(obs_a).expect("hermitian");
        let dec_b = SpectralDecomposition::of(obs_b).expect("hermitian");
        let pa = dec_a.probabilities(&rho_a).expect("dim");
        let pb = dec_b.probabilities(&rho_b).expect("dim");
        probs.record(probability_gap(&pa, &pb).max(sorted_value_gap(
            dec_a.values().to_vec(),
            dec_b.values().to_vec(),
        )));

        let mut worst = 0.0f64;
        for &t in &cfg.time_points {
            let lhs = space
                .lift_density(&sys_a.evolve_density(&rho_a, t).expect("dim"))
                .expect("dim");
            let rhs = sys_b.evolve_density(&rho_b, t).expect("dim");
            worst = worst.max(lhs.matrix().max_abs_diff(rhs.matrix()));
            let psi = gen_state(&mut r, n);
            let lhs_pure = space
                .lift_state(&sys_a.evolve_state(&psi, t).expect("dim"))
                .expect("dim");
            let rhs_pure = sys_b
                .evolve_state(&space.lift_state(&psi).expect("dim"), t)
                .expect("dim");
            worst = worst.max(lhs_pure.max_abs_diff(&rhs_pure));
        }
        evolution.record(worst);

        let branch = pa
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .expect("non-empty spectrum");
        let lhs = space
            .lift_density(&dec_a.collapse(&rho_a, branch).expect("branch"))
            .expect("dim");
        let rhs = dec_b.collapse(&rho_b, branch).expect("branch");
        collapse.record(lhs.matrix().max_abs_diff(rhs.matrix()));

        let rho_1 = gen_density(&mut r, space.dim());
        let rho_2 = space.symmetrize_density(&rho_1).expect("dim");
        let constraint = space
            .lift_violation(&RealLinearOp::from_linear(rho_2.matrix().clone()).expect("square"))
            .expect("dim");
        let p1 = dec_b.probabilities(&rho_1).expect("dim");
        let p2 = dec_b.probabilities(&rho_2).expect("dim");
        let trace_drift = (rho_2.matrix().trace() - Complex64::ONE).norm();
        symmetrization.record(constraint.max(probability_gap(&p1, &p2)).max(trace_drift));

        let psi = gen_state(&mut r, n);
        let psi_b = space.lift_state(&psi).expect("dim");
        let twin = space.degenerate_partner(&psi_b).expect("dim");
        let p_state = dec_b.probabilities_pure(&psi_b).expect("dim");
        let p_twin = dec_b.probabilities_pure(&twin).expect("dim");
        partner.record(probability_gap(&p_state, &p_twin));

        let rho_pure = DensityMatrix::from_pure(&psi).expect("unit vector");
        let lifted_pure = space.lift_density(&rho_pure).expect("dim");
        let half = &psi_b.outer(&psi_b).scale(Complex64::new(0.5, 0.0))
            + &twin.outer(&twin).scale(Complex64::new(0.5, 0.0));
        let p_mix = dec_b
            .probabilities(&DensityMatrix::new(half.clone(), 1e-8).expect("mixture"))
            .expect("dim");
        mixture.record(
            lifted_pure
                .matrix()
                .max_abs_diff(&half)
                .max(probability_gap(&p_state, &p_mix)),
        );
    }

    vec![
        ladder.finish(suite),
        j_alg.finish(suite),
        l_alg.finish(suite),
        commutant.finish(suite),
        homomorphism.finish(suite),
        trace_double.finish(suite),
        roundtrip.finish(suite),
        probs.finish(suite),
        evolution.finish(suite),
        collapse.finish(suite),
        symmetrization.finish(suite),
        partner.finish(suite),
        mixture.finish(suite),
    ]
}

fn run_c_transform(cfg: &CampaignConfig) -> Vec<PropertyReport> {
    let suite = Suite::CTransform;
    let tol = cfg.tol;
    let mut involution = Recorder::new("u_involution", "eAU1u", tol);
    let mut self_adjoint = Recorder::new("u_self_adjoint", "eAD8u", tol);
    let mut interchange = Recorder::new("interchange_rules", "eAU2a", tol);
    let mut orthonormal = Recorder::new("orthonormal_image", "eAU1ga", tol);
    let mut norms = Recorder::new("norm_preservation", "eAD8r", tol);
    let mut closed_form = Recorder::new("observable_closed_form", "eES1b", tol);
    let mut spectra = Recorder::new("observable_spectrum", "eES4c", tol);
    let mut probs = Recorder::new("probability_equivalence", "eES7e", tol);
    let mut expect = Recorder::new("expectation_equivalence", "eES7f", tol);
    let mut collapse = Recorder::new("collapse_correspondence", "eES7g", tol);
    let mut evolution = Recorder::new("evolution_correspondence", "eEQ1x", tol);
    let mut structure = Recorder::new("hamiltonian_structure", "eEQ3b", tol);
    let mut signs = Recorder::new("sign_paired_spectrum", "eEQ8d", tol);
    let mut density = Recorder::new("density_statistics", "eMS1c", tol);
    let mut density_evo = Recorder::new("density_evolution", "eMS3a", tol);
    let mut real_route = Recorder::new("density_real_route", "eSC6z", tol);

    for trial in 0..cfg.trials {
        let n = cfg.base_dim;
        let mut r = trial_rng(cfg.seed, suite.name(), trial as u64);
        let space = DoubledSpace::new(n).expect("positive dim");
        let ut = UTransform::new(space);
        let sys_a = gen_system_a(&mut r, n, degenerate_trial(trial));
        let sys_b = space.build_system_b(&sys_a).expect("lift");
        let bundle = ut.build_system_c(&sys_b).expect("transform");
        let sys_c = &bundle.system;
        let u = ut.operator();
        let dn = space.dim();
        let id_op = RealLinearOp::identity(dn);

        involution.record(u.compose(u).expect("dim").max_abs_diff(&id_op));
        self_adjoint.record(u.adjoint().max_abs_diff(u));

        let i_op = RealLinearOp::scalar(dn, Complex64::I);
        let j_op = RealLinearOp::from_linear(space.j()).expect("square");
        let k_op = RealLinearOp::conjugation(dn);
        let l_op = RealLinearOp::from_linear(space.l()).expect("square");
        let conj = |m: &RealLinearOp| u.compose(m).expect("dim").compose(u).expect("dim");
        interchange.record(
            conj(&i_op)
                .max_abs_diff(&j_op)
                .max(conj(&j_op).max_abs_diff(&i_op))
                .max(conj(&k_op).max_abs_diff(&l_op))
                .max(conj(&l_op).max_abs_diff(&k_op)),
        );

        let mut ortho = 0.0f64;
        for mm in 0..dn {
            let gm = ut.map_state(&Vector::basis(dn, mm)).expect("dim");
            for nn in 0..dn {
                let gn = Vector::basis(dn, nn);
                let un = ut.map_state(&gn).expect("dim");
                let uin = ut
                    .map_state(&gn.scale(Complex64::I))
                    .expect("dim");
                let rebuilt = Complex64::new(real_inner(&gm, &un), -real_inner(&gm, &uin));
                let delta = if mm == nn { Complex64::ONE } else { Complex64::ZERO };
                ortho = ortho.max((rebuilt - delta).norm());
            }
        }
        orthonormal.record(ortho);

        let psi_b = gen_state(&mut r, dn);
        let psi_c = ut.map_state(&psi_b).expect("dim");
        norms.record((psi_c.norm() - psi_b.norm()).abs());

        let mut cf = 0.0f64;
        let mut sp = 0.0f64;
        let mut pr = 0.0f64;
        let mut ex = 0.0f64;
        let mut co = 0.0f64;
        for (obs_b, obs_c) in sys_b.observables.iter().zip(&sys_c.observables) {
            cf = cf.max(
                ut.transform_matrix(obs_b, tol)
                    .expect("lifted observable")
                    .max_abs_diff(obs_c)
                    .max(
                        ut.observable_closed_form(obs_b)
                            .expect("dim")
                            .max_abs_diff(obs_c),
                    ),
            );
            let dec_b = SpectralDecomposition::of(obs_b).expect("hermitian");
            let dec_c = SpectralDecomposition::of(obs_c).expect("hermitian");
            sp = sp.max(sorted_value_gap(
                dec_b.values().to_vec(),
                dec_c.values().to_vec(),
            ));
            let pb = dec_b.probabilities_pure(&psi_b).expect("dim");
            let pc = dec_c.probabilities_pure(&psi_c).expect("dim");
            pr = pr.max(probability_gap(&pb, &pc));
            let eb = psi_b.inner(&obs_b.apply(&psi_b).expect("dim")).re;
            let ec = psi_c.inner(&obs_c.apply(&psi_c).expect("dim")).re;
            ex = ex.max((eb - ec).abs());
            let branch = pb
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(k, _)| k)
                .expect("non-empty");
            let col_b = dec_b.collapse_pure(&psi_b, branch).expect("branch");
            let col_c = dec_c.collapse_pure(&psi_c, branch).expect("branch");
            co = co.max(ut.map_state(&col_b).expect("dim").max_abs_diff(&col_c));
        }
        closed_form.record(cf);
        spectra.record(sp);
        probs.record(pr);
        expect.record(ex);
        collapse.record(co);

        let mut evo = 0.0f64;
        for &t in &cfg.time_points {
            let lhs = ut
                .map_state(&sys_b.evolve_state(&psi_b, t).expect("dim"))
                .expect("dim");
            let rhs = sys_c.evolve_state(&psi_c, t).expect("dim");
            evo = evo.max(lhs.max_abs_diff(&rhs));
        }
        evolution.record(evo);

        let h_c = &sys_c.hamiltonian;
        let e_c = &sys_c.energy_observable;
        let minus_ij = space.j().scale(-Complex64::I);
        structure.record(
            h_c.max_abs_diff(&(&minus_ij * e_c))
                .max(h_c.hermiticity_error())
                .max(h_c.commutator(e_c).expect("dim").max_abs()),
        );

        let (vals_a, _) = sys_a.hamiltonian.eigh().expect("hermitian");
        let mut expected: Vec<f64> = vals_a.iter().flat_map(|&v| [v, -v]).collect();
        expected.sort_by(f64::total_cmp);
        let (vals_h, _) = h_c.eigh().expect("hermitian");
        signs.record(sorted_value_gap(expected, vals_h));

        let rho_b = gen_density(&mut r, dn);
        let rho_c = ut.map_density(&rho_b).expect("dim");
        let mut ds = (rho_c.matrix().trace() - Complex64::ONE).norm();
        ds = ds.max(rho_c.matrix().hermiticity_error());
        for (obs_b, obs_c) in sys_b.observables.iter().zip(&sys_c.observables) {
            ds = ds.max(
                (rho_b.expectation(obs_b).expect("dim") - rho_c.expectation(obs_c).expect("dim"))
                    .abs(),
            );
            let dec_b = SpectralDecomposition::of(obs_b).expect("hermitian");
            let dec_c = SpectralDecomposition::of(obs_c).expect("hermitian");
            ds = ds.max(probability_gap(
                &dec_b.probabilities(&rho_b).expect("dim"),
                &dec_c.probabilities(&rho_c).expect("dim"),
            ));
        }
        density.record(ds);

        let (p_b, vecs_b) = rho_b.eigensystem();
        let mut de = 0.0f64;
        for &t in &cfg.time_points {
            let evolved: Vec<Vector> = vecs_b
                .iter()
                .map(|v| sys_b.evolve_state(v, t).expect("dim"))
                .collect();
            let rhs = ut.map_ensemble(p_b, &evolved).expect("dim");
            let lhs = sys_c.evolve_density(&rho_c, t).expect("dim");
            de = de.max(lhs.matrix().max_abs_diff(rhs.matrix()));
            let rho_b_t = sys_b.evolve_density(&rho_b, t).expect("dim");
            de = de.max(
                (rho_b_t.expectation(&sys_b.observables[0]).expect("dim")
                    - lhs.expectation(&sys_c.observables[0]).expect("dim"))
                .abs(),
            );
        }
        density_evo.record(de);

        real_route.record(
            ut.map_density_real_route(&rho_b)
                .expect("dim")
                .max_abs_diff(rho_c.matrix()),
        );
    }

    vec![
        involution.finish(suite),
        self_adjoint.finish(suite),
        interchange.finish(suite),
        orthonormal.finish(suite),
        norms.finish(suite),
        closed_form.finish(suite),
        spectra.finish(suite),
        probs.finish(suite),
        expect.finish(suite),
        collapse.finish(suite),
        evolution.finish(suite),
        structure.finish(suite),
        signs.finish(suite),
        density.finish(suite),
        density_evo.finish(suite),
        real_route.finish(suite),
    ]
}

fn run_antilinear_injection(cfg: &CampaignConfig) -> Vec<PropertyReport> {
    let suite = Suite::AntilinearInjection;
    let tol = cfg.tol;
    let mut detection = Recorder::new("admissibility_detection", "eAH1f", 0.5);
    let mut self_adjoint = Recorder::new("transformed_term_self_adjoint", "eAH1a", tol);
    let mut trajectories = Recorder::new("trajectory_equivalence", "eAH0a", tol);
    let mut norms = Recorder::new("norm_preservation", "eAH0a", tol);
    let mut generator = Recorder::new("generator_condition", "s52b", 0.5);

    for trial in 0..cfg.trials {
        let n = cfg.base_dim;
        let mut r = trial_rng(cfg.seed, suite.name(), trial as u64);
        let space = DoubledSpace::new(n).expect("positive dim");
        let ut = UTransform::new(space);
        let h_a = gen_hamiltonian(&mut r, n, degenerate_trial(trial));
        let sys_b = space
            .build_system_b(
                &QuantumSystem::closed(SystemLabel::A, h_a.clone(), vec![], 1e-8).expect("hermitian"),
            )
            .expect("lift");
        let bundle = ut.build_system_c(&sys_b).expect("transform");
        let term = gen_admissible_term(&mut r, n);

        let admissible_seen = check_injection_condition(&term.as_operator(), tol).0;
        let bad = AntilinearTerm::new(&gen_hermitian(&mut r, n) + &ComplexMatrix::scalar(n, Complex64::new(2.0, 0.0)))
            .expect("square");
        let bad_rejected = matches!(
            inject_term(&ut, &bundle.system.hamiltonian, &bad, tol),
            Err(crate::error::Error::InadmissibleTerm(_))
        );
        detection.record_check(admissible_seen && bad_rejected);

        let injected = inject_term(&ut, &bundle.system.hamiltonian, &term, tol).expect("admissible");
        self_adjoint.record(
            injected
                .term
                .hermiticity_error()
                .max(injected.total_hamiltonian.hermiticity_error()),
        );

        let gen = RealLinearOp::from_linear(h_a)
            .expect("square")
            .add(&term.as_operator())
            .expect("dim")
            .scale_left(-Complex64::I);
        let psi0 = gen_state(&mut r, n);
        let psi0_c = ut
            .map_state(&space.lift_state(&psi0).expect("dim"))
            .expect("dim");
        let mut traj = 0.0f64;
        let mut nrm = 0.0f64;
        for &t in &cfg.time_points {
            let psi_t = evolve_real_linear(&gen, &psi0, t).expect("dim");
            nrm = nrm.max((psi_t.norm() - 1.0).abs());
            let lhs = ut
                .map_state(&space.lift_state(&psi_t).expect("dim"))
                .expect("dim");
            let rhs = exp_hermitian(&injected.total_hamiltonian, Complex64::new(0.0, -t))
                .expect("hermitian")
                .apply(&psi0_c)
                .expect("dim");
            traj = traj.max(lhs.max_abs_diff(&rhs));
        }
        trajectories.record(traj);
        norms.record(nrm);

        let g = RealLinearOp::from_parts(gen_hermitian(&mut r, n), term.matrix().clone())
            .expect("square parts");
        let eps = 1e-4;
        let check = check_generator(&g, eps, tol).expect("dim");
        let bound = 4.0 * g.max_abs() * g.max_abs() * (g.dim() as f64) * eps * eps;
        let bad_check = check_generator(&RealLinearOp::from_antilinear(bad.matrix().clone()).expect("square"), eps, tol)
            .expect("dim");
        generator.record_check(check.satisfied && check.unitarity_residual < bound && !bad_check.satisfied);
    }

    vec![
        detection.finish(suite),
        self_adjoint.finish(suite),
        trajectories.finish(suite),
        norms.finish(suite),
        generator.finish(suite),
    ]
}

fn run_time_reversal(cfg: &CampaignConfig) -> Vec<PropertyReport> {
    let suite = Suite::TimeReversal;
    let tol = cfg.tol;
    let mut antiunitary = Recorder::new("base_antiunitary", "TC1b", tol);
    let mut commutes_a = Recorder::new("base_commutes_with_hamiltonian", "TC1a", tol);
    let mut linear_unitary = Recorder::new("transformed_linear_unitary", "s52a", tol);
    let mut energy = Recorder::new("commutes_with_energy", "s52a", tol);
    let mut anticommute = Recorder::new("anticommutes_with_hamiltonian", "s52a", tol);
    let mut reversal = Recorder::new("reversed_dynamics", "s52a", tol);

    for trial in 0..cfg.trials {
        let n = cfg.base_dim;
        let mut r = trial_rng(cfg.seed, suite.name(), trial as u64);
        let space = DoubledSpace::new(n).expect("positive dim");
        let ut = UTransform::new(space);
        let (h_a, t_a) = gen_commuting_time_reversal(&mut r, n, degenerate_trial(trial));
        let sys_b = space
            .build_system_b(&QuantumSystem::closed(SystemLabel::A, h_a.clone(), vec![], 1e-8).expect("hermitian"))
            .expect("lift");
        let bundle = ut.build_system_c(&sys_b).expect("transform");

        antiunitary.record(
            t_a.adjoint()
                .compose(&t_a)
                .expect("dim")
                .max_abs_diff(&RealLinearOp::identity(n)),
        );
        let h_op = RealLinearOp::from_linear(h_a).expect("square");
        commutes_a.record(
            t_a.compose(&h_op)
                .expect("dim")
                .sub(&h_op.compose(&t_a).expect("dim"))
                .expect("dim")
                .max_abs(),
        );

        let tr = crate::applications::build_time_reversal(&ut, &t_a, 1e-8).expect("antiunitary");
        let t_c = &tr.transformed;
        let raw = ut.transform_op(&tr.lifted).expect("dim");
        linear_unitary.record(
            raw.antilinear_residue().max(
                (&t_c.dagger() * t_c).max_abs_diff(&ComplexMatrix::identity(space.dim())),
            ),
        );
        energy.record(
            t_c.commutator(&bundle.system.energy_observable)
                .expect("dim")
                .max_abs(),
        );
        anticommute.record(
            t_c.anticommutator(&bundle.system.hamiltonian)
                .expect("dim")
                .max_abs(),
        );

        let mut rev = 0.0f64;
        for &t in &cfg.time_points {
            let forward = propagator_of(&bundle.system, t);
            let backward = propagator_of(&bundle.system, -t);
            rev = rev.max(
                t_c.checked_mul(&forward)
                    .expect("dim")
                    .max_abs_diff(&backward.checked_mul(t_c).expect("dim")),
            );
        }
        reversal.record(rev);
    }

    vec![
        antiunitary.finish(suite),
        commutes_a.finish(suite),
        linear_unitary.finish(suite),
        energy.finish(suite),
        anticommute.finish(suite),
        reversal.finish(suite),
    ]
}

fn propagator_of(sys: &QuantumSystem, t: f64) -> ComplexMatrix {
    sys.propagator(t).expect("hermitian hamiltonian")
}

pub fn run_suite(suite: Suite, cfg: &CampaignConfig) -> Vec<PropertyReport> {
    match suite {
        Suite::AppendixCalculus => run_appendix_calculus(cfg),
        Suite::Doubling => run_doubling(cfg),
        Suite::CTransform => run_c_transform(cfg),
        Suite::AntilinearInjection => run_antilinear_injection(cfg),
        Suite::TimeReversal => run_time_reversal(cfg),
    }
}

pub fn run_suites(suites: &[Suite], cfg: &CampaignConfig) -> CampaignReport {
    let mut reports = Vec::new();
    for &suite in suites {
        reports.extend(run_suite(suite, cfg));
    }
    let overall_pass = reports.iter().all(|r| r.pass);
    CampaignReport {
        config: cfg.clone(),
        reports,
        overall_pass,
    }
}

pub fn run_campaign(cfg: &CampaignConfig) -> CampaignReport {
    run_suites(&Suite::ALL, cfg)
}
