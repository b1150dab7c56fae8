//! Heuristic maximization of the witness over states and measurements.
//!
//! The search space is an unconstrained real vector that [`decode`] maps
//! onto a valid [`Scenario`]:
//!
//! * the shared state is a pure state `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩` built from complex
//!   amplitudes on Alice ⊗ Bob, offset by `|0⟩` (the witness is convex in
//!   the state, so pure states suffice for maximization);
//! * a POVM with `n` outcomes comes from `n` complex matrices
//!   `A_i = P_i + 𝟙` as `B_i = L^{-1/2} A_i†A_i L^{-1/2}` with
//!   `L = Σ_i A_i†A_i`;
//! * a projective Alice measurement comes from one matrix `P + 𝟙`,
//!   orthonormalized to a unitary whose columns are dealt round-robin to
//!   the outcomes.
//!
//! The identity offsets put the all-zero and all-equal parameter vectors
//! in the valid region.
//!
//! Values returned by [`maximize`] are lower bounds on the largest
//! achievable witness, nothing more.

mod nelder_mead;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

pub use nelder_mead::{Minimum, NelderMead};

use crate::correlations::analyze;
use crate::error::{Error, Result};
use crate::matcore::{c, herm_eig, psd_sqrt, ComplexMatrix};
use crate::quantum::{DensityMatrix, Povm, Scenario};

/// Smallest admissible eigenvalue of the POVM normalizer `L`.
pub const SINGULAR_FLOOR: f64 = 1e-12;
/// Tolerance used to validate decoded objects.
pub const DECODE_TOL: f64 = 1e-9;
/// Offset of the initial simplex vertices from the start point.
pub const SIMPLEX_STEP: f64 = 0.1;
const MAX_START_DRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// State, Alice's POVM and Bob's POVM all vary.
    Full,
    /// The state is taken from [`OptConfig::fixed`].
    FixedState,
    /// Alice's POVM is taken from [`OptConfig::fixed`].
    FixedAlice,
    /// Alice is restricted to projective measurements.
    ProjectiveAlice,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::FixedState => "fixed-state",
            Self::FixedAlice => "fixed-alice",
            Self::ProjectiveAlice => "projective-alice",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.replace('_', "-").as_str() {
            "full" => Ok(Self::Full),
            "fixed-state" => Ok(Self::FixedState),
            "fixed-alice" => Ok(Self::FixedAlice),
            "projective-alice" => Ok(Self::ProjectiveAlice),
            _ => Err(format!(
                "unknown mode '{s}' (expected full, fixed-state, fixed-alice or projective-alice)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptConfig {
    pub alice_dim: usize,
    pub bob_dim: usize,
    pub n_alice_outcomes: usize,
    pub n_bob_outcomes: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub tol: f64,
    pub mode: Mode,
    /// Supplies the frozen state or Alice POVM in the fixed modes.
    pub fixed: Option<Scenario>,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    pub threads: Option<usize>,
}

impl OptConfig {
    pub fn new(alice_dim: usize, bob_dim: usize, n_alice_outcomes: usize, n_bob_outcomes: usize) -> Self {
        Self {
            alice_dim,
            bob_dim,
            n_alice_outcomes,
            n_bob_outcomes,
            restarts: 20,
            max_iters: 5000,
            seed: 0,
            tol: 1e-12,
            mode: Mode::Full,
            fixed: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alice_dim == 0 || self.bob_dim == 0 {
            return Err(Error::Dimension("dimensions must be positive".into()));
        }
        if self.n_alice_outcomes < 2 || self.n_bob_outcomes < 2 {
            return Err(Error::Dimension("every measurement needs at least 2 outcomes".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Dimension("at least one restart is required".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Dimension("convergence tolerance must be positive".into()));
        }
        if matches!(self.mode, Mode::FixedState | Mode::FixedAlice) {
            let fixed = self
                .fixed
                .as_ref()
                .ok_or_else(|| Error::Dimension(format!("mode {} needs a fixed scenario", self.mode)))?;
            if fixed.alice_dim() != self.alice_dim || fixed.bob_dim() != self.bob_dim {
                return Err(Error::Dimension(format!(
                    "fixed scenario is {}x{}, config is {}x{}",
                    fixed.alice_dim(),
                    fixed.bob_dim(),
                    self.alice_dim,
                    self.bob_dim
                )));
            }
            if self.mode == Mode::FixedAlice && fixed.n_alice() != self.n_alice_outcomes {
                return Err(Error::Dimension(format!(
                    "fixed Alice POVM has {} outcomes, config asks for {}",
                    fixed.n_alice(),
                    self.n_alice_outcomes
                )));
            }
        }
        Ok(())
    }

    fn state_len(&self) -> usize {
        match self.mode {
            Mode::FixedState => 0,
            _ => 2 * self.alice_dim * self.bob_dim,
        }
    }

    fn alice_len(&self) -> usize {
        let block = 2 * self.alice_dim * self.alice_dim;
        match self.mode {
            Mode::FixedAlice => 0,
            Mode::ProjectiveAlice => block,
            _ => self.n_alice_outcomes * block,
        }
    }

    fn bob_len(&self) -> usize {
        self.n_bob_outcomes * 2 * self.bob_dim * self.bob_dim
    }

    pub fn param_count(&self) -> usize {
        self.state_len() + self.alice_len() + self.bob_len()
    }
}

/// Real search coordinates for one [`OptConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector(pub Vec<f64>);

impl ParamVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone)]
pub struct OptResult {
    pub best_value: f64,
    pub best_scenario: Scenario,
    pub best_params: ParamVector,
    pub best_restart: usize,
    pub per_restart_values: Vec<f64>,
    /// Nelder-Mead iterations spent by each restart.
    pub iterations_used: Vec<usize>,
}

impl OptResult {
    pub fn total_iterations(&self) -> usize {
        self.iterations_used.iter().sum()
    }
}

fn complex_block(params: &[f64]) -> Vec<Complex64> {
    params.chunks_exact(2).map(|p| c(p[0], p[1])).collect()
}

/// `P + 𝟙` for the complex matrix `P` stored in `params`.
fn square_from(params: &[f64], dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::new(dim, dim, complex_block(params)).expect("parameters are finite and sized");
    for i in 0..dim {
        m[(i, i)] += c(1.0, 0.0);
    }
    m
}

fn check_finite(params: &[f64]) -> Result<()> {
    if let Some(pos) = params.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinite { row: pos, col: 0 });
    }
    Ok(())
}

fn decode_state(params: &[f64]) -> Result<DensityMatrix> {
    let mut amplitudes = complex_block(params);
    amplitudes[0] += c(1.0, 0.0);
    let norm_sqr: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
    if norm_sqr < SINGULAR_FLOOR {
        return Err(Error::Singular {
            min_eigenvalue: norm_sqr,
        });
    }
    let rho = ComplexMatrix::outer(&amplitudes).scale_real(1.0 / norm_sqr);
    DensityMatrix::new(rho, DECODE_TOL)
}

fn decode_povm(params: &[f64], outcomes: usize, dim: usize) -> Result<Povm> {
    let block = 2 * dim * dim;
    let grams = params
        .chunks_exact(block)
        .take(outcomes)
        .map(|p| {
            let a = square_from(p, dim);
            a.adjoint().matmul(&a)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = grams
        .iter()
        .try_fold(ComplexMatrix::zeros(dim, dim), |acc, g| acc.add(g))?;
    let inv_root = inverse_sqrt(&total)?;
    let elements = grams
        .iter()
        .map(|g| inv_root.matmul(g)?.matmul(&inv_root))
        .collect::<Result<Vec<_>>>()?;
    Povm::new(elements, DECODE_TOL)
}

fn inverse_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(m, DECODE_TOL)?;
    let min = eig.min_eigenvalue();
    if min < SINGULAR_FLOOR {
        return Err(Error::Singular { min_eigenvalue: min });
    }
    Ok(eig.map_spectrum(|l| 1.0 / l.sqrt()))
}

fn decode_projective(params: &[f64], outcomes: usize, dim: usize) -> Result<Povm> {
    let a = square_from(params, dim);
    let unitary = a.matmul(&inverse_sqrt(&a.adjoint().matmul(&a)?)?)?;
    let mut elements = vec![ComplexMatrix::zeros(dim, dim); outcomes];
    for k in 0..dim {
        let column = unitary.column(k);
        elements[k % outcomes] = elements[k % outcomes].add(&ComplexMatrix::outer(&column))?;
    }
    Povm::new(elements, DECODE_TOL)
}

/// Maps search coordinates onto a valid scenario.
pub fn decode(params: &ParamVector, cfg: &OptConfig) -> Result<Scenario> {
    let expected = cfg.param_count();
    let p = params.as_slice();
    if p.len() != expected {
        return Err(Error::ParamCount {
            expected,
            found: p.len(),
        });
    }
    check_finite(p)?;
    let (state_part, rest) = p.split_at(cfg.state_len());
    let (alice_part, bob_part) = rest.split_at(cfg.alice_len());

    let state = match (cfg.mode, &cfg.fixed) {
        (Mode::FixedState, Some(fixed)) => fixed.state().clone(),
        (Mode::FixedState, None) => return Err(Error::Dimension("fixed-state mode without a fixed scenario".into())),
        _ => decode_state(state_part)?,
    };
    let alice = match (cfg.mode, &cfg.fixed) {
        (Mode::FixedAlice, Some(fixed)) => fixed.alice_povm().clone(),
        (Mode::FixedAlice, None) => return Err(Error::Dimension("fixed-alice mode without a fixed scenario".into())),
        (Mode::ProjectiveAlice, _) => decode_projective(alice_part, cfg.n_alice_outcomes, cfg.alice_dim)?,
        _ => decode_povm(alice_part, cfg.n_alice_outcomes, cfg.alice_dim)?,
    };
    let bob = decode_povm(bob_part, cfg.n_bob_outcomes, cfg.bob_dim)?;
    Scenario::new(state, alice, bob, None, DECODE_TOL)
}

/// Stores `m − 𝟙`, undoing the decoder's offset.
fn push_matrix(out: &mut Vec<f64>, m: &ComplexMatrix) {
    let n = m.cols();
    for (k, z) in m.as_slice().iter().enumerate() {
        let diagonal = if k / n == k % n { 1.0 } else { 0.0 };
        out.push(z.re - diagonal);
        out.push(z.im);
    }
}

/// Inverse of [`decode`] up to the redundancy of the parameterization.
///
/// POVM elements are encoded by their square roots, so they decode back
/// exactly. The state is encoded by an eigenvector of its largest
/// eigenvalue, which is exact for pure states. Projective mode is not
/// encodable.
pub fn encode(s: &Scenario, cfg: &OptConfig) -> Result<ParamVector> {
    if cfg.mode == Mode::ProjectiveAlice {
        return Err(Error::Dimension("projective-alice parameters cannot be encoded".into()));
    }
    if s.alice_dim() != cfg.alice_dim
        || s.bob_dim() != cfg.bob_dim
        || s.n_alice() != cfg.n_alice_outcomes
        || s.n_bob() != cfg.n_bob_outcomes
    {
        return Err(Error::Dimension("scenario shape does not match the config".into()));
    }
    let mut out = Vec::with_capacity(cfg.param_count());
    if cfg.state_len() > 0 {
        let eig = herm_eig(s.state().matrix(), DECODE_TOL)?;
        let top = eig.eigenvectors.column(eig.eigenvalues.len() - 1);
        for (k, z) in top.into_iter().enumerate() {
            out.push(if k == 0 { z.re - 1.0 } else { z.re });
            out.push(z.im);
        }
    }
    if cfg.alice_len() > 0 {
        for e in s.alice_povm().elements() {
            push_matrix(&mut out, &psd_sqrt(e, DECODE_TOL)?);
        }
    }
    for e in s.bob_povm().elements() {
        push_matrix(&mut out, &psd_sqrt(e, DECODE_TOL)?);
    }
    Ok(ParamVector(out))
}

/// Witness value of the decoded scenario.
pub fn evaluate(params: &ParamVector, cfg: &OptConfig) -> Result<f64> {
    let s = decode(params, cfg)?;
    Ok(analyze(&s)?.report.value)
}

struct RestartOutcome {
    value: f64,
    params: Vec<f64>,
    iterations: usize,
}

/// Random stream for restart `r`: stream `r` of the ChaCha generator seeded by `seed`.
fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn run_restart(cfg: &OptConfig, restart: usize) -> RestartOutcome {
    let mut rng = restart_rng(cfg.seed, restart);
    let n = cfg.param_count();
    let mut start: Vec<f64> = Vec::new();
    for _ in 0..MAX_START_DRAWS {
        start = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if decode(&ParamVector(start.clone()), cfg).is_ok() {
            break;
        }
    }
    let nm = NelderMead {
        max_iters: cfg.max_iters,
        tol: cfg.tol,
        step: SIMPLEX_STEP,
    };
    let objective = |x: &[f64]| match evaluate(&ParamVector(x.to_vec()), cfg) {
        Ok(v) => -v,
        Err(_) => f64::INFINITY,
    };
    let Minimum { x, fx, iterations, .. } = nm.minimize(objective, start);
    RestartOutcome {
        value: if fx.is_finite() { -fx } else { f64::NEG_INFINITY },
        params: x,
        iterations,
    }
}

/// Runs `cfg.restarts` independent Nelder-Mead searches and keeps the best.
///
/// The result depends only on `cfg` minus `threads`: each restart draws
/// from its own stream, and ties go to the lowest restart index.
pub fn maximize(cfg: &OptConfig) -> Result<OptResult> {
    cfg.validate()?;
    let run = || -> Vec<RestartOutcome> { (0..cfg.restarts).into_par_iter().map(|r| run_restart(cfg, r)).collect() };
    let outcomes = match cfg.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Dimension(format!("cannot build thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut best = 0;
    for (r, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = r;
        }
    }
    let best_params = ParamVector(outcomes[best].params.clone());
    let best_scenario = decode(&best_params, cfg)?;
    let best_value = analyze(&best_scenario)?.report.value;
    Ok(OptResult {
        best_value,
        best_scenario,
        best_params,
        best_restart: best,
        per_restart_values: outcomes.iter().map(|o| o.value).collect(),
        iterations_used: outcomes.iter().map(|o| o.iterations).collect(),
    })
}

/// Alternates fixed-Alice and fixed-state searches, starting from a full search.
///
/// Each round freezes the current best Alice POVM and optimizes the rest,
/// then freezes the state and optimizes both POVMs. A round's result is
/// adopted only if it improves the best value.
pub fn seesaw(cfg: &OptConfig, rounds: usize) -> Result<OptResult> {
    let base = OptConfig {
        mode: Mode::Full,
        fixed: None,
        ..cfg.clone()
    };
    let mut best = maximize(&base)?;
    for round in 0..rounds {
        for (offset, mode) in [(1, Mode::FixedAlice), (2, Mode::FixedState)] {
            let step_cfg = OptConfig {
                mode,
                fixed: Some(best.best_scenario.clone()),
                seed: cfg.seed.wrapping_add((2 * round + offset) as u64),
                ..cfg.clone()
            };
            let candidate = maximize(&step_cfg)?;
            if candidate.best_value > best.best_value {
                best = candidate;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{paper_scenario, Construction};

    #[test]
    fn param_counts_follow_layout() {
        let cfg = OptConfig::new(2, 2, 3, 2);
        assert_eq!(cfg.param_count(), 8 + 3 * 8 + 2 * 8);
        let mut proj = cfg.clone();
        proj.mode = Mode::ProjectiveAlice;
        assert_eq!(proj.param_count(), 8 + 8 + 16);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let cfg = OptConfig::new(2, 2, 3, 2);
        assert!(matches!(
            decode(&ParamVector(vec![0.1; 3]), &cfg),
            Err(Error::ParamCount { expected: 48, found: 3 })
        ));
    }

    #[test]
    fn constant_parameters_decode() {
        let cfg = OptConfig::new(2, 2, 3, 2);
        for value in [0.0, 0.7, -3.0] {
            let s = decode(&ParamVector(vec![value; cfg.param_count()]), &cfg).unwrap();
            assert_eq!(s.n_alice(), 3);
            // Identical A_i decode to 𝟙/n.
            let third = ComplexMatrix::identity(2).scale_real(1.0 / 3.0);
            for e in s.alice_povm().elements() {
                assert!(e.max_abs_diff(&third).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_normalizer_is_rejected() {
        // Every P_i = −𝟙 makes each A_i vanish.
        let cfg = OptConfig::new(2, 2, 3, 2);
        let mut params = vec![0.0; cfg.param_count()];
        let alice = &mut params[cfg.state_len()..cfg.state_len() + cfg.alice_len()];
        for block in alice.chunks_exact_mut(8) {
            block[0] = -1.0;
            block[6] = -1.0;
        }
        assert!(matches!(
            decode(&ParamVector(params), &cfg),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn trine_round_trip() {
        let cfg = OptConfig::new(2, 2, 3, 2);
        let s = paper_scenario(Construction::Trine, 2).unwrap();
        let params = encode(&s, &cfg).unwrap();
        let decoded = decode(&params, &cfg).unwrap();
        for (a, b) in decoded.alice_povm().elements().iter().zip(s.alice_povm().elements()) {
            assert!(a.max_abs_diff(b).unwrap() < 1e-12);
        }
        assert!((evaluate(&params, &cfg).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn projective_decoding_gives_projectors() {
        let mut cfg = OptConfig::new(3, 2, 2, 2);
        cfg.mode = Mode::ProjectiveAlice;
        let mut rng = restart_rng(4, 0);
        let params: Vec<f64> = (0..cfg.param_count())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let s = decode(&ParamVector(params), &cfg).unwrap();
        for e in s.alice_povm().elements() {
            assert!(e.matmul(e).unwrap().max_abs_diff(e).unwrap() < 1e-10);
        }
        assert!(s.alice_povm().is_self_commuting(1e-10).self_commuting);
    }

    #[test]
    fn fixed_modes_need_a_scenario() {
        let mut cfg = OptConfig::new(2, 2, 3, 2);
        cfg.mode = Mode::FixedState;
        assert!(cfg.validate().is_err());
        cfg.fixed = Some(paper_scenario(Construction::Trine, 2).unwrap());
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.param_count(), 3 * 8 + 2 * 8);
        cfg.mode = Mode::FixedAlice;
        cfg.n_alice_outcomes = 4;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn fixed_alice_keeps_the_trine() {
        let trine = paper_scenario(Construction::Trine, 2).unwrap();
        let mut cfg = OptConfig::new(2, 2, 3, 2);
        cfg.mode = Mode::FixedAlice;
        cfg.fixed = Some(trine.clone());
        cfg.restarts = 2;
        cfg.max_iters = 300;
        let r = maximize(&cfg).unwrap();
        assert_eq!(r.best_scenario.alice_povm(), trine.alice_povm());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("projective-alice".parse::<Mode>(), Ok(Mode::ProjectiveAlice));
        assert_eq!("fixed_state".parse::<Mode>(), Ok(Mode::FixedState));
        assert!("seesaw".parse::<Mode>().is_err());
    }
}
