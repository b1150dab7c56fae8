//! Sequential-measurement statistics and the macroscopic no-signalling tests.
//!
//! Two experiments are derived from one [`Scenario`]:
//!
//! * the sequential one, where Alice measures at `t0` and again at `t1`
//!   while Bob measures once, giving `p(a0, a1, b)`;
//! * the single-time one, where Alice only measures at `t1`, giving
//!   `p(a1, b)`.
//!
//! Any shared-randomness model in which Alice's first outcome never
//! influences her second, conditionally on the shared variable, forces
//! `Σ_{a0} p(a0, a1, b) = p(a1, b)`. The witness sums the absolute
//! deviations from that equality.

use crate::error::{Error, Result};
use crate::matcore::{partial_trace_second_weighted, psd_sqrt, trace_of_product, ComplexMatrix, DEFAULT_TOL};
use crate::quantum::{Povm, Scenario};

/// Round-off window for probabilities: values in `[-CLAMP, 0)` count as zero.
pub const CLAMP: f64 = 1e-12;
/// Default witness threshold below which a model is constructed.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

const NORMALIZATION_TOL: f64 = 1e-10;

fn check_distribution(values: &[f64], what: &str) -> Result<()> {
    if let Some(bad) = values.iter().find(|&&p| !(-CLAMP..=1.0 + CLAMP).contains(&p)) {
        return Err(Error::Table(format!("{what} has entry {bad} outside [0, 1]")));
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Table(format!("{what} sums to {total}, expected 1")));
    }
    Ok(())
}

fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// `p(a0, a1, b)`, stored row-major over `(a0, a1, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    n_a: usize,
    n_b: usize,
    p: Vec<f64>,
}

impl JointTable {
    pub fn new(n_a: usize, n_b: usize, p: Vec<f64>) -> Result<Self> {
        if n_a == 0 || n_b == 0 || p.len() != n_a * n_a * n_b {
            return Err(Error::Shape(format!(
                "{} entries for a joint table with n_a = {n_a}, n_b = {n_b}",
                p.len()
            )));
        }
        check_distribution(&p, "joint table")?;
        Ok(Self { n_a, n_b, p })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    #[inline]
    pub fn get(&self, a0: usize, a1: usize, b: usize) -> f64 {
        self.p[(a0 * self.n_a + a1) * self.n_b + b]
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    /// Same table with every entry clamped into `[0, 1]`.
    pub fn clamped(&self) -> Self {
        Self {
            n_a: self.n_a,
            n_b: self.n_b,
            p: self.p.iter().copied().map(clamp_probability).collect(),
        }
    }

    /// `Σ_{a0} p(a0, a1, b)`.
    pub fn sum_over_first(&self, a1: usize, b: usize) -> f64 {
        (0..self.n_a).map(|a0| self.get(a0, a1, b)).sum()
    }

    /// `Σ_{a1} p(a0, a1, b)`.
    pub fn sum_over_second(&self, a0: usize, b: usize) -> f64 {
        (0..self.n_a).map(|a1| self.get(a0, a1, b)).sum()
    }
}

/// `p(a1, b)` from the single-time experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleTimeTable {
    n_a: usize,
    n_b: usize,
    p: Vec<f64>,
}

impl SingleTimeTable {
    pub fn new(n_a: usize, n_b: usize, p: Vec<f64>) -> Result<Self> {
        if n_a == 0 || n_b == 0 || p.len() != n_a * n_b {
            return Err(Error::Shape(format!(
                "{} entries for a single-time table with n_a = {n_a}, n_b = {n_b}",
                p.len()
            )));
        }
        check_distribution(&p, "single-time table")?;
        Ok(Self { n_a, n_b, p })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.n_b + b]
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn clamped(&self) -> Self {
        Self {
            n_a: self.n_a,
            n_b: self.n_b,
            p: self.p.iter().copied().map(clamp_probability).collect(),
        }
    }

    /// Alice's marginal `p(a) = Σ_b p(a, b)`.
    pub fn alice_marginal(&self, a: usize) -> f64 {
        (0..self.n_b).map(|b| self.get(a, b)).sum()
    }
}

/// `Δ[a1][b] = Σ_{a0} p(a0, a1, b) − p(a1, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualTable {
    n_a: usize,
    n_b: usize,
    delta: Vec<f64>,
}

impl ResidualTable {
    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    #[inline]
    pub fn get(&self, a1: usize, b: usize) -> f64 {
        self.delta[a1 * self.n_b + b]
    }

    pub fn values(&self) -> &[f64] {
        &self.delta
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.delta.chunks(self.n_b).map(<[_]>::to_vec).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.delta.iter().map(|d| d.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    /// `Σ_{a1,b} |Δ[a1][b]|`.
    pub value: f64,
    pub residuals: ResidualTable,
    pub nsit_residual: f64,
}

/// Alice's effective operators `√R_{a0} U†_{a0} R_{a1} U_{a0} √R_{a0}`,
/// indexed `[a0 * n + a1]`.
pub fn sequential_operators(alice: &Povm, post_unitaries: Option<&[ComplexMatrix]>) -> Result<Vec<ComplexMatrix>> {
    let n = alice.len();
    let roots = alice
        .elements()
        .iter()
        .map(|r| psd_sqrt(r, DEFAULT_TOL))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(n * n);
    for (a0, root) in roots.iter().enumerate() {
        for a1 in 0..n {
            let middle = match post_unitaries {
                Some(us) => {
                    let u = &us[a0];
                    u.adjoint().matmul(alice.element(a1))?.matmul(u)?
                }
                None => alice.element(a1).clone(),
            };
            out.push(root.matmul(&middle)?.matmul(root)?);
        }
    }
    Ok(out)
}

/// Bob-conditioned reduced operators `σ_b = Tr_B[(𝟙 ⊗ M_b) ρ]`, so that
/// `Tr[(K ⊗ M_b) ρ] = Tr[K σ_b]`.
fn bob_conditioned(s: &Scenario) -> Result<Vec<ComplexMatrix>> {
    s.bob_povm()
        .elements()
        .iter()
        .map(|m| partial_trace_second_weighted(s.state().matrix(), m, s.alice_dim(), s.bob_dim()))
        .collect()
}

pub fn sequential_joint(s: &Scenario) -> Result<JointTable> {
    let sigmas = bob_conditioned(s)?;
    let ops = sequential_operators(s.alice_povm(), s.post_unitaries())?;
    let (n_a, n_b) = (s.n_alice(), s.n_bob());
    let mut p = Vec::with_capacity(n_a * n_a * n_b);
    for k in &ops {
        for sigma in &sigmas {
            p.push(trace_of_product(k, sigma)?.re);
        }
    }
    JointTable::new(n_a, n_b, p)
}

pub fn single_time(s: &Scenario) -> Result<SingleTimeTable> {
    let sigmas = bob_conditioned(s)?;
    let (n_a, n_b) = (s.n_alice(), s.n_bob());
    let mut p = Vec::with_capacity(n_a * n_b);
    for r in s.alice_povm().elements() {
        for sigma in &sigmas {
            p.push(trace_of_product(r, sigma)?.re);
        }
    }
    SingleTimeTable::new(n_a, n_b, p)
}

fn check_shapes(joint: &JointTable, single: &SingleTimeTable) -> Result<()> {
    if joint.n_a != single.n_a || joint.n_b != single.n_b {
        return Err(Error::Shape(format!(
            "joint table is ({}, {}) but single-time table is ({}, {})",
            joint.n_a, joint.n_b, single.n_a, single.n_b
        )));
    }
    Ok(())
}

/// Largest NSIT violation on Alice's side, both directions:
/// `|Σ_{a0} p(a0,a1) − p(a1)|` and `|Σ_{a1} p(a0,a1) − p(a0)|`, with
/// Bob's outcome summed out and single-time marginals as the reference.
pub fn nsit_residual_from_tables(joint: &JointTable, single: &SingleTimeTable) -> Result<f64> {
    check_shapes(joint, single)?;
    let n_b = joint.n_b;
    let mut worst = 0.0_f64;
    for a in 0..joint.n_a {
        let reference = single.alice_marginal(a);
        let later: f64 = (0..n_b).map(|b| joint.sum_over_first(a, b)).sum();
        let earlier: f64 = (0..n_b).map(|b| joint.sum_over_second(a, b)).sum();
        worst = worst.max((later - reference).abs()).max((earlier - reference).abs());
    }
    Ok(worst)
}

pub fn nsit_residual(s: &Scenario) -> Result<f64> {
    nsit_residual_from_tables(&sequential_joint(s)?, &single_time(s)?)
}

pub fn mns_residuals(joint: &JointTable, single: &SingleTimeTable) -> Result<ResidualTable> {
    check_shapes(joint, single)?;
    let (n_a, n_b) = (joint.n_a, joint.n_b);
    let mut delta = Vec::with_capacity(n_a * n_b);
    for a1 in 0..n_a {
        for b in 0..n_b {
            delta.push(joint.sum_over_first(a1, b) - single.get(a1, b));
        }
    }
    Ok(ResidualTable { n_a, n_b, delta })
}

pub fn witness(joint: &JointTable, single: &SingleTimeTable) -> Result<WitnessReport> {
    let residuals = mns_residuals(joint, single)?;
    let value = residuals.delta.iter().map(|d| d.abs()).sum();
    let nsit_residual = nsit_residual_from_tables(joint, single)?;
    Ok(WitnessReport {
        value,
        residuals,
        nsit_residual,
    })
}

/// Both tables and the witness report for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub joint: JointTable,
    pub single: SingleTimeTable,
    pub report: WitnessReport,
}

pub fn analyze(s: &Scenario) -> Result<Analysis> {
    let joint = sequential_joint(s)?;
    let single = single_time(s)?;
    let report = witness(&joint, &single)?;
    Ok(Analysis { joint, single, report })
}

/// A finite shared-randomness model: `p(λ)`, Alice's two-time
/// distributions `p(a0, a1 | λ)` with her single-time distribution
/// `p(a | λ)`, and Bob's `p(b | λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MnsModel {
    n_a: usize,
    n_b: usize,
    weights: Vec<f64>,
    /// Per λ, row-major over `(a0, a1)`.
    alice_dists: Vec<Vec<f64>>,
    alice_single: Vec<Vec<f64>>,
    bob_dists: Vec<Vec<f64>>,
}

impl MnsModel {
    /// Validates normalization and the conditional no-signalling
    /// constraint: both one-time marginals of every `p(a0, a1 | λ)` equal
    /// `p(a | λ)` within `tol`.
    pub fn new(
        weights: Vec<f64>,
        alice_dists: Vec<Vec<f64>>,
        alice_single: Vec<Vec<f64>>,
        bob_dists: Vec<Vec<f64>>,
        tol: f64,
    ) -> Result<Self> {
        let labels = weights.len();
        if labels == 0 {
            return Err(Error::Degenerate("model has no hidden-variable labels".into()));
        }
        if alice_dists.len() != labels || alice_single.len() != labels || bob_dists.len() != labels {
            return Err(Error::Shape("per-label tables disagree on the label count".into()));
        }
        let n_a = alice_single[0].len();
        let n_b = bob_dists[0].len();
        if n_a == 0 || n_b == 0 {
            return Err(Error::Shape("empty outcome set".into()));
        }
        if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Table("p(λ) must be a probability distribution".into()));
        }
        for l in 0..labels {
            if alice_dists[l].len() != n_a * n_a || alice_single[l].len() != n_a || bob_dists[l].len() != n_b {
                return Err(Error::Shape(format!("label {l} has inconsistent outcome counts")));
            }
            check_distribution(&alice_dists[l], "p(a0, a1 | λ)")?;
            check_distribution(&alice_single[l], "p(a | λ)")?;
            check_distribution(&bob_dists[l], "p(b | λ)")?;
        }
        let model = Self {
            n_a,
            n_b,
            weights,
            alice_dists,
            alice_single,
            bob_dists,
        };
        let residual = model.conditional_nsit_residual();
        if residual > tol {
            return Err(Error::Table(format!(
                "conditional no-signalling violated by {residual:.3e}"
            )));
        }
        Ok(model)
    }

    pub fn labels(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alice_dist(&self, label: usize) -> &[f64] {
        &self.alice_dists[label]
    }

    pub fn alice_single(&self, label: usize) -> &[f64] {
        &self.alice_single[label]
    }

    pub fn bob_dist(&self, label: usize) -> &[f64] {
        &self.bob_dists[label]
    }

    /// Max over λ and outcomes of the deviation of either marginal of
    /// `p(a0, a1 | λ)` from `p(a | λ)`.
    pub fn conditional_nsit_residual(&self) -> f64 {
        let n = self.n_a;
        let mut worst = 0.0_f64;
        for (dist, single) in self.alice_dists.iter().zip(&self.alice_single) {
            for a in 0..n {
                let later: f64 = (0..n).map(|a0| dist[a0 * n + a]).sum();
                let earlier: f64 = (0..n).map(|a1| dist[a * n + a1]).sum();
                worst = worst.max((later - single[a]).abs()).max((earlier - single[a]).abs());
            }
        }
        worst
    }

    /// The sequential and single-time tables this model predicts.
    pub fn induced_tables(&self) -> Result<(JointTable, SingleTimeTable)> {
        let (n_a, n_b) = (self.n_a, self.n_b);
        let mut joint = vec![0.0; n_a * n_a * n_b];
        let mut single = vec![0.0; n_a * n_b];
        for l in 0..self.labels() {
            let w = self.weights[l];
            let bob = &self.bob_dists[l];
            for (pair, &pa) in self.alice_dists[l].iter().enumerate() {
                for (b, &pb) in bob.iter().enumerate() {
                    joint[pair * n_b + b] += w * pa * pb;
                }
            }
            for (a, &pa) in self.alice_single[l].iter().enumerate() {
                for (b, &pb) in bob.iter().enumerate() {
                    single[a * n_b + b] += w * pa * pb;
                }
            }
        }
        Ok((
            JointTable::new(n_a, n_b, joint)?,
            SingleTimeTable::new(n_a, n_b, single)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MnsOutcome {
    Feasible(MnsModel),
    /// The witness exceeds the tolerance; no such model exists.
    Infeasible {
        value: f64,
    },
}

/// Builds a shared-randomness model reproducing both tables when the
/// witness is at most `tol`.
///
/// The hidden variable is Bob's outcome: `p(λ = b) = p(b)`, Bob answers
/// `b` deterministically, and Alice samples from the conditionals
/// `p(a0, a1 | b)` and `p(a | b)`. Labels with zero weight are dropped.
pub fn construct_mns_model(joint: &JointTable, single: &SingleTimeTable, tol: f64) -> Result<MnsOutcome> {
    let report = witness(joint, single)?;
    if report.value > tol {
        return Ok(MnsOutcome::Infeasible { value: report.value });
    }
    let (n_a, n_b) = (joint.n_a, joint.n_b);
    let mut weights = Vec::new();
    let mut alice_dists = Vec::new();
    let mut alice_single = Vec::new();
    let mut bob_dists = Vec::new();
    for b in 0..n_b {
        let weight: f64 = (0..n_a * n_a).map(|pair| joint.p[pair * n_b + b]).sum();
        if weight <= CLAMP {
            continue;
        }
        weights.push(weight);
        alice_dists.push((0..n_a * n_a).map(|pair| joint.p[pair * n_b + b] / weight).collect());
        alice_single.push((0..n_a).map(|a| single.get(a, b) / weight).collect());
        let mut bob = vec![0.0; n_b];
        bob[b] = 1.0;
        bob_dists.push(bob);
    }
    if weights.is_empty() {
        return Err(Error::Degenerate("every Bob outcome has zero probability".into()));
    }
    Ok(MnsOutcome::Feasible(MnsModel {
        n_a,
        n_b,
        weights,
        alice_dists,
        alice_single,
        bob_dists,
    }))
}

/// Max deviation of `Σ_{a0} √R_{a0} R_{a1} √R_{a0}` from `𝟙/4d + R_{a1}²`
/// over `a1`, for a `2d`-outcome POVM on dimension `d`.
pub fn dual_basis_identity_check(p: &Povm, tol: f64) -> Result<f64> {
    let d = p.dim();
    if p.len() != 2 * d {
        return Err(Error::Dimension(format!(
            "identity check needs 2·{d} = {} elements, got {}",
            2 * d,
            p.len()
        )));
    }
    let roots = p
        .elements()
        .iter()
        .map(|r| psd_sqrt(r, tol))
        .collect::<Result<Vec<_>>>()?;
    let floor = ComplexMatrix::identity(d).scale_real(1.0 / (4.0 * d as f64));
    let mut worst = 0.0_f64;
    for r in p.elements() {
        let mut lhs = ComplexMatrix::zeros(d, d);
        for root in &roots {
            lhs = lhs.add(&root.matmul(r)?.matmul(root)?)?;
        }
        let rhs = floor.add(&r.matmul(r)?)?;
        worst = worst.max(lhs.max_abs_diff(&rhs)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{dual_basis_povm, paper_scenario, trine_povm, Construction};
    use crate::matcore::kron;
    use crate::quantum::DensityMatrix;

    /// Independent route: full `Tr[(K ⊗ M_b) ρ]` with explicit Kronecker products.
    fn joint_via_kron(s: &Scenario) -> Vec<f64> {
        let ops = sequential_operators(s.alice_povm(), s.post_unitaries()).unwrap();
        let mut out = Vec::new();
        for k in &ops {
            for m in s.bob_povm().elements() {
                out.push(kron(k, m).matmul(s.state().matrix()).unwrap().trace().re);
            }
        }
        out
    }

    #[test]
    fn trine_spot_values() {
        let s = paper_scenario(Construction::Trine, 2).unwrap();
        let joint = sequential_joint(&s).unwrap();
        let single = single_time(&s).unwrap();
        assert!((joint.get(0, 0, 0) - 2.0 / 9.0).abs() < 1e-12);
        assert!((single.get(0, 0) - 1.0 / 3.0).abs() < 1e-12);
        assert!(single.get(0, 1).abs() < 1e-12);
        assert!((joint.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (a, b) in joint.values().iter().zip(joint_via_kron(&s)) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn trine_witness_and_residuals() {
        let s = paper_scenario(Construction::Trine, 2).unwrap();
        let a = analyze(&s).unwrap();
        assert!((a.report.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(a.report.nsit_residual < 1e-12);
        assert!((a.report.residuals.get(0, 0) + 1.0 / 12.0).abs() < 1e-12);
        assert!((a.report.residuals.get(1, 0).abs() - 1.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn dual_basis_qubit_spot_value() {
        let s = paper_scenario(Construction::DualBasis, 2).unwrap();
        let joint = sequential_joint(&s).unwrap();
        assert!((joint.get(0, 0, 0) - 1.0 / 8.0).abs() < 1e-12);
        let a = analyze(&s).unwrap();
        assert!((a.report.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn nsit_breaks_for_pure_product_state() {
        let mut rho = ComplexMatrix::zeros(4, 4);
        rho[(0, 0)] = crate::matcore::c(1.0, 0.0);
        let s = Scenario::new(
            DensityMatrix::new(rho, 1e-12).unwrap(),
            trine_povm(),
            crate::constructions::computational_povm(2).unwrap(),
            None,
            1e-12,
        )
        .unwrap();
        // Oracle: ρ_A = |0⟩⟨0|, Σ_{a0} √R R_0 √R = ⅓Π_0 + 𝟙/6 gives ½ vs p(0) = ⅔.
        let r = nsit_residual(&s).unwrap();
        assert!((r - 1.0 / 6.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let t = analyze(&paper_scenario(Construction::Trine, 2).unwrap()).unwrap();
        let d = analyze(&paper_scenario(Construction::DualBasis, 2).unwrap()).unwrap();
        assert!(matches!(witness(&t.joint, &d.single), Err(Error::Shape(_))));
        assert!(matches!(mns_residuals(&d.joint, &t.single), Err(Error::Shape(_))));
    }

    #[test]
    fn table_constructors_validate() {
        assert!(JointTable::new(2, 1, vec![0.25; 4]).is_ok());
        assert!(matches!(JointTable::new(2, 1, vec![0.25; 3]), Err(Error::Shape(_))));
        assert!(matches!(JointTable::new(2, 1, vec![0.5; 4]), Err(Error::Table(_))));
        assert!(matches!(
            SingleTimeTable::new(2, 1, vec![1.5, -0.5]),
            Err(Error::Table(_))
        ));
        let t = JointTable::new(1, 2, vec![1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(t.clamped().values(), &[1.0, 0.0]);
    }

    #[test]
    fn deterministic_product_tables_give_one_label() {
        let mut joint = vec![0.0; 3 * 3 * 2];
        joint[0] = 1.0;
        let mut single = vec![0.0; 3 * 2];
        single[0] = 1.0;
        let joint = JointTable::new(3, 2, joint).unwrap();
        let single = SingleTimeTable::new(3, 2, single).unwrap();
        let MnsOutcome::Feasible(model) = construct_mns_model(&joint, &single, DEFAULT_FEASIBILITY_TOL).unwrap() else {
            panic!("expected a model");
        };
        assert_eq!(model.labels(), 1);
        let (j, s) = model.induced_tables().unwrap();
        assert_eq!(j, joint);
        assert_eq!(s, single);
    }

    #[test]
    fn trine_tables_are_infeasible() {
        let a = analyze(&paper_scenario(Construction::Trine, 2).unwrap()).unwrap();
        match construct_mns_model(&a.joint, &a.single, DEFAULT_FEASIBILITY_TOL).unwrap() {
            MnsOutcome::Infeasible { value } => assert!((value - 1.0 / 3.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn model_validation_rejects_signalling_alice() {
        // p(a0, a1) = δ_{a0,0} δ_{a1,1}: marginals differ, so no single p(a) fits.
        let err = MnsModel::new(
            vec![1.0],
            vec![vec![0.0, 1.0, 0.0, 0.0]],
            vec![vec![0.5, 0.5]],
            vec![vec![1.0]],
            1e-9,
        );
        assert!(matches!(err, Err(Error::Table(_))));
        assert!(matches!(
            MnsModel::new(vec![], vec![], vec![], vec![], 1e-9),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn identity_check() {
        for d in 2..=5 {
            let dev = dual_basis_identity_check(&dual_basis_povm(d).unwrap(), 1e-9).unwrap();
            assert!(dev < 1e-10, "d = {d}: {dev}");
        }
        // d = 2, a1 = 0 by hand: ¼|0⟩⟨0|·... sums to 𝟙/8 + ¼|0⟩⟨0| = diag(3/8, 1/8).
        let p = dual_basis_povm(2).unwrap();
        let roots: Vec<_> = p.elements().iter().map(|r| psd_sqrt(r, 1e-9).unwrap()).collect();
        let lhs = roots.iter().fold(ComplexMatrix::zeros(2, 2), |acc, s| {
            acc.add(&s.matmul(p.element(0)).unwrap().matmul(s).unwrap()).unwrap()
        });
        assert!(lhs.max_abs_diff(&ComplexMatrix::diag_real(&[0.375, 0.125])).unwrap() < 1e-12);
        assert!(matches!(
            dual_basis_identity_check(&trine_povm(), 1e-9),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn post_unitaries_enter_the_joint_table() {
        let base = paper_scenario(Construction::Trine, 2).unwrap();
        let ids = vec![ComplexMatrix::identity(2); 3];
        let with_ids = Scenario::new(
            base.state().clone(),
            base.alice_povm().clone(),
            base.bob_povm().clone(),
            Some(ids),
            1e-12,
        )
        .unwrap();
        assert_eq!(sequential_joint(&base).unwrap(), sequential_joint(&with_ids).unwrap());

        let flips = vec![crate::matcore::pauli::x(); 3];
        let flipped = Scenario::new(
            base.state().clone(),
            base.alice_povm().clone(),
            base.bob_povm().clone(),
            Some(flips),
            1e-12,
        )
        .unwrap();
        let joint = sequential_joint(&flipped).unwrap();
        for (a, b) in joint.values().iter().zip(joint_via_kron(&flipped)) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_ne!(joint, sequential_joint(&base).unwrap());
    }
}
