//! Validated states, measurements and two-party scenarios.
//!
//! Construction is eager: a [`DensityMatrix`], [`Povm`] or [`Scenario`]
//! that exists satisfies its invariants. The bipartite tensor convention is
//! Alice ⊗ Bob everywhere, and outcome labels are zero-based.

use crate::error::{Error, Result};
use crate::matcore::{herm_eig, partial_trace_second, ComplexMatrix};

/// A unit-trace positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks, in order: squareness, Hermiticity, unit trace, positivity.
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        matrix.require_square()?;
        let residual = matrix.hermiticity_residual()?;
        if residual > tol {
            return Err(Error::Hermiticity { residual });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol {
            return Err(Error::Trace {
                trace,
                residual: (trace - 1.0).abs(),
            });
        }
        let min_eigenvalue = herm_eig(&matrix, tol)?.min_eigenvalue();
        if min_eigenvalue < -tol {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Reduced state of the first factor of a `dim_a ⊗ dim_b` split.
    pub fn marginal_first(&self, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
        partial_trace_second(&self.matrix, dim_a, dim_b)
    }
}

pub fn validate_state(m: ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    DensityMatrix::new(m, tol)
}

/// A positive operator-valued measure with at least two outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

/// Outcome of the pairwise commutation test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationReport {
    pub self_commuting: bool,
    /// Largest `‖R_i R_j − R_j R_i‖` over all pairs, max-abs metric.
    pub max_commutator: f64,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if elements.len() < 2 {
            return Err(Error::Dimension(format!(
                "a POVM needs at least 2 elements, got {}",
                elements.len()
            )));
        }
        let dim = elements[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (i, e) in elements.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::Dimension(format!(
                    "element {i} is {}x{}, expected {dim}x{dim}",
                    e.rows(),
                    e.cols()
                )));
            }
            let min_eigenvalue = herm_eig(e, tol)?.min_eigenvalue();
            if min_eigenvalue < -tol {
                return Err(Error::NotPsd { min_eigenvalue });
            }
            sum = sum.add(e)?;
        }
        let residual = sum.max_abs_diff(&ComplexMatrix::identity(dim))?;
        if residual > tol {
            return Err(Error::Completeness { residual });
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ComplexMatrix {
        &self.elements[i]
    }

    pub fn is_self_commuting(&self, tol: f64) -> CommutationReport {
        let mut max_commutator = 0.0_f64;
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                let comm = a.commutator(b).expect("elements share one shape");
                max_commutator = max_commutator.max(comm.max_abs());
            }
        }
        CommutationReport {
            self_commuting: max_commutator <= tol,
            max_commutator,
        }
    }

    /// True when every element is `c·Π` for a projector `Π`, i.e. its
    /// nonzero eigenvalues coincide within `tol`. Zero elements qualify.
    pub fn is_scaled_projector_povm(&self, tol: f64) -> bool {
        self.elements.iter().all(|e| {
            let Ok(eig) = herm_eig(e, tol) else {
                return false;
            };
            let nonzero: Vec<f64> = eig.eigenvalues.into_iter().filter(|l| l.abs() > tol).collect();
            match nonzero.first() {
                None => true,
                Some(&first) => nonzero.iter().all(|&l| (l - first).abs() <= tol),
            }
        })
    }
}

pub fn validate_povm(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Povm> {
    Povm::new(elements, tol)
}

pub fn is_self_commuting(p: &Povm, tol: f64) -> CommutationReport {
    p.is_self_commuting(tol)
}

pub fn is_scaled_projector_povm(p: &Povm, tol: f64) -> bool {
    p.is_scaled_projector_povm(tol)
}

/// Shared state, Alice's sequential measurement and Bob's single measurement.
///
/// `post_unitaries`, when set, holds one unitary `U_{a0}` per Alice outcome
/// applied after her first measurement. `None` means the Lüders update.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    alice_dim: usize,
    bob_dim: usize,
    state: DensityMatrix,
    alice_povm: Povm,
    bob_povm: Povm,
    post_unitaries: Option<Vec<ComplexMatrix>>,
}

impl Scenario {
    pub fn new(
        state: DensityMatrix,
        alice_povm: Povm,
        bob_povm: Povm,
        post_unitaries: Option<Vec<ComplexMatrix>>,
        tol: f64,
    ) -> Result<Self> {
        let alice_dim = alice_povm.dim();
        let bob_dim = bob_povm.dim();
        if state.dim() != alice_dim * bob_dim {
            return Err(Error::Dimension(format!(
                "state is {0}x{0} but Alice ⊗ Bob is {1}x{1}",
                state.dim(),
                alice_dim * bob_dim
            )));
        }
        if let Some(us) = &post_unitaries {
            if us.len() != alice_povm.len() {
                return Err(Error::Dimension(format!(
                    "{} post-measurement unitaries for {} Alice outcomes",
                    us.len(),
                    alice_povm.len()
                )));
            }
            let id = ComplexMatrix::identity(alice_dim);
            for (index, u) in us.iter().enumerate() {
                if u.rows() != alice_dim || u.cols() != alice_dim {
                    return Err(Error::Dimension(format!(
                        "post-measurement unitary {index} is {}x{}, expected {alice_dim}x{alice_dim}",
                        u.rows(),
                        u.cols()
                    )));
                }
                let residual = u.adjoint().matmul(u)?.max_abs_diff(&id)?;
                if residual > tol {
                    return Err(Error::Unitarity { index, residual });
                }
            }
        }
        Ok(Self {
            alice_dim,
            bob_dim,
            state,
            alice_povm,
            bob_povm,
            post_unitaries,
        })
    }

    pub fn alice_dim(&self) -> usize {
        self.alice_dim
    }

    pub fn bob_dim(&self) -> usize {
        self.bob_dim
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn alice_povm(&self) -> &Povm {
        &self.alice_povm
    }

    pub fn bob_povm(&self) -> &Povm {
        &self.bob_povm
    }

    pub fn post_unitaries(&self) -> Option<&[ComplexMatrix]> {
        self.post_unitaries.as_deref()
    }

    pub fn n_alice(&self) -> usize {
        self.alice_povm.len()
    }

    pub fn n_bob(&self) -> usize {
        self.bob_povm.len()
    }
}
