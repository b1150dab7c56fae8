//! Explicit states and measurements that violate macroscopic no-signalling.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{c, pauli, ComplexMatrix};
use crate::quantum::{DensityMatrix, Povm, Scenario};

/// Tolerance used to validate the constructions before handing them out.
const CONSTRUCTION_TOL: f64 = 1e-12;

fn require_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Dimension(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// The qubit trine: three rank-one elements `⅓(𝟙 + n̂_k·σ)` with Bloch
/// vectors 120° apart in the x–z plane, the first along +z.
pub fn trine_povm() -> Povm {
    let id = ComplexMatrix::identity(2);
    let (x, z) = (pauli::x(), pauli::z());
    let s = 3f64.sqrt() / 2.0;
    let element = |cz: f64, cx: f64| {
        id.add(&z.scale_real(cz))
            .and_then(|m| m.add(&x.scale_real(cx)))
            .expect("2x2 shapes")
            .scale_real(1.0 / 3.0)
    };
    let elements = vec![element(1.0, 0.0), element(-0.5, s), element(-0.5, -s)];
    Povm::new(elements, CONSTRUCTION_TOL).expect("trine is a valid POVM")
}

/// `(1/d) Σ_i |ii⟩⟨ii|` on `d ⊗ d`.
pub fn classical_corr_state(d: usize) -> Result<DensityMatrix> {
    require_dim(d)?;
    let mut diag = vec![0.0; d * d];
    for i in 0..d {
        diag[i * d + i] = 1.0 / d as f64;
    }
    DensityMatrix::new(ComplexMatrix::diag_real(&diag), CONSTRUCTION_TOL)
}

/// Fourier-basis vector `|μ_i⟩ = d^{-1/2} Σ_k ω^{(2d−i)k} |k⟩`, `ω = e^{2πi/d}`,
/// labelled by `i ∈ [d, 2d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierVector {
    pub d: usize,
    pub index: usize,
    pub amplitudes: Vec<Complex64>,
}

impl FourierVector {
    pub fn new(d: usize, index: usize) -> Result<Self> {
        require_dim(d)?;
        if !(d..2 * d).contains(&index) {
            return Err(Error::Dimension(format!(
                "Fourier label {index} outside [{d}, {})",
                2 * d
            )));
        }
        let norm = 1.0 / (d as f64).sqrt();
        let amplitudes = (0..d)
            .map(|k| {
                let exponent = ((2 * d - index) * k) % d;
                Complex64::from_polar(norm, 2.0 * PI * exponent as f64 / d as f64)
            })
            .collect();
        Ok(Self { d, index, amplitudes })
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }
}

/// `2d` outcomes: `½|i⟩⟨i|` for `i < d`, then `½|μ_i⟩⟨μ_i|` for `d ≤ i < 2d`.
pub fn dual_basis_povm(d: usize) -> Result<Povm> {
    require_dim(d)?;
    let mut elements = Vec::with_capacity(2 * d);
    for i in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, i)] = c(0.5, 0.0);
        elements.push(e);
    }
    for i in d..2 * d {
        elements.push(FourierVector::new(d, i)?.projector().scale_real(0.5));
    }
    Povm::new(elements, CONSTRUCTION_TOL)
}

pub fn computational_povm(d: usize) -> Result<Povm> {
    require_dim(d)?;
    let elements = (0..d)
        .map(|b| {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(b, b)] = c(1.0, 0.0);
            e
        })
        .collect();
    Povm::new(elements, CONSTRUCTION_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Classically correlated qubit pair, trine for Alice, σ_z for Bob.
    Trine,
    /// Classically correlated qudit pair, dual-basis POVM for Alice,
    /// computational basis for Bob.
    DualBasis,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Trine => "trine",
            Self::DualBasis => "dual-basis",
        })
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "trine" => Ok(Self::Trine),
            "dual-basis" | "dual_basis" => Ok(Self::DualBasis),
            other => Err(format!("unknown construction '{other}' (expected trine or dual-basis)")),
        }
    }
}

/// Assembles one of the explicit violating scenarios with Lüders updates.
pub fn paper_scenario(kind: Construction, d: usize) -> Result<Scenario> {
    match kind {
        Construction::Trine => {
            if d != 2 {
                return Err(Error::Dimension(format!(
                    "the trine construction is a qubit scenario, got d = {d}"
                )));
            }
            Scenario::new(
                classical_corr_state(2)?,
                trine_povm(),
                computational_povm(2)?,
                None,
                CONSTRUCTION_TOL,
            )
        }
        Construction::DualBasis => Scenario::new(
            classical_corr_state(d)?,
            dual_basis_povm(d)?,
            computational_povm(d)?,
            None,
            CONSTRUCTION_TOL,
        ),
    }
}

/// `½(1 − 1/d)`, the witness value of the dual-basis construction.
pub fn dual_basis_witness_value(d: usize) -> f64 {
    0.5 * (1.0 - 1.0 / d as f64)
}
