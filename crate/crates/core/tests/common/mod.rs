//! Random instances and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use seqmeas::matcore::{herm_eig, kron, partial_trace_second, ComplexMatrix, DEFAULT_TOL};
use seqmeas::quantum::{DensityMatrix, Povm, Scenario};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    ComplexMatrix::new(rows, cols, data).unwrap()
}

pub fn hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = gaussian(n, n, rng);
    g.add(&g.adjoint()).unwrap().scale_real(0.5)
}

/// `G G†` with `G` of shape `n × rank`.
pub fn psd(n: usize, rank: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = gaussian(n, rank, rng);
    g.matmul(&g.adjoint()).unwrap()
}

pub fn unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = gaussian(n, n, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for q in &cols {
            let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= overlap * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let rows: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
    ComplexMatrix::from_rows(&rows).unwrap()
}

pub fn state(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let rank = rng.random_range(1..=d);
    let m = psd(d, rank, rng);
    let t = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / t), DEFAULT_TOL).unwrap()
}

fn inverse_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    herm_eig(m, DEFAULT_TOL).unwrap().map_spectrum(|x| 1.0 / x.sqrt())
}

/// Generic POVM: `S^{-1/2} G_i S^{-1/2}` with `S = Σ G_i`.
pub fn povm(d: usize, k: usize, rng: &mut impl Rng) -> Povm {
    let min_rank = d.div_ceil(k);
    let gs: Vec<_> = (0..k).map(|_| psd(d, rng.random_range(min_rank..=d), rng)).collect();
    let mut total = ComplexMatrix::zeros(d, d);
    for g in &gs {
        total = total.add(g).unwrap();
    }
    let s = inverse_sqrt(&total);
    let elements = gs.iter().map(|g| s.matmul(g).unwrap().matmul(&s).unwrap()).collect();
    Povm::new(elements, DEFAULT_TOL).unwrap()
}

/// Projective measurement in a random basis; outcomes may be empty.
pub fn projective(d: usize, k: usize, rng: &mut impl Rng) -> Povm {
    let u = unitary(d, rng);
    let mut elements = vec![ComplexMatrix::zeros(d, d); k];
    for j in 0..d {
        let outcome = rng.random_range(0..k);
        let proj = ComplexMatrix::outer(&u.column(j));
        elements[outcome] = elements[outcome].add(&proj).unwrap();
    }
    Povm::new(elements, DEFAULT_TOL).unwrap()
}

/// Commuting POVM `U diag(w_i) U†` with per-basis-vector distributions `w`.
pub fn self_commuting(d: usize, k: usize, rng: &mut impl Rng) -> Povm {
    let u = unitary(d, rng);
    let columns: Vec<Vec<f64>> = (0..d)
        .map(|_| {
            let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / total).collect()
        })
        .collect();
    let weights: Vec<Vec<f64>> = (0..k).map(|i| columns.iter().map(|col| col[i]).collect()).collect();
    let elements = weights
        .iter()
        .map(|w| {
            u.matmul(&ComplexMatrix::diag_real(w))
                .unwrap()
                .matmul(&u.adjoint())
                .unwrap()
        })
        .collect();
    Povm::new(elements, DEFAULT_TOL).unwrap()
}

pub fn scenario(alice: Povm, bob_dim: usize, n_bob: usize, rng: &mut impl Rng) -> Scenario {
    let rho = state(alice.dim() * bob_dim, rng);
    let bob = povm(bob_dim, n_bob, rng);
    Scenario::new(rho, alice, bob, None, DEFAULT_TOL).unwrap()
}

pub fn random_scenario(rng: &mut impl Rng) -> Scenario {
    let da = rng.random_range(2..=3);
    let db = rng.random_range(2..=3);
    let na = rng.random_range(2..=4);
    let nb = rng.random_range(2..=3);
    let alice = povm(da, na, rng);
    scenario(alice, db, nb, rng)
}

/// `Tr((R ⊗ M) ρ)` through the full Kronecker product.
pub fn kron_expectation(r: &ComplexMatrix, m: &ComplexMatrix, rho: &ComplexMatrix) -> f64 {
    kron(r, m).matmul(rho).unwrap().trace().re
}

/// Bob-conditional reduced operator `Tr_B[(𝟙 ⊗ M) ρ]` through the Kronecker product.
pub fn bob_conditioned(m: &ComplexMatrix, rho: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    let lifted = kron(&ComplexMatrix::identity(da), m).matmul(rho).unwrap();
    partial_trace_second(&lifted, da, db).unwrap()
}
