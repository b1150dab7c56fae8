//! Derivative-free simplex minimizer.

/// Reflection, expansion, contraction and shrink coefficients.
const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Iteration budget shared by all simplex rebuilds of one run.
    pub max_iters: usize,
    /// Stop when the spread of function values over the simplex falls below this.
    pub tol: f64,
    /// Offset of the initial vertices along each coordinate.
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Minimizes `f` from `x0`.
    ///
    /// After the simplex collapses it is rebuilt around the best vertex
    /// while budget remains; the run ends once a rebuild no longer improves
    /// the best value by more than `tol`. Non-finite values are treated as
    /// `+∞`.
    pub fn minimize(&self, mut f: impl FnMut(&[f64]) -> f64, x0: Vec<f64>) -> Minimum {
        let mut eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let f0 = eval(&x0);
        let mut best = (x0, f0);
        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iters {
            let (x, fx, used, collapsed) = self.run_simplex(&mut eval, &best.0, best.1, self.max_iters - iterations);
            iterations += used;
            let gained = best.1 - fx;
            if fx < best.1 {
                best = (x, fx);
            }
            if !collapsed {
                break;
            }
            if gained <= self.tol {
                converged = true;
                break;
            }
        }
        Minimum {
            x: best.0,
            fx: best.1,
            iterations,
            converged,
        }
    }

    fn run_simplex(
        &self,
        eval: &mut impl FnMut(&[f64]) -> f64,
        x0: &[f64],
        f0: f64,
        budget: usize,
    ) -> (Vec<f64>, f64, usize, bool) {
        let n = x0.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.step;
            let fx = eval(&x);
            simplex.push((x, fx));
        }

        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        for iteration in 0..budget {
            // Stable sort keeps ties in insertion order.
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            if spread.abs() <= self.tol || (simplex[0].1.is_infinite() && simplex[n].1.is_infinite()) {
                let (x, fx) = simplex.swap_remove(0);
                return (x, fx, iteration, true);
            }

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let worst = simplex[n].0.clone();
            let (f_best, f_second_worst, f_worst) = (simplex[0].1, simplex[n - 1].1, simplex[n].1);

            let along = |coef: f64, out: &mut Vec<f64>| {
                for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&worst) {
                    *o = c + coef * (c - w);
                }
            };

            along(ALPHA, &mut trial);
            let f_reflect = eval(&trial);
            if f_reflect < f_best {
                let reflected = trial.clone();
                along(GAMMA, &mut trial);
                let f_expand = eval(&trial);
                simplex[n] = if f_expand < f_reflect {
                    (trial.clone(), f_expand)
                } else {
                    (reflected, f_reflect)
                };
                continue;
            }
            if f_reflect < f_second_worst {
                simplex[n] = (trial.clone(), f_reflect);
                continue;
            }
            // Outside contraction when the reflection beat the worst vertex,
            // inside contraction otherwise.
            let (coef, reference) = if f_reflect < f_worst {
                (RHO * ALPHA, f_reflect)
            } else {
                (-RHO, f_worst)
            };
            along(coef, &mut trial);
            let f_contract = eval(&trial);
            if f_contract < reference {
                simplex[n] = (trial.clone(), f_contract);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for (x, fx) in simplex.iter_mut().skip(1) {
                for (xi, ai) in x.iter_mut().zip(&anchor) {
                    *xi = ai + SIGMA * (*xi - ai);
                }
                *fx = eval(x);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, fx) = simplex.swap_remove(0);
        (x, fx, budget, false)
    }
}
