//! Derivative-free simplex minimizer used by the numerical MLE fitters.
//!
//! Deliberately simple: deterministic Nelder-Mead with multi-start, which is
//! robust for the 2-parameter likelihoods here (they have flat ridges that
//! defeat naive gradient methods).

/// Result of one simplex run.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evals: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimize `f` starting from `x0`. Budget is counted in function
/// evaluations; convergence is a relative simplex-diameter test.
pub fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    max_evals: usize,
    tol: f64,
) -> OptimResult {
    let n = x0.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus per-coordinate perturbations (fminsearch-style).
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let fx0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..n {
        let mut xi = x0.to_vec();
        xi[i] += if xi[i] != 0.0 { 0.05 * xi[i].abs() } else { 0.00025 };
        let fxi = eval(&xi, &mut evals);
        simplex.push((xi, fxi));
    }

    let mut converged = false;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

        // Relative diameter of the simplex.
        let best = &simplex[0].0;
        let scale = 1.0 + best.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best.iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter / scale < tol {
            converged = simplex[0].1.is_finite();
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();

        let at = |c: f64| -> Vec<f64> {
            (0..n)
                .map(|i| centroid[i] + c * (centroid[i] - worst.0[i]))
                .collect()
        };

        let xr = at(REFLECT);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = at(EXPAND);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = at(CONTRACT);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = at(-CONTRACT);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (xi, bi) in entry.0.iter_mut().zip(best.iter()) {
                        *xi = bi + SHRINK * (*xi - bi);
                    }
                    entry.1 = eval(&entry.0, &mut evals);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    OptimResult {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        converged,
        evals,
    }
}

/// Multi-start wrapper: run from each start, keep the best converged result.
/// Returns `None` when no start converged to a finite value.
pub fn multi_start(
    f: &dyn Fn(&[f64]) -> f64,
    starts: &[Vec<f64>],
    max_evals: usize,
    tol: f64,
) -> Option<OptimResult> {
    let mut best: Option<OptimResult> = None;
    for s in starts {
        let r = nelder_mead(f, s, max_evals, tol);
        if r.converged && r.value.is_finite() {
            match &best {
                Some(b) if b.value <= r.value => {}
                _ => best = Some(r),
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(&f, &[-1.2, 1.0], 10_000, 1e-10);
        assert!(r.converged);
        assert_relative_eq!(r.x[0], 1.0, max_relative = 1e-4);
        assert_relative_eq!(r.x[1], 1.0, max_relative = 1e-4);
    }

    #[test]
    fn handles_infinite_regions() {
        // Quadratic with an infeasible half-plane.
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 2.0).powi(2) + x[1].powi(2)
            }
        };
        let r = nelder_mead(&f, &[0.5, 1.0], 10_000, 1e-10);
        assert!(r.converged);
        assert_relative_eq!(r.x[0], 2.0, epsilon = 1e-4);
    }

    #[test]
    fn multi_start_picks_best() {
        let f = |x: &[f64]| x[0].powi(4) - 3.0 * x[0].powi(2) + x[1].powi(2);
        let starts = vec![vec![2.0, 0.5], vec![-2.0, -0.5], vec![0.1, 0.1], vec![1.0, 1.0]];
        let r = multi_start(&f, &starts, 10_000, 1e-10).unwrap();
        // Global minima at x0 = ±sqrt(3/2).
        assert_relative_eq!(r.x[0].abs(), (1.5f64).sqrt(), max_relative = 1e-4);
    }

    #[test]
    fn reports_non_convergence_on_budget_exhaustion() {
        let f = |x: &[f64]| -x[0]; // unbounded below
        let r = nelder_mead(&f, &[0.0, 0.0], 200, 1e-12);
        assert!(!r.converged);
    }
}
