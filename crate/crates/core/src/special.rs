//! Special-function support for the tail models.
//!
//! The only non-standard piece is the upper incomplete gamma function with a
//! possibly non-positive first argument, needed by the normalizing constant of
//! the power law with exponential cut-off. Library routines reject shape
//! parameters `a <= 0`, so we evaluate `ln Γ(a, x)` ourselves via a continued
//! fraction (large `x`) or a log-space downward recurrence from a positive
//! shape (small `x`), with an adaptive-quadrature fallback for extreme shapes.

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_74;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard normal survival function P(Z >= z).
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

/// ln of the standard normal survival function, stable for large `z`.
pub fn log_normal_sf(z: f64) -> f64 {
    if z < 10.0 {
        normal_sf(z).ln()
    } else {
        // Asymptotic expansion of Mills' ratio.
        let z2 = z * z;
        -0.5 * z2 - z.ln() - LN_SQRT_2PI + (1.0 - 1.0 / z2 + 3.0 / (z2 * z2)).ln()
    }
}

/// Standard normal quantile function.
pub fn normal_quantile(p: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().inverse_cdf(p)
}

/// Upper tail of the chi-squared distribution with one degree of freedom.
pub fn chi2_sf_1df(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else {
        erfc((t / 2.0).sqrt())
    }
}

/// Two-sided standard normal p-value for a statistic `z`.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / SQRT_2)
}

/// ln(exp(la) - exp(lb)) for la >= lb.
fn log_sub_exp(la: f64, lb: f64) -> f64 {
    debug_assert!(la >= lb);
    if lb == f64::NEG_INFINITY {
        la
    } else {
        la + (-(lb - la).exp()).ln_1p()
    }
}

/// Regularized lower incomplete gamma P(a, x) by series; requires a > 0,
/// intended for x < a + 1.
fn lower_reg_series(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    (sum.ln() + a * x.ln() - x - ln_gamma(a)).exp()
}

/// ln Γ(a, x) by the Legendre continued fraction (modified Lentz).
/// Reliable for x >= 1, any a, and for a > 0 when x >= a + 1.
fn log_upper_gamma_cf(a: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    -x + a * x.ln() + h.ln()
}

/// ln Γ(a, x) for x > 0 and any real a with |a| not extreme.
///
/// Γ(a, x) = ∫_x^∞ t^(a-1) e^(-t) dt is positive for all real a when x > 0,
/// so the logarithm is always defined.
pub fn log_upper_gamma(a: f64, x: f64) -> f64 {
    assert!(x > 0.0, "log_upper_gamma requires x > 0");
    // Integer or near-integer non-positive shapes make the recurrence divide
    // by ~0; nudge off the lattice. The effect on ln Γ is O(1e-10).
    let a = if a <= 0.5 && (a - a.round()).abs() < 1e-10 {
        a.round() + 1e-10
    } else {
        a
    };
    if a > 0.0 {
        if x < a + 1.0 {
            let p = lower_reg_series(a, x);
            ln_gamma(a) + (-p).ln_1p()
        } else {
            log_upper_gamma_cf(a, x)
        }
    } else if x >= 1.0 {
        log_upper_gamma_cf(a, x)
    } else {
        // Raise the shape to a_top in [1, 2), then recur downward:
        //   Γ(b-1, x) = (Γ(b, x) - x^(b-1) e^(-x)) / (b - 1)
        // carried in log space; for b - 1 < 0 both reordered terms are
        // positive because t^(b-2) is decreasing on [x, ∞).
        let k = (-a).ceil() as i64 + 1;
        let a_top = a + k as f64;
        let mut lg = {
            let p = lower_reg_series(a_top, x);
            ln_gamma(a_top) + (-p).ln_1p()
        };
        let ln_x = x.ln();
        for j in (0..k).rev() {
            let b_minus_1 = a + j as f64; // shape we are stepping down to
            let lp = b_minus_1 * ln_x - x; // ln(x^(b-1) e^(-x))
            lg = if b_minus_1 > 0.0 {
                log_sub_exp(lg, lp) - b_minus_1.ln()
            } else {
                log_sub_exp(lp, lg) - (-b_minus_1).ln()
            };
        }
        lg
    }
}

/// ln ∫_lower^∞ x^(-alpha) e^(-lambda x) dx for lambda > 0, lower > 0.
///
/// This is the (unnormalized) tail mass of the cut-off power law. Routed
/// through the incomplete gamma identity for moderate exponents and through
/// adaptive quadrature when |1 - alpha| is large.
pub fn log_cutoff_tail_mass(alpha: f64, lambda: f64, lower: f64) -> f64 {
    assert!(lambda > 0.0 && lower > 0.0);
    let a = 1.0 - alpha;
    if a.abs() <= 50.0 {
        (alpha - 1.0) * lambda.ln() + log_upper_gamma(a, lambda * lower)
    } else {
        log_integrate_tail(alpha, lambda, lower)
    }
}

/// Direct quadrature route for the cut-off tail mass, in log space.
pub fn log_integrate_tail(alpha: f64, lambda: f64, lower: f64) -> f64 {
    let ln_f = |x: f64| -alpha * x.ln() - lambda * x;
    // Peak of the integrand on [lower, ∞).
    let x_peak = if alpha < 0.0 {
        (-alpha / lambda).max(lower)
    } else {
        lower
    };
    let ln_f_max = ln_f(x_peak);
    // Find an upper limit where the integrand is negligible.
    let mut hi = (x_peak + 1.0 / lambda).max(2.0 * x_peak);
    while ln_f(hi) - ln_f_max > -745.0 {
        hi *= 2.0;
    }
    let g = |x: f64| (ln_f(x) - ln_f_max).exp();
    let integral = adaptive_simpson(&g, lower, hi, 1e-12, 60);
    ln_f_max + integral.ln()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}
