//! Derivative-free 1-D search: bisection, golden section, and the grid-seeded
//! supremum search behind the critical exponents.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{beta0_concentric, beta0_unit_ball};

/// Points in the coarse pre-scan of [`maximize_scalar`].
pub const PRESCAN_POINTS: usize = 2048;

/// Distance kept from the open ends of `(0, √2 - 1)`.
pub const LAMBDA_EPS: f64 = 1e-9;

/// Argument tolerance used by the exponent searches.
pub const EXPONENT_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupremumResult {
    pub argmax: f64,
    pub value: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
    /// Arguments near the optimum where the objective jumps.
    pub discontinuity_notes: Vec<f64>,
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
///
/// Returns `(x, f(x), evaluations)` for the best point evaluated, so the value is
/// always attained even when `f` is not unimodal.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> (f64, f64, usize) {
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    let mut best = if fd > fc { (d, fd) } else { (c, fc) };
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            evals += 1;
            if fc > best.1 || (fc == best.1 && c < best.0) {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            evals += 1;
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    (best.0, best.1, evals)
}

/// Bisection root of `g` on `[lo, hi]` to argument tolerance `tol`.
pub fn find_root<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if !(g_lo * g_hi < 0.0) {
        return Err(Error::Bracket { lo, hi, g_lo, g_hi });
    }
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Global maximum of `objective` on `[lo, hi]`: a [`PRESCAN_POINTS`]-point scan
/// followed by golden-section refinement of the pieces adjacent to the best
/// grid point. Non-finite values are ignored; ties go to the smallest argument.
pub fn maximize_scalar<F: Fn(f64) -> f64>(objective: F, lo: f64, hi: f64, tol: f64) -> Result<SupremumResult> {
    maximize_scalar_with_breaks(objective, lo, hi, tol, |_, _| Vec::new())
}

/// [`maximize_scalar`] for piecewise-continuous objectives. `breaks(a, b)` lists
/// jump locations in `(a, b)`, each given as the last point of the piece to its
/// left; every piece is refined separately and the jump points themselves are
/// candidates.
pub fn maximize_scalar_with_breaks<F, B>(objective: F, lo: f64, hi: f64, tol: f64, breaks: B) -> Result<SupremumResult>
where
    F: Fn(f64) -> f64,
    B: Fn(f64, f64) -> Vec<f64>,
{
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty search interval [{lo}, {hi}]")));
    }
    let f = |x: f64| {
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };
    let n = PRESCAN_POINTS;
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * step }).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut evals = n;
    let mut best_i = 0;
    for i in 1..n {
        if vals[i] > vals[best_i] {
            best_i = i;
        }
    }
    if vals[best_i] == f64::NEG_INFINITY {
        return Err(Error::NonFiniteObjective { lo, hi });
    }
    let a = grid[best_i.saturating_sub(1)];
    let b = grid[(best_i + 1).min(n - 1)];
    let mut best = (grid[best_i], vals[best_i]);
    let consider = |x: f64, v: f64, best: &mut (f64, f64)| {
        if v > best.1 || (v == best.1 && x < best.0) {
            *best = (x, v);
        }
    };

    let jumps = breaks(a, b);
    let mut edges = vec![a];
    edges.extend(jumps.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    for w in edges.windows(2) {
        let (x, v, e) = golden_max(f, w[0], w[1], tol, 200);
        evals += e;
        consider(x, v, &mut best);
    }
    for &j in &jumps {
        let v = f(j);
        evals += 1;
        consider(j, v, &mut best);
    }
    Ok(SupremumResult {
        argmax: best.0,
        value: best.1,
        bracket: (a, b),
        evaluations: evals,
        discontinuity_notes: jumps,
    })
}

/// The four critical-exponent problems. Each has a growth base of the form
/// `ln α(p, λ) = A(λ) + (1 - 1/p) B(λ)` with `B < 0`, so `α > 1` exactly when
/// `p < B / (A + B)`; the exponent is the supremum of that ratio over
/// `λ ∈ (0, √2 - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exponent {
    /// General radially decreasing densities: `α = λ^{(p-1)/p} / sin^k β₀`.
    General,
    /// Gaussian measure, growth side.
    GaussianLower,
    /// Gaussian measure, decay side: `α = (e^{(1-λ²)/2} λ)^{(p-1)/p} / sin β₀`.
    GaussianUpper,
    /// Lebesgue measure on the unit ball: `α = λ^{(p-1)/p} / sin β₀`.
    UnitBall,
}

impl Exponent {
    pub const ALL: [Exponent; 4] = [Self::General, Self::GaussianLower, Self::GaussianUpper, Self::UnitBall];

    pub fn name(self) -> &'static str {
        match self {
            Self::General => "general",
            Self::GaussianLower => "gaussian-lower",
            Self::GaussianUpper => "gaussian-upper",
            Self::UnitBall => "unitball",
        }
    }

    /// Published reference value for the exponent.
    pub fn reference_value(self) -> f64 {
        match self {
            Self::General => 1.005_274,
            Self::GaussianLower => 1.011_871,
            Self::GaussianUpper => 1.049_427,
            Self::UnitBall => 1.039_46,
        }
    }

    pub fn domain() -> (f64, f64) {
        (LAMBDA_EPS, SQRT_2 - 1.0 - LAMBDA_EPS)
    }

    /// `(A(λ), B(λ))` in `ln α = A + (1 - 1/p) B`.
    pub fn growth_coefficients(self, lambda: f64) -> (f64, f64) {
        let beta = match self {
            Self::UnitBall => beta0_unit_ball(1.0, lambda),
            _ => beta0_concentric(lambda),
        };
        let Ok(beta) = beta else {
            return (f64::NAN, f64::NAN);
        };
        let ln_sin = beta.sin().ln();
        let ln_l = lambda.ln();
        match self {
            Self::General => {
                let k = 1.0 / (1.0 + balance_integer(lambda, ln_sin) as f64);
                (-k * ln_sin, ln_l)
            }
            Self::GaussianLower => {
                let c2 = beta.cos().powi(2);
                let e = (-c2).exp();
                (-0.5 * c2 * e - ln_sin, 0.5 * e * (1.0 - lambda * lambda) + ln_l)
            }
            Self::GaussianUpper => (-ln_sin, 0.5 * (1.0 - lambda * lambda) + ln_l),
            Self::UnitBall => (-ln_sin, ln_l),
        }
    }

    /// `ln α(p, λ)`.
    pub fn log_growth_base(self, p: f64, lambda: f64) -> f64 {
        let (a, b) = self.growth_coefficients(lambda);
        a + (1.0 - 1.0 / p) * b
    }

    /// Critical `p` at this `λ`: the objective maximized by [`critical_exponent`].
    pub fn objective(self, lambda: f64) -> f64 {
        let (a, b) = self.growth_coefficients(lambda);
        b / (a + b)
    }

    /// Jump points of the objective inside `(a, b)`; only [`Exponent::General`] has any.
    pub fn breaks_in(self, a: f64, b: f64) -> Vec<f64> {
        match self {
            Self::General => integer_jumps(a, b),
            _ => Vec::new(),
        }
    }
}

/// `l = ⌈-ln(2+λ) / ln sin β₀⌉`, the smallest integer with `sin^{-l} β₀ ≥ 2 + λ`.
pub fn balance_integer(lambda: f64, ln_sin_beta0: f64) -> u64 {
    balance_ratio(lambda, ln_sin_beta0).ceil() as u64
}

fn balance_ratio(lambda: f64, ln_sin_beta0: f64) -> f64 {
    -(2.0 + lambda).ln() / ln_sin_beta0
}

fn ratio_at(lambda: f64) -> f64 {
    let b = beta0_concentric(lambda).expect("lambda inside (0, 1)");
    balance_ratio(lambda, b.sin().ln())
}

/// λ-values in `(a, b)` where `l(λ)` steps up, each returned on the side where
/// the smaller integer still applies. The ratio is increasing in λ.
fn integer_jumps(a: f64, b: f64) -> Vec<f64> {
    let (ra, rb) = (ratio_at(a), ratio_at(b));
    let mut out = Vec::new();
    let mut m = ra.floor() + 1.0;
    while m <= rb {
        let (mut lo, mut hi) = (a, b);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if ratio_at(mid) <= m {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(lo);
        m += 1.0;
    }
    out
}

/// Supremum over `λ ∈ (0, √2 - 1)` of the critical `p` for `kind`.
pub fn critical_exponent(kind: Exponent) -> Result<SupremumResult> {
    let (lo, hi) = Exponent::domain();
    maximize_scalar_with_breaks(|l| kind.objective(l), lo, hi, EXPONENT_TOL, |a, b| kind.breaks_in(a, b))
}

pub fn p0_general() -> Result<SupremumResult> {
    critical_exponent(Exponent::General)
}

pub fn p0_gaussian() -> Result<SupremumResult> {
    critical_exponent(Exponent::GaussianLower)
}

pub fn p1_gaussian() -> Result<SupremumResult> {
    critical_exponent(Exponent::GaussianUpper)
}

pub fn p0_unitball() -> Result<SupremumResult> {
    critical_exponent(Exponent::UnitBall)
}

/// `sup_λ ln α(p, λ)` over the exponent's domain.
pub fn sup_log_growth_base(kind: Exponent, p: f64) -> Result<SupremumResult> {
    let (lo, hi) = Exponent::domain();
    maximize_scalar_with_breaks(|l| kind.log_growth_base(p, l), lo, hi, EXPONENT_TOL, |a, b| kind.breaks_in(a, b))
}
