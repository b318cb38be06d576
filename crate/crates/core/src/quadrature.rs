//! Adaptive Gauss–Kronrod (7/15) quadrature, plain and in log space.
//!
//! [`integrate_log`] integrates `exp(log_f)` where `log_f` may be huge or tiny:
//! the integrand is shifted by its maximum before exponentiation and the domain
//! is truncated where `log_f` falls more than [`QuadOptions::truncation`] below
//! that maximum.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::logspace::{log_sum_exp, LogNonNegative};
use crate::optimize::golden_max;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Target relative accuracy of the integral.
    pub rel_tol: f64,
    /// Hard cap on integrand evaluations per call.
    pub max_evals: usize,
    /// Log-units below the maximum beyond which the integrand is dropped.
    pub truncation: f64,
    /// Probe points per segment when locating the maximum.
    pub probes: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_evals: 1_000_000,
            truncation: 46.0,
            probes: 129,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    /// False when the evaluation cap stopped refinement before `rel_tol` was met.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct LogQuadResult {
    pub value: LogNonNegative,
    pub rel_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Piece {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// Globally adaptive GK15 over the union of `intervals`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, intervals: &[(f64, f64)], opts: &QuadOptions) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    for &(a, b) in intervals {
        if b > a {
            heap.push(gk15(&f, a, b));
            evals += 15;
        }
    }
    let total = |h: &BinaryHeap<Piece>| -> (f64, f64) {
        h.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = total(&heap);
    let mut converged = true;
    loop {
        if error <= opts.rel_tol * value.abs() || error <= f64::MIN_POSITIVE {
            break;
        }
        if evals + 30 > opts.max_evals {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(Piece { error: 0.0, ..worst });
            let (v, e) = total(&heap);
            value = v;
            error = e;
            continue;
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        evals += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // periodically resum to shed accumulated rounding in the running totals
        if evals % 3000 == 0 {
            let (v, e) = total(&heap);
            value = v;
            error = e;
        }
    }
    let (value, abs_error) = total(&heap);
    QuadResult {
        value,
        abs_error,
        evaluations: evals,
        converged,
    }
}

/// `∫_a^b f`, adaptive GK15.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> QuadResult {
    integrate_pieces(f, &[(a, b)], opts)
}

/// `ln ∫_a^b exp(log_f(x)) dx`, with the interval pre-split at `breakpoints`.
///
/// `log_f` may return `-inf` (zero integrand) but never NaN.
pub fn integrate_log<F: Fn(f64) -> f64>(log_f: F, a: f64, b: f64, breakpoints: &[f64], opts: &QuadOptions) -> LogQuadResult {
    if !(b > a) {
        return LogQuadResult {
            value: LogNonNegative::ZERO,
            rel_error: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    cuts.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut logs = Vec::with_capacity(cuts.len());
    let mut abs_errs = Vec::with_capacity(cuts.len());
    let mut evals = 0;
    let mut converged = true;
    for w in cuts.windows(2) {
        let seg = log_integrate_segment(&log_f, w[0], w[1], opts);
        evals += seg.evaluations;
        converged &= seg.converged;
        if !seg.value.is_zero() {
            logs.push(seg.value.ln());
            abs_errs.push(seg.value.ln() + seg.rel_error.max(f64::MIN_POSITIVE).ln());
        }
    }
    let total = log_sum_exp(&logs);
    let rel_error = if total == f64::NEG_INFINITY {
        0.0
    } else {
        (log_sum_exp(&abs_errs) - total).exp()
    };
    LogQuadResult {
        value: LogNonNegative::from_ln(total),
        rel_error,
        evaluations: evals,
        converged,
    }
}

fn probe<F: Fn(f64) -> f64>(log_f: &F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (hi - lo) / n as f64;
    (0..n)
        .map(|i| {
            let x = lo + (i as f64 + 0.5) * h;
            (x, log_f(x))
        })
        .collect()
}

/// Largest `x` in `[lo, hi]` with `g(x) < thr`, assuming `g(lo) < thr <= g(hi)`, or
/// the mirror image when `rising` is false.
fn crossing<F: Fn(f64) -> f64>(g: &F, mut lo: f64, mut hi: f64, thr: f64, rising: bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = g(mid) < thr;
        if below == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if rising {
        lo
    } else {
        hi
    }
}

fn log_integrate_segment<F: Fn(f64) -> f64>(log_f: &F, lo: f64, hi: f64, opts: &QuadOptions) -> LogQuadResult {
    let zero = LogQuadResult {
        value: LogNonNegative::ZERO,
        rel_error: 0.0,
        evaluations: 0,
        converged: true,
    };
    let mut evals = 0;
    let mut peak = f64::NEG_INFINITY;
    let (mut range_lo, mut range_hi) = (lo, hi);
    let n = opts.probes.max(8);
    for _round in 0..8 {
        let samples = probe(log_f, range_lo, range_hi, n);
        evals += n;
        let (imax, &(xmax, lmax)) = samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("nonempty probe set");
        if lmax == f64::NEG_INFINITY && peak == f64::NEG_INFINITY {
            return LogQuadResult { evaluations: evals, ..zero };
        }
        // sharpen the maximum inside the neighbouring cells
        let cell_lo = if imax == 0 { range_lo } else { samples[imax - 1].0 };
        let cell_hi = if imax + 1 == n { range_hi } else { samples[imax + 1].0 };
        let (_, refined, e) = golden_max(log_f, cell_lo, cell_hi, 1e-12 * (cell_hi - cell_lo).max(1e-300), 80);
        evals += e;
        peak = peak.max(lmax).max(refined);
        let _ = xmax;

        let thr = peak - opts.truncation;
        let first = samples.iter().position(|s| s.1 >= thr);
        let last = samples.iter().rposition(|s| s.1 >= thr);
        let (Some(first), Some(last)) = (first, last) else {
            // the refined peak lies between probes and everything else is far below it
            range_lo = cell_lo;
            range_hi = cell_hi;
            continue;
        };
        let new_lo = if first == 0 {
            range_lo
        } else {
            crossing(log_f, samples[first - 1].0, samples[first].0, thr, true)
        };
        let new_hi = if last + 1 == n {
            range_hi
        } else {
            crossing(log_f, samples[last].0, samples[last + 1].0, thr, false)
        };
        evals += 400;
        let resolved = last - first + 1 >= 16;
        range_lo = new_lo;
        range_hi = new_hi;
        if resolved {
            break;
        }
    }
    let shifted = |x: f64| {
        let l = log_f(x);
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            (l - peak).exp()
        }
    };
    let r = integrate(shifted, range_lo, range_hi, &QuadOptions {
        max_evals: opts.max_evals.saturating_sub(evals).max(1000),
        ..*opts
    });
    evals += r.evaluations;
    if !(r.value > 0.0) {
        return LogQuadResult { evaluations: evals, ..zero };
    }
    LogQuadResult {
        value: LogNonNegative::from_ln(peak + r.value.ln()),
        rel_error: r.abs_error / r.value,
        evaluations: evals,
        converged: r.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_and_trig_integrals() {
        let o = QuadOptions::default();
        let r = integrate(|x| x * x * x, 0.0, 2.0, &o);
        assert!((r.value - 4.0).abs() < 1e-13);
        let r = integrate(f64::sin, 0.0, PI, &o);
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn sqrt_endpoint_singularity_converges() {
        // ∫_0^1 sqrt(x) dx = 2/3
        let r = integrate(f64::sqrt, 0.0, 1.0, &QuadOptions::default());
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn log_space_gaussian_peak_far_from_origin() {
        // ∫ exp(-(x-500)^2 + 1e4) over [0, 1000] = sqrt(π) e^{1e4}
        let o = QuadOptions::default();
        let r = integrate_log(|x| 1.0e4 - (x - 500.0) * (x - 500.0), 0.0, 1000.0, &[], &o);
        let want = 1.0e4 + 0.5 * PI.ln();
        assert!((r.value.ln() - want).abs() < 1e-10, "{:?}", r);
    }

    #[test]
    fn log_space_very_narrow_peak_is_found() {
        // width 1e-3 peak on [0, 1e3]
        let o = QuadOptions::default();
        let c = 123.456;
        let r = integrate_log(|x| -((x - c) / 1e-3).powi(2), 0.0, 1000.0, &[], &o);
        let want = (1e-3 * PI.sqrt()).ln();
        assert!((r.value.ln() - want).abs() < 1e-9, "{} vs {}", r.value.ln(), want);
    }

    #[test]
    fn zero_integrand_gives_zero() {
        let r = integrate_log(|_| f64::NEG_INFINITY, 0.0, 1.0, &[], &QuadOptions::default());
        assert!(r.value.is_zero());
    }

    #[test]
    fn evaluation_cap_is_reported() {
        let o = QuadOptions { max_evals: 100, ..Default::default() };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &o);
        assert!(!r.converged);
        assert!(r.evaluations <= 100);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        // piecewise constant: 0 on [0,1], ln 2 on (1,3]
        let r = integrate_log(|x| if x <= 1.0 { 0.0 } else { 2f64.ln() }, 0.0, 3.0, &[1.0], &QuadOptions::default());
        assert!((r.value.value() - 5.0).abs() < 1e-12);
    }
}
