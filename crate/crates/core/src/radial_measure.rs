//! Radial densities and log-space measures of centered balls and annuli.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::logspace::LogNonNegative;
use crate::quadrature::{integrate_log, LogQuadResult, QuadOptions};
use crate::special::ln_gamma;

/// Ambient dimension `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Dimension(u64);

impl Dimension {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return domain("dimension must be at least 1");
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl TryFrom<u64> for Dimension {
    type Error = Error;
    fn try_from(n: u64) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for u64 {
    fn from(d: Dimension) -> u64 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Lebesgue,
    Gaussian,
    UnitBallIndicator,
    TabulatedDecreasing,
}

/// A radially nonincreasing density sampled as `(s, ln f(s))` knots and read back
/// piecewise constant, left-continuous: `f(s) = f(s_i)` for `s ∈ (s_{i-1}, s_i]`.
/// The density vanishes past the last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    knots: Vec<f64>,
    log_values: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(knots: Vec<f64>, log_values: Vec<f64>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidTable(m));
        if knots.is_empty() || knots.len() != log_values.len() {
            return bad(format!(
                "need equally many knots and values, got {} and {}",
                knots.len(),
                log_values.len()
            ));
        }
        if !(knots[0] >= 0.0) {
            return bad(format!("first knot {} is negative", knots[0]));
        }
        if !(*knots.last().unwrap() > 0.0) || !knots.last().unwrap().is_finite() {
            return bad("last knot must be positive and finite".into());
        }
        for w in knots.windows(2) {
            if !(w[1] > w[0]) {
                return bad(format!("knots not strictly increasing at {} -> {}", w[0], w[1]));
            }
        }
        for (i, &v) in log_values.iter().enumerate() {
            if v.is_nan() || v == f64::INFINITY {
                return bad(format!("log value #{i} is {v}"));
            }
        }
        for (i, w) in log_values.windows(2).enumerate() {
            if w[1] > w[0] {
                return bad(format!(
                    "density increases between s = {} and s = {}",
                    knots[i],
                    knots[i + 1]
                ));
            }
        }
        if log_values[0] == f64::NEG_INFINITY {
            return bad("density vanishes identically".into());
        }
        Ok(Self { knots, log_values })
    }

    /// Two-column text: `s logf` per line, `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut knots = Vec::new();
        let mut vals = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::InvalidTable(format!("line {}: expected two columns", lineno + 1)));
            };
            let parse = |x: &str| {
                parse_extended(x).ok_or_else(|| Error::InvalidTable(format!("line {}: bad number {x:?}", lineno + 1)))
            };
            knots.push(parse(a)?);
            vals.push(parse(b)?);
        }
        Self::new(knots, vals)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidTable(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    fn log_at(&self, s: f64) -> f64 {
        // first knot >= s
        let i = self.knots.partition_point(|&k| k < s);
        self.log_values.get(i).copied().unwrap_or(f64::NEG_INFINITY)
    }
}

fn parse_extended(x: &str) -> Option<f64> {
    match x {
        "-inf" | "-Inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => x.parse::<f64>().ok(),
    }
}

/// The radial profile `f` of a measure `dμ = f(|x|) dx`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialDensity {
    Lebesgue,
    /// `f(s) = e^{-π s²}`, a probability measure in every dimension.
    Gaussian,
    /// Lebesgue measure restricted to the unit ball.
    UnitBallIndicator,
    TabulatedDecreasing(TabulatedDensity),
}

impl RadialDensity {
    pub fn kind(&self) -> DensityKind {
        match self {
            Self::Lebesgue => DensityKind::Lebesgue,
            Self::Gaussian => DensityKind::Gaussian,
            Self::UnitBallIndicator => DensityKind::UnitBallIndicator,
            Self::TabulatedDecreasing(_) => DensityKind::TabulatedDecreasing,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Lebesgue => "lebesgue",
            Self::Gaussian => "gaussian",
            Self::UnitBallIndicator => "unitball",
            Self::TabulatedDecreasing(_) => "tabulated",
        }
    }

    /// `ln f(s)`; nonincreasing in `s`.
    #[inline]
    pub fn log_density_at(&self, s: f64) -> f64 {
        match self {
            Self::Lebesgue => 0.0,
            Self::Gaussian => -PI * s * s,
            Self::UnitBallIndicator => {
                if s <= 1.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Self::TabulatedDecreasing(t) => t.log_at(s),
        }
    }

    pub fn log_density_at_zero(&self) -> f64 {
        self.log_density_at(0.0)
    }

    /// Sup of the support, `None` when unbounded.
    pub fn support_upper_bound(&self) -> Option<f64> {
        match self {
            Self::Lebesgue | Self::Gaussian => None,
            Self::UnitBallIndicator => Some(1.0),
            Self::TabulatedDecreasing(t) => {
                // trailing -inf values shorten the support
                let last = t.log_values.iter().rposition(|&v| v > f64::NEG_INFINITY)?;
                Some(t.knots[last])
            }
        }
    }

    /// Whether `∫ f(|x|) dx < ∞` on `ℝⁿ`.
    pub fn is_finite(&self, _n: Dimension) -> bool {
        !matches!(self, Self::Lebesgue)
    }

    /// Points in `(a, b)` where `f` jumps.
    pub fn breakpoints_in(&self, a: f64, b: f64) -> Vec<f64> {
        let all: &[f64] = match self {
            Self::UnitBallIndicator => &[1.0],
            Self::TabulatedDecreasing(t) => &t.knots,
            _ => &[],
        };
        all.iter().copied().filter(|&x| x > a && x < b).collect()
    }
}

impl FromStr for RadialDensity {
    type Err = Error;

    /// `lebesgue`, `gaussian`, `unitball`, or `tabulated:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lebesgue" => Ok(Self::Lebesgue),
            "gaussian" => Ok(Self::Gaussian),
            "unitball" | "unit-ball" => Ok(Self::UnitBallIndicator),
            _ => match s.strip_prefix("tabulated:") {
                Some(path) => Ok(Self::TabulatedDecreasing(TabulatedDensity::load(Path::new(path))?)),
                None => domain(format!("unknown measure {s:?}")),
            },
        }
    }
}

/// `ln ω_{n-1}` where `ω_{n-1} = n π^{n/2} / Γ(n/2 + 1)` is the area of the unit sphere in `ℝⁿ`.
pub fn log_sphere_area(n: Dimension) -> LogNonNegative {
    let nf = n.as_f64();
    LogNonNegative::from_ln(nf.ln() + 0.5 * nf * PI.ln() - ln_gamma(0.5 * nf + 1.0))
}

/// Bounds `(lower, upper)` on `ω_{n-2} / ω_{n-1}`.
pub fn sphere_ratio_bounds(n: Dimension) -> Result<(f64, f64)> {
    if n.get() < 2 {
        return domain("sphere ratio needs n >= 2");
    }
    let nf = n.as_f64();
    let lower = (nf - 1.0) / nf / PI.sqrt();
    let upper = (nf - 1.0) / (2.0 * PI).sqrt() * (1.0 + 1.0 / nf).sqrt();
    Ok((lower, upper))
}

/// `(n-1) ln s`, with the `n = 1` case kept free of `0 * -inf`.
#[inline]
pub(crate) fn log_power(s: f64, n: Dimension) -> f64 {
    if n.get() == 1 {
        0.0
    } else {
        (n.as_f64() - 1.0) * s.ln()
    }
}

/// `ln ∫_a^b f(s) s^{n-1} e^{w(s)} ds` over the part of `[a, b]` inside the support,
/// splitting at `extra_breaks` and at the density's own jumps. `b` may be `+inf`
/// for finite measures.
pub(crate) fn radial_integral<W: Fn(f64) -> f64>(
    f: &RadialDensity,
    n: Dimension,
    a: f64,
    b: f64,
    weight: W,
    extra_breaks: &[f64],
    opts: &QuadOptions,
) -> Result<LogQuadResult> {
    if !(a >= 0.0) || b.is_nan() {
        return domain(format!("invalid radial interval [{a}, {b}]"));
    }
    if b < a {
        return domain(format!("radial interval [{a}, {b}] is reversed"));
    }
    let log_integrand = |s: f64| {
        let lf = f.log_density_at(s);
        if lf == f64::NEG_INFINITY {
            return lf;
        }
        let w = weight(s);
        if w == f64::NEG_INFINITY {
            return w;
        }
        lf + log_power(s, n) + w
    };
    let mut upper = b;
    if let Some(sup) = f.support_upper_bound() {
        upper = upper.min(sup);
    }
    if upper.is_infinite() {
        if !f.is_finite(n) {
            return Err(Error::NonFiniteMeasure { dimension: n.get() });
        }
        upper = finite_tail_cutoff(&log_integrand, a, opts.truncation);
    }
    if !(upper > a) {
        return Ok(LogQuadResult {
            value: LogNonNegative::ZERO,
            rel_error: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let mut breaks = f.breakpoints_in(a, upper);
    breaks.extend(extra_breaks.iter().copied().filter(|&x| x > a && x < upper));
    Ok(integrate_log(log_integrand, a, upper, &breaks, opts))
}

/// Radius past which a decaying log-integrand stays far below its running maximum.
fn finite_tail_cutoff<F: Fn(f64) -> f64>(log_integrand: &F, a: f64, truncation: f64) -> f64 {
    let mut u = (2.0 * a).max(1.0);
    let mut best = log_integrand(a.max(f64::MIN_POSITIVE));
    for _ in 0..2000 {
        let lu = log_integrand(u);
        best = best.max(lu);
        let l2 = log_integrand(2.0 * u);
        if lu < best - truncation - 14.0 && l2 <= lu {
            return u;
        }
        u *= 2.0;
    }
    u
}

/// `ln μ(B_ρ)`, quadrature in log space. `rho = +inf` gives the total mass.
pub fn log_ball_measure(f: &RadialDensity, n: Dimension, rho: f64) -> Result<LogNonNegative> {
    Ok(log_ball_measure_detailed(f, n, rho, &QuadOptions::default())?.value)
}

/// [`log_ball_measure`] with quadrature metadata.
pub fn log_ball_measure_detailed(f: &RadialDensity, n: Dimension, rho: f64, opts: &QuadOptions) -> Result<LogQuadResult> {
    if !(rho >= 0.0) {
        return domain(format!("ball radius {rho} must be nonnegative"));
    }
    let r = radial_integral(f, n, 0.0, rho, |_| 0.0, &[], opts)?;
    Ok(LogQuadResult {
        value: r.value * log_sphere_area(n),
        ..r
    })
}

/// `ln μ(B_b \ B_a)`.
pub fn log_annulus_measure(f: &RadialDensity, n: Dimension, a: f64, b: f64) -> Result<LogNonNegative> {
    if !(a >= 0.0) || !(b >= a) {
        return domain(format!("annulus needs 0 <= a <= b, got a = {a}, b = {b}"));
    }
    if a == b {
        return Ok(LogNonNegative::ZERO);
    }
    let r = radial_integral(f, n, a, b, |_| 0.0, &[], &QuadOptions::default())?;
    Ok(r.value * log_sphere_area(n))
}

/// `ln μ(ℝⁿ)`.
pub fn log_total_measure(f: &RadialDensity, n: Dimension) -> Result<LogNonNegative> {
    log_ball_measure(f, n, f64::INFINITY)
}
