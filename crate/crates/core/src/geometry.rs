//! Off-center balls, spherical caps and cones, all reduced by rotation
//! invariance to one radial integral weighted by a cap area.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::logspace::LogNonNegative;
use crate::quadrature::{integrate_log, QuadOptions};
use crate::special::{beta_continued_fraction, ln_beta_inc};
use crate::radial_measure::{log_ball_measure, log_sphere_area, radial_integral, Dimension, RadialDensity};

/// Slack allowed on arccos arguments before they count as a domain error.
pub const ACOS_SLACK: f64 = 1e-12;

/// An angle in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&beta) {
            return domain(format!("angle {beta} outside [0, π]"));
        }
        Ok(Self(beta))
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }
}

/// `arccos`, tolerating rounding of at most [`ACOS_SLACK`] past `[-1, 1]`.
pub fn acos_clamped(x: f64) -> Result<Angle> {
    if !(x >= -1.0 - ACOS_SLACK && x <= 1.0 + ACOS_SLACK) {
        return domain(format!("arccos argument {x} outside [-1, 1]"));
    }
    Ok(Angle(x.clamp(-1.0, 1.0).acos()))
}

/// The ball `B(d ξ, t)` for an arbitrary unit vector `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub n: Dimension,
    /// Distance of the center from the origin.
    pub d: f64,
    /// Radius.
    pub t: f64,
}

impl GeometrySpec {
    pub fn new(n: Dimension, d: f64, t: f64) -> Result<Self> {
        if !(d >= 0.0) || !d.is_finite() {
            return domain(format!("center distance {d} must be finite and nonnegative"));
        }
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("ball radius {t} must be finite and positive"));
        }
        Ok(Self { n, d, t })
    }
}

/// How the sphere `{|y| = s}` meets an off-center ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapCut {
    /// Whole sphere inside the ball.
    Full,
    /// No intersection (tangency counts as empty: it has measure zero).
    Empty,
    /// The cap of points within this polar angle of `ξ`.
    Partial(Angle),
}

/// Intersection of `{|y| = s}` with `B(d ξ, t)`.
pub fn intersection_angle(d: f64, t: f64, s: f64) -> Result<CapCut> {
    if !(d >= 0.0) || !(t > 0.0) || !(s >= 0.0) {
        return domain(format!("invalid intersection query d = {d}, t = {t}, s = {s}"));
    }
    if s <= t - d {
        return Ok(CapCut::Full);
    }
    if s >= t + d || s <= d - t {
        return Ok(CapCut::Empty);
    }
    // here d > 0 and s > 0; sin²(θ/2) as a product of small differences keeps
    // θ accurate when the ball is thin compared with its distance to the origin
    let den = 4.0 * d * s;
    let u = ((s - d) + t) * (t - (s - d)) / den;
    let theta = if u <= 0.5 {
        2.0 * u.max(0.0).sqrt().asin()
    } else {
        let v = ((d + s) - t) * ((d + s) + t) / den;
        PI - 2.0 * v.clamp(0.0, 1.0).sqrt().asin()
    };
    Ok(CapCut::Partial(Angle(theta.clamp(0.0, PI))))
}

/// `ln ∫_0^θ sin^m β dβ` by quadrature.
fn log_sine_power_integral(m: u64, theta: f64, opts: &QuadOptions) -> f64 {
    if theta <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let mf = m as f64;
    let log_f = move |b: f64| if m == 0 { 0.0 } else { mf * b.sin().ln() };
    let breaks = if theta > FRAC_PI_2 { vec![FRAC_PI_2] } else { vec![] };
    integrate_log(log_f, 0.0, theta, &breaks, opts).value.ln()
}

/// `ln` of the area of the spherical cap of angular radius `θ` on the unit
/// sphere in `ℝⁿ`, `ω_{n-2} ∫_0^θ sin^{n-2} β dβ`, by direct quadrature.
pub fn cap_log_area(n: Dimension, theta: Angle) -> Result<LogNonNegative> {
    if n.get() < 2 {
        return domain("cap area needs n >= 2");
    }
    let low = Dimension::new(n.get() - 1)?;
    let j = log_sine_power_integral(n.get() - 2, theta.radians(), &QuadOptions::default());
    Ok(LogNonNegative::from_ln(log_sphere_area(low).ln() + j))
}

/// `ln ∫_0^θ sin^m` for `θ ≤ π/2` as `ln(B(sin²θ; (m+1)/2, 1/2) / 2)`.
fn log_j_beta(m: u64, theta: f64) -> f64 {
    let s = theta.sin();
    ln_beta_inc(0.5 * (m as f64 + 1.0), 0.5, (s * s).min(1.0)) - std::f64::consts::LN_2
}

/// `ln J(θ) - (m+1) ln sin θ` for `θ ≤ π/2`, the smooth part of the cap integral.
fn log_j_scaled(m: u64, theta: f64) -> f64 {
    let a = 0.5 * (m as f64 + 1.0);
    let s = theta.sin();
    let x = (s * s).min(1.0);
    if x < (a + 1.0) / (a + 2.5) {
        theta.cos().ln() - a.ln() - std::f64::consts::LN_2 + beta_continued_fraction(a, 0.5, x).ln()
    } else {
        log_j_beta(m, theta) - (m as f64 + 1.0) * s.ln()
    }
}

/// Cached cap areas for one dimension.
///
/// For `θ ≤ π/2` the table interpolates `h(θ) = ln J(θ) - (m+1) ln sin θ`, with
/// `J(θ) = ∫_0^θ sin^m` and `m = n - 2`, on Chebyshev nodes; `h` is smooth on
/// the closed interval, which `ln J` is not at `θ = 0`. Larger angles use
/// `J(θ) = 2 J(π/2) - J(π - θ)`. Node values come from the incomplete beta
/// function; the node count doubles until the interpolant matches it to
/// [`CapTable::TOLERANCE`] in between the nodes.
#[derive(Debug, Clone)]
pub struct CapTable {
    n: Dimension,
    log_sphere: f64,
    log_low_sphere: f64,
    log_half: f64,
    values: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Interpolation missed the tolerance; evaluate the beta function instead.
    direct: bool,
}

impl CapTable {
    pub const TOLERANCE: f64 = 1e-11;
    const MAX_NODES: usize = 1536;

    pub fn new(n: Dimension) -> Self {
        let log_sphere = log_sphere_area(n).ln();
        if n.get() == 1 {
            // ω_0 counts the two points ±1; any proper cap holds exactly one of them
            return Self {
                n,
                log_sphere,
                log_low_sphere: 0.0,
                log_half: 0.0,
                values: vec![],
                nodes: vec![],
                weights: vec![],
                direct: false,
            };
        }
        let m = n.get() - 2;
        let h = |theta: f64| log_j_scaled(m, theta);
        let log_low_sphere = log_sphere_area(Dimension::new(n.get() - 1).expect("n >= 2")).ln();
        let log_half = log_j_beta(m, FRAC_PI_2);

        let mut count = 24;
        loop {
            let (nodes, weights) = chebyshev(count);
            let values: Vec<f64> = nodes.iter().map(|&x| h(FRAC_PI_4 * (1.0 + x))).collect();
            let mut table = Self {
                n,
                log_sphere,
                log_low_sphere,
                log_half,
                values,
                nodes,
                weights,
                direct: false,
            };
            // probe between nodes, including the ends where clustering is thinnest
            let worst = (0..count - 1)
                .step_by((count / 24).max(1))
                .chain([0, count - 2])
                .map(|i| {
                    let x = 0.5 * (table.nodes[i] + table.nodes[i + 1]);
                    (table.interpolate(x) - h(FRAC_PI_4 * (1.0 + x))).abs()
                })
                .fold(0.0, f64::max);
            if worst <= Self::TOLERANCE {
                return table;
            }
            if count * 2 > Self::MAX_NODES {
                table.direct = true;
                return table;
            }
            count *= 2;
        }
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Whether lookups bypass the interpolant.
    pub fn is_direct(&self) -> bool {
        self.direct
    }

    fn interpolate(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&xj, &wj), &fj) in self.nodes.iter().zip(&self.weights).zip(&self.values) {
            let dx = x - xj;
            if dx == 0.0 {
                return fj;
            }
            let c = wj / dx;
            num += c * fj;
            den += c;
        }
        num / den
    }

    /// `ln ∫_0^θ sin^m` for `θ ∈ [0, π/2]`.
    fn log_j_low(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let m = self.n.get() - 2;
        let smooth = if self.direct {
            log_j_scaled(m, theta)
        } else {
            self.interpolate((theta / FRAC_PI_4 - 1.0).clamp(-1.0, 1.0))
        };
        smooth + (m as f64 + 1.0) * theta.sin().ln()
    }

    /// `ln` cap area at polar angle `θ`.
    pub fn log_area(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if theta >= PI {
            return self.log_sphere;
        }
        if self.n.get() == 1 {
            return 0.0;
        }
        let log_j = if theta <= FRAC_PI_2 {
            self.log_j_low(theta)
        } else {
            // 2 J(π/2) - J(π - θ), with J(π - θ) ≤ J(π/2)
            let full = self.log_half + std::f64::consts::LN_2;
            let rest = self.log_j_low(PI - theta);
            full + (-(rest - full).exp()).ln_1p()
        };
        self.log_low_sphere + log_j
    }

    /// `ln` of the cap's share of the whole sphere.
    pub fn log_fraction(&self, theta: f64) -> f64 {
        (self.log_area(theta) - self.log_sphere).min(0.0)
    }

    /// `ln ω_{n-1}`.
    pub fn log_sphere(&self) -> f64 {
        self.log_sphere
    }
}

fn chebyshev(count: usize) -> (Vec<f64>, Vec<f64>) {
    let nodes = (0..count)
        .map(|j| ((2 * j + 1) as f64 * PI / (2 * count) as f64).cos())
        .collect();
    let weights = (0..count)
        .map(|j| {
            let s = ((2 * j + 1) as f64 * PI / (2 * count) as f64).sin();
            if j % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect();
    (nodes, weights)
}

fn cap_cache() -> &'static RwLock<HashMap<u64, Arc<CapTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CapTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Process-wide cap table for dimension `n`, built on first use.
pub fn cap_table(n: Dimension) -> Arc<CapTable> {
    if let Some(t) = cap_cache().read().expect("cap cache poisoned").get(&n.get()) {
        return Arc::clone(t);
    }
    // built outside the lock; a racing builder produces an identical table
    let table = Arc::new(CapTable::new(n));
    let mut w = cap_cache().write().expect("cap cache poisoned");
    Arc::clone(w.entry(n.get()).or_insert(table))
}

/// `ln` of the cap area at the cut, `None` for an empty cut.
fn log_cut_area(table: &CapTable, cut: CapCut) -> f64 {
    match cut {
        CapCut::Full => table.log_sphere(),
        CapCut::Empty => f64::NEG_INFINITY,
        CapCut::Partial(a) => table.log_area(a.radians()),
    }
}

fn off_center_integral(f: &RadialDensity, g: &GeometrySpec, outer: f64) -> Result<LogNonNegative> {
    let table = cap_table(g.n);
    let (d, t) = (g.d, g.t);
    let lo = (d - t).max(0.0);
    let hi = (d + t).min(outer);
    if !(hi > lo) {
        return Ok(LogNonNegative::ZERO);
    }
    let weight = |s: f64| match intersection_angle(d, t, s) {
        Ok(cut) => log_cut_area(&table, cut),
        Err(_) => f64::NEG_INFINITY,
    };
    let breaks = [(t - d).abs(), t + d];
    let r = radial_integral(f, g.n, lo, hi, weight, &breaks, &QuadOptions::default())?;
    Ok(r.value)
}

/// `ln μ(B(d ξ, t))`.
pub fn off_center_ball_measure(f: &RadialDensity, g: &GeometrySpec) -> Result<LogNonNegative> {
    if g.d == 0.0 {
        return log_ball_measure(f, g.n, g.t);
    }
    off_center_integral(f, g, f64::INFINITY)
}

/// `ln μ(B(d ξ, t) ∩ B_ρ)`.
pub fn intersect_with_centered_ball(f: &RadialDensity, g: &GeometrySpec, rho: f64) -> Result<LogNonNegative> {
    if !(rho > 0.0) {
        return domain(format!("centered radius {rho} must be positive"));
    }
    if g.d == 0.0 {
        return log_ball_measure(f, g.n, g.t.min(rho));
    }
    off_center_integral(f, g, rho)
}

/// `ln μ(E ∩ B_R)` for the cone `E` of half-angle `θ` around `ξ`.
pub fn cone_ball_measure(f: &RadialDensity, n: Dimension, theta: Angle, radius: f64) -> Result<LogNonNegative> {
    if n.get() < 2 {
        return domain("cone measure needs n >= 2");
    }
    let ball = log_ball_measure(f, n, radius)?;
    let frac = cap_table(n).log_fraction(theta.radians());
    Ok(ball * LogNonNegative::from_ln(frac))
}

/// Angle at the origin between `ξ` and `∂B̃ ∩ ∂B_R` for `B̃ = B(Rξ, R(1+λ))`:
/// `cos β₀ = 1 - (1+λ)²/2`.
pub fn beta0_concentric(lambda: f64) -> Result<Angle> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return domain(format!("lambda = {lambda} outside (0, 1)"));
    }
    acos_clamped(1.0 - (1.0 + lambda).powi(2) / 2.0)
}

/// The unit-ball variant `cos β₀ = 1 - R²(1+λ)²/2`, taken as printed.
pub fn beta0_unit_ball(radius: f64, lambda: f64) -> Result<Angle> {
    if !(radius > 0.0 && radius <= 1.0) {
        return domain(format!("R = {radius} outside (0, 1]"));
    }
    if !(lambda > 0.0) {
        return domain(format!("lambda = {lambda} must be positive"));
    }
    acos_clamped(1.0 - (radius * (1.0 + lambda)).powi(2) / 2.0)
}
