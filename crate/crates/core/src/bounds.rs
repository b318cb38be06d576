//! Lower bounds `T_{μ,p}(R, r)` on the best `L^p(μ)` constant of the centered
//! maximal operator, and the explicit constructions that make them grow
//! exponentially with the dimension.
//!
//! Every construction returns a [`BoundReport`] carrying both the closed-form
//! lower bound (`log_t_lower`) and, when affordable, the exact value of `T`
//! obtained by quadrature (`log_t_exact`). Intermediate estimates of the proof
//! chain are kept in `terms` under stable names so each one can be checked on
//! its own.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{beta0_concentric, beta0_unit_ball, off_center_ball_measure, intersect_with_centered_ball, Angle, GeometrySpec};
use crate::logspace::LogNonNegative;
use crate::optimize::{balance_integer, find_root};
use crate::radial_measure::{log_annulus_measure, log_ball_measure, log_sphere_area, Dimension, RadialDensity};

/// Dimensions above this get closed-form bounds only.
pub const DEFAULT_EXACT_THRESHOLD: u64 = 10_000;

/// Steps in the downward scan of [`solve_radius_equation`].
pub const RADIUS_SCAN_STEPS: usize = 10_000;

/// The scan starts where `μ(B_{R sin β₀}) / μ(B_R)` exceeds `1 - RADIUS_RATIO_GAP`,
/// or `sin^{nk/2} β₀` when that is closer to 1.
pub const RADIUS_RATIO_GAP: f64 = 1e-6;

/// Relative tolerance of the radius bisection.
pub const RADIUS_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactPolicy {
    /// Largest dimension for which `log_t_exact` is computed.
    pub max_exact_dimension: u64,
}

impl Default for ExactPolicy {
    fn default() -> Self {
        Self {
            max_exact_dimension: DEFAULT_EXACT_THRESHOLD,
        }
    }
}

impl ExactPolicy {
    pub fn wants_exact(&self, n: Dimension) -> bool {
        n.get() <= self.max_exact_dimension
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: Dimension,
    pub p: f64,
    pub lambda: f64,
    pub beta0: Angle,
    pub l: Option<u64>,
    pub k: Option<f64>,
    #[serde(rename = "R")]
    pub outer_radius: f64,
    pub r: f64,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    pub alpha: f64,
    #[serde(rename = "logT_lower")]
    pub log_t_lower: f64,
    #[serde(rename = "logT_exact")]
    pub log_t_exact: Option<f64>,
    pub terms: BTreeMap<String, f64>,
}

impl BoundReport {
    /// `log_t_lower <= log_t_exact`, with `slack` absorbing quadrature noise.
    pub fn chain_holds(&self, slack: f64) -> Option<bool> {
        self.log_t_exact.map(|e| self.log_t_lower <= e + slack)
    }
}

fn check_p(p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("p = {p} must be finite and >= 1"));
    }
    Ok((p - 1.0) / p)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < SQRT_2 - 1.0) {
        return domain(format!("lambda = {lambda} outside (0, √2 - 1)"));
    }
    Ok(())
}

/// The three measures entering `T`.
#[derive(Debug, Clone, Copy)]
pub struct TParts {
    pub ball_outer: LogNonNegative,
    pub ball_inner: LogNonNegative,
    /// `μ(B(R ξ, R + r))`.
    pub tilde_ball: LogNonNegative,
}

impl TParts {
    pub fn log_t(&self, p: f64) -> f64 {
        let q = (p - 1.0) / p;
        self.ball_outer.ln() - self.tilde_ball.ln() + q * (self.ball_inner.ln() - self.ball_outer.ln())
    }
}

pub fn t_parts(f: &RadialDensity, n: Dimension, big_r: f64, r: f64) -> Result<TParts> {
    if !(r > 0.0 && r < big_r) || !big_r.is_finite() {
        return domain(format!("need 0 < r < R, got r = {r}, R = {big_r}"));
    }
    if !f.is_finite(n) {
        return Err(Error::NonFiniteMeasure { dimension: n.get() });
    }
    let ball_outer = log_ball_measure(f, n, big_r)?;
    let ball_inner = log_ball_measure(f, n, r)?;
    let tilde_ball = off_center_ball_measure(f, &GeometrySpec::new(n, big_r, big_r + r)?)?;
    Ok(TParts {
        ball_outer,
        ball_inner,
        tilde_ball,
    })
}

/// `ln T_{μ,p}(R, r) = ln μ(B_R) - ln μ(B̃) + (1 - 1/p)(ln μ(B_r) - ln μ(B_R))`.
pub fn t_exact(f: &RadialDensity, n: Dimension, p: f64, big_r: f64, r: f64) -> Result<f64> {
    check_p(p)?;
    Ok(t_parts(f, n, big_r, r)?.log_t(p))
}

/// Largest `R` with `μ(B_{R sin β₀}) = sin^{nk} β₀ · μ(B_R)`.
pub fn solve_radius_equation(f: &RadialDensity, n: Dimension, beta0: Angle, k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return domain(format!("k = {k} outside (0, 1)"));
    }
    let s = beta0.sin();
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("sin β₀ = {s} outside (0, 1)"));
    }
    let nf = n.as_f64();
    let target = nf * k * s.ln();
    let log_ratio = |big_r: f64| -> Result<f64> {
        Ok(log_ball_measure(f, n, big_r * s)?.ln() - log_ball_measure(f, n, big_r)?.ln())
    };
    if !f.is_finite(n) {
        return Err(Error::NoBalancedRadius {
            r_lo: 0.0,
            r_hi: f64::INFINITY,
            log_ratio_lo: nf * s.ln(),
            log_ratio_hi: nf * s.ln(),
        });
    }
    let gap = (-RADIUS_RATIO_GAP).ln_1p().max(0.5 * target);
    let mut r_max = 1.0;
    let mut top = log_ratio(r_max)?;
    let mut doublings = 0;
    while top <= gap {
        r_max *= 2.0;
        top = log_ratio(r_max)?;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoBalancedRadius {
                r_lo: 1.0,
                r_hi: r_max,
                log_ratio_lo: top,
                log_ratio_hi: top,
            });
        }
    }
    let step = r_max / RADIUS_SCAN_STEPS as f64;
    let mut hi = r_max;
    let mut g_hi = top - target;
    let mut lowest_ratio = top;
    for i in (1..RADIUS_SCAN_STEPS).rev() {
        let lo = i as f64 * step;
        let ratio = log_ratio(lo)?;
        lowest_ratio = lowest_ratio.min(ratio);
        let g_lo = ratio - target;
        if g_lo <= 0.0 && g_hi > 0.0 {
            if g_lo == 0.0 {
                return Ok(lo);
            }
            let g = |x: f64| log_ratio(x).map(|v| v - target).unwrap_or(f64::NAN);
            return find_root(g, lo, hi, RADIUS_REL_TOL * lo);
        }
        hi = lo;
        g_hi = g_lo;
    }
    Err(Error::NoBalancedRadius {
        r_lo: step,
        r_hi: r_max,
        log_ratio_lo: lowest_ratio,
        log_ratio_hi: top,
    })
}

/// `(β₀, l, k)` of the general construction for this `λ`.
pub fn theorem1_parameters(lambda: f64) -> Result<(Angle, u64, f64)> {
    check_lambda(lambda)?;
    let beta0 = beta0_concentric(lambda)?;
    let l = balance_integer(lambda, beta0.sin().ln());
    Ok((beta0, l, 1.0 / (1.0 + l as f64)))
}

/// The construction valid for every finite radially decreasing density.
pub fn theorem1_construction(f: &RadialDensity, n: Dimension, p: f64, lambda: f64, policy: &ExactPolicy) -> Result<BoundReport> {
    let q = check_p(p)?;
    let (beta0, l, k) = theorem1_parameters(lambda)?;
    if !f.is_finite(n) {
        return Err(Error::NonFiniteMeasure { dimension: n.get() });
    }
    let big_r = solve_radius_equation(f, n, beta0, k)?;
    Ok(theorem1_report(f, n, p, q, lambda, beta0, l, k, big_r, policy)?)
}

/// Closed-form part of the general construction; needs no radius.
pub fn theorem1_closed_form(n: Dimension, p: f64, lambda: f64) -> Result<(f64, f64, f64)> {
    let q = check_p(p)?;
    let (beta0, _, k) = theorem1_parameters(lambda)?;
    let (s, c) = (beta0.sin(), beta0.cos());
    let big_q = 1.0 / (PI.sqrt() * s * c);
    let log_alpha = q * lambda.ln() - k * s.ln();
    Ok((big_q, log_alpha, -(big_q + 1.0).ln() + n.as_f64() * log_alpha))
}

#[allow(clippy::too_many_arguments)]
fn theorem1_report(
    f: &RadialDensity,
    n: Dimension,
    p: f64,
    q: f64,
    lambda: f64,
    beta0: Angle,
    l: u64,
    k: f64,
    big_r: f64,
    policy: &ExactPolicy,
) -> Result<BoundReport> {
    let (s, c) = (beta0.sin(), beta0.cos());
    let nf = n.as_f64();
    let lf = l as f64;
    let (big_q, log_alpha, log_t_lower) = theorem1_closed_form(n, p, lambda)?;
    let r = lambda * big_r;

    let mut terms = BTreeMap::new();
    terms.insert("log_alpha".into(), log_alpha);
    terms.insert("log_ratio_lower".into(), -(big_q.ln() + nf * (1.0 - lf * k) * s.ln()).exp().ln_1p_add(nf * k * s.ln()));
    terms.insert("log_small_ball_ratio_bound".into(), nf * lambda.ln());
    terms.insert("outer_radius_factor".into(), s.powf(-lf));

    let mut log_t_exact = None;
    if policy.wants_exact(n) {
        let parts = t_parts(f, n, big_r, r)?;
        let g = GeometrySpec::new(n, big_r, big_r + r)?;
        let cap = intersect_with_centered_ball(f, &g, big_r)?;
        let rest = parts.tilde_ball.checked_sub(cap, 1e-9)?;
        let shrunk = log_ball_measure(f, n, big_r * s)?;
        let annulus = log_annulus_measure(f, n, big_r, 2.0 * big_r + r)?;
        let far = log_ball_measure(f, n, 2.0 * big_r + r)?;
        terms.insert("log_mu_B_R".into(), parts.ball_outer.ln());
        terms.insert("log_mu_B_r".into(), parts.ball_inner.ln());
        terms.insert("log_mu_tilde_B".into(), parts.tilde_ball.ln());
        terms.insert("log_mu_tilde_B_cap_B_R".into(), cap.ln());
        terms.insert("log_mu_tilde_B_minus_B_R".into(), rest.ln());
        terms.insert("log_mu_B_R_sin_beta0".into(), shrunk.ln());
        terms.insert("log_remainder_estimate".into(), big_q.ln() + nf * s.ln() + annulus.ln());
        terms.insert("log_mu_B_2R_plus_r".into(), far.ln());
        terms.insert("log_outer_ball_estimate".into(), -lf * nf * s.ln() + parts.ball_outer.ln());
        terms.insert("log_ratio_exact".into(), parts.ball_outer.ln() - parts.tilde_ball.ln());
        terms.insert("log_small_ball_ratio".into(), parts.ball_inner.ln() - parts.ball_outer.ln());
        terms.insert("radius_residual".into(), shrunk.ln() - parts.ball_outer.ln() - nf * k * s.ln());
        log_t_exact = Some(parts.log_t(p));
    }
    let _ = (q, c);
    Ok(BoundReport {
        n,
        p,
        lambda,
        beta0,
        l: Some(l),
        k: Some(k),
        outer_radius: big_r,
        r,
        q: Some(big_q),
        alpha: log_alpha.exp(),
        log_t_lower,
        log_t_exact,
        terms,
    })
}

trait LnOnePlusAdd {
    fn ln_1p_add(self, log_other: f64) -> f64;
}

impl LnOnePlusAdd for f64 {
    /// `-ln(e^{ln self} + e^{log_other})`, for the ratio bound `1 / (a + b)`.
    fn ln_1p_add(self, log_other: f64) -> f64 {
        -crate::logspace::log_add_exp(self.ln(), log_other)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemarkRow {
    pub n: Dimension,
    pub radius: f64,
    pub log_density_at_radius: f64,
    /// `ln f(0) + n (1 - k) ln sin β₀`.
    pub log_decay_bound: f64,
    pub decay_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemarkReport {
    pub lambda: f64,
    pub k: f64,
    pub rows: Vec<RemarkRow>,
    /// Radii nondecreasing in `n` up to relative fluctuation `1e-3`.
    pub monotone_ok: bool,
}

impl RemarkReport {
    pub fn passed(&self) -> bool {
        self.monotone_ok && self.rows.iter().all(|r| r.decay_ok)
    }
}

/// Growth of the balanced radius with `n` and decay of the density there.
pub fn verify_remark(f: &RadialDensity, dims: &[Dimension], lambda: f64) -> Result<RemarkReport> {
    let (beta0, _, k) = theorem1_parameters(lambda)?;
    let ln_s = beta0.sin().ln();
    let mut rows = Vec::with_capacity(dims.len());
    for &n in dims {
        let radius = solve_radius_equation(f, n, beta0, k)?;
        let at = f.log_density_at(radius);
        let bound = f.log_density_at_zero() + n.as_f64() * (1.0 - k) * ln_s;
        rows.push(RemarkRow {
            n,
            radius,
            log_density_at_radius: at,
            log_decay_bound: bound,
            decay_ok: at <= bound + 1e-9 * bound.abs().max(1.0),
        });
    }
    let monotone_ok = rows.windows(2).all(|w| w[1].radius >= w[0].radius * (1.0 - 1e-3));
    Ok(RemarkReport {
        lambda,
        k,
        rows,
        monotone_ok,
    })
}

/// `R_n = √((n-1)/(2π))`, the mode of `e^{-π s²} s^{n-1}`.
pub fn gaussian_mode_radius(n: Dimension) -> f64 {
    ((n.as_f64() - 1.0) / (2.0 * PI)).sqrt()
}

/// `(ln lower, ln μ(B_ρ), ln upper)` with
/// `ω_{n-1} e^{-πρ²} ρⁿ / n ≤ μ(B_ρ) ≤ ω_{n-1} e^{-πρ²} ρⁿ` for Gaussian `μ`.
pub fn gaussian_lemma_sandwich(n: Dimension, rho: f64) -> Result<(f64, f64, f64)> {
    let rn = gaussian_mode_radius(n);
    if !(rho > 0.0 && rho < rn) {
        return domain(format!("need 0 < rho < R_n = {rn}, got {rho}"));
    }
    let upper = log_sphere_area(n).ln() - PI * rho * rho + n.as_f64() * rho.ln();
    let lower = upper - n.as_f64().ln();
    let value = log_ball_measure(&RadialDensity::Gaussian, n, rho)?.ln();
    Ok((lower, value, upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassConcentration {
    pub log_mass: f64,
    /// `ln (1 - μ(B_{R_n}))`.
    pub log_complement: f64,
    /// `1 - 2 / (√π √(n-1))`.
    pub lower_bound: f64,
}

impl MassConcentration {
    /// `μ(B_{R_n}) ≥ lower_bound`, decided on the complement for accuracy.
    pub fn holds(&self) -> bool {
        if self.lower_bound <= 0.0 {
            return true;
        }
        self.log_complement <= (1.0 - self.lower_bound).ln()
    }
}

pub fn gaussian_mass_concentration(n: Dimension) -> Result<MassConcentration> {
    if n.get() < 2 {
        return domain("mass concentration needs n >= 2");
    }
    let rn = gaussian_mode_radius(n);
    let log_mass = log_ball_measure(&RadialDensity::Gaussian, n, rn)?.ln();
    let log_complement = log_annulus_measure(&RadialDensity::Gaussian, n, rn, f64::INFINITY)?.ln();
    Ok(MassConcentration {
        log_mass,
        log_complement,
        lower_bound: 1.0 - 2.0 / (PI.sqrt() * (n.as_f64() - 1.0).sqrt()),
    })
}

/// Growth side of the Gaussian case, with `R = e^{-cos²β₀/2} R_n`.
pub fn gaussian_construction(n: Dimension, p: f64, lambda: f64, policy: &ExactPolicy) -> Result<BoundReport> {
    let q = check_p(p)?;
    check_lambda(lambda)?;
    if n.get() < 2 {
        return domain("Gaussian construction needs n >= 2");
    }
    let beta0 = beta0_concentric(lambda)?;
    let (s, c) = (beta0.sin(), beta0.cos());
    let c2 = c * c;
    let e = (-c2).exp();
    let nf = n.as_f64();
    let rn = gaussian_mode_radius(n);
    let big_r = (-0.5 * c2).exp() * rn;
    let r = lambda * big_r;
    let log_omega = log_sphere_area(n).ln();
    let half_log_scale = 0.5 * nf * ((nf - 1.0) / (2.0 * PI)).ln();
    let big_q = 1.0 / (PI.sqrt() * s * c);

    let log_alpha = -0.5 * c2 * e - s.ln() + q * (0.5 * e * (1.0 - lambda * lambda) + lambda.ln());
    let log_t_lower = -nf.ln() - 0.5 * nf * c2 * e - nf * s.ln() + q * nf * (0.5 * e * (1.0 - lambda * lambda) + lambda.ln());

    let mut terms = BTreeMap::new();
    terms.insert("log_alpha".into(), log_alpha);
    terms.insert("R_n".into(), rn);
    terms.insert("log_intersection_bound".into(), log_omega - PI * big_r * big_r * s * s + nf * (big_r * s).ln());
    terms.insert(
        "log_remainder_bound".into(),
        nf * s.ln() + big_q.ln() + log_omega + (big_r + r).ln() - PI * rn * rn + (nf - 1.0) * rn.ln(),
    );
    terms.insert(
        "log_intersection_bound_substituted".into(),
        log_omega + 0.5 - 0.5 * nf * (s * s * e + c2) + half_log_scale + nf * s.ln(),
    );
    terms.insert(
        "log_remainder_bound_substituted".into(),
        log_omega + 0.5 + nf * s.ln() + big_q.ln() - 0.5 * nf + half_log_scale,
    );
    terms.insert(
        "log_tilde_B_bound".into(),
        log_omega + 2f64.ln() - 0.5 * nf * (s * s * e + c2) + half_log_scale + nf * s.ln(),
    );
    terms.insert(
        "log_B_R_printed".into(),
        0.5 + log_omega - nf.ln() - 0.5 * nf * (e + c2) + half_log_scale,
    );
    terms.insert("log_small_ratio_bound".into(), 0.5 * (nf - 1.0) * e * (1.0 - lambda * lambda) + nf * lambda.ln());
    terms.insert(
        "transcendental_residual".into(),
        nf * big_r.ln() - PI * big_r * big_r * s * s - ((nf - 1.0) * rn.ln() - PI * rn * rn),
    );
    terms.insert("exponent_gap".into(), 0.5 * nf * (s * s * e + c2) - 0.5 * nf);

    let mut log_t_exact = None;
    if policy.wants_exact(n) {
        let parts = t_parts(&RadialDensity::Gaussian, n, big_r, r)?;
        terms.insert("log_mu_B_R".into(), parts.ball_outer.ln());
        terms.insert("log_mu_B_r".into(), parts.ball_inner.ln());
        terms.insert("log_mu_tilde_B".into(), parts.tilde_ball.ln());
        log_t_exact = Some(parts.log_t(p));
    }
    Ok(BoundReport {
        n,
        p,
        lambda,
        beta0,
        l: None,
        k: None,
        outer_radius: big_r,
        r,
        q: Some(big_q),
        alpha: log_alpha.exp(),
        log_t_lower,
        log_t_exact,
        terms,
    })
}

/// Decay side of the Gaussian case: `ln` of
/// `√π n sin β₀ e^{(λ²-1)/2 · (p-1)/p} ((e^{(1-λ²)/2} λ)^{(p-1)/p} / sin β₀)ⁿ`.
pub fn gaussian_upper_construction(n: Dimension, p: f64, big_r: f64, r: f64) -> Result<f64> {
    let q = check_p(p)?;
    let rn = gaussian_mode_radius(n);
    if !(r > 0.0 && r < big_r && big_r <= rn) {
        return domain(format!("need 0 < r < R <= R_n = {rn}, got r = {r}, R = {big_r}"));
    }
    let lambda = r / big_r;
    let s = beta0_concentric(lambda)?.sin();
    let nf = n.as_f64();
    let half = 0.5 * (1.0 - lambda * lambda);
    Ok((PI.sqrt() * nf * s).ln() - q * half + nf * (q * (half + lambda.ln()) - s.ln()))
}

/// `(ln lower, ln upper)` of `(R λ^{(p-1)/p} / sin β₀)ⁿ ≤ T ≤ √π n (R λ^{(p-1)/p} / sin β₀)ⁿ`
/// for Lebesgue measure on the unit ball.
pub fn unitball_sandwich(n: Dimension, p: f64, big_r: f64, lambda: f64) -> Result<(f64, f64)> {
    let q = check_p(p)?;
    if !(lambda > 0.0) {
        return domain(format!("lambda = {lambda} must be positive"));
    }
    if !(big_r > 0.0 && big_r <= 1.0 && big_r < SQRT_2 / (1.0 + lambda)) {
        return domain(format!("need 0 < R <= 1 and R < √2/(1+λ), got R = {big_r}"));
    }
    let s = beta0_unit_ball(big_r, lambda)?.sin();
    let nf = n.as_f64();
    let lower = nf * (big_r.ln() + q * lambda.ln() - s.ln());
    Ok((lower, lower + (PI.sqrt() * nf).ln()))
}

/// The four regimes of `(R, λ)` for the unit ball when `p` is above the critical exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitBallCase {
    /// `R = 1`, `λ < √2 - 1`.
    Concentric = 1,
    /// `sin β₀ < R < √2/(1+λ)`.
    Intermediate = 2,
    /// `R < √2/(1+λ)`, `R ≤ sin β₀`.
    Small = 3,
    /// `R ≥ √2/(1+λ)`: `B̃` covers a half-space of the unit ball.
    HalfSpace = 4,
}

/// Classifies `(R, λ)` and returns that regime's `ln` upper bound on `T`.
pub fn unitball_case_analysis(n: Dimension, p: f64, big_r: f64, lambda: f64) -> Result<(UnitBallCase, f64)> {
    let q = check_p(p)?;
    let r = lambda * big_r;
    if !(r > 0.0 && r < big_r && big_r <= 1.0) {
        return domain(format!("need 0 < r < R <= 1, got r = {r}, R = {big_r}"));
    }
    let nf = n.as_f64();
    let log_sqrt_pi_n = (PI.sqrt() * nf).ln();
    let threshold = SQRT_2 / (1.0 + lambda);
    if big_r >= threshold {
        // μ(B̃) ≥ |B_1 ∩ E_0| = |B_1| / 2 and μ(B_R) = Rⁿ |B_1|
        return Ok((UnitBallCase::HalfSpace, 2f64.ln() + nf * big_r.ln() + nf * q * lambda.ln()));
    }
    let concentric_alpha = q * lambda.ln() - beta0_concentric(lambda)?.sin().ln();
    if big_r == 1.0 {
        return Ok((UnitBallCase::Concentric, log_sqrt_pi_n + nf * concentric_alpha));
    }
    let s = beta0_unit_ball(big_r, lambda)?.sin();
    if s < big_r {
        // the sandwich base R/sin β₀ increases up to R = 1
        Ok((UnitBallCase::Intermediate, log_sqrt_pi_n + nf * concentric_alpha))
    } else {
        Ok((UnitBallCase::Small, log_sqrt_pi_n + nf * q * lambda.ln()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn p_equal_one_drops_the_small_ball_factor() {
        let f = RadialDensity::Gaussian;
        let n = dim(4);
        let parts = t_parts(&f, n, 0.8, 0.1).unwrap();
        let t = t_exact(&f, n, 1.0, 0.8, 0.1).unwrap();
        assert!((t - (parts.ball_outer.ln() - parts.tilde_ball.ln())).abs() < 1e-15);
    }

    #[test]
    fn unit_ball_with_large_inner_radius_is_trivial() {
        for n in [2, 5, 9] {
            let t = t_exact(&RadialDensity::UnitBallIndicator, dim(n), 1.3, 1.5, 1.1).unwrap();
            assert!(t.abs() < 1e-9, "n = {n}: {t}");
        }
    }

    #[test]
    fn t_exact_domain_errors() {
        assert!(t_exact(&RadialDensity::Gaussian, dim(3), 1.1, 1.0, 1.0).is_err());
        assert!(t_exact(&RadialDensity::Gaussian, dim(3), 0.9, 1.0, 0.5).is_err());
        assert!(matches!(
            t_exact(&RadialDensity::Lebesgue, dim(3), 1.1, 1.0, 0.5),
            Err(Error::NonFiniteMeasure { .. })
        ));
    }

    #[test]
    fn tiny_targets_near_the_upper_lambda_limit() {
        let rep = theorem1_construction(&RadialDensity::Gaussian, dim(5), 1.003, 0.4, &ExactPolicy::default()).unwrap();
        assert!(rep.terms["radius_residual"].abs() < 1e-12);
        assert_eq!(rep.chain_holds(1e-9), Some(true));
    }

    #[test]
    fn theorem1_parameters_at_point_two() {
        let (b, l, k) = theorem1_parameters(0.2).unwrap();
        assert!((b.sin() - (1.0f64 - 0.28 * 0.28).sqrt()).abs() < 1e-15);
        assert_eq!(l, 20);
        assert!((k - 1.0 / 21.0).abs() < 1e-16);
    }

    #[test]
    fn unit_ball_radius_closed_form() {
        let (b, _, k) = theorem1_parameters(0.2).unwrap();
        for n in [3, 10, 40] {
            let got = solve_radius_equation(&RadialDensity::UnitBallIndicator, dim(n), b, k).unwrap();
            let want = b.sin().powf(k - 1.0);
            assert!((got / want - 1.0).abs() < 1e-9, "n = {n}: {got} vs {want}");
        }
    }

    #[test]
    fn lebesgue_has_no_balanced_radius() {
        let (b, _, k) = theorem1_parameters(0.2).unwrap();
        assert!(matches!(
            solve_radius_equation(&RadialDensity::Lebesgue, dim(3), b, k),
            Err(Error::NoBalancedRadius { .. })
        ));
    }

    #[test]
    fn gaussian_lemma_gap_is_log_n() {
        let n = dim(10);
        let (lo, v, hi) = gaussian_lemma_sandwich(n, gaussian_mode_radius(n) / 2.0).unwrap();
        assert!((hi - lo - 10f64.ln()).abs() < 1e-12);
        assert!(lo <= v && v <= hi);
        assert!(gaussian_lemma_sandwich(n, gaussian_mode_radius(n)).is_err());
    }

    /// Regularized lower incomplete gamma by its power series.
    fn gamma_p(a: f64, x: f64) -> f64 {
        let mut term = 1.0 / a;
        let mut sum = term;
        for k in 1..2000 {
            term *= x / (a + k as f64);
            sum += term;
        }
        (a * x.ln() - x - crate::special::ln_gamma(a) + sum.ln()).exp()
    }

    #[test]
    fn mass_at_the_mode_radius_is_about_one_half() {
        // μ(B_ρ) = P(n/2, πρ²) for the Gaussian
        for n in [2u64, 3, 5, 10, 101, 200] {
            let m = gaussian_mass_concentration(dim(n)).unwrap();
            let want = gamma_p(n as f64 / 2.0, (n as f64 - 1.0) / 2.0);
            assert!((m.log_mass.exp() - want).abs() < 1e-10, "n = {n}");
            assert!((m.log_mass.exp() + m.log_complement.exp() - 1.0).abs() < 1e-10);
        }
        let m = gaussian_mass_concentration(dim(2)).unwrap();
        assert!(m.lower_bound < 0.0 && m.holds());
        assert!(gaussian_mass_concentration(dim(5)).unwrap().holds());
        // the printed bound tends to 1 while the mass tends to 1/2
        let m = gaussian_mass_concentration(dim(101)).unwrap();
        assert!((m.lower_bound - (1.0 - 2.0 / (PI.sqrt() * 10.0))).abs() < 1e-15);
        assert!((m.log_mass.exp() - 0.490_575_496_028).abs() < 1e-9);
        assert!(!m.holds());
    }

    #[test]
    fn unitball_case_selection() {
        let n = dim(5);
        assert_eq!(unitball_case_analysis(n, 1.1, 1.0, 0.2).unwrap().0, UnitBallCase::Concentric);
        assert_eq!(unitball_case_analysis(n, 1.1, 0.95, 0.6).unwrap().0, UnitBallCase::HalfSpace);
        assert_eq!(unitball_case_analysis(n, 1.1, 0.95, 0.2).unwrap().0, UnitBallCase::Intermediate);
        assert_eq!(unitball_case_analysis(n, 1.1, 0.3, 0.2).unwrap().0, UnitBallCase::Small);
        assert!(unitball_case_analysis(n, 1.1, 1.2, 0.2).is_err());
    }

    #[test]
    fn report_serializes_with_stable_names() {
        let r = gaussian_construction(dim(20), 1.01, 0.2, &ExactPolicy { max_exact_dimension: 0 }).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["n", "p", "lambda", "beta0", "l", "k", "R", "r", "Q", "alpha", "logT_lower", "logT_exact", "terms"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(v["logT_exact"].is_null());
    }
}
