//! Brute-force ground truth in low dimension.
//!
//! The maximal function of the normalized indicator `g = χ_{B_r} / μ(B_r)` is
//! evaluated directly as a sup over ball radii, and geometry is cross-checked by
//! Monte Carlo. Everything here is limited to `n ≤ 6`.

use std::fmt::Write as _;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{intersect_with_centered_ball, off_center_ball_measure, GeometrySpec};
use crate::logspace::{log_sum_exp, LogNonNegative};
use crate::optimize::golden_max;
use crate::radial_measure::{log_annulus_measure, log_ball_measure, log_total_measure, Dimension, RadialDensity};

pub const MAX_ORACLE_DIMENSION: u64 = 6;
pub const T_GRID_POINTS: usize = 512;
pub const INCLUSION_RADII: usize = 64;
pub const PROFILE_POINTS: usize = 256;
pub const MC_TABLE_KNOTS: usize = 10_000;
pub const MC_MIN_SAMPLES: u64 = 10_000;
/// Independent generator streams; the split is fixed so results do not depend
/// on the thread count.
pub const MC_CHUNKS: u64 = 64;

/// The test function `g = χ_{B_r} / μ(B_r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    pub r: f64,
}

impl TestFunctionSpec {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return domain(format!("test radius {r} must be finite and positive"));
        }
        Ok(Self { r })
    }
}

/// A radial function sampled on an increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return domain("profile grid and values differ in length");
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("profile grid must be strictly increasing");
        }
        Ok(Self { grid, values })
    }

    /// Two-column CSV `rho,value`, preceded by `# key: value` lines.
    pub fn write_csv<W: io::Write>(&self, mut w: W, metadata: &[(&str, String)]) -> io::Result<()> {
        let mut out = String::new();
        for (k, v) in metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str("rho,value\n");
        for (x, y) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{x:.16e},{y:.16e}");
        }
        w.write_all(out.as_bytes())
    }
}

fn check_oracle_dimension(n: Dimension) -> Result<()> {
    if n.get() > MAX_ORACLE_DIMENSION {
        return domain(format!("oracle limited to n <= {MAX_ORACLE_DIMENSION}, got {}", n.get()));
    }
    Ok(())
}

/// Radius beyond which `μ` carries less than `1e-16` of its mass.
pub fn effective_support(f: &RadialDensity, n: Dimension) -> Result<f64> {
    if let Some(s) = f.support_upper_bound() {
        return Ok(s);
    }
    let total = log_total_measure(f, n)?.ln();
    let cut = (1e-16f64).ln();
    let mut s = 1.0;
    while log_annulus_measure(f, n, s, f64::INFINITY)?.ln() - total > cut {
        s *= 1.5;
        if s > 1e6 {
            return Err(Error::NonFiniteMeasure { dimension: n.get() });
        }
    }
    Ok(s)
}

/// `ln` of the average of `g` over `B(ρ ξ, t)`.
fn log_average(f: &RadialDensity, n: Dimension, r: f64, log_mu_r: f64, rho: f64, t: f64) -> f64 {
    let eval = || -> Result<f64> {
        let g = GeometrySpec::new(n, rho, t)?;
        let inside = intersect_with_centered_ball(f, &g, r)?;
        if inside.is_zero() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(inside.ln() - off_center_ball_measure(f, &g)?.ln() - log_mu_r)
    };
    eval().unwrap_or(f64::NEG_INFINITY)
}

/// `ln M_μ g(ρ ξ)`.
pub fn maximal_function_at(f: &RadialDensity, n: Dimension, g: TestFunctionSpec, rho: f64) -> Result<LogNonNegative> {
    check_oracle_dimension(n)?;
    if !(rho >= 0.0) || !rho.is_finite() {
        return domain(format!("rho = {rho} must be finite and nonnegative"));
    }
    let log_mu_r = log_ball_measure(f, n, g.r)?;
    if log_mu_r.is_zero() {
        return domain(format!("μ(B_r) = 0 for r = {}", g.r));
    }
    let log_mu_r = log_mu_r.ln();
    let r = g.r;
    if rho < r && f.support_upper_bound().map_or(true, |s| rho <= s) {
        // small balls around ρ ξ sit inside B_r, where g is at its maximum
        return Ok(LogNonNegative::from_ln(-log_mu_r));
    }
    let cap = effective_support(f, n)?;
    let lo = (rho - r).max(1e-6) * (1.0 - 1e-9);
    let hi = 2.0 * (rho + r) + cap;
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    let step = (ln_hi - ln_lo) / (T_GRID_POINTS - 1) as f64;
    let obj = |u: f64| log_average(f, n, r, log_mu_r, rho, u.exp());

    let values: Vec<f64> = (0..T_GRID_POINTS).into_par_iter().map(|i| obj(ln_lo + i as f64 * step)).collect();
    let mut best = obj((rho + r).ln());
    let mut order: Vec<usize> = (0..T_GRID_POINTS).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    for &i in order.iter().take(3) {
        best = best.max(values[i]);
        if values[i] == f64::NEG_INFINITY {
            continue;
        }
        let a = ln_lo + i.saturating_sub(1) as f64 * step;
        let b = ln_lo + (i + 1).min(T_GRID_POINTS - 1) as f64 * step;
        let (_, v, _) = golden_max(obj, a, b, 1e-12, 200);
        best = best.max(v);
    }
    // averages of g never exceed its sup
    Ok(LogNonNegative::from_ln(best.min(-log_mu_r)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionRow {
    pub rho: f64,
    pub log_maximal: f64,
    /// `ln M g(ρ) - ln (1 / μ(B̃))`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub n: Dimension,
    #[serde(rename = "R")]
    pub outer_radius: f64,
    pub r: f64,
    /// `-ln μ(B̃)`.
    pub log_threshold: f64,
    pub rows: Vec<InclusionRow>,
    pub failures: Vec<f64>,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn min_slack(&self) -> f64 {
        self.rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min)
    }
}

/// Checks `B_R ⊂ {M g ≥ 1/μ(B̃)}` at equispaced radii in `[0, R(1 - 1e-6)]`.
pub fn verify_level_set_inclusion(f: &RadialDensity, n: Dimension, big_r: f64, r: f64) -> Result<InclusionReport> {
    check_oracle_dimension(n)?;
    if !(r > 0.0 && r < big_r) || !big_r.is_finite() {
        return domain(format!("need 0 < r < R, got r = {r}, R = {big_r}"));
    }
    let tilde = off_center_ball_measure(f, &GeometrySpec::new(n, big_r, big_r + r)?)?;
    let log_threshold = -tilde.ln();
    let g = TestFunctionSpec::new(r)?;
    let top = big_r * (1.0 - 1e-6);
    let rows = (0..INCLUSION_RADII)
        .map(|i| {
            let rho = top * i as f64 / (INCLUSION_RADII - 1) as f64;
            let m = maximal_function_at(f, n, g, rho)?.ln();
            Ok(InclusionRow {
                rho,
                log_maximal: m,
                slack: m - log_threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = rows.iter().filter(|row| row.slack < 0.0).map(|row| row.rho).collect();
    Ok(InclusionReport {
        n,
        outer_radius: big_r,
        r,
        log_threshold,
        rows,
        failures,
    })
}

/// Radii for a profile of `M g`: dense near `0` and near the focus radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileGrid {
    pub points: usize,
    pub focus: f64,
    pub outer: f64,
}

impl ProfileGrid {
    pub fn radii(&self, extra: &[f64]) -> Vec<f64> {
        let inner = (self.points * 3 / 4).max(2);
        let outer_pts = self.points.saturating_sub(inner).max(1);
        let mut xs = Vec::with_capacity(self.points + extra.len());
        for i in 0..inner {
            let u = i as f64 / (inner - 1) as f64;
            xs.push(self.focus * u * u * (3.0 - 2.0 * u));
        }
        if self.outer > self.focus {
            for i in 1..=outer_pts {
                let u = i as f64 / outer_pts as f64;
                xs.push(self.focus + (self.outer - self.focus) * u * u);
            }
        }
        xs.extend(extra.iter().copied().filter(|&x| x >= 0.0 && x <= self.outer.max(self.focus)));
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1e-300));
        xs
    }
}

/// `M g` sampled on the grid's radii, plus `r` and a point just inside it.
pub fn maximal_profile(f: &RadialDensity, n: Dimension, g: TestFunctionSpec, grid: &ProfileGrid) -> Result<RadialProfile> {
    let radii = grid.radii(&[g.r * (1.0 - 1e-9), g.r]);
    let values = radii
        .par_iter()
        .map(|&rho| maximal_function_at(f, n, g, rho).map(|m| m.value()))
        .collect::<Result<Vec<_>>>()?;
    RadialProfile::new(radii, values)
}

/// Lower bound on `C_{μ,p}` witnessed by `g`.
///
/// For `p > 1` this is `‖M g‖_p / ‖g‖_p`, with `‖M g‖_p^p` a lower Riemann sum
/// over annuli of the profile. For `p = 1` it is the weak-type ratio
/// `sup_τ τ μ({M g ≥ τ}) / ‖g‖_1`, computed against `μ / μ(ℝⁿ)` so values are
/// comparable across densities (the ratio itself is scale invariant).
pub fn empirical_constant_lower_bound(f: &RadialDensity, n: Dimension, g: TestFunctionSpec, p: f64, grid: &ProfileGrid) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("p = {p} must be finite and >= 1"));
    }
    let profile = maximal_profile(f, n, g, grid)?;
    empirical_bound_from_profile(f, n, g, p, &profile)
}

/// [`empirical_constant_lower_bound`] for an already computed profile of `M g`.
pub fn empirical_bound_from_profile(f: &RadialDensity, n: Dimension, g: TestFunctionSpec, p: f64, profile: &RadialProfile) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("p = {p} must be finite and >= 1"));
    }
    let log_mu_r = log_ball_measure(f, n, g.r)?.ln();
    let cells: Vec<(f64, f64)> = profile
        .grid
        .windows(2)
        .zip(profile.values.windows(2))
        .map(|(x, y)| Ok((log_annulus_measure(f, n, x[0], x[1])?.ln(), y[0].min(y[1]).ln())))
        .collect::<Result<Vec<_>>>()?;
    if p == 1.0 {
        let mut best = f64::NEG_INFINITY;
        for &(_, tau) in &cells {
            let level: Vec<f64> = cells.iter().filter(|c| c.1 >= tau).map(|c| c.0).collect();
            // ‖g‖_1 = 1; normalizing μ rescales τ and the level mass inversely
            let v = tau + log_sum_exp(&level);
            best = best.max(v);
        }
        return Ok(best.exp());
    }
    let terms: Vec<f64> = cells.iter().map(|&(m, v)| m + p * v).collect();
    let log_norm_mg = log_sum_exp(&terms) / p;
    let log_norm_g = (1.0 / p - 1.0) * log_mu_r;
    Ok((log_norm_mg - log_norm_g).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    /// Estimate of `μ(B(d ξ, t)) / μ(ℝⁿ)`.
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Inverse CDF table of the radial law `f(s) s^{n-1} ds`.
struct RadialSampler {
    knots: Vec<f64>,
    cdf: Vec<f64>,
}

impl RadialSampler {
    fn new(f: &RadialDensity, n: Dimension) -> Result<Self> {
        let top = effective_support(f, n)?;
        let total = log_ball_measure(f, n, top)?.ln();
        if total == f64::NEG_INFINITY {
            return domain("density has zero mass");
        }
        let knots: Vec<f64> = (0..MC_TABLE_KNOTS).map(|i| top * i as f64 / (MC_TABLE_KNOTS - 1) as f64).collect();
        let mut cdf = knots
            .par_iter()
            .map(|&s| if s == 0.0 { Ok(0.0) } else { Ok((log_ball_measure(f, n, s)?.ln() - total).exp()) })
            .collect::<Result<Vec<_>>>()?;
        for i in 1..cdf.len() {
            cdf[i] = cdf[i].max(cdf[i - 1]);
        }
        *cdf.last_mut().expect("table is nonempty") = 1.0;
        Ok(Self { knots, cdf })
    }

    fn sample(&self, u: f64) -> f64 {
        let j = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[j - 1], self.cdf[j]);
        let (s0, s1) = (self.knots[j - 1], self.knots[j]);
        if c1 > c0 {
            s0 + (s1 - s0) * (u - c0) / (c1 - c0)
        } else {
            s0
        }
    }
}

/// Monte Carlo estimate of `μ(B(d ξ, t)) / μ(ℝⁿ)`.
///
/// Chunk `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so the
/// result is bit-identical for a given seed regardless of scheduling.
pub fn monte_carlo_ball_measure(f: &RadialDensity, n: Dimension, d: f64, t: f64, samples: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if !(2..=MAX_ORACLE_DIMENSION).contains(&n.get()) {
        return domain(format!("Monte Carlo needs 2 <= n <= {MAX_ORACLE_DIMENSION}"));
    }
    if samples < MC_MIN_SAMPLES {
        return domain(format!("need at least {MC_MIN_SAMPLES} samples"));
    }
    GeometrySpec::new(n, d, t)?;
    let sampler = RadialSampler::new(f, n)?;
    let dims = n.get() as usize;
    let hits: u64 = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let count = samples / MC_CHUNKS + u64::from(chunk < samples % MC_CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut hits = 0u64;
            for _ in 0..count {
                let s = sampler.sample(rng.gen::<f64>());
                let mut first = 0.0;
                let mut norm2 = 0.0;
                for k in 0..dims {
                    let z: f64 = rng.sample(StandardNormal);
                    if k == 0 {
                        first = z;
                    }
                    norm2 += z * z;
                }
                let cos = first / norm2.sqrt();
                if s * s - 2.0 * d * s * cos + d * d <= t * t {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let est = hits as f64 / samples as f64;
    Ok(MonteCarloEstimate {
        estimate: est,
        stderr: (est * (1.0 - est) / samples as f64).sqrt(),
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn centered_value_is_the_sup_of_g() {
        for f in [RadialDensity::Gaussian, RadialDensity::UnitBallIndicator] {
            let g = TestFunctionSpec::new(0.3).unwrap();
            let m = maximal_function_at(&f, dim(2), g, 0.0).unwrap();
            let want = -log_ball_measure(&f, dim(2), 0.3).unwrap().ln();
            assert!((m.ln() - want).abs() < 1e-9, "{}: {} vs {want}", f.name(), m.ln());
        }
    }

    #[test]
    fn one_dimensional_interval_oracle() {
        let (r, rho) = (0.2f64, 0.5f64);
        let ratio = |t: f64| {
            let hit = ((rho + t).min(r) - (rho - t).max(-r)).max(0.0);
            let all = (rho + t).min(1.0) - (rho - t).max(-1.0);
            hit / all / (2.0 * r)
        };
        // piecewise linear-fractional; the sup sits at a kink or an end
        let mut want = 0.0f64;
        for t in [rho - r, rho + r, 1.0 - rho, 1.0 + rho, 2.0] {
            want = want.max(ratio(t));
        }
        for i in 0..200_000 {
            want = want.max(ratio(rho - r + 2.0 * i as f64 / 200_000.0));
        }
        let g = TestFunctionSpec::new(r).unwrap();
        let got = maximal_function_at(&RadialDensity::UnitBallIndicator, dim(1), g, rho).unwrap().value();
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn inclusion_unit_disk() {
        let rep = verify_level_set_inclusion(&RadialDensity::UnitBallIndicator, dim(2), 1.0, 0.15).unwrap();
        assert!(rep.passed(), "failures at {:?}", rep.failures);
        assert!(rep.min_slack() > 0.0);
    }

    #[test]
    fn monte_carlo_certain_event_and_determinism() {
        let f = RadialDensity::UnitBallIndicator;
        let m = monte_carlo_ball_measure(&f, dim(3), 0.0, 1.5, 20_000, 7).unwrap();
        assert_eq!(m.estimate, 1.0);
        let a = monte_carlo_ball_measure(&RadialDensity::Gaussian, dim(3), 0.7, 1.2, 50_000, 11).unwrap();
        let b = monte_carlo_ball_measure(&RadialDensity::Gaussian, dim(3), 0.7, 1.2, 50_000, 11).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    }

    #[test]
    fn profile_csv_has_metadata_and_header() {
        let p = RadialProfile::new(vec![0.0, 1.0], vec![2.0, 0.5]).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf, &[("density", "gaussian".into())]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("# density: gaussian\nrho,value\n"));
        assert_eq!(s.lines().count(), 4);
        assert!(RadialProfile::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    }
}
