use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use radmax_core::bounds::{gaussian_lemma_sandwich, gaussian_mass_concentration, gaussian_mode_radius, verify_remark};
use radmax_core::geometry::off_center_ball_measure;
use radmax_core::oracle::{monte_carlo_ball_measure, verify_level_set_inclusion};
use radmax_core::radial_measure::{log_sphere_area, log_total_measure, sphere_ratio_bounds};
use radmax_core::{Dimension, GeometrySpec, RadialDensity};

use crate::args::Suite;
use crate::commands::CliResult;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproduce: Option<String>,
}

impl Check {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {}/{}: {}", self.suite, self.name, self.detail);
        if let (false, Some(r)) = (self.passed, &self.reproduce) {
            s.push_str(&format!(" | reproduce: {r}"));
        }
        s
    }
}

fn dim(n: u64) -> Dimension {
    Dimension::new(n).expect("suite dimensions are positive")
}

/// `(R, r)` pairs for the inclusion suite.
pub const INCLUSION_CONFIGS: [(f64, f64); 6] = [(1.0, 0.15), (1.0, 0.5), (0.8, 0.2), (0.5, 0.1), (1.0, 0.999), (0.3, 0.05)];

/// Monte Carlo configurations at `n = 3`.
pub const MC_CONFIGS: usize = 10;

pub fn run(suite: Suite, samples: u64, seed: u64) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Spheres {
        checks.extend(spheres()?);
    }
    if all || suite == Suite::GaussianLemmas {
        checks.extend(gaussian_lemmas()?);
    }
    if all || suite == Suite::Remark {
        checks.extend(remark()?);
    }
    if all || suite == Suite::Inclusion {
        checks.extend(inclusion()?);
    }
    if all || suite == Suite::Montecarlo {
        checks.extend(montecarlo(samples, seed)?);
    }
    Ok(checks)
}

/// `ω_{n-2}/ω_{n-1}` against its bounds for `n` in `2..=10⁴`.
pub fn spheres() -> CliResult<Vec<Check>> {
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for n in 2..=10_000u64 {
        let ratio = (log_sphere_area(dim(n - 1)).ln() - log_sphere_area(dim(n)).ln()).exp();
        let (lo, hi) = sphere_ratio_bounds(dim(n))?;
        let margin = ((ratio - lo) / ratio).min((hi - ratio) / ratio);
        worst = worst.min(margin);
        if margin < -1e-12 {
            failures.push(Check {
                suite: "spheres",
                name: format!("ratio n={n}"),
                passed: false,
                detail: format!("ratio {ratio:.12e} outside [{lo:.12e}, {hi:.12e}]"),
                reproduce: Some(format!("n = {n}")),
            });
        }
    }
    let mut out = vec![Check {
        suite: "spheres",
        name: "ratio n=2..10000".into(),
        passed: failures.is_empty(),
        detail: format!("9999 dimensions, {} failures, smallest relative margin {worst:.3e}", failures.len()),
        reproduce: None,
    }];
    out.extend(failures);
    Ok(out)
}

pub fn gaussian_lemmas() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let rows: Vec<CliResult<(u64, usize, Vec<String>)>> = (2..=200u64)
        .into_par_iter()
        .map(|n| {
            let rn = gaussian_mode_radius(dim(n));
            let mut bad = Vec::new();
            for j in 1..=20 {
                let rho = rn * j as f64 / 21.0;
                let (lo, v, hi) = gaussian_lemma_sandwich(dim(n), rho)?;
                let tol = 1e-9 * v.abs().max(1.0);
                if !(lo <= v + tol && v <= hi + tol) {
                    bad.push(format!("n={n} rho={rho:.6e}: {lo:.10e} <= {v:.10e} <= {hi:.10e}"));
                }
            }
            Ok((n, 20, bad))
        })
        .collect();
    let mut total = 0;
    let mut bad_all = Vec::new();
    for r in rows {
        let (_, count, bad) = r?;
        total += count;
        bad_all.extend(bad);
    }
    out.push(Check {
        suite: "gaussian-lemmas",
        name: "sandwich n=2..200".into(),
        passed: bad_all.is_empty(),
        detail: format!("{total} (n, rho) pairs, {} failures", bad_all.len()),
        reproduce: bad_all.first().cloned(),
    });
    for n in 2..=200u64 {
        let m = gaussian_mass_concentration(dim(n))?;
        out.push(Check {
            suite: "gaussian-lemmas",
            name: format!("mass-concentration n={n}"),
            passed: m.holds(),
            detail: format!("mu(B_Rn) = {:.10}, claimed lower bound {:.10}", m.log_mass.exp(), m.lower_bound),
            reproduce: Some(format!("radmax bound --measure gaussian --n {n} --p 1 --R {:.17e} --r 1e-3 --construction exact", gaussian_mode_radius(dim(n)))),
        });
    }
    Ok(out)
}

pub fn remark() -> CliResult<Vec<Check>> {
    let dims: Vec<Dimension> = [20u64, 40, 80, 160].into_iter().map(dim).collect();
    let mut out = Vec::new();
    for f in [RadialDensity::Gaussian, RadialDensity::UnitBallIndicator] {
        let rep = verify_remark(&f, &dims, 0.2)?;
        let radii: Vec<String> = rep.rows.iter().map(|r| format!("{:.6}", r.radius)).collect();
        out.push(Check {
            suite: "remark",
            name: format!("{} lambda=0.2", f.name()),
            passed: rep.passed(),
            detail: format!(
                "radii [{}] nondecreasing: {}, density decay bound holds at all n: {}",
                radii.join(", "),
                rep.monotone_ok,
                rep.rows.iter().all(|r| r.decay_ok)
            ),
            reproduce: Some(format!("radmax bound --measure {} --n 20 --p 1.001 --lambda 0.2", f.name())),
        });
    }
    Ok(out)
}

pub fn inclusion() -> CliResult<Vec<Check>> {
    let mut cases = Vec::new();
    for f in [RadialDensity::Gaussian, RadialDensity::UnitBallIndicator] {
        for n in [2u64, 3] {
            for (big_r, r) in INCLUSION_CONFIGS {
                cases.push((f.clone(), n, big_r, r));
            }
        }
    }
    cases
        .iter()
        .map(|(f, n, big_r, r)| {
            let rep = verify_level_set_inclusion(f, dim(*n), *big_r, *r)?;
            Ok(Check {
                suite: "inclusion",
                name: format!("{} n={n} R={big_r} r={r}", f.name()),
                passed: rep.passed(),
                detail: format!("{} radii, {} failures, min log slack {:.3e}", rep.rows.len(), rep.failures.len(), rep.min_slack()),
                reproduce: Some(format!("radmax oracle --measure {} --n {n} --r {r} --R {big_r}", f.name())),
            })
        })
        .collect()
}

/// Configurations `(d, t)`: the fixed example first, then random ones from `seed`.
pub fn mc_configs(seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![(0.7, 1.2)];
    v.extend((0..MC_CONFIGS).map(|_| (rng.gen_range(0.05..1.5), rng.gen_range(0.1..1.5))));
    v
}

pub fn montecarlo(samples: u64, seed: u64) -> CliResult<Vec<Check>> {
    let f = RadialDensity::Gaussian;
    let n = dim(3);
    let total = log_total_measure(&f, n)?.ln();
    mc_configs(seed)
        .into_iter()
        .enumerate()
        .map(|(i, (d, t))| {
            let exact = (off_center_ball_measure(&f, &GeometrySpec::new(n, d, t)?)?.ln() - total).exp();
            let mc = monte_carlo_ball_measure(&f, n, d, t, samples, seed.wrapping_add(i as u64))?;
            let z = (mc.estimate - exact) / mc.stderr.max(f64::MIN_POSITIVE);
            Ok(Check {
                suite: "montecarlo",
                name: format!("gaussian n=3 d={d:.6} t={t:.6}"),
                passed: z.abs() <= 3.0,
                detail: format!("quadrature {exact:.8}, estimate {:.8} ± {:.2e}, z = {z:.3}", mc.estimate, mc.stderr),
                reproduce: Some(format!("radmax verify montecarlo --seed {seed} --samples {samples}")),
            })
        })
        .collect()
}
