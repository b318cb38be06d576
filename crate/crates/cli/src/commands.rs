use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use radmax_core::bounds::{
    gaussian_construction, gaussian_upper_construction, t_parts, theorem1_construction, unitball_case_analysis,
    unitball_sandwich, BoundReport, ExactPolicy,
};
use radmax_core::geometry::beta0_unit_ball;
use radmax_core::optimize::{critical_exponent, Exponent, SupremumResult};
use radmax_core::oracle::{empirical_bound_from_profile, maximal_profile, ProfileGrid, TestFunctionSpec};
use radmax_core::{Dimension, RadialDensity};

use crate::args::{BoundArgs, Construction, OracleArgs, SweepArgs, SweepConstruction, Target};
use crate::output::cell;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Numeric(radmax_core::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Verification(_) => 1,
            Self::Numeric(_) | Self::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Verification(m) => write!(f, "verification failed: {m}"),
            Self::Numeric(e) => write!(f, "numerical failure: {e:?}"),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<radmax_core::Error> for CliError {
    fn from(e: radmax_core::Error) -> Self {
        Self::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn parse_measure(s: &str) -> CliResult<RadialDensity> {
    s.parse().map_err(CliError::Numeric)
}

pub fn dimension(n: u64) -> CliResult<Dimension> {
    Dimension::new(n).map_err(|e| CliError::Usage(format!("{e:?}")))
}

/// Comma-separated values and `a:b:step` ranges.
pub fn parse_reals(spec: &str) -> CliResult<Vec<f64>> {
    let bad = |item: &str| CliError::Usage(format!("cannot parse {item:?} in {spec:?}"));
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(x.parse::<f64>().map_err(|_| bad(item))?),
            [a, b, step] => {
                let (a, b, step): (f64, f64, f64) = (
                    a.parse().map_err(|_| bad(item))?,
                    b.parse().map_err(|_| bad(item))?,
                    step.parse().map_err(|_| bad(item))?,
                );
                if !(step > 0.0) || !(b >= a) {
                    return Err(bad(item));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| a + i as f64 * step));
            }
            _ => return Err(bad(item)),
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty range {spec:?}")));
    }
    Ok(out)
}

pub fn parse_dims(spec: &str) -> CliResult<Vec<u64>> {
    let bad = |item: &str| CliError::Usage(format!("cannot parse {item:?} in {spec:?}"));
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(x.parse::<u64>().map_err(|_| bad(item))?),
            [a, b, step] => {
                let (a, b, step): (u64, u64, u64) = (
                    a.parse().map_err(|_| bad(item))?,
                    b.parse().map_err(|_| bad(item))?,
                    step.parse().map_err(|_| bad(item))?,
                );
                if step == 0 || b < a {
                    return Err(bad(item));
                }
                out.extend((a..=b).step_by(step as usize));
            }
            _ => return Err(bad(item)),
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty range {spec:?}")));
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct P0Output {
    pub target: &'static str,
    #[serde(flatten)]
    pub result: SupremumResult,
    /// The value to the reported six decimals.
    pub reported: String,
    pub reference_value: f64,
    pub method: &'static str,
    pub note: &'static str,
}

pub fn exponent_of(t: Target) -> Exponent {
    match t {
        Target::General => Exponent::General,
        Target::GaussianLower => Exponent::GaussianLower,
        Target::GaussianUpper => Exponent::GaussianUpper,
        Target::Unitball => Exponent::UnitBall,
    }
}

pub fn cmd_p0(target: Target) -> CliResult<P0Output> {
    let kind = exponent_of(target);
    let result = critical_exponent(kind)?;
    Ok(P0Output {
        target: kind.name(),
        reported: format!("{:.6}", result.value),
        reference_value: kind.reference_value(),
        result,
        method: "sup over lambda in [1e-9, sqrt(2)-1-1e-9] of B/(A+B): 2048-point prescan, golden section in the best cells, one-sided limits at jumps",
        note: "published reference values carry unknown precision; agreement is expected to about 1e-3",
    })
}

#[derive(Debug, Serialize)]
pub struct ReportOutput {
    pub construction: &'static str,
    pub measure: String,
    #[serde(flatten)]
    pub report: BoundReport,
    pub checks: BTreeMap<String, bool>,
}

#[derive(Debug, Serialize)]
pub struct UnitBallOutput {
    pub construction: &'static str,
    pub measure: String,
    pub n: Dimension,
    pub p: f64,
    pub lambda: f64,
    #[serde(rename = "R")]
    pub outer_radius: f64,
    pub r: f64,
    pub beta0: f64,
    /// Sandwich bounds, absent when `R ≥ √2/(1+λ)`.
    #[serde(rename = "logT_lower")]
    pub log_t_lower: Option<f64>,
    #[serde(rename = "logT_upper")]
    pub log_t_upper: Option<f64>,
    pub case: u8,
    #[serde(rename = "logT_case_bound")]
    pub log_t_case_bound: f64,
    #[serde(rename = "logT_exact")]
    pub log_t_exact: Option<f64>,
    pub checks: BTreeMap<String, bool>,
}

#[derive(Debug, Serialize)]
pub struct ExactOutput {
    pub construction: &'static str,
    pub measure: String,
    pub n: Dimension,
    pub p: f64,
    #[serde(rename = "R")]
    pub outer_radius: f64,
    pub r: f64,
    #[serde(rename = "logT_exact")]
    pub log_t_exact: f64,
    /// Present for the Gaussian decay bound.
    #[serde(rename = "logT_upper", skip_serializing_if = "Option::is_none")]
    pub log_t_upper: Option<f64>,
    pub terms: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
}

pub enum BoundOutput {
    Report(ReportOutput),
    UnitBall(UnitBallOutput),
    Exact(ExactOutput),
}

impl BoundOutput {
    pub fn to_value(&self) -> serde_json::Value {
        match self {
            Self::Report(r) => serde_json::to_value(r),
            Self::UnitBall(r) => serde_json::to_value(r),
            Self::Exact(r) => serde_json::to_value(r),
        }
        .expect("bound outputs serialize")
    }
}

fn radii(args: &BoundArgs) -> CliResult<(f64, f64, f64)> {
    let big_r = args.big_r.ok_or_else(|| CliError::Usage("--R is required for this construction".into()))?;
    let r = match (args.r, args.lambda) {
        (Some(r), _) => r,
        (None, Some(l)) => l * big_r,
        (None, None) => return Err(CliError::Usage("give --r or --lambda".into())),
    };
    Ok((big_r, r, r / big_r))
}

pub fn cmd_bound(args: &BoundArgs) -> CliResult<BoundOutput> {
    let f = parse_measure(&args.measure)?;
    let n = dimension(args.n)?;
    let policy = ExactPolicy {
        max_exact_dimension: args.exact_threshold,
    };
    let slack = args.chain_slack;
    let construction = args.construction.unwrap_or(match (args.big_r, &f) {
        (None, _) => Construction::Theorem1,
        (Some(_), RadialDensity::UnitBallIndicator) => Construction::Unitball,
        (Some(_), _) => Construction::Exact,
    });
    let need_lambda = || args.lambda.ok_or_else(|| CliError::Usage("--lambda is required for this construction".into()));
    let with_chain = |name: &'static str, report: BoundReport| {
        let mut checks = BTreeMap::new();
        if let Some(ok) = report.chain_holds(slack) {
            checks.insert("chain_holds".to_string(), ok);
        }
        BoundOutput::Report(ReportOutput {
            construction: name,
            measure: f.name().to_string(),
            report,
            checks,
        })
    };
    match construction {
        Construction::Theorem1 => {
            let report = theorem1_construction(&f, n, args.p, need_lambda()?, &policy)?;
            Ok(with_chain("theorem1", report))
        }
        Construction::Gaussian => {
            if f != RadialDensity::Gaussian {
                return Err(CliError::Usage("the gaussian construction needs --measure gaussian".into()));
            }
            let report = gaussian_construction(n, args.p, need_lambda()?, &policy)?;
            Ok(with_chain("gaussian", report))
        }
        Construction::Unitball => {
            if f != RadialDensity::UnitBallIndicator {
                return Err(CliError::Usage("the unitball construction needs --measure unitball".into()));
            }
            let (big_r, r, lambda) = radii(args)?;
            let (case, bound) = unitball_case_analysis(n, args.p, big_r, lambda)?;
            let sandwich = if big_r < SQRT_2 / (1.0 + lambda) {
                Some(unitball_sandwich(n, args.p, big_r, lambda)?)
            } else {
                None
            };
            let exact = if policy.wants_exact(n) {
                Some(t_parts(&f, n, big_r, r)?.log_t(args.p))
            } else {
                None
            };
            let mut checks = BTreeMap::new();
            if let Some(e) = exact {
                if let Some((lo, hi)) = sandwich {
                    checks.insert("within_sandwich".into(), lo <= e + slack && e <= hi + slack);
                }
                checks.insert("below_case_bound".into(), e <= bound + slack);
            }
            Ok(BoundOutput::UnitBall(UnitBallOutput {
                construction: "unitball",
                measure: f.name().to_string(),
                n,
                p: args.p,
                lambda,
                outer_radius: big_r,
                r,
                beta0: beta0_unit_ball(big_r, lambda)?.radians(),
                log_t_lower: sandwich.map(|s| s.0),
                log_t_upper: sandwich.map(|s| s.1),
                case: case as u8,
                log_t_case_bound: bound,
                log_t_exact: exact,
                checks,
            }))
        }
        Construction::GaussianUpper | Construction::Exact => {
            let (big_r, r, _) = radii(args)?;
            let parts = t_parts(&f, n, big_r, r)?;
            let exact = parts.log_t(args.p);
            let mut terms = BTreeMap::new();
            terms.insert("log_mu_B_R".to_string(), parts.ball_outer.ln());
            terms.insert("log_mu_B_r".to_string(), parts.ball_inner.ln());
            terms.insert("log_mu_tilde_B".to_string(), parts.tilde_ball.ln());
            let mut checks = BTreeMap::new();
            let mut upper = None;
            let name = if construction == Construction::GaussianUpper {
                if f != RadialDensity::Gaussian {
                    return Err(CliError::Usage("the gaussian-upper construction needs --measure gaussian".into()));
                }
                let u = gaussian_upper_construction(n, args.p, big_r, r)?;
                checks.insert("below_upper".into(), exact <= u + slack);
                upper = Some(u);
                "gaussian-upper"
            } else {
                "exact"
            };
            Ok(BoundOutput::Exact(ExactOutput {
                construction: name,
                measure: f.name().to_string(),
                n,
                p: args.p,
                outer_radius: big_r,
                r,
                log_t_exact: exact,
                log_t_upper: upper,
                terms,
                checks,
            }))
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepRow {
    pub n: u64,
    pub lambda: f64,
    pub p: f64,
    pub big_r: Option<f64>,
    pub r: Option<f64>,
    pub alpha: Option<f64>,
    pub log_t_lower: Option<f64>,
    pub log_t_exact: Option<f64>,
    pub log_t_upper: Option<f64>,
    pub error: String,
}

pub const SWEEP_HEADER: [&str; 10] = ["n", "lambda", "p", "R", "r", "alpha", "logT_lower", "logT_exact", "logT_upper", "error"];

impl SweepRow {
    pub fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            cell(Some(self.lambda)),
            cell(Some(self.p)),
            cell(self.big_r),
            cell(self.r),
            cell(self.alpha),
            cell(self.log_t_lower),
            cell(self.log_t_exact),
            cell(self.log_t_upper),
            self.error.clone(),
        ]
    }
}

fn sweep_row(f: &RadialDensity, args: &SweepArgs, n: u64, lambda: f64, p: f64) -> SweepRow {
    let mut row = SweepRow {
        n,
        lambda,
        p,
        ..Default::default()
    };
    let policy = ExactPolicy {
        max_exact_dimension: args.exact_threshold,
    };
    let result = (|| -> radmax_core::Result<()> {
        let dim = Dimension::new(n)?;
        match args.construction {
            SweepConstruction::Theorem1 | SweepConstruction::Gaussian => {
                let rep = if args.construction == SweepConstruction::Theorem1 {
                    theorem1_construction(f, dim, p, lambda, &policy)?
                } else {
                    gaussian_construction(dim, p, lambda, &policy)?
                };
                row.big_r = Some(rep.outer_radius);
                row.r = Some(rep.r);
                row.alpha = Some(rep.alpha);
                row.log_t_lower = Some(rep.log_t_lower);
                row.log_t_exact = rep.log_t_exact;
            }
            SweepConstruction::Unitball => {
                let big_r = args.big_r;
                let r = lambda * big_r;
                row.big_r = Some(big_r);
                row.r = Some(r);
                let (_, upper) = unitball_case_analysis(dim, p, big_r, lambda)?;
                row.log_t_upper = Some(upper);
                if big_r < SQRT_2 / (1.0 + lambda) {
                    let (lo, _) = unitball_sandwich(dim, p, big_r, lambda)?;
                    row.log_t_lower = Some(lo);
                    row.alpha = Some((lo / n as f64).exp());
                }
                if policy.wants_exact(dim) {
                    row.log_t_exact = Some(t_parts(f, dim, big_r, r)?.log_t(p));
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.error = format!("{e:?}");
    }
    row
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub struct SweepOutput {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<SweepRow>,
}

/// Rows in nested-loop order: `lambda`, then `p`, then `n`.
pub fn cmd_sweep(args: &SweepArgs) -> CliResult<SweepOutput> {
    let f = parse_measure(&args.measure)?;
    let dims = parse_dims(&args.n)?;
    let ps = parse_reals(&args.p)?;
    let lambdas = parse_reals(&args.lambda)?;
    if args.construction == SweepConstruction::Gaussian && f != RadialDensity::Gaussian {
        return Err(CliError::Usage("the gaussian construction needs --measure gaussian".into()));
    }
    if args.construction == SweepConstruction::Unitball && f != RadialDensity::UnitBallIndicator {
        return Err(CliError::Usage("the unitball construction needs --measure unitball".into()));
    }
    let mut grid = Vec::with_capacity(lambdas.len() * ps.len() * dims.len());
    for &l in &lambdas {
        for &p in &ps {
            grid.extend(dims.iter().map(|&n| (l, p, n)));
        }
    }
    let rows: Vec<SweepRow> = grid.par_iter().map(|&(l, p, n)| sweep_row(&f, args, n, l, p)).collect();

    let construction = match args.construction {
        SweepConstruction::Theorem1 => "theorem1",
        SweepConstruction::Gaussian => "gaussian",
        SweepConstruction::Unitball => "unitball",
    };
    let mut metadata = vec![
        ("measure".to_string(), args.measure.clone()),
        ("construction".to_string(), construction.to_string()),
        ("n".to_string(), args.n.clone()),
        ("p".to_string(), args.p.clone()),
        ("lambda".to_string(), args.lambda.clone()),
        ("exact_threshold".to_string(), args.exact_threshold.to_string()),
        ("row_order".to_string(), "lambda, p, n (nested loops)".to_string()),
    ];
    if args.construction == SweepConstruction::Unitball {
        metadata.push(("R".to_string(), format!("{:.16e}", args.big_r)));
    }
    for chunk in rows.chunk_by(|a, b| a.lambda == b.lambda && a.p == b.p) {
        let points: Vec<(f64, f64)> = chunk.iter().filter_map(|r| r.log_t_lower.map(|y| (r.n as f64, y))).collect();
        let key = format!("fit lambda={:.16e} p={:.16e}", chunk[0].lambda, chunk[0].p);
        let log_alpha = chunk.iter().find_map(|r| r.alpha).map(f64::ln);
        let value = match (fitted_slope(&points), log_alpha) {
            (Some(s), Some(la)) => format!(
                "slope={s:.16e} log_alpha={la:.16e} rel_diff={:.3e}",
                ((s - la) / la.abs().max(f64::MIN_POSITIVE)).abs()
            ),
            _ => "insufficient rows".to_string(),
        };
        metadata.push((key, value));
        if args.construction == SweepConstruction::Unitball {
            let uppers: Vec<f64> = chunk.iter().filter_map(|r| r.log_t_upper).collect();
            let decreasing = uppers.windows(2).all(|w| w[1] < w[0]);
            metadata.push((
                format!("upper_decreasing lambda={:.16e} p={:.16e}", chunk[0].lambda, chunk[0].p),
                decreasing.to_string(),
            ));
        }
    }
    Ok(SweepOutput { metadata, rows })
}

pub struct OracleOutput {
    pub metadata: Vec<(String, String)>,
    pub profile: radmax_core::RadialProfile,
}

pub fn cmd_oracle(args: &OracleArgs, seed: u64) -> CliResult<OracleOutput> {
    let f = parse_measure(&args.measure)?;
    let n = dimension(args.n)?;
    let g = TestFunctionSpec::new(args.r)?;
    let focus = args.focus.unwrap_or(2.0 * args.r);
    let outer = args
        .outer
        .or_else(|| f.support_upper_bound())
        .unwrap_or(2.0 * (focus + args.r));
    if args.points < 4 {
        return Err(CliError::Usage("--points must be at least 4".into()));
    }
    let grid = ProfileGrid {
        points: args.points,
        focus,
        outer,
    };
    let profile = maximal_profile(&f, n, g, &grid)?;
    let mut metadata = vec![
        ("density".to_string(), f.name().to_string()),
        ("n".to_string(), n.get().to_string()),
        ("r".to_string(), format!("{:.16e}", args.r)),
        (
            "grid".to_string(),
            format!("{} points, smoothstep on [0, {focus:.16e}], quadratic to {outer:.16e}, plus r", args.points),
        ),
        ("seed".to_string(), seed.to_string()),
        ("value".to_string(), "M g(rho) for g = indicator of B_r / mu(B_r)".to_string()),
    ];
    if let Some(ps) = &args.p {
        for p in parse_reals(ps)? {
            let c = empirical_bound_from_profile(&f, n, g, p, &profile)?;
            let label = if p == 1.0 {
                "weak-type ratio, normalized measure"
            } else {
                "strong-type ratio"
            };
            metadata.push((format!("lower_bound_C p={p}"), format!("{c:.16e} ({label})")));
        }
    }
    Ok(OracleOutput { metadata, profile })
}
