//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported as failures but do not fail the
//! target; their analysis is printed next to the result.

use std::f64::consts::PI;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use radmax_core::bounds::{gaussian_construction, theorem1_construction, ExactPolicy};
use radmax_core::geometry::{off_center_ball_measure, GeometrySpec};
use radmax_core::optimize::{critical_exponent, sup_log_growth_base};
use radmax_core::{Dimension, Exponent, RadialDensity};

const P0_TOL: f64 = 1e-3;
const P0_TIME: Duration = Duration::from_secs(5);
const CRITICAL_STEP: f64 = 1e-3;
const CRITICAL_SLACK: f64 = 1e-6;
const INCLUSION_TIME: Duration = Duration::from_secs(600);
const INCLUSION_CHECKS: usize = 24;
const CHAIN_SLACK: f64 = 1e-9;
const CHAIN_TRIPLES: usize = 50;
const SLOPE_REL_TOL: f64 = 1e-8;
const SWEEP_TIME: Duration = Duration::from_secs(60);
const LENS_REL_TOL: f64 = 1e-8;
const MC_SAMPLES: &str = "10000000";
const MC_MIN_CONFIGS: usize = 10;

const KNOWN_RED: &[(&str, &str)] = &[(
    "C7",
    "the mass bound mu(B_Rn) >= 1 - 2/(sqrt(pi) sqrt(n-1)) is false for n >= 6: \
     |x|^2 has mean n/(2 pi) under e^{-pi|x|^2}, so R_n sits at the median of |x| and \
     mu(B_Rn) increases to 1/2 (0.4906 at n = 101, 0.4933 at n = 200) while the claimed \
     bound tends to 1; the sandwich and sphere-ratio parts of the suite hold",
)];

struct Outcome {
    id: &'static str,
    passed: bool,
    detail: String,
}

fn radmax(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_radmax")).args(args).output().expect("failed to launch radmax");
    (out, start.elapsed())
}

fn json(out: &Output) -> Option<serde_json::Value> {
    serde_json::from_slice(&out.stdout).ok()
}

fn dim(n: u64) -> Dimension {
    Dimension::new(n).unwrap()
}

fn p0_through_cli(id: &'static str, targets: &[(&str, f64)]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for &(target, reference) in targets {
        let (out, elapsed) = radmax(&["p0", target]);
        let value = json(&out).and_then(|v| v["value"].as_f64());
        let ok = out.status.success() && elapsed < P0_TIME && value.is_some_and(|v| (v - reference).abs() < P0_TOL);
        passed &= ok;
        parts.push(format!("{target} = {:.9} (ref {reference}, {:.2}s)", value.unwrap_or(f64::NAN), elapsed.as_secs_f64()));
    }
    Outcome {
        id,
        passed,
        detail: parts.join("; "),
    }
}

fn criticality() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for kind in Exponent::ALL {
        let sup = critical_exponent(kind).unwrap();
        let below = kind.log_growth_base(sup.value - CRITICAL_STEP, sup.argmax);
        let above = sup_log_growth_base(kind, sup.value + CRITICAL_STEP).unwrap().value;
        let ok = below > 0.0 && above <= CRITICAL_SLACK.ln_1p();
        passed &= ok;
        parts.push(format!("{}: ln a(p0-) = {below:.3e}, sup ln a(p0+) = {above:.3e}", kind.name()));
    }
    Outcome {
        id: "C4",
        passed,
        detail: parts.join("; "),
    }
}

fn checks(out: &Output) -> Vec<serde_json::Value> {
    json(out).and_then(|v| v.as_array().cloned()).unwrap_or_default()
}

fn inclusion() -> Outcome {
    let (out, elapsed) = radmax(&["--format", "json", "verify", "inclusion"]);
    let all = checks(&out);
    let failed = all.iter().filter(|c| c["passed"] != true).count();
    Outcome {
        id: "C5",
        passed: out.status.success() && all.len() == INCLUSION_CHECKS && failed == 0 && elapsed < INCLUSION_TIME,
        detail: format!("{} configurations x 64 radii, {failed} failing, {:.0}s", all.len(), elapsed.as_secs_f64()),
    }
}

fn chain() -> Outcome {
    let policy = ExactPolicy::default();
    let dims = [2, 5, 20, 100, 400];
    let lambdas = [0.03, 0.1, 0.2, 0.3, 0.4];
    let ps = [1.003, 1.2];
    let mut triples = Vec::new();
    for n in dims {
        for l in lambdas {
            for p in ps {
                triples.push((n, l, p));
            }
        }
    }
    assert_eq!(triples.len(), CHAIN_TRIPLES);
    let mut parts = Vec::new();
    let mut passed = true;
    let constructions: [(&str, &dyn Fn(u64, f64, f64) -> Option<bool>); 3] = [
        ("theorem1/gaussian", &|n, l, p| {
            theorem1_construction(&RadialDensity::Gaussian, dim(n), p, l, &policy).ok()?.chain_holds(CHAIN_SLACK)
        }),
        ("theorem1/unitball", &|n, l, p| {
            theorem1_construction(&RadialDensity::UnitBallIndicator, dim(n), p, l, &policy).ok()?.chain_holds(CHAIN_SLACK)
        }),
        ("gaussian", &|n, l, p| gaussian_construction(dim(n), p, l, &policy).ok()?.chain_holds(CHAIN_SLACK)),
    ];
    for (name, run) in constructions {
        let violations = triples.iter().filter(|&&(n, l, p)| run(n, l, p) != Some(true)).count();
        passed &= violations == 0;
        parts.push(format!("{name}: {violations}/{CHAIN_TRIPLES} violations"));
    }
    Outcome {
        id: "C6",
        passed,
        detail: parts.join("; "),
    }
}

fn gaussian_lemmas() -> Outcome {
    let (out, _) = radmax(&["--format", "json", "verify", "gaussian-lemmas"]);
    let all = checks(&out);
    let sandwich = all.iter().any(|c| c["name"].as_str().is_some_and(|s| s.starts_with("sandwich")) && c["passed"] == true);
    let mass: Vec<_> = all.iter().filter(|c| c["name"].as_str().is_some_and(|s| s.starts_with("mass"))).collect();
    let mass_failed = mass.iter().filter(|c| c["passed"] != true).count();
    let (sph, _) = radmax(&["--format", "json", "verify", "spheres"]);
    let spheres = sph.status.success() && checks(&sph).iter().all(|c| c["passed"] == true);
    Outcome {
        id: "C7",
        passed: sandwich && spheres && mass.len() == 199 && mass_failed == 0,
        detail: format!(
            "sandwich {}, sphere ratio n=2..10000 {}, mass concentration {mass_failed}/{} dimensions fail",
            if sandwich { "holds" } else { "FAILS" },
            if spheres { "holds" } else { "FAILS" },
            mass.len()
        ),
    }
}

fn growth_sweep() -> Outcome {
    let lambda = critical_exponent(Exponent::General).unwrap().argmax;
    let lambda_arg = format!("{lambda}");
    let (out, elapsed) = radmax(&[
        "sweep", "--measure", "gaussian", "--construction", "theorem1", "--n", "100,1000,10000,100000,1000000", "--p", "1.003", "--lambda", &lambda_arg,
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let rows: Vec<(f64, f64, f64)> = rdr
        .records()
        .filter_map(|r| {
            let r = r.ok()?;
            Some((r[0].parse().ok()?, r[5].parse::<f64>().ok()?.ln(), r[6].parse().ok()?))
        })
        .collect();
    let mut worst = f64::INFINITY;
    let mut ok = out.status.success() && rows.len() == 5 && elapsed < SWEEP_TIME;
    if ok {
        worst = 0.0;
        let log_alpha = rows[0].1;
        ok &= log_alpha > 0.0;
        for w in rows.windows(2) {
            let slope = (w[1].2 - w[0].2) / (w[1].0 - w[0].0);
            worst = f64::max(worst, (slope - log_alpha).abs() / log_alpha);
        }
        ok &= worst < SLOPE_REL_TOL;
    }
    Outcome {
        id: "C8",
        passed: ok,
        detail: format!("n = 1e2..1e6 at p = 1.003, lambda = {lambda:.6}: worst slope rel. error {worst:.2e}, {:.2}s", elapsed.as_secs_f64()),
    }
}

/// Area of the intersection of disks of radii `a` and `b` with centers `d` apart.
fn lens_area(a: f64, b: f64, d: f64) -> f64 {
    let x = ((d * d + a * a - b * b) / (2.0 * d * a)).acos();
    let y = ((d * d + b * b - a * a) / (2.0 * d * b)).acos();
    let k = ((-d + a + b) * (d + a - b) * (d - a + b) * (d + a + b)).sqrt();
    a * a * x + b * b * y - 0.5 * k
}

fn geometry() -> Outcome {
    let f = RadialDensity::UnitBallIndicator;
    let mut worst: f64 = 0.0;
    for (d, t) in [(1.0, 1.0), (0.5, 0.8), (1.2, 0.4), (0.3, 1.1), (1.5, 0.9), (0.9, 0.15)] {
        let got = off_center_ball_measure(&f, &GeometrySpec::new(dim(2), d, t).unwrap()).unwrap().ln();
        let want = lens_area(1.0, t, d).ln();
        worst = worst.max((got - want).abs() / want.abs().max(1.0));
    }
    let first = (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0).ln();
    let got = off_center_ball_measure(&f, &GeometrySpec::new(dim(2), 1.0, 1.0).unwrap()).unwrap().ln();
    worst = worst.max((got - first).abs() / first.abs());

    let (out, elapsed) = radmax(&["--format", "json", "--seed", "0", "verify", "montecarlo", "--samples", MC_SAMPLES]);
    let all = checks(&out);
    let failed = all.iter().filter(|c| c["passed"] != true).count();
    Outcome {
        id: "C9",
        passed: worst < LENS_REL_TOL && out.status.success() && all.len() > MC_MIN_CONFIGS && failed == 0,
        detail: format!(
            "lens worst rel. error {worst:.2e}; Monte Carlo {} configurations at 1e7 samples, {failed} beyond 3 stderr, {:.0}s",
            all.len(),
            elapsed.as_secs_f64()
        ),
    }
}

fn determinism() -> Outcome {
    let commands: [&[&str]; 7] = [
        &["p0", "general"],
        &["p0", "gaussian-upper"],
        &["bound", "--measure", "gaussian", "--n", "40", "--p", "1.01", "--lambda", "0.2"],
        &["bound", "--measure", "unitball", "--n", "20", "--p", "1.05", "--lambda", "0.15", "--R", "0.9"],
        &["sweep", "--measure", "unitball", "--n", "10:50:10", "--p", "1.01,1.1", "--lambda", "0.1,0.3"],
        &["oracle", "--measure", "gaussian", "--n", "3", "--r", "0.2", "--points", "32", "--p", "1,2"],
        &["--seed", "11", "verify", "montecarlo", "--samples", "50000"],
    ];
    let mut differing = Vec::new();
    for args in commands {
        let (a, _) = radmax(args);
        let (b, _) = radmax(args);
        if a.stdout != b.stdout || a.status.code() != b.status.code() || a.stdout.is_empty() {
            differing.push(args.join(" "));
        }
    }
    Outcome {
        id: "C10",
        passed: differing.is_empty(),
        detail: if differing.is_empty() {
            format!("{} commands byte-identical over two runs", commands.len())
        } else {
            format!("differing: {}", differing.join(" | "))
        },
    }
}

fn main() -> ExitCode {
    let runs: Vec<fn() -> Outcome> = vec![
        || p0_through_cli("C1", &[("general", 1.005274)]),
        || p0_through_cli("C2", &[("gaussian-lower", 1.011871), ("gaussian-upper", 1.049427)]),
        || p0_through_cli("C3", &[("unitball", 1.03946)]),
        criticality,
        inclusion,
        chain,
        gaussian_lemmas,
        growth_sweep,
        geometry,
        determinism,
    ];
    let mut unexpected = 0;
    for run in runs {
        let o = run();
        let known = KNOWN_RED.iter().find(|(id, _)| *id == o.id);
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.detail);
        match (o.passed, known) {
            (false, Some((_, why))) => println!("     known red: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => println!("     listed as known red but passed"),
            (true, None) => {}
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    }
}
