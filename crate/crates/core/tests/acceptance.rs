//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use chebvar::report::Report;
use chebvar::suite;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0;
const MAX_D: u32 = 8;
const TRIALS: usize = 20;
const MIN_AGREEMENT: f64 = 0.9;
const K_SAMPLES: usize = 10_000;
const ORACLE_POINTS: usize = 20;
const ORACLE_TOL: f64 = 1e-6;
const MAX_SLOPE_K: u32 = 5;

struct Criterion {
    id: u32,
    label: &'static str,
    limit: Option<Duration>,
    run: fn(&mut ChaCha8Rng) -> Report,
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            label: "formula reproduction",
            limit: Some(Duration::from_secs(5)),
            run: |_| suite::formula_report().unwrap_or_else(|e| failed("formulas", e)),
        },
        Criterion {
            id: 2,
            label: "identity suite d <= 8",
            limit: Some(Duration::from_secs(300)),
            run: |_| suite::identity_report(MAX_D, chebvar::chebyshev::DEFAULT_DEGREE_CAP),
        },
        Criterion { id: 3, label: "branch algebra", limit: Some(Duration::from_secs(60)), run: suite::branch_report },
        Criterion {
            id: 4,
            label: "degree counts, 20 trials, agreement >= 0.9",
            limit: Some(Duration::from_secs(60)),
            run: |rng| suite::degree_report(TRIALS, MIN_AGREEMENT, rng),
        },
        Criterion {
            id: 5,
            label: "dynamics fixtures, 10^4 samples, inequalities to -1e-9, 64 steps, radius 1e6",
            limit: None,
            run: |_| suite::dynamics_report(K_SAMPLES),
        },
        Criterion {
            id: 6,
            label: "cone d <= 8 and slopes k <= 5",
            limit: None,
            run: |rng| suite::cone_family_report(MAX_D, MAX_SLOPE_K, rng),
        },
        Criterion { id: 7, label: "Molien series, 10 terms", limit: None, run: |_| suite::molien_report() },
        Criterion {
            id: 8,
            label: "oracle agreement, 20 points, relative 1e-6",
            limit: None,
            run: |rng| suite::oracle_report(MAX_D, ORACLE_POINTS, ORACLE_TOL, rng),
        },
    ]
}

fn failed(name: &str, e: impl std::fmt::Display) -> Report {
    let mut r = Report::new(name);
    r.fail(name, e);
    r
}

fn main() -> ExitCode {
    let mut all = true;
    for c in criteria() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + c.id as u64);
        let start = Instant::now();
        let report = (c.run)(&mut rng);
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let ok = report.passed() && in_time;
        all &= ok;
        let limit = c.limit.map_or("none".to_string(), |l| format!("{}s", l.as_secs()));
        println!(
            "criterion {}: {} {} ({}/{} checks, {:.2}s, limit {limit})",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.label,
            report.count_passed(),
            report.items.len(),
            elapsed.as_secs_f64(),
        );
        if let Some(f) = report.first_failure() {
            println!("  first failure: {} [{}]", f.name, f.detail);
        } else if !in_time {
            println!("  over time limit");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
