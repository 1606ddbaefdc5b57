use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use chebvar::algebra::to_text;
use chebvar::catalog::{self, entry};
use chebvar::chebyshev::{cheb_endo, real_form};
use chebvar::dynamics::{self, OrbitStatus};
use chebvar::invariants::{conjugate_system, induced_morphism_capped, molien_series, ConjugacyParams, MolienGroup};
use chebvar::report::Report;
use chebvar::suite;
use chebvar::{Rational, C64};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "chebvar", version, about = "Chebyshev maps on dihedral orbit varieties")]
struct Cli {
    /// Seed for every random spot check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest degree that may be constructed.
    #[arg(long, global = true, default_value_t = 16)]
    cap: u32,
    /// Where the JSON report goes.
    #[arg(long, global = true, default_value = "chebvar-report.json")]
    report: PathBuf,
    /// Print the JSON report to stdout instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical text of g_d, or of T_d / f_d.
    Derive {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value_t = DeriveKind::Induced)]
        kind: DeriveKind,
    },
    /// Run a verification suite or a single catalogue entry.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteName::All)]
        suite: SuiteName,
        #[arg(long, default_value_t = 8)]
        max_d: u32,
        /// Check one catalogue entry instead of a suite.
        #[arg(long)]
        entry: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Resultants, discriminants and the quartics h_+ and h_-.
    Branch {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Also run the preimage-variety inclusions.
        #[arg(long)]
        preimages: bool,
    },
    /// Generic and special preimage counts.
    Degree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Iterate g_d from a start point.
    Orbit {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        /// Comma separated coordinates, each `re` or `re:im`.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = dynamics::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = dynamics::DEFAULT_ESCAPE_RADIUS)]
        radius: f64,
        /// Write the orbit as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// CSV and SVG figure data.
    Plot {
        #[arg(long, value_enum)]
        figure: Figure,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        /// Catalogue entry for `kset`.
        #[arg(long, default_value = "plane")]
        entry: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Leading coefficients of the Molien series.
    Molien {
        #[arg(long, value_enum)]
        group: Group,
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Conjugate g_d on C^3/D4 by a triangular change of coordinates.
    Conjugate {
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// `a11,a12,a21,a22,b,c,k,m,n` as rationals.
        #[arg(long, allow_hyphen_values = true, default_value = "1,0,0,1,1,1,0,0,0")]
        params: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DeriveKind {
    Induced,
    Endo,
    Real,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum SuiteName {
    All,
    Formulas,
    Identities,
    Branch,
    Degree,
    Dynamics,
    Cone,
    Molien,
    Oracle,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Figure {
    Jordan,
    Jacobian,
    Kset,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Group {
    D3,
    D4,
}

struct Outcome {
    reports: Vec<Report>,
    data: Value,
    text: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { reports: Vec::new(), data: json!({}), text: Vec::new() }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn error_report(name: &str, e: impl std::fmt::Display) -> Report {
    let mut r = Report::new(name);
    r.fail(name, e);
    r
}

fn derive(n: usize, d: u32, kind: DeriveKind, cap: u32) -> Result<Outcome, String> {
    if d > cap {
        return Err(format!("degree {d} exceeds the cap {cap}"));
    }
    let map = match kind {
        DeriveKind::Induced => induced_morphism_capped(n, d, cap).map(|g| g.map.clone()),
        DeriveKind::Endo => cheb_endo(n, d).map(|e| e.map),
        DeriveKind::Real => real_form(n, d).map(|f| f.map),
    }
    .map_err(|e| e.to_string())?;
    let texts: Vec<String> = map.components().iter().map(to_text).collect();
    let mut out = Outcome::new();
    out.text = texts.clone();
    out.data = json!({ "source_vars": map.source_vars(), "components": texts });
    Ok(out)
}

fn verify(cli: &Cli, suite_name: SuiteName, max_d: u32, name: Option<&str>, samples: usize, trials: usize) -> Outcome {
    let mut out = Outcome::new();
    if let Some(name) = name {
        out.reports.push(suite::entry_report(name, max_d, &mut rng(cli.seed)));
        return out;
    }
    let wants = |s: SuiteName| suite_name == SuiteName::All || suite_name == s;
    if wants(SuiteName::Formulas) {
        out.reports.push(suite::formula_report().unwrap_or_else(|e| error_report("formulas", e)));
    }
    if wants(SuiteName::Identities) {
        out.reports.push(suite::identity_report(max_d, cli.cap));
    }
    if wants(SuiteName::Branch) {
        out.reports.push(suite::branch_report(&mut rng(cli.seed)));
    }
    if wants(SuiteName::Degree) {
        out.reports.push(suite::degree_report(trials, 0.9, &mut rng(cli.seed)));
    }
    if wants(SuiteName::Dynamics) {
        out.reports.push(suite::dynamics_report(samples));
    }
    if wants(SuiteName::Cone) {
        out.reports.push(suite::cone_family_report(max_d, 5, &mut rng(cli.seed)));
    }
    if wants(SuiteName::Molien) {
        out.reports.push(suite::molien_report());
    }
    if wants(SuiteName::Oracle) {
        out.reports.push(suite::oracle_report(max_d, 20, 1e-6, &mut rng(cli.seed)));
    }
    out
}

fn branch(seed: u64, n: usize, preimages: bool) -> Result<Outcome, String> {
    let mut out = Outcome::new();
    let mut r = rng(seed);
    match n {
        2 => out.reports.push(catalog::branch_report_n2().unwrap_or_else(|e| error_report("branch n=2", e))),
        3 => out.reports.push(catalog::branch_report_n3(&mut r).unwrap_or_else(|e| error_report("branch n=3", e))),
        _ => return Err(format!("branch reports exist for n = 2, 3, not {n}")),
    }
    if preimages {
        for case in catalog::PREIMAGE_CASES {
            out.reports.push(catalog::verify_preimage_varieties(case, &mut r).unwrap_or_else(|e| error_report(case, e)));
        }
    }
    Ok(out)
}

fn degree(seed: u64, n: usize, d: u32, trials: usize) -> Result<Outcome, String> {
    let want = match (n, d) {
        (2, 2) => 4,
        (2, 3) => 9,
        (3, 2) => 8,
        _ => return Err(format!("degree counts exist for (n, d) = (2, 2), (2, 3), (3, 2), not ({n}, {d})")),
    };
    let mut out = Outcome::new();
    let count = dynamics::count_generic_preimages(n, d, trials, &mut rng(seed)).map_err(|e| e.to_string())?;
    out.text.push(format!("modal count {:?}, agreement {:.3}", count.modal, count.agreement));
    out.data = json!({ "modal": count.modal, "agreement": count.agreement,
        "counts": count.trials.iter().map(|t| t.count).collect::<Vec<_>>() });
    out.reports.push(count.report(want, 0.9));
    if n == 2 {
        out.reports.push(dynamics::classify_special_points(d).unwrap_or_else(|e| error_report("special points", e)));
    }
    Ok(out)
}

fn parse_point(s: &str) -> Result<Vec<C64>, String> {
    s.split(',')
        .map(|part| {
            let mut it = part.trim().splitn(2, ':');
            let re: f64 = it.next().unwrap_or("").trim().parse().map_err(|_| format!("bad coordinate {part:?}"))?;
            let im: f64 = match it.next() {
                Some(t) => t.trim().parse().map_err(|_| format!("bad coordinate {part:?}"))?,
                None => 0.0,
            };
            Ok(C64::new(re, im))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn orbit(cap: u32, n: usize, d: u32, start: &str, max_iter: usize, radius: f64, csv: Option<&Path>) -> Result<Outcome, String> {
    let g = induced_morphism_capped(n, d, cap).map_err(|e| e.to_string())?;
    let start = parse_point(start)?;
    if start.len() != g.map.source_vars().len() {
        return Err(format!("start needs {} coordinates", g.map.source_vars().len()));
    }
    let rec = dynamics::iterate_orbit(&g.map.compile::<f64>(), &start, max_iter, radius).map_err(|e| e.to_string())?;
    let names: Vec<&str> = g.map.source_vars().iter().map(|s| s.as_str()).collect();
    if let Some(path) = csv {
        write(path, &dynamics::orbit_csv(&names, &rec))?;
    }
    let status = match rec.status {
        OrbitStatus::BoundedHorizon => "bounded_horizon",
        OrbitStatus::Escaped => "escaped",
    };
    let last = rec.iterates.last().map(|z| z.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>());
    let mut out = Outcome::new();
    out.text.push(format!("{status} after {} iterates", rec.iterates.len()));
    out.data = json!({ "status": status, "escape_index": rec.escape_index, "non_finite": rec.non_finite,
        "iterations": rec.iterates.len(), "last": last });
    Ok(out)
}

fn write(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn plot(figure: Figure, samples: usize, name: &str, dir: &Path) -> Result<Outcome, String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let mut out = Outcome::new();
    let (stem, csv, svg) = match figure {
        Figure::Jordan => {
            let pts = dynamics::jordan_curve_data(samples).map_err(|e| e.to_string())?;
            let mut r = Report::new("jordan curve");
            r.check("arcs share exactly (1, -1) and (9, 27)", dynamics::jordan_endpoints_ok(&pts), "");
            out.reports.push(r);
            ("jordan".to_string(), dynamics::jordan_csv(&pts), dynamics::jordan_svg(&pts))
        }
        Figure::Jacobian => {
            let grid = dynamics::jacobian_partition_data(samples).map_err(|e| e.to_string())?;
            out.reports.push(dynamics::verify_jacobian_formula().unwrap_or_else(|e| error_report("jacobian", e)));
            ("jacobian".to_string(), dynamics::jacobian_csv(&grid), dynamics::jacobian_svg(&grid))
        }
        Figure::Kset => {
            let e = entry(name).map_err(|e| e.to_string())?;
            let pts = dynamics::sample_k_set(e, samples).map_err(|e| e.to_string())?;
            let worst = pts.iter().flat_map(|s| s.residuals.iter().copied()).fold(f64::INFINITY, f64::min);
            let imag = pts.iter().map(|s| s.imag_residue).fold(0.0, f64::max);
            let mut r = Report::new(format!("bounded set on {name}"));
            r.check("inequalities hold to -1e-9", worst >= -1e-9, format!("{worst:.3e}"));
            r.check("samples are real", imag < 1e-9, format!("{imag:.3e}"));
            out.reports.push(r);
            (format!("kset_{name}"), dynamics::k_samples_csv(e, &pts), dynamics::k_samples_svg(&pts))
        }
    };
    let csv_path = dir.join(format!("{stem}.csv"));
    let svg_path = dir.join(format!("{stem}.svg"));
    write(&csv_path, &csv)?;
    write(&svg_path, &svg)?;
    out.text.push(format!("wrote {} and {}", csv_path.display(), svg_path.display()));
    out.data = json!({ "csv": csv_path.display().to_string(), "svg": svg_path.display().to_string() });
    Ok(out)
}

fn molien(group: Group, terms: usize) -> Result<Outcome, String> {
    if terms == 0 {
        return Err("at least one term".into());
    }
    let g = match group {
        Group::D3 => MolienGroup::D3OnR2,
        Group::D4 => MolienGroup::D4OnR3,
    };
    let series = molien_series(g, terms - 1).map_err(|e| e.to_string())?;
    let shown: Vec<String> = series.iter().map(|c| c.to_string()).collect();
    let mut out = Outcome::new();
    out.text.push(shown.join(", "));
    out.data = json!({ "coefficients": shown });
    Ok(out)
}

fn conjugate(seed: u64, d: u32, params: &str) -> Result<Outcome, String> {
    let v: Vec<Rational> = params
        .split(',')
        .map(|s| s.trim().parse::<Rational>().map_err(|_| format!("bad rational {s:?}")))
        .collect::<Result<_, _>>()?;
    let [a11, a12, a21, a22, b, c, k, m, n] = <[Rational; 9]>::try_from(v).map_err(|_| "expected nine parameters".to_string())?;
    let p = ConjugacyParams { a: [[a11, a12], [a21, a22]], b, c, k, m, n };
    let sys = conjugate_system(&p, d, &mut rng(seed)).map_err(|e| e.to_string())?;
    let texts: Vec<String> = sys.g_prime.components().iter().map(to_text).collect();
    let mut out = Outcome::new();
    out.text = texts.clone();
    out.data = json!({ "g_prime": texts, "generators": sys.system.names });
    out.reports.push(sys.report);
    Ok(out)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Derive { .. } => "derive",
        Command::Verify { .. } => "verify",
        Command::Branch { .. } => "branch",
        Command::Degree { .. } => "degree",
        Command::Orbit { .. } => "orbit",
        Command::Plot { .. } => "plot",
        Command::Molien { .. } => "molien",
        Command::Conjugate { .. } => "conjugate",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Derive { n, d, kind } => derive(*n, *d, *kind, cli.cap),
        Command::Verify { suite, max_d, entry, samples, trials } => {
            if *max_d > cli.cap {
                Err(format!("max-d {max_d} exceeds the cap {}", cli.cap))
            } else {
                Ok(verify(&cli, *suite, *max_d, entry.as_deref(), *samples, *trials))
            }
        }
        Command::Branch { n, preimages } => branch(cli.seed, *n, *preimages),
        Command::Degree { n, d, trials } => degree(cli.seed, *n, *d, *trials),
        Command::Orbit { n, d, start, max_iter, radius, csv } => {
            orbit(cli.cap, *n, *d, start, *max_iter, *radius, csv.as_deref())
        }
        Command::Plot { figure, samples, entry, out_dir } => plot(*figure, *samples, entry, out_dir),
        Command::Molien { group, terms } => molien(*group, *terms),
        Command::Conjugate { d, params } => conjugate(cli.seed, *d, params),
    };
    let (outcome, error) = match result {
        Ok(o) => (o, None),
        Err(e) => (Outcome::new(), Some(e)),
    };
    let passed = error.is_none() && outcome.reports.iter().all(Report::passed);
    let first_failure = outcome
        .reports
        .iter()
        .find_map(|r| r.first_failure().map(|f| json!({ "report": r.title, "check": f.name, "detail": f.detail })));
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command_name(&cli.command),
        "arguments": format!("{:?}", cli.command),
        "seed": cli.seed,
        "cap": cli.cap,
        "passed": passed,
        "error": error,
        "first_failure": first_failure,
        "data": outcome.data,
        "reports": outcome.reports,
    });
    let body = serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n";
    if let Err(e) = write(&cli.report, &body) {
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    if cli.json {
        print!("{body}");
    } else {
        for line in &outcome.text {
            println!("{line}");
        }
        for r in &outcome.reports {
            println!("{}: {}/{} checks passed", r.title, r.count_passed(), r.items.len());
        }
    }
    if let Some(e) = &error {
        eprintln!("error: {e}");
    } else if let Some(f) = &first_failure {
        eprintln!("first failure: {} / {} [{}]", f["report"], f["check"], f["detail"]);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
