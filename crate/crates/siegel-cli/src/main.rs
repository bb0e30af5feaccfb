//! `siegel` — command-line front end for the Siegel-unit toolkit.
//!
//! Every subcommand maps onto one library operation and writes
//! deterministic JSON (or, for `order`, a bare exact rational) to stdout or
//! `--out`.  Exit codes follow a fixed contract:
//!
//! * `0` — success / certificate passed,
//! * `1` — mathematical certification failure,
//! * `2` — usage error (nothing was computed),
//! * `3` — inconclusive: horizon, precision, or search budget exhausted.
//!
//! All errors additionally emit a single machine-readable
//! `{code, message, context}` JSON line on stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use siegel_units::coeffring::{parse_rational, Rat};
use siegel_units::freeness::{
    check_primitivity, sweep_complete_freeness, DistinctBy, FreenessError, FreenessReport, Scope,
    SweepOptions,
};
use siegel_units::modgroup::{enumerate_group, enumerate_subgroups, GroupError};
use siegel_units::numeric::{find_parameters, NumericError};
use siegel_units::siegel::{
    bernoulli2_at, g_image_t_order, g_q_order, order_inequality_report, siegel_power_expansion,
};
use siegel_units::{default_horizon, GConfig, GroupElement, IndexVector, QSeries};

mod cache;
use cache::{Cache, FORMAT_VERSION};

const EXIT_PASS: i32 = 0;
const EXIT_MATH_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "siegel",
    version,
    about = "Siegel-unit expansions, Galois orbits, and normal-basis certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Directory for the expansion cache (overridden by SIEGEL_CACHE_DIR).
    #[arg(long = "cache-dir", global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,

    /// Disable the expansion cache.
    #[arg(long = "no-cache", global = true)]
    no_cache: bool,

    /// Worker threads for per-subgroup work (default: available cores).
    #[arg(long, global = true, value_name = "K")]
    parallel: Option<usize>,

    /// Working precision in bits for numeric certificates (min 64).
    #[arg(long, global = true, value_name = "BITS")]
    precision: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Expand g_v^(12N) as an exact series in t = q^(1/N).
    Expand {
        #[arg(long = "N", value_name = "LEVEL")]
        level: u32,
        /// Index vector "a,b" for v = (a, b)/N, nonzero mod Z^2.
        #[arg(long, value_name = "a,b")]
        v: String,
        /// Coefficients are computed for exponents below this bound.
        #[arg(long)]
        horizon: i64,
    },
    /// Exact q-order of g (or of g^sigma), as a rational string.
    Order {
        #[arg(long = "N", value_name = "LEVEL")]
        level: u32,
        #[arg(long, required_unless_present = "table", conflicts_with = "table")]
        l: Option<u32>,
        #[arg(long, required_unless_present = "table", conflicts_with = "table")]
        m: Option<u32>,
        /// Act by this group element first.
        #[arg(long, value_name = "a,b,c,d", conflicts_with = "table")]
        sigma: Option<String>,
        /// Emit the B2(<a/N>) order table for a = 0..N instead.
        #[arg(long)]
        table: bool,
    },
    /// Apply sigma to an index vector: v -> sigma^T v, canonicalized.
    Act {
        #[arg(long = "N", value_name = "LEVEL")]
        level: u32,
        #[arg(long, value_name = "a,b,c,d")]
        sigma: String,
        #[arg(long, value_name = "a,b")]
        v: String,
    },
    /// Order and full subgroup lattice of SL2(Z/N)/{+-1}.
    Group {
        #[arg(long = "N", value_name = "LEVEL")]
        level: u32,
    },
    /// Check ord(g^sigma) >= ord(g) with equality exactly on +-Gamma1(N).
    #[command(name = "verify-lemma22")]
    VerifyLemma22 {
        #[arg(long = "N", value_name = "LEVEL")]
        level: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        m: u32,
    },
    /// Search for (l, m, r) putting every conjugate ratio below epsilon.
    Search {
        #[arg(long = "N", value_name = "LEVEL")]
        level: u32,
        /// Target bound as an exact rational "p/q" (default: 1/(d!-1)).
        #[arg(long, value_name = "p/q")]
        epsilon: Option<String>,
        /// Maximum number of (l, m, r) candidates to certify.
        #[arg(long, default_value_t = 40)]
        budget: usize,
    },
    /// Certify complete freeness over the chosen scope, subgroup by subgroup.
    Certify {
        #[arg(long = "N", value_name = "LEVEL")]
        level: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        m: u32,
        /// "gamma0" for the upper-triangular scope, "full" for the whole group.
        #[arg(long)]
        scope: String,
        /// Evaluation point tau = r*i as an exact rational "p/q" (default 2).
        #[arg(long, value_name = "p/q")]
        r: Option<String>,
        /// Cross-check symbolic certificates with literal series determinants
        /// up to this subgroup order (0 disables).
        #[arg(long = "series-max-order", default_value_t = 4)]
        series_max_order: usize,
    },
    /// Batch certify over a level range, one report file per level.
    Sweep {
        /// Inclusive level range "A..B".
        #[arg(long = "N-range", value_name = "A..B")]
        range: String,
        #[arg(long, default_value_t = 2)]
        l: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value = "gamma0")]
        scope: String,
        /// Directory receiving the per-level report files (append-only).
        #[arg(long = "results-dir", default_value = "reports")]
        results_dir: PathBuf,
        #[arg(long, value_name = "p/q")]
        r: Option<String>,
        #[arg(long = "series-max-order", default_value_t = 4)]
        series_max_order: usize,
    },
    /// Verify that distinct Galois conjugates of g stay distinct.
    Primitivity {
        #[arg(long = "N", value_name = "LEVEL")]
        level: u32,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        m: u32,
        /// Series comparison horizon (default 40*N).
        #[arg(long)]
        horizon: Option<i64>,
    },
}

/// A failed run: exit code plus the stderr JSON payload.
#[derive(Debug)]
struct Failure {
    exit: i32,
    code: &'static str,
    message: String,
    context: serde_json::Value,
}

impl Failure {
    fn usage(message: impl Into<String>, context: serde_json::Value) -> Failure {
        Failure {
            exit: EXIT_USAGE,
            code: "usage",
            message: message.into(),
            context,
        }
    }

    fn math(message: impl Into<String>, context: serde_json::Value) -> Failure {
        Failure {
            exit: EXIT_MATH_FAIL,
            code: "certification-failed",
            message: message.into(),
            context,
        }
    }

    fn inconclusive(message: impl Into<String>, context: serde_json::Value) -> Failure {
        Failure {
            exit: EXIT_INCONCLUSIVE,
            code: "inconclusive",
            message: message.into(),
            context,
        }
    }

    fn emit(&self) {
        eprintln!(
            "{}",
            json!({ "code": self.code, "message": self.message, "context": self.context })
        );
    }
}

fn main() {
    let code = run(std::env::args_os().collect());
    std::process::exit(code);
}

fn run(args: Vec<std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return EXIT_PASS;
        }
        Err(e) => {
            let f = Failure::usage(e.to_string(), json!({ "kind": e.kind().to_string() }));
            f.emit();
            return f.exit;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            f.emit();
            f.exit
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    let precision = cli.precision.unwrap_or(siegel_units::DEFAULT_PRECISION);
    if precision < 64 {
        return Err(Failure::usage(
            "precision must be at least 64 bits",
            json!({ "precision": precision }),
        ));
    }
    let parallel = cli.parallel.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let output = OutputSink {
        path: cli.out.clone(),
    };
    let mut cache = Cache::resolve(cli.no_cache, cli.cache_dir.clone());

    match cli.command {
        Command::Expand { level, v, horizon } => {
            cmd_expand(&output, &mut cache, level, &v, horizon)
        }
        Command::Order {
            level,
            l,
            m,
            sigma,
            table,
        } => cmd_order(&output, level, l, m, sigma.as_deref(), table),
        Command::Act { level, sigma, v } => cmd_act(&output, level, &sigma, &v),
        Command::Group { level } => cmd_group(&output, level),
        Command::VerifyLemma22 { level, l, m } => cmd_verify_lemma22(&output, level, l, m),
        Command::Search {
            level,
            epsilon,
            budget,
        } => cmd_search(&output, level, epsilon.as_deref(), budget, precision),
        Command::Certify {
            level,
            l,
            m,
            scope,
            r,
            series_max_order,
        } => {
            let cfg = config(level, l, m)?;
            let scope = parse_scope(&scope)?;
            let opts = sweep_options(
                level,
                r.as_deref(),
                precision,
                parallel,
                series_max_order,
            )?;
            let report = run_sweep(&cfg, scope, &opts)?;
            output.write(&(pretty(&report.to_json_value()) + "\n"))?;
            Ok(emit_verdict(
                freeness_exit(&report),
                "freeness certification",
                json!({ "N": level, "overall": report.overall }),
            ))
        }
        Command::Sweep {
            range,
            l,
            m,
            scope,
            results_dir,
            r,
            series_max_order,
        } => cmd_sweep(
            &output,
            &range,
            l,
            m,
            &scope,
            &results_dir,
            r.as_deref(),
            precision,
            parallel,
            series_max_order,
        ),
        Command::Primitivity {
            level,
            l,
            m,
            horizon,
        } => cmd_primitivity(&output, level, l, m, horizon),
    }
}

// --- output plumbing --------------------------------------------------------

struct OutputSink {
    path: Option<PathBuf>,
}

impl OutputSink {
    fn write(&self, text: &str) -> Result<(), Failure> {
        let res = match &self.path {
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|()| stdout.flush())
            }
            Some(path) => std::fs::write(path, text),
        };
        res.map_err(|e| {
            Failure::usage(
                format!("cannot write output: {e}"),
                json!({ "out": self.path.as_ref().map(|p| p.display().to_string()) }),
            )
        })
    }
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON serialization")
}

// --- flag parsing helpers ----------------------------------------------------

fn parse_ints(s: &str, want: usize, what: &str) -> Result<Vec<i64>, Failure> {
    let parts: Result<Vec<i64>, _> = s.split(',').map(|p| p.trim().parse::<i64>()).collect();
    match parts {
        Ok(v) if v.len() == want => Ok(v),
        _ => Err(Failure::usage(
            format!("{what} must be {want} comma-separated integers"),
            json!({ "got": s }),
        )),
    }
}

fn index_vector(level: u32, s: &str) -> Result<IndexVector, Failure> {
    let parts = parse_ints(s, 2, "--v")?;
    let a = parts[0].rem_euclid(level as i64) as u32;
    let b = parts[1].rem_euclid(level as i64) as u32;
    IndexVector::new(level, a, b)
        .map_err(|e| Failure::usage(e.to_string(), json!({ "v": s, "N": level })))
}

fn group_element(level: u32, s: &str) -> Result<GroupElement, Failure> {
    let p = parse_ints(s, 4, "--sigma")?;
    GroupElement::new(level, p[0], p[1], p[2], p[3])
        .map_err(|e| Failure::usage(e.to_string(), json!({ "sigma": s, "N": level })))
}

fn config(level: u32, l: u32, m: u32) -> Result<GConfig, Failure> {
    GConfig::new(level, l, m)
        .map_err(|e| Failure::usage(e.to_string(), json!({ "N": level, "l": l, "m": m })))
}

fn parse_scope(s: &str) -> Result<Scope, Failure> {
    match s {
        "gamma0" | "gamma0-upper" => Ok(Scope::Gamma0Upper),
        "full" => Ok(Scope::Full),
        _ => Err(Failure::usage(
            "scope must be \"gamma0\" or \"full\"",
            json!({ "scope": s }),
        )),
    }
}

fn positive_rational(s: &str, flag: &str) -> Result<Rat, Failure> {
    let value = parse_rational(s).ok_or_else(|| {
        Failure::usage(
            format!("{flag} must be a rational \"p/q\""),
            json!({ "got": s }),
        )
    })?;
    if value <= Rat::from_integer(0.into()) {
        return Err(Failure::usage(
            format!("{flag} must be positive"),
            json!({ "got": s }),
        ));
    }
    Ok(value)
}

/// Inclusive "A..B" level range.
fn parse_range(s: &str) -> Result<(u32, u32), Failure> {
    let bad = || {
        Failure::usage(
            "--N-range must be an inclusive range \"A..B\" with 2 <= A <= B",
            json!({ "got": s }),
        )
    };
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let lo: u32 = a.trim().parse().map_err(|_| bad())?;
    let hi: u32 = b.trim().parse().map_err(|_| bad())?;
    if lo < 2 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn sweep_options(
    level: u32,
    r: Option<&str>,
    precision: usize,
    parallel: usize,
    series_max_order: usize,
) -> Result<SweepOptions, Failure> {
    let mut opts = SweepOptions::for_level(level);
    opts.precision = precision;
    opts.parallel = parallel.max(1);
    opts.series_check_max_order = series_max_order;
    if let Some(r) = r {
        opts.r = positive_rational(r, "--r")?;
    }
    Ok(opts)
}

// --- error mapping -----------------------------------------------------------

fn map_freeness_error(e: FreenessError) -> Failure {
    let message = e.to_string();
    match e {
        FreenessError::Series(_) => Failure::inconclusive(message, json!({ "stage": "series" })),
        FreenessError::Numeric(ne) => map_numeric_error(ne),
        FreenessError::Group(GroupError::AmbientTooLarge { size, bound }) => Failure::usage(
            message,
            json!({ "ambient_order": size, "bound": bound }),
        ),
        _ => Failure::math(message, json!({})),
    }
}

fn map_numeric_error(e: NumericError) -> Failure {
    let message = e.to_string();
    match e {
        NumericError::NonPositiveR(_) => Failure::usage(message, json!({})),
        NumericError::Unrepresentable(x) => {
            Failure::inconclusive(message, json!({ "value": x }))
        }
        NumericError::BudgetExhausted { budget, .. } => {
            let mut f = Failure::inconclusive(message, json!({ "budget": budget }));
            f.code = "budget-exhausted";
            f
        }
        NumericError::Siegel(_) => Failure::math(message, json!({})),
    }
}

// --- subcommands --------------------------------------------------------------

fn cmd_expand(
    output: &OutputSink,
    cache: &mut Cache,
    level: u32,
    v: &str,
    horizon: i64,
) -> Result<i32, Failure> {
    if horizon < 1 {
        return Err(Failure::usage(
            "horizon must be at least 1",
            json!({ "horizon": horizon }),
        ));
    }
    let v = index_vector(level, v)?;
    let key = format!(
        "expand|v{}|N={}|a={}|b={}|h={}",
        FORMAT_VERSION,
        level,
        v.a(),
        v.b(),
        horizon
    );
    let validate = |text: &str| {
        QSeries::from_json(text)
            .map(|s| s.level() == level && s.horizon() == horizon)
            .unwrap_or(false)
    };
    let body = cache.get_or_compute(&key, validate, || {
        let series = siegel_power_expansion(&v, horizon)
            .map_err(|e| Failure::math(e.to_string(), json!({ "stage": "expand" })))?;
        Ok(series.to_json() + "\n")
    })?;
    output.write(&body)?;
    Ok(EXIT_PASS)
}

fn cmd_order(
    output: &OutputSink,
    level: u32,
    l: Option<u32>,
    m: Option<u32>,
    sigma: Option<&str>,
    table: bool,
) -> Result<i32, Failure> {
    if table {
        if level < 2 {
            return Err(Failure::usage(
                "level must be at least 2",
                json!({ "N": level }),
            ));
        }
        let six_n = Rat::from_integer((6 * i64::from(level)).into());
        let rows: Vec<serde_json::Value> = (0..=level)
            .map(|a| {
                let b2 = bernoulli2_at(level, a % level);
                let unit_q_order = &six_n * &b2;
                json!({
                    "a": a,
                    "x": Rat::new(i64::from(a).into(), i64::from(level).into()).to_string(),
                    "b2": b2.to_string(),
                    "unit_q_order": unit_q_order.to_string(),
                })
            })
            .collect();
        let doc = json!({ "kind": "order-table", "N": level, "rows": rows });
        output.write(&(pretty(&doc) + "\n"))?;
        return Ok(EXIT_PASS);
    }

    // clap guarantees l and m are present when --table is absent.
    let cfg = config(level, l.expect("required"), m.expect("required"))?;
    let q_order = match sigma {
        None => g_q_order(&cfg),
        Some(s) => {
            let sigma = group_element(level, s)?;
            let t_order = g_image_t_order(&cfg, &sigma)
                .map_err(|e| Failure::usage(e.to_string(), json!({ "sigma": s })))?;
            Rat::new(t_order.into(), i64::from(level).into())
        }
    };
    output.write(&format!("{q_order}\n"))?;
    Ok(EXIT_PASS)
}

fn cmd_act(output: &OutputSink, level: u32, sigma: &str, v: &str) -> Result<i32, Failure> {
    let sigma = group_element(level, sigma)?;
    let v = index_vector(level, v)?;
    let image = sigma.act_on_index(&v);
    let doc = json!({
        "kind": "act",
        "N": level,
        "sigma": sigma.entries().to_vec(),
        "v": [v.a(), v.b()],
        "image": [image.a(), image.b()],
    });
    output.write(&(pretty(&doc) + "\n"))?;
    Ok(EXIT_PASS)
}

fn cmd_group(output: &OutputSink, level: u32) -> Result<i32, Failure> {
    if level < 2 {
        return Err(Failure::usage(
            "level must be at least 2",
            json!({ "N": level }),
        ));
    }
    let elements = enumerate_group(level);
    let subgroups = enumerate_subgroups(level, &elements)
        .map_err(|e| match e {
            GroupError::AmbientTooLarge { size, bound } => Failure::usage(
                e.to_string(),
                json!({ "ambient_order": size, "bound": bound }),
            ),
            _ => Failure::math(e.to_string(), json!({})),
        })?
        .into_iter()
        .map(|h| {
            json!({
                "order": h.order(),
                "generators": h
                    .generators()
                    .iter()
                    .map(|g| g.entries().to_vec())
                    .collect::<Vec<_>>(),
            })
        })
        .collect::<Vec<_>>();
    let doc = json!({ "order": elements.len(), "subgroups": subgroups });
    output.write(&(pretty(&doc) + "\n"))?;
    Ok(EXIT_PASS)
}

fn cmd_verify_lemma22(output: &OutputSink, level: u32, l: u32, m: u32) -> Result<i32, Failure> {
    let cfg = config(level, l, m)?;
    let report = order_inequality_report(&cfg);
    let rows: Vec<serde_json::Value> = report
        .rows
        .iter()
        .map(|row| {
            json!({
                "sigma": row.sigma.entries().to_vec(),
                "ratio_t_order": row.ratio_t_order,
                "ratio_q_order": Rat::new(
                    row.ratio_t_order.into(),
                    i64::from(level).into()
                )
                .to_string(),
                "in_gamma1": row.in_gamma1,
            })
        })
        .collect();
    let equality_set: Vec<Vec<u32>> = report
        .rows
        .iter()
        .filter(|row| row.ratio_t_order == 0)
        .map(|row| row.sigma.entries().to_vec())
        .collect();
    let doc = json!({
        "kind": "order-inequality",
        "N": report.level,
        "l": report.l,
        "m": report.m,
        "all_nonnegative": report.all_nonnegative,
        "equality_exactly_on_gamma1": report.equality_exactly_on_gamma1,
        "equality_set": equality_set,
        "rows": rows,
        "pass": report.pass(),
    });
    output.write(&(pretty(&doc) + "\n"))?;
    Ok(if report.pass() {
        EXIT_PASS
    } else {
        EXIT_MATH_FAIL
    })
}

fn cmd_search(
    output: &OutputSink,
    level: u32,
    epsilon: Option<&str>,
    budget: usize,
    precision: usize,
) -> Result<i32, Failure> {
    if level < 2 {
        return Err(Failure::usage(
            "level must be at least 2",
            json!({ "N": level }),
        ));
    }
    let epsilon = epsilon
        .map(|s| positive_rational(s, "--epsilon"))
        .transpose()?;
    match find_parameters(level, epsilon, budget, precision) {
        Ok(outcome) => {
            output.write(&(pretty(&outcome.to_json_value()) + "\n"))?;
            Ok(EXIT_PASS)
        }
        Err(NumericError::BudgetExhausted { budget, best }) => {
            // The best attempt still goes to stdout so callers can inspect
            // how far the search got; the verdict is carried by the exit
            // code and the stderr diagnostic.
            output.write(&(pretty(&best.to_json_value()) + "\n"))?;
            let f = map_numeric_error(NumericError::BudgetExhausted { budget, best });
            f.emit();
            Ok(f.exit)
        }
        Err(e) => Err(map_numeric_error(e)),
    }
}

fn run_sweep(
    cfg: &GConfig,
    scope: Scope,
    opts: &SweepOptions,
) -> Result<FreenessReport, Failure> {
    sweep_complete_freeness(cfg, scope, opts).map_err(map_freeness_error)
}

/// Verdict-to-exit mapping for a freeness report: genuine certificate
/// failures dominate precision-limited ones.
fn freeness_exit(report: &FreenessReport) -> i32 {
    if report.overall {
        return EXIT_PASS;
    }
    let mut any_genuine = false;
    let mut any_limited = false;
    for record in &report.records {
        if record.pass {
            continue;
        }
        match record.numeric.as_ref() {
            Some(n) if n.certificate.error_limited() => any_limited = true,
            _ => any_genuine = true,
        }
    }
    if any_genuine || !any_limited {
        EXIT_MATH_FAIL
    } else {
        EXIT_INCONCLUSIVE
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    output: &OutputSink,
    range: &str,
    l: u32,
    m: u32,
    scope: &str,
    results_dir: &Path,
    r: Option<&str>,
    precision: usize,
    parallel: usize,
    series_max_order: usize,
) -> Result<i32, Failure> {
    let (lo, hi) = parse_range(range)?;
    let scope_enum = parse_scope(scope)?;
    let scope_name = match scope_enum {
        Scope::Gamma0Upper => "gamma0",
        Scope::Full => "full",
    };
    std::fs::create_dir_all(results_dir).map_err(|e| {
        Failure::usage(
            format!("cannot create results dir: {e}"),
            json!({ "results_dir": results_dir.display().to_string() }),
        )
    })?;
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);

    let mut entries = Vec::new();
    let mut failing_levels = Vec::new();
    let mut exit = EXIT_PASS;
    for level in lo..=hi {
        let cfg = config(level, l, m)?;
        let opts = sweep_options(level, r, precision, parallel, series_max_order)?;
        let report = run_sweep(&cfg, scope_enum, &opts)?;
        let text = pretty(&report.to_json_value()) + "\n";
        let stem = format!("freeness-N{level}-l{l}-m{m}-{scope_name}-{timestamp}");
        let path = unique_report_path(results_dir, &stem);
        std::fs::write(&path, &text).map_err(|e| {
            Failure::usage(
                format!("cannot write report: {e}"),
                json!({ "path": path.display().to_string() }),
            )
        })?;
        let level_exit = freeness_exit(&report);
        if level_exit != EXIT_PASS {
            failing_levels.push(level);
        }
        exit = combine_exits(exit, level_exit);
        entries.push(json!({
            "N": level,
            "overall": report.overall,
            "subgroups": report.records.len(),
            "file": path.display().to_string(),
        }));
    }
    let doc = json!({
        "kind": "sweep-index",
        "l": l,
        "m": m,
        "scope": scope_name,
        "reports": entries,
    });
    output.write(&(pretty(&doc) + "\n"))?;
    Ok(emit_verdict(
        exit,
        "freeness sweep",
        json!({ "failing_levels": failing_levels }),
    ))
}

/// Reports go to stdout; a non-pass verdict is restated on stderr so every
/// nonzero exit carries a machine-readable diagnostic line.
fn emit_verdict(exit: i32, what: &str, context: serde_json::Value) -> i32 {
    match exit {
        EXIT_MATH_FAIL => Failure::math(format!("{what} failed"), context).emit(),
        EXIT_INCONCLUSIVE => {
            Failure::inconclusive(format!("{what} is inconclusive at this precision"), context)
                .emit()
        }
        _ => {}
    }
    exit
}

/// Mathematical failure outranks inconclusive, which outranks pass.
fn combine_exits(a: i32, b: i32) -> i32 {
    if a == EXIT_MATH_FAIL || b == EXIT_MATH_FAIL {
        EXIT_MATH_FAIL
    } else {
        a.max(b)
    }
}

fn unique_report_path(dir: &Path, stem: &str) -> PathBuf {
    let first = dir.join(format!("{stem}.json"));
    if !first.exists() {
        return first;
    }
    let mut k = 1u32;
    loop {
        let candidate = dir.join(format!("{stem}-{k}.json"));
        if !candidate.exists() {
            return candidate;
        }
        k += 1;
    }
}

fn cmd_primitivity(
    output: &OutputSink,
    level: u32,
    l: u32,
    m: u32,
    horizon: Option<i64>,
) -> Result<i32, Failure> {
    let cfg = config(level, l, m)?;
    let horizon = horizon.unwrap_or_else(|| default_horizon(level));
    if horizon < 1 {
        return Err(Failure::usage(
            "horizon must be at least 1",
            json!({ "horizon": horizon }),
        ));
    }
    let report = check_primitivity(&cfg, horizon).map_err(map_freeness_error)?;
    output.write(&(pretty(&report.to_json_value()) + "\n"))?;
    if report.pass() {
        return Ok(EXIT_PASS);
    }
    let unresolved = report
        .witnesses
        .iter()
        .any(|w| w.status == DistinctBy::Unresolved);
    let exit = if unresolved {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_MATH_FAIL
    };
    Ok(emit_verdict(
        exit,
        "primitivity check",
        json!({ "N": level, "horizon": horizon }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing_is_inclusive_and_validated() {
        assert_eq!(parse_range("2..4").unwrap(), (2, 4));
        assert_eq!(parse_range("3..3").unwrap(), (3, 3));
        assert!(parse_range("1..4").is_err());
        assert!(parse_range("4..2").is_err());
        assert!(parse_range("2-4").is_err());
        assert!(parse_range("two..four").is_err());
    }

    #[test]
    fn vector_parsing_reduces_mod_level() {
        let v = index_vector(3, "-1, 4").unwrap();
        assert_eq!((v.a(), v.b()), (1, 2), "(-1,4) = (2,1) = -(1,2) mod 3");
        assert!(index_vector(3, "3,3").is_err(), "zero vector rejected");
        assert!(index_vector(3, "1").is_err());
    }

    #[test]
    fn sigma_parsing_demands_unimodularity() {
        assert!(group_element(2, "1,1,0,1").is_ok());
        assert!(group_element(2, "1,1,1,1").is_err());
        assert!(group_element(2, "1,1,0").is_err());
    }

    #[test]
    fn scope_names_accept_both_spellings() {
        assert_eq!(parse_scope("gamma0").unwrap(), Scope::Gamma0Upper);
        assert_eq!(parse_scope("gamma0-upper").unwrap(), Scope::Gamma0Upper);
        assert_eq!(parse_scope("full").unwrap(), Scope::Full);
        assert!(parse_scope("Gamma0").is_err());
    }

    #[test]
    fn exit_combination_prefers_math_failure() {
        assert_eq!(combine_exits(0, 0), 0);
        assert_eq!(combine_exits(0, 3), 3);
        assert_eq!(combine_exits(3, 1), 1);
        assert_eq!(combine_exits(1, 3), 1);
    }

    #[test]
    fn report_paths_never_collide() {
        let tmp = tempfile::tempdir().unwrap();
        let a = unique_report_path(tmp.path(), "stem");
        std::fs::write(&a, "x").unwrap();
        let b = unique_report_path(tmp.path(), "stem");
        std::fs::write(&b, "y").unwrap();
        let c = unique_report_path(tmp.path(), "stem");
        assert_eq!(a.file_name().unwrap(), "stem.json");
        assert_eq!(b.file_name().unwrap(), "stem-1.json");
        assert_eq!(c.file_name().unwrap(), "stem-2.json");
    }

    #[test]
    fn epsilon_must_be_a_positive_rational() {
        assert_eq!(
            positive_rational("1/719", "--epsilon").unwrap(),
            Rat::new(1.into(), 719.into())
        );
        assert!(positive_rational("0", "--epsilon").is_err());
        assert!(positive_rational("-1/2", "--epsilon").is_err());
        assert!(positive_rational("x", "--epsilon").is_err());
    }
}
