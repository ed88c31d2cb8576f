//! Command-line front end.
//!
//! Exit codes: 0 when every assertion holds, 1 on a violation or negative
//! answer, 2 on usage or input errors, 3 when a search ran out of budget.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use linemin_core::certificate::{verify_certificate, WitnessCertificate};
use linemin_core::geometry::{pg, GeometryError};
use linemin_core::harness::catalog::{named_matroid, resolve_cache_dir, Catalog, CatalogSpec, BUILTIN_CATALOGS};
use linemin_core::harness::census::{check_kung_bound, density_profile, extremal_census, CensusOptions, CensusReport};
use linemin_core::harness::config::{Config, OutputFormat};
use linemin_core::harness::HarnessError;
use linemin_core::mask::SubsetMask;
use linemin_core::matrix_io::{format_matrix, parse_matrix};
use linemin_core::matroid::{
    is_round, lines, local_connectivity, AnyMatroid, ExplicitMatroid, Matroid, MatroidSpec, PointIndex,
};
use linemin_core::minors::{max_line_minor, minor_isomorphic, MinorError, MinorSearchBudget};
use linemin_core::procedures::{
    line_from_line_and_plane, rational_str, round_dense_restriction, round_restriction, skew_dense_subset,
    DensityTarget, GrowthPolicy, ProcedureError,
};

#[derive(Parser)]
#[command(name = "linemin", version, about = "Matroids over small finite fields and long line minors")]
struct Cli {
    /// Node budget for minor searches.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Seed override for random catalogs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Catalog cache directory (default: $LINEMIN_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// Matrix text or matroid JSON; stdin when absent.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// A named matroid such as `fano`, `pg4q2` or `u2,6`.
    #[arg(long, conflicts_with = "input")]
    named: Option<String>,
}

#[derive(Args, Clone)]
struct CensusArgs {
    #[arg(long)]
    catalog: String,
    #[arg(long)]
    l: u64,
    #[arg(long)]
    iso_reduce: bool,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the matrix of PG(n-1,q).
    Pg { n: u32, q: u64 },
    /// Number of points.
    Eps(Input),
    /// Lines with at least `min-points` points.
    Lines {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        min_points: usize,
    },
    /// Roundness, with a covering certificate when not round.
    Round(Input),
    /// Local connectivity of two sets.
    Connectivity {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = parse_set)]
        a: SubsetMask,
        #[arg(long, value_parser = parse_set)]
        b: SubsetMask,
    },
    /// Search for a minor isomorphic to a named target.
    FindMinor {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        target: String,
    },
    /// Longest line in any minor.
    MaxLine(Input),
    /// A dense subset of A skew to B.
    SkewDense {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = parse_set)]
        a: SubsetMask,
        #[arg(long, value_parser = parse_set)]
        b: SubsetMask,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        k: usize,
    },
    /// A round restriction meeting a growth policy `f(1),f(2),...`.
    RoundRestrict {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        policy: String,
    },
    /// Round dense restriction or a density witness.
    RoundDense {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t: usize,
    },
    /// A long line in a contraction from a line and a plane.
    LinePlane {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = parse_set)]
        line: SubsetMask,
        #[arg(long, value_parser = parse_set)]
        plane: SubsetMask,
        #[arg(long)]
        q: u64,
    },
    /// Kung's bound over a catalog.
    CheckKung(CensusArgs),
    /// Largest ε per rank against θ_q(r).
    DensityProfile(CensusArgs),
    /// Extremal members and the projective geometry recognizer.
    ExtremalCensus(CensusArgs),
    /// Replay a certificate against a matroid.
    VerifyCert {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Build or list catalogs.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Generate a catalog into the cache directory, or print it.
    Build {
        name: String,
        #[arg(long)]
        iso_reduce: bool,
    },
    /// Built-in and configured catalog names.
    List,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        "text" => Ok(OutputFormat::Text),
        _ => Err(format!("expected json, csv or text, found `{s}`")),
    }
}

fn parse_set(s: &str) -> Result<SubsetMask, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| format!("bad index `{t}`")))
        .collect()
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Budget(String),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Minor(MinorError::BudgetExceeded { .. })
            | HarnessError::Procedure(ProcedureError::Minor(MinorError::BudgetExceeded { .. })) => {
                CliError::Budget(e.to_string())
            }
            e => CliError::Usage(e.to_string()),
        }
    }
}

macro_rules! via_harness {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                HarnessError::from(e).into()
            }
        }
    )*};
}
via_harness!(MinorError, ProcedureError, GeometryError, linemin_core::MatroidError, io::Error);

struct Context {
    config: Config,
    budget: MinorSearchBudget,
    format: OutputFormat,
    cache_dir: Option<PathBuf>,
    seed: Option<u64>,
}

/// What a command prints and how it exits.
struct Outcome {
    value: Value,
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(value: Value, text: impl Into<String>) -> Self {
        Outcome { value, text: text.into(), code: 0 }
    }
}

fn read_matroid(input: &Input) -> Result<AnyMatroid, CliError> {
    if let Some(name) = &input.named {
        return Ok(named_matroid(name)?);
    }
    let text = match &input.input {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let origin = input.input.as_deref().map(Path::display).map(|d| d.to_string()).unwrap_or_else(|| "<stdin>".into());
    if text.trim_start().starts_with('{') {
        let spec: MatroidSpec =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
        Ok(spec.build()?)
    } else {
        let m = parse_matrix(&text).map_err(|e| CliError::Usage(format!("{origin}:{e}")))?;
        Ok(m.into())
    }
}

fn set_json(s: &SubsetMask) -> Value {
    json!(s.to_vec())
}

fn cert_json(c: &WitnessCertificate) -> Value {
    serde_json::to_value(c).expect("certificates serialize")
}

fn catalog(ctx: &Context, name: &str, iso_reduce: bool) -> Result<Catalog, CliError> {
    let mut spec = ctx.config.catalog_spec(name)?;
    if let (CatalogSpec::RandomLinear { seed, .. }, Some(s)) = (&mut spec, ctx.seed) {
        *seed = s;
    }
    let iso = iso_reduce || ctx.config.iso_reduce.unwrap_or(false);
    Ok(Catalog::load_or_generate(name, &spec, iso, ctx.cache_dir.as_deref())?)
}

fn census(
    ctx: &Context,
    args: &CensusArgs,
    run: fn(&Catalog, u64, &CensusOptions) -> Result<CensusReport, HarnessError>,
) -> Result<(CensusReport, u8), CliError> {
    let cat = catalog(ctx, &args.catalog, args.iso_reduce)?;
    let opts = CensusOptions { budget: ctx.budget, wall_time: args.timing };
    let mut report = run(&cat, args.l, &opts)?;
    if let Some(t) = &ctx.config.density_threshold {
        report.params.insert("density_threshold".into(), serde_json::to_value(t).expect("thresholds serialize"));
    }
    let code = report.exit_code() as u8;
    Ok((report, code))
}

fn emit_report(ctx: &Context, report: &CensusReport) -> String {
    match ctx.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.summary_csv(),
        OutputFormat::Text => report.summary_text(),
    }
}

/// Top-level scalar fields as one CSV row; nested values as JSON.
fn value_csv(v: &Value) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    match v {
        Value::Object(map) => {
            w.write_record(map.keys()).expect("in-memory writer");
            w.write_record(map.values().map(|x| match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }))
            .expect("in-memory writer");
        }
        other => {
            w.write_record([other.to_string()]).expect("in-memory writer");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV is UTF-8")
}

fn run(cli: Cli) -> Result<(String, u8), CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let budget = match cli.budget.or(config.budget) {
        Some(n) => MinorSearchBudget::with_nodes(n),
        None => MinorSearchBudget::default(),
    };
    let ctx = Context {
        budget,
        format: cli.format.or(config.format).unwrap_or_default(),
        cache_dir: resolve_cache_dir(cli.cache_dir.as_deref().or(config.cache_dir.as_deref())),
        seed: cli.seed.or(config.seed),
        config,
    };

    let outcome = match cli.command {
        Command::Pg { n, q } => {
            let m = pg(n, q)?;
            return Ok((format_matrix(&m), 0));
        }
        Command::Eps(input) => {
            let eps = PointIndex::new(&read_matroid(&input)?).count();
            Outcome::ok(json!(eps), eps.to_string())
        }
        Command::Lines { input, min_points } => {
            let m = read_matroid(&input)?;
            let found = lines(&m, min_points);
            let text = found.iter().map(|l| format!("{l}\n")).collect::<String>();
            let value = json!({"lines": found.iter().map(set_json).collect::<Vec<_>>()});
            Outcome::ok(value, text.trim_end())
        }
        Command::Round(input) => {
            let m = read_matroid(&input)?;
            let verdict = is_round(&m)?;
            let mut value = json!({"round": verdict.is_round()});
            if let Some(c) = verdict.certificate() {
                value["certificate"] = cert_json(c);
            }
            Outcome::ok(value, if verdict.is_round() { "round" } else { "not round" })
        }
        Command::Connectivity { input, a, b } => {
            let m = read_matroid(&input)?;
            let k = local_connectivity(&m, &a, &b)?;
            Outcome::ok(json!({"connectivity": k, "skew": k == 0}), k.to_string())
        }
        Command::FindMinor { input, target } => {
            let m = read_matroid(&input)?;
            let t = ExplicitMatroid::from_matroid(&named_matroid(&target)?)?;
            match minor_isomorphic(&m, &t, ctx.budget)? {
                Some(cert) => {
                    let text = serde_json::to_string(&cert).expect("certificates serialize");
                    Outcome::ok(json!({"found": true, "certificate": cert_json(&cert)}), text)
                }
                None => Outcome { value: json!({"found": false}), text: format!("no {target} minor"), code: 1 },
            }
        }
        Command::MaxLine(input) => {
            let m = read_matroid(&input)?;
            let found = max_line_minor(&m, ctx.budget)?;
            let value = json!({
                "points": found.points,
                "exact": found.exact,
                "nodes": found.nodes,
                "certificate": cert_json(&found.certificate),
            });
            let code = if found.exact { 0 } else { 3 };
            let text = if found.exact { found.points.to_string() } else { format!(">= {}", found.points) };
            Outcome { value, text, code }
        }
        Command::SkewDense { input, a, b, lambda, q, l, k } => {
            let m = read_matroid(&input)?;
            let lambda = rational_str::parse(&lambda).map_err(CliError::Usage)?;
            let target = DensityTarget::new(lambda, q, l, k)?;
            let out = skew_dense_subset(&m, &a, &b, &target)?;
            let value = json!({
                "set": set_json(&out),
                "rank": m.rank(&out),
                "points": PointIndex::within(&m, &out).count(),
                "final_lambda": target.final_lambda().to_string(),
            });
            Outcome::ok(value, out.to_string())
        }
        Command::RoundRestrict { input, policy } => {
            let m = read_matroid(&input)?;
            let table = policy
                .split(',')
                .map(|s| rational_str::parse(s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::Usage)?;
            let policy = GrowthPolicy::from_table(table)?;
            let out = round_restriction(&m, &policy)?;
            let value = json!({
                "set": set_json(&out),
                "rank": m.rank(&out),
                "points": PointIndex::within(&m, &out).count(),
            });
            Outcome::ok(value, out.to_string())
        }
        Command::RoundDense { input, q, t } => {
            let m = read_matroid(&input)?;
            let out = round_dense_restriction(&m, q, t)?;
            let value = serde_json::to_value(&out).expect("outcomes serialize");
            Outcome::ok(value.clone(), value.to_string())
        }
        Command::LinePlane { input, line, plane, q } => {
            let m = read_matroid(&input)?;
            let cert = line_from_line_and_plane(&m, &line, &plane, q)?;
            let value = cert_json(&cert);
            Outcome::ok(value.clone(), value.to_string())
        }
        Command::CheckKung(args) => {
            let (report, code) = census(&ctx, &args, check_kung_bound)?;
            return Ok((emit_report(&ctx, &report), code));
        }
        Command::DensityProfile(args) => {
            let (report, code) = census(&ctx, &args, density_profile)?;
            return Ok((emit_report(&ctx, &report), code));
        }
        Command::ExtremalCensus(args) => {
            let (report, code) = census(&ctx, &args, extremal_census)?;
            return Ok((emit_report(&ctx, &report), code));
        }
        Command::VerifyCert { input, cert } => {
            let m = read_matroid(&input)?;
            let text = std::fs::read_to_string(&cert).map_err(|e| CliError::Usage(format!("{}: {e}", cert.display())))?;
            let c: WitnessCertificate =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", cert.display())))?;
            let valid = verify_certificate(&c, &m)?;
            Outcome {
                value: json!({"valid": valid, "type": c.kind()}),
                text: if valid { "valid" } else { "invalid" }.into(),
                code: if valid { 0 } else { 1 },
            }
        }
        Command::Catalog(CatalogCommand::Build { name, iso_reduce }) => {
            let cat = catalog(&ctx, &name, iso_reduce)?;
            return Ok(match &ctx.cache_dir {
                Some(dir) => {
                    let path = cat.store(dir)?;
                    (format!("{} members -> {}\n", cat.members.len(), path.display()), 0)
                }
                None => (String::from_utf8(cat.to_json()).expect("JSON is UTF-8"), 0),
            });
        }
        Command::Catalog(CatalogCommand::List) => {
            let names: Vec<String> =
                BUILTIN_CATALOGS.iter().map(|s| s.to_string()).chain(ctx.config.catalog.keys().cloned()).collect();
            Outcome::ok(json!(names), names.join("\n"))
        }
    };

    let body = match ctx.format {
        OutputFormat::Json => serde_json::to_string_pretty(&outcome.value).expect("values serialize") + "\n",
        OutputFormat::Csv => value_csv(&outcome.value),
        OutputFormat::Text => outcome.text + "\n",
    };
    Ok((body, outcome.code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((body, code)) => {
            let mut out = io::stdout().lock();
            // A closed pipe is not an error worth reporting.
            let _ = out.write_all(body.as_bytes()).and_then(|_| out.flush());
            ExitCode::from(code)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Budget(msg)) => {
            eprintln!("budget exhausted: {msg}");
            ExitCode::from(3)
        }
    }
}
