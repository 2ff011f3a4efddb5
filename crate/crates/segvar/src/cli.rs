//! Command-line interface: validate, solve, sample, measure, integrate,
//! clt, mcmc, timing.
//!
//! Every output carries provenance: CSV gets a `# segvar <version> seed=...
//! config=<hash>` first line, JSON gets a `meta` object. Exit codes: 0 on
//! success, 1 on validation or runtime failure, 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bench::{self, CltIntegrand, IntegrationConfig, Integrand, McmcConfig, Scheme};
use crate::catalog::{Construction, ConstructionSpec};
use crate::concordance::{self, VModel};
use crate::error::{Error, Result};
use crate::optimizer::{self, SolverOptions, UniformityProblem};
use crate::sampling::{self, IidUniform};
use crate::segments::SegmentSet;

#[derive(Parser, Debug)]
#[command(name = "segvar", version, about = "Antithetic sampling on line segments")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
    /// Worker-thread cap (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON file of defaults; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a segment-set file against the uniformity assumptions.
    Validate {
        #[arg(long)]
        segments: PathBuf,
        /// Also KS-test the marginals on this many draws.
        #[arg(long)]
        ks_n: Option<usize>,
    },
    /// Solve a coordinate problem and emit segment-set JSON.
    Solve {
        #[command(subcommand)]
        problem: SolveProblem,
    },
    /// Draw from a construction or segment-set file as CSV.
    Sample(SampleArgs),
    /// Concordance measures, exact or empirical, as JSON.
    Measure(MeasureArgs),
    /// Wang-Sloan Monte Carlo integration study.
    Integrate(IntegrateArgs),
    /// CLT variance check for generalized Latin hypercube averages.
    Clt(CltArgs),
    /// Antithetically coupled MCMC variance-ratio experiments.
    Mcmc(McmcArgs),
    /// Sampling-time study across constructions and dimensions.
    Timing(TimingArgs),
}

#[derive(Subcommand, Debug)]
enum SolveProblem {
    /// Circulant countermonotonic problem on C_d(offsets).
    Circulant {
        #[arg(long)]
        d: Option<usize>,
        /// Comma-separated offsets, e.g. `1,2`.
        #[arg(long, value_delimiter = ',')]
        offsets: Vec<usize>,
    },
    /// Marginal standard uniformity on the graph of an existing set.
    Uniform {
        #[arg(long)]
        segments: PathBuf,
        /// Add the constant-sum rows (strict d-CTM problem).
        #[arg(long)]
        ctm: bool,
    },
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    construction: ConstructionArgs,
    #[arg(long)]
    n: Option<usize>,
    /// V model when sampling from a segment-set file.
    #[arg(long, value_enum)]
    v_model: Option<VModelArg>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    construction: ConstructionArgs,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, value_enum)]
    v_model: Option<VModelArg>,
    /// Draw count for the empirical method.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct ConstructionArgs {
    /// Construction kind (antithetic-pair, rotation, aj-base-b, gaffke3,
    /// gaffke-d, ccv, rbs, lh, ilh).
    #[arg(long)]
    construction: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    b: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    offsets: Option<Vec<usize>>,
    #[arg(long = "t")]
    t: Option<usize>,
    /// Base construction for ilh (iid when omitted): rbs, ccv, ccv-exch, aj2.
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    exchangeable: bool,
    /// Segment-set JSON file instead of a named construction.
    #[arg(long)]
    segments: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VModelArg {
    Common,
    Iid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Empirical,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    /// wang-sloan or product2.
    #[arg(long)]
    integrand: Option<String>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    p: Option<usize>,
    /// Comma-separated points-per-estimate list.
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<usize>>,
    #[arg(long)]
    reps: Option<usize>,
    /// Comma-separated schemes among mc-iid, glh-ccv.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// External point file evaluated alongside the schemes.
    #[arg(long)]
    points_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CltArgs {
    /// prod2 or additive.
    #[arg(long = "fn")]
    function: Option<String>,
    #[arg(long, value_delimiter = ',')]
    d_list: Option<Vec<usize>>,
    #[arg(long)]
    reps: Option<usize>,
    /// iid or aj2.
    #[arg(long)]
    base: Option<String>,
}

#[derive(Args, Debug)]
struct McmcArgs {
    /// probit or pumps.
    model: String,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Coupling width (chains per group).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    burnin: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    antithetic_acceptance: bool,
    /// Write the synthetic probit data set to this path and exit.
    #[arg(long)]
    emit_data: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TimingArgs {
    /// Comma-separated names: rbs, ccv, ccv-exch, aj2, rotation, gaffke-d, lh.
    #[arg(long, value_delimiter = ',')]
    constructions: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    d_list: Option<Vec<usize>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
}

/// Entry point: parse, dispatch, and map failures to exit codes.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Resolved global context: seed, output target, format, config hash.
struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
    format: OutFormat,
    config_hash: String,
    merged: serde_json::Map<String, serde_json::Value>,
}

impl Ctx {
    fn new(cli: &Cli, default_format: OutFormat) -> Result<Ctx> {
        let merged: serde_json::Map<String, serde_json::Value> = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text)?
            }
            None => Default::default(),
        };
        let seed = cli
            .seed
            .or_else(|| merged.get("seed").and_then(|v| v.as_u64()))
            .unwrap_or(0);
        let format = cli.format.unwrap_or(default_format);
        Ok(Ctx {
            seed,
            out: cli.out.clone(),
            format,
            config_hash: "unsealed".into(),
            merged,
        })
    }

    /// Fix the config hash from the fully resolved parameter object.
    fn seal<S: Serialize>(&mut self, command: &str, resolved: &S) {
        let body = serde_json::json!({
            "command": command,
            "seed": self.seed,
            "params": resolved,
        });
        let mut hasher = Sha256::new();
        hasher.update(body.to_string().as_bytes());
        self.config_hash = hex_prefix(&hasher.finalize(), 12);
    }

    fn header_line(&self) -> String {
        format!(
            "# segvar {} seed={} config={}",
            env!("CARGO_PKG_VERSION"),
            self.seed,
            self.config_hash
        )
    }

    fn meta(&self) -> serde_json::Value {
        serde_json::json!({
            "tool": "segvar",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "config": self.config_hash,
        })
    }

    fn get_usize(&self, key: &str) -> Option<usize> {
        self.merged.get(key).and_then(|v| v.as_u64()).map(|v| v as usize)
    }

    fn get_f64(&self, key: &str) -> Option<f64> {
        self.merged.get(key).and_then(|v| v.as_f64())
    }

    fn get_string(&self, key: &str) -> Option<String> {
        self.merged
            .get(key)
            .and_then(|v| v.as_str())
            .map(str::to_string)
    }

    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    /// Serialize rows as CSV (with the provenance line) or as JSON.
    fn write_rows<S: Serialize>(&self, header: &str, rows: &[S]) -> Result<()> {
        match self.format {
            OutFormat::Csv => {
                let mut text = self.header_line();
                text.push('\n');
                text.push_str(header);
                text.push('\n');
                for row in rows {
                    let value = serde_json::to_value(row)?;
                    let cells: Vec<String> = header
                        .split(',')
                        .map(|key| display_cell(value.get(key)))
                        .collect();
                    let _ = writeln!(text, "{}", cells.join(","));
                }
                self.write(&text)
            }
            OutFormat::Json => {
                let body = serde_json::json!({ "meta": self.meta(), "rows": rows });
                self.write(&format!("{}\n", serde_json::to_string_pretty(&body)?))
            }
        }
    }
}

fn display_cell(v: Option<&serde_json::Value>) -> String {
    match v {
        None | Some(serde_json::Value::Null) => String::new(),
        Some(serde_json::Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn hex_prefix(bytes: &[u8], chars: usize) -> String {
    let mut s = String::new();
    for b in bytes {
        let _ = write!(s, "{b:02x}");
        if s.len() >= chars {
            break;
        }
    }
    s.truncate(chars);
    s
}

fn dispatch(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Validate { segments, ks_n } => {
            let mut ctx = Ctx::new(&cli, OutFormat::Json)?;
            let segments = segments.clone();
            let ks_n = ks_n.or_else(|| ctx.get_usize("ks_n"));
            cmd_validate(&mut ctx, &segments, ks_n)
        }
        Command::Solve { problem } => {
            let mut ctx = Ctx::new(&cli, OutFormat::Json)?;
            cmd_solve(&mut ctx, problem)
        }
        Command::Sample(args) => {
            let mut ctx = Ctx::new(&cli, OutFormat::Csv)?;
            cmd_sample(&mut ctx, args)
        }
        Command::Measure(args) => {
            let mut ctx = Ctx::new(&cli, OutFormat::Json)?;
            cmd_measure(&mut ctx, args)
        }
        Command::Integrate(args) => {
            let mut ctx = Ctx::new(&cli, OutFormat::Csv)?;
            cmd_integrate(&mut ctx, args)
        }
        Command::Clt(args) => {
            let mut ctx = Ctx::new(&cli, OutFormat::Csv)?;
            cmd_clt(&mut ctx, args)
        }
        Command::Mcmc(args) => {
            let mut ctx = Ctx::new(&cli, OutFormat::Csv)?;
            cmd_mcmc(&mut ctx, args)
        }
        Command::Timing(args) => {
            let mut ctx = Ctx::new(&cli, OutFormat::Csv)?;
            cmd_timing(&mut ctx, args)
        }
    }
}

fn cmd_validate(ctx: &mut Ctx, path: &PathBuf, ks_n: Option<usize>) -> Result<i32> {
    let set = SegmentSet::from_json(&std::fs::read_to_string(path)?)?;
    ctx.seal(
        "validate",
        &serde_json::json!({"segments": path, "ks_n": ks_n}),
    );
    let report = set.uniformity_residuals();
    let uniform = report.is_standard_uniform(1e-8);
    let ctm = report.is_constant_sum(1e-10);
    let mut ks = Vec::new();
    let mut ks_pass = true;
    if let Some(n) = ks_n {
        let batch = sampling::draw_unchecked(&set, n, ctx.seed, 0)?;
        let crit = crate::stats::ks_critical(n, 0.01);
        for l in 0..set.d {
            let mut col = batch.column(l);
            let stat = crate::stats::ks_statistic_uniform(&mut col);
            ks_pass &= stat < crit;
            ks.push(serde_json::json!({
                "coordinate": l + 1,
                "statistic": stat,
                "critical_1pct": crit,
                "pass": stat < crit,
            }));
        }
    }
    let body = serde_json::json!({
        "meta": ctx.meta(),
        "admissibility_violations": report.admissibility_violations,
        "range_violations": report.range_violations,
        "max_coordinate_residual": report.max_coordinate_residual(),
        "max_constant_sum_residual": report.max_constant_sum_residual(),
        "standard_uniform": uniform,
        "constant_sum": ctm,
        "ks": ks,
    });
    ctx.write(&format!("{}\n", serde_json::to_string_pretty(&body)?))?;
    Ok(if uniform && ks_pass { 0 } else { 1 })
}

fn cmd_solve(ctx: &mut Ctx, problem: &SolveProblem) -> Result<i32> {
    let opts = SolverOptions::default();
    let (set, resolved) = match problem {
        SolveProblem::Circulant { d, offsets } => {
            let d = d
                .or_else(|| ctx.get_usize("d"))
                .ok_or_else(|| usage("solve circulant needs --d"))?;
            let offsets = if offsets.is_empty() {
                vec![1]
            } else {
                offsets.clone()
            };
            let set = crate::catalog::ccv_segment_set(d, &offsets)?;
            (
                set,
                serde_json::json!({"problem": "circulant", "d": d, "offsets": offsets}),
            )
        }
        SolveProblem::Uniform { segments, ctm } => {
            let base = SegmentSet::from_json(&std::fs::read_to_string(segments)?)?;
            let result = if *ctm {
                let p = UniformityProblem::strict_ctm(&base)?;
                optimizer::solve_strict_ctm(&p, opts)?
            } else {
                let p = UniformityProblem::standard_uniform(&base)?;
                optimizer::solve_standard_uniform(&p, opts)?
            };
            (
                result.segment_set,
                serde_json::json!({"problem": "uniform", "segments": segments, "ctm": ctm}),
            )
        }
    };
    ctx.seal("solve", &resolved);
    // Canonical segment-set JSON plus the provenance object; readers ignore
    // unknown fields so the published schema still holds.
    let mut value: serde_json::Value = serde_json::from_str(&set.to_json())?;
    value["meta"] = ctx.meta();
    ctx.write(&format!("{}\n", serde_json::to_string_pretty(&value)?))?;
    Ok(0)
}

fn build_construction(args: &ConstructionArgs, ctx: &Ctx) -> Result<Option<Construction>> {
    if let Some(path) = &args.segments {
        let text = std::fs::read_to_string(path)?;
        let set = SegmentSet::from_json(&text)?;
        return Ok(Some(Construction {
            kind: crate::catalog::Kind::Custom {
                path: path.display().to_string(),
                set,
            },
            exchangeable: args.exchangeable,
        }));
    }
    let kind = match args
        .construction
        .clone()
        .or_else(|| ctx.get_string("construction"))
    {
        Some(k) => k,
        None => return Ok(None),
    };
    let base = args
        .base
        .clone()
        .or_else(|| ctx.get_string("base"))
        .map(|name| {
            let d = args.d.or_else(|| ctx.get_usize("d")).unwrap_or(2);
            bench::construction_by_name(&name, d).map(|c| Box::new(c.to_spec()))
        })
        .transpose()?;
    let spec = ConstructionSpec {
        kind,
        d: args.d.or_else(|| ctx.get_usize("d")),
        b: args.b,
        offsets: args.offsets.clone(),
        t: args.t.or_else(|| ctx.get_usize("T")),
        base,
        path: None,
        parts: None,
        exchangeable: args.exchangeable,
    };
    Construction::from_spec(&spec).map(Some)
}

fn usage(msg: &str) -> Error {
    Error::BadConstruction(msg.to_string())
}

fn cmd_sample(ctx: &mut Ctx, args: &SampleArgs) -> Result<i32> {
    let n = args
        .n
        .or_else(|| ctx.get_usize("n"))
        .ok_or_else(|| usage("sample needs --n"))?;
    let construction = build_construction(&args.construction, ctx)?
        .ok_or_else(|| usage("sample needs --construction or --segments"))?;
    ctx.seal(
        "sample",
        &serde_json::json!({
            "construction": construction.to_spec(),
            "n": n,
            "v_model": format!("{:?}", args.v_model),
        }),
    );
    let batch = match args.v_model {
        Some(VModelArg::Iid) => {
            let set = construction.segment_set()?;
            let iid = IidUniform { d: set.d };
            sampling::draw_generalized(&set, &iid, n, ctx.seed, 0)?
        }
        _ => {
            let sampler = construction.sampler()?;
            sampling::sample_batch(&*sampler, n, ctx.seed, 0, &construction.label())
        }
    };
    let mut text = ctx.header_line();
    text.push('\n');
    let cols: Vec<String> = (1..=batch.d).map(|l| format!("u{l}")).collect();
    text.push_str(&cols.join(","));
    text.push('\n');
    for row in batch.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(text, "{}", cells.join(","));
    }
    ctx.write(&text)?;
    Ok(0)
}

fn cmd_measure(ctx: &mut Ctx, args: &MeasureArgs) -> Result<i32> {
    let construction = build_construction(&args.construction, ctx)?
        .ok_or_else(|| usage("measure needs --construction or --segments"))?;
    let method = args.method.unwrap_or(MethodArg::Exact);
    let v_model = match args.v_model.unwrap_or(VModelArg::Common) {
        VModelArg::Common => VModel::Common,
        VModelArg::Iid => VModel::Iid,
    };
    let n = args.n.or_else(|| ctx.get_usize("n")).unwrap_or(1_000_000);
    ctx.seal(
        "measure",
        &serde_json::json!({
            "construction": construction.to_spec(),
            "method": format!("{method:?}"),
            "v_model": format!("{:?}", args.v_model),
            "n": n,
        }),
    );
    let report = match method {
        MethodArg::Exact => {
            let set = construction.segment_set()?;
            concordance::exact_report(&set, v_model)?
        }
        MethodArg::Empirical => {
            let sampler = construction.sampler()?;
            let b1 = sampling::sample_batch(&*sampler, n, ctx.seed, 0, &construction.label());
            let b2 = sampling::sample_batch(&*sampler, n, ctx.seed, 1, &construction.label());
            concordance::empirical_report(&b1, &b2)?
        }
    };
    let body = serde_json::json!({
        "meta": ctx.meta(),
        "construction": construction.label(),
        "report": report,
    });
    ctx.write(&format!("{}\n", serde_json::to_string_pretty(&body)?))?;
    Ok(0)
}

fn cmd_integrate(ctx: &mut Ctx, args: &IntegrateArgs) -> Result<i32> {
    let integrand = match args
        .integrand
        .clone()
        .or_else(|| ctx.get_string("integrand"))
        .unwrap_or_else(|| "wang-sloan".into())
        .as_str()
    {
        "wang-sloan" => Integrand::WangSloan,
        "product2" => Integrand::Product2,
        other => return Err(usage(&format!("unknown integrand `{other}`"))),
    };
    let mut schemes = Vec::new();
    let scheme_names = args
        .schemes
        .clone()
        .unwrap_or_else(|| vec!["mc-iid".into(), "glh-ccv".into()]);
    for name in &scheme_names {
        schemes.push(match name.as_str() {
            "mc-iid" => Scheme::McIid,
            "glh-ccv" => Scheme::GlhCcv,
            other => return Err(usage(&format!("unknown scheme `{other}`"))),
        });
    }
    if let Some(path) = &args.points_file {
        schemes.push(Scheme::ExternalPointFile(path.clone()));
    }
    let config = IntegrationConfig {
        integrand,
        a: args.a.or_else(|| ctx.get_f64("a")).unwrap_or(0.1),
        tau: args.tau.or_else(|| ctx.get_f64("tau")).unwrap_or(0.1),
        p: args.p.or_else(|| ctx.get_usize("p")).unwrap_or(20),
        points: args.points.clone().unwrap_or_else(|| vec![100, 1000]),
        replications: args.reps.or_else(|| ctx.get_usize("reps")).unwrap_or(1000),
        schemes,
        seed: ctx.seed,
    };
    ctx.seal("integrate", &config);
    let rows = bench::mc_integrate(&config)?;
    ctx.write_rows("scheme,n_points,mse,mse_se,mean_time_s", &rows)?;
    Ok(0)
}

fn cmd_clt(ctx: &mut Ctx, args: &CltArgs) -> Result<i32> {
    let f = match args
        .function
        .clone()
        .or_else(|| ctx.get_string("fn"))
        .unwrap_or_else(|| "prod2".into())
        .as_str()
    {
        "prod2" => CltIntegrand::Product2,
        "additive" => CltIntegrand::Additive2,
        other => return Err(usage(&format!("unknown clt function `{other}`"))),
    };
    let base = match args
        .base
        .clone()
        .or_else(|| ctx.get_string("base"))
        .unwrap_or_else(|| "iid".into())
        .as_str()
    {
        "iid" => bench::CltBase::Iid,
        "aj2" => bench::CltBase::Aj2,
        other => return Err(usage(&format!("unknown clt base `{other}`"))),
    };
    let d_list = args.d_list.clone().unwrap_or_else(|| vec![64, 256, 1024]);
    let reps = args.reps.or_else(|| ctx.get_usize("reps")).unwrap_or(2000);
    ctx.seal(
        "clt",
        &serde_json::json!({
            "fn": format!("{f:?}"),
            "base": base.label(),
            "d_list": d_list,
            "reps": reps,
        }),
    );
    let rows = bench::clt_check(f, &d_list, reps, base, ctx.seed)?;
    ctx.write_rows("d,base,variance,variance_se,analytic", &rows)?;
    Ok(0)
}

fn cmd_mcmc(ctx: &mut Ctx, args: &McmcArgs) -> Result<i32> {
    if let Some(path) = &args.emit_data {
        std::fs::write(path, bench::synthetic_probit_csv(ctx.seed))?;
        println!("wrote synthetic probit data to {}", path.display());
        return Ok(0);
    }
    let config = McmcConfig {
        data_path: args.data.clone(),
        d: args.d.or_else(|| ctx.get_usize("d")).unwrap_or(2),
        iterations: args.iters.or_else(|| ctx.get_usize("iters")).unwrap_or(5000),
        burn_in: args.burnin.or_else(|| ctx.get_usize("burnin")).unwrap_or(500),
        replications: args.reps.or_else(|| ctx.get_usize("reps")).unwrap_or(100),
        antithetic_acceptance: args.antithetic_acceptance,
        seed: ctx.seed,
    };
    ctx.seal(
        "mcmc",
        &serde_json::json!({"model": args.model, "config": config}),
    );
    let result = match args.model.as_str() {
        "probit" => bench::probit_gibbs(&config)?,
        "pumps" => bench::pumps_mwg(&config)?,
        other => return Err(usage(&format!("unknown mcmc model `{other}`"))),
    };
    #[derive(Serialize)]
    struct Row {
        parameter: String,
        ratio_mean: f64,
        ratio_min: f64,
        ratio_max: f64,
        coupled_mean: f64,
        coupled_se: f64,
        iid_mean: f64,
        iid_se: f64,
    }
    let rows: Vec<Row> = (0..result.parameters.len())
        .map(|j| Row {
            parameter: result.parameters[j].clone(),
            ratio_mean: result.ratio_mean[j],
            ratio_min: result.ratio_min[j],
            ratio_max: result.ratio_max[j],
            coupled_mean: result.coupled_mean[j],
            coupled_se: result.coupled_se[j],
            iid_mean: result.iid_mean[j],
            iid_se: result.iid_se[j],
        })
        .collect();
    ctx.write_rows(
        "parameter,ratio_mean,ratio_min,ratio_max,coupled_mean,coupled_se,iid_mean,iid_se",
        &rows,
    )?;
    Ok(0)
}

fn cmd_timing(ctx: &mut Ctx, args: &TimingArgs) -> Result<i32> {
    let names = args
        .constructions
        .clone()
        .unwrap_or_else(|| vec!["rbs".into(), "ccv-exch".into(), "aj2".into()]);
    let d_list = args.d_list.clone().unwrap_or_else(|| vec![5, 10, 20]);
    let n = args.n.or_else(|| ctx.get_usize("n")).unwrap_or(5000);
    let reps = args.reps.or_else(|| ctx.get_usize("reps")).unwrap_or(10);
    ctx.seal(
        "timing",
        &serde_json::json!({"constructions": names, "d_list": d_list, "n": n, "reps": reps}),
    );
    let rows = bench::sampling_time_study(&names, &d_list, n, reps, ctx.seed)?;
    ctx.write_rows("construction,d,mean_time_s", &rows)?;
    Ok(0)
}
