use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use ddgeo::bench::{bench_suite, load_suite, DEFAULT_ROUNDS};
use ddgeo::exec::ExecProposer;
use ddgeo::inputs::{load_problem, read, FigureSource};
use ddgeo::pool::Pool;
use ddgeo::shards::{ShardWriter, DEFAULT_SHARD_SIZE};
use ddgeo::{CliError, Inputs};
use ddgeo_core::builder::{build_problem_figure, DEFAULT_MAX_RETRIES};
use ddgeo_core::catalog::Category;
use ddgeo_core::engine::replay::check_record;
use ddgeo_core::engine::{Engine, EngineConfig, StdClock};
use ddgeo_core::filter::{FilterReport, Reason};
use ddgeo_core::generator::{generate_seed, SampleConfig};
use ddgeo_core::lang::{parse_record_stream, serialize_record};
use ddgeo_core::prover::{solve, EnumProposer, NoProposer, Proposer, SearchBudget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "ddgeo",
    version,
    about = "Synthetic geometry theorems and a symbolic prover"
)]
struct Cli {
    /// Construction catalog file; the bundled catalog when absent.
    #[arg(long, global = true)]
    defs: Option<PathBuf>,
    /// Rule file; the bundled rules when absent.
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
    /// Numeric equality tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for figure sampling, or the first seed for `generate`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 means one per core. Default: one per core for
    /// `generate` and directory solves, sequential for `bench-match`.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print per-rule counters for every round.
    #[arg(long, global = true)]
    stats: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a proof of a problem.
    Solve(SolveArgs),
    /// Sample figures and write a dataset.
    Generate(GenerateArgs),
    /// Replay a stream of records.
    Check { file: PathBuf },
    /// Compare partial and naive matching on a directory of figures.
    BenchMatch {
        dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ROUNDS)]
        rounds: u32,
        /// Also write the report as tab-separated rows to this file.
        #[arg(long)]
        structured: Option<PathBuf>,
    },
    /// Build a problem or script and print its coordinates.
    FigureDump { file: PathBuf },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    /// `none`, `enum` or `exec:COMMAND`.
    #[arg(long, default_value = "enum")]
    proposer: String,
    #[arg(long, default_value_t = 4)]
    beam: usize,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Proposals requested per state.
    #[arg(long, default_value_t = 8)]
    proposals: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Seconds allowed for one external proposer call.
    #[arg(long, default_value_t = 30.0)]
    proposer_timeout: f64,
    /// Use the enumerative proposer if the external one cannot run.
    #[arg(long)]
    fallback_enum: bool,
    /// Record file; `<problem>.record` when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SHARD_SIZE)]
    shard_size: usize,
    /// Print verdict counts per filter reason and write them per seed to
    /// `filter_report.tsv`.
    #[arg(long)]
    filter_report: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let ce = match e.downcast_ref::<CliError>() {
                Some(c) => c.clone(),
                None => CliError::new("internal", format!("{e:#}")),
            };
            eprintln!("{}", ce.line());
            ExitCode::from(if ce.kind == "replay_failed" { 1 } else { 2 })
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let inputs = Inputs::load(cli.defs.as_deref(), cli.rules.as_deref(), cli.tol)?;
    match &cli.cmd {
        Cmd::Solve(a) => cmd_solve(cli, &inputs, a),
        Cmd::Generate(a) => cmd_generate(cli, &inputs, a),
        Cmd::Check { file } => cmd_check(&inputs, file),
        Cmd::BenchMatch {
            dir,
            rounds,
            structured,
        } => cmd_bench(cli, &inputs, dir, *rounds, structured.as_deref()),
        Cmd::FigureDump { file } => cmd_dump(cli, &inputs, file),
    }
}

fn print_stats(engine: &Engine<'_>) {
    let mut out = std::io::stdout().lock();
    for r in engine.stats() {
        for (i, s) in r.rules.iter().enumerate() {
            let _ = writeln!(
                out,
                "stats\tround={}\trule={}\tcandidates={}\tpruned={}\temitted={}\tmicros={}",
                r.round,
                engine.rules().get(i).name(),
                s.candidates,
                s.pruned,
                s.emitted,
                s.micros
            );
        }
    }
}

fn make_proposer<'a>(
    inputs: &'a Inputs,
    a: &SolveArgs,
) -> Result<Box<dyn Proposer + 'a>, CliError> {
    Ok(match a.proposer.as_str() {
        "none" => Box::new(NoProposer),
        "enum" => Box::new(EnumProposer::new(&inputs.catalog, inputs.tol)),
        s => match s.strip_prefix("exec:") {
            Some(cmd) => {
                let mut p = ExecProposer::new(cmd, Duration::from_secs_f64(a.proposer_timeout));
                if a.fallback_enum {
                    p = p.with_fallback(Box::new(EnumProposer::new(&inputs.catalog, inputs.tol)));
                }
                Box::new(p)
            }
            None => return Err(CliError::new("config", format!("unknown proposer `{s}`"))),
        },
    })
}

fn search_budget(inputs: &Inputs, a: &SolveArgs) -> SearchBudget {
    let mut budget = SearchBudget {
        beam: a.beam,
        depth: a.depth,
        proposals: a.proposals,
        tol: inputs.tol,
        ..SearchBudget::default()
    };
    if let Some(t) = a.timeout {
        budget.max_millis = (t * 1e3) as u64;
    }
    budget
}

/// Solves one problem file, writes its record when solved and returns the
/// verdict line.
fn solve_file(
    seed: u64,
    inputs: &Inputs,
    a: &SolveArgs,
    problem: &Path,
    out: &Path,
) -> Result<String, CliError> {
    let prob = load_problem(problem)?;
    let mut proposer = make_proposer(inputs, a)?;
    let budget = search_budget(inputs, a);
    let t = Instant::now();
    let clock = StdClock::new();
    let res = solve(
        &prob,
        &inputs.catalog,
        &inputs.rules,
        proposer.as_mut(),
        &budget,
        seed,
        &clock,
    )
    .map_err(|e| CliError::new("build", e.to_string()))?;
    let millis = t.elapsed().as_millis();
    Ok(match &res.record {
        Some(rec) => {
            let text =
                serialize_record(rec).map_err(|e| CliError::new("internal", e.to_string()))?;
            std::fs::write(out, text)
                .map_err(|e| CliError::new("io", format!("{}: {e}", out.display())))?;
            format!(
                "solved\tmillis={millis}\taux={}\tdepth={}\tstates={}",
                rec.aux.len(),
                res.depth,
                res.states
            )
        }
        None => {
            let why = if res.timed_out { "\ttimeout" } else { "" };
            format!(
                "unsolved\tmillis={millis}\taux=0\tdepth={}\tstates={}{why}",
                res.depth, res.states
            )
        }
    })
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_solve(cli: &Cli, inputs: &Inputs, a: &SolveArgs) -> Result<()> {
    make_proposer(inputs, a)?;
    if a.problem.is_dir() {
        return solve_dir(cli, inputs, a);
    }
    if cli.stats {
        let problem = load_problem(&a.problem)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
        let fig = build_problem_figure(
            &problem,
            &inputs.catalog,
            &inputs.tol,
            &mut rng,
            DEFAULT_MAX_RETRIES,
        )
        .map_err(|e| CliError::new("build", e.to_string()))?;
        let cfg = EngineConfig {
            tol: inputs.tol,
            budget: search_budget(inputs, a).engine,
            ..EngineConfig::default()
        };
        let mut e = Engine::new(&fig, &inputs.rules, cfg)
            .map_err(|e| CliError::new("build", e.to_string()))?;
        e.saturate(&StdClock::new());
        print_stats(&e);
    }
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| with_suffix(&a.problem, ".record"));
    println!("{}", solve_file(cli.seed, inputs, a, &a.problem, &out)?);
    Ok(())
}

/// Solves every file of a directory on the worker pool; verdict lines come
/// out in file name order, each prefixed with the file name.
fn solve_dir(cli: &Cli, inputs: &Inputs, a: &SolveArgs) -> Result<()> {
    let rd = std::fs::read_dir(&a.problem)
        .map_err(|e| CliError::new("io", format!("{}: {e}", a.problem.display())))?;
    let mut files: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_none_or(|x| x != "record"))
        .collect();
    files.sort();
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::new("io", format!("{}: {e}", dir.display())))?;
    }
    let pool = Pool::new(cli.threads.unwrap_or(0));
    let lines = pool.map(files, |f| {
        let out = match &a.out {
            Some(dir) => dir.join(with_suffix(
                Path::new(f.file_name().unwrap_or_default()),
                ".record",
            )),
            None => with_suffix(&f, ".record"),
        };
        let name = f
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        match solve_file(cli.seed, inputs, a, &f, &out) {
            Ok(v) => format!("{name}\t{v}"),
            Err(e) => format!("{name}\t{}", e.line()),
        }
    });
    for l in lines {
        println!("{l}");
    }
    Ok(())
}

const BATCH: usize = 256;

fn cmd_generate(cli: &Cli, inputs: &Inputs, a: &GenerateArgs) -> Result<()> {
    let cfg = SampleConfig {
        tol: inputs.tol,
        ..SampleConfig::default()
    };
    cfg.validate()
        .map_err(|e| CliError::new("config", e.to_string()))?;
    let pool = Pool::new(cli.threads.unwrap_or(0));
    let mut w = ShardWriter::create(&a.out, a.shard_size)
        .map_err(|e| CliError::new("io", e.to_string()))?;
    let mut report = FilterReport::default();
    let (mut built, mut rejected, mut with_aux) = (0u64, 0usize, 0usize);
    let (mut others, mut steps) = (0usize, 0usize);
    let seeds: Vec<u64> = (cli.seed..cli.seed.saturating_add(a.n)).collect();
    let mut per_seed = match a.filter_report {
        true => {
            let path = a.out.join("filter_report.tsv");
            let f = std::fs::File::create(&path)
                .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
            let mut f = std::io::BufWriter::new(f);
            let head: Vec<&str> = Reason::ALL.iter().map(|r| r.code()).collect();
            writeln!(f, "seed\t{}", head.join("\t"))
                .map_err(|e| CliError::new("io", e.to_string()))?;
            Some(f)
        }
        false => None,
    };
    for batch in seeds.chunks(BATCH) {
        let outs = pool.map(batch.to_vec(), |s| {
            generate_seed(&cfg, &inputs.catalog, &inputs.rules, s, &StdClock::new())
        });
        for o in outs {
            report.merge(&o.report);
            if let Some(f) = per_seed.as_mut() {
                let counts: Vec<String> = Reason::ALL
                    .iter()
                    .map(|r| o.report.get(*r).to_string())
                    .collect();
                writeln!(f, "{}\t{}", o.seed, counts.join("\t"))
                    .map_err(|e| CliError::new("io", e.to_string()))?;
            }
            rejected += o.rejected;
            if o.figure.is_some() {
                built += 1;
                steps += o.steps.len();
                others += o.steps.iter().filter(|c| **c == Category::Others).count();
            }
            if let Some(e) = &o.error {
                log::info!("seed {}: {e}", o.seed);
            }
            for r in &o.records {
                with_aux += usize::from(!r.aux.is_empty());
                w.write(r).map_err(|e| CliError::new("io", e.to_string()))?;
            }
        }
    }
    if let Some(mut f) = per_seed {
        f.flush().map_err(|e| CliError::new("io", e.to_string()))?;
    }
    let (records, shards) = w.finish().map_err(|e| CliError::new("io", e.to_string()))?;
    if a.filter_report {
        for line in report.to_string().lines() {
            println!("filter\t{}", line.replace(' ', "\t"));
        }
    }
    println!(
        "generated\tseeds={}\tbuilt={built}\trecords={records}\taux_records={with_aux}\trejected={rejected}\tothers={others}/{steps}\tshards={shards}",
        a.n
    );
    Ok(())
}

fn cmd_check(inputs: &Inputs, file: &Path) -> Result<()> {
    let text = read(file)?;
    let recs =
        parse_record_stream(&text).map_err(|e| CliError::parse(&file.display().to_string(), &e))?;
    if recs.is_empty() {
        return Err(CliError::new("parse", format!("{}: no records", file.display())).into());
    }
    for (i, r) in recs.iter().enumerate() {
        if let Err(e) = check_record(r, &inputs.rules) {
            return Err(CliError::new("replay_failed", format!("record {i}: {e}")).into());
        }
    }
    println!("ok\trecords={}", recs.len());
    Ok(())
}

fn cmd_bench(
    cli: &Cli,
    inputs: &Inputs,
    dir: &Path,
    rounds: u32,
    structured: Option<&Path>,
) -> Result<()> {
    let figs = load_suite(dir, inputs, cli.seed)?;
    let pool = cli.threads.filter(|&n| n != 1).map(Pool::new);
    let rep = bench_suite(&figs, inputs, rounds, pool.as_ref());
    print!("{}", rep.table());
    if let Some(p) = structured {
        std::fs::write(p, rep.structured())
            .map_err(|e| CliError::new("io", format!("{}: {e}", p.display())))?;
    }
    let bad = rep.mismatches();
    if !bad.is_empty() {
        return Err(CliError::new("closure_mismatch", bad.join(",")).into());
    }
    Ok(())
}

fn cmd_dump(cli: &Cli, inputs: &Inputs, file: &Path) -> Result<()> {
    let src = FigureSource::load(file, &inputs.catalog)?;
    let fig = src.build(inputs, cli.seed)?;
    print!("{}", fig.dump());
    Ok(())
}
