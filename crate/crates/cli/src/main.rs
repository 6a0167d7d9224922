use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ia_core::bench::{calibrate_frequencies, render_summary, run_suite, summarize, CsvSink, SuiteSpec};
use ia_core::generate::{gen_b, gen_s, GeneratorConfig, Model, Probability};
use ia_core::network::Network;
use ia_core::pathcon::{path_consistency, PcConfig, PcStats, PcVerdict, QueuePolicy, SkipSet};
use ia_core::search::{
    backtrack_solve, extract_scenario, search_space_size, verify_assignment, FrequencyTable,
    IntervalAssignment, SearchConfig, SearchOutcome, ValueOrder, VarOrder,
};
use ia_core::tractable::{Catalog, Method};
use ia_core::{Composition, Label};

const EXIT_OK: u8 = 0;
const EXIT_INCONSISTENT: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_USAGE: u8 = 3;

/// Reasoning with Allen's interval algebra.
#[derive(Parser)]
#[command(name = "ia", version)]
struct Cli {
    /// Suppress the human-readable report.
    #[arg(short, long, global = true)]
    quiet: bool,
    /// With --quiet, write the command's main artifact to stdout.
    #[arg(long, global = true, requires = "quiet")]
    print: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enforce path consistency on a network.
    Pc(PcArgs),
    /// Decide consistency by backtracking search and report a solution.
    Solve(SolveArgs),
    /// Show tractable-class membership and decompositions of a label.
    Classify(ClassifyArgs),
    /// Generate a random network.
    Gen(GenArgs),
    /// Run a benchmark suite and write per-run CSV records.
    Bench(BenchArgs),
    /// Derive a value-ordering frequency table from solved instances.
    Calibrate(CalibrateArgs),
    /// Check an interval assignment against a network.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct PcFlags {
    /// Composition method: pairwise or split.
    #[arg(long = "comp", default_value = "split")]
    comp: Composition,
    /// Skipping shortcuts to enable: a comma list of a, b, c, or `none`.
    #[arg(long, default_value = "a,b,c")]
    skip: SkipSet,
    /// Queue policy: fifo, lifo, weight, card or constr.
    #[arg(long, default_value = "fifo")]
    queue: QueuePolicy,
}

impl PcFlags {
    fn config(&self) -> PcConfig {
        PcConfig::new(self.comp, self.skip, self.queue)
    }
}

#[derive(Args)]
struct PcArgs {
    /// Network file (edge list or matrix).
    network: PathBuf,
    #[command(flatten)]
    pc: PcFlags,
    /// Write the closed network to FILE.
    #[arg(short = 'o', long = "out", value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Network file (edge list or matrix).
    network: PathBuf,
    /// Tractable class used to split labels: si, sa or nb.
    #[arg(long, default_value = "sa")]
    decomp: Method,
    /// Variable ordering keys, e.g. `constr,weight,card`, or `none`.
    #[arg(long = "var-order", default_value = "weight,constr,card")]
    var_order: VarOrder,
    /// Value ordering: freq or none.
    #[arg(long = "val-order", default_value = "freq")]
    val_order: ValueOrder,
    /// Frequency table with one `relation score` line per relation.
    #[arg(long = "freq-table", value_name = "FILE")]
    freq_table: Option<PathBuf>,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 1800.0)]
    timeout: f64,
    /// Stop after this many search nodes.
    #[arg(long = "node-limit")]
    node_limit: Option<u64>,
    /// Write the consistent scenario (one basic relation per edge) to FILE.
    #[arg(long = "emit-scenario", value_name = "FILE")]
    emit_scenario: Option<PathBuf>,
    /// Write an interval realization (`index start end`) to FILE.
    #[arg(long = "emit-intervals", value_name = "FILE")]
    emit_intervals: Option<PathBuf>,
    #[command(flatten)]
    pc: PcFlags,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Comma separated relations, e.g. `b,m,o`, or `I`.
    label: Option<String>,
    /// Write the membership and decomposition of every label to FILE.
    #[arg(long, value_name = "FILE")]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    model: GenModel,
}

#[derive(Args)]
struct Common {
    /// Number of intervals.
    #[arg(long)]
    n: usize,
    /// Random seed.
    #[arg(long, env = "IA_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file.
    #[arg(short = 'o', long = "out", value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenModel {
    /// Sparse intersects/disjoint networks.
    B {
        #[command(flatten)]
        common: Common,
        /// Fraction of pairs labelled intersects.
        #[arg(long, default_value_t = 0.06)]
        intersects: f64,
        /// Fraction of pairs labelled disjoint.
        #[arg(long, default_value_t = 0.17)]
        disjoint: f64,
    },
    /// Density-controlled networks with an embedded solution.
    S {
        #[command(flatten)]
        common: Common,
        /// Edge probability as NUM/DEN.
        #[arg(long)]
        p: Probability,
        /// Do not union the witness relations into the labels.
        #[arg(long = "no-embed")]
        no_embed: bool,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// Suite description.
    #[arg(long)]
    suite: PathBuf,
    /// CSV output file.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Number of intervals per instance.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Edge probability as NUM/DEN.
    #[arg(long, default_value = "1/4")]
    p: Probability,
    /// Seed of the first instance; instance k uses seed + k.
    #[arg(long, env = "IA_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of instances to solve.
    #[arg(long, default_value_t = 5)]
    count: usize,
    /// Tractable class used by the solver.
    #[arg(long, default_value = "sa")]
    decomp: Method,
    /// Per-instance limit in seconds.
    #[arg(long, default_value_t = 1800.0)]
    timeout: f64,
    /// Write the table to FILE.
    #[arg(short = 'o', long = "out", value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Network file.
    network: PathBuf,
    /// Assignment file with `index start end` lines.
    assignment: PathBuf,
}

struct Report {
    quiet: bool,
    print: bool,
}

impl Report {
    fn line(&self, s: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", s.as_ref());
        }
    }

    fn artifact(&self, text: &str) -> Result<()> {
        if self.print {
            io::stdout().write_all(text.as_bytes())?;
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let report = Report { quiet: cli.quiet, print: cli.print };
    match run(cli.command, &report) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(command: Command, report: &Report) -> Result<u8> {
    match command {
        Command::Pc(args) => pc(args, report),
        Command::Solve(args) => solve(args, report),
        Command::Classify(args) => classify(args, report),
        Command::Gen(args) => gen(args, report),
        Command::Bench(args) => bench(args, report),
        Command::Calibrate(args) => calibrate(args, report),
        Command::Verify(args) => verify(args, report),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_network(path: &Path) -> Result<Network> {
    let net = Network::load(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(v) = net.validate().first() {
        bail!("{}: {v}", path.display());
    }
    Ok(net)
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).ok().filter(|d| !d.is_zero()).context("timeout must be a positive number of seconds")
}

fn stats_lines(s: &PcStats) -> Vec<String> {
    vec![
        format!("  compositions  {}", s.compositions),
        format!("  skipped a/b/c {}/{}/{}", s.skipped_a, s.skipped_b, s.skipped_c),
        format!("  enqueues      {} (peak queue {})", s.enqueues, s.queue_peak),
        format!("  updates       {}", s.updates),
    ]
}

fn pc(args: PcArgs, report: &Report) -> Result<u8> {
    let mut net = load_network(&args.network)?;
    let cfg = args.pc.config();
    let out = path_consistency(&mut net, &cfg);
    match out.verdict {
        PcVerdict::Consistent => report.line("verdict: path consistent"),
        PcVerdict::Inconsistent { edge } => report.line(format!(
            "verdict: inconsistent (empty label on ({}, {}))",
            net.display_name(edge.i),
            net.display_name(edge.j)
        )),
    }
    report.line(format!("config: {}", cfg.fingerprint()));
    for l in stats_lines(&out.stats) {
        report.line(l);
    }
    if out.verdict.is_consistent() {
        report.line("closed network:");
        for e in net.edges() {
            let l = net.get(e.i, e.j);
            if !l.is_full() {
                report.line(format!("  ({}, {}) = {l:?}", net.display_name(e.i), net.display_name(e.j)));
            }
        }
        let text = net.to_edge_list();
        if let Some(path) = &args.out {
            write(path, &text)?;
        }
        report.artifact(&text)?;
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_INCONSISTENT)
    }
}

fn solve(args: SolveArgs, report: &Report) -> Result<u8> {
    let net = load_network(&args.network)?;
    let frequencies = match &args.freq_table {
        Some(p) => FrequencyTable::parse(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => FrequencyTable::default(),
    };
    let cfg = SearchConfig {
        method: args.decomp,
        var_order: args.var_order,
        value_order: args.val_order,
        frequencies,
        timeout: seconds(args.timeout)?,
        node_limit: args.node_limit,
        pc: args.pc.config(),
    };
    report.line(format!("config: {} ({})", cfg.fingerprint(), cfg.pc.fingerprint()));
    report.line(format!("search space: {}", search_space_size(&net, cfg.method)));
    let res = backtrack_solve(&net, &cfg);
    let code = match &res.outcome {
        SearchOutcome::Solved(sub) => {
            let (scenario, intervals) = extract_scenario(sub).context("realizing the solution")?;
            report.line("verdict: consistent");
            if let Some(p) = &args.emit_scenario {
                write(p, &scenario.network().to_edge_list())?;
            }
            let text = intervals.to_text();
            if let Some(p) = &args.emit_intervals {
                write(p, &text)?;
            }
            report.artifact(&text)?;
            EXIT_OK
        }
        SearchOutcome::Inconsistent { in_preprocessing } => {
            report.line(if *in_preprocessing {
                "verdict: inconsistent (path consistency)"
            } else {
                "verdict: inconsistent"
            });
            EXIT_INCONSISTENT
        }
        SearchOutcome::Timeout => {
            report.line("verdict: timeout");
            EXIT_TIMEOUT
        }
        SearchOutcome::NodeLimit => {
            report.line("verdict: node limit reached");
            EXIT_TIMEOUT
        }
    };
    let s = &res.stats;
    report.line(format!("nodes {} backtracks {} trail peak {}", s.nodes, s.backtracks, s.trail_peak));
    for l in stats_lines(&s.pc_total()) {
        report.line(l);
    }
    report.line(format!("elapsed {:.3} ms", s.elapsed.as_secs_f64() * 1e3));
    Ok(code)
}

fn classify(args: ClassifyArgs, report: &Report) -> Result<u8> {
    let catalog = Catalog::global();
    if let Some(path) = &args.dump {
        write(path, &catalog.dump())?;
        report.line(format!("catalog written to {}", path.display()));
    }
    let Some(text) = args.label else {
        if args.dump.is_none() {
            bail!("nothing to do: give a label or --dump FILE");
        }
        return Ok(EXIT_OK);
    };
    let x: Label = text.parse().with_context(|| format!("label `{text}`"))?;
    let yes = |b: bool| if b { "yes" } else { "no" };
    report.line(format!("label {x:?} ({} relations)", x.cardinality()));
    report.line(format!("pointizable: {}", yes(catalog.is_member(x, Method::Sa))));
    report.line(format!("ord-horn:    {}", yes(catalog.is_member(x, Method::Nb))));
    let mut machine = String::new();
    for m in Method::ALL {
        let blocks: Vec<String> = catalog.blocks(x, m).iter().map(|b| format!("{b:?}")).collect();
        report.line(format!("{m}: {} block(s) {}", blocks.len(), blocks.join(" ")));
        machine.push_str(&format!("{m} {}\n", blocks.join(" ")));
    }
    report.artifact(&machine)?;
    Ok(EXIT_OK)
}

fn gen(args: GenArgs, report: &Report) -> Result<u8> {
    let (cfg, common) = match &args.model {
        GenModel::B { common, intersects, disjoint } => (
            GeneratorConfig {
                model: Model::B { intersects: *intersects, disjoint: *disjoint },
                n: common.n,
                seed: common.seed,
            },
            common,
        ),
        GenModel::S { common, p, no_embed } => (
            GeneratorConfig { model: Model::S { p: *p, embed: !no_embed }, n: common.n, seed: common.seed },
            common,
        ),
    };
    let g = match cfg.model {
        Model::B { intersects, disjoint } => gen_b(cfg.n, intersects, disjoint, cfg.seed)?,
        Model::S { p, embed } => gen_s(cfg.n, p, embed, cfg.seed)?,
    };
    if common.out.is_none() && !report.print {
        bail!("gen needs -o FILE (or --quiet --print)");
    }
    let text = g.network.to_edge_list();
    if let Some(p) = &common.out {
        write(p, &text)?;
    }
    let constrained = g.network.edges().filter(|e| !g.network.get(e.i, e.j).is_full()).count();
    report.line(format!(
        "model {} n {} seed {}: {constrained} of {} edges constrained",
        cfg.model.letter(),
        cfg.n,
        cfg.seed,
        g.network.edge_count()
    ));
    report.artifact(&text)?;
    Ok(EXIT_OK)
}

fn bench(args: BenchArgs, report: &Report) -> Result<u8> {
    let text = read(&args.suite)?;
    let spec = SuiteSpec::parse(&text).with_context(|| format!("parsing {}", args.suite.display()))?;
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let file = fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut sink = CsvSink::new(io::BufWriter::new(file))?;
    let records = run_suite(&spec, args.jobs, |r| sink.append(r))?;
    drop(sink);
    let summary = summarize(&records, spec.timeout)?;
    report.line(format!("{} runs written to {}", records.len(), args.out.display()));
    report.line(render_summary(&summary).trim_end());
    if report.print {
        report.artifact(&read(&args.out)?)?;
    }
    Ok(EXIT_OK)
}

fn calibrate(args: CalibrateArgs, report: &Report) -> Result<u8> {
    let model = GeneratorConfig::s(args.n, args.p, args.seed);
    let solver = SearchConfig {
        method: args.decomp,
        var_order: "constr,weight,card".parse().expect("valid order"),
        timeout: seconds(args.timeout)?,
        ..SearchConfig::default()
    };
    let cal = calibrate_frequencies(&model, &solver, args.count)?;
    for (seed, why) in &cal.excluded {
        eprintln!("warning: seed {seed} excluded: {why}");
    }
    let text = cal.table.to_text();
    if let Some(p) = &args.out {
        write(p, &text)?;
    }
    report.line(format!("{} of {} instances solved", cal.solved, args.count));
    report.line(text.trim_end());
    report.artifact(&text)?;
    Ok(EXIT_OK)
}

fn verify(args: VerifyArgs, report: &Report) -> Result<u8> {
    let net = load_network(&args.network)?;
    let text = read(&args.assignment)?;
    let a = IntervalAssignment::parse(&text).with_context(|| format!("parsing {}", args.assignment.display()))?;
    if a.len() != net.n() {
        bail!("assignment has {} intervals but the network has {}", a.len(), net.n());
    }
    if verify_assignment(&net, &a) {
        report.line("assignment satisfies every constraint");
        Ok(EXIT_OK)
    } else {
        for e in net.edges() {
            let r = a.relation(e.i, e.j);
            if !net.get(e.i, e.j).contains(r) {
                report.line(format!(
                    "violated: ({}, {}) is {r}, allowed {:?}",
                    net.display_name(e.i),
                    net.display_name(e.j),
                    net.get(e.i, e.j)
                ));
            }
        }
        Ok(EXIT_INCONSISTENT)
    }
}
