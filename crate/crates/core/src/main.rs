use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use patternforge::bench::{run_bench, BenchConfig};
use patternforge::io::{export_prolog, read_graph, write_csv_row, write_graph, BenchRow, PrologStyle, CSV_HEADER};
use patternforge::pattern::parse_pattern;
use patternforge::{builtin_agile_lite, generate, GenConfig, GenReport, Matcher, Pattern, Strategy};

/// Typed property-graph pattern matcher and benchmark harness.
///
/// Set PATTERNFORGE_LOG to quiet, info or debug for diagnostics on stderr.
#[derive(Parser)]
#[command(name = "patternforge", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph with one planted match.
    Gen(GenArgs),
    /// Match a pattern and print the roots, one per line.
    Match(MatchArgs),
    /// Time strategies over a range of graph sizes and write metrics CSV.
    Bench(BenchArgs),
    /// Write a graph and the pattern as a runnable Prolog program.
    ExportProlog(ExportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    /// Target edge count; accepts forms such as 5000 or 1e6.
    #[arg(long, value_parser = parse_count)]
    edges: usize,
    /// Output graph; `.tsv` selects the columnar format, anything else facts.
    /// The report is written next to it with a `.report` suffix.
    #[arg(long)]
    out: PathBuf,
    /// key=value generator config; --seed and --edges override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    distractor_ratio: Option<f64>,
    #[arg(long)]
    star_density: Option<f64>,
}

#[derive(Args)]
struct MatchArgs {
    #[arg(long)]
    graph: PathBuf,
    /// `builtin:agile-lite` or a pattern file.
    #[arg(long, default_value = "builtin:agile-lite")]
    pattern: String,
    #[arg(long, default_value = "unified")]
    strategy: Strategy,
    /// Candidate-tuple budget for the bruteforce strategy.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated edge counts, e.g. 1e5,2e5,4e5.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "unified,subpattern")]
    strategies: Vec<Strategy>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Nominal clock rate used for the cycle metrics.
    #[arg(long, default_value_t = 2.0)]
    clock_ghz: f64,
    #[arg(long, default_value_t = 1)]
    cores: u32,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Timed runs per (size, strategy); the median is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value = "builtin:agile-lite")]
    pattern: String,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "unified")]
    style: PrologStyle,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "builtin:agile-lite")]
    pattern: String,
}

type CmdResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) => Ok(x as usize),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

fn load_pattern(arg: &str) -> Result<Pattern, Box<dyn std::error::Error>> {
    match arg.strip_prefix("builtin:") {
        Some("agile-lite") => Ok(builtin_agile_lite().clone()),
        Some(other) => Err(format!("unknown built-in pattern `{other}`").into()),
        None => {
            let text = fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
            Ok(parse_pattern(&text).map_err(|e| format!("{arg}: {e}"))?)
        }
    }
}

fn load_graph(path: &Path) -> Result<patternforge::GraphStore, Box<dyn std::error::Error>> {
    let (g, report) = read_graph(path).map_err(|e| format!("{}: {e}", path.display()))?;
    for f in &report.findings {
        log::warn!("{}: {f}", path.display());
    }
    log::info!("loaded {} vertices, {} edges", g.vertex_count(), g.edge_count());
    Ok(g)
}

fn report_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report");
    PathBuf::from(s)
}

fn write_report(path: &Path, cfg: &GenConfig, r: &GenReport) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "seed={}", cfg.seed)?;
    writeln!(w, "target_edges={}", cfg.target_edges)?;
    writeln!(w, "planted_root={}", r.planted_root)?;
    writeln!(w, "vertex_count={}", r.vertex_count)?;
    writeln!(w, "edge_count={}", r.edge_count)?;
    writeln!(w, "digest={:016x}", r.digest)?;
    for (var, value) in &r.planted_witness {
        writeln!(w, "witness.{var}={value}")?;
    }
    w.flush()
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            text.parse::<GenConfig>()
                .map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => GenConfig::default(),
    };
    cfg.seed = a.seed;
    cfg.target_edges = a.edges;
    if let Some(r) = a.distractor_ratio {
        cfg.distractor_ratio = r;
    }
    if let Some(d) = a.star_density {
        cfg.star_density = d;
    }
    let (g, report) = generate(&cfg)?;
    write_graph(&g, &a.out).map_err(|e| format!("{}: {e}", a.out.display()))?;
    let rp = report_path(&a.out);
    write_report(&rp, &cfg, &report).map_err(|e| format!("{}: {e}", rp.display()))?;
    log::info!(
        "wrote {} vertices, {} edges; planted root {}",
        report.vertex_count,
        report.edge_count,
        report.planted_root
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_match(a: MatchArgs) -> CmdResult {
    let p = load_pattern(&a.pattern)?;
    let g = load_graph(&a.graph)?;
    let mut m = Matcher::new();
    if let Some(b) = a.budget {
        m = m.with_bruteforce_budget(b);
    }
    let res = m.run(a.strategy, &g, &p)?;
    let mut out = io::stdout().lock();
    for r in &res.roots {
        writeln!(out, "{r}")?;
    }
    out.flush()?;
    let s = &res.stats;
    eprintln!(
        "strategy={} roots={} atom_matches={} rule_firings={} backtracks={} inferences={} elapsed_s={}",
        res.strategy,
        res.roots.len(),
        s.atom_matches,
        s.rule_firings,
        s.backtracks,
        s.inferences(),
        s.elapsed_seconds
    );
    Ok(if res.roots.is_empty() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    let p = load_pattern(&a.pattern)?;
    let cfg = BenchConfig {
        sizes: a.sizes,
        strategies: a.strategies,
        seed: a.seed,
        clock_hz: a.clock_ghz * 1e9,
        cores: a.cores,
        repeats: a.repeats,
        gen: GenConfig::default(),
    };
    let mut sink: Box<dyn Write> = match &a.csv {
        Some(path) => Box::new(BufWriter::new(
            fs::File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    match run_bench(&cfg, &Matcher::new(), &p, |_| {}) {
        Ok(rows) => {
            patternforge::io::write_metrics_csv(&rows, &mut sink)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(partial) => {
            write_partial(&mut sink, &partial.rows, &partial.error.to_string())?;
            Err(partial.error.into())
        }
    }
}

fn write_partial(w: &mut dyn Write, rows: &[BenchRow], why: &str) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        write_csv_row(w, r)?;
    }
    writeln!(w, "# incomplete: {why}")?;
    w.flush()
}

fn cmd_export(a: ExportArgs) -> CmdResult {
    let p = load_pattern(&a.pattern)?;
    let g = load_graph(&a.graph)?;
    let w = BufWriter::new(fs::File::create(&a.out).map_err(|e| format!("{}: {e}", a.out.display()))?);
    export_prolog(&g, &p, a.style, w)?;
    Ok(ExitCode::SUCCESS)
}

fn init_logging() {
    let level = match std::env::var("PATTERNFORGE_LOG").as_deref() {
        Ok("quiet") => "off".to_string(),
        Ok(other) if !other.is_empty() => other.to_string(),
        _ => "warn".to_string(),
    };
    env_logger::Builder::new()
        .parse_filters(&level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Match(a) => cmd_match(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::ExportProlog(a) => cmd_export(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
