//! Command-line driver: normalize, obfuscate, verify, metrics, bench.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use modhide::analysis::{self, DiffVerdict, Program, Toolchain};
use modhide::config::{self, RunConfig};
use modhide::moduli::ModulusChain;
use modhide::report::RunReport;
use modhide::{corpus, lexer, pipeline, rewrite, Error, Result};

#[derive(Parser)]
#[command(
    name = "modhide",
    version,
    about = "Hides integer constants in Java source behind chained modular reductions"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reflow source so every statement ends at a line break
    Normalize(NormalizeArgs),
    /// Replace integer constants with equivalent reduction-call expressions
    Obfuscate(ObfuscateArgs),
    /// Check a rewritten file against its original
    Verify(VerifyArgs),
    /// Statement counts and the reverse-engineering effort figure
    Metrics(MetricsArgs),
    /// Time original vs obfuscated runs of a workload
    Bench(BenchArgs),
}

/// Knobs shared by the transforming subcommands. Precedence: flag, then
/// config file, then default.
#[derive(Args)]
struct CoreOpts {
    /// Plain-text `key = value` config file
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed for all randomized choices
    #[arg(long)]
    seed: Option<u64>,
    /// Modulus-chain length (table size of the emitted runtime)
    #[arg(long, value_name = "M")]
    chain_length: Option<u32>,
    /// Chain construction: doubled | prime-sum
    #[arg(long, value_name = "MODE")]
    mode: Option<String>,
    /// Lift-coefficient style: unit | random
    #[arg(long, value_name = "STYLE")]
    style: Option<String>,
    /// Smallest reduction depth
    #[arg(long, value_name = "K")]
    depth_min: Option<u32>,
    /// Largest reduction depth
    #[arg(long, value_name = "K")]
    depth_max: Option<u32>,
    /// Explicit depth schedule like "10,6,12,5;8,12,6,7", one group per iteration
    #[arg(long, value_name = "SCHED")]
    depths: Option<String>,
    /// Class-name suffix added when normalization changes a file
    #[arg(long, value_name = "TEXT")]
    suffix_normalize: Option<String>,
    /// Class-name suffix added by each obfuscation iteration
    #[arg(long, value_name = "TEXT")]
    suffix_iterate: Option<String>,
    /// Rewrite every eligible literal per statement, not just the first
    #[arg(long)]
    all_constants: bool,
    /// Output directory
    #[arg(long, short = 'o', value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Maximum files processed in parallel
    #[arg(long, value_name = "N")]
    jobs: Option<u32>,
    /// JDK installation for exec checks and benchmarks (else $JAVA_HOME, else $PATH)
    #[arg(long, value_name = "DIR")]
    jdk_home: Option<PathBuf>,
}

impl CoreOpts {
    /// Builds the run configuration without validating; callers layer their
    /// own flags on top and then validate once.
    fn build(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            config::apply_file(&mut cfg, &config::parse_file(path)?)?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.chain_length {
            cfg.chain_len = v;
        }
        if let Some(v) = &self.mode {
            cfg.mode = config::parse_mode(v)?;
        }
        if let Some(v) = &self.style {
            cfg.style = config::parse_style(v)?;
        }
        if let Some(v) = self.depth_min {
            cfg.depth_min = v;
        }
        if let Some(v) = self.depth_max {
            cfg.depth_max = v;
        }
        if let Some(v) = &self.depths {
            cfg.depth_schedule = config::parse_schedule(v)?;
        }
        if let Some(v) = &self.suffix_normalize {
            cfg.suffix_normalize = v.clone();
        }
        if let Some(v) = &self.suffix_iterate {
            cfg.suffix_iterate = v.clone();
        }
        if self.all_constants {
            cfg.all_constants = true;
        }
        if let Some(v) = &self.out_dir {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = self.jobs {
            cfg.jobs = v;
        }
        if let Some(v) = &self.jdk_home {
            cfg.jdk_home = Some(v.clone());
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct NormalizeArgs {
    /// Java source files
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[command(flatten)]
    core: CoreOpts,
}

#[derive(Args)]
struct ObfuscateArgs {
    /// Java source files
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Number of hiding iterations
    #[arg(long, short = 'n', value_name = "N")]
    iterations: Option<u32>,
    #[command(flatten)]
    core: CoreOpts,
}

#[derive(Args)]
struct VerifyArgs {
    /// Rewritten file to check
    file: PathBuf,
    /// The original source it must be equivalent to
    #[arg(long, value_name = "FILE")]
    original: PathBuf,
    /// Also compile and run both versions, comparing exit code and output
    #[arg(long)]
    exec: bool,
    /// Seconds before a launched program is killed
    #[arg(long, default_value_t = 60, value_name = "SECS")]
    timeout_secs: u64,
    #[command(flatten)]
    core: CoreOpts,
}

#[derive(Args)]
struct MetricsArgs {
    /// Java source files (original or rewritten)
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Iteration count used for the effort figure
    #[arg(long, short = 'n', default_value_t = 1, value_name = "N")]
    iterations: u32,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Program to benchmark (default: the bundled random-access workload)
    file: Option<PathBuf>,
    /// Iterations applied to build the obfuscated version
    #[arg(long, short = 'n', value_name = "N")]
    iterations: Option<u32>,
    /// Timed repetitions per version; the median is reported
    #[arg(long, default_value_t = 5, value_name = "N")]
    reps: u32,
    /// Seconds before a launched program is killed
    #[arg(long, default_value_t = 120, value_name = "SECS")]
    timeout_secs: u64,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    core: CoreOpts,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here too and must exit 0
            let code = if e.use_stderr() { 1u8 } else { 0u8 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Cmd::Normalize(args) => cmd_normalize(args),
        Cmd::Obfuscate(args) => cmd_obfuscate(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Metrics(args) => cmd_metrics(args),
        Cmd::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code().clamp(0, 255) as u8)
        }
    }
}

/// Output file name: the declared class name wins (the compiler requires the
/// match), falling back to the input's file name.
fn output_name(text: &str, label: &str, input: &Path) -> String {
    lexer::lex(text, label)
        .ok()
        .as_deref()
        .and_then(rewrite::class_decl)
        .map(|decl| format!("{}.java", decl.name))
        .unwrap_or_else(|| {
            input
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "out.java".to_string())
        })
}

fn cmd_normalize(args: NormalizeArgs) -> Result<()> {
    let cfg = args.core.build()?;
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    for path in &args.files {
        let label = path.display().to_string();
        let src = std::fs::read_to_string(path)?;
        let (text, rename) = pipeline::normalize_source(&src, &label, &cfg)?;
        let out_path = cfg.out_dir.join(output_name(&text, &label, path));
        pipeline::write_atomic(&out_path, &text)?;
        match rename {
            Some((old, new)) => println!("{label}: class {old} -> {new}, wrote {}", out_path.display()),
            None => println!("{label}: already normalized, wrote {}", out_path.display()),
        }
    }
    Ok(())
}

fn cmd_obfuscate(args: ObfuscateArgs) -> Result<()> {
    let mut cfg = args.core.build()?;
    if let Some(n) = args.iterations {
        cfg.iterations = n;
    }
    cfg.validate()?;
    let chain = ModulusChain::build(cfg.chain_len, cfg.mode)?;
    std::fs::create_dir_all(&cfg.out_dir)?;

    let outcomes = pipeline::obfuscate_files(&args.files, &cfg, &chain)?;
    let mut files = Vec::with_capacity(outcomes.len());
    for (path, outcome) in args.files.iter().zip(outcomes) {
        let label = path.display().to_string();
        let out_path = cfg.out_dir.join(output_name(&outcome.final_text, &label, path));
        pipeline::write_atomic(&out_path, &outcome.final_text)?;
        let mut report = outcome.report;
        report.output = out_path.display().to_string();
        for warning in &report.warnings {
            eprintln!("warning: {warning}");
        }
        println!(
            "{label} -> {} (S={}, N={}, RE={})",
            out_path.display(),
            report.obfuscated_statements,
            report.iterations,
            report.re_effort
        );
        files.push(report);
    }
    pipeline::write_atomic(&cfg.out_dir.join("obfuscate.java"), &rewrite::emit_runtime(&chain))?;

    let run_report = RunReport {
        seed: cfg.seed,
        mode: cfg.mode.to_string(),
        style: cfg.style.to_string(),
        chain_length: cfg.chain_len,
        iterations: cfg.iterations,
        files,
    };
    let report_path = cfg.out_dir.join("report.json");
    pipeline::write_atomic(&report_path, &serde_json::to_string_pretty(&run_report)?)?;
    println!("report: {}", report_path.display());
    Ok(())
}

/// Wraps a source file as a runnable program; rewritten sources also get the
/// reduction runtime compiled alongside.
fn program_from_source(text: &str, label: &str, chain: Option<&ModulusChain>) -> Result<Program> {
    let tokens = lexer::lex(text, label)?;
    let decl = rewrite::class_decl(&tokens).ok_or_else(|| Error::Structural {
        path: label.to_string(),
        msg: "no class declaration found".to_string(),
    })?;
    let mut sources = vec![(format!("{}.java", decl.name), text.to_string())];
    if let Some(chain) = chain {
        sources.push(("obfuscate.java".to_string(), rewrite::emit_runtime(chain)));
    }
    Ok(Program::new(decl.name, sources))
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let cfg = args.core.build()?;
    cfg.validate()?;
    let chain = ModulusChain::build(cfg.chain_len, cfg.mode)?;
    let original_label = args.original.display().to_string();
    let rewritten_label = args.file.display().to_string();
    let original = std::fs::read_to_string(&args.original)?;
    let rewritten = std::fs::read_to_string(&args.file)?;

    let outcome = rewrite::verify_against(&original, &rewritten, &chain, &original_label, &rewritten_label)?;
    match &outcome.class_rename {
        Some((old, new)) => println!(
            "{rewritten_label}: {} hidden expressions verified, class {old} -> {new}",
            outcome.sites_checked
        ),
        None => println!("{rewritten_label}: {} hidden expressions verified", outcome.sites_checked),
    }

    if args.exec {
        let toolchain = Toolchain::discover(cfg.jdk_home.as_deref());
        let original_program = program_from_source(&original, &original_label, None)?;
        let rewritten_program = program_from_source(&rewritten, &rewritten_label, Some(&chain))?;
        let verdicts = analysis::diff_exec(
            toolchain.as_ref(),
            &original_program,
            std::slice::from_ref(&rewritten_program),
            Duration::from_secs(args.timeout_secs),
        );
        let verdict = &verdicts[0];
        println!("exec check: {verdict}");
        if let DiffVerdict::Fail(detail) = verdict {
            return Err(Error::Differential {
                path: rewritten_label,
                detail: detail.clone(),
            });
        }
    }
    Ok(())
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let mut rows = Vec::with_capacity(args.files.len());
    for path in &args.files {
        let label = path.display().to_string();
        let src = std::fs::read_to_string(path)?;
        let (total, obfuscated) = analysis::count_statements(&src, &label)?;
        // a file with no reduction calls yet gets a projection instead
        let projected = obfuscated == 0;
        let s = if projected {
            analysis::eligible_statements(&src, &label)?
        } else {
            obfuscated
        };
        rows.push(serde_json::json!({
            "program": label,
            "total_statements": total,
            "obfuscated_statements": s,
            "projected": projected,
            "iterations": args.iterations,
            "re_effort": analysis::re_effort(s, args.iterations),
        }));
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        for row in &rows {
            println!(
                "{}: statements={} obfuscated={}{} N={} RE={}",
                row["program"].as_str().unwrap_or("?"),
                row["total_statements"],
                row["obfuscated_statements"],
                if row["projected"].as_bool().unwrap_or(false) { " (projected)" } else { "" },
                row["iterations"],
                row["re_effort"]
            );
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let mut cfg = args.core.build()?;
    cfg.iterations = args.iterations.unwrap_or(3);
    cfg.validate()?;
    let chain = ModulusChain::build(cfg.chain_len, cfg.mode)?;

    let (label, source) = match &args.file {
        Some(path) => (path.display().to_string(), std::fs::read_to_string(path)?),
        None => ("search_random.java".to_string(), corpus::SEARCH_RANDOM.to_string()),
    };
    let outcome = pipeline::obfuscate_source(&source, &label, &cfg, &chain)?;
    let original_program = program_from_source(&source, &label, None)?;
    let obfuscated_program = program_from_source(&outcome.final_text, &label, Some(&chain))?;

    let toolchain = Toolchain::discover(cfg.jdk_home.as_deref());
    let timing = analysis::bench(
        toolchain.as_ref(),
        &original_program,
        &obfuscated_program,
        args.reps,
        Duration::from_secs(args.timeout_secs),
    )?;
    match timing {
        None => println!("bench: SKIPPED (no Java toolchain found)"),
        Some(t) if args.json => println!("{}", serde_json::to_string_pretty(&t)?),
        Some(t) => {
            println!("workload: {label}");
            println!("original:   {:>8.1} ms (median of {} fresh-JVM runs)", t.original_ms, args.reps);
            println!("obfuscated: {:>8.1} ms (N={})", t.obfuscated_ms, cfg.iterations);
            println!("ratio:      {:>8.2}", t.ratio);
        }
    }
    Ok(())
}
