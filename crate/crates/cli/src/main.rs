use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modelset_cli::{run, CliError, RunConfig, RunOptions, Verb};

#[derive(Parser)]
#[command(name = "modelset", version, about = "Cut-and-project model sets: generation and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the `output` field of the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "MODELSET_THREADS")]
    threads: Option<usize>,
    /// Replaces the seed of the config.
    #[arg(long)]
    seed_override: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the patch and report its density.
    Generate(Common),
    /// Scheme validation and point-set diagnostics.
    Analyze(Common),
    /// Autocorrelation coefficients.
    Autocorr(Common),
    /// ε-almost periods and their gaps.
    AlmostPeriods(Common),
    /// Bragg intensities and control frequencies.
    Diffract(Common),
    /// Torus points, singularity scans and continuity moduli.
    Torus(Common),
    /// Fibers of the torus parametrization.
    Fiber(Common),
    /// Recover the window from a patch.
    Reconstruct(Common),
    /// Meyer certificates for sampled pairs.
    MeyerCert(Common),
    /// Every listed operation; exits 3 unless all pass.
    Suite(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, common) = match cli.command {
        Command::Generate(c) => (Verb::Generate, c),
        Command::Analyze(c) => (Verb::Analyze, c),
        Command::Autocorr(c) => (Verb::Autocorr, c),
        Command::AlmostPeriods(c) => (Verb::AlmostPeriods, c),
        Command::Diffract(c) => (Verb::Diffract, c),
        Command::Torus(c) => (Verb::Torus, c),
        Command::Fiber(c) => (Verb::Fiber, c),
        Command::Reconstruct(c) => (Verb::Reconstruct, c),
        Command::MeyerCert(c) => (Verb::MeyerCert, c),
        Command::Suite(c) => (Verb::Suite, c),
    };
    match execute(verb, &common) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(verb: Verb, c: &Common) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&c.config).map_err(|e| CliError::io(&c.config, e))?;
    let cfg = RunConfig::parse(&text)?;
    let opts = RunOptions {
        out: c.out.clone(),
        threads: c.threads,
        seed_override: c.seed_override,
        config_dir: c.config.parent().map(PathBuf::from).unwrap_or_default(),
    };
    let report = run(verb, cfg, &opts)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for r in &report.results {
        let verdict = match r.passed {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "done",
        };
        match &r.error {
            Some(e) => println!("{}: {verdict} ({e})", r.op),
            None => println!("{}: {verdict}", r.op),
        }
        for w in &r.warnings {
            eprintln!("warning: {}: {w}", r.op);
        }
    }
    Ok(if verb == Verb::Suite && !report.all_passed() { 3 } else { 0 })
}
