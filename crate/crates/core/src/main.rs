use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spectrum_auction::auction::ClearingVariant;
use spectrum_auction::device::generate_population;
use spectrum_auction::harness::{
    compare_payment_rules, emit_csv, rows_from_records, run_records, summarize, write_records,
    CompressionSetting, MetricsRow, RuleName, RunMetadata, ScenarioConfig,
};
use spectrum_auction::{verify, Error, Result};

#[derive(Parser)]
#[command(
    name = "spectrum-auction",
    version,
    about = "Compression-aware spectrum auction simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a device population as JSON.
    Generate(Common),
    /// Run one scenario and write its metrics CSV.
    Run(RunArgs),
    /// Channel-budget sweep with and without compression.
    Sweep(RunArgs),
    /// Compare clarke-pivot against another payment rule on identical auctions.
    Compare(RunArgs),
    /// Run the oracle-equivalence and incentive property suites.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario config (TOML). Defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed for the replications (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (CSV for run/sweep/compare, JSON for generate/verify).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Payment rule: clarke-pivot, paper-literal or clearing.
    #[arg(long, value_parser = parse_rule)]
    payment: Option<RuleName>,
    /// Clearing price: lowest-winning-bid or highest-losing-bid.
    #[arg(long = "clearing-variant", value_parser = parse_variant)]
    clearing_variant: Option<ClearingVariant>,
    /// Compression setting: on, off or both.
    #[arg(long, value_parser = parse_compression)]
    compression: Option<CompressionSetting>,
    /// Also write one JSON record per auction to this path.
    #[arg(long)]
    records: Option<PathBuf>,
}

fn parse_rule(s: &str) -> std::result::Result<RuleName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_variant(s: &str) -> std::result::Result<ClearingVariant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_compression(s: &str) -> std::result::Result<CompressionSetting, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_config(common: &Common) -> Result<ScenarioConfig> {
    let mut config = match &common.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.replications.base_seed = seed;
    }
    Ok(config)
}

enum Mode {
    Run,
    Sweep,
    Compare,
}

fn scenario(args: &RunArgs, mode: Mode) -> Result<()> {
    let mut config = load_config(&args.common)?;
    if let Some(v) = args.clearing_variant {
        config.clearing_variant = Some(v);
    }
    match mode {
        Mode::Run | Mode::Sweep => {
            if let Some(rule) = args.payment {
                config.payment_rules = vec![rule];
            }
            if matches!(mode, Mode::Sweep) {
                config.compression = CompressionSetting::Both;
            }
        }
        Mode::Compare => {
            let other = args.payment.unwrap_or(RuleName::Clearing);
            if other == RuleName::ClarkePivot {
                return Err(Error::Config(
                    "compare needs a rule other than clarke-pivot".into(),
                ));
            }
            config.payment_rules = vec![RuleName::ClarkePivot, other];
        }
    }
    if let Some(c) = args.compression {
        config.compression = c;
    }
    config.validate()?;

    let rows: Vec<MetricsRow> = match mode {
        Mode::Compare => compare_payment_rules(&config)?,
        _ => {
            let records = run_records(&config)?;
            if let Some(path) = &args.records {
                let file = std::fs::File::create(path)?;
                write_records(&records, std::io::BufWriter::new(file))?;
            }
            rows_from_records(&records)
        }
    };

    let out = args
        .common
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("results.csv"));
    emit_csv(&rows, &out)?;
    RunMetadata::new(&config)?.write(&metadata_path(&out))?;
    match print_summary(&rows, &mut std::io::stdout().lock()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        other => other?,
    }
    eprintln!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn metadata_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    csv.with_file_name(name)
}

fn print_summary(rows: &[MetricsRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "{:>6} {:>5} {:<28} {:>5} {:>10} {:>16} {:>16} {:>16}",
        "budget", "comp", "rule", "reps", "winners", "welfare", "device_util", "ssp_util"
    )?;
    for s in summarize(rows) {
        writeln!(
            out,
            "{:>6} {:>5} {:<28} {:>5} {:>10.3} {:>16.4} {:>16.4} {:>16.4}",
            s.budget,
            s.compression,
            s.payment_rule.as_str(),
            s.replications,
            s.mean_winner_count,
            s.mean_social_welfare,
            s.mean_device_utility,
            s.mean_ssp_utility
        )?;
    }
    Ok(())
}

fn generate(common: &Common) -> Result<()> {
    let config = load_config(common)?;
    let mut population = config.population.clone();
    population.seed = config.replications.base_seed;
    let devices = generate_population(&population)?;
    let json = serde_json::to_string_pretty(&devices)?;
    match &common.out {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{json}")?;
        }
    }
    Ok(())
}

fn run_verify(common: &Common) -> Result<bool> {
    let seed = common.seed.unwrap_or(0);
    let reports = verify::run_all(seed)?;
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {} ({} cases, {} failures)",
            r.name, r.cases, r.failures
        );
        if let Some(f) = &r.first_failure {
            println!("     first failure: {f}");
        }
    }
    if let Some(path) = &common.out {
        std::fs::write(path, serde_json::to_string_pretty(&reports)?)?;
    }
    Ok(reports.iter().all(verify::CheckReport::passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(c) => generate(c).map(|_| true),
        Command::Run(a) => scenario(a, Mode::Run).map(|_| true),
        Command::Sweep(a) => scenario(a, Mode::Sweep).map(|_| true),
        Command::Compare(a) => scenario(a, Mode::Compare).map(|_| true),
        Command::Verify(c) => run_verify(c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": { "kind": "verification-failed", "message": "one or more checks failed" } })
            );
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
            );
            ExitCode::FAILURE
        }
    }
}
