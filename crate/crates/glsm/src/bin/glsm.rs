use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use glsm::catalog::{catalog, catalog_entry};
use glsm::config::parse_config;
use glsm::report::{emit_report, ReportFormat};
use glsm::run::run_with_provenance;
use glsm::search::{search_example, SearchOutcome};
use glsm::verify::GoldenClass;

#[derive(Parser)]
#[command(name = "glsm", version, about = "Lightlike submanifold analysis for golden semi-Riemannian spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze the submanifold described by a config file
    Analyze(AnalyzeArgs),
    /// Built-in example catalog
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Search for an instance of a golden class
    Search(SearchArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Path to a TOML config file
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Override the sampling seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of sample points
    #[arg(long)]
    points: Option<usize>,
    /// Override the finite difference step
    #[arg(long)]
    fd_step: Option<f64>,
    /// Override the equation tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated theorem ids (default: the config's selection)
    #[arg(long, value_delimiter = ',')]
    theorems: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the catalog entries
    List,
    /// Print one entry's config as TOML
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    RadicalTransversal,
    Transversal,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    class: ClassArg,
    #[arg(long)]
    dim: usize,
    /// Metric signature as P,Q (plus and minus counts)
    #[arg(long, value_parser = parse_signature)]
    signature: (usize, usize),
    /// Radical rank
    #[arg(long)]
    rank: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
}

fn parse_signature(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected P,Q".to_string());
    }
    let p = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let q = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((p, q))
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Analyze(args) => analyze(args),
        Command::Catalog { command } => run_catalog(command),
        Command::Search(args) => search(args),
    }
}

fn fail_config(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn analyze(args: AnalyzeArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail_config(format!("{}: {e}", args.config.display())),
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail_config(e),
    };
    if let Some(seed) = args.seed {
        cfg.sampling.seed = seed;
    }
    if let Some(points) = args.points {
        cfg.sampling.points = points;
    }
    if let Some(h) = args.fd_step {
        cfg.numeric.fd_step = Some(h);
    }
    if let Some(t) = args.tol {
        cfg.numeric.tau_eq = Some(t);
    }
    if let Some(ids) = args.theorems {
        cfg.theorems = ids;
    }
    if let Err(e) = cfg.validate() {
        return fail_config(e);
    }
    let report = match run_with_provenance(&cfg, Vec::new()) {
        Ok(r) => r,
        Err(e) => return fail_config(e),
    };
    let doc = emit_report(
        &report,
        match args.format {
            Format::Json => ReportFormat::Json,
            Format::Md => ReportFormat::Markdown,
        },
    );
    if let Some(path) = args.out {
        if let Err(e) = std::fs::write(&path, &doc) {
            return fail_config(format!("{}: {e}", path.display()));
        }
    } else {
        print!("{doc}");
    }
    if report.any_fail() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_catalog(command: CatalogCommand) -> ExitCode {
    match command {
        CatalogCommand::List => {
            let entries = match catalog() {
                Ok(e) => e,
                Err(e) => return fail_config(e),
            };
            for e in entries {
                println!(
                    "{:28} {:18} golden: {:18} {}",
                    e.name,
                    format!("{:?}", e.expected_class),
                    format!("{:?}", e.expected_golden),
                    e.description
                );
            }
            ExitCode::SUCCESS
        }
        CatalogCommand::Show { name } => {
            let e = match catalog_entry(&name) {
                Ok(e) => e,
                Err(err) => return fail_config(err),
            };
            println!("# {} ({})", e.name, e.provenance);
            println!("# {}", e.description);
            match toml::to_string_pretty(&e.config) {
                Ok(t) => print!("{t}"),
                Err(err) => return fail_config(err),
            }
            ExitCode::SUCCESS
        }
    }
}

fn search(args: SearchArgs) -> ExitCode {
    let class = match args.class {
        ClassArg::RadicalTransversal => GoldenClass::RadicalTransversal,
        ClassArg::Transversal => GoldenClass::Transversal,
    };
    match search_example(class, args.dim, args.signature, args.rank, args.seed, args.budget) {
        Ok(SearchOutcome::Found(cfg)) => match toml::to_string_pretty(&cfg) {
            Ok(t) => {
                print!("{t}");
                ExitCode::SUCCESS
            }
            Err(e) => fail_config(e),
        },
        Ok(SearchOutcome::NotFound(nf)) => {
            eprintln!(
                "not found: {} (candidates tried: {}, best residual: {})",
                nf.note, nf.candidates_tried, nf.best_residual
            );
            ExitCode::from(1)
        }
        Err(e) => fail_config(e),
    }
}
