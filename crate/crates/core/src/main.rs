//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cantor_moran::analysis::{
    export_samples, gallery_config, parse_config, render_text, run_analysis, AnalysisConfig, ExportKind, GALLERY,
};

const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(version, about = "Spectrality analysis for infinite convolutions of digit sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Knobs {
    /// Product depth of the truncated transform.
    #[arg(long)]
    depth: Option<usize>,
    /// Number of stages in the candidate spectrum.
    #[arg(long)]
    spectrum_depth: Option<usize>,
    /// Number of sample points.
    #[arg(long)]
    samples: Option<usize>,
    /// Sample window half-width.
    #[arg(long)]
    window: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a configuration and print or write its report.
    Analyze {
        config: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Print a human-readable summary.
        #[arg(long)]
        text: bool,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Export a sample grid as CSV.
    Export {
        config: PathBuf,
        #[arg(long, value_parser = |s: &str| s.parse::<ExportKind>())]
        what: ExportKind,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Start of the transform grid (default `-window`).
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        /// End of the transform grid (default `window`).
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// List built-in fixtures, or analyze one.
    Gallery {
        name: Option<String>,
        /// Print the fixture's configuration instead of its report.
        #[arg(long)]
        config: bool,
        #[arg(long)]
        text: bool,
    },
}

enum Failure {
    Config(String),
    Io(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Config(m) => {
                eprintln!("invalid configuration: {m}");
                ExitCode::from(EXIT_INVALID_CONFIG)
            }
            Failure::Io(m) => {
                eprintln!("i/o error: {m}");
                ExitCode::from(EXIT_IO)
            }
        }
    }
}

fn load(path: &Path, knobs: &Knobs) -> Result<AnalysisConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut config = parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let n = &mut config.numeric;
    n.depth = knobs.depth.unwrap_or(n.depth);
    n.spectrum_depth = knobs.spectrum_depth.unwrap_or(n.spectrum_depth);
    n.samples = knobs.samples.unwrap_or(n.samples);
    n.window = knobs.window.unwrap_or(n.window);
    config.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(config)
}

fn write_out(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(config: &AnalysisConfig, json: Option<PathBuf>, text: bool) -> Result<(), Failure> {
    let report = run_analysis(config);
    if text {
        print!("{}", render_text(&report));
    }
    match json.or_else(|| config.output.json.clone()) {
        Some(path) => write_out(&path, &report.to_json()),
        None if !text => {
            print!("{}", report.to_json());
            Ok(())
        }
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            config,
            json,
            text,
            knobs,
        } => emit(&load(&config, &knobs)?, json, text),
        Command::Export {
            config,
            what,
            out,
            from,
            to,
            knobs,
        } => {
            let config = load(&config, &knobs)?;
            let w = config.numeric.window;
            let range = (from.is_some() || to.is_some()).then(|| (from.unwrap_or(-w), to.unwrap_or(w)));
            let mut buf = Vec::new();
            export_samples(&config, what, range, &mut buf).map_err(|e| Failure::Io(e.to_string()))?;
            let csv = String::from_utf8(buf).expect("csv is utf-8");
            match out.or_else(|| config.output.csv.clone()) {
                Some(path) => write_out(&path, &csv),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
        Command::Gallery { name, config, text } => match name {
            None => {
                for (n, about, _) in GALLERY {
                    println!("{n:28} {about}");
                }
                Ok(())
            }
            Some(name) => {
                let source =
                    gallery_config(&name).ok_or_else(|| Failure::Config(format!("no fixture named {name:?}")))?;
                if config {
                    print!("{source}");
                    return Ok(());
                }
                let parsed = parse_config(source).map_err(|e| Failure::Config(e.to_string()))?;
                emit(&parsed, None, text)
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
