use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use divforge::{run_script, CORPUS};
use divforge_core::script::Report;
use divforge_core::sing::Classification;
use divforge_core::ExceptionalConfig;

#[derive(Parser)]
#[command(
    name = "divforge",
    version,
    about = "Exact divisor calculus on rational and ruled surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a surface script and emit its report.
    Run {
        script: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every bundled construction replay.
    Corpus {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Classify a singularity from a standalone dual-graph file
    /// (lines `name self_int p_a`, edges `name name mult`).
    Fundcycle { graph: PathBuf },
}

fn emit(report: &Report, format: Format, out: Option<&PathBuf>) -> Result<()> {
    let rendered = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match out {
        Some(path) => std::fs::write(path, rendered.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            script,
            format,
            out,
        } => {
            let text = std::fs::read_to_string(&script)
                .with_context(|| format!("reading {}", script.display()))?;
            let name = script
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| script.display().to_string());
            let report = match run_script(&name, &text) {
                Ok((report, _)) => report,
                Err(e) => {
                    eprintln!("{name}: {e}");
                    return Ok(false);
                }
            };
            emit(&report, format, out.as_ref())?;
            Ok(report.clean())
        }
        Command::Corpus { format } => {
            let mut all_clean = true;
            for (name, text) in CORPUS {
                let (report, _) = run_script(name, text).expect("bundled scripts parse");
                match format {
                    Format::Json => println!("{}", report.to_json()),
                    Format::Text => {
                        println!(
                            "{name}: pass={} fail={} errors={}",
                            report.summary.pass, report.summary.fail, report.summary.errors
                        );
                        if !report.clean() {
                            print!("{}", report.to_text());
                        }
                    }
                }
                all_clean &= report.clean();
            }
            Ok(all_clean)
        }
        Command::Fundcycle { graph } => {
            let text = std::fs::read_to_string(&graph)
                .with_context(|| format!("reading {}", graph.display()))?;
            let cfg = ExceptionalConfig::from_dual_graph(&text)?;
            println!("curves: {}", cfg.names.join(", "));
            println!("connected: {}", cfg.is_connected());
            let nd = cfg.is_negative_definite()?;
            println!("negative definite: {}", nd.is_definite);
            if let Some(w) = &nd.witness {
                let w: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                println!("witness (v with v.Gv >= 0): [{}]", w.join(", "));
                return Ok(false);
            }
            let (z0, steps) = cfg.fundamental_cycle()?;
            let coeffs: Vec<String> = z0.coeffs.iter().map(|(n, c)| format!("{c}*{n}")).collect();
            println!("fundamental cycle: {}", coeffs.join(" + "));
            println!("laufer steps: {steps}");
            println!("Z0^2 = {}", cfg.cycle_self_intersection(&z0)?);
            println!("p_a(Z0) = {}", cfg.pa_cycle(&z0)?);
            let verdict = match cfg.classify()? {
                Classification::RationalDoublePoint => "rational double point".to_string(),
                Classification::Rational { multiplicity } => {
                    format!("rational singularity of multiplicity {multiplicity}")
                }
                Classification::NonRational { pa_lower } => {
                    format!("non-rational singularity, p_g >= {pa_lower}")
                }
                Classification::Unknown => "unknown (mixed genera, sweep inconclusive)".into(),
            };
            println!("classification: {verdict}");
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
