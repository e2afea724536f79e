//! Command-line surface: feasibility checks, the critical curve, region
//! rasters, thinning of point files, and the Monte Carlo suite.
//!
//! Exit codes are a stable contract: 0 success, 1 usage/parse/runtime
//! error, 2 infeasible intensity pair.

use clap::{Parser, Subcommand, ValueEnum};
use poisson_thin::pointfile::PointFile;
use poisson_thin::{poisson, region, thin, verify, IntensityPair, ThinError};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "poisson-thin",
    about = "Deterministic thinning of Poisson point processes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a thinning from lambda down to mu exists.
    Check {
        lambda: f64,
        mu: f64,
        /// Volume of the underlying space.
        #[arg(long, default_value_t = 1.0)]
        volume: f64,
    },
    /// Print the critical intensity lambda_c(mu).
    LambdaC {
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        volume: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Rasterize the feasibility region and its boundary curves.
    Region {
        #[arg(long, default_value_t = 7.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 6.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Write the region as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the region as SVG to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Thin a point file and write the surviving points.
    Thin {
        /// Input point file.
        input: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        mu: f64,
        /// Output point file.
        #[arg(long)]
        out: PathBuf,
        /// Which thinning to apply; `auto` picks from the file header.
        #[arg(long, value_enum, default_value_t = VariantArg::Auto)]
        variant: VariantArg,
    },
    /// Run the Monte Carlo certification suite.
    Verify {
        /// JSON TrialConfig; the shipped headline config when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Auto,
    Box,
    Tiled,
    Circle,
}

#[derive(Serialize)]
struct ThinSummary {
    n_in: usize,
    n_out: usize,
    k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    degenerate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    infeasible_cubes: Option<usize>,
}

fn run(cli: Cli) -> poisson_thin::Result<()> {
    match cli.command {
        Command::Check { lambda, mu, volume } => {
            let pair = IntensityPair::new(lambda, mu, volume)?;
            let witness = poisson::feasible_ii(&pair)?;
            println!("{}", serde_json::to_string(&witness)?);
            if !witness.feasible {
                return Err(ThinError::Infeasible {
                    blocking_k: witness.blocking_k.unwrap_or(0),
                });
            }
            Ok(())
        }
        Command::LambdaC { mu, volume, tol } => {
            let lc = poisson::lambda_c(mu, volume, tol)?;
            println!("{lc:.12}");
            Ok(())
        }
        Command::Region {
            lambda_max,
            mu_max,
            step,
            csv,
            svg,
        } => {
            let grid = region::region_raster(lambda_max, mu_max, step)?;
            if let Some(path) = &csv {
                std::fs::write(path, region::write_csv(&grid))?;
            }
            if let Some(path) = &svg {
                let curves = region::boundary_curves(lambda_max, mu_max, step)?;
                std::fs::write(path, region::write_svg(&grid, &curves))?;
            }
            if csv.is_none() && svg.is_none() {
                print!("{}", region::write_csv(&grid));
            }
            Ok(())
        }
        Command::Thin {
            input,
            lambda,
            mu,
            out,
            variant,
        } => {
            let file = PointFile::parse(&std::fs::read_to_string(&input)?)?;
            let n_in = file.len();
            let (result, summary) = match (file, variant) {
                (PointFile::Circle { points }, VariantArg::Auto | VariantArg::Circle) => {
                    let pair = IntensityPair::unit(lambda, mu)?;
                    let k = poisson::require_feasible(&pair)?;
                    let outcome = thin::thin_circle(&points, lambda, mu)?;
                    let summary = ThinSummary {
                        n_in,
                        n_out: outcome.kept.len(),
                        k,
                        degenerate: Some(outcome.degenerate),
                        infeasible_cubes: None,
                    };
                    (PointFile::Circle { points: outcome.kept }, summary)
                }
                (PointFile::Circle { .. }, _) => {
                    return Err(ThinError::Domain(
                        "circle files support only the circle variant".into(),
                    ))
                }
                (PointFile::Box { bx, points }, VariantArg::Auto | VariantArg::Box) => {
                    let pair = IntensityPair::new(lambda, mu, bx.volume())?;
                    let k = poisson::require_feasible(&pair)?;
                    let kept = thin::thin_box(&points, &bx, lambda, mu)?;
                    let summary = ThinSummary {
                        n_in,
                        n_out: kept.len(),
                        k,
                        degenerate: None,
                        infeasible_cubes: None,
                    };
                    (PointFile::Box { bx, points: kept }, summary)
                }
                (PointFile::Box { bx, points }, VariantArg::Tiled) => {
                    let outcome = thin::tile_thin(&points, &bx, lambda, mu)?;
                    let summary = ThinSummary {
                        n_in,
                        n_out: outcome.kept.len(),
                        k: 0,
                        degenerate: None,
                        infeasible_cubes: Some(outcome.infeasible_cubes.len()),
                    };
                    (
                        PointFile::Box {
                            bx,
                            points: outcome.kept,
                        },
                        summary,
                    )
                }
                (PointFile::Box { .. }, VariantArg::Circle) => {
                    return Err(ThinError::Domain(
                        "box files do not support the circle variant".into(),
                    ))
                }
            };
            std::fs::write(&out, result.write())?;
            println!("{}", serde_json::to_string(&summary)?);
            Ok(())
        }
        Command::Verify { config } => {
            let cfg = match config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(&path)?)?,
                None => verify::TrialConfig::headline(),
            };
            let report = verify::certify(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.overall_pass {
                return Err(ThinError::Internal(
                    "verification suite failed twice".into(),
                ));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // usage errors exit 1 (clap's default of 2 is reserved for infeasibility)
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ ThinError::Infeasible { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
