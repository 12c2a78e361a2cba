//! Command-line surface: every solver is reachable as a subcommand with
//! machine-readable (JSON/CSV) output, plus the two PPM renderers.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 when a numerical
//! invariant is violated.

use crate::error::TanError;
use crate::render::{Palette, Rect, RenderConfig};
use crate::{attractor, cascade, cycles, render, renorm, transversal};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::f64::consts::PI;
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "tanfam",
    version,
    about = "Cycle cascade, renormalization and attractor numerics for the family it*tan(z)"
)]
struct Cli {
    /// Working precision in bits; this build computes with native doubles
    /// and accepts at most 53.
    #[arg(long, global = true, default_value_t = 53)]
    precision_bits: u32,
    /// Detection tolerance for cycle and period searches.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// Left end of the level-1 cascade search bracket, in [pi/2, pi).
    #[arg(long, global = true)]
    seed_bracket: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the doubling/merging parameter cascade down to a depth.
    Cascade {
        #[arg(long)]
        depth: u32,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Locate the cycle attracting the asymptotic value at one parameter.
    Cycle {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1024)]
        max_period: usize,
    },
    /// Renormalization interval data at one parameter and level.
    Renorm {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        level: u32,
    },
    /// Solve the level-n merging parameter and certify transversality.
    Transversal {
        #[arg(long)]
        n: u32,
    },
    /// Build and verify the binary Cantor interval system.
    Attractor {
        #[arg(long)]
        depth: u32,
        /// Parameter to build at; defaults to the cascade-limit estimate.
        #[arg(long)]
        t_star: Option<f64>,
        #[arg(long)]
        csv: bool,
    },
    /// Render the parameter plane colored by attracting period.
    Plane(PlaneArgs),
    /// Render the real-line orbit (bifurcation) diagram.
    Diagram(DiagramArgs),
}

#[derive(Args, Debug)]
struct PlaneArgs {
    /// Region as re_min,re_max,im_min,im_max.
    #[arg(long)]
    region: String,
    #[arg(long, default_value_t = 400)]
    width: usize,
    #[arg(long, default_value_t = 400)]
    height: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DiagramArgs {
    #[arg(long)]
    t_min: f64,
    #[arg(long)]
    t_max: f64,
    #[arg(long, default_value_t = 800)]
    width: usize,
    #[arg(long, default_value_t = 600)]
    height: usize,
    /// Overlay vertical markers at the computed cascade parameters.
    #[arg(long)]
    markers: bool,
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    Usage(String),
    Invariant(TanError),
}

impl From<TanError> for CliError {
    fn from(e: TanError) -> Self {
        CliError::Invariant(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invariant(TanError::InvalidParams(e.to_string()))
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Invariant(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    // validates the global precision request against the f64 build
    crate::tanmap::MapParams::with_options(1.0, cli.precision_bits, 1e-12, 40.0)?;
    if let Some(s) = cli.seed_bracket {
        if !(PI / 2.0..PI).contains(&s) {
            return Err(CliError::Usage(format!(
                "--seed-bracket {s} outside [pi/2, pi)"
            )));
        }
    }
    let seed = cli.seed_bracket.unwrap_or(PI / 2.0);

    match cli.command {
        Command::Cascade { depth, json, csv } => {
            let table = cascade::cascade_table_from(depth, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&table)?);
            } else if csv {
                println!("n,alpha,beta,residual_alpha,residual_beta");
                for (a, b) in table.alphas.iter().zip(&table.betas) {
                    println!(
                        "{},{:.15},{:.15},{:.3e},{:.3e}",
                        a.n, a.t, b.t, a.residual, b.residual
                    );
                }
            } else {
                for (a, b) in table.alphas.iter().zip(&table.betas) {
                    println!(
                        "n={}  alpha={:.12}  beta={:.12}",
                        a.n, a.t, b.t
                    );
                }
                println!("t_infinity ~ {:.12}", table.t_infinity_estimate);
            }
        }
        Command::Cycle { t, max_period } => {
            let cycle = cycles::find_attracting_cycle(t, max_period, 2000, cli.tol.min(1e-9))?;
            println!("{}", serde_json::to_string_pretty(&cycle)?);
        }
        Command::Renorm { t, level } => {
            let lv = renorm::level(t, level)?;
            let out = serde_json::json!({
                "level": lv,
                "renormalizable": renorm::is_renormalizable(t, level),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Transversal { n } => {
            let table = cascade::cascade_table_from(n, seed)?;
            let beta = table
                .betas
                .iter()
                .find(|e| e.n == n)
                .ok_or_else(|| TanError::InvalidParams(format!("cascade stalled before level {n}")))?;
            let report = transversal::certify(beta.t, n)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Attractor { depth, t_star, csv } => {
            let t_star = match t_star {
                Some(t) => t,
                None => cascade::cascade_table_from(5, seed)?.t_infinity_estimate,
            };
            let system = attractor::build_levels(t_star, depth)?;
            if csv {
                print!("{}", attractor::to_csv(&system));
            } else {
                let report = attractor::verify_system(&system);
                let out = serde_json::json!({ "system": system, "report": report });
                println!("{}", serde_json::to_string_pretty(&out)?);
            }
        }
        Command::Plane(args) => {
            let region = parse_region(&args.region)?;
            let mut cfg = RenderConfig::new(region, args.width, args.height)?;
            cfg.tol = cli.tol;
            let raster = render::render_parameter_plane(&cfg)?;
            render::write_ppm(&raster, &args.out)?;
        }
        Command::Diagram(args) => {
            if !(args.t_min > 0.0 && args.t_max <= PI + 1e-9 && args.t_min < args.t_max) {
                return Err(CliError::Usage(
                    "diagram interval must satisfy 0 < t_min < t_max <= pi".into(),
                ));
            }
            let region = Rect {
                re_min: args.t_min,
                re_max: args.t_max,
                im_min: -PI,
                im_max: PI,
            };
            let mut cfg = RenderConfig {
                region,
                width: args.width,
                height: args.height,
                transient: 3000,
                max_iter: 20000,
                max_period_t: 512,
                tol: cli.tol,
                palette: Palette::default(),
                markers: Vec::new(),
            };
            if args.markers {
                let table = cascade::cascade_table_from(4, seed)?;
                cfg.markers = table
                    .alphas
                    .iter()
                    .chain(&table.betas)
                    .map(|e| e.t)
                    .collect();
            }
            let raster = render::render_orbit_diagram(&cfg)?;
            render::write_ppm(&raster, &args.out)?;
        }
    }
    Ok(())
}

fn parse_region(s: &str) -> Result<Rect, CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad --region '{s}'; expected four numbers")))?;
    if parts.len() != 4 || parts[0] >= parts[1] || parts[2] >= parts[3] {
        return Err(CliError::Usage(format!(
            "bad --region '{s}'; expected re_min,re_max,im_min,im_max with min < max"
        )));
    }
    Ok(Rect {
        re_min: parts[0],
        re_max: parts[1],
        im_min: parts[2],
        im_max: parts[3],
    })
}
