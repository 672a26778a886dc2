use clap::{Parser, Subcommand};
use korteweg::cli::{cmd_classify, cmd_mms, cmd_simulate, cmd_sweep, MmsOptions};
use korteweg::config::parse_family;
use std::path::PathBuf;

/// Spherically symmetric compressible Navier-Stokes-Korteweg workbench in
/// Lagrangian mass coordinates.
#[derive(Parser)]
#[command(name = "korteweg", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation from a config file (exit 0 completed, 3 positivity
    /// fault, 4 dt underflow, 5 non-finite, 2 config error).
    Simulate {
        /// Path to the plain-text config.
        config: PathBuf,
    },
    /// Classify an (alpha, beta, gamma) triple against one family's
    /// admissible parameter cases (exit 0 matched, 1 no match, 2 bad args).
    Classify {
        #[arg(allow_negative_numbers = true)]
        alpha: f64,
        #[arg(allow_negative_numbers = true)]
        beta: f64,
        #[arg(allow_negative_numbers = true)]
        gamma: f64,
        /// kazhikhov (t1.1) or density-dependent (t1.2)
        #[arg(long, default_value = "kazhikhov")]
        family: String,
    },
    /// Region raster and/or batch simulations over parameter ranges.
    Sweep {
        /// Path to a config with a [sweep] section.
        config: PathBuf,
    },
    /// Manufactured-solution convergence ladders (exit 0 all orders in band,
    /// 1 out of band or insufficient levels, 5 stability fault).
    Mms {
        /// Verify the trivial equilibrium case instead of the smooth bump.
        #[arg(long)]
        equilibrium: bool,
        /// Spatial-order resolutions, comma separated (>= 3 values, each >= 32).
        #[arg(long, value_delimiter = ',', default_values_t = vec![96usize, 144, 216, 324])]
        levels: Vec<usize>,
        /// Space-time ladder resolutions (dt scales with dx^2 from --dt0).
        #[arg(long, value_delimiter = ',', default_values_t = vec![64usize, 96, 144])]
        ladder: Vec<usize>,
        /// Step size at the coarsest ladder level.
        #[arg(long, default_value_t = 2.0e-4)]
        dt0: f64,
        /// Horizon of the forced runs.
        #[arg(long, default_value_t = 0.02)]
        t_end: f64,
        /// Spatial dimensions to test, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2u32, 3])]
        dims: Vec<u32>,
        /// Families to test, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec!["kazhikhov".to_string(), "density-dependent".to_string()])]
        families: Vec<String>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Simulate { config } => cmd_simulate(&config),
        Cmd::Classify {
            alpha,
            beta,
            gamma,
            family,
        } => cmd_classify(alpha, beta, gamma, &family),
        Cmd::Sweep { config } => cmd_sweep(&config),
        Cmd::Mms {
            equilibrium,
            levels,
            ladder,
            dt0,
            t_end,
            dims,
            families,
            out,
        } => {
            let mut kinds = Vec::new();
            for f in &families {
                match parse_family(f) {
                    Ok(k) => kinds.push(k),
                    Err(e) => {
                        eprintln!("error: {e}");
                        std::process::exit(2);
                    }
                }
            }
            cmd_mms(&MmsOptions {
                equilibrium,
                levels,
                ladder,
                dt0,
                t_end,
                dims,
                families: kinds,
                out,
            })
        }
    };
    std::process::exit(code);
}
