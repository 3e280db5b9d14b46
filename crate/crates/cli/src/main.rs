//! `holo2d`: forward simulation, intensity-only recovery, self-checks and
//! Hankel zeros from the command line.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "holo2d",
    version,
    about = "Phaseless recovery of 2D radiation fields from intensity on two rays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample |psi|^2 of a multipole scene on the rays L+ and L-.
    Forward(ForwardArgs),
    /// Recover far-field and Karp coefficients from a pair of intensity files.
    Recover(RecoverArgs),
    /// Run the invariant and oracle checks on a scene.
    Verify(VerifyArgs),
    /// Print zeros of H0 in the lower half plane.
    Zeros(ZerosArgs),
}

#[derive(Args)]
pub struct ForwardArgs {
    /// Scene file (JSON: kappa, k, modes).
    #[arg(long)]
    pub scene: PathBuf,
    /// Line direction as `x,y` or an angle in radians [default: k rotated by -90 degrees].
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Base point of the line as `x,y`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub base: String,
    /// Pairing offset between s and s + tau [default: chosen to maximise |D|].
    #[arg(long)]
    pub tau: Option<f64>,
    /// Radius ladder `start:ratio:count`, snapped to each ray's phase lattice
    /// [default: the recovery windows for orders 0..=order].
    #[arg(long)]
    pub radii: Option<String>,
    /// Highest far-field order the samples should support.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RecoverArgs {
    /// Directory holding plus.csv, plus.json, minus.csv and minus.json.
    #[arg(long, default_value = ".")]
    pub input: PathBuf,
    /// Highest far-field order to recover.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Reconstruction radii `start:ratio:count` [default: 10 points, kappa s in [10, 100]].
    #[arg(long)]
    pub radii: Option<String>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write SVG plots of the estimator ladders and the reconstruction.
    #[arg(long)]
    pub plots: bool,
    /// Allow orders above the precision cap.
    #[arg(long)]
    pub override_precision_cap: bool,
    /// Add SIZE to the recovered f_ORDER before the next order runs.
    #[arg(long, hide = true, value_name = "ORDER:SIZE")]
    pub perturb: Option<String>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Scene file [default: kappa = 1, k = (0, 1), modes m = 0, 1, 2 with amplitudes 1, 1/2, 1/4].
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Far-field order used by the recovery checks.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Allow orders above the precision cap.
    #[arg(long)]
    pub override_precision_cap: bool,
    /// Output directory for verify.json [default: print only].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ZerosArgs {
    /// Number of zeros, at most 20.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Output directory for zeros.csv [default: print only].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::init_threads().and_then(|()| match cli.command {
        Command::Forward(args) => commands::forward(&args),
        Command::Recover(args) => commands::recover(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Zeros(args) => commands::zeros(&args),
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("holo2d: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
