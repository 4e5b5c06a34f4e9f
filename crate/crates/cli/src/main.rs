use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

#[derive(Parser)]
#[command(
    name = "panolayout",
    version,
    about = "Layout cues, bottom-boundary reconstruction and depth evaluation on equirectangular panoramas"
)]
struct Cli {
    /// Pipeline configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render an analytic cuboid room: depth, normals, labels and boundaries.
    SynthRoom {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Overrides `synth.seed` from the configuration.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Extract top and bottom boundaries from labels, normals and depth.
    ExtractCues {
        #[arg(long, value_name = "PNG")]
        labels: PathBuf,
        #[arg(long, value_name = "PFM")]
        normals: PathBuf,
        #[arg(long, value_name = "PFM")]
        depth: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Also write every intermediate map and boundary.
        #[arg(long)]
        debug: bool,
    },
    /// Reconstruct the bottom boundary from a top boundary and depth.
    ReconBottom {
        #[arg(long, value_name = "JSON")]
        top: PathBuf,
        #[arg(long, value_name = "PFM")]
        depth: PathBuf,
        /// Exact floor projection instead of the mirrored chain.
        #[arg(long)]
        exact: bool,
        /// Output boundary; printed to stdout when omitted.
        #[arg(long, value_name = "JSON")]
        out: Option<PathBuf>,
    },
    /// Build the blurred layout attention map of a top boundary.
    Attention {
        #[arg(long, value_name = "JSON")]
        top: PathBuf,
        #[arg(long, value_name = "PFM")]
        out: PathBuf,
        /// Map height in rows; half the boundary width when omitted.
        #[arg(long)]
        height: Option<usize>,
    },
    /// Depth metrics of a prediction against ground truth.
    EvalDepth {
        #[arg(long, value_name = "PFM")]
        pred: PathBuf,
        #[arg(long, value_name = "PFM")]
        gt: PathBuf,
        /// Pixels with a positive value are evaluated.
        #[arg(long, value_name = "PFM")]
        mask: Option<PathBuf>,
        #[arg(long, value_name = "JSON")]
        report: PathBuf,
    },
    /// Boundary RMSE and the layout indicator.
    EvalLayout {
        #[arg(long, value_name = "JSON")]
        pred_top: PathBuf,
        #[arg(long, value_name = "JSON")]
        gt_top: PathBuf,
        #[arg(long, value_name = "JSON")]
        pred_bottom: PathBuf,
        #[arg(long, value_name = "JSON")]
        gt_bottom: PathBuf,
        #[arg(long, value_name = "JSON")]
        report: PathBuf,
    },
    /// Correlation between color lightness and inverse depth.
    BiasPcc {
        /// RGB PNG or 3-channel PFM with values in [0, 255].
        #[arg(long, value_name = "FILE")]
        color: PathBuf,
        #[arg(long, value_name = "PFM")]
        depth: PathBuf,
        #[arg(long, value_name = "JSON")]
        report: Option<PathBuf>,
    },
    /// Apply one seeded augmentation to every modality of a sample directory.
    Augment {
        #[arg(long, value_name = "DIR")]
        sample: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
