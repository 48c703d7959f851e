//! Command-line front end: `manugrip <synth|calibrate|replay|grasp|simulate> --config <file>`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use manugrip::pipeline::{self, GraspInputs, PipelineConfig, SimInput};

#[derive(Parser)]
#[command(name = "manugrip", version, about = "Glove-stream replay, grasp reconstruction and tool-use simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config; every field is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a glove stream: flat-hand, twist-lid, press-lid, pinch-lid or pick-place.
    Synth { scenario: String },
    /// Derive IMU corrections from the flat-hand head of a stream.
    Calibrate { stream: PathBuf },
    /// Reconstruct joint angles and the palm/thumb/index channels.
    Replay {
        stream: PathBuf,
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Run the grasp state machine against an object mesh.
    Grasp {
        stream: Option<PathBuf>,
        /// Watertight OBJ of the object, world frame.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Earlier contact logs to summarize with this run.
        #[arg(long, num_args = 1..)]
        aggregate: Vec<PathBuf>,
    },
    /// Simulate a built-in scene (plate-press, hammer-fast, hammer-slow, knife) or one
    /// given by pose tracks, tool meshes and a tet mesh.
    Simulate {
        scenario: Option<String>,
        #[arg(long, requires_all = ["nodes", "elements", "tool"], conflicts_with = "scenario")]
        trajectories: Option<PathBuf>,
        /// Tool surface for body id 0, 1, ... in order.
        #[arg(long)]
        tool: Vec<PathBuf>,
        #[arg(long)]
        nodes: Option<PathBuf>,
        #[arg(long)]
        elements: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> manugrip::Result<PipelineConfig> {
    let mut config = match path {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    Ok(config)
}

fn run(cli: Cli) -> manugrip::Result<pipeline::RunManifest> {
    let config = load_config(cli.config.as_deref(), cli.seed)?;
    let out = cli.out.as_path();
    match cli.command {
        Command::Synth { scenario } => pipeline::cmd_synth(&config, &scenario, out),
        Command::Calibrate { stream } => pipeline::cmd_calibrate(&config, &stream, out),
        Command::Replay { stream, calibration } => pipeline::cmd_replay(&config, &stream, calibration.as_deref(), out),
        Command::Grasp { stream, mesh, calibration, aggregate } => pipeline::cmd_grasp(
            &config,
            GraspInputs {
                stream: stream.as_deref(),
                mesh: mesh.as_deref(),
                calibration: calibration.as_deref(),
                aggregate: &aggregate,
            },
            out,
        ),
        Command::Simulate { scenario, trajectories, tool, nodes, elements } => {
            let input = match (scenario, trajectories, nodes, elements) {
                (Some(name), None, _, _) => SimInput::Scenario(name),
                (None, Some(trajectories), Some(nodes), Some(elements)) => {
                    SimInput::Files { trajectories, tools: tool, nodes, elements }
                }
                _ => {
                    return Err(manugrip::Error::InvalidArgument(
                        "simulate needs a scenario name or --trajectories with --tool, --nodes and --elements".into(),
                    ))
                }
            };
            pipeline::cmd_simulate(&config, &input, out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(manifest) => {
            for f in &manifest.outputs {
                println!("{}", f.path);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let line = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {line}", e.kind());
            ExitCode::FAILURE
        }
    }
}
