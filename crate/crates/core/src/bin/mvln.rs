use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mvln::error::Error;
use mvln::network::{assemble, build_augmented, encode_state, simulate, AugmentedSystem};
use mvln::pinning::{synthesize, verify_plan, TargetPolicy};
use mvln::report::{analysis_report, pinning_report, trajectory_csv, AnalysisReport};
use mvln::sync::{analyze, sast, sync_state_set, Basin, SyncSpec};
use mvln::{parse_network, Network};

#[derive(Parser)]
#[command(name = "mvln", version, about = "Synchronization analysis and pinning control of coupled k-valued logical networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Synchronization tolerance γ (0 = complete synchronization)
    #[arg(long, global = true, default_value_t = 1)]
    gamma: usize,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write CSV output here instead of stdout
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Redirect-choice policy for pinning synthesis
    #[arg(long, global = true, value_enum, default_value_t = PolicyArg::LowestIndex)]
    policy: PolicyArg,
    /// Seed for the seeded policy
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include the full basin member list in reports
    #[arg(long, global = true)]
    full_basin: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    LowestIndex,
    Seeded,
}

#[derive(Subcommand)]
enum Command {
    /// Full synchronization analysis of a network file
    Analyze { file: PathBuf },
    /// Pinning-control synthesis when global synchronization fails
    Pin { file: PathBuf },
    /// Emit a CSV trajectory
    Simulate {
        file: PathBuf,
        /// Initial composite state as a δ-index
        #[arg(long, conflicts_with_all = ["x0", "z0"])]
        xi: Option<usize>,
        /// Initial x-state as comma-separated scalars (e.g. "1/4,1,0")
        #[arg(long, requires = "z0")]
        x0: Option<String>,
        /// Initial z-state as comma-separated scalars
        #[arg(long, requires = "x0")]
        z0: Option<String>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Simulate the pinned (perturbed) system
        #[arg(long)]
        pinned: bool,
    },
    /// Maximum synchronization basin only
    Masb { file: PathBuf },
    /// Shortest synchronization time for a basin of δ-indices
    Sast {
        file: PathBuf,
        /// Comma-separated δ-indices forming Φ
        #[arg(long, value_delimiter = ',', required = true)]
        phi: Vec<usize>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Syntax { .. }
        | Error::UnboundVariable(_)
        | Error::Dimension(_)
        | Error::DimensionCap { .. }
        | Error::ConfirmorIndex { .. }
        | Error::IndexRange { .. }
        | Error::LevelRange { .. }
        | Error::GammaRange { .. } => 2,
        Error::NotSynchronous | Error::Infeasible(_) => 3,
        Error::Internal(_) => 4,
    }
}

fn load(file: &PathBuf) -> Result<(Network, AugmentedSystem), Error> {
    let text = fs::read_to_string(file)
        .map_err(|e| Error::Syntax { line: 0, col: 0, msg: format!("cannot read {}: {e}", file.display()) })?;
    let network = parse_network(&text)?;
    let alg = assemble(&network)?;
    let sys = build_augmented(&alg)?;
    Ok((network, sys))
}

fn spec_for(network: &Network, common: &Common) -> Result<SyncSpec, Error> {
    let spec = SyncSpec::new(network.k, network.n, common.gamma)?;
    if spec.is_degenerate() {
        eprintln!(
            "warning: k = 2 with gamma >= 1 makes every state synchronous; use --gamma 0 for complete synchronization"
        );
    }
    Ok(spec)
}

fn policy_for(common: &Common) -> TargetPolicy {
    match common.policy {
        PolicyArg::LowestIndex => TargetPolicy::LowestIndex,
        PolicyArg::Seeded => TargetPolicy::Seeded(common.seed),
    }
}

fn emit_json(report: &AnalysisReport, common: &Common) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Internal(format!("serialization: {e}")))?;
    match &common.json {
        Some(path) => fs::write(path, text.as_bytes())
            .map_err(|e| Error::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn emit_csv(csv: &str, common: &Common) -> Result<(), Error> {
    match &common.csv {
        Some(path) => fs::write(path, csv.as_bytes())
            .map_err(|e| Error::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Scalar "p/q" or integer string → level i with (k−i)/(k−1) = p/q.
fn parse_scalar_level(s: &str, k: usize) -> Result<usize, Error> {
    let bad = || Error::Syntax { line: 0, col: 0, msg: format!("invalid scalar '{s}'") };
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => {
            (p.trim().parse::<usize>().map_err(|_| bad())?, q.trim().parse::<usize>().map_err(|_| bad())?)
        }
        None => (s.trim().parse::<usize>().map_err(|_| bad())?, 1),
    };
    if den == 0 || num * (k - 1) % den != 0 {
        return Err(bad());
    }
    let offset = num * (k - 1) / den;
    if offset > k - 1 {
        return Err(Error::LevelRange { level: 0, k });
    }
    Ok(k - offset)
}

fn initial_index(
    network: &Network,
    xi: Option<usize>,
    x0: &Option<String>,
    z0: &Option<String>,
) -> Result<usize, Error> {
    match (xi, x0, z0) {
        (Some(idx), _, _) => Ok(idx),
        (None, Some(xs), Some(zs)) => {
            let mut levels = Vec::new();
            for part in xs.split(',').chain(zs.split(',')) {
                levels.push(parse_scalar_level(part, network.k)?);
            }
            if levels.len() != 2 * network.n {
                return Err(Error::Syntax {
                    line: 0,
                    col: 0,
                    msg: format!(
                        "expected {} scalars per system, got {} in total",
                        network.n,
                        levels.len()
                    ),
                });
            }
            Ok(encode_state(&levels, network.k)?.delta_index)
        }
        _ => Err(Error::Syntax {
            line: 0,
            col: 0,
            msg: "provide either --xi or both --x0 and --z0".into(),
        }),
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let common = &cli.common;
    match &cli.command {
        Command::Analyze { file } => {
            let (network, sys) = load(file)?;
            let spec = spec_for(&network, common)?;
            let analysis = analyze(&sys, spec)?;
            emit_json(&analysis_report(&analysis, common.full_basin), common)
        }
        Command::Pin { file } => {
            let (network, sys) = load(file)?;
            let spec = spec_for(&network, common)?;
            let analysis = analyze(&sys, spec)?;
            let mut report = analysis_report(&analysis, common.full_basin);
            if analysis.global_sync {
                eprintln!("no pinning needed: the system is already globally synchronous");
            } else {
                let lambda = sync_state_set(spec)?;
                let plan = synthesize(&sys, &lambda, &policy_for(common))?;
                let verify = verify_plan(&sys, &plan, &lambda)?;
                report.pinning = Some(pinning_report(&plan, &verify));
            }
            emit_json(&report, common)
        }
        Command::Simulate { file, xi, x0, z0, steps, pinned } => {
            let (network, sys) = load(file)?;
            let start = initial_index(&network, *xi, x0, z0)?;
            let sys = if *pinned {
                let spec = spec_for(&network, common)?;
                let lambda = sync_state_set(spec)?;
                let plan = synthesize(&sys, &lambda, &policy_for(common))?;
                AugmentedSystem { k: sys.k, n: sys.n, l: plan.l_bar }
            } else {
                sys
            };
            let traj = simulate(&sys, start, *steps)?;
            emit_csv(&trajectory_csv(&traj, network.k, network.n)?, common)
        }
        Command::Masb { file } => {
            let (network, sys) = load(file)?;
            let spec = spec_for(&network, common)?;
            let analysis = analyze(&sys, spec)?;
            // the basin is the point of this command; always list members
            emit_json(&analysis_report(&analysis, true), common)
        }
        Command::Sast { file, phi } => {
            let (network, sys) = load(file)?;
            let spec = spec_for(&network, common)?;
            let analysis = analyze(&sys, spec)?;
            let basin = Basin { members: phi.iter().copied().collect::<BTreeSet<_>>(), max: false };
            let result = sast(&sys, &analysis.report, &basin, &analysis.lambda)?;
            let mut report = analysis_report(&analysis, common.full_basin);
            report.basin_sast = Some(result.gamma_time);
            emit_json(&report, common)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
