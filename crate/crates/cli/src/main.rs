use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polyvem::element::ConvectionMode;
use polyvem::mesh::{mesh_quality, write_mesh};
use polyvem_cli::{build_mesh, registry, run_case, verify_case, CaseDomain, CliError, MeshFamily, RunConfig};

#[derive(Parser)]
#[command(name = "polyvem", version, about = "Divergence-free virtual elements for steady Navier-Stokes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Run a convergence study for a registered case.
    Run(RunArgs),
    /// List registered cases.
    List,
    /// Check a case's closed-form load against its exact solution.
    Verify {
        case: String,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a mesh and write it in the polyvem text format.
    Gen {
        #[arg(long)]
        family: MeshFamily,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        distortion: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Domain of the voronoi family: square or disk.
        #[arg(long, default_value = "square")]
        domain: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    case: Option<String>,
    /// Flat `key = value` config; command-line options override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated subdivision counts, e.g. `10,20,40`.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<ConvectionMode>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
}

fn run(args: RunArgs) -> Result<bool, CliError> {
    let mut cfg = match (&args.config, &args.case) {
        (Some(path), case) => {
            let cfg = RunConfig::parse(&std::fs::read_to_string(path)?)?;
            if let Some(name) = case {
                if name != cfg.case.name {
                    return Err(CliError::InvalidValue {
                        key: "case".into(),
                        msg: format!("--case {name} conflicts with config case {}", cfg.case.name),
                    });
                }
            }
            cfg
        }
        (None, Some(name)) => RunConfig::for_case(name)?,
        (None, None) => {
            return Err(CliError::InvalidValue { key: "case".into(), msg: "give --case or --config".into() })
        }
    };
    if let Some(levels) = &args.levels {
        cfg.set("levels", levels)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = args.mode {
        cfg.solver.mode = mode;
    }
    if let Some(nu) = args.nu {
        cfg.nu = nu;
    }
    let outcome = run_case(&cfg, Some(&args.output))?;
    print!("{}", outcome.rate_summary());
    Ok(outcome.all_converged())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            for c in registry() {
                let levels: Vec<String> = c.levels.iter().map(|n| n.to_string()).collect();
                println!(
                    "{:<10} {:<7} nu={:<6} family={:<8} levels={:<12} {}",
                    c.name,
                    if c.navier_stokes { "ns" } else { "stokes" },
                    c.nu,
                    c.family,
                    levels.join(","),
                    c.description
                );
            }
            Ok(true)
        }
        Command::Verify { case, points, seed } => polyvem_cli::find_case(&case).map(|c| {
            let v = verify_case(&c, points, seed);
            println!(
                "{}: momentum {:.3e}  gradient {:.3e}  divergence {:.3e}",
                c.name, v.momentum, v.gradient, v.divergence
            );
            v.max() <= 1e-8
        }),
        Command::Mesh { command: MeshCommand::Gen { family, n, distortion, seed, domain, output } } => {
            let domain = match domain.as_str() {
                "square" => Ok(if family == MeshFamily::DiskTri { CaseDomain::Disk } else { CaseDomain::Square }),
                "disk" => Ok(CaseDomain::Disk),
                other => Err(CliError::InvalidValue { key: "domain".into(), msg: format!("unknown domain '{other}'") }),
            };
            domain.and_then(|d| build_mesh(family, d, n, distortion, seed)).and_then(|mesh| {
                write_mesh(&mesh, &output)?;
                let q = mesh_quality(&mesh);
                println!(
                    "{} cells, {} vertices, h = {:.4e}, min ball ratio {:.3}, min vertex ratio {:.3}, seed {seed}",
                    mesh.num_cells(),
                    mesh.num_vertices(),
                    mesh.max_diameter(),
                    q.min_ball_ratio,
                    q.min_vertex_ratio
                );
                Ok(true)
            })
        }
        Command::Run(args) => run(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
