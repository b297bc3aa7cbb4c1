use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fibersim::commands::{self, parse_vec2, PlanArgs, EXIT_ERROR};
use fibersim::protocol::SessionOptions;
use fibersim::scenario::MechanismSpec;
use fibersim::server::{serve, ServeOptions};
use fibersim_core::Vec2;

#[derive(Parser)]
#[command(name = "fibersim", version, about = "Two-disk reaction mechanism simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lift a scenario's obstacle motion and write the trajectory CSV.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the collision geometry of a conformal linear mechanism as JSON.
    Analyze {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, value_parser = vec2_arg, allow_hyphen_values = true)]
        cm0: Vec2,
        #[arg(long, value_parser = vec2_arg, allow_hyphen_values = true)]
        cn0: Vec2,
    },
    /// Plan between two ego positions around the scenario's moving obstacle.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = vec2_arg, allow_hyphen_values = true)]
        start: Vec2,
        #[arg(long, value_parser = vec2_arg, allow_hyphen_values = true)]
        goal: Vec2,
        #[arg(long)]
        out: PathBuf,
        /// Evaluate every n-th grid node only.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// JSON mechanism spec moving the goal along with the obstacle.
        #[arg(long)]
        target_mechanism: Option<String>,
    },
    /// Run the realtime sandbox over websockets at /ws.
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long, default_value_t = SessionOptions::default().vmax)]
        vmax: f64,
        #[arg(long, default_value_t = SessionOptions::default().step)]
        step: f64,
        /// Static UI assets to serve at /.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

fn vec2_arg(s: &str) -> Result<Vec2, String> {
    parse_vec2(s).map_err(|e| e.to_string())
}

fn init_logging() {
    let level = match std::env::var("FIBERSIM_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    env_logger::Builder::new().filter_level(level).init();
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    Ok(match cli.command {
        Command::Simulate { scenario, out } => commands::run_simulate(&scenario, &out)?.exit_code(),
        Command::Analyze { alpha, beta, cm0, cn0 } => {
            println!("{}", commands::run_analyze(alpha, beta, cm0, cn0)?.to_json());
            0
        }
        Command::Plan {
            scenario,
            start,
            goal,
            out,
            stride,
            target_mechanism,
        } => {
            let target_mechanism = target_mechanism
                .map(|s| serde_json::from_str::<MechanismSpec>(&s))
                .transpose()
                .map_err(|e| anyhow::anyhow!("bad --target-mechanism: {e}"))?;
            let args = PlanArgs {
                stride,
                target_mechanism,
            };
            let result = commands::run_plan(&scenario, start, goal, &out, &args)?;
            match result.residuals {
                Some(r) => println!("{}", serde_json::to_string(&r)?),
                None => println!(
                    "{{\"collisionTime\":{}}}",
                    result.trajectory.collision_time.unwrap_or(f64::NAN)
                ),
            }
            result.status.exit_code()
        }
        Command::Serve {
            port,
            vmax,
            step,
            assets,
        } => {
            if !(vmax > 0.0 && vmax.is_finite() && step > 0.0 && step.is_finite()) {
                anyhow::bail!("--vmax and --step must be positive");
            }
            let opts = ServeOptions {
                session: SessionOptions { vmax, step },
                assets,
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(SocketAddr::from(([0, 0, 0, 0], port))).await?;
                serve(listener, opts).await
            })?;
            0
        }
    })
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
