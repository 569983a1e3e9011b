use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sentinel_cli::api::{observations_from, router, scenario_summary, AppState};
use sentinel_cli::{classify, parse_json, ErrorBody, ErrorKind};
use sentinel_core::store::DATA_DIR_ENV;
use sentinel_core::{evaluate, export_session, load_scenario, run_replay, Observation, Overrides, Store};

#[derive(Parser)]
#[command(name = "sentinel", version, about = "Bayesian early-warning engine: replay scenarios and run analyst sessions")]
struct Cli {
    /// Seed for Monte Carlo checks (reserved; no command samples yet).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a scenario file.
    Validate { scenario: PathBuf },
    /// Replay a scenario's scripted observations and write the CSV report.
    Replay {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the session API over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[command(flatten)]
        data: DataDir,
    },
    /// Work with stored sessions.
    #[command(subcommand)]
    Session(SessionCommand),
}

#[derive(Args)]
struct DataDir {
    /// Data directory (defaults to $SENTINEL_DATA_DIR, then ./sentinel-data).
    #[arg(long = "data", env = DATA_DIR_ENV, default_value = "sentinel-data")]
    dir: PathBuf,
}

#[derive(Subcommand)]
enum SessionCommand {
    /// Store a scenario and start a session on it.
    New {
        scenario: PathBuf,
        #[command(flatten)]
        data: DataDir,
    },
    /// Record observations for the next period.
    Observe {
        id: String,
        #[arg(long, required_unless_present = "file", conflicts_with = "file")]
        signal: Option<String>,
        #[arg(long, requires = "signal")]
        value: Option<String>,
        /// Reporting source; repeat for several.
        #[arg(long = "source")]
        sources: Vec<String>,
        /// Defaults to the period after the session's current one.
        #[arg(long)]
        period: Option<u32>,
        /// JSON file holding one observation or an array of them.
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        data: DataDir,
    },
    /// Print the current alert recommendation.
    Recommend {
        id: String,
        #[command(flatten)]
        data: DataDir,
    },
    /// Create a what-if branch from a JSON overrides document.
    Branch {
        id: String,
        #[arg(long, required_unless_present = "json", conflicts_with = "json")]
        overrides: Option<PathBuf>,
        /// Overrides given inline.
        #[arg(long)]
        json: Option<String>,
        #[command(flatten)]
        data: DataDir,
    },
    /// Write a session's per-period tables and snapshot.
    Export {
        id: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        data: DataDir,
    },
}

type CmdResult = Result<Value, ErrorBody>;

fn core(e: sentinel_core::Error) -> ErrorBody {
    ErrorBody::from(&e)
}

fn read(path: &Path) -> Result<Vec<u8>, ErrorBody> {
    std::fs::read(path).map_err(|e| ErrorBody::new("IoError", format!("{}: {e}", path.display()), None))
}

fn open(data: &DataDir) -> Result<Store, ErrorBody> {
    Store::open(&data.dir).map_err(core)
}

fn session_command(cmd: SessionCommand) -> CmdResult {
    match cmd {
        SessionCommand::New { scenario, data } => {
            let store = open(&data)?;
            let text = String::from_utf8(read(&scenario)?).map_err(|e| ErrorBody::new("InvalidJson", e.to_string(), None))?;
            let s = store.put_scenario(&text).map_err(core)?;
            let session = store.create_session(&s).map_err(core)?;
            let output = evaluate(&s, &session.belief, &session.cost_model, None).map_err(core)?;
            Ok(json!({ "session_id": session.id, "scenario": scenario_summary(&s), "output": output }))
        }
        SessionCommand::Observe { id, signal, value, sources, period, file, data } => {
            let store = open(&data)?;
            let session = store.load_session(&id).map_err(core)?;
            let observations = match (file, signal) {
                (Some(f), _) => observations_from(parse_json(&read(&f)?)?)?,
                (None, Some(signal)) => vec![Observation {
                    period: period.unwrap_or(session.period() + 1),
                    signal,
                    value: value.ok_or_else(|| ErrorBody::new("InvalidObservation", "--value is required", Some("value".into())))?,
                    sources,
                }],
                (None, None) => unreachable!("clap requires --signal or --file"),
            };
            let scenario = store.load_scenario(&session.scenario_hash).map_err(core)?;
            let (next, output) = store.observe(&scenario, &id, &observations).map_err(core)?;
            Ok(json!({ "session_id": next.id, "period": next.period(), "output": output }))
        }
        SessionCommand::Recommend { id, data } => {
            let store = open(&data)?;
            let session = store.load_session(&id).map_err(core)?;
            let scenario = store.load_scenario(&session.scenario_hash).map_err(core)?;
            let out = evaluate(&scenario, &session.belief, &session.cost_model, None).map_err(core)?;
            Ok(json!({ "session_id": id, "period": session.period(), "recommendation": out.recommendation }))
        }
        SessionCommand::Branch { id, overrides, json, data } => {
            let store = open(&data)?;
            let bytes = match (overrides, json) {
                (Some(f), _) => read(&f)?,
                (None, Some(text)) => text.into_bytes(),
                (None, None) => unreachable!("clap requires --overrides or --json"),
            };
            let ov: Overrides = parse_json(&bytes)?;
            let parent = store.load_session(&id).map_err(core)?;
            let scenario = store.load_scenario(&parent.scenario_hash).map_err(core)?;
            let branch = store.branch(&scenario, &id, &ov).map_err(core)?;
            let out = evaluate(&scenario, &branch.belief, &branch.cost_model, None).map_err(core)?;
            Ok(json!({
                "session_id": branch.id,
                "parent": id,
                "description": branch.description,
                "period": branch.period(),
                "output": out,
            }))
        }
        SessionCommand::Export { id, out, data } => {
            let store = open(&data)?;
            let session = store.load_session(&id).map_err(core)?;
            let scenario = store.load_scenario(&session.scenario_hash).map_err(core)?;
            let files = export_session(&scenario, &session, &out).map_err(core)?;
            Ok(json!({ "session_id": id, "out": out, "files": files }))
        }
    }
}

async fn serve(host: &str, port: u16, data: &DataDir) -> Result<(), ErrorBody> {
    let store = open(data)?;
    let addr: SocketAddr =
        format!("{host}:{port}").parse().map_err(|e| ErrorBody::new("InvalidAddress", format!("{e}"), Some("host".into())))?;
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| ErrorBody::new("IoError", e.to_string(), None))?;
    let local = listener.local_addr().map_err(|e| ErrorBody::new("IoError", e.to_string(), None))?;
    eprintln!("listening on http://{local} (data in {})", data.dir.display());
    let app = router(Arc::new(AppState::new(store)));
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ErrorBody::new("IoError", e.to_string(), None))
}

fn run(cli: Cli) -> CmdResult {
    let _ = cli.seed;
    match cli.command {
        Command::Validate { scenario } => {
            let s = load_scenario(&scenario).map_err(core)?;
            Ok(json!({ "valid": true, "scenario": scenario_summary(&s) }))
        }
        Command::Replay { scenario, out } => {
            let s = load_scenario(&scenario).map_err(core)?;
            let summary = run_replay(&s, &out).map_err(core)?;
            Ok(serde_json::to_value(summary).expect("summary serializes"))
        }
        Command::Serve { port, host, data } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| ErrorBody::new("IoError", e.to_string(), None))?;
            rt.block_on(serve(&host, port, &data))?;
            Ok(Value::Null)
        }
        Command::Session(cmd) => session_command(cmd),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Value::Null) => ExitCode::SUCCESS,
        Ok(v) => {
            // a closed pipe (`| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&v).expect("output serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string_pretty(&e).expect("error serializes"));
            match classify(&e.code) {
                ErrorKind::Invalid => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
