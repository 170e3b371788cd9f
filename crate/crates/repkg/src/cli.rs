//! Command line: `analyze`, `refactor` and `serve`.
//!
//! Exit codes: 0 success, 1 unreadable or malformed input (and usage
//! errors), 2 empty graph or graph without edges, 3 port already in use.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use repkg_core::{DependencyGraph, Error, Mode};

use crate::format::{read_graph, Format, IngestError};
use crate::report::{analysis_table, analyze, refactor_json, refactor_table, run_refactor};

#[derive(Debug, Parser)]
#[command(
    name = "repkg",
    version,
    about = "Package metrics and modularity-driven refactoring suggestions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Directed,
    Undirected,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Package count, modularity, instability and stable-dependency report.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: Format,
        #[arg(long, value_enum, default_value = "table")]
        output: Output,
    },
    /// Suggest class movements that raise modularity.
    Refactor {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: Format,
        #[arg(long, value_enum, default_value = "directed")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "json")]
        output: Output,
    },
    /// Run the session service and serve the UI bundle.
    Serve {
        #[arg(long, default_value_t = 8081)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;
pub const EXIT_PORT_BUSY: i32 = 3;

struct Failure {
    code: i32,
    message: String,
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        let code = if matches!(e, IngestError::Empty) {
            EXIT_EMPTY
        } else {
            EXIT_INPUT
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EmptyGraph | Error::UndefinedModularity => EXIT_EMPTY,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load(file: &Path, format: Format) -> Result<DependencyGraph, Failure> {
    let g = read_graph(file, format).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", file.display(), f.message);
        f
    })?;
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph.into());
    }
    if g.edge_count() == 0 {
        return Err(Error::UndefinedModularity.into());
    }
    Ok(g)
}

fn render(command: &Command) -> Result<String, Failure> {
    match command {
        Command::Analyze { file, format, output } => {
            let a = analyze(&load(file, *format)?)?;
            Ok(match output {
                Output::Table => analysis_table(&a),
                Output::Json => serde_json::to_string_pretty(&a).expect("analysis serializes") + "\n",
            })
        }
        Command::Refactor {
            file,
            format,
            mode,
            output,
        } => {
            let g = load(file, *format)?;
            let modes: &[Mode] = match mode {
                ModeArg::Directed => &[Mode::Directed],
                ModeArg::Undirected => &[Mode::Undirected],
                ModeArg::Both => &[Mode::Directed, Mode::Undirected],
            };
            let out = run_refactor(&g, modes)?;
            Ok(match output {
                Output::Json => refactor_json(&out) + "\n",
                Output::Table => refactor_table(&out),
            })
        }
        Command::Serve { .. } => unreachable!("serve does not render"),
    }
}

fn serve(port: u16, host: &str, ui_dir: Option<PathBuf>) -> i32 {
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("repkg: cannot start runtime: {e}");
            return EXIT_INPUT;
        }
    };
    runtime.block_on(async {
        let listener = match crate::server::bind(host, port).await {
            Ok(l) => l,
            Err(e) if e.kind() == std::io::ErrorKind::AddrInUse => {
                eprintln!("repkg: port {port} is already in use");
                return EXIT_PORT_BUSY;
            }
            Err(e) => {
                eprintln!("repkg: cannot bind {host}:{port}: {e}");
                return EXIT_INPUT;
            }
        };
        // registered before the banner is printed
        #[cfg(unix)]
        let mut interrupt = match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::interrupt()) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("repkg: cannot install signal handler: {e}");
                return EXIT_INPUT;
            }
        };
        let addr = listener.local_addr().expect("bound listener has an address");
        println!("listening on http://{addr}");
        let _ = std::io::stdout().flush();
        let shutdown = async move {
            #[cfg(unix)]
            interrupt.recv().await;
            #[cfg(not(unix))]
            let _ = tokio::signal::ctrl_c().await;
        };
        match crate::server::serve(listener, ui_dir, shutdown).await {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("repkg: server error: {e}");
                EXIT_INPUT
            }
        }
    })
}

/// Runs the command line with `args` and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    match &cli.command {
        Command::Serve { port, host, ui_dir } => serve(*port, host, ui_dir.clone()),
        command => match render(command) {
            Ok(text) => {
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                    Ok(()) => 0,
                    Err(_) => EXIT_INPUT,
                }
            }
            Err(f) => {
                eprintln!("repkg: {}", f.message);
                f.code
            }
        },
    }
}
