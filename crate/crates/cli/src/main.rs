use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sparql_assist_core::client::ClientError;
use sparql_assist_core::config::{ConfigError, ServiceConfig};
use sparql_assist_core::metadata::Readiness;
use sparql_assist_core::schema_graph::ExportFormat;
use sparql_assist_core::{AssistError, Assistant};
use sparql_assist_service::{body, listen_addr, serve};
use tracing_subscriber::filter::Targets;
use tracing_subscriber::prelude::*;

#[derive(Parser)]
#[command(name = "sparql-assist", version, about = "SPARQL completion, query examples and schema export")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = "SPARQL_ASSIST_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaFormat {
    Dot,
    Json,
    Mermaid,
}

impl From<SchemaFormat> for ExportFormat {
    fn from(f: SchemaFormat) -> Self {
        match f {
            SchemaFormat::Dot => ExportFormat::Dot,
            SchemaFormat::Json => ExportFormat::Json,
            SchemaFormat::Mermaid => ExportFormat::Mermaid,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Complete at a 1-based line and column.
    Complete {
        #[arg(long)]
        endpoint: String,
        /// Query text; `-` reads standard input.
        #[arg(long)]
        query_file: PathBuf,
        #[arg(long)]
        line: u32,
        /// Counted in characters, not bytes.
        #[arg(long)]
        col: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List the endpoint's stored query examples.
    Examples {
        #[arg(long)]
        endpoint: String,
        /// Case-insensitive substring of description or query text.
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Export the class and property graph.
    Schema {
        #[arg(long)]
        endpoint: String,
        #[arg(long, value_enum)]
        format: SchemaFormat,
        /// Drop edges with fewer triples.
        #[arg(long, default_value_t = 0)]
        min_count: u64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Report which metadata an endpoint publishes.
    Probe {
        #[arg(long)]
        endpoint: String,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        /// Metadata cache TTL in seconds.
        #[arg(long)]
        ttl: Option<u64>,
    },
}

/// Bad arguments or configuration; exits with 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(message: impl ToString) -> anyhow::Error {
    Usage(message.to_string()).into()
}

fn classify(e: AssistError) -> anyhow::Error {
    match e {
        AssistError::Position(_)
        | AssistError::LineColumn(_)
        | AssistError::Endpoint(ClientError::InvalidEndpoint { .. }) => usage(e),
        other => other.into(),
    }
}

fn load_config(path: Option<&Path>) -> Result<ServiceConfig> {
    match path {
        None => Ok(ServiceConfig::default()),
        Some(path) => ServiceConfig::load(path).map_err(|e| match e {
            ConfigError::Io { .. } => anyhow::Error::new(e),
            other => usage(other),
        }),
    }
}

fn read_query(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading standard input")?;
        return Ok(text);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn probe_report(r: &Readiness) -> (String, Vec<String>) {
    let mut warnings = Vec::new();
    let void = match r.void_classes {
        Some(n) => plural(n, "class", "classes"),
        None => "absent".into(),
    };
    let examples = match r.examples {
        Some(n) if n > 0 => n.to_string(),
        _ => "absent".into(),
    };
    let mut text = format!("VoID: {void}; examples: {examples}\n");
    if let Some(e) = &r.void_error {
        warnings.push(format!("VoID query failed: {e}"));
    }
    if let Some(e) = &r.examples_error {
        warnings.push(format!("examples query failed: {e}"));
    } else if r.examples == Some(0) {
        warnings.push("no query examples published".into());
    }
    if r.void_classes.is_none() {
        warnings.push("no VoID description; completion falls back to probing".into());
        match (&r.probe, &r.probe_error) {
            (Some((classes, predicates)), _) => {
                text.push_str(&format!(
                    "fallback: {}, {}\n",
                    plural(*classes, "class", "classes"),
                    plural(*predicates, "predicate", "predicates")
                ));
                if *classes == 0 && *predicates == 0 {
                    warnings.push("probing found nothing; completion will offer keywords only".into());
                }
            }
            (None, Some(e)) => {
                text.push_str("fallback: unavailable\n");
                warnings.push(format!("probing failed: {e}"));
            }
            (None, None) => text.push_str("fallback: unavailable\n"),
        }
    }
    (text, warnings)
}

async fn run(cli: Cli) -> Result<()> {
    let mut config = load_config(cli.config.as_deref())?;
    if let Command::Serve { port, ttl } = cli.command {
        if let Some(port) = port {
            config.port = port;
        }
        if let Some(ttl) = ttl {
            config.ttl_seconds = ttl;
        }
        config.validate().map_err(usage)?;
        let addr = listen_addr(&config).map_err(usage)?;
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        tracing::info!(%addr, "listening");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        return Ok(serve(&config, listener, shutdown).await?);
    }

    let assistant = Arc::new(Assistant::from_config(&config).map_err(usage)?);
    match cli.command {
        Command::Complete { endpoint, query_file, line, col, format } => {
            let text = read_query(&query_file)?;
            let list = assistant.complete_at(&endpoint, &text, line, col).await.map_err(classify)?;
            match format {
                Format::Json => emit(&body::completion(&list))?,
                Format::Text => {
                    let lines: String = list.items.iter().map(|i| format!("{}\n", i.label)).collect();
                    emit(&lines)?;
                    eprintln!("provenance: {}", list.provenance.as_str());
                    if list.truncated {
                        eprintln!("list truncated");
                    }
                }
            }
        }
        Command::Examples { endpoint, q, format } => {
            let list = assistant.examples(&endpoint, q.as_deref().filter(|q| !q.is_empty())).await.map_err(classify)?;
            match format {
                Format::Json => emit(&body::examples(&list))?,
                Format::Text => {
                    let lines: String =
                        list.iter().map(|e| format!("{}\t{}\t{}\n", e.id, e.form.as_str(), e.description)).collect();
                    emit(&lines)?;
                }
            }
        }
        Command::Schema { endpoint, format, min_count, output } => {
            let graph = assistant.schema_graph(&endpoint, min_count).await.map_err(classify)?;
            let text = body::schema(&graph, format.into(), assistant.well_known());
            match output {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => emit(&text)?,
            }
        }
        Command::Probe { endpoint } => {
            let readiness = assistant.readiness(&endpoint).await.map_err(classify)?;
            let (text, warnings) = probe_report(&readiness);
            emit(&text)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Serve { .. } => unreachable!("handled above"),
    }
    Ok(())
}

#[tokio::main]
async fn main() -> ExitCode {
    let cli = Cli::parse();
    let default_level = if matches!(cli.command, Command::Serve { .. }) { "info" } else { "warn" };
    let filter: Targets = std::env::var("RUST_LOG")
        .ok()
        .and_then(|spec| spec.parse().ok())
        .unwrap_or_else(|| default_level.parse().expect("valid level"));
    tracing_subscriber::registry().with(tracing_subscriber::fmt::layer().with_writer(io::stderr)).with(filter).init();
    match run(cli).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
