use std::fs;
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use termin_core::coconuts::{Kernel, KernelConfig};
use termin_core::gsi::params::Language;
use termin_core::gsi::server::Server;
use termin_core::harness::{self, Scenario};
use termin_core::time::Moment;

#[derive(Parser)]
#[command(name = "termin", version, about = "Appointment scheduling server, agents and scenario runner")]
struct Cli {
    /// Message language.
    #[arg(long, value_enum, global = true)]
    language: Option<Lang>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lang {
    De,
    En,
}

impl From<Lang> for Language {
    fn from(l: Lang) -> Language {
        match l {
            Lang::De => Language::De,
            Lang::En => Language::En,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the language server on a TCP port.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 7070)]
        port: u16,
        /// Kernel configuration (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run a scenario and print or write its transcript.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Analyse every file of a directory as one message.
    Analyze {
        dir: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Send time assumed for all messages.
        #[arg(long, default_value = "1996-10-28T09:00")]
        time: String,
    },
}

fn output(path: Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Serve { host, port, config } => {
            let config = match config {
                Some(p) => KernelConfig::from_toml(&fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => KernelConfig::default(),
            };
            let listener = TcpListener::bind((host.as_str(), port)).with_context(|| format!("binding {host}:{port}"))?;
            eprintln!("listening on {}", listener.local_addr()?);
            Arc::new(Server::new(Arc::new(Kernel::new(config)))).serve(listener)?;
        }
        Command::Run { scenario, transcript } => {
            let mut sc = Scenario::load(&scenario)?;
            if let Some(l) = cli.language {
                sc.language = l.into();
                for a in &mut sc.agents {
                    a.params.language = l.into();
                }
            }
            let server = Arc::new(Server::new(Arc::new(Kernel::new(KernelConfig::default()))));
            let run = harness::run(&sc, server)?;
            output(transcript, &run.transcript.to_tsv())?;
        }
        Command::Analyze { dir, report, time } => {
            let time: Moment = time.parse().map_err(anyhow::Error::msg)?;
            let language = cli.language.map_or(Language::De, Language::from);
            let rows = harness::analyze_corpus(&dir, language, time).with_context(|| format!("reading {}", dir.display()))?;
            let text: String = rows.iter().map(|r| r.to_tsv() + "\n").collect();
            output(report, &text)?;
        }
    }
    Ok(())
}
