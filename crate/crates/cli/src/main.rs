use std::fs;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context as _, Result};
use chatfsm_core::diff::categorize;
use chatfsm_core::filter::filtered_or_whole;
use chatfsm_core::fsm::{parse_fsm_json, serialize_fsm_json, validate_fsm, FsmDocument, Severity};
use chatfsm_core::retrieval::{index_codebase, retrieve, wrap_context, Index};
use chatfsm_core::viz::{diff_overlay, to_dot, DotOptions, RankDirection};
use chatfsm_eval::report::{load_records, save_records};
use chatfsm_eval::{report, run_suite, RunOptions};
use chatfsm_llm::{Cassette, CassetteMode, Gateway, LlmProviderConfig, DEFAULT_BASE_URL, DEFAULT_CREDENTIAL_ENV, EVAL_MODELS};
use chatfsm_service::{ServiceConfig, DEFAULT_PORT, DEFAULT_TOP_K};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chatfsm", version, about = "Extract, diff, visualize and modify robot state machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the state machines of a source file as canonical JSON.
    Extract {
        source: PathBuf,
        #[arg(long, value_enum, default_value = "regex")]
        filter: FilterMode,
        #[command(flatten)]
        gateway: GatewayArgs,
    },
    /// Check an FSM document; exits nonzero when it has errors.
    Validate { fsm: PathBuf },
    /// Compare a ground-truth document with another.
    Diff {
        ground_truth: PathBuf,
        input: PathBuf,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Emit DOT for a document, optionally as a change against another.
    Viz {
        fsm: PathBuf,
        #[arg(long, value_name = "OTHER")]
        diff: Option<PathBuf>,
        #[arg(long, default_value = "LR")]
        rankdir: RankDirection,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Context(ContextCommand),
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Keep sessions as JSON files in this directory.
        #[arg(long)]
        store: Option<PathBuf>,
        /// Codebase indexed for change requests that ask for context.
        #[arg(long)]
        codebase: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top_k: usize,
        #[command(flatten)]
        gateway: GatewayArgs,
    },
    #[command(subcommand)]
    Eval(EvalCommand),
}

#[derive(Subcommand)]
enum ContextCommand {
    /// Index a codebase into a JSON file.
    Index {
        dir: PathBuf,
        #[arg(short, long, default_value = "index.json")]
        out: PathBuf,
    },
    /// Top chunks for a query.
    Query {
        index: PathBuf,
        text: String,
        #[arg(short, default_value_t = DEFAULT_TOP_K)]
        k: usize,
        /// Print the context block as sent to the model.
        #[arg(long)]
        wrap: bool,
    },
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Run the pipeline over a directory of pairs; exits nonzero when any
    /// pair fails.
    Run {
        pairs_dir: PathBuf,
        /// Repeat for several models.
        #[arg(long, required = true)]
        model: Vec<String>,
        #[arg(long)]
        cassette: Option<PathBuf>,
        #[arg(long, default_value = "replay")]
        cassette_mode: CassetteMode,
        #[arg(long)]
        with_context: bool,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top_k: usize,
        /// Write the run records here.
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        provider: ProviderArgs,
    },
    /// Tables from one or more results files.
    Report {
        #[arg(required = true)]
        results: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterMode {
    Regex,
    Llm,
    None,
}

#[derive(Args)]
struct ProviderArgs {
    #[arg(long, env = "CHATFSM_BASE_URL", default_value = DEFAULT_BASE_URL)]
    base_url: String,
    /// Environment variable holding the API key.
    #[arg(long, default_value = DEFAULT_CREDENTIAL_ENV)]
    api_key_env: String,
    /// Seconds per request.
    #[arg(long, default_value_t = 120)]
    timeout: u64,
    #[arg(long, default_value_t = 3)]
    max_retries: u32,
}

#[derive(Args)]
struct GatewayArgs {
    #[arg(long, env = "CHATFSM_MODEL", default_value = EVAL_MODELS[0])]
    model: String,
    #[arg(long, env = "CHATFSM_CASSETTE")]
    cassette: Option<PathBuf>,
    #[arg(long, env = "CHATFSM_CASSETTE_MODE", default_value = "replay")]
    cassette_mode: CassetteMode,
    #[command(flatten)]
    provider: ProviderArgs,
}

impl ProviderArgs {
    fn gateway(&self, model: &str, cassette: Option<&Path>, mode: CassetteMode) -> Result<Gateway> {
        let config = LlmProviderConfig {
            base_url: self.base_url.clone(),
            model_id: model.to_owned(),
            credential_env_var: self.api_key_env.clone(),
            request_timeout: Duration::from_secs(self.timeout),
            max_retries: self.max_retries,
            ..LlmProviderConfig::default()
        };
        let cassette = match cassette {
            Some(path) => Some(Arc::new(Cassette::open(path, mode)?)),
            None if mode == CassetteMode::Passthrough => None,
            None => bail!("--cassette is required in {mode} mode"),
        };
        Ok(Gateway::http(config, cassette)?)
    }
}

impl GatewayArgs {
    fn gateway(&self) -> Result<Gateway> {
        self.provider
            .gateway(&self.model, self.cassette.as_deref(), self.cassette_mode)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_fsm(path: &Path) -> Result<FsmDocument> {
    parse_fsm_json(&read(path)?).with_context(|| format!("{} is not an FSM document", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Extract { source, filter, gateway } => {
            let text = read(&source)?;
            let gateway = gateway.gateway()?;
            let code = match filter {
                FilterMode::Regex => filtered_or_whole(&text, &source),
                FilterMode::Llm => gateway.filter_fsm_llm(&text)?.value,
                FilterMode::None => text,
            };
            let doc = gateway.extract_fsm(&code)?.value;
            print!("{}", serialize_fsm_json(&doc)?);
        }
        Command::Validate { fsm } => {
            let report = validate_fsm(&read_fsm(&fsm)?);
            for issue in &report.issues {
                let level = match issue.severity {
                    Severity::Error => "error",
                    Severity::Warning => "warning",
                };
                println!("{level}: {}: {}", issue.location, issue.message);
            }
            if !report.valid {
                return Ok(ExitCode::FAILURE);
            }
            println!("valid");
        }
        Command::Diff { ground_truth, input, json } => {
            let report = categorize(&read_fsm(&ground_truth)?, &read_fsm(&input)?);
            if json {
                println!("{}", report.to_json());
            } else {
                println!("{}", report.category.as_str());
                for line in report.messages() {
                    println!("{line}");
                }
            }
        }
        Command::Viz { fsm, diff, rankdir, out } => {
            let doc = read_fsm(&fsm)?;
            let dot = match diff {
                Some(other) => diff_overlay(&read_fsm(&other)?, &doc, rankdir),
                None => to_dot(
                    &doc,
                    &DotOptions {
                        rank_direction: rankdir,
                        highlight_diff: None,
                    },
                )?,
            };
            write_or_print(out.as_deref(), &dot)?;
        }
        Command::Context(ContextCommand::Index { dir, out }) => {
            let (index, warnings) = index_codebase(&dir)?;
            for w in &warnings {
                eprintln!("skipped {}: {}", w.path, w.reason);
            }
            index.save(&out)?;
            eprintln!("{} chunks written to {}", index.chunks.len(), out.display());
        }
        Command::Context(ContextCommand::Query { index, text, k, wrap }) => {
            let bundle = retrieve(&Index::load(&index)?, &text, k);
            if wrap {
                print!("{}", wrap_context(&bundle));
            } else {
                for s in &bundle.chunks {
                    println!("{:.4} {}:{}-{}", s.score, s.chunk.path, s.chunk.start_line, s.chunk.end_line);
                }
            }
        }
        Command::Serve {
            port,
            store,
            codebase,
            top_k,
            gateway,
        } => {
            let mut config = ServiceConfig::new(gateway.gateway()?);
            config.store_dir = store;
            config.top_k = top_k;
            if let Some(dir) = codebase {
                config.context_index = Some(index_codebase(&dir)?.0);
            }
            let addr = SocketAddr::from((Ipv4Addr::UNSPECIFIED, port));
            tokio::runtime::Runtime::new()?.block_on(chatfsm_service::serve(config, addr))?;
        }
        Command::Eval(EvalCommand::Run {
            pairs_dir,
            model,
            cassette,
            cassette_mode,
            with_context,
            top_k,
            out,
            provider,
        }) => {
            let options = RunOptions { with_context, top_k };
            let mut records = Vec::new();
            let gateway = provider.gateway(&model[0], cassette.as_deref(), cassette_mode)?;
            for m in &model {
                let record = run_suite(&pairs_dir, &gateway.with_model(m), &options)?;
                for r in &record.results {
                    if let Some(f) = &r.failure {
                        eprintln!("{m} {}: {} failed ({}): {}", r.pair_id, f.stage, f.kind, f.message);
                    }
                }
                records.push(record);
            }
            if let Some(path) = &out {
                save_records(path, &records)?;
            }
            print!("{}", report(&records).render_text());
            if records.iter().any(|r| r.failed() > 0) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Eval(EvalCommand::Report { results, json }) => {
            let mut records = Vec::new();
            for path in &results {
                records.extend(load_records(path)?);
            }
            let report = report(&records);
            if json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
