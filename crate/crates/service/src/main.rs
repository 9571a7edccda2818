use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};
use geoqa_core::pipeline::DEFAULT_LM_TIMEOUT;
use geoqa_core::Engine;
use geoqa_service::openai::{OpenAiClient, DEFAULT_BASE_URL, DEFAULT_MODEL};
use geoqa_service::{router, AppState, JsonlTraceLog, MemoryTraceLog, TraceSink};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LmProvider {
    /// Rule-based stages and fixture answers only.
    None,
    /// An OpenAI-compatible chat completions endpoint.
    Openai,
}

/// Accessible map question answering service.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// Dataset configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Address to bind; local only by default.
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Seed for permutation inference; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = LmProvider::None)]
    lm: LmProvider,
    #[arg(long, default_value = DEFAULT_MODEL)]
    lm_model: String,
    #[arg(long, env = "GEOQA_LM_BASE_URL", default_value = DEFAULT_BASE_URL)]
    lm_base_url: String,
    /// Seconds before a model call falls back to rules.
    #[arg(long, default_value_t = DEFAULT_LM_TIMEOUT.as_secs())]
    lm_timeout: u64,
    /// Append trace records (JSON lines) to this file.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let cli = Cli::parse();

    let mut engine = Engine::load(&cli.config).with_context(|| format!("loading {}", cli.config.display()))?;
    if let Some(seed) = cli.seed {
        engine = engine.with_seed(seed);
    }
    if let LmProvider::Openai = cli.lm {
        let Ok(key) = std::env::var("OPENAI_API_KEY") else {
            bail!("--lm openai needs the OPENAI_API_KEY environment variable");
        };
        let timeout = Duration::from_secs(cli.lm_timeout);
        let client = OpenAiClient::new(key, cli.lm_model.clone(), cli.lm_base_url.clone(), timeout);
        engine = engine.with_lm(Arc::new(client), timeout);
    }
    tracing::info!(
        dataset = %engine.dataset.name,
        regions = engine.dataset.regions().len(),
        fixtures = engine.fixtures.len(),
        "dataset loaded"
    );

    let traces: Arc<dyn TraceSink> = match &cli.log {
        Some(p) => Arc::new(JsonlTraceLog::open(p).with_context(|| format!("opening {}", p.display()))?),
        None => Arc::new(MemoryTraceLog::default()),
    };
    let app = router(AppState::new(engine, traces));
    let addr: SocketAddr = format!("{}:{}", cli.host, cli.port).parse().context("bad --host/--port")?;
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
