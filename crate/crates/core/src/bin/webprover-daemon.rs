//! HTTP front end for the prover daemon.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::extract::State;
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Router;
use clap::Parser;

use webprover::daemon::{Daemon, MAX_BODY};
use webprover::libstore::Store;

#[derive(Parser)]
#[command(about = "Serve the web prover over HTTP")]
struct Args {
    /// Store directory (accounts, user trees, shared library).
    #[arg(long, default_value = "store")]
    store: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Seed an empty shared library from the `.ma` files under this directory.
    #[arg(long)]
    import: Option<PathBuf>,
    /// Minutes of inactivity before a login token expires.
    #[arg(long, default_value_t = 120)]
    idle_minutes: u64,
}

fn collect(dir: &Path, root: &Path, out: &mut Vec<(String, String)>) -> std::io::Result<()> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let path = e.path();
        if path.is_dir() {
            collect(&path, root, out)?;
        } else if path.extension().is_some_and(|x| x == "ma") {
            let rel = path.strip_prefix(root).expect("under root").to_string_lossy().replace('\\', "/");
            out.push((rel, std::fs::read_to_string(&path)?));
        }
    }
    Ok(())
}

async fn serve(State(daemon): State<Arc<Daemon>>, method: Method, uri: Uri, body: Body) -> Response {
    let target = uri.path_and_query().map_or_else(|| uri.path().to_string(), |p| p.as_str().to_string());
    let reply = match axum::body::to_bytes(body, MAX_BODY + 1).await {
        Ok(bytes) => {
            let d = daemon.clone();
            tokio::task::spawn_blocking(move || d.handle(method.as_str(), &target, &bytes)).await
        }
        Err(_) => Ok(Daemon::too_large()),
    };
    match reply {
        Ok(r) => {
            let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            (status, [(header::CONTENT_TYPE, "application/xml; charset=utf-8")], r.body).into_response()
        }
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let store = Store::open(&args.store)?;
    if let Some(dir) = &args.import {
        if store.head()? == 0 {
            let mut files = Vec::new();
            collect(dir, dir, &mut files)?;
            let refs: Vec<(&str, &str)> = files.iter().map(|(p, c)| (p.as_str(), c.as_str())).collect();
            store.import(&refs)?;
            log::info!("imported {} shared files", refs.len());
        }
    }
    let daemon = Arc::new(Daemon::new(store).with_idle_timeout(Duration::from_secs(args.idle_minutes * 60)));
    let app = Router::new().fallback(serve).with_state(daemon);
    let listener = tokio::net::TcpListener::bind(args.listen).await?;
    log::info!("listening on {}", args.listen);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
