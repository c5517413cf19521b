use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::extract::State;
use axum::http::header::CONTENT_TYPE;
use axum::response::IntoResponse;
use axum::routing::post;
use axum::Router;
use thiserror::Error;
use tokio::sync::oneshot;

use crate::registry::Registry;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: io::Error },
    #[error("cannot start runtime: {0}")]
    Runtime(io::Error),
}

/// Serves newline-delimited requests from `input` until end of input. Blank
/// lines are skipped; each response is written on its own line.
pub fn serve_stdio<R: BufRead, W: Write>(registry: &Registry, input: R, mut output: W) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(output, "{}", registry.handle_message(&line))?;
        output.flush()?;
    }
    Ok(())
}

async fn rpc(State(registry): State<Arc<Registry>>, body: String) -> impl IntoResponse {
    let reply = tokio::task::spawn_blocking(move || registry.handle_message(&body))
        .await
        .expect("rpc handler panicked");
    ([(CONTENT_TYPE, "application/json")], reply)
}

/// `POST /rpc` over the registry.
pub fn rpc_router(registry: Arc<Registry>) -> Router {
    Router::new().route("/rpc", post(rpc)).with_state(registry)
}

/// A server running on its own runtime thread. Dropping the handle shuts
/// it down after in-flight requests finish.
pub struct ServerHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stops accepting connections and waits for in-flight requests.
    pub fn shutdown(mut self) {
        self.stop();
    }

    /// Blocks until the server stops on its own.
    pub fn join(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    fn stop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Binds `addr` (port 0 picks a free port) and serves `router` on a
/// background multi-threaded runtime.
pub fn spawn_http(router: Router, addr: SocketAddr) -> Result<ServerHandle, ServeError> {
    let listener = std::net::TcpListener::bind(addr).map_err(|source| ServeError::Bind { addr, source })?;
    let local = listener.local_addr().map_err(|source| ServeError::Bind { addr, source })?;
    listener.set_nonblocking(true).map_err(|source| ServeError::Bind { addr, source })?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(ServeError::Runtime)?;
    let (tx, rx) = oneshot::channel::<()>();
    let thread = std::thread::spawn(move || {
        runtime.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener).expect("listener registers with runtime");
            let _ = axum::serve(listener, router)
                .with_graceful_shutdown(async {
                    let _ = rx.await;
                })
                .await;
        });
    });
    Ok(ServerHandle { addr: local, shutdown: Some(tx), thread: Some(thread) })
}
