use std::io;
use std::net::SocketAddr;
use std::sync::mpsc;
use std::thread;

use crate::routes::router;

/// A server running on its own thread with its own runtime, bound to an
/// ephemeral localhost port. Lets synchronous programs (the CLI, blocking
/// clients, tests) talk to a real HTTP server without managing a runtime.
///
/// Dropping the handle shuts the listener down; any still-running jobs are
/// detached rather than awaited, since the owning process is on its way
/// out anyway.
pub struct EmbeddedServer {
    addr: SocketAddr,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<thread::JoinHandle<()>>,
}

impl EmbeddedServer {
    pub fn start() -> io::Result<EmbeddedServer> {
        let (addr_tx, addr_rx) = mpsc::channel::<io::Result<SocketAddr>>();
        let (shutdown_tx, shutdown_rx) = tokio::sync::oneshot::channel::<()>();
        let thread = thread::Builder::new()
            .name("parasol-server".to_string())
            .spawn(move || {
                let runtime = match tokio::runtime::Builder::new_current_thread()
                    .enable_all()
                    .build()
                {
                    Ok(runtime) => runtime,
                    Err(err) => {
                        let _ = addr_tx.send(Err(err));
                        return;
                    }
                };
                runtime.block_on(async move {
                    let listener = match tokio::net::TcpListener::bind(("127.0.0.1", 0)).await {
                        Ok(listener) => listener,
                        Err(err) => {
                            let _ = addr_tx.send(Err(err));
                            return;
                        }
                    };
                    match listener.local_addr() {
                        Ok(addr) => {
                            let _ = addr_tx.send(Ok(addr));
                        }
                        Err(err) => {
                            let _ = addr_tx.send(Err(err));
                            return;
                        }
                    }
                    let served = axum::serve(listener, router())
                        .with_graceful_shutdown(async move {
                            let _ = shutdown_rx.await;
                        })
                        .await;
                    if let Err(err) = served {
                        tracing::error!(error = %err, "embedded server exited with an error");
                    }
                });
                // Don't block shutdown on in-flight background jobs.
                runtime.shutdown_background();
            })?;
        let addr = addr_rx
            .recv()
            .map_err(|_| io::Error::other("server thread exited before binding"))??;
        Ok(EmbeddedServer {
            addr,
            shutdown: Some(shutdown_tx),
            thread: Some(thread),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Base URL clients should use, e.g. `http://127.0.0.1:49321`.
    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for EmbeddedServer {
    fn drop(&mut self) {
        if let Some(shutdown) = self.shutdown.take() {
            let _ = shutdown.send(());
        }
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}
