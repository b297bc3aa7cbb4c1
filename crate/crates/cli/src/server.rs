//! `serve`: one simulation loop at a fixed tick owns the [`Session`]; socket
//! readers feed it through a queue and every tick broadcasts a snapshot.

use std::path::PathBuf;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use tokio::net::TcpListener;
use tokio::sync::{broadcast, mpsc};
use tower_http::services::ServeDir;

use crate::protocol::{Session, SessionOptions};

pub const TICK_HZ: f64 = 60.0;

#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    pub session: SessionOptions,
    /// Directory of static UI assets served at `/`.
    pub assets: Option<PathBuf>,
}

#[derive(Clone)]
struct Channels {
    inbound: mpsc::Sender<String>,
    outbound: broadcast::Sender<String>,
}

/// Serves until the listener fails.
pub async fn serve(listener: TcpListener, opts: ServeOptions) -> std::io::Result<()> {
    let (in_tx, in_rx) = mpsc::channel::<String>(1024);
    let (out_tx, _) = broadcast::channel::<String>(256);
    tokio::spawn(sim_loop(Session::new(opts.session), in_rx, out_tx.clone()));

    let channels = Channels {
        inbound: in_tx,
        outbound: out_tx,
    };
    let mut app = Router::new().route("/ws", get(ws_handler)).with_state(channels);
    app = match &opts.assets {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.route("/", get(|| async { "fibersim sandbox: connect a websocket to /ws\n" })),
    };
    log::info!("serving on {}", listener.local_addr()?);
    axum::serve(listener, app).await
}

async fn sim_loop(mut session: Session, mut inbound: mpsc::Receiver<String>, outbound: broadcast::Sender<String>) {
    let mut interval = tokio::time::interval(Duration::from_secs_f64(1.0 / TICK_HZ));
    interval.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        interval.tick().await;
        loop {
            match inbound.try_recv() {
                Ok(text) => {
                    log::debug!("client: {text}");
                    if let Some(err) = session.handle_text(&text) {
                        let _ = outbound.send(err.to_json());
                    }
                }
                Err(mpsc::error::TryRecvError::Empty) => break,
                Err(mpsc::error::TryRecvError::Disconnected) => return,
            }
        }
        let was_collided = session.collided();
        if let Some(err) = session.tick() {
            log::info!("{err:?}");
            let _ = outbound.send(err.to_json());
        }
        if session.collided() && !was_collided {
            log::info!("collision at t={}", session.time());
        }
        let _ = outbound.send(session.snapshot().to_json());
    }
}

async fn ws_handler(ws: WebSocketUpgrade, State(ch): State<Channels>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| client(socket, ch))
}

async fn client(socket: WebSocket, ch: Channels) {
    let (mut sink, mut stream) = socket.split();
    let mut frames = ch.outbound.subscribe();
    let forward = tokio::spawn(async move {
        loop {
            match frames.recv().await {
                Ok(text) => {
                    if sink.send(Message::Text(text.into())).await.is_err() {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(n)) => log::debug!("client lagged by {n} frames"),
                Err(broadcast::error::RecvError::Closed) => break,
            }
        }
    });
    while let Some(Ok(msg)) = stream.next().await {
        match msg {
            Message::Text(text) => {
                if ch.inbound.send(text.as_str().to_owned()).await.is_err() {
                    break;
                }
            }
            Message::Binary(_) => {
                let _ = ch
                    .outbound
                    .send(r#"{"type":"error","msg":"binary frames are not supported"}"#.to_owned());
            }
            Message::Close(_) => break,
            _ => {}
        }
    }
    forward.abort();
}
