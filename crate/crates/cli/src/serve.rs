//! WebSocket host for one live session. Every connection feeds a single
//! session task through a channel, so inbound frames are applied strictly in
//! arrival order. The session log is appended to disk as events occur.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Context;
use futures_util::{SinkExt, StreamExt};
use serde_json::json;
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::mpsc;
use tokio_tungstenite::tungstenite::Message;
use tracing::{debug, info, warn};

use pace_core::session::protocol::{parse_inbound, Inbound, Role, Target};
use pace_core::session::{LiveSession, SessionEvent};
use pace_core::SessionConfig;

use crate::commands::load_timeline;
use crate::ServeArgs;

enum Cmd {
    Connect { id: u64, tx: mpsc::UnboundedSender<String> },
    Frame { id: u64, text: String },
    Disconnect { id: u64 },
    Shutdown,
}

struct Peer {
    tx: mpsc::UnboundedSender<String>,
    role: Option<Role>,
}

pub fn run(args: ServeArgs) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(serve(args))
}

async fn serve(args: ServeArgs) -> anyhow::Result<()> {
    let timeline = load_timeline(&args.timeline)?;
    let session_id = args.session_id.clone().unwrap_or_else(|| {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        format!("session-{secs}")
    });
    std::fs::create_dir_all(&args.log_dir).with_context(|| format!("cannot create {}", args.log_dir.display()))?;
    let log_path = args.log_dir.join(format!("{session_id}.jsonl"));
    let config = SessionConfig::new(session_id.clone(), timeline);
    let writer = LogWriter::create(&log_path)?;

    let listener = TcpListener::bind((args.bind.as_str(), args.port))
        .await
        .with_context(|| format!("cannot listen on {}:{}", args.bind, args.port))?;
    let addr = listener.local_addr()?;
    println!("{}", json!({ "listening": addr.to_string(), "session_id": session_id, "log": log_path }));
    info!(%addr, "serving");

    let (tx, rx) = mpsc::unbounded_channel();
    let mut engine = tokio::spawn(session_loop(config, rx, writer));
    let accept_tx = tx.clone();
    let accept = tokio::spawn(async move {
        let mut next_id = 0u64;
        loop {
            match listener.accept().await {
                Ok((stream, peer)) => {
                    debug!(%peer, id = next_id, "connection");
                    tokio::spawn(connection(stream, next_id, accept_tx.clone()));
                    next_id += 1;
                }
                Err(e) => warn!(error = %e, "accept failed"),
            }
        }
    });

    let summary = tokio::select! {
        done = &mut engine => done?,
        _ = tokio::signal::ctrl_c() => {
            let _ = tx.send(Cmd::Shutdown);
            engine.await?
        }
    }?;
    accept.abort();
    crate::commands::print_json(summary)
}

/// Appends events to the session's JSON Lines file as they are logged.
struct LogWriter {
    file: File,
    path: PathBuf,
    written: usize,
}

impl LogWriter {
    fn create(path: &Path) -> anyhow::Result<Self> {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Self {
            file,
            path: path.to_path_buf(),
            written: 0,
        })
    }

    fn sync(&mut self, events: &[SessionEvent]) -> anyhow::Result<()> {
        let mut buf = String::new();
        for e in &events[self.written..] {
            buf.push_str(&serde_json::to_string(e)?);
            buf.push('\n');
        }
        self.written = events.len();
        self.file
            .write_all(buf.as_bytes())
            .and_then(|_| self.file.flush())
            .with_context(|| format!("cannot write {}", self.path.display()))
    }
}

async fn session_loop(
    config: SessionConfig,
    mut rx: mpsc::UnboundedReceiver<Cmd>,
    mut writer: LogWriter,
) -> anyhow::Result<serde_json::Value> {
    let started = Instant::now();
    let media_duration = config.timeline.media_duration;
    let mut session = LiveSession::new(config, 0.0)?;
    writer.sync(session.events())?;
    let mut peers: HashMap<u64, Peer> = HashMap::new();

    while let Some(cmd) = rx.recv().await {
        match cmd {
            Cmd::Connect { id, tx } => {
                peers.insert(id, Peer { tx, role: None });
            }
            Cmd::Disconnect { id } => {
                peers.remove(&id);
            }
            Cmd::Shutdown => break,
            Cmd::Frame { id, text } => {
                if let (Some(peer), Ok(Inbound::Hello { role })) = (peers.get_mut(&id), parse_inbound(&text)) {
                    peer.role = Some(role);
                }
                let outbound = session.handle_message(&text, started.elapsed().as_secs_f64());
                for out in outbound {
                    let text = out.message.to_json();
                    match out.target {
                        Target::Sender => {
                            if let Some(p) = peers.get(&id) {
                                let _ = p.tx.send(text);
                            }
                        }
                        Target::Broadcast => {
                            for p in peers.values().filter(|p| p.role.is_some_and(|r| r.receives_speed())) {
                                let _ = p.tx.send(text.clone());
                            }
                        }
                    }
                }
                writer.sync(session.events())?;
                if session.finished() && session.clock() >= media_duration {
                    info!("media finished");
                    break;
                }
            }
        }
    }

    let log = session.finish(started.elapsed().as_secs_f64());
    writer.sync(&log.events)?;
    Ok(json!({
        "session_id": log.config.session_id,
        "final_rate": log.final_state.rate,
        "punchlines_seen": log.final_state.punchlines_seen,
        "viewing_time": log.viewing_time,
        "log": writer.path,
    }))
}

async fn connection(stream: TcpStream, id: u64, engine: mpsc::UnboundedSender<Cmd>) {
    let ws = match tokio_tungstenite::accept_async(stream).await {
        Ok(ws) => ws,
        Err(e) => {
            debug!(id, error = %e, "handshake failed");
            return;
        }
    };
    let (mut sink, mut source) = ws.split();
    let (tx, mut rx) = mpsc::unbounded_channel::<String>();
    if engine.send(Cmd::Connect { id, tx }).is_err() {
        return;
    }
    let writer = tokio::spawn(async move {
        while let Some(text) = rx.recv().await {
            if sink.send(Message::Text(text)).await.is_err() {
                return;
            }
        }
        let _ = sink.close().await;
    });
    while let Some(frame) = source.next().await {
        let text = match frame {
            Ok(Message::Text(t)) => t,
            Ok(Message::Binary(b)) => String::from_utf8_lossy(&b).into_owned(),
            Ok(Message::Close(_)) | Err(_) => break,
            Ok(_) => continue,
        };
        if engine.send(Cmd::Frame { id, text }).is_err() {
            break;
        }
    }
    let _ = engine.send(Cmd::Disconnect { id });
    let _ = writer.await;
}
