use std::io::{BufRead, BufReader};
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use serde_json::{json, Value};
use tokio::net::TcpStream;
use tokio::time::timeout;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{connect_async, MaybeTlsStream, WebSocketStream};

use pace_core::session::{read_log, replay, Event};

type Ws = WebSocketStream<MaybeTlsStream<TcpStream>>;

struct Server {
    child: Child,
    addr: String,
    log: PathBuf,
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
    }
}

fn start(log_dir: &std::path::Path) -> Server {
    let timeline = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/demo_timeline.json");
    let mut child = Command::new(env!("CARGO_BIN_EXE_pace"))
        .args(["serve", "--port", "0", "--session-id", "ws-test", "--timeline"])
        .arg(timeline)
        .arg("--log-dir")
        .arg(log_dir)
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.as_mut().unwrap()).read_line(&mut line).unwrap();
    let banner: Value = serde_json::from_str(&line).unwrap();
    Server {
        addr: banner["listening"].as_str().unwrap().to_string(),
        log: PathBuf::from(banner["log"].as_str().unwrap()),
        child,
    }
}

async fn send(ws: &mut Ws, v: Value) {
    ws.send(Message::Text(v.to_string())).await.unwrap();
}

async fn recv(ws: &mut Ws) -> Value {
    loop {
        let msg = timeout(Duration::from_secs(10), ws.next()).await.expect("reply in time").unwrap().unwrap();
        if let Message::Text(t) = msg {
            return serde_json::from_str(&t).unwrap();
        }
    }
}

async fn silent(ws: &mut Ws) -> bool {
    timeout(Duration::from_millis(200), ws.next()).await.is_err()
}

#[tokio::test(flavor = "multi_thread")]
async fn websocket_session_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut server = start(dir.path());
    let url = format!("ws://{}", server.addr);

    let (mut player, _) = connect_async(&url).await.unwrap();
    let (mut observer, _) = connect_async(&url).await.unwrap();
    let (mut sensor, _) = connect_async(&url).await.unwrap();

    send(&mut player, json!({"type": "hello", "role": "player"})).await;
    assert_eq!(recv(&mut player).await, json!({"type": "state", "rate": 1.0, "punchlines_seen": 0}));
    send(&mut observer, json!({"type": "hello", "role": "observer"})).await;
    assert_eq!(recv(&mut observer).await["type"], "state");
    send(&mut sensor, json!({"type": "hello", "role": "sensor"})).await;

    // Errors go back to the sender only.
    sensor.send(Message::Text("not json".into())).await.unwrap();
    assert_eq!(recv(&mut sensor).await, json!({"type": "error", "code": "bad_message"}));
    send(&mut sensor, json!({"type": "volume"})).await;
    assert_eq!(recv(&mut sensor).await, json!({"type": "error", "code": "unknown_type"}));
    assert!(silent(&mut player).await);

    // First punchline (43-45.5) closes at 46.5 with no laugh: slow down.
    send(&mut player, json!({"type": "tick", "t": 47.0})).await;
    let speed = json!({"type": "speed", "rate": 0.9, "t": 45.5, "cause": "no_laugh"});
    assert_eq!(recv(&mut player).await, speed);
    assert_eq!(recv(&mut observer).await, speed);
    assert!(silent(&mut sensor).await);

    // A marker inside the second window (111-113.5) speeds back up.
    send(&mut player, json!({"type": "marker", "t": 112.0})).await;
    send(&mut player, json!({"type": "tick", "t": 115.0})).await;
    assert_eq!(recv(&mut player).await, json!({"type": "speed", "rate": 1.0, "t": 113.5, "cause": "laugh"}));

    // Reaching the end of the media decides the rest and ends the session.
    send(&mut player, json!({"type": "tick", "t": 600.0})).await;
    let mut rates = Vec::new();
    for _ in 0..4 {
        rates.push(recv(&mut player).await["rate"].as_f64().unwrap());
    }
    assert_eq!(rates, vec![0.9, 0.8, 0.7, 0.6]);

    let status = tokio::task::spawn_blocking(move || {
        let status = server.child.wait().unwrap();
        (status, server.log.clone())
    })
    .await
    .unwrap();
    assert!(status.0.success());
    assert_eq!(status.1, dir.path().join("ws-test.jsonl"));

    let log = read_log(&std::fs::read_to_string(&status.1).unwrap()).unwrap();
    assert!(matches!(log.events.last().unwrap().event, Event::SessionEnd { .. }));
    assert_eq!(log.commands().len(), 6);
    assert_eq!(log.final_state.rate, 0.6);
    let kinds: Vec<&str> = log.events.iter().map(|e| e.event.kind()).collect();
    assert_eq!(kinds.iter().filter(|k| **k == "protocol_error").count(), 2);
    assert_eq!(replay(&log).unwrap().commands(), log.commands());
}
