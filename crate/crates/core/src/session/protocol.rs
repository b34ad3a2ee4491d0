//! JSON wire messages exchanged with sensors and players, one per socket frame.

use serde::{Deserialize, Serialize};

use crate::types::Cause;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Sensor,
    Player,
    Observer,
}

impl Role {
    /// Whether connections in this role receive speed broadcasts.
    pub fn receives_speed(&self) -> bool {
        matches!(self, Role::Player | Role::Observer)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Inbound {
    Au { t: f64, au14: f64 },
    Marker { t: f64 },
    Tick { t: f64 },
    Hello { role: Role },
}

impl Inbound {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("inbound serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Speed { rate: f64, t: f64, cause: Cause },
    State { rate: f64, punchlines_seen: u32 },
    Error { code: String },
}

impl ServerMessage {
    pub fn error(code: &str) -> Self {
        ServerMessage::Error { code: code.to_string() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server message serializes")
    }
}

/// Who an outbound message goes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// The connection whose message caused it.
    Sender,
    /// Every player and observer attached to the session.
    Broadcast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outbound {
    pub target: Target,
    pub message: ServerMessage,
}

pub const BAD_MESSAGE: &str = "bad_message";
pub const UNKNOWN_TYPE: &str = "unknown_type";

const KNOWN_TYPES: [&str; 4] = ["au", "marker", "tick", "hello"];

/// Parses one inbound frame, returning the error code to send back on failure.
pub fn parse_inbound(text: &str) -> Result<Inbound, &'static str> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|_| BAD_MESSAGE)?;
    let ty = value.get("type").and_then(|t| t.as_str()).ok_or(BAD_MESSAGE)?;
    if !KNOWN_TYPES.contains(&ty) {
        return Err(UNKNOWN_TYPE);
    }
    let msg: Inbound = serde_json::from_value(value).map_err(|_| BAD_MESSAGE)?;
    let t = match &msg {
        Inbound::Au { t, au14 } if !au14.is_finite() => return Err(BAD_MESSAGE),
        Inbound::Au { t, .. } | Inbound::Marker { t } | Inbound::Tick { t } => *t,
        Inbound::Hello { .. } => 0.0,
    };
    if !t.is_finite() || t < 0.0 {
        return Err(BAD_MESSAGE);
    }
    Ok(msg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_inbound_types() {
        assert_eq!(
            parse_inbound(r#"{"type":"au","t":5.0,"au14":0.1}"#),
            Ok(Inbound::Au { t: 5.0, au14: 0.1 })
        );
        assert_eq!(parse_inbound(r#"{"type":"marker","t":1}"#), Ok(Inbound::Marker { t: 1.0 }));
        assert_eq!(parse_inbound(r#"{"type":"tick","t":2.5}"#), Ok(Inbound::Tick { t: 2.5 }));
        assert_eq!(
            parse_inbound(r#"{"type":"hello","role":"player"}"#),
            Ok(Inbound::Hello { role: Role::Player })
        );
    }

    #[test]
    fn error_codes() {
        assert_eq!(parse_inbound("not json"), Err(BAD_MESSAGE));
        assert_eq!(parse_inbound(r#"{"t":1}"#), Err(BAD_MESSAGE));
        assert_eq!(parse_inbound(r#"{"type":"dance"}"#), Err(UNKNOWN_TYPE));
        assert_eq!(parse_inbound(r#"{"type":"tick"}"#), Err(BAD_MESSAGE));
        assert_eq!(parse_inbound(r#"{"type":"tick","t":-1}"#), Err(BAD_MESSAGE));
        assert_eq!(parse_inbound(r#"{"type":"hello","role":"admin"}"#), Err(BAD_MESSAGE));
    }

    #[test]
    fn outbound_wire_shapes() {
        let speed = ServerMessage::Speed {
            rate: 0.9,
            t: 12.5,
            cause: Cause::NoLaugh,
        };
        assert_eq!(speed.to_json(), r#"{"type":"speed","rate":0.9,"t":12.5,"cause":"no_laugh"}"#);
        assert_eq!(
            ServerMessage::State {
                rate: 1.0,
                punchlines_seen: 2
            }
            .to_json(),
            r#"{"type":"state","rate":1.0,"punchlines_seen":2}"#
        );
        assert_eq!(ServerMessage::error(BAD_MESSAGE).to_json(), r#"{"type":"error","code":"bad_message"}"#);
    }
}
