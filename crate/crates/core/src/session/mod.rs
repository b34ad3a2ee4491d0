//! Viewing sessions: the live engine behind the socket server, the offline
//! simulator, session logs, and deterministic replay.

mod live;
mod log;
pub mod protocol;
mod replay;
mod simulate;

pub use live::LiveSession;
pub use log::{read_log, write_log};
pub use replay::{replay, Divergence};
pub use simulate::{simulate, LearnerModel};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{ControllerConfig, ControllerError};
use crate::expression::{Baseline, LaughEvent, LaughParams, PunchlineResponse, CALIBRATION_DURATION};
use crate::types::{validate_timeline, CoreError, PlaybackState, PunchlineSegment, SpeedCommand, Timeline};
use protocol::Role;

/// Session log format understood by this engine.
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub session_id: String,
    pub timeline: Timeline,
    pub controller: ControllerConfig,
    pub laugh: LaughParams,
    pub calibration_duration: f64,
}

impl SessionConfig {
    /// Default controller and laugh settings over `timeline`.
    pub fn new(session_id: impl Into<String>, timeline: Timeline) -> Self {
        Self {
            session_id: session_id.into(),
            timeline,
            controller: ControllerConfig::default(),
            laugh: LaughParams::default(),
            calibration_duration: CALIBRATION_DURATION,
        }
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        validate_timeline(self.timeline.clone())?;
        self.controller.validate()?;
        self.laugh.validate().map_err(|e| SessionError::Config(e.to_string()))?;
        if self.calibration_duration.is_nan() || self.calibration_duration <= 0.0 {
            return Err(SessionError::Config(format!(
                "calibration duration {} must be positive",
                self.calibration_duration
            )));
        }
        Ok(())
    }
}

/// One line of a session log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEvent {
    /// Seconds; real time for live sessions, simulated viewing time otherwise.
    pub wall_time: f64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Event {
    SessionStart {
        version: u32,
        config: SessionConfig,
    },
    Hello {
        role: Role,
    },
    AuFrame {
        t: f64,
        au14: f64,
    },
    /// Manual laugh marker from a player.
    LaughEvent(LaughEvent),
    Tick {
        t: f64,
    },
    Calibrated {
        baseline: Baseline,
    },
    PunchlineOpen {
        index: usize,
        segment: PunchlineSegment,
    },
    PunchlineClose {
        index: usize,
        segment: PunchlineSegment,
    },
    Decision {
        index: usize,
        response: PunchlineResponse,
    },
    SpeedCommand {
        index: usize,
        command: SpeedCommand,
    },
    State {
        rate: f64,
        punchlines_seen: u32,
    },
    Warning {
        code: String,
        detail: String,
    },
    ProtocolError {
        code: String,
        raw: String,
    },
    SessionEnd {
        final_state: PlaybackState,
        viewing_time: f64,
    },
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::SessionStart { .. } => "session_start",
            Event::Hello { .. } => "hello",
            Event::AuFrame { .. } => "au_frame",
            Event::LaughEvent(_) => "laugh_event",
            Event::Tick { .. } => "tick",
            Event::Calibrated { .. } => "calibrated",
            Event::PunchlineOpen { .. } => "punchline_open",
            Event::PunchlineClose { .. } => "punchline_close",
            Event::Decision { .. } => "decision",
            Event::SpeedCommand { .. } => "speed_command",
            Event::State { .. } => "state",
            Event::Warning { .. } => "warning",
            Event::ProtocolError { .. } => "protocol_error",
            Event::SessionEnd { .. } => "session_end",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub config: SessionConfig,
    pub events: Vec<SessionEvent>,
    pub final_state: PlaybackState,
    pub viewing_time: f64,
}

impl SessionLog {
    pub fn commands(&self) -> Vec<SpeedCommand> {
        self.events
            .iter()
            .filter_map(|e| match &e.event {
                Event::SpeedCommand { command, .. } => Some(*command),
                _ => None,
            })
            .collect()
    }

    pub fn responses(&self) -> Vec<PunchlineResponse> {
        self.events
            .iter()
            .filter_map(|e| match &e.event {
                Event::Decision { response, .. } => Some(*response),
                _ => None,
            })
            .collect()
    }
}

/// Time to watch the whole video: each media span divided by the rate in
/// effect during it. Commands take effect at their `t`.
pub fn viewing_time(media_duration: f64, initial_rate: f64, commands: &[SpeedCommand]) -> f64 {
    let mut total = 0.0;
    let mut from = 0.0;
    let mut rate = initial_rate;
    for c in commands {
        let to = c.t.clamp(from, media_duration);
        total += (to - from) / rate;
        from = to;
        rate = c.rate;
    }
    total + (media_duration - from).max(0.0) / rate
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Timeline(#[from] CoreError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error("invalid session config: {0}")]
    Config(String),
    #[error("invalid learner model: {0}")]
    Learner(String),
    #[error("session log line {line}: {msg}")]
    Log { line: usize, msg: String },
    #[error("session log version {0} is not supported (expected {LOG_VERSION})")]
    UnsupportedVersion(u32),
    #[error("replay diverged: {0}")]
    Diverged(Box<Divergence>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Cause;

    #[test]
    fn viewing_time_without_commands_is_media_time() {
        assert_eq!(viewing_time(600.0, 1.0, &[]), 600.0);
    }

    #[test]
    fn viewing_time_spans() {
        let cmds = [
            SpeedCommand {
                t: 100.0,
                rate: 0.9,
                cause: Cause::NoLaugh,
            },
            SpeedCommand {
                t: 300.0,
                rate: 0.8,
                cause: Cause::NoLaugh,
            },
        ];
        let expected = 100.0 + 200.0 / 0.9 + 300.0 / 0.8;
        assert!((viewing_time(600.0, 1.0, &cmds) - expected).abs() < 1e-9);
    }

    #[test]
    fn event_json_shape() {
        let e = SessionEvent {
            wall_time: 1.5,
            event: Event::Tick { t: 3.0 },
        };
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"wall_time":1.5,"kind":"tick","payload":{"t":3.0}}"#);
        let back: SessionEvent = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }
}
