//! Adaptive playback engine for comedy video: finds laugh-track punchlines,
//! decides from the viewer's AU14 trace whether each one landed, and steps the
//! playback rate down (missed) or up (laughed) in 0.1x steps within
//! [0.6x, 1.0x]. Also ships the time-stretch, statistics and questionnaire
//! tooling used to evaluate it.

pub mod controller;
pub mod evalkit;
pub mod expression;
pub mod io;
pub mod laughtrack;
pub mod session;
pub mod stats;
pub mod synth;
pub mod timestretch;
pub mod types;

pub use controller::ControllerConfig;
pub use expression::{LaughEvent, LaughParams, PunchlineResponse};
pub use laughtrack::{AudioBuffer, DetectorConfig};
pub use session::{SessionConfig, SessionLog};
pub use types::{validate_timeline, AuFrame, AuSeries, Cause, PlaybackState, PunchlineSegment, SpeedCommand, Timeline};
