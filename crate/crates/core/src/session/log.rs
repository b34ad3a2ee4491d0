//! JSON Lines persistence: one [`SessionEvent`] per line, starting with
//! `session_start` and, for completed sessions, ending with `session_end`.

use super::{viewing_time, Event, SessionError, SessionEvent, SessionLog};
use crate::controller;

pub fn write_log(log: &SessionLog) -> String {
    let mut out = String::new();
    for e in &log.events {
        out.push_str(&serde_json::to_string(e).expect("event serializes"));
        out.push('\n');
    }
    out
}

/// Parses a log. Logs cut short (no `session_end`, e.g. a server that was
/// killed) get their final state and viewing time recomputed from the commands.
pub fn read_log(text: &str) -> Result<SessionLog, SessionError> {
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let e: SessionEvent = serde_json::from_str(line).map_err(|err| SessionError::Log {
            line: i + 1,
            msg: err.to_string(),
        })?;
        events.push(e);
    }
    let config = match events.first().map(|e| &e.event) {
        Some(Event::SessionStart { config, .. }) => config.clone(),
        _ => {
            return Err(SessionError::Log {
                line: 1,
                msg: "first event must be session_start".into(),
            })
        }
    };
    if let Some(Event::SessionEnd {
        final_state,
        viewing_time,
    }) = events.last().map(|e| &e.event)
    {
        return Ok(SessionLog {
            final_state: *final_state,
            viewing_time: *viewing_time,
            config,
            events,
        });
    }

    let mut state = config.controller.initial_state();
    let mut commands = Vec::new();
    for e in &events {
        match &e.event {
            Event::Decision { response, .. } => {
                state = controller::step(state, response.laughed, &config.controller)?.0;
            }
            Event::SpeedCommand { command, .. } => commands.push(*command),
            _ => {}
        }
    }
    let vt = viewing_time(
        config.timeline.media_duration,
        config.controller.initial_state().rate,
        &commands,
    );
    Ok(SessionLog {
        config,
        events,
        final_state: state,
        viewing_time: vt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::{simulate, LearnerModel, SessionConfig};
    use crate::synth::demo_timeline;

    #[test]
    fn round_trip() {
        let cfg = SessionConfig::new("rt", demo_timeline());
        let log = simulate(&cfg, &LearnerModel::Threshold { threshold_rate: 0.8 }).unwrap();
        let text = write_log(&log);
        assert_eq!(text.lines().count(), log.events.len());
        let back = read_log(&text).unwrap();
        assert_eq!(back, log);
        assert_eq!(write_log(&back), text);
    }

    #[test]
    fn truncated_log_recomputes_final_state() {
        let cfg = SessionConfig::new("cut", demo_timeline());
        let log = simulate(&cfg, &LearnerModel::Never).unwrap();
        let text = write_log(&log);
        let cut: String = text.lines().take(text.lines().count() - 1).map(|l| format!("{l}\n")).collect();
        let back = read_log(&cut).unwrap();
        assert_eq!(back.final_state, log.final_state);
        assert!((back.viewing_time - log.viewing_time).abs() < 1e-9);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(read_log("{}\n"), Err(SessionError::Log { line: 1, .. })));
        assert!(read_log("").is_err());
    }
}
