use std::fmt;

use super::protocol::Inbound;
use super::{Event, LiveSession, SessionError, SessionLog, LOG_VERSION};
use crate::expression::LaughSource;

/// First point where a replayed log disagrees with the original.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    /// Position in the original log's event list, or its length when the
    /// original ran out of decisions first.
    pub event_index: usize,
    pub kind: &'static str,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "event #{} ({}): logged {}, re-derived {}",
            self.event_index,
            self.kind,
            self.expected.as_deref().unwrap_or("nothing"),
            self.actual.as_deref().unwrap_or("nothing"),
        )
    }
}

fn is_outcome(e: &Event) -> bool {
    matches!(e, Event::Decision { .. } | Event::SpeedCommand { .. })
}

fn payload(e: &Event) -> String {
    serde_json::to_string(e).expect("event serializes")
}

/// Re-runs the engine over the logged inputs (hello, AU frames, markers, ticks)
/// and checks that every decision and speed command comes out identical.
pub fn replay(log: &SessionLog) -> Result<SessionLog, SessionError> {
    for e in &log.events {
        if let Event::SessionStart { version, .. } = e.event {
            if version != LOG_VERSION {
                return Err(SessionError::UnsupportedVersion(version));
            }
        }
    }
    let start_wall = log.events.first().map_or(0.0, |e| e.wall_time);
    let mut session = LiveSession::new(log.config.clone(), start_wall)?;
    let mut end_wall = start_wall;
    for e in &log.events {
        end_wall = e.wall_time;
        let msg = match &e.event {
            Event::Hello { role } => Inbound::Hello { role: *role },
            Event::AuFrame { t, au14 } => Inbound::Au { t: *t, au14: *au14 },
            Event::LaughEvent(ev) if ev.source == LaughSource::Marker => Inbound::Marker { t: ev.start },
            Event::Tick { t } => Inbound::Tick { t: *t },
            _ => continue,
        };
        session.handle_inbound(msg, e.wall_time);
    }
    let replayed = session.finish(end_wall);

    let original: Vec<(usize, &Event)> = log
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| is_outcome(&e.event))
        .map(|(i, e)| (i, &e.event))
        .collect();
    let derived: Vec<&Event> = replayed.events.iter().map(|e| &e.event).filter(|e| is_outcome(e)).collect();

    for k in 0..original.len().max(derived.len()) {
        let before = original.get(k);
        let after = derived.get(k);
        if before.map(|(_, e)| *e) != after.copied() {
            return Err(SessionError::Diverged(Box::new(Divergence {
                event_index: before.map_or(log.events.len(), |(i, _)| *i),
                kind: before.map_or_else(|| after.map_or("none", |e| e.kind()), |(_, e)| e.kind()),
                expected: before.map(|(_, e)| payload(e)),
                actual: after.map(|e| payload(e)),
            })));
        }
    }
    Ok(replayed)
}
