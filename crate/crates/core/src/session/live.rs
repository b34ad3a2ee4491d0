use tracing::{debug, warn};

use super::protocol::{parse_inbound, Inbound, Outbound, Role, ServerMessage, Target};
use super::{viewing_time, Event, SessionConfig, SessionError, SessionEvent, SessionLog, LOG_VERSION};
use crate::controller;
use crate::expression::{
    calibrate_baseline, decide_punchline_response, detect_laugh_events, window_coverage, Baseline, LaughEvent,
    MIN_WINDOW_COVERAGE,
};
use crate::types::{AuFrame, AuSeries, PlaybackState, SpeedCommand, Timeline};

/// State of one running session. Inbound frames are applied strictly in
/// arrival order through [`LiveSession::handle_message`]; every inbound and
/// outbound message is appended to the event log.
#[derive(Debug, Clone)]
pub struct LiveSession {
    config: SessionConfig,
    series: AuSeries,
    markers: Vec<LaughEvent>,
    baseline: Option<Baseline>,
    state: PlaybackState,
    /// Next punchline awaiting its open / decision.
    next_open: usize,
    next_decision: usize,
    clock: f64,
    commands: Vec<SpeedCommand>,
    events: Vec<SessionEvent>,
    last_wall: f64,
    ended: bool,
}

impl LiveSession {
    pub fn new(config: SessionConfig, wall_time: f64) -> Result<Self, SessionError> {
        config.validate()?;
        let state = config.controller.initial_state();
        let mut session = Self {
            config,
            series: AuSeries::default(),
            markers: Vec::new(),
            baseline: None,
            state,
            next_open: 0,
            next_decision: 0,
            clock: 0.0,
            commands: Vec::new(),
            events: Vec::new(),
            last_wall: wall_time,
            ended: false,
        };
        let config = session.config.clone();
        session.log(
            wall_time,
            Event::SessionStart {
                version: LOG_VERSION,
                config,
            },
        );
        Ok(session)
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn state(&self) -> PlaybackState {
        self.state
    }

    pub fn baseline(&self) -> Option<Baseline> {
        self.baseline
    }

    pub fn events(&self) -> &[SessionEvent] {
        &self.events
    }

    pub fn commands(&self) -> &[SpeedCommand] {
        &self.commands
    }

    /// Media time of the latest tick.
    pub fn clock(&self) -> f64 {
        self.clock
    }

    /// Whether every punchline has been decided.
    pub fn finished(&self) -> bool {
        self.next_decision >= self.config.timeline.segments.len()
    }

    fn log(&mut self, wall_time: f64, event: Event) {
        // Wall time never runs backwards within a log.
        let wall_time = wall_time.max(self.last_wall);
        self.last_wall = wall_time;
        self.events.push(SessionEvent { wall_time, event });
    }

    fn warn(&mut self, now: f64, code: &str, detail: String) {
        warn!(code, %detail, "session warning");
        self.log(
            now,
            Event::Warning {
                code: code.to_string(),
                detail,
            },
        );
    }

    /// Applies one inbound frame and returns the messages to send.
    pub fn handle_message(&mut self, text: &str, now: f64) -> Vec<Outbound> {
        match parse_inbound(text) {
            Ok(msg) => self.handle_inbound(msg, now),
            Err(code) => {
                debug!(code, "rejected inbound frame");
                self.log(
                    now,
                    Event::ProtocolError {
                        code: code.to_string(),
                        raw: text.to_string(),
                    },
                );
                vec![Outbound {
                    target: Target::Sender,
                    message: ServerMessage::error(code),
                }]
            }
        }
    }

    pub fn handle_inbound(&mut self, msg: Inbound, now: f64) -> Vec<Outbound> {
        match msg {
            Inbound::Hello { role } => {
                self.log(now, Event::Hello { role });
                if role == Role::Sensor {
                    return vec![];
                }
                let reply = ServerMessage::State {
                    rate: self.state.rate,
                    punchlines_seen: self.state.punchlines_seen,
                };
                self.log(
                    now,
                    Event::State {
                        rate: self.state.rate,
                        punchlines_seen: self.state.punchlines_seen,
                    },
                );
                vec![Outbound {
                    target: Target::Sender,
                    message: reply,
                }]
            }
            Inbound::Au { t, au14 } => {
                self.ingest_au(t, au14, now);
                vec![]
            }
            Inbound::Marker { t } => {
                let marker = LaughEvent::marker(t);
                let pos = self.markers.partition_point(|m| m.start <= t);
                self.markers.insert(pos, marker);
                self.log(now, Event::LaughEvent(marker));
                vec![]
            }
            Inbound::Tick { t } => {
                self.log(now, Event::Tick { t });
                self.advance_clock(t, now)
            }
        }
    }

    fn ingest_au(&mut self, t: f64, au14: f64, now: f64) {
        if let Some(prev) = self.series.last_t() {
            if t <= prev {
                self.warn(now, "au_non_monotonic", format!("dropped frame t={t} au14={au14}, last t={prev}"));
                return;
            }
        }
        let mut frame = AuFrame::new(t, au14);
        if frame.clamp_intensity() {
            self.warn(now, "au_clamped", format!("au14={au14} at t={t} clamped to {}", frame.au14));
        }
        let stored = frame.au14;
        self.series.push(frame).expect("frame validated above");
        self.log(now, Event::AuFrame { t, au14: stored });

        if self.baseline.is_none() {
            if let Ok(b) = calibrate_baseline(&self.series, self.config.calibration_duration) {
                self.baseline = Some(b);
                self.log(now, Event::Calibrated { baseline: b });
            }
        }
    }

    fn advance_clock(&mut self, t: f64, now: f64) -> Vec<Outbound> {
        if t < self.clock {
            return vec![];
        }
        self.clock = t;
        let segments = self.config.timeline.segments.clone();
        let laugh = self.config.laugh;
        let end_of_media = t >= self.config.timeline.media_duration;

        while self.next_open < segments.len() {
            let seg = segments[self.next_open];
            if t < laugh.window(&seg).0 && !end_of_media {
                break;
            }
            self.log(
                now,
                Event::PunchlineOpen {
                    index: self.next_open,
                    segment: seg,
                },
            );
            self.next_open += 1;
        }

        let mut out = Vec::new();
        while self.next_decision < self.next_open {
            let index = self.next_decision;
            let seg = segments[index];
            if t < laugh.window(&seg).1 && !end_of_media {
                break;
            }
            self.log(now, Event::PunchlineClose { index, segment: seg });
            if let Some(cmd) = self.decide(index, now) {
                out.push(Outbound {
                    target: Target::Broadcast,
                    message: ServerMessage::Speed {
                        rate: cmd.rate,
                        t: cmd.t,
                        cause: cmd.cause,
                    },
                });
            }
            self.next_decision += 1;
        }
        out
    }

    /// Decides one punchline, steps the controller, and logs both.
    fn decide(&mut self, index: usize, now: f64) -> Option<SpeedCommand> {
        let seg = self.config.timeline.segments[index];
        let laugh = self.config.laugh;
        let (lo, hi) = laugh.window(&seg);

        let mut evidence: Vec<LaughEvent> = self.markers.iter().filter(|m| m.overlaps(lo, hi)).copied().collect();
        if !self.series.is_empty() {
            let coverage = window_coverage(&self.series, lo, hi);
            match self.baseline {
                Some(b) if coverage >= MIN_WINDOW_COVERAGE => {
                    evidence.extend(detect_laugh_events(&self.series, &b, &laugh));
                }
                Some(_) => self.warn(
                    now,
                    "au_dropout",
                    format!("punchline {index}: {:.0}% of AU frames present", coverage * 100.0),
                ),
                None => self.warn(now, "uncalibrated", format!("punchline {index}: no AU baseline yet")),
            }
        }
        evidence.sort_by(|a, b| a.start.total_cmp(&b.start));
        let single = Timeline {
            media_duration: self.config.timeline.media_duration,
            segments: vec![seg],
        };
        let response = decide_punchline_response(&single, &evidence, &laugh)[0];
        self.log(now, Event::Decision { index, response });

        let (next, cmd) =
            controller::step(self.state, response.laughed, &self.config.controller).expect("state stays on the grid");
        self.state = next;
        let cmd = cmd.map(|mut c| {
            c.t = seg.end;
            c
        });
        if let Some(c) = cmd {
            self.commands.push(c);
            self.log(now, Event::SpeedCommand { index, command: c });
        }
        cmd
    }

    pub fn viewing_time(&self) -> f64 {
        viewing_time(
            self.config.timeline.media_duration,
            self.config.controller.initial_state().rate,
            &self.commands,
        )
    }

    /// Closes the session and returns its log.
    pub fn finish(mut self, wall_time: f64) -> SessionLog {
        let viewing_time = self.viewing_time();
        if !self.ended {
            self.ended = true;
            self.log(
                wall_time,
                Event::SessionEnd {
                    final_state: self.state,
                    viewing_time,
                },
            );
        }
        SessionLog {
            config: self.config,
            events: self.events,
            final_state: self.state,
            viewing_time,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::protocol::{BAD_MESSAGE, UNKNOWN_TYPE};
    use crate::types::{Cause, PunchlineSegment};

    fn config() -> SessionConfig {
        let tl = Timeline::new(
            120.0,
            vec![
                PunchlineSegment { start: 40.0, end: 42.0 },
                PunchlineSegment { start: 80.0, end: 83.0 },
            ],
        )
        .unwrap();
        SessionConfig::new("test", tl)
    }

    fn tick(t: f64) -> String {
        format!(r#"{{"type":"tick","t":{t}}}"#)
    }

    #[test]
    fn au_during_calibration_is_silent() {
        let mut s = LiveSession::new(config(), 0.0).unwrap();
        let out = s.handle_message(r#"{"type":"au","t":5.0,"au14":0.1}"#, 0.0);
        assert!(out.is_empty());
        assert_eq!(s.series.len(), 1);
        assert!(s.baseline().is_none());
    }

    #[test]
    fn closed_window_without_laugh_slows_down() {
        let mut s = LiveSession::new(config(), 0.0).unwrap();
        assert!(s.handle_message(&tick(42.5), 1.0).is_empty());
        let out = s.handle_message(&tick(43.1), 2.0);
        assert_eq!(
            out,
            vec![Outbound {
                target: Target::Broadcast,
                message: ServerMessage::Speed {
                    rate: 0.9,
                    t: 42.0,
                    cause: Cause::NoLaugh
                }
            }]
        );
        assert_eq!(
            out[0].message.to_json(),
            r#"{"type":"speed","rate":0.9,"t":42.0,"cause":"no_laugh"}"#
        );
    }

    #[test]
    fn marker_counts_as_laugh() {
        let mut s = LiveSession::new(config(), 0.0).unwrap();
        s.handle_message(&tick(42.0), 0.0);
        s.handle_message(&tick(43.5), 0.0);
        assert_eq!(s.state().rate, 0.9);
        s.handle_message(r#"{"type":"marker","t":81.0}"#, 0.0);
        let out = s.handle_message(&tick(84.0), 0.0);
        assert_eq!(out.len(), 1);
        assert!(matches!(
            out[0].message,
            ServerMessage::Speed {
                cause: Cause::Laugh,
                ..
            }
        ));
        assert_eq!(s.state().rate, 1.0);
    }

    #[test]
    fn malformed_frames_get_error_replies() {
        let mut s = LiveSession::new(config(), 0.0).unwrap();
        let out = s.handle_message("not json", 0.0);
        assert_eq!(out[0].message.to_json(), r#"{"type":"error","code":"bad_message"}"#);
        assert_eq!(out[0].target, Target::Sender);
        let out = s.handle_message(r#"{"type":"rewind","t":1}"#, 0.0);
        assert_eq!(out[0].message, ServerMessage::error(UNKNOWN_TYPE));
        let errors: Vec<&str> = s
            .events()
            .iter()
            .filter_map(|e| match &e.event {
                Event::ProtocolError { code, .. } => Some(code.as_str()),
                _ => None,
            })
            .collect();
        assert_eq!(errors, vec![BAD_MESSAGE, UNKNOWN_TYPE]);
        // Session keeps working.
        assert!(s.handle_message(&tick(1.0), 0.0).is_empty());
    }

    #[test]
    fn non_monotonic_au_is_dropped_with_warning() {
        let mut s = LiveSession::new(config(), 0.0).unwrap();
        s.handle_message(r#"{"type":"au","t":2.0,"au14":0.1}"#, 0.0);
        s.handle_message(r#"{"type":"au","t":1.0,"au14":0.1}"#, 0.0);
        assert_eq!(s.series.len(), 1);
        assert!(s
            .events()
            .iter()
            .any(|e| matches!(&e.event, Event::Warning { code, .. } if code == "au_non_monotonic")));
    }

    #[test]
    fn out_of_range_au_is_clamped() {
        let mut s = LiveSession::new(config(), 0.0).unwrap();
        s.handle_message(r#"{"type":"au","t":2.0,"au14":9.0}"#, 0.0);
        assert_eq!(s.series.frames[0].au14, 5.0);
    }

    #[test]
    fn player_hello_gets_state() {
        let mut s = LiveSession::new(config(), 0.0).unwrap();
        let out = s.handle_message(r#"{"type":"hello","role":"player"}"#, 0.0);
        assert_eq!(out[0].message.to_json(), r#"{"type":"state","rate":1.0,"punchlines_seen":0}"#);
        assert!(s.handle_message(r#"{"type":"hello","role":"sensor"}"#, 0.0).is_empty());
    }

    fn feed_au(s: &mut LiveSession, from: f64, to: f64, value: impl Fn(f64) -> f64) {
        let mut i = (from * 30.0).round() as i64;
        while (i as f64) / 30.0 < to {
            let t = i as f64 / 30.0;
            s.handle_message(&format!(r#"{{"type":"au","t":{t},"au14":{}}}"#, value(t)), 0.0);
            i += 1;
        }
    }

    #[test]
    fn au_smile_in_window_counts_as_laugh() {
        let mut s = LiveSession::new(config(), 0.0).unwrap();
        feed_au(&mut s, 0.0, 44.0, |t| {
            let rest = if (t * 30.0).round() as i64 % 2 == 0 { 0.1 } else { 0.2 };
            if (41.0..41.6).contains(&t) {
                1.5
            } else {
                rest
            }
        });
        assert!(s.baseline().is_some());
        s.handle_message(&tick(43.5), 0.0);
        let resp = s.events().iter().find_map(|e| match &e.event {
            Event::Decision { response, .. } => Some(*response),
            _ => None,
        });
        assert!(resp.unwrap().laughed);
        assert_eq!(s.state().rate, 1.0);
        assert!(s.commands().is_empty());
    }

    #[test]
    fn dropout_errs_toward_slowing_down() {
        let mut s = LiveSession::new(config(), 0.0).unwrap();
        feed_au(&mut s, 0.0, 39.0, |_| 0.1);
        // Sensor goes quiet over the window; a lone smile frame arrives.
        s.handle_message(r#"{"type":"au","t":41.0,"au14":3.0}"#, 0.0);
        s.handle_message(&tick(43.5), 0.0);
        assert_eq!(s.state().rate, 0.9);
        assert!(s
            .events()
            .iter()
            .any(|e| matches!(&e.event, Event::Warning { code, .. } if code == "au_dropout")));
    }

    #[test]
    fn end_of_media_closes_remaining_windows() {
        let tl = Timeline::new(60.0, vec![PunchlineSegment { start: 58.0, end: 59.8 }]).unwrap();
        let mut s = LiveSession::new(SessionConfig::new("eom", tl), 0.0).unwrap();
        let out = s.handle_message(&tick(60.0), 0.0);
        assert_eq!(out.len(), 1);
        assert!(s.finished());
    }

    #[test]
    fn wall_time_never_decreases() {
        let mut s = LiveSession::new(config(), 10.0).unwrap();
        s.handle_message(&tick(1.0), 5.0);
        s.handle_message(&tick(2.0), 12.0);
        let walls: Vec<f64> = s.events().iter().map(|e| e.wall_time).collect();
        assert!(walls.windows(2).all(|w| w[0] <= w[1]), "{walls:?}");
    }
}
