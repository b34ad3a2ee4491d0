use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::protocol::{Inbound, Role};
use super::{LiveSession, SessionConfig, SessionError, SessionLog};

/// How a simulated viewer responds to punchlines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerModel {
    Always,
    Never,
    /// Follows (and laughs) once playback is at or below `threshold_rate`.
    Threshold { threshold_rate: f64 },
    /// Laughs with probability `1 / (1 + exp(slope * (rate - midpoint_rate)))`.
    Logistic { slope: f64, midpoint_rate: f64, seed: u64 },
}

impl LearnerModel {
    fn laughs(&self, rate: f64, rng: &mut ChaCha8Rng) -> bool {
        match *self {
            LearnerModel::Always => true,
            LearnerModel::Never => false,
            LearnerModel::Threshold { threshold_rate } => rate <= threshold_rate + 1e-9,
            LearnerModel::Logistic {
                slope, midpoint_rate, ..
            } => {
                let p = 1.0 / (1.0 + (slope * (rate - midpoint_rate)).exp());
                rng.random_bool(p.clamp(0.0, 1.0))
            }
        }
    }

    fn seed(&self) -> u64 {
        match self {
            LearnerModel::Logistic { seed, .. } => *seed,
            _ => 0,
        }
    }
}

impl fmt::Display for LearnerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerModel::Always => f.write_str("always"),
            LearnerModel::Never => f.write_str("never"),
            LearnerModel::Threshold { threshold_rate } => write!(f, "threshold:{threshold_rate}"),
            LearnerModel::Logistic {
                slope,
                midpoint_rate,
                seed,
            } => write!(f, "logistic:{slope},{midpoint_rate},{seed}"),
        }
    }
}

/// `always`, `never`, `threshold:RATE`, or `logistic:SLOPE,MIDPOINT[,SEED]`.
impl FromStr for LearnerModel {
    type Err = SessionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SessionError::Learner(s.to_string());
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "always" if args.is_empty() => Ok(LearnerModel::Always),
            "never" if args.is_empty() => Ok(LearnerModel::Never),
            "threshold" => Ok(LearnerModel::Threshold {
                threshold_rate: num(args)?,
            }),
            "logistic" => {
                let parts: Vec<&str> = args.split(',').collect();
                if !(2..=3).contains(&parts.len()) {
                    return Err(bad());
                }
                let seed = match parts.get(2) {
                    Some(v) => v.trim().parse().map_err(|_| bad())?,
                    None => 0,
                };
                Ok(LearnerModel::Logistic {
                    slope: num(parts[0])?,
                    midpoint_rate: num(parts[1])?,
                    seed,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// Runs a viewing session against a simulated learner.
///
/// The learner's reaction to each punchline is sent as a manual marker at the
/// punchline midpoint, and the media clock ticks once per response window close,
/// so the resulting log replays through the same engine as a live session.
/// Wall time is the simulated viewer's elapsed watching time.
pub fn simulate(cfg: &SessionConfig, learner: &LearnerModel) -> Result<SessionLog, SessionError> {
    if let LearnerModel::Threshold { threshold_rate } = learner {
        if cfg.controller.grid_index(*threshold_rate).is_none() {
            return Err(SessionError::Learner(format!(
                "threshold {threshold_rate} is not a controller rate"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(learner.seed());
    let mut session = LiveSession::new(cfg.clone(), 0.0)?;
    let mut clock = WatchClock::default();

    session.handle_inbound(Inbound::Hello { role: Role::Player }, 0.0);
    for seg in &cfg.timeline.segments {
        let rate = session.state().rate;
        if learner.laughs(rate, &mut rng) {
            let t = (seg.start + seg.end) / 2.0;
            let now = clock.advance(t, rate);
            session.handle_inbound(Inbound::Marker { t }, now);
        }
        let close = (seg.end + cfg.laugh.lag).min(cfg.timeline.media_duration);
        // The rate in force up to the close is still `rate`; the new rate
        // starts at the punchline end, which the viewing-time fold accounts for.
        let now = clock.advance(close, rate);
        session.handle_inbound(Inbound::Tick { t: close }, now);
    }
    let end = cfg.timeline.media_duration;
    let now = clock.advance(end, session.state().rate);
    session.handle_inbound(Inbound::Tick { t: end }, now);
    let viewing = session.viewing_time();
    Ok(session.finish(viewing))
}

/// Accumulates wall time as media time advances at a given rate.
#[derive(Default)]
struct WatchClock {
    media: f64,
    wall: f64,
}

impl WatchClock {
    fn advance(&mut self, media: f64, rate: f64) -> f64 {
        if media > self.media {
            self.wall += (media - self.media) / rate;
            self.media = media;
        }
        self.wall
    }
}
