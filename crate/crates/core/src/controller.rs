//! Punchline-driven rate controller: one step up on a laugh, one step down
//! otherwise, clamped to the configured range.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expression::PunchlineResponse;
use crate::types::{snap, Cause, PlaybackState, SpeedCommand};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub step: f64,
    pub min_rate: f64,
    pub max_rate: f64,
    pub initial_rate: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            step: 0.1,
            min_rate: 0.6,
            max_rate: 1.0,
            initial_rate: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ControllerError {
    #[error("invalid controller config {0:?}")]
    InvalidConfig(ControllerConfig),
    #[error("rate {rate} is not on the {step} grid within [{min}, {max}]")]
    OffGrid { rate: f64, step: f64, min: f64, max: f64 },
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<(), ControllerError> {
        let span_steps = (self.max_rate - self.min_rate) / self.step;
        let ok = self.step > 0.0
            && self.min_rate > 0.0
            && self.min_rate <= self.initial_rate
            && self.initial_rate <= self.max_rate
            && span_steps.is_finite()
            && (span_steps - span_steps.round()).abs() < 1e-6
            && self.grid_index(self.initial_rate).is_some();
        if ok {
            Ok(())
        } else {
            Err(ControllerError::InvalidConfig(*self))
        }
    }

    fn steps(&self) -> i64 {
        ((self.max_rate - self.min_rate) / self.step).round() as i64
    }

    /// Index of `rate` on the grid `min_rate + i * step`, if it lies on it.
    pub fn grid_index(&self, rate: f64) -> Option<i64> {
        let i = ((rate - self.min_rate) / self.step).round();
        let on_grid = (self.min_rate + i * self.step - rate).abs() < 1e-6;
        (on_grid && i >= 0.0 && (i as i64) <= self.steps()).then_some(i as i64)
    }

    pub fn grid_rate(&self, index: i64) -> f64 {
        snap(self.min_rate + index.clamp(0, self.steps()) as f64 * self.step)
    }

    /// Every rate the controller can hold, ascending.
    pub fn grid(&self) -> Vec<f64> {
        (0..=self.steps()).map(|i| self.grid_rate(i)).collect()
    }

    pub fn initial_state(&self) -> PlaybackState {
        PlaybackState::new(snap(self.initial_rate))
    }
}

/// One punchline's transition. Returns the command only when the rate moved.
pub fn step(
    state: PlaybackState,
    laughed: bool,
    cfg: &ControllerConfig,
) -> Result<(PlaybackState, Option<SpeedCommand>), ControllerError> {
    let idx = cfg.grid_index(state.rate).ok_or(ControllerError::OffGrid {
        rate: state.rate,
        step: cfg.step,
        min: cfg.min_rate,
        max: cfg.max_rate,
    })?;
    let rate = cfg.grid_rate(idx + if laughed { 1 } else { -1 });
    let next = PlaybackState {
        rate,
        punchlines_seen: state.punchlines_seen + 1,
    };
    let cmd = (rate != state.rate).then_some(SpeedCommand {
        t: 0.0,
        rate,
        cause: Cause::from_laughed(laughed),
    });
    Ok((next, cmd))
}

/// Folds [`step`] over a session. Each command is stamped with the end of the
/// punchline that triggered it.
pub fn run(
    responses: &[PunchlineResponse],
    cfg: &ControllerConfig,
) -> Result<(Vec<SpeedCommand>, PlaybackState), ControllerError> {
    cfg.validate()?;
    let mut state = cfg.initial_state();
    let mut commands = Vec::new();
    for r in responses {
        let (next, cmd) = step(state, r.laughed, cfg)?;
        if let Some(mut c) = cmd {
            c.t = r.segment.end;
            commands.push(c);
        }
        state = next;
    }
    Ok((commands, state))
}
