//! Questionnaire scoring (SUS, NASA-TLX), quiz scoring, and score-balanced
//! group allocation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("SUS needs exactly 10 items, got {0}")]
    SusLength(usize),
    #[error("SUS item {index} = {value} outside 1..=5")]
    SusItemRange { index: usize, value: i64 },
    #[error("TLX subscale {name} = {value} outside [0, 100]")]
    TlxRange { name: &'static str, value: f64 },
    #[error("TLX weights sum to {0}, expected 15")]
    TlxWeights(i64),
    #[error("cannot split {n} participants into {k} groups")]
    TooManyGroups { n: usize, k: usize },
    #[error("answers ({answers}) and key ({key}) differ in length")]
    QuizLength { answers: usize, key: usize },
    #[error("quiz is empty")]
    EmptyQuiz,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SusResponse {
    items: [u8; 10],
}

impl SusResponse {
    pub fn new(items: &[i64]) -> Result<Self, EvalError> {
        if items.len() != 10 {
            return Err(EvalError::SusLength(items.len()));
        }
        let mut out = [0u8; 10];
        for (i, &v) in items.iter().enumerate() {
            if !(1..=5).contains(&v) {
                return Err(EvalError::SusItemRange { index: i + 1, value: v });
            }
            out[i] = v as u8;
        }
        Ok(Self { items: out })
    }

    pub fn items(&self) -> &[u8; 10] {
        &self.items
    }
}

/// 0–100. Odd items (positively worded) contribute `item - 1`, even items
/// `5 - item`; the sum is scaled by 2.5.
pub fn score_sus(r: &SusResponse) -> f64 {
    let raw: u32 = r
        .items
        .iter()
        .enumerate()
        .map(|(i, &v)| if i % 2 == 0 { v as u32 - 1 } else { 5 - v as u32 })
        .sum();
    raw as f64 * 2.5
}

/// Conventional adjective band for a SUS score. Informational only.
pub fn sus_band(score: f64) -> &'static str {
    match score {
        s if s >= 85.5 => "Excellent",
        s if s >= 71.1 => "Good",
        s if s >= 50.9 => "OK",
        s if s >= 35.7 => "Poor",
        _ => "Awful",
    }
}

pub const TLX_SUBSCALES: [&str; 6] = ["mental", "physical", "temporal", "performance", "effort", "frustration"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TlxResponse {
    pub subscales: [f64; 6],
    /// Tallies from the 15 pairwise comparisons, if collected.
    pub weights: Option<[u8; 6]>,
}

impl TlxResponse {
    pub fn new(subscales: [f64; 6], weights: Option<[u8; 6]>) -> Result<Self, EvalError> {
        for (name, &v) in TLX_SUBSCALES.iter().zip(&subscales) {
            if !(0.0..=100.0).contains(&v) {
                return Err(EvalError::TlxRange { name, value: v });
            }
        }
        if let Some(w) = weights {
            let sum: i64 = w.iter().map(|&x| x as i64).sum();
            if sum != 15 {
                return Err(EvalError::TlxWeights(sum));
            }
        }
        Ok(Self { subscales, weights })
    }
}

/// Raw TLX (mean of subscales) without weights, `sum(w * s) / 15` with them.
pub fn score_tlx(r: &TlxResponse) -> Result<f64, EvalError> {
    match r.weights {
        None => Ok(r.subscales.iter().sum::<f64>() / 6.0),
        Some(w) => {
            let sum: i64 = w.iter().map(|&x| x as i64).sum();
            if sum != 15 {
                return Err(EvalError::TlxWeights(sum));
            }
            Ok(r.subscales.iter().zip(&w).map(|(s, &wi)| s * wi as f64).sum::<f64>() / 15.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAssignment {
    /// Participant indices per group.
    pub groups: Vec<Vec<usize>>,
    pub group_means: Vec<f64>,
}

impl GroupAssignment {
    fn from_groups(groups: Vec<Vec<usize>>, scores: &[f64]) -> Self {
        let group_means = groups
            .iter()
            .map(|g| g.iter().map(|&i| scores[i]).sum::<f64>() / g.len() as f64)
            .collect();
        Self { groups, group_means }
    }

    /// Largest minus smallest group mean.
    pub fn spread(&self) -> f64 {
        let max = self.group_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.group_means.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

fn check_groups(n: usize, k: usize) -> Result<(), EvalError> {
    if k == 0 || k > n {
        Err(EvalError::TooManyGroups { n, k })
    } else {
        Ok(())
    }
}

fn descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Serpentine (snake) draft: deal participants in descending score order to
/// groups 1..k, then k..1, and so on.
pub fn allocate_groups(scores: &[f64], k: usize) -> Result<GroupAssignment, EvalError> {
    check_groups(scores.len(), k)?;
    let mut groups = vec![Vec::new(); k];
    for (pos, idx) in descending(scores).into_iter().enumerate() {
        let lap = pos / k;
        let slot = pos % k;
        let g = if lap.is_multiple_of(2) { slot } else { k - 1 - slot };
        groups[g].push(idx);
    }
    Ok(GroupAssignment::from_groups(groups, scores))
}

/// Plain round-robin over the descending order; the baseline serpentine improves on.
pub fn allocate_round_robin(scores: &[f64], k: usize) -> Result<GroupAssignment, EvalError> {
    check_groups(scores.len(), k)?;
    let mut groups = vec![Vec::new(); k];
    for (pos, idx) in descending(scores).into_iter().enumerate() {
        groups[pos % k].push(idx);
    }
    Ok(GroupAssignment::from_groups(groups, scores))
}

/// Fraction of answers matching the key.
pub fn score_quiz<T: PartialEq>(answers: &[T], key: &[T]) -> Result<f64, EvalError> {
    if answers.len() != key.len() {
        return Err(EvalError::QuizLength {
            answers: answers.len(),
            key: key.len(),
        });
    }
    if key.is_empty() {
        return Err(EvalError::EmptyQuiz);
    }
    let hits = answers.iter().zip(key).filter(|(a, k)| a == k).count();
    Ok(hits as f64 / key.len() as f64)
}

/// TOEIC scores of the 20 participants in the four groups of the original
/// viewing study, as published (groups A–D, five each).
pub const STUDY_TOEIC_SCORES: [f64; 20] = [
    565.0, 635.0, 700.0, 755.0, 855.0, //
    550.0, 690.0, 755.0, 760.0, 815.0, //
    590.0, 670.0, 730.0, 790.0, 845.0, //
    550.0, 670.0, 680.0, 785.0, 880.0,
];

/// Spread of the published group means (725 - 702).
pub const STUDY_GROUP_SPREAD: f64 = 23.0;
