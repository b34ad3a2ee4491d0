use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use serde_json::json;

use pace_core::evalkit::{allocate_groups, score_sus, score_tlx, sus_band, SusResponse, TlxResponse};
use pace_core::io::{timeline_from_json, timeline_to_json};
use pace_core::laughtrack::{decode_wav, detect_punchlines, encode_wav, extract_features};
use pace_core::session::{read_log, replay as replay_log, simulate as simulate_session, write_log, LearnerModel};
use pace_core::stats::{hedges_g, mann_whitney_u, Alternative};
use pace_core::timestretch::{stretch as wsola, WsolaParams};
use pace_core::{DetectorConfig, SessionConfig, Timeline};

use crate::tabular::{column, fixed_rows};
use crate::{AllocateArgs, AlternativeArg, AnalyzeArgs, DetectArgs, ReplayArgs, ScoreArgs, ScoreKind, SimulateArgs, StretchArgs};

fn read_bytes(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub fn load_timeline(path: &Path) -> anyhow::Result<Timeline> {
    timeline_from_json(&read_text(path)?).with_context(|| format!("{}: invalid timeline", path.display()))
}

/// Writes `value` to stdout. A closed pipe (`pace ... | head`) is not an error.
pub fn print_json(value: serde_json::Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

pub fn detect(args: &DetectArgs) -> anyhow::Result<()> {
    let audio = decode_wav(&read_bytes(&args.audio)?).with_context(|| format!("{}", args.audio.display()))?;
    let cfg = DetectorConfig {
        on_threshold: args.on,
        off_threshold: args.off,
        min_duration: args.min_dur,
        merge_gap: args.merge_gap,
        ..DetectorConfig::default()
    };
    let features = extract_features(&audio, &cfg)?;
    let timeline = detect_punchlines(&features, &cfg, audio.duration())?;
    tracing::info!(segments = timeline.segments.len(), "detected punchlines");
    let text = timeline_to_json(&timeline);
    match &args.out {
        Some(out) => write(out, text + "\n"),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn stretch(args: &StretchArgs) -> anyhow::Result<()> {
    let audio = decode_wav(&read_bytes(&args.input)?).with_context(|| format!("{}", args.input.display()))?;
    let out = wsola(&audio, args.rate, &WsolaParams::default())?;
    write(&args.out, encode_wav(&out))
}

pub fn simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let learner: LearnerModel = args.learner.parse()?;
    let cfg = SessionConfig::new(args.session_id.clone(), load_timeline(&args.timeline)?);
    let log = simulate_session(&cfg, &learner)?;
    write(&args.out, write_log(&log))?;
    print_json(json!({
        "learner": learner.to_string(),
        "final_rate": log.final_state.rate,
        "punchlines_seen": log.final_state.punchlines_seen,
        "commands": log.commands().len(),
        "media_duration": cfg.timeline.media_duration,
        "viewing_time": log.viewing_time,
    }))
}

pub fn replay(args: &ReplayArgs) -> anyhow::Result<()> {
    let log = read_log(&read_text(&args.log)?).with_context(|| format!("{}", args.log.display()))?;
    let again = replay_log(&log)?;
    print_json(json!({
        "session_id": log.config.session_id,
        "decisions": again.responses().len(),
        "commands": again.commands(),
        "final_rate": again.final_state.rate,
        "viewing_time": again.viewing_time,
        "matches": true,
    }))
}

pub fn analyze(args: &AnalyzeArgs) -> anyhow::Result<()> {
    let a = column(&args.a)?;
    let b = column(&args.b)?;
    let alternative = match args.alternative {
        AlternativeArg::TwoSided => Alternative::TwoSided,
        AlternativeArg::Less => Alternative::ALess,
        AlternativeArg::Greater => Alternative::AGreater,
    };
    let mw = mann_whitney_u(&a, &b, alternative)?;
    // g is undefined for single observations or zero pooled variance.
    let g = hedges_g(&a, &b).ok();
    print_json(json!({
        "u": mw.statistic,
        "p": mw.p_value,
        "method": mw.method,
        "alternative": alternative,
        "g": g,
        "n1": mw.n1,
        "n2": mw.n2,
    }))
}

fn summary(scores: &[f64]) -> serde_json::Value {
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    json!({ "scores": scores, "mean": mean, "n": scores.len() })
}

pub fn score(args: &ScoreArgs) -> anyhow::Result<()> {
    match &args.kind {
        ScoreKind::Sus { responses } => {
            let mut scores = Vec::new();
            for (i, row) in fixed_rows(responses, 10)?.iter().enumerate() {
                if row.iter().any(|v| v.fract() != 0.0) {
                    bail!("{}: row {}: SUS items must be whole numbers", responses.display(), i + 1);
                }
                let items: Vec<i64> = row.iter().map(|&v| v as i64).collect();
                let r = SusResponse::new(&items).with_context(|| format!("{}: row {}", responses.display(), i + 1))?;
                scores.push(score_sus(&r));
            }
            let mut out = summary(&scores);
            out["band"] = json!(sus_band(out["mean"].as_f64().unwrap_or(0.0)));
            print_json(out)?;
        }
        ScoreKind::Tlx { responses, weighted } => {
            let width = if *weighted { 12 } else { 6 };
            let mut scores = Vec::new();
            for (i, row) in fixed_rows(responses, width)?.iter().enumerate() {
                let subscales: [f64; 6] = row[..6].try_into().expect("width checked");
                let weights = if *weighted {
                    let mut w = [0u8; 6];
                    for (slot, &v) in w.iter_mut().zip(&row[6..]) {
                        if v.fract() != 0.0 || !(0.0..=5.0).contains(&v) {
                            bail!("{}: row {}: weights must be whole numbers 0-5", responses.display(), i + 1);
                        }
                        *slot = v as u8;
                    }
                    Some(w)
                } else {
                    None
                };
                let r = TlxResponse::new(subscales, weights)
                    .and_then(|r| score_tlx(&r))
                    .with_context(|| format!("{}: row {}", responses.display(), i + 1))?;
                scores.push(r);
            }
            let mut out = summary(&scores);
            out["weighted"] = json!(weighted);
            print_json(out)?;
        }
    }
    Ok(())
}

pub fn allocate(args: &AllocateArgs) -> anyhow::Result<()> {
    let scores = column(&args.scores)?;
    let a = allocate_groups(&scores, args.k)?;
    let groups: Vec<serde_json::Value> = a
        .groups
        .iter()
        .map(|g| json!(g.iter().map(|&i| json!({ "row": i + 1, "score": scores[i] })).collect::<Vec<_>>()))
        .collect();
    print_json(json!({
        "k": args.k,
        "groups": groups,
        "group_means": a.group_means,
        "spread": a.spread(),
    }))
}
