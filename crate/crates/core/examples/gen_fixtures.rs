//! Regenerates the files under `crates/core/fixtures/`.
//!
//!     cargo run -p pace-core --example gen_fixtures

use std::fs;
use std::path::Path;

use pace_core::io::{timeline_to_json, write_au_csv};
use pace_core::synth::{au_fixture, demo_timeline, FIXTURE_LABELS, FIXTURE_SEED};

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&dir)?;
    let timeline = demo_timeline();
    fs::write(dir.join("demo_timeline.json"), timeline_to_json(&timeline) + "\n")?;

    let fx = au_fixture(&timeline, &FIXTURE_LABELS, FIXTURE_SEED);
    fs::write(dir.join("au14_sample.csv"), write_au_csv(&fx.series))?;
    fs::write(
        dir.join("au14_sample_labels.json"),
        serde_json::to_string(&fx.understood).unwrap() + "\n",
    )?;

    fs::write(dir.join("sus_all3.csv"), "3,3,3,3,3,3,3,3,3,3\n")?;
    fs::write(
        dir.join("sus_responses.csv"),
        "q1,q2,q3,q4,q5,q6,q7,q8,q9,q10\n5,1,5,1,5,1,5,1,5,1\n4,2,4,2,4,2,4,2,4,2\n3,3,3,3,3,3,3,3,3,3\n",
    )?;
    fs::write(
        dir.join("tlx_responses.csv"),
        "mental,physical,temporal,performance,effort,frustration\n60,20,40,30,50,10\n0,0,0,0,0,0\n",
    )?;
    fs::write(
        dir.join("tlx_weighted.csv"),
        "mental,physical,temporal,performance,effort,frustration,w_mental,w_physical,w_temporal,w_performance,w_effort,w_frustration\n40,40,40,40,40,40,5,4,3,2,1,0\n60,20,40,30,50,10,5,0,3,2,4,1\n",
    )?;
    let toeic: String = pace_core::evalkit::STUDY_TOEIC_SCORES
        .iter()
        .map(|s| format!("{s}\n"))
        .collect();
    fs::write(dir.join("toeic_scores.csv"), format!("toeic\n{toeic}"))?;
    fs::write(dir.join("sample_a.csv"), "1\n2\n3\n")?;
    fs::write(dir.join("sample_b.csv"), "4\n5\n6\n")?;
    println!("wrote fixtures to {}", dir.display());
    Ok(())
}
