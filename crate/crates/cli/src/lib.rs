//! The `pace` command line: punchline detection, time stretching, session
//! simulation, the live session server, log replay, and study analysis.

mod commands;
mod serve;
mod tabular;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "pace", version, about = "Laugh-driven adaptive playback toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find punchlines from the laugh track of a WAV file.
    Detect(DetectArgs),
    /// Change the playback rate of a WAV file without changing its pitch.
    Stretch(StretchArgs),
    /// Run a viewing session against a simulated learner and write its log.
    Simulate(SimulateArgs),
    /// Host a live session over WebSocket.
    Serve(ServeArgs),
    /// Re-derive the decisions in a session log and check they match.
    Replay(ReplayArgs),
    /// Mann-Whitney U and Hedges' g for two samples.
    Analyze(AnalyzeArgs),
    /// Score questionnaire responses.
    Score(ScoreArgs),
    /// Split participants into score-balanced groups.
    Allocate(AllocateArgs),
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// 16-bit PCM WAV input.
    #[arg(long)]
    pub audio: PathBuf,
    /// Timeline JSON output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.6)]
    pub on: f64,
    #[arg(long, default_value_t = 0.4)]
    pub off: f64,
    /// Shortest punchline kept, in seconds.
    #[arg(long, default_value_t = 0.5)]
    pub min_dur: f64,
    /// Gaps shorter than this are bridged, in seconds.
    #[arg(long, default_value_t = 0.4)]
    pub merge_gap: f64,
}

#[derive(Debug, Args)]
pub struct StretchArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Playback rate in [0.6, 1.0].
    #[arg(long)]
    pub rate: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub timeline: PathBuf,
    /// always | never | threshold:RATE | logistic:SLOPE,MIDPOINT[,SEED]
    #[arg(long)]
    pub learner: String,
    /// Session log (JSON Lines) output.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "simulated")]
    pub session_id: String,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// TCP port; 0 picks a free one.
    #[arg(long)]
    pub port: u16,
    #[arg(long)]
    pub timeline: PathBuf,
    /// Directory for `<session_id>.jsonl`.
    #[arg(long, default_value = ".")]
    pub log_dir: PathBuf,
    /// Defaults to `session-<unix seconds>`.
    #[arg(long)]
    pub session_id: Option<String>,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub log: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlternativeArg {
    TwoSided,
    Less,
    Greater,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// One value per row; a header row is skipped.
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value_t = AlternativeArg::TwoSided)]
    pub alternative: AlternativeArg,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(subcommand)]
    pub kind: ScoreKind,
}

#[derive(Debug, Subcommand)]
pub enum ScoreKind {
    /// Ten items (1-5) per row.
    Sus { responses: PathBuf },
    /// Six subscales (0-100) per row, followed by six pairwise weights with --weighted.
    Tlx {
        responses: PathBuf,
        #[arg(long)]
        weighted: bool,
    },
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    /// One score per row.
    pub scores: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 1 on runtime failure, 2 on usage error.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Detect(a) => commands::detect(&a),
        Command::Stretch(a) => commands::stretch(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Serve(a) => serve::run(a),
        Command::Replay(a) => commands::replay(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Score(a) => commands::score(&a),
        Command::Allocate(a) => commands::allocate(&a),
    }
}
