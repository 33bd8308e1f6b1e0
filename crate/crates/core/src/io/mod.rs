//! File formats: run configuration, archives, heatmaps, replays, metrics and
//! result directories.

mod archive_file;
mod config;
mod replay;

pub use archive_file::{
    archive_to_string, export_heatmap, heatmap_csv, load_archive, parse_archive, save_archive, ArchiveFile,
    FORMAT_VERSION,
};
pub use config::{apply_config, config_to_string, parse_config, parse_config_str, save_config, CONFIG_KEYS};
pub use replay::{
    export_replay, load_replay, parse_replay, replay_to_string, save_replay, Frame, ReplayFile, StepRecord, Trace,
    TraceOutcome,
};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::orchestrator::{MetricsRecord, SearchResult};
use crate::{Error, Result, Scalar};

pub const METRICS_HEADER: &str = "iteration,evaluations,mean_archive_regret,scoring_rate,coverage,qd_score";

pub fn metrics_csv(records: &[MetricsRecord]) -> String {
    let mut s = String::from(METRICS_HEADER);
    s.push('\n');
    for m in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            m.iteration, m.evaluations, m.mean_archive_regret, m.scoring_rate, m.coverage, m.qd_score
        );
    }
    s
}

pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == METRICS_HEADER => {}
        _ => {
            return Err(Error::Malformed {
                line: 1,
                message: "missing metrics header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = |what: &str| Error::Malformed {
                line: i + 1,
                message: format!("bad {what}"),
            };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(bad("field count"));
            }
            Ok(MetricsRecord {
                iteration: f[0].parse().map_err(|_| bad("iteration"))?,
                evaluations: f[1].parse().map_err(|_| bad("evaluations"))?,
                mean_archive_regret: f[2].parse().map_err(|_| bad("mean_archive_regret"))?,
                scoring_rate: f[3].parse().map_err(|_| bad("scoring_rate"))?,
                coverage: f[4].parse().map_err(|_| bad("coverage"))?,
                qd_score: f[5].parse().map_err(|_| bad("qd_score"))?,
            })
        })
        .collect()
}

/// Per-policy final mean regret and scoring rate.
pub fn policy_summary_csv<T: Scalar>(result: &SearchResult<T>) -> String {
    let mut s = String::from("policy_id,skill,mean_regret,scoring_rate,coverage\n");
    for (i, p) in result.roster.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            p.id,
            p.skill,
            result.policy_mean_regret[i],
            result.policy_scoring_rate[i],
            result.archive.coverage(Some(i))
        );
    }
    s
}

pub fn archive_file_of<T: Scalar>(result: &SearchResult<T>) -> ArchiveFile<T> {
    ArchiveFile {
        archive: result.archive.clone(),
        roster: result.roster.clone(),
        target: result.config.target(),
        seed: result.config.seed,
    }
}

/// Names of the files inside a result directory.
pub mod layout {
    pub const CONFIG: &str = "config.txt";
    pub const ARCHIVE: &str = "archive.txt";
    pub const METRICS: &str = "metrics.csv";
    pub const POLICIES: &str = "policies.csv";
    pub const PROVENANCE: &str = "provenance.json";
    pub const HEATMAPS: &str = "heatmaps";
}

/// Writes config, archive, metrics, per-policy summary, provenance and one
/// heatmap per policy into `dir`.
pub fn write_result_dir<T: Scalar>(result: &SearchResult<T>, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    save_config(&result.config, &dir.join(layout::CONFIG))?;
    let file = archive_file_of(result);
    save_archive(&file, &dir.join(layout::ARCHIVE))?;
    std::fs::write(dir.join(layout::METRICS), metrics_csv(&result.metrics))?;
    std::fs::write(dir.join(layout::POLICIES), policy_summary_csv(result))?;
    let provenance = serde_json::json!({
        "provenance": result.provenance,
        "completed": result.completed,
        "failure": result.failure,
        "iterations_completed": result.iterations_completed,
        "evaluations": result.evaluations,
        "emitter_restarts": result.emitter_restarts,
        "cell_decreases": result.cell_decreases,
    });
    std::fs::write(
        dir.join(layout::PROVENANCE),
        serde_json::to_string_pretty(&provenance).expect("plain data") + "\n",
    )?;
    write_heatmaps(&file, &dir.join(layout::HEATMAPS))?;
    Ok(())
}

pub fn write_heatmaps<T: Scalar>(file: &ArchiveFile<T>, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    file.roster.iter().map(|p| export_heatmap(file, &p.id, dir)).collect()
}
