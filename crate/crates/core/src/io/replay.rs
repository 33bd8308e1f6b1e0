//! JSON traces of the cross-play and self-play episodes behind one estimate.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::environment::{Action, LevelGenotype, MatchConfig, MatchState, Point, StepEvent, Team};
use crate::evaluation::{episode_seed, play_episode_with, value, Phase};
use crate::policies::PolicySpec;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub players: Vec<[f64; 2]>,
    pub keepers: [[f64; 2]; 2],
    pub ball: [f64; 2],
    pub carrier: Option<usize>,
}

impl Frame {
    fn of<T: Scalar>(s: &MatchState<T>) -> Self {
        let p = |v: Point<T>| [v.x.as_f64(), v.y.as_f64()];
        Self {
            players: s.players.iter().copied().map(p).collect(),
            keepers: [p(s.keepers[0]), p(s.keepers[1])],
            ball: p(s.ball),
            carrier: s.carrier,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub actions: Vec<Action>,
    pub event: StepEvent,
    /// State after the step.
    pub frame: Frame,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOutcome {
    pub scorer: Option<Team>,
    pub own_goal: bool,
    pub end_step: usize,
    /// Value to team A.
    pub value: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub repeat: usize,
    pub episode_seed: u64,
    pub team_a: String,
    pub team_b: String,
    pub initial: Frame,
    pub steps: Vec<StepRecord>,
    pub outcome: TraceOutcome,
}

impl Trace {
    /// Own goals scored in this episode, by the conceding team.
    pub fn own_goals(&self) -> Vec<Team> {
        self.steps
            .iter()
            .filter_map(|s| match s.event {
                StepEvent::Goal { team, own_goal: true } => Some(team.opponent()),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayFile {
    pub level: Vec<f64>,
    pub reference: String,
    pub target: String,
    pub target_flaws: String,
    pub base_seed: u64,
    pub cross_play: Vec<Trace>,
    pub self_play: Vec<Trace>,
}

fn trace<T: Scalar>(
    level: &LevelGenotype<T>,
    a: &PolicySpec,
    b: &PolicySpec,
    repeat: usize,
    seed: u64,
    config: &MatchConfig<T>,
) -> Result<Trace> {
    let initial = Frame::of(&MatchState::reset(level, config));
    let mut steps = Vec::new();
    let outcome = play_episode_with(level, a, b, seed, config, |s, actions, event| {
        steps.push(StepRecord {
            step: s.step_count,
            actions: actions.to_vec(),
            event,
            frame: Frame::of(s),
        });
    })?;
    Ok(Trace {
        repeat,
        episode_seed: seed,
        team_a: a.id.clone(),
        team_b: b.id.clone(),
        initial,
        steps,
        outcome: TraceOutcome {
            scorer: outcome.scorer,
            own_goal: outcome.own_goal,
            end_step: outcome.end_step,
            value: value(&outcome, Team::A),
        },
    })
}

/// Re-runs every episode of the estimate seeded with `base_seed`.
pub fn export_replay<T: Scalar>(
    level: &LevelGenotype<T>,
    roster: &[PolicySpec],
    reference_id: &str,
    target: &PolicySpec,
    base_seed: u64,
    repeats: usize,
    config: &MatchConfig<T>,
) -> Result<ReplayFile> {
    let reference = roster
        .iter()
        .find(|p| p.id == reference_id)
        .ok_or_else(|| Error::UnknownPolicy(reference_id.into()))?;
    let mut cross_play = Vec::with_capacity(repeats);
    let mut self_play = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let seed = episode_seed(base_seed, Phase::CrossPlay, r);
        cross_play.push(trace(level, reference, target, r, seed, config)?);
    }
    for r in 0..repeats {
        let seed = episode_seed(base_seed, Phase::SelfPlay, r);
        self_play.push(trace(level, target, target, r, seed, config)?);
    }
    Ok(ReplayFile {
        level: level.coords().iter().map(|c| c.as_f64()).collect(),
        reference: reference.id.clone(),
        target: target.id.clone(),
        target_flaws: target.flaws.to_string(),
        base_seed,
        cross_play,
        self_play,
    })
}

pub fn replay_to_string(replay: &ReplayFile) -> String {
    let mut s = serde_json::to_string_pretty(replay).expect("replay is plain data");
    s.push('\n');
    s
}

pub fn parse_replay(text: &str) -> Result<ReplayFile> {
    serde_json::from_str(text).map_err(|e| Error::Malformed {
        line: e.line(),
        message: e.to_string(),
    })
}

pub fn save_replay(replay: &ReplayFile, path: &Path) -> Result<()> {
    std::fs::write(path, replay_to_string(replay))?;
    Ok(())
}

pub fn load_replay(path: &Path) -> Result<ReplayFile> {
    parse_replay(&std::fs::read_to_string(path)?)
}
