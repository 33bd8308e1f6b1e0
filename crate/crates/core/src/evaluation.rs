//! Rollouts and regret estimation.
//!
//! The value of an episode to a team is `+1` if it scored, `-1` if it
//! conceded and `0` otherwise. The regret of the target on a level is
//! estimated as the mean cross-play value (reference as team A against the
//! target) minus the mean self-play value (target against itself).

use serde::{Deserialize, Serialize};

use crate::environment::{Action, LevelGenotype, MatchConfig, MatchState, StepEvent, Team};
use crate::policies::{act, Observation, PolicySpec};
use crate::rng::{mix, Rule, StreamRng};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutOutcome {
    pub scorer: Option<Team>,
    pub own_goal: bool,
    pub end_step: usize,
    /// Non-trivial events with the step at which they happened.
    pub events: Vec<(usize, StepEvent)>,
}

/// Value of an outcome to `perspective`.
pub fn value(outcome: &RolloutOutcome, perspective: Team) -> i8 {
    match outcome.scorer {
        Some(t) if t == perspective => 1,
        Some(_) => -1,
        None => 0,
    }
}

/// Joint action of both teams for the current state.
pub fn joint_actions<T: Scalar>(
    state: &MatchState<T>,
    team_a: &PolicySpec,
    team_b: &PolicySpec,
    episode_seed: u64,
    out: &mut Vec<Action>,
) {
    out.clear();
    for agent in 0..state.agents() {
        let spec = if state.team_of(agent) == Team::A { team_a } else { team_b };
        let mut rng = StreamRng::for_rule(episode_seed, state.step_count, Rule::Policy, agent);
        out.push(act(spec, &Observation::new(state, agent), &mut rng));
    }
}

/// Plays one episode, calling `observe` after every step with the resulting
/// state, the joint action that produced it and the step's event.
pub fn play_episode_with<T: Scalar>(
    level: &LevelGenotype<T>,
    team_a: &PolicySpec,
    team_b: &PolicySpec,
    seed: u64,
    config: &MatchConfig<T>,
    mut observe: impl FnMut(&MatchState<T>, &[Action], StepEvent),
) -> Result<RolloutOutcome> {
    let mut state = MatchState::reset(level, config);
    let mut actions = Vec::with_capacity(state.agents());
    let mut events = Vec::new();
    while !state.is_terminal() {
        joint_actions(&state, team_a, team_b, seed, &mut actions);
        let before = state.step_count;
        let event = state.step(&actions, seed, config)?;
        observe(&state, &actions, event);
        if event != StepEvent::None {
            events.push((before, event));
        }
    }
    let terminal = state.terminal.expect("loop exits on terminal");
    Ok(RolloutOutcome {
        scorer: terminal.scorer,
        own_goal: terminal.own_goal,
        end_step: state.step_count,
        events,
    })
}

pub fn play_episode<T: Scalar>(
    level: &LevelGenotype<T>,
    team_a: &PolicySpec,
    team_b: &PolicySpec,
    seed: u64,
    config: &MatchConfig<T>,
) -> Result<RolloutOutcome> {
    play_episode_with(level, team_a, team_b, seed, config, |_, _, _| {})
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    CrossPlay,
    SelfPlay,
}

/// Seed of repeat `repeat` of `phase` for an estimate started from `base_seed`.
pub fn episode_seed(base_seed: u64, phase: Phase, repeat: usize) -> u64 {
    let tag = match phase {
        Phase::CrossPlay => 0x5850,
        Phase::SelfPlay => 0x5350,
    };
    mix(&[base_seed, tag, repeat as u64])
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretEstimate<T> {
    pub level: LevelGenotype<T>,
    pub policy_index: usize,
    pub xp_mean: T,
    pub sp_mean: T,
    pub regret: T,
    pub repeats: usize,
    pub base_seed: u64,
    pub xp_values: Vec<i8>,
    pub sp_values: Vec<i8>,
}

/// Combines per-episode values into an estimate.
pub fn regret_from_values<T: Scalar>(
    level: LevelGenotype<T>,
    policy_index: usize,
    base_seed: u64,
    xp_values: Vec<i8>,
    sp_values: Vec<i8>,
) -> Result<RegretEstimate<T>> {
    if xp_values.is_empty() || xp_values.len() != sp_values.len() {
        return Err(Error::InvalidInput("cross-play and self-play need equal, non-zero repeats".into()));
    }
    let n = T::lit(xp_values.len() as f64);
    let mean = |v: &[i8]| T::lit(v.iter().map(|&x| x as i64).sum::<i64>() as f64) / n;
    let xp_mean = mean(&xp_values);
    let sp_mean = mean(&sp_values);
    Ok(RegretEstimate {
        level,
        policy_index,
        xp_mean,
        sp_mean,
        regret: xp_mean - sp_mean,
        repeats: xp_values.len(),
        base_seed,
        xp_values,
        sp_values,
    })
}

/// Estimates the target's regret on `level` against `reference`.
///
/// Cross-play puts the reference on team A (attacking `+x`) and the target on
/// team B; self-play puts the target on both sides.
pub fn estimate_regret<T: Scalar>(
    level: &LevelGenotype<T>,
    policy_index: usize,
    reference: &PolicySpec,
    target: &PolicySpec,
    repeats: usize,
    base_seed: u64,
    config: &MatchConfig<T>,
) -> Result<RegretEstimate<T>> {
    if repeats == 0 {
        return Err(Error::InvalidInput("repeats must be at least 1".into()));
    }
    let mut xp = Vec::with_capacity(repeats);
    let mut sp = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let o = play_episode(level, reference, target, episode_seed(base_seed, Phase::CrossPlay, r), config)?;
        xp.push(value(&o, Team::A));
    }
    for r in 0..repeats {
        let o = play_episode(level, target, target, episode_seed(base_seed, Phase::SelfPlay, r), config)?;
        sp.push(value(&o, Team::A));
    }
    regret_from_values(level.clone(), policy_index, base_seed, xp, sp)
}

/// Fraction of estimates whose mean cross-play value is positive.
pub fn scoring_rate<T: Scalar>(estimates: &[RegretEstimate<T>]) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::InvalidInput("scoring rate of an empty set".into()));
    }
    let scored = estimates.iter().filter(|e| e.xp_mean > T::zero()).count();
    Ok(scored as f64 / estimates.len() as f64)
}
