//! Scripted decentralized policies.
//!
//! Reference policies form a skill ladder plus three heuristic bots; the target
//! policy plays at full skill but carries implanted decision flaws that the
//! level search is expected to expose.

mod behavior;
mod observation;

pub use behavior::act;
pub use observation::Observation;

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Ladder,
    BotEasy,
    BotMedium,
    BotHard,
    Target,
}

impl PolicyKind {
    pub fn is_bot(self) -> bool {
        matches!(self, PolicyKind::BotEasy | PolicyKind::BotMedium | PolicyKind::BotHard)
    }

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Ladder => "ladder",
            PolicyKind::BotEasy => "bot_easy",
            PolicyKind::BotMedium => "bot_medium",
            PolicyKind::BotHard => "bot_hard",
            PolicyKind::Target => "target",
        }
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ladder" => PolicyKind::Ladder,
            "bot_easy" => PolicyKind::BotEasy,
            "bot_medium" => PolicyKind::BotMedium,
            "bot_hard" => PolicyKind::BotHard,
            "target" => PolicyKind::Target,
            other => return Err(Error::InvalidInput(format!("unknown policy kind `{other}`"))),
        })
    }
}

/// Decision flaws; each overrides one rule of the behaviour skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Flaws {
    /// Passes without checking whether the receiver is offside.
    pub blind_pass: bool,
    /// Under pressure deep in its own half, turns and shoots at its own goal.
    pub own_goal_zone: bool,
    /// Shoots from any angle once close to the goal line.
    pub narrow_angle_shot: bool,
    /// Defenders run straight at the carrier instead of cutting off its path.
    pub sprint_only_defense: bool,
    /// Waits a few steps inside shooting range before shooting.
    pub hesitation: bool,
}

impl Flaws {
    pub const NAMES: [&'static str; 5] = [
        "blind_pass",
        "own_goal_zone",
        "narrow_angle_shot",
        "sprint_only_defense",
        "hesitation",
    ];

    pub fn all() -> Self {
        Self {
            blind_pass: true,
            own_goal_zone: true,
            narrow_angle_shot: true,
            sprint_only_defense: true,
            hesitation: true,
        }
    }

    pub fn none() -> Self {
        Self::default()
    }

    fn flags(&self) -> [bool; 5] {
        [
            self.blind_pass,
            self.own_goal_zone,
            self.narrow_angle_shot,
            self.sprint_only_defense,
            self.hesitation,
        ]
    }

    fn flag_mut(&mut self, name: &str) -> Option<&mut bool> {
        Some(match name {
            "blind_pass" => &mut self.blind_pass,
            "own_goal_zone" => &mut self.own_goal_zone,
            "narrow_angle_shot" => &mut self.narrow_angle_shot,
            "sprint_only_defense" => &mut self.sprint_only_defense,
            "hesitation" => &mut self.hesitation,
            _ => return None,
        })
    }

    pub fn is_empty(&self) -> bool {
        !self.flags().iter().any(|&f| f)
    }
}

/// Comma-separated flag names, `none`, or `all`.
impl fmt::Display for Flaws {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        let names: Vec<_> = Self::NAMES
            .iter()
            .zip(self.flags())
            .filter(|(_, on)| *on)
            .map(|(n, _)| *n)
            .collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for Flaws {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "none" | "" => return Ok(Self::none()),
            "all" => return Ok(Self::all()),
            _ => {}
        }
        let mut flaws = Self::none();
        for name in s.split(',').map(str::trim) {
            match flaws.flag_mut(name) {
                Some(flag) => *flag = true,
                None => return Err(Error::InvalidInput(format!("unknown flaw `{name}`"))),
            }
        }
        Ok(flaws)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Probability of following the scripted decision rather than a uniformly
    /// random action.
    pub skill: f64,
    pub flaws: Flaws,
    pub id: String,
}

impl PolicySpec {
    pub fn target(flaws: Flaws) -> Self {
        Self {
            kind: PolicyKind::Target,
            skill: 1.0,
            flaws,
            id: "target".into(),
        }
    }
}

/// `n_ladder` rungs with skills `k / (n_ladder + 1)`, optionally followed by
/// the easy, medium and hard bots.
pub fn build_reference_ladder(n_ladder: usize, include_bots: bool) -> Result<Vec<PolicySpec>> {
    if n_ladder == 0 {
        return Err(Error::InvalidConfig("reference ladder needs at least one rung".into()));
    }
    let mut specs: Vec<PolicySpec> = (1..=n_ladder)
        .map(|k| PolicySpec {
            kind: PolicyKind::Ladder,
            skill: k as f64 / (n_ladder + 1) as f64,
            flaws: Flaws::none(),
            id: format!("ladder_{k:02}"),
        })
        .collect();
    if include_bots {
        for (kind, skill) in [
            (PolicyKind::BotEasy, 0.05),
            (PolicyKind::BotMedium, 0.5),
            (PolicyKind::BotHard, 0.95),
        ] {
            specs.push(PolicySpec {
                kind,
                skill,
                flaws: Flaws::none(),
                id: kind.name().to_string(),
            });
        }
    }
    Ok(specs)
}
