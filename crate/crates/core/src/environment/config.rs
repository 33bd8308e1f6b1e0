use crate::{Error, Result, Scalar};

/// Pitch geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec<T> {
    pub x_extent: (T, T),
    pub y_extent: (T, T),
    /// Coordinate sampling ranges for procedurally generated levels.
    pub x_sample: (T, T),
    pub y_sample: (T, T),
    pub goal_mouth_half_height: T,
    pub keeper_home_x: T,
    /// Keepers never leave `|y| <= keeper_y_limit`.
    pub keeper_y_limit: T,
    /// Radius around the opponent goal centre inside which a carrier counts
    /// as being in shooting range.
    pub shot_zone_radius: T,
}

impl<T: Scalar> Default for FieldSpec<T> {
    fn default() -> Self {
        Self {
            x_extent: (T::lit(-1.0), T::lit(1.0)),
            y_extent: (T::lit(-0.42), T::lit(0.42)),
            x_sample: (T::lit(-0.9), T::lit(0.9)),
            y_sample: (T::lit(-0.4), T::lit(0.4)),
            goal_mouth_half_height: T::lit(0.10),
            keeper_home_x: T::lit(0.95),
            keeper_y_limit: T::lit(0.12),
            shot_zone_radius: T::lit(0.3),
        }
    }
}

/// Match rules and dynamics constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchConfig<T> {
    pub field: FieldSpec<T>,
    /// Players per team, goalkeeper included.
    pub team_size: usize,
    pub episode_length: usize,
    pub offsides_enabled: bool,
    pub end_on_score: bool,
    pub end_on_out_of_play: bool,
    pub end_on_possession_change: bool,
    pub move_speed: T,
    pub carrier_speed: T,
    pub pass_speed: T,
    pub shot_speed: T,
    pub keeper_speed: T,
    pub capture_radius: T,
    pub intercept_radius: T,
    pub keeper_block_radius: T,
    pub intercept_prob: f64,
    pub tackle_prob: f64,
}

impl<T: Scalar> Default for MatchConfig<T> {
    fn default() -> Self {
        Self {
            field: FieldSpec::default(),
            team_size: 5,
            episode_length: 128,
            offsides_enabled: true,
            end_on_score: true,
            end_on_out_of_play: false,
            end_on_possession_change: false,
            move_speed: T::lit(0.02),
            carrier_speed: T::lit(0.01),
            pass_speed: T::lit(0.06),
            shot_speed: T::lit(0.08),
            keeper_speed: T::lit(0.01),
            capture_radius: T::lit(0.03),
            intercept_radius: T::lit(0.025),
            keeper_block_radius: T::lit(0.09),
            intercept_prob: 0.5,
            tackle_prob: 0.25,
        }
    }
}

impl<T: Scalar> MatchConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: &str| {
            Err(Error::ConfigKey {
                key: key.to_string(),
                message: msg.to_string(),
            })
        };
        if self.team_size < 2 {
            return bad("team_size", "must be at least 2");
        }
        if self.episode_length == 0 {
            return bad("episode_length", "must be positive");
        }
        let positive = [
            ("move_speed", self.move_speed),
            ("carrier_speed", self.carrier_speed),
            ("pass_speed", self.pass_speed),
            ("shot_speed", self.shot_speed),
            ("keeper_speed", self.keeper_speed),
            ("capture_radius", self.capture_radius),
            ("intercept_radius", self.intercept_radius),
            ("keeper_block_radius", self.keeper_block_radius),
        ];
        for (k, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return bad(k, "must be positive");
            }
        }
        for (k, p) in [("intercept_prob", self.intercept_prob), ("tackle_prob", self.tackle_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(k, "must lie in [0, 1]");
            }
        }
        let f = &self.field;
        let half = (f.y_extent.1 - f.y_extent.0) * T::half();
        if !(f.goal_mouth_half_height < half) {
            return bad("goal_mouth_half_height", "must be below the pitch half-height");
        }
        Ok(())
    }

    /// Outfield players per team.
    pub fn outfield(&self) -> usize {
        self.team_size - 1
    }
}
