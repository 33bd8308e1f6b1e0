//! The parameterized two-team football game ("MiniPitch").
//!
//! A [`LevelGenotype`] fixes the starting coordinates of every outfield player
//! and the ball; [`MatchState::reset`] instantiates the game from it and
//! [`MatchState::step`] advances it one tick under the joint action.

mod action;
mod config;
mod level;
mod state;

pub use action::Action;
pub use config::{FieldSpec, MatchConfig};
pub use level::{genotype_len, level_descriptor, mutate_level, random_level, LevelGenotype};
pub use state::{Flight, FlightKind, MatchState, StepEvent, Terminal};

use serde::{Deserialize, Serialize};

use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn dist2(self, o: Self) -> T {
        let d = self - o;
        d.x * d.x + d.y * d.y
    }

    pub fn norm(self) -> T {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    /// Unit vector, or zero for the zero vector.
    pub fn unit(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self.scale(n.recip())
        } else {
            Self::zero()
        }
    }

    /// Distance from `self` to the segment `a`-`b`.
    pub fn dist_to_segment(self, a: Self, b: Self) -> T {
        let ab = b - a;
        let len2 = ab.x * ab.x + ab.y * ab.y;
        if len2 <= T::zero() {
            return self.dist(a);
        }
        let ap = self - a;
        let t = ((ap.x * ab.x + ap.y * ab.y) / len2).clamp_to(T::zero(), T::one());
        self.dist(a + ab.scale(t))
    }
}

impl<T: Scalar> std::ops::Add for Point<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> std::ops::Sub for Point<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

/// Team A defends the goal at `x = -1` and attacks `x = +1`; team B the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Team {
    A,
    B,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::A => Team::B,
            Team::B => Team::A,
        }
    }

    /// `+1` if the team attacks toward positive x.
    pub fn sign(self) -> i8 {
        match self {
            Team::A => 1,
            Team::B => -1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Team::A => 0,
            Team::B => 1,
        }
    }
}
