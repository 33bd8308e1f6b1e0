use serde::{Deserialize, Serialize};

use super::Point;
use crate::{Error, Result, Scalar};

/// Discrete per-agent action. Directions are absolute (`N` is `+y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Idle,
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
    Pass,
    Shoot,
}

impl Action {
    pub const COUNT: usize = 11;

    pub const ALL: [Action; Action::COUNT] = [
        Action::Idle,
        Action::N,
        Action::NE,
        Action::E,
        Action::SE,
        Action::S,
        Action::SW,
        Action::W,
        Action::NW,
        Action::Pass,
        Action::Shoot,
    ];

    pub const MOVES: [Action; 8] = [
        Action::N,
        Action::NE,
        Action::E,
        Action::SE,
        Action::S,
        Action::SW,
        Action::W,
        Action::NW,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Action> {
        Action::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidAction(format!("index {i} out of range 0..{}", Action::COUNT)))
    }

    /// Unit direction for movement actions.
    pub fn direction<T: Scalar>(self) -> Option<Point<T>> {
        let d = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        let (o, l) = (T::zero(), T::one());
        let v = match self {
            Action::N => Point::new(o, l),
            Action::NE => Point::new(d, d),
            Action::E => Point::new(l, o),
            Action::SE => Point::new(d, -d),
            Action::S => Point::new(o, -l),
            Action::SW => Point::new(-d, -d),
            Action::W => Point::new(-l, o),
            Action::NW => Point::new(-d, d),
            Action::Idle | Action::Pass | Action::Shoot => return None,
        };
        Some(v)
    }

    /// Direction rotated by 180 degrees; non-movement actions are unchanged.
    pub fn rotated(self) -> Action {
        match self {
            Action::N => Action::S,
            Action::NE => Action::SW,
            Action::E => Action::W,
            Action::SE => Action::NW,
            Action::S => Action::N,
            Action::SW => Action::NE,
            Action::W => Action::E,
            Action::NW => Action::SE,
            other => other,
        }
    }

    /// Compass move whose direction is closest to `v`; `Idle` for a zero vector.
    pub fn toward<T: Scalar>(v: Point<T>) -> Action {
        if v.x == T::zero() && v.y == T::zero() {
            return Action::Idle;
        }
        let angle = v.y.as_f64().atan2(v.x.as_f64());
        // E = 0, NE = 1, ... counter-clockwise in octants
        let octant = ((angle / std::f64::consts::FRAC_PI_4).round() as i64).rem_euclid(8);
        [
            Action::E,
            Action::NE,
            Action::N,
            Action::NW,
            Action::W,
            Action::SW,
            Action::S,
            Action::SE,
        ][octant as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip_and_range() {
        for (i, a) in Action::ALL.iter().enumerate() {
            assert_eq!(a.index(), i);
            assert_eq!(Action::from_index(i).unwrap(), *a);
        }
        assert!(matches!(Action::from_index(11), Err(Error::InvalidAction(_))));
    }

    #[test]
    fn toward_picks_nearest_octant() {
        assert_eq!(Action::toward(Point::new(1.0, 0.1)), Action::E);
        assert_eq!(Action::toward(Point::new(-1.0, -1.0)), Action::SW);
        assert_eq!(Action::toward(Point::new(0.0, 2.0)), Action::N);
        assert_eq!(Action::toward(Point::new(0.0f64, 0.0)), Action::Idle);
        for a in Action::MOVES {
            let d: Point<f64> = a.direction().unwrap();
            assert_eq!(Action::toward(d), a);
            assert_eq!(a.rotated().rotated(), a);
        }
    }
}
