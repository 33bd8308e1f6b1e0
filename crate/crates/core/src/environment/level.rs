use rand::Rng;
use rand_distr::StandardNormal;

use super::{FieldSpec, Point};
use crate::scalar::quantize;
use crate::{Error, Result, Scalar};

/// Starting coordinates of every outfield player and the ball.
///
/// Layout: `(x, y)` pairs for team A's outfield players, then team B's, then
/// the ball. With `K` players per team the vector has `2 * (2 * (K - 1) + 1)`
/// entries.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGenotype<T> {
    coords: Vec<T>,
}

/// Genotype length for a team size, goalkeeper included.
pub fn genotype_len(team_size: usize) -> usize {
    2 * (2 * (team_size - 1) + 1)
}

impl<T: Scalar> LevelGenotype<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        let n = coords.len();
        // n = 2 * (2m + 1) with m >= 1
        if n < 6 || n % 4 != 2 {
            return Err(Error::InvalidGenotype {
                got: n,
                expected: genotype_len(5),
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("genotype contains non-finite coordinate".into()));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Players per team, goalkeeper included.
    pub fn team_size(&self) -> usize {
        (self.coords.len() / 2 - 1) / 2 + 1
    }

    pub fn player(&self, i: usize) -> Point<T> {
        Point::new(self.coords[2 * i], self.coords[2 * i + 1])
    }

    pub fn ball(&self) -> Point<T> {
        let n = self.coords.len();
        Point::new(self.coords[n - 2], self.coords[n - 1])
    }

    /// Ball position, the archive descriptor of the level.
    pub fn descriptor(&self) -> (T, T) {
        let b = self.ball();
        (b.x, b.y)
    }

    /// Clamps every coordinate into the pitch and rounds to storage precision.
    pub fn projected(mut self, field: &FieldSpec<T>) -> Self {
        for (i, v) in self.coords.iter_mut().enumerate() {
            let (lo, hi) = if i % 2 == 0 { field.x_extent } else { field.y_extent };
            *v = quantize(v.clamp_to(lo, hi));
        }
        self
    }

    /// Same level under a 180 degree rotation of the pitch with the team
    /// roles swapped.
    pub fn rotated(&self) -> Self {
        let m = (self.team_size() - 1) * 2;
        let half = m / 2;
        let mut coords = Vec::with_capacity(self.coords.len());
        for i in (half..m).chain(0..half).chain(m..m + 1) {
            let p = self.player(i);
            coords.push(-p.x);
            coords.push(-p.y);
        }
        Self { coords }
    }
}

/// Ball position of a raw coordinate vector.
pub fn level_descriptor<T: Scalar>(coords: &[T]) -> Result<(T, T)> {
    let level = LevelGenotype::new(coords.to_vec())?;
    Ok(level.descriptor())
}

/// Uniformly sampled level. Coordinates are drawn pairwise `(x, y)` in layout order.
pub fn random_level<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    team_size: usize,
    field: &FieldSpec<T>,
) -> Result<LevelGenotype<T>> {
    if team_size < 2 {
        return Err(Error::InvalidConfig(format!("team size {team_size} < 2")));
    }
    let n = genotype_len(team_size);
    let (xl, xh) = (field.x_sample.0.as_f64(), field.x_sample.1.as_f64());
    let (yl, yh) = (field.y_sample.0.as_f64(), field.y_sample.1.as_f64());
    let mut coords = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let x = xl + (xh - xl) * rng.random::<f64>();
        let y = yl + (yh - yl) * rng.random::<f64>();
        coords.push(quantize(T::lit(x)));
        coords.push(quantize(T::lit(y)));
    }
    Ok(LevelGenotype { coords })
}

/// Adds independent `N(0, sigma^2)` noise to every coordinate, then clamps to
/// the pitch.
pub fn mutate_level<T: Scalar, R: Rng + ?Sized>(
    level: &LevelGenotype<T>,
    sigma: T,
    rng: &mut R,
    field: &FieldSpec<T>,
) -> LevelGenotype<T> {
    if sigma == T::zero() {
        return level.clone();
    }
    let coords = level
        .coords
        .iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            v + sigma * T::lit(z)
        })
        .collect();
    LevelGenotype { coords }.projected(field)
}
