//! Elitist grid archive with one sub-grid per reference policy.

use rand::Rng;

use crate::environment::LevelGenotype;
use crate::{Error, Result, Scalar};

/// Discretization of descriptor space, shared by every policy sub-grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub x_bins: usize,
    pub y_bins: usize,
    pub x_range: (T, T),
    pub y_range: (T, T),
    pub policy_count: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(policy_count: usize) -> Self {
        Self {
            x_bins: 16,
            y_bins: 10,
            x_range: (T::lit(-1.0), T::lit(1.0)),
            y_range: (T::lit(-0.42), T::lit(0.42)),
            policy_count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.x_bins == 0 || self.y_bins == 0 || self.policy_count == 0 {
            return Err(Error::InvalidConfig("grid dimensions must be positive".into()));
        }
        if !(self.x_range.0 < self.x_range.1) || !(self.y_range.0 < self.y_range.1) {
            return Err(Error::InvalidConfig("grid ranges must be non-degenerate".into()));
        }
        Ok(())
    }

    /// Cells per policy.
    pub fn cells(&self) -> usize {
        self.x_bins * self.y_bins
    }

    pub fn total_cells(&self) -> usize {
        self.cells() * self.policy_count
    }

    fn flat(&self, key: CellKey) -> usize {
        key.policy_index * self.cells() + key.y_bin * self.x_bins + key.x_bin
    }

    fn key_of(&self, flat: usize) -> CellKey {
        let c = self.cells();
        let rem = flat % c;
        CellKey {
            policy_index: flat / c,
            x_bin: rem % self.x_bins,
            y_bin: rem / self.x_bins,
        }
    }

    pub fn contains(&self, key: CellKey) -> bool {
        key.policy_index < self.policy_count && key.x_bin < self.x_bins && key.y_bin < self.y_bins
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub policy_index: usize,
    pub x_bin: usize,
    pub y_bin: usize,
}

fn bin<T: Scalar>(v: T, (lo, hi): (T, T), bins: usize) -> usize {
    let t = ((v - lo) / (hi - lo) * T::lit(bins as f64)).floor();
    if t <= T::zero() {
        0
    } else {
        t.to_usize().unwrap_or(usize::MAX).min(bins - 1)
    }
}

/// Cell holding `descriptor` in the sub-grid of `policy_index`. Values outside
/// the grid ranges clamp to the edge bins.
pub fn cell_index<T: Scalar>(descriptor: (T, T), spec: &GridSpec<T>, policy_index: usize) -> Result<CellKey> {
    let (x, y) = descriptor;
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidDescriptor(x.as_f64(), y.as_f64()));
    }
    Ok(CellKey {
        policy_index,
        x_bin: bin(x, spec.x_range, spec.x_bins),
        y_bin: bin(y, spec.y_range, spec.y_bins),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elite<T> {
    pub level: LevelGenotype<T>,
    pub regret: T,
    pub xp_mean: T,
    pub sp_mean: T,
    pub descriptor: (T, T),
    pub policy_index: usize,
    pub eval_seed: u64,
    pub iteration_found: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InsertOutcome<T> {
    NewCell,
    Improved(T),
    Rejected(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Archive<T> {
    spec: GridSpec<T>,
    cells: Vec<Option<Elite<T>>>,
    /// Occupied flat indices, ascending.
    occupied: Vec<usize>,
    offset: T,
}

impl<T: Scalar> Archive<T> {
    pub fn new(spec: GridSpec<T>, offset: T) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec,
            cells: vec![None; spec.total_cells()],
            occupied: Vec::new(),
            offset,
        })
    }

    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn key_for(&self, elite: &Elite<T>) -> Result<CellKey> {
        cell_index(elite.descriptor, &self.spec, elite.policy_index)
    }

    pub fn get(&self, key: CellKey) -> Option<&Elite<T>> {
        if !self.spec.contains(key) {
            return None;
        }
        self.cells[self.spec.flat(key)].as_ref()
    }

    fn checked_flat(&self, candidate: &Elite<T>) -> Result<usize> {
        if !candidate.regret.is_finite() {
            return Err(Error::InvalidInput("candidate regret is not finite".into()));
        }
        let key = self.key_for(candidate)?;
        if !self.spec.contains(key) {
            return Err(Error::InvalidKey {
                policy: key.policy_index,
                x_bin: key.x_bin,
                y_bin: key.y_bin,
            });
        }
        Ok(self.spec.flat(key))
    }

    fn occupy(&mut self, flat: usize) {
        if let Err(pos) = self.occupied.binary_search(&flat) {
            self.occupied.insert(pos, flat);
        }
    }

    /// Stores `candidate` if its cell is empty or it strictly beats the incumbent.
    pub fn try_insert(&mut self, candidate: Elite<T>) -> Result<InsertOutcome<T>> {
        let flat = self.checked_flat(&candidate)?;
        let outcome = match &self.cells[flat] {
            None => InsertOutcome::NewCell,
            Some(inc) if inc.regret < candidate.regret => InsertOutcome::Improved(inc.regret),
            Some(inc) => return Ok(InsertOutcome::Rejected(inc.regret)),
        };
        self.cells[flat] = Some(candidate);
        self.occupy(flat);
        Ok(outcome)
    }

    /// Stores `candidate` unconditionally. The outcome reports what was there.
    pub fn overwrite(&mut self, candidate: Elite<T>) -> Result<InsertOutcome<T>> {
        let flat = self.checked_flat(&candidate)?;
        let outcome = match &self.cells[flat] {
            None => InsertOutcome::NewCell,
            Some(inc) if inc.regret < candidate.regret => InsertOutcome::Improved(inc.regret),
            Some(inc) => InsertOutcome::Rejected(inc.regret),
        };
        self.cells[flat] = Some(candidate);
        self.occupy(flat);
        Ok(outcome)
    }

    fn policy_slice(&self, policy: usize) -> &[usize] {
        let c = self.spec.cells();
        let lo = self.occupied.partition_point(|&f| f < policy * c);
        let hi = self.occupied.partition_point(|&f| f < (policy + 1) * c);
        &self.occupied[lo..hi]
    }

    /// Elite drawn uniformly over occupied cells, optionally restricted to one
    /// policy's sub-grid.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R, policy: Option<usize>) -> Result<&Elite<T>> {
        let pool = match policy {
            Some(p) => self.policy_slice(p),
            None => &self.occupied[..],
        };
        if pool.is_empty() {
            return Err(Error::EmptyArchive);
        }
        let flat = pool[rng.random_range(0..pool.len())];
        Ok(self.cells[flat].as_ref().expect("occupied index"))
    }

    /// Occupied cells in ascending key order.
    pub fn iter(&self) -> impl Iterator<Item = (CellKey, &Elite<T>)> + '_ {
        self.occupied
            .iter()
            .map(move |&f| (self.spec.key_of(f), self.cells[f].as_ref().expect("occupied index")))
    }

    pub fn iter_policy(&self, policy: usize) -> impl Iterator<Item = (CellKey, &Elite<T>)> + '_ {
        self.policy_slice(policy)
            .iter()
            .map(move |&f| (self.spec.key_of(f), self.cells[f].as_ref().expect("occupied index")))
    }

    /// Sum over occupied cells of `regret - offset`.
    pub fn qd_score(&self) -> T {
        self.iter().map(|(_, e)| e.regret - self.offset).sum()
    }

    /// Occupied fraction of one policy's sub-grid, or of the whole archive.
    pub fn coverage(&self, policy: Option<usize>) -> f64 {
        match policy {
            Some(p) => self.policy_slice(p).len() as f64 / self.spec.cells() as f64,
            None => self.occupied.len() as f64 / self.spec.total_cells() as f64,
        }
    }

    /// Mean stored regret over all cells with empty cells counted as zero.
    pub fn mean_regret(&self, policy: Option<usize>) -> T {
        let (sum, cells): (T, usize) = match policy {
            Some(p) => (self.iter_policy(p).map(|(_, e)| e.regret).sum(), self.spec.cells()),
            None => (self.iter().map(|(_, e)| e.regret).sum(), self.spec.total_cells()),
        };
        sum / T::lit(cells as f64)
    }

    /// Fraction of occupied cells whose mean cross-play value is positive;
    /// zero for an empty selection.
    pub fn scoring_rate(&self, policy: Option<usize>) -> f64 {
        let (n, scored) = match policy {
            Some(p) => (
                self.policy_slice(p).len(),
                self.iter_policy(p).filter(|(_, e)| e.xp_mean > T::zero()).count(),
            ),
            None => (self.len(), self.iter().filter(|(_, e)| e.xp_mean > T::zero()).count()),
        };
        if n == 0 {
            0.0
        } else {
            scored as f64 / n as f64
        }
    }
}
