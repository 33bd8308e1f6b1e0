//! Candidate generators.
//!
//! [`GaussianEmitter`] mutates uniformly sampled elites; [`CmaMeEmitter`]
//! adapts a CMA-ES search distribution toward archive improvement.

mod cma;
mod gaussian;
mod linalg;

pub use cma::{default_lambda, CmaEs, CmaMeEmitter, RESTART_CONDITION};
pub use gaussian::GaussianEmitter;
pub use linalg::symmetric_eigen;

use crate::archive::InsertOutcome;
use crate::environment::LevelGenotype;
use crate::Scalar;

/// Improvement ranking value: new cells score against the archive offset,
/// improvements and rejections against the incumbent.
pub fn improvement_value<T: Scalar>(outcome: InsertOutcome<T>, regret: T, offset: T) -> T {
    match outcome {
        InsertOutcome::NewCell => regret - offset,
        InsertOutcome::Improved(old) => regret - old,
        InsertOutcome::Rejected(incumbent) => regret - incumbent,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate<T> {
    /// Position of the candidate in the batch it was asked in.
    pub index: usize,
    pub genotype: LevelGenotype<T>,
    pub regret: T,
    pub outcome: InsertOutcome<T>,
    pub improvement: T,
}

impl<T: Scalar> RankedCandidate<T> {
    pub fn new(index: usize, genotype: LevelGenotype<T>, regret: T, outcome: InsertOutcome<T>, offset: T) -> Self {
        Self {
            index,
            genotype,
            regret,
            outcome,
            improvement: improvement_value(outcome, regret, offset),
        }
    }
}

/// Sorts by improvement, best first; equal improvements keep batch order.
pub fn rank<T: Scalar>(candidates: &mut [RankedCandidate<T>]) {
    candidates.sort_by(|a, b| {
        b.improvement
            .partial_cmp(&a.improvement)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.index.cmp(&b.index))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn improvement_examples() {
        assert_eq!(improvement_value(InsertOutcome::NewCell, 0.5, -2.0), 2.5);
        assert_eq!(improvement_value(InsertOutcome::Improved(0.25), 0.5, -2.0), 0.25);
        assert_eq!(improvement_value(InsertOutcome::Rejected(0.5), 0.5, -2.0), 0.0);
        assert!(improvement_value(InsertOutcome::Rejected(1.0), 0.5, -2.0) <= 0.0);
    }

    #[test]
    fn ranking_is_stable() {
        let g = LevelGenotype::new(vec![0.0; 18]).unwrap();
        let mut c: Vec<RankedCandidate<f64>> = [
            (InsertOutcome::Rejected(0.5), 0.5),
            (InsertOutcome::NewCell, -2.0),
            (InsertOutcome::Improved(0.0), 0.25),
            (InsertOutcome::Rejected(1.0), 1.0),
        ]
        .iter()
        .enumerate()
        .map(|(i, &(o, r))| RankedCandidate::new(i, g.clone(), r, o, -2.0))
        .collect();
        rank(&mut c);
        let order: Vec<usize> = c.iter().map(|r| r.index).collect();
        // improvements: 0.0, 0.0, 0.25, 0.0
        assert_eq!(order, vec![2, 0, 1, 3]);
    }
}
