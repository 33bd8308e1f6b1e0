use rand::Rng;

use crate::archive::Archive;
use crate::environment::{mutate_level, FieldSpec, LevelGenotype};
use crate::{Result, Scalar};

/// Mutates elites drawn uniformly from the whole archive; each child is
/// evaluated against its parent's reference policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEmitter<T> {
    pub sigma: T,
    pub batch_size: usize,
}

impl<T: Scalar> GaussianEmitter<T> {
    pub fn new(sigma: T, batch_size: usize) -> Self {
        Self { sigma, batch_size }
    }

    /// `(child, policy_index)` pairs.
    pub fn ask<R: Rng + ?Sized>(
        &self,
        archive: &Archive<T>,
        field: &FieldSpec<T>,
        rng: &mut R,
    ) -> Result<Vec<(LevelGenotype<T>, usize)>> {
        (0..self.batch_size)
            .map(|_| {
                let parent = archive.sample_uniform(rng, None)?;
                Ok((mutate_level(&parent.level, self.sigma, rng, field), parent.policy_index))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archive::{Elite, GridSpec};
    use crate::environment::random_level;
    use crate::Error;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_archive_is_an_error() {
        let a = Archive::<f64>::new(GridSpec::new(1), -2.0).unwrap();
        let em = GaussianEmitter::new(0.1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(em.ask(&a, &FieldSpec::default(), &mut rng).unwrap_err(), Error::EmptyArchive);
    }

    #[test]
    fn zero_sigma_resamples_parents() {
        let field = FieldSpec::default();
        let mut a = Archive::new(GridSpec::new(2), -2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut parents = Vec::new();
        for p in 0..2 {
            let l = random_level(&mut rng, 5, &field).unwrap();
            a.try_insert(Elite {
                descriptor: l.descriptor(),
                level: l.clone(),
                regret: 0.0,
                xp_mean: 0.0,
                sp_mean: 0.0,
                policy_index: p,
                eval_seed: 0,
                iteration_found: 0,
            })
            .unwrap();
            parents.push((l, p));
        }
        let em = GaussianEmitter::new(0.0, 12);
        let batch = em.ask(&a, &field, &mut rng).unwrap();
        assert_eq!(batch.len(), 12);
        for child in batch {
            assert!(parents.contains(&child));
        }
    }
}
