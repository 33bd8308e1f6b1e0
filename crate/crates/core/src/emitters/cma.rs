use rand::Rng;
use rand_distr::StandardNormal;

use super::{linalg::symmetric_eigen, rank, RankedCandidate};
use crate::archive::{Archive, InsertOutcome};
use crate::environment::{random_level, FieldSpec, LevelGenotype};
use crate::{Error, Result, Scalar};

/// Covariance condition number beyond which the emitter restarts.
pub const RESTART_CONDITION: f64 = 1e14;

/// (mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu covariance updates and
/// cumulative step-size adaptation.
#[derive(Debug, Clone, PartialEq)]
pub struct CmaEs<T> {
    n: usize,
    lambda: usize,
    weights: Vec<T>,
    mu_eff: T,
    cc: T,
    cs: T,
    c1: T,
    cmu: T,
    damps: T,
    chi_n: T,
    pub mean: Vec<T>,
    pub step_size: T,
    /// Row-major `n x n`.
    pub covariance: Vec<T>,
    pub path_c: Vec<T>,
    pub path_sigma: Vec<T>,
    /// Eigenvectors of the covariance as columns (row-major).
    basis: Vec<T>,
    /// Square roots of the covariance eigenvalues.
    scales: Vec<T>,
    eigenvalues: Vec<T>,
    pub generation: usize,
}

/// Default population size `4 + floor(3 ln n)`.
pub fn default_lambda(n: usize) -> usize {
    4 + (3.0 * (n as f64).ln()).floor() as usize
}

impl<T: Scalar> CmaEs<T> {
    pub fn new(mean: Vec<T>, step_size: T, lambda: usize) -> Self {
        let n = mean.len();
        let mu = (lambda / 2).max(1);
        let raw: Vec<f64> = (1..=mu)
            .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let mu_eff = 1.0 / w.iter().map(|x| x * x).sum::<f64>();
        let nf = n as f64;
        let cc = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let cs = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let c1 = 2.0 / ((nf + 1.3).powi(2) + mu_eff);
        let cmu = (1.0 - c1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0).powi(2) + mu_eff));
        let damps = 1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        let mut identity = vec![T::zero(); n * n];
        for i in 0..n {
            identity[i * n + i] = T::one();
        }
        Self {
            n,
            lambda,
            weights: w.into_iter().map(T::lit).collect(),
            mu_eff: T::lit(mu_eff),
            cc: T::lit(cc),
            cs: T::lit(cs),
            c1: T::lit(c1),
            cmu: T::lit(cmu),
            damps: T::lit(damps),
            chi_n: T::lit(chi_n),
            mean,
            step_size,
            covariance: identity.clone(),
            path_c: vec![T::zero(); n],
            path_sigma: vec![T::zero(); n],
            basis: identity,
            scales: vec![T::one(); n],
            eigenvalues: vec![T::one(); n],
            generation: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn mu(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Ratio of the largest to the smallest covariance eigenvalue; infinite
    /// when the matrix is not positive definite.
    pub fn condition(&self) -> f64 {
        let max = self.eigenvalues.iter().copied().fold(T::neg_infinity(), T::max);
        let min = self.eigenvalues.iter().copied().fold(T::infinity(), T::min);
        if !(min > T::zero()) || !max.is_finite() {
            return f64::INFINITY;
        }
        (max / min).as_f64()
    }

    /// Draws `lambda` points from `N(mean, step_size^2 C)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<T>> {
        let n = self.n;
        (0..self.lambda)
            .map(|_| {
                let z: Vec<T> = (0..n)
                    .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                    .collect();
                (0..n)
                    .map(|i| {
                        let y: T = (0..n).map(|j| self.basis[i * n + j] * self.scales[j] * z[j]).sum();
                        self.mean[i] + self.step_size * y
                    })
                    .collect()
            })
            .collect()
    }

    /// Updates the distribution from the generation's solutions, best first.
    /// Only the top `mu` solutions contribute.
    pub fn update(&mut self, ranked: &[&[T]]) -> Result<()> {
        if ranked.len() != self.lambda {
            return Err(Error::Contract(format!(
                "expected {} solutions, got {}",
                self.lambda,
                ranked.len()
            )));
        }
        let n = self.n;
        let mu = self.mu();
        let sigma = self.step_size;
        let old = self.mean.clone();
        let steps: Vec<Vec<T>> = ranked[..mu]
            .iter()
            .map(|x| (0..n).map(|i| (x[i] - old[i]) / sigma).collect())
            .collect();
        let mut y_w = vec![T::zero(); n];
        for (w, y) in self.weights.iter().zip(&steps) {
            for i in 0..n {
                y_w[i] = y_w[i] + *w * y[i];
            }
        }
        for i in 0..n {
            self.mean[i] = old[i] + sigma * y_w[i];
        }

        // C^{-1/2} y_w = B D^{-1} B^T y_w
        let bt_y: Vec<T> = (0..n)
            .map(|j| (0..n).map(|i| self.basis[i * n + j] * y_w[i]).sum::<T>() / self.scales[j])
            .collect();
        let inv_sqrt_y: Vec<T> = (0..n)
            .map(|i| (0..n).map(|j| self.basis[i * n + j] * bt_y[j]).sum())
            .collect();
        let two = T::lit(2.0);
        let cs_norm = (self.cs * (two - self.cs) * self.mu_eff).sqrt();
        for i in 0..n {
            self.path_sigma[i] = (T::one() - self.cs) * self.path_sigma[i] + cs_norm * inv_sqrt_y[i];
        }
        let ps_norm = self.path_sigma.iter().map(|v| *v * *v).sum::<T>().sqrt();
        let g = (self.generation + 1) as i32;
        let denom = (T::one() - (T::one() - self.cs).powi(2 * g)).sqrt();
        let h_sigma = ps_norm / denom / self.chi_n < T::lit(1.4) + two / T::lit(n as f64 + 1.0);
        let cc_norm = (self.cc * (two - self.cc) * self.mu_eff).sqrt();
        for i in 0..n {
            let hs = if h_sigma { cc_norm * y_w[i] } else { T::zero() };
            self.path_c[i] = (T::one() - self.cc) * self.path_c[i] + hs;
        }
        let delta_h = if h_sigma {
            T::zero()
        } else {
            self.cc * (two - self.cc)
        };
        let keep = T::one() - self.c1 - self.cmu;
        for i in 0..n {
            for j in 0..=i {
                let rank_mu: T = self
                    .weights
                    .iter()
                    .zip(&steps)
                    .map(|(w, y)| *w * y[i] * y[j])
                    .sum();
                let c_ij = keep * self.covariance[i * n + j]
                    + self.c1 * (self.path_c[i] * self.path_c[j] + delta_h * self.covariance[i * n + j])
                    + self.cmu * rank_mu;
                self.covariance[i * n + j] = c_ij;
                self.covariance[j * n + i] = c_ij;
            }
        }
        self.step_size = sigma * ((self.cs / self.damps) * (ps_norm / self.chi_n - T::one())).exp();
        self.generation += 1;
        self.refresh_eigen();
        Ok(())
    }

    fn refresh_eigen(&mut self) {
        let (values, basis) = symmetric_eigen(&self.covariance, self.n);
        self.scales = values.iter().map(|v| v.max(T::zero()).sqrt()).collect();
        self.eigenvalues = values;
        self.basis = basis;
    }
}

/// CMA-ME emitter serving one reference-policy sub-archive at a time.
///
/// On restart the emitter moves `policy_stride` policies forward, so a set of
/// emitters with distinct starting policies rotates over the whole roster.
#[derive(Debug, Clone, PartialEq)]
pub struct CmaMeEmitter<T> {
    pub es: CmaEs<T>,
    pub policy_index: usize,
    pub policy_count: usize,
    pub policy_stride: usize,
    pub restarts: usize,
    initial_step: T,
    field: FieldSpec<T>,
}

impl<T: Scalar> CmaMeEmitter<T> {
    /// Starts at a random elite of `policy_index`, or at a fresh random level
    /// when that sub-archive is empty.
    pub fn new<R: Rng + ?Sized>(
        policy_index: usize,
        policy_stride: usize,
        archive: &Archive<T>,
        team_size: usize,
        initial_step: T,
        field: FieldSpec<T>,
        rng: &mut R,
    ) -> Result<Self> {
        let policy_count = archive.spec().policy_count;
        let start = Self::start_point(archive, policy_index, team_size, &field, rng)?;
        let lambda = default_lambda(start.len());
        Ok(Self {
            es: CmaEs::new(start, initial_step, lambda),
            policy_index,
            policy_count,
            policy_stride: policy_stride.max(1),
            restarts: 0,
            initial_step,
            field,
        })
    }

    fn start_point<R: Rng + ?Sized>(
        archive: &Archive<T>,
        policy: usize,
        team_size: usize,
        field: &FieldSpec<T>,
        rng: &mut R,
    ) -> Result<Vec<T>> {
        match archive.sample_uniform(rng, Some(policy)) {
            Ok(e) => Ok(e.level.coords().to_vec()),
            Err(Error::EmptyArchive) => Ok(random_level(rng, team_size, field)?.coords().to_vec()),
            Err(e) => Err(e),
        }
    }

    pub fn batch_size(&self) -> usize {
        self.es.lambda()
    }

    /// Samples a batch, clamped into the pitch.
    pub fn ask<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<LevelGenotype<T>>> {
        self.es
            .sample(rng)
            .into_iter()
            .map(|x| Ok(LevelGenotype::new(x)?.projected(&self.field)))
            .collect()
    }

    /// Consumes the generation's outcomes. Returns `true` if the emitter restarted.
    pub fn tell<R: Rng + ?Sized>(
        &mut self,
        mut ranked: Vec<RankedCandidate<T>>,
        archive: &Archive<T>,
        rng: &mut R,
    ) -> Result<bool> {
        if ranked.len() != self.batch_size() {
            return Err(Error::Contract(format!(
                "tell expects {} candidates, got {}",
                self.batch_size(),
                ranked.len()
            )));
        }
        rank(&mut ranked);
        let all_rejected = ranked.iter().all(|c| matches!(c.outcome, InsertOutcome::Rejected(_)));
        let solutions: Vec<&[T]> = ranked.iter().map(|c| c.genotype.coords()).collect();
        self.es.update(&solutions)?;
        let degenerate = !self.es.step_size.is_finite() || self.es.condition() > RESTART_CONDITION;
        if all_rejected || degenerate {
            self.restart(archive, rng)?;
            return Ok(true);
        }
        Ok(false)
    }

    fn restart<R: Rng + ?Sized>(&mut self, archive: &Archive<T>, rng: &mut R) -> Result<()> {
        self.policy_index = (self.policy_index + self.policy_stride) % self.policy_count;
        let team_size = LevelGenotype::new(self.es.mean.clone())
            .map(|l| l.team_size())
            .unwrap_or(5);
        let start = match archive.sample_uniform(rng, Some(self.policy_index)) {
            Ok(e) => e.level.coords().to_vec(),
            Err(_) => match archive.sample_uniform(rng, None) {
                Ok(e) => e.level.coords().to_vec(),
                Err(_) => random_level(rng, team_size, &self.field)?.coords().to_vec(),
            },
        };
        let lambda = self.es.lambda();
        self.es = CmaEs::new(start, self.initial_step, lambda);
        self.restarts += 1;
        Ok(())
    }
}
