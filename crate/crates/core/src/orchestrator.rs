//! The search loop, its ablation baselines and the per-checkpoint metrics.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::archive::{Archive, Elite, GridSpec, InsertOutcome};
use crate::emitters::{CmaMeEmitter, GaussianEmitter, RankedCandidate};
use crate::environment::{genotype_len, random_level, LevelGenotype, MatchConfig};
use crate::evaluation::{estimate_regret, RegretEstimate};
use crate::policies::{build_reference_ladder, Flaws, PolicySpec};
use crate::rng::mix;
use crate::{emitters, Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    MadridCmame,
    MadridGaussian,
    Targeted,
    Random,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::MadridCmame, Mode::MadridGaussian, Mode::Targeted, Mode::Random];

    pub fn name(self) -> &'static str {
        match self {
            Mode::MadridCmame => "madrid_cmame",
            Mode::MadridGaussian => "madrid_gaussian",
            Mode::Targeted => "targeted",
            Mode::Random => "random",
        }
    }

    /// Whether the archive keeps only improvements.
    pub fn is_elitist(self) -> bool {
        self != Mode::Random
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig<T> {
    pub mode: Mode,
    pub iterations: usize,
    pub emitters: usize,
    pub repeats: usize,
    pub sigma: T,
    pub seed: u64,
    pub ladder_size: usize,
    pub include_bots: bool,
    pub target_flaws: Flaws,
    pub x_bins: usize,
    pub y_bins: usize,
    pub offset: T,
    pub init_levels_per_policy: usize,
    pub metrics_stride: usize,
    /// Candidates per emitter per iteration; `None` uses the CMA-ES default
    /// for the genotype length.
    pub batch_size: Option<usize>,
    /// Evaluation threads. Results do not depend on this.
    pub workers: usize,
    pub match_config: MatchConfig<T>,
}

impl<T: Scalar> Default for SearchConfig<T> {
    fn default() -> Self {
        Self {
            mode: Mode::MadridCmame,
            iterations: 5000,
            emitters: 4,
            repeats: 4,
            sigma: T::lit(0.1),
            seed: 0,
            ladder_size: 8,
            include_bots: true,
            target_flaws: Flaws::all(),
            x_bins: 16,
            y_bins: 10,
            offset: T::lit(-2.0),
            init_levels_per_policy: 16,
            metrics_stride: 25,
            batch_size: None,
            workers: 1,
            match_config: MatchConfig::default(),
        }
    }
}

fn config_error(key: &str, message: impl Into<String>) -> Error {
    Error::ConfigKey {
        key: key.into(),
        message: message.into(),
    }
}

impl<T: Scalar> SearchConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("iterations", self.iterations),
            ("emitters", self.emitters),
            ("repeats", self.repeats),
            ("ladder_size", self.ladder_size),
            ("x_bins", self.x_bins),
            ("y_bins", self.y_bins),
            ("metrics_stride", self.metrics_stride),
            ("workers", self.workers),
        ];
        for (key, v) in positive {
            if v == 0 {
                return Err(config_error(key, "must be at least 1"));
            }
        }
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            return Err(config_error("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !self.offset.is_finite() || self.offset > T::lit(-2.0) {
            return Err(config_error("offset", format!("must not exceed -2, got {}", self.offset)));
        }
        if self.batch_size == Some(0) {
            return Err(config_error("batch_size", "must be at least 1"));
        }
        if self.mode == Mode::MadridCmame && self.batch_size.is_some_and(|b| b < 2) {
            return Err(config_error("batch_size", "CMA-ME needs at least 2 candidates"));
        }
        self.match_config.validate()
    }

    pub fn roster(&self) -> Result<Vec<PolicySpec>> {
        build_reference_ladder(self.ladder_size, self.include_bots)
    }

    pub fn target(&self) -> PolicySpec {
        PolicySpec::target(self.target_flaws)
    }

    pub fn grid(&self, policy_count: usize) -> GridSpec<T> {
        let mut g = GridSpec::new(policy_count);
        g.x_bins = self.x_bins;
        g.y_bins = self.y_bins;
        g.x_range = self.match_config.field.x_extent;
        g.y_range = self.match_config.field.y_extent;
        g
    }

    pub fn effective_batch_size(&self) -> usize {
        self.batch_size
            .unwrap_or_else(|| emitters::default_lambda(genotype_len(self.match_config.team_size)))
    }
}

/// Archive summary at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub iteration: usize,
    pub evaluations: usize,
    /// Mean stored regret over every cell of every policy, empty cells as zero.
    pub mean_archive_regret: f64,
    pub scoring_rate: f64,
    pub coverage: f64,
    pub qd_score: f64,
}

pub fn compute_metrics<T: Scalar>(archive: &Archive<T>, iteration: usize, evaluations: usize) -> MetricsRecord {
    MetricsRecord {
        iteration,
        evaluations,
        mean_archive_regret: archive.mean_regret(None).as_f64(),
        scoring_rate: archive.scoring_rate(None),
        coverage: archive.coverage(None),
        qd_score: archive.qd_score().as_f64(),
    }
}

/// Scores a level for one reference policy.
pub trait Evaluator<T>: Sync {
    fn evaluate(&self, level: &LevelGenotype<T>, policy_index: usize, base_seed: u64) -> Result<RegretEstimate<T>>;
}

/// Cross-play against the roster, self-play of the target, on MiniPitch.
#[derive(Debug, Clone)]
pub struct MatchEvaluator<T> {
    pub roster: Vec<PolicySpec>,
    pub target: PolicySpec,
    pub repeats: usize,
    pub config: MatchConfig<T>,
}

impl<T: Scalar> MatchEvaluator<T> {
    pub fn from_config(config: &SearchConfig<T>) -> Result<Self> {
        Ok(Self {
            roster: config.roster()?,
            target: config.target(),
            repeats: config.repeats,
            config: config.match_config,
        })
    }
}

impl<T: Scalar> Evaluator<T> for MatchEvaluator<T> {
    fn evaluate(&self, level: &LevelGenotype<T>, policy_index: usize, base_seed: u64) -> Result<RegretEstimate<T>> {
        let reference = self
            .roster
            .get(policy_index)
            .ok_or_else(|| Error::UnknownPolicy(format!("index {policy_index}")))?;
        estimate_regret(level, policy_index, reference, &self.target, self.repeats, base_seed, &self.config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub code_version: &'static str,
    pub seed: u64,
    pub mode: Mode,
    pub mean_regret_convention: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<T> {
    pub config: SearchConfig<T>,
    pub roster: Vec<PolicySpec>,
    pub archive: Archive<T>,
    pub metrics: Vec<MetricsRecord>,
    /// Zero-filled mean regret of each policy's sub-grid at the end.
    pub policy_mean_regret: Vec<f64>,
    pub policy_scoring_rate: Vec<f64>,
    /// Regret estimates performed, initialization included.
    pub evaluations: usize,
    pub iterations_completed: usize,
    /// Overwrites that lowered a cell's stored regret (random mode only).
    pub cell_decreases: usize,
    pub emitter_restarts: usize,
    pub completed: bool,
    pub failure: Option<String>,
    pub provenance: Provenance,
}

/// Seed of the regret estimate for candidate `index` of `emitter` at `iteration`.
/// Iteration 0 is initialization, where `emitter` is the policy index.
pub fn candidate_seed(search_seed: u64, iteration: usize, emitter: usize, index: usize) -> u64 {
    mix(&[search_seed, 0x4341_4e44, iteration as u64, emitter as u64, index as u64])
}

struct Candidate<T> {
    level: LevelGenotype<T>,
    policy_index: usize,
    seed: u64,
}

enum Generator<T> {
    Cma(Vec<CmaMeEmitter<T>>),
    Gaussian(GaussianEmitter<T>),
    Fresh,
}

struct Search<'a, T, E> {
    config: &'a SearchConfig<T>,
    evaluator: &'a E,
    pool: rayon::ThreadPool,
    archive: Archive<T>,
    rng: ChaCha8Rng,
    evaluations: usize,
    cell_decreases: usize,
}

impl<T: Scalar, E: Evaluator<T>> Search<'_, T, E> {
    fn evaluate(&mut self, batch: &[Candidate<T>]) -> Result<Vec<RegretEstimate<T>>> {
        let evaluator = self.evaluator;
        let out: Vec<Result<RegretEstimate<T>>> = self.pool.install(|| {
            batch
                .par_iter()
                .map(|c| evaluator.evaluate(&c.level, c.policy_index, c.seed))
                .collect()
        });
        self.evaluations += batch.len();
        out.into_iter().collect()
    }

    fn insert(&mut self, est: &RegretEstimate<T>, iteration: usize) -> Result<InsertOutcome<T>> {
        let elite = Elite {
            descriptor: est.level.descriptor(),
            level: est.level.clone(),
            regret: est.regret,
            xp_mean: est.xp_mean,
            sp_mean: est.sp_mean,
            policy_index: est.policy_index,
            eval_seed: est.base_seed,
            iteration_found: iteration,
        };
        if self.config.mode.is_elitist() {
            self.archive.try_insert(elite)
        } else {
            let outcome = self.archive.overwrite(elite)?;
            if matches!(outcome, InsertOutcome::Rejected(inc) if est.regret < inc) {
                self.cell_decreases += 1;
            }
            Ok(outcome)
        }
    }

    fn initialize(&mut self, policy_count: usize) -> Result<()> {
        let team_size = self.config.match_config.team_size;
        let field = self.config.match_config.field;
        let mut batch = Vec::new();
        for p in 0..policy_count {
            for j in 0..self.config.init_levels_per_policy {
                batch.push(Candidate {
                    level: random_level(&mut self.rng, team_size, &field)?,
                    policy_index: p,
                    seed: candidate_seed(self.config.seed, 0, p, j),
                });
            }
        }
        for est in self.evaluate(&batch)? {
            self.insert(&est, 0)?;
        }
        Ok(())
    }

    fn iterate(&mut self, generator: &mut Generator<T>, iteration: usize, policy_count: usize) -> Result<usize> {
        let cfg = self.config;
        let field = cfg.match_config.field;
        let lambda = cfg.effective_batch_size();
        let mut batch = Vec::with_capacity(cfg.emitters * lambda);
        for e in 0..cfg.emitters {
            let levels: Vec<(LevelGenotype<T>, usize)> = match generator {
                Generator::Cma(ems) => {
                    let p = ems[e].policy_index;
                    ems[e].ask(&mut self.rng)?.into_iter().map(|l| (l, p)).collect()
                }
                Generator::Gaussian(g) => g.ask(&self.archive, &field, &mut self.rng)?,
                Generator::Fresh => {
                    // fresh levels rotate over the roster one emitter batch at a time
                    let p = ((iteration - 1) * cfg.emitters + e) % policy_count;
                    (0..lambda)
                        .map(|_| Ok((random_level(&mut self.rng, cfg.match_config.team_size, &field)?, p)))
                        .collect::<Result<_>>()?
                }
            };
            for (j, (level, policy_index)) in levels.into_iter().enumerate() {
                batch.push(Candidate {
                    level,
                    policy_index,
                    seed: candidate_seed(cfg.seed, iteration, e, j),
                });
            }
        }
        let estimates = self.evaluate(&batch)?;
        let mut outcomes = Vec::with_capacity(estimates.len());
        for est in &estimates {
            outcomes.push(self.insert(est, iteration)?);
        }
        let mut restarts = 0;
        if let Generator::Cma(ems) = generator {
            let per = ems[0].batch_size();
            for (e, em) in ems.iter_mut().enumerate() {
                let ranked = (0..per)
                    .map(|j| {
                        let k = e * per + j;
                        RankedCandidate::new(j, batch[k].level.clone(), estimates[k].regret, outcomes[k], cfg.offset)
                    })
                    .collect();
                if em.tell(ranked, &self.archive, &mut self.rng)? {
                    restarts += 1;
                }
            }
        }
        Ok(restarts)
    }
}

pub fn run_search<T: Scalar>(config: &SearchConfig<T>) -> Result<SearchResult<T>> {
    let evaluator = MatchEvaluator::from_config(config)?;
    run_search_with(config, &evaluator)
}

/// Runs the configured search with a custom evaluator.
///
/// Configuration errors are returned as `Err`. A failure after the search has
/// started yields the partial result with `completed == false`.
pub fn run_search_with<T: Scalar, E: Evaluator<T>>(config: &SearchConfig<T>, evaluator: &E) -> Result<SearchResult<T>> {
    config.validate()?;
    let roster = config.roster()?;
    let policy_count = roster.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let mut search = Search {
        config,
        evaluator,
        pool,
        archive: Archive::new(config.grid(policy_count), config.offset)?,
        rng: ChaCha8Rng::seed_from_u64(mix(&[config.seed, 0x534541])),
        evaluations: 0,
        cell_decreases: 0,
    };
    let mut metrics = Vec::with_capacity(config.iterations / config.metrics_stride + 1);
    let mut restarts = 0;
    let mut done = 0;

    let outcome = (|| -> Result<()> {
        search.initialize(policy_count)?;
        metrics.push(compute_metrics(&search.archive, 0, search.evaluations));
        let mut generator = match config.mode {
            Mode::MadridCmame => {
                let mut ems = Vec::with_capacity(config.emitters);
                for e in 0..config.emitters {
                    let mut em = CmaMeEmitter::new(
                        e % policy_count,
                        config.emitters,
                        &search.archive,
                        config.match_config.team_size,
                        config.sigma,
                        config.match_config.field,
                        &mut search.rng,
                    )?;
                    if let Some(b) = config.batch_size {
                        em.es = emitters::CmaEs::new(em.es.mean.clone(), config.sigma, b);
                    }
                    ems.push(em);
                }
                Generator::Cma(ems)
            }
            Mode::MadridGaussian => Generator::Gaussian(GaussianEmitter::new(config.sigma, config.effective_batch_size())),
            Mode::Targeted | Mode::Random => Generator::Fresh,
        };
        for it in 1..=config.iterations {
            restarts += search.iterate(&mut generator, it, policy_count)?;
            done = it;
            if it % config.metrics_stride == 0 {
                metrics.push(compute_metrics(&search.archive, it, search.evaluations));
            }
        }
        Ok(())
    })();

    let archive = search.archive;
    Ok(SearchResult {
        policy_mean_regret: (0..policy_count).map(|p| archive.mean_regret(Some(p)).as_f64()).collect(),
        policy_scoring_rate: (0..policy_count).map(|p| archive.scoring_rate(Some(p))).collect(),
        config: config.clone(),
        roster,
        archive,
        metrics,
        evaluations: search.evaluations,
        iterations_completed: done,
        cell_decreases: search.cell_decreases,
        emitter_restarts: restarts,
        completed: outcome.is_ok(),
        failure: outcome.err().map(|e| e.to_string()),
        provenance: Provenance {
            code_version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            mode: config.mode,
            mean_regret_convention: "zero_fill_all_cells",
        },
    })
}
