//! Sequential constrained Bayesian optimization of the truss mass, plus a
//! uniform random-search baseline with the same contract.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::acquisition::{maximize_acquisition, Acquisition, AcquisitionConfig};
use crate::fea::{analyze, FailureMode, FeaResult};
use crate::gp::{fit_warm, Dataset, GpHyperparams, GpModel, DEFAULT_RESTARTS};
use crate::truss::{derive_design, DesignParams, Material, Section, DESIGN_DIMS};

/// Penalty weight on the normalized constraint violation when feasibility
/// weighting is off.
pub const PENALTY_WEIGHT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration `{field}`: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

/// Everything that determines an optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct BoConfig {
    pub budget: usize,
    pub n_init: usize,
    pub seed: u64,
    pub acquisition: AcquisitionConfig,
    pub gp_restarts: usize,
    /// Improvement (kg) below which an iteration counts as stalled.
    pub min_improvement: f64,
    /// Stop after this many consecutive stalled BO iterations; 0 disables early stopping.
    pub stall_patience: usize,
    pub material: Material<f64>,
    pub section: Section<f64>,
    /// Total downward load (N), split over the three top nodes.
    pub total_load: f64,
}

impl Default for BoConfig {
    fn default() -> Self {
        Self {
            budget: 100,
            n_init: 10,
            seed: 0,
            acquisition: AcquisitionConfig::default(),
            gp_restarts: DEFAULT_RESTARTS,
            min_improvement: 0.0,
            stall_patience: 0,
            material: Material::al6061_t6(),
            section: Section::default(),
            total_load: 12_000.0,
        }
    }
}

impl BoConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.budget == 0 {
            return Err(ConfigError::new("budget", "must be >= 1"));
        }
        if self.n_init == 0 {
            return Err(ConfigError::new("n_init", "must be >= 1"));
        }
        if self.n_init > self.budget {
            return Err(ConfigError::new(
                "n_init",
                format!("n_init ({}) must not exceed budget ({})", self.n_init, self.budget),
            ));
        }
        if !(self.total_load >= 0.0 && self.total_load.is_finite()) {
            return Err(ConfigError::new("total_load", "must be a finite value >= 0"));
        }
        if !(self.min_improvement >= 0.0 && self.min_improvement.is_finite()) {
            return Err(ConfigError::new("min_improvement", "must be a finite value >= 0"));
        }
        if !(self.section.area > 0.0 && self.section.area.is_finite()) {
            return Err(ConfigError::new("area", "must be > 0"));
        }
        self.material
            .validate()
            .map_err(|e| ConfigError::new(e.field, e.to_string()))?;
        self.acquisition
            .validate()
            .map_err(|m| ConfigError::new("acquisition", m))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Init,
    Bo,
    Random,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Init => "init",
            Phase::Bo => "bo",
            Phase::Random => "random",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub index: usize,
    pub params: DesignParams<f64>,
    pub d: f64,
    pub mass: f64,
    pub max_abs_stress: f64,
    pub feasible: bool,
    pub failure_mode: FailureMode,
    /// Lightest feasible mass up to and including this record; `+inf` if none yet.
    pub best_so_far_mass: f64,
    pub phase: Phase,
}

/// Evaluations in the order they were made.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
}

impl OptimizationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn best_so_far(&self) -> f64 {
        self.records.last().map_or(f64::INFINITY, |r| r.best_so_far_mass)
    }

    fn push(&mut self, params: DesignParams<f64>, d: f64, result: &FeaResult<f64>, phase: Phase) {
        let previous = self.best_so_far();
        let best = if result.feasible { previous.min(result.mass) } else { previous };
        self.records.push(TraceRecord {
            index: self.records.len(),
            params,
            d,
            mass: result.mass,
            max_abs_stress: result.max_abs_stress,
            feasible: result.feasible,
            failure_mode: result.failure_mode,
            best_so_far_mass: best,
            phase,
        });
    }

    /// Lightest feasible record; earliest wins ties.
    pub fn best(&self) -> Option<BestResult> {
        let rec = self
            .records
            .iter()
            .filter(|r| r.feasible)
            .fold(None::<&TraceRecord>, |acc, r| match acc {
                Some(b) if b.mass <= r.mass => Some(b),
                _ => Some(r),
            })?;
        Some(BestResult {
            params: rec.params,
            d: rec.d,
            mass: rec.mass,
            max_abs_stress: rec.max_abs_stress,
            evaluations_used: self.records.len(),
            found_at_index: rec.index,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestResult {
    pub params: DesignParams<f64>,
    pub d: f64,
    pub mass: f64,
    pub max_abs_stress: f64,
    pub evaluations_used: usize,
    pub found_at_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trace: OptimizationTrace,
    pub best: BestResult,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no feasible design found in {} evaluations", .trace.len())]
    NoFeasibleDesign { trace: OptimizationTrace },
}

impl BoError {
    /// The trace of a completed run that found nothing feasible.
    pub fn trace(&self) -> Option<&OptimizationTrace> {
        match self {
            BoError::NoFeasibleDesign { trace } => Some(trace),
            BoError::Config(_) => None,
        }
    }
}

/// Latin hypercube design: per dimension one point in each stratum
/// `[k/n, (k+1)/n)`, with seeded jitter and stratum permutation.
pub fn latin_hypercube(n: usize, dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; dims]; n];
    let width = 1.0 / n as f64;
    for d in 0..dims {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        for (point, &k) in points.iter_mut().zip(&strata) {
            let v = (k as f64 + rng.gen::<f64>()) * width;
            // guard the upper stratum edge against rounding up
            point[d] = v.min((k + 1) as f64 * width - f64::EPSILON * width).max(k as f64 * width);
        }
    }
    points
}

/// Analyzes one in-bounds design under the configured physics.
pub fn evaluate(config: &BoConfig, params: DesignParams<f64>) -> (f64, FeaResult<f64>) {
    let design = derive_design(params).expect("optimizer proposes in-bounds designs");
    let result = analyze(&design, &config.material, &config.section, config.total_load);
    (design.d(), result)
}

/// Constraint value `g = max|σ| − yield`, with failed analyses pinned at `2·yield`.
pub fn constraint_value(config: &BoConfig, result: &FeaResult<f64>) -> f64 {
    let yield_strength = config.material.yield_strength;
    if result.failure_mode.is_analysis_failure() {
        2.0 * yield_strength
    } else {
        result.max_abs_stress - yield_strength
    }
}

fn finish(trace: OptimizationTrace) -> Result<RunOutput, BoError> {
    match trace.best() {
        Some(best) => Ok(RunOutput { trace, best }),
        None => Err(BoError::NoFeasibleDesign { trace }),
    }
}

struct History {
    unit: Vec<Vec<f64>>,
    mass: Vec<f64>,
    constraint: Vec<f64>,
    feasible: Vec<bool>,
}

fn fit_or_default(
    dataset: Dataset<f64>,
    restarts: usize,
    seed: u64,
    warm: Option<&GpHyperparams<f64>>,
) -> Option<GpModel<f64>> {
    fit_warm(dataset.clone(), restarts, seed, warm)
        .or_else(|_| GpModel::condition(GpHyperparams::default_for(dataset.dims()), dataset))
        .ok()
}

/// Runs the optimizer: a Latin-hypercube start followed by model-guided
/// evaluations until the budget is spent or progress stalls.
pub fn run(config: &BoConfig) -> Result<RunOutput, BoError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace = OptimizationTrace::default();
    let mut history = History {
        unit: Vec::new(),
        mass: Vec::new(),
        constraint: Vec::new(),
        feasible: Vec::new(),
    };
    let record = |x: Vec<f64>, phase: Phase, trace: &mut OptimizationTrace, history: &mut History| {
        let params = DesignParams::from_unit(&x);
        let (d, result) = evaluate(config, params);
        history.constraint.push(constraint_value(config, &result));
        history.mass.push(result.mass);
        history.feasible.push(result.feasible);
        history.unit.push(x);
        trace.push(params, d, &result, phase);
    };

    let lhs_seed: u64 = rng.gen();
    for x in latin_hypercube(config.n_init, DESIGN_DIMS, lhs_seed) {
        record(x, Phase::Init, &mut trace, &mut history);
    }

    let mut warm_objective: Option<GpHyperparams<f64>> = None;
    let mut warm_constraint: Option<GpHyperparams<f64>> = None;
    let mut stalled = 0usize;
    while trace.len() < config.budget {
        let iteration_seed: u64 = rng.gen();
        let x = propose(
            config,
            &history,
            iteration_seed,
            &mut warm_objective,
            &mut warm_constraint,
        );
        let before = trace.best_so_far();
        record(x, Phase::Bo, &mut trace, &mut history);
        if config.stall_patience > 0 {
            let after = trace.best_so_far();
            let improvement = if before.is_infinite() && after.is_infinite() {
                0.0
            } else {
                before - after
            };
            stalled = if improvement > config.min_improvement { 0 } else { stalled + 1 };
            if stalled >= config.stall_patience {
                break;
            }
        }
    }
    finish(trace)
}

fn propose(
    config: &BoConfig,
    history: &History,
    seed: u64,
    warm_objective: &mut Option<GpHyperparams<f64>>,
    warm_constraint: &mut Option<GpHyperparams<f64>>,
) -> Vec<f64> {
    let objective_seed = seed;
    let constraint_seed = seed ^ 0x9E37_79B9_7F4A_7C15;
    let acquisition_seed = seed.rotate_left(17) ^ 0xD1B5_4A32_D192_ED03;
    let weighting = config.acquisition.feasibility_weighting;
    let yield_strength = config.material.yield_strength;

    let objective_targets: Vec<f64> = if weighting {
        history.mass.clone()
    } else {
        history
            .mass
            .iter()
            .zip(&history.constraint)
            .map(|(&m, &g)| m + PENALTY_WEIGHT * (g / yield_strength).max(0.0))
            .collect()
    };
    let objective = Dataset::from_raw(DESIGN_DIMS, history.unit.clone(), &objective_targets)
        .ok()
        .and_then(|ds| fit_or_default(ds, config.gp_restarts, objective_seed, warm_objective.as_ref()));
    let Some(objective) = objective else {
        return fallback_point(seed);
    };
    *warm_objective = Some(objective.hyper().clone());

    let constraint = if weighting {
        let model = Dataset::from_raw(DESIGN_DIMS, history.unit.clone(), &history.constraint)
            .ok()
            .and_then(|ds| fit_or_default(ds, config.gp_restarts, constraint_seed, warm_constraint.as_ref()));
        if let Some(m) = &model {
            *warm_constraint = Some(m.hyper().clone());
        }
        model
    } else {
        None
    };

    let incumbent = if weighting {
        history
            .mass
            .iter()
            .zip(&history.feasible)
            .filter(|(_, &f)| f)
            .map(|(&m, _)| m)
            .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.min(m))))
            .map(|m| objective.dataset().standardize(m))
    } else {
        objective.dataset().targets().iter().copied().reduce(f64::min)
    };

    let acquisition = Acquisition {
        objective: &objective,
        constraint: constraint.as_ref(),
        config: &config.acquisition,
        incumbent,
    };
    maximize_acquisition(&acquisition, acquisition_seed)
        .into_iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect()
}

fn fallback_point(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..DESIGN_DIMS).map(|_| rng.gen::<f64>()).collect()
}

/// Uniform random search over the design box with the same budget and
/// stopping contract as [`run`] (no early stopping).
pub fn random_search(config: &BoConfig) -> Result<RunOutput, BoError> {
    if config.budget == 0 {
        return Err(ConfigError::new("budget", "must be >= 1").into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace = OptimizationTrace::default();
    for _ in 0..config.budget {
        let x: Vec<f64> = (0..DESIGN_DIMS).map(|_| rng.gen::<f64>()).collect();
        let params = DesignParams::from_unit(&x);
        let (d, result) = evaluate(config, params);
        trace.push(params, d, &result, Phase::Random);
    }
    finish(trace)
}
