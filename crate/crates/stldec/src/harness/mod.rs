//! Batch experiment runner: strategy-by-spec comparison, noise ablation,
//! beta sweep. Everything downstream of a config is a pure function of it,
//! so two runs with the same config emit byte-identical artifacts.

pub mod export;

use crate::decode::{rollout_episode, DecodeError, DecodeStepTrace, EpisodeSetup, Strategy};
use crate::dynamics::{Action, DynamicsConfig};
use crate::policy::{PolicyConfig, SamplerSpec};
use crate::scene::{generate_scene, Scene, SceneError, SceneGenConfig, SpecKind};
use crate::stl::Trajectory;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default RCD sharpness. Margins in the generated worlds span roughly
/// [0, 4] m; a quarter keeps exp(alpha*r) within one decade across that
/// range so the shift rewards clearance without freezing the agent at its
/// closest-approach record.
pub const DEFAULT_ALPHA: f64 = 0.25;
/// Default RCD constraint weight, sized against the policy's logit scale to
/// land satisfaction strictly between the unconstrained and hard-masked
/// extremes.
pub const DEFAULT_BETA: f64 = 30.0;

/// Noise ablation defaults: per-step translational sigma in meters and yaw
/// sigma in radians (one degree).
pub const ABLATION_SIGMA_T: f64 = 0.01;
pub const ABLATION_SIGMA_YAW_RAD: f64 = std::f64::consts::PI / 180.0;

/// Outcome of one rollout. Traces are kept in memory on request but never
/// serialized; trajectories are, so plots can be regenerated from the JSON
/// archive alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub scene_seed: u64,
    pub strategy: Strategy,
    pub spec_kind: SpecKind,
    pub stl_satisfied: bool,
    pub success: bool,
    pub steps: usize,
    pub min_robustness: f64,
    pub flagged_infeasible: bool,
    pub actions: Vec<Action>,
    pub trajectory: Trajectory,
    #[serde(skip)]
    pub traces: Vec<DecodeStepTrace>,
}

/// One aggregated table row. Rates are percentages in [0, 100].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub strategy: Strategy,
    pub spec_kind: SpecKind,
    pub stl_sat_rate: f64,
    pub success_rate: f64,
    pub mean_steps: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    pub n_episodes: usize,
    pub strategies: Vec<Strategy>,
    pub spec_kinds: Vec<SpecKind>,
    pub scene: SceneGenConfig,
    pub policy: PolicyConfig,
    pub dynamics: DynamicsConfig,
    pub sampler: SamplerSpec,
    pub max_steps: usize,
    pub base_seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            n_episodes: 200,
            strategies: vec![
                Strategy::Unconstrained,
                Strategy::Filtering { default_action: Action::RotateLeft },
                Strategy::Hcd,
                Strategy::Rcd { alpha: DEFAULT_ALPHA, beta: DEFAULT_BETA },
            ],
            spec_kinds: vec![SpecKind::Avoid, SpecKind::Geofence],
            scene: SceneGenConfig::default(),
            policy: PolicyConfig::default(),
            dynamics: DynamicsConfig::default(),
            sampler: SamplerSpec::default(),
            max_steps: 200,
            base_seed: 1,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.n_episodes == 0 {
            return bad("n_episodes must be at least 1".into());
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1".into());
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy is required".into());
        }
        if self.spec_kinds.is_empty() {
            return bad("at least one spec kind is required".into());
        }
        for s in &self.strategies {
            s.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        if !(self.scene.world_size > 0.0 && self.scene.world_size.is_finite()) {
            return bad(format!("world_size must be positive, got {}", self.scene.world_size));
        }
        if self.scene.n_rooms == 0 {
            return bad("n_rooms must be at least 1".into());
        }
        if self.scene.goal_min_dist >= self.scene.world_size * std::f64::consts::SQRT_2 {
            return bad(format!(
                "goal_min_dist {} cannot fit in a {} m world",
                self.scene.goal_min_dist, self.scene.world_size
            ));
        }
        if !(self.policy.temperature > 0.0 && self.policy.temperature.is_finite()) {
            return bad(format!(
                "policy temperature must be positive, got {}",
                self.policy.temperature
            ));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Full benchmark output: the config that produced it, the aggregate table,
/// and every episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub rows: Vec<MetricsRow>,
    pub episodes: Vec<EpisodeResult>,
}

// Episode rng seed depends on the sampler seed and the scene only, never on
// the strategy or spec kind. That is what makes per-episode action sequences
// directly comparable across strategies on the same scene.
fn episode_rng_seed(sampler_seed: u64, scene_seed: u64) -> u64 {
    sampler_seed ^ scene_seed.wrapping_mul(0x9E3779B97F4A7C15)
}

fn summarize(strategy: Strategy, spec_kind: SpecKind, eps: &[EpisodeResult]) -> MetricsRow {
    let n = eps.len();
    let sat = eps.iter().filter(|e| e.stl_satisfied).count();
    let succ = eps.iter().filter(|e| e.success).count();
    let steps: usize = eps.iter().map(|e| e.steps).sum();
    MetricsRow {
        strategy,
        spec_kind,
        stl_sat_rate: 100.0 * sat as f64 / n as f64,
        success_rate: 100.0 * succ as f64 / n as f64,
        mean_steps: steps as f64 / n as f64,
        n,
    }
}

/// Runs every (strategy, spec kind) cell over one shared scene set.
///
/// Scene seeds are `base_seed .. base_seed + n_episodes`, identical across
/// cells, so comparisons are paired. Episodes run in parallel; results come
/// back in deterministic order regardless of scheduling.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkReport, HarnessError> {
    cfg.validate()?;
    let scenes: Vec<Scene> = (0..cfg.n_episodes)
        .map(|i| generate_scene(&cfg.scene, cfg.base_seed.wrapping_add(i as u64)))
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    let mut episodes = Vec::new();
    for &strategy in &cfg.strategies {
        for &spec_kind in &cfg.spec_kinds {
            let setup = EpisodeSetup {
                strategy,
                spec_kind,
                policy: cfg.policy,
                dynamics: cfg.dynamics,
                sampler: cfg.sampler.mode,
                max_steps: cfg.max_steps,
                keep_traces: false,
            };
            let cell: Vec<EpisodeResult> = scenes
                .par_iter()
                .map(|scene| {
                    let mut rng = ChaCha8Rng::seed_from_u64(episode_rng_seed(
                        cfg.sampler.seed,
                        scene.seed,
                    ));
                    rollout_episode(&setup, scene, &mut rng)
                })
                .collect::<Result<_, _>>()?;
            rows.push(summarize(strategy, spec_kind, &cell));
            episodes.extend(cell);
        }
    }
    Ok(BenchmarkReport { config: cfg.clone(), rows, episodes })
}

/// Paired exact-vs-noisy arms of the dynamics-mismatch ablation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseAblation {
    pub exact: BenchmarkReport,
    pub noisy: BenchmarkReport,
}

/// Runs the configured strategies once with exact execution and once with
/// Gaussian execution noise, on the identical scene set. Only the shielded
/// strategies make sense here; anything else in the config is rejected.
pub fn run_noise_ablation(
    cfg: &BenchmarkConfig,
    sigma_translation: f64,
    sigma_yaw: f64,
) -> Result<NoiseAblation, HarnessError> {
    for s in &cfg.strategies {
        if !matches!(s, Strategy::Hcd | Strategy::Rcd { .. }) {
            return Err(HarnessError::Config(format!(
                "noise ablation covers hcd and rcd only, got {}",
                s.label()
            )));
        }
    }
    if !(sigma_translation >= 0.0) || !(sigma_yaw >= 0.0) {
        return Err(HarnessError::Config(format!(
            "noise sigmas must be nonnegative, got {} and {}",
            sigma_translation, sigma_yaw
        )));
    }
    let mut exact_cfg = cfg.clone();
    exact_cfg.dynamics.noise_translation_sigma = 0.0;
    exact_cfg.dynamics.noise_yaw_sigma = 0.0;
    let mut noisy_cfg = cfg.clone();
    noisy_cfg.dynamics.noise_translation_sigma = sigma_translation;
    noisy_cfg.dynamics.noise_yaw_sigma = sigma_yaw;
    Ok(NoiseAblation {
        exact: run_benchmark(&exact_cfg)?,
        noisy: run_benchmark(&noisy_cfg)?,
    })
}

/// Runs RCD at `alpha` for each `beta` over one shared scene set and returns
/// the rows sorted ascending in beta (spec kinds keep their config order
/// within a beta).
pub fn run_beta_sweep(
    cfg: &BenchmarkConfig,
    alpha: f64,
    betas: &[f64],
) -> Result<Vec<MetricsRow>, HarnessError> {
    if betas.is_empty() {
        return Err(HarnessError::Config("beta sweep needs at least one beta".into()));
    }
    let mut sorted = betas.to_vec();
    if sorted.iter().any(|b| b.is_nan()) {
        return Err(HarnessError::Config("beta sweep got a NaN beta".into()));
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("checked for NaN"));

    let mut rows = Vec::new();
    for beta in sorted {
        let mut sweep_cfg = cfg.clone();
        sweep_cfg.strategies = vec![Strategy::Rcd { alpha, beta }];
        rows.extend(run_benchmark(&sweep_cfg)?.rows);
    }
    Ok(rows)
}
