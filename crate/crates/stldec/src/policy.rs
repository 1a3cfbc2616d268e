//! Goal-seeking scoring policy and the samplers that turn scores into actions.
//!
//! The policy is deliberately simple: it looks one step ahead with the exact
//! dynamics and scores each action by the progress its successor makes toward
//! the goal plus how well the successor heading points at the goal. It knows
//! nothing about keep-out boxes or rooms; keeping it safety-blind is what
//! gives the decoding strategies something to do.

use crate::dynamics::{normalize_angle, predict_successors, Action, DynamicsConfig, State};
use crate::scene::Scene;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Per-action scores, indexed by [`Action::index`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Logits(pub [f64; Action::COUNT]);

impl Logits {
    pub fn get(&self, a: Action) -> f64 {
        self.0[a.index()]
    }

    /// Highest-scoring action; ties break toward the lowest index.
    pub fn argmax(&self) -> Action {
        let mut best = 0;
        for i in 1..Action::COUNT {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        Action::ALL[best]
    }
}

/// Score assigned to Done: positive within `done_distance` of the goal,
/// negative outside.
pub const DONE_LOGIT: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicyConfig {
    pub goal_weight: f64,
    pub heading_weight: f64,
    pub done_distance: f64,
    pub temperature: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            goal_weight: 5.0,
            heading_weight: 2.0,
            done_distance: 1.0,
            temperature: 1.0,
        }
    }
}

/// Scores every action from `s`.
///
/// For a movement action with successor `n`:
/// `goal_weight * (d(s) - d(n)) + heading_weight * cos(bearing(n) - n.theta)`
/// where `bearing(n)` points from `n` at the goal. Done gets a flat
/// `+-DONE_LOGIT` gated on `done_distance`. Every score is divided by the
/// temperature, which rescales sampling entropy without moving the argmax.
pub fn compute_logits(
    s: State,
    scene: &Scene,
    cfg: &PolicyConfig,
    dyn_cfg: &DynamicsConfig,
) -> Logits {
    let d0 = scene.goal_distance(s.x, s.z);
    let succ = predict_successors(s, dyn_cfg);
    let mut out = [0.0; Action::COUNT];
    for a in Action::ALL {
        let i = a.index();
        out[i] = if a == Action::Done {
            if d0 <= cfg.done_distance {
                DONE_LOGIT
            } else {
                -DONE_LOGIT
            }
        } else {
            let n = succ[i];
            let progress = d0 - scene.goal_distance(n.x, n.z);
            let bearing = (scene.goal.z - n.z).atan2(scene.goal.x - n.x);
            let align = normalize_angle(bearing - n.theta).cos();
            cfg.goal_weight * progress + cfg.heading_weight * align
        } / cfg.temperature;
    }
    Logits(out)
}

/// How an action is drawn from a score vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum SamplerMode {
    Greedy,
    Temperature,
    TopK { k: usize },
}

/// Sampler mode plus the seed that anchors every stochastic draw.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerSpec {
    pub mode: SamplerMode,
    pub seed: u64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec { mode: SamplerMode::Temperature, seed: 0 }
    }
}

#[derive(Debug, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error("every action is masked out")]
    AllMasked,
    #[error("top-k of {k} is outside 1..={vocab}")]
    BadK { k: usize, vocab: usize },
}

/// Draws one action. Masked entries (negative infinity) carry exactly zero
/// weight and are skipped outright, so they can never be selected, not even
/// through rounding at bucket boundaries.
pub fn sample<R: Rng + ?Sized>(
    logits: &Logits,
    mode: SamplerMode,
    rng: &mut R,
) -> Result<Action, SampleError> {
    if logits.0.iter().all(|v| *v == f64::NEG_INFINITY) {
        return Err(SampleError::AllMasked);
    }
    match mode {
        SamplerMode::Greedy => Ok(logits.argmax()),
        SamplerMode::Temperature => Ok(softmax_draw(&logits.0, rng)),
        SamplerMode::TopK { k } => {
            if k == 0 || k > Action::COUNT {
                return Err(SampleError::BadK { k, vocab: Action::COUNT });
            }
            let mut order: [usize; Action::COUNT] = std::array::from_fn(|i| i);
            order.sort_by(|&a, &b| {
                logits.0[b]
                    .partial_cmp(&logits.0[a])
                    .expect("logits are never NaN")
                    .then(a.cmp(&b))
            });
            let mut restricted = [f64::NEG_INFINITY; Action::COUNT];
            for &i in order.iter().take(k) {
                restricted[i] = logits.0[i];
            }
            Ok(softmax_draw(&restricted, rng))
        }
    }
}

// Max-subtracted softmax walk. exp(-inf - max) is exactly 0.0, and the max
// entry itself contributes exp(0) = 1, so the total is always >= 1 here.
fn softmax_draw<R: Rng + ?Sized>(vals: &[f64; Action::COUNT], rng: &mut R) -> Action {
    let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: [f64; Action::COUNT] = std::array::from_fn(|i| (vals[i] - m).exp());
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last_positive = i;
        if u < w {
            return Action::ALL[i];
        }
        u -= w;
    }
    // float summation slack can push u past the final bucket
    Action::ALL[last_positive]
}
