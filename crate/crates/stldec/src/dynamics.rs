//! Unicycle kinematics over a fixed discrete action vocabulary.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Wraps an angle into `[-pi, pi)`.
pub fn normalize_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid may round up to the modulus itself for tiny negative inputs
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// Planar pose; `theta` stays in `[-pi, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub z: f64,
    pub theta: f64,
}

impl State {
    pub fn new(x: f64, z: f64, theta: f64) -> Self {
        State { x, z, theta: normalize_angle(theta) }
    }
}

/// Action vocabulary with a fixed index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    MoveAhead,
    MoveBack,
    RotateLeft,
    RotateRight,
    Done,
}

impl Action {
    pub const COUNT: usize = 5;
    pub const ALL: [Action; Action::COUNT] = [
        Action::MoveAhead,
        Action::MoveBack,
        Action::RotateLeft,
        Action::RotateRight,
        Action::Done,
    ];

    pub fn index(self) -> usize {
        match self {
            Action::MoveAhead => 0,
            Action::MoveBack => 1,
            Action::RotateLeft => 2,
            Action::RotateRight => 3,
            Action::Done => 4,
        }
    }

    /// Rotations and Done leave (x, z) untouched, so a safe pose stays safe
    /// under any position-dependent invariant.
    pub fn is_position_preserving(self) -> bool {
        matches!(self, Action::RotateLeft | Action::RotateRight | Action::Done)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::MoveAhead => "MoveAhead",
            Action::MoveBack => "MoveBack",
            Action::RotateLeft => "RotateLeft",
            Action::RotateRight => "RotateRight",
            Action::Done => "Done",
        })
    }
}

/// Step sizes plus optional per-step execution noise (standard deviations;
/// zero disables the noise entirely).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicsConfig {
    pub forward_step: f64,
    pub yaw_step: f64,
    pub noise_translation_sigma: f64,
    pub noise_yaw_sigma: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            forward_step: 0.2,
            yaw_step: PI / 6.0,
            noise_translation_sigma: 0.0,
            noise_yaw_sigma: 0.0,
        }
    }
}

impl DynamicsConfig {
    pub fn has_noise(&self) -> bool {
        self.noise_translation_sigma > 0.0 || self.noise_yaw_sigma > 0.0
    }
}

/// Noise-free transition. `Done` is the identity.
pub fn step(s: State, a: Action, cfg: &DynamicsConfig) -> State {
    let d = cfg.forward_step;
    match a {
        Action::MoveAhead => State {
            x: s.x + d * s.theta.cos(),
            z: s.z + d * s.theta.sin(),
            theta: s.theta,
        },
        Action::MoveBack => State {
            x: s.x - d * s.theta.cos(),
            z: s.z - d * s.theta.sin(),
            theta: s.theta,
        },
        Action::RotateLeft => State { x: s.x, z: s.z, theta: normalize_angle(s.theta + cfg.yaw_step) },
        Action::RotateRight => State { x: s.x, z: s.z, theta: normalize_angle(s.theta - cfg.yaw_step) },
        Action::Done => s,
    }
}

/// Transition with independent zero-mean Gaussian offsets on x, z, and theta.
/// With both sigmas zero this is exactly `step` and consumes no randomness.
pub fn step_noisy<R: Rng + ?Sized>(s: State, a: Action, cfg: &DynamicsConfig, rng: &mut R) -> State {
    let nominal = step(s, a, cfg);
    if !cfg.has_noise() {
        return nominal;
    }
    let nx: f64 = rng.sample(StandardNormal);
    let nz: f64 = rng.sample(StandardNormal);
    let nt: f64 = rng.sample(StandardNormal);
    State::new(
        nominal.x + cfg.noise_translation_sigma * nx,
        nominal.z + cfg.noise_translation_sigma * nz,
        nominal.theta + cfg.noise_yaw_sigma * nt,
    )
}

/// Noise-free successor for every action, indexed like `Action::ALL`.
pub fn predict_successors(s: State, cfg: &DynamicsConfig) -> [State; Action::COUNT] {
    Action::ALL.map(|a| step(s, a, cfg))
}
