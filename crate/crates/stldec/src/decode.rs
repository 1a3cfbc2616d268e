//! Decoding strategies: how per-action scores plus a safety monitor turn
//! into the action that actually executes.
//!
//! All four strategies share the same shape. Score the actions, look one
//! step ahead with exact dynamics, ask the monitor what the running
//! robustness would become after each candidate, then transform the scores
//! (or the sampled choice) accordingly. The monitor is never mutated here;
//! committing the executed step is the episode loop's job.

use crate::dynamics::{predict_successors, step, step_noisy, Action, DynamicsConfig, State};
use crate::harness::EpisodeResult;
use crate::policy::{compute_logits, sample, Logits, PolicyConfig, SampleError, SamplerMode};
use crate::scene::{build_spec, check_success, Scene, SceneError, SpecKind};
use crate::stl::{robustness, EvalError, OnlineMonitor, Sample, Trajectory};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Exponent clamp for the robustness reweighting; keeps every adjusted
/// logit finite no matter how large `alpha * r` gets.
pub const RCD_EXP_CLAMP: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Strategy {
    /// Sample straight from the raw scores.
    Unconstrained,
    /// Sample raw, then swap in `default_action` if the choice is predicted
    /// to violate. The default must keep (x, z) fixed so the swap itself can
    /// never be the violation.
    Filtering { default_action: Action },
    /// Mask predicted-violating actions to negative infinity before
    /// sampling.
    Hcd,
    /// Shift each logit by `beta * exp(alpha * r)` where `r` is the
    /// hypothetical running robustness after that action.
    Rcd { alpha: f64, beta: f64 },
}

#[derive(Debug, PartialEq, thiserror::Error)]
pub enum StrategyError {
    #[error("filtering default action {0} moves the agent; it must preserve position")]
    BadDefault(Action),
    #[error("rcd alpha must be finite and positive, got {0}")]
    BadAlpha(f64),
    #[error("rcd beta must be finite and nonnegative, got {0}")]
    BadBeta(f64),
}

impl Strategy {
    pub fn validate(&self) -> Result<(), StrategyError> {
        match *self {
            Strategy::Filtering { default_action } if !default_action.is_position_preserving() => {
                Err(StrategyError::BadDefault(default_action))
            }
            Strategy::Rcd { alpha, .. } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(StrategyError::BadAlpha(alpha))
            }
            Strategy::Rcd { beta, .. } if !(beta >= 0.0 && beta.is_finite()) => {
                Err(StrategyError::BadBeta(beta))
            }
            _ => Ok(()),
        }
    }

    /// Stable name used in CSV rows and plot legends. Comma-free so the CSV
    /// stays trivially parseable.
    pub fn label(&self) -> String {
        match self {
            Strategy::Unconstrained => "unconstrained".into(),
            Strategy::Filtering { default_action } => format!("filtering[{}]", default_action),
            Strategy::Hcd => "hcd".into(),
            Strategy::Rcd { alpha, beta } => format!("rcd[alpha={};beta={}]", alpha, beta),
        }
    }
}

/// Everything one decoding step saw and decided.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeStepTrace {
    pub raw_logits: Logits,
    pub adjusted_logits: Logits,
    pub robustness_per_action: [f64; Action::COUNT],
    pub chosen: Action,
    pub violated_mask: [bool; Action::COUNT],
}

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// Monitor-facing view of a pose.
pub fn state_sample(s: State) -> Sample {
    Sample::from([
        ("x".to_string(), s.x),
        ("z".to_string(), s.z),
        ("theta".to_string(), s.theta),
    ])
}

/// Hypothetical running robustness after each action, via exact one-step
/// prediction. The monitor is read, not advanced.
pub fn successor_robustness(
    s: State,
    monitor: &OnlineMonitor,
    cfg: &DynamicsConfig,
) -> Result<[f64; Action::COUNT], EvalError> {
    let succ = predict_successors(s, cfg);
    let mut out = [0.0; Action::COUNT];
    for (i, n) in succ.iter().enumerate() {
        out[i] = monitor.would_append(&state_sample(*n))?.value();
    }
    Ok(out)
}

fn mask_from(l: &Logits, r: &[f64; Action::COUNT]) -> Logits {
    Logits(std::array::from_fn(|i| {
        if r[i] < 0.0 {
            f64::NEG_INFINITY
        } else {
            l.0[i]
        }
    }))
}

fn reweight_from(l: &Logits, r: &[f64; Action::COUNT], alpha: f64, beta: f64) -> Logits {
    if beta == 0.0 {
        return *l;
    }
    Logits(std::array::from_fn(|i| {
        l.0[i] + beta * (alpha * r[i]).clamp(-RCD_EXP_CLAMP, RCD_EXP_CLAMP).exp()
    }))
}

/// Sets predicted-violating entries to negative infinity; the rest pass
/// through bit-exact. An all-masked result is legal and left to the caller.
pub fn mask_logits_hcd(
    l: &Logits,
    s: State,
    monitor: &OnlineMonitor,
    cfg: &DynamicsConfig,
) -> Result<Logits, EvalError> {
    Ok(mask_from(l, &successor_robustness(s, monitor, cfg)?))
}

/// Adds `beta * exp(alpha * r_i)` to each logit, with the exponent clamped.
/// `beta = 0` returns the input bit-exact.
pub fn reweight_logits_rcd(
    l: &Logits,
    s: State,
    monitor: &OnlineMonitor,
    cfg: &DynamicsConfig,
    alpha: f64,
    beta: f64,
) -> Result<Logits, EvalError> {
    Ok(reweight_from(l, &successor_robustness(s, monitor, cfg)?, alpha, beta))
}

/// Samples from the unmodified scores and substitutes `default` when the
/// sampled action is predicted to violate.
pub fn filter_action<R: Rng + ?Sized>(
    l: &Logits,
    s: State,
    monitor: &OnlineMonitor,
    cfg: &DynamicsConfig,
    default: Action,
    mode: SamplerMode,
    rng: &mut R,
) -> Result<Action, DecodeError> {
    let r = successor_robustness(s, monitor, cfg)?;
    let candidate = sample(l, mode, rng)?;
    Ok(if r[candidate.index()] < 0.0 { default } else { candidate })
}

/// Runs one decoding step: score, adjust per strategy, select.
///
/// When HCD finds every action violating it does not sample at all; it takes
/// the action with the largest (least negative) robustness so the failure is
/// as shallow as possible, and the all-true `violated_mask` marks the
/// episode for reporting.
pub fn decode_step<R: Rng + ?Sized>(
    strategy: &Strategy,
    s: State,
    scene: &Scene,
    monitor: &OnlineMonitor,
    policy_cfg: &PolicyConfig,
    dyn_cfg: &DynamicsConfig,
    mode: SamplerMode,
    rng: &mut R,
) -> Result<(Action, DecodeStepTrace), DecodeError> {
    let raw = compute_logits(s, scene, policy_cfg, dyn_cfg);
    let r = successor_robustness(s, monitor, dyn_cfg)?;
    let violated_mask: [bool; Action::COUNT] = std::array::from_fn(|i| r[i] < 0.0);

    let (adjusted, chosen) = match strategy {
        Strategy::Unconstrained => (raw, sample(&raw, mode, rng)?),
        Strategy::Filtering { default_action } => {
            let candidate = sample(&raw, mode, rng)?;
            let a = if r[candidate.index()] < 0.0 {
                *default_action
            } else {
                candidate
            };
            (raw, a)
        }
        Strategy::Hcd => {
            let masked = mask_from(&raw, &r);
            if violated_mask.iter().all(|&v| v) {
                let mut best = 0;
                for i in 1..Action::COUNT {
                    if r[i] > r[best] {
                        best = i;
                    }
                }
                (masked, Action::ALL[best])
            } else {
                (masked, sample(&masked, mode, rng)?)
            }
        }
        Strategy::Rcd { alpha, beta } => {
            let adjusted = reweight_from(&raw, &r, *alpha, *beta);
            (adjusted, sample(&adjusted, mode, rng)?)
        }
    };

    let trace = DecodeStepTrace {
        raw_logits: raw,
        adjusted_logits: adjusted,
        robustness_per_action: r,
        chosen,
        violated_mask,
    };
    Ok((chosen, trace))
}

/// Per-episode knobs bundled so rollouts stay a one-call affair.
#[derive(Clone, Debug)]
pub struct EpisodeSetup {
    pub strategy: Strategy,
    pub spec_kind: SpecKind,
    pub policy: PolicyConfig,
    pub dynamics: DynamicsConfig,
    pub sampler: SamplerMode,
    pub max_steps: usize,
    pub keep_traces: bool,
}

/// Stacks per-state channels into a trajectory.
pub fn trajectory_from_states(states: &[State]) -> Trajectory {
    Trajectory::from_channels([
        ("x", states.iter().map(|s| s.x).collect()),
        ("z", states.iter().map(|s| s.z).collect()),
        ("theta", states.iter().map(|s| s.theta).collect()),
    ])
    .expect("equal-length channels")
}

/// Rolls out one episode: decode, execute, monitor, until Done or the step
/// cap. Prediction inside decoding always uses the exact step; noise, when
/// configured, perturbs execution only. That gap is the model-mismatch
/// mechanism the noise ablation measures.
pub fn rollout_episode<R: Rng + ?Sized>(
    setup: &EpisodeSetup,
    scene: &Scene,
    rng: &mut R,
) -> Result<EpisodeResult, DecodeError> {
    let spec = build_spec(scene, setup.spec_kind)?;
    let mut monitor = OnlineMonitor::new(&spec)?;

    let mut states = vec![scene.start];
    monitor.append(&state_sample(scene.start))?;

    let mut actions = Vec::new();
    let mut traces = Vec::new();
    let mut flagged_infeasible = false;

    for _ in 0..setup.max_steps {
        let s = *states.last().expect("states never empty");
        let (a, trace) = decode_step(
            &setup.strategy,
            s,
            scene,
            &monitor,
            &setup.policy,
            &setup.dynamics,
            setup.sampler,
            rng,
        )?;
        let next = if setup.dynamics.has_noise() {
            step_noisy(s, a, &setup.dynamics, rng)
        } else {
            step(s, a, &setup.dynamics)
        };
        states.push(next);
        monitor.append(&state_sample(next))?;
        flagged_infeasible |= trace.violated_mask.iter().all(|&v| v);
        if setup.keep_traces {
            traces.push(trace);
        }
        actions.push(a);
        if a == Action::Done {
            break;
        }
    }

    let trajectory = trajectory_from_states(&states);
    let min_robustness = robustness(&spec, &trajectory, 0)?.value();
    // the batch verdict and the online monitor fold in the same order
    debug_assert_eq!(min_robustness.to_bits(), monitor.running_min().value().to_bits());

    let success = check_success(&trajectory, &actions, scene);
    Ok(EpisodeResult {
        scene_seed: scene.seed,
        strategy: setup.strategy,
        spec_kind: setup.spec_kind,
        stl_satisfied: min_robustness >= 0.0,
        success,
        steps: actions.len(),
        min_robustness,
        flagged_infeasible,
        actions,
        trajectory,
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{build_avoid_spec, Point, Rect};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const NEG_INF: f64 = f64::NEG_INFINITY;

    fn boxed_scene() -> Scene {
        Scene {
            seed: 0,
            bounds: Rect::new(-5.0, 5.0, -5.0, 5.0),
            avoid_boxes: vec![Rect::centered(1.0, 0.0, 1.0, 1.0)],
            geofence_rooms: vec![Rect::new(-5.0, 5.0, -5.0, 5.0)],
            start: State::new(0.0, 0.0, 0.0),
            goal: Point { x: 3.0, z: 0.0 },
        }
    }

    fn fresh_monitor(scene: &Scene) -> OnlineMonitor {
        let mut m = OnlineMonitor::new(&build_avoid_spec(scene)).unwrap();
        m.append(&state_sample(scene.start)).unwrap();
        m
    }

    #[test]
    fn strategy_labels_are_stable() {
        assert_eq!(Strategy::Unconstrained.label(), "unconstrained");
        assert_eq!(
            Strategy::Filtering { default_action: Action::RotateLeft }.label(),
            "filtering[RotateLeft]"
        );
        assert_eq!(Strategy::Hcd.label(), "hcd");
        assert_eq!(Strategy::Rcd { alpha: 1.0, beta: 5.0 }.label(), "rcd[alpha=1;beta=5]");
    }

    #[test]
    fn strategy_validation_rejects_bad_parameters() {
        assert_eq!(
            Strategy::Filtering { default_action: Action::MoveAhead }.validate(),
            Err(StrategyError::BadDefault(Action::MoveAhead))
        );
        assert!(Strategy::Filtering { default_action: Action::RotateRight }.validate().is_ok());
        assert_eq!(
            Strategy::Rcd { alpha: 0.0, beta: 1.0 }.validate(),
            Err(StrategyError::BadAlpha(0.0))
        );
        assert_eq!(
            Strategy::Rcd { alpha: 1.0, beta: -0.5 }.validate(),
            Err(StrategyError::BadBeta(-0.5))
        );
        assert!(Strategy::Rcd { alpha: 1.0, beta: 0.0 }.validate().is_ok());
    }

    #[test]
    fn masking_blocks_the_box_and_passes_the_rest_bit_exact() {
        let scene = boxed_scene();
        // one step ahead of the box face at x = 0.5
        let s = State::new(0.4, 0.0, 0.0);
        let mut monitor = fresh_monitor(&scene);
        monitor.append(&state_sample(s)).unwrap();

        let raw = Logits([2.0, 1.0, 0.0, -1.0, -2.0]);
        let masked = mask_logits_hcd(&raw, s, &monitor, &DynamicsConfig::default()).unwrap();
        assert_eq!(masked.get(Action::MoveAhead), NEG_INF);
        for a in [Action::MoveBack, Action::RotateLeft, Action::RotateRight, Action::Done] {
            assert_eq!(masked.get(a).to_bits(), raw.get(a).to_bits());
        }
    }

    #[test]
    fn masking_far_from_trouble_is_identity() {
        let scene = boxed_scene();
        let s = State::new(-3.0, -3.0, 0.0);
        let mut monitor = fresh_monitor(&scene);
        monitor.append(&state_sample(s)).unwrap();

        let raw = Logits([0.3, -0.7, 1.1, 2.9, -4.0]);
        let masked = mask_logits_hcd(&raw, s, &monitor, &DynamicsConfig::default()).unwrap();
        for i in 0..Action::COUNT {
            assert_eq!(masked.0[i].to_bits(), raw.0[i].to_bits());
        }
    }

    #[test]
    fn reweight_matches_hand_computed_shifts() {
        let l = Logits([0.0, 0.0, NEG_INF, NEG_INF, NEG_INF]);
        let r = [1.0, -1.0, 0.0, 0.0, 0.0];
        let out = reweight_from(&l, &r, 1.0, 1.0);
        assert!((out.0[0] - 1f64.exp()).abs() < 1e-12);
        assert!((out.0[1] - (-1f64).exp()).abs() < 1e-12);
        assert_eq!(out.0[2], NEG_INF);

        // zero robustness shifts by exactly beta
        let out = reweight_from(&Logits([2.0; 5]), &[0.0; 5], 1.0, 1.0);
        assert_eq!(out.0[0], 3.0);
    }

    #[test]
    fn reweight_favors_the_safe_action_as_predicted() {
        let l = Logits([0.0, 0.0, NEG_INF, NEG_INF, NEG_INF]);
        let r = [1.0, -1.0, 0.0, 0.0, 0.0];
        let out = reweight_from(&l, &r, 1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 100_000;
        let mut safe = 0usize;
        for _ in 0..n {
            if sample(&out, SamplerMode::Temperature, &mut rng).unwrap() == Action::MoveAhead {
                safe += 1;
            }
        }
        let expect = 1.0 / (1.0 + ((-1f64).exp() - 1f64.exp()).exp());
        let got = safe as f64 / n as f64;
        assert!((got - expect).abs() < 0.01, "got {}, expect {}", got, expect);
    }

    #[test]
    fn reweight_with_zero_beta_is_bitwise_identity() {
        let l = Logits([1.5, -0.25, 3.75, NEG_INF, 0.0]);
        let r = [9.0, -4.0, 0.5, 2.0, -0.1];
        for alpha in [0.1, 1.0, 42.0] {
            let out = reweight_from(&l, &r, alpha, 0.0);
            for i in 0..Action::COUNT {
                assert_eq!(out.0[i].to_bits(), l.0[i].to_bits());
            }
        }
    }

    #[test]
    fn reweight_stays_finite_under_extreme_robustness() {
        let l = Logits([0.0; 5]);
        let r = [1e12, -1e12, 700.0, -700.0, 0.0];
        let out = reweight_from(&l, &r, 1.0, 1.0);
        for v in out.0 {
            assert!(v.is_finite());
        }
        assert_eq!(out.0[0], RCD_EXP_CLAMP.exp());
    }

    #[test]
    fn increasing_beta_weakly_increases_most_robust_action_probability() {
        let softmax_p = |l: &Logits, i: usize| {
            let m = l.0.iter().copied().fold(NEG_INF, f64::max);
            let e: Vec<f64> = l.0.iter().map(|v| (v - m).exp()).collect();
            e[i] / e.iter().sum::<f64>()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let l = Logits(std::array::from_fn(|_| rng.random_range(-3.0..3.0)));
            let r: [f64; 5] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
            let best = (0..5)
                .max_by(|&a, &b| r[a].partial_cmp(&r[b]).unwrap())
                .unwrap();
            let mut prev = 0.0;
            for beta in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
                let p = softmax_p(&reweight_from(&l, &r, 1.0, beta), best);
                assert!(
                    p >= prev - 1e-12,
                    "beta {} dropped p from {} to {}",
                    beta,
                    prev,
                    p
                );
                prev = p;
            }
        }
    }

    #[test]
    fn hcd_selection_matches_restricted_softmax() {
        // conditioning on the safe set is a plain renormalization
        let raw = Logits([1.2, 0.4, -0.3, 0.9, -1.5]);
        let r = [0.5, -1.0, 0.25, -0.25, 1.0];
        let masked = mask_from(&raw, &r);

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 200_000;
        let mut counts = [0usize; Action::COUNT];
        for _ in 0..n {
            counts[sample(&masked, SamplerMode::Temperature, &mut rng).unwrap().index()] += 1;
        }

        let safe: Vec<usize> = (0..5).filter(|&i| r[i] >= 0.0).collect();
        let z: f64 = safe.iter().map(|&i| raw.0[i].exp()).sum();
        for &i in &safe {
            let expect = raw.0[i].exp() / z;
            let got = counts[i] as f64 / n as f64;
            assert!((got - expect).abs() < 0.01, "action {}: {} vs {}", i, got, expect);
        }
        assert_eq!(counts[1] + counts[3], 0);
    }

    #[test]
    fn filter_substitutes_only_on_predicted_violation() {
        let scene = boxed_scene();
        let s = State::new(0.4, 0.0, 0.0);
        let mut monitor = fresh_monitor(&scene);
        monitor.append(&state_sample(s)).unwrap();
        let cfg = DynamicsConfig::default();

        // greedy picks MoveAhead, which dives into the box
        let raw = Logits([5.0, 0.0, 0.0, 0.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = filter_action(&raw, s, &monitor, &cfg, Action::RotateLeft, SamplerMode::Greedy, &mut rng)
            .unwrap();
        assert_eq!(a, Action::RotateLeft);

        // greedy picks MoveBack, which is safe
        let raw = Logits([0.0, 5.0, 0.0, 0.0, 0.0]);
        let a = filter_action(&raw, s, &monitor, &cfg, Action::RotateLeft, SamplerMode::Greedy, &mut rng)
            .unwrap();
        assert_eq!(a, Action::MoveBack);
    }

    #[test]
    fn unconstrained_trace_has_identical_adjusted_logits() {
        let scene = boxed_scene();
        let monitor = fresh_monitor(&scene);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (_, trace) = decode_step(
            &Strategy::Unconstrained,
            scene.start,
            &scene,
            &monitor,
            &PolicyConfig::default(),
            &DynamicsConfig::default(),
            SamplerMode::Temperature,
            &mut rng,
        )
        .unwrap();
        for i in 0..Action::COUNT {
            assert_eq!(trace.adjusted_logits.0[i].to_bits(), trace.raw_logits.0[i].to_bits());
        }
    }

    #[test]
    fn hcd_all_masked_falls_back_to_least_bad_action_without_sampling() {
        let scene = boxed_scene();
        // poison the prefix so every hypothetical running_min is negative
        let mut monitor = fresh_monitor(&scene);
        monitor
            .append(&Sample::from([
                ("x".to_string(), 1.0),
                ("z".to_string(), 0.0),
                ("theta".to_string(), 0.0),
            ]))
            .unwrap();
        assert!(monitor.running_min().value() < 0.0);

        let s = State::new(1.0, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let before = rng.clone();
        let (a, trace) = decode_step(
            &Strategy::Hcd,
            s,
            &scene,
            &monitor,
            &PolicyConfig::default(),
            &DynamicsConfig::default(),
            SamplerMode::Temperature,
            &mut rng,
        )
        .unwrap();
        assert!(trace.violated_mask.iter().all(|&v| v));
        // fallback consumed no randomness
        assert_eq!(rng, before);
        // deepest penetration is -0.5; MoveBack's successor improves the
        // instantaneous margin but the running min stays at the record
        let best: f64 = trace.robustness_per_action.iter().copied().fold(NEG_INF, f64::max);
        assert_eq!(trace.robustness_per_action[a.index()], best);
    }

    #[test]
    fn rollout_truncates_at_max_steps() {
        let mut scene = boxed_scene();
        scene.avoid_boxes.clear();
        scene.goal = Point { x: 4.5, z: 4.5 };
        let setup = EpisodeSetup {
            strategy: Strategy::Unconstrained,
            spec_kind: SpecKind::Avoid,
            policy: PolicyConfig::default(),
            dynamics: DynamicsConfig::default(),
            sampler: SamplerMode::Greedy,
            max_steps: 7,
            keep_traces: false,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ep = rollout_episode(&setup, &scene, &mut rng).unwrap();
        assert_eq!(ep.steps, 7);
        assert_eq!(ep.trajectory.len(), 8);
        assert!(!ep.success);
        // vacuous avoid spec
        assert!(ep.stl_satisfied);
    }

    #[test]
    fn rollout_stops_on_done_and_reports_success() {
        let mut scene = boxed_scene();
        scene.goal = Point { x: 0.2, z: 0.0 };
        let setup = EpisodeSetup {
            strategy: Strategy::Unconstrained,
            spec_kind: SpecKind::Avoid,
            policy: PolicyConfig::default(),
            dynamics: DynamicsConfig::default(),
            sampler: SamplerMode::Greedy,
            max_steps: 50,
            keep_traces: true,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ep = rollout_episode(&setup, &scene, &mut rng).unwrap();
        assert_eq!(ep.actions.last(), Some(&Action::Done));
        assert!(ep.success);
        assert_eq!(ep.traces.len(), ep.steps);
        assert_eq!(ep.trajectory.len(), ep.steps + 1);
    }

    #[test]
    fn hcd_and_filtering_never_violate_on_generated_scenes() {
        let cfg = crate::scene::SceneGenConfig::default();
        for strategy in [
            Strategy::Hcd,
            Strategy::Filtering { default_action: Action::RotateLeft },
        ] {
            for kind in [SpecKind::Avoid, SpecKind::Geofence] {
                for seed in 0..25 {
                    let scene = crate::scene::generate_scene(&cfg, seed).unwrap();
                    let setup = EpisodeSetup {
                        strategy,
                        spec_kind: kind,
                        policy: PolicyConfig::default(),
                        dynamics: DynamicsConfig::default(),
                        sampler: SamplerMode::Temperature,
                        max_steps: 200,
                        keep_traces: false,
                    };
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
                    let ep = rollout_episode(&setup, &scene, &mut rng).unwrap();
                    assert!(
                        ep.min_robustness >= 0.0,
                        "{} violated {} on seed {}: {}",
                        strategy.label(),
                        kind,
                        seed,
                        ep.min_robustness
                    );
                    assert!(!ep.flagged_infeasible);
                }
            }
        }
    }

    #[test]
    fn rcd_with_zero_beta_mirrors_unconstrained_exactly() {
        let cfg = crate::scene::SceneGenConfig::default();
        for seed in 0..10 {
            let scene = crate::scene::generate_scene(&cfg, seed).unwrap();
            let run = |strategy| {
                let setup = EpisodeSetup {
                    strategy,
                    spec_kind: SpecKind::Avoid,
                    policy: PolicyConfig::default(),
                    dynamics: DynamicsConfig::default(),
                    sampler: SamplerMode::Temperature,
                    max_steps: 200,
                    keep_traces: false,
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31) ^ 7);
                rollout_episode(&setup, &scene, &mut rng).unwrap()
            };
            let a = run(Strategy::Unconstrained);
            let b = run(Strategy::Rcd { alpha: 1.0, beta: 0.0 });
            assert_eq!(a.actions, b.actions, "seed {}", seed);
            assert_eq!(a.trajectory, b.trajectory);
        }
    }

    #[test]
    fn state_sample_exposes_the_three_channels() {
        let s = state_sample(State::new(1.0, -2.0, 0.5));
        assert_eq!(s.get("x"), Some(&1.0));
        assert_eq!(s.get("z"), Some(&-2.0));
        assert_eq!(s.get("theta"), Some(&0.5));
        assert_eq!(s.len(), 3);
    }
}
