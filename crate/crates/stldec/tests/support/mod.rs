//! Reference implementations and random generators shared by the
//! integration suites. Everything here is deliberately naive: explicit
//! window enumeration, a quadratic Until, textbook definitions with no code
//! shared with the library's evaluator.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use stldec::stl::{Formula, Interval, Predicate, Relation, Trajectory};

pub const CHANNELS: [&str; 3] = ["x", "z", "theta"];

fn lhs_at(p: &Predicate, traj: &Trajectory, t: usize) -> f64 {
    let mut lhs = 0.0;
    for (ch, c) in p.coefficients() {
        lhs += c * traj.channel(ch).expect("known channel")[t];
    }
    lhs
}

pub fn pred_margin(p: &Predicate, traj: &Trajectory, t: usize) -> f64 {
    let lhs = lhs_at(p, traj, t);
    match p.relation() {
        Relation::Ge | Relation::Gt => lhs - p.constant(),
        Relation::Le | Relation::Lt => p.constant() - lhs,
    }
}

fn pred_holds(p: &Predicate, traj: &Trajectory, t: usize) -> bool {
    let lhs = lhs_at(p, traj, t);
    match p.relation() {
        Relation::Ge => lhs >= p.constant(),
        Relation::Gt => lhs > p.constant(),
        Relation::Le => lhs <= p.constant(),
        Relation::Lt => lhs < p.constant(),
    }
}

// Absolute steps covered by a window anchored at t, clipped to the signal.
// Empty when the window starts past the final sample.
fn steps(win: &Option<Interval>, t: usize, len: usize) -> Vec<usize> {
    let last = len - 1;
    let lo = t.saturating_add(win.map_or(0, |iv| iv.lo));
    let hi = win.map_or(last, |iv| t.saturating_add(iv.hi)).min(last);
    if lo > hi {
        Vec::new()
    } else {
        (lo..=hi).collect()
    }
}

pub fn naive_robustness(f: &Formula, traj: &Trajectory, t: usize) -> f64 {
    match f {
        Formula::Pred(p) => pred_margin(p, traj, t),
        Formula::Not(g) => -naive_robustness(g, traj, t),
        Formula::And(a, b) => naive_robustness(a, traj, t).min(naive_robustness(b, traj, t)),
        Formula::Or(a, b) => naive_robustness(a, traj, t).max(naive_robustness(b, traj, t)),
        Formula::Globally(win, g) => steps(win, t, traj.len())
            .into_iter()
            .map(|u| naive_robustness(g, traj, u))
            .fold(f64::INFINITY, f64::min),
        Formula::Eventually(win, g) => steps(win, t, traj.len())
            .into_iter()
            .map(|u| naive_robustness(g, traj, u))
            .fold(f64::NEG_INFINITY, f64::max),
        Formula::Until(win, a, b) => {
            let mut out = f64::NEG_INFINITY;
            for u in steps(&Some(*win), t, traj.len()) {
                let mut held = naive_robustness(b, traj, u);
                for v in t..=u {
                    held = held.min(naive_robustness(a, traj, v));
                }
                out = out.max(held);
            }
            out
        }
    }
}

pub fn naive_boolean(f: &Formula, traj: &Trajectory, t: usize) -> bool {
    match f {
        Formula::Pred(p) => pred_holds(p, traj, t),
        Formula::Not(g) => !naive_boolean(g, traj, t),
        Formula::And(a, b) => naive_boolean(a, traj, t) && naive_boolean(b, traj, t),
        Formula::Or(a, b) => naive_boolean(a, traj, t) || naive_boolean(b, traj, t),
        Formula::Globally(win, g) => steps(win, t, traj.len())
            .into_iter()
            .all(|u| naive_boolean(g, traj, u)),
        Formula::Eventually(win, g) => steps(win, t, traj.len())
            .into_iter()
            .any(|u| naive_boolean(g, traj, u)),
        Formula::Until(win, a, b) => steps(&Some(*win), t, traj.len())
            .into_iter()
            .any(|u| naive_boolean(b, traj, u) && (t..=u).all(|v| naive_boolean(a, traj, v))),
    }
}

fn random_predicate(rng: &mut ChaCha8Rng) -> Predicate {
    loop {
        let n = rng.random_range(1..=2);
        let coeffs: Vec<(&str, f64)> = (0..n)
            .map(|_| {
                let ch = CHANNELS[rng.random_range(0..CHANNELS.len())];
                let mut c = 0.0;
                while c == 0.0 {
                    c = rng.random_range(-30..=30) as f64 / 10.0;
                }
                (ch, c)
            })
            .collect();
        let relation = match rng.random_range(0..4) {
            0 => Relation::Ge,
            1 => Relation::Gt,
            2 => Relation::Le,
            _ => Relation::Lt,
        };
        let constant = rng.random_range(-50..=50) as f64 / 10.0;
        // duplicate channels can merge to a zero coefficient; retry
        if let Ok(p) = Predicate::new(coeffs, relation, constant) {
            return p;
        }
    }
}

fn random_window(rng: &mut ChaCha8Rng) -> Interval {
    let lo = rng.random_range(0..=4);
    Interval::new(lo, lo + rng.random_range(0..=4)).expect("hi >= lo")
}

fn maybe_window(rng: &mut ChaCha8Rng) -> Option<Interval> {
    if rng.random_range(0..3) == 0 {
        None
    } else {
        Some(random_window(rng))
    }
}

/// Random formula of depth at most `depth`, over the pose channels.
pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    if depth == 0 || rng.random_range(0..10) < 3 {
        return Formula::Pred(random_predicate(rng));
    }
    match rng.random_range(0..6) {
        0 => Formula::not(random_formula(rng, depth - 1)),
        1 => Formula::and(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        2 => Formula::or(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        3 => Formula::globally(maybe_window(rng), random_formula(rng, depth - 1)),
        4 => Formula::eventually(maybe_window(rng), random_formula(rng, depth - 1)),
        _ => Formula::until(
            random_window(rng),
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
    }
}

/// Random temporal-free formula, the invariant-body shape.
pub fn random_invariant_body(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    if depth == 0 || rng.random_range(0..10) < 4 {
        return Formula::Pred(random_predicate(rng));
    }
    match rng.random_range(0..3) {
        0 => Formula::not(random_invariant_body(rng, depth - 1)),
        1 => Formula::and(
            random_invariant_body(rng, depth - 1),
            random_invariant_body(rng, depth - 1),
        ),
        _ => Formula::or(
            random_invariant_body(rng, depth - 1),
            random_invariant_body(rng, depth - 1),
        ),
    }
}

/// Random trajectory over the pose channels, 1 to 10 samples of +-5.
pub fn random_trajectory(rng: &mut ChaCha8Rng) -> Trajectory {
    let len = rng.random_range(1..=10);
    let mut gen = |_: usize| -> Vec<f64> {
        (0..len).map(|_| rng.random_range(-5.0..5.0)).collect()
    };
    let data: [(&str, Vec<f64>); 3] =
        [("x", gen(0)), ("z", gen(1)), ("theta", gen(2))];
    Trajectory::from_channels(data).expect("well-formed by construction")
}

/// First `len` samples of a trajectory.
pub fn prefix(traj: &Trajectory, len: usize) -> Trajectory {
    let channels = traj
        .channels()
        .iter()
        .map(|(k, v)| (k.clone(), v[..len].to_vec()))
        .collect();
    Trajectory::new(channels).expect("nonempty prefix")
}

/// Equality that treats matching infinities as equal and compares the rest
/// within `tol`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        a == b
    } else {
        (a - b).abs() <= tol
    }
}
