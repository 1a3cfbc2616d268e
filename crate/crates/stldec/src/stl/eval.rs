//! Boolean and quantitative semantics over finite trajectories.

use super::{Formula, Interval, Robustness, Sample, Trajectory};

/// Evaluation failure: the formula refers to data the trajectory lacks, or a
/// monitor was built from a formula outside the invariant class.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown channel '{0}'")]
    UnknownChannel(String),
    #[error("step {t} out of range for trajectory of length {len}")]
    StepOutOfRange { t: usize, len: usize },
    #[error("monitor formula must be an unbounded G over a temporal-free body")]
    NotInvariant,
}

/// Absolute window for a temporal operator anchored at `t`, clamped to the
/// last sample. `None` when the window starts past the end of the signal.
fn window(win: Option<Interval>, t: usize, last: usize) -> Option<(usize, usize)> {
    let (a, b) = match win {
        Some(iv) => (iv.lo, iv.hi),
        None => (0, usize::MAX),
    };
    let lo = t.saturating_add(a);
    let hi = t.saturating_add(b).min(last);
    if lo > last {
        None
    } else {
        Some((lo, hi))
    }
}

fn value_at(traj: &Trajectory, ch: &str, t: usize) -> Result<f64, EvalError> {
    traj.channel(ch)
        .map(|v| v[t])
        .ok_or_else(|| EvalError::UnknownChannel(ch.to_string()))
}

fn check_anchor(traj: &Trajectory, t: usize) -> Result<usize, EvalError> {
    let len = traj.len();
    if t >= len {
        return Err(EvalError::StepOutOfRange { t, len });
    }
    Ok(len - 1)
}

/// Boolean satisfaction of `f` at step `t`. Empty clamped windows make `G`
/// vacuously true and `F`/`U` false.
pub fn eval_boolean(f: &Formula, traj: &Trajectory, t: usize) -> Result<bool, EvalError> {
    let last = check_anchor(traj, t)?;
    bool_at(f, traj, t, last)
}

fn bool_at(f: &Formula, traj: &Trajectory, t: usize, last: usize) -> Result<bool, EvalError> {
    match f {
        Formula::Pred(p) => p.holds(|ch| value_at(traj, ch, t)),
        Formula::Not(g) => Ok(!bool_at(g, traj, t, last)?),
        Formula::And(a, b) => Ok(bool_at(a, traj, t, last)? && bool_at(b, traj, t, last)?),
        Formula::Or(a, b) => Ok(bool_at(a, traj, t, last)? || bool_at(b, traj, t, last)?),
        Formula::Globally(win, g) => {
            if let Some((lo, hi)) = window(*win, t, last) {
                for u in lo..=hi {
                    if !bool_at(g, traj, u, last)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        Formula::Eventually(win, g) => {
            if let Some((lo, hi)) = window(*win, t, last) {
                for u in lo..=hi {
                    if bool_at(g, traj, u, last)? {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        }
        Formula::Until(win, a, b) => {
            if let Some((lo, hi)) = window(Some(*win), t, last) {
                let mut held = true;
                for u in t..=hi {
                    held = held && bool_at(a, traj, u, last)?;
                    if u >= lo && held && bool_at(b, traj, u, last)? {
                        return Ok(true);
                    }
                    if !held && u >= lo {
                        break;
                    }
                }
            }
            Ok(false)
        }
    }
}

/// Quantitative robustness of `f` at step `t`: min over conjunction and `G`
/// windows, max over disjunction and `F` windows, negation for `!`, and for
/// `a U[l,u] b` the best over the window of `min(rob(b), min rob(a) so far)`.
pub fn robustness(f: &Formula, traj: &Trajectory, t: usize) -> Result<Robustness, EvalError> {
    let last = check_anchor(traj, t)?;
    Ok(Robustness(rob_at(f, traj, t, last)?))
}

fn rob_at(f: &Formula, traj: &Trajectory, t: usize, last: usize) -> Result<f64, EvalError> {
    match f {
        Formula::Pred(p) => p.margin(|ch| value_at(traj, ch, t)),
        Formula::Not(g) => Ok(-rob_at(g, traj, t, last)?),
        Formula::And(a, b) => Ok(rob_at(a, traj, t, last)?.min(rob_at(b, traj, t, last)?)),
        Formula::Or(a, b) => Ok(rob_at(a, traj, t, last)?.max(rob_at(b, traj, t, last)?)),
        Formula::Globally(win, g) => {
            let mut out = f64::INFINITY;
            if let Some((lo, hi)) = window(*win, t, last) {
                for u in lo..=hi {
                    out = out.min(rob_at(g, traj, u, last)?);
                }
            }
            Ok(out)
        }
        Formula::Eventually(win, g) => {
            let mut out = f64::NEG_INFINITY;
            if let Some((lo, hi)) = window(*win, t, last) {
                for u in lo..=hi {
                    out = out.max(rob_at(g, traj, u, last)?);
                }
            }
            Ok(out)
        }
        Formula::Until(win, a, b) => {
            let mut out = f64::NEG_INFINITY;
            if let Some((lo, hi)) = window(Some(*win), t, last) {
                // held = min robustness of `a` over [t, u], folded incrementally
                let mut held = f64::INFINITY;
                for u in t..=hi {
                    held = held.min(rob_at(a, traj, u, last)?);
                    if u >= lo {
                        out = out.max(held.min(rob_at(b, traj, u, last)?));
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Robustness of a temporal-free formula at a single sample. Shares the
/// predicate arithmetic with the batch path so online and batch agree
/// bit for bit.
pub(crate) fn eval_instant(f: &Formula, sample: &Sample) -> Result<f64, EvalError> {
    match f {
        Formula::Pred(p) => p.margin(|ch| {
            sample
                .get(ch)
                .copied()
                .ok_or_else(|| EvalError::UnknownChannel(ch.to_string()))
        }),
        Formula::Not(g) => Ok(-eval_instant(g, sample)?),
        Formula::And(a, b) => Ok(eval_instant(a, sample)?.min(eval_instant(b, sample)?)),
        Formula::Or(a, b) => Ok(eval_instant(a, sample)?.max(eval_instant(b, sample)?)),
        _ => Err(EvalError::NotInvariant),
    }
}
