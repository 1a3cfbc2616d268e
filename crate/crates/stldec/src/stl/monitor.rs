//! Incremental robustness monitoring for invariants.

use super::eval::{eval_instant, EvalError};
use super::{Formula, Robustness, Sample};

/// Online monitor for `G body` where the body is temporal-free and the window
/// is unbounded. Folding the per-sample body robustness into a running
/// minimum reproduces the batch semantics on any prefix bit for bit. Before
/// the first sample the running minimum is the +inf identity of `min`.
#[derive(Clone, Debug)]
pub struct OnlineMonitor {
    body: Formula,
    running_min: f64,
    steps_seen: usize,
}

impl OnlineMonitor {
    /// Accepts only an unbounded `G` over a temporal-free body; a bounded
    /// window would stop tracking new samples and break prefix equivalence.
    pub fn new(formula: &Formula) -> Result<Self, EvalError> {
        match formula {
            Formula::Globally(None, body) if body.is_temporal_free() => Ok(OnlineMonitor {
                body: (**body).clone(),
                running_min: f64::INFINITY,
                steps_seen: 0,
            }),
            _ => Err(EvalError::NotInvariant),
        }
    }

    /// Robustness of the body at one sample, independent of monitor state.
    pub fn body_robustness(&self, sample: &Sample) -> Result<Robustness, EvalError> {
        Ok(Robustness(eval_instant(&self.body, sample)?))
    }

    /// The running minimum as it would be after appending `sample`, without
    /// advancing the monitor.
    pub fn would_append(&self, sample: &Sample) -> Result<Robustness, EvalError> {
        Ok(Robustness(
            self.running_min.min(eval_instant(&self.body, sample)?),
        ))
    }

    /// Folds one observed sample into the running minimum.
    pub fn append(&mut self, sample: &Sample) -> Result<Robustness, EvalError> {
        let r = self.would_append(sample)?;
        self.running_min = r.value();
        self.steps_seen += 1;
        Ok(r)
    }

    pub fn running_min(&self) -> Robustness {
        Robustness(self.running_min)
    }

    pub fn steps_seen(&self) -> usize {
        self.steps_seen
    }
}
