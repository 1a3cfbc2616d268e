//! Discrete-time signal temporal logic over named real-valued channels.
//!
//! Formulas are evaluated against finite trajectories sampled at integer
//! steps. Two semantics are provided: Boolean satisfaction and quantitative
//! robustness, where a positive value means the trajectory satisfies the
//! formula with that much margin. Temporal windows are clamped to the end of
//! the signal, so `G` over a prefix behaves like an invariant over the
//! samples seen so far.

mod eval;
mod monitor;
mod parser;

pub use eval::{eval_boolean, robustness, EvalError};
pub use monitor::OnlineMonitor;
pub use parser::{parse_formula, ParseError};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// One observation instant, channel name to value.
pub type Sample = BTreeMap<String, f64>;

/// Comparison relation of an atomic predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Gt,
    Le,
    Lt,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Le => "<=",
            Relation::Lt => "<",
        })
    }
}

/// Error from building a degenerate predicate, interval, or trajectory.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("predicate needs at least one nonzero coefficient")]
    NoCoefficients,
    #[error("interval [{lo},{hi}] has upper bound below lower bound")]
    BadInterval { lo: usize, hi: usize },
    #[error("trajectory has no channels")]
    NoChannels,
    #[error("trajectory must contain at least one sample")]
    NoSamples,
    #[error("trajectory channels have mismatched lengths")]
    MismatchedLengths,
}

/// Affine predicate `sum(coeff_i * channel_i) relation constant`.
///
/// Robustness is the signed margin `lhs - constant` (flipped for `<=`/`<`),
/// so strict and non-strict relations share the same quantitative value and
/// differ only in Boolean satisfaction at exactly zero margin.
#[derive(Clone, Debug, PartialEq)]
pub struct Predicate {
    coefficients: BTreeMap<String, f64>,
    relation: Relation,
    constant: f64,
}

impl Predicate {
    pub fn new<I, S>(coefficients: I, relation: Relation, constant: f64) -> Result<Self, BuildError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (ch, c) in coefficients {
            *map.entry(ch.into()).or_insert(0.0) += c;
        }
        if !map.values().any(|c| *c != 0.0) {
            return Err(BuildError::NoCoefficients);
        }
        Ok(Predicate { coefficients: map, relation, constant })
    }

    /// Single-channel predicate with coefficient 1.
    pub fn single(channel: &str, relation: Relation, constant: f64) -> Self {
        Predicate {
            coefficients: BTreeMap::from([(channel.to_string(), 1.0)]),
            relation,
            constant,
        }
    }

    pub fn coefficients(&self) -> &BTreeMap<String, f64> {
        &self.coefficients
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    fn lhs<F>(&self, mut value_of: F) -> Result<f64, EvalError>
    where
        F: FnMut(&str) -> Result<f64, EvalError>,
    {
        let mut sum = 0.0;
        for (ch, c) in &self.coefficients {
            sum += c * value_of(ch)?;
        }
        Ok(sum)
    }

    /// Signed satisfaction margin at one sample; positive satisfies.
    pub(crate) fn margin<F>(&self, value_of: F) -> Result<f64, EvalError>
    where
        F: FnMut(&str) -> Result<f64, EvalError>,
    {
        let lhs = self.lhs(value_of)?;
        Ok(match self.relation {
            Relation::Ge | Relation::Gt => lhs - self.constant,
            Relation::Le | Relation::Lt => self.constant - lhs,
        })
    }

    pub(crate) fn holds<F>(&self, value_of: F) -> Result<bool, EvalError>
    where
        F: FnMut(&str) -> Result<f64, EvalError>,
    {
        let lhs = self.lhs(value_of)?;
        Ok(match self.relation {
            Relation::Ge => lhs >= self.constant,
            Relation::Gt => lhs > self.constant,
            Relation::Le => lhs <= self.constant,
            Relation::Lt => lhs < self.constant,
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (ch, c) in &self.coefficients {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if *c == 1.0 {
                f.write_str(ch)?;
            } else {
                write!(f, "{} * {}", c, ch)?;
            }
        }
        write!(f, " {} {}", self.relation, self.constant)
    }
}

/// Inclusive step window `[lo, hi]` relative to the evaluation instant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    pub fn new(lo: usize, hi: usize) -> Result<Self, BuildError> {
        if hi < lo {
            return Err(BuildError::BadInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Temporal formula. A missing window on `G`/`F` means "until the end of the
/// signal"; `U` always carries one.
#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Pred(Predicate),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Globally(Option<Interval>, Box<Formula>),
    Eventually(Option<Interval>, Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn globally(win: Option<Interval>, f: Formula) -> Formula {
        Formula::Globally(win, Box::new(f))
    }

    pub fn eventually(win: Option<Interval>, f: Formula) -> Formula {
        Formula::Eventually(win, Box::new(f))
    }

    pub fn until(win: Interval, a: Formula, b: Formula) -> Formula {
        Formula::Until(win, Box::new(a), Box::new(b))
    }

    pub fn is_temporal_free(&self) -> bool {
        match self {
            Formula::Pred(_) => true,
            Formula::Not(f) => f.is_temporal_free(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.is_temporal_free() && b.is_temporal_free()
            }
            Formula::Globally(..) | Formula::Eventually(..) | Formula::Until(..) => false,
        }
    }
}

fn fmt_window(win: &Option<Interval>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match win {
        Some(iv) => write!(f, "{}", iv),
        None => Ok(()),
    }
}

impl fmt::Display for Formula {
    /// Canonical concrete syntax; parses back to a structurally equal formula.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Pred(p) => write!(f, "{}", p),
            Formula::Not(g) => write!(f, "!({})", g),
            Formula::And(a, b) => write!(f, "({} & {})", a, b),
            Formula::Or(a, b) => write!(f, "({} | {})", a, b),
            Formula::Globally(win, g) => {
                f.write_str("G")?;
                fmt_window(win, f)?;
                write!(f, " {}", g)
            }
            Formula::Eventually(win, g) => {
                f.write_str("F")?;
                fmt_window(win, f)?;
                write!(f, " {}", g)
            }
            Formula::Until(win, a, b) => write!(f, "({} U{} {})", a, win, b),
        }
    }
}

/// Multi-channel discrete-time signal. Every channel shares one length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    channels: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn new(channels: BTreeMap<String, Vec<f64>>) -> Result<Self, BuildError> {
        let mut lens = channels.values().map(Vec::len);
        let Some(first) = lens.next() else {
            return Err(BuildError::NoChannels);
        };
        if first == 0 {
            return Err(BuildError::NoSamples);
        }
        if lens.any(|l| l != first) {
            return Err(BuildError::MismatchedLengths);
        }
        Ok(Trajectory { channels })
    }

    /// Convenience constructor for literal channel data.
    pub fn from_channels<const N: usize>(data: [(&str, Vec<f64>); N]) -> Result<Self, BuildError> {
        Trajectory::new(data.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn len(&self) -> usize {
        self.channels.values().next().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.get(name).map(Vec::as_slice)
    }

    pub fn channels(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.channels
    }

    pub fn sample_at(&self, t: usize) -> Option<Sample> {
        if t >= self.len() {
            return None;
        }
        Some(
            self.channels
                .iter()
                .map(|(k, v)| (k.clone(), v[t]))
                .collect(),
        )
    }
}

/// Quantitative satisfaction margin; positive means satisfied with slack.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Robustness(pub f64);

impl Robustness {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Robustness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
