//! Temporal-logic-shielded decoding for discrete navigation policies.
//!
//! A goal-seeking policy proposes per-action logits; a runtime monitor checks
//! each candidate action against a safety invariant one step ahead; a
//! decoding strategy (hard masking, soft reweighting, or fallback filtering)
//! turns the two into the action actually executed. The harness benchmarks
//! the strategies on procedurally generated scenes and reports satisfaction
//! and task-success rates.

pub mod decode;
pub mod dynamics;
pub mod harness;
pub mod policy;
pub mod scene;
pub mod stl;
