//! Greedy multi-task variable screening and exact support recovery.
//!
//! The pipeline has two stages. First, simultaneous orthogonal matching
//! pursuit ([`somp`]) greedily selects variables by their joint residual
//! reduction across all regression tasks, truncated by a modified BIC
//! ([`bic`]). Second, a per-task adaptive Lasso ([`alasso`]) on the screened
//! set recovers the exact positions of nonzero coefficients. Single-task
//! comparators (SIS, ISIS, OMP) live in [`baselines`], synthetic benchmark
//! generators in [`simgen`], and evaluation metrics in [`metrics`].

pub mod alasso;
pub mod baselines;
pub mod bic;
pub mod datamodel;
pub mod metrics;
pub mod projector;
pub mod simgen;
pub mod somp;
#[cfg(test)]
pub(crate) mod testutil;
mod util;

pub use datamodel::{
    CoefficientMatrix, MultiTaskDataset, SelectionPath, SelectionStep, SupportSet, TrueModel,
};
