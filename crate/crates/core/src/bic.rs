//! Modified BIC for high-dimensional model selection:
//! `log(RSS / (nT)) + |M| (log n + 2 log p) / n`.
//!
//! Used both to truncate greedy selection paths and to pick the adaptive
//! Lasso penalty (with T = 1).

/// Penalty constants of the criterion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BicParams {
    pub n: usize,
    pub num_tasks: usize,
    pub p: usize,
    /// RSS is clamped below by this value so interpolating models score
    /// finitely; selection among them then falls to the size penalty.
    pub rss_floor: f64,
}

impl BicParams {
    pub fn new(n: usize, num_tasks: usize, p: usize) -> Self {
        assert!(n >= 1 && num_tasks >= 1 && p >= 1);
        Self {
            n,
            num_tasks,
            p,
            rss_floor: 1e-12 * (n * num_tasks) as f64,
        }
    }

    pub fn with_rss_floor(mut self, floor: f64) -> Self {
        assert!(floor > 0.0);
        self.rss_floor = floor;
        self
    }

    /// Penalty increment per additional variable.
    pub fn penalty_per_variable(&self) -> f64 {
        let n = self.n as f64;
        ((self.n as f64).ln() + 2.0 * (self.p as f64).ln()) / n
    }
}

/// Scores a model of the given size and residual sum of squares.
pub fn bic_score(rss: f64, model_size: usize, params: &BicParams) -> f64 {
    debug_assert!(rss >= 0.0);
    let nt = (params.n * params.num_tasks) as f64;
    (rss.max(params.rss_floor) / nt).ln() + model_size as f64 * params.penalty_per_variable()
}
