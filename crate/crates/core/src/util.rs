//! Small numeric helpers shared across the crate.

/// Dot product with Neumaier compensation.
///
/// The incremental projector accumulates cross-products over up to 10^4
/// samples; plain summation loses enough bits there to threaten the 1e-8
/// oracle tolerances.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let term = x * y;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn sq_norm(a: &[f64]) -> f64 {
    dot(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive_on_small_input() {
        let a = [1.0, 2.0, 3.0];
        let b = [4.0, -5.0, 6.0];
        assert_eq!(dot(&a, &b), 12.0);
        assert_eq!(sq_norm(&a), 14.0);
    }

    #[test]
    fn compensation_handles_cancellation() {
        // 1 + 1e16 - 1e16 in an order that defeats plain summation
        let a = [1.0, 1.0, 1.0];
        let b = [1e16, 1.0, -1e16];
        assert_eq!(dot(&a, &b), 1.0);
    }
}
