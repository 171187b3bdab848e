//! Shared helpers for unit tests.

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Independent oracle: RSS of OLS on the listed columns via dense normal
/// equations and Gauss-Jordan elimination. Deliberately naive.
pub(crate) fn brute_force_rss(design: &Array2<f64>, y: &[f64], support: &[usize]) -> f64 {
    let k = support.len();
    if k == 0 {
        return y.iter().map(|v| v * v).sum();
    }
    let cols: Vec<Vec<f64>> = support
        .iter()
        .map(|&j| design.column(j).to_vec())
        .collect();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, z)| x * z).sum();
        }
        a[i][k] = cols[i].iter().zip(y).map(|(x, z)| x * z).sum();
    }
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    (0..y.len())
        .map(|i| {
            let fit: f64 = (0..k).map(|c| beta[c] * cols[c][i]).sum();
            (y[i] - fit).powi(2)
        })
        .sum()
}

/// OLS coefficients on the listed columns, same elimination path as
/// [`brute_force_rss`].
pub(crate) fn brute_force_ols(design: &Array2<f64>, y: &[f64], support: &[usize]) -> Vec<f64> {
    let k = support.len();
    let cols: Vec<Vec<f64>> = support
        .iter()
        .map(|&j| design.column(j).to_vec())
        .collect();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, z)| x * z).sum();
        }
        a[i][k] = cols[i].iter().zip(y).map(|(x, z)| x * z).sum();
    }
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..k).map(|i| a[i][k] / a[i][i]).collect()
}

pub(crate) fn random_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(rand_distr::StandardNormal))
}

pub(crate) fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect()
}
