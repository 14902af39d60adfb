//! Eigenvalues of Hermitian matrices and multiplicity clustering.
//!
//! A Hermitian `n x n` matrix `H = A + iB` is embedded as the real
//! symmetric `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every
//! eigenvalue doubled. The embedding is diagonalized by cyclic Jacobi
//! rotations.

use serde::{Deserialize, Serialize};

use crate::exactmath::GaussianRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EigenError {
    #[error("matrix is not Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },
    #[error("matrix is not square")]
    NotSquare,
}

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a real symmetric matrix (row-major, `n x n`).
/// Returns ascending eigenvalues and, if requested, the matching
/// eigenvectors as columns of a row-major matrix.
pub fn symmetric_eigen(n: usize, mut a: Vec<f64>, want_vectors: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    assert_eq!(a.len(), n * n);
    let mut v = want_vectors.then(|| {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    });
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = v.map(|v| {
        let mut out = vec![0.0; n * n];
        for (col, &src) in order.iter().enumerate() {
            for k in 0..n {
                out[k * n + col] = v[k * n + src];
            }
        }
        out
    });
    (values, vectors)
}

/// The real symmetric `2n x 2n` embedding of `re + i im`.
pub fn real_embedding(n: usize, re: &[f64], im: &[f64]) -> Vec<f64> {
    let m = 2 * n;
    let mut e = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let x = re[i * n + j];
            let y = im[i * n + j];
            e[i * m + j] = x;
            e[(i + n) * m + j + n] = x;
            e[i * m + j + n] = -y;
            e[(i + n) * m + j] = y;
        }
    }
    e
}

/// Ascending eigenvalues of the Hermitian matrix `re + i im` (row-major).
pub fn hermitian_eigenvalues_f64(n: usize, re: &[f64], im: &[f64]) -> Vec<f64> {
    let (doubled, _) = symmetric_eigen(2 * n, real_embedding(n, re, im), false);
    doubled.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Ascending eigenvalues of an exact Hermitian matrix. Hermiticity is checked
/// exactly before conversion to floating point.
pub fn hermitian_eigenvalues(h: &[Vec<GaussianRational>]) -> Result<Vec<f64>, EigenError> {
    let n = h.len();
    if h.iter().any(|row| row.len() != n) {
        return Err(EigenError::NotSquare);
    }
    for i in 0..n {
        for j in i..n {
            if h[j][i] != h[i][j].conj() {
                return Err(EigenError::NotHermitian { row: i, col: j });
            }
        }
    }
    let mut re = vec![0.0; n * n];
    let mut im = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (x, y) = h[i][j].to_f64();
            re[i * n + j] = x;
            im[i * n + j] = y;
        }
    }
    Ok(hermitian_eigenvalues_f64(n, &re, &im))
}

/// Frobenius norm of `re + i im`.
pub fn frobenius_norm(re: &[f64], im: &[f64]) -> f64 {
    re.iter().chain(im).map(|x| x * x).sum::<f64>().sqrt()
}

pub fn default_cluster_tolerance(norm: f64) -> f64 {
    1e-8 * (1.0 + norm)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub tolerance: f64,
    pub clusters: Vec<Cluster>,
    /// Set when some gap is too close to the tolerance to call, or a chained
    /// cluster is wider than the tolerance; such samples are non-generic.
    pub ambiguous: bool,
}

impl Spectrum {
    pub fn is_simple(&self) -> bool {
        self.clusters.iter().all(|c| c.multiplicity == 1)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Single-linkage clustering of ascending `values`: neighbours closer than
/// `tolerance` share a cluster, represented by their mean.
pub fn cluster(values: &[f64], tolerance: f64) -> Spectrum {
    debug_assert!(values.windows(2).all(|w| w[0] <= w[1]), "values must be sorted");
    let mut clusters = Vec::new();
    let mut ambiguous = false;
    let mut start = 0;
    for i in 1..=values.len() {
        let split = i == values.len() || {
            let gap = values[i] - values[i - 1];
            if gap > 0.5 * tolerance && gap < tolerance {
                ambiguous = true;
            }
            gap > tolerance
        };
        if split && i > start {
            let members = &values[start..i];
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            if members.iter().any(|v| (v - mean).abs() > tolerance) {
                ambiguous = true;
            }
            clusters.push(Cluster { value: mean, multiplicity: members.len() });
            start = i;
        }
    }
    Spectrum { values: values.to_vec(), tolerance, clusters, ambiguous }
}
