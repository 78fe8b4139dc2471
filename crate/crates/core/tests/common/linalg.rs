//! Dense reference linear algebra on `Vec<Vec<f64>>`, independent of nalgebra.
#![allow(clippy::needless_range_loop)]

pub type Mat = Vec<Vec<f64>>;

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.len();
    let mut a = m.clone();
    let mut v: Mat = (0..n)
        .map(|i| (0..n).map(|j| f64::from(i == j)).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

pub fn sqrt_psd(m: &Mat) -> Mat {
    let n = m.len();
    let (vals, vecs) = jacobi_eigen(m);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| vecs[i][k] * vals[k].max(0.0).sqrt() * vecs[j][k])
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Mean and unbiased covariance plus `eps` on the diagonal.
pub fn gaussian(rows: &[Vec<f64>], eps: f64) -> (Vec<f64>, Mat) {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let cov = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let s: f64 = rows
                        .iter()
                        .map(|r| (r[i] - mean[i]) * (r[j] - mean[j]))
                        .sum();
                    s / (n - 1.0) + if i == j { eps } else { 0.0 }
                })
                .collect()
        })
        .collect();
    (mean, cov)
}

/// Squared Fréchet distance through Jacobi square roots.
pub fn frechet(m1: &[f64], s1: &Mat, m2: &[f64], s2: &Mat) -> f64 {
    let mean: f64 = m1.iter().zip(m2).map(|(a, b)| (a - b) * (a - b)).sum();
    let r1 = sqrt_psd(s1);
    let inner = matmul(&matmul(&r1, s2), &r1);
    let sym: Mat = (0..inner.len())
        .map(|i| {
            (0..inner.len())
                .map(|j| 0.5 * (inner[i][j] + inner[j][i]))
                .collect()
        })
        .collect();
    let (vals, _) = jacobi_eigen(&sym);
    let cross: f64 = vals.iter().map(|l| l.max(0.0).sqrt()).sum();
    let tr = |m: &Mat| (0..m.len()).map(|i| m[i][i]).sum::<f64>();
    (mean + tr(s1) + tr(s2) - 2.0 * cross).max(0.0)
}
