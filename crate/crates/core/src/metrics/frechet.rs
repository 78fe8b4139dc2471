use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{EmbeddingSet, MetricsError};

/// Added to every covariance diagonal before taking square roots.
pub const COVARIANCE_EPSILON: f64 = 1e-6;

const EIGEN_TOLERANCE: f64 = 1e-14;
const EIGEN_MAX_ITER: usize = 10_000;

/// Mean and covariance fitted to an embedding set.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianStats {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self, MetricsError> {
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(MetricsError::DimensionMismatch {
                expected: mean.len(),
                found: cov.nrows().max(cov.ncols()),
            });
        }
        Ok(GaussianStats { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Sample mean and unbiased (n - 1) covariance, symmetrized, plus `ε·I`.
pub fn fit_gaussian(set: &EmbeddingSet) -> Result<GaussianStats, MetricsError> {
    let n = set.len();
    if n < 2 {
        return Err(MetricsError::TooFewVectors(n));
    }
    let d = set.dim();
    let data = DMatrix::from_fn(n, d, |i, j| set.vectors()[i][j]);
    let mean = data.row_mean().transpose();
    let mut centered = data;
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let mut cov = centered.transpose() * &centered / (n as f64 - 1.0);
    cov = (&cov + cov.transpose()) * 0.5;
    for i in 0..d {
        cov[(i, i)] += COVARIANCE_EPSILON;
    }
    Ok(GaussianStats { mean, cov })
}

fn eigen(m: DMatrix<f64>, what: &str) -> Result<SymmetricEigen<f64, nalgebra::Dyn>, MetricsError> {
    if m.iter().any(|x| !x.is_finite()) {
        return Err(MetricsError::Numerical(format!(
            "{what} has non-finite entries"
        )));
    }
    SymmetricEigen::try_new(m, EIGEN_TOLERANCE, EIGEN_MAX_ITER).ok_or_else(|| {
        MetricsError::Numerical(format!("eigendecomposition of {what} did not converge"))
    })
}

/// PSD square root via eigendecomposition, negative eigenvalues clamped to 0.
fn sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>, MetricsError> {
    let eig = eigen(m.clone(), "covariance")?;
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.transpose())
}

/// Squared Fréchet distance between two Gaussians:
/// `‖μ₁ − μ₂‖² + tr(Σ₁) + tr(Σ₂) − 2·tr((Σ₁Σ₂)^½)`.
///
/// The cross term uses the symmetric form `S = Σ₁^½ Σ₂ Σ₁^½`, whose
/// eigenvalues (clamped at 0) give `tr((Σ₁Σ₂)^½) = Σ √λᵢ`. The result is
/// clamped at 0.
pub fn frechet_distance(a: &GaussianStats, b: &GaussianStats) -> Result<f64, MetricsError> {
    if a.dim() != b.dim() {
        return Err(MetricsError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mean_term = (&a.mean - &b.mean).norm_squared();
    let root_a = sqrt_psd(&a.cov)?;
    let s = &root_a * &b.cov * &root_a;
    let s = (&s + s.transpose()) * 0.5;
    let cross: f64 = eigen(s, "covariance product")?
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    let d2 = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross;
    if !d2.is_finite() {
        return Err(MetricsError::Numerical("distance is not finite".into()));
    }
    Ok(d2.max(0.0))
}

/// Fréchet Music Distance between reference and candidate embeddings.
pub fn fmd(reference: &EmbeddingSet, candidate: &EmbeddingSet) -> Result<f64, MetricsError> {
    if reference.dim() != candidate.dim() {
        return Err(MetricsError::DimensionMismatch {
            expected: reference.dim(),
            found: candidate.dim(),
        });
    }
    frechet_distance(&fit_gaussian(reference)?, &fit_gaussian(candidate)?)
}
