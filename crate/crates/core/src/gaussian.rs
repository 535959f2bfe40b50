use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{GmrError, Result};

/// ln(2π)
pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A d-dimensional Gaussian density with symmetric positive definite covariance.
///
/// The Cholesky factor and log-determinant are computed once at construction,
/// so density evaluations and solves do not refactorize.
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
    log_det: f64,
}

impl Gaussian {
    /// Builds a Gaussian, symmetrizing the covariance as `(Σ + Σᵀ)/2` before
    /// checking positive definiteness.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(GmrError::ZeroDimension);
        }
        if !cov.is_square() {
            return Err(GmrError::NonSquareCovariance {
                rows: cov.nrows(),
                cols: cov.ncols(),
            });
        }
        if cov.nrows() != d {
            return Err(GmrError::DimensionMismatch {
                expected: d,
                found: cov.nrows(),
            });
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(GmrError::NotPositiveDefinite { index: 0 });
        }
        let sym = (&cov + cov.transpose()) * 0.5;
        let chol = sym
            .clone()
            .cholesky()
            .ok_or(GmrError::NotPositiveDefinite { index: 0 })?
            .unpack();
        let log_det = 2.0 * chol.diagonal().iter().map(|v| v.ln()).sum::<f64>();
        if !log_det.is_finite() {
            return Err(GmrError::NotPositiveDefinite { index: 0 });
        }
        Ok(Self {
            mean,
            cov: sym,
            chol,
            log_det,
        })
    }

    pub fn univariate(mean: f64, variance: f64) -> Result<Self> {
        Self::new(
            DVector::from_element(1, mean),
            DMatrix::from_element(1, 1, variance),
        )
    }

    /// Builds a Gaussian from a lower-triangular Cholesky factor `L`, with `Σ = L Lᵀ`.
    pub fn from_cholesky(mean: DVector<f64>, chol: DMatrix<f64>) -> Result<Self> {
        let cov = &chol * chol.transpose();
        Self::new(mean, cov)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Lower-triangular Cholesky factor of the covariance.
    pub fn chol(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Squared Mahalanobis distance `(x−μ)ᵀ Σ⁻¹ (x−μ)`.
    pub fn mahalanobis_sq(&self, x: &DVector<f64>) -> f64 {
        let diff = x - &self.mean;
        let z = self
            .chol
            .solve_lower_triangular(&diff)
            .expect("Cholesky factor has a positive diagonal");
        z.norm_squared()
    }

    /// `Σ⁻¹ v`
    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        let z = self
            .chol
            .solve_lower_triangular(v)
            .expect("Cholesky factor has a positive diagonal");
        self.chol
            .tr_solve_lower_triangular(&z)
            .expect("Cholesky factor has a positive diagonal")
    }

    pub fn precision(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut inv = DMatrix::identity(d, d);
        self.chol.solve_lower_triangular_mut(&mut inv);
        self.chol.tr_solve_lower_triangular_mut(&mut inv);
        (&inv + inv.transpose()) * 0.5
    }

    pub fn ln_pdf(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.ln_pdf_unchecked(x))
    }

    pub fn pdf(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.ln_pdf(x)?.exp())
    }

    pub(crate) fn ln_pdf_unchecked(&self, x: &DVector<f64>) -> f64 {
        -0.5 * (self.dim() as f64 * LN_2PI + self.log_det + self.mahalanobis_sq(x))
    }

    /// Log-density of a scalar argument for 1-d Gaussians.
    pub(crate) fn ln_pdf_1d(&self, x: f64) -> f64 {
        debug_assert_eq!(self.dim(), 1);
        let var = self.cov[(0, 0)];
        let diff = x - self.mean[0];
        -0.5 * (LN_2PI + self.log_det + diff * diff / var)
    }

    /// Variance of a 1-d Gaussian; for d > 1, the largest diagonal entry.
    pub fn max_variance(&self) -> f64 {
        self.cov.diagonal().max()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        &self.mean + &self.chol * z
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(GmrError::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// Peak value of the density, `1/√|2πΣ|`.
    pub fn peak(&self) -> f64 {
        (-0.5 * (self.dim() as f64 * LN_2PI + self.log_det)).exp()
    }
}
