//! Dense 4×4 complex eigendecomposition and matrix exponential.
//!
//! The Schur factorization and the Padé scaling-and-squaring exponential come
//! from `nalgebra`; eigenvectors are recovered from the triangular Schur factor
//! by back substitution.

use nalgebra::{Schur, Vector4};
use num_complex::Complex64;

use crate::algebra::ComplexMatrix4;
use crate::error::{Error, Result};

const SCHUR_MAX_ITER: usize = 10_000;

/// `M = P · diag(λ) · P⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vector4<Complex64>,
    pub vectors: ComplexMatrix4,
    pub inverse: ComplexMatrix4,
    /// 2-norm condition number of `vectors`.
    pub condition: f64,
}

impl SpectralDecomposition {
    /// `P · diag(f(λ)) · P⁻¹`.
    pub fn apply<F: Fn(Complex64) -> Complex64>(&self, f: F) -> ComplexMatrix4 {
        let mut scaled = self.vectors;
        for (mut col, &lambda) in scaled.column_iter_mut().zip(self.eigenvalues.iter()) {
            col *= f(lambda);
        }
        scaled * self.inverse
    }
}

pub fn eigendecompose(m: &ComplexMatrix4) -> Result<SpectralDecomposition> {
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Propagator("matrix has non-finite entries".into()));
    }
    let schur = Schur::try_new(*m, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Propagator("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let eigenvalues = t.diagonal();

    // threshold for near-equal diagonal entries, as in LAPACK's trevc
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * scale;

    let mut tri_vectors = ComplexMatrix4::zeros();
    for k in 0..4 {
        let mut x = Vector4::<Complex64>::zeros();
        x[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let rhs: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * x[j]).sum();
            let mut denom = t[(i, i)] - t[(k, k)];
            if denom.norm() < small {
                denom = Complex64::new(small, 0.0);
            }
            x[i] = -rhs / denom;
        }
        tri_vectors.set_column(k, &x);
    }

    let mut vectors = q * tri_vectors;
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        col /= Complex64::new(norm, 0.0);
    }

    let singular = vectors.singular_values();
    let smax = singular.max();
    let smin = singular.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let inverse = vectors
        .try_inverse()
        .ok_or_else(|| Error::Propagator(format!("eigenvector matrix is singular (condition {condition:e})")))?;

    Ok(SpectralDecomposition { eigenvalues, vectors, inverse, condition })
}

/// `exp(M)` by Padé approximation with scaling and squaring.
pub fn expm(m: &ComplexMatrix4) -> ComplexMatrix4 {
    m.exp()
}
