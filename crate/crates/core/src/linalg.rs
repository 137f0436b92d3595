//! Signature-aware linear algebra on a finite-dimensional real vector space
//! carrying a non-degenerate symmetric bilinear form.
//!
//! Convention: `p` counts timelike directions (`g(v,v) < 0`) and `q` counts
//! spacelike directions, so a Lorentzian space has signature `(1, m-1)`.

use std::fmt;

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by the operator fingerprints and the probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Singular values below `rank_rel * scale` are treated as zero.
    pub rank_rel: f64,
    /// Eigenvalue clustering tolerance, applied as `eig * (1 + spectral radius)`.
    pub eig: f64,
    /// `|g(v,v)| <= null_cone * |v|^2` classifies `v` as null.
    pub null_cone: f64,
    /// Absolute floor under which a singular value is always zero.
    pub zero_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel: 1e-8,
            eig: 1e-7,
            null_cone: 1e-9,
            zero_abs: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    /// timelike directions
    pub p: usize,
    /// spacelike directions
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q < 3 {
            return Err(Error::InvalidSignature(format!(
                "dimension p+q must be at least 3, got ({p},{q})"
            )));
        }
        Ok(Signature { p, q })
    }

    pub fn riemannian(m: usize) -> Result<Self> {
        Signature::new(0, m)
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn is_definite(&self) -> bool {
        self.p == 0 || self.q == 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// The two non-empty pseudo-spheres `S^+` and `S^-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalKind {
    Spacelike,
    Timelike,
}

impl CausalKind {
    /// `+1` for spacelike, `-1` for timelike.
    pub fn sign(self) -> f64 {
        match self {
            CausalKind::Spacelike => 1.0,
            CausalKind::Timelike => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CausalKind::Spacelike => "spacelike",
            CausalKind::Timelike => "timelike",
        }
    }
}

impl fmt::Display for CausalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CausalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spacelike" | "+" => Ok(CausalKind::Spacelike),
            "timelike" | "-" => Ok(CausalKind::Timelike),
            other => Err(Error::Parse(format!("unknown causal kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalType {
    Spacelike,
    Timelike,
    Null,
}

/// A symmetric non-degenerate bilinear form together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct IndefiniteInnerProduct {
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    signature: Signature,
}

impl IndefiniteInnerProduct {
    /// Builds the form from its Gram matrix, inferring the signature.
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        let m = gram.nrows();
        if gram.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: gram.ncols(),
            });
        }
        if gram.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("Gram matrix has non-finite entries".into()));
        }
        let scale = gram.amax().max(1.0);
        let asym = (&gram - gram.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::Degenerate(format!(
                "Gram matrix is not symmetric (asymmetry {asym:.3e})"
            )));
        }
        let eig = SymmetricEigen::new(gram.clone());
        let largest = eig.eigenvalues.amax();
        if largest == 0.0 || eig.eigenvalues.iter().any(|l| l.abs() <= 1e-12 * largest) {
            return Err(Error::Degenerate("Gram matrix is singular".into()));
        }
        let p = eig.eigenvalues.iter().filter(|l| **l < 0.0).count();
        let signature = Signature::new(p, m - p)?;
        let gram_inv = gram
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("Gram matrix is not invertible".into()))?;
        Ok(IndefiniteInnerProduct {
            gram,
            gram_inv,
            signature,
        })
    }

    /// Builds the form and checks it against a declared signature.
    pub fn with_signature(gram: DMatrix<f64>, signature: Signature) -> Result<Self> {
        let g = Self::new(gram)?;
        if g.signature != signature {
            return Err(Error::InvalidSignature(format!(
                "declared {signature}, Gram matrix has {}",
                g.signature
            )));
        }
        Ok(g)
    }

    /// `diag(-1,...,-1, +1,...,+1)` with `p` negative entries.
    pub fn diagonal(p: usize, q: usize) -> Result<Self> {
        let sig = Signature::new(p, q)?;
        let m = sig.dim();
        let gram = DMatrix::from_fn(m, m, |i, j| match (i == j, i < p) {
            (true, true) => -1.0,
            (true, false) => 1.0,
            _ => 0.0,
        });
        Ok(IndefiniteInnerProduct {
            gram_inv: gram.clone(),
            gram,
            signature: sig,
        })
    }

    pub fn euclidean(m: usize) -> Result<Self> {
        Self::diagonal(0, m)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `x^T G y`.
    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.inner_unchecked(x, y))
    }

    pub(crate) fn inner_unchecked(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    pub fn norm_sq(&self, x: &DVector<f64>) -> Result<f64> {
        self.inner(x, x)
    }

    /// Classifies `x` by the sign of `g(x,x)`, treating `|g(x,x)| <= tol * |x|^2` as null.
    pub fn causal_type(&self, x: &DVector<f64>, tol: f64) -> Result<CausalType> {
        self.check_len(x)?;
        let euclid = x.norm_squared();
        if euclid == 0.0 {
            return Err(Error::ZeroVector);
        }
        let q = self.inner_unchecked(x, x);
        Ok(if q > tol * euclid {
            CausalType::Spacelike
        } else if q < -tol * euclid {
            CausalType::Timelike
        } else {
            CausalType::Null
        })
    }

    /// The form `alpha * g`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::NonPositiveScale(alpha));
        }
        Ok(IndefiniteInnerProduct {
            gram: &self.gram * alpha,
            gram_inv: &self.gram_inv / alpha,
            signature: self.signature,
        })
    }

    /// A `g`-orthonormal frame as matrix columns, timelike columns first,
    /// together with the sign `g(e_i, e_i)` of each column.
    pub fn orthonormal_frame(&self) -> (DMatrix<f64>, Vec<f64>) {
        let eig = SymmetricEigen::new(self.gram.clone());
        let m = self.dim();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut frame = DMatrix::zeros(m, m);
        let mut signs = Vec::with_capacity(m);
        for (col, &k) in order.iter().enumerate() {
            let lam = eig.eigenvalues[k];
            let v = eig.eigenvectors.column(k) / lam.abs().sqrt();
            frame.set_column(col, &v);
            signs.push(lam.signum());
        }
        (frame, signs)
    }

    /// Maximum violation of `gram * gram_inv = I`.
    pub fn inverse_residual(&self) -> f64 {
        (&self.gram * &self.gram_inv - DMatrix::identity(self.dim(), self.dim())).amax()
    }
}

/// A square matrix acting on the underlying space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Endomorphism {
    pub matrix: DMatrix<f64>,
}

impl Endomorphism {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Endomorphism { matrix })
    }

    pub fn identity(m: usize) -> Self {
        Endomorphism {
            matrix: DMatrix::identity(m, m),
        }
    }

    pub fn zeros(m: usize) -> Self {
        Endomorphism {
            matrix: DMatrix::zeros(m, m),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn scale(&self, c: f64) -> Self {
        Endomorphism {
            matrix: &self.matrix * c,
        }
    }

    pub fn pow(&self, k: u32) -> DMatrix<f64> {
        let m = self.dim();
        (0..k).fold(DMatrix::identity(m, m), |acc, _| acc * &self.matrix)
    }

    /// `max |G T - T^T G|`; zero iff `g(Tx,y) = g(x,Ty)`.
    pub fn self_adjoint_residual(&self, g: &IndefiniteInnerProduct) -> f64 {
        let gt = g.gram() * &self.matrix;
        (&gt - gt.transpose()).amax()
    }

    /// `max |G T + T^T G|`; zero iff `g(Tx,y) = -g(x,Ty)`.
    pub fn skew_adjoint_residual(&self, g: &IndefiniteInnerProduct) -> f64 {
        let gt = g.gram() * &self.matrix;
        (&gt + gt.transpose()).amax()
    }

    pub fn is_self_adjoint(&self, g: &IndefiniteInnerProduct, tol: f64) -> bool {
        self.self_adjoint_residual(g) <= tol
    }

    pub fn is_skew_adjoint(&self, g: &IndefiniteInnerProduct, tol: f64) -> bool {
        self.skew_adjoint_residual(g) <= tol
    }
}

/// Singular values of a real or complex matrix; empty for an empty matrix.
pub(crate) fn singular_values<T>(m: &DMatrix<T>) -> Vec<f64>
where
    T: ComplexField<RealField = f64>,
{
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().singular_values().iter().copied().collect()
}

/// Number of singular values exceeding `rel_tol` times the largest one.
pub fn rank_tol(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.iter().copied().fold(0.0_f64, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * top).count()
}

/// Rank against an external scale: counts singular values above
/// `max(rel_tol * scale, floor)`.
pub fn rank_scaled<T>(m: &DMatrix<T>, rel_tol: f64, scale: f64, floor: f64) -> usize
where
    T: ComplexField<RealField = f64>,
{
    let threshold = (rel_tol * scale).max(floor);
    singular_values(m).iter().filter(|s| **s > threshold).count()
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentz3() -> IndefiniteInnerProduct {
        IndefiniteInnerProduct::diagonal(1, 2).unwrap()
    }

    #[test]
    fn inner_products_on_diagonal_forms() {
        let e = IndefiniteInnerProduct::euclidean(3).unwrap();
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert_eq!(e.inner(&e1, &e1).unwrap(), 1.0);
        let l = lorentz3();
        assert_eq!(l.inner(&e1, &e1).unwrap(), -1.0);
        let n = DVector::from_vec(vec![1.0, 1.0, 0.0]);
        assert_eq!(l.inner(&n, &n).unwrap(), 0.0);
    }

    #[test]
    fn inner_rejects_wrong_length() {
        let l = lorentz3();
        let v = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(
            l.inner(&v, &v),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn causal_types() {
        let l = lorentz3();
        let tol = Tolerances::default().null_cone;
        let v = |a: f64, b: f64, c: f64| DVector::from_vec(vec![a, b, c]);
        assert_eq!(l.causal_type(&v(0., 1., 0.), tol).unwrap(), CausalType::Spacelike);
        assert_eq!(l.causal_type(&v(1., 0., 0.), tol).unwrap(), CausalType::Timelike);
        assert_eq!(l.causal_type(&v(1., 1., 0.), tol).unwrap(), CausalType::Null);
        assert!(matches!(l.causal_type(&v(0., 0., 0.), tol), Err(Error::ZeroVector)));
    }

    #[test]
    fn signature_inferred_from_gram() {
        let gram = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
        let g = IndefiniteInnerProduct::new(gram).unwrap();
        assert_eq!(g.signature(), Signature { p: 1, q: 2 });
        assert!(g.inverse_residual() < 1e-12);
    }

    #[test]
    fn degenerate_and_small_forms_rejected() {
        let singular = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 1.0]));
        assert!(matches!(
            IndefiniteInnerProduct::new(singular),
            Err(Error::Degenerate(_))
        ));
        assert!(Signature::new(1, 1).is_err());
        let gram = DMatrix::identity(3, 3);
        assert!(IndefiniteInnerProduct::with_signature(gram, Signature { p: 1, q: 2 }).is_err());
    }

    #[test]
    fn orthonormal_frame_diagonalises_form() {
        let gram = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, 1.0, 0.3, 0.0, 0.0, 0.0, 0.0, -2.0, 0.5, 0.0, 0.0, 0.5, 1.0,
            ],
        );
        let g = IndefiniteInnerProduct::new(gram).unwrap();
        let (frame, signs) = g.orthonormal_frame();
        let d = frame.transpose() * g.gram() * &frame;
        let expected = DMatrix::from_diagonal(&DVector::from_vec(signs.clone()));
        assert!((d - expected).amax() < 1e-12);
        assert_eq!(signs.iter().filter(|s| **s < 0.0).count(), g.signature().p);
        assert!(signs.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_tol(&DMatrix::identity(4, 4), 1e-9), 4);
        assert_eq!(rank_tol(&DMatrix::zeros(4, 4), 1e-9), 0);
        let u = DVector::from_vec(vec![1.0, 2.0, 0.0, -1.0]);
        let v = DVector::from_vec(vec![0.5, 0.0, 1.0, 1.0]);
        let w = DVector::from_vec(vec![0.0, 1.0, 1.0, 0.0]);
        let z = DVector::from_vec(vec![1.0, -1.0, 0.0, 2.0]);
        let m = &u * v.transpose() + &w * z.transpose();
        assert_eq!(rank_tol(&m, 1e-9), 2);
    }

    #[test]
    fn rank_ignores_zero_padding() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let mut padded = DMatrix::zeros(4, 5);
        padded.view_mut((1, 1), (2, 3)).copy_from(&m);
        assert_eq!(rank_tol(&m, 1e-9), rank_tol(&padded, 1e-9));
        assert_eq!(rank_tol(&m, 1e-9), 1);
    }

    #[test]
    fn rank_scaled_uses_floor() {
        let noise = DMatrix::from_element(3, 3, 1e-15);
        assert_eq!(rank_tol(&noise, 1e-8), 1);
        assert_eq!(rank_scaled(&noise, 1e-8, 1.0, 1e-10), 0);
    }

    #[test]
    fn adjointness_predicates() {
        let g = lorentz3();
        // boost generator is g-skew
        let k = Endomorphism::new(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        ))
        .unwrap();
        assert!(k.is_skew_adjoint(&g, 1e-14));
        assert!(!k.is_self_adjoint(&g, 1e-3));
        assert!(Endomorphism::identity(3).is_self_adjoint(&g, 0.0));
        assert_eq!(k.pow(2)[(0, 0)], 1.0);
    }

    #[test]
    fn scaled_form() {
        let g = lorentz3().scaled(4.0).unwrap();
        assert_eq!(g.gram()[(1, 1)], 4.0);
        assert_eq!(g.gram_inv()[(1, 1)], 0.25);
        assert!(lorentz3().scaled(0.0).is_err());
    }
}
