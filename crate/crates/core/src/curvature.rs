//! Algebraic curvature tensors on an inner-product space.
//!
//! Components are stored densely with all indices lowered:
//! `A[i][j][k][l] = A(e_i, e_j, e_k, e_l)`. The sign convention is the one in
//! which the constant-curvature tensor is
//! `A(x,y,z,w) = λ{g(x,w)g(y,z) - g(x,z)g(y,w)}`, so `A(e_1,e_2,e_2,e_1) > 0`
//! on the round sphere.

use std::sync::Arc;

use nalgebra::{ComplexField, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CausalKind, Endomorphism, IndefiniteInnerProduct};

/// Tolerance used by `validate` and the generator self-adjointness check.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn idx(m: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * m + j) * m + k) * m + l
}

/// `A_φ` components for `P[i][l] = g(φ e_i, e_l)`.
pub(crate) fn a_phi_components<T: ComplexField + Copy>(
    gram: &DMatrix<T>,
    phi: &DMatrix<T>,
) -> Vec<T> {
    let m = gram.nrows();
    let p = phi.transpose() * gram;
    let mut comps = vec![T::zero(); m * m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    comps[idx(m, i, j, k, l)] = p[(i, l)] * p[(j, k)] - p[(i, k)] * p[(j, l)];
                }
            }
        }
    }
    comps
}

/// Matrix of `J_A(x)`: `M[y][z] = A(y,x,x,z)` with the first index raised.
pub(crate) fn jacobi_matrix<T: ComplexField + Copy>(
    comps: &[T],
    gram_inv: &DMatrix<T>,
    x: &[T],
) -> DMatrix<T> {
    let m = gram_inv.nrows();
    let mut mm = DMatrix::<T>::zeros(m, m);
    for y in 0..m {
        for z in 0..m {
            let mut s = T::zero();
            for a in 0..m {
                for b in 0..m {
                    s += x[a] * x[b] * comps[idx(m, y, a, b, z)];
                }
            }
            mm[(y, z)] = s;
        }
    }
    gram_inv * mm
}

/// Matrix of the Ricci tensor `ρ(x,y) = Σ g^{ij} A(x,e_i,e_j,y)`.
pub(crate) fn ricci_matrix<T: ComplexField + Copy>(comps: &[T], gram_inv: &DMatrix<T>) -> DMatrix<T> {
    let m = gram_inv.nrows();
    DMatrix::from_fn(m, m, |x, y| {
        let mut s = T::zero();
        for i in 0..m {
            for j in 0..m {
                s += gram_inv[(i, j)] * comps[idx(m, x, i, j, y)];
            }
        }
        s
    })
}

/// Maximum violations of the three curvature symmetries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// `max |A(x,y,z,w) - A(z,w,x,y)|`
    pub pair_swap: f64,
    /// `max |A(x,y,z,w) + A(y,x,z,w)|` together with the last index pair
    pub antisymmetry: f64,
    /// `max |A(x,y,z,w) + A(y,z,x,w) + A(z,x,y,w)|`
    pub bianchi: f64,
}

impl SymmetryReport {
    pub fn max_violation(&self) -> f64 {
        self.pair_swap.max(self.antisymmetry).max(self.bianchi)
    }

    pub fn passes(&self) -> bool {
        self.passes_at(SYMMETRY_TOL)
    }

    pub fn passes_at(&self, tol: f64) -> bool {
        self.max_violation() < tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricBilinear {
    pub matrix: DMatrix<f64>,
}

impl SymmetricBilinear {
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.matrix * y)[(0, 0)]
    }

    /// `Σ g^{ij} b(e_i, e_j)`.
    pub fn trace(&self, g: &IndefiniteInnerProduct) -> f64 {
        g.gram_inv().component_mul(&self.matrix).sum()
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }
}

/// An ordered orthonormal pair spanning a non-degenerate 2-plane on which `g`
/// is definite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientedPlane {
    pub e1: DVector<f64>,
    pub e2: DVector<f64>,
    pub kind: CausalKind,
}

impl OrientedPlane {
    /// Checks orthonormality of `(e1, e2)` to `1e-10`.
    pub fn new(g: &IndefiniteInnerProduct, e1: DVector<f64>, e2: DVector<f64>) -> Result<Self> {
        let n1 = g.inner(&e1, &e1)?;
        let n2 = g.inner(&e2, &e2)?;
        let cross = g.inner(&e1, &e2)?;
        let kind = if n1 > 0.0 {
            CausalKind::Spacelike
        } else {
            CausalKind::Timelike
        };
        let s = kind.sign();
        if (n1 - s).abs() > 1e-10 || (n2 - s).abs() > 1e-10 || cross.abs() > 1e-10 {
            return Err(Error::DegeneratePlane(format!(
                "basis is not orthonormal of one kind: g11={n1:.3e}, g22={n2:.3e}, g12={cross:.3e}"
            )));
        }
        Ok(OrientedPlane { e1, e2, kind })
    }

    /// Gram-Schmidt in the indefinite product, keeping the orientation of `(u, v)`.
    pub fn from_span(
        g: &IndefiniteInnerProduct,
        u: &DVector<f64>,
        v: &DVector<f64>,
        null_tol: f64,
    ) -> Result<Self> {
        let nu = g.inner(u, u)?;
        if nu.abs() <= null_tol * u.norm_squared() {
            return Err(Error::DegeneratePlane("first spanning vector is null".into()));
        }
        let w = v - u * (g.inner(u, v)? / nu);
        let nw = g.inner(&w, &w)?;
        if nw.abs() <= null_tol * w.norm_squared().max(f64::MIN_POSITIVE) || w.norm() == 0.0 {
            return Err(Error::DegeneratePlane("spanning vectors are dependent or the plane is degenerate".into()));
        }
        if nu.signum() != nw.signum() {
            return Err(Error::DegeneratePlane("plane has mixed signature".into()));
        }
        OrientedPlane::new(g, u / nu.abs().sqrt(), w / nw.abs().sqrt())
    }

    /// Same oriented plane with the basis rotated by `theta`.
    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        OrientedPlane {
            e1: &self.e1 * c + &self.e2 * s,
            e2: &self.e2 * c - &self.e1 * s,
            kind: self.kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    space: Arc<IndefiniteInnerProduct>,
    comps: Vec<f64>,
}

impl CurvatureTensor {
    pub fn zeros(space: Arc<IndefiniteInnerProduct>) -> Self {
        let m = space.dim();
        CurvatureTensor {
            space,
            comps: vec![0.0; m * m * m * m],
        }
    }

    pub fn from_components(space: Arc<IndefiniteInnerProduct>, comps: Vec<f64>) -> Result<Self> {
        let m = space.dim();
        if comps.len() != m * m * m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m * m * m,
                found: comps.len(),
            });
        }
        Ok(CurvatureTensor { space, comps })
    }

    pub fn from_fn(
        space: Arc<IndefiniteInnerProduct>,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let m = space.dim();
        let mut t = CurvatureTensor::zeros(space);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        t.comps[idx(m, i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    pub fn space(&self) -> &Arc<IndefiniteInnerProduct> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.comps[idx(self.dim(), i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let m = self.dim();
        self.comps[idx(m, i, j, k, l)] = v;
    }

    /// Sets `A_{ijkl} = v` along with every entry forced by pair symmetry and
    /// the two antisymmetries.
    pub fn set_with_symmetries(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        for (a, b, c, d, s) in symmetry_images(i, j, k, l) {
            self.set(a, b, c, d, s * v);
        }
    }

    /// `A(x, y, z, w)` for arbitrary vectors.
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let m = self.dim();
        let mut s = 0.0;
        for i in 0..m {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..m {
                    if z[k] == 0.0 {
                        continue;
                    }
                    for l in 0..m {
                        s += x[i] * y[j] * z[k] * w[l] * self.comps[idx(m, i, j, k, l)];
                    }
                }
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &CurvatureTensor) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        CurvatureTensor {
            space: self.space.clone(),
            comps: self.comps.iter().map(|v| v * c).collect(),
        }
    }

    /// Componentwise sum; the spaces must have the same dimension.
    pub fn plus(&self, other: &CurvatureTensor) -> Self {
        assert_eq!(self.dim(), other.dim());
        CurvatureTensor {
            space: self.space.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn validate(&self) -> SymmetryReport {
        let m = self.dim();
        let mut rep = SymmetryReport {
            pair_swap: 0.0,
            antisymmetry: 0.0,
            bianchi: 0.0,
        };
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let a = self.get(i, j, k, l);
                        rep.pair_swap = rep.pair_swap.max((a - self.get(k, l, i, j)).abs());
                        rep.antisymmetry = rep
                            .antisymmetry
                            .max((a + self.get(j, i, k, l)).abs())
                            .max((a + self.get(i, j, l, k)).abs());
                        let b = a + self.get(j, k, i, l) + self.get(k, i, j, l);
                        rep.bianchi = rep.bianchi.max(b.abs());
                    }
                }
            }
        }
        rep
    }

    /// `A_φ(x,y,z,w) = g(φx,w)g(φy,z) - g(φx,z)g(φy,w)` for `g`-self-adjoint `φ`.
    pub fn build_a_phi(space: Arc<IndefiniteInnerProduct>, phi: &Endomorphism) -> Result<Self> {
        if phi.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: phi.dim(),
            });
        }
        let residual = phi.self_adjoint_residual(&space);
        let scale = 1.0f64.max(phi.matrix.amax()) * 1.0f64.max(space.gram().amax());
        if residual > SYMMETRY_TOL * scale {
            return Err(Error::NotSelfAdjoint { residual });
        }
        let comps = a_phi_components(space.gram(), &phi.matrix);
        Ok(CurvatureTensor { space, comps })
    }

    /// `λ{g(x,w)g(y,z) - g(x,z)g(y,w)}`.
    pub fn constant_curvature(space: Arc<IndefiniteInnerProduct>, lambda: f64) -> Self {
        let g = space.gram().clone();
        CurvatureTensor::from_fn(space, |i, j, k, l| {
            lambda * (g[(i, l)] * g[(j, k)] - g[(i, k)] * g[(j, l)])
        })
    }

    /// The 4-dimensional Riemannian tensor with non-zero components
    /// `W_1212 = a1, W_1234 = a2, W_1313 = a2, W_1324 = -a1, W_1414 = a2,
    /// W_1423 = a1, W_2323 = a2, W_2314 = a1, W_2424 = a2, W_2413 = -a1,
    /// W_3434 = a1, W_3412 = a2` (1-based) in an orthonormal basis, plus the
    /// entries forced by pair symmetry and antisymmetry. The first Bianchi
    /// identity holds exactly when `a2 + 2 a1 = 0`.
    pub fn build_eq3c(space: Arc<IndefiniteInnerProduct>, a1: f64, a2: f64) -> Result<Self> {
        if space.dim() != 4 || space.signature().p != 0 {
            return Err(Error::InvalidSignature(format!(
                "this table needs a positive definite 4-dimensional space, got {}",
                space.signature()
            )));
        }
        if (space.gram() - DMatrix::<f64>::identity(4, 4)).amax() > 1e-12 {
            return Err(Error::InvalidSignature(
                "this table is stated in an orthonormal basis; the Gram matrix must be the identity"
                    .into(),
            ));
        }
        let table: [(usize, usize, usize, usize, f64); 12] = [
            (1, 2, 1, 2, a1),
            (1, 2, 3, 4, a2),
            (1, 3, 1, 3, a2),
            (1, 3, 2, 4, -a1),
            (1, 4, 1, 4, a2),
            (1, 4, 2, 3, a1),
            (2, 3, 2, 3, a2),
            (2, 3, 1, 4, a1),
            (2, 4, 2, 4, a2),
            (2, 4, 1, 3, -a1),
            (3, 4, 3, 4, a1),
            (3, 4, 1, 2, a2),
        ];
        let mut t = CurvatureTensor::zeros(space);
        for (i, j, k, l, v) in table {
            t.set_with_symmetries(i - 1, j - 1, k - 1, l - 1, v);
        }
        Ok(t)
    }

    pub fn ricci(&self) -> SymmetricBilinear {
        SymmetricBilinear {
            matrix: ricci_matrix(&self.comps, self.space.gram_inv()),
        }
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.ricci().trace(&self.space)
    }

    /// Orthogonal projection onto the Weyl tensors (the totally trace-free part).
    pub fn weyl_projection(&self) -> Self {
        let m = self.dim();
        let rho = self.ricci().matrix;
        let tau = self.space.gram_inv().component_mul(&rho).sum();
        let g = self.space.gram();
        let c1 = 1.0 / (m as f64 - 2.0);
        let c2 = tau / ((m as f64 - 1.0) * (m as f64 - 2.0));
        CurvatureTensor::from_fn(self.space.clone(), |x, y, z, w| {
            self.get(x, y, z, w)
                - c1 * (rho[(x, w)] * g[(y, z)] + g[(x, w)] * rho[(y, z)])
                + c1 * (rho[(x, z)] * g[(y, w)] + g[(x, z)] * rho[(y, w)])
                + c2 * (g[(x, w)] * g[(y, z)] - g[(x, z)] * g[(y, w)])
        })
    }

    /// `J_A(x)`, characterised by `g(J_A(x)y, z) = A(y,x,x,z)`.
    pub fn jacobi(&self, x: &DVector<f64>) -> Result<Endomorphism> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Endomorphism::new(jacobi_matrix(&self.comps, self.space.gram_inv(), x.as_slice()))
    }

    /// `A(π)`, characterised by `g(A(π)x, y) = A(e1, e2, x, y)`.
    pub fn skew_operator(&self, plane: &OrientedPlane) -> Result<Endomorphism> {
        let m = self.dim();
        if plane.e1.len() != m || plane.e2.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: plane.e1.len(),
            });
        }
        let (e1, e2) = (&plane.e1, &plane.e2);
        let mut n = DMatrix::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                let mut s = 0.0;
                for i in 0..m {
                    if e1[i] == 0.0 {
                        continue;
                    }
                    for j in 0..m {
                        s += e1[i] * e2[j] * self.comps[idx(m, i, j, a, b)];
                    }
                }
                n[(a, b)] = s;
            }
        }
        Endomorphism::new(-(self.space.gram_inv() * n))
    }

    /// The same components read against the rescaled form `alpha * g`, scaled
    /// by `alpha`: how the Weyl tensor transforms under `g -> alpha g`.
    pub fn rescale_conformal(&self, alpha: f64) -> Result<Self> {
        let space = Arc::new(self.space.scaled(alpha)?);
        Ok(CurvatureTensor {
            space,
            comps: self.comps.iter().map(|v| v * alpha).collect(),
        })
    }
}

/// The eight index permutations related by pair symmetry and antisymmetry,
/// with their signs.
pub(crate) fn symmetry_images(
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> [(usize, usize, usize, usize, f64); 8] {
    [
        (i, j, k, l, 1.0),
        (j, i, k, l, -1.0),
        (i, j, l, k, -1.0),
        (j, i, l, k, 1.0),
        (k, l, i, j, 1.0),
        (l, k, i, j, -1.0),
        (k, l, j, i, -1.0),
        (l, k, j, i, 1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(p: usize, q: usize) -> Arc<IndefiniteInnerProduct> {
        Arc::new(IndefiniteInnerProduct::diagonal(p, q).unwrap())
    }

    fn basis(m: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(m);
        v[i] = 1.0;
        v
    }

    #[test]
    fn validate_zero_and_identity() {
        let z = CurvatureTensor::zeros(space(1, 3));
        assert_eq!(z.validate().max_violation(), 0.0);
        let id = CurvatureTensor::build_a_phi(space(1, 3), &Endomorphism::identity(4)).unwrap();
        assert!(id.validate().passes());
    }

    #[test]
    fn validate_detects_injected_defect() {
        let mut t = CurvatureTensor::constant_curvature(space(0, 4), 1.0);
        let v = t.get(0, 1, 2, 3);
        t.set(0, 1, 2, 3, v + 1e-3);
        let rep = t.validate();
        assert!((rep.antisymmetry - 1e-3).abs() < 1e-12);
        assert!((rep.bianchi - 1e-3).abs() < 1e-12);
        assert!((rep.pair_swap - 1e-3).abs() < 1e-12);
        assert!(!rep.passes());
    }

    #[test]
    fn a_phi_spot_values() {
        let e = space(0, 3);
        let id = CurvatureTensor::build_a_phi(e.clone(), &Endomorphism::identity(3)).unwrap();
        assert_eq!(id.get(0, 1, 1, 0), 1.0);
        let zero = CurvatureTensor::build_a_phi(e.clone(), &Endomorphism::zeros(3)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        let phi = Endomorphism::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0])))
            .unwrap();
        let a = CurvatureTensor::build_a_phi(e, &phi).unwrap();
        // g(φe1,e1) g(φe3,e3) - g(φe1,e3) g(φe3,e1) = 1 * (-1) - 0
        assert_eq!(a.get(0, 2, 2, 0), -1.0);
    }

    #[test]
    fn a_phi_rejects_non_self_adjoint() {
        let mut m = DMatrix::identity(3, 3);
        m[(0, 1)] = 1.0;
        let phi = Endomorphism::new(m).unwrap();
        assert!(matches!(
            CurvatureTensor::build_a_phi(space(0, 3), &phi),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn constant_curvature_examples() {
        let l = space(1, 2);
        assert_eq!(CurvatureTensor::constant_curvature(l.clone(), 0.0).max_abs(), 0.0);
        let one = CurvatureTensor::constant_curvature(l.clone(), 1.0);
        let id = CurvatureTensor::build_a_phi(l.clone(), &Endomorphism::identity(3)).unwrap();
        assert_eq!(one.max_abs_diff(&id), 0.0);
        let two = CurvatureTensor::constant_curvature(l, 2.0);
        assert_eq!(two.get(0, 1, 1, 0), -2.0);
    }

    #[test]
    fn ricci_of_constant_curvature() {
        for m in 3..7 {
            let s = space(1, m - 1);
            let a = CurvatureTensor::constant_curvature(s.clone(), 1.0);
            let rho = a.ricci();
            assert!((&rho.matrix - s.gram() * (m as f64 - 1.0)).amax() < 1e-14);
            assert!((a.scalar_curvature() - (m * (m - 1)) as f64).abs() < 1e-12);
        }
        assert_eq!(CurvatureTensor::zeros(space(0, 3)).scalar_curvature(), 0.0);
    }

    #[test]
    fn eq3c_contraction_and_bianchi() {
        let e = space(0, 4);
        let t = CurvatureTensor::build_eq3c(e.clone(), 0.0, 0.0).unwrap();
        assert_eq!(t.max_abs(), 0.0);

        let t = CurvatureTensor::build_eq3c(e.clone(), 1.0, -2.0).unwrap();
        assert!(t.validate().passes());
        assert_eq!(t.ricci().matrix[(0, 0)], 3.0);

        // Bianchi on (1,2,3,4): W_1234 + W_2314 + W_3124 = a2 + a1 + a1
        let t = CurvatureTensor::build_eq3c(e.clone(), 1.0, 1.0).unwrap();
        let rep = t.validate();
        assert_eq!(rep.pair_swap, 0.0);
        assert_eq!(rep.antisymmetry, 0.0);
        assert_eq!(rep.bianchi, 3.0);
        assert_eq!(t.ricci().matrix[(0, 0)], -3.0);

        assert!(CurvatureTensor::build_eq3c(space(1, 3), 1.0, 1.0).is_err());
        assert!(CurvatureTensor::build_eq3c(space(0, 5), 1.0, 1.0).is_err());
    }

    #[test]
    fn weyl_examples() {
        let s = space(2, 3);
        let a = CurvatureTensor::constant_curvature(s.clone(), 1.0);
        assert!(a.weyl_projection().max_abs() < 1e-14);

        // a Ricci-flat input is left unchanged
        let mut phi = DMatrix::zeros(5, 5);
        // φ = u g(u,·) with u = e1 + e3 null
        let u = DVector::from_vec(vec![1.0, 0.0, 1.0, 0.0, 0.0]);
        let gu = s.gram() * &u;
        phi += &u * gu.transpose();
        let a = CurvatureTensor::build_a_phi(s.clone(), &Endomorphism::new(phi).unwrap()).unwrap();
        assert!(a.ricci().matrix.amax() < 1e-14);
        assert!(a.weyl_projection().max_abs_diff(&a) < 1e-14);

        let t = CurvatureTensor::build_eq3c(space(0, 4), 1.0, 1.0).unwrap();
        let w = t.weyl_projection();
        assert!(w.ricci().matrix.amax() < 1e-12);
    }

    #[test]
    fn jacobi_examples() {
        let e = space(0, 3);
        let id = CurvatureTensor::constant_curvature(e.clone(), 1.0);
        let x = basis(3, 0);
        let j = id.jacobi(&x).unwrap();
        // projection onto x-perp
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0, 1.0]));
        assert!((&j.matrix - expected).amax() < 1e-15);

        let phi = Endomorphism::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0])))
            .unwrap();
        let a = CurvatureTensor::build_a_phi(e, &phi).unwrap();
        let j = a.jacobi(&x).unwrap();
        assert!((j.apply(&basis(3, 2)) + basis(3, 2)).amax() < 1e-15);
    }

    #[test]
    fn skew_operator_examples() {
        let e = space(0, 4);
        let id = CurvatureTensor::constant_curvature(e.clone(), 1.0);
        let plane = OrientedPlane::new(&e, basis(4, 0), basis(4, 1)).unwrap();
        let s = id.skew_operator(&plane).unwrap();
        assert!((s.apply(&basis(4, 0)) + basis(4, 1)).amax() < 1e-15);
        assert!((s.apply(&basis(4, 1)) - basis(4, 0)).amax() < 1e-15);
        assert_eq!(crate::linalg::rank_tol(&s.matrix, 1e-9), 2);
        let rotated = id.skew_operator(&plane.rotated(0.7)).unwrap();
        assert!((&rotated.matrix - &s.matrix).amax() < 1e-10);

        let z = CurvatureTensor::zeros(e);
        assert_eq!(z.skew_operator(&plane).unwrap().matrix.amax(), 0.0);
    }

    #[test]
    fn plane_construction_errors() {
        let l = space(1, 3);
        let null = DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
        assert!(OrientedPlane::from_span(&l, &null, &basis(4, 2), 1e-9).is_err());
        // mixed plane span(e0, e1)
        assert!(OrientedPlane::from_span(&l, &basis(4, 0), &basis(4, 1), 1e-9).is_err());
        assert!(OrientedPlane::new(&l, basis(4, 1), basis(4, 1)).is_err());
        let p = OrientedPlane::from_span(&l, &basis(4, 1), &(basis(4, 1) + basis(4, 2)), 1e-9)
            .unwrap();
        assert_eq!(p.kind, CausalKind::Spacelike);
    }

    #[test]
    fn conformal_rescaling_of_jacobi() {
        let s = space(1, 3);
        let a = CurvatureTensor::constant_curvature(s.clone(), 1.3);
        assert_eq!(a.rescale_conformal(1.0).unwrap(), a);
        let alpha = 4.0;
        let b = a.rescale_conformal(alpha).unwrap();
        let x = DVector::from_vec(vec![0.2, 1.0, 0.3, -0.1]);
        let x = &x / s.norm_sq(&x).unwrap().sqrt();
        let xt = &x / alpha.sqrt();
        assert!((b.space().norm_sq(&xt).unwrap() - 1.0).abs() < 1e-12);
        let ja = a.jacobi(&x).unwrap();
        let jb = b.jacobi(&xt).unwrap();
        assert!((&jb.matrix - &ja.matrix / alpha).amax() < 1e-14);
        assert!(matches!(a.rescale_conformal(-1.0), Err(Error::NonPositiveScale(_))));
    }
}
