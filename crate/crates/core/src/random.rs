//! Seeded generators for forms, generators `φ`, isometries and curvature
//! tensors. Every consumer derives an independent ChaCha stream from
//! `(seed, stream)`, so results never depend on evaluation order.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curvature::CurvatureTensor;
use crate::linalg::{Endomorphism, IndefiniteInnerProduct, Signature};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn uniform_vector<R: Rng>(rng: &mut R, m: usize, radius: f64) -> DVector<f64> {
    DVector::from_fn(m, |_, _| rng.random_range(-radius..=radius))
}

/// Uniform direction on the Euclidean unit sphere `S^{n-1}`.
pub fn unit_direction<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// `L^T diag(η) L` with `L` a random perturbation of the identity.
pub fn random_inner_product<R: Rng>(rng: &mut R, sig: Signature) -> IndefiniteInnerProduct {
    let m = sig.dim();
    loop {
        let l = DMatrix::from_fn(m, m, |i, j| {
            let base = if i == j { 1.0 } else { 0.0 };
            base + 0.3 * rng.random_range(-1.0..1.0)
        });
        let eta = DMatrix::from_fn(m, m, |i, j| match (i == j, i < sig.p) {
            (true, true) => -1.0,
            (true, false) => 1.0,
            _ => 0.0,
        });
        let gram = l.transpose() * eta * &l;
        let gram = (&gram + gram.transpose()) * 0.5;
        if let Ok(g) = IndefiniteInnerProduct::with_signature(gram, sig) {
            return g;
        }
    }
}

/// `G^{-1} S` with `S` symmetric: self-adjoint for `g`.
pub fn random_self_adjoint<R: Rng>(rng: &mut R, g: &IndefiniteInnerProduct) -> Endomorphism {
    let m = g.dim();
    let mut s = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = rng.random_range(-1.0..1.0);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Endomorphism {
        matrix: g.gram_inv() * s,
    }
}

/// A `g`-isometry from the Cayley transform of a random `g`-skew map.
pub fn random_isometry<R: Rng>(rng: &mut R, g: &IndefiniteInnerProduct, size: f64) -> DMatrix<f64> {
    let m = g.dim();
    loop {
        let mut b = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i + 1..m {
                let v = size * rng.random_range(-1.0..1.0);
                b[(i, j)] = v;
                b[(j, i)] = -v;
            }
        }
        let k = g.gram_inv() * b;
        let id = DMatrix::<f64>::identity(m, m);
        if let Some(inv) = (&id - &k).try_inverse() {
            return inv * (id + k);
        }
    }
}

/// A random algebraic curvature tensor: a signed sum of `A_φ` generators.
pub fn random_curvature<R: Rng>(
    rng: &mut R,
    space: Arc<IndefiniteInnerProduct>,
    terms: usize,
) -> CurvatureTensor {
    let mut acc = CurvatureTensor::zeros(space.clone());
    for _ in 0..terms {
        let phi = random_self_adjoint(rng, &space);
        let c = if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(0.5..1.5);
        let a = CurvatureTensor::build_a_phi(space.clone(), &phi)
            .expect("G^{-1}S is self-adjoint by construction");
        acc = acc.plus(&a.scaled(c));
    }
    acc
}

/// The three generator types distinguished by `φ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorType {
    /// `φ² = Id`, self-adjoint isometry
    Involution,
    /// `φ² = -Id`, self-adjoint para-isometry (neutral signature only)
    ParaInvolution,
    /// `φ² = 0`
    Nilpotent,
}

impl GeneratorType {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorType::Involution => "involution",
            GeneratorType::ParaInvolution => "para_involution",
            GeneratorType::Nilpotent => "nilpotent",
        }
    }
}

fn conjugate(q: &DMatrix<f64>, phi0: DMatrix<f64>) -> Endomorphism {
    let q_inv = q.clone().try_inverse().expect("isometries are invertible");
    Endomorphism {
        matrix: q * phi0 * q_inv,
    }
}

/// `φ² = Id` on the diagonal form `g`, with `+1`-eigenspace spanned by the
/// basis vectors flagged in `plus`, then conjugated by a random isometry.
pub fn involution<R: Rng>(rng: &mut R, g: &IndefiniteInnerProduct, plus: &[bool]) -> Endomorphism {
    let m = g.dim();
    let phi0 = DMatrix::from_fn(m, m, |i, j| {
        if i != j {
            0.0
        } else if plus[i] {
            1.0
        } else {
            -1.0
        }
    });
    let q = random_isometry(rng, g, 0.5);
    conjugate(&q, phi0)
}

/// `φ² = -Id` with `g(φx, φy) = -g(x, y)` on `diagonal(n, n)`.
pub fn para_involution<R: Rng>(rng: &mut R, g: &IndefiniteInnerProduct) -> Endomorphism {
    let m = g.dim();
    let n = m / 2;
    assert_eq!(g.signature(), Signature { p: n, q: n }, "neutral diagonal form expected");
    let mut phi0 = DMatrix::zeros(m, m);
    for i in 0..n {
        phi0[(i, n + i)] = 1.0;
        phi0[(n + i, i)] = -1.0;
    }
    let q = random_isometry(rng, g, 0.5);
    conjugate(&q, phi0)
}

/// `φ = Σ c_ab u_a g(u_b, ·)` over mutually orthogonal null vectors
/// `u_a = e_a + e_{p+a}` of the diagonal form, so `φ² = 0`.
pub fn nilpotent_generator<R: Rng>(rng: &mut R, g: &IndefiniteInnerProduct, rank: usize) -> Endomorphism {
    let sig = g.signature();
    let m = g.dim();
    let rank = rank.min(sig.p).min(sig.q);
    let nulls: Vec<DVector<f64>> = (0..rank)
        .map(|a| {
            let mut u = DVector::zeros(m);
            u[a] = 1.0;
            u[sig.p + a] = 1.0;
            u
        })
        .collect();
    let mut phi0 = DMatrix::zeros(m, m);
    for a in 0..rank {
        for b in a..rank {
            let c = rng.random_range(0.5..1.5);
            let gub = g.gram() * &nulls[b];
            let gua = g.gram() * &nulls[a];
            phi0 += &nulls[a] * gub.transpose() * c;
            if a != b {
                phi0 += &nulls[b] * gua.transpose() * c;
            }
        }
    }
    let q = random_isometry(rng, g, 0.5);
    conjugate(&q, phi0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream_rng(7, 3).random();
        let b: f64 = stream_rng(7, 3).random();
        let c: f64 = stream_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn generated_forms_and_maps_have_their_properties() {
        let mut rng = stream_rng(1, 0);
        let sig = Signature::new(2, 3).unwrap();
        let g = random_inner_product(&mut rng, sig);
        assert_eq!(g.signature(), sig);
        let phi = random_self_adjoint(&mut rng, &g);
        assert!(phi.self_adjoint_residual(&g) < 1e-12);
        let q = random_isometry(&mut rng, &g, 0.5);
        assert!((q.transpose() * g.gram() * &q - g.gram()).amax() < 1e-12);
    }

    #[test]
    fn generator_types() {
        let mut rng = stream_rng(2, 0);
        let g = IndefiniteInnerProduct::diagonal(2, 2).unwrap();
        let id = DMatrix::<f64>::identity(4, 4);

        let inv = involution(&mut rng, &g, &[true, false, true, false]);
        assert!((inv.pow(2) - &id).amax() < 1e-10);
        assert!(inv.self_adjoint_residual(&g) < 1e-10);

        let para = para_involution(&mut rng, &g);
        assert!((para.pow(2) + &id).amax() < 1e-10);
        assert!(para.self_adjoint_residual(&g) < 1e-10);
        let pm = &para.matrix;
        assert!((pm.transpose() * g.gram() * pm + g.gram()).amax() < 1e-10);

        let nil = nilpotent_generator(&mut rng, &g, 2);
        assert!(nil.pow(2).amax() < 1e-10);
        assert!(nil.matrix.amax() > 0.1);
        assert!(nil.self_adjoint_residual(&g) < 1e-10);
    }

    #[test]
    fn random_curvature_is_algebraic() {
        let mut rng = stream_rng(3, 0);
        let g = Arc::new(random_inner_product(&mut rng, Signature::new(1, 4).unwrap()));
        let a = random_curvature(&mut rng, g, 4);
        assert!(a.validate().passes());
        assert!(a.max_abs() > 0.1);
    }
}
