use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use weyl_spectra::curvature::{CurvatureTensor, OrientedPlane};
use weyl_spectra::linalg::{IndefiniteInnerProduct, Signature};
use weyl_spectra::random::{
    involution, random_curvature, random_inner_product, random_self_adjoint, stream_rng, uniform_vector,
};

fn space(rng: &mut ChaCha8Rng, m: usize) -> Arc<IndefiniteInnerProduct> {
    let p = rng.random_range(0..=m);
    Arc::new(random_inner_product(rng, Signature::new(p, m - p).unwrap()))
}

/// A vector with `|g(x,x)|` bounded away from zero.
fn non_null(rng: &mut ChaCha8Rng, g: &IndefiniteInnerProduct) -> DVector<f64> {
    loop {
        let x = uniform_vector(rng, g.dim(), 1.0);
        if g.inner(&x, &x).unwrap().abs() > 0.05 * x.norm_squared() {
            return x;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn a_phi_is_an_algebraic_curvature_tensor(seed in any::<u64>(), m in 3usize..=8) {
        let mut rng = stream_rng(seed, 0);
        let g = space(&mut rng, m);
        let phi = random_self_adjoint(&mut rng, &g);
        let a = CurvatureTensor::build_a_phi(g, &phi).unwrap();
        let report = a.validate();
        prop_assert!(report.passes(), "{:?}", report);
    }

    #[test]
    fn weyl_projection_is_idempotent_and_ricci_free(seed in any::<u64>(), m in 3usize..=8) {
        let mut rng = stream_rng(seed, 1);
        let g = space(&mut rng, m);
        let a = random_curvature(&mut rng, g, 3);
        let w = a.weyl_projection();
        prop_assert!(w.ricci().matrix.amax() < 1e-9);
        prop_assert!(w.weyl_projection().max_abs_diff(&w) < 1e-10);
        prop_assert!(w.validate().passes());
    }

    #[test]
    fn weyl_projection_kills_constant_curvature(seed in any::<u64>(), m in 3usize..=8, lambda in -5.0f64..5.0) {
        let mut rng = stream_rng(seed, 2);
        let g = space(&mut rng, m);
        let a = random_curvature(&mut rng, g.clone(), 2);
        let shifted = a.plus(&CurvatureTensor::constant_curvature(g, lambda));
        prop_assert!(shifted.weyl_projection().max_abs_diff(&a.weyl_projection()) < 1e-10 * (1.0 + lambda.abs()));
    }

    #[test]
    fn jacobi_trace_is_ricci(seed in any::<u64>(), m in 3usize..=8) {
        let mut rng = stream_rng(seed, 3);
        let g = space(&mut rng, m);
        let a = random_curvature(&mut rng, g, 3);
        let x = uniform_vector(&mut rng, m, 1.0);
        let j = a.jacobi(&x).unwrap();
        prop_assert!((j.trace() - a.ricci().eval(&x, &x)).abs() < 1e-9);
        prop_assert!(j.apply(&x).amax() < 1e-10);
        let w = a.weyl_projection();
        for _ in 0..10 {
            let y = uniform_vector(&mut rng, m, 1.0);
            prop_assert!(w.jacobi(&y).unwrap().trace().abs() < 1e-9);
        }
    }

    #[test]
    fn skew_operator_is_skew_adjoint(seed in any::<u64>(), m in 3usize..=8) {
        let mut rng = stream_rng(seed, 4);
        let g = space(&mut rng, m);
        let a = random_curvature(&mut rng, g.clone(), 3);
        let u = non_null(&mut rng, &g);
        let v = uniform_vector(&mut rng, m, 1.0);
        // mixed or degenerate spans are rejected; skip those draws
        if let Ok(plane) = OrientedPlane::from_span(&g, &u, &v, 1e-3) {
            let s = a.skew_operator(&plane).unwrap().matrix;
            let gs = g.gram() * &s;
            prop_assert!((&gs + gs.transpose()).amax() < 1e-10);
        }
    }

    #[test]
    fn einstein_shift_on_x_perp(seed in any::<u64>(), m in 3usize..=8, lambda in -3.0f64..3.0, ricci_flat in any::<bool>()) {
        let mut rng = stream_rng(seed, 5);
        let g = space(&mut rng, m);
        let w0 = random_curvature(&mut rng, g.clone(), 2).weyl_projection();
        let cc = CurvatureTensor::constant_curvature(g.clone(), lambda);
        let a = if ricci_flat { w0 } else { w0.plus(&cc) };
        let c = a.scalar_curvature() / m as f64;
        prop_assert!((a.ricci().matrix - g.gram() * c).amax() < 1e-9);
        let mu = -c / (m as f64 - 1.0);
        let x = non_null(&mut rng, &g);
        let gxx = g.inner(&x, &x).unwrap();
        let gx = g.gram() * &x;
        let proj = DMatrix::identity(m, m) - &x * gx.transpose() / gxx;
        let lhs = a.weyl_projection().jacobi(&x).unwrap().matrix * &proj;
        let rhs = (a.jacobi(&x).unwrap().matrix + DMatrix::identity(m, m) * (mu * gxx)) * &proj;
        prop_assert!((lhs - rhs).amax() < 1e-9);
    }

    #[test]
    fn involution_traces(seed in any::<u64>(), m in 3usize..=8, p_frac in 0.0f64..=1.0, lambda in -2.0f64..2.0) {
        let mut rng = stream_rng(seed, 6);
        let p = ((m as f64) * p_frac).round() as usize;
        let g = IndefiniteInnerProduct::diagonal(p, m - p).unwrap();
        let mut plus: Vec<bool> = (0..m).map(|_| rng.random_bool(0.5)).collect();
        plus[0] = true;
        plus[m - 1] = false;
        let a_plus = plus.iter().filter(|&&b| b).count();
        let a_minus = m - a_plus;
        let phi = involution(&mut rng, &g, &plus);
        let norm = phi.matrix.amax();
        prop_assert!((&phi.matrix * &phi.matrix - DMatrix::identity(m, m)).amax() < 1e-12 * m as f64 * (1.0 + norm * norm));
        let w = CurvatureTensor::build_a_phi(Arc::new(g.clone()), &phi).unwrap().scaled(lambda);
        for (sign, own, other) in [(1.0, a_plus, a_minus), (-1.0, a_minus, a_plus)] {
            // (phi + sign Id) v lies in the sign eigenspace; both causal
            // kinds are tried, skipping kinds the eigenspace lacks
            for eps in [1.0, -1.0] {
                let found = (0..200).find_map(|_| {
                    let v = uniform_vector(&mut rng, m, 1.0);
                    let e = &phi.matrix * &v + &v * sign;
                    let n = g.inner(&e, &e).unwrap();
                    (n * eps > 0.05 * e.norm_squared()).then(|| e / n.abs().sqrt())
                });
                let Some(e) = found else { continue };
                let j = w.jacobi(&e).unwrap();
                let expect = eps * lambda * (own as f64 - 1.0 - other as f64);
                let scale = 1.0 + m as f64 * j.matrix.amax();
                prop_assert!((j.trace() - expect).abs() < 1e-10 * scale);
            }
        }
    }
}
