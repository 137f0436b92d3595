use proptest::prelude::*;
use weyl_spectra::family::parse_family;
use weyl_spectra::geometry::{riemann_at, sample_points, MetricField};
use weyl_spectra::jet::Jet2;
use weyl_spectra::jordan::jordan_invariants;
use weyl_spectra::linalg::{CausalKind, Tolerances};
use weyl_spectra::probe::{sample_pseudo_sphere, ProbeConfig};

const FAMILIES: [&str; 9] = [
    "flat:m=5,p=2",
    "constcurv:K=1,m=4",
    "constcurv:K=-1,m=5,p=2",
    "gf:p=3,f=sum_sq",
    "gf:p=3,f=indef",
    "gf:p=2,f=x1^4-3x1*x2+1/3x2^3",
    "gF:s=2,f=quartic",
    "rescale:alpha=exp_x2@gf:p=3,f=sum_sq",
    "rescale:alpha=1+x1^2@gF:s=2,f=quartic",
];

fn family() -> impl Strategy<Value = MetricField> {
    prop::sample::select(FAMILIES.to_vec()).prop_map(|f| parse_family(f).unwrap())
}

fn point(field: &MetricField, seed: u64) -> Vec<f64> {
    sample_points(field, 1, seed).unwrap().remove(0).as_slice().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn jets_match_finite_differences(field in family(), seed in any::<u64>()) {
        let x = point(&field, seed);
        let m = x.len();
        let jets = field.components(&Jet2::seed(&x)).unwrap();
        let plain = |y: &[f64]| field.components(y).unwrap();
        let h = 1e-4;
        let shifted = |i: usize, s: f64| {
            let mut y = x.clone();
            y[i] += s;
            plain(&y)
        };
        let scale = jets.iter().fold(1.0f64, |a, j| a.max(j.value.abs()));
        for i in 0..m {
            let (p, n) = (shifted(i, h), shifted(i, -h));
            let (p2, n2) = (shifted(i, 2.0 * h), shifted(i, -2.0 * h));
            for (c, jet) in jets.iter().enumerate() {
                // fourth-order central difference
                let fd = (8.0 * (p[c] - n[c]) - (p2[c] - n2[c])) / (12.0 * h);
                prop_assert!((jet.grad[i] - fd).abs() <= 1e-6 * scale.max(jet.grad.amax()), "d{i} g[{c}]: {} vs {fd}", jet.grad[i]);
            }
            for k in 0..m {
                let mut pp = x.clone();
                let mut pm = x.clone();
                let mut mp = x.clone();
                let mut mm = x.clone();
                pp[i] += h; pp[k] += h;
                pm[i] += h; pm[k] -= h;
                mp[i] -= h; mp[k] += h;
                mm[i] -= h; mm[k] -= h;
                let (a, b, c2, d) = (plain(&pp), plain(&pm), plain(&mp), plain(&mm));
                for (c, jet) in jets.iter().enumerate() {
                    let fd = (a[c] - b[c] - c2[c] + d[c]) / (4.0 * h * h);
                    prop_assert!((jet.hess[(i, k)] - fd).abs() <= 1e-5 * scale.max(jet.hess.amax()), "d{i}d{k} g[{c}]: {} vs {fd}", jet.hess[(i, k)]);
                }
            }
        }
    }

    #[test]
    fn riemann_has_curvature_symmetries(field in family(), seed in any::<u64>()) {
        let x = point(&field, seed);
        let frame = riemann_at(&field, &x).unwrap();
        let report = frame.riemann.validate();
        prop_assert!(report.max_violation() < 1e-9 * (1.0 + frame.riemann.max_abs()), "{:?}", report);
    }

    #[test]
    fn constant_curvature_jacobi_spectrum(seed in any::<u64>(), k in prop::sample::select(vec![-1.0, 0.5, 1.0]), p in 0usize..=2) {
        let field = parse_family(&format!("constcurv:K={k},m=4,p={p}")).unwrap();
        let x = point(&field, seed);
        let frame = riemann_at(&field, &x).unwrap();
        let cfg = ProbeConfig { n_vectors: 5, seed, ..ProbeConfig::default() };
        for v in sample_pseudo_sphere(&frame.space, CausalKind::Spacelike, &cfg).unwrap() {
            let gvv = frame.space.inner(&v, &v).unwrap();
            let fp = jordan_invariants(&frame.riemann.jacobi(&v).unwrap(), &Tolerances::default()).unwrap();
            // eigenvalue 0 once (along v) and K g(v,v) on v-perp, diagonalizable
            prop_assert_eq!(fp.clusters.len(), 2);
            let zero = fp.clusters.iter().find(|c| c.re.abs() < 1e-8).unwrap();
            let other = fp.clusters.iter().find(|c| c.re.abs() >= 1e-8).unwrap();
            prop_assert_eq!(zero.multiplicity, 1);
            prop_assert_eq!(other.multiplicity, 3);
            prop_assert!((other.re - k * gvv).abs() < 1e-9);
            prop_assert_eq!(&other.rank_chain, &vec![1, 1, 1, 1]);
        }
    }

    #[test]
    fn conformal_rescaling_scales_weyl_jacobi(seed in any::<u64>(), base in prop::sample::select(vec!["gf:p=3,f=sum_sq", "gF:s=2,f=quartic", "gf:p=3,f=indef"])) {
        let g2 = parse_family(base).unwrap();
        let g1 = parse_family(&format!("rescale:alpha=exp(x1+1/2x2)@{base}")).unwrap();
        let x = point(&g2, seed);
        let alpha = (x[0] + 0.5 * x[1]).exp();
        let f1 = riemann_at(&g1, &x).unwrap();
        let f2 = riemann_at(&g2, &x).unwrap();
        let tol = Tolerances::default();
        let cfg = ProbeConfig { n_vectors: 5, seed, ..ProbeConfig::default() };
        for v in sample_pseudo_sphere(&f2.space, CausalKind::Spacelike, &cfg).unwrap() {
            let j1 = jordan_invariants(&f1.weyl.jacobi(&(&v / alpha.sqrt())).unwrap(), &tol).unwrap();
            let j2 = jordan_invariants(&f2.weyl.jacobi(&v).unwrap(), &tol).unwrap();
            prop_assert_eq!(&j1.overall_rank_chain, &j2.overall_rank_chain);
            prop_assert_eq!(j1.clusters.len(), j2.clusters.len());
            for (a, b) in j1.clusters.iter().zip(&j2.clusters) {
                prop_assert_eq!(&a.rank_chain, &b.rank_chain);
                prop_assert!((a.eigenvalue() - b.eigenvalue() / alpha).norm() < 1e-8 * (1.0 + b.eigenvalue().norm()));
            }
        }
    }
}
