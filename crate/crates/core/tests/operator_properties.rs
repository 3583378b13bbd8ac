//! Randomized laws of the resolvent calculus, checked across the whole
//! operator catalog with shrinking on failure. These complement the
//! fixed-seed sweeps in `ripa_core::audit` by exploring (λ, μ, x) with an
//! independent driver and asserting against the *defining equations* rather
//! than a second closed form.

use proptest::prelude::*;
use ripa_core::audit::catalog;
use ripa_core::linalg;
use ripa_core::operator::SaddleBlock;
use ripa_core::{build_saddle_operator, OperatorSpec, ResolventOracle, YosidaView};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// J_{μ·A_λ}(x) = u must solve its defining equation u + μ·A_λ(u) = x.
    #[test]
    fn regularized_resolvent_solves_defining_equation(
        coords in proptest::collection::vec(-10.0..10.0f64, 3),
        lambda in 1e-3..1e3f64,
        mu in 1e-3..1e3f64,
    ) {
        for (name, op) in catalog() {
            let n = op.dimension();
            let x = &coords[..n];
            let view = YosidaView::new(&op, lambda).unwrap();
            let u = view.resolvent(mu, x).unwrap();
            let a_u = op.yosida(lambda, &u).unwrap();
            let mut residual = 0.0f64;
            for i in 0..n {
                residual += (u[i] + mu * a_u[i] - x[i]).powi(2);
            }
            let residual = residual.sqrt();
            prop_assert!(
                residual <= 1e-10 * (1.0 + linalg::norm(x)),
                "{name}: residual {residual:e} at λ={lambda}, μ={mu}"
            );
        }
    }

    /// Regularizing twice adds the indices: x − J_{μ·A_λ}(x) = μ·A_{λ+μ}(x).
    #[test]
    fn yosida_indices_add_under_nesting(
        coords in proptest::collection::vec(-10.0..10.0f64, 3),
        lambda in 1e-3..1e3f64,
        mu in 1e-3..1e3f64,
    ) {
        for (name, op) in catalog() {
            let n = op.dimension();
            let x = &coords[..n];
            let view = YosidaView::new(&op, lambda).unwrap();
            let j = view.resolvent(mu, x).unwrap();
            let a_total = op.yosida(lambda + mu, x).unwrap();
            let mut residual = 0.0f64;
            for i in 0..n {
                residual += (x[i] - j[i] - mu * a_total[i]).powi(2);
            }
            let residual = residual.sqrt();
            prop_assert!(
                residual <= 1e-10 * (1.0 + linalg::norm(x)),
                "{name}: residual {residual:e} at λ={lambda}, μ={mu}"
            );
        }
    }

    /// The three pairwise bounds every regularization obeys: firm
    /// nonexpansiveness of J_λ, λ-cocoercivity and 1/λ-Lipschitz
    /// continuity of A_λ.
    #[test]
    fn pairwise_regularization_bounds(
        xc in proptest::collection::vec(-10.0..10.0f64, 3),
        yc in proptest::collection::vec(-10.0..10.0f64, 3),
        lambda in 1e-3..1e3f64,
    ) {
        for (name, op) in catalog() {
            let n = op.dimension();
            let (x, y) = (&xc[..n], &yc[..n]);
            let jx = op.resolvent(lambda, x).unwrap();
            let jy = op.resolvent(lambda, y).unwrap();
            let ax = op.yosida(lambda, x).unwrap();
            let ay = op.yosida(lambda, y).unwrap();
            let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            let jd: Vec<f64> = jx.iter().zip(&jy).map(|(a, b)| a - b).collect();
            let ad: Vec<f64> = ax.iter().zip(&ay).map(|(a, b)| a - b).collect();

            let firm = dot(&jd, &jd) - dot(&jd, &d);
            prop_assert!(firm <= 1e-12, "{name}: firm violation {firm:e} at λ={lambda}");

            let coco = -dot(&ad, &jd);
            prop_assert!(coco <= 1e-12, "{name}: cocoercivity violation {coco:e} at λ={lambda}");

            let dn = linalg::norm(&d);
            if dn > 0.0 {
                let lip = (linalg::dist(&d, &jd) - dn) / dn;
                prop_assert!(lip <= 1e-12, "{name}: Lipschitz violation {lip:e} at λ={lambda}");
            }
        }
    }

    /// The saddle builder's output is monotone: the quadratic blocks
    /// contribute PSD diagonal blocks and the coupling is antisymmetric.
    #[test]
    fn saddle_operator_is_monotone(
        uc in proptest::collection::vec(-10.0..10.0f64, 3),
        vc in proptest::collection::vec(-10.0..10.0f64, 3),
    ) {
        let block = || SaddleBlock::Quadratic {
            curvature: linalg::Matrix::from_rows(&[&[2.0]]).unwrap(),
            linear: vec![1.0],
        };
        let a = linalg::Matrix::from_rows(&[&[3.0]]).unwrap();
        let b = linalg::Matrix::from_rows(&[&[-1.5]]).unwrap();
        let op = build_saddle_operator(block(), block(), a, b).unwrap();
        let mu = op.apply_raw(&uc).unwrap();
        let mv = op.apply_raw(&vc).unwrap();
        let mut inner = 0.0;
        for i in 0..3 {
            inner += (mu[i] - mv[i]) * (uc[i] - vc[i]);
        }
        prop_assert!(inner >= -1e-10, "monotonicity inner product {inner:e}");
    }

    /// Every certified zero stays fixed under the resolvent at any index.
    #[test]
    fn certified_zeros_are_resolvent_fixed_points(lambda in 1e-3..1e3f64) {
        for (name, op) in catalog() {
            let z = op.known_zero().unwrap().to_vec();
            let j = op.resolvent(lambda, &z).unwrap();
            let dev = linalg::dist(&j, &z);
            prop_assert!(dev <= 1e-12, "{name}: J_λ moves its zero by {dev:e}");
        }
    }

    /// Resolvents reject non-positive or non-finite indices uniformly.
    #[test]
    fn invalid_indices_rejected(bad in prop_oneof![Just(0.0f64), -1e3..0.0f64]) {
        let op = OperatorSpec::rotation2d();
        prop_assert!(op.resolvent(bad, &[1.0, 1.0]).is_err());
        prop_assert!(op.yosida(bad, &[1.0, 1.0]).is_err());
    }
}
