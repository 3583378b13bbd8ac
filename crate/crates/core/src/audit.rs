//! Randomized audits of the identities every closed-form resolvent here must
//! satisfy: the resolvent equation for the regularized operator, firm
//! nonexpansiveness of J_λ, λ-cocoercivity and 1/λ-Lipschitz continuity of
//! A_λ, graph consistency (A_λx is a value of A at J_λx), invariance of the
//! certified zero, and the two-index variation bound.
//!
//! Draws are deterministic per seed, so a reported worst case is always
//! reproducible. Inequality checks record the signed violation (≤ 0 means
//! satisfied with margin); identity checks record a residual, so `worst`
//! is comparable against `tolerance` either way.

use alloc::vec;
use alloc::vec::Vec;

use crate::diagnostics;
use crate::error::Error;
use crate::linalg::{self, LuFactors, Matrix};
use crate::math;
use crate::operator::{
    build_saddle_operator, OperatorKind, OperatorSpec, ProxRule, ResolventOracle, SaddleBlock,
    YosidaView,
};
use crate::point::Point;

/// Shared random draws for every audit in the crate.
pub(crate) mod sampling {
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Uniform in [0, 1) with 53 significant bits.
    pub(crate) fn unit(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub(crate) fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * unit(rng)
    }

    pub(crate) fn fill_uniform(rng: &mut ChaCha8Rng, out: &mut [f64], lo: f64, hi: f64) {
        for v in out.iter_mut() {
            *v = uniform(rng, lo, hi);
        }
    }

    /// Log-uniform on [lo, hi]; endpoints must be positive.
    pub(crate) fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        crate::math::exp(uniform(rng, crate::math::ln(lo), crate::math::ln(hi)))
    }
}

/// Sampling box for state vectors.
const SPACE_LO: f64 = -10.0;
const SPACE_HI: f64 = 10.0;
/// Log-uniform range for every resolvent index drawn here.
const INDEX_LO: f64 = 1e-3;
const INDEX_HI: f64 = 1e3;

#[derive(Clone, Copy, Debug)]
pub struct AuditConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> AuditConfig {
        AuditConfig { samples: 10_000, seed: 0x5eed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropertyKind {
    /// J_{μA_λ} via the shift identity vs. a direct closed form of A_λ.
    ResolventEquation,
    /// ‖J_λx − J_λy‖² ≤ ⟨J_λx − J_λy, x − y⟩
    FirmNonexpansiveness,
    /// ⟨A_λx − A_λy, x − y⟩ ≥ λ‖A_λx − A_λy‖²
    Cocoercivity,
    /// ‖A_λx − A_λy‖ ≤ ‖x − y‖/λ
    Lipschitz,
    /// A_λ(x) equals the raw operator applied to J_λ(x).
    GraphConsistency,
    /// The certified zero is fixed by J_λ (A_λ vanishes there) for all λ.
    ZeroSetInvariance,
    /// ‖γA_γx − δA_δy‖ ≤ 2‖x − y‖ + (2‖x − z‖/γ)·|γ − δ|
    VariationBound,
}

impl PropertyKind {
    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::ResolventEquation => "resolvent-equation",
            PropertyKind::FirmNonexpansiveness => "firm-nonexpansiveness",
            PropertyKind::Cocoercivity => "cocoercivity",
            PropertyKind::Lipschitz => "lipschitz-bound",
            PropertyKind::GraphConsistency => "graph-consistency",
            PropertyKind::ZeroSetInvariance => "zero-set-invariance",
            PropertyKind::VariationBound => "variation-bound",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PropertyOutcome {
    pub property: PropertyKind,
    pub samples: usize,
    /// Signed violation for inequalities, residual for identities.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn outcome(property: PropertyKind, samples: usize, worst: f64, tolerance: f64) -> PropertyOutcome {
    PropertyOutcome { property, samples, worst, tolerance, passed: worst <= tolerance }
}

/// Decorrelated per-property stream so dropping one check never shifts the
/// draws of another.
fn stream_seed(base: u64, idx: u64) -> u64 {
    base.wrapping_add(idx.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Run every applicable property against one operator.
///
/// Graph consistency is skipped for set-valued rules (there is no single raw
/// value to compare against); the zero-set and variation checks need a
/// certified zero. Everything else applies to every operator.
pub fn audit_operator(
    op: &OperatorSpec,
    config: &AuditConfig,
) -> Result<Vec<PropertyOutcome>, Error> {
    if config.samples == 0 {
        return Err(Error::bad_param("samples", "audit needs at least one sample"));
    }
    let n = op.dimension();
    let mut out = Vec::new();
    out.push(resolvent_equation(op, config)?);
    out.extend(pairwise_bounds(op, config)?);
    if op.apply_raw(&vec![0.0; n]).is_ok() {
        out.push(graph_consistency(op, config)?);
    }
    if let Some(z) = op.known_zero() {
        let z = z.to_vec();
        out.push(zero_set_invariance(op, &z, config)?);
        let worst =
            diagnostics::variation_bound_audit(op, &z, config.samples, stream_seed(config.seed, 4))?;
        out.push(outcome(PropertyKind::VariationBound, config.samples, worst, 1e-10));
    }
    Ok(out)
}

/// J_{μ·A_λ}(x) from a closed form of A_λ, independent of the shift identity
/// the Yosida view uses. Affine-representable kinds go through one dense
/// solve of (I + μM̃)u = x − μq̃; the set-valued scalar rules have piecewise
/// closed forms.
fn regularized_resolvent_direct(
    op: &OperatorSpec,
    lambda: f64,
    mu: f64,
    x: &[f64],
) -> Result<Vec<f64>, Error> {
    let total = lambda + mu;
    match op.kind() {
        OperatorKind::Prox(ProxRule::Abs) => Ok(x
            .iter()
            .map(|&xi| {
                if math::abs(xi) <= total {
                    xi * lambda / total
                } else if xi > 0.0 {
                    xi - mu
                } else {
                    xi + mu
                }
            })
            .collect()),
        OperatorKind::Prox(ProxRule::Box { lower, upper }) => Ok(x
            .iter()
            .map(|&xi| {
                if xi > *upper {
                    (lambda * xi + mu * upper) / total
                } else if xi < *lower {
                    (lambda * xi + mu * lower) / total
                } else {
                    xi
                }
            })
            .collect()),
        _ => {
            let (mt, qt) = op
                .yosida_as_affine(lambda)
                .ok_or(Error::NoClosedFormResolvent("regularization of this operator"))?;
            let rhs: Vec<f64> = x.iter().zip(&qt).map(|(xi, qi)| xi - mu * qi).collect();
            Ok(LuFactors::factor(&mt.identity_plus_scaled(mu))?.solve(&rhs))
        }
    }
}

fn resolvent_equation(op: &OperatorSpec, config: &AuditConfig) -> Result<PropertyOutcome, Error> {
    let n = op.dimension();
    let mut rng = sampling::rng(stream_seed(config.seed, 0));
    let mut x = vec![0.0; n];
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..config.samples {
        sampling::fill_uniform(&mut rng, &mut x, SPACE_LO, SPACE_HI);
        let lambda = sampling::log_uniform(&mut rng, INDEX_LO, INDEX_HI);
        let mu = sampling::log_uniform(&mut rng, INDEX_LO, INDEX_HI);
        let view = YosidaView::new(op, lambda)?;
        let shifted = view.resolvent(mu, &x)?;
        let direct = regularized_resolvent_direct(op, lambda, mu, &x)?;
        let residual = linalg::dist(&shifted, &direct) / (1.0 + linalg::norm(&x));
        worst = worst.max(residual);
    }
    Ok(outcome(PropertyKind::ResolventEquation, config.samples, worst, 1e-10))
}

/// Firm nonexpansiveness, cocoercivity, and the Lipschitz bound share the
/// same pair draws, so the three are measured in one pass.
///
/// Each violation is evaluated in a form free of large cancelling terms:
/// with d = x − y, j = J_λx − J_λy and a = A_λx − A_λy,
///   firm:  ‖j‖² − ⟨j, d⟩            = ⟨j, j − d⟩
///   coco:  λ‖a‖² − ⟨a, d⟩           = −⟨a, j⟩
///   lip:   (λ‖a‖ − ‖d‖)/‖d‖        with λ‖a‖ taken as ‖d − j‖
/// a is taken from the operator's own regularization (its closed form), not
/// reconstructed as (d − j)/λ, which loses λ⁻¹-amplified digits; and a clamp
/// that maps two points to the same image then contributes exactly zero
/// instead of the difference of two huge products.
fn pairwise_bounds(op: &OperatorSpec, config: &AuditConfig) -> Result<[PropertyOutcome; 3], Error> {
    let n = op.dimension();
    let mut rng = sampling::rng(stream_seed(config.seed, 1));
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut j = vec![0.0; n];
    let mut a = vec![0.0; n];
    let mut worst_firm = f64::NEG_INFINITY;
    let mut worst_coco = f64::NEG_INFINITY;
    let mut worst_lip = f64::NEG_INFINITY;
    for _ in 0..config.samples {
        sampling::fill_uniform(&mut rng, &mut x, SPACE_LO, SPACE_HI);
        sampling::fill_uniform(&mut rng, &mut y, SPACE_LO, SPACE_HI);
        let lambda = sampling::log_uniform(&mut rng, INDEX_LO, INDEX_HI);
        let jx = op.resolvent(lambda, &x)?;
        let jy = op.resolvent(lambda, &y)?;
        let ax = op.yosida(lambda, &x)?;
        let ay = op.yosida(lambda, &y)?;
        for i in 0..n {
            d[i] = x[i] - y[i];
            j[i] = jx[i] - jy[i];
            a[i] = ax[i] - ay[i];
        }
        let firm: f64 = j.iter().zip(&d).map(|(ji, di)| ji * (ji - di)).sum();
        worst_firm = worst_firm.max(firm);
        worst_coco = worst_coco.max(-linalg::dot(&a, &j));
        let dn = linalg::norm(&d);
        if dn > 0.0 {
            let scaled: f64 = linalg::dist(&d, &j);
            worst_lip = worst_lip.max((scaled - dn) / dn);
        }
    }
    Ok([
        outcome(PropertyKind::FirmNonexpansiveness, config.samples, worst_firm, 1e-12),
        outcome(PropertyKind::Cocoercivity, config.samples, worst_coco, 1e-12),
        outcome(PropertyKind::Lipschitz, config.samples, worst_lip, 1e-12),
    ])
}

fn graph_consistency(op: &OperatorSpec, config: &AuditConfig) -> Result<PropertyOutcome, Error> {
    let n = op.dimension();
    let mut rng = sampling::rng(stream_seed(config.seed, 2));
    let mut x = vec![0.0; n];
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..config.samples {
        sampling::fill_uniform(&mut rng, &mut x, SPACE_LO, SPACE_HI);
        let lambda = sampling::log_uniform(&mut rng, INDEX_LO, INDEX_HI);
        let direct = op.yosida(lambda, &x)?;
        let through_graph = op.apply_raw(&op.resolvent(lambda, &x)?)?;
        let residual = linalg::dist(&direct, &through_graph) / (1.0 + linalg::norm(&x));
        worst = worst.max(residual);
    }
    Ok(outcome(PropertyKind::GraphConsistency, config.samples, worst, 1e-12))
}

fn zero_set_invariance(
    op: &OperatorSpec,
    z: &[f64],
    config: &AuditConfig,
) -> Result<PropertyOutcome, Error> {
    let mut rng = sampling::rng(stream_seed(config.seed, 3));
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..config.samples {
        let lambda = sampling::log_uniform(&mut rng, INDEX_LO, INDEX_HI);
        worst = worst.max(linalg::norm(&op.yosida(lambda, z)?));
    }
    Ok(outcome(PropertyKind::ZeroSetInvariance, config.samples, worst, 1e-12))
}

/// Every closed-form kind the crate ships, at desk scale, each with a
/// certified zero so all seven properties stay exercisable.
pub fn catalog() -> Vec<(&'static str, OperatorSpec)> {
    let psd = Matrix::from_rows(&[
        &[2.0, -1.0, 0.0],
        &[-1.0, 2.0, 1.0],
        &[0.0, -1.0, 1.0],
    ])
    .expect("static shape");
    let semidefinite = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).expect("static shape");
    let one = || Matrix::from_rows(&[&[1.0]]).expect("static shape");
    let quad_block = || SaddleBlock::Quadratic { curvature: one(), linear: vec![0.0] };
    vec![
        ("zero-2d", OperatorSpec::zero(2)),
        ("rotation-2d", OperatorSpec::rotation2d()),
        (
            "affine-identity-2d",
            OperatorSpec::affine(Matrix::identity(2), vec![0.0; 2]).expect("catalog data"),
        ),
        (
            "affine-psd-3d",
            OperatorSpec::affine(psd, vec![1.0, -2.0, 0.5]).expect("catalog data"),
        ),
        (
            // singular linear part: the zero set is a line, one point certified
            "affine-semidefinite-2d",
            OperatorSpec::affine(semidefinite, vec![0.0; 2])
                .expect("catalog data")
                .with_known_zero(Point::new(vec![0.0, 0.0]).expect("catalog data"))
                .expect("origin is a zero"),
        ),
        ("prox-abs-3d", OperatorSpec::prox(ProxRule::Abs, 3).expect("catalog data")),
        (
            "prox-box-2d",
            OperatorSpec::prox(ProxRule::Box { lower: -1.0, upper: 2.0 }, 2)
                .expect("catalog data"),
        ),
        (
            "prox-quadratic-1d",
            OperatorSpec::prox(ProxRule::Quadratic { curvature: 2.0, center: 1.5 }, 1)
                .expect("catalog data"),
        ),
        (
            "saddle-quadratic-1d",
            build_saddle_operator(quad_block(), quad_block(), one(), one())
                .expect("catalog data"),
        ),
    ]
}

pub fn audit_catalog(
    config: &AuditConfig,
) -> Result<Vec<(&'static str, Vec<PropertyOutcome>)>, Error> {
    catalog()
        .into_iter()
        .map(|(name, op)| Ok((name, audit_operator(&op, config)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> AuditConfig {
        AuditConfig { samples: 400, seed: 7 }
    }

    #[test]
    fn catalog_covers_every_closed_form_kind() {
        let ops = catalog();
        assert_eq!(ops.len(), 9);
        for (i, (a, _)) in ops.iter().enumerate() {
            for (b, _) in &ops[i + 1..] {
                assert_ne!(a, b);
            }
        }
        for (name, op) in &ops {
            assert!(op.known_zero().is_some(), "{name} lacks a certified zero");
        }
        let has = |f: &dyn Fn(&OperatorKind) -> bool| ops.iter().any(|(_, o)| f(o.kind()));
        assert!(has(&|k| matches!(k, OperatorKind::Zero)));
        assert!(has(&|k| matches!(k, OperatorKind::Rotation2D)));
        assert!(has(&|k| matches!(k, OperatorKind::Affine { .. })));
        assert!(has(&|k| matches!(k, OperatorKind::Prox(ProxRule::Abs))));
        assert!(has(&|k| matches!(k, OperatorKind::Prox(ProxRule::Box { .. }))));
        assert!(has(&|k| matches!(k, OperatorKind::Prox(ProxRule::Quadratic { .. }))));
    }

    #[test]
    fn every_catalog_operator_passes_a_quick_audit() {
        for (name, op) in catalog() {
            for o in audit_operator(&op, &quick()).unwrap() {
                assert!(
                    o.passed,
                    "{name}/{}: worst {:+.3e} over tolerance {:.1e}",
                    o.property.name(),
                    o.worst,
                    o.tolerance
                );
            }
        }
    }

    #[test]
    fn applicability_matches_operator_shape() {
        let names = |op: &OperatorSpec| -> Vec<&'static str> {
            audit_operator(op, &quick())
                .unwrap()
                .iter()
                .map(|o| o.property.name())
                .collect()
        };
        // set-valued rule: no single raw value, so no graph check
        let clamp = OperatorSpec::prox(ProxRule::Box { lower: -1.0, upper: 2.0 }, 2).unwrap();
        assert_eq!(
            names(&clamp),
            [
                "resolvent-equation",
                "firm-nonexpansiveness",
                "cocoercivity",
                "lipschitz-bound",
                "zero-set-invariance",
                "variation-bound"
            ]
        );
        // single-valued with a certified zero: all seven
        assert_eq!(names(&OperatorSpec::rotation2d()).len(), 7);
    }

    #[test]
    fn same_seed_reproduces_the_audit_exactly() {
        let op = OperatorSpec::rotation2d();
        let a = audit_operator(&op, &quick()).unwrap();
        let b = audit_operator(&op, &quick()).unwrap();
        for (oa, ob) in a.iter().zip(&b) {
            assert_eq!(oa.worst.to_bits(), ob.worst.to_bits());
        }
        let c = audit_operator(&op, &AuditConfig { samples: 400, seed: 8 }).unwrap();
        assert!(a.iter().zip(&c).any(|(oa, oc)| oa.worst != oc.worst));
    }

    #[test]
    fn rejects_empty_sample_budget() {
        let err = audit_operator(&OperatorSpec::zero(1), &AuditConfig { samples: 0, seed: 0 });
        assert!(matches!(err, Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn sampling_helpers_respect_their_ranges() {
        let mut r = sampling::rng(1);
        for _ in 0..1000 {
            let v = sampling::log_uniform(&mut r, 1e-3, 1e3);
            assert!(v >= 0.999e-3 && v <= 1.001e3);
        }
        let mut buf = [0.0; 8];
        sampling::fill_uniform(&mut r, &mut buf, -10.0, 10.0);
        for v in buf {
            assert!((-10.0..10.0).contains(&v));
        }
    }

    #[test]
    fn direct_regularized_resolvent_matches_hand_values() {
        // identity base: A_1 = ½I, so J_{1·A_1}(x) = x/1.5
        let id = OperatorSpec::affine(Matrix::identity(2), vec![0.0; 2]).unwrap();
        let direct = regularized_resolvent_direct(&id, 1.0, 1.0, &[4.0, 0.0]).unwrap();
        assert!((direct[0] - 8.0 / 3.0).abs() < 1e-14);
        assert!(direct[1].abs() < 1e-14);
        let view = YosidaView::new(&id, 1.0).unwrap();
        let shifted = view.resolvent(1.0, &[4.0, 0.0]).unwrap();
        assert!(linalg::dist(&shifted, &direct) < 1e-14);

        // soft-threshold pieces at λ = 0.5, μ = 1.5 (switch at |x| = 2)
        let abs3 = OperatorSpec::prox(ProxRule::Abs, 3).unwrap();
        let got = regularized_resolvent_direct(&abs3, 0.5, 1.5, &[1.0, 5.0, -3.0]).unwrap();
        assert_eq!(got, vec![0.25, 3.5, -1.5]);

        // clamp pieces for [−1, 2] at the same indices
        let clamp = OperatorSpec::prox(ProxRule::Box { lower: -1.0, upper: 2.0 }, 2).unwrap();
        let got = regularized_resolvent_direct(&clamp, 0.5, 1.5, &[4.0, 0.5]).unwrap();
        assert_eq!(got, vec![(0.5 * 4.0 + 1.5 * 2.0) / 2.0, 0.5]);
    }
}
