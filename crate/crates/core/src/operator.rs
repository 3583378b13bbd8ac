//! The operator catalog: maximally monotone operators on R^n whose
//! resolvents `J_{λA} = (I + λA)⁻¹` have closed forms.
//!
//! Everything downstream (flows, the inertial proximal iteration, audits)
//! talks to operators through [`ResolventOracle`]. The catalog is closed on
//! purpose: a general monotone operator without an exact resolvent is
//! rejected at construction instead of being solved by an inner loop, so a
//! resolvent call is always a direct solve and never an approximation.
//!
//! [`YosidaView`] wraps a base operator and exposes `A_λ` as an operator in
//! its own right. Its resolvent uses the index-shift identity
//! `J_{μA_λ}(x) = λ/(λ+μ)·x + μ/(λ+μ)·J_{(λ+μ)A}(x)`, costing exactly one
//! base resolvent call, and `(A_λ)_μ = A_{λ+μ}` for the regularization
//! itself.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg::{self, LuFactors, Matrix};
use crate::point::Point;

/// Smallest admissible eigenvalue of the symmetric part of an affine
/// operator's linear term. Slightly negative to absorb rounding in
/// user-supplied matrices.
pub const MONOTONE_EIG_TOL: f64 = -1e-10;

/// How exactly the resolvent must fix a certified zero.
pub const KNOWN_ZERO_FIX_TOL: f64 = 1e-12;

const KNOWN_ZERO_SAMPLE_LAMBDAS: [f64; 5] = [1e-3, 1e-1, 1.0, 1e1, 1e3];

/// Closed-form scalar subdifferential rules, applied per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub enum ProxRule {
    /// Subdifferential of |·| (ℓ1 per coordinate); resolvent is the
    /// soft-threshold. Set-valued at 0.
    Abs,
    /// Normal cone of the box [lower, upper]^n; resolvent is the clamp.
    /// Set-valued on the boundary.
    Box { lower: f64, upper: f64 },
    /// Gradient of ½·curvature·(x − center)², i.e. x ↦ curvature·(x − center).
    Quadratic { curvature: f64, center: f64 },
}

#[derive(Clone, Debug)]
pub enum OperatorKind {
    /// A ≡ 0; the resolvent is the identity.
    Zero,
    /// x ↦ Mx + q with monotone M (symmetric part PSD up to tolerance).
    Affine { matrix: Matrix, offset: Vec<f64> },
    /// The planar quarter-turn generator ((0,−1),(1,0)); maximally monotone
    /// with a unique zero and no associated potential.
    Rotation2D,
    /// A coordinate-wise scalar rule from the closed-form catalog.
    Prox(ProxRule),
}

#[derive(Clone, Debug)]
pub struct OperatorSpec {
    kind: OperatorKind,
    dim: usize,
    known_zero: Option<Vec<f64>>,
}

/// Small LRU of LU factorizations of (I + λM), keyed by the bits of λ.
///
/// Owned by whoever drives an operator through many resolvent calls (one per
/// run, never shared), so the operator itself stays immutable and freely
/// shareable across threads.
#[derive(Debug, Default)]
pub struct ResolventCache {
    slots: Vec<CacheSlot>,
    tick: u64,
}

#[derive(Debug)]
struct CacheSlot {
    key: u64,
    factors: LuFactors,
    last_used: u64,
}

const CACHE_CAPACITY: usize = 4;

impl ResolventCache {
    pub fn new() -> ResolventCache {
        ResolventCache { slots: Vec::with_capacity(CACHE_CAPACITY), tick: 0 }
    }

    fn lookup(&mut self, key: u64) -> Option<usize> {
        let pos = self.slots.iter().position(|s| s.key == key)?;
        self.tick += 1;
        self.slots[pos].last_used = self.tick;
        Some(pos)
    }

    fn insert(&mut self, key: u64, factors: LuFactors) -> usize {
        self.tick += 1;
        if self.slots.len() < CACHE_CAPACITY {
            self.slots.push(CacheSlot { key, factors, last_used: self.tick });
            return self.slots.len() - 1;
        }
        let mut oldest = 0;
        for (i, s) in self.slots.iter().enumerate() {
            if s.last_used < self.slots[oldest].last_used {
                oldest = i;
            }
        }
        self.slots[oldest] = CacheSlot { key, factors, last_used: self.tick };
        oldest
    }
}

/// Anything that can answer exact resolvent queries.
pub trait ResolventOracle {
    fn dimension(&self) -> usize;

    /// A certified element of the zero set, if one is attached.
    fn known_zero(&self) -> Option<&[f64]>;

    /// `J_{λA}(x) = (I + λA)⁻¹ x`, exact. Requires λ > 0.
    fn resolvent(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>, Error>;

    /// Yosida regularization `A_λ(x) = (x − J_{λA}(x))/λ`.
    fn yosida(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>, Error> {
        let j = self.resolvent(lambda, x)?;
        let inv = 1.0 / lambda;
        Ok(x.iter().zip(&j).map(|(xi, ji)| (xi - ji) * inv).collect())
    }

    /// Resolvent with a caller-owned factorization cache. Falls back to the
    /// plain resolvent for operators that have nothing worth caching.
    fn resolvent_cached(
        &self,
        lambda: f64,
        x: &[f64],
        _cache: &mut ResolventCache,
    ) -> Result<Vec<f64>, Error> {
        self.resolvent(lambda, x)
    }

    /// Cached variant of [`ResolventOracle::yosida`].
    fn yosida_cached(
        &self,
        lambda: f64,
        x: &[f64],
        _cache: &mut ResolventCache,
    ) -> Result<Vec<f64>, Error> {
        self.yosida(lambda, x)
    }

    /// Forward evaluation A(x) for single-valued operators; errors with
    /// [`Error::SetValuedOperator`] otherwise.
    fn apply_raw(&self, x: &[f64]) -> Result<Vec<f64>, Error>;
}

fn check_lambda(lambda: f64) -> Result<(), Error> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::bad_param("lambda", "resolvent index must be finite and > 0"));
    }
    Ok(())
}

fn check_dim(expected: usize, x: &[f64]) -> Result<(), Error> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: x.len() });
    }
    Ok(())
}

impl OperatorSpec {
    pub fn zero(dim: usize) -> OperatorSpec {
        OperatorSpec { kind: OperatorKind::Zero, dim, known_zero: Some(vec![0.0; dim]) }
    }

    pub fn rotation2d() -> OperatorSpec {
        OperatorSpec { kind: OperatorKind::Rotation2D, dim: 2, known_zero: Some(vec![0.0; 2]) }
    }

    /// x ↦ Mx + q. Rejects non-square M, dimension mismatches, and linear
    /// parts whose symmetric part has an eigenvalue below
    /// [`MONOTONE_EIG_TOL`]. If M is nonsingular the unique zero −M⁻¹q is
    /// attached as the certified zero.
    pub fn affine(matrix: Matrix, offset: Vec<f64>) -> Result<OperatorSpec, Error> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let n = matrix.rows();
        if offset.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: offset.len() });
        }
        if !linalg::all_finite(&offset) {
            return Err(Error::NonFinite("affine offset"));
        }
        let min_eig = linalg::smallest_symmetric_eigenvalue(&matrix.symmetric_part());
        if min_eig < MONOTONE_EIG_TOL {
            return Err(Error::NotMonotone { min_eigenvalue: min_eig });
        }
        let known_zero = match LuFactors::factor(&matrix) {
            Ok(f) => {
                let rhs: Vec<f64> = offset.iter().map(|v| -v).collect();
                Some(f.solve(&rhs))
            }
            Err(_) => None,
        };
        Ok(OperatorSpec { kind: OperatorKind::Affine { matrix, offset }, dim: n, known_zero })
    }

    /// A coordinate-wise rule from the closed-form catalog, acting on R^dim.
    pub fn prox(rule: ProxRule, dim: usize) -> Result<OperatorSpec, Error> {
        if dim == 0 {
            return Err(Error::bad_param("dim", "operator dimension must be positive"));
        }
        let known_zero = match &rule {
            ProxRule::Abs => Some(vec![0.0; dim]),
            ProxRule::Box { lower, upper } => {
                if !(lower.is_finite() && upper.is_finite() && lower <= upper) {
                    return Err(Error::bad_param("box", "need finite lower <= upper"));
                }
                Some(vec![0.0_f64.clamp(*lower, *upper); dim])
            }
            ProxRule::Quadratic { curvature, center } => {
                if !(curvature.is_finite() && *curvature >= 0.0) {
                    return Err(Error::bad_param(
                        "curvature",
                        "quadratic rule needs curvature >= 0 (monotonicity)",
                    ));
                }
                if !center.is_finite() {
                    return Err(Error::NonFinite("quadratic center"));
                }
                Some(vec![*center; dim])
            }
        };
        Ok(OperatorSpec { kind: OperatorKind::Prox(rule), dim, known_zero })
    }

    /// Replace the certified zero, after checking the resolvent actually
    /// fixes it (within [`KNOWN_ZERO_FIX_TOL`], over a spread of λ values).
    pub fn with_known_zero(mut self, zero: Point) -> Result<OperatorSpec, Error> {
        check_dim(self.dim, &zero)?;
        let mut worst = 0.0_f64;
        for &lambda in &KNOWN_ZERO_SAMPLE_LAMBDAS {
            let j = self.resolvent(lambda, &zero)?;
            worst = worst.max(linalg::dist(&j, &zero));
        }
        if worst > KNOWN_ZERO_FIX_TOL {
            return Err(Error::KnownZeroNotFixed { deviation: worst });
        }
        self.known_zero = Some(zero.into_coords());
        Ok(self)
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.kind, OperatorKind::Affine { .. })
    }

    /// Closed-form affine representation (M̃, q̃) of A_λ, when one exists:
    /// `A_λ(x) = M̃x + q̃`. `None` for the set-valued scalar rules.
    pub fn yosida_as_affine(&self, lambda: f64) -> Option<(Matrix, Vec<f64>)> {
        match &self.kind {
            OperatorKind::Zero => Some((Matrix::zeros(self.dim, self.dim), vec![0.0; self.dim])),
            OperatorKind::Rotation2D => {
                let d = 1.0 + lambda * lambda;
                let m = Matrix::from_rows(&[
                    &[lambda / d, -1.0 / d],
                    &[1.0 / d, lambda / d],
                ])
                .expect("static shape");
                Some((m, vec![0.0; 2]))
            }
            OperatorKind::Affine { matrix, offset } => {
                let inv = linalg::inverse(&matrix.identity_plus_scaled(lambda)).ok()?;
                let mt = inv.matmul(matrix);
                let qt = inv.matvec(offset);
                Some((mt, qt))
            }
            OperatorKind::Prox(ProxRule::Quadratic { curvature, center }) => {
                let m = curvature / (1.0 + lambda * curvature);
                let mut mat = Matrix::zeros(self.dim, self.dim);
                for i in 0..self.dim {
                    mat.set(i, i, m);
                }
                Some((mat, vec![-m * center; self.dim]))
            }
            OperatorKind::Prox(_) => None,
        }
    }

    /// Convenience wrapper over the trait method for validated points.
    pub fn resolvent_point(&self, lambda: f64, x: &Point) -> Result<Point, Error> {
        Point::new(self.resolvent(lambda, x)?)
    }

    /// Convenience wrapper over the trait method for validated points.
    pub fn yosida_point(&self, lambda: f64, x: &Point) -> Result<Point, Error> {
        Point::new(self.yosida(lambda, x)?)
    }

    fn affine_parts(&self) -> Option<(&Matrix, &[f64])> {
        match &self.kind {
            OperatorKind::Affine { matrix, offset } => Some((matrix, offset)),
            _ => None,
        }
    }

    fn resolvent_affine(
        &self,
        lambda: f64,
        x: &[f64],
        cache: Option<&mut ResolventCache>,
    ) -> Result<Vec<f64>, Error> {
        let (matrix, offset) = self.affine_parts().expect("affine kind");
        // (I + λM) u = x − λq
        let rhs: Vec<f64> = x.iter().zip(offset).map(|(xi, qi)| xi - lambda * qi).collect();
        self.solve_shifted(lambda, matrix, &rhs, cache)
    }

    /// A_λ(x) for the affine kind via the equivalent solve
    /// (I + λM) v = Mx + q. Identical to (x − J_λx)/λ in exact arithmetic,
    /// but free of the cancellation that formula suffers at small λ.
    fn yosida_affine(
        &self,
        lambda: f64,
        x: &[f64],
        cache: Option<&mut ResolventCache>,
    ) -> Result<Vec<f64>, Error> {
        let (matrix, offset) = self.affine_parts().expect("affine kind");
        let rhs = linalg::add(&matrix.matvec(x), offset);
        self.solve_shifted(lambda, matrix, &rhs, cache)
    }

    fn solve_shifted(
        &self,
        lambda: f64,
        matrix: &Matrix,
        rhs: &[f64],
        cache: Option<&mut ResolventCache>,
    ) -> Result<Vec<f64>, Error> {
        match cache {
            Some(cache) => {
                let key = lambda.to_bits();
                let pos = match cache.lookup(key) {
                    Some(pos) => pos,
                    None => {
                        let f = LuFactors::factor(&matrix.identity_plus_scaled(lambda))?;
                        cache.insert(key, f)
                    }
                };
                Ok(cache.slots[pos].factors.solve(rhs))
            }
            None => Ok(LuFactors::factor(&matrix.identity_plus_scaled(lambda))?.solve(rhs)),
        }
    }

    fn resolvent_impl(
        &self,
        lambda: f64,
        x: &[f64],
        cache: Option<&mut ResolventCache>,
    ) -> Result<Vec<f64>, Error> {
        check_lambda(lambda)?;
        check_dim(self.dim, x)?;
        match &self.kind {
            OperatorKind::Zero => Ok(x.to_vec()),
            OperatorKind::Rotation2D => {
                let d = 1.0 + lambda * lambda;
                Ok(vec![(x[0] + lambda * x[1]) / d, (x[1] - lambda * x[0]) / d])
            }
            OperatorKind::Affine { .. } => self.resolvent_affine(lambda, x, cache),
            OperatorKind::Prox(rule) => Ok(x.iter().map(|&v| rule.resolvent(lambda, v)).collect()),
        }
    }

    fn yosida_impl(
        &self,
        lambda: f64,
        x: &[f64],
        cache: Option<&mut ResolventCache>,
    ) -> Result<Vec<f64>, Error> {
        check_lambda(lambda)?;
        check_dim(self.dim, x)?;
        match &self.kind {
            OperatorKind::Zero => Ok(vec![0.0; self.dim]),
            OperatorKind::Rotation2D => {
                let d = 1.0 + lambda * lambda;
                Ok(vec![(lambda * x[0] - x[1]) / d, (x[0] + lambda * x[1]) / d])
            }
            OperatorKind::Affine { .. } => self.yosida_affine(lambda, x, cache),
            OperatorKind::Prox(rule) => Ok(x.iter().map(|&v| rule.yosida(lambda, v)).collect()),
        }
    }
}

impl ResolventOracle for OperatorSpec {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn known_zero(&self) -> Option<&[f64]> {
        self.known_zero.as_deref()
    }

    fn resolvent(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>, Error> {
        self.resolvent_impl(lambda, x, None)
    }

    fn yosida(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>, Error> {
        self.yosida_impl(lambda, x, None)
    }

    fn resolvent_cached(
        &self,
        lambda: f64,
        x: &[f64],
        cache: &mut ResolventCache,
    ) -> Result<Vec<f64>, Error> {
        self.resolvent_impl(lambda, x, Some(cache))
    }

    fn yosida_cached(
        &self,
        lambda: f64,
        x: &[f64],
        cache: &mut ResolventCache,
    ) -> Result<Vec<f64>, Error> {
        self.yosida_impl(lambda, x, Some(cache))
    }

    fn apply_raw(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        check_dim(self.dim, x)?;
        match &self.kind {
            OperatorKind::Zero => Ok(vec![0.0; self.dim]),
            OperatorKind::Rotation2D => Ok(vec![-x[1], x[0]]),
            OperatorKind::Affine { matrix, offset } => {
                Ok(linalg::add(&matrix.matvec(x), offset))
            }
            OperatorKind::Prox(ProxRule::Quadratic { curvature, center }) => {
                Ok(x.iter().map(|v| curvature * (v - center)).collect())
            }
            OperatorKind::Prox(_) => Err(Error::SetValuedOperator),
        }
    }
}

impl ProxRule {
    fn resolvent(&self, lambda: f64, x: f64) -> f64 {
        match self {
            ProxRule::Abs => {
                // soft threshold
                if x > lambda {
                    x - lambda
                } else if x < -lambda {
                    x + lambda
                } else {
                    0.0
                }
            }
            ProxRule::Box { lower, upper } => x.clamp(*lower, *upper),
            ProxRule::Quadratic { curvature, center } => {
                (x + lambda * curvature * center) / (1.0 + lambda * curvature)
            }
        }
    }

    fn yosida(&self, lambda: f64, x: f64) -> f64 {
        match self {
            ProxRule::Abs => {
                if x > lambda {
                    1.0
                } else if x < -lambda {
                    -1.0
                } else {
                    x / lambda
                }
            }
            ProxRule::Box { lower, upper } => {
                if x > *upper {
                    (x - upper) / lambda
                } else if x < *lower {
                    (x - lower) / lambda
                } else {
                    0.0
                }
            }
            ProxRule::Quadratic { curvature, center } => {
                curvature * (x - center) / (1.0 + lambda * curvature)
            }
        }
    }
}

/// `A_λ` of a base operator, usable anywhere an operator is expected.
///
/// The view shares the base's zero set, is λ-cocoercive and 1/λ-Lipschitz,
/// and is single-valued everywhere — so [`ResolventOracle::apply_raw`] is
/// always defined for it.
#[derive(Clone, Copy, Debug)]
pub struct YosidaView<'a> {
    base: &'a OperatorSpec,
    lambda: f64,
}

impl<'a> YosidaView<'a> {
    pub fn new(base: &'a OperatorSpec, lambda: f64) -> Result<YosidaView<'a>, Error> {
        check_lambda(lambda)?;
        Ok(YosidaView { base, lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn base(&self) -> &OperatorSpec {
        self.base
    }
}

impl ResolventOracle for YosidaView<'_> {
    fn dimension(&self) -> usize {
        self.base.dim
    }

    fn known_zero(&self) -> Option<&[f64]> {
        // Regularization preserves the zero set.
        self.base.known_zero()
    }

    fn resolvent(&self, mu: f64, x: &[f64]) -> Result<Vec<f64>, Error> {
        check_lambda(mu)?;
        let total = self.lambda + mu;
        let base_j = self.base.resolvent(total, x)?;
        let wx = self.lambda / total;
        let wj = mu / total;
        Ok(x.iter().zip(&base_j).map(|(xi, ji)| wx * xi + wj * ji).collect())
    }

    fn yosida(&self, mu: f64, x: &[f64]) -> Result<Vec<f64>, Error> {
        check_lambda(mu)?;
        // (A_λ)_μ = A_{λ+μ}
        self.base.yosida(self.lambda + mu, x)
    }

    fn resolvent_cached(
        &self,
        mu: f64,
        x: &[f64],
        cache: &mut ResolventCache,
    ) -> Result<Vec<f64>, Error> {
        check_lambda(mu)?;
        let total = self.lambda + mu;
        let base_j = self.base.resolvent_cached(total, x, cache)?;
        let wx = self.lambda / total;
        let wj = mu / total;
        Ok(x.iter().zip(&base_j).map(|(xi, ji)| wx * xi + wj * ji).collect())
    }

    fn yosida_cached(
        &self,
        mu: f64,
        x: &[f64],
        cache: &mut ResolventCache,
    ) -> Result<Vec<f64>, Error> {
        check_lambda(mu)?;
        self.base.yosida_cached(self.lambda + mu, x, cache)
    }

    fn apply_raw(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        self.base.yosida(self.lambda, x)
    }
}

/// One block of a two-block saddle problem.
#[derive(Clone, Debug)]
pub enum SaddleBlock {
    /// ½ xᵀPx + qᵀx with P symmetric PSD.
    Quadratic { curvature: Matrix, linear: Vec<f64> },
    /// Nonsmooth block. Carried in the type so callers can describe the
    /// problem, but rejected by the builder: the induced block resolvent has
    /// no closed form and this catalog does not approximate resolvents.
    Prox(ProxRule),
}

/// Assemble the first-order optimality operator of
///
/// ```text
/// min_x f(x) + g(y)  subject to  Ax = By
/// ```
///
/// as the monotone map M(x, y, z) = (∇f(x) + Aᵀz, ∇g(y) − Bᵀz, By − Ax) on
/// X×Y×Z. For quadratic blocks the result is an `Affine` operator whose
/// linear part is PSD-plus-antisymmetric; when the KKT system is nonsingular
/// the primal-dual solution is attached as the certified zero.
pub fn build_saddle_operator(
    f: SaddleBlock,
    g: SaddleBlock,
    a: Matrix,
    b: Matrix,
) -> Result<OperatorSpec, Error> {
    let (pf, qf) = quadratic_block(f, "f")?;
    let (pg, qg) = quadratic_block(g, "g")?;
    let nx = pf.rows();
    let ny = pg.rows();
    if a.cols() != nx {
        return Err(Error::DimensionMismatch { expected: nx, found: a.cols() });
    }
    if b.cols() != ny {
        return Err(Error::DimensionMismatch { expected: ny, found: b.cols() });
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.rows() });
    }
    let nz = a.rows();
    let n = nx + ny + nz;

    let mut block = Matrix::zeros(n, n);
    for i in 0..nx {
        for j in 0..nx {
            block.set(i, j, pf.at(i, j));
        }
        for k in 0..nz {
            block.set(i, nx + ny + k, a.at(k, i)); // Aᵀ
        }
    }
    for i in 0..ny {
        for j in 0..ny {
            block.set(nx + i, nx + j, pg.at(i, j));
        }
        for k in 0..nz {
            block.set(nx + i, nx + ny + k, -b.at(k, i)); // −Bᵀ
        }
    }
    for k in 0..nz {
        for j in 0..nx {
            block.set(nx + ny + k, j, -a.at(k, j)); // −A
        }
        for j in 0..ny {
            block.set(nx + ny + k, nx + j, b.at(k, j)); // B
        }
    }

    let mut offset = vec![0.0; n];
    offset[..nx].copy_from_slice(&qf);
    offset[nx..nx + ny].copy_from_slice(&qg);

    OperatorSpec::affine(block, offset)
}

fn quadratic_block(block: SaddleBlock, which: &'static str) -> Result<(Matrix, Vec<f64>), Error> {
    match block {
        SaddleBlock::Quadratic { curvature, linear } => {
            if !curvature.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: curvature.rows(),
                    found: curvature.cols(),
                });
            }
            if linear.len() != curvature.rows() {
                return Err(Error::DimensionMismatch {
                    expected: curvature.rows(),
                    found: linear.len(),
                });
            }
            if curvature.asymmetry() > 1e-12 * (1.0 + curvature.max_abs()) {
                return Err(Error::bad_param(which, "quadratic curvature block must be symmetric"));
            }
            let min_eig = linalg::smallest_symmetric_eigenvalue(&curvature);
            if min_eig < MONOTONE_EIG_TOL {
                return Err(Error::NotMonotone { min_eigenvalue: min_eig });
            }
            Ok((curvature, linear))
        }
        SaddleBlock::Prox(_) => Err(Error::NoClosedFormResolvent(
            "saddle operators with nonsmooth blocks (the induced block resolvent is not \
             closed-form)",
        )),
    }
}
