use nalgebra::{DMatrix, DVector};

use super::point::Point;
use crate::error::{check_dim, Error, Result};
use crate::vecops;

/// Scale-aware membership tolerance used when none is supplied: `1e-9 * (1 + |x|)`.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Relative threshold on `|A x_p - b|` above which an affine system is declared inconsistent.
pub const AFFINE_CONSISTENCY_TOL: f64 = 1e-10;

fn check_vector(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidSet(format!("{name} must be nonempty")));
    }
    if !vecops::all_finite(v) {
        return Err(Error::NonFinite {
            context: name.to_string(),
        });
    }
    Ok(())
}

fn check_normal(normal: &[f64], offset: f64) -> Result<f64> {
    check_vector("normal", normal)?;
    if !offset.is_finite() {
        return Err(Error::NonFinite {
            context: "offset".into(),
        });
    }
    let normal_sq = vecops::norm_sq(normal);
    if normal_sq <= 0.0 || !normal_sq.is_finite() {
        return Err(Error::InvalidSet(
            "normal vector must have positive finite norm".into(),
        ));
    }
    Ok(normal_sq)
}

/// `{x : <a, x> <= b}`
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
    normal_sq: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let normal_sq = check_normal(&normal, offset)?;
        Ok(Self {
            normal,
            offset,
            normal_sq,
        })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

/// `{x : <a, x> = b}`
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    normal: Vec<f64>,
    offset: f64,
    normal_sq: f64,
}

impl Hyperplane {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let normal_sq = check_normal(&normal, offset)?;
        Ok(Self {
            normal,
            offset,
            normal_sq,
        })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

/// Closed Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_vector("center", &center)?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidSet(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Axis-aligned box `l <= x <= u`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_vector("lower", &lower)?;
        check_vector("upper", &upper)?;
        check_dim(lower.len(), upper.len())?;
        if let Some(j) = (0..lower.len()).find(|&j| lower[j] > upper[j]) {
            return Err(Error::EmptySet(format!(
                "box has lower[{j}] = {} > upper[{j}] = {}",
                lower[j], upper[j]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// Solution set of a consistent linear system `A x = b`.
///
/// The projection is `x - Q Q^T (x - x_p)` where the rows of `Q` are an orthonormal basis of
/// the row space of `A` (right singular vectors with non-negligible singular value) and `x_p`
/// is the minimum-norm least-squares solution. Directions with negligible singular value are
/// left unconstrained.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubspace {
    dim: usize,
    matrix: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<Vec<f64>>,
    anchor: Vec<f64>,
}

impl AffineSubspace {
    /// `matrix` is given row-major, one row per equation. An empty system describes all of R^dim.
    pub fn new(dim: usize, matrix: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSet(
                "affine subspace dimension must be positive".into(),
            ));
        }
        if matrix.len() != rhs.len() {
            return Err(Error::InvalidSet(format!(
                "affine system has {} rows but {} right-hand-side entries",
                matrix.len(),
                rhs.len()
            )));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidSet(format!(
                    "row {i} of affine matrix has length {}, expected {dim}",
                    row.len()
                )));
            }
            if !vecops::all_finite(row) {
                return Err(Error::NonFinite {
                    context: format!("affine matrix row {i}"),
                });
            }
        }
        if !vecops::all_finite(&rhs) {
            return Err(Error::NonFinite {
                context: "affine right-hand side".into(),
            });
        }

        let rows = matrix.len();
        if rows == 0 {
            return Ok(Self {
                dim,
                matrix,
                rhs,
                basis: Vec::new(),
                anchor: vec![0.0; dim],
            });
        }

        let a = DMatrix::from_fn(rows, dim, |i, j| matrix[i][j]);
        let b = DVector::from_column_slice(&rhs);
        let svd = a.clone().svd(true, true);
        let u = svd.u.as_ref().expect("svd computed with u");
        let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
        let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let cutoff = (rows.max(dim) as f64) * f64::EPSILON * sigma_max;

        let mut basis = Vec::new();
        let mut anchor = DVector::zeros(dim);
        for (k, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma > cutoff && sigma > 0.0 {
                let v_k = v_t.row(k).transpose();
                let coeff = u.column(k).dot(&b) / sigma;
                anchor += coeff * &v_k;
                basis.push(v_k.iter().cloned().collect::<Vec<f64>>());
            }
        }

        let residual = (&a * &anchor - &b).norm();
        if residual > AFFINE_CONSISTENCY_TOL * (1.0 + b.norm()) {
            return Err(Error::EmptySet(format!(
                "affine system is inconsistent (least-squares residual {residual:e})"
            )));
        }

        Ok(Self {
            dim,
            matrix,
            rhs,
            basis,
            anchor: anchor.iter().cloned().collect(),
        })
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Number of independent constraints (rank of `A`).
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Adds `-Q Q^T (x - x_p)` into `out`, where `out` starts equal to `x`.
    fn project_in_place(&self, x: &[f64], out: &mut [f64]) {
        for q in &self.basis {
            let coeff: f64 = q
                .iter()
                .zip(x.iter().zip(&self.anchor))
                .map(|(qi, (xi, pi))| qi * (xi - pi))
                .sum();
            for (o, qi) in out.iter_mut().zip(q) {
                *o -= coeff * qi;
            }
        }
    }

    fn residual(&self, x: &[f64]) -> f64 {
        let mut sq = 0.0;
        for q in &self.basis {
            let coeff: f64 = q
                .iter()
                .zip(x.iter().zip(&self.anchor))
                .map(|(qi, (xi, pi))| qi * (xi - pi))
                .sum();
            sq += coeff * coeff;
        }
        sq.sqrt()
    }
}

/// A nonempty closed convex subset of R^n with an exact projection.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexSet {
    Halfspace(Halfspace),
    Hyperplane(Hyperplane),
    Ball(Ball),
    Box(BoxSet),
    Affine(AffineSubspace),
}

impl ConvexSet {
    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        Halfspace::new(normal, offset).map(ConvexSet::Halfspace)
    }

    pub fn hyperplane(normal: Vec<f64>, offset: f64) -> Result<Self> {
        Hyperplane::new(normal, offset).map(ConvexSet::Hyperplane)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Ball::new(center, radius).map(ConvexSet::Ball)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        BoxSet::new(lower, upper).map(ConvexSet::Box)
    }

    pub fn affine(dim: usize, matrix: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        AffineSubspace::new(dim, matrix, rhs).map(ConvexSet::Affine)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Halfspace(h) => h.normal.len(),
            ConvexSet::Hyperplane(h) => h.normal.len(),
            ConvexSet::Ball(b) => b.center.len(),
            ConvexSet::Box(b) => b.lower.len(),
            ConvexSet::Affine(a) => a.dim,
        }
    }

    /// Short variant name, used in error contexts and file tags.
    pub fn kind_name(&self) -> &'static str {
        match self {
            ConvexSet::Halfspace(_) => "halfspace",
            ConvexSet::Hyperplane(_) => "hyperplane",
            ConvexSet::Ball(_) => "ball",
            ConvexSet::Box(_) => "box",
            ConvexSet::Affine(_) => "affine",
        }
    }

    /// Nearest point of the set to `x`.
    pub fn project(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x.dim())?;
        let mut out = x.as_slice().to_vec();
        self.project_slice(x.as_slice(), &mut out);
        if !vecops::all_finite(&out) {
            return Err(Error::NonFinite {
                context: format!("projection onto {}", self.kind_name()),
            });
        }
        Ok(Point::from_vec_unchecked(out))
    }

    /// Writes the projection of `x` into `out`. Both slices must have length `dim()` and
    /// `out` must hold a copy of `x` on entry; members of the set are returned bit-for-bit.
    pub(crate) fn project_slice(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        match self {
            ConvexSet::Halfspace(h) => {
                let excess = vecops::dot(&h.normal, x) - h.offset;
                if excess > 0.0 {
                    let scale = excess / h.normal_sq;
                    for (o, a) in out.iter_mut().zip(&h.normal) {
                        *o -= scale * a;
                    }
                }
            }
            ConvexSet::Hyperplane(h) => {
                let gap = h.offset - vecops::dot(&h.normal, x);
                if gap != 0.0 {
                    let scale = gap / h.normal_sq;
                    for (o, a) in out.iter_mut().zip(&h.normal) {
                        *o += scale * a;
                    }
                }
            }
            ConvexSet::Ball(b) => {
                let d = vecops::dist(x, &b.center);
                if d > b.radius {
                    let scale = b.radius / d;
                    for ((o, xi), ci) in out.iter_mut().zip(x).zip(&b.center) {
                        *o = ci + scale * (xi - ci);
                    }
                }
            }
            ConvexSet::Box(b) => {
                for ((o, lo), hi) in out.iter_mut().zip(&b.lower).zip(&b.upper) {
                    *o = o.clamp(*lo, *hi);
                }
            }
            ConvexSet::Affine(a) => a.project_in_place(x, out),
        }
    }

    /// Closed-form constraint residual; agrees with [`ConvexSet::distance`] up to roundoff.
    pub fn residual(&self, x: &Point) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        let x = x.as_slice();
        Ok(match self {
            ConvexSet::Halfspace(h) => {
                ((vecops::dot(&h.normal, x) - h.offset) / h.normal_sq.sqrt()).max(0.0)
            }
            ConvexSet::Hyperplane(h) => {
                (vecops::dot(&h.normal, x) - h.offset).abs() / h.normal_sq.sqrt()
            }
            ConvexSet::Ball(b) => (vecops::dist(x, &b.center) - b.radius).max(0.0),
            ConvexSet::Box(b) => x
                .iter()
                .zip(b.lower.iter().zip(&b.upper))
                .map(|(xi, (lo, hi))| {
                    let e = if xi < lo {
                        lo - xi
                    } else if xi > hi {
                        xi - hi
                    } else {
                        0.0
                    };
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
            ConvexSet::Affine(a) => a.residual(x),
        })
    }

    /// `|x - P(x)|`.
    pub fn distance(&self, x: &Point) -> Result<f64> {
        check_dim(self.dim(), x.dim())?;
        Ok(self.distance_slice(x.as_slice()))
    }

    pub(crate) fn distance_slice(&self, x: &[f64]) -> f64 {
        let mut p = x.to_vec();
        self.project_slice(x, &mut p);
        vecops::dist(x, &p)
    }

    /// True iff the constraint residual of `x` is at most `tol`.
    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "membership tolerance must be nonnegative, got {tol}"
            )));
        }
        Ok(self.residual(x)? <= tol)
    }

    /// Membership with the default scale-aware tolerance.
    pub fn is_member(&self, x: &Point) -> Result<bool> {
        self.contains(x, DEFAULT_MEMBERSHIP_TOL * (1.0 + x.norm()))
    }

    /// Whether the closed ball `B(center, radius)` lies inside the set, up to a relative
    /// roundoff allowance. `radius = 0` reduces to plain membership.
    pub fn contains_ball(&self, center: &Point, radius: f64) -> Result<bool> {
        check_dim(self.dim(), center.dim())?;
        let p = center.as_slice();
        let scale = 1.0 + center.norm();
        let slop = 1e-12 * scale;
        if radius <= 0.0 {
            return Ok(self.residual(center)? <= DEFAULT_MEMBERSHIP_TOL * scale);
        }
        Ok(match self {
            ConvexSet::Halfspace(h) => {
                let norm_a = h.normal_sq.sqrt();
                vecops::dot(&h.normal, p) + radius * norm_a
                    <= h.offset + slop * (norm_a + h.offset.abs())
            }
            ConvexSet::Hyperplane(_) => false,
            ConvexSet::Ball(b) => {
                vecops::dist(p, &b.center) + radius <= b.radius + slop * (1.0 + b.radius)
            }
            ConvexSet::Box(b) => p
                .iter()
                .zip(b.lower.iter().zip(&b.upper))
                .all(|(x, (lo, hi))| {
                    x - radius >= lo - slop * (1.0 + lo.abs())
                        && x + radius <= hi + slop * (1.0 + hi.abs())
                }),
            ConvexSet::Affine(a) => a.rank() == 0,
        })
    }
}
