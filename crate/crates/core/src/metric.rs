//! The distance geometry on the affine part of the surface.
//!
//! For fields with at least four elements the affine surface points carry
//! a non-symmetric distance: delta(A, B) is infinite exactly when A and B
//! share a generator, and otherwise is the value of a fixed rational
//! expression in the four affine parameters. The sphere of finite radius
//! rho around A is a "circle" with q - 1 points; circles embed into a
//! three-parameter family of rational curves; and the matrix group G of
//! the M_{a,b,c} acts as the full isometry group, regularly on antiflags
//! and on the pairs at each finite distance. The closing rigidity result,
//! that every distance-preserving self-map is induced by a unique matrix
//! of G, is checked here through explicit finite tables.

use std::collections::BTreeMap;

use crate::collineations::{group_elements, CayleyMatrix, FrobeniusCollineation};
use crate::error::{Error, Result};
use crate::field::{ExtendedScalar, Field, FieldElement};
use crate::proj::{ProjLine, ProjPoint};
use crate::surface::{Generator, GeneratorId, SurfaceModel};

fn require_metric_field(field: &Field) -> Result<()> {
    if let Some(q) = field.order() {
        if q < 4 {
            return Err(Error::SmallField(q));
        }
    }
    Ok(())
}

/// The distance from A to B: infinite when the points share a generator,
/// and otherwise
///
/// ```text
/// (2 u1^2 - u2 - u1 v1 + v2 - v1^2) / (u1 - v1)^2
/// ```
///
/// in the affine parameters A = P(u1, u2), B = P(v1, v2). The distance is
/// not symmetric; it satisfies delta(A, B) = 1 - delta(B, A) instead.
pub fn delta(model: &SurfaceModel, a: &ProjPoint, b: &ProjPoint) -> Result<ExtendedScalar> {
    require_metric_field(model.field())?;
    let (u1, u2) = model.unparam(a)?;
    let (v1, v2) = model.unparam(b)?;
    if u1 == v1 {
        return Ok(ExtendedScalar::Infinity);
    }
    let two = model.field().from_int(2);
    let num = &(&(&(&two * &(&u1 * &u1)) - &u2) - &(&u1 * &v1)) + &(&v2 - &(&v1 * &v1));
    let diff = &u1 - &v1;
    let den = &diff * &diff;
    Ok(ExtendedScalar::Finite(num.div(&den)?))
}

/// The odd-characteristic renormalization (3/2) * (1/2 - delta)^(-1) of
/// the distance. It is antisymmetric where finite, sends parallel pairs
/// (and A = A) to 0, and sends delta = 1/2 to infinity.
pub fn brauner_delta(
    model: &SurfaceModel,
    a: &ProjPoint,
    b: &ProjPoint,
) -> Result<ExtendedScalar> {
    let field = model.field();
    if field.characteristic() == 2 || field.characteristic() == 3 {
        return Err(Error::BadCharacteristic);
    }
    let half = field.one().div(&field.from_int(2))?;
    let three_halves = field.from_int(3).div(&field.from_int(2))?;
    match delta(model, a, b)? {
        ExtendedScalar::Infinity => Ok(ExtendedScalar::Finite(field.zero())),
        ExtendedScalar::Finite(d) => {
            let shifted = &half - &d;
            if shifted.is_zero() {
                Ok(ExtendedScalar::Infinity)
            } else {
                Ok(ExtendedScalar::Finite(three_halves.div(&shifted)?))
            }
        }
    }
}

/// A circle: the set of points at a fixed distance from an affine surface
/// point. An infinite radius designates the affine part of the generator
/// through the midpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    midpoint: ProjPoint,
    radius: ExtendedScalar,
}

impl Circle {
    pub fn new(model: &SurfaceModel, midpoint: ProjPoint, radius: ExtendedScalar) -> Result<Circle> {
        require_metric_field(model.field())?;
        model.unparam(&midpoint)?;
        Ok(Circle { midpoint, radius })
    }

    pub fn midpoint(&self) -> &ProjPoint {
        &self.midpoint
    }

    pub fn radius(&self) -> &ExtendedScalar {
        &self.radius
    }
}

/// The points at distance rho from the midpoint: q - 1 of them for finite
/// rho, and the q affine points of the generator through the midpoint for
/// rho infinite. Sorted.
pub fn circle_points(model: &SurfaceModel, circle: &Circle) -> Result<Vec<ProjPoint>> {
    let mut out = match circle.radius() {
        ExtendedScalar::Infinity => {
            let generator = model.generator_through(&circle.midpoint)?;
            generator
                .line()
                .points()?
                .into_iter()
                .filter(|p| model.unparam(p).is_ok())
                .collect::<Vec<_>>()
        }
        rho @ ExtendedScalar::Finite(_) => {
            let mut hits = Vec::new();
            for y in model.affine_points()? {
                if delta(model, &circle.midpoint, y)? == *rho {
                    hits.push(y.clone());
                }
            }
            hits
        }
    };
    out.sort();
    Ok(out)
}

/// The circle together with its midpoint.
pub fn extended_circle(model: &SurfaceModel, circle: &Circle) -> Result<Vec<ProjPoint>> {
    let mut out = circle_points(model, circle)?;
    if !out.contains(&circle.midpoint) {
        out.push(circle.midpoint.clone());
        out.sort();
    }
    Ok(out)
}

/// Shape of a rational curve R_{alpha,beta,gamma}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveShape {
    /// gamma = 0: a conic in a plane.
    Parabola,
    /// gamma = -1: a planar cubic.
    PlanarCubic,
    /// anything else: a twisted cubic osculating the plane at infinity.
    TwistedCubicParabola,
}

/// The rational curve with affine points K(1, t, alpha + beta t +
/// (gamma+1) t^2, alpha t + beta t^2 + gamma t^3) for t in K, plus one
/// limit point on the line at infinity. Every point lies on the surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RCurve {
    alpha: FieldElement,
    beta: FieldElement,
    gamma: FieldElement,
}

impl RCurve {
    pub fn new(alpha: FieldElement, beta: FieldElement, gamma: FieldElement) -> RCurve {
        RCurve { alpha, beta, gamma }
    }

    pub fn alpha(&self) -> &FieldElement {
        &self.alpha
    }

    pub fn beta(&self) -> &FieldElement {
        &self.beta
    }

    pub fn gamma(&self) -> &FieldElement {
        &self.gamma
    }

    pub fn field(&self) -> &Field {
        self.alpha.field()
    }

    pub fn shape(&self) -> CurveShape {
        let field = self.field();
        if self.gamma.is_zero() {
            CurveShape::Parabola
        } else if self.gamma == -&field.one() {
            CurveShape::PlanarCubic
        } else {
            CurveShape::TwistedCubicParabola
        }
    }

    /// The curve point with parameter t; its affine surface parameters are
    /// u1 = t and u2 = alpha + beta t + (gamma+1) t^2.
    pub fn affine_point(&self, t: &FieldElement) -> ProjPoint {
        let field = self.field();
        let one = field.one();
        let u2 = &(&self.alpha + &(&self.beta * t)) + &(&(&self.gamma + &one) * &(t * t));
        let x3 = &(&(&self.alpha * t) + &(&self.beta * &(t * t))) + &(&self.gamma * &(&(t * t) * t));
        ProjPoint::new([one, t.clone(), u2, x3]).expect("leading coordinate is 1")
    }

    /// The limit of the parametrization at t = infinity: the unit point
    /// Q3 when gamma is nonzero, K(0,0,1,beta) when gamma = 0.
    pub fn limit_point(&self) -> ProjPoint {
        let field = self.field();
        if self.gamma.is_zero() {
            ProjPoint::new([field.zero(), field.zero(), field.one(), self.beta.clone()])
                .expect("third coordinate is 1")
        } else {
            ProjPoint::unit(field, 3)
        }
    }

    pub fn affine_points(&self) -> Result<Vec<ProjPoint>> {
        Ok(self
            .field()
            .elements()?
            .iter()
            .map(|t| self.affine_point(t))
            .collect())
    }

    /// All q + 1 curve points, the limit point last.
    pub fn points(&self) -> Result<Vec<ProjPoint>> {
        let mut out = self.affine_points()?;
        out.push(self.limit_point());
        Ok(out)
    }
}

/// The unique curve through three pairwise non-parallel affine surface
/// points, from the linear system u2 = alpha + beta u1 + (gamma+1) u1^2.
pub fn interpolate_curve(
    model: &SurfaceModel,
    p1: &ProjPoint,
    p2: &ProjPoint,
    p3: &ProjPoint,
) -> Result<RCurve> {
    require_metric_field(model.field())?;
    let field = model.field().clone();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut slopes = Vec::new();
    for p in [p1, p2, p3] {
        let (u1, u2) = model.unparam(p)?;
        rows.push(vec![field.one(), u1.clone(), &u1 * &u1]);
        rhs.push(u2);
        slopes.push(u1);
    }
    if slopes[0] == slopes[1] || slopes[0] == slopes[2] || slopes[1] == slopes[2] {
        return Err(Error::ParallelPoints);
    }
    let sol = crate::linalg::solve_linear(&rows, &rhs, &field)
        .expect("vandermonde system with distinct nodes");
    let gamma = &sol[2] - &field.one();
    Ok(RCurve::new(sol[0].clone(), sol[1].clone(), gamma))
}

/// The curve carrying a circle of finite radius: for midpoint P(a1, a2)
/// and radius rho it is R_{alpha, beta, gamma} with alpha = (rho-2) a1^2 +
/// a2, beta = (1-2 rho) a1, gamma = rho.
pub fn circle_to_curve(model: &SurfaceModel, circle: &Circle) -> Result<RCurve> {
    require_metric_field(model.field())?;
    let rho = match circle.radius() {
        ExtendedScalar::Finite(rho) => rho.clone(),
        ExtendedScalar::Infinity => {
            return Err(Error::DegenerateInput(
                "a circle of infinite radius is a generator, not a curve".into(),
            ))
        }
    };
    let (a1, a2) = model.unparam(circle.midpoint())?;
    let field = model.field();
    let two = field.from_int(2);
    let alpha = &(&(&rho - &two) * &(&a1 * &a1)) + &a2;
    let beta = &(&field.one() - &(&two * &rho)) * &a1;
    Ok(RCurve::new(alpha, beta, rho))
}

/// Outcome of searching a curve for midpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MidpointResolution {
    /// 1 - 2 gamma is nonzero: the affine curve points form one extended
    /// circle with this midpoint and radius.
    UniqueMidpoint(Circle),
    /// 1 - 2 gamma = 0 but beta is nonzero: the curve is no circle.
    NotACircle,
    /// 1 - 2 gamma = 0 = beta: every affine curve point is a midpoint,
    /// always with radius 1/2.
    EveryPointIsMidpoint { radius: FieldElement },
}

/// Classifies a curve as an extended circle, a non-circle, or a circle
/// with every point a midpoint. In characteristic 2 the discriminant
/// 1 - 2 gamma equals 1, so the first case is the only one.
pub fn curve_to_midpoints(model: &SurfaceModel, curve: &RCurve) -> Result<MidpointResolution> {
    require_metric_field(model.field())?;
    let field = model.field();
    let two = field.from_int(2);
    let disc = &field.one() - &(&two * curve.gamma());
    if disc.is_zero() {
        if curve.beta().is_zero() {
            return Ok(MidpointResolution::EveryPointIsMidpoint {
                radius: curve.gamma().clone(),
            });
        }
        return Ok(MidpointResolution::NotACircle);
    }
    let a1 = curve.beta().div(&disc)?;
    let shift = &(curve.gamma() - &two) * &(curve.beta() * curve.beta());
    let a2 = curve.alpha() - &shift.div(&(&disc * &disc))?;
    let midpoint = model.param(&a1, &a2)?;
    let circle = Circle::new(model, midpoint, ExtendedScalar::Finite(curve.gamma().clone()))?;
    Ok(MidpointResolution::UniqueMidpoint(circle))
}

/// A pair (affine surface point, affine generator) with the point off the
/// generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Antiflag {
    point: ProjPoint,
    generator: Generator,
}

impl Antiflag {
    pub fn new(model: &SurfaceModel, point: ProjPoint, generator: Generator) -> Result<Antiflag> {
        if model.unparam(&point).is_err() {
            return Err(Error::NotAnAntiflag(
                "the point is not an affine surface point".into(),
            ));
        }
        if *generator.id() == GeneratorId::Infinity {
            return Err(Error::NotAnAntiflag(
                "the generator on the plane at infinity is excluded".into(),
            ));
        }
        if generator.line().contains(&point) {
            return Err(Error::NotAnAntiflag("the point lies on the generator".into()));
        }
        Ok(Antiflag { point, generator })
    }

    pub fn point(&self) -> &ProjPoint {
        &self.point
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }
}

/// All q^2 (q - 1) antiflags, ordered by generator then point.
pub fn antiflags(model: &SurfaceModel) -> Result<Vec<Antiflag>> {
    require_metric_field(model.field())?;
    let mut out = Vec::new();
    for g in model.generators()? {
        if *g.id() == GeneratorId::Infinity {
            continue;
        }
        for p in model.affine_points()? {
            if !g.line().contains(p) {
                out.push(Antiflag { point: p.clone(), generator: g.clone() });
            }
        }
    }
    Ok(out)
}

fn generator_image(m: &CayleyMatrix, g: &Generator) -> Result<ProjLine> {
    let rows = g.line().rows();
    let p = ProjPoint::new(rows[0].clone())?;
    let q = ProjPoint::new(rows[1].clone())?;
    ProjLine::through(&m.apply(&p)?, &m.apply(&q)?)
}

/// The unique matrix M_{a,b,c} carrying one antiflag to another.
pub fn antiflag_transporter(
    model: &SurfaceModel,
    from: &Antiflag,
    to: &Antiflag,
) -> Result<CayleyMatrix> {
    require_metric_field(model.field())?;
    let mut hits = Vec::new();
    for m in group_elements(model.field())? {
        if m.apply(from.point())? == *to.point()
            && generator_image(&m, from.generator())? == *to.generator().line()
        {
            hits.push(m);
        }
    }
    if hits.len() != 1 {
        return Err(Error::ConsistencyFailure(format!(
            "{} matrices carry the antiflag instead of exactly one",
            hits.len()
        )));
    }
    Ok(hits.remove(0))
}

/// All ordered pairs of affine surface points at the given finite
/// distance; there are q^2 (q - 1) for every d in K.
pub fn distance_pairs(
    model: &SurfaceModel,
    d: &FieldElement,
) -> Result<Vec<(ProjPoint, ProjPoint)>> {
    require_metric_field(model.field())?;
    let target = ExtendedScalar::Finite(d.clone());
    let mut out = Vec::new();
    for a in model.affine_points()? {
        for b in model.affine_points()? {
            if delta(model, a, b)? == target {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(out)
}

/// The unique matrix M_{a,b,c} carrying one pair at finite distance d to
/// another pair at the same distance.
pub fn distance_pair_transporter(
    model: &SurfaceModel,
    from: (&ProjPoint, &ProjPoint),
    to: (&ProjPoint, &ProjPoint),
) -> Result<CayleyMatrix> {
    let d1 = delta(model, from.0, from.1)?;
    let d2 = delta(model, to.0, to.1)?;
    let finite_and_equal = matches!(&d1, ExtendedScalar::Finite(_)) && d1 == d2;
    if !finite_and_equal {
        return Err(Error::DistanceMismatch(d1.to_string(), d2.to_string()));
    }
    let mut hits = Vec::new();
    for m in group_elements(model.field())? {
        if m.apply(from.0)? == *to.0 && m.apply(from.1)? == *to.1 {
            hits.push(m);
        }
    }
    if hits.len() != 1 {
        return Err(Error::ConsistencyFailure(format!(
            "{} matrices carry the distance pair instead of exactly one",
            hits.len()
        )));
    }
    Ok(hits.remove(0))
}

/// All matrices M_{a,b,c} carrying one parallel pair to another. The count
/// equals the number of square roots of (v2' - u2') / (v2 - u2): zero or
/// two for odd q, exactly one in characteristic 2.
pub fn parallel_pair_transporters(
    model: &SurfaceModel,
    from: (&ProjPoint, &ProjPoint),
    to: (&ProjPoint, &ProjPoint),
) -> Result<Vec<CayleyMatrix>> {
    for (x, y) in [from, to] {
        if x == y || delta(model, x, y)? != ExtendedScalar::Infinity {
            return Err(Error::NotParallel(
                "transporters need two pairs of distinct parallel points".into(),
            ));
        }
    }
    let mut hits = Vec::new();
    for m in group_elements(model.field())? {
        if m.apply(from.0)? == *to.0 && m.apply(from.1)? == *to.1 {
            hits.push(m);
        }
    }
    Ok(hits)
}

/// The intersection of the two radius-zero circles around P(0, u2 - u1^2)
/// and P(1, -u1^2 - u1 + u2 + 2). For u1 outside {0, 1} this is exactly
/// {P(u1, u2)}, the computational heart of the rigidity theorem.
pub fn rigidity_witness(
    model: &SurfaceModel,
    u1: &FieldElement,
    u2: &FieldElement,
) -> Result<Vec<ProjPoint>> {
    require_metric_field(model.field())?;
    let field = model.field();
    if u1.is_zero() || u1.is_one() {
        return Err(Error::DegenerateU1);
    }
    let sq = u1 * u1;
    let v2 = u2 - &sq;
    let w2 = &(&(-&sq) - u1) + &(u2 + &field.from_int(2));
    let zero_radius = ExtendedScalar::Finite(field.zero());
    let c1 = Circle::new(model, model.param(&field.zero(), &v2)?, zero_radius.clone())?;
    let c2 = Circle::new(model, model.param(&field.one(), &w2)?, zero_radius)?;
    let first = circle_points(model, &c1)?;
    let second = circle_points(model, &c2)?;
    Ok(first.into_iter().filter(|p| second.contains(p)).collect())
}

/// A self-map of the affine surface points, given pointwise.
pub type IsometryTable = BTreeMap<ProjPoint, ProjPoint>;

/// The point map of a matrix collineation, as a table.
pub fn collineation_table(model: &SurfaceModel, m: &CayleyMatrix) -> Result<IsometryTable> {
    let mut table = IsometryTable::new();
    for p in model.affine_points()? {
        table.insert(p.clone(), m.apply(p)?);
    }
    Ok(table)
}

/// The point map of a Frobenius collineation, as a table.
pub fn frobenius_table(
    model: &SurfaceModel,
    frob: &FrobeniusCollineation,
) -> Result<IsometryTable> {
    let mut table = IsometryTable::new();
    for p in model.affine_points()? {
        table.insert(p.clone(), frob.apply(p));
    }
    Ok(table)
}

fn require_total_table(model: &SurfaceModel, table: &IsometryTable) -> Result<()> {
    let affine = model.affine_points()?;
    if table.len() != affine.len() || affine.iter().any(|p| !table.contains_key(p)) {
        return Err(Error::DegenerateInput(
            "the table must be total on the affine surface points".into(),
        ));
    }
    Ok(())
}

/// Whether the table preserves the distance of every ordered pair. The
/// map is not assumed injective; images must be affine surface points.
pub fn is_isometry(model: &SurfaceModel, table: &IsometryTable) -> Result<bool> {
    require_metric_field(model.field())?;
    require_total_table(model, table)?;
    if table.values().any(|img| model.unparam(img).is_err()) {
        return Ok(false);
    }
    for (a, img_a) in table {
        for (b, img_b) in table {
            if delta(model, img_a, img_b)? != delta(model, a, b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The unique matrix M_{a,b,c} that agrees with the given isometry on
/// every affine point.
pub fn induced_matrix(model: &SurfaceModel, table: &IsometryTable) -> Result<CayleyMatrix> {
    if !is_isometry(model, table)? {
        return Err(Error::NotAnIsometry(
            "the table does not preserve the distance".into(),
        ));
    }
    let mut hits = Vec::new();
    for m in group_elements(model.field())? {
        let mut agrees = true;
        for (p, img) in table {
            if m.apply(p)? != *img {
                agrees = false;
                break;
            }
        }
        if agrees {
            hits.push(m);
        }
    }
    if hits.len() != 1 {
        return Err(Error::ConsistencyFailure(format!(
            "{} matrices induce the isometry instead of exactly one",
            hits.len()
        )));
    }
    Ok(hits.remove(0))
}

/// The full matrix of distances between affine points, indexed in the
/// enumeration order of `affine_points`.
pub fn distance_table(model: &SurfaceModel) -> Result<Vec<Vec<ExtendedScalar>>> {
    require_metric_field(model.field())?;
    let affine = model.affine_points()?;
    let mut out = Vec::with_capacity(affine.len());
    for a in affine {
        let mut row = Vec::with_capacity(affine.len());
        for b in affine {
            row.push(delta(model, a, b)?);
        }
        out.push(row);
    }
    Ok(out)
}
