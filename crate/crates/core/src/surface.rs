//! The ruled cubic surface V(X0*X1*X2 - X1^3 - X0^2*X3) in PG(3, K):
//! membership, the affine parametrization, generators, the parabola-to-
//! infinity projectivity, point classification with tangent planes and
//! cones, the dual tangency criterion, and geometric recovery of tangency
//! points from tangent planes.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::field::{self, Field, FieldElement};
use crate::forms::{self, CubicForm, LinForm};
use crate::linalg;
use crate::proj::{self, ProjLine, ProjPlane, ProjPoint};

/// The defining cubic form X0*X1*X2 - X1^3 - X0^2*X3.
pub fn cayley_form(field: &Field) -> CubicForm {
    CubicForm::from_terms(field, &[(0, 1, 2, 1), (1, 1, 1, -1), (0, 0, 3, -1)])
}

/// Label for a line lying on the surface: the affine generators g(1, a) and
/// the generator at infinity g(0, 1).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GeneratorId {
    Affine(FieldElement),
    Infinity,
}

/// A line contained in the surface.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Generator {
    id: GeneratorId,
    line: ProjLine,
}

impl Generator {
    pub fn id(&self) -> &GeneratorId {
        &self.id
    }

    pub fn line(&self) -> &ProjLine {
        &self.line
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.line.contains(p)
    }
}

/// Where a point sits relative to the surface, with its tangent data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SurfacePosition {
    /// An affine surface point; all of these are simple, with one tangent
    /// plane.
    SimpleAffine { tangent: ProjPlane },
    /// A point of the generator at infinity; all of these are double points.
    /// The tangent cone splits into planes: one doubled plane at the corner
    /// point (0:0:0:1), two distinct planes elsewhere.
    DoubleAtInfinity { cone: Vec<ProjPlane> },
    NotOnSurface,
}

/// Classification of an ambient point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointClass {
    pub position: SurfacePosition,
    /// True exactly in characteristic 3 on the line V(X0, X2), where every
    /// partial derivative of the defining form vanishes.
    pub is_nucleus: bool,
}

/// The surface over one base field, with cached enumerations for finite
/// fields. Caches are built once at construction and never mutated, so a
/// model can be shared freely across threads.
pub struct SurfaceModel {
    field: Field,
    form: CubicForm,
    affine: Vec<ProjPoint>,
    infinity: Vec<ProjPoint>,
    points: Vec<ProjPoint>,
    point_set: HashSet<ProjPoint>,
    generators: Vec<Generator>,
}

impl SurfaceModel {
    pub fn new(field: &Field) -> Result<SurfaceModel> {
        let form = cayley_form(field);
        let mut model = SurfaceModel {
            field: field.clone(),
            form,
            affine: Vec::new(),
            infinity: Vec::new(),
            points: Vec::new(),
            point_set: HashSet::new(),
            generators: Vec::new(),
        };
        if field.is_finite() {
            let elems = field.elements()?;
            for u1 in &elems {
                for u2 in &elems {
                    model.affine.push(model.param(u1, u2)?);
                }
            }
            for t in &elems {
                model.infinity.push(ProjPoint::new([
                    field.zero(),
                    field.zero(),
                    field.one(),
                    t.clone(),
                ])?);
            }
            model.infinity.push(ProjPoint::unit(field, 3));
            model.points =
                model.affine.iter().chain(model.infinity.iter()).cloned().collect();
            model.point_set = model.points.iter().cloned().collect();
            for a in &elems {
                model.generators.push(model.generator_line(&field.one(), a)?);
            }
            model.generators.push(model.generator_line(&field.zero(), &field.one())?);
        }
        Ok(model)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn form(&self) -> &CubicForm {
        &self.form
    }

    /// The plane at infinity V(X0).
    pub fn omega(&self) -> ProjPlane {
        ProjPlane::from_ints(&self.field, [1, 0, 0, 0]).expect("nonzero covector")
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.form.evaluate_point(p).is_zero()
    }

    /// The affine chart point (1 : u1 : u2 : u1 u2 - u1^3).
    pub fn param(&self, u1: &FieldElement, u2: &FieldElement) -> Result<ProjPoint> {
        if u1.field() != &self.field || u2.field() != &self.field {
            return Err(Error::MixedFields(self.field.name(), u1.field().name()));
        }
        let x3 = &(u1 * u2) - &(&(u1 * u1) * u1);
        ProjPoint::new([self.field.one(), u1.clone(), u2.clone(), x3])
    }

    /// Inverse of [`SurfaceModel::param`] on affine surface points.
    pub fn unparam(&self, p: &ProjPoint) -> Result<(FieldElement, FieldElement)> {
        if !self.contains(p) {
            return Err(Error::NotOnSurface(format!("{p:?}")));
        }
        let x0 = &p.coords()[0];
        if x0.is_zero() {
            return Err(Error::NotAffineSurfacePoint(format!("{p:?}")));
        }
        // Canonical representatives of affine points already have x0 = 1,
        // but divide anyway to stay representation-proof.
        Ok((p.coords()[1].div(x0)?, p.coords()[2].div(x0)?))
    }

    pub fn points(&self) -> Result<&[ProjPoint]> {
        self.require_finite()?;
        Ok(&self.points)
    }

    pub fn affine_points(&self) -> Result<&[ProjPoint]> {
        self.require_finite()?;
        Ok(&self.affine)
    }

    /// The points of the generator at infinity, i.e. F ∩ V(X0).
    pub fn infinity_points(&self) -> Result<&[ProjPoint]> {
        self.require_finite()?;
        Ok(&self.infinity)
    }

    pub fn point_set(&self) -> Result<&HashSet<ProjPoint>> {
        self.require_finite()?;
        Ok(&self.point_set)
    }

    pub fn generators(&self) -> Result<&[Generator]> {
        self.require_finite()?;
        Ok(&self.generators)
    }

    /// The generator g(s0, s1): the join of (s0^2 : s0 s1 : s1^2 : 0) and
    /// (0 : 0 : s0 : s1). For s0 != 0 this is the affine generator
    /// g(1, s1/s0); g(0, 1) is the generator at infinity V(X0, X1).
    pub fn generator_line(&self, s0: &FieldElement, s1: &FieldElement) -> Result<Generator> {
        if s0.is_zero() && s1.is_zero() {
            return Err(Error::DegenerateInput(
                "generator parameters must not both vanish".into(),
            ));
        }
        let zero = self.field.zero();
        let p = ProjPoint::new([s0 * s0, s0 * s1, s1 * s1, zero.clone()])?;
        let q = ProjPoint::new([zero.clone(), zero, s0.clone(), s1.clone()])?;
        let line = ProjLine::through(&p, &q)?;
        let id = if s0.is_zero() {
            GeneratorId::Infinity
        } else {
            GeneratorId::Affine(s1.div(s0)?)
        };
        Ok(Generator { id, line })
    }

    /// The unique generator through an affine surface point.
    pub fn generator_through(&self, p: &ProjPoint) -> Result<Generator> {
        let (u1, _) = self.unparam(p)?;
        self.generator_line(&self.field.one(), &u1)
    }

    /// Every generator through the given point: one for affine surface
    /// points, two for infinity points other than (0:0:0:1), one there, and
    /// none off the surface.
    pub fn generators_through(&self, p: &ProjPoint) -> Result<Vec<Generator>> {
        if !self.contains(p) {
            return Ok(Vec::new());
        }
        let c = p.coords();
        if !c[0].is_zero() {
            return Ok(vec![self.generator_through(p)?]);
        }
        // Infinity point (0 : 0 : c2 : c3).
        let mut out = Vec::new();
        if !c[2].is_zero() {
            out.push(self.generator_line(&self.field.one(), &c[3].div(&c[2])?)?);
        }
        out.push(self.generator_line(&self.field.zero(), &self.field.one())?);
        Ok(out)
    }

    /// Points of the parabola l = V(X0 X2 - X1^2, X3) for finite fields:
    /// (1 : t : t^2 : 0) together with (0 : 0 : 1 : 0).
    pub fn parabola_points(&self) -> Result<Vec<ProjPoint>> {
        let mut out = Vec::new();
        for t in self.field.elements()? {
            out.push(ProjPoint::new([
                self.field.one(),
                t.clone(),
                &t * &t,
                self.field.zero(),
            ])?);
        }
        out.push(ProjPoint::unit(&self.field, 2));
        Ok(out)
    }

    pub fn on_parabola(&self, p: &ProjPoint) -> bool {
        let c = p.coords();
        c[3].is_zero() && (&(&c[0] * &c[2]) - &(&c[1] * &c[1])).is_zero()
    }

    /// The projectivity from the parabola l onto the generator at infinity:
    /// (s0^2 : s0 s1 : s1^2 : 0) maps to (0 : 0 : s0 : s1). The join of a
    /// point with its image is a generator.
    pub fn beta(&self, p: &ProjPoint) -> Result<ProjPoint> {
        if !self.on_parabola(p) {
            return Err(Error::NotOnParabola(format!("{p:?}")));
        }
        let c = p.coords();
        let (s0, s1) = if c[0].is_zero() {
            // c1^2 = c0 c2 = 0 forces c1 = 0: the point is (0:0:1:0).
            (self.field.zero(), self.field.one())
        } else {
            // Canonically c0 = 1, so s0 = 1 and s1 = c1.
            (self.field.one(), c[1].div(&c[0])?)
        };
        ProjPoint::new([self.field.zero(), self.field.zero(), s0, s1])
    }

    /// Classifies an ambient point: simple affine surface point with its
    /// tangent plane, double point at infinity with its tangent cone split
    /// into planes, or off the surface; plus the nucleus flag.
    pub fn classify(&self, p: &ProjPoint) -> PointClass {
        let is_nucleus = self.is_nucleus(p);
        if !self.contains(p) {
            return PointClass { position: SurfacePosition::NotOnSurface, is_nucleus };
        }
        let c = p.coords();
        if !c[0].is_zero() {
            let tangent = self.gradient_plane(p).expect("affine points are simple");
            return PointClass {
                position: SurfacePosition::SimpleAffine { tangent },
                is_nucleus,
            };
        }
        // Double point at infinity: the quadratic Taylor term at the point
        // is the tangent cone, and it always splits off the plane V(X0).
        let expansion = self.form.taylor_shift(c);
        debug_assert!(expansion.constant.is_zero());
        debug_assert!(expansion.linear.is_zero());
        let x0 = LinForm::from_ints(&self.field, [1, 0, 0, 0]);
        let other = expansion
            .quadratic
            .divide_by_linear(&x0)
            .expect("the cone at infinity contains the plane at infinity");
        let mut cone = vec![self.omega()];
        if other.proportional(&x0).is_none() {
            cone.push(other.to_plane().expect("second cone component is nonzero"));
        }
        PointClass { position: SurfacePosition::DoubleAtInfinity { cone }, is_nucleus }
    }

    /// The tangent plane at a simple (affine) surface point.
    pub fn tangent_plane(&self, p: &ProjPoint) -> Result<ProjPlane> {
        if !self.contains(p) {
            return Err(Error::NotOnSurface(format!("{p:?}")));
        }
        if p.coords()[0].is_zero() {
            return Err(Error::NotAffineSurfacePoint(format!("{p:?}")));
        }
        self.gradient_plane(p)
    }

    fn gradient_plane(&self, p: &ProjPoint) -> Result<ProjPlane> {
        let grad = self.form.partials().map(|d| d.evaluate(p.coords()));
        ProjPlane::new(grad)
    }

    /// True in characteristic 3 on the line V(X0, X2); there all four
    /// partial derivatives of the defining form vanish.
    pub fn is_nucleus(&self, p: &ProjPoint) -> bool {
        self.field.characteristic() == 3
            && p.coords()[0].is_zero()
            && p.coords()[2].is_zero()
    }

    /// Value of the dual cubic a0 a3^2 - a1 a2 a3 + a2^3 on a plane's
    /// canonical covector.
    pub fn dual_form_value(&self, plane: &ProjPlane) -> FieldElement {
        let a = plane.covector();
        let t1 = &(&a[0] * &a[3]) * &a[3];
        let t2 = &(&a[1] * &a[2]) * &a[3];
        let t3 = &(&a[2] * &a[2]) * &a[2];
        &(&t1 - &t2) + &t3
    }

    /// A plane is tangent (touches at a simple point, or is a tangent-cone
    /// component at a double point) exactly when the dual cubic vanishes,
    /// equivalently when it contains a generator.
    pub fn is_tangent_plane(&self, plane: &ProjPlane) -> bool {
        self.dual_form_value(plane).is_zero()
    }

    /// A generator contained in the plane, if any. When both the generator
    /// at infinity and an affine generator lie in the plane, the one at
    /// infinity is returned.
    pub fn contains_generator(&self, plane: &ProjPlane) -> Option<Generator> {
        let a = plane.covector();
        if a[2].is_zero() && a[3].is_zero() {
            // The plane contains V(X0, X1).
            return self
                .generator_line(&self.field.zero(), &self.field.one())
                .ok();
        }
        // g(1, s) lies in the plane iff a2 + a3 s = 0 and
        // a0 + a1 s + a2 s^2 = 0.
        if a[3].is_zero() {
            return None;
        }
        let s = -a[2].div(&a[3]).expect("a3 nonzero");
        let section = &(&a[0] + &(&a[1] * &s)) + &(&(&a[2] * &s) * &s);
        if section.is_zero() {
            self.generator_line(&self.field.one(), &s).ok()
        } else {
            None
        }
    }

    /// Recovers the point of tangency of a tangent plane that avoids
    /// (0:0:0:1), by splitting the plane section of the surface into the
    /// generator and the residual conic, then intersecting the two.
    pub fn point_of_tangency(&self, plane: &ProjPlane) -> Result<ProjPoint> {
        if let Some(q) = self.field.order() {
            if q <= 3 {
                return Err(Error::SmallField(q));
            }
        }
        let cov = plane.covector();
        if cov[3].is_zero() {
            // (0:0:0:1) lies in the plane; no affine point has such a
            // tangent plane.
            return Err(Error::PlaneThroughQ3);
        }
        let generator = self.contains_generator(plane).ok_or(Error::NoGeneratorInPlane)?;
        // Parametrize the plane by a basis of its solution space and pull
        // the surface back to a ternary cubic.
        let basis_vecs = linalg::kernel_basis(&[cov.to_vec()], 4, &self.field);
        debug_assert_eq!(basis_vecs.len(), 3);
        let basis: [[FieldElement; 4]; 3] = [
            basis_vecs[0].clone().try_into().expect("length 4"),
            basis_vecs[1].clone().try_into().expect("length 4"),
            basis_vecs[2].clone().try_into().expect("length 4"),
        ];
        let section = forms::restrict_to_plane_basis(&self.form, &basis);
        // The generator pulls back to a line in the plane coordinates: take
        // any plane through the generator other than this one and pull its
        // covector back.
        let gen_rows: Vec<Vec<FieldElement>> =
            generator.line().rows().iter().map(|r| r.to_vec()).collect();
        let gen_planes = linalg::kernel_basis(&gen_rows, 4, &self.field);
        let mut gen_line_form: Option<[FieldElement; 3]> = None;
        for pi in &gen_planes {
            let pulled: Vec<FieldElement> = (0..3)
                .map(|s| {
                    let mut acc = self.field.zero();
                    for r in 0..4 {
                        acc = &acc + &(&pi[r] * &basis[s][r]);
                    }
                    acc
                })
                .collect();
            if pulled.iter().any(|c| !c.is_zero()) {
                gen_line_form = Some([pulled[0].clone(), pulled[1].clone(), pulled[2].clone()]);
                break;
            }
        }
        let ell = gen_line_form.ok_or_else(|| {
            Error::ConsistencyFailure("generator does not restrict to a plane line".into())
        })?;
        // Split the section: section = ell * conic.
        let conic = section.divide_by_linear(&ell).ok_or_else(|| {
            Error::ConsistencyFailure("plane section is not divisible by its generator".into())
        })?;
        // Intersect the residual conic with the generator line inside the
        // plane: parametrize V(ell) by two spanning solutions and solve the
        // resulting binary quadratic.
        let ell_kernel = linalg::kernel_basis(&[ell.to_vec()], 3, &self.field);
        debug_assert_eq!(ell_kernel.len(), 2);
        let w1: [FieldElement; 3] = ell_kernel[0].clone().try_into().expect("length 3");
        let w2: [FieldElement; 3] = ell_kernel[1].clone().try_into().expect("length 3");
        let alpha = conic.evaluate(&w1);
        let gamma = conic.evaluate(&w2);
        let w_sum = [&w1[0] + &w2[0], &w1[1] + &w2[1], &w1[2] + &w2[2]];
        let beta = &(&conic.evaluate(&w_sum) - &alpha) - &gamma;
        let roots = binary_quadratic_roots(&self.field, &alpha, &beta, &gamma)
            .ok_or_else(|| {
                Error::ConsistencyFailure("residual conic contains the generator".into())
            })?;
        let mut candidates: Vec<ProjPoint> = Vec::new();
        for (s, t) in roots {
            let z = [
                &(&s * &w1[0]) + &(&t * &w2[0]),
                &(&s * &w1[1]) + &(&t * &w2[1]),
                &(&s * &w1[2]) + &(&t * &w2[2]),
            ];
            let ambient = [
                &(&(&z[0] * &basis[0][0]) + &(&z[1] * &basis[1][0])) + &(&z[2] * &basis[2][0]),
                &(&(&z[0] * &basis[0][1]) + &(&z[1] * &basis[1][1])) + &(&z[2] * &basis[2][1]),
                &(&(&z[0] * &basis[0][2]) + &(&z[1] * &basis[1][2])) + &(&z[2] * &basis[2][2]),
                &(&(&z[0] * &basis[0][3]) + &(&z[1] * &basis[1][3])) + &(&z[2] * &basis[2][3]),
            ];
            let point = ProjPoint::new(ambient)?;
            if !point.coords()[0].is_zero() && !candidates.contains(&point) {
                candidates.push(point);
            }
        }
        match candidates.len() {
            1 => Ok(candidates.pop().expect("length checked")),
            n => Err(Error::ConsistencyFailure(format!(
                "expected one affine contact point, found {n}"
            ))),
        }
    }

    /// Exhaustive census of the lines of PG(3, q) lying on the surface.
    pub fn lines_contained_in_surface(&self) -> Result<Vec<ProjLine>> {
        self.require_finite()?;
        let mut out = Vec::new();
        for line in proj::enumerate_lines(&self.field)? {
            if line.points()?.iter().all(|p| self.point_set.contains(p)) {
                out.push(line);
            }
        }
        Ok(out)
    }

    fn require_finite(&self) -> Result<()> {
        if self.field.is_finite() {
            Ok(())
        } else {
            Err(Error::InfiniteField(self.field.name()))
        }
    }
}

/// Projective roots (s : t) of alpha s^2 + beta s t + gamma t^2. Returns
/// None when the form vanishes identically. Finite fields are scanned;
/// the rationals use the quadratic formula.
fn binary_quadratic_roots(
    field: &Field,
    alpha: &FieldElement,
    beta: &FieldElement,
    gamma: &FieldElement,
) -> Option<Vec<(FieldElement, FieldElement)>> {
    if alpha.is_zero() && beta.is_zero() && gamma.is_zero() {
        return None;
    }
    let mut roots = Vec::new();
    if alpha.is_zero() {
        roots.push((field.one(), field.zero()));
    }
    // Roots of the dehomogenized alpha s^2 + beta s + gamma at t = 1.
    if field.is_finite() {
        for s in field.elements().expect("finite field") {
            let value = &(&(&(alpha * &s) + beta) * &s) + gamma;
            if value.is_zero() {
                roots.push((s, field.one()));
            }
        }
    } else if alpha.is_zero() {
        if !beta.is_zero() {
            let s = -gamma.div(beta).expect("beta nonzero");
            roots.push((s, field.one()));
        }
    } else {
        let four = field.from_int(4);
        let disc = &(beta * beta) - &(&(&four * alpha) * gamma);
        let two_alpha = &field.from_int(2) * alpha;
        for sq in field::square_roots(&disc) {
            let s = (&(-beta.clone()) + &sq).div(&two_alpha).expect("alpha nonzero");
            if !roots.contains(&(s.clone(), field.one())) {
                roots.push((s, field.one()));
            }
        }
    }
    Some(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(q: u64) -> SurfaceModel {
        SurfaceModel::new(&Field::gf(q).unwrap()).unwrap()
    }

    #[test]
    fn point_count_is_q_squared_plus_q_plus_one() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13] {
            let m = model(q);
            let pts = m.points().unwrap();
            assert_eq!(pts.len() as u64, q * q + q + 1);
            let distinct: HashSet<_> = pts.iter().collect();
            assert_eq!(distinct.len(), pts.len());
            for p in pts {
                assert!(m.contains(p));
            }
            // Independent oracle: scan the whole space.
            let scan: Vec<ProjPoint> = proj::enumerate_points(m.field())
                .unwrap()
                .into_iter()
                .filter(|p| m.contains(p))
                .collect();
            assert_eq!(scan.len(), pts.len());
            let set = m.point_set().unwrap();
            assert!(scan.iter().all(|p| set.contains(p)));
        }
    }

    #[test]
    fn infinity_section_is_exactly_the_generator_at_infinity() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13] {
            let m = model(q);
            let omega = m.omega();
            let on_omega: HashSet<ProjPoint> = m
                .points()
                .unwrap()
                .iter()
                .filter(|p| omega.contains(p))
                .cloned()
                .collect();
            let g_inf: HashSet<ProjPoint> =
                m.infinity_points().unwrap().iter().cloned().collect();
            assert_eq!(on_omega, g_inf);
            assert_eq!(g_inf.len() as u64, q + 1);
            // They are exactly the points of the line V(X0, X1).
            let line = m
                .generator_line(&m.field().zero(), &m.field().one())
                .unwrap();
            let line_pts: HashSet<ProjPoint> =
                line.line().points().unwrap().into_iter().collect();
            assert_eq!(line_pts, g_inf);
        }
    }

    #[test]
    fn param_and_unparam_are_mutually_inverse() {
        let m = model(7);
        let f = m.field().clone();
        for u1 in f.elements().unwrap() {
            for u2 in f.elements().unwrap() {
                let p = m.param(&u1, &u2).unwrap();
                assert!(m.contains(&p));
                assert_eq!(m.unparam(&p).unwrap(), (u1.clone(), u2.clone()));
            }
        }
        // Reference values.
        assert_eq!(m.param(&f.zero(), &f.zero()).unwrap(), ProjPoint::unit(&f, 0));
        let p11 = m.param(&f.one(), &f.one()).unwrap();
        assert_eq!(p11, ProjPoint::from_ints(&f, [1, 1, 1, 0]).unwrap());
        assert!(m.on_parabola(&p11));
        // Over GF(5) the last coordinate of P(2,3) is 2*3 - 8 = 3.
        let m5 = model(5);
        let f5 = m5.field().clone();
        let p = ProjPoint::from_ints(&f5, [1, 2, 3, 3]).unwrap();
        assert_eq!(m5.unparam(&p).unwrap(), (f5.from_int(2), f5.from_int(3)));
        // Off-surface and infinity points are rejected.
        let off = ProjPoint::from_ints(&f5, [1, 2, 3, 0]).unwrap();
        assert!(matches!(m5.unparam(&off), Err(Error::NotOnSurface(_))));
        assert!(matches!(
            m5.unparam(&ProjPoint::unit(&f5, 3)),
            Err(Error::NotAffineSurfacePoint(_))
        ));
        // The rationals parametrize exactly the same way.
        let rat = Field::rationals();
        let mr = SurfaceModel::new(&rat).unwrap();
        let u1 = rat.rational(1, 2).unwrap();
        let u2 = rat.rational(-3, 4).unwrap();
        let p = mr.param(&u1, &u2).unwrap();
        assert!(mr.contains(&p));
        assert_eq!(mr.unparam(&p).unwrap(), (u1, u2));
    }

    #[test]
    fn generators_cover_the_surface_correctly() {
        for q in [2u64, 3, 4, 5, 7] {
            let m = model(q);
            let gens = m.generators().unwrap();
            assert_eq!(gens.len() as u64, q + 1);
            let distinct: HashSet<_> = gens.iter().map(|g| g.line().clone()).collect();
            assert_eq!(distinct.len(), gens.len());
            for g in gens {
                for p in g.line().points().unwrap() {
                    assert!(m.contains(&p), "generator point off surface at q={q}");
                }
            }
            // Incidence counts: affine points lie on exactly one generator,
            // infinity points other than (0:0:0:1) on two, that point on one.
            let q3 = ProjPoint::unit(m.field(), 3);
            for p in m.points().unwrap() {
                let by_scan =
                    gens.iter().filter(|g| g.contains(p)).count();
                let listed = m.generators_through(p).unwrap();
                assert_eq!(by_scan, listed.len());
                for g in &listed {
                    assert!(g.contains(p));
                }
                let expected = if !p.coords()[0].is_zero() {
                    1
                } else if *p == q3 {
                    1
                } else {
                    2
                };
                assert_eq!(by_scan, expected, "incidence count at {p:?}");
            }
        }
    }

    #[test]
    fn plane_sections_through_vertical_planes_split_into_two_generators() {
        for q in [3u64, 4, 5] {
            let m = model(q);
            let f = m.field().clone();
            for a0 in f.elements().unwrap() {
                // V(a0 X0 - X1).
                let plane = ProjPlane::new([
                    a0.clone(),
                    -f.one(),
                    f.zero(),
                    f.zero(),
                ])
                .unwrap();
                let section: HashSet<ProjPoint> = m
                    .points()
                    .unwrap()
                    .iter()
                    .filter(|p| plane.contains(p))
                    .cloned()
                    .collect();
                let g_inf = m.generator_line(&f.zero(), &f.one()).unwrap();
                let g_a = m.generator_line(&f.one(), &a0).unwrap();
                let mut expected: HashSet<ProjPoint> =
                    g_inf.line().points().unwrap().into_iter().collect();
                expected.extend(g_a.line().points().unwrap());
                assert_eq!(section, expected);
            }
        }
    }

    #[test]
    fn generator_through_reference_point_joins_the_two_units() {
        let m = model(5);
        let f = m.field().clone();
        let q0 = ProjPoint::unit(&f, 0);
        let g = m.generator_through(&q0).unwrap();
        assert_eq!(g.id(), &GeneratorId::Affine(f.zero()));
        let expected =
            ProjLine::through(&q0, &ProjPoint::unit(&f, 2)).unwrap();
        assert_eq!(g.line(), &expected);
        // Infinity points have no single generator.
        assert!(matches!(
            m.generator_through(&ProjPoint::unit(&f, 3)),
            Err(Error::NotAffineSurfacePoint(_))
        ));
    }

    #[test]
    fn line_census_finds_exactly_the_generators() {
        for q in [2u64, 3, 4, 5] {
            let m = model(q);
            let found: HashSet<ProjLine> =
                m.lines_contained_in_surface().unwrap().into_iter().collect();
            let expected: HashSet<ProjLine> =
                m.generators().unwrap().iter().map(|g| g.line().clone()).collect();
            assert_eq!(found, expected);
        }
    }

    #[test]
    fn beta_maps_the_parabola_onto_the_infinity_generator() {
        let m = model(4);
        let f = m.field().clone();
        // Reference images.
        let p = ProjPoint::from_ints(&f, [1, 1, 1, 0]).unwrap();
        assert_eq!(
            m.beta(&p).unwrap(),
            ProjPoint::from_ints(&f, [0, 0, 1, 1]).unwrap()
        );
        assert_eq!(
            m.beta(&ProjPoint::unit(&f, 0)).unwrap(),
            ProjPoint::unit(&f, 2)
        );
        assert_eq!(
            m.beta(&ProjPoint::unit(&f, 2)).unwrap(),
            ProjPoint::unit(&f, 3)
        );
        // Off-parabola points are rejected.
        let off = ProjPoint::from_ints(&f, [1, 0, 1, 0]).unwrap();
        assert!(matches!(m.beta(&off), Err(Error::NotOnParabola(_))));
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let m = model(q);
            let mut images = HashSet::new();
            for p in m.parabola_points().unwrap() {
                let image = m.beta(&p).unwrap();
                assert_ne!(image, p);
                assert!(images.insert(image.clone()), "beta must be injective");
                // The join of p and beta(p) is a generator.
                let join = ProjLine::through(&p, &image).unwrap();
                assert!(
                    m.generators().unwrap().iter().any(|g| g.line() == &join),
                    "join must be a generator at q={q}"
                );
            }
            assert_eq!(images.len() as u64, q + 1);
        }
    }

    #[test]
    fn tangent_planes_at_affine_points_follow_the_closed_formula() {
        for field in [Field::gf(5).unwrap(), Field::gf(9).unwrap()] {
            let m = SurfaceModel::new(&field).unwrap();
            for u1 in field.elements().unwrap() {
                for u2 in field.elements().unwrap() {
                    let p = m.param(&u1, &u2).unwrap();
                    let tangent = match m.classify(&p).position {
                        SurfacePosition::SimpleAffine { tangent } => tangent,
                        other => panic!("affine point misclassified: {other:?}"),
                    };
                    assert_eq!(tangent, m.tangent_plane(&p).unwrap());
                    // (2u1^3 - u1 u2, -3u1^2 + u2, u1, -1).
                    let u1sq = &u1 * &u1;
                    let u1cu = &u1sq * &u1;
                    let a0 = &(&field.from_int(2) * &u1cu) - &(&u1 * &u2);
                    let a1 = &u2 - &(&field.from_int(3) * &u1sq);
                    let expected =
                        ProjPlane::new([a0, a1, u1.clone(), -field.one()]).unwrap();
                    assert_eq!(tangent, expected);
                    // The tangent plane touches: it contains the point and
                    // the generator through it.
                    assert!(tangent.contains(&p));
                    assert!(tangent
                        .contains_line(m.generator_through(&p).unwrap().line()));
                }
            }
        }
        // The reference value at P(1,1) over the rationals.
        let rat = Field::rationals();
        let mr = SurfaceModel::new(&rat).unwrap();
        let p = mr.param(&rat.one(), &rat.one()).unwrap();
        assert_eq!(
            mr.tangent_plane(&p).unwrap(),
            ProjPlane::from_ints(&rat, [1, -2, 1, -1]).unwrap()
        );
    }

    #[test]
    fn infinity_points_are_double_with_split_tangent_cones() {
        for q in [2u64, 3, 5, 9] {
            let m = model(q);
            let f = m.field().clone();
            let q3 = ProjPoint::unit(&f, 3);
            for p in m.infinity_points().unwrap() {
                let cone = match m.classify(p).position {
                    SurfacePosition::DoubleAtInfinity { cone } => cone,
                    other => panic!("infinity point misclassified: {other:?}"),
                };
                assert_eq!(cone[0], m.omega());
                if *p == q3 {
                    assert_eq!(cone.len(), 1);
                } else {
                    assert_eq!(cone.len(), 2);
                    // Second component is the span of the two generators
                    // through the point: V(s X0 - X1) at (0:0:1:s).
                    let s = p.coords()[3].div(&p.coords()[2]).unwrap();
                    let expected =
                        ProjPlane::new([s, -f.one(), f.zero(), f.zero()]).unwrap();
                    assert_eq!(cone[1], expected);
                }
            }
        }
    }

    #[test]
    fn tangent_cone_planes_match_the_intersection_multiplicity_oracle() {
        for q in [3u64, 4, 5] {
            let m = model(q);
            for y in m.infinity_points().unwrap() {
                let cone = match m.classify(y).position {
                    SurfacePosition::DoubleAtInfinity { cone } => cone,
                    other => panic!("{other:?}"),
                };
                for r in proj::enumerate_points(m.field()).unwrap() {
                    if &r == y {
                        continue;
                    }
                    let restriction =
                        forms::restrict_to_line(m.form(), y, &r).unwrap();
                    // Multiplicity of the root at the base point.
                    let mult = if restriction.is_zero() {
                        4
                    } else {
                        restriction
                            .roots_with_multiplicity()
                            .unwrap()
                            .into_iter()
                            .find(|(root, _)| root.is_zero())
                            .map_or(0, |(_, m)| m)
                    };
                    let in_cone = cone.iter().any(|plane| plane.contains(&r));
                    assert_eq!(
                        mult >= 3,
                        in_cone,
                        "cone membership mismatch at q={q}, y={y:?}, r={r:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn nucleus_line_exists_exactly_in_characteristic_three() {
        for q in [2u64, 3, 4, 5, 9] {
            let m = model(q);
            let f = m.field().clone();
            let char3 = f.characteristic() == 3;
            let partials = m.form().partials();
            for p in proj::enumerate_points(&f).unwrap() {
                let all_vanish =
                    partials.iter().all(|d| d.evaluate(p.coords()).is_zero());
                let on_inf_gen =
                    p.coords()[0].is_zero() && p.coords()[1].is_zero();
                let on_nucleus_line =
                    p.coords()[0].is_zero() && p.coords()[2].is_zero();
                assert_eq!(m.is_nucleus(&p), char3 && on_nucleus_line);
                let expected_vanish =
                    on_inf_gen || (char3 && on_nucleus_line);
                assert_eq!(all_vanish, expected_vanish, "at {p:?}, q={q}");
            }
        }
        // The reference nucleus: (0:1:0:1) in characteristic 3 is off the
        // surface yet a nucleus.
        let m = model(3);
        let p = ProjPoint::from_ints(m.field(), [0, 1, 0, 1]).unwrap();
        let class = m.classify(&p);
        assert_eq!(class.position, SurfacePosition::NotOnSurface);
        assert!(class.is_nucleus);
    }

    #[test]
    fn dual_criterion_agrees_with_generator_containment_and_tangency() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let m = model(q);
            // Tangent planes harvested from point classification.
            let mut from_points: HashSet<ProjPlane> = HashSet::new();
            for p in m.points().unwrap() {
                match m.classify(p).position {
                    SurfacePosition::SimpleAffine { tangent } => {
                        from_points.insert(tangent);
                    }
                    SurfacePosition::DoubleAtInfinity { cone } => {
                        from_points.extend(cone);
                    }
                    SurfacePosition::NotOnSurface => unreachable!(),
                }
            }
            for plane in proj::enumerate_planes(m.field()).unwrap() {
                let dual_zero = m.is_tangent_plane(&plane);
                let by_scan = m.generators().unwrap().iter().any(|g| {
                    g.line().points().unwrap().iter().all(|p| plane.contains(p))
                });
                let found = m.contains_generator(&plane);
                assert_eq!(dual_zero, by_scan, "dual criterion at q={q}");
                assert_eq!(found.is_some(), by_scan);
                if let Some(g) = found {
                    assert!(plane.contains_line(g.line()));
                }
                assert_eq!(
                    from_points.contains(&plane),
                    dual_zero,
                    "tangency set mismatch at q={q}, plane {plane:?}"
                );
            }
        }
    }

    #[test]
    fn contains_generator_prefers_the_infinity_generator() {
        let m = model(5);
        let f = m.field().clone();
        // V(X1) holds both g_inf and g(1,0).
        let plane = ProjPlane::from_ints(&f, [0, 1, 0, 0]).unwrap();
        let g = m.contains_generator(&plane).unwrap();
        assert_eq!(g.id(), &GeneratorId::Infinity);
        // V(X3) holds g(1,0) only.
        let plane = ProjPlane::from_ints(&f, [0, 0, 0, 1]).unwrap();
        let g = m.contains_generator(&plane).unwrap();
        assert_eq!(g.id(), &GeneratorId::Affine(f.zero()));
    }

    #[test]
    fn point_of_tangency_round_trips_over_every_medium_field() {
        for q in [4u64, 5, 7, 8, 9] {
            let m = model(q);
            let f = m.field().clone();
            for p in m.affine_points().unwrap() {
                let tangent = m.tangent_plane(p).unwrap();
                let recovered = m.point_of_tangency(&tangent).unwrap();
                assert_eq!(&recovered, p, "round trip failed at q={q}");
                // Independent algebraic oracle: normalize the covector to
                // a3 = -1; then u1 = a2 and u2 = a1 + 3 a2^2.
                let cov = tangent.covector();
                let scale = (-f.one()).div(&cov[3]).unwrap();
                let a1 = &cov[1] * &scale;
                let a2 = &cov[2] * &scale;
                let u1 = a2.clone();
                let u2 = &a1 + &(&f.from_int(3) * &(&a2 * &a2));
                assert_eq!(m.param(&u1, &u2).unwrap(), *p);
            }
        }
    }

    #[test]
    fn point_of_tangency_reports_reference_values_and_failures() {
        let m = model(5);
        let f = m.field().clone();
        // V(X3) touches at the origin of the chart.
        let v_x3 = ProjPlane::from_ints(&f, [0, 0, 0, 1]).unwrap();
        assert_eq!(m.point_of_tangency(&v_x3).unwrap(), ProjPoint::unit(&f, 0));
        // Planes through (0:0:0:1) are rejected.
        assert!(matches!(
            m.point_of_tangency(&m.omega()),
            Err(Error::PlaneThroughQ3)
        ));
        // Non-tangent planes are rejected: V(X0 + X3) has dual value 1.
        let non_tangent = ProjPlane::from_ints(&f, [1, 0, 0, 1]).unwrap();
        assert!(matches!(
            m.point_of_tangency(&non_tangent),
            Err(Error::NoGeneratorInPlane)
        ));
        // Small fields are ambiguous by design.
        let m3 = model(3);
        let plane = ProjPlane::from_ints(m3.field(), [0, 0, 0, 1]).unwrap();
        assert!(matches!(m3.point_of_tangency(&plane), Err(Error::SmallField(3))));
        // The rational chart works symbolically.
        let rat = Field::rationals();
        let mr = SurfaceModel::new(&rat).unwrap();
        let u1 = rat.rational(1, 2).unwrap();
        let u2 = rat.rational(-1, 3).unwrap();
        let p = mr.param(&u1, &u2).unwrap();
        let tangent = mr.tangent_plane(&p).unwrap();
        assert_eq!(mr.point_of_tangency(&tangent).unwrap(), p);
    }

    #[test]
    fn omega_is_the_only_plane_through_the_infinity_generator_without_a_second_generator()
    {
        for q in [2u64, 3, 4, 5, 7] {
            let m = model(q);
            let g_inf = m.generator_line(&m.field().zero(), &m.field().one()).unwrap();
            let mut sole = Vec::new();
            for plane in proj::enumerate_planes(m.field()).unwrap() {
                if !plane.contains_line(g_inf.line()) {
                    continue;
                }
                let second = m
                    .generators()
                    .unwrap()
                    .iter()
                    .filter(|g| g.id() != &GeneratorId::Infinity)
                    .any(|g| plane.contains_line(g.line()));
                if !second {
                    sole.push(plane);
                }
            }
            assert_eq!(sole, vec![m.omega()]);
        }
    }

}
