//! The projective space PG(3, K): points, planes, and lines with unique
//! canonical representatives, incidence, join/meet, cross ratio, and full
//! enumeration for finite K.
//!
//! Canonical forms: points and planes scale their coordinate vector so the
//! leftmost nonzero entry is 1; a line is the reduced row echelon form of
//! any 2 x 4 matrix whose row space it is. Equality and hashing rely on
//! these forms being unique.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{ExtendedScalar, Field, FieldElement};
use crate::linalg;

fn canonicalize4(mut coords: [FieldElement; 4]) -> Result<[FieldElement; 4]> {
    let field = coords[0].field().clone();
    for c in &coords[1..] {
        if c.field() != &field {
            return Err(Error::MixedFields(field.name(), c.field().name()));
        }
    }
    let Some(lead) = coords.iter().position(|c| !c.is_zero()) else {
        return Err(Error::DegenerateInput("zero coordinate vector".to_string()));
    };
    let inv = coords[lead].inv().expect("leading coordinate nonzero");
    for c in coords.iter_mut() {
        *c = &*c * &inv;
    }
    Ok(coords)
}

/// A point of PG(3, K) in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: [FieldElement; 4],
}

impl ProjPoint {
    pub fn new(coords: [FieldElement; 4]) -> Result<ProjPoint> {
        Ok(ProjPoint { coords: canonicalize4(coords)? })
    }

    pub fn from_ints(field: &Field, coords: [i64; 4]) -> Result<ProjPoint> {
        ProjPoint::new(coords.map(|c| field.from_int(c)))
    }

    /// The i-th fundamental point (unit vector e_i).
    pub fn unit(field: &Field, i: usize) -> ProjPoint {
        let mut coords = [field.zero(), field.zero(), field.zero(), field.zero()];
        coords[i] = field.one();
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[FieldElement; 4] {
        &self.coords
    }

    pub fn field(&self) -> &Field {
        self.coords[0].field()
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K({}:{}:{}:{})",
            self.coords[0], self.coords[1], self.coords[2], self.coords[3]
        )
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A plane of PG(3, K), stored as a canonical covector [a0, a1, a2, a3]
/// for V(a0 X0 + a1 X1 + a2 X2 + a3 X3).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPlane {
    covector: [FieldElement; 4],
}

impl ProjPlane {
    pub fn new(covector: [FieldElement; 4]) -> Result<ProjPlane> {
        Ok(ProjPlane { covector: canonicalize4(covector)? })
    }

    pub fn from_ints(field: &Field, covector: [i64; 4]) -> Result<ProjPlane> {
        ProjPlane::new(covector.map(|c| field.from_int(c)))
    }

    pub fn covector(&self) -> &[FieldElement; 4] {
        &self.covector
    }

    pub fn field(&self) -> &Field {
        self.covector[0].field()
    }

    /// Value of the defining linear form at the point's canonical
    /// representative.
    pub fn evaluate(&self, point: &ProjPoint) -> FieldElement {
        let mut acc = self.field().zero();
        for (a, p) in self.covector.iter().zip(point.coords()) {
            acc = &acc + &(a * p);
        }
        acc
    }

    pub fn contains(&self, point: &ProjPoint) -> bool {
        self.evaluate(point).is_zero()
    }

    pub fn contains_line(&self, line: &ProjLine) -> bool {
        line.rows().iter().all(|row| {
            let mut acc = self.field().zero();
            for (a, p) in self.covector.iter().zip(row) {
                acc = &acc + &(a * p);
            }
            acc.is_zero()
        })
    }

    /// All points of the plane (q^2 + q + 1 of them).
    pub fn points(&self) -> Result<Vec<ProjPoint>> {
        let field = self.field();
        let basis = linalg::kernel_basis(&[self.covector.to_vec()], 4, field);
        debug_assert_eq!(basis.len(), 3);
        let elems = field.elements()?;
        let mut out = Vec::new();
        // Canonical P^2 sweep over the kernel basis: (1,y,z), (0,1,z), (0,0,1).
        for y in &elems {
            for z in &elems {
                out.push(combine3(&basis, &field.one(), y, z)?);
            }
        }
        for z in &elems {
            out.push(combine3(&basis, &field.zero(), &field.one(), z)?);
        }
        out.push(combine3(&basis, &field.zero(), &field.zero(), &field.one())?);
        Ok(out)
    }
}

fn combine3(
    basis: &[Vec<FieldElement>],
    a: &FieldElement,
    b: &FieldElement,
    c: &FieldElement,
) -> Result<ProjPoint> {
    let field = a.field();
    let mut coords = [field.zero(), field.zero(), field.zero(), field.zero()];
    for (i, slot) in coords.iter_mut().enumerate() {
        *slot = &(&(a * &basis[0][i]) + &(b * &basis[1][i])) + &(c * &basis[2][i]);
    }
    ProjPoint::new(coords)
}

impl fmt::Debug for ProjPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}:{}:{}:{}]",
            self.covector[0], self.covector[1], self.covector[2], self.covector[3]
        )
    }
}

impl fmt::Display for ProjPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A line of PG(3, K), stored as the unique RREF basis of its row space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjLine {
    rows: [[FieldElement; 4]; 2],
}

impl ProjLine {
    /// The line through two distinct points.
    pub fn through(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine> {
        if p == q {
            return Err(Error::DegenerateInput("line through equal points".to_string()));
        }
        ProjLine::from_span(&[p.coords().to_vec(), q.coords().to_vec()])
    }

    /// The line spanned by the rows (must have rank exactly 2).
    pub(crate) fn from_span(rows: &[Vec<FieldElement>]) -> Result<ProjLine> {
        let mut work = rows.to_vec();
        let pivots = linalg::rref(&mut work);
        if pivots.len() != 2 {
            return Err(Error::DegenerateInput(format!(
                "line span has rank {}",
                pivots.len()
            )));
        }
        let to4 = |v: &Vec<FieldElement>| -> [FieldElement; 4] {
            [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()]
        };
        Ok(ProjLine { rows: [to4(&work[0]), to4(&work[1])] })
    }

    pub fn rows(&self) -> &[[FieldElement; 4]; 2] {
        &self.rows
    }

    pub fn field(&self) -> &Field {
        self.rows[0][0].field()
    }

    pub fn contains(&self, point: &ProjPoint) -> bool {
        let stacked = vec![
            self.rows[0].to_vec(),
            self.rows[1].to_vec(),
            point.coords().to_vec(),
        ];
        linalg::rank(&stacked) == 2
    }

    /// All q + 1 points of the line (finite fields).
    pub fn points(&self) -> Result<Vec<ProjPoint>> {
        let field = self.field();
        let elems = field.elements()?;
        let mut out = Vec::with_capacity(elems.len() + 1);
        for mu in &elems {
            let mut coords = [field.zero(), field.zero(), field.zero(), field.zero()];
            for (i, slot) in coords.iter_mut().enumerate() {
                *slot = &self.rows[0][i] + &(mu * &self.rows[1][i]);
            }
            out.push(ProjPoint::new(coords)?);
        }
        out.push(ProjPoint::new(self.rows[1].clone())?);
        Ok(out)
    }

    /// Coordinates (mu0, mu1) of a point on this line with respect to the
    /// RREF basis rows. Each row leads with 1 at its pivot column and the
    /// other row is 0 there, so the coordinates can be read off directly.
    fn line_coords(&self, point: &ProjPoint) -> Result<(FieldElement, FieldElement)> {
        if !self.contains(point) {
            return Err(Error::NotCollinear);
        }
        let c0 = self.rows[0].iter().position(|c| !c.is_zero()).unwrap();
        let c1 = self.rows[1].iter().position(|c| !c.is_zero()).unwrap();
        Ok((point.coords()[c0].clone(), point.coords()[c1].clone()))
    }
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line<[{}:{}:{}:{}], [{}:{}:{}:{}]>",
            self.rows[0][0],
            self.rows[0][1],
            self.rows[0][2],
            self.rows[0][3],
            self.rows[1][0],
            self.rows[1][1],
            self.rows[1][2],
            self.rows[1][3]
        )
    }
}

/// Plane spanned by a line and a point off it.
pub fn join_line_point(line: &ProjLine, point: &ProjPoint) -> Result<ProjPlane> {
    if line.contains(point) {
        return Err(Error::DegenerateInput("point lies on the line".to_string()));
    }
    let field = line.field();
    let rows = vec![
        line.rows()[0].to_vec(),
        line.rows()[1].to_vec(),
        point.coords().to_vec(),
    ];
    let kernel = linalg::kernel_basis(&rows, 4, field);
    debug_assert_eq!(kernel.len(), 1);
    let v = &kernel[0];
    ProjPlane::new([v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()])
}

/// Line of intersection of two distinct planes.
pub fn meet_planes(a: &ProjPlane, b: &ProjPlane) -> Result<ProjLine> {
    if a == b {
        return Err(Error::DegenerateInput("meet of equal planes".to_string()));
    }
    let field = a.field();
    let rows = vec![a.covector().to_vec(), b.covector().to_vec()];
    let kernel = linalg::kernel_basis(&rows, 4, field);
    debug_assert_eq!(kernel.len(), 2);
    ProjLine::from_span(&kernel)
}

/// Intersection point of a plane and a line not contained in it.
pub fn meet_plane_line(plane: &ProjPlane, line: &ProjLine) -> Result<ProjPoint> {
    let field = plane.field();
    let dot = |row: &[FieldElement; 4]| {
        let mut acc = field.zero();
        for (a, p) in plane.covector().iter().zip(row) {
            acc = &acc + &(a * p);
        }
        acc
    };
    let a = dot(&line.rows()[0]);
    let b = dot(&line.rows()[1]);
    if a.is_zero() && b.is_zero() {
        return Err(Error::DegenerateInput(
            "line is contained in the plane".to_string(),
        ));
    }
    // The point (-b) r0 + a r1 satisfies the plane equation.
    let mut coords = [field.zero(), field.zero(), field.zero(), field.zero()];
    for (i, slot) in coords.iter_mut().enumerate() {
        *slot = &(&(-&b) * &line.rows()[0][i]) + &(&a * &line.rows()[1][i]);
    }
    ProjPoint::new(coords)
}

/// Cross ratio of four collinear points, at least three distinct: the line
/// is parameterized so that p3 maps to 0, p2 to 1, and p4 to infinity; the
/// result is the parameter of p1. Coincidences among {p1} and the base
/// triple produce 0, 1, or infinity consistently with that parameterization.
pub fn cross_ratio(
    p1: &ProjPoint,
    p2: &ProjPoint,
    p3: &ProjPoint,
    p4: &ProjPoint,
) -> Result<ExtendedScalar> {
    let pts = [p1, p2, p3, p4];
    let mut distinct: Vec<&ProjPoint> = Vec::new();
    for p in pts {
        if !distinct.contains(&p) {
            distinct.push(p);
        }
    }
    if distinct.len() < 3 {
        return Err(Error::TooDegenerate);
    }
    let line = ProjLine::through(distinct[0], distinct[1])?;
    let mut mu = Vec::with_capacity(4);
    for p in pts {
        mu.push(line.line_coords(p)?);
    }
    let d = |i: usize, j: usize| -> FieldElement {
        &(&mu[i].0 * &mu[j].1) - &(&mu[i].1 * &mu[j].0)
    };
    let num = &d(0, 2) * &d(1, 3);
    let den = &d(0, 3) * &d(1, 2);
    if den.is_zero() {
        debug_assert!(!num.is_zero(), "0/0 prevented by the distinctness check");
        Ok(ExtendedScalar::Infinity)
    } else {
        Ok(ExtendedScalar::Finite(num.div(&den)?))
    }
}

/// All points of PG(3, K), canonical representatives, leftmost-one patterns
/// first: (1,*,*,*), (0,1,*,*), (0,0,1,*), (0,0,0,1).
pub fn enumerate_points(field: &Field) -> Result<Vec<ProjPoint>> {
    let elems = field.elements()?;
    let mut out = Vec::new();
    for lead in 0..4 {
        let free = 3 - lead;
        let mut idxs = vec![0usize; free];
        loop {
            let mut coords = vec![field.zero(); lead];
            coords.push(field.one());
            for &i in &idxs {
                coords.push(elems[i].clone());
            }
            let coords: [FieldElement; 4] = coords.try_into().map_err(|_| {
                Error::DegenerateInput("coordinate assembly".to_string())
            })?;
            out.push(ProjPoint { coords });
            // Mixed-radix increment, last coordinate fastest.
            let mut pos = free;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idxs[pos] += 1;
                if idxs[pos] < elems.len() {
                    break;
                }
                idxs[pos] = 0;
            }
            if idxs.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    Ok(out)
}

/// All planes of PG(3, K), canonical covectors, same ordering scheme as
/// `enumerate_points`.
pub fn enumerate_planes(field: &Field) -> Result<Vec<ProjPlane>> {
    Ok(enumerate_points(field)?
        .into_iter()
        .map(|p| ProjPlane { covector: p.coords })
        .collect())
}

/// All lines of PG(3, K), enumerated directly as RREF 2 x 4 matrices:
/// for each pivot pair i < j, the free entries sweep the field.
pub fn enumerate_lines(field: &Field) -> Result<Vec<ProjLine>> {
    let elems = field.elements()?;
    let mut out = Vec::new();
    for i in 0..4usize {
        for j in (i + 1)..4usize {
            let free0: Vec<usize> = ((i + 1)..4).filter(|&c| c != j).collect();
            let free1: Vec<usize> = ((j + 1)..4).collect();
            let nfree = free0.len() + free1.len();
            let mut idxs = vec![0usize; nfree];
            loop {
                let mut r0 = [field.zero(), field.zero(), field.zero(), field.zero()];
                let mut r1 = r0.clone();
                r0[i] = field.one();
                r1[j] = field.one();
                for (slot, &c) in free0.iter().enumerate() {
                    r0[c] = elems[idxs[slot]].clone();
                }
                for (slot, &c) in free1.iter().enumerate() {
                    r1[c] = elems[idxs[free0.len() + slot]].clone();
                }
                out.push(ProjLine { rows: [r0, r1] });
                let mut pos = nfree;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    idxs[pos] += 1;
                    if idxs[pos] < elems.len() {
                        break;
                    }
                    idxs[pos] = 0;
                }
                if idxs.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Number of points (equivalently planes) of PG(3, q).
pub fn point_count(q: u64) -> u64 {
    q * q * q + q * q + q + 1
}

/// Number of lines of PG(3, q).
pub fn line_count(q: u64) -> u64 {
    (q * q + 1) * (q * q + q + 1)
}
