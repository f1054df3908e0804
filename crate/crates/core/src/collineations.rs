//! Collineation groups of the ruled cubic surface.
//!
//! Every matrix in this module is an invertible 4x4 matrix over the base
//! field, normalized so that its upper-left entry is 1. Such a matrix
//! represents a projective collineation of PG(3, K) uniquely: two matrices
//! induce the same collineation exactly when they are proportional, and the
//! normalization picks one representative per proportionality class (on the
//! chart where the corner entry is nonzero, which covers every collineation
//! that fixes the surface).
//!
//! The group G of matrices M_{a,b,c} acts simply transitively on ordered
//! pairs consisting of an affine surface point and a unit scale; its
//! unipotent part {M_{a,b,1}} acts regularly on the affine points
//! themselves. Over GF(2) and GF(3) the full collineation group of the
//! surface is strictly larger, picking up the exceptional matrices N and
//! N_c that stabilize the base point Q0 = K(1,0,0,0) without lying in G.
//! `stabilizer_census` and `extended_group_census` compute those groups by
//! structured search and cross-check them against exhaustive scans on the
//! smallest fields.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::mat::Mat4;
use crate::proj::ProjPoint;
use crate::surface::SurfaceModel;

/// Recognized shape of a normalized collineation matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixTag {
    /// The shear-and-scale matrix M_{a,b,c} with c nonzero.
    M {
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
    },
    /// The exceptional involution over GF(2).
    N,
    /// One of the exceptional matrices N_c over GF(3).
    Nc { c: FieldElement },
    /// Any other normalized invertible matrix.
    Other,
}

/// An invertible 4x4 matrix with upper-left entry 1, acting on points of
/// PG(3, K) by left multiplication. Equality, hashing, and ordering ignore
/// the tag, which is derived data.
#[derive(Clone, Debug)]
pub struct CayleyMatrix {
    mat: Mat4,
    tag: MatrixTag,
}

impl PartialEq for CayleyMatrix {
    fn eq(&self, other: &CayleyMatrix) -> bool {
        self.mat == other.mat
    }
}

impl Eq for CayleyMatrix {}

impl std::hash::Hash for CayleyMatrix {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.mat.hash(state);
    }
}

impl PartialOrd for CayleyMatrix {
    fn partial_cmp(&self, other: &CayleyMatrix) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CayleyMatrix {
    fn cmp(&self, other: &CayleyMatrix) -> std::cmp::Ordering {
        self.mat.cmp(&other.mat)
    }
}

impl CayleyMatrix {
    /// Wraps a normalized invertible matrix, classifying its shape.
    pub fn new(mat: Mat4) -> Result<CayleyMatrix> {
        if !mat.get(0, 0).is_one() {
            return Err(Error::DegenerateInput(
                "collineation matrix needs upper-left entry 1".into(),
            ));
        }
        if !mat.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        let tag = classify(&mat);
        Ok(CayleyMatrix { mat, tag })
    }

    pub fn identity(field: &Field) -> CayleyMatrix {
        CayleyMatrix::new(Mat4::identity(field)).expect("identity is normalized and invertible")
    }

    /// The matrix M_{a,b,c}; its action sends the affine surface point with
    /// parameters (u1, u2) to the one with parameters (a + c u1, b + 3ac u1
    /// + c^2 u2).
    pub fn make_m(a: &FieldElement, b: &FieldElement, c: &FieldElement) -> Result<CayleyMatrix> {
        if c.is_zero() {
            return Err(Error::ZeroScale);
        }
        let field = c.field().clone();
        let zero = field.zero();
        let one = field.one();
        let three = field.from_int(3);
        let c2 = c * c;
        let entries = vec![
            one,
            zero.clone(),
            zero.clone(),
            zero.clone(),
            a.clone(),
            c.clone(),
            zero.clone(),
            zero.clone(),
            b.clone(),
            &three * &(a * c),
            c2.clone(),
            zero.clone(),
            &(a * b) - &(&(a * a) * a),
            b * c,
            a * &c2,
            &c2 * c,
        ];
        CayleyMatrix::new(Mat4::from_vec(entries)?)
    }

    /// The exceptional involution N, defined over GF(2) only.
    pub fn make_n(field: &Field) -> Result<CayleyMatrix> {
        if field.order() != Some(2) {
            return Err(Error::UnsupportedField(format!(
                "the involution N exists over GF(2) only, not {}",
                field.name()
            )));
        }
        CayleyMatrix::new(n_matrix(field))
    }

    /// The exceptional matrix N_c, defined over GF(3) only, c nonzero.
    pub fn make_nc(c: &FieldElement) -> Result<CayleyMatrix> {
        let field = c.field().clone();
        if field.order() != Some(3) {
            return Err(Error::UnsupportedField(format!(
                "the matrices N_c exist over GF(3) only, not {}",
                field.name()
            )));
        }
        if c.is_zero() {
            return Err(Error::ZeroScale);
        }
        CayleyMatrix::new(nc_matrix(c))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.mat
    }

    pub fn tag(&self) -> &MatrixTag {
        &self.tag
    }

    pub fn field(&self) -> &Field {
        self.mat.field()
    }

    pub fn is_identity(&self) -> bool {
        self.mat == Mat4::identity(self.field())
    }

    /// Image of a projective point under the collineation.
    pub fn apply(&self, p: &ProjPoint) -> Result<ProjPoint> {
        self.mat.apply(p)
    }

    /// Image of a plane under the collineation.
    pub fn apply_to_plane(&self, plane: &crate::proj::ProjPlane) -> Result<crate::proj::ProjPlane> {
        self.mat.apply_to_plane(plane)
    }

    /// The composite collineation that applies `rhs` first and `self`
    /// second; its matrix is the product self * rhs, renormalized. Fails
    /// only when the product's corner entry vanishes, which cannot happen
    /// for matrices fixing the plane at infinity.
    pub fn compose(&self, rhs: &CayleyMatrix) -> Result<CayleyMatrix> {
        normalize(self.mat.mul(&rhs.mat))
    }

    /// The inverse collineation, renormalized the same way.
    pub fn invert(&self) -> Result<CayleyMatrix> {
        normalize(self.mat.inverse()?)
    }

    /// Whether the collineation permutes the point set of the surface.
    /// Injectivity is automatic, so mapping the finite point set into
    /// itself already forces a permutation.
    pub fn fixes_surface(&self, model: &SurfaceModel) -> Result<bool> {
        let set = model.point_set()?;
        for p in model.points()? {
            if !set.contains(&self.apply(p)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn normalize(mat: Mat4) -> Result<CayleyMatrix> {
    let corner = mat.get(0, 0).clone();
    if corner.is_zero() {
        return Err(Error::DegenerateInput(
            "matrix has corner entry 0, so no normalized representative exists".into(),
        ));
    }
    let mat = if corner.is_one() { mat } else { mat.scale(&corner.inv()?)? };
    CayleyMatrix::new(mat)
}

fn n_matrix(field: &Field) -> Mat4 {
    Mat4::from_rows(field, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 1, 1, 0], [0, 1, 0, 1]])
}

fn nc_matrix(c: &FieldElement) -> Mat4 {
    let field = c.field().clone();
    let zero = field.zero();
    let two = field.from_int(2);
    let entries = vec![
        field.one(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        c.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        two.clone(),
        zero.clone(),
        zero.clone(),
        c.clone(),
        zero.clone(),
        &two * c,
    ];
    Mat4::from_vec(entries).expect("sixteen entries over one field")
}

fn classify(mat: &Mat4) -> MatrixTag {
    let field = mat.field().clone();
    if !(mat.get(0, 1).is_zero() && mat.get(0, 2).is_zero() && mat.get(0, 3).is_zero()) {
        return MatrixTag::Other;
    }
    let a = mat.get(1, 0);
    let c = mat.get(1, 1);
    if !c.is_zero() && mat.get(1, 2).is_zero() && mat.get(1, 3).is_zero() {
        let b = mat.get(2, 0);
        let three = field.from_int(3);
        let c2 = c * c;
        let m_shape = *mat.get(2, 1) == &three * &(a * c)
            && *mat.get(2, 2) == c2
            && mat.get(2, 3).is_zero()
            && *mat.get(3, 0) == &(a * b) - &(&(a * a) * a)
            && *mat.get(3, 1) == b * c
            && *mat.get(3, 2) == a * &c2
            && *mat.get(3, 3) == &c2 * c;
        if m_shape {
            return MatrixTag::M { a: a.clone(), b: b.clone(), c: c.clone() };
        }
    }
    if field.order() == Some(2) && *mat == n_matrix(&field) {
        return MatrixTag::N;
    }
    if field.order() == Some(3) && !c.is_zero() && *mat == nc_matrix(c) {
        return MatrixTag::Nc { c: c.clone() };
    }
    MatrixTag::Other
}

/// All q^2 (q-1) matrices M_{a,b,c} over a finite field, sorted by their
/// row-major entry strings.
pub fn group_elements(field: &Field) -> Result<Vec<CayleyMatrix>> {
    let elems = field.elements()?;
    let nonzero = field.nonzero_elements()?;
    let mut out = Vec::with_capacity(elems.len() * elems.len() * nonzero.len());
    for a in &elems {
        for b in &elems {
            for c in &nonzero {
                out.push(CayleyMatrix::make_m(a, b, c)?);
            }
        }
    }
    sort_matrices(&mut out);
    Ok(out)
}

/// The unique matrix M_{a,b,1} taking one affine surface point to another.
pub fn affine_transporter(
    model: &SurfaceModel,
    from: &ProjPoint,
    to: &ProjPoint,
) -> Result<CayleyMatrix> {
    let (u1, u2) = model.unparam(from)?;
    let (v1, v2) = model.unparam(to)?;
    let field = model.field();
    let three = field.from_int(3);
    let a = &v1 - &u1;
    let b = &(&v2 - &u2) - &(&(&three * &a) * &u1);
    CayleyMatrix::make_m(&a, &b, &field.one())
}

/// The coordinatewise Frobenius map x -> x^(p^i) on points of PG(3, q).
/// It is a collineation (semilinear, not a matrix) and permutes the
/// surface, since the defining form has coefficients in the prime field.
pub struct FrobeniusCollineation {
    field: Field,
    power: u32,
}

impl FrobeniusCollineation {
    pub fn new(field: &Field, power: u32) -> Result<FrobeniusCollineation> {
        if !field.is_finite() {
            return Err(Error::InfiniteField(field.name()));
        }
        let k = field.spec().degree();
        if power >= k {
            return Err(Error::DegenerateInput(format!(
                "frobenius power {power} outside 0..{k}"
            )));
        }
        Ok(FrobeniusCollineation { field: field.clone(), power })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn is_identity(&self) -> bool {
        self.power == 0
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let c = p.coords();
        ProjPoint::new([
            c[0].frobenius(self.power).expect("power validated"),
            c[1].frobenius(self.power).expect("power validated"),
            c[2].frobenius(self.power).expect("power validated"),
            c[3].frobenius(self.power).expect("power validated"),
        ])
        .expect("powers of a nonzero vector stay nonzero")
    }
}

/// All normalized matrices fixing both the surface and the point Q0 =
/// K(1,0,0,0).
///
/// The search runs over the five-parameter family of matrices with rows
/// (1,0,0,0), (0,x11,0,0), (0,x21,x22,0), (0,x31,0,x33); any collineation
/// fixing the surface and Q0 has this shape, because it must also fix the
/// plane at infinity, the tangent plane of Q0, the generator and parabola
/// through Q0, and the points Q2 and Q3 where those meet the line at
/// infinity. Over GF(2) and GF(3) the result is additionally cross-checked
/// against an exhaustive scan of all normalized matrices.
pub fn stabilizer_census(model: &SurfaceModel) -> Result<Vec<CayleyMatrix>> {
    let field = model.field().clone();
    let q = field.order().ok_or_else(|| Error::InfiniteField(field.name()))?;
    let elems = field.elements()?;
    let nonzero = field.nonzero_elements()?;
    let zero = field.zero();
    let one = field.one();
    let mut found = Vec::new();
    for x11 in &nonzero {
        for x22 in &nonzero {
            for x33 in &nonzero {
                for x21 in &elems {
                    for x31 in &elems {
                        let entries = vec![
                            one.clone(),
                            zero.clone(),
                            zero.clone(),
                            zero.clone(),
                            zero.clone(),
                            x11.clone(),
                            zero.clone(),
                            zero.clone(),
                            zero.clone(),
                            x21.clone(),
                            x22.clone(),
                            zero.clone(),
                            zero.clone(),
                            x31.clone(),
                            zero.clone(),
                            x33.clone(),
                        ];
                        let mat = Mat4::from_vec(entries)?;
                        let cm = CayleyMatrix::new(mat)
                            .expect("block triangular with nonzero diagonal");
                        if cm.fixes_surface(model)? {
                            found.push(cm);
                        }
                    }
                }
            }
        }
    }
    sort_matrices(&mut found);
    if q <= 3 {
        let q0 = ProjPoint::unit(&field, 0);
        let mut scanned: Vec<CayleyMatrix> = exhaustive_extended_scan(model)?
            .into_iter()
            .filter(|m| m.apply(&q0).map(|img| img == q0).unwrap_or(false))
            .collect();
        sort_matrices(&mut scanned);
        if scanned != found {
            return Err(Error::ConsistencyFailure(format!(
                "structured stabilizer search found {} matrices, exhaustive scan {}",
                found.len(),
                scanned.len()
            )));
        }
    }
    Ok(found)
}

/// Every normalized matrix fixing the surface, computed as the set of
/// products g * s with g in the M-matrix group and s in the stabilizer of
/// Q0. The factorization is exact: any surface-fixing collineation sends
/// Q0 to some affine point, and composing with the transporter back to Q0
/// lands in the stabilizer. Over GF(2) and GF(3) the result is verified
/// against `exhaustive_extended_scan`.
pub fn extended_group_census(model: &SurfaceModel) -> Result<Vec<CayleyMatrix>> {
    let field = model.field().clone();
    let q = field.order().ok_or_else(|| Error::InfiniteField(field.name()))?;
    if q > 9 {
        return Err(Error::FieldTooLarge { order: q, bound: 9 });
    }
    let group = group_elements(&field)?;
    let stab = stabilizer_census(model)?;
    let mut seen: HashSet<Mat4> = HashSet::new();
    let mut out = Vec::new();
    for g in &group {
        for s in &stab {
            let prod = g.compose(s)?;
            if seen.insert(prod.mat.clone()) {
                out.push(prod);
            }
        }
    }
    sort_matrices(&mut out);
    if q <= 3 {
        let scanned = exhaustive_extended_scan(model)?;
        if scanned != out {
            return Err(Error::ConsistencyFailure(format!(
                "factored collineation census found {} matrices, exhaustive scan {}",
                out.len(),
                scanned.len()
            )));
        }
    }
    Ok(out)
}

/// Brute-force census of every surface-fixing matrix, feasible over GF(2)
/// and GF(3) only. Over GF(2) the scan covers all of GL_4 (2^16 candidate
/// matrices, scaling is trivial); over GF(3) it covers all 3^15 matrices
/// with corner entry 1, which suffices because a surface-fixing
/// collineation fixes the plane at infinity and therefore has a nonzero
/// corner entry. Candidates are vetted point by point with raw index
/// tables and an early exit, in parallel.
pub fn exhaustive_extended_scan(model: &SurfaceModel) -> Result<Vec<CayleyMatrix>> {
    let field = model.field().clone();
    let q = field.order().ok_or_else(|| Error::InfiniteField(field.name()))?;
    match q {
        2 => raw_scan(model, true),
        3 => raw_scan(model, false),
        _ => Err(Error::SearchSpaceTooLarge(format!(
            "exhaustive collineation scan over a field of order {q}"
        ))),
    }
}

fn raw_scan(model: &SurfaceModel, all_entries: bool) -> Result<Vec<CayleyMatrix>> {
    let field = model.field().clone();
    let q = field.order().expect("caller checked finiteness") as u32;
    let pts: Vec<[u8; 4]> = model
        .points()?
        .iter()
        .map(|p| {
            let c = p.coords();
            [c[0].idx(), c[1].idx(), c[2].idx(), c[3].idx()]
        })
        .collect();
    let free = if all_entries { 16 } else { 15 };
    let total = u64::from(q).pow(free);
    let (add, mul, neg, _) = field.raw_tables();
    let survivors: Vec<u64> = (0..total)
        .into_par_iter()
        .filter(|&code| {
            let m = decode_matrix(code, q, all_entries);
            maps_surface_into_surface(add, mul, neg, q as usize, &m, &pts)
        })
        .collect();
    let mut out = Vec::new();
    for code in survivors {
        let m = decode_matrix(code, q, all_entries);
        let entries = m.iter().map(|&i| FieldElement::from_idx(&field, i)).collect();
        let mat = Mat4::from_vec(entries)?;
        if !mat.is_invertible() {
            continue;
        }
        if !mat.get(0, 0).is_one() {
            return Err(Error::ConsistencyFailure(
                "a surface-fixing matrix does not fix the plane at infinity".into(),
            ));
        }
        out.push(CayleyMatrix::new(mat).expect("normalized and invertible"));
    }
    sort_matrices(&mut out);
    Ok(out)
}

fn decode_matrix(code: u64, q: u32, all_entries: bool) -> [u8; 16] {
    let mut m = [0u8; 16];
    let mut c = code;
    let start = if all_entries {
        0
    } else {
        // index 1 is the field element 1 in the canonical enumeration
        m[0] = 1;
        1
    };
    for slot in m.iter_mut().skip(start) {
        *slot = (c % u64::from(q)) as u8;
        c /= u64::from(q);
    }
    m
}

fn maps_surface_into_surface(
    add: &[u8],
    mul: &[u8],
    neg: &[u8],
    q: usize,
    m: &[u8; 16],
    pts: &[[u8; 4]],
) -> bool {
    let mu = |a: u8, b: u8| mul[a as usize * q + b as usize];
    let ad = |a: u8, b: u8| add[a as usize * q + b as usize];
    for p in pts {
        let mut y = [0u8; 4];
        for (r, slot) in y.iter_mut().enumerate() {
            let mut acc = 0u8;
            for (k, &pk) in p.iter().enumerate() {
                acc = ad(acc, mu(m[4 * r + k], pk));
            }
            *slot = acc;
        }
        if y == [0, 0, 0, 0] {
            // the candidate is singular and kills this point
            return false;
        }
        let t1 = mu(mu(y[0], y[1]), y[2]);
        let t2 = mu(mu(y[1], y[1]), y[1]);
        let t3 = mu(mu(y[0], y[0]), y[3]);
        let value = ad(t1, ad(neg[t2 as usize], neg[t3 as usize]));
        if value != 0 {
            return false;
        }
    }
    true
}

fn sort_matrices(v: &mut [CayleyMatrix]) {
    v.sort_by_cached_key(|m| m.mat.entry_strings());
}
