//! Homogeneous forms in the four plane coordinates X0..X3: cubics and
//! quadratics with exact coefficients, the substitution action of 4 x 4
//! matrices, Taylor expansion around a point, restriction to lines, and
//! univariate root extraction. Everything here is field-agnostic; geometric
//! meaning is layered on top by the surface module.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldKind};
use crate::linalg;
use crate::mat::Mat4;
use crate::proj::{ProjPlane, ProjPoint};

/// The 20 cubic monomials X_i X_j X_k with i <= j <= k, lexicographically
/// ordered. This fixed order defines coefficient vector positions everywhere.
pub const MONOMIALS: [(usize, usize, usize); 20] = [
    (0, 0, 0),
    (0, 0, 1),
    (0, 0, 2),
    (0, 0, 3),
    (0, 1, 1),
    (0, 1, 2),
    (0, 1, 3),
    (0, 2, 2),
    (0, 2, 3),
    (0, 3, 3),
    (1, 1, 1),
    (1, 1, 2),
    (1, 1, 3),
    (1, 2, 2),
    (1, 2, 3),
    (1, 3, 3),
    (2, 2, 2),
    (2, 2, 3),
    (2, 3, 3),
    (3, 3, 3),
];

/// The 10 quadratic monomials X_i X_j with i <= j, lexicographically ordered.
pub const QUAD_MONOMIALS: [(usize, usize); 10] =
    [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

/// Position of the monomial with exponents {i, j, k} in [`MONOMIALS`].
pub fn cubic_index(i: usize, j: usize, k: usize) -> usize {
    let mut e = [i, j, k];
    e.sort_unstable();
    MONOMIALS
        .iter()
        .position(|&m| m == (e[0], e[1], e[2]))
        .expect("variable index out of range")
}

/// Position of the monomial with exponents {i, j} in [`QUAD_MONOMIALS`].
pub fn quad_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    QUAD_MONOMIALS.iter().position(|&m| m == (a, b)).expect("variable index out of range")
}

/// A linear form a0 X0 + a1 X1 + a2 X2 + a3 X3.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinForm {
    coeffs: [FieldElement; 4],
}

impl LinForm {
    pub fn new(coeffs: [FieldElement; 4]) -> LinForm {
        LinForm { coeffs }
    }

    pub fn from_ints(field: &Field, coeffs: [i64; 4]) -> LinForm {
        LinForm { coeffs: coeffs.map(|c| field.from_int(c)) }
    }

    pub fn coeffs(&self) -> &[FieldElement; 4] {
        &self.coeffs
    }

    pub fn field(&self) -> &Field {
        self.coeffs[0].field()
    }

    pub fn evaluate(&self, x: &[FieldElement; 4]) -> FieldElement {
        let mut acc = self.field().zero();
        for (c, v) in self.coeffs.iter().zip(x.iter()) {
            acc = &acc + &(c * v);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The plane cut out by this form.
    pub fn to_plane(&self) -> Result<ProjPlane> {
        ProjPlane::new(self.coeffs.clone())
    }

    /// Some(lambda) with self = lambda * other, for nonzero other.
    pub fn proportional(&self, other: &LinForm) -> Option<FieldElement> {
        proportional_slices(&self.coeffs, &other.coeffs)
    }
}

/// A quadratic form, 10 coefficients in [`QUAD_MONOMIALS`] order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct QuadForm {
    coeffs: Vec<FieldElement>,
}

impl QuadForm {
    pub fn new(coeffs: Vec<FieldElement>) -> Result<QuadForm> {
        check_coeff_vector(&coeffs, 10)?;
        Ok(QuadForm { coeffs })
    }

    pub fn zero(field: &Field) -> QuadForm {
        QuadForm { coeffs: vec![field.zero(); 10] }
    }

    pub fn from_terms(field: &Field, terms: &[(usize, usize, i64)]) -> QuadForm {
        let mut coeffs = vec![field.zero(); 10];
        for &(i, j, c) in terms {
            let idx = quad_index(i, j);
            coeffs[idx] = &coeffs[idx] + &field.from_int(c);
        }
        QuadForm { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> &FieldElement {
        &self.coeffs[quad_index(i, j)]
    }

    pub fn field(&self) -> &Field {
        self.coeffs[0].field()
    }

    pub fn evaluate(&self, x: &[FieldElement; 4]) -> FieldElement {
        let mut acc = self.field().zero();
        for (c, &(i, j)) in self.coeffs.iter().zip(QUAD_MONOMIALS.iter()) {
            if !c.is_zero() {
                acc = &acc + &(&(c * &x[i]) * &x[j]);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Exact quotient self / l when l divides self. The quotient of a
    /// quadratic by a linear form is unique, so this is a linear solve over
    /// the quotient's four coefficients.
    pub fn divide_by_linear(&self, l: &LinForm) -> Option<LinForm> {
        let field = self.field();
        let mut rows: Vec<Vec<FieldElement>> = vec![vec![field.zero(); 4]; 10];
        for i in 0..4 {
            if l.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                let m = quad_index(i, j);
                rows[m][j] = &rows[m][j] + &l.coeffs[i];
            }
        }
        let sol = linalg::solve_linear(&rows, &self.coeffs, field)?;
        let quotient = LinForm::new([sol[0].clone(), sol[1].clone(), sol[2].clone(), sol[3].clone()]);
        // solve_linear only guarantees a least-squares-style consistency in
        // exact arithmetic when the system is solvable; re-verify.
        if &lin_times_lin(l, &quotient) == self {
            Some(quotient)
        } else {
            None
        }
    }

    pub fn proportional(&self, other: &QuadForm) -> Option<FieldElement> {
        proportional_slices(&self.coeffs, &other.coeffs)
    }
}

/// A cubic form, 20 coefficients in [`MONOMIALS`] order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubicForm {
    coeffs: Vec<FieldElement>,
}

impl CubicForm {
    pub fn new(coeffs: Vec<FieldElement>) -> Result<CubicForm> {
        check_coeff_vector(&coeffs, 20)?;
        Ok(CubicForm { coeffs })
    }

    pub fn zero(field: &Field) -> CubicForm {
        CubicForm { coeffs: vec![field.zero(); 20] }
    }

    pub fn from_terms(field: &Field, terms: &[(usize, usize, usize, i64)]) -> CubicForm {
        let mut coeffs = vec![field.zero(); 20];
        for &(i, j, k, c) in terms {
            let idx = cubic_index(i, j, k);
            coeffs[idx] = &coeffs[idx] + &field.from_int(c);
        }
        CubicForm { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> &FieldElement {
        &self.coeffs[cubic_index(i, j, k)]
    }

    pub fn field(&self) -> &Field {
        self.coeffs[0].field()
    }

    pub fn evaluate(&self, x: &[FieldElement; 4]) -> FieldElement {
        let mut acc = self.field().zero();
        for (c, &(i, j, k)) in self.coeffs.iter().zip(MONOMIALS.iter()) {
            if !c.is_zero() {
                acc = &acc + &(&(&(c * &x[i]) * &x[j]) * &x[k]);
            }
        }
        acc
    }

    pub fn evaluate_point(&self, p: &ProjPoint) -> FieldElement {
        self.evaluate(p.coords())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, factor: &FieldElement) -> CubicForm {
        CubicForm { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    /// Formal partial derivative with respect to X_v.
    pub fn partial(&self, v: usize) -> QuadForm {
        let field = self.field();
        let mut out = vec![field.zero(); 10];
        for (c, &(i, j, k)) in self.coeffs.iter().zip(MONOMIALS.iter()) {
            if c.is_zero() {
                continue;
            }
            let e = [i, j, k];
            // d/dX_v of X_i X_j X_k: one term per occurrence of v.
            for drop in 0..3 {
                if e[drop] != v {
                    continue;
                }
                let rest: Vec<usize> =
                    (0..3).filter(|&t| t != drop).map(|t| e[t]).collect();
                let idx = quad_index(rest[0], rest[1]);
                out[idx] = &out[idx] + c;
            }
        }
        QuadForm { coeffs: out }
    }

    pub fn partials(&self) -> [QuadForm; 4] {
        [self.partial(0), self.partial(1), self.partial(2), self.partial(3)]
    }

    /// Substitution action: (self . m)(x) = self(m x). Acting by a product
    /// composes left to right: (g . m) . m' = g . (m m').
    pub fn act(&self, m: &Mat4) -> CubicForm {
        let field = self.field();
        let rows: Vec<LinForm> = (0..4)
            .map(|r| {
                LinForm::new([
                    m.get(r, 0).clone(),
                    m.get(r, 1).clone(),
                    m.get(r, 2).clone(),
                    m.get(r, 3).clone(),
                ])
            })
            .collect();
        let mut out = CubicForm::zero(field);
        for (c, &(i, j, k)) in self.coeffs.iter().zip(MONOMIALS.iter()) {
            if c.is_zero() {
                continue;
            }
            let prod = quad_times_lin(&lin_times_lin(&rows[i], &rows[j]), &rows[k]);
            out = &out + &prod.scale(c);
        }
        out
    }

    /// Splits self(base + X) into homogeneous pieces of degree 0..3 in X.
    pub fn taylor_shift(&self, base: &[FieldElement; 4]) -> TaylorExpansion {
        let field = self.field();
        let mut constant = field.zero();
        let mut linear = [field.zero(), field.zero(), field.zero(), field.zero()];
        let mut quadratic = vec![field.zero(); 10];
        for (c, &(i, j, k)) in self.coeffs.iter().zip(MONOMIALS.iter()) {
            if c.is_zero() {
                continue;
            }
            let e = [i, j, k];
            // (b_i + x_i)(b_j + x_j)(b_k + x_k): pick base or variable from
            // each factor.
            constant = &constant + &(&(&(c * &base[i]) * &base[j]) * &base[k]);
            for keep in 0..3 {
                let rest: Vec<usize> =
                    (0..3).filter(|&t| t != keep).map(|t| e[t]).collect();
                let weight = &(c * &base[rest[0]]) * &base[rest[1]];
                linear[e[keep]] = &linear[e[keep]] + &weight;
            }
            for drop in 0..3 {
                let rest: Vec<usize> =
                    (0..3).filter(|&t| t != drop).map(|t| e[t]).collect();
                let idx = quad_index(rest[0], rest[1]);
                quadratic[idx] = &quadratic[idx] + &(c * &base[e[drop]]);
            }
        }
        TaylorExpansion {
            constant,
            linear: LinForm::new(linear),
            quadratic: QuadForm { coeffs: quadratic },
            cubic: self.clone(),
        }
    }

    /// Some(lambda) with self = lambda * other. Zero = lambda * zero reports
    /// lambda = 1.
    pub fn proportional(&self, other: &CubicForm) -> Option<FieldElement> {
        proportional_slices(&self.coeffs, &other.coeffs)
    }
}

impl Add for &CubicForm {
    type Output = CubicForm;
    fn add(self, rhs: &CubicForm) -> CubicForm {
        CubicForm {
            coeffs: self.coeffs.iter().zip(rhs.coeffs.iter()).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CubicForm {
    type Output = CubicForm;
    fn sub(self, rhs: &CubicForm) -> CubicForm {
        CubicForm {
            coeffs: self.coeffs.iter().zip(rhs.coeffs.iter()).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CubicForm {
    type Output = CubicForm;
    fn neg(self) -> CubicForm {
        CubicForm { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl fmt::Display for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (c, &(i, j, k)) in self.coeffs.iter().zip(MONOMIALS.iter()) {
            if c.is_zero() {
                continue;
            }
            let mono = monomial_string(&[i, j, k]);
            let (neg, mag) = display_magnitude(c);
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mag == "1" {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CubicForm({self})")
    }
}

/// Renders a coefficient as (is_negated, magnitude string). Only rational
/// values ever render with a leading minus; finite residues are canonical.
fn display_magnitude(c: &FieldElement) -> (bool, String) {
    let s = c.to_string();
    match s.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, s),
    }
}

fn monomial_string(vars: &[usize]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut run = 0;
    for v in 0..4 {
        let count = vars.iter().filter(|&&x| x == v).count();
        if count == 1 {
            parts.push(format!("X{v}"));
        } else if count > 1 {
            parts.push(format!("X{v}^{count}"));
        }
        run += count;
    }
    debug_assert_eq!(run, vars.len());
    parts.join("*")
}

/// The degree-graded pieces of f(base + X).
#[derive(Clone, Debug)]
pub struct TaylorExpansion {
    pub constant: FieldElement,
    pub linear: LinForm,
    pub quadratic: QuadForm,
    pub cubic: CubicForm,
}

/// Product of two linear forms.
pub fn lin_times_lin(a: &LinForm, b: &LinForm) -> QuadForm {
    let field = a.field();
    let mut out = vec![field.zero(); 10];
    for i in 0..4 {
        if a.coeffs[i].is_zero() {
            continue;
        }
        for j in 0..4 {
            if b.coeffs[j].is_zero() {
                continue;
            }
            let idx = quad_index(i, j);
            out[idx] = &out[idx] + &(&a.coeffs[i] * &b.coeffs[j]);
        }
    }
    QuadForm { coeffs: out }
}

/// Product of a quadratic and a linear form.
pub fn quad_times_lin(q: &QuadForm, l: &LinForm) -> CubicForm {
    let field = q.field();
    let mut out = vec![field.zero(); 20];
    for (c, &(i, j)) in q.coeffs.iter().zip(QUAD_MONOMIALS.iter()) {
        if c.is_zero() {
            continue;
        }
        for r in 0..4 {
            if l.coeffs[r].is_zero() {
                continue;
            }
            let idx = cubic_index(i, j, r);
            out[idx] = &out[idx] + &(c * &l.coeffs[r]);
        }
    }
    CubicForm { coeffs: out }
}

fn check_coeff_vector(coeffs: &[FieldElement], want: usize) -> Result<()> {
    if coeffs.len() != want {
        return Err(Error::DegenerateInput(format!(
            "coefficient vector needs {want} entries, got {}",
            coeffs.len()
        )));
    }
    let field = coeffs[0].field();
    for c in coeffs {
        if c.field() != field {
            return Err(Error::MixedFields(field.name(), c.field().name()));
        }
    }
    Ok(())
}

fn proportional_slices(a: &[FieldElement], b: &[FieldElement]) -> Option<FieldElement> {
    let field = a[0].field();
    let pivot = match b.iter().position(|c| !c.is_zero()) {
        Some(p) => p,
        None => {
            // other = 0: proportional only if self = 0 too.
            return if a.iter().all(|c| c.is_zero()) { Some(field.one()) } else { None };
        }
    };
    let lambda = a[pivot].div(&b[pivot]).expect("pivot is nonzero");
    for (x, y) in a.iter().zip(b.iter()) {
        if x != &(&lambda * y) {
            return None;
        }
    }
    Some(lambda)
}

/// Restriction of a cubic form to the parametrized line
/// T -> (1 - T) A + T B, using the canonical representatives of A and B.
/// The result is a univariate polynomial of degree at most 3.
pub fn restrict_to_line(g: &CubicForm, a: &ProjPoint, b: &ProjPoint) -> Result<UniPoly> {
    let field = g.field();
    if a.field() != field || b.field() != field {
        return Err(Error::MixedFields(field.name(), a.field().name()));
    }
    if a == b {
        return Err(Error::DegenerateInput(
            "line restriction needs two distinct points".into(),
        ));
    }
    // Coordinate i along the line is the degree-1 polynomial
    // a_i + (b_i - a_i) T.
    let lines: Vec<[FieldElement; 2]> = (0..4)
        .map(|i| {
            let ai = a.coords()[i].clone();
            let slope = &b.coords()[i] - &ai;
            [ai, slope]
        })
        .collect();
    let mut out = vec![field.zero(); 4];
    for (c, &(i, j, k)) in g.coeffs().iter().zip(MONOMIALS.iter()) {
        if c.is_zero() {
            continue;
        }
        // Convolve the three linear polynomials.
        let mut prod = vec![field.zero(); 4];
        for (di, pi) in lines[i].iter().enumerate() {
            for (dj, pj) in lines[j].iter().enumerate() {
                for (dk, pk) in lines[k].iter().enumerate() {
                    let d = di + dj + dk;
                    prod[d] = &prod[d] + &(&(pi * pj) * pk);
                }
            }
        }
        for d in 0..4 {
            out[d] = &out[d] + &(c * &prod[d]);
        }
    }
    Ok(UniPoly::new(field, out))
}

/// A dense univariate polynomial, coefficients ascending by degree. The zero
/// polynomial has an empty coefficient list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl UniPoly {
    pub fn new(field: &Field, mut coeffs: Vec<FieldElement>) -> UniPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { field: field.clone(), coeffs }
    }

    pub fn from_ints(field: &Field, coeffs: &[i64]) -> UniPoly {
        UniPoly::new(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn zero(field: &Field) -> UniPoly {
        UniPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> FieldElement {
        self.coeffs.get(d).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() { None } else { Some(self.coeffs.len() - 1) }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn evaluate(&self, t: &FieldElement) -> FieldElement {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    /// Synthetic division by (T - r); fails if r is not a root.
    pub fn divide_by_root(&self, r: &FieldElement) -> Result<UniPoly> {
        if self.is_zero() {
            return Err(Error::DegenerateInput("cannot deflate the zero polynomial".into()));
        }
        let n = self.coeffs.len() - 1;
        let mut quotient = vec![self.field.zero(); n.max(1)];
        let mut carry = self.field.zero();
        for d in (1..=n).rev() {
            carry = &(&carry * r) + &self.coeffs[d];
            quotient[d - 1] = carry.clone();
        }
        let remainder = &(&carry * r) + &self.coeffs[0];
        if !remainder.is_zero() {
            return Err(Error::DegenerateInput("deflation point is not a root".into()));
        }
        Ok(UniPoly::new(&self.field, quotient))
    }

    /// All roots in the coefficient field with multiplicities, sorted in the
    /// field's canonical element order. Finite fields are scanned; the
    /// rationals use exact deflation through a rational root search plus the
    /// quadratic formula.
    pub fn roots_with_multiplicity(&self) -> Result<Vec<(FieldElement, usize)>> {
        if self.is_zero() {
            return Err(Error::DegenerateInput(
                "the zero polynomial vanishes everywhere".into(),
            ));
        }
        let mut tally: BTreeMap<FieldElement, usize> = BTreeMap::new();
        match self.field.spec().kind() {
            FieldKind::Rational => {
                let mut work = self.clone();
                while let Some(deg) = work.degree() {
                    if deg == 0 {
                        break;
                    }
                    let root = match deg {
                        1 => {
                            let r = (-work.coeffs[0].clone()).div(&work.coeffs[1])?;
                            Some(r)
                        }
                        2 => work.any_rational_quadratic_root(),
                        _ => work.any_rational_root()?,
                    };
                    match root {
                        Some(r) => {
                            work = work.divide_by_root(&r)?;
                            *tally.entry(r).or_insert(0) += 1;
                        }
                        None => break,
                    }
                }
            }
            _ => {
                let mut work = self.clone();
                for e in self.field.elements()? {
                    while work.degree().is_some_and(|d| d >= 1) && work.evaluate(&e).is_zero()
                    {
                        work = work.divide_by_root(&e)?;
                        *tally.entry(e.clone()).or_insert(0) += 1;
                    }
                }
            }
        }
        Ok(tally.into_iter().collect())
    }

    /// A rational root of a quadratic, if one exists.
    fn any_rational_quadratic_root(&self) -> Option<FieldElement> {
        let c0 = &self.coeffs[0];
        let c1 = &self.coeffs[1];
        let c2 = &self.coeffs[2];
        let four = self.field.from_int(4);
        let disc = &(c1 * c1) - &(&(&four * c0) * c2);
        let sqrt = crate::field::square_roots(&disc).into_iter().next()?;
        let two_c2 = &self.field.from_int(2) * c2;
        Some((&(-c1.clone()) + &sqrt).div(&two_c2).expect("leading coefficient nonzero"))
    }

    /// A rational root found by the rational root theorem, or None when no
    /// rational root exists. Errors only if coefficients exceed the exact
    /// search range.
    fn any_rational_root(&self) -> Result<Option<FieldElement>> {
        // Clear denominators to a primitive integer polynomial.
        let rationals: Vec<BigRational> = self
            .coeffs
            .iter()
            .map(|c| c.rational_value().expect("rational field").clone())
            .collect();
        let mut denom_lcm = BigInt::from(1);
        for r in &rationals {
            denom_lcm = denom_lcm.lcm(r.denom());
        }
        let ints: Vec<BigInt> =
            rationals.iter().map(|r| (r * &denom_lcm).to_integer()).collect();
        if ints[0].is_zero() {
            return Ok(Some(self.field.zero()));
        }
        let trailing = ints[0].abs();
        let leading = ints.last().expect("nonzero degree").abs();
        let trailing = trailing.to_i128().ok_or_else(|| {
            Error::DegenerateInput("coefficients too large for exact root search".into())
        })?;
        let leading = leading.to_i128().ok_or_else(|| {
            Error::DegenerateInput("coefficients too large for exact root search".into())
        })?;
        for p in divisors(trailing) {
            for q in divisors(leading) {
                for sign in [1i128, -1] {
                    let cand = self
                        .field
                        .from_big_rational(BigRational::new((sign * p).into(), q.into()));
                    if self.evaluate(&cand).is_zero() {
                        return Ok(Some(cand));
                    }
                }
            }
        }
        Ok(None)
    }
}

fn divisors(n: i128) -> Vec<i128> {
    debug_assert!(n > 0);
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

// Ternary forms in three slack variables, used internally to restrict a
// quaternary cubic to a plane and split off a known linear factor.

pub(crate) const TERNARY_CUBIC_MONOMIALS: [(usize, usize, usize); 10] = [
    (0, 0, 0),
    (0, 0, 1),
    (0, 0, 2),
    (0, 1, 1),
    (0, 1, 2),
    (0, 2, 2),
    (1, 1, 1),
    (1, 1, 2),
    (1, 2, 2),
    (2, 2, 2),
];

pub(crate) const TERNARY_QUAD_MONOMIALS: [(usize, usize); 6] =
    [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn ternary_cubic_index(i: usize, j: usize, k: usize) -> usize {
    let mut e = [i, j, k];
    e.sort_unstable();
    TERNARY_CUBIC_MONOMIALS
        .iter()
        .position(|&m| m == (e[0], e[1], e[2]))
        .expect("ternary variable index out of range")
}

#[cfg(test)]
fn ternary_quad_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    TERNARY_QUAD_MONOMIALS
        .iter()
        .position(|&m| m == (a, b))
        .expect("ternary variable index out of range")
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct TernaryCubic {
    pub(crate) coeffs: Vec<FieldElement>,
}

impl TernaryCubic {
    pub(crate) fn field(&self) -> &Field {
        self.coeffs[0].field()
    }

    #[cfg(test)]
    pub(crate) fn evaluate(&self, z: &[FieldElement; 3]) -> FieldElement {
        let mut acc = self.field().zero();
        for (c, &(i, j, k)) in self.coeffs.iter().zip(TERNARY_CUBIC_MONOMIALS.iter()) {
            if !c.is_zero() {
                acc = &acc + &(&(&(c * &z[i]) * &z[j]) * &z[k]);
            }
        }
        acc
    }

    /// Exact quotient self / l for a ternary linear form l = (l0, l1, l2),
    /// or None when l does not divide self.
    pub(crate) fn divide_by_linear(&self, l: &[FieldElement; 3]) -> Option<TernaryQuad> {
        let field = self.field();
        let mut rows: Vec<Vec<FieldElement>> = vec![vec![field.zero(); 6]; 10];
        for i in 0..3 {
            if l[i].is_zero() {
                continue;
            }
            for (u, &(a, b)) in TERNARY_QUAD_MONOMIALS.iter().enumerate() {
                let m = ternary_cubic_index(i, a, b);
                rows[m][u] = &rows[m][u] + &l[i];
            }
        }
        let sol = linalg::solve_linear(&rows, &self.coeffs, field)?;
        let quad = TernaryQuad { coeffs: sol };
        if &ternary_quad_times_lin(&quad, l) == self {
            Some(quad)
        } else {
            None
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct TernaryQuad {
    pub(crate) coeffs: Vec<FieldElement>,
}

impl TernaryQuad {
    pub(crate) fn evaluate(&self, z: &[FieldElement; 3]) -> FieldElement {
        let mut acc = self.coeffs[0].field().zero();
        for (c, &(i, j)) in self.coeffs.iter().zip(TERNARY_QUAD_MONOMIALS.iter()) {
            if !c.is_zero() {
                acc = &acc + &(&(c * &z[i]) * &z[j]);
            }
        }
        acc
    }
}

fn ternary_quad_times_lin(q: &TernaryQuad, l: &[FieldElement; 3]) -> TernaryCubic {
    let field = q.coeffs[0].field();
    let mut out = vec![field.zero(); 10];
    for (c, &(i, j)) in q.coeffs.iter().zip(TERNARY_QUAD_MONOMIALS.iter()) {
        if c.is_zero() {
            continue;
        }
        for r in 0..3 {
            if l[r].is_zero() {
                continue;
            }
            let idx = ternary_cubic_index(i, j, r);
            out[idx] = &out[idx] + &(c * &l[r]);
        }
    }
    TernaryCubic { coeffs: out }
}

/// Pulls a quaternary cubic back along the plane parametrization
/// (z0, z1, z2) -> z0 b0 + z1 b1 + z2 b2.
pub(crate) fn restrict_to_plane_basis(
    g: &CubicForm,
    basis: &[[FieldElement; 4]; 3],
) -> TernaryCubic {
    let field = g.field();
    // Each ambient coordinate X_r pulls back to the ternary linear form
    // z0 b0[r] + z1 b1[r] + z2 b2[r].
    let pullback: Vec<[FieldElement; 3]> = (0..4)
        .map(|r| [basis[0][r].clone(), basis[1][r].clone(), basis[2][r].clone()])
        .collect();
    let mut out = vec![field.zero(); 10];
    for (c, &(i, j, k)) in g.coeffs().iter().zip(MONOMIALS.iter()) {
        if c.is_zero() {
            continue;
        }
        for (a, pa) in pullback[i].iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (b, pb) in pullback[j].iter().enumerate() {
                if pb.is_zero() {
                    continue;
                }
                for (d, pd) in pullback[k].iter().enumerate() {
                    if pd.is_zero() {
                        continue;
                    }
                    let idx = ternary_cubic_index(a, b, d);
                    out[idx] = &out[idx] + &(&(&(c * pa) * pb) * pd);
                }
            }
        }
    }
    TernaryCubic { coeffs: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cayley_like(field: &Field) -> CubicForm {
        CubicForm::from_terms(field, &[(0, 1, 2, 1), (1, 1, 1, -1), (0, 0, 3, -1)])
    }

    fn random_form(field: &Field, rng: &mut ChaCha8Rng) -> CubicForm {
        let elems = field.elements().unwrap();
        CubicForm::new(
            (0..20).map(|_| elems[rng.gen_range(0..elems.len())].clone()).collect(),
        )
        .unwrap()
    }

    fn random_vec4(field: &Field, rng: &mut ChaCha8Rng) -> [FieldElement; 4] {
        let elems = field.elements().unwrap();
        [
            elems[rng.gen_range(0..elems.len())].clone(),
            elems[rng.gen_range(0..elems.len())].clone(),
            elems[rng.gen_range(0..elems.len())].clone(),
            elems[rng.gen_range(0..elems.len())].clone(),
        ]
    }

    #[test]
    fn partial_derivatives_match_hand_expansion() {
        for field in [Field::rationals(), Field::gf(5).unwrap(), Field::gf(4).unwrap()] {
            let f = cayley_like(&field);
            let p = f.partials();
            assert_eq!(p[0], QuadForm::from_terms(&field, &[(1, 2, 1), (0, 3, -2)]));
            assert_eq!(p[1], QuadForm::from_terms(&field, &[(0, 2, 1), (1, 1, -3)]));
            assert_eq!(p[2], QuadForm::from_terms(&field, &[(0, 1, 1)]));
            assert_eq!(p[3], QuadForm::from_terms(&field, &[(0, 0, -1)]));
        }
    }

    #[test]
    fn euler_identity_holds_for_random_cubics_in_every_characteristic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for q in [2u64, 3, 4, 5, 9] {
            let field = Field::gf(q).unwrap();
            for _ in 0..20 {
                let g = random_form(&field, &mut rng);
                let mut sum = CubicForm::zero(&field);
                for v in 0..4 {
                    let mut unit = [
                        field.zero(),
                        field.zero(),
                        field.zero(),
                        field.zero(),
                    ];
                    unit[v] = field.one();
                    sum = &sum + &quad_times_lin(&g.partial(v), &LinForm::new(unit));
                }
                assert_eq!(sum, g.scale(&field.from_int(3)));
            }
        }
    }

    #[test]
    fn substitution_matches_pointwise_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for q in [3u64, 4, 5] {
            let field = Field::gf(q).unwrap();
            let elems = field.elements().unwrap();
            for _ in 0..20 {
                let g = random_form(&field, &mut rng);
                let m = Mat4::from_vec(
                    (0..16).map(|_| elems[rng.gen_range(0..elems.len())].clone()).collect(),
                )
                .unwrap();
                let acted = g.act(&m);
                for _ in 0..30 {
                    let x = random_vec4(&field, &mut rng);
                    assert_eq!(acted.evaluate(&x), g.evaluate(&m.mul_col(&x)));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn substitution_is_a_right_action(
            gc in prop::collection::vec(0u8..5, 20),
            m1 in prop::collection::vec(0u8..5, 16),
            m2 in prop::collection::vec(0u8..5, 16),
        ) {
            let field = Field::gf(5).unwrap();
            let nth = |v: &[u8]| -> Vec<FieldElement> {
                v.iter().map(|&i| field.nth(u64::from(i)).unwrap()).collect()
            };
            let g = CubicForm::new(nth(&gc)).unwrap();
            let a = Mat4::from_vec(nth(&m1)).unwrap();
            let b = Mat4::from_vec(nth(&m2)).unwrap();
            prop_assert_eq!(g.act(&a).act(&b), g.act(&a.mul(&b)));
        }

        #[test]
        fn taylor_pieces_sum_to_the_shifted_value(
            base in prop::collection::vec(0u8..7, 4),
            x in prop::collection::vec(0u8..7, 4),
            gc in prop::collection::vec(0u8..7, 20),
        ) {
            let field = Field::gf(7).unwrap();
            let nth = |i: u8| field.nth(u64::from(i)).unwrap();
            let g = CubicForm::new(gc.iter().map(|&i| nth(i)).collect()).unwrap();
            let b = [nth(base[0]), nth(base[1]), nth(base[2]), nth(base[3])];
            let v = [nth(x[0]), nth(x[1]), nth(x[2]), nth(x[3])];
            let t = g.taylor_shift(&b);
            let shifted = [
                &b[0] + &v[0],
                &b[1] + &v[1],
                &b[2] + &v[2],
                &b[3] + &v[3],
            ];
            let total = &(&(&t.constant + &t.linear.evaluate(&v))
                + &t.quadratic.evaluate(&v))
                + &t.cubic.evaluate(&v);
            prop_assert_eq!(g.evaluate(&shifted), total);
        }
    }

    #[test]
    fn scaling_matrix_multiplies_the_form_by_the_cube() {
        // Substituting (X0, cX1, c^2 X2, c^3 X3) into the reference cubic
        // scales every term by c^3.
        let field = Field::gf(5).unwrap();
        let f = cayley_like(&field);
        let c = field.from_int(2);
        let m = Mat4::from_rows(&field, [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 4, 0], [0, 0, 0, 3]]);
        let acted = f.act(&m);
        let lambda = acted.proportional(&f).expect("acted form stays proportional");
        assert_eq!(lambda, &(&c * &c) * &c);
        assert_eq!(lambda, field.from_int(3));
    }

    #[test]
    fn taylor_quadratic_parts_at_the_reference_infinity_points() {
        for field in [Field::rationals(), Field::gf(9).unwrap()] {
            let f = cayley_like(&field);
            let q2 = [field.zero(), field.zero(), field.one(), field.zero()];
            let t2 = f.taylor_shift(&q2);
            assert!(t2.constant.is_zero());
            assert!(t2.linear.is_zero());
            assert_eq!(t2.quadratic, QuadForm::from_terms(&field, &[(0, 1, 1)]));

            let q3 = [field.zero(), field.zero(), field.zero(), field.one()];
            let t3 = f.taylor_shift(&q3);
            assert!(t3.constant.is_zero());
            assert!(t3.linear.is_zero());
            assert_eq!(t3.quadratic, QuadForm::from_terms(&field, &[(0, 0, -1)]));
        }
    }

    #[test]
    fn restriction_along_the_first_axis_line_is_a_perfect_cube() {
        // Through (0:1:0:0) and (1:0:0:0) the points are (T : 1-T : 0 : 0),
        // so the reference cubic restricts to -(1-T)^3.
        for field in [Field::rationals(), Field::gf(7).unwrap()] {
            let f = cayley_like(&field);
            let a = ProjPoint::from_ints(&field, [0, 1, 0, 0]).unwrap();
            let b = ProjPoint::from_ints(&field, [1, 0, 0, 0]).unwrap();
            let r = restrict_to_line(&f, &a, &b).unwrap();
            assert_eq!(r, UniPoly::from_ints(&field, &[-1, 3, -3, 1]));
            let roots = r.roots_with_multiplicity().unwrap();
            assert_eq!(roots, vec![(field.one(), 3)]);
        }
    }

    #[test]
    fn restriction_agrees_with_direct_evaluation_at_every_parameter() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for q in [3u64, 8] {
            let field = Field::gf(q).unwrap();
            let points = crate::proj::enumerate_points(&field).unwrap();
            for _ in 0..25 {
                let g = random_form(&field, &mut rng);
                let a = &points[rng.gen_range(0..points.len())];
                let b = loop {
                    let b = &points[rng.gen_range(0..points.len())];
                    if b != a {
                        break b;
                    }
                };
                let r = restrict_to_line(&g, a, b).unwrap();
                for t in field.elements().unwrap() {
                    let one_minus = &field.one() - &t;
                    let coords = [
                        &(&one_minus * &a.coords()[0]) + &(&t * &b.coords()[0]),
                        &(&one_minus * &a.coords()[1]) + &(&t * &b.coords()[1]),
                        &(&one_minus * &a.coords()[2]) + &(&t * &b.coords()[2]),
                        &(&one_minus * &a.coords()[3]) + &(&t * &b.coords()[3]),
                    ];
                    assert_eq!(r.evaluate(&t), g.evaluate(&coords));
                }
            }
        }
    }

    #[test]
    fn root_extraction_matches_known_factorizations() {
        let gf5 = Field::gf(5).unwrap();
        // T^3 + 4T = T (T - 1) (T - 4) over GF(5).
        let p = UniPoly::from_ints(&gf5, &[0, 4, 0, 1]);
        assert_eq!(
            p.roots_with_multiplicity().unwrap(),
            vec![
                (gf5.from_int(0), 1),
                (gf5.from_int(1), 1),
                (gf5.from_int(4), 1)
            ]
        );

        let rat = Field::rationals();
        // (T - 2/3)^2 (T + 5) = T^3 + 11/3 T^2 - 56/9 T + 20/9.
        let p = UniPoly::new(
            &rat,
            vec![
                rat.rational(20, 9).unwrap(),
                rat.rational(-56, 9).unwrap(),
                rat.rational(11, 3).unwrap(),
                rat.one(),
            ],
        );
        assert_eq!(
            p.roots_with_multiplicity().unwrap(),
            vec![
                (rat.from_int(-5), 1),
                (rat.rational(2, 3).unwrap(), 2)
            ]
        );

        // T^2 - 2 has no rational root and no root in GF(5), but two in GF(7).
        assert_eq!(
            UniPoly::from_ints(&rat, &[-2, 0, 1]).roots_with_multiplicity().unwrap(),
            vec![]
        );
        assert_eq!(
            UniPoly::from_ints(&gf5, &[-2, 0, 1]).roots_with_multiplicity().unwrap(),
            vec![]
        );
        let gf7 = Field::gf(7).unwrap();
        assert_eq!(
            UniPoly::from_ints(&gf7, &[-2, 0, 1]).roots_with_multiplicity().unwrap(),
            vec![(gf7.from_int(3), 1), (gf7.from_int(4), 1)]
        );

        // The zero polynomial is rejected.
        assert!(UniPoly::zero(&gf5).roots_with_multiplicity().is_err());
    }

    #[test]
    fn quadratic_division_inverts_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let field = Field::gf(5).unwrap();
        let elems = field.elements().unwrap();
        let mut rand_lin = |rng: &mut ChaCha8Rng| {
            LinForm::new([
                elems[rng.gen_range(0..elems.len())].clone(),
                elems[rng.gen_range(0..elems.len())].clone(),
                elems[rng.gen_range(0..elems.len())].clone(),
                elems[rng.gen_range(0..elems.len())].clone(),
            ])
        };
        let mut tried = 0;
        while tried < 40 {
            let a = rand_lin(&mut rng);
            let b = rand_lin(&mut rng);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            tried += 1;
            let prod = lin_times_lin(&a, &b);
            let q = prod.divide_by_linear(&a).expect("constructed as a multiple");
            assert_eq!(lin_times_lin(&a, &q), prod);
        }
        // X0 X1 + X2 X3 is irreducible, so division by X0 fails.
        let q = QuadForm::from_terms(&field, &[(0, 1, 1), (2, 3, 1)]);
        let x0 = LinForm::from_ints(&field, [1, 0, 0, 0]);
        assert!(q.divide_by_linear(&x0).is_none());
    }

    #[test]
    fn ternary_restriction_to_the_x3_plane_splits_off_a_generator() {
        // On V(X3) with basis e0, e1, e2 the reference cubic becomes
        // z0 z1 z2 - z1^3 = z1 (z0 z2 - z1^2).
        let field = Field::rationals();
        let f = cayley_like(&field);
        let e = |i: usize| {
            let mut v = [field.zero(), field.zero(), field.zero(), field.zero()];
            v[i] = field.one();
            v
        };
        let restricted = restrict_to_plane_basis(&f, &[e(0), e(1), e(2)]);
        let z1 = [field.zero(), field.one(), field.zero()];
        let quad = restricted.divide_by_linear(&z1).expect("z1 is a factor");
        // Quotient z0 z2 - z1^2: coefficients at (0,2) and (1,1).
        let mut expected = vec![field.zero(); 6];
        expected[ternary_quad_index(0, 2)] = field.one();
        expected[ternary_quad_index(1, 1)] = -field.one();
        assert_eq!(quad.coeffs, expected);
        // A non-factor is rejected.
        let z0 = [field.one(), field.zero(), field.zero()];
        assert!(restricted.divide_by_linear(&z0).is_none());
    }

    #[test]
    fn proportionality_reports_the_exact_scalar() {
        let field = Field::gf(7).unwrap();
        let f = cayley_like(&field);
        let g = f.scale(&field.from_int(4));
        assert_eq!(g.proportional(&f), Some(field.from_int(4)));
        assert_eq!(f.proportional(&g), Some(field.from_int(2)));
        let zero = CubicForm::zero(&field);
        assert_eq!(zero.proportional(&zero), Some(field.one()));
        assert_eq!(zero.proportional(&f), Some(field.zero()));
        assert_eq!(f.proportional(&zero), None);
        let mut other = f.clone();
        other = &other + &CubicForm::from_terms(&field, &[(2, 2, 2, 1)]);
        assert_eq!(other.proportional(&f), None);
    }

    #[test]
    fn display_renders_the_reference_cubic_readably() {
        // Terms render in the fixed monomial order, X0^2*X3 first.
        let rat = Field::rationals();
        assert_eq!(cayley_like(&rat).to_string(), "-X0^2*X3 + X0*X1*X2 - X1^3");
        // Finite residues have no sign, so -1 shows as its representative.
        let gf5 = Field::gf(5).unwrap();
        assert_eq!(cayley_like(&gf5).to_string(), "4*X0^2*X3 + X0*X1*X2 + 4*X1^3");
        assert_eq!(CubicForm::zero(&rat).to_string(), "0");
    }
}
