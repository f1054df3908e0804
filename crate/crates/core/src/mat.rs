//! Exact 4 x 4 matrices over a crate field, acting on PG(3, K): points map
//! by left multiplication of their coordinate column, planes by right
//! multiplication of their covector with the inverse.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg;
use crate::proj::{ProjPlane, ProjPoint};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat4 {
    entries: Vec<FieldElement>,
}

impl Mat4 {
    pub fn from_vec(entries: Vec<FieldElement>) -> Result<Mat4> {
        if entries.len() != 16 {
            return Err(Error::DegenerateInput(format!(
                "matrix needs 16 entries, got {}",
                entries.len()
            )));
        }
        let field = entries[0].field().clone();
        for e in &entries {
            if e.field() != &field {
                return Err(Error::MixedFields(field.name(), e.field().name()));
            }
        }
        Ok(Mat4 { entries })
    }

    pub fn from_rows(field: &Field, rows: [[i64; 4]; 4]) -> Mat4 {
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| field.from_int(x)))
            .collect();
        Mat4 { entries }
    }

    pub fn identity(field: &Field) -> Mat4 {
        let mut m = Mat4 { entries: vec![field.zero(); 16] };
        for i in 0..4 {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn field(&self) -> &Field {
        self.entries[0].field()
    }

    pub fn get(&self, row: usize, col: usize) -> &FieldElement {
        &self.entries[row * 4 + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: FieldElement) {
        self.entries[row * 4 + col] = value;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    /// Matrix product self * rhs.
    pub fn mul(&self, rhs: &Mat4) -> Mat4 {
        let field = self.field();
        let mut out = Mat4 { entries: vec![field.zero(); 16] };
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = field.zero();
                for k in 0..4 {
                    acc = &acc + &(self.get(i, k) * rhs.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Multiplies the matrix into a coordinate column.
    pub fn mul_col(&self, col: &[FieldElement; 4]) -> [FieldElement; 4] {
        let field = self.field();
        let mut out = [field.zero(), field.zero(), field.zero(), field.zero()];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = field.zero();
            for (k, c) in col.iter().enumerate() {
                acc = &acc + &(self.get(i, k) * c);
            }
            *slot = acc;
        }
        out
    }

    /// Image of a point under the collineation induced by this matrix.
    /// Fails only when the matrix is singular and kills the point.
    pub fn apply(&self, point: &ProjPoint) -> Result<ProjPoint> {
        ProjPoint::new(self.mul_col(point.coords()))
    }

    /// Image of a plane: the set {M x : a . x = 0} is V(a . M^-1 y).
    pub fn apply_to_plane(&self, plane: &ProjPlane) -> Result<ProjPlane> {
        let inv = self.inverse()?;
        let field = self.field();
        let mut cov = [field.zero(), field.zero(), field.zero(), field.zero()];
        for (j, slot) in cov.iter_mut().enumerate() {
            let mut acc = field.zero();
            for (i, a) in plane.covector().iter().enumerate() {
                acc = &acc + &(a * inv.get(i, j));
            }
            *slot = acc;
        }
        ProjPlane::new(cov)
    }

    pub fn det(&self) -> FieldElement {
        // Laplace expansion along the first row; exact and plenty fast at
        // this size.
        let field = self.field();
        let mut acc = field.zero();
        let mut sign = field.one();
        for j in 0..4 {
            let minor = self.minor(0, j);
            let term = &(self.get(0, j) * &minor) * &sign;
            acc = &acc + &term;
            sign = -sign;
        }
        acc
    }

    fn minor(&self, row: usize, col: usize) -> FieldElement {
        let rows: Vec<usize> = (0..4).filter(|&r| r != row).collect();
        let cols: Vec<usize> = (0..4).filter(|&c| c != col).collect();
        let e = |i: usize, j: usize| self.get(rows[i], cols[j]);
        let det2 = |a: &FieldElement, b: &FieldElement, c: &FieldElement, d: &FieldElement| {
            &(a * d) - &(b * c)
        };
        let m0 = det2(e(1, 1), e(1, 2), e(2, 1), e(2, 2));
        let m1 = det2(e(1, 0), e(1, 2), e(2, 0), e(2, 2));
        let m2 = det2(e(1, 0), e(1, 1), e(2, 0), e(2, 1));
        &(&(e(0, 0) * &m0) - &(e(0, 1) * &m1)) + &(e(0, 2) * &m2)
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn inverse(&self) -> Result<Mat4> {
        let field = self.field();
        // Gauss-Jordan on [self | I].
        let mut aug: Vec<Vec<FieldElement>> = (0..4)
            .map(|i| {
                let mut row: Vec<FieldElement> =
                    (0..4).map(|j| self.get(i, j).clone()).collect();
                for j in 0..4 {
                    row.push(if i == j { field.one() } else { field.zero() });
                }
                row
            })
            .collect();
        let order: Vec<usize> = (0..4).collect();
        let pivots = linalg::rref_with_order(&mut aug, &order);
        if pivots.len() != 4 {
            return Err(Error::SingularMatrix);
        }
        let entries = aug.into_iter().flat_map(|row| row[4..].to_vec()).collect();
        Ok(Mat4 { entries })
    }

    /// Scales every entry.
    pub fn scale(&self, factor: &FieldElement) -> Result<Mat4> {
        if factor.is_zero() {
            return Err(Error::ZeroScale);
        }
        Ok(Mat4 { entries: self.entries.iter().map(|e| e * factor).collect() })
    }

    /// Row-major entry strings, the serialization used in reports.
    pub fn entry_strings(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.to_string()).collect()
    }
}

impl fmt::Debug for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..4 {
            writeln!(
                f,
                "  [{}, {}, {}, {}]",
                self.get(i, 0),
                self.get(i, 1),
                self.get(i, 2),
                self.get(i, 3)
            )?;
        }
        write!(f, "]")
    }
}
