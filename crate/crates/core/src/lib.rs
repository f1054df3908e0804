//! Exact computational geometry for Cayley's ruled cubic surface
//! F = V(X0*X1*X2 - X1^3 - X0^2*X3) in PG(3, K), over small finite fields
//! GF(p^k) (k <= 3) and the rationals.
//!
//! The crate provides the scalar arithmetic, the projective incidence layer,
//! cubic-form algebra, the surface model with its generators and singular
//! locus, the collineation group of the surface with stabilizer and
//! extended-group censuses, the census of cubic forms with the same point
//! set, and the non-symmetric distance geometry the surface carries on its
//! affine points. Everything is exact; every counting claim is backed by
//! enumeration rather than floating-point heuristics.

pub mod error;
pub mod field;
pub(crate) mod linalg;
pub mod proj;
pub mod mat;
pub mod forms;
pub mod surface;
pub mod collineations;
pub mod census;
pub mod metric;

pub use error::{Error, Result};
pub use field::{ExtendedScalar, Field, FieldElement, FieldKind, FieldSpec, DEFAULT_MAX_ORDER};
