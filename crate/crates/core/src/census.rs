//! Census of the cubic forms whose zero set is exactly the surface.
//!
//! Whether a cubic form vanishes on a given point set is a linear condition
//! on its 20 coefficients, so the forms vanishing on all of F make up the
//! kernel of an evaluation matrix. The census enumerates that kernel and
//! keeps the forms that are nonzero at every point off the surface. The
//! outcome depends sharply on the field: over GF(2) there are 64 such
//! forms, over GF(3) two proportionality classes, and over every larger
//! field only the scalar multiples of the defining form itself.

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::forms::{CubicForm, MONOMIALS};
use crate::linalg;
use crate::proj::{enumerate_points, ProjPoint};
use crate::surface::SurfaceModel;

/// Upper bound on the field order for the exact census.
const CENSUS_MAX_ORDER: u64 = 9;

/// Basis of the space of cubic forms vanishing at every given point,
/// computed as the kernel of the |points| x 20 evaluation matrix. An empty
/// point set yields the full 20-dimensional space. Points must belong to
/// the given field.
pub fn vanishing_space(field: &Field, points: &[ProjPoint]) -> Vec<CubicForm> {
    let rows = evaluation_rows(points);
    linalg::kernel_basis(&rows, MONOMIALS.len(), field)
        .into_iter()
        .map(|coeffs| CubicForm::new(coeffs).expect("kernel vectors have 20 entries"))
        .collect()
}

fn evaluation_rows(points: &[ProjPoint]) -> Vec<Vec<FieldElement>> {
    points
        .iter()
        .map(|p| {
            let c = p.coords();
            MONOMIALS
                .iter()
                .map(|&(i, j, k)| &(&c[i] * &c[j]) * &c[k])
                .collect()
        })
        .collect()
}

/// Every nonzero cubic form whose zero set is exactly the surface, sorted
/// by coefficient tuples. Runs over fields of order at most 9.
pub fn exact_census(model: &SurfaceModel) -> Result<Vec<CubicForm>> {
    let field = model.field().clone();
    let q = field.order().ok_or_else(|| Error::InfiniteField(field.name()))?;
    if q > CENSUS_MAX_ORDER {
        return Err(Error::FieldTooLarge { order: q, bound: CENSUS_MAX_ORDER });
    }
    let basis = vanishing_space(&field, model.points()?);
    census_from_basis(model, &basis)
}

/// Enumerates the span of the given vanishing-space basis and keeps the
/// forms that are nonzero at every point off the surface.
fn census_from_basis(model: &SurfaceModel, basis: &[CubicForm]) -> Result<Vec<CubicForm>> {
    let field = model.field().clone();
    let q = field.order().expect("callers check finiteness");
    let dim = u32::try_from(basis.len()).expect("kernel dimension fits in u32");
    let combos = q
        .checked_pow(dim)
        .filter(|&n| n <= 5_000_000)
        .ok_or_else(|| {
            Error::SearchSpaceTooLarge(format!(
                "kernel of dimension {dim} over a field of order {q}"
            ))
        })?;
    let on_surface = model.point_set()?;
    let off_points: Vec<ProjPoint> = enumerate_points(&field)?
        .into_iter()
        .filter(|p| !on_surface.contains(p))
        .collect();
    let mut out = Vec::new();
    for code in 1..combos {
        let mut form = CubicForm::zero(&field);
        let mut c = code;
        for b in basis {
            let lambda = field.nth(c % q)?;
            c /= q;
            if !lambda.is_zero() {
                form = &form + &b.scale(&lambda);
            }
        }
        if off_points.iter().all(|p| !form.evaluate_point(p).is_zero()) {
            out.push(form);
        }
    }
    out.sort();
    Ok(out)
}

/// Groups forms into proportionality classes, preserving the order of
/// first appearance.
pub fn proportionality_classes(forms: &[CubicForm]) -> Vec<Vec<CubicForm>> {
    let mut classes: Vec<Vec<CubicForm>> = Vec::new();
    for form in forms {
        match classes.iter_mut().find(|c| c[0].proportional(form).is_some()) {
            Some(class) => class.push(form.clone()),
            None => classes.push(vec![form.clone()]),
        }
    }
    classes
}

/// The six cubic forms Xi^2 Xj + Xi Xj^2 over GF(2), each of which
/// vanishes at every vector of GF(2)^4. Adding their span to a defining
/// form reproduces the whole census.
pub fn tallini_zero_forms(field: &Field) -> Result<Vec<CubicForm>> {
    if field.order() != Some(2) {
        return Err(Error::UnsupportedField(format!(
            "the zero-form basis lives over GF(2) only, not {}",
            field.name()
        )));
    }
    let mut out = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            out.push(CubicForm::from_terms(field, &[(i, i, j, 1), (i, j, j, 1)]));
        }
    }
    Ok(out)
}

/// The alternative defining form over GF(2) or GF(3): a cubic that is not
/// proportional to the standard form yet has the same zero set. Over GF(2)
/// it arises from the involution N, over GF(3) from the matrices N_c.
pub fn alternate_defining_form(field: &Field) -> Result<CubicForm> {
    match field.order() {
        Some(2) => Ok(CubicForm::from_terms(
            field,
            &[(0, 1, 1, 1), (0, 1, 2, 1), (1, 1, 1, 1), (0, 0, 1, 1), (0, 0, 3, 1)],
        )),
        Some(3) => Ok(CubicForm::from_terms(
            field,
            &[(0, 1, 2, 2), (1, 1, 1, 2), (0, 0, 1, 2), (0, 0, 3, 1)],
        )),
        _ => Err(Error::UnsupportedField(format!(
            "no alternative defining form over {}",
            field.name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collineations::{extended_group_census, CayleyMatrix};
    use crate::forms::TaylorExpansion;
    use crate::proj::ProjPlane;
    use crate::surface::cayley_form;
    use std::collections::HashSet;

    fn gf(q: u64) -> Field {
        Field::gf(q).unwrap()
    }

    fn model(q: u64) -> SurfaceModel {
        SurfaceModel::new(&gf(q)).unwrap()
    }

    fn in_span(basis: &[CubicForm], form: &CubicForm) -> bool {
        let rows: Vec<Vec<FieldElement>> =
            basis.iter().map(|b| b.coeffs().to_vec()).collect();
        let mut extended = rows.clone();
        extended.push(form.coeffs().to_vec());
        linalg::rank(&rows) == linalg::rank(&extended)
    }

    #[test]
    fn vanishing_space_has_the_expected_members() {
        let f5 = gf(5);
        assert_eq!(vanishing_space(&f5, &[]).len(), 20);
        assert_eq!(vanishing_space(&Field::rationals(), &[]).len(), 20);

        let model5 = model(5);
        let basis5 = vanishing_space(&f5, model5.points().unwrap());
        assert!(in_span(&basis5, &cayley_form(&f5)));

        let f2 = gf(2);
        let model2 = model(2);
        let basis2 = vanishing_space(&f2, model2.points().unwrap());
        assert!(in_span(&basis2, &cayley_form(&f2)));
        assert!(in_span(&basis2, &alternate_defining_form(&f2).unwrap()));
        for b in &basis2 {
            for p in model2.points().unwrap() {
                assert!(b.evaluate_point(p).is_zero());
            }
        }
    }

    #[test]
    fn census_counts_match_the_trichotomy() {
        let census2 = exact_census(&model(2)).unwrap();
        assert_eq!(census2.len(), 64);

        let census3 = exact_census(&model(3)).unwrap();
        assert_eq!(census3.len(), 4);
        let classes3 = proportionality_classes(&census3);
        assert_eq!(classes3.len(), 2);
        let f3 = gf(3);
        let f = cayley_form(&f3);
        let alt = alternate_defining_form(&f3).unwrap();
        for c in f3.nonzero_elements().unwrap() {
            assert!(census3.contains(&f.scale(&c)));
            assert!(census3.contains(&alt.scale(&c)));
        }

        for q in [4u64, 5, 7, 8, 9] {
            let model = model(q);
            let field = model.field().clone();
            let census = exact_census(&model).unwrap();
            assert_eq!(census.len() as u64, q - 1);
            assert_eq!(proportionality_classes(&census).len(), 1);
            let f = cayley_form(&field);
            for c in field.nonzero_elements().unwrap() {
                assert!(census.contains(&f.scale(&c)));
            }
        }

        assert!(matches!(
            exact_census(&SurfaceModel::new(&gf(11)).unwrap()),
            Err(Error::FieldTooLarge { .. })
        ));
        assert!(matches!(
            exact_census(&SurfaceModel::new(&Field::rationals()).unwrap()),
            Err(Error::InfiniteField(_))
        ));
    }

    #[test]
    fn tallini_basis_spans_the_gf2_census() {
        let f2 = gf(2);
        let basis = tallini_zero_forms(&f2).unwrap();
        assert_eq!(basis.len(), 6);

        // each basis form vanishes at every nonzero vector of GF(2)^4
        for b in &basis {
            for p in enumerate_points(&f2).unwrap() {
                assert!(b.evaluate_point(&p).is_zero());
            }
        }

        // the form from the worked example: value 1 + 1 = 0 at (1,1,0,0)
        let x02x1 = CubicForm::from_terms(&f2, &[(0, 0, 1, 1), (0, 1, 1, 1)]);
        let v = [f2.one(), f2.one(), f2.zero(), f2.zero()];
        assert!(x02x1.evaluate(&v).is_zero());

        // the span has 2^6 = 64 distinct members, and f + span is the census
        let f = cayley_form(&f2);
        let mut translated = HashSet::new();
        for code in 0u32..64 {
            let mut form = f.clone();
            for (bit, b) in basis.iter().enumerate() {
                if code & (1 << bit) != 0 {
                    form = &form + b;
                }
            }
            translated.insert(form);
        }
        assert_eq!(translated.len(), 64);
        let census: HashSet<CubicForm> =
            exact_census(&model(2)).unwrap().into_iter().collect();
        assert_eq!(translated, census);

        assert!(matches!(tallini_zero_forms(&gf(3)), Err(Error::UnsupportedField(_))));
    }

    #[test]
    fn alternate_forms_arise_from_the_exceptional_collineations() {
        let f2 = gf(2);
        let n = CayleyMatrix::make_n(&f2).unwrap();
        assert_eq!(cayley_form(&f2).act(n.matrix()), alternate_defining_form(&f2).unwrap());

        let f3 = gf(3);
        let alt = alternate_defining_form(&f3).unwrap();
        for c in f3.nonzero_elements().unwrap() {
            let nc = CayleyMatrix::make_nc(&c).unwrap();
            assert_eq!(cayley_form(&f3).act(nc.matrix()), alt.scale(&c));
        }

        assert!(matches!(
            alternate_defining_form(&gf(4)),
            Err(Error::UnsupportedField(_))
        ));
    }

    #[test]
    fn census_is_closed_under_the_extended_group() {
        for q in [2u64, 3, 4] {
            let model = model(q);
            let census: HashSet<CubicForm> =
                exact_census(&model).unwrap().into_iter().collect();
            for m in extended_group_census(&model).unwrap() {
                for form in &census {
                    assert!(census.contains(&form.act(m.matrix())));
                }
            }
        }
    }

    #[test]
    fn gf3_defining_forms_differ_only_in_pointwise_tangent_planes() {
        let model3 = model(3);
        let f3 = gf(3);
        let f = cayley_form(&f3);
        let alt = alternate_defining_form(&f3).unwrap();

        // same zero set
        for p in enumerate_points(&f3).unwrap() {
            assert_eq!(f.evaluate_point(&p).is_zero(), alt.evaluate_point(&p).is_zero());
        }

        // multiplicity of a surface point with respect to a form: degree of
        // the lowest nonvanishing part of the shifted form
        let multiplicity = |g: &CubicForm, p: &ProjPoint| -> usize {
            let t: TaylorExpansion = g.taylor_shift(p.coords());
            assert!(t.constant.is_zero());
            if !t.linear.is_zero() {
                1
            } else if !t.quadratic.is_zero() {
                2
            } else {
                3
            }
        };

        let tangent_plane = |g: &CubicForm, p: &ProjPoint| -> ProjPlane {
            let grad = g.partials().map(|d| d.evaluate(p.coords()));
            ProjPlane::new(grad).unwrap()
        };

        let mut planes_f = HashSet::new();
        let mut planes_alt = HashSet::new();
        for p in model3.points().unwrap() {
            let m_f = multiplicity(&f, p);
            assert_eq!(m_f, multiplicity(&alt, p));
            if m_f == 1 {
                let pf = tangent_plane(&f, p);
                let pa = tangent_plane(&alt, p);
                // distinct planes at every simple point
                assert_ne!(pf, pa);
                planes_f.insert(pf);
                planes_alt.insert(pa);
            }
        }
        // yet the same set of tangent planes overall
        assert_eq!(planes_f, planes_alt);
    }

    #[test]
    fn census_does_not_depend_on_the_kernel_basis() {
        for q in [2u64, 3, 4] {
            let model = model(q);
            let field = model.field().clone();
            let rows = super::evaluation_rows(model.points().unwrap());
            let reversed: Vec<usize> = (0..MONOMIALS.len()).rev().collect();
            let alt_basis: Vec<CubicForm> =
                linalg::kernel_basis_with_order(&rows, MONOMIALS.len(), &field, &reversed)
                    .into_iter()
                    .map(|v| CubicForm::new(v).unwrap())
                    .collect();
            let from_alt = census_from_basis(&model, &alt_basis).unwrap();
            assert_eq!(from_alt, exact_census(&model).unwrap());
        }
    }

    #[test]
    fn no_surface_point_is_simple_for_the_squared_form() {
        // the gradient of f^2 is 2 f grad f, which vanishes wherever f does
        for q in [2u64, 3, 5] {
            let model = model(q);
            let f = cayley_form(model.field());
            let two = model.field().from_int(2);
            for p in model.points().unwrap() {
                let value = f.evaluate_point(p);
                for d in f.partials() {
                    let grad_of_square = &(&two * &value) * &d.evaluate(p.coords());
                    assert!(grad_of_square.is_zero());
                }
            }
        }
    }
}
