//! The verification suites behind `cayley verify`.
//!
//! Every suite inspects one slice of the surface's geometry over one field
//! and reports pass, fail with expected-vs-actual, or skipped with a reason
//! when the field is incompatible (too small, wrong characteristic, or
//! infinite where enumeration is needed). Finite fields are checked
//! exhaustively; the rationals get fixed-seed sampling, which is sound
//! evidence because the identities under test are polynomial.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cayley_core::census::{
    alternate_defining_form, exact_census, proportionality_classes, tallini_zero_forms,
};
use cayley_core::collineations::{
    extended_group_census, group_elements, stabilizer_census, CayleyMatrix,
    FrobeniusCollineation,
};
use cayley_core::field::{square_roots, ExtendedScalar, Field, FieldElement};
use cayley_core::forms::{restrict_to_line, CubicForm};
use cayley_core::metric::{
    antiflags, brauner_delta, circle_points, circle_to_curve, collineation_table,
    curve_to_midpoints, delta, distance_pairs, distance_table, extended_circle,
    frobenius_table, induced_matrix, is_isometry, parallel_pair_transporters,
    rigidity_witness, Circle, MidpointResolution, RCurve,
};
use cayley_core::proj::{cross_ratio, enumerate_points, ProjLine, ProjPoint};
use cayley_core::surface::{cayley_form, GeneratorId, SurfaceModel, SurfacePosition};
use cayley_core::{Error, Result};

/// Registered suite names, in canonical order.
pub const SUITES: &[&str] = &[
    "surface-census",
    "generators",
    "singularities",
    "stabilizer",
    "extended-group",
    "form-census",
    "tallini",
    "metric-axioms",
    "circles",
    "group-actions",
    "rigidity",
    "frobenius",
];

/// Result of one suite over one field.
pub enum Outcome {
    Pass {
        expected: String,
        actual: String,
        artifact: Option<Vec<String>>,
    },
    Fail {
        expected: String,
        actual: String,
    },
    Skip {
        reason: String,
    },
}

fn skip(reason: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome::Skip { reason: reason.into() })
}

/// Collects violated claims; an empty list means the suite passed.
struct Checker {
    failures: Vec<String>,
}

impl Checker {
    fn new() -> Checker {
        Checker { failures: Vec::new() }
    }

    fn claim(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 8 {
            self.failures.push(what());
        }
    }

    fn finish(
        self,
        expected: String,
        actual: String,
        artifact: Option<Vec<String>>,
    ) -> Result<Outcome> {
        if self.failures.is_empty() {
            Ok(Outcome::Pass { expected, actual, artifact })
        } else {
            Ok(Outcome::Fail {
                expected,
                actual: format!("violations: {}", self.failures.join("; ")),
            })
        }
    }
}

/// Runs one registered suite, converting stray library errors to failures.
pub fn run_suite(suite: &str, field: &Field) -> Outcome {
    let result = match suite {
        "surface-census" => surface_census(field),
        "generators" => generators(field),
        "singularities" => singularities(field),
        "stabilizer" => stabilizer(field),
        "extended-group" => extended_group(field),
        "form-census" => form_census(field),
        "tallini" => tallini(field),
        "metric-axioms" => metric_axioms(field),
        "circles" => circles(field),
        "group-actions" => group_actions(field),
        "rigidity" => rigidity(field),
        "frobenius" => frobenius(field),
        other => panic!("unregistered suite {other}"),
    };
    result.unwrap_or_else(|e| Outcome::Fail {
        expected: "the suite to run to completion".into(),
        actual: format!("library error: {e}"),
    })
}

/// "" or "s" so counted nouns read naturally.
fn plural(n: u64) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

fn form_line(form: &CubicForm) -> String {
    form.coeffs()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn matrix_line(m: &CayleyMatrix) -> String {
    m.matrix().entry_strings().join(" ")
}

fn generator_label(id: &GeneratorId) -> String {
    match id {
        GeneratorId::Affine(s) => format!("g(1, {s})"),
        GeneratorId::Infinity => "g(0, 1)".to_string(),
    }
}

/// Evenly strided sample of up to `limit` indices into a slice of `len`.
fn strided(len: usize, limit: usize) -> Vec<usize> {
    if len <= limit {
        return (0..len).collect();
    }
    let step = len / limit;
    (0..limit).map(|i| i * step).collect()
}

fn sample_rational(field: &Field, rng: &mut ChaCha8Rng) -> FieldElement {
    let n = rng.gen_range(-9i64..=9);
    let d = rng.gen_range(1i64..=9);
    field.rational(n, d).expect("nonzero denominator")
}

fn surface_census(field: &Field) -> Result<Outcome> {
    let Some(q) = field.order() else {
        return skip("point counting needs a finite field");
    };
    let model = SurfaceModel::new(field)?;
    let want = q * q + q + 1;
    let total = model.points()?.len() as u64;
    let affine = model.affine_points()?.len() as u64;
    let infinity = model.infinity_points()?.len() as u64;
    // independent oracle: filter the whole ambient space by the form
    let rescan = enumerate_points(field)?
        .iter()
        .filter(|p| model.contains(p))
        .count() as u64;
    let mut c = Checker::new();
    c.claim(total == want, || format!("census lists {total} points, closed form {want}"));
    c.claim(affine == q * q, || format!("{affine} affine points, expected {}", q * q));
    c.claim(infinity == q + 1, || {
        format!("{infinity} points at infinity, expected {}", q + 1)
    });
    c.claim(rescan == want, || format!("ambient rescan found {rescan}, expected {want}"));
    c.finish(
        format!("{want} points = q^2+q+1 ({} affine + {} at infinity)", q * q, q + 1),
        format!(
            "{total} points ({affine} affine + {infinity} at infinity), \
             ambient rescan {rescan}"
        ),
        None,
    )
}

fn generators(field: &Field) -> Result<Outcome> {
    let Some(q) = field.order() else {
        return skip("the line scan enumerates a finite projective space");
    };
    let model = SurfaceModel::new(field)?;
    let lines = model.lines_contained_in_surface()?;
    let scanned: HashSet<ProjLine> = lines.iter().cloned().collect();
    let structured: HashSet<ProjLine> = model
        .generators()?
        .iter()
        .map(|g| g.line().clone())
        .collect();
    let corner = ProjPoint::unit(field, 3);
    let mut c = Checker::new();
    c.claim(lines.len() as u64 == q + 1, || {
        format!("scan found {} lines, expected {}", lines.len(), q + 1)
    });
    c.claim(scanned == structured, || {
        "scanned lines differ from the parametrized generators".to_string()
    });
    for p in model.infinity_points()? {
        let on = lines.iter().filter(|l| l.contains(p)).count();
        let want = if *p == corner { 1 } else { 2 };
        c.claim(on == want, || format!("{on} generators through {p}, expected {want}"));
    }
    let mut labels: Vec<String> = model
        .generators()?
        .iter()
        .map(|g| generator_label(g.id()))
        .collect();
    labels.sort();
    c.finish(
        format!("{} generator lines, each infinity point except the corner on 2", q + 1),
        format!(
            "{} lines from the exhaustive scan over all lines of PG(3,{q}), \
             matching the parametrized list",
            lines.len()
        ),
        Some(labels),
    )
}

fn singularities(field: &Field) -> Result<Outcome> {
    let model = SurfaceModel::new(field)?;
    let omega = model.omega();
    if let Some(q) = field.order() {
        let corner = ProjPoint::unit(field, 3);
        let mut c = Checker::new();
        let mut simple = 0u64;
        let mut double = 0u64;
        for p in model.points()? {
            match model.classify(p).position {
                SurfacePosition::SimpleAffine { tangent } => {
                    simple += 1;
                    c.claim(model.is_tangent_plane(&tangent), || {
                        format!("tangent plane at {p} fails the dual criterion")
                    });
                }
                SurfacePosition::DoubleAtInfinity { cone } => {
                    double += 1;
                    c.claim(cone[0] == omega, || {
                        format!("tangent cone at {p} misses the plane at infinity")
                    });
                    let want = if *p == corner { 1 } else { 2 };
                    c.claim(cone.len() == want, || {
                        format!("cone at {p} has {} components, expected {want}", cone.len())
                    });
                    for plane in &cone {
                        c.claim(model.is_tangent_plane(plane), || {
                            format!("cone component at {p} fails the dual criterion")
                        });
                    }
                }
                SurfacePosition::NotOnSurface => {
                    c.claim(false, || format!("surface point {p} classified off-surface"));
                }
            }
        }
        c.claim(simple == q * q, || format!("{simple} simple points, expected {}", q * q));
        c.claim(double == q + 1, || format!("{double} double points, expected {}", q + 1));

        // gradient oracle: the four partials vanish together exactly on the
        // double line, plus the nucleus line in characteristic 3
        let partials = model.form().partials();
        let mut nuclei = 0u64;
        for p in enumerate_points(field)? {
            let vanish = partials.iter().all(|g| g.evaluate(p.coords()).is_zero());
            let coords = p.coords();
            let on_double_line = coords[0].is_zero() && coords[1].is_zero();
            if model.is_nucleus(&p) {
                nuclei += 1;
            }
            c.claim(vanish == (on_double_line || model.is_nucleus(&p)), || {
                format!("gradient locus misclassifies {p}")
            });
        }
        let want_nuclei = if field.characteristic() == 3 { q + 1 } else { 0 };
        c.claim(nuclei == want_nuclei, || {
            format!("{nuclei} nuclei, expected {want_nuclei}")
        });
        c.finish(
            format!(
                "{} simple affine points, {} double points at infinity, {} nuclei",
                q * q,
                q + 1,
                want_nuclei
            ),
            format!(
                "{simple} simple + {double} double points; gradient locus matches \
                 on all {} ambient points; {nuclei} nuclei",
                (q * q + 1) * (q + 1)
            ),
            None,
        )
    } else {
        // rational field: sampled, exact arithmetic
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut c = Checker::new();
        let corner = ProjPoint::unit(field, 3);
        match model.classify(&corner).position {
            SurfacePosition::DoubleAtInfinity { cone } => {
                c.claim(cone.len() == 1 && cone[0] == omega, || {
                    "corner cone is not the doubled plane at infinity".to_string()
                });
            }
            _ => c.claim(false, || "corner point not recognized as double".to_string()),
        }
        for i in 0..3 {
            let p = ProjPoint::from_ints(field, [0, 0, 1, i])?;
            match model.classify(&p).position {
                SurfacePosition::DoubleAtInfinity { cone } => {
                    c.claim(cone.len() == 2 && cone[0] == omega, || {
                        format!("cone at {p} does not split into two planes")
                    });
                }
                _ => c.claim(false, || format!("infinity point {p} not double")),
            }
        }
        for _ in 0..40 {
            let u1 = sample_rational(field, &mut rng);
            let u2 = sample_rational(field, &mut rng);
            let p = model.param(&u1, &u2)?;
            match model.classify(&p).position {
                SurfacePosition::SimpleAffine { tangent } => {
                    c.claim(model.is_tangent_plane(&tangent), || {
                        format!("tangent plane at {p} fails the dual criterion")
                    });
                }
                _ => c.claim(false, || format!("affine point {p} not simple")),
            }
            c.claim(!model.is_nucleus(&p), || {
                "nucleus found in characteristic zero".to_string()
            });
        }
        c.finish(
            "simple affine points, a double line at infinity, no nuclei".to_string(),
            "sampled: 40 affine points simple, 4 infinity points double with split \
             cones, no nuclei (fixed seed)"
                .to_string(),
            None,
        )
    }
}

fn stabilizer(field: &Field) -> Result<Outcome> {
    let Some(q) = field.order() else {
        return skip("the stabilizer search enumerates a finite matrix space");
    };
    let model = SurfaceModel::new(field)?;
    let mut census = stabilizer_census(&model)?;
    let mut expected = match q {
        2 => vec![CayleyMatrix::identity(field), CayleyMatrix::make_n(field)?],
        3 => {
            let mut v = Vec::new();
            for cc in field.nonzero_elements()? {
                v.push(CayleyMatrix::make_m(&field.zero(), &field.zero(), &cc)?);
                v.push(CayleyMatrix::make_nc(&cc)?);
            }
            v
        }
        _ => field
            .nonzero_elements()?
            .into_iter()
            .map(|cc| CayleyMatrix::make_m(&field.zero(), &field.zero(), &cc))
            .collect::<Result<Vec<_>>>()?,
    };
    census.sort();
    expected.sort();
    let mut c = Checker::new();
    c.claim(census.len() == expected.len(), || {
        format!("{} matrices, expected {}", census.len(), expected.len())
    });
    c.claim(census == expected, || {
        "census disagrees with the theorem's matrix list".to_string()
    });
    let artifact = census.iter().map(matrix_line).collect();
    c.finish(
        format!(
            "{} matrices fixing the surface pointwise on the frame (the theorem's list)",
            expected.len()
        ),
        format!("{} matrices, matching entrywise", census.len()),
        Some(artifact),
    )
}

fn extended_group(field: &Field) -> Result<Outcome> {
    let Some(q) = field.order() else {
        return skip("the group census enumerates a finite matrix space");
    };
    let model = SurfaceModel::new(field)?;
    let census = match extended_group_census(&model) {
        Ok(census) => census,
        Err(Error::FieldTooLarge { order, bound }) => {
            return skip(format!(
                "the extended-group census is bounded to order {bound}, field has {order}"
            ));
        }
        Err(e) => return Err(e),
    };
    let stab = stabilizer_census(&model)?.len() as u64;
    let group = group_elements(field)?;
    let want = q * q * stab;
    let mut c = Checker::new();
    c.claim(census.len() as u64 == want, || {
        format!("{} matrices, expected q^2 * {stab} = {want}", census.len())
    });
    let census_set: HashSet<&CayleyMatrix> = census.iter().collect();
    c.claim(group.iter().all(|m| census_set.contains(m)), || {
        "the triangular group is not contained in the census".to_string()
    });
    if q == 2 {
        c.claim(census.len() == 8, || format!("{} matrices over GF(2)", census.len()));
    }
    if q == 3 {
        c.claim(census.len() == 36, || format!("{} matrices over GF(3)", census.len()));
    }
    let scan_note = if q <= 3 {
        "; agrees with the exhaustive matrix scan run inside the census"
    } else {
        ""
    };
    c.finish(
        format!("{want} = q^2 * {stab} normalized matrices fixing the surface"),
        format!(
            "{} matrices, containing the {} triangular ones{scan_note}",
            census.len(),
            group.len()
        ),
        None,
    )
}

fn form_census(field: &Field) -> Result<Outcome> {
    let Some(q) = field.order() else {
        return skip("the cubic-form census enumerates a finite coefficient space");
    };
    let model = SurfaceModel::new(field)?;
    let census = match exact_census(&model) {
        Ok(census) => census,
        Err(Error::FieldTooLarge { order, bound }) => {
            return skip(format!(
                "the form census is bounded to order {bound}, field has {order}"
            ));
        }
        Err(e) => return Err(e),
    };
    let classes = proportionality_classes(&census);
    let (want_forms, want_classes) = match q {
        2 => (64, 64),
        3 => (4, 2),
        _ => (q as usize - 1, 1),
    };
    let f = cayley_form(field);
    let mut c = Checker::new();
    c.claim(census.len() == want_forms, || {
        format!("{} forms, expected {want_forms}", census.len())
    });
    c.claim(classes.len() == want_classes, || {
        format!("{} proportionality classes, expected {want_classes}", classes.len())
    });
    c.claim(census.contains(&f), || {
        "the defining form is missing from its own census".to_string()
    });
    if q == 3 {
        let alternate = alternate_defining_form(field)?;
        c.claim(census.contains(&alternate), || {
            "the second defining form is missing over GF(3)".to_string()
        });
    }
    let artifact = if census.len() <= 64 {
        Some(census.iter().map(form_line).collect())
    } else {
        None
    };
    c.finish(
        format!(
            "{want_forms} forms in {want_classes} proportionality class{}",
            plural(want_classes as u64)
        ),
        format!(
            "{} forms with the same zero set, in {} class{}",
            census.len(),
            classes.len(),
            plural(classes.len() as u64)
        ),
        artifact,
    )
}

fn tallini(field: &Field) -> Result<Outcome> {
    if field.order() != Some(2) {
        return skip("the zero-form decomposition is specific to GF(2)");
    }
    let model = SurfaceModel::new(field)?;
    let basis = tallini_zero_forms(field)?;
    let mut c = Checker::new();
    c.claim(basis.len() == 6, || format!("{} basis forms, expected 6", basis.len()));
    let points = enumerate_points(field)?;
    for b in &basis {
        c.claim(points.iter().all(|p| b.evaluate_point(p).is_zero()), || {
            "a basis form does not vanish on all of PG(3,2)".to_string()
        });
    }
    // the census is exactly the coset f + span(basis)
    let f = cayley_form(field);
    let mut coset = HashSet::new();
    for mask in 0..64u32 {
        let mut g = f.clone();
        for (i, b) in basis.iter().enumerate() {
            if mask & (1 << i) != 0 {
                g = &g + b;
            }
        }
        coset.insert(g);
    }
    c.claim(coset.len() == 64, || {
        format!("coset has {} distinct forms, expected 64", coset.len())
    });
    let census: HashSet<CubicForm> = exact_census(&model)?.into_iter().collect();
    c.claim(census == coset, || {
        "census differs from the translate of the zero-form span".to_string()
    });
    let artifact = basis.iter().map(form_line).collect();
    c.finish(
        "64 forms = the defining form plus the 2^6 sums of vanishing forms".to_string(),
        format!("{} census forms equal to the coset of the 6-form span", census.len()),
        Some(artifact),
    )
}

fn metric_axioms(field: &Field) -> Result<Outcome> {
    match field.order() {
        Some(q) if q < 4 => skip("the distance needs at least four field elements"),
        Some(q) => {
            let model = SurfaceModel::new(field)?;
            let one = field.one();
            let f = cayley_form(field);
            let affine = model.affine_points()?;
            let tangents: Vec<_> = affine
                .iter()
                .map(|p| model.tangent_plane(p))
                .collect::<Result<_>>()?;
            let mut c = Checker::new();
            let mut chords = 0u64;
            for (i, a) in affine.iter().enumerate() {
                c.claim(delta(&model, a, a)? == ExtendedScalar::Infinity, || {
                    format!("self-distance at {a} is finite")
                });
                for (j, b) in affine.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let ab = delta(&model, a, b)?;
                    let ba = delta(&model, b, a)?;
                    match (&ab, &ba) {
                        (ExtendedScalar::Infinity, ExtendedScalar::Infinity) => continue,
                        (ExtendedScalar::Finite(x), ExtendedScalar::Finite(y)) => {
                            c.claim(*x == &one - y, || {
                                format!("antisymmetry fails at ({a}, {b})")
                            });
                        }
                        _ => c.claim(false, || {
                            format!("parallelism is not symmetric at ({a}, {b})")
                        }),
                    }
                    let d = match ab {
                        ExtendedScalar::Finite(d) => d,
                        ExtendedScalar::Infinity => continue,
                    };
                    // tangency convention: distance 0 and 1 mark the two
                    // tangent planes through the chord
                    c.claim(d.is_zero() == tangents[i].contains(b), || {
                        format!("distance-0 tangency fails at ({a}, {b})")
                    });
                    c.claim(d.is_one() == tangents[j].contains(a), || {
                        format!("distance-1 tangency fails at ({a}, {b})")
                    });
                    // the chord cubic vanishes at the distance
                    let chord = restrict_to_line(&f, a, b)?;
                    c.claim(chord.evaluate(&d).is_zero(), || {
                        format!("chord polynomial misses the distance at ({a}, {b})")
                    });
                    if d.is_zero() || d.is_one() {
                        continue;
                    }
                    chords += 1;
                    let third = lerp(a, b, &d)?;
                    let infinity = direction_point(a, b)?;
                    c.claim(
                        cross_ratio(&third, b, a, &infinity)?
                            == ExtendedScalar::Finite(d.clone()),
                        || format!("cross ratio disagrees at ({a}, {b})"),
                    );
                }
            }
            c.claim(chords > 0, || "no three-point chords found".to_string());
            c.finish(
                "self-distance inf, delta(A,B) = 1 - delta(B,A), tangency at 0 and 1, \
                 cross-ratio agreement on three-point chords"
                    .to_string(),
                format!(
                    "verified on all {} ordered pairs over GF({q}) \
                     ({chords} three-point chords)",
                    affine.len() * affine.len()
                ),
                None,
            )
        }
        None => {
            let model = SurfaceModel::new(field)?;
            let one = field.one();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut c = Checker::new();
            let mut pairs = 0u64;
            let mut chords = 0u64;
            for _ in 0..120 {
                let u1 = sample_rational(field, &mut rng);
                let u2 = sample_rational(field, &mut rng);
                let a = model.param(&u1, &u2)?;
                c.claim(delta(&model, &a, &a)? == ExtendedScalar::Infinity, || {
                    format!("self-distance at {a} is finite")
                });
                // one parallel partner, one generic partner
                let shift = sample_rational(field, &mut rng);
                if !shift.is_zero() {
                    let b = model.param(&u1, &(&u2 + &shift))?;
                    c.claim(delta(&model, &a, &b)? == ExtendedScalar::Infinity, || {
                        format!("parallel pair ({a}, {b}) has finite distance")
                    });
                }
                let v1 = sample_rational(field, &mut rng);
                let v2 = sample_rational(field, &mut rng);
                if v1 == u1 {
                    continue;
                }
                // a partner placed in the tangent plane of the first point
                let tangent_v2 = &(&(&u1 * &v1) + &(&v1 * &v1))
                    - &(&(&field.from_int(2) * &(&u1 * &u1)) - &u2);
                let t = model.param(&v1, &tangent_v2)?;
                c.claim(
                    delta(&model, &a, &t)? == ExtendedScalar::Finite(field.zero()),
                    || format!("constructed tangent pair ({a}, {t}) misses distance 0"),
                );
                c.claim(model.tangent_plane(&a)?.contains(&t), || {
                    format!("distance-0 partner {t} escapes the tangent plane at {a}")
                });
                let b = model.param(&v1, &v2)?;
                pairs += 1;
                let d = match delta(&model, &a, &b)? {
                    ExtendedScalar::Finite(d) => d,
                    ExtendedScalar::Infinity => {
                        c.claim(false, || format!("non-parallel pair ({a}, {b}) infinite"));
                        continue;
                    }
                };
                match delta(&model, &b, &a)? {
                    ExtendedScalar::Finite(back) => {
                        c.claim(back == &one - &d, || {
                            format!("antisymmetry fails at ({a}, {b})")
                        });
                    }
                    ExtendedScalar::Infinity => {
                        c.claim(false, || format!("reverse of ({a}, {b}) infinite"))
                    }
                }
                c.claim(
                    d.is_zero() == model.tangent_plane(&a)?.contains(&b),
                    || format!("distance-0 tangency fails at ({a}, {b})"),
                );
                c.claim(
                    d.is_one() == model.tangent_plane(&b)?.contains(&a),
                    || format!("distance-1 tangency fails at ({a}, {b})"),
                );
                if !d.is_zero() && !d.is_one() {
                    chords += 1;
                    let third = lerp(&a, &b, &d)?;
                    let infinity = direction_point(&a, &b)?;
                    c.claim(
                        cross_ratio(&third, &b, &a, &infinity)?
                            == ExtendedScalar::Finite(d.clone()),
                        || format!("cross ratio disagrees at ({a}, {b})"),
                    );
                }
                // the renormalized distance flips sign under reversal; both
                // sides are infinite exactly at the midpoint value 1/2
                match (brauner_delta(&model, &a, &b)?, brauner_delta(&model, &b, &a)?) {
                    (ExtendedScalar::Finite(x), ExtendedScalar::Finite(y)) => {
                        c.claim(x == -&y, || {
                            format!("renormalized antisymmetry fails at ({a}, {b})")
                        });
                    }
                    (ExtendedScalar::Infinity, ExtendedScalar::Infinity) => {
                        c.claim(d == field.rational(1, 2)?, || {
                            format!("renormalized distance diverges off 1/2 at ({a}, {b})")
                        });
                    }
                    _ => c.claim(false, || {
                        format!("renormalized reversal changes finiteness at ({a}, {b})")
                    }),
                }
            }
            c.claim(chords > 10, || "too few three-point chords sampled".to_string());
            c.finish(
                "self-distance inf, antisymmetry, tangency at 0 and 1, cross-ratio \
                 agreement (sampled)"
                    .to_string(),
                format!(
                    "verified on {pairs} sampled non-parallel pairs with exact rational \
                     arithmetic ({chords} three-point chords, fixed seed)"
                ),
                None,
            )
        }
    }
}

/// (1-t) a + t b as a projective point.
fn lerp(a: &ProjPoint, b: &ProjPoint, t: &FieldElement) -> Result<ProjPoint> {
    let field = t.field();
    let s = &field.one() - t;
    let ac = a.coords();
    let bc = b.coords();
    ProjPoint::new([
        &(&s * &ac[0]) + &(t * &bc[0]),
        &(&s * &ac[1]) + &(t * &bc[1]),
        &(&s * &ac[2]) + &(t * &bc[2]),
        &(&s * &ac[3]) + &(t * &bc[3]),
    ])
}

/// The point where the chord through two affine points meets the plane at
/// infinity; both arguments must be normalized with first coordinate 1.
fn direction_point(a: &ProjPoint, b: &ProjPoint) -> Result<ProjPoint> {
    let ac = a.coords();
    let bc = b.coords();
    ProjPoint::new([
        &bc[0] - &ac[0],
        &bc[1] - &ac[1],
        &bc[2] - &ac[2],
        &bc[3] - &ac[3],
    ])
}

fn circles(field: &Field) -> Result<Outcome> {
    match field.order() {
        Some(q) if q < 4 => skip("circles need at least four field elements"),
        Some(q) => {
            let model = SurfaceModel::new(field)?;
            let two = field.from_int(2);
            let mut c = Checker::new();
            let mut finite_circles = 0u64;
            for a in model.affine_points()? {
                for rho in field.elements()? {
                    let circle =
                        Circle::new(&model, a.clone(), ExtendedScalar::Finite(rho.clone()))?;
                    finite_circles += 1;
                    let size = circle_points(&model, &circle)?.len() as u64;
                    c.claim(size == q - 1, || {
                        format!("circle around {a} with radius {rho} has {size} points")
                    });
                    let curve = circle_to_curve(&model, &circle)?;
                    if (&field.one() - &(&two * &rho)).is_zero() {
                        continue;
                    }
                    match curve_to_midpoints(&model, &curve)? {
                        MidpointResolution::UniqueMidpoint(back) => {
                            c.claim(back == circle, || {
                                format!("round trip moved the circle around {a}")
                            });
                        }
                        _ => c.claim(false, || {
                            format!("round trip lost the circle around {a}")
                        }),
                    }
                }
                // infinite radius: the affine part of the generator
                let circle = Circle::new(&model, a.clone(), ExtendedScalar::Infinity)?;
                let points = circle_points(&model, &circle)?;
                let generator = model.generator_through(a)?;
                c.claim(points.len() as u64 == q, || {
                    format!("generator circle around {a} has {} points", points.len())
                });
                c.claim(points.iter().all(|p| generator.line().contains(p)), || {
                    format!("generator circle around {a} leaves its generator")
                });
            }

            // curve trichotomy, exhaustively over all q^3 curves
            let mut unique = 0u64;
            let mut non_circles = 0u64;
            let mut every_point = 0u64;
            for alpha in field.elements()? {
                for beta in field.elements()? {
                    for gamma in field.elements()? {
                        let curve = RCurve::new(alpha.clone(), beta.clone(), gamma.clone());
                        let disc_zero = (&field.one() - &(&two * &gamma)).is_zero();
                        match curve_to_midpoints(&model, &curve)? {
                            MidpointResolution::UniqueMidpoint(circle) => {
                                unique += 1;
                                c.claim(!disc_zero, || "midpoint despite 1-2g = 0".into());
                                c.claim(circle_to_curve(&model, &circle)? == curve, || {
                                    "curve round trip failed".to_string()
                                });
                            }
                            MidpointResolution::NotACircle => {
                                non_circles += 1;
                                c.claim(disc_zero && !beta.is_zero(), || {
                                    "non-circle outside the degenerate case".to_string()
                                });
                            }
                            MidpointResolution::EveryPointIsMidpoint { radius } => {
                                every_point += 1;
                                c.claim(disc_zero && beta.is_zero(), || {
                                    "every-point case outside the degenerate case".to_string()
                                });
                                c.claim(radius == gamma, || {
                                    "every-point radius is not the curve parameter".to_string()
                                });
                                let curve_points: HashSet<ProjPoint> =
                                    curve.affine_points()?.into_iter().collect();
                                for m in &curve_points {
                                    let circle = Circle::new(
                                        &model,
                                        m.clone(),
                                        ExtendedScalar::Finite(radius.clone()),
                                    )?;
                                    let ext: HashSet<ProjPoint> = extended_circle(&model, &circle)?
                                        .into_iter()
                                        .collect();
                                    c.claim(ext == curve_points, || {
                                        format!("{m} is not a midpoint of its curve")
                                    });
                                }
                            }
                        }
                    }
                }
            }
            if field.characteristic() == 2 {
                c.claim(unique == q * q * q, || {
                    "characteristic 2 admits a degenerate curve".to_string()
                });
            } else {
                c.claim(every_point == q, || {
                    format!("{every_point} every-point curves, expected {q}")
                });
                c.claim(non_circles == q * (q - 1), || {
                    format!("{non_circles} non-circles, expected {}", q * (q - 1))
                });
            }
            c.finish(
                format!(
                    "q-1 points per finite circle, inverse conversions, and the \
                     char-{} degeneracy pattern",
                    field.characteristic()
                ),
                format!(
                    "{finite_circles} circles of q-1 = {} points; {unique} curves with a \
                     unique midpoint, {non_circles} non-circles, {every_point} with every \
                     point a midpoint",
                    q - 1
                ),
                None,
            )
        }
        None => {
            let model = SurfaceModel::new(field)?;
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            let half = field.rational(1, 2)?;
            let mut c = Checker::new();
            for _ in 0..60 {
                let a1 = sample_rational(field, &mut rng);
                let a2 = sample_rational(field, &mut rng);
                let midpoint = model.param(&a1, &a2)?;
                let mut rho = sample_rational(field, &mut rng);
                if rho == half {
                    rho = field.zero();
                }
                let circle =
                    Circle::new(&model, midpoint.clone(), ExtendedScalar::Finite(rho.clone()))?;
                let curve = circle_to_curve(&model, &circle)?;
                // pointwise membership: every curve point off the midpoint
                // parameter lies at distance rho
                for _ in 0..4 {
                    let t = sample_rational(field, &mut rng);
                    if t == a1 {
                        continue;
                    }
                    let p = curve.affine_point(&t);
                    c.claim(
                        delta(&model, &midpoint, &p)? == ExtendedScalar::Finite(rho.clone()),
                        || format!("curve point at t = {t} misses radius {rho}"),
                    );
                }
                match curve_to_midpoints(&model, &curve)? {
                    MidpointResolution::UniqueMidpoint(back) => {
                        c.claim(back == circle, || "round trip moved the circle".to_string());
                    }
                    _ => c.claim(false, || "round trip lost the circle".to_string()),
                }
            }
            // the degenerate discriminant cases at gamma = 1/2
            let beta_zero = RCurve::new(sample_rational(field, &mut rng), field.zero(), half.clone());
            match curve_to_midpoints(&model, &beta_zero)? {
                MidpointResolution::EveryPointIsMidpoint { radius } => {
                    c.claim(radius == half, || "every-point radius is not 1/2".to_string());
                }
                _ => c.claim(false, || "gamma = 1/2, beta = 0 curve misclassified".into()),
            }
            let skewed = RCurve::new(
                sample_rational(field, &mut rng),
                field.one(),
                half.clone(),
            );
            c.claim(
                matches!(curve_to_midpoints(&model, &skewed)?, MidpointResolution::NotACircle),
                || "gamma = 1/2, beta = 1 curve misclassified".to_string(),
            );
            c.finish(
                "circle points at the right distance, inverse conversions, degenerate \
                 cases at gamma = 1/2 (sampled)"
                    .to_string(),
                "verified on 60 sampled circles with exact rational arithmetic \
                 (fixed seed)"
                    .to_string(),
                None,
            )
        }
    }
}

fn group_actions(field: &Field) -> Result<Outcome> {
    let Some(q) = field.order() else {
        return skip("orbit counting needs a finite field");
    };
    if q < 4 {
        return skip("the regular actions are stated for at least four field elements");
    }
    let model = SurfaceModel::new(field)?;
    let group = group_elements(field)?;
    let want = q * q * (q - 1);
    let mut c = Checker::new();
    c.claim(group.len() as u64 == want, || {
        format!("group order {}, expected {want}", group.len())
    });

    // antiflags: the orbit map from each sampled base is a bijection
    let flags = antiflags(&model)?;
    c.claim(flags.len() as u64 == want, || {
        format!("{} antiflags, expected {want}", flags.len())
    });
    let flag_keys: HashSet<(ProjPoint, ProjLine)> = flags
        .iter()
        .map(|a| (a.point().clone(), a.generator().line().clone()))
        .collect();
    let base_count = if q <= 5 { flags.len() } else { 12 };
    for idx in strided(flags.len(), base_count) {
        let base = &flags[idx];
        let mut images = HashSet::new();
        for m in &group {
            let point = m.apply(base.point())?;
            let rows = base.generator().line().rows();
            let r0 = m.apply(&ProjPoint::new(rows[0].clone())?)?;
            let r1 = m.apply(&ProjPoint::new(rows[1].clone())?)?;
            images.insert((point, ProjLine::through(&r0, &r1)?));
        }
        c.claim(images == flag_keys, || {
            "an antiflag orbit map is not a bijection".to_string()
        });
    }

    // pairs at each finite distance
    let mut pair_checks = 0u64;
    for d in field.elements()? {
        let pairs = distance_pairs(&model, &d)?;
        c.claim(pairs.len() as u64 == want, || {
            format!("{} pairs at distance {d}, expected {want}", pairs.len())
        });
        let pair_keys: HashSet<(ProjPoint, ProjPoint)> = pairs.iter().cloned().collect();
        let base_count = if q <= 5 { pairs.len() } else { 2 };
        for idx in strided(pairs.len(), base_count) {
            let base = &pairs[idx];
            let images: HashSet<(ProjPoint, ProjPoint)> = group
                .iter()
                .map(|m| Ok((m.apply(&base.0)?, m.apply(&base.1)?)))
                .collect::<Result<_>>()?;
            c.claim(images == pair_keys, || {
                format!("a distance-{d} orbit map is not a bijection")
            });
            pair_checks += 1;
        }
    }

    // parallel pairs: transporter count = number of square roots of the
    // second-coordinate ratio
    let mut ppairs = Vec::new();
    for u1 in field.elements()? {
        for u2 in field.elements()? {
            for v2 in field.elements()? {
                if u2 == v2 {
                    continue;
                }
                ppairs.push((
                    model.param(&u1, &u2)?,
                    model.param(&u1, &v2)?,
                    &v2 - &u2,
                ));
            }
        }
    }
    c.claim(ppairs.len() as u64 == want, || {
        format!("{} parallel pairs, expected {want}", ppairs.len())
    });
    let limit = if q <= 5 { ppairs.len() } else { 18 };
    let mut parallel_checks = 0u64;
    for i in strided(ppairs.len(), limit) {
        let from = &ppairs[i];
        for j in strided(ppairs.len(), limit) {
            let to = &ppairs[j];
            let count = group
                .iter()
                .filter(|m| {
                    m.apply(&from.0).expect("group elements act totally") == to.0
                        && m.apply(&from.1).expect("group elements act totally") == to.1
                })
                .count();
            let ratio = to.2.div(&from.2)?;
            c.claim(count == square_roots(&ratio).len(), || {
                format!("transporter count {count} does not match the square class")
            });
            parallel_checks += 1;
        }
    }
    // the public search agrees on a slice through the first base
    for j in strided(ppairs.len(), limit.min(24)) {
        let to = &ppairs[j];
        let found = parallel_pair_transporters(&model, (&ppairs[0].0, &ppairs[0].1), (&to.0, &to.1))?;
        let ratio = to.2.div(&ppairs[0].2)?;
        c.claim(found.len() == square_roots(&ratio).len(), || {
            "the transporter search disagrees with the raw count".to_string()
        });
    }

    c.finish(
        format!("regular actions of the order-{want} group, square-class transporter counts"),
        format!(
            "bijective orbit maps on {} antiflag bases and {pair_checks} distance bases; \
             {parallel_checks} parallel transporter counts match their square classes",
            strided(flags.len(), base_count).len()
        ),
        None,
    )
}

fn rigidity(field: &Field) -> Result<Outcome> {
    let Some(q) = field.order() else {
        return skip("the reconstruction argument enumerates circles over a finite field");
    };
    if q < 4 {
        return skip("the rigidity theorem is stated for at least four field elements");
    }
    let model = SurfaceModel::new(field)?;
    let mut c = Checker::new();

    // the two radius-0 circles of the reconstruction meet in one point
    let mut witnesses = 0u64;
    for u1 in field.elements()? {
        if u1.is_zero() || u1.is_one() {
            continue;
        }
        for u2 in field.elements()? {
            let witness = rigidity_witness(&model, &u1, &u2)?;
            c.claim(witness == vec![model.param(&u1, &u2)?], || {
                format!("witness at ({u1}, {u2}) is not a singleton")
            });
            witnesses += 1;
        }
    }
    c.claim(witnesses == q * (q - 2), || {
        format!("{witnesses} witness pairs, expected {}", q * (q - 2))
    });

    // distance fingerprints separate the affine points
    let table = distance_table(&model)?;
    let distinct: HashSet<_> = table.iter().collect();
    c.claim(distinct.len() == table.len(), || {
        "two points share a distance fingerprint".to_string()
    });

    // every sampled group element is recovered from its point map
    let group = group_elements(field)?;
    let sample = strided(group.len(), if q <= 5 { group.len() } else { 12 });
    for idx in &sample {
        let m = &group[*idx];
        let table = collineation_table(&model, m)?;
        c.claim(is_isometry(&model, &table)?, || {
            "a group element's point map is not an isometry".to_string()
        });
        c.claim(induced_matrix(&model, &table)? == *m, || {
            "recovery returned a different matrix".to_string()
        });
    }

    c.finish(
        format!(
            "{} singleton circle intersections, injective fingerprints, unique recovery",
            q * (q - 2)
        ),
        format!(
            "{witnesses} singleton witnesses; {} distinct fingerprints; {} group \
             elements recovered from their point maps",
            table.len(),
            sample.len()
        ),
        None,
    )
}

fn frobenius(field: &Field) -> Result<Outcome> {
    let Some(q) = field.order() else {
        return skip("no Frobenius endomorphism in characteristic zero");
    };
    let p = field.characteristic();
    let mut k = 0u32;
    let mut power = 1u64;
    while power < q {
        power *= p;
        k += 1;
    }
    if k <= 1 {
        return skip("the Frobenius map is trivial over a prime field");
    }
    let model = SurfaceModel::new(field)?;
    let point_set: HashSet<ProjPoint> = model.points()?.iter().cloned().collect();
    let affine = model.affine_points()?;
    let mut c = Checker::new();
    for i in 1..k {
        let frob = FrobeniusCollineation::new(field, i)?;
        let image: HashSet<ProjPoint> = model.points()?.iter().map(|pt| frob.apply(pt)).collect();
        c.claim(image == point_set, || {
            format!("the power-{i} Frobenius does not permute the surface")
        });

        // the distance is powered, not preserved
        let exponent = p.pow(i);
        for a in affine {
            for b in affine {
                let mapped = delta(&model, &frob.apply(a), &frob.apply(b))?;
                let original = delta(&model, a, b)?;
                match (mapped, original) {
                    (ExtendedScalar::Infinity, ExtendedScalar::Infinity) => {}
                    (ExtendedScalar::Finite(x), ExtendedScalar::Finite(y)) => {
                        c.claim(x == y.pow(exponent), || {
                            format!("power-{i} Frobenius does not power the distance")
                        });
                    }
                    _ => c.claim(false, || {
                        format!("power-{i} Frobenius changes parallelism")
                    }),
                }
            }
        }
        let table = frobenius_table(&model, &frob)?;
        c.claim(!is_isometry(&model, &table)?, || {
            format!("power-{i} Frobenius passes as an isometry")
        });
        c.claim(
            matches!(induced_matrix(&model, &table), Err(Error::NotAnIsometry(_))),
            || format!("recovery accepted the power-{i} Frobenius"),
        );
    }
    c.finish(
        format!(
            "each Frobenius power permutes the surface, raises distances to the p^i, \
             and is not an isometry (p = {p}, k = {k})"
        ),
        format!(
            "verified for {} Frobenius power{} on all {} ordered affine pairs",
            k - 1,
            plural(u64::from(k - 1)),
            affine.len() * affine.len()
        ),
        None,
    )
}
