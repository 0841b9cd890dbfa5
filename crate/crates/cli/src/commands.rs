//! One function per subcommand.
//!
//! Each returns the report body plus a `separated` flag: `true` means the
//! computation finished but the verdict is negative (an identity violated, an
//! audit failed, a comparison strict), which the caller maps to exit code 2.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use gradedpi_core::algebras::GradedAlgebra;
use gradedpi_core::groups::GroupElem;
use gradedpi_core::identities::{
    alternating_is_identity, evaluate_generic, identity_space, is_identity, property_k_check,
    tideals_compare, verify_theorem_j, Assignment, TIdealOrder,
};
use gradedpi_core::kemer::{kemer_lower_bound, kemer_set_product_check, SearchParams};
use gradedpi_core::polynomials::{
    capelli, capelli_x_ids, zr_obstruction, zr_tilde, GradedPolynomial, VarSpec,
};
use gradedpi_core::scalars::Rational;

use crate::report::*;
use crate::workspace::{err, CliError, PolySpec, Workspace};

type Outcome = Result<(Value, bool), CliError>;

pub fn validate(ws: &Workspace) -> Outcome {
    let (built_algebras, built_polys) = ws.build_all()?;
    let mut groups = Map::new();
    for (name, g) in ws.groups() {
        groups.insert(name.clone(), json!({ "order": snum(g.order()) }));
    }
    let mut cocycles = Map::new();
    for (name, (gname, c)) in ws.cocycles() {
        cocycles.insert(name.clone(), json!({ "group": gname, "m": snum(c.m) }));
    }
    let mut algebras = Map::new();
    for (name, a) in &built_algebras {
        algebras.insert(
            name.clone(),
            json!({ "dim": snum(a.dim()), "group_order": snum(a.group().order()) }),
        );
    }
    let mut polynomials = Map::new();
    for (name, f) in &built_polys {
        polynomials.insert(
            name.clone(),
            json!({ "terms": snum(f.terms().len()), "vars": snum(f.alphabet().len()) }),
        );
    }
    let report = json!({
        "algebras": algebras,
        "cocycles": cocycles,
        "groups": groups,
        "ok": true,
        "polynomials": polynomials,
    });
    Ok((report, false))
}

pub fn radical(ws: &Workspace, algebra: &str) -> Outcome {
    let a = ws.algebra(algebra)?;
    let rad = a.radical().map_err(err)?;
    let group = a.group();
    let report = json!({
        "algebra": algebra,
        "eval_basis": {
            "degrees": elem_labels(group, &rad.eval_basis.degree),
            "is_radical": rad.eval_basis.is_radical,
            "vectors": rad.eval_basis.vectors.iter().map(|v| scalar_vec(v)).collect::<Vec<_>>(),
        },
        "nilpotency_index": snum(rad.nilpotency_index),
        "radical_basis": rad.radical_basis.iter().map(|v| scalar_vec(v)).collect::<Vec<_>>(),
        "radical_dims": dims_by_label(group, &rad.radical_dims),
        "semisimple_dims": dims_by_label(group, &rad.semisimple_dims),
    });
    Ok((report, false))
}

pub fn gpar(ws: &Workspace, algebra: &str) -> Outcome {
    let a = ws.algebra(algebra)?;
    let rad = a.radical().map_err(err)?;
    let report = json!({
        "algebra": algebra,
        "gpar": {
            "d": dims_by_label(a.group(), &rad.semisimple_dims),
            "s": snum(rad.nilpotency_index - 1),
        },
    });
    Ok((report, false))
}

pub fn check(ws: &Workspace, algebra: &str, poly: &str) -> Outcome {
    let a = ws.algebra(algebra)?;
    let (_, f) = ws.polynomial(poly)?;
    let res = is_identity(&f, &a).map_err(err)?;
    let counterexample = res.counterexample.as_ref().map(|asg| witnessed_assignment(&a, asg));
    let report = json!({
        "algebra": algebra,
        "assignments_swept": snum(res.assignments_swept),
        "counterexample": option_value(counterexample),
        "is_identity": res.is_identity,
        "polynomial": poly_value(&f),
        "vacuous": res.vacuous,
    });
    Ok((report, !res.is_identity))
}

/// An assignment together with the basis vectors it substitutes.
fn witnessed_assignment(a: &GradedAlgebra, asg: &Assignment) -> Value {
    let mut values = Map::new();
    for (id, idx) in &asg.0 {
        values.insert(id.to_string(), json!({
            "label": a.label(*idx),
            "vector": scalar_vec(&a.basis_vec(*idx)),
        }));
    }
    json!({ "assignment": assignment_value(asg), "values": Value::Object(values) })
}

pub fn kernel(ws: &Workspace, algebra: &str, poly: &str) -> Outcome {
    let a = ws.algebra(algebra)?;
    let (_, f) = ws.polynomial(poly)?;
    let space = identity_space(&a, f.alphabet()).map_err(err)?;
    let report = json!({
        "algebra": algebra,
        "basis": space.basis.iter().map(|v| scalar_vec(v)).collect::<Vec<_>>(),
        "kernel_dim": snum(space.kernel_dim()),
        "monomials": space
            .monomials
            .iter()
            .map(|w| w.iter().map(snum).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "polynomial": poly_value(&f),
        "profile": profile_value(a.group(), &f),
        "vacuous": space.vacuous,
    });
    Ok((report, false))
}

pub fn compare(ws: &Workspace, algebras: &[String], max_degree: usize) -> Outcome {
    let [first, second] = algebras else {
        return Err(err("compare takes exactly two --algebra arguments"));
    };
    let a = ws.algebra(first)?;
    let b = ws.algebra(second)?;
    let cmp = tideals_compare(&a, &b, max_degree).map_err(err)?;
    let verdict = match cmp.verdict {
        TIdealOrder::Equal => "equal",
        TIdealOrder::AInB => "a-in-b",
        TIdealOrder::BInA => "b-in-a",
        TIdealOrder::Incomparable => "incomparable",
    };
    let witness = |w: &Option<(Vec<VarSpec>, GradedPolynomial)>| {
        w.as_ref().map(|(profile, f)| {
            json!({
                "polynomial": poly_value(f),
                "profile": Value::Array(
                    profile
                        .iter()
                        .map(|v| json!({ "degree": a.group().label(v.degree), "id": snum(v.id) }))
                        .collect(),
                ),
            })
        })
    };
    let report = json!({
        "algebras": [first, second],
        "max_degree": snum(cmp.max_degree),
        "verdict": verdict,
        "witness_a_only": option_value(witness(&cmp.witness_a_only)),
        "witness_b_only": option_value(witness(&cmp.witness_b_only)),
    });
    Ok((report, cmp.verdict != TIdealOrder::Equal))
}

pub fn capelli_audit(ws: &Workspace, algebra: &str, max_degree: usize) -> Outcome {
    let a = ws.algebra(algebra)?;
    let group = a.group();
    let r = group.order();
    let mut components = Map::new();
    let mut ok = true;
    for g in 0..r {
        let dim_g = a.component_dim(g);
        let upper = {
            let n = dim_g + 1;
            if 2 * n > max_degree {
                json!({ "checked": false })
            } else {
                let mut patterns = 0u64;
                let mut realizable = 0u64;
                let mut failures = Vec::new();
                for pat in degree_tuples(r, n) {
                    patterns += 1;
                    if dim_g > 0 && pat.iter().all(|&y| a.component_dim(y) > 0) {
                        realizable += 1;
                    }
                    let f = capelli(n, g, &pat);
                    let res =
                        alternating_is_identity(&f, &a, &[capelli_x_ids(n)]).map_err(err)?;
                    if !res.is_identity {
                        failures.push(Value::Array(elem_labels(group, &pat)));
                    }
                }
                if !failures.is_empty() {
                    ok = false;
                }
                json!({
                    "checked": true,
                    "degree": snum(n),
                    "identities": failures.is_empty(),
                    "failures": failures,
                    "patterns": snum(patterns),
                    "realizable": snum(realizable),
                })
            }
        };
        let lower = {
            let n = dim_g;
            if n == 0 || 2 * n > max_degree {
                json!({ "checked": false })
            } else {
                let mut witness = None;
                for pat in degree_tuples(r, n) {
                    let f = capelli(n, g, &pat);
                    let res =
                        alternating_is_identity(&f, &a, &[capelli_x_ids(n)]).map_err(err)?;
                    if !res.is_identity {
                        let asg = res
                            .counterexample
                            .as_ref()
                            .map(|asg| witnessed_assignment(&a, asg));
                        witness = Some(json!({
                            "counterexample": option_value(asg),
                            "y_degrees": Value::Array(elem_labels(group, &pat)),
                        }));
                        break;
                    }
                }
                json!({
                    "checked": true,
                    "degree": snum(n),
                    "witness": option_value(witness),
                })
            }
        };
        components.insert(
            group.label(g).to_string(),
            json!({ "dim": snum(dim_g), "lower": lower, "upper": upper }),
        );
    }
    let report = json!({
        "algebra": algebra,
        "components": components,
        "max_degree": snum(max_degree),
        "ok": ok,
    });
    Ok((report, !ok))
}

/// All `r^n` degree tuples in lexicographic order.
fn degree_tuples(r: usize, n: usize) -> Vec<Vec<GroupElem>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < r {
                break;
            }
            cur[i] = 0;
        }
    }
}

pub fn kemer(
    ws: &Workspace,
    algebras: &[String],
    nu: usize,
    border_budget: usize,
    budget: u64,
) -> Outcome {
    let params = SearchParams { nu, border_budget, budget };
    if algebras.len() == 1 {
        let a = ws.algebra(&algebras[0])?;
        let r = kemer_lower_bound(&a, &params).map_err(err)?;
        let mut report = lower_report_value(a.group(), &r);
        report
            .as_object_mut()
            .expect("report renders as an object")
            .insert("algebra".into(), Value::String(algebras[0].clone()));
        Ok((report, false))
    } else {
        let factors: Vec<GradedAlgebra> = algebras
            .iter()
            .map(|name| ws.algebra(name))
            .collect::<Result<_, _>>()?;
        let r = kemer_set_product_check(&factors, &params).map_err(err)?;
        let report = product_report_value(factors[0].group(), algebras, &r);
        // An exhausted budget is an inconclusive run, not a separation.
        let separated = !r.consistent && !r.budget_exhausted;
        Ok((report, separated))
    }
}

pub fn witness_simple(ws: &Workspace, algebra: &str, nu: usize) -> Outcome {
    let a = ws.algebra(algebra)?;
    let w = gradedpi_core::kemer::full_witness_simple(&a, nu).map_err(err)?;
    let group = a.group();
    let sets: Vec<Value> = w
        .layout
        .all_sets()
        .iter()
        .map(|(g, ids)| {
            json!({
                "degree": group.label(*g),
                "ids": ids.iter().map(snum).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut values = Map::new();
    for (id, v) in &w.values {
        values.insert(id.to_string(), scalar_vec(v));
    }
    let report = json!({
        "algebra": algebra,
        "alternating_sets": sets,
        "nu": snum(nu),
        "polynomial": poly_value(&w.polynomial),
        "terms": snum(w.polynomial.terms().len()),
        "tour": w
            .tour
            .iter()
            .map(|(r, c)| Value::Array(vec![snum(r), snum(c)]))
            .collect::<Vec<_>>(),
        "value": scalar_vec(&w.value),
        "values": Value::Object(values),
    });
    Ok((report, false))
}

pub fn zr_audit(ws: &Workspace, algebra: &str, max_n: usize) -> Outcome {
    let a = ws.algebra(algebra)?;
    let e = a.group().identity();
    let mut cases = 0u64;
    let mut tilde_identities = 0u64;
    let mut nonvacuous_cases = 0u64;
    let mut violations = Vec::new();
    for n in 1..=max_n {
        for border in 0..=2usize {
            let total = n + 1 + border;
            let alphabet: Vec<VarSpec> =
                (1..=total as u32).map(|id| VarSpec { id, degree: e }).collect();
            let x_ids: Vec<u32> = (1..=n as u32).collect();
            let extra = n as u32 + 1;
            let z = VarSpec { id: total as u32 + 1, degree: e };
            let mut word: Vec<u32> = (1..=total as u32).collect();
            loop {
                let mut m = GradedPolynomial::zero(alphabet.clone()).map_err(err)?;
                m.add_term(word.clone(), gradedpi_core::scalars::CycScalar::one())
                    .map_err(err)?;
                let f = m.alternate(&x_ids).map_err(err)?;
                cases += 1;
                let tilde = zr_tilde(&f, &x_ids, extra).map_err(err)?;
                if evaluate_generic(&tilde, &a).map_err(err)?.is_identity {
                    tilde_identities += 1;
                    // The interesting cases: the hypothesis holds while f
                    // itself is not an identity.
                    if !evaluate_generic(&f, &a).map_err(err)?.is_identity {
                        nonvacuous_cases += 1;
                    }
                    let obst = zr_obstruction(&f, &x_ids, extra, z).map_err(err)?;
                    if !evaluate_generic(&obst, &a).map_err(err)?.is_identity {
                        violations.push(json!({
                            "border": snum(border),
                            "n": snum(n),
                            "word": word.iter().map(snum).collect::<Vec<_>>(),
                        }));
                    }
                }
                if !next_permutation(&mut word) {
                    break;
                }
            }
        }
    }
    let sep = !violations.is_empty();
    let report = json!({
        "algebra": algebra,
        "cases": snum(cases),
        "max_n": snum(max_n),
        "nonvacuous": nonvacuous_cases > 0,
        "nonvacuous_cases": snum(nonvacuous_cases),
        "tilde_identities": snum(tilde_identities),
        "violations": violations,
    });
    Ok((report, sep))
}

/// Advances to the next lexicographic permutation; false after the last.
fn next_permutation(w: &mut [u32]) -> bool {
    if w.len() < 2 {
        return false;
    }
    let mut i = w.len() - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = w.len() - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

pub fn theorem_j(ws: &Workspace, algebra: &str, poly: &str) -> Outcome {
    let a = ws.algebra(algebra)?;
    let (spec, f) = ws.polynomial(poly)?;
    let t_ids: Vec<u32> = match &spec {
        PolySpec::Capelli { n, .. } => capelli_x_ids(*n),
        PolySpec::Alternate { set, .. } => set.clone(),
        PolySpec::Terms { .. } => {
            let all: Vec<u32> = f.alphabet().iter().map(|v| v.id).collect();
            if !f.is_alternating(&all).map_err(err)? {
                return Err(err(
                    "the polynomial must alternate in an identifiable variable set; \
                     use a capelli or alternate definition, or one alternating in all variables",
                ));
            }
            all
        }
    };
    // Distinct basis elements per degree for the alternating variables, the
    // first component element for the rest.
    let mut rank: BTreeMap<GroupElem, usize> = BTreeMap::new();
    let mut asg = BTreeMap::new();
    for v in f.alphabet() {
        let pool = a.component_basis(v.degree);
        let idx = if t_ids.contains(&v.id) {
            let k = rank.entry(v.degree).or_insert(0);
            let idx = pool.get(*k).copied().ok_or_else(|| {
                err(format!(
                    "component {} is too small for {} distinct alternating substitutions",
                    a.group().label(v.degree),
                    *k + 1,
                ))
            })?;
            *k += 1;
            idx
        } else {
            pool.first().copied().ok_or_else(|| {
                err(format!("no basis element of degree {}", a.group().label(v.degree)))
            })?
        };
        asg.insert(v.id, idx);
    }
    let asg = Assignment(asg);
    let t = t_ids.len();
    let mut trials = Vec::new();
    let mut holds = true;
    let mut run = |label: String, matrix: Vec<Vec<Rational>>| -> Result<(), CliError> {
        let ok = verify_theorem_j(&a, &f, &t_ids, &asg, &matrix).map_err(err)?;
        holds &= ok;
        trials.push(json!({
            "label": label,
            "matrix": matrix
                .iter()
                .map(|row| row.iter().map(snum).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "ok": ok,
        }));
        Ok(())
    };
    let identity: Vec<Vec<Rational>> = (0..t)
        .map(|i| (0..t).map(|j| Rational::from_int((i == j) as i64)).collect())
        .collect();
    run("identity".into(), identity)?;
    run("zero".into(), vec![vec![Rational::from_int(0); t]; t])?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x17EA);
    for k in 1..=20 {
        let matrix: Vec<Vec<Rational>> = (0..t)
            .map(|_| (0..t).map(|_| Rational::from_int(rng.gen_range(-3..=3))).collect())
            .collect();
        run(format!("random-{k:02}"), matrix)?;
    }
    let report = json!({
        "algebra": algebra,
        "assignment": assignment_value(&asg),
        "holds": holds,
        "polynomial": poly_value(&f),
        "t_ids": t_ids.iter().map(snum).collect::<Vec<_>>(),
        "trials": trials,
    });
    Ok((report, !holds))
}

pub fn property_k(ws: &Workspace, algebra: &str, poly: &str) -> Outcome {
    let a = ws.algebra(algebra)?;
    let (_, f) = ws.polynomial(poly)?;
    let rad = a.radical().map_err(err)?;
    let res = property_k_check(&f, &a, &rad).map_err(err)?;
    let report = json!({
        "algebra": algebra,
        "holds": res.holds,
        "is_identity": res.is_identity,
        "polynomial": poly_value(&f),
        "radical_threshold": snum(res.radical_threshold),
        "violation": option_value(res.violation.as_ref().map(assignment_value)),
    });
    Ok((report, !res.holds))
}
