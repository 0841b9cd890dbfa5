//! Canonical JSON rendering.
//!
//! Every report is a `serde_json::Value` whose maps are `BTreeMap`-backed, so
//! `to_string` emits sorted keys; all numeric payloads are rendered as exact
//! decimal strings so output is stable across platforms and worker counts.
//! The only JSON number in a report is the schema version.

use serde_json::{json, Map, Value};

use gradedpi_core::groups::{FiniteGroup, GroupElem};
use gradedpi_core::identities::Assignment;
use gradedpi_core::kemer::{
    CandidateStatus, KemerPoint, LowerBoundReport, ProductCheckReport, RefutationCertificate,
    SearchParams, WitnessBundle,
};
use gradedpi_core::polynomials::GradedPolynomial;
use gradedpi_core::scalars::CycScalar;

use crate::workspace::Workspace;

/// Exact numeric rendering: always a string.
pub fn snum(n: impl std::fmt::Display) -> Value {
    Value::String(n.to_string())
}

pub fn scalar(s: &CycScalar) -> Value {
    serde_json::to_value(s).expect("scalar serialization is infallible")
}

pub fn scalar_vec(v: &[CycScalar]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn poly_value(f: &GradedPolynomial) -> Value {
    serde_json::to_value(f).expect("polynomial serialization is infallible")
}

/// `{label: dim}` keyed by the group element labels.
pub fn dims_by_label(group: &FiniteGroup, dims: &[usize]) -> Value {
    let mut map = Map::new();
    for (g, d) in dims.iter().enumerate() {
        map.insert(group.label(g).to_string(), snum(d));
    }
    Value::Object(map)
}

pub fn assignment_value(asg: &Assignment) -> Value {
    let mut map = Map::new();
    for (id, idx) in &asg.0 {
        map.insert(id.to_string(), snum(idx));
    }
    Value::Object(map)
}

pub fn kemer_point(p: &KemerPoint) -> Value {
    json!({
        "alpha": p.alpha.iter().map(snum).collect::<Vec<_>>(),
        "s": snum(&p.s),
    })
}

pub fn params_value(p: &SearchParams) -> Value {
    json!({
        "border_budget": snum(p.border_budget),
        "budget": snum(p.budget),
        "nu": snum(p.nu),
    })
}

pub fn certificate_value(group: &FiniteGroup, c: &RefutationCertificate) -> Value {
    match c {
        RefutationCertificate::ZeroDimension { degree, set_size, component_dim } => json!({
            "kind": "zero-dimension",
            "degree": group.label(*degree),
            "set_size": snum(set_size),
            "component_dim": snum(component_dim),
        }),
        RefutationCertificate::RadicalCount { forced, bound } => json!({
            "kind": "radical-count",
            "forced": snum(forced),
            "bound": snum(bound),
        }),
        RefutationCertificate::FactorSplit { factor_certificates } => json!({
            "kind": "factor-split",
            "factors": factor_certificates
                .iter()
                .map(|f| certificate_value(group, f))
                .collect::<Vec<_>>(),
        }),
        RefutationCertificate::Exhausted { orderings, assignments } => json!({
            "kind": "exhausted",
            "orderings": snum(orderings),
            "assignments": snum(assignments),
        }),
    }
}

fn status_value(group: &FiniteGroup, s: &CandidateStatus) -> Value {
    match s {
        CandidateStatus::Witnessed => json!({ "kind": "witnessed" }),
        CandidateStatus::Dominated => json!({ "kind": "dominated" }),
        CandidateStatus::Refuted(certs) => json!({
            "kind": "refuted",
            "certificates": certs
                .iter()
                .map(|c| certificate_value(group, c))
                .collect::<Vec<_>>(),
        }),
        CandidateStatus::BudgetExhausted => json!({ "kind": "budget-exhausted" }),
        CandidateStatus::Unresolved => json!({ "kind": "unresolved" }),
    }
}

pub fn bundle_value(b: &WitnessBundle) -> Value {
    let mut values = Map::new();
    for (id, v) in &b.values {
        values.insert(id.to_string(), scalar_vec(v));
    }
    json!({
        "polynomial": poly_value(&b.polynomial),
        "value": scalar_vec(&b.value),
        "values": Value::Object(values),
    })
}

pub fn lower_report_value(group: &FiniteGroup, r: &LowerBoundReport) -> Value {
    let witnesses: Vec<Value> = r
        .maximal
        .iter()
        .zip(&r.witnesses)
        .map(|(p, b)| {
            let mut w = bundle_value(b);
            w.as_object_mut()
                .expect("bundle renders as an object")
                .insert("point".into(), kemer_point(p));
            w
        })
        .collect();
    let certified: Vec<Value> = r
        .candidates
        .iter()
        .filter_map(|c| match &c.status {
            CandidateStatus::Refuted(certs) => Some(json!({
                "certificates": certs
                    .iter()
                    .map(|cert| certificate_value(group, cert))
                    .collect::<Vec<_>>(),
                "point": kemer_point(&c.point),
            })),
            _ => None,
        })
        .collect();
    let candidates: Vec<Value> = r
        .candidates
        .iter()
        .map(|c| json!({ "point": kemer_point(&c.point), "status": status_value(group, &c.status) }))
        .collect();
    json!({
        "budget_exhausted": r.budget_exhausted,
        "candidates": candidates,
        "certified_refutations": certified,
        "lower": kemer_point(&r.lower),
        "maximal": r.maximal.iter().map(kemer_point).collect::<Vec<_>>(),
        "params": params_value(&r.params),
        "upper": kemer_point(&r.upper),
        "witnesses": witnesses,
    })
}

pub fn product_report_value(
    group: &FiniteGroup,
    names: &[String],
    r: &ProductCheckReport,
) -> Value {
    json!({
        "algebras": names,
        "budget_exhausted": r.budget_exhausted,
        "consistent": r.consistent,
        "factor_reports": r
            .factor_reports
            .iter()
            .map(|f| lower_report_value(group, f))
            .collect::<Vec<_>>(),
        "maximal_factor_points": r
            .maximal_factor_points
            .iter()
            .map(kemer_point)
            .collect::<Vec<_>>(),
        "product_report": lower_report_value(group, &r.product_report),
    })
}

/// Wraps a command report with the invocation metadata and schema version.
pub fn envelope(command: &str, ws: &Workspace, report: Value) -> Value {
    json!({
        "command": command,
        "inputs": { "digest": ws.digest, "specs": ws.files },
        "report": report,
        "schema": 1,
    })
}

pub fn canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("report serialization is infallible")
}

/// Degree labels for a polynomial's alphabet, id-keyed.
pub fn profile_value(group: &FiniteGroup, f: &GradedPolynomial) -> Value {
    Value::Array(
        f.alphabet()
            .iter()
            .map(|v| json!({ "degree": group.label(v.degree), "id": snum(v.id) }))
            .collect(),
    )
}

pub fn option_value(v: Option<Value>) -> Value {
    v.unwrap_or(Value::Null)
}

pub fn elem_labels(group: &FiniteGroup, elems: &[GroupElem]) -> Vec<Value> {
    elems.iter().map(|&g| Value::String(group.label(g).to_string())).collect()
}
