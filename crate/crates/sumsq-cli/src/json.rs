//! JSON encodings. Key order is fixed by insertion (`preserve_order`).

use serde_json::{json, Map, Value};
use sumsq::classify::{ClassificationReport, ChainStep};
use sumsq::determinacy::{DeterminacyKind, DeterminacyReport};
use sumsq::psd::{Arc, Side, SosCertificate};
use sumsq::{Rational, Series};

pub fn series(s: &Series) -> Value {
    Value::String(s.to_string())
}

fn rational(r: &Rational) -> Value {
    Value::String(r.to_string())
}

/// `{"x": φ_x, "y": φ_y, ...}` over the series' own variable names.
pub fn substitution(names: &[String], images: &[Series]) -> Value {
    let mut m = Map::new();
    for (name, img) in names.iter().zip(images) {
        m.insert(name.clone(), series(img));
    }
    Value::Object(m)
}

pub fn determinacy(d: &DeterminacyReport<Rational>) -> Value {
    let mut m = Map::new();
    match d.kind {
        DeterminacyKind::Determined => {
            m.insert("kind".into(), json!("determined"));
        }
        DeterminacyKind::Quasidetermined => {
            m.insert("kind".into(), json!("quasidetermined"));
        }
        DeterminacyKind::NotCertifiedUpTo(k) => {
            m.insert("kind".into(), json!("not_certified"));
            m.insert("up_to".into(), json!(k));
        }
    }
    if let Some(k) = d.k {
        m.insert("k".into(), json!(k));
    }
    if let Some(c) = &d.certificate {
        m.insert("certified_monomials".into(), json!(c.entries.len()));
    }
    Value::Object(m)
}

fn step(names: &[String], s: &ChainStep) -> Value {
    json!({ "step": s.label, "sub": substitution(names, &s.images), "unit": series(&s.unit) })
}

pub fn classification(r: &ClassificationReport) -> Value {
    let names: Vec<String> = r.input.vars().iter().cloned().collect();
    let mut params = Map::new();
    for (k, v) in r.normal_form.params() {
        params.insert(k.into(), Value::String(v));
    }
    let mut m = Map::new();
    m.insert("input".into(), series(&r.input));
    m.insert("trunc".into(), json!(r.trunc));
    m.insert("order".into(), r.order.map_or(json!("infinity"), |w| json!(w)));
    m.insert("normal_form".into(), json!({ "case": r.normal_form.tag(), "params": params, "polynomial": series(&r.normal_form.polynomial()) }));
    m.insert("verdict".into(), json!(r.verdict.as_str()));
    m.insert("reason".into(), json!(r.reason));
    m.insert("witness".into(), Value::Array(r.chain.iter().map(|s| step(&names, s)).collect()));
    m.insert("unit".into(), series(&r.unit.truncate(r.verified_to.max(1))));
    m.insert("verified_to".into(), json!(r.verified_to));
    m.insert("determinacy".into(), r.determinacy.as_ref().map_or(Value::Null, determinacy));
    if let Some(ob) = &r.obstruction {
        m.insert(
            "obstruction".into(),
            json!({
                "element": series(&ob.element()),
                "description": ob.description,
                "arcs": ob.arcs.iter().map(|(a, _, _)| arc(a)).collect::<Vec<_>>(),
            }),
        );
    }
    m.insert("notes".into(), json!(r.notes));
    if r.working_trunc != r.trunc {
        m.insert("working_trunc".into(), json!(r.working_trunc));
    }
    Value::Object(m)
}

pub fn arc(a: &Arc) -> Value {
    json!({
        "components": a.components.iter().map(series).collect::<Vec<_>>(),
        "side": match a.side { Side::Positive => "s>0", Side::Negative => "s<0" },
    })
}

pub fn certificate(c: &SosCertificate) -> Value {
    let mut m = Map::new();
    m.insert("target".into(), series(&c.target));
    m.insert(
        "weights".into(),
        Value::Array(
            c.weights
                .iter()
                .map(|w| json!({ "value": rational(&w.value), "squares": w.squares.iter().map(rational).collect::<Vec<_>>() }))
                .collect(),
        ),
    );
    m.insert("summands".into(), Value::Array(c.summands.iter().map(series).collect()));
    m.insert(
        "modulus".into(),
        c.modulus
            .as_ref()
            .map_or(Value::Null, |md| json!({ "relation": series(&md.relation), "cofactor": series(&md.cofactor) })),
    );
    m.insert("verified_to".into(), json!(c.verified_to));
    Value::Object(m)
}

/// Serialize with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("string keys");
    s.push('\n');
    s
}
