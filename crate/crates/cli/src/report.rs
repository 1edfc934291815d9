//! JSON renderings of core values. Every number is written twice: exactly
//! and as a decimal.

use iet_core::exact::rational_to_decimal;
use iet_core::scene::{rational_json, ExactJson};
use iet_core::{Domain, ExactReal, Point, Rational, Subdomain, SymbolBasis};
use serde_json::{json, Value};

const DIGITS: usize = 12;

pub fn exact(x: &ExactReal, basis: &SymbolBasis) -> Value {
    let form = match x.as_rational() {
        Some(q) => Value::String(rational_json(q)),
        None => serde_json::to_value(ExactJson::from_exact(x, basis)).expect("plain data"),
    };
    json!({ "exact": form, "decimal": basis.to_decimal(x, DIGITS) })
}

pub fn rational(q: &Rational) -> Value {
    json!({ "exact": rational_json(q), "decimal": rational_to_decimal(q, DIGITS) })
}

pub fn point(p: &Point, dom: &Domain) -> Value {
    json!({ "c": dom.component(p.component).label, "offset": exact(&p.offset, dom.basis()) })
}

pub fn subdomain(s: &Subdomain, dom: &Domain) -> Value {
    let arcs: Vec<Value> = s
        .arcs()
        .iter()
        .map(|a| {
            json!({
                "c": dom.component(a.component).label,
                "start": exact(&a.start, dom.basis()),
                "end": exact(&a.end, dom.basis()),
            })
        })
        .collect();
    json!({ "arcs": arcs, "measure": exact(&s.measure(), dom.basis()) })
}
