use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Ancilla, AncillaKind, Circuit, Ctrl, Gate, Permutation, RevError};

#[derive(Serialize, Deserialize)]
pub(crate) struct GateRepr {
    pub kind: String,
    pub wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
}

#[derive(Serialize, Deserialize)]
struct AncillaRepr {
    wire: usize,
    kind: String,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    d: u32,
    wires: usize,
    #[serde(default)]
    ancillae: Vec<AncillaRepr>,
    gates: Vec<GateRepr>,
}

pub(crate) fn gate_repr(g: &Gate) -> GateRepr {
    let simple = |kind: &str| GateRepr { kind: kind.into(), wires: g.wires(), params: Value::Null };
    match g {
        Gate::X(_) => simple("X"),
        Gate::Xinv(_) => simple("Xinv"),
        Gate::X01(_) => simple("X01"),
        Gate::H(_) => simple("H"),
        Gate::CX { .. } => simple("CX"),
        Gate::ZeroCtrlX { .. } => simple("ZeroCtrlX"),
        Gate::ZeroCtrlXinv { .. } => simple("ZeroCtrlXinv"),
        Gate::Toffoli { .. } => simple("Toffoli"),
        Gate::Swap { w, a, b } => GateRepr { kind: "Swap".into(), wires: vec![*w], params: json!([a, b]) },
        Gate::CtrlU { control, on, body } => {
            let on = match on {
                Ctrl::Values(vs) => json!(vs),
                Ctrl::Lambda => json!("lambda"),
            };
            let body = serde_json::to_value(gate_repr(body)).expect("gate serializes");
            GateRepr { kind: "CtrlU".into(), wires: vec![*control], params: json!({"on": on, "body": body}) }
        }
    }
}

pub(crate) fn parse_gate(r: &GateRepr) -> Result<Gate, RevError> {
    let bad = |why: &str| RevError::Format(format!("{} gate: {why}", r.kind));
    let w = |k: usize| -> Result<usize, RevError> {
        if r.wires.len() != k {
            return Err(bad(&format!("expected {k} wires, got {}", r.wires.len())));
        }
        Ok(r.wires[0])
    };
    Ok(match r.kind.as_str() {
        "X" => Gate::X(w(1)?),
        "Xinv" => Gate::Xinv(w(1)?),
        "X01" => Gate::X01(w(1)?),
        "H" => Gate::H(w(1)?),
        "CX" => Gate::CX { c: w(2)?, t: r.wires[1] },
        "ZeroCtrlX" => Gate::ZeroCtrlX { c: w(2)?, t: r.wires[1] },
        "ZeroCtrlXinv" => Gate::ZeroCtrlXinv { c: w(2)?, t: r.wires[1] },
        "Toffoli" => Gate::Toffoli { a: w(3)?, b: r.wires[1], t: r.wires[2] },
        "Swap" => {
            let ab: Vec<u32> = serde_json::from_value(r.params.clone()).map_err(|e| bad(&e.to_string()))?;
            if ab.len() != 2 {
                return Err(bad("params must be [a, b]"));
            }
            Gate::Swap { w: w(1)?, a: ab[0], b: ab[1] }
        }
        "CtrlU" => {
            let control = w(1)?;
            let on = match &r.params["on"] {
                Value::String(s) if s == "lambda" => Ctrl::Lambda,
                v => Ctrl::Values(serde_json::from_value(v.clone()).map_err(|e| bad(&e.to_string()))?),
            };
            let body: GateRepr = serde_json::from_value(r.params["body"].clone()).map_err(|e| bad(&e.to_string()))?;
            Gate::CtrlU { control, on, body: Box::new(parse_gate(&body)?) }
        }
        other => return Err(RevError::Format(format!("unknown gate kind {other}"))),
    })
}

pub fn circuit_to_json(c: &Circuit) -> Value {
    let repr = CircuitRepr {
        d: c.d,
        wires: c.n_wires,
        ancillae: c
            .ancillae
            .iter()
            .map(|a| AncillaRepr {
                wire: a.wire,
                kind: match a.kind {
                    AncillaKind::Zeroed => "zeroed".into(),
                    AncillaKind::Borrowed => "borrowed".into(),
                },
            })
            .collect(),
        gates: c.gates.iter().map(gate_repr).collect(),
    };
    serde_json::to_value(repr).expect("circuit serializes")
}

pub fn circuit_from_json(text: &str) -> Result<Circuit, RevError> {
    let repr: CircuitRepr = serde_json::from_str(text).map_err(|e| RevError::Format(e.to_string()))?;
    let ancillae = repr
        .ancillae
        .iter()
        .map(|a| {
            let kind = match a.kind.as_str() {
                "zeroed" => AncillaKind::Zeroed,
                "borrowed" => AncillaKind::Borrowed,
                k => return Err(RevError::Format(format!("unknown ancilla kind {k}"))),
            };
            Ok(Ancilla { wire: a.wire, kind })
        })
        .collect::<Result<_, _>>()?;
    let gates = repr.gates.iter().map(parse_gate).collect::<Result<_, _>>()?;
    let c = Circuit { d: repr.d, n_wires: repr.wires, ancillae, gates };
    c.validate()?;
    Ok(c)
}

#[derive(Serialize, Deserialize)]
struct PermRepr {
    d: u32,
    n: usize,
    images: Vec<usize>,
}

pub fn permutation_to_json(p: &Permutation) -> Value {
    serde_json::to_value(PermRepr { d: p.d, n: p.n, images: p.images.clone() }).expect("permutation serializes")
}

pub fn permutation_from_json(text: &str) -> Result<Permutation, RevError> {
    let r: PermRepr = serde_json::from_str(text).map_err(|e| RevError::Format(e.to_string()))?;
    Permutation::new(r.d, r.n, r.images)
}
