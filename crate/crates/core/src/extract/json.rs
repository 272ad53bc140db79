use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ExtractError, Op, PostCircuit};
use crate::diagram::Dir;
use crate::revcomp::{gate_repr, parse_gate, GateRepr};

#[derive(Serialize, Deserialize)]
struct SlotRepr {
    dir: String,
    wire: usize,
}

#[derive(Serialize, Deserialize)]
struct PostRepr {
    d: u32,
    wires: usize,
    slots: Vec<SlotRepr>,
    k: i64,
    gates: Vec<GateRepr>,
}

/// A `.qc` document extended with boundary slots, the exponent k and the
/// pseudo-gates "prep" and "post".
pub fn post_circuit_to_json(pc: &PostCircuit) -> Value {
    let gates = pc
        .ops
        .iter()
        .map(|op| match op {
            Op::Prep(w) => GateRepr { kind: "prep".into(), wires: vec![*w], params: Value::Null },
            Op::Post(w) => GateRepr { kind: "post".into(), wires: vec![*w], params: Value::Null },
            Op::Gate(g) => gate_repr(g),
        })
        .collect();
    let slots = pc
        .slots
        .iter()
        .map(|&(dir, wire)| SlotRepr { dir: if dir == Dir::In { "in" } else { "out" }.into(), wire })
        .collect();
    serde_json::to_value(PostRepr { d: pc.d, wires: pc.n_wires, slots, k: pc.k, gates }).expect("circuit serializes")
}

pub fn post_circuit_from_json(text: &str) -> Result<PostCircuit, ExtractError> {
    let fmt = |e: String| ExtractError::Malformed(e);
    let r: PostRepr = serde_json::from_str(text).map_err(|e| fmt(e.to_string()))?;
    let slots = r
        .slots
        .iter()
        .map(|s| match s.dir.as_str() {
            "in" => Ok((Dir::In, s.wire)),
            "out" => Ok((Dir::Out, s.wire)),
            other => Err(fmt(format!("unknown slot direction {other}"))),
        })
        .collect::<Result<_, _>>()?;
    let ops = r
        .gates
        .iter()
        .map(|g| match (g.kind.as_str(), g.wires.as_slice()) {
            ("prep", [w]) => Ok(Op::Prep(*w)),
            ("post", [w]) => Ok(Op::Post(*w)),
            ("prep" | "post", _) => Err(fmt(format!("{} takes one wire", g.kind))),
            _ => Ok(Op::Gate(parse_gate(g)?)),
        })
        .collect::<Result<_, ExtractError>>()?;
    let pc = PostCircuit { d: r.d, n_wires: r.wires, slots, ops, k: r.k };
    pc.validate()?;
    Ok(pc)
}
