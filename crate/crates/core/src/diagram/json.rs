use serde::{Deserialize, Serialize};

use super::{Diagram, DiagramError, Dir, Endpoint, NodeKind};
use crate::ring::Scalar;

#[derive(Serialize, Deserialize)]
struct NodeRepr {
    id: usize,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    label: Option<Scalar>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EpRepr {
    Node { node: usize },
    Slot { b: usize },
}

#[derive(Serialize, Deserialize)]
struct SlotRepr {
    slot: usize,
    dir: String,
}

#[derive(Serialize, Deserialize)]
struct ZhdRepr {
    d: u32,
    global: Scalar,
    nodes: Vec<NodeRepr>,
    edges: Vec<[EpRepr; 2]>,
    boundary: Vec<SlotRepr>,
}

fn ep_out(e: Endpoint) -> EpRepr {
    match e {
        Endpoint::Node(node) => EpRepr::Node { node },
        Endpoint::Boundary(b) => EpRepr::Slot { b },
    }
}

fn ep_in(e: &EpRepr) -> Endpoint {
    match *e {
        EpRepr::Node { node } => Endpoint::Node(node),
        EpRepr::Slot { b } => Endpoint::Boundary(b),
    }
}

pub fn to_zhd(g: &Diagram) -> String {
    let repr = ZhdRepr {
        d: g.d,
        global: g.global.clone(),
        nodes: g
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| match n {
                NodeKind::Z => NodeRepr { id, kind: "Z".into(), label: None },
                NodeKind::H(l) => {
                    let label = (*l != Scalar::omega(g.d, 1)).then(|| l.clone());
                    NodeRepr { id, kind: "H".into(), label }
                }
            })
            .collect(),
        edges: g.edges.iter().map(|&(a, b)| [ep_out(a), ep_out(b)]).collect(),
        boundary: g
            .boundary
            .iter()
            .enumerate()
            .map(|(slot, dir)| SlotRepr { slot, dir: if *dir == Dir::In { "in" } else { "out" }.into() })
            .collect(),
    };
    serde_json::to_string(&repr).expect("diagram serializes")
}

pub fn from_zhd(text: &str) -> Result<Diagram, DiagramError> {
    let repr: ZhdRepr = serde_json::from_str(text)
        .map_err(|e| DiagramError::Format(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let mut g = Diagram::empty(repr.d);
    g.global = repr.global;
    for (i, n) in repr.nodes.iter().enumerate() {
        if n.id != i {
            return Err(DiagramError::Format(format!("node ids must be dense from 0, found {} at {i}", n.id)));
        }
        let kind = match (n.kind.as_str(), &n.label) {
            ("Z", None) => NodeKind::Z,
            ("H", Some(l)) => NodeKind::H(l.clone()),
            ("H", None) => NodeKind::H(Scalar::omega(repr.d, 1)),
            (k, _) => return Err(DiagramError::Format(format!("bad node kind {k:?} at node {i}"))),
        };
        g.add_node(kind);
    }
    for (i, s) in repr.boundary.iter().enumerate() {
        if s.slot != i {
            return Err(DiagramError::Format(format!(
                "boundary slots must be listed in order, found {} at {i}",
                s.slot
            )));
        }
        g.boundary.push(match s.dir.as_str() {
            "in" => Dir::In,
            "out" => Dir::Out,
            other => return Err(DiagramError::Format(format!("bad direction {other:?} at slot {i}"))),
        });
    }
    g.edges = repr.edges.iter().map(|[a, b]| (ep_in(a), ep_in(b))).collect();
    let defects = g.validate();
    if !defects.is_empty() {
        return Err(DiagramError::Malformed(format!("{defects:?}")));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{add, h_box};

    #[test]
    fn roundtrip() {
        let g = add(3);
        assert_eq!(from_zhd(&to_zhd(&g)).unwrap(), g);
        let l = h_box(5, 1, 0, Scalar::from_int(5, 0));
        assert_eq!(from_zhd(&to_zhd(&l)).unwrap(), l);
    }

    #[test]
    fn rejects_dangling_slot() {
        let text = r#"{"d":3,"global":{"coeffs":[1,0,0],"halfpow":0},"nodes":[{"id":0,"kind":"Z"}],
            "edges":[],"boundary":[{"slot":0,"dir":"in"}]}"#;
        assert!(matches!(from_zhd(text), Err(DiagramError::Malformed(_))));
    }
}
