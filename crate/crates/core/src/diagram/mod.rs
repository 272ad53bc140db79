//! The ZH diagram IR: an open multigraph of Z-spiders and H-boxes.

mod gadgets;
mod json;

pub use gadgets::*;
pub use json::{from_zhd, to_zhd};

use std::collections::HashMap;

use thiserror::Error;

use crate::ring::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("boundary signatures differ: {0}")]
    Signature(String),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(u32, u32),
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("zhd format: {0}")]
    Format(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Z,
    H(Scalar),
}

impl NodeKind {
    pub fn is_phase_free_h(&self) -> bool {
        matches!(self, NodeKind::H(l) if *l == Scalar::omega(l.d(), 1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Node(usize),
    Boundary(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    In,
    Out,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::In => Dir::Out,
            Dir::Out => Dir::In,
        }
    }
}

/// A set of nodes whose contraction may be memoized under `key`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub key: String,
    pub nodes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    DanglingSlot(usize),
    SlotReused(usize),
    UnknownNode(usize),
    UnknownSlot(usize),
    MixedDimension { found: u32, expected: u32 },
    BadRegion(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub d: u32,
    pub nodes: Vec<NodeKind>,
    pub edges: Vec<(Endpoint, Endpoint)>,
    pub boundary: Vec<Dir>,
    pub global: Scalar,
    pub regions: Vec<Region>,
}

impl Diagram {
    pub fn empty(d: u32) -> Self {
        Diagram {
            d,
            nodes: Vec::new(),
            edges: Vec::new(),
            boundary: Vec::new(),
            global: Scalar::one(d),
            regions: Vec::new(),
        }
    }

    pub fn add_node(&mut self, kind: NodeKind) -> usize {
        self.nodes.push(kind);
        self.nodes.len() - 1
    }

    pub fn add_z(&mut self) -> usize {
        self.add_node(NodeKind::Z)
    }

    pub fn add_h(&mut self) -> usize {
        self.add_node(NodeKind::H(Scalar::omega(self.d, 1)))
    }

    pub fn add_edge(&mut self, a: Endpoint, b: Endpoint) {
        self.edges.push((a, b));
    }

    pub fn connect(&mut self, a: usize, b: usize) {
        self.add_edge(Endpoint::Node(a), Endpoint::Node(b));
    }

    /// Adds a boundary slot wired to `node` and returns the slot index.
    pub fn attach(&mut self, node: usize, dir: Dir) -> usize {
        self.boundary.push(dir);
        let slot = self.boundary.len() - 1;
        self.add_edge(Endpoint::Node(node), Endpoint::Boundary(slot));
        slot
    }

    pub fn scale(&mut self, s: &Scalar) {
        self.global = &self.global * s;
    }

    pub fn scaled(mut self, s: &Scalar) -> Self {
        self.scale(s);
        self
    }

    /// Multiplies the global factor by d^{e/2}.
    pub fn scale_sqrt_d(&mut self, e: i64) {
        self.scale(&Scalar::sqrt_d_pow(self.d, e));
    }

    pub fn n_inputs(&self) -> usize {
        self.boundary.iter().filter(|&&b| b == Dir::In).count()
    }

    pub fn n_outputs(&self) -> usize {
        self.boundary.iter().filter(|&&b| b == Dir::Out).count()
    }

    pub fn slots(&self, dir: Dir) -> Vec<usize> {
        (0..self.boundary.len()).filter(|&s| self.boundary[s] == dir).collect()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .map(|(a, b)| (*a == Endpoint::Node(node)) as usize + (*b == Endpoint::Node(node)) as usize)
            .sum()
    }

    pub fn is_phase_free(&self) -> bool {
        self.nodes.iter().all(|n| matches!(n, NodeKind::Z) || n.is_phase_free_h())
            && self.global.as_sqrt_d_power().is_some()
    }

    /// All invariant violations.
    pub fn validate(&self) -> Vec<Defect> {
        let mut out = Vec::new();
        let mut seen = vec![0usize; self.boundary.len()];
        for &(a, b) in &self.edges {
            for e in [a, b] {
                match e {
                    Endpoint::Node(n) if n >= self.nodes.len() => out.push(Defect::UnknownNode(n)),
                    Endpoint::Boundary(s) if s >= self.boundary.len() => out.push(Defect::UnknownSlot(s)),
                    Endpoint::Boundary(s) => seen[s] += 1,
                    _ => {}
                }
            }
        }
        for (s, &c) in seen.iter().enumerate() {
            if c == 0 {
                out.push(Defect::DanglingSlot(s));
            } else if c > 1 {
                out.push(Defect::SlotReused(s));
            }
        }
        let mut dims: Vec<u32> = vec![self.global.d()];
        for n in &self.nodes {
            if let NodeKind::H(l) = n {
                dims.push(l.d());
            }
        }
        for found in dims {
            if found != self.d {
                out.push(Defect::MixedDimension { found, expected: self.d });
            }
        }
        for r in &self.regions {
            if r.nodes.iter().any(|&n| n >= self.nodes.len()) {
                out.push(Defect::BadRegion(r.key.clone()));
            }
        }
        out
    }

    fn check_d(&self, other: &Diagram) -> Result<(), DiagramError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(DiagramError::Dimension(self.d, other.d))
        }
    }

    /// Disjoint union: boundary of `self` followed by `other`'s.
    pub(crate) fn union(&self, other: &Diagram) -> Diagram {
        let mut out = self.clone();
        out.absorb(other);
        out
    }

    /// In-place disjoint union.
    pub(crate) fn absorb(&mut self, other: &Diagram) {
        let no = self.nodes.len();
        let bo = self.boundary.len();
        let shift = |e: Endpoint| match e {
            Endpoint::Node(n) => Endpoint::Node(n + no),
            Endpoint::Boundary(s) => Endpoint::Boundary(s + bo),
        };
        self.nodes.extend(other.nodes.iter().cloned());
        self.edges.extend(other.edges.iter().map(|&(a, b)| (shift(a), shift(b))));
        self.boundary.extend(other.boundary.iter().cloned());
        if !other.global.is_one() {
            self.global = &self.global * &other.global;
        }
        self.regions.extend(
            other
                .regions
                .iter()
                .map(|r| Region { key: r.key.clone(), nodes: r.nodes.iter().map(|n| n + no).collect() }),
        );
    }

    /// Joins boundary slots pairwise; each pair is removed from the boundary and its
    /// two edges become one. Closed wire loops contribute a factor d each. The remaining
    /// boundary slots are ordered by `keep`.
    pub fn glue(&self, pairs: &[(usize, usize)], keep: &[usize]) -> Diagram {
        let mut partner: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in pairs {
            partner.insert(a, b);
            partner.insert(b, a);
        }
        let mut at_slot: HashMap<usize, Vec<(usize, bool)>> = HashMap::new();
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if let Endpoint::Boundary(s) = a {
                at_slot.entry(s).or_default().push((i, false));
            }
            if let Endpoint::Boundary(s) = b {
                at_slot.entry(s).or_default().push((i, true));
            }
        }
        let is_joint = |e: Endpoint| matches!(e, Endpoint::Boundary(s) if partner.contains_key(&s));
        let end = |i: usize, far: bool| if far { self.edges[i].1 } else { self.edges[i].0 };
        // follow the chain leaving edge `i` through its end `far`
        let walk = |mut i: usize, mut far: bool, used: &mut Vec<bool>| -> Option<Endpoint> {
            loop {
                used[i] = true;
                let e = end(i, far);
                let Endpoint::Boundary(s) = e else { return Some(e) };
                let Some(&p) = partner.get(&s) else { return Some(e) };
                let &(j, side) = at_slot.get(&p)?.first()?;
                if used[j] {
                    return None;
                }
                i = j;
                far = !side;
            }
        };
        let mut used = vec![false; self.edges.len()];
        let mut edges = Vec::new();
        let mut loops = 0u32;
        for i in 0..self.edges.len() {
            if used[i] {
                continue;
            }
            let (a, b) = self.edges[i];
            if !is_joint(a) && !is_joint(b) {
                used[i] = true;
                edges.push((a, b));
                continue;
            }
            let x = if is_joint(a) { walk(i, false, &mut used) } else { Some(a) };
            used[i] = false;
            let y = if is_joint(b) { walk(i, true, &mut used) } else { Some(b) };
            used[i] = true;
            match (x, y) {
                (Some(x), Some(y)) => edges.push((x, y)),
                _ => loops += 1,
            }
        }
        let remap: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let fix = |e: Endpoint| match e {
            Endpoint::Boundary(s) => Endpoint::Boundary(remap[&s]),
            n => n,
        };
        let mut out = self.clone();
        out.edges = edges.into_iter().map(|(a, b)| (fix(a), fix(b))).collect();
        out.boundary = keep.iter().map(|&s| self.boundary[s]).collect();
        for _ in 0..loops {
            out.scale(&Scalar::from_int(self.d, self.d));
        }
        out
    }

    /// `self` followed by `next`: outputs of `self` feed inputs of `next`.
    pub fn compose_seq(&self, next: &Diagram) -> Result<Diagram, DiagramError> {
        self.check_d(next)?;
        let outs = self.slots(Dir::Out);
        let ins = next.slots(Dir::In);
        if outs.len() != ins.len() {
            return Err(DiagramError::Signature(format!("{} outputs feeding {} inputs", outs.len(), ins.len())));
        }
        let u = self.union(next);
        let bo = self.boundary.len();
        let pairs: Vec<_> = outs.iter().zip(&ins).map(|(&a, &b)| (a, b + bo)).collect();
        let mut keep = self.slots(Dir::In);
        keep.extend(next.slots(Dir::Out).iter().map(|s| s + bo));
        Ok(u.glue(&pairs, &keep))
    }

    /// Tensor product; inputs of both, then outputs of both.
    pub fn compose_par(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        self.check_d(other)?;
        let u = self.union(other);
        let bo = self.boundary.len();
        let mut keep = self.slots(Dir::In);
        keep.extend(other.slots(Dir::In).iter().map(|s| s + bo));
        keep.extend(self.slots(Dir::Out));
        keep.extend(other.slots(Dir::Out).iter().map(|s| s + bo));
        Ok(u.glue(&[], &keep))
    }

    /// New slot i is old slot `order[i]`.
    pub fn permute_boundary(&self, order: &[usize]) -> Result<Diagram, DiagramError> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.boundary.len()).collect::<Vec<_>>() {
            return Err(DiagramError::Signature(format!("{order:?} is not a permutation of the boundary")));
        }
        Ok(self.glue(&[], order))
    }

    /// Turns the given slots from inputs to outputs or back. Flexsymmetry makes this
    /// the same as bending the leg with a cup or cap.
    pub fn bend(&self, slots: &[usize]) -> Diagram {
        let mut out = self.clone();
        for &s in slots {
            out.boundary[s] = out.boundary[s].flip();
        }
        out
    }

    /// Every leg bent, then reordered as inputs followed by outputs.
    pub fn transpose(&self) -> Diagram {
        let all: Vec<usize> = (0..self.boundary.len()).collect();
        self.bend(&all).inputs_first()
    }

    pub fn inputs_first(&self) -> Diagram {
        let mut order = self.slots(Dir::In);
        order.extend(self.slots(Dir::Out));
        self.glue(&[], &order)
    }

    /// Entrywise product: matching legs are joined through three-legged Z-spiders.
    pub fn schur_product(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        self.check_d(other)?;
        if self.boundary != other.boundary {
            return Err(DiagramError::Signature("schur product needs equal boundaries".into()));
        }
        let k = self.boundary.len();
        let mut u = self.union(other);
        let mut pairs = Vec::new();
        for s in 0..k {
            let z = u.add_z();
            u.attach(z, self.boundary[s]);
        }
        for s in 0..k {
            let z = u.nodes.len() - k + s;
            let t1 = u.attach(z, Dir::In);
            let t2 = u.attach(z, Dir::In);
            pairs.push((s, t1));
            pairs.push((k + s, t2));
        }
        let keep: Vec<usize> = (2 * k..3 * k).collect();
        Ok(u.glue(&pairs, &keep))
    }

    /// Marks all current nodes as one memoizable region. Existing regions stay as
    /// nested regions.
    pub fn with_region(mut self, key: &str) -> Diagram {
        self.regions.push(Region { key: key.to_string(), nodes: (0..self.nodes.len()).collect() });
        self
    }

    /// Removes nodes (and their edges), compacting ids. Regions touching removed
    /// nodes are dropped. Returns the old→new id map.
    pub fn remove_nodes(&mut self, dead: &[usize]) -> Vec<Option<usize>> {
        let mut map = vec![None; self.nodes.len()];
        let mut next = 0;
        let mut kept = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if !dead.contains(&i) {
                map[i] = Some(next);
                next += 1;
                kept.push(n.clone());
            }
        }
        self.nodes = kept;
        self.edges = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                let f = |e: Endpoint| match e {
                    Endpoint::Node(n) => map[n].map(Endpoint::Node),
                    s => Some(s),
                };
                Some((f(a)?, f(b)?))
            })
            .collect();
        self.regions.retain(|r| r.nodes.iter().all(|&n| map[n].is_some()));
        for r in &mut self.regions {
            for n in &mut r.nodes {
                *n = map[*n].unwrap();
            }
        }
        map
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}
