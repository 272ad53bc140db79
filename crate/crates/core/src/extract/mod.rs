//! Translation between phase-free ZH diagrams and circuits over |0⟩-controlled X,
//! H, |0⟩-preparation and ⟨0|-postselection.

mod json;
#[cfg(test)]
mod tests;

pub use json::{post_circuit_from_json, post_circuit_to_json};

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::diagram::{self as dg, Diagram, DiagramError, Dir, Endpoint, NodeKind};
use crate::eval::{EvalError, Tensor};
use crate::revcomp::{lower, Circuit, Gate, RevError, SIM_CAP_ENTRIES};
use crate::ring::{RingError, Scalar};
use crate::synth::build::Net;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("unsupported gate: {0}")]
    Unsupported(String),
    #[error("node {0} is a labelled H-box; synthesize it first")]
    Labelled(usize),
    #[error("global scalar {0} is not a root of unity times a power of √d")]
    Scalar(String),
    #[error("malformed circuit: {0}")]
    Malformed(String),
    #[error("simulation needs more than {0} amplitudes")]
    TooLarge(usize),
    #[error(transparent)]
    Rev(#[from] RevError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    /// A fresh wire in |0⟩.
    Prep(usize),
    Gate(Gate),
    /// Projects onto ⟨0| and ends the wire.
    Post(usize),
}

/// A circuit with preparations and postselections. Boundary slots follow diagram
/// order: an `In` slot is a wire live at the start, an `Out` slot a wire live at
/// the end. The diagram it came from satisfies ⟦D⟧ = √d^k·⟦circuit⟧.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostCircuit {
    pub d: u32,
    pub n_wires: usize,
    pub slots: Vec<(Dir, usize)>,
    pub ops: Vec<Op>,
    pub k: i64,
}

impl PostCircuit {
    pub fn new(d: u32) -> PostCircuit {
        PostCircuit { d, n_wires: 0, slots: Vec::new(), ops: Vec::new(), k: 0 }
    }

    fn fresh(&mut self) -> usize {
        self.n_wires += 1;
        self.n_wires - 1
    }

    fn prep(&mut self) -> usize {
        let w = self.fresh();
        self.ops.push(Op::Prep(w));
        w
    }

    fn input(&mut self) -> usize {
        let w = self.fresh();
        self.slots.push((Dir::In, w));
        w
    }

    fn gate(&mut self, g: Gate) {
        self.ops.push(Op::Gate(g));
    }

    fn post(&mut self, w: usize) {
        self.ops.push(Op::Post(w));
    }

    fn h(&mut self, w: usize, times: usize) {
        for _ in 0..times {
            self.gate(Gate::H(w));
        }
    }

    /// Σ_i ⟨i| = √d·⟨0|H.
    fn discard(&mut self, w: usize) {
        self.h(w, 1);
        self.post(w);
        self.k += 1;
    }

    /// Σ_i ⟨i, i|; H² turns a into −a so the CX leaves b − a.
    fn cap(&mut self, a: usize, b: usize) {
        self.h(b, 2);
        self.gate(Gate::CX { c: a, t: b });
        self.post(b);
        self.discard(a);
    }

    /// Σ_i |i, i⟩ = √d·CX(H|0⟩ ⊗ |0⟩).
    fn cup(&mut self) -> (usize, usize) {
        let a = self.prep();
        let b = self.prep();
        self.h(a, 1);
        self.gate(Gate::CX { c: a, t: b });
        self.k += 1;
        (a, b)
    }

    /// `target` (in |0⟩) gains the product of `factors`; scratch wires are
    /// uncomputed and postselected.
    fn product_into(&mut self, factors: &[usize], target: usize) {
        let d = self.d as usize;
        match factors {
            [] => self.gate(Gate::X(target)),
            [a] => self.gate(Gate::CX { c: *a, t: target }),
            [a, b] => self.gate(Gate::Toffoli { a: *a, b: *b, t: target }),
            _ => {
                let n = factors.len();
                let mut scratch = Vec::new();
                let mut acc = factors[0];
                for &f in &factors[1..n - 1] {
                    let s = self.prep();
                    self.gate(Gate::Toffoli { a: acc, b: f, t: s });
                    scratch.push((acc, f, s));
                    acc = s;
                }
                self.gate(Gate::Toffoli { a: acc, b: factors[n - 1], t: target });
                for &(a, b, s) in scratch.iter().rev() {
                    for _ in 1..d {
                        self.gate(Gate::Toffoli { a, b, t: s });
                    }
                    self.post(s);
                }
            }
        }
    }

    /// A Z-spider from `ins` to `m` new output wires.
    fn z_node(&mut self, ins: &[usize], m: usize) -> Vec<usize> {
        let main = match ins.first() {
            Some(&w) => w,
            None => {
                let w = self.prep();
                self.h(w, 1);
                self.k += 1;
                w
            }
        };
        for &w in ins.iter().skip(1) {
            self.h(w, 2);
            self.gate(Gate::CX { c: main, t: w });
            self.post(w);
        }
        if m == 0 {
            self.discard(main);
            return Vec::new();
        }
        let mut outs = vec![main];
        for _ in 1..m {
            let f = self.prep();
            self.gate(Gate::CX { c: main, t: f });
            outs.push(f);
        }
        outs
    }

    /// A phase-free H-box from `ins` to `m` new output wires.
    fn h_node(&mut self, ins: &[usize], m: usize) -> Vec<usize> {
        match (ins, m) {
            ([], 0) => {
                let w = self.prep();
                self.gate(Gate::X(w));
                self.h(w, 1);
                self.gate(Gate::Xinv(w));
                self.post(w);
                Vec::new()
            }
            ([], 1) => {
                let w = self.prep();
                self.gate(Gate::X(w));
                self.h(w, 1);
                vec![w]
            }
            ([x], 0) => {
                self.h(*x, 1);
                self.gate(Gate::Xinv(*x));
                self.post(*x);
                Vec::new()
            }
            ([x], 1) => {
                self.h(*x, 1);
                vec![*x]
            }
            (_, 0) => {
                let p = self.prep();
                self.product_into(ins, p);
                self.h(p, 1);
                self.gate(Gate::Xinv(p));
                self.post(p);
                for &x in ins {
                    self.discard(x);
                }
                Vec::new()
            }
            _ => {
                let ys: Vec<usize> = (0..m).map(|_| self.prep()).collect();
                let mut factors = ins.to_vec();
                for &y in &ys[..m - 1] {
                    self.h(y, 1);
                    factors.push(y);
                }
                self.product_into(&factors, ys[m - 1]);
                self.h(ys[m - 1], 1);
                self.k += (m - 1) as i64;
                for &x in ins {
                    self.discard(x);
                }
                ys
            }
        }
    }

    pub fn inputs(&self) -> Vec<usize> {
        self.slot_wires(Dir::In)
    }

    pub fn outputs(&self) -> Vec<usize> {
        self.slot_wires(Dir::Out)
    }

    fn slot_wires(&self, dir: Dir) -> Vec<usize> {
        self.slots.iter().filter(|(s, _)| *s == dir).map(|&(_, w)| w).collect()
    }

    pub fn gate_count(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Gate(_))).count()
    }

    pub fn postselections(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Post(_))).count()
    }

    pub fn is_native(&self) -> bool {
        self.ops.iter().all(|o| !matches!(o, Op::Gate(g) if !g.is_native()))
    }

    /// Checks wire lifetimes: each wire is an input or prepared once, gates touch
    /// live wires only, and exactly the output wires survive.
    pub fn validate(&self) -> Result<(), ExtractError> {
        let bad = |m: String| Err(ExtractError::Malformed(m));
        let mut live: HashSet<usize> = HashSet::new();
        let mut seen: HashSet<usize> = HashSet::new();
        for w in self.inputs() {
            if w >= self.n_wires || !live.insert(w) {
                return bad(format!("input wire {w} out of range or repeated"));
            }
            seen.insert(w);
        }
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                Op::Prep(w) => {
                    if *w >= self.n_wires || !seen.insert(*w) {
                        return bad(format!("op {i} prepares wire {w} twice or out of range"));
                    }
                    live.insert(*w);
                }
                Op::Post(w) => {
                    if !live.remove(w) {
                        return bad(format!("op {i} postselects dead wire {w}"));
                    }
                }
                Op::Gate(g) => {
                    let ws = g.wires();
                    if ws.iter().any(|w| !live.contains(w)) {
                        return bad(format!("op {i} acts on a dead wire"));
                    }
                    let mut s = ws.clone();
                    s.sort_unstable();
                    s.dedup();
                    if s.len() != ws.len() {
                        return bad(format!("op {i} repeats a wire"));
                    }
                }
            }
        }
        let outs = self.outputs();
        let out_set: HashSet<usize> = outs.iter().copied().collect();
        if out_set.len() != outs.len() || out_set != live {
            return bad("live wires at the end differ from the outputs".into());
        }
        Ok(())
    }

    /// Every gate rewritten into |0⟩-controlled X and H. The scratch wires the gadgets
    /// need are prepared first and postselected last.
    pub fn lowered(&self) -> Result<PostCircuit, ExtractError> {
        self.validate()?;
        let n = self.n_wires;
        let mut body = Vec::new();
        let mut extra = 0;
        for op in &self.ops {
            match op {
                Op::Gate(g) if !g.is_native() => {
                    let c = Circuit { d: self.d, n_wires: n, ancillae: Vec::new(), gates: vec![g.clone()] };
                    let low = lower(&c)?;
                    extra = extra.max(low.n_wires - n);
                    body.extend(low.gates.into_iter().map(Op::Gate));
                }
                _ => body.push(op.clone()),
            }
        }
        let work: Vec<usize> = (n..n + extra).collect();
        let mut ops: Vec<Op> = work.iter().map(|&w| Op::Prep(w)).collect();
        ops.extend(body);
        ops.extend(work.iter().map(|&w| Op::Post(w)));
        Ok(PostCircuit { d: self.d, n_wires: n + extra, slots: self.slots.clone(), ops, k: self.k })
    }

    /// Wires renamed to the fewest slots that keep every live range apart; a slot
    /// freed by a postselection holds 0, ready for the next preparation.
    fn packed(&self) -> (Vec<Op>, usize, HashMap<usize, usize>) {
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut free: Vec<usize> = Vec::new();
        let mut width = 0;
        let mut take = |free: &mut Vec<usize>| {
            free.pop().unwrap_or_else(|| {
                width += 1;
                width - 1
            })
        };
        for w in self.inputs() {
            let s = take(&mut free);
            slot.insert(w, s);
        }
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            ops.push(match op {
                Op::Prep(w) => {
                    let s = take(&mut free);
                    slot.insert(*w, s);
                    Op::Prep(s)
                }
                Op::Post(w) => {
                    let s = slot.remove(w).expect("validated");
                    free.push(s);
                    Op::Post(s)
                }
                Op::Gate(g) => Op::Gate(g.map_wires(&|w| slot[&w])),
            });
        }
        (ops, width, slot)
    }

    /// The circuit's map by sparse simulation, boundary in slot order.
    pub fn tensor(&self) -> Result<Tensor, ExtractError> {
        self.validate()?;
        let d = self.d;
        let (ops, width, live) = self.packed();
        let ins: Vec<usize> = (0..self.inputs().len()).collect();
        let nin = ins.len();
        let mut state: HashMap<Vec<u32>, Scalar> = HashMap::new();
        for x in crate::revcomp::ditstrings(d, nin) {
            let mut key = x.clone();
            key.resize(nin + width, 0);
            for (&w, &v) in ins.iter().zip(&x) {
                key[nin + w] = v;
            }
            state.insert(key, Scalar::one(d));
        }
        let inv_sqrt = Scalar::sqrt_d_pow(d, -1);
        let mut i = 0;
        while i < ops.len() {
            match &ops[i] {
                Op::Prep(_) => i += 1,
                Op::Post(w) => {
                    state.retain(|k, _| k[nin + w] == 0);
                    i += 1;
                }
                Op::Gate(Gate::H(w)) => {
                    let mut next: HashMap<Vec<u32>, Scalar> = HashMap::new();
                    for (mut key, amp) in state {
                        let x = key[nin + w];
                        let a = &amp * &inv_sqrt;
                        for y in 0..d {
                            key[nin + w] = y;
                            let v = &a * &Scalar::omega(d, (x * y) as i64);
                            match next.get_mut(&key) {
                                Some(s) => *s = s.checked_add(&v)?,
                                None => {
                                    next.insert(key.clone(), v);
                                }
                            }
                        }
                    }
                    next.retain(|_, a| !a.is_zero());
                    if next.len() > SIM_CAP_ENTRIES {
                        return Err(ExtractError::TooLarge(SIM_CAP_ENTRIES));
                    }
                    state = next;
                    i += 1;
                }
                Op::Gate(_) => {
                    let mut j = i;
                    while matches!(ops.get(j), Some(Op::Gate(g)) if !matches!(g, Gate::H(_))) {
                        j += 1;
                    }
                    let block: Vec<&Gate> = ops[i..j]
                        .iter()
                        .map(|o| match o {
                            Op::Gate(g) => g,
                            _ => unreachable!(),
                        })
                        .collect();
                    state = state
                        .into_iter()
                        .map(|(mut key, amp)| {
                            for g in &block {
                                g.apply_classical(d, &mut key[nin..])
                                    .ok_or_else(|| ExtractError::Unsupported(format!("{g:?}")))?;
                            }
                            Ok((key, amp))
                        })
                        .collect::<Result<_, ExtractError>>()?;
                    i = j;
                }
            }
        }
        let mut t = Tensor::zeros(d, self.slots.len());
        for (key, amp) in state {
            let mut in_pos = 0;
            let idx: Vec<u32> = self
                .slots
                .iter()
                .map(|&(dir, w)| match dir {
                    Dir::In => {
                        in_pos += 1;
                        key[in_pos - 1]
                    }
                    Dir::Out => key[nin + live[&w]],
                })
                .collect();
            let pos = t.offset(&idx);
            t.data[pos] = amp;
        }
        Ok(t)
    }

    /// ⟦D⟧ for the diagram this circuit came from: √d^k times the circuit's map.
    pub fn diagram_tensor(&self) -> Result<Tensor, ExtractError> {
        Ok(self.tensor()?.scale(&Scalar::sqrt_d_pow(self.d, self.k)))
    }
}

fn gate_diagram(d: u32, g: &Gate) -> Result<Diagram, ExtractError> {
    let mut net = Net::new(d);
    let outs = match g {
        Gate::H(_) => return Ok(dg::hadamard(d)),
        Gate::X(_) => return Ok(dg::pauli_x(d)),
        Gate::Xinv(_) => return Ok(dg::pauli_x_pow(d, d - 1)),
        Gate::CX { .. } => {
            let c = net.input();
            let t = net.input();
            let cs = net.fan(c, 2);
            let s = net.plus(t, cs[1]);
            vec![cs[0], s]
        }
        Gate::ZeroCtrlX { .. } | Gate::ZeroCtrlXinv { .. } => {
            let c = net.input();
            let t = net.input();
            let cs = net.fan(c, 2);
            let nonzero = net.power(cs[1], d - 1);
            let t = if matches!(g, Gate::ZeroCtrlX { .. }) {
                let neg = net.negate(nonzero);
                let s = net.plus(t, neg);
                net.add1(&dg::add_const(d, 1), &[s])
            } else {
                let s = net.plus(t, nonzero);
                net.add1(&dg::add_const(d, d - 1), &[s])
            };
            vec![cs[0], t]
        }
        Gate::Toffoli { .. } => {
            let a = net.input();
            let b = net.input();
            let t = net.input();
            let as_ = net.fan(a, 2);
            let bs = net.fan(b, 2);
            let p = net.times(as_[1], bs[1]);
            let s = net.plus(t, p);
            vec![as_[0], bs[0], s]
        }
        other => return Err(ExtractError::Unsupported(format!("{other:?}"))),
    };
    Ok(net.finish(&outs))
}

/// Gate diagrams depend only on the gate kind, never on its wires.
#[derive(Default)]
struct GadgetCache(HashMap<std::mem::Discriminant<Gate>, Diagram>);

impl GadgetCache {
    fn get(&mut self, d: u32, g: &Gate) -> Result<&Diagram, ExtractError> {
        let key = std::mem::discriminant(g);
        if let std::collections::hash_map::Entry::Vacant(e) = self.0.entry(key) {
            e.insert(gate_diagram(d, g)?);
        }
        Ok(&self.0[&key])
    }
}

/// Per-gate translation; the boundary is every wire's input then every wire's
/// output, and the tensor equals the circuit's unitary exactly.
pub fn circuit_to_zh(c: &Circuit) -> Result<Diagram, ExtractError> {
    c.validate()?;
    let mut net = Net::new(c.d);
    let mut gadgets = GadgetCache::default();
    let mut cur: Vec<usize> = (0..c.n_wires).map(|_| net.input()).collect();
    for g in &c.gates {
        let ws = g.wires();
        let args: Vec<usize> = ws.iter().map(|&w| cur[w]).collect();
        let outs = net.add(gadgets.get(c.d, g)?, &args);
        for (&w, o) in ws.iter().zip(outs) {
            cur[w] = o;
        }
    }
    Ok(net.finish(&cur))
}

/// The diagram of a postselected circuit, boundary in slot order, with the same
/// tensor as the circuit (the recorded k is not applied).
pub fn post_circuit_to_zh(pc: &PostCircuit) -> Result<Diagram, ExtractError> {
    pc.validate()?;
    let d = pc.d;
    let mut net = Net::new(d);
    let mut gadgets = GadgetCache::default();
    let mut cur: HashMap<usize, usize> = HashMap::new();
    for w in pc.inputs() {
        cur.insert(w, net.input());
    }
    for op in &pc.ops {
        match op {
            Op::Prep(w) => {
                let s = net.constant(0);
                cur.insert(*w, s);
            }
            Op::Post(w) => {
                net.add(&dg::effect(d, 0), &[cur[w]]);
            }
            Op::Gate(g) => {
                let ws = g.wires();
                let args: Vec<usize> = ws.iter().map(|w| cur[w]).collect();
                let outs = net.add(gadgets.get(d, g)?, &args);
                for (&w, o) in ws.iter().zip(outs) {
                    cur.insert(w, o);
                }
            }
        }
    }
    let outs: Vec<usize> = pc.outputs().iter().map(|w| cur[w]).collect();
    let g = net.finish(&outs);
    let nin = pc.inputs().len();
    let (mut i, mut o) = (0, nin);
    let order: Vec<usize> = pc
        .slots
        .iter()
        .map(|(dir, _)| match dir {
            Dir::In => {
                i += 1;
                i - 1
            }
            Dir::Out => {
                o += 1;
                o - 1
            }
        })
        .collect();
    Ok(g.permute_boundary(&order)?)
}

pub fn toffoli_zh(d: u32) -> Result<Diagram, ExtractError> {
    gate_diagram(d, &Gate::Toffoli { a: 0, b: 1, t: 2 })
}

/// The Toffoli with its target conjugated by Hadamards: |x,y,z⟩ ↦ ω^{xyz}|x,y,z⟩.
pub fn ccz_zh(d: u32) -> Result<Diagram, ExtractError> {
    let mut c = Circuit::new(d, 3);
    c.gates = vec![Gate::H(2), Gate::H(2), Gate::H(2), Gate::Toffoli { a: 0, b: 1, t: 2 }, Gate::H(2)];
    circuit_to_zh(&c)
}

fn require_odd_prime(d: u32) -> Result<(), ExtractError> {
    if d % 2 == 1 && crate::ring::is_prime(d) {
        Ok(())
    } else {
        Err(RevError::NotOddPrime(d).into())
    }
}

/// The phase-free H-box of the given arity: a scalar for 0 legs, a state for 1,
/// otherwise one input leg and the rest outputs. Lowered to native gates.
pub fn hbox_to_circuit(arity: usize, d: u32) -> Result<PostCircuit, ExtractError> {
    require_odd_prime(d)?;
    let mut pc = PostCircuit::new(d);
    let ins: Vec<usize> = if arity >= 2 { vec![pc.input()] } else { Vec::new() };
    let outs = pc.h_node(&ins, arity - ins.len());
    pc.slots.extend(outs.into_iter().map(|w| (Dir::Out, w)));
    pc.lowered()
}

/// A Z-spider as a CX ladder with merges, lowered to native gates.
pub fn zspider_to_circuit(n_in: usize, n_out: usize, d: u32) -> Result<PostCircuit, ExtractError> {
    require_odd_prime(d)?;
    let mut pc = PostCircuit::new(d);
    let ins: Vec<usize> = (0..n_in).map(|_| pc.input()).collect();
    let outs = pc.z_node(&ins, n_out);
    pc.slots.extend(outs.into_iter().map(|w| (Dir::Out, w)));
    pc.lowered()
}

/// Structural extraction with high-level gates (CX, Toffoli, X) left in place.
pub fn zh_to_post_circuit(g: &Diagram) -> Result<PostCircuit, ExtractError> {
    require_odd_prime(g.d)?;
    let d = g.d;
    for (i, n) in g.nodes.iter().enumerate() {
        if !matches!(n, NodeKind::Z) && !n.is_phase_free_h() {
            return Err(ExtractError::Labelled(i));
        }
    }
    let defects = g.validate();
    if !defects.is_empty() {
        return Err(DiagramError::Malformed(format!("{defects:?}")).into());
    }
    let mut pc = PostCircuit::new(d);

    let global = g.global.clone();
    let e = global.halfpow();
    let unit = &global * &Scalar::sqrt_d_pow(d, -e);
    match (global.as_sqrt_d_power(), unit.as_root_of_unity()) {
        (Some(e), _) => pc.k += e,
        (None, Some((1, j))) => {
            pc.k += e;
            for _ in 0..j {
                pc.h_node(&[], 0);
                pc.k += 1;
            }
        }
        _ => return Err(ExtractError::Scalar(global.to_string())),
    }

    // wire carrying each edge once its producing end has been placed
    let mut carried: Vec<Option<usize>> = vec![None; g.edges.len()];
    let mut slot_wire: Vec<Option<usize>> = vec![None; g.boundary.len()];
    let mut edge_at_slot: Vec<usize> = vec![0; g.boundary.len()];
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        for end in [a, b] {
            if let Endpoint::Boundary(s) = end {
                edge_at_slot[s] = e;
            }
        }
    }
    for (s, &dir) in g.boundary.iter().enumerate() {
        if dir == Dir::In {
            let w = pc.fresh();
            slot_wire[s] = Some(w);
            let e = edge_at_slot[s];
            if carried[e].is_none() {
                carried[e] = Some(w);
            } else {
                let other = carried[e].take().unwrap();
                pc.cap(other, w);
            }
        }
    }
    let mut legs: Vec<Vec<usize>> = vec![Vec::new(); g.nodes.len()];
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        for end in [a, b] {
            if let Endpoint::Node(n) = end {
                legs[n].push(e);
            }
        }
    }
    let mut placed = vec![false; g.nodes.len()];
    for v in 0..g.nodes.len() {
        let mut ins = Vec::new();
        let mut out_edges = Vec::new();
        for &e in &legs[v] {
            let (a, b) = g.edges[e];
            let other = if a == Endpoint::Node(v) { b } else { a };
            let fed = match other {
                Endpoint::Node(n) => n != v && placed[n],
                Endpoint::Boundary(s) => g.boundary[s] == Dir::In,
            };
            if fed {
                ins.push(carried[e].take().expect("producer placed"));
            } else {
                out_edges.push(e);
            }
        }
        let outs = match g.nodes[v] {
            NodeKind::Z => pc.z_node(&ins, out_edges.len()),
            NodeKind::H(_) => pc.h_node(&ins, out_edges.len()),
        };
        for (&e, w) in out_edges.iter().zip(outs) {
            match carried[e].take() {
                Some(other) => pc.cap(other, w),
                None => carried[e] = Some(w),
            }
        }
        placed[v] = true;
    }
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        if let (Endpoint::Boundary(s), Endpoint::Boundary(t)) = (a, b) {
            if g.boundary[s] == Dir::Out && g.boundary[t] == Dir::Out {
                let (x, y) = pc.cup();
                slot_wire[s] = Some(x);
                slot_wire[t] = Some(y);
                continue;
            }
        }
        for end in [a, b] {
            if let Endpoint::Boundary(s) = end {
                if g.boundary[s] == Dir::Out {
                    slot_wire[s] = Some(carried[e].take().expect("edge produced"));
                }
            }
        }
    }
    pc.slots = g.boundary.iter().zip(&slot_wire).map(|(&dir, w)| (dir, w.expect("slot wired"))).collect();
    pc.validate()?;
    Ok(pc)
}

/// A native circuit whose map times √d^k is ⟦g⟧.
pub fn zh_to_circuit(g: &Diagram) -> Result<PostCircuit, ExtractError> {
    zh_to_post_circuit(g)?.lowered()
}

/// A random circuit over H, |0⟩-controlled X and its inverse.
pub fn random_circuit(d: u32, rng: &mut impl rand::Rng, max_wires: usize, n_gates: usize) -> Circuit {
    let n = rng.gen_range(1..=max_wires);
    let mut c = Circuit::new(d, n);
    for _ in 0..n_gates {
        let a = rng.gen_range(0..n);
        if n == 1 {
            c.gates.push(Gate::H(a));
            continue;
        }
        let b = (a + rng.gen_range(1..n)) % n;
        c.gates.push(match rng.gen_range(0..3) {
            0 => Gate::H(a),
            1 => Gate::ZeroCtrlX { c: a, t: b },
            _ => Gate::ZeroCtrlXinv { c: a, t: b },
        });
    }
    c
}
