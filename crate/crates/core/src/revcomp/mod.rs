//! Classical reversible qudit logic over |0⟩-controlled X gates: gate model, exact
//! simulator, gadget library and permutation compiler.

mod compile;
mod gadgets;
mod json;

pub use compile::{
    compile_permutation, gate_count, lower, lower_bound, Permutation, LOWER_BOUND_SLOTS, PERM_GATE_CONSTANT,
};
pub use gadgets::{
    clifford_generators, ctrl_x01_family, multi_ctrl, p3_gadget, toffoli, two_cycle, CliffordGadgets, X01Family,
};
pub use json::{circuit_from_json, circuit_to_json, permutation_from_json, permutation_to_json};
pub(crate) use json::{gate_repr, parse_gate, GateRepr};

use std::collections::HashMap;

use thiserror::Error;

use crate::eval::Tensor;
use crate::ring::{is_prime, RingError, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RevError {
    #[error("dimension {0} must be an odd prime")]
    NotOddPrime(u32),
    #[error("need {need} borrowed wires, got {have}")]
    InsufficientAncillae { need: usize, have: usize },
    #[error("malformed circuit: {0}")]
    Malformed(String),
    #[error("table is not a bijection: {0}")]
    NotBijective(String),
    #[error("a two-cycle needs two different ditstrings")]
    SameStrings,
    #[error("unsupported gate: {0}")]
    Unsupported(String),
    #[error("circuit contains a Hadamard; use the state simulator")]
    NonClassical,
    #[error("state has {0} wires, beyond the simulation cap")]
    TooLarge(usize),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

pub(crate) fn require_odd_prime(d: u32) -> Result<(), RevError> {
    if d % 2 == 1 && is_prime(d) {
        Ok(())
    } else {
        Err(RevError::NotOddPrime(d))
    }
}

/// Which control values fire a controlled gate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ctrl {
    /// Body applied once when the control holds one of these values.
    Values(Vec<u32>),
    /// Body applied x times for control value x.
    Lambda,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    X(usize),
    Xinv(usize),
    X01(usize),
    /// Exchanges the basis values `a` and `b` on one wire.
    Swap {
        w: usize,
        a: u32,
        b: u32,
    },
    H(usize),
    CX {
        c: usize,
        t: usize,
    },
    ZeroCtrlX {
        c: usize,
        t: usize,
    },
    ZeroCtrlXinv {
        c: usize,
        t: usize,
    },
    /// |x, y, z⟩ ↦ |x, y, z + x·y⟩.
    Toffoli {
        a: usize,
        b: usize,
        t: usize,
    },
    CtrlU {
        control: usize,
        on: Ctrl,
        body: Box<Gate>,
    },
}

impl Gate {
    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::X(w) | Gate::Xinv(w) | Gate::X01(w) | Gate::H(w) | Gate::Swap { w, .. } => vec![*w],
            Gate::CX { c, t } | Gate::ZeroCtrlX { c, t } | Gate::ZeroCtrlXinv { c, t } => vec![*c, *t],
            Gate::Toffoli { a, b, t } => vec![*a, *b, *t],
            Gate::CtrlU { control, body, .. } => {
                let mut w = vec![*control];
                w.extend(body.wires());
                w
            }
        }
    }

    /// The same gate with every wire index sent through `f`.
    pub fn map_wires(&self, f: &impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::X(w) => Gate::X(f(*w)),
            Gate::Xinv(w) => Gate::Xinv(f(*w)),
            Gate::X01(w) => Gate::X01(f(*w)),
            Gate::H(w) => Gate::H(f(*w)),
            Gate::Swap { w, a, b } => Gate::Swap { w: f(*w), a: *a, b: *b },
            Gate::CX { c, t } => Gate::CX { c: f(*c), t: f(*t) },
            Gate::ZeroCtrlX { c, t } => Gate::ZeroCtrlX { c: f(*c), t: f(*t) },
            Gate::ZeroCtrlXinv { c, t } => Gate::ZeroCtrlXinv { c: f(*c), t: f(*t) },
            Gate::Toffoli { a, b, t } => Gate::Toffoli { a: f(*a), b: f(*b), t: f(*t) },
            Gate::CtrlU { control, on, body } => {
                Gate::CtrlU { control: f(*control), on: on.clone(), body: Box::new(body.map_wires(f)) }
            }
        }
    }

    pub fn is_native(&self) -> bool {
        matches!(self, Gate::H(_) | Gate::ZeroCtrlX { .. } | Gate::ZeroCtrlXinv { .. })
    }

    /// Classical action on a basis state; `None` for H.
    pub fn apply_classical(&self, d: u32, s: &mut [u32]) -> Option<()> {
        let add = |v: u32, k: u32| (v + k) % d;
        match *self {
            Gate::X(w) => s[w] = add(s[w], 1),
            Gate::Xinv(w) => s[w] = add(s[w], d - 1),
            Gate::X01(w) => s[w] = swap_value(s[w], 0, 1),
            Gate::Swap { w, a, b } => s[w] = swap_value(s[w], a, b),
            Gate::H(_) => return None,
            Gate::CX { c, t } => s[t] = add(s[t], s[c]),
            Gate::ZeroCtrlX { c, t } => {
                if s[c] == 0 {
                    s[t] = add(s[t], 1)
                }
            }
            Gate::ZeroCtrlXinv { c, t } => {
                if s[c] == 0 {
                    s[t] = add(s[t], d - 1)
                }
            }
            Gate::Toffoli { a, b, t } => s[t] = add(s[t], s[a] * s[b] % d),
            Gate::CtrlU { control, ref on, ref body } => {
                let times = match on {
                    Ctrl::Values(vs) => vs.contains(&s[control]) as u32,
                    Ctrl::Lambda => s[control],
                };
                for _ in 0..times {
                    body.apply_classical(d, s)?;
                }
            }
        }
        Some(())
    }
}

fn swap_value(v: u32, a: u32, b: u32) -> u32 {
    if v == a {
        b
    } else if v == b {
        a
    } else {
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncillaKind {
    /// Starts and must end in |0⟩.
    Zeroed,
    /// Arbitrary initial value, restored at the end.
    Borrowed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ancilla {
    pub wire: usize,
    pub kind: AncillaKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub d: u32,
    pub n_wires: usize,
    pub ancillae: Vec<Ancilla>,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(d: u32, n_wires: usize) -> Self {
        Circuit { d, n_wires, ancillae: Vec::new(), gates: Vec::new() }
    }

    pub fn validate(&self) -> Result<(), RevError> {
        for (i, g) in self.gates.iter().enumerate() {
            let ws = g.wires();
            if ws.iter().any(|&w| w >= self.n_wires) {
                return Err(RevError::Malformed(format!("gate {i} uses a wire out of range")));
            }
            let mut sorted = ws.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != ws.len() {
                return Err(RevError::Malformed(format!("gate {i} repeats a wire")));
            }
            if let Gate::Swap { a, b, .. } = g {
                if *a >= self.d || *b >= self.d {
                    return Err(RevError::Malformed(format!("gate {i} swaps values outside Z_d")));
                }
            }
        }
        if self.ancillae.iter().any(|a| a.wire >= self.n_wires) {
            return Err(RevError::Malformed("ancilla wire out of range".into()));
        }
        Ok(())
    }

    /// Wires that are not ancillae, in order.
    pub fn data_wires(&self) -> Vec<usize> {
        (0..self.n_wires).filter(|w| !self.ancillae.iter().any(|a| a.wire == *w)).collect()
    }

    pub fn ancilla_wires(&self, kind: AncillaKind) -> Vec<usize> {
        self.ancillae.iter().filter(|a| a.kind == kind).map(|a| a.wire).collect()
    }

    /// Basis-state simulation for circuits without Hadamards.
    pub fn run_classical(&self, input: &[u32]) -> Result<Vec<u32>, RevError> {
        if input.len() != self.n_wires {
            return Err(RevError::Malformed(format!("{} values for {} wires", input.len(), self.n_wires)));
        }
        let mut s = input.to_vec();
        for g in &self.gates {
            g.apply_classical(self.d, &mut s).ok_or(RevError::NonClassical)?;
        }
        Ok(s)
    }

    /// The inverse circuit (gates reversed and inverted).
    pub fn inverse(&self) -> Circuit {
        let mut out = self.clone();
        out.gates = self.gates.iter().rev().flat_map(|g| invert(self.d, g)).collect();
        out
    }
}

fn invert(d: u32, g: &Gate) -> Vec<Gate> {
    match g {
        Gate::X(w) => vec![Gate::Xinv(*w)],
        Gate::Xinv(w) => vec![Gate::X(*w)],
        Gate::ZeroCtrlX { c, t } => vec![Gate::ZeroCtrlXinv { c: *c, t: *t }],
        Gate::ZeroCtrlXinv { c, t } => vec![Gate::ZeroCtrlX { c: *c, t: *t }],
        Gate::H(w) => vec![Gate::H(*w); 3],
        Gate::CX { .. } | Gate::Toffoli { .. } => vec![g.clone(); d as usize - 1],
        Gate::CtrlU { control, on, body } => invert(d, body)
            .into_iter()
            .map(|b| Gate::CtrlU { control: *control, on: on.clone(), body: Box::new(b) })
            .collect(),
        _ => vec![g.clone()],
    }
}

/// Largest wire count the dense simulator accepts.
pub const SIM_CAP_ENTRIES: usize = 1 << 22;

/// Exact state after running `c` on a basis input, as a tensor over all wires.
pub fn simulate(c: &Circuit, input: &[u32]) -> Result<Tensor, RevError> {
    c.validate()?;
    let d = c.d;
    if input.len() != c.n_wires {
        return Err(RevError::Malformed(format!("{} values for {} wires", input.len(), c.n_wires)));
    }
    if (d as f64).powi(c.n_wires as i32) > SIM_CAP_ENTRIES as f64 {
        return Err(RevError::TooLarge(c.n_wires));
    }
    let mut state: HashMap<Vec<u32>, Scalar> = HashMap::from([(input.to_vec(), Scalar::one(d))]);
    let inv_sqrt = Scalar::sqrt_d_pow(d, -1);
    for g in &c.gates {
        let mut next: HashMap<Vec<u32>, Scalar> = HashMap::new();
        for (mut key, amp) in state {
            if let Gate::H(w) = *g {
                let x = key[w];
                for y in 0..d {
                    key[w] = y;
                    let a = &(&amp * &inv_sqrt) * &Scalar::omega(d, (x * y) as i64);
                    accumulate(&mut next, key.clone(), a)?;
                }
            } else {
                g.apply_classical(d, &mut key).expect("classical gate");
                accumulate(&mut next, key, amp)?;
            }
        }
        next.retain(|_, a| !a.is_zero());
        state = next;
    }
    let mut t = Tensor::zeros(d, c.n_wires);
    for (key, amp) in state {
        let pos = t.offset(&key);
        t.data[pos] = amp;
    }
    Ok(t)
}

/// The full map ⟨y|c|x⟩ over all wires, axes (x, y).
pub fn unitary(c: &Circuit) -> Result<Tensor, RevError> {
    let n = c.n_wires;
    if (c.d as f64).powi(2 * n as i32) > SIM_CAP_ENTRIES as f64 {
        return Err(RevError::TooLarge(n));
    }
    let mut t = Tensor::zeros(c.d, 2 * n);
    for x in ditstrings(c.d, n) {
        let out = simulate(c, &x)?;
        for (pos, a) in out.data.iter().enumerate() {
            let mut idx = x.clone();
            idx.extend(out.index(pos));
            let o = t.offset(&idx);
            t.data[o] = a.clone();
        }
    }
    Ok(t)
}

fn accumulate(m: &mut HashMap<Vec<u32>, Scalar>, key: Vec<u32>, a: Scalar) -> Result<(), RevError> {
    match m.get_mut(&key) {
        Some(v) => *v = v.checked_add(&a)?,
        None => {
            m.insert(key, a);
        }
    }
    Ok(())
}

/// All ditstrings of length n in big-endian order.
pub fn ditstrings(d: u32, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (d as usize).pow(n as u32);
    (0..total).map(move |mut i| {
        let mut v = vec![0; n];
        for k in (0..n).rev() {
            v[k] = (i % d as usize) as u32;
            i /= d as usize;
        }
        v
    })
}

/// Checks that `c` maps every data input x to `f(x)` on the data wires, for every
/// initial value of the borrowed wires, returning zeroed ancillae to |0⟩ and
/// borrowed ones to their initial value.
pub fn verify_classical(c: &Circuit, f: impl Fn(&[u32]) -> Vec<u32>) -> Result<(), String> {
    let data = c.data_wires();
    let borrowed = c.ancilla_wires(AncillaKind::Borrowed);
    for x in ditstrings(c.d, data.len()) {
        let want = f(&x);
        for bv in ditstrings(c.d, borrowed.len()) {
            let mut s = vec![0; c.n_wires];
            for (&w, &v) in data.iter().zip(&x) {
                s[w] = v;
            }
            for (&w, &v) in borrowed.iter().zip(&bv) {
                s[w] = v;
            }
            let start = s.clone();
            let out = c.run_classical(&s).map_err(|e| e.to_string())?;
            let got: Vec<u32> = data.iter().map(|&w| out[w]).collect();
            if got != want {
                return Err(format!("input {x:?} (borrowed {bv:?}) gave {got:?}, expected {want:?}"));
            }
            for a in &c.ancillae {
                if out[a.wire] != start[a.wire] {
                    return Err(format!("ancilla {} not restored on input {x:?} (borrowed {bv:?})", a.wire));
                }
            }
        }
    }
    Ok(())
}
