//! Exact contraction of diagrams to tensors.

mod kernel;
mod tensor;

pub use tensor::Tensor;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use thiserror::Error;

use crate::diagram::{to_zhd, Diagram, Dir, Endpoint, NodeKind, Region};
use crate::ring::Scalar;
use kernel::{Leg, Network, RawFactor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("intermediate rank {rank} exceeds the contraction cap {cap}")]
    RankCap { rank: usize, cap: usize },
    #[error("entries mix odd and even powers of sqrt(d) inside one factor")]
    ParityMix,
    #[error("boundary signatures differ: {0}")]
    Signature(String),
}

/// Largest rank whose dense tensor has at most 600000 entries, unless
/// `ZHKIT_RANK_CAP` says otherwise.
pub fn rank_cap(d: u32) -> usize {
    if let Some(c) = std::env::var("ZHKIT_RANK_CAP").ok().and_then(|s| s.parse().ok()) {
        return c;
    }
    let mut k = 0;
    let mut size = 1u64;
    while size * d as u64 <= 600_000 {
        size *= d as u64;
        k += 1;
    }
    k
}

/// Tensor of a single generator with `arity` legs.
pub fn generator_tensor(d: u32, kind: &NodeKind, arity: usize) -> Tensor {
    match kind {
        NodeKind::Z if arity == 0 => Tensor::from_scalar(Scalar::from_int(d, d)),
        NodeKind::Z => Tensor::from_fn(d, arity, |idx| {
            if idx.windows(2).all(|w| w[0] == w[1]) {
                Scalar::one(d)
            } else {
                Scalar::zero(d)
            }
        }),
        NodeKind::H(label) => {
            let inv = Scalar::sqrt_d_pow(d, -1);
            Tensor::from_fn(d, arity, |idx| {
                let p = idx.iter().fold(1u64, |a, &i| a * i as u64 % d as u64);
                &label.pow(p as u32) * &inv
            })
        }
    }
}

/// Converts Scalars sharing a half-power parity into one factor.
fn scalars_to_factor(d: u32, vars: Vec<usize>, entries: &[Scalar], extra_halfpow: i64) -> Result<RawFactor, EvalError> {
    let nonzero: Vec<i64> = entries.iter().filter(|s| !s.is_zero()).map(|s| s.halfpow()).collect();
    let h0 = nonzero.iter().copied().min().unwrap_or(0);
    if nonzero.iter().any(|h| (h - h0) % 2 != 0) {
        return Err(EvalError::ParityMix);
    }
    let mut data = Vec::with_capacity(entries.len() * d as usize);
    for s in entries {
        let lift = BigInt::from(d).pow(((s.halfpow() - h0) / 2) as u32);
        data.extend(s.num().coeffs().iter().map(|c| c * &lift));
    }
    Ok(RawFactor { vars, data, halfpow: h0 + extra_halfpow })
}

fn region_cache() -> &'static Mutex<HashMap<String, Tensor>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Tensor>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn region_tensor(g: &Diagram, key: &str, members: &[usize], crossing: &[usize]) -> Result<Tensor, EvalError> {
    let mut sub = Diagram::empty(g.d);
    let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    for &n in members {
        sub.add_node(g.nodes[n].clone());
    }
    for r in &g.regions {
        if r.nodes.len() < members.len() && r.nodes.iter().all(|n| local.contains_key(n)) {
            sub.regions.push(Region { key: r.key.clone(), nodes: r.nodes.iter().map(|n| local[n]).collect() });
        }
    }
    for &(a, b) in &g.edges {
        if let (Endpoint::Node(x), Endpoint::Node(y)) = (a, b) {
            if let (Some(&lx), Some(&ly)) = (local.get(&x), local.get(&y)) {
                sub.connect(lx, ly);
            }
        }
    }
    for &e in crossing {
        let (a, b) = g.edges[e];
        let inner = match (a, b) {
            (Endpoint::Node(x), _) if local.contains_key(&x) => local[&x],
            (_, Endpoint::Node(y)) => local[&y],
            _ => unreachable!("crossing edge touches the region"),
        };
        sub.attach(inner, Dir::Out);
    }
    let cache_key = format!("{key}\n{}", to_zhd(&sub));
    if let Some(t) = region_cache().lock().unwrap().get(&cache_key) {
        return Ok(t.clone());
    }
    let t = contract(&sub)?;
    region_cache().lock().unwrap().insert(cache_key, t.clone());
    Ok(t)
}

/// Builds the factor network; `pins` fixes boundary slots to basis values and drops
/// them from the result.
fn network(g: &Diagram, pins: &[(usize, u32)]) -> Result<Network, EvalError> {
    let defects = g.validate();
    if !defects.is_empty() {
        return Err(EvalError::Malformed(format!("{defects:?}")));
    }
    let d = g.d;
    let mut region_of = vec![None; g.nodes.len()];
    let mut outermost: Vec<usize> = (0..g.regions.len()).collect();
    outermost.sort_by_key(|&ri| std::cmp::Reverse(g.regions[ri].nodes.len()));
    for ri in outermost {
        let r = &g.regions[ri];
        if r.nodes.iter().all(|&n| region_of[n].is_none()) {
            for &n in &r.nodes {
                region_of[n] = Some(ri);
            }
        }
    }
    let is_free_z = |n: usize| region_of[n].is_none() && g.nodes[n] == NodeKind::Z;
    let mut uf = UnionFind((0..g.nodes.len()).collect());
    for &(a, b) in &g.edges {
        if let (Endpoint::Node(x), Endpoint::Node(y)) = (a, b) {
            if is_free_z(x) && is_free_z(y) {
                uf.union(x, y);
            }
        }
    }
    let mut nvars = 0;
    let mut z_var: HashMap<usize, usize> = HashMap::new();
    for n in 0..g.nodes.len() {
        if is_free_z(n) {
            let r = uf.find(n);
            if let std::collections::hash_map::Entry::Vacant(e) = z_var.entry(r) {
                e.insert(nvars);
                nvars += 1;
            }
        }
    }
    let in_region = |e: Endpoint| match e {
        Endpoint::Node(n) => region_of[n],
        _ => None,
    };
    let mut edge_var = vec![usize::MAX; g.edges.len()];
    for (i, &(a, b)) in g.edges.iter().enumerate() {
        if let (Some(ra), Some(rb)) = (in_region(a), in_region(b)) {
            if ra == rb {
                continue;
            }
        }
        let zend = [a, b].into_iter().find_map(|e| match e {
            Endpoint::Node(n) if is_free_z(n) => Some(n),
            _ => None,
        });
        edge_var[i] = match zend {
            Some(n) => z_var[&uf.find(n)],
            None => {
                nvars += 1;
                nvars - 1
            }
        };
    }
    let mut factors = Vec::new();
    let mut legs_of: Vec<Vec<usize>> = vec![Vec::new(); g.nodes.len()];
    let mut slot_var = vec![usize::MAX; g.boundary.len()];
    for (i, &(a, b)) in g.edges.iter().enumerate() {
        if edge_var[i] == usize::MAX {
            continue;
        }
        for e in [a, b] {
            match e {
                Endpoint::Node(n) if !is_free_z(n) && region_of[n].is_none() => legs_of[n].push(edge_var[i]),
                Endpoint::Boundary(s) => slot_var[s] = edge_var[i],
                _ => {}
            }
        }
    }
    for (n, kind) in g.nodes.iter().enumerate() {
        let NodeKind::H(label) = kind else { continue };
        if region_of[n].is_some() {
            continue;
        }
        let legs = &legs_of[n];
        let mut vars: Vec<usize> = Vec::new();
        for &v in legs {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let mult: Vec<u32> = vars.iter().map(|v| legs.iter().filter(|x| *x == v).count() as u32).collect();
        let powers: Vec<Scalar> = (0..d).map(|j| label.pow(j)).collect();
        let entries: Vec<Scalar> = (0..(d as usize).pow(vars.len() as u32))
            .map(|pos| {
                let mut rest = pos;
                let mut p = 1u64;
                for k in (0..vars.len()).rev() {
                    let x = (rest % d as usize) as u64;
                    rest /= d as usize;
                    for _ in 0..mult[k] {
                        p = p * x % d as u64;
                    }
                }
                powers[p as usize].clone()
            })
            .collect();
        factors.push(scalars_to_factor(d, vars, &entries, -1)?);
    }
    for (ri, r) in g.regions.iter().enumerate() {
        let members: Vec<usize> = (0..g.nodes.len()).filter(|&n| region_of[n] == Some(ri)).collect();
        if members.is_empty() {
            continue;
        }
        let crossing: Vec<usize> = (0..g.edges.len())
            .filter(|&i| {
                let (a, b) = g.edges[i];
                (in_region(a) == Some(ri)) != (in_region(b) == Some(ri))
            })
            .collect();
        let t = region_tensor(g, &r.key, &members, &crossing)?;
        let legs: Vec<usize> = crossing.iter().map(|&e| edge_var[e]).collect();
        let mut vars: Vec<usize> = Vec::new();
        for &v in &legs {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let diag = Tensor::from_fn(d, vars.len(), |idx| {
            let full: Vec<u32> = legs.iter().map(|v| idx[vars.iter().position(|x| x == v).unwrap()]).collect();
            t.get(&full).clone()
        });
        factors.push(scalars_to_factor(d, vars, &diag.data, 0)?);
    }
    let mut seen = vec![false; nvars];
    for f in &factors {
        for &v in &f.vars {
            seen[v] = true;
        }
    }
    for &v in &slot_var {
        seen[v] = true;
    }
    let mut scale = g.global.clone();
    let dd = Scalar::from_int(d, d);
    for v in 0..nvars {
        if !seen[v] {
            scale = &scale * &dd;
        }
    }
    let mut fixed: Vec<Option<u32>> = vec![None; nvars];
    let mut contradiction = false;
    for &(s, val) in pins {
        let v = slot_var[s];
        match fixed[v] {
            Some(x) if x != val => contradiction = true,
            _ => fixed[v] = Some(val),
        }
    }
    if contradiction {
        scale = Scalar::zero(d);
    }
    let factors = factors.iter().map(|f| f.slice(d, &fixed)).collect();
    let legs = (0..g.boundary.len())
        .filter(|s| !pins.iter().any(|(p, _)| p == s))
        .map(|s| match fixed[slot_var[s]] {
            Some(val) => Leg::Fixed(val),
            None => Leg::Var(slot_var[s]),
        })
        .collect();
    Ok(Network { d, factors, nvars, legs, scale })
}

/// The tensor of `g` over its boundary, in boundary order.
pub fn contract(g: &Diagram) -> Result<Tensor, EvalError> {
    let net = network(g, &[])?;
    kernel::run(&net, rank_cap(g.d))
}

/// Contraction with the input slots pinned to basis values; the result ranges over
/// the output slots.
pub fn apply_to_basis(g: &Diagram, inputs: &[u32]) -> Result<Tensor, EvalError> {
    let ins = g.slots(Dir::In);
    if ins.len() != inputs.len() {
        return Err(EvalError::Signature(format!("{} inputs given for {} input slots", inputs.len(), ins.len())));
    }
    let pins: Vec<(usize, u32)> = ins.into_iter().zip(inputs.iter().copied()).collect();
    let net = network(g, &pins)?;
    kernel::run(&net, rank_cap(g.d))
}

fn same_signature(a: &Diagram, b: &Diagram) -> Result<(), EvalError> {
    if a.d != b.d || a.boundary != b.boundary {
        return Err(EvalError::Signature(format!("d={} {:?} vs d={} {:?}", a.d, a.boundary, b.d, b.boundary)));
    }
    Ok(())
}

pub fn equal_exact(a: &Diagram, b: &Diagram) -> Result<bool, EvalError> {
    same_signature(a, b)?;
    Ok(contract(a)? == contract(b)?)
}

/// The q with ⟦a⟧·q = ⟦b⟧, if one exists.
pub fn equal_up_to_scalar(a: &Diagram, b: &Diagram) -> Result<Option<Scalar>, EvalError> {
    same_signature(a, b)?;
    Ok(contract(a)?.proportional(&contract(b)?))
}

#[cfg(test)]
mod tests;
