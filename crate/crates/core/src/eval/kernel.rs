//! Variable elimination over factors whose entries share one power of √d.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{EvalError, Tensor};
use crate::ring::{CycInt, Scalar};

pub(crate) trait Coef: Clone + PartialEq {
    fn zero() -> Self;
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn divisible(&self, d: u32) -> bool;
    fn div(&self, d: u32) -> Self;
}

impl Coef for i64 {
    fn zero() -> Self {
        0
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i64()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn divisible(&self, d: u32) -> bool {
        self % d as i64 == 0
    }
    fn div(&self, d: u32) -> Self {
        self / d as i64
    }
}

impl Coef for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn divisible(&self, d: u32) -> bool {
        Zero::is_zero(&(self % d))
    }
    fn div(&self, d: u32) -> Self {
        self / d
    }
}

/// A factor over distinct variables; entry e occupies `data[e*d .. (e+1)*d]`.
#[derive(Clone, Debug)]
pub(crate) struct RawFactor {
    pub vars: Vec<usize>,
    pub data: Vec<BigInt>,
    pub halfpow: i64,
}

impl RawFactor {
    /// Fixes some variables to values and drops them.
    pub fn slice(&self, d: u32, fixed: &[Option<u32>]) -> RawFactor {
        if self.vars.iter().all(|&v| fixed[v].is_none()) {
            return self.clone();
        }
        let du = d as usize;
        let vars: Vec<usize> = self.vars.iter().copied().filter(|&v| fixed[v].is_none()).collect();
        let n = du.pow(vars.len() as u32);
        let mut data = Vec::with_capacity(n * du);
        let mut idx = vec![0u32; self.vars.len()];
        for e in 0..n {
            let mut rest = e;
            for k in (0..self.vars.len()).rev() {
                idx[k] = match fixed[self.vars[k]] {
                    Some(val) => val,
                    None => {
                        let x = (rest % du) as u32;
                        rest /= du;
                        x
                    }
                };
            }
            let pos = idx.iter().fold(0, |acc, &i| acc * du + i as usize);
            data.extend_from_slice(&self.data[pos * du..(pos + 1) * du]);
        }
        RawFactor { vars, data, halfpow: self.halfpow }
    }
}

pub(crate) enum Leg {
    Var(usize),
    Fixed(u32),
}

pub(crate) struct Network {
    pub d: u32,
    pub factors: Vec<RawFactor>,
    pub nvars: usize,
    pub legs: Vec<Leg>,
    pub scale: Scalar,
}

enum Fail {
    Overflow,
    Err(EvalError),
}

impl From<EvalError> for Fail {
    fn from(e: EvalError) -> Self {
        Fail::Err(e)
    }
}

struct Factor<K> {
    vars: Vec<usize>,
    data: Vec<K>,
    halfpow: i64,
}

pub(crate) fn run(net: &Network, cap: usize) -> Result<Tensor, EvalError> {
    match run_with::<i64>(net, cap) {
        Ok(t) => Ok(t),
        Err(Fail::Err(e)) => Err(e),
        Err(Fail::Overflow) => match run_with::<BigInt>(net, cap) {
            Ok(t) => Ok(t),
            Err(Fail::Err(e)) => Err(e),
            Err(Fail::Overflow) => unreachable!("bigint arithmetic does not overflow"),
        },
    }
}

fn convert<K: Coef>(f: &RawFactor) -> Result<Factor<K>, Fail> {
    let data = f.data.iter().map(|b| K::from_big(b).ok_or(Fail::Overflow)).collect::<Result<_, _>>()?;
    Ok(Factor { vars: f.vars.clone(), data, halfpow: f.halfpow })
}

fn cyc_mul<K: Coef>(d: usize, a: &[K], b: &[K], out: &mut [K]) -> Result<(), Fail> {
    for o in out.iter_mut() {
        *o = K::zero();
    }
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let k = (i + j) % d;
            out[k] = out[k].add(&x.mul(y).ok_or(Fail::Overflow)?).ok_or(Fail::Overflow)?;
        }
    }
    Ok(())
}

/// Canonical form per entry, then strip common factors of d into the half-power.
fn normalize<K: Coef>(d: u32, f: &mut Factor<K>) -> Result<(), Fail> {
    let du = d as usize;
    for e in f.data.chunks_mut(du) {
        let last = e[du - 1].clone();
        if !last.is_zero() {
            for c in e.iter_mut() {
                *c = c.sub(&last).ok_or(Fail::Overflow)?;
            }
        }
    }
    if f.data.iter().all(|c| c.is_zero()) {
        f.halfpow = 0;
        return Ok(());
    }
    while f.data.iter().all(|c| c.divisible(d)) {
        for c in f.data.iter_mut() {
            *c = c.div(d);
        }
        f.halfpow += 2;
    }
    Ok(())
}

/// Product of `parts`, summed over `sum_var` if given, as a factor over `out_vars`.
fn combine<K: Coef>(
    d: u32,
    parts: &[&Factor<K>],
    sum_var: Option<usize>,
    out_vars: Vec<usize>,
) -> Result<Factor<K>, Fail> {
    let du = d as usize;
    let mut all = out_vars.clone();
    all.extend(sum_var);
    let strides: Vec<Vec<usize>> = parts
        .iter()
        .map(|f| {
            all.iter()
                .map(|v| match f.vars.iter().position(|x| x == v) {
                    Some(p) => du.pow((f.vars.len() - 1 - p) as u32),
                    None => 0,
                })
                .collect()
        })
        .collect();
    let n_out = du.pow(out_vars.len() as u32);
    let mut data = vec![K::zero(); n_out * du];
    let mut acc = vec![K::zero(); du];
    let mut tmp = vec![K::zero(); du];
    let mut assign = vec![0usize; all.len()];
    let total = n_out * if sum_var.is_some() { du } else { 1 };
    let mut offs = vec![0usize; parts.len()];
    'outer: for step in 0..total {
        if step > 0 {
            // odometer increment, last variable fastest
            let mut k = all.len();
            loop {
                k -= 1;
                assign[k] += 1;
                for (o, s) in offs.iter_mut().zip(&strides) {
                    *o += s[k];
                }
                if assign[k] < du {
                    break;
                }
                for (o, s) in offs.iter_mut().zip(&strides) {
                    *o -= s[k] * du;
                }
                assign[k] = 0;
            }
        }
        for (f, &o) in parts.iter().zip(&offs) {
            if f.data[o * du..(o + 1) * du].iter().all(|c| c.is_zero()) {
                continue 'outer;
            }
        }
        acc.clone_from_slice(&parts[0].data[offs[0] * du..(offs[0] + 1) * du]);
        for (f, &o) in parts.iter().zip(&offs).skip(1) {
            cyc_mul(du, &acc, &f.data[o * du..(o + 1) * du], &mut tmp)?;
            std::mem::swap(&mut acc, &mut tmp);
        }
        let pos = step / if sum_var.is_some() { du } else { 1 };
        for (dst, src) in data[pos * du..(pos + 1) * du].iter_mut().zip(&acc) {
            *dst = dst.add(src).ok_or(Fail::Overflow)?;
        }
    }
    let mut f = Factor { vars: out_vars, data, halfpow: parts.iter().map(|f| f.halfpow).sum() };
    normalize(d, &mut f)?;
    Ok(f)
}

fn run_with<K: Coef>(net: &Network, cap: usize) -> Result<Tensor, Fail> {
    let d = net.d;
    let du = d as usize;
    let mut factors: Vec<Option<Factor<K>>> = Vec::new();
    for f in &net.factors {
        let mut g = convert::<K>(f)?;
        normalize(d, &mut g)?;
        factors.push(Some(g));
    }
    let mut keep: Vec<usize> = Vec::new();
    for leg in &net.legs {
        if let Leg::Var(v) = leg {
            if !keep.contains(v) {
                keep.push(*v);
            }
        }
    }
    if net.legs.len() > cap {
        return Err(EvalError::RankCap { rank: net.legs.len(), cap }.into());
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); net.nvars];
    for (i, f) in factors.iter().enumerate() {
        for &v in &f.as_ref().unwrap().vars {
            adj[v].insert(i);
        }
    }
    let is_kept = {
        let mut k = vec![false; net.nvars];
        for &v in &keep {
            k[v] = true;
        }
        k
    };
    let score = |adj: &[BTreeSet<usize>], factors: &[Option<Factor<K>>], v: usize| -> Vec<usize> {
        let mut u = BTreeSet::new();
        for &fi in &adj[v] {
            u.extend(factors[fi].as_ref().unwrap().vars.iter().copied());
        }
        u.remove(&v);
        u.into_iter().collect()
    };
    let mut heap = BinaryHeap::new();
    let mut done = vec![false; net.nvars];
    for v in 0..net.nvars {
        if !is_kept[v] && !adj[v].is_empty() {
            heap.push(Reverse((score(&adj, &factors, v).len(), v)));
        }
    }
    while let Some(Reverse((s, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        let u = score(&adj, &factors, v);
        if u.len() != s {
            heap.push(Reverse((u.len(), v)));
            continue;
        }
        if u.len() > cap {
            return Err(EvalError::RankCap { rank: u.len(), cap }.into());
        }
        done[v] = true;
        let fids: Vec<usize> = adj[v].iter().copied().collect();
        let taken: Vec<Factor<K>> = fids.iter().map(|&i| factors[i].take().unwrap()).collect();
        let refs: Vec<&Factor<K>> = taken.iter().collect();
        let nf = combine(d, &refs, Some(v), u.clone())?;
        let id = factors.len();
        for f in &taken {
            for &x in &f.vars {
                adj[x].remove(&fids[0]);
                for fi in &fids {
                    adj[x].remove(fi);
                }
            }
        }
        for &x in &u {
            adj[x].insert(id);
        }
        factors.push(Some(nf));
        for &x in &u {
            if !is_kept[x] && !done[x] {
                heap.push(Reverse((score(&adj, &factors, x).len(), x)));
            }
        }
    }
    let rest: Vec<&Factor<K>> = factors.iter().flatten().collect();
    let fin = if rest.is_empty() {
        let mut data = vec![K::zero(); du];
        data[0] = K::from_big(&BigInt::from(1)).unwrap();
        Factor { vars: Vec::new(), data, halfpow: 0 }
    } else {
        combine(d, &rest, None, keep.clone())?
    };
    let mut out = Tensor::zeros(d, net.legs.len());
    let mut entry_cache: Vec<Option<Scalar>> = vec![None; fin.data.len() / du];
    let strides: Vec<usize> = keep
        .iter()
        .map(|v| match fin.vars.iter().position(|x| x == v) {
            Some(p) => du.pow((fin.vars.len() - 1 - p) as u32),
            None => 0,
        })
        .collect();
    let mut assign = vec![None::<u32>; net.nvars];
    'entries: for pos in 0..out.data.len() {
        let idx = out.index(pos);
        for v in &keep {
            assign[*v] = None;
        }
        for (leg, &x) in net.legs.iter().zip(&idx) {
            match leg {
                Leg::Fixed(val) if *val != x => continue 'entries,
                Leg::Var(v) => match assign[*v] {
                    Some(y) if y != x => continue 'entries,
                    _ => assign[*v] = Some(x),
                },
                _ => {}
            }
        }
        let off: usize = keep.iter().zip(&strides).map(|(v, s)| assign[*v].unwrap() as usize * s).sum();
        if entry_cache[off].is_none() {
            let coeffs = fin.data[off * du..(off + 1) * du].iter().map(|c| c.to_big()).collect();
            let s = Scalar::new(CycInt::new(d, coeffs), fin.halfpow);
            entry_cache[off] = Some(&s * &net.scale);
        }
        out.data[pos] = entry_cache[off].clone().unwrap();
    }
    Ok(out)
}
