use crate::diagram::{self as dg, Diagram, Dir};

use super::formula::PolyExpr;
use super::poly::Poly;

/// Gadgets wired by boundary slot. Every gadget is appended to one disjoint union
/// and the recorded slot pairs are glued once at the end, so slot ids never move.
pub(crate) struct Net {
    g: Diagram,
    pairs: Vec<(usize, usize)>,
    inputs: Vec<usize>,
}

impl Net {
    pub fn new(d: u32) -> Net {
        Net { g: Diagram::empty(d), pairs: Vec::new(), inputs: Vec::new() }
    }

    pub fn d(&self) -> u32 {
        self.g.d
    }

    /// A new input wire; returns the slot carrying its value.
    pub fn input(&mut self) -> usize {
        let off = self.g.boundary.len();
        self.g = self.g.union(&dg::identity(self.d(), 1));
        self.inputs.push(off);
        off + 1
    }

    /// Feeds `args` into the gadget's inputs and returns its output slots.
    pub fn add(&mut self, gadget: &Diagram, args: &[usize]) -> Vec<usize> {
        let off = self.g.boundary.len();
        let ins = gadget.slots(Dir::In);
        assert_eq!(ins.len(), args.len(), "gadget arity");
        self.g.absorb(gadget);
        for (&a, &i) in args.iter().zip(&ins) {
            self.pairs.push((a, off + i));
        }
        gadget.slots(Dir::Out).into_iter().map(|s| s + off).collect()
    }

    pub fn add1(&mut self, gadget: &Diagram, args: &[usize]) -> usize {
        let out = self.add(gadget, args);
        assert_eq!(out.len(), 1, "single-output gadget");
        out[0]
    }

    /// `k` copies of a value; zero copies discards it.
    pub fn fan(&mut self, v: usize, k: usize) -> Vec<usize> {
        match k {
            0 => {
                self.add(&dg::discard(self.d()), &[v]);
                Vec::new()
            }
            1 => vec![v],
            _ => self.add(&dg::copy(self.d(), k), &[v]),
        }
    }

    pub fn constant(&mut self, c: u32) -> usize {
        let g = dg::constant(self.d(), c % self.d());
        self.add1(&g, &[])
    }

    pub fn plus(&mut self, a: usize, b: usize) -> usize {
        let g = dg::add(self.d());
        self.add1(&g, &[a, b])
    }

    pub fn times(&mut self, a: usize, b: usize) -> usize {
        let g = dg::multiply(self.d());
        self.add1(&g, &[a, b])
    }

    pub fn negate(&mut self, a: usize) -> usize {
        let g = dg::negate(self.d());
        self.add1(&g, &[a])
    }

    pub fn power(&mut self, a: usize, k: u32) -> usize {
        let g = dg::exponent(self.d(), k);
        self.add1(&g, &[a])
    }

    /// Glues everything; the boundary is the inputs (in creation order) followed
    /// by `outputs`.
    pub fn finish(self, outputs: &[usize]) -> Diagram {
        let mut keep = self.inputs.clone();
        keep.extend_from_slice(outputs);
        self.g.glue(&self.pairs, &keep)
    }
}

/// Horner evaluation in the last variable; every slot in `vars` is consumed once.
pub(crate) fn horner(net: &mut Net, p: &Poly, vars: &[usize]) -> usize {
    if let Some(c) = p.as_constant() {
        for &v in vars {
            net.fan(v, 0);
        }
        return net.constant(c);
    }
    let n = vars.len();
    let parts = p.split_last();
    let k = parts.len() - 1;
    if k == 0 {
        net.fan(vars[n - 1], 0);
        return horner(net, &parts[0], &vars[..n - 1]);
    }
    let lead_is_one = parts[k].as_constant() == Some(1);
    let users: Vec<usize> = (0..=k).filter(|&i| !parts[i].is_zero() && !(i == k && lead_is_one)).collect();
    let mut copies: Vec<Vec<usize>> = vars[..n - 1].iter().map(|&v| net.fan(v, users.len())).collect();
    let mut take = |net: &mut Net, part: &Poly| -> usize {
        let mine: Vec<usize> = copies.iter_mut().map(|c| c.remove(0)).collect();
        horner(net, part, &mine)
    };
    let mut xs = net.fan(vars[n - 1], k);
    let mut acc = if lead_is_one { None } else { Some(take(net, &parts[k])) };
    for i in (0..k).rev() {
        let x = xs.remove(0);
        let prod = match acc {
            None => x,
            Some(a) => net.times(a, x),
        };
        acc = Some(if parts[i].is_zero() {
            prod
        } else {
            let t = take(net, &parts[i]);
            net.plus(prod, t)
        });
    }
    acc.expect("nonconstant polynomial")
}

/// Builds an expression tree; `vars[i]` holds the copies of variable i still unused.
pub(crate) fn expr_value(net: &mut Net, e: &PolyExpr, vars: &mut [Vec<usize>]) -> usize {
    let d = net.d() as i64;
    match e {
        PolyExpr::Const(c) => net.constant(c.rem_euclid(d) as u32),
        PolyExpr::Var(i) => vars[*i].pop().expect("variable copy available"),
        PolyExpr::Neg(a) => {
            let v = expr_value(net, a, vars);
            net.negate(v)
        }
        PolyExpr::Sub(a, b) if matches!(**a, PolyExpr::Const(0)) => {
            let v = expr_value(net, b, vars);
            net.negate(v)
        }
        PolyExpr::Sub(a, b) => {
            let x = expr_value(net, a, vars);
            let y = expr_value(net, b, vars);
            let ny = net.negate(y);
            net.plus(x, ny)
        }
        PolyExpr::Add(es) => {
            let vs: Vec<usize> = es.iter().map(|e| expr_value(net, e, vars)).collect();
            vs.into_iter().reduce(|a, b| net.plus(a, b)).unwrap_or_else(|| net.constant(0))
        }
        PolyExpr::Mul(es) => {
            let vs: Vec<usize> = es.iter().map(|e| expr_value(net, e, vars)).collect();
            vs.into_iter().reduce(|a, b| net.times(a, b)).unwrap_or_else(|| net.constant(1))
        }
        PolyExpr::Pow(b, k) => {
            let v = expr_value(net, b, vars);
            net.power(v, *k)
        }
    }
}

/// Inputs for `nvars` variables, fanned out to the number of uses in `e`.
pub(crate) fn expr_inputs(net: &mut Net, e: &PolyExpr, nvars: usize) -> Vec<Vec<usize>> {
    let uses = e.var_uses(nvars);
    let ins: Vec<usize> = (0..nvars).map(|_| net.input()).collect();
    ins.iter().zip(&uses).map(|(&v, &k)| net.fan(v, k)).collect()
}
