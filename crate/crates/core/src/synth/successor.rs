use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::ToPrimitive;

use crate::diagram::{self as dg, Diagram};
use crate::ring::{CycInt, Scalar};

use super::build::{expr_inputs, expr_value, Net};
use super::formula::{Formula, PolyExpr, Prop, Term};
use super::{
    bend_outputs, indicator_from, pseudobinary_to_diagram, require_prime, Matrix, PseudoBinaryFactor, SynthError,
    Synthesized,
};

/// Longest successor chain a single H-state may use.
const MAX_SUCCESSOR_STEPS: i64 = 4096;

/// The pieces of the successor gadget S with S·H(a) = H(a+1).
#[derive(Clone, Debug)]
pub struct Successor {
    /// |i⟩ ↦ |i⟩ + |i+1⟩.
    pub r: Diagram,
    /// |x_0 … x_{d−1}, c⟩ ↦ |x_c⟩ when every other x_j is 0, else 0.
    pub m: Diagram,
    /// Pascal's triangle, s_ij = binomial(i, j).
    pub s: Diagram,
    pub phi_r: Formula,
    pub p_r: PolyExpr,
    pub phi_m: Formula,
    pub p_m: PolyExpr,
}

pub fn r_matrix(d: u32) -> Matrix {
    let du = d as usize;
    Matrix::from_fn(d, 1, 1, |y, x| Scalar::from_int(d, (y == x || y == (x + 1) % du) as i64))
}

pub fn s_matrix(d: u32) -> Matrix {
    let binom = |i: usize, j: usize| -> i64 {
        if j > i {
            return 0;
        }
        (0..j).fold(1i64, |acc, t| acc * (i - t) as i64 / (t + 1) as i64)
    };
    Matrix::from_fn(d, 1, 1, |i, j| Scalar::from_int(d, binom(i, j)))
}

/// One conjunct of the multiplexer over (x_j, c, y): x_j = y when c = j, else x_j = 0.
fn mux_clause(j: u32) -> Prop {
    let (x, c, y) = (Term::Var(0), Term::Var(1), Term::Var(2));
    let hit = Prop::eq(c.clone(), Term::Const(j));
    Prop::any(vec![
        Prop::all(vec![hit.clone(), Prop::eq(y, x.clone())]),
        Prop::all(vec![Prop::Not(Box::new(hit)), Prop::eq(x, Term::Const(0))]),
    ])
}

fn remap(p: &Prop, vars: &[usize]) -> Prop {
    fn term(t: &Term, vars: &[usize]) -> Term {
        match t {
            Term::Const(c) => Term::Const(*c),
            Term::Var(i) => Term::Var(vars[*i]),
            Term::Neg(a) => Term::Neg(Box::new(term(a, vars))),
            Term::Add(a, b) => Term::Add(Box::new(term(a, vars)), Box::new(term(b, vars))),
            Term::Mul(a, b) => Term::Mul(Box::new(term(a, vars)), Box::new(term(b, vars))),
        }
    }
    match p {
        Prop::True => Prop::True,
        Prop::False => Prop::False,
        Prop::Eq(a, b) => Prop::Eq(term(a, vars), term(b, vars)),
        Prop::Not(q) => Prop::Not(Box::new(remap(q, vars))),
        Prop::Or(qs) => Prop::Or(qs.iter().map(|q| remap(q, vars)).collect()),
        Prop::And(qs) => Prop::And(qs.iter().map(|q| remap(q, vars)).collect()),
    }
}

/// ∧_j ((c = j) ∧ (y = x_j)) ∨ (¬(c = j) ∧ (x_j = 0)) over x_0 … x_{d−1}, c, y.
pub fn multiplexer_formula(d: u32) -> Formula {
    let du = d as usize;
    let mut names: Vec<String> = (0..du).map(|i| format!("x_{i}")).collect();
    names.push("c".into());
    names.push("y".into());
    let prop = Prop::all((0..du).map(|j| remap(&mux_clause(j as u32), &[j, du, du + 1])).collect());
    Formula { d, names, prop }
}

fn not_expr(d: u32, e: PolyExpr) -> PolyExpr {
    PolyExpr::Sub(Box::new(PolyExpr::Const(1)), Box::new(PolyExpr::Pow(Box::new(e), d - 1)))
}

/// (x_j, c, y) ↦ 1 − q_j^{d−1}, which is 1 exactly when clause j holds.
fn mux_clause_value(d: u32, j: u32) -> Diagram {
    let f = Formula { d, names: vec!["x".into(), "c".into(), "y".into()], prop: mux_clause(j) };
    let e = not_expr(d, f.to_expr());
    let mut net = Net::new(d);
    let mut vars = expr_inputs(&mut net, &e, 3);
    let v = expr_value(&mut net, &e, &mut vars);
    net.finish(&[v]).with_region(&format!("mux-clause-{j}"))
}

/// The multiplexer as a product of per-clause values, each its own small region.
fn multiplexer(d: u32) -> Diagram {
    let du = d as usize;
    let mut net = Net::new(d);
    let xs: Vec<usize> = (0..du).map(|_| net.input()).collect();
    let c = net.input();
    let y = net.input();
    let mut cs = net.fan(c, du);
    let mut ys = net.fan(y, du);
    let mut acc: Option<usize> = None;
    for (j, &x) in xs.iter().enumerate() {
        let v = net.add1(&mux_clause_value(d, j as u32), &[x, cs.remove(0), ys.remove(0)]);
        acc = Some(match acc {
            None => v,
            Some(a) => net.times(a, v),
        });
    }
    let prod = acc.expect("d ≥ 2");
    let p = net.power(prod, d - 1);
    let one = net.constant(1);
    let np = net.negate(p);
    let value = net.plus(one, np);
    indicator_from(net, value, &dg::effect(d, 0))
}

fn build(d: u32) -> Result<Successor, SynthError> {
    let rm = r_matrix(d);
    let rf = PseudoBinaryFactor::from_matrix(&rm, &Scalar::zero(d))?;
    let phi_r = rf.formula();
    let p_r = phi_r.to_expr();
    let r = pseudobinary_to_diagram(&rf)?.with_region("successor-r");

    let phi_m = multiplexer_formula(d);
    let p_m = phi_m.to_expr();
    let nvars = phi_m.arity();
    let m = bend_outputs(&multiplexer(d), nvars - 1, 1).with_region("successor-m");

    let mut net = Net::new(d);
    let c = net.input();
    let mut states = Vec::new();
    for j in 0..d {
        let mut v = net.constant(0);
        for _ in 0..j {
            v = net.add1(&r, &[v]);
        }
        states.push(v);
    }
    states.push(c);
    let y = net.add1(&m, &states);
    let s = net.finish(&[y]).transpose().with_region("successor");
    Ok(Successor { r, m, s, phi_r, p_r, phi_m, p_m })
}

/// The successor gadget and its binary building blocks, built once per d.
pub fn successor_components(d: u32) -> Result<Arc<Successor>, SynthError> {
    require_prime(d)?;
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Successor>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&d) {
        return Ok(s.clone());
    }
    let s = Arc::new(build(d)?);
    cache.lock().unwrap().insert(d, s.clone());
    Ok(s)
}

/// A phase-free state d^{−k/2}·(1, r, r², …, r^{d−1}). Coefficients of r are
/// shifted by a common constant to be nonnegative, using 1 + ω + … + ω^{d−1} = 0,
/// then built by Horner's rule in ω: successor steps add 1, a Schur product
/// with the phase-free H-state multiplies by ω at a cost of one factor 1/√d.
pub fn hbox_state_phase_free(r: &CycInt) -> Result<Synthesized, SynthError> {
    let d = r.d();
    require_prime(d)?;
    let coeffs: Vec<i64> = r
        .coeffs()
        .iter()
        .map(|c| c.to_i64().ok_or_else(|| SynthError::TooLarge(r.to_string())))
        .collect::<Result<_, _>>()?;
    let lift = -coeffs.iter().copied().min().unwrap_or(0);
    let n: Vec<i64> = coeffs.iter().map(|c| c + lift).collect();
    if n.iter().sum::<i64>() > MAX_SUCCESSOR_STEPS {
        return Err(SynthError::TooLarge(r.to_string()));
    }
    let Some(top) = (0..n.len()).rev().find(|&j| n[j] > 0) else {
        return Ok(Synthesized { diagram: dg::constant(d, 0), k: 0, factors: 0 });
    };
    let succ = successor_components(d)?;
    let mut state = dg::constant(d, 0);
    let mut k = 0;
    for _ in 0..n[top] {
        state = dg::seq(&state, &succ.s);
    }
    for j in (0..top).rev() {
        state = state.schur_product(&dg::h_box_w(d, 0, 1))?;
        k += 1;
        for _ in 0..n[j] {
            state = dg::seq(&state, &succ.s);
        }
    }
    Ok(Synthesized { diagram: state.with_region("h-state"), k, factors: 0 })
}
