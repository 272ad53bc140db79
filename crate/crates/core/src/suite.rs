//! The nine acceptance criteria as runnable checks, shared by `zhkit selftest` and
//! the acceptance integration test.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{self as dg, Diagram};
use crate::eval::{contract, Tensor};
use crate::extract::{circuit_to_zh, random_circuit, toffoli_zh, zh_to_circuit};
use crate::revcomp::{
    clifford_generators, compile_permutation, ditstrings, gate_count, lower_bound, multi_ctrl, simulate, unitary,
    verify_classical, Circuit, Gate, Permutation, LOWER_BOUND_SLOTS, PERM_GATE_CONSTANT,
};
use crate::rewrite::{check_soundness, derivations, rule_catalog, run_derivation};
use crate::ring::{CycInt, Scalar};
use crate::synth::{matrix_to_diagram_phase_free, matrix_to_formula, r_matrix, successor_components, Matrix};

pub const DEFAULT_SEED: u64 = 20240521;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Restricts every criterion to this dimension when it is one of its own.
    pub d: Option<u32>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: DEFAULT_SEED, d: None }
    }
}

impl SuiteConfig {
    fn dims(&self, own: &[u32]) -> Vec<u32> {
        own.iter().copied().filter(|&d| self.d.is_none_or(|x| x == d)).collect()
    }

    fn rng(&self, id: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ id.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// No dimension of the criterion survives the `d` restriction.
    Skip,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        };
        write!(f, "[{tag}] {}. {}: {} ({:.1}s)", self.id, self.name, self.detail, self.seconds)
    }
}

pub const NAMES: [&str; 9] = [
    "rule soundness",
    "derivations h4 and h",
    "gate encodings",
    "universality pipeline",
    "successor law",
    "reversible compiler",
    "gate-count scaling",
    "clifford generators",
    "extraction round-trips",
];

type Check = Result<String, String>;

pub fn run(id: u32, cfg: &SuiteConfig) -> Outcome {
    let start = Instant::now();
    let result: Option<Check> = match id {
        1 => soundness(cfg),
        2 => derivation_chains(cfg),
        3 => gate_encodings(cfg),
        4 => universality(cfg),
        5 => successor_law(cfg),
        6 => reversible(cfg),
        7 => scaling(cfg),
        8 => clifford(cfg),
        9 => round_trips(cfg),
        _ => Some(Err(format!("no criterion {id}"))),
    };
    let (verdict, detail) = match result {
        None => (Verdict::Skip, format!("not defined at d={}", cfg.d.unwrap_or(0))),
        Some(Ok(s)) => (Verdict::Pass, s),
        Some(Err(s)) => (Verdict::Fail, s),
    };
    let name = NAMES.get(id as usize - 1).copied().unwrap_or("unknown");
    Outcome { id, name, verdict, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<Outcome> {
    (1..=9).map(|id| run(id, cfg)).collect()
}

fn some_dims(cfg: &SuiteConfig, own: &[u32]) -> Option<Vec<u32>> {
    let ds = cfg.dims(own);
    (!ds.is_empty()).then_some(ds)
}

fn soundness(cfg: &SuiteConfig) -> Option<Check> {
    let ds = some_dims(cfg, &[2, 3, 5])?;
    let mut instances = 0;
    let mut rules = 0;
    for &d in &ds {
        for rule in rule_catalog(d) {
            let rep = check_soundness(&rule, d, 3);
            instances += rep.checked;
            rules += 1;
            if !rep.passed() {
                return Some(Err(rep.to_string()));
            }
        }
    }
    Some(Ok(format!("{rules} rule checks, {instances} instances exact over d={ds:?}")))
}

fn derivation_chains(cfg: &SuiteConfig) -> Option<Check> {
    let ds = some_dims(cfg, &[2, 3, 5])?;
    let mut steps = 0;
    for &d in &ds {
        for der in derivations() {
            for p in (der.instances)(d) {
                match run_derivation(d, &der, &p) {
                    Ok(trail) => steps += trail.len() - 1,
                    Err(e) => return Some(Err(format!("d={d} {p:?}: {e}"))),
                }
            }
        }
    }
    Some(Ok(format!("{steps} rewrite steps preserve the tensor over d={ds:?}")))
}

/// Column x of a classical gate's matrix is the basis vector of its image.
fn classical_matrix_matches(t: &Tensor, d: u32, n: usize, g: &Gate) -> Result<(), String> {
    for x in ditstrings(d, n) {
        let mut y = x.clone();
        g.apply_classical(d, &mut y).ok_or("not classical")?;
        for z in ditstrings(d, n) {
            let idx = [x.clone(), z.clone()].concat();
            let want = Scalar::from_int(d, (z == y) as i64);
            if *t.get(&idx) != want {
                return Err(format!("{g:?} at d={d}: entry {x:?}→{z:?} is {}", t.get(&idx)));
            }
        }
    }
    Ok(())
}

fn gate_encodings(cfg: &SuiteConfig) -> Option<Check> {
    let ds = some_dims(cfg, &[3, 5])?;
    let run = || -> Result<String, String> {
        for &d in &ds {
            let tof = Gate::Toffoli { a: 0, b: 1, t: 2 };
            let t = contract(&toffoli_zh(d).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            classical_matrix_matches(&t, d, 3, &tof)?;
            for g in [Gate::ZeroCtrlX { c: 0, t: 1 }, Gate::ZeroCtrlXinv { c: 0, t: 1 }] {
                let mut c = Circuit::new(d, 2);
                c.gates.push(g.clone());
                let zh = circuit_to_zh(&c).map_err(|e| e.to_string())?;
                if !zh.is_phase_free() {
                    return Err(format!("{g:?} diagram is not phase-free"));
                }
                classical_matrix_matches(&contract(&zh).map_err(|e| e.to_string())?, d, 2, &g)?;
            }
        }
        Ok(format!("Toffoli and |0⟩-controlled X exact on every basis state, d={ds:?}"))
    };
    Some(run())
}

fn random_zomega(d: u32, rng: &mut impl Rng) -> Scalar {
    let c: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
    Scalar::new(CycInt::from_i64s(d, &c), 0)
}

fn universality(cfg: &SuiteConfig) -> Option<Check> {
    some_dims(cfg, &[3])?;
    let d = 3;
    let run = || -> Result<String, String> {
        let f = matrix_to_formula(&r_matrix(d), &Scalar::zero(d)).map_err(|e| e.to_string())?;
        let p = f.to_expr().definition("R", &f.names);
        if p != "p_R(x,y) = (x-y)\\cdot(x+1-y)" {
            return Err(format!("p_R printed as {p}"));
        }
        let phi = f.to_latex("R");
        if phi != "\\varphi_R(x, y) = (y=x) \\vee (y=x+_d1)" {
            return Err(format!("φ_R printed as {phi}"));
        }
        let mut rng = cfg.rng(4);
        let mut max_k = 0;
        for i in 0..100 {
            let (n_in, n_out) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
            let m = Matrix::from_fn(d, n_in, n_out, |_, _| random_zomega(d, &mut rng));
            let s = matrix_to_diagram_phase_free(&m).map_err(|e| format!("matrix {i}: {e}"))?;
            if !s.diagram.is_phase_free() {
                return Err(format!("matrix {i}: diagram has labelled H-boxes"));
            }
            let got = contract(&s.diagram).map_err(|e| format!("matrix {i}: {e}"))?;
            if Matrix::from_tensor(&got, n_in) != m.scale(&s.scale()) {
                return Err(format!("matrix {i} ({}×{}): contraction differs from d^(-k/2)·M", m.rows(), m.cols()));
            }
            max_k = max_k.max(s.k);
        }
        Ok(format!("100 matrices up to 9×9 exact, k ≤ {max_k}; R and p_R verbatim"))
    };
    Some(run())
}

fn h_state(d: u32, a: &Scalar) -> Tensor {
    Tensor::from_fn(d, 1, |i| a.pow(i[0]))
}

fn pascal(d: u32) -> Vec<Vec<i64>> {
    let n = d as usize;
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        rows[i][0] = 1;
        for j in 1..=i {
            rows[i][j] = rows[i - 1][j - 1] + rows[i - 1][j];
        }
    }
    rows
}

fn successor_law(cfg: &SuiteConfig) -> Option<Check> {
    let ds = some_dims(cfg, &[3, 5])?;
    let run = || -> Result<String, String> {
        let mut checked = 0;
        for &d in &ds {
            let succ = successor_components(d).map_err(|e| e.to_string())?;
            let s = contract(&succ.s).map_err(|e| e.to_string())?;
            let want = pascal(d);
            for (i, row) in want.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if *s.matrix_entry(1, i, j) != Scalar::from_int(d, v) {
                        return Err(format!("d={d}: s_{i}{j} is {}", s.matrix_entry(1, i, j)));
                    }
                }
            }
            let mut labels: Vec<Scalar> = (0..d as i64 + 3).map(|a| Scalar::from_int(d, a)).collect();
            labels.push(Scalar::omega(d, 1));
            labels.push(&Scalar::from_int(d, 2) * &Scalar::omega(d, 1));
            for a in labels {
                let state = dg::h_box(d, 0, 1, a.clone());
                let t = contract(&dg::seq(&state, &succ.s)).map_err(|e| e.to_string())?;
                let next = a.checked_add(&Scalar::one(d)).map_err(|e| e.to_string())?;
                match h_state(d, &next).proportional(&t) {
                    Some(q) if q.as_sqrt_d_power().is_some() => checked += 1,
                    Some(q) => return Err(format!("d={d} a={a}: factor {q} is not a power of √d")),
                    None => return Err(format!("d={d} a={a}: S·H(a) is not proportional to H(a+1)")),
                }
            }
        }
        Ok(format!("{checked} labels incremented, S binomial, d={ds:?}"))
    };
    Some(run())
}

fn check_permutations(d: u32, n: usize, count: usize, rng: &mut impl Rng) -> Result<usize, String> {
    let mut worst = 0;
    for i in 0..count {
        let p = Permutation::random(d, n, rng);
        let c = compile_permutation(&p).map_err(|e| e.to_string())?;
        verify_classical(&c, |x| p.apply(x)).map_err(|e| format!("d={d} n={n} permutation {i}: {e}"))?;
        worst = worst.max(c.gates.len());
    }
    Ok(worst)
}

fn reversible(cfg: &SuiteConfig) -> Option<Check> {
    let ds = some_dims(cfg, &[3, 5])?;
    let run = || -> Result<String, String> {
        let mut rng = cfg.rng(6);
        let mut parts = Vec::new();
        for &d in &ds {
            let jobs: &[(usize, usize)] = if d == 3 { &[(2, 500), (3, 200)] } else { &[(2, 100)] };
            for &(n, count) in jobs {
                check_permutations(d, n, count, &mut rng)?;
                parts.push(format!("d={d} n={n}: {count}"));
            }
        }
        Ok(format!("{}, all ancillae restored", parts.join(", ")))
    };
    Some(run())
}

fn multi_count(d: u32, n: usize) -> Result<usize, String> {
    let ctrl: Vec<(usize, u32)> = (0..n).map(|i| (i, (i % 2) as u32)).collect();
    let borrowed: Vec<usize> = (n + 1..2 * n - 1).collect();
    let c = multi_ctrl(d, &ctrl, Gate::X(n), &borrowed).map_err(|e| e.to_string())?;
    gate_count(&c, false).map_err(|e| e.to_string())
}

fn scaling(cfg: &SuiteConfig) -> Option<Check> {
    let ds = some_dims(cfg, &[3, 5])?;
    let run = || -> Result<String, String> {
        let mut notes = Vec::new();
        for &d in &ds {
            let ns: Vec<i64> = (3..=8).collect();
            let counts: Vec<i64> =
                ns.iter().map(|&n| multi_count(d, n as usize).map(|c| c as i64)).collect::<Result<_, _>>()?;
            let b = (counts[5] - counts[0]) / 5;
            let a = counts[0] - 3 * b;
            if ns.iter().zip(&counts).any(|(&n, &c)| c != a + b * n) {
                return Err(format!("d={d}: multi_ctrl counts {counts:?} are not affine"));
            }
            notes.push(format!("d={d} multi_ctrl = {a} + {b}n"));
        }
        let mut rng = cfg.rng(7);
        let mut worst = 0.0f64;
        for &(d, n) in &[(3u32, 2usize), (3, 3), (5, 2)] {
            if !ds.contains(&d) {
                continue;
            }
            let bound = lower_bound(d, n, LOWER_BOUND_SLOTS);
            for _ in 0..20 {
                let p = Permutation::random(d, n, &mut rng);
                let c = compile_permutation(&p).map_err(|e| e.to_string())?;
                let count = gate_count(&c, false).map_err(|e| e.to_string())?;
                let scale = n * (d as usize).pow(n as u32);
                if count > PERM_GATE_CONSTANT * scale {
                    return Err(format!("d={d} n={n}: {count} gates exceed {PERM_GATE_CONSTANT}·n·d^n"));
                }
                if bound > count as f64 {
                    return Err(format!("d={d} n={n}: lower bound {bound:.1} above achieved {count}"));
                }
                worst = worst.max(count as f64 / scale as f64);
            }
        }
        notes.push(format!("permutations ≤ {worst:.1}·n·d^n ≤ {PERM_GATE_CONSTANT}·n·d^n, lower bound respected"));
        Ok(notes.join("; "))
    };
    Some(run())
}

/// The action on the first wire with every other wire starting and ending in |0⟩.
fn first_wire_map(c: &Circuit, data: usize) -> Result<Vec<Vec<Scalar>>, String> {
    let d = c.d;
    let mut cols = Vec::new();
    for x in ditstrings(d, data) {
        let mut input = x.clone();
        input.resize(c.n_wires, 0);
        let out = simulate(c, &input).map_err(|e| e.to_string())?;
        let mut col = Vec::new();
        for (pos, a) in out.data.iter().enumerate() {
            let idx = out.index(pos);
            if idx[data..].iter().any(|&v| v != 0) {
                if !a.is_zero() {
                    return Err("an ancilla is left dirty".into());
                }
                continue;
            }
            col.push(a.clone());
        }
        cols.push(col);
    }
    Ok(cols)
}

fn clifford(cfg: &SuiteConfig) -> Option<Check> {
    let ds = some_dims(cfg, &[3, 5])?;
    let run = || -> Result<String, String> {
        let mut phases = Vec::new();
        for &d in &ds {
            let g = clifford_generators(d).map_err(|e| e.to_string())?;
            if g.q_phase.as_root_of_unity().is_none() {
                return Err(format!("d={d}: global phase {} is not a unit", g.q_phase));
            }
            let one = Scalar::one(d);
            let x = first_wire_map(&g.x, 1)?;
            let cx = first_wire_map(&g.cx, 2)?;
            let du = d as usize;
            for j in 0..du {
                for i in 0..du {
                    let want = if i == (j + 1) % du { one.clone() } else { Scalar::zero(d) };
                    if x[j][i] != want {
                        return Err(format!("d={d}: X column {j}"));
                    }
                }
            }
            for (col, xin) in ditstrings(d, 2).enumerate() {
                for (row, yout) in ditstrings(d, 2).enumerate() {
                    let hit = yout[0] == xin[0] && yout[1] == (xin[0] + xin[1]) % d;
                    if cx[col][row] != Scalar::from_int(d, hit as i64) {
                        return Err(format!("d={d}: CX column {xin:?}"));
                    }
                }
            }
            for (i, q) in g.qi.iter().enumerate() {
                let m = first_wire_map(q, 1)?;
                for j in 0..du {
                    for r in 0..du {
                        let want = match (r == j, j == i) {
                            (false, _) => Scalar::zero(d),
                            (true, true) => &Scalar::omega(d, 1) * &g.q_phase,
                            (true, false) => g.q_phase.clone(),
                        };
                        if m[j][r] != want {
                            return Err(format!("d={d}: Q[{i}] column {j}"));
                        }
                    }
                }
            }
            phases.push(format!("d={d} phase {}", g.q_phase));
        }
        Ok(format!("X, CX and every Q[i] exact ({})", phases.join(", ")))
    };
    Some(run())
}

fn sqrt_d_factor(a: &Tensor, b: &Tensor) -> Result<i64, String> {
    match a.proportional(b) {
        Some(q) => q.as_sqrt_d_power().ok_or_else(|| format!("factor {q} is not a power of √d")),
        None => Err("tensors are not proportional".into()),
    }
}

fn round_trips(cfg: &SuiteConfig) -> Option<Check> {
    some_dims(cfg, &[3])?;
    let d = 3;
    let run = || -> Result<String, String> {
        let mut rng = cfg.rng(9);
        let mut gates = 0;
        for i in 0..50 {
            let g: Diagram = dg::random_diagram(d, &mut rng, 5, 4);
            let pc = zh_to_circuit(&g).map_err(|e| format!("diagram {i}: {e}"))?;
            if !pc.is_native() {
                return Err(format!("diagram {i}: circuit has non-native gates"));
            }
            let e = sqrt_d_factor(&pc.tensor().map_err(|e| e.to_string())?, &contract(&g).map_err(|e| e.to_string())?)
                .map_err(|e| format!("diagram {i}: {e}"))?;
            if e != pc.k {
                return Err(format!("diagram {i}: factor √d^{e} but k = {}", pc.k));
            }
            gates += pc.gate_count();
        }
        for i in 0..50 {
            let c = random_circuit(d, &mut rng, 4, 5);
            let u = unitary(&c).map_err(|e| e.to_string())?;
            let g = circuit_to_zh(&c).map_err(|e| e.to_string())?;
            if contract(&g).map_err(|e| e.to_string())? != u {
                return Err(format!("circuit {i}: diagram tensor differs from the unitary"));
            }
            let back = zh_to_circuit(&g).map_err(|e| format!("circuit {i}: {e}"))?;
            let e = sqrt_d_factor(&back.tensor().map_err(|e| e.to_string())?, &u)
                .map_err(|e| format!("circuit {i}: {e}"))?;
            if e != back.k {
                return Err(format!("circuit {i}: factor √d^{e} but k = {}", back.k));
            }
        }
        Ok(format!("50 diagrams ({gates} native gates) and 50 circuits round-trip up to √d^k"))
    };
    Some(run())
}
