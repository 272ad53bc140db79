//! Matrices over Z[ω] to ZH diagrams, with labelled H-boxes or phase-free.

pub(crate) mod build;
mod formula;
mod json;
mod poly;
mod successor;

pub use formula::{io_names, Formula, PolyExpr, Prop, Term};
pub use json::{matrix_from_json, matrix_to_json};
pub use poly::Poly;
pub use successor::{hbox_state_phase_free, multiplexer_formula, r_matrix, s_matrix, successor_components, Successor};

use num_bigint::BigInt;
use thiserror::Error;

use crate::diagram::{self as dg, Diagram, DiagramError};
use crate::eval::{EvalError, Tensor};
use crate::ring::{is_prime, CycInt, Scalar};
use build::{horner, Net};
use poly::digits;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("d = {0} is not prime")]
    NotPrime(u32),
    #[error("entry ({row}, {col}) is neither r nor 1")]
    NotPseudoBinary { row: usize, col: usize },
    #[error("entry ({row}, {col}) = {value} is not in Z[ω]")]
    NotInZOmega { row: usize, col: usize, value: String },
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("bad formula: {0}")]
    Formula(String),
    #[error("label {0} needs too many successor steps")]
    TooLarge(String),
    #[error("mat format: {0}")]
    Format(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

fn require_prime(d: u32) -> Result<(), SynthError> {
    if is_prime(d) {
        Ok(())
    } else {
        Err(SynthError::NotPrime(d))
    }
}

/// A d^out × d^in matrix; `entries[row][col]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub d: u32,
    pub n_in: usize,
    pub n_out: usize,
    pub entries: Vec<Vec<Scalar>>,
}

fn log_d(d: u32, len: usize) -> Option<usize> {
    let mut k = 0;
    let mut size = 1usize;
    while size < len {
        size *= d as usize;
        k += 1;
    }
    (size == len).then_some(k)
}

impl Matrix {
    pub fn new(d: u32, entries: Vec<Vec<Scalar>>) -> Result<Matrix, SynthError> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(SynthError::Shape("ragged rows".into()));
        }
        let (Some(n_out), Some(n_in)) = (log_d(d, rows), log_d(d, cols)) else {
            return Err(SynthError::Shape(format!("{rows}×{cols} is not a power-of-{d} shape")));
        };
        if entries.iter().flatten().any(|s| s.d() != d) {
            return Err(SynthError::Shape("entries of another dimension".into()));
        }
        Ok(Matrix { d, n_in, n_out, entries })
    }

    pub fn from_fn(d: u32, n_in: usize, n_out: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let rows = (d as usize).pow(n_out as u32);
        let cols = (d as usize).pow(n_in as u32);
        let entries = (0..rows).map(|r| (0..cols).map(|c| f(r, c)).collect()).collect();
        Matrix { d, n_in, n_out, entries }
    }

    pub fn identity(d: u32, n: usize) -> Matrix {
        Self::from_fn(d, n, n, |r, c| Scalar::from_int(d, (r == c) as i64))
    }

    /// Reads a tensor whose first `n_in` axes are inputs.
    pub fn from_tensor(t: &Tensor, n_in: usize) -> Matrix {
        let n_out = t.rank - n_in;
        Self::from_fn(t.d, n_in, n_out, |r, c| t.matrix_entry(n_in, r, c).clone())
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        (self.d as usize).pow(self.n_in as u32)
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row][col]
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Self::from_fn(self.d, self.n_in, self.n_out, |r, c| &self.entries[r][c] * s)
    }

    /// Distinct entries in order of first appearance, row by row.
    pub fn distinct_values(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = Vec::new();
        for s in self.entries.iter().flatten() {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
        out
    }
}

/// An r,1-pseudobinary matrix: 1 where `ones` is set, r elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoBinaryFactor {
    pub d: u32,
    pub r: Scalar,
    pub n_in: usize,
    pub n_out: usize,
    /// Row-major over d^n_out rows and d^n_in columns.
    pub ones: Vec<bool>,
}

impl PseudoBinaryFactor {
    /// The factor M_r: r where M has r, 1 elsewhere.
    pub fn of_value(m: &Matrix, r: &Scalar) -> PseudoBinaryFactor {
        let ones = m.entries.iter().flatten().map(|s| s != r).collect();
        PseudoBinaryFactor { d: m.d, r: r.clone(), n_in: m.n_in, n_out: m.n_out, ones }
    }

    pub fn from_matrix(m: &Matrix, r: &Scalar) -> Result<PseudoBinaryFactor, SynthError> {
        let one = Scalar::one(m.d);
        for (row, es) in m.entries.iter().enumerate() {
            for (col, s) in es.iter().enumerate() {
                if *s != one && s != r {
                    return Err(SynthError::NotPseudoBinary { row, col });
                }
            }
        }
        let ones = m.entries.iter().flatten().map(|s| *s == one).collect();
        Ok(PseudoBinaryFactor { d: m.d, r: r.clone(), n_in: m.n_in, n_out: m.n_out, ones })
    }

    pub fn to_matrix(&self) -> Matrix {
        let cols = (self.d as usize).pow(self.n_in as u32);
        Matrix::from_fn(self.d, self.n_in, self.n_out, |r, c| {
            if self.ones[r * cols + c] {
                Scalar::one(self.d)
            } else {
                self.r.clone()
            }
        })
    }

    pub fn formula(&self) -> Formula {
        ones_formula(self.d, self.n_in, self.n_out, &self.ones)
    }
}

fn ones_formula(d: u32, n_in: usize, n_out: usize, ones: &[bool]) -> Formula {
    let names = io_names(n_in, n_out);
    let du = d as usize;
    let cols = du.pow(n_in as u32);
    let prop = if ones.iter().all(|&b| b) {
        Prop::True
    } else if ones.iter().all(|&b| !b) {
        Prop::False
    } else if let Some(offsets) = circulant_offsets(d, n_in, n_out, ones) {
        let (x, y) = (Term::Var(0), Term::Var(1));
        Prop::any(
            offsets
                .into_iter()
                .map(|k| {
                    if k == 0 {
                        Prop::eq(y.clone(), x.clone())
                    } else {
                        Prop::eq(y.clone(), x.clone().plus(Term::Const(k)))
                    }
                })
                .collect(),
        )
    } else {
        let mut disj = Vec::new();
        for (pos, _) in ones.iter().enumerate().filter(|(_, &b)| b) {
            let (row, col) = (pos / cols, pos % cols);
            let xs = digits(d, n_in, col);
            let ys = digits(d, n_out, row);
            let conj =
                xs.iter().chain(&ys).enumerate().map(|(v, &val)| Prop::eq(Term::Var(v), Term::Const(val))).collect();
            disj.push(Prop::all(conj));
        }
        Prop::any(disj)
    };
    Formula { d, names, prop }
}

/// For a one-input one-output matrix whose ones sit on fixed diagonals y = x + k.
fn circulant_offsets(d: u32, n_in: usize, n_out: usize, ones: &[bool]) -> Option<Vec<u32>> {
    if n_in != 1 || n_out != 1 {
        return None;
    }
    let du = d as usize;
    let offsets: Vec<u32> = (0..d).filter(|&k| ones[k as usize * du]).collect();
    let fits = (0..du).all(|y| (0..du).all(|x| ones[y * du + x] == offsets.contains(&(((y + du - x) % du) as u32))));
    fits.then_some(offsets)
}

/// The formula true exactly where M has a 1.
pub fn matrix_to_formula(m: &Matrix, r: &Scalar) -> Result<Formula, SynthError> {
    let f = PseudoBinaryFactor::from_matrix(m, r)?;
    Ok(f.formula())
}

/// The polynomial vanishing exactly where the formula holds.
pub fn formula_to_poly(f: &Formula) -> Poly {
    f.to_expr().expand(f.d, f.arity())
}

/// |b⟩ ↦ |p(b)⟩ with one input per variable.
pub fn poly_to_arith_diagram(p: &Poly) -> Diagram {
    let mut net = Net::new(p.d);
    let vars: Vec<usize> = (0..p.nvars).map(|_| net.input()).collect();
    let out = horner(&mut net, p, &vars);
    net.finish(&[out])
}

/// Postselection onto (1, r, …, r^{d−1}) as a labelled 1-ary H-box.
fn ring_effect(r: &Scalar) -> Diagram {
    let d = r.d();
    if r.is_zero() {
        return dg::effect(d, 0);
    }
    dg::h_box(d, 1, 0, r.clone()).scaled(&Scalar::sqrt_d_pow(d, 1))
}

fn indicator_from(mut net: Net, value: usize, effect: &Diagram) -> Diagram {
    let d = net.d();
    let bit = net.power(value, d - 1);
    net.add(effect, &[bit]);
    net.finish(&[])
}

/// Evaluates to 1 on inputs where p vanishes and to r elsewhere.
pub fn poly_to_indicator(p: &Poly, r: &Scalar) -> Diagram {
    poly_indicator_with(p, &ring_effect(r))
}

fn poly_indicator_with(p: &Poly, effect: &Diagram) -> Diagram {
    let mut net = Net::new(p.d);
    let vars: Vec<usize> = (0..p.nvars).map(|_| net.input()).collect();
    if p.is_zero() {
        for v in vars {
            net.fan(v, 0);
        }
        return net.finish(&[]);
    }
    let out = horner(&mut net, p, &vars);
    indicator_from(net, out, effect)
}

/// Indicator built straight from the unexpanded expression.
fn bend_outputs(g: &Diagram, n_in: usize, n_out: usize) -> Diagram {
    let outs: Vec<usize> = (n_in..n_in + n_out).collect();
    g.bend(&outs)
}

fn factor_with(f: &PseudoBinaryFactor, effect: &Diagram) -> Diagram {
    let p = formula_to_poly(&f.formula());
    bend_outputs(&poly_indicator_with(&p, effect), f.n_in, f.n_out)
}

/// The factor as a diagram with n inputs and m outputs, exactly.
pub fn pseudobinary_to_diagram(f: &PseudoBinaryFactor) -> Result<Diagram, SynthError> {
    require_prime(f.d)?;
    Ok(factor_with(f, &ring_effect(&f.r)))
}

/// A synthesized diagram with ⟦diagram⟧ = d^{−k/2}·M.
#[derive(Clone, Debug)]
pub struct Synthesized {
    pub diagram: Diagram,
    pub k: u32,
    pub factors: usize,
}

impl Synthesized {
    pub fn scale(&self) -> Scalar {
        Scalar::sqrt_d_pow(self.diagram.d, -(self.k as i64))
    }
}

fn schur_all(
    m: &Matrix,
    mut factor: impl FnMut(&PseudoBinaryFactor) -> Result<(Diagram, u32), SynthError>,
) -> Result<Synthesized, SynthError> {
    require_prime(m.d)?;
    let one = Scalar::one(m.d);
    let values: Vec<Scalar> = m.distinct_values().into_iter().filter(|r| *r != one).collect();
    let parts: Vec<PseudoBinaryFactor> = if values.is_empty() {
        vec![PseudoBinaryFactor::of_value(m, &one)]
    } else {
        values.iter().map(|r| PseudoBinaryFactor::of_value(m, r)).collect()
    };
    let mut acc: Option<Diagram> = None;
    let mut k = 0;
    for p in &parts {
        let (g, kp) = factor(p)?;
        k += kp;
        acc = Some(match acc {
            None => g,
            Some(a) => a.schur_product(&g)?,
        });
    }
    Ok(Synthesized { diagram: acc.expect("at least one factor"), k, factors: parts.len() })
}

/// Schur product of one labelled pseudobinary factor per distinct entry.
pub fn matrix_to_diagram_ring(m: &Matrix) -> Result<Synthesized, SynthError> {
    schur_all(m, |f| Ok((factor_with(f, &ring_effect(&f.r)), 0)))
}

fn to_cycint(s: &Scalar) -> Option<CycInt> {
    let h = s.halfpow();
    if s.is_zero() {
        return Some(CycInt::zero(s.d()));
    }
    (h >= 0 && h % 2 == 0).then(|| s.num().scale(&BigInt::from(s.d()).pow((h / 2) as u32)))
}

/// As the ring pipeline, with every labelled postselection replaced by a phase-free
/// H-state built from successor gadgets.
pub fn matrix_to_diagram_phase_free(m: &Matrix) -> Result<Synthesized, SynthError> {
    for (row, es) in m.entries.iter().enumerate() {
        for (col, s) in es.iter().enumerate() {
            if to_cycint(s).is_none() {
                return Err(SynthError::NotInZOmega { row, col, value: s.to_string() });
            }
        }
    }
    schur_all(m, |f| {
        if f.r.is_zero() {
            return Ok((factor_with(f, &dg::effect(f.d, 0)), 0));
        }
        let state = hbox_state_phase_free(&to_cycint(&f.r).expect("checked above"))?;
        Ok((factor_with(f, &state.diagram.transpose()), state.k))
    })
}

#[cfg(test)]
mod tests;
