use super::poly::{digits, Poly};
use super::SynthError;

/// Arithmetic term over Z_d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Const(u32),
    Var(usize),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

/// Propositional formula over equalities of terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prop {
    True,
    False,
    Eq(Term, Term),
    Not(Box<Prop>),
    Or(Vec<Prop>),
    And(Vec<Prop>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub d: u32,
    pub names: Vec<String>,
    pub prop: Prop,
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn plus(self, o: Term) -> Term {
        Term::Add(Box::new(self), Box::new(o))
    }

    /// Smallest variable index, or usize::MAX for a constant term.
    fn first_var(&self) -> usize {
        match self {
            Term::Const(_) => usize::MAX,
            Term::Var(i) => *i,
            Term::Neg(t) => t.first_var(),
            Term::Add(a, b) | Term::Mul(a, b) => a.first_var().min(b.first_var()),
        }
    }

    fn eval(&self, d: u32, x: &[u32]) -> u32 {
        match self {
            Term::Const(c) => c % d,
            Term::Var(i) => x[*i] % d,
            Term::Neg(t) => (d - t.eval(d, x)) % d,
            Term::Add(a, b) => (a.eval(d, x) + b.eval(d, x)) % d,
            Term::Mul(a, b) => ((a.eval(d, x) as u64 * b.eval(d, x) as u64) % d as u64) as u32,
        }
    }

    fn check(&self, d: u32, arity: usize) -> Result<(), SynthError> {
        match self {
            Term::Const(c) if *c >= d => Err(SynthError::Formula(format!("constant {c} outside Z_{d}"))),
            Term::Var(i) if *i >= arity => Err(SynthError::Formula(format!("variable {i} with arity {arity}"))),
            Term::Const(_) | Term::Var(_) => Ok(()),
            Term::Neg(t) => t.check(d, arity),
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.check(d, arity)?;
                b.check(d, arity)
            }
        }
    }

    fn latex(&self, names: &[String]) -> String {
        let wrap = |t: &Term| match t {
            Term::Add(..) | Term::Neg(_) => format!("({})", t.latex(names)),
            _ => t.latex(names),
        };
        match self {
            Term::Const(c) => c.to_string(),
            Term::Var(i) => names[*i].clone(),
            Term::Neg(t) => format!("-{}", wrap(t)),
            Term::Add(a, b) => format!("{}+_d{}", a.latex(names), wrap(b)),
            Term::Mul(a, b) => format!("{}\\cdot_d {}", wrap(a), wrap(b)),
        }
    }

    fn expr(&self) -> PolyExpr {
        match self {
            Term::Const(c) => PolyExpr::Const(*c as i64),
            Term::Var(i) => PolyExpr::Var(*i),
            Term::Neg(t) => PolyExpr::Neg(Box::new(t.expr())),
            Term::Add(a, b) => PolyExpr::Add(vec![a.expr(), b.expr()]).flat(),
            Term::Mul(a, b) => PolyExpr::Mul(vec![a.expr(), b.expr()]).flat(),
        }
    }
}

impl Prop {
    pub fn eq(a: Term, b: Term) -> Prop {
        Prop::Eq(a, b)
    }

    /// A disjunction, collapsing the one-element case.
    pub fn any(mut ps: Vec<Prop>) -> Prop {
        match ps.len() {
            0 => Prop::False,
            1 => ps.pop().unwrap(),
            _ => Prop::Or(ps),
        }
    }

    pub fn all(mut ps: Vec<Prop>) -> Prop {
        match ps.len() {
            0 => Prop::True,
            1 => ps.pop().unwrap(),
            _ => Prop::And(ps),
        }
    }

    fn eval(&self, d: u32, x: &[u32]) -> bool {
        match self {
            Prop::True => true,
            Prop::False => false,
            Prop::Eq(a, b) => a.eval(d, x) == b.eval(d, x),
            Prop::Not(p) => !p.eval(d, x),
            Prop::Or(ps) => ps.iter().any(|p| p.eval(d, x)),
            Prop::And(ps) => ps.iter().all(|p| p.eval(d, x)),
        }
    }

    fn check(&self, d: u32, arity: usize) -> Result<(), SynthError> {
        match self {
            Prop::True | Prop::False => Ok(()),
            Prop::Eq(a, b) => {
                a.check(d, arity)?;
                b.check(d, arity)
            }
            Prop::Not(p) => p.check(d, arity),
            Prop::Or(ps) | Prop::And(ps) => ps.iter().try_for_each(|p| p.check(d, arity)),
        }
    }

    fn latex(&self, names: &[String]) -> String {
        let wrap = |p: &Prop| match p {
            Prop::Or(_) | Prop::And(_) => format!("({})", p.latex(names)),
            _ => p.latex(names),
        };
        match self {
            Prop::True => "\\top".into(),
            Prop::False => "\\bot".into(),
            Prop::Eq(a, b) => format!("({}={})", a.latex(names), b.latex(names)),
            Prop::Not(p) => format!("\\neg {}", wrap(p)),
            Prop::Or(ps) => ps.iter().map(wrap).collect::<Vec<_>>().join(" \\vee "),
            Prop::And(ps) => ps.iter().map(wrap).collect::<Vec<_>>().join(" \\wedge "),
        }
    }

    /// The polynomial construction: an equality gives the difference of its sides,
    /// the side with the earlier variable first; negation
    /// 1 − p^{d−1}, disjunction the product, conjunction goes through De Morgan.
    fn expr(&self, d: u32) -> PolyExpr {
        let not =
            |e: PolyExpr| PolyExpr::Sub(Box::new(PolyExpr::Const(1)), Box::new(PolyExpr::Pow(Box::new(e), d - 1)));
        match self {
            Prop::True => PolyExpr::Const(0),
            Prop::False => PolyExpr::Const(1),
            Prop::Eq(a, b) => {
                let (l, r) = if b.first_var() < a.first_var() { (b, a) } else { (a, b) };
                match r {
                    Term::Const(0) => l.expr(),
                    _ => PolyExpr::Sub(Box::new(l.expr()), Box::new(r.expr())),
                }
            }
            Prop::Not(p) => not(p.expr(d)),
            Prop::Or(ps) => PolyExpr::Mul(ps.iter().map(|p| p.expr(d)).collect()),
            Prop::And(ps) => not(PolyExpr::Mul(ps.iter().map(|p| not(p.expr(d))).collect())),
        }
    }
}

impl Formula {
    pub fn new(d: u32, names: Vec<String>, prop: Prop) -> Result<Formula, SynthError> {
        prop.check(d, names.len())?;
        Ok(Formula { d, names, prop })
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn eval(&self, x: &[u32]) -> bool {
        self.prop.eval(self.d, x)
    }

    /// Truth table over Z_d^arity, big-endian.
    pub fn truth_table(&self) -> Vec<bool> {
        let n = self.arity();
        (0..(self.d as usize).pow(n as u32)).map(|i| self.eval(&digits(self.d, n, i))).collect()
    }

    /// `\varphi_{name}(x, y) = …`.
    pub fn to_latex(&self, name: &str) -> String {
        format!("\\varphi_{name}({}) = {}", self.names.join(", "), self.prop.latex(&self.names))
    }

    /// The unexpanded polynomial whose zeros are the satisfying assignments.
    pub fn to_expr(&self) -> PolyExpr {
        self.prop.expr(self.d)
    }
}

/// Unexpanded integer polynomial expression, read mod d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyExpr {
    Const(i64),
    Var(usize),
    Neg(Box<PolyExpr>),
    Add(Vec<PolyExpr>),
    Sub(Box<PolyExpr>, Box<PolyExpr>),
    Mul(Vec<PolyExpr>),
    Pow(Box<PolyExpr>, u32),
}

impl PolyExpr {
    fn flat(self) -> PolyExpr {
        match self {
            PolyExpr::Add(xs) => PolyExpr::Add(
                xs.into_iter()
                    .flat_map(|x| match x {
                        PolyExpr::Add(ys) => ys,
                        y => vec![y],
                    })
                    .collect(),
            ),
            PolyExpr::Mul(xs) => PolyExpr::Mul(
                xs.into_iter()
                    .flat_map(|x| match x {
                        PolyExpr::Mul(ys) => ys,
                        y => vec![y],
                    })
                    .collect(),
            ),
            e => e,
        }
    }

    pub fn eval(&self, d: u32, x: &[u32]) -> u32 {
        let dd = d as i64;
        let r = |v: i64| v.rem_euclid(dd) as u32;
        match self {
            PolyExpr::Const(c) => r(*c),
            PolyExpr::Var(i) => x[*i] % d,
            PolyExpr::Neg(e) => r(-(e.eval(d, x) as i64)),
            PolyExpr::Add(es) => r(es.iter().map(|e| e.eval(d, x) as i64).sum()),
            PolyExpr::Sub(a, b) => r(a.eval(d, x) as i64 - b.eval(d, x) as i64),
            PolyExpr::Mul(es) => es.iter().fold(1 % d, |acc, e| r(acc as i64 * e.eval(d, x) as i64)),
            PolyExpr::Pow(b, k) => {
                let v = b.eval(d, x) as i64;
                (0..*k).fold(1 % d, |acc, _| r(acc as i64 * v))
            }
        }
    }

    /// Number of occurrences of each variable.
    pub fn var_uses(&self, nvars: usize) -> Vec<usize> {
        let mut uses = vec![0; nvars];
        self.count(&mut uses);
        uses
    }

    fn count(&self, uses: &mut [usize]) {
        match self {
            PolyExpr::Const(_) => {}
            PolyExpr::Var(i) => uses[*i] += 1,
            PolyExpr::Neg(e) | PolyExpr::Pow(e, _) => e.count(uses),
            PolyExpr::Add(es) | PolyExpr::Mul(es) => es.iter().for_each(|e| e.count(uses)),
            PolyExpr::Sub(a, b) => {
                a.count(uses);
                b.count(uses);
            }
        }
    }

    /// The reduced polynomial with the same values.
    pub fn expand(&self, d: u32, nvars: usize) -> Poly {
        let values: Vec<u32> =
            (0..(d as usize).pow(nvars as u32)).map(|i| self.eval(d, &digits(d, nvars, i))).collect();
        Poly::from_values(d, nvars, &values)
    }

    pub fn latex(&self, names: &[String]) -> String {
        let atom = |e: &PolyExpr| match e {
            PolyExpr::Add(_) | PolyExpr::Sub(..) | PolyExpr::Neg(_) | PolyExpr::Mul(_) => {
                format!("({})", e.latex(names))
            }
            PolyExpr::Const(c) if *c < 0 => format!("({c})"),
            _ => e.latex(names),
        };
        let factor = |e: &PolyExpr| match e {
            PolyExpr::Add(_) | PolyExpr::Sub(..) | PolyExpr::Neg(_) => format!("({})", e.latex(names)),
            PolyExpr::Const(c) if *c < 0 => format!("({c})"),
            _ => e.latex(names),
        };
        match self {
            PolyExpr::Const(c) => c.to_string(),
            PolyExpr::Var(i) => names[*i].clone(),
            PolyExpr::Neg(e) => format!("-{}", factor(e)),
            PolyExpr::Add(es) => es.iter().map(|e| e.latex(names)).collect::<Vec<_>>().join("+"),
            PolyExpr::Sub(a, b) => format!("{}-{}", a.latex(names), factor(b)),
            PolyExpr::Mul(es) => es.iter().map(factor).collect::<Vec<_>>().join("\\cdot"),
            PolyExpr::Pow(b, k) => format!("{}^{{{k}}}", atom(b)),
        }
    }

    /// `p_{name}(x,y) = …`.
    pub fn definition(&self, name: &str, names: &[String]) -> String {
        format!("p_{name}({}) = {}", names.join(","), self.latex(names))
    }
}

/// Variable names x (or x_1, x_2, …) for inputs followed by y (or y_1, …) for outputs.
pub fn io_names(n_in: usize, n_out: usize) -> Vec<String> {
    let side = |stem: &str, n: usize| -> Vec<String> {
        if n == 1 {
            vec![stem.to_string()]
        } else {
            (1..=n).map(|i| format!("{stem}_{i}")).collect()
        }
    };
    [side("x", n_in), side("y", n_out)].concat()
}
