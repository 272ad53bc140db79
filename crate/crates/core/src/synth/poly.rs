use std::collections::BTreeMap;
use std::fmt;

/// A polynomial over Z_d with exponents reduced by x^d = x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub d: u32,
    pub nvars: usize,
    terms: BTreeMap<Vec<u32>, u32>,
}

fn reduce_exp(d: u32, e: u32) -> u32 {
    if e == 0 {
        0
    } else {
        (e - 1) % (d - 1) + 1
    }
}

fn pow_mod(d: u32, x: u32, e: u32) -> u32 {
    let mut acc = 1u64;
    for _ in 0..e {
        acc = acc * x as u64 % d as u64;
    }
    acc as u32
}

impl Poly {
    pub fn zero(d: u32, nvars: usize) -> Poly {
        Poly { d, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(d: u32, nvars: usize, c: i64) -> Poly {
        Self::from_terms(d, nvars, [(vec![0; nvars], c)])
    }

    pub fn var(d: u32, nvars: usize, i: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(d, nvars, [(e, 1)])
    }

    /// Sums the given monomials, reducing exponents and coefficients.
    pub fn from_terms(d: u32, nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, i64)>) -> Poly {
        let mut p = Self::zero(d, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent tuple length");
            let e: Vec<u32> = e.into_iter().map(|x| reduce_exp(d, x)).collect();
            let c = c.rem_euclid(d as i64) as u32;
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: u32) {
        let v = (self.terms.get(&e).copied().unwrap_or(0) + c) % self.d;
        if v == 0 {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, u32)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if no variable occurs.
    pub fn as_constant(&self) -> Option<u32> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&vec![0; self.nvars]).copied(),
            _ => None,
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, &c) in &o.terms {
            p.add_term(e.clone(), c);
        }
        p
    }

    pub fn neg(&self) -> Poly {
        let mut p = Self::zero(self.d, self.nvars);
        for (e, &c) in &self.terms {
            p.add_term(e.clone(), self.d - c);
        }
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut p = Self::zero(self.d, self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &o.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| reduce_exp(self.d, a + b)).collect();
                p.add_term(e, ca * cb % self.d);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Self::constant(self.d, self.nvars, 1), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &[u32]) -> u32 {
        let d = self.d as u64;
        let mut acc = 0u64;
        for (e, &c) in &self.terms {
            let mut t = c as u64;
            for (&xi, &ei) in x.iter().zip(e) {
                t = t * pow_mod(self.d, xi % self.d, ei) as u64 % d;
            }
            acc = (acc + t) % d;
        }
        acc as u32
    }

    /// Values on every point of Z_d^nvars, big-endian.
    pub fn values(&self) -> Vec<u32> {
        let size = (self.d as usize).pow(self.nvars as u32);
        (0..size).map(|i| self.eval(&digits(self.d, self.nvars, i))).collect()
    }

    /// The unique reduced polynomial with the given value table.
    pub fn from_values(d: u32, nvars: usize, values: &[u32]) -> Poly {
        let du = d as usize;
        assert_eq!(values.len(), du.pow(nvars as u32), "value table size");
        // basis[a][e]: coefficient of x^e in 1 − (x − a)^{d−1}
        let basis: Vec<Vec<u64>> = (0..d)
            .map(|a| {
                let delta =
                    Poly::constant(d, 1, 1).sub(&Poly::var(d, 1, 0).sub(&Poly::constant(d, 1, a as i64)).pow(d - 1));
                (0..d).map(|e| delta.terms.get(&vec![e]).copied().unwrap_or(0) as u64).collect()
            })
            .collect();
        let mut t: Vec<u64> = values.iter().map(|&v| (v % d) as u64).collect();
        for axis in 0..nvars {
            let stride = du.pow((nvars - 1 - axis) as u32);
            let mut out = vec![0u64; t.len()];
            for base in 0..t.len() {
                if !(base / stride).is_multiple_of(du) {
                    continue;
                }
                for e in 0..du {
                    let mut acc = 0u64;
                    for (a, row) in basis.iter().enumerate() {
                        acc += t[base + a * stride] * row[e];
                    }
                    out[base + e * stride] = acc % d as u64;
                }
            }
            t = out;
        }
        let mut p = Self::zero(d, nvars);
        for (i, &c) in t.iter().enumerate() {
            if c != 0 {
                p.terms.insert(digits(d, nvars, i), c as u32);
            }
        }
        p
    }

    /// Coefficients of powers of the last variable: self = Σ_i parts[i]·x_n^i, each
    /// part over the first n − 1 variables.
    pub fn split_last(&self) -> Vec<Poly> {
        let n = self.nvars;
        assert!(n > 0, "split of a constant polynomial");
        let top = self.terms.keys().map(|e| e[n - 1]).max().unwrap_or(0);
        let mut parts = vec![Self::zero(self.d, n - 1); top as usize + 1];
        for (e, &c) in &self.terms {
            parts[e[n - 1] as usize].add_term(e[..n - 1].to_vec(), c);
        }
        parts
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, &c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{k}", names[i]) })
                .collect();
            parts.push(match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono.join(""),
                _ => format!("{c}{}", mono.join("")),
            });
        }
        parts.join(" + ")
    }
}

pub(crate) fn digits(d: u32, n: usize, mut i: usize) -> Vec<u32> {
    let mut v = vec![0; n];
    for k in (0..n).rev() {
        v[k] = (i % d as usize) as u32;
        i /= d as usize;
    }
    v
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.fmt_with(&names))
    }
}
