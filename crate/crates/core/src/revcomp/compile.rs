use super::gadgets::{Em, Work};
use super::{require_odd_prime, Ancilla, AncillaKind, Circuit, Ctrl, Gate, RevError};

/// Compiled permutations use at most this many native gates per n·dⁿ, counting
/// ZeroCtrlXinv as d − 1 gates.
pub const PERM_GATE_CONSTANT: usize = 300;

/// Gate kinds per ordered wire pair in the native set (ZeroCtrlX, ZeroCtrlXinv, H).
pub const LOWER_BOUND_SLOTS: f64 = 3.0;

/// A bijection of Z_d^n, as the image of each big-endian ditstring index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    pub d: u32,
    pub n: usize,
    pub images: Vec<usize>,
}

impl Permutation {
    pub fn new(d: u32, n: usize, images: Vec<usize>) -> Result<Permutation, RevError> {
        let size = (d as usize).pow(n as u32);
        if images.len() != size {
            return Err(RevError::NotBijective(format!("{} images for {size} ditstrings", images.len())));
        }
        let mut seen = vec![false; size];
        for &i in &images {
            if i >= size || seen[i] {
                return Err(RevError::NotBijective(format!("image {i} repeated or out of range")));
            }
            seen[i] = true;
        }
        Ok(Permutation { d, n, images })
    }

    pub fn identity(d: u32, n: usize) -> Permutation {
        Permutation { d, n, images: (0..(d as usize).pow(n as u32)).collect() }
    }

    pub fn random(d: u32, n: usize, rng: &mut impl rand::Rng) -> Permutation {
        use rand::seq::SliceRandom;
        let mut p = Self::identity(d, n);
        p.images.shuffle(rng);
        p
    }

    pub fn digits(&self, mut i: usize) -> Vec<u32> {
        let mut v = vec![0; self.n];
        for k in (0..self.n).rev() {
            v[k] = (i % self.d as usize) as u32;
            i /= self.d as usize;
        }
        v
    }

    pub fn index(&self, digits: &[u32]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.d as usize + x as usize)
    }

    pub fn apply(&self, digits: &[u32]) -> Vec<u32> {
        self.digits(self.images[self.index(digits)])
    }

    /// Non-trivial cycles, each starting at its minimal element, in order of that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            out.push(cyc);
        }
        out
    }

    /// Transpositions whose left-to-right application gives the permutation.
    pub fn transpositions(&self) -> Vec<(usize, usize)> {
        self.cycles().iter().flat_map(|c| c[1..].iter().map(move |&x| (c[0], x))).collect()
    }
}

/// Circuit on n data wires (0..n) followed by scratch and borrowed wires that
/// realizes the permutation, one two-cycle per transposition.
pub fn compile_permutation(p: &Permutation) -> Result<Circuit, RevError> {
    require_odd_prime(p.d)?;
    let n = p.n;
    let work = Work::after(n);
    let extra: Vec<usize> = (n + 4..n + 4 + n.saturating_sub(4)).collect();
    let mut em = Em::new(p.d, work);
    let wires: Vec<usize> = (0..n).collect();
    for (a, b) in p.transpositions() {
        em.two_cycle(&wires, &p.digits(a), &p.digits(b), &extra)?;
    }
    let mut ancillae = work.ancillae();
    ancillae.extend(extra.iter().map(|&wire| Ancilla { wire, kind: AncillaKind::Borrowed }));
    Ok(Circuit { d: p.d, n_wires: n + 4 + extra.len(), ancillae, gates: em.gates })
}

fn flatten(g: &Gate) -> Option<(Vec<(usize, u32)>, Gate)> {
    match g {
        Gate::CtrlU { control, on: Ctrl::Values(vs), body } if vs.len() == 1 => {
            let (mut cs, b) = flatten(body)?;
            cs.insert(0, (*control, vs[0]));
            Some((cs, b))
        }
        Gate::CtrlU { .. } => None,
        other => Some((Vec::new(), other.clone())),
    }
}

/// Rewrites every gate into ZeroCtrlX, ZeroCtrlXinv and H, appending the scratch
/// and borrowed wires the gadgets need.
pub fn lower(c: &Circuit) -> Result<Circuit, RevError> {
    c.validate()?;
    if c.gates.iter().all(Gate::is_native) {
        return Ok(c.clone());
    }
    require_odd_prime(c.d)?;
    let d = c.d;
    let n = c.n_wires;
    let need = c.gates.iter().filter_map(|g| flatten(g).map(|(cs, _)| cs.len().saturating_sub(2))).max().unwrap_or(0);
    let work = Work::after(n);
    let extra: Vec<usize> = (n + 4..n + 4 + need).collect();
    let mut em = Em::new(d, work);
    for g in &c.gates {
        match g {
            Gate::X(w) => em.shift(*w, 1),
            Gate::Xinv(w) => em.shift(*w, -1),
            Gate::X01(w) => em.x01(*w),
            Gate::Swap { w, a, b } => em.swap_values(None, *w, *a, *b),
            Gate::H(_) | Gate::ZeroCtrlX { .. } | Gate::ZeroCtrlXinv { .. } => em.gates.push(g.clone()),
            Gate::CX { c, t } => em.cx(*c, *t),
            Gate::Toffoli { a, b, t } => em.toffoli(*a, *b, *t),
            Gate::CtrlU { control, on, body } => match (on, body.as_ref()) {
                (Ctrl::Lambda, Gate::X(t)) => em.cx(*control, *t),
                (Ctrl::Lambda, Gate::Xinv(t)) => {
                    for _ in 1..d {
                        em.cx(*control, *t);
                    }
                }
                (Ctrl::Values(vs), Gate::X(t) | Gate::Xinv(t)) if vs.len() > 1 => {
                    let k = if matches!(body.as_ref(), Gate::X(_)) { 1 } else { -1 };
                    for &v in vs {
                        em.ctrl_add_on(*control, v, *t, k);
                    }
                }
                _ => {
                    let (cs, b) = flatten(g).ok_or_else(|| RevError::Unsupported(format!("{g:?}")))?;
                    em.multi(&cs, &b, &extra)?;
                }
            },
        }
    }
    let mut ancillae = c.ancillae.clone();
    ancillae.extend(work.ancillae());
    ancillae.extend(extra.iter().map(|&wire| Ancilla { wire, kind: AncillaKind::Borrowed }));
    Ok(Circuit { d, n_wires: n + 4 + need, ancillae, gates: em.gates })
}

/// Native gate count after lowering. ZeroCtrlXinv counts as d − 1 gates unless
/// `native_inverse` is set.
pub fn gate_count(c: &Circuit, native_inverse: bool) -> Result<usize, RevError> {
    let low = lower(c)?;
    let inv = if native_inverse { 1 } else { c.d as usize - 1 };
    Ok(low
        .gates
        .iter()
        .map(|g| match g {
            Gate::ZeroCtrlXinv { .. } => inv,
            _ => 1,
        })
        .sum())
}

/// Counting lower bound on the gate count needed for the hardest permutation of
/// Z_d^n, with at most c·n² single-gate placements.
pub fn lower_bound(d: u32, n: usize, c: f64) -> f64 {
    let nf = n as f64;
    (d as f64).ln() / 2.0 * nf * (d as f64).powi(n as i32) / (c.ln() + 2.0 * nf.ln())
}
