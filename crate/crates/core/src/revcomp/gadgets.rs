use crate::ring::Scalar;

use super::{require_odd_prime, Ancilla, AncillaKind, Circuit, Gate, RevError};

/// Scratch wires shared by the gadgets. `zero` is never modified and serves as the
/// control for plain shifts; the others are zeroed between uses.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Work {
    pub zero: usize,
    pub w1: usize,
    pub w2: usize,
    pub w3: usize,
}

impl Work {
    pub fn after(n: usize) -> Work {
        Work { zero: n, w1: n + 1, w2: n + 2, w3: n + 3 }
    }

    pub fn ancillae(&self) -> Vec<Ancilla> {
        [self.zero, self.w1, self.w2, self.w3].iter().map(|&wire| Ancilla { wire, kind: AncillaKind::Zeroed }).collect()
    }
}

/// Emits native gates (ZeroCtrlX, ZeroCtrlXinv, H).
pub(crate) struct Em {
    pub d: u32,
    pub work: Work,
    pub gates: Vec<Gate>,
}

impl Em {
    pub fn new(d: u32, work: Work) -> Em {
        Em { d, work, gates: Vec::new() }
    }

    fn modd(&self, k: i64) -> u32 {
        k.rem_euclid(self.d as i64) as u32
    }

    pub fn zcx(&mut self, c: usize, t: usize) {
        self.gates.push(Gate::ZeroCtrlX { c, t });
    }

    pub fn zcxi(&mut self, c: usize, t: usize) {
        self.gates.push(Gate::ZeroCtrlXinv { c, t });
    }

    /// t += k when c = 0.
    pub fn ctrl_add(&mut self, c: usize, t: usize, k: i64) {
        let k = self.modd(k);
        if k == self.d - 1 {
            self.zcxi(c, t);
        } else {
            for _ in 0..k {
                self.zcx(c, t);
            }
        }
    }

    /// w += k.
    pub fn shift(&mut self, w: usize, k: i64) {
        let zero = self.work.zero;
        self.ctrl_add(zero, w, k);
    }

    /// t += k when c = v.
    pub fn ctrl_add_on(&mut self, c: usize, v: u32, t: usize, k: i64) {
        self.shift(c, -(v as i64));
        self.ctrl_add(c, t, k);
        self.shift(c, v as i64);
    }

    /// 00 ↦ 01 ↦ 10 ↦ 00 on (x, y).
    pub fn p3(&mut self, x: usize, y: usize) {
        self.zcxi(y, x);
        self.zcxi(x, y);
        self.zcx(y, x);
        self.zcx(x, y);
    }

    /// 01 ↦ 10 ↦ 11 ↦ 01, as a three-cycle on 00, 0m, m0 conjugated by a shift of both wires.
    fn p3_shifted(&mut self, x: usize, y: usize) {
        self.shift(x, -1);
        self.shift(y, -1);
        self.zcx(x, y);
        self.zcx(y, x);
        self.zcxi(x, y);
        self.zcxi(y, x);
        self.shift(x, 1);
        self.shift(y, 1);
    }

    /// X01 on t when c ∈ {0, 1}.
    pub fn l2(&mut self, c: usize, t: usize) {
        self.p3_shifted(c, t);
        self.p3(c, t);
    }

    /// Bare X01, with w1 as the zeroed control.
    pub fn x01(&mut self, t: usize) {
        let w1 = self.work.w1;
        self.l2(w1, t);
    }

    /// X01 on t when c = 0, using w1.
    pub fn zero_ctrl_x01(&mut self, c: usize, t: usize) {
        let s = self.work.w1;
        self.zcx(c, s);
        self.shift(s, -1);
        self.l2(s, t);
        self.shift(s, 1);
        self.zcxi(c, s);
    }

    /// X01 on t when c = v (or unconditionally).
    fn x01_if(&mut self, ctrl: Option<(usize, u32)>, t: usize) {
        match ctrl {
            None => self.x01(t),
            Some((c, v)) => {
                self.shift(c, -(v as i64));
                self.zero_ctrl_x01(c, t);
                self.shift(c, v as i64);
            }
        }
    }

    /// Exchanges values a and b on t (under an optional control) as a ladder of
    /// adjacent transpositions; only the X01 cores are controlled.
    pub fn swap_values(&mut self, ctrl: Option<(usize, u32)>, t: usize, a: u32, b: u32) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b) as i64, a.max(b) as i64);
        let ladder: Vec<i64> = (lo..hi).chain((lo..hi - 1).rev()).collect();
        let mut off = 0i64;
        for k in ladder {
            self.shift(t, -k - off);
            off = -k;
            self.x01_if(ctrl, t);
        }
        self.shift(t, -off);
    }

    /// w += mult when c1 = v1 and c2 = v2, using w1 as the counter.
    pub fn base(&mut self, c1: usize, v1: u32, c2: usize, v2: u32, w: usize, mult: i64) {
        let z = self.work.w1;
        self.ctrl_add_on(c1, v1, z, 1);
        self.ctrl_add_on(c2, v2, z, 1);
        self.shift(z, -2);
        self.ctrl_add(z, w, mult);
        self.shift(z, 2);
        self.ctrl_add_on(c2, v2, z, -1);
        self.ctrl_add_on(c1, v1, z, -1);
    }

    /// w += s·a when c = v.
    pub fn lambda(&mut self, c: usize, v: u32, a: usize, w: usize, s: i64) {
        for k in 1..self.d {
            self.base(c, v, a, k, w, s * k as i64);
        }
    }

    /// t += k when every control holds its value. Needs n − 2 borrowed wires for
    /// n ≥ 3 controls.
    pub fn add_if_all(&mut self, controls: &[(usize, u32)], t: usize, k: i64, borrowed: &[usize]) {
        match controls.len() {
            0 => self.shift(t, k),
            1 => self.ctrl_add_on(controls[0].0, controls[0].1, t, k),
            2 => self.base(controls[0].0, controls[0].1, controls[1].0, controls[1].1, t, k),
            n => {
                let m = n - 2;
                let a = &borrowed[..m];
                let (cn, vn) = controls[n - 1];
                self.lambda(cn, vn, a[m - 1], t, -k);
                self.chain(controls, a, 1);
                self.lambda(cn, vn, a[m - 1], t, k);
                self.chain(controls, a, -1);
            }
        }
    }

    /// a_m += P (product of the first m+1 control indicators), leaving a_1..a_{m−1}
    /// disturbed; sign −1 runs the exact inverse.
    fn chain(&mut self, controls: &[(usize, u32)], a: &[usize], sign: i64) {
        let m = a.len();
        let mut steps: Vec<(usize, i64)> = (1..m).rev().map(|k| (k, -1)).collect();
        steps.push((0, 1));
        steps.extend((1..m).map(|k| (k, 1)));
        if sign < 0 {
            steps.reverse();
            for s in &mut steps {
                s.1 = -s.1;
            }
        }
        for (k, s) in steps {
            if k == 0 {
                self.base(controls[0].0, controls[0].1, controls[1].0, controls[1].1, a[0], s);
            } else {
                let (c, v) = controls[k + 1];
                self.lambda(c, v, a[k - 1], a[k], s);
            }
        }
    }

    /// Applies `body` when every control holds its value.
    pub fn multi(&mut self, controls: &[(usize, u32)], body: &Gate, borrowed: &[usize]) -> Result<(), RevError> {
        let (t, swap) = match *body {
            Gate::X(t) => {
                return {
                    self.add_if_all(controls, t, 1, borrowed);
                    Ok(())
                }
            }
            Gate::Xinv(t) => {
                return {
                    self.add_if_all(controls, t, -1, borrowed);
                    Ok(())
                }
            }
            Gate::X01(t) => (t, (0, 1)),
            Gate::Swap { w, a, b } => (w, (a, b)),
            _ => return Err(RevError::Unsupported(format!("controlled {body:?}"))),
        };
        match controls.len() {
            0 => self.swap_values(None, t, swap.0, swap.1),
            1 => self.swap_values(Some(controls[0]), t, swap.0, swap.1),
            _ => {
                let ind = self.work.w2;
                self.add_if_all(controls, ind, 1, borrowed);
                self.swap_values(Some((ind, 1)), t, swap.0, swap.1);
                self.add_if_all(controls, ind, -1, borrowed);
            }
        }
        Ok(())
    }

    /// Exchanges the basis strings a and b on `wires`, identity elsewhere.
    pub fn two_cycle(&mut self, wires: &[usize], a: &[u32], b: &[u32], borrowed: &[usize]) -> Result<(), RevError> {
        let p = (0..a.len()).rev().find(|&i| a[i] != b[i]).ok_or(RevError::SameStrings)?;
        let others: Vec<usize> = (0..a.len()).filter(|&j| j != p && a[j] != b[j]).collect();
        let z = self.work.w3;
        let step1 = |em: &mut Em| {
            if others.is_empty() {
                return;
            }
            em.ctrl_add_on(wires[p], b[p], z, 1);
            for &j in &others {
                em.swap_values(Some((z, 1)), wires[j], a[j], b[j]);
            }
            em.ctrl_add_on(wires[p], b[p], z, -1);
        };
        step1(self);
        let controls: Vec<(usize, u32)> = (0..a.len()).filter(|&j| j != p).map(|j| (wires[j], a[j])).collect();
        let mut spare = vec![z];
        spare.extend_from_slice(borrowed);
        let need = controls.len().saturating_sub(2);
        if spare.len() < need {
            return Err(RevError::InsufficientAncillae { need, have: spare.len() });
        }
        self.multi(&controls, &Gate::Swap { w: wires[p], a: a[p], b: b[p] }, &spare)?;
        step1(self);
        Ok(())
    }

    /// t += x·y.
    pub fn toffoli(&mut self, x: usize, y: usize, t: usize) {
        for v in 1..self.d {
            self.lambda(x, v, y, t, v as i64);
        }
    }

    /// t += c.
    pub fn cx(&mut self, c: usize, t: usize) {
        for k in 1..self.d {
            self.ctrl_add_on(c, k, t, k as i64);
        }
    }

    /// diag(ω, 1, …, 1) on `data` by phase kickback from `anc`.
    pub fn q0(&mut self, data: usize, anc: usize) {
        self.shift(anc, -1);
        self.gates.push(Gate::H(anc));
        self.zcx(data, anc);
        for _ in 0..3 {
            self.gates.push(Gate::H(anc));
        }
        self.shift(anc, 1);
    }
}

fn circuit(d: u32, n_wires: usize, ancillae: Vec<Ancilla>, gates: Vec<Gate>) -> Circuit {
    Circuit { d, n_wires, ancillae, gates }
}

fn zeroed(wires: &[usize]) -> Vec<Ancilla> {
    wires.iter().map(|&wire| Ancilla { wire, kind: AncillaKind::Zeroed }).collect()
}

/// Four-gate three-cycle |00⟩ ↦ |01⟩ ↦ |10⟩ ↦ |00⟩ on two wires.
pub fn p3_gadget(d: u32) -> Result<Circuit, RevError> {
    require_odd_prime(d)?;
    let mut em = Em::new(d, Work::after(2));
    em.p3(0, 1);
    Ok(circuit(d, 2, Vec::new(), em.gates))
}

/// The controlled-X01 gadgets: X01 on wire 1 when wire 0 ∈ {0,1}; bare X01 on
/// wire 0; X01 on wire 1 when wire 0 is 0.
pub struct X01Family {
    pub zero_and_one_ctrl_x01: Circuit,
    pub x01: Circuit,
    pub zero_ctrl_x01: Circuit,
}

pub fn ctrl_x01_family(d: u32) -> Result<X01Family, RevError> {
    require_odd_prime(d)?;
    let mut em = Em::new(d, Work { zero: 2, w1: 3, w2: 3, w3: 3 });
    em.l2(0, 1);
    let l2 = circuit(d, 3, zeroed(&[2]), em.gates);

    let mut em = Em::new(d, Work { zero: 1, w1: 2, w2: 2, w3: 2 });
    em.x01(0);
    let x01 = circuit(d, 3, zeroed(&[1, 2]), em.gates);

    let mut em = Em::new(d, Work { zero: 2, w1: 3, w2: 3, w3: 3 });
    em.zero_ctrl_x01(0, 1);
    let zc = circuit(d, 4, zeroed(&[2, 3]), em.gates);
    Ok(X01Family { zero_and_one_ctrl_x01: l2, x01, zero_ctrl_x01: zc })
}

/// Applies `body` when every control wire holds its value. Scratch wires are
/// appended after the highest wire used; `borrowed` wires may hold anything and
/// are restored.
pub fn multi_ctrl(d: u32, controls: &[(usize, u32)], body: Gate, borrowed: &[usize]) -> Result<Circuit, RevError> {
    require_odd_prime(d)?;
    let need = controls.len().saturating_sub(2);
    if borrowed.len() < need {
        return Err(RevError::InsufficientAncillae { need, have: borrowed.len() });
    }
    if controls.iter().any(|&(_, v)| v >= d) {
        return Err(RevError::Malformed("control value outside Z_d".into()));
    }
    let mut used: Vec<usize> =
        controls.iter().map(|c| c.0).chain(body.wires()).chain(borrowed.iter().copied()).collect();
    let n = used.iter().max().map_or(0, |m| m + 1);
    used.sort_unstable();
    if used.windows(2).any(|w| w[0] == w[1]) {
        return Err(RevError::Malformed("controls, target and borrowed wires overlap".into()));
    }
    let work = Work::after(n);
    let mut em = Em::new(d, work);
    em.multi(controls, &body, borrowed)?;
    let mut anc = zeroed(&[work.zero, work.w1, work.w2]);
    anc.extend(borrowed.iter().map(|&wire| Ancilla { wire, kind: AncillaKind::Borrowed }));
    Ok(circuit(d, n + 3, anc, em.gates))
}

/// Exchanges |a⟩ and |b⟩ on n data wires, identity elsewhere. Scratch and borrowed
/// wires follow the data wires.
pub fn two_cycle(d: u32, a: &[u32], b: &[u32]) -> Result<Circuit, RevError> {
    require_odd_prime(d)?;
    if a.len() != b.len() {
        return Err(RevError::Malformed("ditstrings of different lengths".into()));
    }
    if a == b {
        return Err(RevError::SameStrings);
    }
    let n = a.len();
    let work = Work::after(n);
    let extra: Vec<usize> = (n + 4..n + 4 + n.saturating_sub(4)).collect();
    let mut em = Em::new(d, work);
    let wires: Vec<usize> = (0..n).collect();
    em.two_cycle(&wires, a, b, &extra)?;
    let mut anc = work.ancillae();
    anc.extend(extra.iter().map(|&wire| Ancilla { wire, kind: AncillaKind::Borrowed }));
    Ok(circuit(d, n + 4 + extra.len(), anc, em.gates))
}

/// Qudit Toffoli on wires 0, 1 → 2 from |0⟩-controlled X gates.
pub fn toffoli(d: u32) -> Result<Circuit, RevError> {
    require_odd_prime(d)?;
    let mut em = Em::new(d, Work { zero: 3, w1: 4, w2: 4, w3: 4 });
    em.toffoli(0, 1, 2);
    Ok(circuit(d, 5, zeroed(&[3, 4]), em.gates))
}

/// X, CX and the phase gates Q[i] from |0⟩-controlled X and H.
pub struct CliffordGadgets {
    /// X on wire 0.
    pub x: Circuit,
    /// CX from wire 0 to wire 1.
    pub cx: Circuit,
    /// Q[0] on wire 0.
    pub q0: Circuit,
    /// Q[i] on wire 0, for i = 0..d.
    pub qi: Vec<Circuit>,
    /// Global phase carried by every Q[i] circuit.
    pub q_phase: Scalar,
}

pub fn clifford_generators(d: u32) -> Result<CliffordGadgets, RevError> {
    require_odd_prime(d)?;
    let mut em = Em::new(d, Work { zero: 1, w1: 1, w2: 1, w3: 1 });
    em.shift(0, 1);
    let x = circuit(d, 2, zeroed(&[1]), em.gates);

    let mut em = Em::new(d, Work { zero: 2, w1: 2, w2: 2, w3: 2 });
    em.cx(0, 1);
    let cx = circuit(d, 3, zeroed(&[2]), em.gates);

    let qi: Vec<Circuit> = (0..d)
        .map(|i| {
            let mut em = Em::new(d, Work { zero: 1, w1: 2, w2: 2, w3: 2 });
            em.shift(0, -(i as i64));
            em.q0(0, 2);
            em.shift(0, i as i64);
            circuit(d, 3, zeroed(&[1, 2]), em.gates)
        })
        .collect();
    Ok(CliffordGadgets { x, cx, q0: qi[0].clone(), qi, q_phase: Scalar::one(d) })
}
