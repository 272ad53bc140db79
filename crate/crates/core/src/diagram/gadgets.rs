use super::{Diagram, Dir, Endpoint, NodeKind};
use crate::ring::Scalar;

fn single(d: u32, kind: NodeKind, nin: usize, nout: usize) -> Diagram {
    let mut g = Diagram::empty(d);
    let n = g.add_node(kind);
    for _ in 0..nin {
        g.attach(n, Dir::In);
    }
    for _ in 0..nout {
        g.attach(n, Dir::Out);
    }
    g
}

pub fn z_spider(d: u32, nin: usize, nout: usize) -> Diagram {
    single(d, NodeKind::Z, nin, nout)
}

pub fn h_box(d: u32, nin: usize, nout: usize, label: Scalar) -> Diagram {
    single(d, NodeKind::H(label), nin, nout)
}

/// Phase-free H-box, label ω.
pub fn h_box_w(d: u32, nin: usize, nout: usize) -> Diagram {
    h_box(d, nin, nout, Scalar::omega(d, 1))
}

pub fn hadamard(d: u32) -> Diagram {
    h_box_w(d, 1, 1)
}

pub fn identity(d: u32, n: usize) -> Diagram {
    let mut g = Diagram::empty(d);
    g.boundary = [vec![Dir::In; n], vec![Dir::Out; n]].concat();
    for i in 0..n {
        g.add_edge(Endpoint::Boundary(i), Endpoint::Boundary(n + i));
    }
    g
}

/// `k` Hadamards in sequence; `k = 0` is a plain wire.
pub fn h_chain(d: u32, k: usize) -> Diagram {
    (0..k).fold(identity(d, 1), |acc, _| seq(&acc, &hadamard(d)))
}

/// Sequential composition of two diagrams known to fit together.
pub fn seq(a: &Diagram, b: &Diagram) -> Diagram {
    a.compose_seq(b).expect("gadget signatures fit")
}

pub fn par(a: &Diagram, b: &Diagram) -> Diagram {
    a.compose_par(b).expect("equal dimensions")
}

pub fn seq_all(parts: &[Diagram]) -> Diagram {
    let mut it = parts.iter();
    let first = it.next().expect("at least one part").clone();
    it.fold(first, |acc, p| seq(&acc, p))
}

pub fn par_all(d: u32, parts: &[Diagram]) -> Diagram {
    parts.iter().fold(Diagram::empty(d), |acc, p| par(&acc, p))
}

/// Z-spider with a Hadamard on every leg, with no scalar correction. Its tensor is
/// d^{1−n/2}·[Σ legs ≡ 0].
pub fn raw_x_spider(d: u32, nin: usize, nout: usize) -> Diagram {
    let mut g = Diagram::empty(d);
    let z = g.add_z();
    for dir in std::iter::repeat_n(Dir::In, nin).chain(std::iter::repeat_n(Dir::Out, nout)) {
        let h = g.add_h();
        g.connect(z, h);
        g.attach(h, dir);
    }
    g
}

/// X-spider normalized so its tensor is exactly [Σ legs ≡ 0 mod d].
pub fn x_spider(d: u32, nin: usize, nout: usize) -> Diagram {
    let n = (nin + nout) as i64;
    raw_x_spider(d, nin, nout).scaled(&Scalar::sqrt_d_pow(d, n - 2))
}

/// |i⟩ ↦ |−i⟩.
pub fn antipode(d: u32) -> Diagram {
    h_chain(d, 2)
}

pub fn negate(d: u32) -> Diagram {
    antipode(d)
}

/// H³ ∘ (Z-spider carrying a 1-ary H-box) ∘ H, which is X/√d.
pub fn raw_pauli_x(d: u32) -> Diagram {
    let mut phase = Diagram::empty(d);
    let z = phase.add_z();
    let h = phase.add_h();
    phase.connect(z, h);
    phase.attach(z, Dir::In);
    phase.attach(z, Dir::Out);
    seq_all(&[hadamard(d), phase, h_chain(d, 3)])
}

/// |i⟩ ↦ |i+1⟩.
pub fn pauli_x(d: u32) -> Diagram {
    raw_pauli_x(d).scaled(&Scalar::sqrt_d_pow(d, 1))
}

pub fn pauli_x_pow(d: u32, k: u32) -> Diagram {
    (0..k % d).fold(identity(d, 1), |acc, _| seq(&acc, &pauli_x(d)))
}

/// Z–H–Z, evaluating to √d.
pub fn sd(d: u32) -> Diagram {
    seq_all(&[z_spider(d, 0, 1), hadamard(d), z_spider(d, 1, 0)])
}

/// A phase-free scalar diagram evaluating to 1/√d.
pub fn sdi(d: u32) -> Diagram {
    let zero_ary = h_box_w(d, 0, 0);
    let pair = seq_all(&[h_box_w(d, 0, 1), hadamard(d), h_box_w(d, 1, 0)]);
    par_all(d, &[zero_ary, pair, sd(d)])
}

/// |x⟩ ↦ |x⟩^{⊗ fanout}.
pub fn copy(d: u32, fanout: usize) -> Diagram {
    z_spider(d, 1, fanout)
}

/// |x⟩ ↦ 1.
pub fn discard(d: u32) -> Diagram {
    z_spider(d, 1, 0)
}

/// |x, y⟩ ↦ |x + y⟩.
pub fn add(d: u32) -> Diagram {
    seq(&x_spider(d, 2, 1), &antipode(d))
}

/// |x, y⟩ ↦ |x·y⟩.
pub fn multiply(d: u32) -> Diagram {
    seq(&h_box_w(d, 2, 1), &h_chain(d, 3))
}

/// |k⟩ exactly.
pub fn constant(d: u32, k: u32) -> Diagram {
    seq(&x_spider(d, 0, 1), &pauli_x_pow(d, k))
}

/// ⟨k| exactly.
pub fn effect(d: u32, k: u32) -> Diagram {
    constant(d, k).transpose()
}

/// |x⟩ ↦ |x^k⟩ with 0⁰ = 1.
pub fn exponent(d: u32, k: u32) -> Diagram {
    match k {
        0 => par(&discard(d), &constant(d, 1)),
        1 => identity(d, 1),
        _ => {
            let mut g = copy(d, k as usize);
            for left in (2..=k as usize).rev() {
                let stage = par(&multiply(d), &identity(d, left - 2));
                g = seq(&g, &stage);
            }
            g
        }
    }
}

/// |x⟩ ↦ |x + c⟩ as a one-input gadget.
pub fn add_const(d: u32, c: u32) -> Diagram {
    pauli_x_pow(d, c)
}

/// A random phase-free diagram with at most `max_nodes` nodes and `max_boundary`
/// boundary legs, inputs listed before outputs.
pub fn random_diagram(d: u32, rng: &mut impl rand::Rng, max_nodes: usize, max_boundary: usize) -> Diagram {
    let mut g = Diagram::empty(d);
    let n = rng.gen_range(1..=max_nodes);
    for _ in 0..n {
        if rng.gen_bool(0.5) {
            g.add_z();
        } else {
            g.add_h();
        }
    }
    let k = rng.gen_range(0..=max_boundary);
    let nin = rng.gen_range(0..=k);
    for i in 0..k {
        let node = rng.gen_range(0..n);
        g.attach(node, if i < nin { Dir::In } else { Dir::Out });
    }
    for _ in 0..rng.gen_range(n.saturating_sub(1)..=n + 2) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        g.connect(a, b);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{apply_to_basis, contract, Tensor};

    fn basis(d: u32, outs: &[u32]) -> Tensor {
        Tensor::basis(d, outs)
    }

    #[test]
    fn x_spider_adds_negated() {
        for d in [2u32, 3, 5] {
            for x in 0..d {
                for y in 0..d {
                    let t = apply_to_basis(&x_spider(d, 2, 1), &[x, y]).unwrap();
                    assert_eq!(t, basis(d, &[(2 * d - x - y) % d]));
                }
            }
        }
    }

    #[test]
    fn one_one_x_spider_is_antipode() {
        for d in [2u32, 3, 5] {
            assert_eq!(contract(&x_spider(d, 1, 1)).unwrap(), contract(&antipode(d)).unwrap());
        }
        assert_eq!(apply_to_basis(&antipode(3), &[1]).unwrap(), basis(3, &[2]));
    }

    #[test]
    fn scalar_gadgets() {
        for d in [2u32, 3, 5, 7] {
            assert_eq!(contract(&sd(d)).unwrap().scalar(), Scalar::sqrt_d_pow(d, 1));
            assert_eq!(contract(&sdi(d)).unwrap().scalar(), Scalar::sqrt_d_pow(d, -1));
            assert!(contract(&par(&sd(d), &sdi(d))).unwrap().scalar().is_one());
            assert!(sdi(d).is_phase_free());
        }
    }

    #[test]
    fn arithmetic_gadgets_match_tables() {
        for d in [3u32, 5] {
            for x in 0..d {
                assert_eq!(apply_to_basis(&pauli_x(d), &[x]).unwrap(), basis(d, &[(x + 1) % d]));
                assert_eq!(apply_to_basis(&negate(d), &[x]).unwrap(), basis(d, &[(d - x) % d]));
                assert_eq!(apply_to_basis(&copy(d, 3), &[x]).unwrap(), basis(d, &[x, x, x]));
                for y in 0..d {
                    assert_eq!(apply_to_basis(&add(d), &[x, y]).unwrap(), basis(d, &[(x + y) % d]));
                    assert_eq!(apply_to_basis(&multiply(d), &[x, y]).unwrap(), basis(d, &[(x * y) % d]));
                }
            }
        }
        assert_eq!(apply_to_basis(&multiply(3), &[2, 2]).unwrap(), basis(3, &[1]));
    }

    #[test]
    fn constants_and_exponents() {
        for d in [2u32, 3, 5] {
            for k in 0..d {
                assert_eq!(contract(&constant(d, k)).unwrap(), basis(d, &[k]));
            }
        }
        assert_eq!(apply_to_basis(&exponent(5, 4), &[2]).unwrap(), basis(5, &[1]));
        for d in [2u32, 3, 5, 7] {
            for x in 0..d {
                let want = if x == 0 { 0 } else { 1 };
                assert_eq!(apply_to_basis(&exponent(d, d - 1), &[x]).unwrap(), basis(d, &[want]));
                for k in 0..=d + 1 {
                    let v = (0..k).fold(1u64, |a, _| a * x as u64 % d as u64) as u32;
                    assert_eq!(apply_to_basis(&exponent(d, k), &[x]).unwrap(), basis(d, &[v]));
                }
            }
        }
    }

    #[test]
    fn hadamard_squared_is_antipode_and_h4_is_identity() {
        for d in [2u32, 3, 5] {
            let hh = seq(&hadamard(d), &hadamard(d));
            assert_eq!(contract(&hh).unwrap(), contract(&antipode(d)).unwrap());
            assert_eq!(contract(&h_chain(d, 4)).unwrap(), contract(&identity(d, 1)).unwrap());
        }
    }
}
