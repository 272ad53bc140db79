use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rand::Rng;

use super::*;
use crate::diagram::*;
use crate::ring::CycInt;

/// Sums over every assignment of every edge: slow, but shares nothing with the kernel.
fn brute_force(g: &Diagram) -> Tensor {
    let d = g.d;
    let inner: Vec<usize> = (0..g.edges.len())
        .filter(|&i| !matches!(g.edges[i], (Endpoint::Boundary(_), _) | (_, Endpoint::Boundary(_))))
        .collect();
    let slot_edge: Vec<usize> = (0..g.boundary.len())
        .map(|s| g.edges.iter().position(|&(a, b)| a == Endpoint::Boundary(s) || b == Endpoint::Boundary(s)).unwrap())
        .collect();
    Tensor::from_fn(d, g.boundary.len(), |outer| {
        let mut total = Scalar::zero(d);
        let mut vals = vec![None::<u32>; g.edges.len()];
        let count = (d as usize).pow(inner.len() as u32);
        'assign: for mut code in 0..count {
            vals.iter_mut().for_each(|v| *v = None);
            for (s, &e) in slot_edge.iter().enumerate() {
                if matches!(vals[e], Some(x) if x != outer[s]) {
                    continue 'assign;
                }
                vals[e] = Some(outer[s]);
            }
            for &e in &inner {
                vals[e] = Some((code % d as usize) as u32);
                code /= d as usize;
            }
            let mut term = g.global.clone();
            for (n, kind) in g.nodes.iter().enumerate() {
                let mut legs = Vec::new();
                for (i, &(a, b)) in g.edges.iter().enumerate() {
                    for e in [a, b] {
                        if e == Endpoint::Node(n) {
                            legs.push(vals[i].unwrap());
                        }
                    }
                }
                let value = match kind {
                    NodeKind::Z if legs.is_empty() => Scalar::from_int(d, d),
                    NodeKind::Z if legs.windows(2).all(|w| w[0] == w[1]) => Scalar::one(d),
                    NodeKind::Z => Scalar::zero(d),
                    NodeKind::H(l) => {
                        let p = legs.iter().fold(1u32, |a, &x| a * x % d);
                        &l.pow(p) * &Scalar::sqrt_d_pow(d, -1)
                    }
                };
                term = &term * &value;
            }
            total = total.checked_add(&term).unwrap();
        }
        total
    })
}

fn shuffled_nodes(g: &Diagram, perm: &[usize]) -> Diagram {
    let mut h = g.clone();
    h.nodes = vec![NodeKind::Z; g.nodes.len()];
    for (old, &new) in perm.iter().enumerate() {
        h.nodes[new] = g.nodes[old].clone();
    }
    let f = |e: Endpoint| match e {
        Endpoint::Node(n) => Endpoint::Node(perm[n]),
        s => s,
    };
    h.edges = g.edges.iter().rev().map(|&(a, b)| (f(b), f(a))).collect();
    h
}

/// Matrix product of two maps whose tensors list inputs first.
fn mat_seq(a: &Tensor, a_in: usize, b: &Tensor, b_out: usize) -> Tensor {
    let d = a.d;
    let mid = a.rank - a_in;
    Tensor::from_fn(d, a_in + b_out, |idx| {
        let (i, o) = idx.split_at(a_in);
        let mut acc = Scalar::zero(d);
        for m in 0..(d as usize).pow(mid as u32) {
            let mt = Tensor::zeros(d, mid).index(m);
            let left = a.get(&[i, &mt[..]].concat()).clone();
            let right = b.get(&[&mt[..], o].concat()).clone();
            acc = acc.checked_add(&(&left * &right)).unwrap();
        }
        acc
    })
}

#[test]
fn generator_examples() {
    let t = contract(&Diagram::empty(3)).unwrap();
    assert!(t.scalar().is_one());
    let ghz = contract(&z_spider(3, 0, 3)).unwrap();
    for pos in 0..27 {
        let idx = ghz.index(pos);
        assert_eq!(ghz.data[pos].is_one(), idx[0] == idx[1] && idx[1] == idx[2]);
    }
    let h2 = contract(&hadamard(2)).unwrap();
    let r = Scalar::sqrt_d_pow(2, -1);
    assert_eq!(h2.data, vec![r.clone(), r.clone(), r.clone(), -&r]);
    let h3 = generator_tensor(3, &NodeKind::H(Scalar::omega(3, 1)), 3);
    assert_eq!(*h3.get(&[1, 2, 2]), &Scalar::omega(3, 1) * &Scalar::sqrt_d_pow(3, -1));
    let zero_label = contract(&h_box(3, 0, 1, Scalar::zero(3))).unwrap();
    assert_eq!(zero_label.data[0], Scalar::sqrt_d_pow(3, -1));
    assert!(zero_label.data[1].is_zero() && zero_label.data[2].is_zero());
    let id = contract(&z_spider(3, 1, 1)).unwrap();
    assert_eq!(id, contract(&identity(3, 1)).unwrap());
}

#[test]
fn apply_to_basis_examples() {
    assert_eq!(apply_to_basis(&identity(3, 1), &[1]).unwrap(), Tensor::basis(3, &[1]));
    let plus = apply_to_basis(&hadamard(3), &[0]).unwrap();
    assert!(plus.data.iter().all(|s| *s == Scalar::sqrt_d_pow(3, -1)));
}

#[test]
fn equality_helpers() {
    let a = antipode(3);
    assert!(equal_exact(&a, &a).unwrap());
    assert!(equal_exact(&identity(3, 1), &h_chain(3, 4)).unwrap());
    let b = par(&sd(3), &a);
    assert_eq!(equal_up_to_scalar(&a, &b).unwrap(), Some(Scalar::sqrt_d_pow(3, 1)));
    assert!(equal_exact(&a, &z_spider(3, 2, 0)).is_err());
}

#[test]
fn wire_loops_and_isolated_spiders() {
    let loop_ = identity(3, 1).glue(&[(0, 1)], &[]);
    assert_eq!(contract(&loop_).unwrap().scalar(), Scalar::from_int(3, 3));
    let mut g = Diagram::empty(5);
    let z = g.add_z();
    g.connect(z, z);
    assert_eq!(contract(&g).unwrap().scalar(), Scalar::from_int(5, 5));
}

#[test]
fn random_diagrams_match_brute_force_and_reordering() {
    for d in [2u32, 3, 5] {
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let mut checked = 0;
        while checked < 50 {
            let g = random_diagram(d, &mut rng, 5, 3);
            let inner = g.edges.len() - g.boundary.len();
            if (d as usize).pow((inner + g.boundary.len()) as u32) > 20_000 {
                continue;
            }
            let t = contract(&g).unwrap();
            assert_eq!(t, brute_force(&g), "d={d} {g:?}");
            let perm: Vec<usize> = (0..g.nodes.len()).rev().collect();
            assert_eq!(t, contract(&shuffled_nodes(&g, &perm)).unwrap());
            checked += 1;
        }
    }
}

#[test]
fn regions_are_memoized_consistently() {
    let g = seq(&add(3), &pauli_x(3));
    let t = contract(&g).unwrap();
    let boxed = seq(&add(3).with_region("add"), &pauli_x(3).with_region("x"));
    assert_eq!(contract(&boxed).unwrap(), t);
    assert_eq!(contract(&boxed).unwrap(), t);
    for x in 0..3 {
        for y in 0..3 {
            assert_eq!(apply_to_basis(&boxed, &[x, y]).unwrap(), Tensor::basis(3, &[(x + y + 1) % 3]));
        }
    }
}

#[test]
fn rank_cap_is_reported() {
    std::env::remove_var("ZHKIT_RANK_CAP");
    assert_eq!(rank_cap(3), 12);
    assert_eq!(rank_cap(5), 8);
    let wide = z_spider(3, 0, 14);
    assert!(matches!(contract(&wide), Err(EvalError::RankCap { .. })));
}

#[test]
fn big_coefficients_fall_back_to_bigint() {
    let mut g = Diagram::empty(3);
    g.global = Scalar::new(CycInt::from_i64s(3, &[i64::MAX / 2, 1]), 0);
    let s = sd(3);
    let big = (0..4).fold(g, |acc, _| par(&acc, &s));
    let want = &big.global * &Scalar::sqrt_d_pow(3, 4);
    assert_eq!(contract(&big).unwrap().scalar(), want);
    let mut h = Diagram::empty(3);
    let l = Scalar::new(CycInt::from_i64s(3, &[1 << 40, 3]), 0);
    let n = h.add_node(NodeKind::H(l.clone()));
    h.attach(n, Dir::Out);
    let m = h.add_node(NodeKind::H(l.clone()));
    h.attach(m, Dir::Out);
    let t = contract(&h).unwrap();
    let inv = Scalar::sqrt_d_pow(3, -2);
    assert_eq!(*t.get(&[2, 2]), &(&l.pow(2) * &l.pow(2)) * &inv);
}

fn arb_pair() -> impl Strategy<Value = (u64, u64)> {
    (any::<u64>(), any::<u64>())
}

fn small_map(d: u32, seed: u64, nin: usize, nout: usize) -> Diagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Diagram::empty(d);
    let n = rng.gen_range(1..=3);
    for _ in 0..n {
        if rng.gen_bool(0.5) {
            g.add_z();
        } else {
            g.add_h();
        }
    }
    for i in 0..nin + nout {
        let node = rng.gen_range(0..n);
        g.attach(node, if i < nin { Dir::In } else { Dir::Out });
    }
    for _ in 0..rng.gen_range(0..=n) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        g.connect(a, b);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn compose_seq_is_matrix_product(d in prop::sample::select(vec![2u32, 3, 5]), (s1, s2) in arb_pair()) {
        let a = small_map(d, s1, 1, 2);
        let b = small_map(d, s2, 2, 1);
        let ta = contract(&a).unwrap();
        let tb = contract(&b).unwrap();
        prop_assert_eq!(contract(&seq(&a, &b)).unwrap(), mat_seq(&ta, 1, &tb, 1));
    }

    #[test]
    fn compose_par_is_tensor_product(d in prop::sample::select(vec![2u32, 3]), (s1, s2) in arb_pair()) {
        let a = small_map(d, s1, 1, 1);
        let b = small_map(d, s2, 1, 1);
        let (ta, tb) = (contract(&a).unwrap(), contract(&b).unwrap());
        let t = contract(&par(&a, &b)).unwrap();
        for pos in 0..t.data.len() {
            let i = t.index(pos);
            prop_assert_eq!(&t.data[pos], &(ta.get(&[i[0], i[2]]) * tb.get(&[i[1], i[3]])));
        }
    }

    #[test]
    fn composition_is_associative((s1, s2, s3) in (any::<u64>(), any::<u64>(), any::<u64>())) {
        let a = small_map(3, s1, 1, 2);
        let b = small_map(3, s2, 2, 1);
        let c = small_map(3, s3, 1, 1);
        prop_assert!(equal_exact(&seq(&seq(&a, &b), &c), &seq(&a, &seq(&b, &c))).unwrap());
    }

    #[test]
    fn schur_is_entrywise_and_commutative((s1, s2) in arb_pair()) {
        let a = small_map(3, s1, 1, 1);
        let b = small_map(3, s2, 1, 1);
        let ab = a.schur_product(&b).unwrap();
        let want = contract(&a).unwrap().hadamard_product(&contract(&b).unwrap());
        prop_assert_eq!(contract(&ab).unwrap(), want);
        prop_assert!(equal_exact(&ab, &b.schur_product(&a).unwrap()).unwrap());
    }

    #[test]
    fn flexsymmetry(d in prop::sample::select(vec![2u32, 3, 5]), arity in 0usize..=4, h in any::<bool>(), rot in 0usize..4, bend in 0usize..5) {
        let g = if h { h_box_w(d, 0, arity) } else { z_spider(d, 0, arity) };
        let t = contract(&g).unwrap();
        let order: Vec<usize> = (0..arity).map(|i| (i + rot) % arity.max(1)).collect();
        let p = g.permute_boundary(&order).unwrap();
        prop_assert_eq!(contract(&p).unwrap(), t.permute_axes(&order));
        let bent = g.bend(&(0..bend.min(arity)).collect::<Vec<_>>());
        prop_assert_eq!(contract(&bent).unwrap(), t);
    }
}
