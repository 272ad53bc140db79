use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::eval::contract;
use crate::revcomp::ditstrings;

fn unitary(c: &Circuit) -> Tensor {
    crate::revcomp::unitary(c).unwrap()
}

fn one_gate(d: u32, n: usize, g: Gate) -> Circuit {
    let mut c = Circuit::new(d, n);
    c.gates.push(g);
    c
}

#[test]
fn gate_encodings_are_exact() {
    for d in [3u32, 5] {
        let gates = [
            (1, Gate::H(0)),
            (1, Gate::X(0)),
            (1, Gate::Xinv(0)),
            (2, Gate::CX { c: 0, t: 1 }),
            (2, Gate::ZeroCtrlX { c: 0, t: 1 }),
            (2, Gate::ZeroCtrlXinv { c: 1, t: 0 }),
            (3, Gate::Toffoli { a: 0, b: 1, t: 2 }),
        ];
        for (n, g) in gates {
            let c = one_gate(d, n, g.clone());
            let zh = circuit_to_zh(&c).unwrap();
            assert!(zh.is_phase_free(), "{g:?}");
            assert_eq!(contract(&zh).unwrap(), unitary(&c), "{g:?} at d={d}");
        }
    }
    let h = circuit_to_zh(&one_gate(3, 1, Gate::H(0))).unwrap();
    assert_eq!(h.nodes, vec![NodeKind::H(Scalar::omega(3, 1))]);
    assert!(circuit_to_zh(&one_gate(3, 1, Gate::X01(0))).is_err());
}

#[test]
fn toffoli_and_ccz() {
    for d in [3u32, 5] {
        let tof = contract(&toffoli_zh(d).unwrap()).unwrap();
        assert!(tof.get(&[1, 1, 0, 1, 1, 1]).is_one());
        assert!(tof.get(&[1, 1, 0, 1, 1, 0]).is_zero());
        let ccz = contract(&ccz_zh(d).unwrap()).unwrap();
        for x in ditstrings(d, 3) {
            for y in ditstrings(d, 3) {
                let mut idx = x.clone();
                idx.extend(&y);
                let want = if x == y { Scalar::omega(d, (x[0] * x[1] * x[2]) as i64) } else { Scalar::zero(d) };
                assert_eq!(*ccz.get(&idx), want);
                if x == y && x.contains(&0) {
                    assert!(ccz.get(&idx).is_one());
                }
            }
        }
        // three Z-spiders sharing a 3-ary H-box, times √d
        let mut g = Diagram::empty(d);
        let h = g.add_h();
        let zs: Vec<usize> = (0..3).map(|_| g.add_z()).collect();
        for &z in &zs {
            g.connect(z, h);
            g.attach(z, Dir::In);
        }
        for &z in &zs {
            g.attach(z, Dir::Out);
        }
        g.scale_sqrt_d(1);
        assert_eq!(contract(&g).unwrap(), ccz);
    }
}

#[test]
fn hbox_circuits() {
    let d = 3;
    let two = hbox_to_circuit(2, d).unwrap();
    assert_eq!(two.ops, vec![Op::Gate(Gate::H(0))]);
    assert_eq!(two.k, 0);

    let one = hbox_to_circuit(1, d).unwrap();
    assert_eq!(one.k, 0);
    let want = Tensor::from_fn(d, 1, |i| &Scalar::omega(d, i[0] as i64) * &Scalar::sqrt_d_pow(d, -1));
    assert_eq!(one.tensor().unwrap(), want);

    let zero = hbox_to_circuit(0, d).unwrap();
    assert_eq!(zero.diagram_tensor().unwrap().scalar(), &Scalar::omega(d, 1) * &Scalar::sqrt_d_pow(d, -1));

    for (arity, d) in [(3, 3), (4, 3), (3, 5)] {
        let pc = hbox_to_circuit(arity, d).unwrap();
        assert!(pc.is_native());
        let want = contract(&dg::h_box_w(d, 1, arity - 1)).unwrap();
        assert_eq!(pc.diagram_tensor().unwrap(), want, "arity {arity}");
    }
    assert!(hbox_to_circuit(3, 2).is_err());
}

#[test]
fn zspider_circuits() {
    let d = 3;
    let ghz = zspider_to_circuit(0, 3, d).unwrap();
    let want = Tensor::from_fn(d, 3, |i| Scalar::from_int(d, (i[0] == i[1] && i[1] == i[2]) as i64));
    assert_eq!(ghz.diagram_tensor().unwrap(), want);
    let id = zspider_to_circuit(1, 1, d).unwrap();
    assert!(id.ops.is_empty());
    assert_eq!(id.k, 0);
    for (a, b) in [(2, 1), (1, 0), (0, 0), (3, 2)] {
        let pc = zspider_to_circuit(a, b, d).unwrap();
        assert_eq!(pc.diagram_tensor().unwrap(), contract(&dg::z_spider(d, a, b)).unwrap(), "({a},{b})");
    }
}

#[test]
fn extraction_matches_diagram() {
    let d = 3;
    let empty = zh_to_circuit(&Diagram::empty(d)).unwrap();
    assert!(empty.ops.is_empty() && empty.slots.is_empty() && empty.k == 0);

    let h3 = dg::h_box_w(d, 2, 1);
    let pc = zh_to_circuit(&h3).unwrap();
    assert_eq!(pc.diagram_tensor().unwrap(), contract(&h3).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..25 {
        let g = dg::random_diagram(d, &mut rng, 5, 4);
        let high = zh_to_post_circuit(&g).unwrap();
        let want = contract(&g).unwrap();
        assert_eq!(high.diagram_tensor().unwrap(), want, "diagram {i}");
        let low = high.lowered().unwrap();
        assert!(low.is_native());
        assert_eq!(low.tensor().unwrap(), high.tensor().unwrap(), "lowering {i}");
    }
}

#[test]
fn boundary_only_diagrams() {
    let d = 3;
    for g in [dg::identity(d, 2), dg::identity(d, 1).transpose(), dg::identity(d, 1).bend(&[1]).inputs_first()] {
        let pc = zh_to_circuit(&g).unwrap();
        assert_eq!(pc.diagram_tensor().unwrap(), contract(&g).unwrap());
    }
    let mut g = dg::pauli_x(d);
    g.scale(&Scalar::omega(d, 2));
    let pc = zh_to_circuit(&g).unwrap();
    assert_eq!(pc.diagram_tensor().unwrap(), contract(&g).unwrap());
    let labelled = dg::h_box(d, 1, 1, Scalar::from_int(d, 2));
    assert!(matches!(zh_to_circuit(&labelled), Err(ExtractError::Labelled(0))));
}

#[test]
fn circuits_round_trip() {
    let d = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..15 {
        let c = random_circuit(d, &mut rng, 4, 5);
        let g = circuit_to_zh(&c).unwrap();
        let u = unitary(&c);
        assert_eq!(contract(&g).unwrap(), u, "circuit {i}");
        let back = zh_to_post_circuit(&g).unwrap();
        assert_eq!(back.diagram_tensor().unwrap(), u, "circuit {i}");
    }
}

#[test]
fn post_circuits_embed_and_serialize() {
    let d = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let g = dg::random_diagram(d, &mut rng, 4, 3);
        let pc = zh_to_post_circuit(&g).unwrap();
        let back = post_circuit_from_json(&post_circuit_to_json(&pc).to_string()).unwrap();
        assert_eq!(back, pc);
        let emb = post_circuit_to_zh(&pc).unwrap();
        assert_eq!(emb.boundary, g.boundary);
        assert_eq!(contract(&emb).unwrap(), pc.tensor().unwrap());
    }
    let bad = r#"{"d":3,"wires":1,"slots":[],"k":0,"gates":[{"kind":"prep","wires":[0]}]}"#;
    assert!(post_circuit_from_json(bad).is_err());
}
