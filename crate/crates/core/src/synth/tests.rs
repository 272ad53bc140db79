use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::diagram::Dir;
use crate::eval::contract;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn int(d: u32, v: i64) -> Scalar {
    Scalar::from_int(d, v)
}

fn matrix_of(g: &Diagram) -> Matrix {
    Matrix::from_tensor(&contract(g).unwrap(), g.n_inputs())
}

#[test]
fn poly_arithmetic_reduces_exponents() {
    let d = 3;
    let x = Poly::var(d, 1, 0);
    assert_eq!(x.pow(3), x);
    assert_eq!(x.pow(4), x.pow(2));
    assert_eq!(Poly::constant(d, 1, 5), Poly::constant(d, 1, 2));
    assert!(x.sub(&x).is_zero());
    let p = Poly::from_terms(d, 2, [(vec![5, 1], 4)]);
    assert_eq!(p.terms().collect::<Vec<_>>(), vec![(&vec![1, 1], 1)]);
}

#[test]
fn interpolation_inverts_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in [2u32, 3, 5] {
        for n in 0..=3 {
            let vals: Vec<u32> = (0..d.pow(n as u32)).map(|_| rng.gen_range(0..d)).collect();
            let p = Poly::from_values(d, n, &vals);
            assert_eq!(p.values(), vals);
        }
    }
}

#[test]
fn equality_gives_difference() {
    let f = Formula::new(3, names(&["x", "y"]), Prop::eq(Term::Var(0), Term::Var(1))).unwrap();
    let want = Poly::var(3, 2, 0).sub(&Poly::var(3, 2, 1));
    assert_eq!(formula_to_poly(&f), want);
}

#[test]
fn negation_gives_one_minus_power() {
    let f = Formula::new(3, names(&["x"]), Prop::Not(Box::new(Prop::eq(Term::Var(0), Term::Const(0))))).unwrap();
    let x = Poly::var(3, 1, 0);
    assert_eq!(formula_to_poly(&f), Poly::constant(3, 1, 1).sub(&x.pow(2)));
}

#[test]
fn r_map_formula_and_polynomial() {
    for d in [3u32, 5] {
        let f = matrix_to_formula(&r_matrix(d), &Scalar::zero(d)).unwrap();
        assert_eq!(f.to_latex("R"), "\\varphi_R(x, y) = (y=x) \\vee (y=x+_d1)");
        let e = f.to_expr();
        assert_eq!(e.definition("R", &f.names), "p_R(x,y) = (x-y)\\cdot(x+1-y)");
        let (x, y) = (Poly::var(d, 2, 0), Poly::var(d, 2, 1));
        let one = Poly::constant(d, 2, 1);
        assert_eq!(formula_to_poly(&f), x.sub(&y).mul(&x.add(&one).sub(&y)));
    }
}

#[test]
fn identity_formula() {
    let d = 3;
    let f = matrix_to_formula(&Matrix::identity(d, 1), &Scalar::zero(d)).unwrap();
    assert_eq!(f.prop, Prop::eq(Term::Var(1), Term::Var(0)));
    let all_ones = Matrix::from_fn(d, 1, 1, |_, _| int(d, 1));
    assert_eq!(matrix_to_formula(&all_ones, &Scalar::zero(d)).unwrap().prop, Prop::True);
    let bad = Matrix::from_fn(d, 1, 1, |r, _| int(d, r as i64));
    assert!(matches!(matrix_to_formula(&bad, &Scalar::zero(d)), Err(SynthError::NotPseudoBinary { .. })));
}

fn random_prop(rng: &mut ChaCha8Rng, d: u32, n: usize, depth: u32) -> Prop {
    let term = |rng: &mut ChaCha8Rng| -> Term {
        let a = Term::Var(rng.gen_range(0..n));
        match rng.gen_range(0..3) {
            0 => a,
            1 => a.plus(Term::Const(rng.gen_range(0..d))),
            _ => Term::Mul(Box::new(a), Box::new(Term::Var(rng.gen_range(0..n)))),
        }
    };
    if depth == 0 {
        let a = term(rng);
        let b = if rng.gen_bool(0.5) { term(rng) } else { Term::Const(rng.gen_range(0..d)) };
        return Prop::eq(a, b);
    }
    match rng.gen_range(0..4) {
        0 => Prop::Not(Box::new(random_prop(rng, d, n, depth - 1))),
        1 => Prop::Or(vec![random_prop(rng, d, n, depth - 1), random_prop(rng, d, n, depth - 1)]),
        2 => Prop::And(vec![random_prop(rng, d, n, depth - 1), random_prop(rng, d, n, depth - 1)]),
        _ => random_prop(rng, d, n, 0),
    }
}

#[test]
fn polynomial_zeros_match_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for d in [3u32, 5] {
        for n in 1..=4 {
            if d == 5 && n == 4 {
                continue;
            }
            for _ in 0..6 {
                let f = Formula::new(d, io_names(n, 0), random_prop(&mut rng, d, n, 3)).unwrap();
                let p = formula_to_poly(&f);
                let truth = f.truth_table();
                for (v, t) in p.values().iter().zip(&truth) {
                    assert_eq!(*v == 0, *t, "{}", f.to_latex("f"));
                }
            }
        }
    }
    let f = Formula::new(5, io_names(4, 0), random_prop(&mut rng, 5, 4, 2)).unwrap();
    let p = formula_to_poly(&f);
    assert!(p.values().iter().zip(f.truth_table()).all(|(v, t)| (*v == 0) == t));
}

fn arith_table(g: &Diagram, p: &Poly) {
    let t = contract(g).unwrap();
    let d = p.d;
    for (i, want) in p.values().iter().enumerate() {
        let x = poly::digits(d, p.nvars, i);
        for y in 0..d {
            let mut idx = x.clone();
            idx.push(y);
            assert_eq!(*t.get(&idx), int(d, (y == *want) as i64), "input {x:?} output {y}");
        }
    }
}

#[test]
fn arithmetic_diagrams() {
    let d = 3;
    let x = Poly::var(d, 1, 0);
    let id = poly_to_arith_diagram(&x);
    assert_eq!(matrix_of(&id), Matrix::identity(d, 1));
    let px = matrix_of(&poly_to_arith_diagram(&x.add(&Poly::constant(d, 1, 1))));
    assert_eq!(px, Matrix::from_fn(d, 1, 1, |r, c| int(d, (r == (c + 1) % 3) as i64)));

    let f = matrix_to_formula(&r_matrix(d), &Scalar::zero(d)).unwrap();
    let pr = formula_to_poly(&f);
    arith_table(&poly_to_arith_diagram(&pr), &pr);
    for d in [3u32, 5] {
        let p = Poly::from_terms(d, 2, [(vec![2, 1], 2), (vec![0, 3], 1), (vec![1, 0], 4), (vec![0, 0], 1)]);
        arith_table(&poly_to_arith_diagram(&p), &p);
    }
}

#[test]
fn indicators() {
    let d = 3;
    let x = Poly::var(d, 1, 0);
    let t = contract(&poly_to_indicator(&x, &Scalar::zero(d))).unwrap();
    assert_eq!(t.data, vec![int(d, 1), int(d, 0), int(d, 0)]);
    let w = Scalar::omega(d, 1);
    let t = contract(&poly_to_indicator(&x.sub(&Poly::constant(d, 1, 1)), &w)).unwrap();
    assert_eq!(t.data, vec![w.clone(), int(d, 1), w.clone()]);
    let t = contract(&poly_to_indicator(&Poly::zero(d, 2), &w)).unwrap();
    assert!(t.data.iter().all(|s| s.is_one()));
}

#[test]
fn pseudobinary_factors() {
    let d = 3;
    let id = PseudoBinaryFactor::from_matrix(&Matrix::identity(d, 1), &Scalar::zero(d)).unwrap();
    assert_eq!(matrix_of(&pseudobinary_to_diagram(&id).unwrap()), Matrix::identity(d, 1));
    let ones = PseudoBinaryFactor::from_matrix(&Matrix::from_fn(d, 1, 1, |_, _| int(d, 1)), &Scalar::zero(d)).unwrap();
    assert_eq!(matrix_of(&pseudobinary_to_diagram(&ones).unwrap()), ones.to_matrix());
    let r = PseudoBinaryFactor::from_matrix(&r_matrix(d), &Scalar::zero(d)).unwrap();
    let g = pseudobinary_to_diagram(&r).unwrap();
    assert!(g.is_phase_free());
    assert_eq!(matrix_of(&g), r_matrix(d));
    let want = [[1, 0, 1], [1, 1, 0], [0, 1, 1]];
    for (row, w) in want.iter().enumerate() {
        for (col, &v) in w.iter().enumerate() {
            assert_eq!(*r_matrix(d).get(row, col), int(d, v));
        }
    }
    let m = Matrix::from_fn(d, 2, 1, |r, c| if (r + c) % 4 == 0 { int(d, 1) } else { Scalar::omega(d, 2) });
    let f = PseudoBinaryFactor::from_matrix(&m, &Scalar::omega(d, 2)).unwrap();
    assert_eq!(matrix_of(&pseudobinary_to_diagram(&f).unwrap()), m);
}

#[test]
fn ring_synthesis() {
    let d = 3;
    let w = Scalar::omega(d, 1);
    let one_by_one = Matrix::new(d, vec![vec![w.clone()]]).unwrap();
    let s = matrix_to_diagram_ring(&one_by_one).unwrap();
    assert_eq!(contract(&s.diagram).unwrap().scalar(), w);

    let diag = Matrix::from_fn(d, 1, 1, |r, c| if r == c { Scalar::omega(d, r as i64) } else { Scalar::zero(d) });
    let s = matrix_to_diagram_ring(&diag).unwrap();
    assert_eq!(s.k, 0);
    assert_eq!(matrix_of(&s.diagram), diag);

    let vals = [Scalar::zero(d), int(d, 1), w.clone(), Scalar::new(CycInt::from_i64s(d, &[1, 1]), 0)];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = Matrix::from_fn(d, 1, 1, |_, _| vals[rng.gen_range(0..4)].clone());
    let s = matrix_to_diagram_ring(&m).unwrap();
    assert_eq!(matrix_of(&s.diagram).scale(&Scalar::sqrt_d_pow(d, s.k as i64)), m);
    let two_qutrit = Matrix::from_fn(d, 2, 1, |_, _| vals[rng.gen_range(0..4)].clone());
    let s = matrix_to_diagram_ring(&two_qutrit).unwrap();
    assert_eq!(matrix_of(&s.diagram), two_qutrit);
}

#[test]
fn successor_pieces() {
    for d in [3u32, 5] {
        let succ = successor_components(d).unwrap();
        assert!(succ.r.is_phase_free() && succ.m.is_phase_free() && succ.s.is_phase_free());
        assert_eq!(matrix_of(&succ.r), r_matrix(d));
        assert_eq!(matrix_of(&succ.s), s_matrix(d));
        assert_eq!(succ.s.boundary, vec![Dir::In, Dir::Out]);
    }
    assert_eq!(
        s_matrix(3).entries,
        [[1, 0, 0], [1, 1, 0], [1, 2, 1]]
            .iter()
            .map(|r| r.iter().map(|&v| int(3, v)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    );
}

#[test]
fn multiplexer_selects() {
    let d = 3;
    let succ = successor_components(d).unwrap();
    let m = &succ.m;
    assert_eq!(m.n_inputs(), 4);
    let cases: [([u32; 4], Option<u32>); 4] =
        [([0, 2, 0, 1], Some(2)), ([0, 0, 0, 2], Some(0)), ([1, 2, 0, 1], None), ([2, 0, 0, 0], Some(2))];
    for (input, out) in cases {
        let t = crate::eval::apply_to_basis(m, &input).unwrap();
        let want = match out {
            Some(y) => Tensor::basis(d, &[y]),
            None => Tensor::zeros(d, 1),
        };
        assert_eq!(t, want, "{input:?}");
    }
    let pm = &succ.p_m;
    for i in 0..d.pow(5) as usize {
        let x = poly::digits(d, 5, i);
        assert_eq!(pm.eval(d, &x) == 0, succ.phi_m.eval(&x));
    }
}

fn h_state(d: u32, a: &Scalar) -> Tensor {
    Tensor::from_fn(d, 1, |i| a.pow(i[0]))
}

#[test]
fn successor_increments_labels() {
    for d in [3u32, 5] {
        let succ = successor_components(d).unwrap();
        let mut labels: Vec<Scalar> = (0..d as i64 + 3).map(|a| int(d, a)).collect();
        labels.push(Scalar::omega(d, 1));
        labels.push(&int(d, 2) * &Scalar::omega(d, 1));
        for a in labels {
            let state = dg::h_box(d, 0, 1, a.clone()).scaled(&Scalar::sqrt_d_pow(d, 1));
            let t = contract(&dg::seq(&state, &succ.s)).unwrap();
            let next = a.checked_add(&Scalar::one(d)).unwrap();
            assert_eq!(t, h_state(d, &next), "a = {a}");
        }
    }
}

#[test]
fn phase_free_h_states() {
    for d in [3u32, 5] {
        let zero = hbox_state_phase_free(&CycInt::zero(d)).unwrap();
        assert_eq!(contract(&zero.diagram).unwrap(), Tensor::basis(d, &[0]));
        let one = hbox_state_phase_free(&CycInt::one(d)).unwrap();
        assert_eq!(contract(&one.diagram).unwrap(), h_state(d, &int(d, 1)));
        assert_eq!(one.k, 0);
    }
    let d = 3;
    let m1 = hbox_state_phase_free(&CycInt::from_int(d, -1)).unwrap();
    assert!(m1.diagram.is_phase_free());
    let t = contract(&m1.diagram).unwrap();
    assert_eq!(t, h_state(d, &int(d, -1)).scale(&m1.scale()));
    for coeffs in [[2, -1, 0], [-2, 2, 1], [0, 0, 1], [1, 2, 0]] {
        let r = CycInt::from_i64s(d, &coeffs);
        let s = hbox_state_phase_free(&r).unwrap();
        let want = h_state(d, &Scalar::new(r.clone(), 0)).scale(&s.scale());
        assert_eq!(contract(&s.diagram).unwrap(), want, "{r}");
    }
}

#[test]
fn phase_free_synthesis() {
    let d = 3;
    let id = matrix_to_diagram_phase_free(&Matrix::identity(d, 1)).unwrap();
    assert!(id.diagram.is_phase_free());
    assert_eq!(matrix_of(&id.diagram).scale(&Scalar::sqrt_d_pow(d, id.k as i64)), Matrix::identity(d, 1));
    let s = matrix_to_diagram_phase_free(&s_matrix(d)).unwrap();
    assert_eq!(matrix_of(&s.diagram).scale(&Scalar::sqrt_d_pow(d, s.k as i64)), s_matrix(d));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = Matrix::from_fn(d, 1, 1, |_, _| {
        let c: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        Scalar::new(CycInt::from_i64s(d, &c), 0)
    });
    let s = matrix_to_diagram_phase_free(&m).unwrap();
    assert!(s.diagram.is_phase_free());
    assert_eq!(matrix_of(&s.diagram), m.scale(&s.scale()));
    let half = Matrix::new(d, vec![vec![Scalar::sqrt_d_pow(d, -1)]]).unwrap();
    assert!(matches!(matrix_to_diagram_phase_free(&half), Err(SynthError::NotInZOmega { .. })));
}

#[test]
fn mat_files_round_trip() {
    let m = s_matrix(5);
    let back = matrix_from_json(&matrix_to_json(&m).to_string()).unwrap();
    assert_eq!(back, m);
    assert!(matrix_from_json(r#"{"d":3,"in":1,"out":1,"entries":[[{"num":[1],"halfpow":0}]]}"#).is_err());
    assert!(matches!(Matrix::new(3, vec![vec![Scalar::one(3); 2]]), Err(SynthError::Shape(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn indicator_values_are_one_or_r(seed in 0u64..1000, c in -2i64..=2) {
        let d = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals: Vec<u32> = (0..9).map(|_| rng.gen_range(0..d)).collect();
        let p = Poly::from_values(d, 2, &vals);
        let r = Scalar::new(CycInt::from_i64s(d, &[c, 1]), 0);
        let t = contract(&poly_to_indicator(&p, &r)).unwrap();
        for (i, v) in vals.iter().enumerate() {
            let want = if *v == 0 { Scalar::one(d) } else { r.clone() };
            prop_assert_eq!(&t.data[i], &want);
        }
    }
}
