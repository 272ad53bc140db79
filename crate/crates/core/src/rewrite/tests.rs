use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::diagram::*;
use crate::eval::equal_exact;

fn rule(d: u32, name: &str) -> Rule {
    find_rule(d, name).unwrap()
}

#[test]
fn catalog_is_sound_at_three() {
    for r in rule_catalog(3) {
        let rep = check_soundness(&r, 3, 3);
        assert!(rep.passed(), "{rep}");
        assert!(rep.checked > 0);
    }
}

#[test]
fn catalog_is_sound_at_two() {
    for r in rule_catalog(2) {
        let rep = check_soundness(&r, 2, 2);
        assert!(rep.passed(), "{rep}");
    }
}

#[test]
fn corrupted_rule_reports_counterexample() {
    let bad = rule(3, "zs").with_law(|d, _| Scalar::from_int(d, 2));
    let rep = check_soundness(&bad, 3, 1);
    assert!(!rep.passed());
    let c = &rep.failures[0];
    assert!(c.lhs.is_some() && c.rhs.is_some());
    assert!(rep.to_string().contains("FAIL"));
}

#[test]
fn laws_match_calibration() {
    for d in [2u32, 3, 5] {
        for r in rule_catalog(d) {
            let p = r.instances(d, 1).remove(0);
            assert_eq!(r.calibrate(d, &p).unwrap(), Some(r.law(d, &p)), "{} at d={d}", r.name);
        }
    }
}

#[test]
fn bialgebra_law_carries_root_d_power() {
    let r = rule(5, "ba1");
    assert_eq!(r.law(5, &[2, 3]), Scalar::sqrt_d_pow(5, 2));
    assert_eq!(r.law(5, &[0, 3]), Scalar::sqrt_d_pow(5, -2));
    assert!(r.law(5, &[1, 3]).is_one());
}

#[test]
fn cyclic_rule_is_pauli_to_the_d() {
    for d in [2u32, 3, 5] {
        let r = rule(d, "cy");
        let lhs = r.lhs(d, &[]);
        let x_d = seq_all(&vec![pauli_x(d); d as usize]);
        assert!(equal_exact(&x_d, &identity(d, 1)).unwrap());
        assert!(equal_exact(&lhs.scaled(&Scalar::sqrt_d_pow(d, d as i64)), &identity(d, 1)).unwrap());
    }
}

#[test]
fn qubit_h_fusion() {
    let mut g = Diagram::empty(2);
    let (a, h, b) = (g.add_h(), g.add_h(), g.add_h());
    g.attach(a, Dir::In);
    g.attach(a, Dir::In);
    g.attach(b, Dir::Out);
    g.connect(a, h);
    g.connect(h, b);
    assert!(equal_exact(&g, &rule(2, "hs").lhs(2, &[2, 1])).unwrap());
    assert!(equal_exact(&g, &h_box_w(2, 2, 1)).unwrap());
}

#[test]
fn ortho_agrees_for_small_d() {
    for d in [2u32, 3, 5] {
        let r = rule(d, "ortho");
        assert!(check_soundness(&r, d, 0).passed());
    }
}

#[test]
fn zs_fusion_instance() {
    let r = rule(3, "zs");
    assert!(equal_exact(&r.lhs(3, &[1, 1, 1]), &z_spider(3, 1, 1)).unwrap());
}

#[test]
fn match_counts() {
    let d = 3;
    assert!(find_matches(&z_spider(d, 1, 1), &rule(d, "id"), None).len() == 1);
    assert!(find_matches(&Diagram::empty(d), &rule(d, "id"), None).is_empty());
    assert_eq!(find_matches(&h_chain(d, 4), &rule(d, "h4"), None).len(), 1);
    let two = seq(&z_spider(d, 1, 1), &z_spider(d, 1, 1));
    assert_eq!(find_matches(&two, &rule(d, "id"), None).len(), 2);
}

#[test]
fn h4_match_count_agrees_with_brute_force() {
    // brute force: count node sets of four H-boxes forming a path with both ends open
    let d = 3;
    let g = h_chain(d, 6);
    let ms = find_matches(&g, &rule(d, "h4"), None);
    let n = g.nodes.len();
    let mut sets = 0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() != 4 {
            continue;
        }
        let inside = |e: &Endpoint| matches!(e, Endpoint::Node(x) if mask >> x & 1 == 1);
        let internal = g.edges.iter().filter(|(a, b)| inside(a) && inside(b)).count();
        if internal == 3 {
            sets += 1;
        }
    }
    assert_eq!(ms.len(), sets);
    assert_eq!(sets, 3);
}

#[test]
fn apply_examples() {
    let d = 3;
    let chain = h_chain(d, 4);
    let r = rule(d, "h4");
    let m = &find_matches(&chain, &r, None)[0];
    let out = apply(&chain, &r, m).unwrap();
    assert_eq!(out.node_count(), 0);
    assert!(equal_exact(&out, &identity(d, 1)).unwrap());

    let r = rule(d, "zs");
    let two = r.lhs(d, &[2, 1, 2]);
    let m = &find_matches(&two, &r, Some(&[2, 1, 2]))[0];
    let out = apply(&two, &r, m).unwrap();
    assert_eq!(out.node_count(), 1);
    assert!(equal_exact(&out, &two).unwrap());

    let r = rule(d, "ba1");
    let host = r.lhs(d, &[2, 2]);
    let m = &find_matches(&host, &r, Some(&[2, 2]))[0];
    let out = apply(&host, &r, m).unwrap();
    assert!(equal_exact(&out, &host).unwrap());
    assert!(equal_exact(&out, &r.rhs(d, &[2, 2]).scaled(&r.law(d, &[2, 2]))).unwrap());
}

#[test]
fn apply_inside_larger_diagram() {
    let d = 3;
    let inner = h_chain(d, 4);
    let host = seq_all(&[z_spider(d, 1, 2), par(&inner, &hadamard(d)), h_box_w(d, 2, 1)]);
    let r = rule(d, "h4");
    let m = &find_matches(&host, &r, None)[0];
    let out = apply(&host, &r, m).unwrap();
    assert_eq!(out.node_count(), host.node_count() - 4);
    assert!(equal_exact(&out, &host).unwrap());
}

#[test]
fn stale_match_is_rejected() {
    let d = 3;
    let chain = h_chain(d, 4);
    let r = rule(d, "h4");
    let m = find_matches(&chain, &r, None).remove(0);
    let shorter = h_chain(d, 3);
    assert!(matches!(apply(&shorter, &r, &m), Err(RewriteError::StaleMatch(_))));
}

#[test]
fn reversed_rules_insert() {
    let d = 5;
    let r = rule(d, "id~");
    let g = hadamard(d);
    let ms = find_matches(&g, &r, None);
    assert_eq!(ms.len(), 2);
    let out = apply(&g, &r, &ms[0]).unwrap();
    assert_eq!(out.node_count(), 2);
    assert!(equal_exact(&out, &g).unwrap());
}

#[test]
fn derivations_hold() {
    for d in [2u32, 3, 5] {
        for der in derivations() {
            for p in (der.instances)(d) {
                let trail = run_derivation(d, &der, &p).unwrap_or_else(|e| panic!("{e}"));
                assert!(trail.len() >= 3);
            }
        }
    }
}

#[test]
fn normalize_terminates_with_fuel() {
    let d = 3;
    let rules = vec![rule(d, "h4"), rule(d, "id"), rule(d, "zs")];
    let g = seq_all(&[h_chain(d, 8), z_spider(d, 1, 1), z_spider(d, 1, 1)]);
    let (out, steps) = normalize_with(&g, &rules, 50).unwrap();
    assert!(steps > 0 && steps < 50);
    assert_eq!(out.node_count(), 0);
    assert!(equal_exact(&out, &g).unwrap());
    let (_, steps) = normalize_with(&g, &rules, 1).unwrap();
    assert_eq!(steps, 1);
    let (once, n) = apply_all_once(&g, &rules).unwrap();
    assert_eq!(n, 2);
    assert!(equal_exact(&once, &g).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rewrites_preserve_semantics(seed in any::<u64>(), d in prop::sample::select(vec![2u32, 3])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_diagram(d, &mut rng, 6, 3);
        for r in rule_catalog(d) {
            for m in find_matches(&g, &r, None).into_iter().take(2) {
                let out = apply(&g, &r, &m).unwrap();
                prop_assert!(equal_exact(&g, &out).unwrap(), "{} broke the tensor", r.name);
            }
        }
    }
}
