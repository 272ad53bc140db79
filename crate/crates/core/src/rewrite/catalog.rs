use super::Rule;
use crate::diagram::*;
use crate::ring::Scalar;

fn sqrt_d(d: u32, e: i64) -> Scalar {
    Scalar::sqrt_d_pow(d, e)
}

fn one(d: u32, _: &[usize]) -> Scalar {
    Scalar::one(d)
}

fn fixed(_: u32, _: usize) -> Vec<Vec<usize>> {
    vec![Vec::new()]
}

fn grid1(_: u32, a: usize) -> Vec<Vec<usize>> {
    (0..=a).map(|n| vec![n]).collect()
}

fn grid2(_: u32, a: usize) -> Vec<Vec<usize>> {
    (0..=a).flat_map(|n| (0..=a).map(move |m| vec![n, m])).collect()
}

/// Two arities plus a wire count 1..=d+1.
fn grid3(d: u32, a: usize) -> Vec<Vec<usize>> {
    grid2(d, a).into_iter().flat_map(|p| (1..=d as usize + 1).map(move |k| vec![p[0], p[1], k])).collect()
}

/// Chain of `k` Hadamard nodes hung between `from` and `to`.
fn h_path(g: &mut Diagram, from: usize, to: usize, k: usize) {
    let mut prev = from;
    for _ in 0..k {
        let h = g.add_h();
        g.connect(prev, h);
        prev = h;
    }
    g.connect(prev, to);
}

/// Hadamard node hung off `core` as an X-spider leg, returned for wiring.
fn x_leg(g: &mut Diagram, core: usize) -> usize {
    let h = g.add_h();
    g.connect(core, h);
    h
}

/// Z-spider with `n` inputs wired through `k` Hadamard-decorated edges to the core
/// of a raw X-spider with `m` outputs. `extra` Hadamards sit on each joining wire
/// in addition to the X leg's own.
fn z_to_x(d: u32, n: usize, m: usize, k: usize, extra: usize) -> Diagram {
    let mut g = Diagram::empty(d);
    let z = g.add_z();
    for _ in 0..n {
        g.attach(z, Dir::In);
    }
    let x = g.add_z();
    for _ in 0..m {
        let h = x_leg(&mut g, x);
        g.attach(h, Dir::Out);
    }
    for _ in 0..k {
        h_path(&mut g, z, x, 1 + extra);
    }
    g
}

fn zs() -> Rule {
    Rule::new(
        "zs",
        &["n", "m", "k"],
        |d, p| {
            let mut g = Diagram::empty(d);
            let (a, b) = (g.add_z(), g.add_z());
            for _ in 0..p[0] {
                g.attach(a, Dir::In);
            }
            for _ in 0..p[1] {
                g.attach(b, Dir::Out);
            }
            for _ in 0..p[2] {
                g.connect(a, b);
            }
            g
        },
        |d, p| z_spider(d, p[0], p[1]),
        one,
        grid3,
    )
}

fn hs() -> Rule {
    Rule::new(
        "hs",
        &["n", "m"],
        |d, p| {
            let mut g = Diagram::empty(d);
            let (a, b) = (g.add_h(), g.add_h());
            for _ in 0..p[0] {
                g.attach(a, Dir::In);
            }
            for _ in 0..p[1] {
                g.attach(b, Dir::Out);
            }
            h_path(&mut g, a, b, 3);
            g
        },
        |d, p| h_box_w(d, p[0], p[1]),
        one,
        grid2,
    )
}

fn ba1() -> Rule {
    Rule::new(
        "ba1",
        &["n", "m"],
        |d, p| z_to_x(d, p[0], p[1], 1, 0),
        |d, p| {
            let (n, m) = (p[0], p[1]);
            let mut g = Diagram::empty(d);
            let xs: Vec<usize> = (0..n)
                .map(|_| {
                    let x = g.add_z();
                    let h = x_leg(&mut g, x);
                    g.attach(h, Dir::In);
                    x
                })
                .collect();
            let zs: Vec<usize> = (0..m)
                .map(|_| {
                    let z = g.add_z();
                    g.attach(z, Dir::Out);
                    z
                })
                .collect();
            for &x in &xs {
                for &z in &zs {
                    h_path(&mut g, x, z, 1);
                }
            }
            g
        },
        |d, p| sqrt_d(d, (p[0] as i64 - 1) * (p[1] as i64 - 1)),
        grid2,
    )
}

fn ba2() -> Rule {
    Rule::new(
        "ba2",
        &["n", "m"],
        |d, p| {
            let mut g = Diagram::empty(d);
            let a = g.add_h();
            for _ in 0..p[0] {
                g.attach(a, Dir::In);
            }
            let z = g.add_z();
            for _ in 0..p[1] {
                g.attach(z, Dir::Out);
            }
            h_path(&mut g, a, z, 1);
            g
        },
        |d, p| {
            let (n, m) = (p[0], p[1]);
            let mut g = Diagram::empty(d);
            let zs: Vec<usize> = (0..n)
                .map(|_| {
                    let z = g.add_z();
                    g.attach(z, Dir::In);
                    z
                })
                .collect();
            for _ in 0..m {
                let hb = g.add_h();
                let outer = g.add_h();
                g.connect(hb, outer);
                g.attach(outer, Dir::Out);
                for &z in &zs {
                    g.connect(z, hb);
                }
            }
            g
        },
        one,
        grid2,
    )
}

fn wire_rule(name: &str, lhs: fn(u32) -> Diagram, law: fn(u32, &[usize]) -> Scalar) -> Rule {
    Rule::new(name, &[], move |d, _| lhs(d), |d, _| identity(d, 1), law, fixed)
}

fn x_id_lhs(d: u32) -> Diagram {
    let h = hadamard(d);
    let z = z_spider(d, 1, 1);
    seq_all(&[h.clone(), z.clone(), h.clone(), h.clone(), z, h])
}

fn cy_lhs(d: u32) -> Diagram {
    seq_all(&vec![raw_pauli_x(d); d as usize])
}

/// Z-spider with `n` inputs, each leg carrying `k` Hadamards.
fn z_with_h_legs(d: u32, n: usize, k: usize) -> Diagram {
    let mut g = Diagram::empty(d);
    let z = g.add_z();
    for _ in 0..n {
        let mut prev = z;
        for _ in 0..k {
            let h = g.add_h();
            g.connect(prev, h);
            prev = h;
        }
        if k == 0 {
            g.attach(z, Dir::In);
        } else {
            g.attach(prev, Dir::In);
        }
    }
    g
}

fn h_rule() -> Rule {
    Rule::new("h", &["n"], |d, p| z_with_h_legs(d, p[0], 3), |d, p| z_with_h_legs(d, p[0], 1), one, grid1)
}

/// H-box with `n` inputs and two outputs, an antipode on the first or second.
fn h_push(d: u32, n: usize, first: bool) -> Diagram {
    let mut g = Diagram::empty(d);
    let a = g.add_h();
    for _ in 0..n {
        g.attach(a, Dir::In);
    }
    let hang = |g: &mut Diagram| {
        let h1 = g.add_h();
        let h2 = g.add_h();
        g.connect(a, h1);
        g.connect(h1, h2);
        g.attach(h2, Dir::Out);
    };
    if first {
        hang(&mut g);
        g.attach(a, Dir::Out);
    } else {
        g.attach(a, Dir::Out);
        hang(&mut g);
    }
    g
}

fn h_push_through() -> Rule {
    Rule::new("h-push-through", &["n"], |d, p| h_push(d, p[0], true), |d, p| h_push(d, p[0], false), one, grid1)
}

/// Products x_i·(y+i) for i < d, fed from inputs x_0…x_{d−1}, y.
fn ortho_products(d: u32) -> Diagram {
    let n = d as usize;
    let fan = par(&identity(d, n), &copy(d, n));
    let shifts: Vec<Diagram> = (0..d).map(|i| pauli_x_pow(d, i)).collect();
    let shift = par(&identity(d, n), &par_all(d, &shifts));
    // regroup x_0..x_{n-1}, y_0..y_{n-1} as pairs (x_i, y_i)
    let mut full: Vec<usize> = (0..2 * n).collect();
    for i in 0..n {
        full.push(2 * n + i);
        full.push(3 * n + i);
    }
    let regroup = identity(d, 2 * n).permute_boundary(&full).expect("permutation of slots");
    let mults = par_all(d, &vec![multiply(d); n]);
    seq_all(&[fan, shift, regroup, mults])
}

fn ortho() -> Rule {
    Rule::new(
        "ortho",
        &[],
        |d, _| seq(&ortho_products(d), &z_spider(d, d as usize, 0)),
        |d, _| seq(&ortho_products(d), &par_all(d, &vec![effect(d, 0); d as usize])),
        one,
        fixed,
    )
}

fn no_zero_divisors() -> Rule {
    Rule::new(
        "no-zero-divisors",
        &[],
        |d, _| seq(&multiply(d), &exponent(d, d - 1)),
        |d, _| seq(&par(&exponent(d, d - 1), &exponent(d, d - 1)), &multiply(d)),
        one,
        fixed,
    )
}

fn frobenius() -> Rule {
    wire_rule("frobenius", |d| exponent(d, d), one)
}

fn xs() -> Rule {
    Rule::new(
        "xs",
        &["n", "m", "k"],
        |d, p| {
            let mut g = Diagram::empty(d);
            let (a, b) = (g.add_z(), g.add_z());
            for _ in 0..p[0] {
                let h = x_leg(&mut g, a);
                g.attach(h, Dir::In);
            }
            for _ in 0..p[1] {
                let h = x_leg(&mut g, b);
                g.attach(h, Dir::Out);
            }
            for _ in 0..p[2] {
                h_path(&mut g, a, b, 4);
            }
            g
        },
        |d, p| raw_x_spider(d, p[0], p[1]),
        one,
        grid3,
    )
}

fn hopf() -> Rule {
    Rule::new(
        "hopf",
        &["n", "m"],
        |d, p| z_to_x(d, p[0], p[1], d as usize, 0),
        |d, p| par(&z_spider(d, p[0], 0), &raw_x_spider(d, 0, p[1])),
        |d, _| sqrt_d(d, -(d as i64)),
        grid2,
    )
}

fn complementarity() -> Rule {
    Rule::new(
        "complementarity",
        &["n", "m"],
        |d, p| z_to_x(d, p[0], p[1], d as usize + 1, 0),
        |d, p| z_to_x(d, p[0], p[1], 1, 0),
        |d, _| sqrt_d(d, -(d as i64)),
        grid2,
    )
}

fn special() -> Rule {
    Rule::new(
        "special",
        &["n", "m"],
        |d, p| z_to_x(d, p[0], p[1], d as usize - 1, 0),
        |d, p| z_to_x(d, p[0], p[1], 1, 2),
        |d, _| sqrt_d(d, 2 - d as i64),
        grid2,
    )
}

/// Raw X-spider state copied through a Z-spider with `m` outputs.
fn copy1() -> Rule {
    Rule::new(
        "copy-1",
        &["m"],
        |d, p| {
            let mut g = Diagram::empty(d);
            let x = g.add_z();
            let z = g.add_z();
            h_path(&mut g, x, z, 1);
            for _ in 0..p[0] {
                g.attach(z, Dir::Out);
            }
            g
        },
        |d, p| par_all(d, &vec![raw_x_spider(d, 0, 1); p[0]]),
        |d, p| sqrt_d(d, 1 - p[0] as i64),
        grid1,
    )
}

/// One-legged Z-spider copied through a raw X-spider with `m` outputs.
fn copy2() -> Rule {
    Rule::new(
        "copy-2",
        &["m"],
        |d, p| {
            let mut g = Diagram::empty(d);
            let z = g.add_z();
            let x = g.add_z();
            h_path(&mut g, z, x, 1);
            for _ in 0..p[0] {
                let h = x_leg(&mut g, x);
                g.attach(h, Dir::Out);
            }
            g
        },
        |d, p| par_all(d, &vec![z_spider(d, 0, 1); p[0]]),
        |d, p| sqrt_d(d, 1 - p[0] as i64),
        grid1,
    )
}

/// Raw X-spider state absorbed by an H-box with `n` outputs.
fn copy3() -> Rule {
    Rule::new(
        "copy-3",
        &["n"],
        |d, p| {
            let mut g = Diagram::empty(d);
            let x = g.add_z();
            let a = g.add_h();
            h_path(&mut g, x, a, 1);
            for _ in 0..p[0] {
                g.attach(a, Dir::Out);
            }
            g
        },
        |d, p| par_all(d, &vec![z_spider(d, 0, 1); p[0]]),
        one,
        grid1,
    )
}

/// |1⟩, written as H³ applied to a one-legged H-box, fed into an H-box.
fn copy4() -> Rule {
    Rule::new(
        "copy-4",
        &["n"],
        |d, p| {
            let mut g = Diagram::empty(d);
            let s = g.add_h();
            let a = g.add_h();
            h_path(&mut g, s, a, 3);
            for _ in 0..p[0] {
                g.attach(a, Dir::Out);
            }
            g
        },
        |d, p| h_box_w(d, 0, p[0]),
        one,
        grid1,
    )
}

fn inner_product() -> Rule {
    Rule::new("inner-product", &[], |d, _| sd(d), |d, _| Diagram::empty(d), |d, _| sqrt_d(d, 1), fixed)
}

fn dim() -> Rule {
    Rule::new("dim", &[], |d, _| z_spider(d, 0, 0), |d, _| Diagram::empty(d), |d, _| Scalar::from_int(d, d), fixed)
}

/// Every rule family, each with its exact scalar law.
pub fn rule_catalog(_d: u32) -> Vec<Rule> {
    vec![
        zs(),
        hs(),
        ba1(),
        ba2(),
        wire_rule("id", |d| z_spider(d, 1, 1), one),
        wire_rule("cy", cy_lhs, |d, _| sqrt_d(d, -(d as i64))),
        wire_rule("h4", |d| h_chain(d, 4), one),
        h_rule(),
        h_push_through(),
        wire_rule("x-id", x_id_lhs, one),
        ortho(),
        no_zero_divisors(),
        frobenius(),
        xs(),
        hopf(),
        complementarity(),
        special(),
        copy1(),
        copy2(),
        copy3(),
        copy4(),
        inner_product(),
        dim(),
    ]
}
