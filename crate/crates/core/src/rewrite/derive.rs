use super::{apply, find_matches, find_rule, RewriteError};
use crate::diagram::{h_chain, identity, Diagram, NodeKind};
use crate::eval::equal_exact;

/// One rewrite: the `pick`-th match of the named rule (a trailing `~` reverses it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: String,
    pub params: Vec<usize>,
    pub pick: usize,
}

impl Step {
    fn new(rule: &str, params: &[usize], pick: usize) -> Step {
        Step { rule: rule.to_string(), params: params.to_vec(), pick }
    }
}

/// A rule proved from other rules by a fixed chain of rewrites.
pub struct Derivation {
    pub name: &'static str,
    pub start: fn(u32, &[usize]) -> Diagram,
    pub target: fn(u32, &[usize]) -> Diagram,
    pub steps: fn(u32, &[usize]) -> Vec<Step>,
    pub instances: fn(u32) -> Vec<Vec<usize>>,
}

fn h4_steps(_: u32, _: &[usize]) -> Vec<Step> {
    vec![Step::new("id~", &[], 1), Step::new("id~", &[], 3), Step::new("x-id", &[], 0)]
}

fn h_start(d: u32, p: &[usize]) -> Diagram {
    find_rule(d, "h").expect("catalog rule").lhs(d, p)
}

fn h_target(d: u32, p: &[usize]) -> Diagram {
    find_rule(d, "h").expect("catalog rule").rhs(d, p)
}

fn h_steps(_: u32, p: &[usize]) -> Vec<Step> {
    vec![Step::new("ba2~", &[1, p[0] - 1], 0), Step::new("hs", &[1, 1], 0)]
}

/// H⁴ = id and the colour change with H³ legs, each as a rewrite chain.
pub fn derivations() -> Vec<Derivation> {
    vec![
        Derivation {
            name: "h4",
            start: |d, _| h_chain(d, 4),
            target: |d, _| identity(d, 1),
            steps: h4_steps,
            instances: |_| vec![Vec::new()],
        },
        Derivation {
            name: "h",
            start: h_start,
            target: h_target,
            steps: h_steps,
            instances: |_| (1..=3).map(|n| vec![n]).collect(),
        },
    ]
}

fn shape(g: &Diagram) -> (usize, usize, usize, usize) {
    let z = g.nodes.iter().filter(|k| **k == NodeKind::Z).count();
    (z, g.nodes.len() - z, g.edges.len(), g.boundary.len())
}

/// Runs the chain, checking every step preserves the tensor exactly and that the
/// end result has the target's shape and tensor. Returns every intermediate diagram.
pub fn run_derivation(d: u32, der: &Derivation, params: &[usize]) -> Result<Vec<Diagram>, RewriteError> {
    let fail = |step: usize, why: String| RewriteError::Derivation { name: der.name.to_string(), step, why };
    let mut trail = vec![(der.start)(d, params)];
    for (i, step) in (der.steps)(d, params).iter().enumerate() {
        let rule = find_rule(d, &step.rule)?;
        let cur = trail.last().expect("non-empty trail");
        let matches = find_matches(cur, &rule, Some(&step.params));
        let m = matches
            .get(step.pick)
            .ok_or_else(|| fail(i, format!("{} has {} matches, wanted #{}", step.rule, matches.len(), step.pick)))?;
        let next = apply(cur, &rule, m)?;
        if !equal_exact(cur, &next)? {
            return Err(fail(i, format!("{} changed the tensor", step.rule)));
        }
        trail.push(next);
    }
    let target = (der.target)(d, params);
    let last = trail.last().expect("non-empty trail");
    if shape(last) != shape(&target) || last.global != target.global || !equal_exact(last, &target)? {
        return Err(fail(trail.len() - 1, "end result differs from the target".into()));
    }
    Ok(trail)
}
