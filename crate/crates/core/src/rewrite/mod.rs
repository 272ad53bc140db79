//! Parametric local rewrite rules: matching, application and soundness checks.

mod catalog;
mod derive;

pub use catalog::rule_catalog;
pub use derive::{derivations, run_derivation, Derivation, Step};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, Endpoint};
use crate::eval::{contract, EvalError, Tensor};
use crate::ring::Scalar;

/// Arity bound used when `find_matches` is not given explicit parameters.
pub const DEFAULT_MAX_ARITY: usize = 3;

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("match no longer fits the diagram: {0}")]
    StaleMatch(String),
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("derivation {name} failed at step {step}: {why}")]
    Derivation { name: String, step: usize, why: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

pub type Builder = Arc<dyn Fn(u32, &[usize]) -> Diagram + Send + Sync>;
pub type Law = Arc<dyn Fn(u32, &[usize]) -> Scalar + Send + Sync>;
pub type Grid = Arc<dyn Fn(u32, usize) -> Vec<Vec<usize>> + Send + Sync>;

/// A rule family: ⟦lhs(p)⟧ = law(p)·⟦rhs(p)⟧ for every parameter vector p.
#[derive(Clone)]
pub struct Rule {
    pub name: String,
    pub param_names: Vec<&'static str>,
    lhs: Builder,
    rhs: Builder,
    law: Law,
    grid: Grid,
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rule({}; {})", self.name, self.param_names.join(","))
    }
}

impl Rule {
    pub fn new(
        name: &str,
        param_names: &[&'static str],
        lhs: impl Fn(u32, &[usize]) -> Diagram + Send + Sync + 'static,
        rhs: impl Fn(u32, &[usize]) -> Diagram + Send + Sync + 'static,
        law: impl Fn(u32, &[usize]) -> Scalar + Send + Sync + 'static,
        grid: impl Fn(u32, usize) -> Vec<Vec<usize>> + Send + Sync + 'static,
    ) -> Rule {
        Rule {
            name: name.to_string(),
            param_names: param_names.to_vec(),
            lhs: Arc::new(lhs),
            rhs: Arc::new(rhs),
            law: Arc::new(law),
            grid: Arc::new(grid),
        }
    }

    pub fn lhs(&self, d: u32, p: &[usize]) -> Diagram {
        (self.lhs)(d, p)
    }

    pub fn rhs(&self, d: u32, p: &[usize]) -> Diagram {
        (self.rhs)(d, p)
    }

    pub fn law(&self, d: u32, p: &[usize]) -> Scalar {
        (self.law)(d, p)
    }

    /// Every parameter vector with arities ≤ `max_arity` and repetition counts ≤ d+1.
    pub fn instances(&self, d: u32, max_arity: usize) -> Vec<Vec<usize>> {
        (self.grid)(d, max_arity)
    }

    /// The same equation read right to left.
    pub fn reversed(&self) -> Rule {
        let law = self.law.clone();
        Rule {
            name: format!("{}~", self.name),
            param_names: self.param_names.clone(),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            law: Arc::new(move |d, p| law(d, p).inverse().expect("rule laws are invertible")),
            grid: self.grid.clone(),
        }
    }

    /// A copy of the rule with a different declared law.
    pub fn with_law(&self, law: impl Fn(u32, &[usize]) -> Scalar + Send + Sync + 'static) -> Rule {
        Rule { law: Arc::new(law), ..self.clone() }
    }

    /// The scalar q with ⟦lhs⟧ = q·⟦rhs⟧ at the given parameters, found by contraction.
    pub fn calibrate(&self, d: u32, p: &[usize]) -> Result<Option<Scalar>, EvalError> {
        let l = contract(&self.lhs(d, p))?;
        let r = contract(&self.rhs(d, p))?;
        Ok(r.proportional(&l))
    }
}

/// Looks a rule up by name; a trailing `~` selects the reversed rule.
pub fn find_rule(d: u32, name: &str) -> Result<Rule, RewriteError> {
    let (base, rev) = match name.strip_suffix('~') {
        Some(b) => (b, true),
        None => (name, false),
    };
    let rule = rule_catalog(d)
        .into_iter()
        .find(|r| r.name == base)
        .ok_or_else(|| RewriteError::UnknownRule(name.to_string()))?;
    Ok(if rev { rule.reversed() } else { rule })
}

/// An embedding of a rule's LHS into a host diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub rule: String,
    pub params: Vec<usize>,
    /// Host node for each LHS node.
    pub nodes: Vec<usize>,
    /// For each LHS boundary slot, the host edge and which of its two ends belongs
    /// to the image (0 for the first endpoint, 1 for the second).
    pub slots: Vec<(usize, u8)>,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn adjacency(g: &Diagram) -> HashMap<(usize, usize), usize> {
    let mut m = HashMap::new();
    for &(a, b) in &g.edges {
        if let (Endpoint::Node(x), Endpoint::Node(y)) = (a, b) {
            *m.entry(pair(x, y)).or_insert(0) += 1;
        }
    }
    m
}

fn degrees(g: &Diagram) -> Vec<usize> {
    let mut deg = vec![0; g.nodes.len()];
    for &(a, b) in &g.edges {
        for e in [a, b] {
            if let Endpoint::Node(n) = e {
                deg[n] += 1;
            }
        }
    }
    deg
}

/// LHS boundary slots grouped by the LHS node they hang off.
fn slots_by_node(pattern: &Diagram) -> Option<Vec<Vec<usize>>> {
    let mut by = vec![Vec::new(); pattern.nodes.len()];
    let mut owner = vec![None; pattern.boundary.len()];
    for &(a, b) in &pattern.edges {
        match (a, b) {
            (Endpoint::Node(n), Endpoint::Boundary(s)) | (Endpoint::Boundary(s), Endpoint::Node(n)) => {
                owner[s] = Some(n)
            }
            (Endpoint::Boundary(_), Endpoint::Boundary(_)) => return None,
            _ => {}
        }
    }
    for (s, o) in owner.into_iter().enumerate() {
        by[o?].push(s);
    }
    Some(by)
}

/// Pattern nodes in breadth-first order, so each new node is adjacent to one
/// already placed whenever possible.
fn search_order(pattern: &Diagram) -> Vec<usize> {
    let n = pattern.nodes.len();
    let adj = adjacency(pattern);
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            order.push(p);
            for q in 0..n {
                if !seen[q] && adj.contains_key(&pair(p, q)) {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    order
}

/// All embeddings of `pattern` into `host`, one per image node set, ordered by the
/// sorted image ids.
pub(crate) fn embed(host: &Diagram, pattern: &Diagram) -> Vec<(Vec<usize>, Vec<(usize, u8)>)> {
    if pattern.nodes.is_empty() {
        return embed_wire(host, pattern);
    }
    let Some(by_node) = slots_by_node(pattern) else { return Vec::new() };
    let pdeg = degrees(pattern);
    let hdeg = degrees(host);
    let padj = adjacency(pattern);
    let hadj = adjacency(host);
    let order = search_order(pattern);
    let mut found: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut seen_sets = BTreeSet::new();
    let mut map = vec![usize::MAX; pattern.nodes.len()];
    let mut used = vec![false; host.nodes.len()];

    #[allow(clippy::too_many_arguments)]
    fn go(
        k: usize,
        order: &[usize],
        host: &Diagram,
        pattern: &Diagram,
        pdeg: &[usize],
        hdeg: &[usize],
        padj: &HashMap<(usize, usize), usize>,
        hadj: &HashMap<(usize, usize), usize>,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
        seen: &mut BTreeSet<Vec<usize>>,
    ) {
        if k == order.len() {
            let mut set = map.clone();
            set.sort_unstable();
            if seen.insert(set.clone()) {
                out.push((set, map.clone()));
            }
            return;
        }
        let p = order[k];
        for h in 0..host.nodes.len() {
            if used[h] || host.nodes[h] != pattern.nodes[p] || hdeg[h] != pdeg[p] {
                continue;
            }
            map[p] = h;
            let fits = order[..=k].iter().all(|&q| {
                let want = padj.get(&pair(p, q)).copied().unwrap_or(0);
                hadj.get(&pair(h, map[q])).copied().unwrap_or(0) == want
            });
            if fits {
                used[h] = true;
                go(k + 1, order, host, pattern, pdeg, hdeg, padj, hadj, map, used, out, seen);
                used[h] = false;
            }
        }
        map[p] = usize::MAX;
    }

    go(0, &order, host, pattern, &pdeg, &hdeg, &padj, &hadj, &mut map, &mut used, &mut found, &mut seen_sets);
    found.sort();
    found
        .into_iter()
        .map(|(_, map)| {
            let slots = assign_slots(host, &map, &by_node, pattern.boundary.len());
            (map, slots)
        })
        .collect()
}

/// Pairs each LHS boundary slot with a host edge leaving the image.
fn assign_slots(host: &Diagram, map: &[usize], by_node: &[Vec<usize>], nslots: usize) -> Vec<(usize, u8)> {
    let inside = |e: Endpoint| matches!(e, Endpoint::Node(n) if map.contains(&n));
    let mut slots = vec![(usize::MAX, 0u8); nslots];
    for (p, pslots) in by_node.iter().enumerate() {
        let mut external = Vec::new();
        for (i, &(a, b)) in host.edges.iter().enumerate() {
            if a == Endpoint::Node(map[p]) && !inside(b) {
                external.push((i, 0u8));
            }
            if b == Endpoint::Node(map[p]) && !inside(a) {
                external.push((i, 1u8));
            }
        }
        for (&s, &e) in pslots.iter().zip(&external) {
            slots[s] = e;
        }
    }
    slots
}

/// A node-free pattern must be a single wire; it matches every host edge.
fn embed_wire(host: &Diagram, pattern: &Diagram) -> Vec<(Vec<usize>, Vec<(usize, u8)>)> {
    if pattern.edges.len() != 1 || pattern.boundary.len() != 2 {
        return Vec::new();
    }
    (0..host.edges.len()).map(|e| (Vec::new(), vec![(e, 1), (e, 0)])).collect()
}

/// All matches of `rule` in `diag`, either at the given parameters or over every
/// parameter vector up to `DEFAULT_MAX_ARITY`.
pub fn find_matches(diag: &Diagram, rule: &Rule, params: Option<&[usize]>) -> Vec<Match> {
    let grid = match params {
        Some(p) => vec![p.to_vec()],
        None => rule.instances(diag.d, DEFAULT_MAX_ARITY),
    };
    let mut out = Vec::new();
    for p in grid {
        let lhs = rule.lhs(diag.d, &p);
        for (nodes, slots) in embed(diag, &lhs) {
            out.push(Match { rule: rule.name.clone(), params: p.clone(), nodes, slots });
        }
    }
    out.sort_by(|a, b| {
        let key = |m: &Match| {
            let mut s = m.nodes.clone();
            s.sort_unstable();
            (s, m.slots.first().map(|x| x.0), m.params.clone())
        };
        key(a).cmp(&key(b))
    });
    out
}

fn check_match(host: &Diagram, pattern: &Diagram, m: &Match) -> Result<(), RewriteError> {
    let stale = |why: &str| Err(RewriteError::StaleMatch(format!("{}: {why}", m.rule)));
    if m.nodes.len() != pattern.nodes.len() || m.slots.len() != pattern.boundary.len() {
        return stale("shape differs from the rule");
    }
    if m.slots.iter().any(|&(e, side)| e >= host.edges.len() || side > 1) {
        return stale("edge out of range");
    }
    if pattern.nodes.is_empty() {
        let ok = m.slots.len() == 2 && m.slots[0] == (m.slots[1].0, 1) && m.slots[1].1 == 0;
        return if ok { Ok(()) } else { stale("wire slots disagree") };
    }
    let mut distinct = m.nodes.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != m.nodes.len() || m.nodes.iter().any(|&n| n >= host.nodes.len()) {
        return stale("node map is not injective");
    }
    let (pdeg, hdeg) = (degrees(pattern), degrees(host));
    let (padj, hadj) = (adjacency(pattern), adjacency(host));
    for p in 0..m.nodes.len() {
        if host.nodes[m.nodes[p]] != pattern.nodes[p] || hdeg[m.nodes[p]] != pdeg[p] {
            return stale("node kind or degree changed");
        }
        for q in 0..m.nodes.len() {
            let want = padj.get(&pair(p, q)).copied().unwrap_or(0);
            if hadj.get(&pair(m.nodes[p], m.nodes[q])).copied().unwrap_or(0) != want {
                return stale("adjacency changed");
            }
        }
    }
    let by_node = slots_by_node(pattern).ok_or_else(|| RewriteError::StaleMatch("pattern has bare wires".into()))?;
    let mut seen = BTreeSet::new();
    for (p, pslots) in by_node.iter().enumerate() {
        for &s in pslots {
            let (e, side) = m.slots[s];
            let (a, b) = host.edges[e];
            let (mine, other) = if side == 0 { (a, b) } else { (b, a) };
            let outside = !matches!(other, Endpoint::Node(n) if m.nodes.contains(&n));
            if mine != Endpoint::Node(m.nodes[p]) || !outside || !seen.insert((e, side)) {
                return stale("boundary edge moved");
            }
        }
    }
    Ok(())
}

/// Replaces the matched LHS image by the rule's RHS; the law is folded into the
/// global scalar, so the result has exactly the same tensor.
pub fn apply(diag: &Diagram, rule: &Rule, m: &Match) -> Result<Diagram, RewriteError> {
    let d = diag.d;
    let lhs = rule.lhs(d, &m.params);
    let rhs = rule.rhs(d, &m.params);
    check_match(diag, &lhs, m)?;
    let nb = diag.boundary.len();
    let ns = lhs.boundary.len();
    let mut g = diag.clone();
    g.boundary.extend(lhs.boundary.iter().copied());
    if lhs.nodes.is_empty() {
        let e = m.slots[0].0;
        let (a, b) = g.edges[e];
        g.edges[e] = (a, Endpoint::Boundary(nb));
        g.edges.push((Endpoint::Boundary(nb + 1), b));
    } else {
        for (s, &(e, side)) in m.slots.iter().enumerate() {
            if side == 0 {
                g.edges[e].0 = Endpoint::Boundary(nb + s);
            } else {
                g.edges[e].1 = Endpoint::Boundary(nb + s);
            }
        }
        g.remove_nodes(&m.nodes);
    }
    let u = g.union(&rhs);
    let pairs: Vec<(usize, usize)> = (0..ns).map(|s| (nb + s, nb + ns + s)).collect();
    let keep: Vec<usize> = (0..nb).collect();
    let mut out = u.glue(&pairs, &keep);
    let undo =
        lhs.global.inverse().ok_or_else(|| RewriteError::StaleMatch("rule LHS has a non-invertible scalar".into()))?;
    out.scale(&(&rule.law(d, &m.params) * &undo));
    Ok(out)
}

/// Applies the first match of each rule in turn, re-matching after every step.
/// Returns the new diagram and the number of rewrites made.
pub fn apply_all_once(diag: &Diagram, rules: &[Rule]) -> Result<(Diagram, usize), RewriteError> {
    let mut g = diag.clone();
    let mut count = 0;
    for rule in rules {
        if let Some(m) = find_matches(&g, rule, None).into_iter().next() {
            g = apply(&g, rule, &m)?;
            count += 1;
        }
    }
    Ok((g, count))
}

/// Rewrites with the first rule (in list order) that matches until none does or
/// `fuel` steps are spent. Returns the diagram and the number of steps taken.
pub fn normalize_with(diag: &Diagram, rules: &[Rule], fuel: usize) -> Result<(Diagram, usize), RewriteError> {
    let mut g = diag.clone();
    for step in 0..fuel {
        let next = rules.iter().find_map(|r| find_matches(&g, r, None).into_iter().next().map(|m| (r, m)));
        match next {
            Some((rule, m)) => g = apply(&g, rule, &m)?,
            None => return Ok((g, step)),
        }
    }
    Ok((g, fuel))
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub params: Vec<usize>,
    pub law: Scalar,
    pub lhs: Option<Tensor>,
    pub rhs: Option<Tensor>,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct SoundnessReport {
    pub rule: String,
    pub d: u32,
    pub max_arity: usize,
    pub checked: usize,
    pub failures: Vec<Counterexample>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "ok" } else { "FAIL" };
        write!(f, "{:<20} d={} instances={:<4} {}", self.rule, self.d, self.checked, verdict)?;
        for c in &self.failures {
            write!(f, "\n    params={:?} law={} {}", c.params, c.law, c.note)?;
            if let (Some(l), Some(r)) = (&c.lhs, &c.rhs) {
                write!(f, "\n    lhs={}\n    rhs={}", l.to_json(), r.to_json())?;
            }
        }
        Ok(())
    }
}

/// Contracts both sides of every instance within bounds and checks the declared law.
pub fn check_soundness(rule: &Rule, d: u32, max_arity: usize) -> SoundnessReport {
    let mut report = SoundnessReport { rule: rule.name.clone(), d, max_arity, checked: 0, failures: Vec::new() };
    for p in rule.instances(d, max_arity) {
        report.checked += 1;
        let law = rule.law(d, &p);
        let (l, r) = (rule.lhs(d, &p), rule.rhs(d, &p));
        if l.boundary != r.boundary {
            let note = format!("signatures differ: {:?} vs {:?}", l.boundary, r.boundary);
            report.failures.push(Counterexample { params: p, law, lhs: None, rhs: None, note });
            continue;
        }
        match (contract(&l), contract(&r)) {
            (Ok(lt), Ok(rt)) => {
                if lt != rt.scale(&law) {
                    let note = match rt.proportional(&lt) {
                        Some(q) => format!("lhs = {q}·rhs"),
                        None => "sides are not proportional".into(),
                    };
                    report.failures.push(Counterexample { params: p, law, lhs: Some(lt), rhs: Some(rt), note });
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                report.failures.push(Counterexample { params: p, law, lhs: None, rhs: None, note: e.to_string() });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests;
