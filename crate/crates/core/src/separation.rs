//! Finite separation: the best split of a subset, the optimal separation constant
//! `C_sep`, and `C`-separated tree structures (construction, validation, export).
//!
//! The best split of `S` is found through a minimum spanning tree: the largest
//! achievable `dist(A, S \ A)` equals the heaviest MST edge, and the optimal splits
//! are exactly the unions of components left after deleting the heaviest edges.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{minimum_spanning_tree, Chain, FiniteMetricSpace};

/// Largest space for which `C_sep` is computed by enumerating every subset.
pub const DEFAULT_EXACT_LIMIT: usize = 15;

/// Relative slack used when comparing `diam <= C * dist` in floating point.
pub const GAP_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeparationError {
    #[error("subset has {0} points; a split needs at least 2")]
    TooSmall(usize),
    #[error("exact separation over {points} points exceeds the limit {limit}")]
    TooLarge { points: usize, limit: usize },
    #[error("point index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("separation constant must be >= 1, got {0}")]
    BadConstant(f64),
    #[error("no split of {subset:?} reaches diam/C = {required}: best separation is {best}")]
    NoValidSplit {
        subset: Vec<usize>,
        required: f64,
        best: f64,
    },
    #[error("malformed tree: {0}")]
    MalformedTree(String),
}

/// A bipartition `(part, rest)` of a subset and `dist(part, rest)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub separation: f64,
    pub part: Vec<usize>,
    pub rest: Vec<usize>,
}

fn normalize(space: &FiniteMetricSpace, subset: &[usize]) -> Result<Vec<usize>, SeparationError> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&i| i >= space.len()) {
        return Err(SeparationError::IndexOutOfRange(bad));
    }
    Ok(s)
}

/// Best bipartition of `subset`.
///
/// Among all maximizing splits the smaller side is chosen, then the lexicographically
/// smallest index set; it is returned as `part`.
pub fn max_split_separation(
    space: &FiniteMetricSpace,
    subset: &[usize],
) -> Result<Split, SeparationError> {
    let s = normalize(space, subset)?;
    if s.len() < 2 {
        return Err(SeparationError::TooSmall(s.len()));
    }
    let tree = minimum_spanning_tree(space, &s);
    let heaviest = tree.iter().map(|e| e.2).fold(0.0, f64::max);

    // Components of the forest left after deleting every edge of maximal weight.
    let pos = |p: usize| s.binary_search(&p).expect("tree vertex in subset");
    let mut parent: Vec<usize> = (0..s.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(u, v, w) in &tree {
        if w < heaviest {
            let (a, b) = (find(&mut parent, pos(u)), find(&mut parent, pos(v)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); s.len()];
    for i in 0..s.len() {
        let r = find(&mut parent, i);
        groups[r].push(s[i]);
    }
    let part = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .expect("at least two components");
    let rest = s
        .iter()
        .copied()
        .filter(|p| part.binary_search(p).is_err())
        .collect();
    Ok(Split {
        separation: heaviest,
        part,
        rest,
    })
}

/// The split used in the proof that ultrametrics separate at constant 1: take a
/// maximal `D`-separated family (`D = diam S`) greedily in index order, fix its first
/// point `x0`, and let `part = {x : d(x0, x) < D}`.
pub fn ultrametric_witness_split(
    space: &FiniteMetricSpace,
    subset: &[usize],
) -> Result<Split, SeparationError> {
    let s = normalize(space, subset)?;
    if s.len() < 2 {
        return Err(SeparationError::TooSmall(s.len()));
    }
    let diam = space.diam(&s);
    let mut family: Vec<usize> = Vec::new();
    for &x in &s {
        if family.iter().all(|&y| space.d(x, y) >= diam) {
            family.push(x);
        }
    }
    let x0 = family[0];
    let (part, rest): (Vec<usize>, Vec<usize>) = s.iter().partition(|&&x| space.d(x0, x) < diam);
    let separation = if rest.is_empty() {
        0.0
    } else {
        space
            .set_distance(&part, &rest)
            .expect("both sides non-empty")
    };
    Ok(Split {
        separation,
        part,
        rest,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeparationMode {
    /// Every subset with at least two points.
    Exact,
    /// Single-linkage dendrogram clusters only; a lower bound on the exact value.
    Dendrogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub c_sep: f64,
    pub witness_subset: Vec<usize>,
    pub mode: SeparationMode,
}

pub fn separation_constant(
    space: &FiniteMetricSpace,
    mode: SeparationMode,
) -> Result<SeparationReport, SeparationError> {
    separation_constant_with_limit(space, mode, DEFAULT_EXACT_LIMIT)
}

pub fn separation_constant_with_limit(
    space: &FiniteMetricSpace,
    mode: SeparationMode,
    exact_limit: usize,
) -> Result<SeparationReport, SeparationError> {
    let k = space.len();
    if k < 2 {
        return Err(SeparationError::TooSmall(k));
    }
    match mode {
        SeparationMode::Exact => {
            if k > exact_limit.min(30) {
                return Err(SeparationError::TooLarge {
                    points: k,
                    limit: exact_limit.min(30),
                });
            }
            let (ratio, mask) = (1u32..1 << k)
                .into_par_iter()
                .filter(|m| m.count_ones() >= 2)
                .map(|mask| (mask_ratio(space, mask), mask))
                .reduce(|| (f64::NEG_INFINITY, u32::MAX), better);
            let witness = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            Ok(SeparationReport {
                c_sep: ratio,
                witness_subset: witness,
                mode,
            })
        }
        SeparationMode::Dendrogram => {
            let mut best = (f64::NEG_INFINITY, Vec::new());
            for (cluster, height) in single_linkage_clusters(space) {
                let ratio = space.diam(&cluster) / height;
                if ratio > best.0 || (ratio == best.0 && cluster < best.1) {
                    best = (ratio, cluster);
                }
            }
            Ok(SeparationReport {
                c_sep: best.0,
                witness_subset: best.1,
                mode,
            })
        }
    }
}

fn better(a: (f64, u32), b: (f64, u32)) -> (f64, u32) {
    if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
        a
    } else {
        b
    }
}

/// `diam(S) / (heaviest MST edge of S)` for the subset encoded by `mask`.
fn mask_ratio(space: &FiniteMetricSpace, mask: u32) -> f64 {
    let mut pts = [0usize; 32];
    let mut k = 0;
    for i in 0..32 {
        if mask >> i & 1 == 1 {
            pts[k] = i;
            k += 1;
        }
    }
    let pts = &pts[..k];
    let mut diam = 0.0f64;
    let mut best = [f64::INFINITY; 32];
    let mut in_tree = [false; 32];
    in_tree[0] = true;
    for v in 1..k {
        best[v] = space.d(pts[0], pts[v]);
    }
    let mut heaviest = 0.0f64;
    for _ in 1..k {
        let mut next = usize::MAX;
        for v in 0..k {
            if !in_tree[v] && (next == usize::MAX || best[v] < best[next]) {
                next = v;
            }
        }
        in_tree[next] = true;
        heaviest = heaviest.max(best[next]);
        for v in 0..k {
            let w = space.d(pts[next], pts[v]);
            diam = diam.max(w);
            if !in_tree[v] && w < best[v] {
                best[v] = w;
            }
        }
    }
    diam / heaviest
}

/// Clusters created by single-linkage merging, each with its merge height.
///
/// Edges are processed by `(weight, i, j)`; every merge yields one cluster.
pub fn single_linkage_clusters(space: &FiniteMetricSpace) -> Vec<(Vec<usize>, f64)> {
    let k = space.len();
    let mut edges: Vec<(f64, usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| (space.d(i, j), i, j))
        .collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut owner: Vec<usize> = (0..k).collect();
    let mut members: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    let mut out = Vec::with_capacity(k.saturating_sub(1));
    for (w, i, j) in edges {
        let (a, b) = (owner[i], owner[j]);
        if a == b {
            continue;
        }
        let (keep, drop) = if members[a].len() >= members[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        let moved = std::mem::take(&mut members[drop]);
        for &p in &moved {
            owner[p] = keep;
        }
        members[keep].extend(moved);
        let mut cluster = members[keep].clone();
        cluster.sort_unstable();
        out.push((cluster, w));
        if out.len() + 1 == k {
            break;
        }
    }
    out
}

/// For `C < C_sep`: a subset `S` admitting no `C`-split, a diameter pair `(a, b)` of `S`,
/// and a `d(a,b)/C`-chain inside `S` joining them.
#[derive(Debug, Clone, PartialEq)]
pub struct InseparableChain {
    pub subset: Vec<usize>,
    pub a: usize,
    pub b: usize,
    /// Chain in global point indices.
    pub chain: Chain,
}

pub fn inseparable_chain(
    space: &FiniteMetricSpace,
    c: f64,
) -> Result<Option<InseparableChain>, SeparationError> {
    let mode = if space.len() <= DEFAULT_EXACT_LIMIT {
        SeparationMode::Exact
    } else {
        SeparationMode::Dendrogram
    };
    let report = separation_constant(space, mode)?;
    if report.c_sep <= c {
        return Ok(None);
    }
    let s = report.witness_subset;
    let mut pair = (s[0], s[1]);
    for (i, &x) in s.iter().enumerate() {
        for &y in &s[i + 1..] {
            if space.d(x, y) > space.d(pair.0, pair.1) {
                pair = (x, y);
            }
        }
    }
    let sub = space.subspace(&s);
    let local = |p: usize| s.iter().position(|&q| q == p).expect("member");
    let eps = space.d(pair.0, pair.1) / c;
    let chain = sub
        .find_chain(local(pair.0), local(pair.1), eps)
        .expect("valid indices")
        .expect("an inseparable subset is connected at threshold diam/C");
    let chain = Chain {
        points: chain.points.iter().map(|&i| s[i]).collect(),
        epsilon: eps,
    };
    Ok(Some(InseparableChain {
        subset: s,
        a: pair.0,
        b: pair.1,
        chain,
    }))
}

/// One node `A_alpha` of a separated tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    /// Binary address `alpha`; the root is the empty string.
    pub address: String,
    pub points: Vec<usize>,
    /// Node indices of `alpha0` and `alpha1`.
    pub children: Option<[usize; 2]>,
}

/// A finite `C`-separated tree structure; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatedTreeStructure {
    pub c: f64,
    pub nodes: Vec<TreeNode>,
}

impl SeparatedTreeStructure {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, address: &str) -> Option<&TreeNode> {
        self.nodes.iter().find(|n| n.address == address)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| n.children.is_none())
    }

    /// Largest `diam / dist` realised over internal nodes (1 when there are none).
    pub fn realized_constant(&self, space: &FiniteMetricSpace) -> f64 {
        self.nodes
            .iter()
            .filter_map(|n| n.children.map(|[a, b]| (n, a, b)))
            .map(|(n, a, b)| {
                let d = space
                    .set_distance(&self.nodes[a].points, &self.nodes[b].points)
                    .unwrap_or(0.0);
                space.diam(&n.points) / d
            })
            .fold(1.0, f64::max)
    }

    pub fn to_json(&self) -> TreeJson {
        fn go(t: &SeparatedTreeStructure, i: usize) -> TreeJson {
            let n = &t.nodes[i];
            TreeJson {
                address: n.address.clone(),
                points: n.points.clone(),
                children: n
                    .children
                    .map(|c| c.iter().map(|&j| go(t, j)).collect())
                    .unwrap_or_default(),
            }
        }
        go(self, 0)
    }

    pub fn from_json(c: f64, root: &TreeJson) -> Result<Self, SeparationError> {
        // Same node order as `build_tree_structure`: siblings adjacent, expanded depth first.
        let leaf = |j: &TreeJson| TreeNode {
            address: j.address.clone(),
            points: j.points.clone(),
            children: None,
        };
        let mut nodes = vec![leaf(root)];
        let mut pending = vec![(0usize, root)];
        while let Some((i, j)) = pending.pop() {
            match j.children.as_slice() {
                [] => {}
                [a, b] => {
                    let first = nodes.len();
                    nodes.push(leaf(a));
                    nodes.push(leaf(b));
                    nodes[i].children = Some([first, first + 1]);
                    pending.push((first + 1, b));
                    pending.push((first, a));
                }
                other => {
                    return Err(SeparationError::MalformedTree(format!(
                        "node '{}' has {} children",
                        j.address,
                        other.len()
                    )))
                }
            }
        }
        Ok(SeparatedTreeStructure { c, nodes })
    }

    /// Graphviz rendering: one node per address with its subset and diameter.
    pub fn to_dot(&self, space: &FiniteMetricSpace) -> String {
        let mut out = String::from("digraph separated_tree {\n  node [shape=box];\n");
        let name = |a: &str| {
            if a.is_empty() {
                "root".to_string()
            } else {
                format!("a{a}")
            }
        };
        for n in &self.nodes {
            let shown = if n.address.is_empty() {
                "∅"
            } else {
                &n.address
            };
            let pts: Vec<&str> = n
                .points
                .iter()
                .map(|&p| space.labels()[p].as_str())
                .collect();
            let _ = writeln!(
                out,
                "  {} [label=\"{}\\n{{{}}}\\ndiam={}\"];",
                name(&n.address),
                shown,
                pts.join(","),
                space.diam(&n.points)
            );
        }
        for n in &self.nodes {
            if let Some(ch) = n.children {
                for c in ch {
                    let _ = writeln!(
                        out,
                        "  {} -> {};",
                        name(&n.address),
                        name(&self.nodes[c].address)
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Nested JSON form `{address, points, children}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    pub address: String,
    pub points: Vec<usize>,
    #[serde(default)]
    pub children: Vec<TreeJson>,
}

/// Recursively splits every multi-point subset by its canonical best split, failing
/// as soon as a subset cannot be split with gap at least `diam / C`.
pub fn build_tree_structure(
    space: &FiniteMetricSpace,
    c: f64,
) -> Result<SeparatedTreeStructure, SeparationError> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(SeparationError::BadConstant(c));
    }
    let slack = space.tolerance().max(GAP_SLACK);
    let mut nodes = vec![TreeNode {
        address: String::new(),
        points: (0..space.len()).collect(),
        children: None,
    }];
    let mut pending = vec![0usize];
    while let Some(i) = pending.pop() {
        if nodes[i].points.len() < 2 {
            continue;
        }
        let split = max_split_separation(space, &nodes[i].points)?;
        let diam = space.diam(&nodes[i].points);
        if diam > c * split.separation * (1.0 + slack) {
            return Err(SeparationError::NoValidSplit {
                subset: nodes[i].points.clone(),
                required: diam / c,
                best: split.separation,
            });
        }
        let base = nodes[i].address.clone();
        let first = nodes.len();
        nodes.push(TreeNode {
            address: format!("{base}0"),
            points: split.part,
            children: None,
        });
        nodes.push(TreeNode {
            address: format!("{base}1"),
            points: split.rest,
            children: None,
        });
        nodes[i].children = Some([first, first + 1]);
        pending.push(first + 1);
        pending.push(first);
    }
    Ok(SeparatedTreeStructure { c, nodes })
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeViolation {
    /// Property (1): the root is not the whole space.
    Root {
        missing: Vec<usize>,
        extra: Vec<usize>,
    },
    /// Property (2): no pair of incomparable addresses separates `x` and `y`.
    Inseparable { x: usize, y: usize },
    /// Property (3): children do not partition the node (or the tree is malformed).
    Partition { address: String, detail: String },
    /// Property (4): a multi-point node lacks two non-empty children.
    Trivial { address: String },
    /// Property (5): `diam A > C dist(A0, A1)`.
    Gap {
        address: String,
        diam: f64,
        dist: f64,
    },
    /// Incomparable nodes closer than `max diam / C`.
    EarlierBranches {
        first: String,
        second: String,
        dist: f64,
        bound: f64,
    },
}

/// First violation found for each checked property; `None` means the property holds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TreeReport {
    pub root: Option<TreeViolation>,
    pub separates: Option<TreeViolation>,
    pub partition: Option<TreeViolation>,
    pub nontrivial: Option<TreeViolation>,
    pub gap: Option<TreeViolation>,
    pub earlier_branches: Option<TreeViolation>,
}

impl TreeReport {
    pub fn is_valid(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn violations(&self) -> impl Iterator<Item = &TreeViolation> {
        [
            &self.root,
            &self.separates,
            &self.partition,
            &self.nontrivial,
            &self.gap,
            &self.earlier_branches,
        ]
        .into_iter()
        .flatten()
    }
}

fn is_ancestor(a: &str, b: &str) -> bool {
    b.starts_with(a)
}

fn incomparable(a: &str, b: &str) -> bool {
    !is_ancestor(a, b) && !is_ancestor(b, a)
}

/// Checks the five defining properties of a `C`-separated tree structure plus the
/// separation of incomparable branches.
pub fn validate_tree_structure(
    space: &FiniteMetricSpace,
    tree: &SeparatedTreeStructure,
) -> TreeReport {
    let mut report = TreeReport::default();
    let c = tree.c;
    let slack = space.tolerance().max(GAP_SLACK);
    let k = space.len();

    if tree.nodes.is_empty() {
        report.root = Some(TreeViolation::Root {
            missing: (0..k).collect(),
            extra: vec![],
        });
        return report;
    }
    for n in &tree.nodes {
        if let Some(&p) = n.points.iter().find(|&&p| p >= k) {
            report.partition = Some(TreeViolation::Partition {
                address: n.address.clone(),
                detail: format!("point {p} out of range"),
            });
            return report;
        }
    }

    let root: BTreeSet<usize> = tree.nodes[0].points.iter().copied().collect();
    if !tree.nodes[0].address.is_empty() || root.len() != k || tree.nodes[0].points.len() != k {
        let missing = (0..k).filter(|p| !root.contains(p)).collect();
        let extra = tree.nodes[0]
            .points
            .iter()
            .copied()
            .filter(|&p| p >= k)
            .collect();
        report.root = Some(TreeViolation::Root { missing, extra });
    }

    for n in &tree.nodes {
        let own: BTreeSet<usize> = n.points.iter().copied().collect();
        let multi = own.len() > 1;
        match n.children {
            None => {
                if multi && report.nontrivial.is_none() {
                    report.nontrivial = Some(TreeViolation::Trivial {
                        address: n.address.clone(),
                    });
                }
            }
            Some([a, b]) => {
                let (na, nb) = (&tree.nodes[a], &tree.nodes[b]);
                let left: BTreeSet<usize> = na.points.iter().copied().collect();
                let right: BTreeSet<usize> = nb.points.iter().copied().collect();
                if report.partition.is_none() {
                    let detail = if na.address != format!("{}0", n.address)
                        || nb.address != format!("{}1", n.address)
                    {
                        Some("child addresses do not extend the parent".to_string())
                    } else if left.union(&right).copied().collect::<BTreeSet<_>>() != own {
                        Some("children do not cover exactly the parent".to_string())
                    } else if left.intersection(&right).next().is_some() {
                        Some("children overlap".to_string())
                    } else {
                        None
                    };
                    if let Some(detail) = detail {
                        report.partition = Some(TreeViolation::Partition {
                            address: n.address.clone(),
                            detail,
                        });
                    }
                }
                if multi {
                    if left.is_empty() || right.is_empty() {
                        if report.nontrivial.is_none() {
                            report.nontrivial = Some(TreeViolation::Trivial {
                                address: n.address.clone(),
                            });
                        }
                    } else if report.gap.is_none() {
                        let diam = space.diam(&n.points);
                        let dist = space
                            .set_distance(&na.points, &nb.points)
                            .expect("non-empty");
                        if diam > c * dist * (1.0 + slack) {
                            report.gap = Some(TreeViolation::Gap {
                                address: n.address.clone(),
                                diam,
                                dist,
                            });
                        }
                    }
                }
            }
        }
    }

    let mut homes: Vec<Vec<&str>> = vec![Vec::new(); k];
    for n in &tree.nodes {
        for &p in &n.points {
            homes[p].push(&n.address);
        }
    }
    'pairs: for x in 0..k {
        for y in x + 1..k {
            let ok = homes[x]
                .iter()
                .any(|a| homes[y].iter().any(|b| incomparable(a, b)));
            if !ok {
                report.separates = Some(TreeViolation::Inseparable { x, y });
                break 'pairs;
            }
        }
    }

    let nonempty: Vec<(&TreeNode, f64)> = tree
        .nodes
        .iter()
        .filter(|n| !n.points.is_empty())
        .map(|n| (n, space.diam(&n.points)))
        .collect();
    'branches: for (i, (a, da)) in nonempty.iter().enumerate() {
        for (b, db) in &nonempty[i + 1..] {
            if !incomparable(&a.address, &b.address) {
                continue;
            }
            let dist = space.set_distance(&a.points, &b.points).expect("non-empty");
            let bound = da.max(*db);
            if bound > c * dist * (1.0 + slack) {
                report.earlier_branches = Some(TreeViolation::EarlierBranches {
                    first: a.address.clone(),
                    second: b.address.clone(),
                    dist,
                    bound: bound / c,
                });
                break 'branches;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(p: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_line(p).unwrap()
    }

    #[test]
    fn two_point_split() {
        let x = line(&[0.0, 2.5]);
        let s = max_split_separation(&x, &[0, 1]).unwrap();
        assert_eq!((s.separation, s.part, s.rest), (2.5, vec![0], vec![1]));
        assert_eq!(
            max_split_separation(&x, &[1]),
            Err(SeparationError::TooSmall(1))
        );
    }

    #[test]
    fn path_split_prefers_smallest_side() {
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let s = max_split_separation(&x, &[0, 1, 2, 3]).unwrap();
        assert_eq!(s.separation, 1.0);
        assert_eq!(s.part, vec![0]);
        let y = line(&[0.0, 1.0, 3.0, 4.0]);
        let s = max_split_separation(&y, &[0, 1, 2, 3]).unwrap();
        assert_eq!(
            (s.separation, s.part, s.rest),
            (2.0, vec![0, 1], vec![2, 3])
        );
    }

    #[test]
    fn path_constant_is_three() {
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let r = separation_constant(&x, SeparationMode::Exact).unwrap();
        assert_eq!(r.c_sep, 3.0);
        assert_eq!(r.witness_subset, vec![0, 1, 2, 3]);
        let d = separation_constant(&x, SeparationMode::Dendrogram).unwrap();
        assert_eq!(d.c_sep, 3.0);
    }

    #[test]
    fn equilateral_constant_is_one() {
        let m = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let x = FiniteMetricSpace::from_matrix(m).unwrap();
        assert_eq!(
            separation_constant(&x, SeparationMode::Exact)
                .unwrap()
                .c_sep,
            1.0
        );
    }

    #[test]
    fn exact_mode_respects_limit() {
        let x = line(&(0..17).map(f64::from).collect::<Vec<_>>());
        assert!(matches!(
            separation_constant(&x, SeparationMode::Exact),
            Err(SeparationError::TooLarge { .. })
        ));
        assert!(separation_constant(&x, SeparationMode::Dendrogram).is_ok());
    }

    #[test]
    fn build_path_tree() {
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let t = build_tree_structure(&x, 3.0).unwrap();
        assert_eq!(t.node("0").unwrap().points, vec![0]);
        assert_eq!(t.node("1").unwrap().points, vec![1, 2, 3]);
        assert_eq!(t.node("10").unwrap().points, vec![1]);
        assert_eq!(t.node("11").unwrap().points, vec![2, 3]);
        assert_eq!(t.leaves().count(), 4);
        assert!(validate_tree_structure(&x, &t).is_valid());
        match build_tree_structure(&x, 2.0) {
            Err(SeparationError::NoValidSplit {
                subset,
                required,
                best,
            }) => {
                assert_eq!(subset, vec![0, 1, 2, 3]);
                assert_eq!((required, best), (1.5, 1.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singleton_tree() {
        let x = FiniteMetricSpace::from_matrix(vec![vec![0.0]]).unwrap();
        let t = build_tree_structure(&x, 1.0).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert!(validate_tree_structure(&x, &t).is_valid());
    }

    #[test]
    fn corrupted_trees_are_caught() {
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let mut t = build_tree_structure(&x, 3.0).unwrap();
        let a = t.nodes.iter().position(|n| n.address == "0").unwrap();
        let b = t.nodes.iter().position(|n| n.address == "11").unwrap();
        let tmp = t.nodes[a].points.clone();
        t.nodes[a].points = t.nodes[b].points.clone();
        t.nodes[b].points = tmp;
        let r = validate_tree_structure(&x, &t);
        assert!(matches!(r.partition, Some(TreeViolation::Partition { .. })));

        let mut t = build_tree_structure(&x, 3.0).unwrap();
        let realized = t.realized_constant(&x);
        assert_eq!(realized, 3.0);
        t.c = 2.9;
        let r = validate_tree_structure(&x, &t);
        assert!(matches!(r.gap, Some(TreeViolation::Gap { .. })));
        assert!(r.root.is_none() && r.partition.is_none());
    }

    #[test]
    fn json_round_trip_and_dot() {
        let x = line(&[0.0, 1.0, 3.0, 4.0]);
        let t = build_tree_structure(&x, 2.0).unwrap();
        let back = SeparatedTreeStructure::from_json(2.0, &t.to_json()).unwrap();
        assert_eq!(back, t);
        let dot = t.to_dot(&x);
        assert!(dot.contains("root -> a0"));
        assert!(dot.contains("diam=4"));
    }

    #[test]
    fn chain_inside_inseparable_subset() {
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let w = inseparable_chain(&x, 2.0).unwrap().unwrap();
        assert_eq!((w.a, w.b), (0, 3));
        assert_eq!(w.chain.points, vec![0, 1, 2, 3]);
        assert!(w.chain.epsilon == 1.5);
        assert!(inseparable_chain(&x, 3.0).unwrap().is_none());
    }
}
