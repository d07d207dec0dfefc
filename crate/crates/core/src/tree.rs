//! Rooted directed trees, materialized to a finite depth.
//!
//! Every tree here is a truncation of an infinite (or finite) rooted tree:
//! all vertices of depth `<= N` are present and nothing deeper is. Degrees of
//! vertices at depth `N` are therefore unknown, and every structural verdict
//! states the depth it was verified to.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Handle of a vertex inside one [`DirectedTree`].
///
/// Vertices are numbered in breadth-first order, so the root is always
/// `Vertex(0)` and generations occupy contiguous index ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex(pub(crate) usize);

impl Vertex {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
struct Node {
    id: String,
    depth: usize,
    parent: Option<Vertex>,
    children: Vec<Vertex>,
}

/// A rooted directed tree with every vertex of depth `<= materialized_depth`.
#[derive(Clone, Debug)]
pub struct DirectedTree {
    nodes: Vec<Node>,
    ids: HashMap<String, Vertex>,
    generations: Vec<Vec<Vertex>>,
    depth: usize,
}

impl DirectedTree {
    pub fn root(&self) -> Vertex {
        Vertex(0)
    }

    pub fn materialized_depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        (0..self.nodes.len()).map(Vertex)
    }

    pub fn id(&self, v: Vertex) -> &str {
        &self.nodes[v.0].id
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.nodes[v.0].depth
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.nodes[v.0].parent
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.nodes[v.0].children
    }

    /// Number of materialized children. Only meaningful below the
    /// materialized depth; see [`DirectedTree::degree_known`].
    pub fn degree(&self, v: Vertex) -> usize {
        self.nodes[v.0].children.len()
    }

    /// Whether all children of `v` are materialized.
    pub fn degree_known(&self, v: Vertex) -> bool {
        self.depth(v) < self.depth
    }

    pub fn find(&self, id: &str) -> Option<Vertex> {
        self.ids.get(id).copied()
    }

    /// Follows a path of child positions from the root, e.g. `[1, 0]` is the
    /// first child of the second child of the root.
    pub fn by_path(&self, path: &[usize]) -> Result<Vertex> {
        let mut v = self.root();
        for (step, &i) in path.iter().enumerate() {
            v = *self.children(v).get(i).ok_or_else(|| {
                Error::Range(format!(
                    "path {path:?}: vertex `{}` has no child {i} (step {step})",
                    self.id(v)
                ))
            })?;
        }
        Ok(v)
    }

    /// Vertices of depth exactly `n`.
    pub fn generation(&self, n: usize) -> Result<&[Vertex]> {
        self.generations
            .get(n)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Range(format!("generation {n} outside materialized depth {}", self.depth)))
    }

    /// The `k`-th generation branching degree `Σ_{u ∈ gen(k-1)} (deg u − 1)`.
    pub fn branching_degree(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.depth {
            return Err(Error::Range(format!(
                "branching degree index {k} outside 1..={}",
                self.depth
            )));
        }
        let mut total = 0;
        for &u in &self.generations[k - 1] {
            let d = self.degree(u);
            if d == 0 {
                return Err(Error::Structure {
                    vertex: self.id(u).to_string(),
                    reason: "leaf inside the materialized depth".into(),
                });
            }
            total += d - 1;
        }
        Ok(total)
    }

    /// Whether every vertex above the materialized depth has a child.
    pub fn is_leafless(&self) -> bool {
        self.first_leaf().is_none()
    }

    pub(crate) fn first_leaf(&self) -> Option<Vertex> {
        self.vertices().find(|&v| self.degree_known(v) && self.degree(v) == 0)
    }

    /// All vertices have degree one within the materialized depth.
    pub fn is_path(&self) -> bool {
        self.vertices()
            .filter(|&v| self.degree_known(v))
            .all(|v| self.degree(v) == 1)
    }

    /// Whether every vertex below the root has at most one child and the root
    /// has exactly two (the shape needed by the rank-one extension weights).
    pub(crate) fn is_two_branch(&self) -> bool {
        self.degree(self.root()) == 2
            && self
                .vertices()
                .skip(1)
                .filter(|&v| self.degree_known(v))
                .all(|v| self.degree(v) == 1)
    }

    fn from_nodes(nodes: Vec<Node>, depth: usize) -> Self {
        let mut generations = vec![Vec::new(); depth + 1];
        let mut ids = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            generations[node.depth].push(Vertex(i));
            ids.insert(node.id.clone(), Vertex(i));
        }
        Self {
            nodes,
            ids,
            generations,
            depth,
        }
    }
}

impl fmt::Display for DirectedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rooted tree: {} vertices to depth {}", self.len(), self.depth)
    }
}

/// Shape of a tree family; the depth lives in [`TreeSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TreeShape {
    /// The rooted path `ℤ_+`.
    Path {},
    /// Root with `eta` children, each the start of a path. Only `kappa = 0`
    /// (no backward tail) is generated.
    TEtaKappa { eta: usize, kappa: usize },
    /// The rooted quasi-Brownian tree of the given valency: every vertex of
    /// degree `l` has one child of degree `l` and `l - 1` children of degree 1.
    QuasiBrownian { valency: usize },
    /// Root of degree `l` with one path child and `l - 1` comb children; a comb
    /// vertex has degree 2 with one path child and one comb child.
    CombFan { valency: usize },
    /// Root of degree `l` whose first child is the root of a [`TreeShape::CombFan`]
    /// of the same valency and whose other `l - 1` children start paths.
    NestedCombFan { valency: usize },
    /// `degrees[n][i]` is the degree of the `i`-th vertex of generation `n`;
    /// generations past the list have all degrees 1.
    GenerationRule { degrees: Vec<Vec<usize>> },
    /// Typed substitution: a vertex of type `t` has children of types
    /// `rules[t]`, in order.
    Substitution {
        root: String,
        rules: BTreeMap<String, Vec<String>>,
    },
    /// Explicit `(parent, child)` edge list with user-chosen vertex ids.
    Explicit { edges: Vec<(String, String)> },
}

/// A tree family together with its materialization depth.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeSpec {
    pub shape: TreeShape,
    pub depth: usize,
}

impl TreeSpec {
    pub fn new(shape: TreeShape, depth: usize) -> Self {
        Self { shape, depth }
    }

    pub fn path(depth: usize) -> Self {
        Self::new(TreeShape::Path {}, depth)
    }

    pub fn t_eta_0(eta: usize, depth: usize) -> Self {
        Self::new(TreeShape::TEtaKappa { eta, kappa: 0 }, depth)
    }

    pub fn quasi_brownian(valency: usize, depth: usize) -> Self {
        Self::new(TreeShape::QuasiBrownian { valency }, depth)
    }

    pub fn comb_fan(valency: usize, depth: usize) -> Self {
        Self::new(TreeShape::CombFan { valency }, depth)
    }

    pub fn nested_comb_fan(valency: usize, depth: usize) -> Self {
        Self::new(TreeShape::NestedCombFan { valency }, depth)
    }

    pub fn generation_rule(degrees: Vec<Vec<usize>>, depth: usize) -> Self {
        Self::new(TreeShape::GenerationRule { degrees }, depth)
    }

    pub fn materialize(&self) -> Result<DirectedTree> {
        materialize(&self.shape, self.depth)
    }
}

impl Serialize for TreeSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut value = serde_json::to_value(&self.shape).map_err(serde::ser::Error::custom)?;
        if let Some(map) = value.as_object_mut() {
            map.insert("depth".into(), self.depth.into());
        }
        value.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TreeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut map = serde_json::Map::<String, serde_json::Value>::deserialize(deserializer)?;
        let depth = map.remove("depth").ok_or_else(|| D::Error::missing_field("depth"))?;
        let depth = depth
            .as_u64()
            .ok_or_else(|| D::Error::custom("depth must be a nonnegative integer"))? as usize;
        let shape = TreeShape::deserialize(serde_json::Value::Object(map)).map_err(D::Error::custom)?;
        Ok(Self { shape, depth })
    }
}

/// Builds the finite truncation of `shape` containing every vertex of depth
/// `<= depth`. Generated vertices get ids `g<depth>:<index>`.
pub fn materialize(shape: &TreeShape, depth: usize) -> Result<DirectedTree> {
    let rules = |pairs: &[(&str, Vec<&str>)]| -> BTreeMap<String, Vec<String>> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect()))
            .collect()
    };
    match shape {
        TreeShape::Path {} => grow_typed("s", &rules(&[("s", vec!["s"])]), depth),
        TreeShape::TEtaKappa { eta, kappa } => {
            if *eta < 2 {
                return Err(Error::Config(format!("t_eta_kappa needs eta >= 2, got {eta}")));
            }
            if *kappa != 0 {
                return Err(Error::Config(
                    "only kappa = 0 (rooted, no backward tail) is generated".into(),
                ));
            }
            let mut root = vec!["s"; *eta];
            root.shrink_to_fit();
            grow_typed("r", &rules(&[("r", root), ("s", vec!["s"])]), depth)
        }
        TreeShape::QuasiBrownian { valency } => {
            let l = check_valency(*valency, 2)?;
            let mut b = vec!["b"];
            b.extend(std::iter::repeat_n("s", l - 1));
            grow_typed("b", &rules(&[("b", b), ("s", vec!["s"])]), depth)
        }
        TreeShape::CombFan { valency } => {
            let l = check_valency(*valency, 2)?;
            let mut r = vec!["s"];
            r.extend(std::iter::repeat_n("c", l - 1));
            grow_typed("r", &rules(&[("r", r), ("c", vec!["s", "c"]), ("s", vec!["s"])]), depth)
        }
        TreeShape::NestedCombFan { valency } => {
            let l = check_valency(*valency, 3)?;
            let mut r = vec!["p"];
            r.extend(std::iter::repeat_n("s", l - 1));
            let mut p = vec!["s"];
            p.extend(std::iter::repeat_n("c", l - 1));
            grow_typed(
                "r",
                &rules(&[("r", r), ("p", p), ("c", vec!["s", "c"]), ("s", vec!["s"])]),
                depth,
            )
        }
        TreeShape::Substitution { root, rules } => grow_typed(root, rules, depth),
        TreeShape::GenerationRule { degrees } => grow_by_generation(degrees, depth),
        TreeShape::Explicit { edges } => from_edges(edges, depth),
    }
}

fn check_valency(l: usize, min: usize) -> Result<usize> {
    if l < min {
        Err(Error::Config(format!("valency must be >= {min}, got {l}")))
    } else {
        Ok(l)
    }
}

fn generated_id(depth: usize, index: usize) -> String {
    format!("g{depth}:{index}")
}

fn grow_typed(root: &str, rules: &BTreeMap<String, Vec<String>>, depth: usize) -> Result<DirectedTree> {
    if !rules.contains_key(root) {
        return Err(Error::Config(format!("no substitution rule for root type `{root}`")));
    }
    for (t, kids) in rules {
        if let Some(k) = kids.iter().find(|k| !rules.contains_key(*k)) {
            return Err(Error::Config(format!("rule for `{t}` produces unknown type `{k}`")));
        }
    }
    let mut nodes = vec![Node {
        id: generated_id(0, 0),
        depth: 0,
        parent: None,
        children: Vec::new(),
    }];
    let mut types = vec![root.to_string()];
    let mut frontier = vec![Vertex(0)];
    for d in 1..=depth {
        let mut next = Vec::new();
        for &u in &frontier {
            for t in &rules[&types[u.0]] {
                let v = Vertex(nodes.len());
                nodes.push(Node {
                    id: generated_id(d, next.len()),
                    depth: d,
                    parent: Some(u),
                    children: Vec::new(),
                });
                types.push(t.clone());
                nodes[u.0].children.push(v);
                next.push(v);
            }
        }
        frontier = next;
    }
    Ok(DirectedTree::from_nodes(nodes, depth))
}

fn grow_by_generation(degrees: &[Vec<usize>], depth: usize) -> Result<DirectedTree> {
    let mut nodes = vec![Node {
        id: generated_id(0, 0),
        depth: 0,
        parent: None,
        children: Vec::new(),
    }];
    let mut frontier = vec![Vertex(0)];
    for d in 1..=depth {
        let rule = degrees.get(d - 1);
        if let Some(rule) = rule {
            if rule.len() != frontier.len() {
                return Err(Error::Config(format!(
                    "generation rule lists {} degrees for generation {} which has {} vertices",
                    rule.len(),
                    d - 1,
                    frontier.len()
                )));
            }
        }
        let mut next = Vec::new();
        for (i, &u) in frontier.iter().enumerate() {
            let deg = rule.map_or(1, |r| r[i]);
            for _ in 0..deg {
                let v = Vertex(nodes.len());
                nodes.push(Node {
                    id: generated_id(d, next.len()),
                    depth: d,
                    parent: Some(u),
                    children: Vec::new(),
                });
                nodes[u.0].children.push(v);
                next.push(v);
            }
        }
        frontier = next;
    }
    Ok(DirectedTree::from_nodes(nodes, depth))
}

fn from_edges(edges: &[(String, String)], depth: usize) -> Result<DirectedTree> {
    let mut order: Vec<&str> = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut parent: HashMap<&str, &str> = HashMap::new();
    let mut children: HashMap<&str, Vec<&str>> = HashMap::new();
    for (p, c) in edges {
        for name in [p.as_str(), c.as_str()] {
            if !seen.contains_key(name) {
                seen.insert(name, order.len());
                order.push(name);
            }
        }
        if let Some(prev) = parent.insert(c.as_str(), p.as_str()) {
            return Err(Error::Structure {
                vertex: c.clone(),
                reason: format!("two parents `{prev}` and `{p}`"),
            });
        }
        children.entry(p.as_str()).or_default().push(c.as_str());
    }
    if order.is_empty() {
        return Err(Error::Structure {
            vertex: String::new(),
            reason: "empty edge list".into(),
        });
    }
    let roots: Vec<&str> = order.iter().copied().filter(|v| !parent.contains_key(v)).collect();
    let root = match roots.as_slice() {
        [r] => *r,
        [] => {
            return Err(Error::Structure {
                vertex: order[0].to_string(),
                reason: "no root: the edge list contains a cycle".into(),
            })
        }
        [_, second, ..] => {
            return Err(Error::Structure {
                vertex: second.to_string(),
                reason: "disconnected: more than one vertex without a parent".into(),
            })
        }
    };

    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<&str, Vertex> = HashMap::new();
    let mut queue = VecDeque::from([(root, None::<Vertex>, 0usize)]);
    while let Some((name, par, d)) = queue.pop_front() {
        if d > depth {
            continue;
        }
        let v = Vertex(nodes.len());
        nodes.push(Node {
            id: name.to_string(),
            depth: d,
            parent: par,
            children: Vec::new(),
        });
        index.insert(name, v);
        if let Some(p) = par {
            nodes[p.0].children.push(v);
        }
        for &c in children.get(name).map(Vec::as_slice).unwrap_or(&[]) {
            queue.push_back((c, Some(v), d + 1));
        }
    }
    // every non-root vertex has a parent, so an unreached vertex sits on a cycle
    if let Some(bad) = order
        .iter()
        .find(|v| !index.contains_key(*v) && reaches_root(v, &parent, root).is_none())
    {
        return Err(Error::Structure {
            vertex: bad.to_string(),
            reason: "not reachable from the root (cycle)".into(),
        });
    }
    Ok(DirectedTree::from_nodes(nodes, depth))
}

/// Number of parent steps from `v` to `root`, or `None` if the ancestry loops.
fn reaches_root(v: &str, parent: &HashMap<&str, &str>, root: &str) -> Option<usize> {
    let mut cur = v;
    for steps in 0..=parent.len() {
        if cur == root {
            return Some(steps);
        }
        cur = parent.get(cur)?;
    }
    None
}

/// Degree statistics and the quasi-Brownian verdict of a materialized tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeReport {
    pub vertices: usize,
    pub materialized_depth: usize,
    /// Every vertex of depth `< N` has at least one child.
    pub leafless_to_depth: bool,
    pub locally_finite: bool,
    /// `degree -> count` for generations `0..N` (degrees of generation `N`
    /// are not materialized).
    pub degrees_per_generation: Vec<BTreeMap<usize, usize>>,
    pub quasi_brownian: QuasiBrownianVerdict,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiBrownianVerdict {
    pub holds: bool,
    pub valency: Option<usize>,
    pub verified_depth: Option<usize>,
    pub witness: Option<String>,
    pub reason: Option<String>,
}

/// Structural classification of a materialized tree.
///
/// The quasi-Brownian test uses the degree characterization for rooted
/// leafless trees with root degree `l >= 2`: every vertex has degree 1 or `l`,
/// and the children of every vertex `u` have degrees summing to
/// `2 deg u − 1`. Degrees are checked through depth `N − 1` and the sum rule
/// through depth `N − 2`.
pub fn classify_tree(tree: &DirectedTree) -> TreeReport {
    let n = tree.materialized_depth();
    let degrees_per_generation = (0..n)
        .map(|g| {
            let mut counts = BTreeMap::new();
            for &v in &tree.generations[g] {
                *counts.entry(tree.degree(v)).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    TreeReport {
        vertices: tree.len(),
        materialized_depth: n,
        leafless_to_depth: tree.is_leafless(),
        locally_finite: true,
        degrees_per_generation,
        quasi_brownian: quasi_brownian_verdict(tree),
        note: format!("verdicts describe the truncation to depth {n}; nothing is claimed about deeper generations"),
    }
}

fn quasi_brownian_verdict(tree: &DirectedTree) -> QuasiBrownianVerdict {
    let n = tree.materialized_depth();
    let fail = |witness: Vertex, reason: String, valency: Option<usize>| QuasiBrownianVerdict {
        holds: false,
        valency,
        verified_depth: n.checked_sub(2),
        witness: Some(tree.id(witness).to_string()),
        reason: Some(reason),
    };
    let root = tree.root();
    if n < 2 {
        return fail(root, format!("needs materialized depth >= 2, got {n}"), None);
    }
    let l = tree.degree(root);
    if l < 2 {
        return fail(root, format!("root degree {l} < 2; no branching vertex"), None);
    }
    if let Some(leaf) = tree.first_leaf() {
        return fail(leaf, "leaf inside the materialized depth".into(), Some(l));
    }
    for u in tree.vertices() {
        let du = tree.depth(u);
        if du >= n {
            break;
        }
        let deg = tree.degree(u);
        if deg != 1 && deg != l {
            return fail(u, format!("degree {deg} is neither 1 nor {l}"), Some(l));
        }
        if du + 2 <= n {
            let kids = tree.children(u);
            if let Some(&bad) = kids.iter().find(|&&c| tree.degree(c) != 1 && tree.degree(c) != l) {
                return fail(
                    u,
                    format!(
                        "child `{}` has degree {} (neither 1 nor {l})",
                        tree.id(bad),
                        tree.degree(bad)
                    ),
                    Some(l),
                );
            }
            let sum: usize = kids.iter().map(|&c| tree.degree(c)).sum();
            if sum != 2 * deg - 1 {
                return fail(
                    u,
                    format!("children degrees sum to {sum}, expected {}", 2 * deg - 1),
                    Some(l),
                );
            }
        }
    }
    QuasiBrownianVerdict {
        holds: true,
        valency: Some(l),
        verified_depth: Some(n - 2),
        witness: None,
        reason: None,
    }
}
