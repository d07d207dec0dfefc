//! Weighted shifts `S_λ` on rooted directed trees.
//!
//! `S_λ e_u = Σ_{v ∈ Chi(u)} λ_v e_v`, so `‖S e_u‖² = Σ_{v ∈ Chi(u)} λ_v²`.
//! Checks that need norms of children (2-isometry, kernel condition) are
//! verified for vertices of depth `<= N − 2`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{classify_tree, DirectedTree, Vertex};
use crate::xi::{xi, xi_unchecked};

/// Default relative tolerance for property checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct WeightedShift {
    tree: Arc<DirectedTree>,
    weights: Vec<f64>,
    name: Option<String>,
}

impl WeightedShift {
    /// `weights[i]` is the weight of `Vertex(i)`; the root entry is ignored
    /// and stored as 0.
    pub fn new(tree: Arc<DirectedTree>, mut weights: Vec<f64>, name: Option<String>) -> Result<Self> {
        if weights.len() != tree.len() {
            return Err(Error::Config(format!(
                "{} weights for a tree with {} vertices",
                weights.len(),
                tree.len()
            )));
        }
        for v in tree.vertices().skip(1) {
            let w = weights[v.index()];
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Config(format!(
                    "weight of `{}` must be finite and nonnegative, got {w}",
                    tree.id(v)
                )));
            }
        }
        weights[0] = 0.0;
        Ok(Self { tree, weights, name })
    }

    /// Builds a shift from `vertex id -> weight`; every non-root vertex needs
    /// an entry.
    pub fn from_map(tree: Arc<DirectedTree>, map: &BTreeMap<String, f64>, name: Option<String>) -> Result<Self> {
        let mut weights = vec![0.0; tree.len()];
        for v in tree.vertices().skip(1) {
            weights[v.index()] = *map
                .get(tree.id(v))
                .ok_or_else(|| Error::Config(format!("no weight given for vertex `{}`", tree.id(v))))?;
        }
        if let Some(unknown) = map.keys().find(|k| tree.find(k).is_none()) {
            return Err(Error::Config(format!("weight given for unknown vertex `{unknown}`")));
        }
        if map.contains_key(tree.id(tree.root())) {
            return Err(Error::Config("the root carries no weight".into()));
        }
        Self::new(tree, weights, name)
    }

    pub fn adjacency(tree: Arc<DirectedTree>) -> Self {
        let mut weights = vec![1.0; tree.len()];
        weights[0] = 0.0;
        Self {
            tree,
            weights,
            name: Some("adjacency".into()),
        }
    }

    pub fn tree(&self) -> &DirectedTree {
        &self.tree
    }

    pub fn tree_arc(&self) -> &Arc<DirectedTree> {
        &self.tree
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn weight(&self, v: Vertex) -> f64 {
        self.weights[v.index()]
    }

    /// Weights indexed by vertex; the root entry is 0.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn has_zero_weights(&self) -> bool {
        self.weights.iter().skip(1).any(|&w| w == 0.0)
    }

    pub(crate) fn norm_sq_unchecked(&self, u: Vertex) -> f64 {
        self.tree
            .children(u)
            .iter()
            .map(|&v| self.weights[v.index()].powi(2))
            .sum()
    }

    /// `‖S e_u‖²`; needs the children of `u` to be materialized.
    pub fn vertex_norm_sq(&self, u: Vertex) -> Result<f64> {
        if !self.tree.degree_known(u) {
            return Err(Error::Range(format!(
                "norm of `{}` needs depth {} but the tree is materialized to {}",
                self.tree.id(u),
                self.tree.depth(u) + 1,
                self.tree.materialized_depth()
            )));
        }
        Ok(self.norm_sq_unchecked(u))
    }

    pub fn vertex_norm(&self, u: Vertex) -> Result<f64> {
        self.vertex_norm_sq(u).map(f64::sqrt)
    }

    /// `sup_u ‖S e_u‖` over vertices whose children are materialized.
    pub fn operator_norm(&self) -> f64 {
        self.tree
            .vertices()
            .filter(|&u| self.tree.degree_known(u))
            .map(|u| self.norm_sq_unchecked(u))
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// Checks `Σ_{v ∈ Chi(u)} λ_v² (2 − ‖S e_v‖²) = 1` at every vertex of depth
    /// `<= N − 2`, with residual `|lhs − 1| / (1 + |lhs|)`.
    pub fn is_two_isometry(&self, tol: f64) -> Result<TwoIsometryVerdict> {
        let t = &*self.tree;
        let n = t.materialized_depth();
        if n < 2 {
            return Err(Error::Range(format!(
                "2-isometry check needs materialized depth >= 2, got {n}"
            )));
        }
        let mut witness = None;
        for u in t.vertices() {
            if t.depth(u) + 2 > n {
                break;
            }
            let lhs: f64 = t
                .children(u)
                .iter()
                .map(|&v| self.weight(v).powi(2) * (2.0 - self.norm_sq_unchecked(v)))
                .sum();
            let residual = (lhs - 1.0) / (1.0 + lhs.abs());
            if residual.abs() > tol {
                witness = Some(Witness {
                    vertex: t.id(u).to_string(),
                    residual,
                    detail: format!("Σ λ_v²(2 − ‖S e_v‖²) = {lhs}, expected 1"),
                });
                break;
            }
        }
        let min_vertex_norm = t
            .vertices()
            .filter(|&u| t.degree_known(u))
            .map(|u| self.norm_sq_unchecked(u))
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        let mut notes = Vec::new();
        if self.has_zero_weights() {
            notes.push(ZERO_WEIGHT_NOTE.to_string());
        }
        Ok(TwoIsometryVerdict {
            verdict: PropertyVerdict {
                holds: witness.is_none(),
                verified_depth: n - 2,
                witness,
                tolerance: tol,
                notes,
            },
            min_vertex_norm,
        })
    }

    /// Sibling-norm constancy: for every `v` with `k <= depth(v) <= N − 2`,
    /// `‖S e_u‖` is the same for all `u ∈ Chi(v)` with `λ_u ≠ 0`
    /// (`max − min <= tol·(1 + max)`). `k = 0` is the kernel condition,
    /// `k >= 1` its perturbed form.
    pub fn satisfies_kernel_condition(&self, k: usize, tol: f64) -> Result<PropertyVerdict> {
        let t = &*self.tree;
        let n = t.materialized_depth();
        if n < k + 2 {
            return Err(Error::Range(format!(
                "kernel condition from generation {k} needs materialized depth >= {}, got {n}",
                k + 2
            )));
        }
        let mut witness = None;
        for v in t.vertices() {
            let d = t.depth(v);
            if d + 2 > n {
                break;
            }
            if d < k {
                continue;
            }
            let norms: Vec<f64> = t
                .children(v)
                .iter()
                .filter(|&&u| self.weight(u) != 0.0)
                .map(|&u| self.norm_sq_unchecked(u).sqrt())
                .collect();
            let (lo, hi) = norms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
            if norms.len() > 1 && hi - lo > tol * (1.0 + hi) {
                witness = Some(Witness {
                    vertex: t.id(v).to_string(),
                    residual: (hi - lo) / (1.0 + hi),
                    detail: format!("children norms range over [{lo}, {hi}]"),
                });
                break;
            }
        }
        let mut notes = Vec::new();
        if self.has_zero_weights() {
            notes.push("children with zero weight are excluded from the constancy check".to_string());
        }
        Ok(PropertyVerdict {
            holds: witness.is_none(),
            verified_depth: n - 2,
            witness,
            tolerance: tol,
            notes,
        })
    }

    /// The Cauchy dual `S′ = S(S*S)⁻¹`, again a weighted shift on the same
    /// tree with `λ′_v = λ_v / ‖S e_par(v)‖²`.
    pub fn cauchy_dual(&self) -> Result<WeightedShift> {
        let t = &*self.tree;
        let mut norms = vec![0.0; t.len()];
        for u in t.vertices().filter(|&u| t.degree_known(u)) {
            let sq = self.norm_sq_unchecked(u);
            if sq == 0.0 {
                return Err(Error::NotLeftInvertible {
                    vertex: t.id(u).to_string(),
                    norm: 0.0,
                });
            }
            norms[u.index()] = sq;
        }
        let mut weights = vec![0.0; t.len()];
        for v in t.vertices().skip(1) {
            let p = t.parent(v).expect("non-root vertex has a parent");
            weights[v.index()] = self.weight(v) / norms[p.index()];
        }
        Ok(WeightedShift {
            tree: Arc::clone(&self.tree),
            weights,
            name: self.name.as_ref().map(|n| format!("{n}′")),
        })
    }
}

pub(crate) const ZERO_WEIGHT_NOTE: &str =
    "zero weights present: children with zero weight contribute nothing and the verdict at the truncation boundary is not tested for this case";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub vertex: String,
    pub residual: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyVerdict {
    pub holds: bool,
    pub verified_depth: usize,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoIsometryVerdict {
    #[serde(flatten)]
    pub verdict: PropertyVerdict,
    /// `min ‖S e_u‖` over vertices whose children are materialized.
    pub min_vertex_norm: f64,
}

impl TwoIsometryVerdict {
    pub fn holds(&self) -> bool {
        self.verdict.holds
    }
}

/// How a kernel-condition shift distributes `ξ_n(x)²` among children.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Split {
    /// Each child of `u` gets `ξ_n(x)² / deg u`.
    #[default]
    Equal,
    /// `vertex id -> shares` for the children of that vertex (normalized to
    /// sum 1); vertices not listed split equally.
    Proportions(BTreeMap<String, Vec<f64>>),
}

/// Weight families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// `vertex id -> λ_v` for every non-root vertex.
    Explicit { weights: BTreeMap<String, f64> },
    /// All weights 1.
    Adjacency {},
    /// `Σ_{w ∈ Chi(u)} λ_w² = ξ_n(x)²` for `u` in generation `n`.
    KernelCondition {
        x: f64,
        #[serde(default)]
        split: Split,
    },
    /// Two-branch counterexample on `𝒯_{2,0}`: the first edge of branch `i`
    /// has weight `1/√(2(2 − y_i²))`, later edges follow the scalar 2-isometric
    /// shift with first weight `y_i`.
    Glowny { y1: f64, y2: f64 },
    /// Path with weights `ξ_n(√2)`, i.e. `√((n+2)/(n+1))`.
    Dirichlet {},
    /// Path with weights `√((n+1)/(n+2))`.
    BergmanDual {},
    /// Path with weights `√(φ(n+1)/φ(n))`, `φ(n) = n² + 1`.
    Treiso {},
}

impl WeightSpec {
    pub fn kernel_condition(x: f64) -> Self {
        Self::KernelCondition { x, split: Split::Equal }
    }

    pub fn glowny(y1: f64, y2: f64) -> Self {
        Self::Glowny { y1, y2 }
    }

    /// Checks scalar parameters; returns the offending field name with the
    /// error so callers can report a JSON path.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, Error)> {
        match self {
            WeightSpec::KernelCondition { x, split } => {
                if !x.is_finite() || *x < 1.0 {
                    return Err(("x", Error::Domain(format!("x must be >= 1, got {x}"))));
                }
                if let Split::Proportions(map) = split {
                    for (id, shares) in map {
                        if shares.iter().any(|s| !s.is_finite() || *s < 0.0) || shares.iter().sum::<f64>() <= 0.0 {
                            return Err((
                                "split",
                                Error::Domain(format!("shares for `{id}` must be nonnegative with positive sum")),
                            ));
                        }
                    }
                }
                Ok(())
            }
            WeightSpec::Glowny { y1, y2 } => {
                let ok = |y: f64| y > 1.0 && y < std::f64::consts::SQRT_2;
                if !ok(*y1) {
                    return Err(("y1", Error::Domain(format!("y1 must lie in (1, √2), got {y1}"))));
                }
                if !ok(*y2) {
                    return Err(("y2", Error::Domain(format!("y2 must lie in (1, √2), got {y2}"))));
                }
                if y1 == y2 {
                    return Err(("y2", Error::Domain("y1 and y2 must differ".into())));
                }
                Ok(())
            }
            WeightSpec::Explicit { weights } => match weights.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
                Some(_) => Err((
                    "weights",
                    Error::Domain("weights must be finite and nonnegative".into()),
                )),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            WeightSpec::Explicit { .. } => "explicit",
            WeightSpec::Adjacency {} => "adjacency",
            WeightSpec::KernelCondition { .. } => "kernel_condition",
            WeightSpec::Glowny { .. } => "glowny",
            WeightSpec::Dirichlet {} => "dirichlet",
            WeightSpec::BergmanDual {} => "bergman_dual",
            WeightSpec::Treiso {} => "treiso",
        }
    }
}

/// Builds the shift described by `spec` on `tree`.
pub fn build_shift(spec: &WeightSpec, tree: impl Into<Arc<DirectedTree>>) -> Result<WeightedShift> {
    let tree: Arc<DirectedTree> = tree.into();
    spec.validate().map_err(|(_, e)| e)?;
    let name = Some(spec.label().to_string());
    let t = &*tree;
    let on_path = |f: &dyn Fn(usize) -> f64| -> Result<Vec<f64>> {
        if !t.is_path() || t.materialized_depth() == 0 {
            return Err(Error::Config(format!(
                "`{}` weights require a path tree of depth >= 1",
                spec.label()
            )));
        }
        Ok(t.vertices()
            .map(|v| if v.index() == 0 { 0.0 } else { f(t.depth(v)) })
            .collect())
    };
    match spec {
        WeightSpec::Explicit { weights } => WeightedShift::from_map(tree, weights, name),
        WeightSpec::Adjacency {} => Ok(WeightedShift::adjacency(tree)),
        WeightSpec::Dirichlet {} => {
            let w = on_path(&|d| xi_unchecked(d - 1, std::f64::consts::SQRT_2))?;
            WeightedShift::new(tree, w, name)
        }
        WeightSpec::BergmanDual {} => {
            let w = on_path(&|d| (d as f64 / (d as f64 + 1.0)).sqrt())?;
            WeightedShift::new(tree, w, name)
        }
        WeightSpec::Treiso {} => {
            let phi = |n: usize| (n * n + 1) as f64;
            let w = on_path(&|d| (phi(d) / phi(d - 1)).sqrt())?;
            WeightedShift::new(tree, w, name)
        }
        WeightSpec::KernelCondition { x, split } => {
            let mut w = vec![0.0; t.len()];
            for u in t.vertices().filter(|&u| t.degree_known(u)) {
                let kids = t.children(u);
                if kids.is_empty() {
                    continue;
                }
                let target = xi(t.depth(u), *x)?.powi(2);
                let shares = match split {
                    Split::Proportions(map) => map.get(t.id(u)).cloned(),
                    Split::Equal => None,
                };
                let shares = match shares {
                    Some(s) if s.len() != kids.len() => {
                        return Err(Error::Config(format!(
                            "{} shares given for `{}` which has {} children",
                            s.len(),
                            t.id(u),
                            kids.len()
                        )))
                    }
                    Some(s) => s,
                    None => vec![1.0; kids.len()],
                };
                let total: f64 = shares.iter().sum();
                for (&v, s) in kids.iter().zip(&shares) {
                    w[v.index()] = (target * s / total).sqrt();
                }
            }
            WeightedShift::new(tree, w, name)
        }
        WeightSpec::Glowny { y1, y2 } => {
            if !t.is_two_branch() {
                return Err(Error::Config(
                    "`glowny` weights require the tree 𝒯_{2,0} (root of degree 2, then paths)".into(),
                ));
            }
            let mut w = vec![0.0; t.len()];
            for (&b, y) in t.children(t.root()).iter().zip([*y1, *y2]) {
                w[b.index()] = 1.0 / (2.0 * (2.0 - y * y)).sqrt();
                let mut v = b;
                let mut j = 0;
                while let Some(&c) = t.children(v).first() {
                    w[c.index()] = xi_unchecked(j, y);
                    v = c;
                    j += 1;
                }
            }
            WeightedShift::new(tree, w, name)
        }
    }
}

/// Operator classes of the adjacency operator (all weights 1) of a tree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdjacencyReport {
    pub isometry: PropertyVerdict,
    pub two_isometry: PropertyVerdict,
    pub kernel_condition: PropertyVerdict,
    pub quasi_brownian_isometry: PropertyVerdict,
    pub brownian_isometry: PropertyVerdict,
    pub notes: Vec<String>,
}

/// Classifies the adjacency operator of `tree` from vertex degrees.
///
/// Isometry: all degrees 1. 2-isometry: children degrees sum to
/// `2 deg u − 1`. Kernel condition: siblings have equal degrees.
/// Quasi-Brownian isometry: a 2-isometry on a path or a quasi-Brownian tree.
/// Brownian isometry: a 2-isometry with `Δ_T Δ_{T*} Δ_T = 0`, which for
/// adjacency operators means the root has degree 1 and no two siblings both
/// branch.
pub fn classify_adjacency(tree: &DirectedTree, tol: f64) -> Result<AdjacencyReport> {
    let n = tree.materialized_depth();
    if n < 2 {
        return Err(Error::Range(format!(
            "adjacency classification needs materialized depth >= 2, got {n}"
        )));
    }
    if let Some(leaf) = tree.first_leaf() {
        return Err(Error::Structure {
            vertex: tree.id(leaf).to_string(),
            reason: "adjacency classification needs a leafless tree".into(),
        });
    }
    let verified: Vec<Vertex> = tree.vertices().take_while(|&u| tree.depth(u) + 2 <= n).collect();
    let verdict = |witness: Option<Witness>| PropertyVerdict {
        holds: witness.is_none(),
        verified_depth: n - 2,
        witness,
        tolerance: tol,
        notes: Vec::new(),
    };
    let deg = |v: Vertex| tree.degree(v) as f64;
    let wit = |u: Vertex, residual: f64, detail: String| Witness {
        vertex: tree.id(u).to_string(),
        residual,
        detail,
    };

    let isometry = verdict(
        verified
            .iter()
            .find(|&&u| tree.degree(u) != 1)
            .map(|&u| wit(u, deg(u) - 1.0, format!("degree {}", tree.degree(u)))),
    );

    let two_isometry = verdict(verified.iter().find_map(|&u| {
        let sum: f64 = tree.children(u).iter().map(|&v| deg(v)).sum();
        let expect = 2.0 * deg(u) - 1.0;
        let residual = (sum - expect) / (1.0 + sum.abs());
        (residual.abs() > tol).then(|| wit(u, residual, format!("children degrees sum to {sum}, expected {expect}")))
    }));

    let kernel_condition = verdict(verified.iter().find_map(|&u| {
        let kids = tree.children(u);
        let lo = kids.iter().map(|&v| tree.degree(v)).min().unwrap_or(0);
        let hi = kids.iter().map(|&v| tree.degree(v)).max().unwrap_or(0);
        (hi > lo).then(|| {
            let (lo, hi) = ((lo as f64).sqrt(), (hi as f64).sqrt());
            wit(
                u,
                (hi - lo) / (1.0 + hi),
                format!("sibling norms range over [{lo}, {hi}]"),
            )
        })
    }));

    let quasi_brownian_isometry = if !two_isometry.holds {
        verdict(two_isometry.witness.clone())
    } else if isometry.holds {
        verdict(None)
    } else {
        let q = classify_tree(tree).quasi_brownian;
        verdict(if q.holds {
            None
        } else {
            let v = q.witness.as_deref().and_then(|id| tree.find(id)).unwrap_or(tree.root());
            Some(wit(v, 1.0, q.reason.unwrap_or_default()))
        })
    };

    let brownian_isometry = if !two_isometry.holds {
        verdict(two_isometry.witness.clone())
    } else {
        let root = tree.root();
        let root_term = (deg(root) - 1.0).powi(2);
        if root_term > tol {
            verdict(Some(wit(
                root,
                root_term,
                "Δ_T Δ_{T*} Δ_T has diagonal entry −(deg ω − 1)² at the root".into(),
            )))
        } else {
            verdict(verified.iter().find_map(|&u| {
                let branching: Vec<Vertex> = tree
                    .children(u)
                    .iter()
                    .copied()
                    .filter(|&v| tree.degree(v) > 1)
                    .collect();
                (branching.len() >= 2).then(|| {
                    let p = (deg(branching[0]) - 1.0) * (deg(branching[1]) - 1.0);
                    wit(
                        u,
                        p,
                        "two branching siblings give a nonzero entry of Δ_T Δ_{T*} Δ_T".into(),
                    )
                })
            }))
        }
    };

    Ok(AdjacencyReport {
        isometry,
        two_isometry,
        kernel_condition,
        quasi_brownian_isometry,
        brownian_isometry,
        notes: vec![format!(
            "degrees verified for vertices of depth <= {}; the tail beyond depth {n} is not examined",
            n - 2
        )],
    })
}

/// Root norm and generation branching degrees of a 2-isometric shift with
/// the kernel condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftInvariants {
    pub root_norm: f64,
    /// `𝔧_1, …, 𝔧_N`.
    pub branching: Vec<usize>,
    /// Always true: the sequence stops at the materialized depth.
    pub truncated: bool,
    pub depth: usize,
}

/// Invariants that classify 2-isometric kernel-condition shifts up to unitary
/// equivalence.
pub fn shift_invariants(s: &WeightedShift, tol: f64) -> Result<ShiftInvariants> {
    let two = s.is_two_isometry(tol)?;
    if !two.holds() {
        return Err(Error::Classification(format!(
            "not a 2-isometry (witness `{}`); the invariants are complete only for 2-isometries with the kernel condition",
            two.verdict.witness.map(|w| w.vertex).unwrap_or_default()
        )));
    }
    let kc = s.satisfies_kernel_condition(0, tol)?;
    if !kc.holds {
        return Err(Error::Classification(format!(
            "kernel condition fails (witness `{}`); the invariants are complete only inside that class",
            kc.witness.map(|w| w.vertex).unwrap_or_default()
        )));
    }
    let t = s.tree();
    let branching = (1..=t.materialized_depth())
        .map(|k| t.branching_degree(k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShiftInvariants {
        root_norm: s.vertex_norm(t.root())?,
        branching,
        truncated: true,
        depth: t.materialized_depth(),
    })
}

fn same_norm(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// Unitary equivalence of two shifts from their invariants: equal root norms
/// `> 1` with equal branching sequences, or both isometric with equal total
/// branching.
pub fn are_unitarily_equivalent(a: &ShiftInvariants, b: &ShiftInvariants) -> Result<bool> {
    if a.depth != b.depth {
        return Err(Error::Comparison(format!(
            "invariants computed to different depths ({} vs {})",
            a.depth, b.depth
        )));
    }
    let a_iso = same_norm(a.root_norm, 1.0);
    let b_iso = same_norm(b.root_norm, 1.0);
    Ok(match (a_iso, b_iso) {
        (true, true) => a.branching.iter().sum::<usize>() == b.branching.iter().sum::<usize>(),
        (false, false) => same_norm(a.root_norm, b.root_norm) && a.branching == b.branching,
        _ => false,
    })
}

/// Equality of two orthogonal sums of unilateral weighted shifts as
/// multisets, each summand given by a weight-sequence prefix. Prefixes are
/// sorted and compared exactly.
pub fn multiset_equivalent(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<bool> {
    let len = a.first().or(b.first()).map_or(0, Vec::len);
    if a.iter().chain(b).any(|w| w.len() != len) {
        return Err(Error::Comparison("weight prefixes of different lengths".into()));
    }
    let sorted = |s: &[Vec<f64>]| {
        let mut s = s.to_vec();
        s.sort_by(|x, y| {
            x.iter()
                .zip(y)
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        });
        s
    };
    Ok(a.len() == b.len() && sorted(a) == sorted(b))
}
