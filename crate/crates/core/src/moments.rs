//! Moment sequences `d_S(u, n) = ‖Sⁿ e_u‖²`, the closed forms of the
//! affirmative cases, and finite-prefix Stieltjes and Hausdorff tests.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, MuAB};
use crate::shift::WeightedShift;
use crate::tree::Vertex;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSequence {
    pub values: Vec<f64>,
    pub source: String,
}

impl MomentSequence {
    pub fn new(values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("a moment sequence needs γ_0".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("γ_{i} is not finite")));
        }
        Ok(Self {
            values,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `γ_{n+1}, γ_{n+2}, …` as a new sequence.
    pub fn shifted(&self) -> Result<Self> {
        Self::new(self.values[1..].to_vec(), format!("{} shifted by one", self.source))
    }

    /// CSV text with header `n,value`.
    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        self.write_rows(&mut w).expect("writing to memory");
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        self.write_rows(&mut w).map_err(io)?;
        w.flush().map_err(|e| io(e.into()))
    }

    fn write_rows<W: std::io::Write>(&self, w: &mut csv::Writer<W>) -> csv::Result<()> {
        w.write_record(["n", "value"])?;
        for (n, v) in self.values.iter().enumerate() {
            w.write_record([n.to_string(), v.to_string()])?;
        }
        Ok(())
    }
}

/// `d(u, 0), …, d(u, len − 1)` by the children-sum recurrence.
fn d_vector(s: &WeightedShift, u: Vertex, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    if len == 0 {
        return out;
    }
    out[0] = 1.0;
    if len == 1 {
        return out;
    }
    for &v in s.tree().children(u) {
        let w2 = s.weight(v).powi(2);
        if w2 == 0.0 {
            continue;
        }
        let child = d_vector(s, v, len - 1);
        for (n, c) in child.iter().enumerate() {
            out[n + 1] += w2 * c;
        }
    }
    out
}

/// `d_S(u, n)` (or `d_{S′}(u, n)` when `dual`) for `n = 0..=nmax`, from
/// `d(u, 0) = 1`, `d(u, n+1) = Σ_{v ∈ Chi(u)} λ_v² d(v, n)`.
///
/// Needs `depth(u) + nmax <= N`. Dual weights are exact on the whole
/// materialized tree, so the dual case has the same range.
pub fn d_sequence(s: &WeightedShift, u: Vertex, nmax: usize, dual: bool) -> Result<MomentSequence> {
    let t = s.tree();
    let need = t.depth(u) + nmax;
    if need > t.materialized_depth() {
        return Err(Error::Range(format!(
            "d(`{}`, n) for n <= {nmax} needs materialized depth {need}, have {}",
            t.id(u),
            t.materialized_depth()
        )));
    }
    let name = s.name().unwrap_or("S");
    if dual {
        let d = s.cauchy_dual()?;
        MomentSequence::new(
            d_vector(&d, u, nmax + 1),
            format!("‖S′ⁿ e_u‖² of {name} at `{}`", t.id(u)),
        )
    } else {
        MomentSequence::new(
            d_vector(s, u, nmax + 1),
            format!("‖Sⁿ e_u‖² of {name} at `{}`", t.id(u)),
        )
    }
}

/// Rows of the table of affirmative cases, `T′*ⁿT′ⁿ = r_n(T*T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table1Row {
    /// 2-isometries with the kernel condition: `1/(1 + n(t − 1))`.
    Kernel,
    /// Quasi-Brownian isometries: `(1 + t^{1−2n})/(1 + t)`.
    QuasiBrownian,
    /// Adjacency operators with degrees in `{1, 2, l}`:
    /// `(t + 2 + 2(t − 1)4^{1−n})/(3t²)` for `n >= 1`.
    AdjacencyPattern,
}

impl Table1Row {
    /// `r_n(t)` without domain checks. The adjacency row, read as a function
    /// of `t`, gives 1 at `t = 1` and the degree-2 value at `t = 2`, so it
    /// applies to the whole spectrum of `T*T`.
    pub fn r(self, t: f64, n: usize) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let nf = n as f64;
        match self {
            Table1Row::Kernel => 1.0 / (1.0 + nf * (t - 1.0)),
            Table1Row::QuasiBrownian => (1.0 + t.powf(1.0 - 2.0 * nf)) / (1.0 + t),
            Table1Row::AdjacencyPattern => (t + 2.0 + 2.0 * (t - 1.0) * 4f64.powf(1.0 - nf)) / (3.0 * t * t),
        }
    }
}

/// `r_n(t)` for one row, with the row's domain enforced.
pub fn closed_form_table1(row: Table1Row, t: f64, n: usize) -> Result<f64> {
    if !t.is_finite() || t < 1.0 {
        return Err(Error::Domain(format!("t must be >= 1, got {t}")));
    }
    if row == Table1Row::AdjacencyPattern && (t < 2.0 || t.fract() != 0.0) {
        return Err(Error::Domain(format!(
            "the adjacency row needs an integer valency t >= 2, got {t}"
        )));
    }
    Ok(row.r(t, n))
}

/// `d_{S′}(u, n)` from the explicit formula for 2-isometries whose sibling
/// norms agree from generation 1 on. With `α_v` the common norm of the
/// children of `v`:
///
/// ```text
/// root:  (1/‖S e_ω‖⁴) Σ_{v ∈ Chi(ω)} λ_v² / ((n−1)‖S e_v‖² − (n−2))
/// other: ‖S e_v‖⁻² / ((n−1)α_v² − (n−2))
/// ```
pub fn dgraph_closed_form(s: &WeightedShift, u: Vertex, n: usize, tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("the explicit formula covers n >= 1".into()));
    }
    let two = s.is_two_isometry(tol)?;
    if !two.holds() {
        return Err(Error::Classification("the explicit formula needs a 2-isometry".into()));
    }
    let hypo = s.satisfies_kernel_condition(1, tol)?;
    if !hypo.holds {
        return Err(Error::Classification(
            "the explicit formula needs equal sibling norms from generation 1 on".into(),
        ));
    }
    let t = s.tree();
    let nf = n as f64;
    let denom = |a2: f64| (nf - 1.0) * a2 - (nf - 2.0);
    if u == t.root() {
        let r2 = s.vertex_norm_sq(u)?;
        let mut sum = 0.0;
        for &v in t.children(u) {
            sum += s.weight(v).powi(2) / denom(s.vertex_norm_sq(v)?);
        }
        Ok(sum / (r2 * r2))
    } else {
        let norm2 = s.vertex_norm_sq(u)?;
        let child = t
            .children(u)
            .iter()
            .copied()
            .find(|&c| s.weight(c) != 0.0)
            .ok_or_else(|| Error::NotLeftInvertible {
                vertex: t.id(u).to_string(),
                norm: 0.0,
            })?;
        let alpha2 = s.vertex_norm_sq(child)?;
        Ok(1.0 / (norm2 * denom(alpha2)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    Stieltjes,
    Hausdorff,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentVerdict {
    pub kind: MomentKind,
    pub holds: bool,
    /// Smallest failing Hankel size (Stieltjes) or difference order
    /// (Hausdorff).
    pub failing_order: Option<usize>,
    /// Smallest Hankel eigenvalue (Stieltjes) or most negative scaled
    /// difference (Hausdorff) over everything tested.
    pub worst_value: f64,
    /// Largest order the prefix supports.
    pub orders_tested: usize,
    pub tolerance: f64,
    pub certificate: Option<DiscreteMeasure>,
    pub detail: String,
}

fn min_eigenvalue(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.min()
}

/// Finite-prefix Stieltjes test: the Hankel matrices `[γ_{i+j}]` and
/// `[γ_{i+j+1}]` must be positive semidefinite at every size the prefix
/// supports. A matrix passes when its smallest eigenvalue is at least
/// `−tol·(1 + max|entry|)`.
pub fn stieltjes_test(g: &MomentSequence, tol: f64) -> MomentVerdict {
    let v = &g.values;
    let n = v.len() - 1;
    let mut worst = f64::INFINITY;
    let mut failure: Option<(usize, String)> = None;
    let max_order = n / 2 + 1;
    for m in 1..=max_order {
        for (shift, label) in [(0usize, "[γ_{i+j}]"), (1, "[γ_{i+j+1}]")] {
            if 2 * (m - 1) + shift > n {
                continue;
            }
            let h = DMatrix::from_fn(m, m, |i, j| v[i + j + shift]);
            let scale = 1.0 + h.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
            let e = min_eigenvalue(h);
            worst = worst.min(e);
            if failure.is_none() && e < -tol * scale {
                failure = Some((m, format!("{label} of size {m} has eigenvalue {e:e}")));
            }
        }
        if failure.is_some() {
            break;
        }
    }
    let holds = failure.is_none();
    MomentVerdict {
        kind: MomentKind::Stieltjes,
        holds,
        failing_order: failure.as_ref().map(|f| f.0),
        worst_value: worst,
        orders_tested: max_order,
        tolerance: tol,
        certificate: None,
        detail: failure.map(|f| f.1).unwrap_or_else(|| {
            format!("Hankel matrices positive semidefinite up to size {max_order}; consistent to order {n}")
        }),
    }
}

/// Finite-prefix Hausdorff test: `(−1)^k Δ^k γ_n >= −tol` for all
/// `k + n <= N`, each difference scaled by `1 + Σ_j C(k,j)|γ_{n+j}|`.
pub fn hausdorff_test(g: &MomentSequence, tol: f64) -> MomentVerdict {
    let v = &g.values;
    let n_max = v.len() - 1;
    let mut worst = f64::INFINITY;
    let mut failure: Option<(usize, String)> = None;
    for k in 0..=n_max {
        let binom = binomial_row(k);
        for n in 0..=(n_max - k) {
            let (mut diff, mut mag) = (0.0, 1.0);
            for (j, c) in binom.iter().enumerate() {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                diff += sign * c * v[n + j];
                mag += c * v[n + j].abs();
            }
            let scaled = diff / mag;
            worst = worst.min(scaled);
            if failure.is_none() && scaled < -tol {
                failure = Some((k, format!("(−1)^{k} Δ^{k} γ_{n} = {diff:e}")));
            }
        }
    }
    MomentVerdict {
        kind: MomentKind::Hausdorff,
        holds: failure.is_none(),
        failing_order: failure.as_ref().map(|f| f.0),
        worst_value: worst,
        orders_tested: n_max,
        tolerance: tol,
        certificate: None,
        detail: failure
            .map(|f| f.1)
            .unwrap_or_else(|| format!("completely monotone through order {n_max}")),
    }
}

fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0; k + 1];
    for j in 1..k {
        row[j] = row[j - 1] * (k - j + 1) as f64 / j as f64;
    }
    row
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuAbMoments {
    pub sequence: MomentSequence,
    /// Representing measure, present exactly when `a > 0` and `b >= 0`.
    pub measure: Option<MuAB>,
    pub description: String,
}

/// `γ(n) = 1/(a + bn)` for `n <= nmax` with its representing measure, or a
/// "not a Hamburger moment sequence" description when `a <= 0` or `b < 0`.
pub fn mu_ab_moments(a: f64, b: f64, nmax: usize) -> Result<MuAbMoments> {
    let values: Vec<f64> = (0..=nmax).map(|n| a + b * n as f64).collect();
    if let Some(n) = values.iter().position(|&d| d == 0.0) {
        return Err(Error::Domain(format!("a + bn vanishes at n = {n}")));
    }
    let sequence = MomentSequence::new(values.iter().map(|d| 1.0 / d).collect(), format!("1/({a} + {b}n)"))?;
    Ok(match MuAB::new(a, b) {
        Ok(mu) => MuAbMoments {
            sequence,
            description: mu.describe(),
            measure: Some(mu),
        },
        Err(_) => MuAbMoments {
            sequence,
            measure: None,
            description: "not a Hamburger moment sequence (needs a > 0 and b >= 0)".into(),
        },
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::shift::{build_shift, WeightSpec, DEFAULT_TOL};
    use crate::tree::TreeSpec;

    fn seq(f: impl Fn(usize) -> f64, nmax: usize) -> MomentSequence {
        MomentSequence::new((0..=nmax).map(f).collect(), "test").unwrap()
    }

    #[test]
    fn d_sequence_range_and_start() {
        let t = Arc::new(TreeSpec::path(5).materialize().unwrap());
        let s = build_shift(&WeightSpec::Dirichlet {}, t).unwrap();
        let root = s.tree().root();
        assert_eq!(d_sequence(&s, root, 5, false).unwrap().values[0], 1.0);
        let err = d_sequence(&s, s.tree().by_path(&[0]).unwrap(), 5, true).unwrap_err();
        assert!(matches!(err, Error::Range(ref m) if m.contains("depth 6")));
        let d = d_sequence(&s, root, 5, true).unwrap();
        for n in 0..=5 {
            assert!((d.values[n] - 1.0 / (n as f64 + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn table1_values() {
        assert_eq!(closed_form_table1(Table1Row::Kernel, 2.0, 3).unwrap(), 0.25);
        for n in 0..10 {
            assert_eq!(closed_form_table1(Table1Row::QuasiBrownian, 1.0, n).unwrap(), 1.0);
        }
        let a = closed_form_table1(Table1Row::AdjacencyPattern, 2.0, 2).unwrap();
        let q = closed_form_table1(Table1Row::QuasiBrownian, 2.0, 2).unwrap();
        assert!((a - 0.375).abs() < 1e-15 && (q - 0.375).abs() < 1e-15);
        assert!(closed_form_table1(Table1Row::AdjacencyPattern, 2.5, 1).is_err());
        assert!(closed_form_table1(Table1Row::Kernel, 0.5, 1).is_err());
        assert_eq!(Table1Row::AdjacencyPattern.r(1.0, 7), 1.0);
    }

    #[test]
    fn stieltjes_examples() {
        assert!(stieltjes_test(&seq(|n| 1.0 / (n as f64 + 1.0), 12), DEFAULT_TOL).holds);
        assert!(stieltjes_test(&seq(|_| 0.7, 12), DEFAULT_TOL).holds);
        let bad = stieltjes_test(&seq(|n| [1.0, 1.0, 0.5][n], 2), DEFAULT_TOL);
        assert_eq!(bad.failing_order, Some(2));
    }

    #[test]
    fn hausdorff_examples() {
        assert!(hausdorff_test(&seq(|n| 1.0 / (1.0 + n as f64), 12), DEFAULT_TOL).holds);
        let pow = hausdorff_test(&seq(|n| 2f64.powi(n as i32), 8), DEFAULT_TOL);
        assert_eq!(pow.failing_order, Some(1));
        let mix = seq(|n| (1.0 + 2f64.powi(1 - 2 * n as i32)) / 3.0, 12);
        assert!(hausdorff_test(&mix, DEFAULT_TOL).holds);
    }

    #[test]
    fn mu_ab_cases() {
        let one = mu_ab_moments(1.0, 0.0, 5).unwrap();
        assert!(one.sequence.values.iter().all(|&v| v == 1.0));
        assert!(one.measure.is_some());
        let bad = mu_ab_moments(-0.5, 1.0, 5).unwrap();
        assert!(bad.measure.is_none());
        assert!(mu_ab_moments(-2.0, 1.0, 5).is_err());
    }

    #[test]
    fn csv_export() {
        let s = seq(|n| n as f64, 3);
        let text = s.to_csv_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,value");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn dgraph_on_glowny() {
        let t = Arc::new(TreeSpec::t_eta_0(2, 14).materialize().unwrap());
        let s = build_shift(&WeightSpec::glowny(1.1, 1.3), t).unwrap();
        let tree = s.tree();
        for u in [tree.root(), tree.by_path(&[0]).unwrap(), tree.by_path(&[1, 0]).unwrap()] {
            let d = d_sequence(&s, u, 10, true).unwrap();
            for n in 1..=10 {
                let c = dgraph_closed_form(&s, u, n, DEFAULT_TOL).unwrap();
                assert!((c - d.values[n]).abs() < 1e-12, "n={n}");
            }
        }
        let adj = crate::shift::WeightedShift::adjacency(Arc::new(TreeSpec::t_eta_0(2, 5).materialize().unwrap()));
        assert!(matches!(
            dgraph_closed_form(&adj, adj.tree().root(), 2, DEFAULT_TOL),
            Err(Error::Classification(_))
        ));
    }
}
