//! Dense-matrix truncations used to cross-check the symbolic layer.
//!
//! Basis vectors carry a depth. A shift maps depth `d` into depth `d + 1`, so
//! with every vector of depth `<= N` present the columns of `T` are exact for
//! depth `<= N − 1` (the interior depth), columns of `Tⁿ` for depth `<= N − n`,
//! and `T*ⁿTⁿ` is exact on the block of depth `<= N − n`. Every identity is
//! checked on such a block only.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::Table1Row;
use crate::shift::{classify_adjacency, WeightedShift};
use crate::xi::{scalar_shift_weights, xi_unchecked};

#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub matrix: DMatrix<f64>,
    pub basis: Vec<String>,
    pub depths: Vec<usize>,
    pub materialized_depth: usize,
    /// Columns of basis vectors with depth `<= interior_depth` are exact.
    pub interior_depth: usize,
}

impl TruncatedOperator {
    /// Wraps a block model. Columns of depth `< materialized_depth` must be
    /// exact and the operator must raise depth by at most one.
    pub fn from_parts(
        matrix: DMatrix<f64>,
        basis: Vec<String>,
        depths: Vec<usize>,
        materialized_depth: usize,
    ) -> Result<Self> {
        let n = basis.len();
        if matrix.nrows() != n || matrix.ncols() != n || depths.len() != n {
            return Err(Error::Config(format!(
                "matrix {}×{} does not fit a basis of {n} vectors with {} depths",
                matrix.nrows(),
                matrix.ncols(),
                depths.len()
            )));
        }
        if materialized_depth == 0 {
            return Err(Error::Range("a truncation needs materialized depth >= 1".into()));
        }
        Ok(Self {
            matrix,
            basis,
            depths,
            materialized_depth,
            interior_depth: materialized_depth - 1,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == id)
    }

    /// Indices of basis vectors with depth `<= max_depth`.
    pub fn block(&self, max_depth: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.depths[i] <= max_depth).collect()
    }

    fn interior(&self) -> Vec<usize> {
        self.block(self.interior_depth)
    }

    pub fn gram(&self) -> DMatrix<f64> {
        self.matrix.transpose() * &self.matrix
    }

    /// `T*ᵏTᵏ` for `k = 0..=m`.
    fn gram_powers(&self, m: usize) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(m + 1);
        let mut p = DMatrix::<f64>::identity(n, n);
        out.push(p.clone());
        for _ in 0..m {
            p = &self.matrix * p;
            out.push(p.transpose() * &p);
        }
        out
    }

    /// `B_m(T) = Σ_k (−1)^k C(m,k) T*ᵏTᵏ`. Meaningful on the block of depth
    /// `<= interior_depth − m`.
    pub fn defect(&self, m: usize) -> Result<DMatrix<f64>> {
        if m == 0 || m > self.interior_depth {
            return Err(Error::Range(format!(
                "B_{m} needs 1 <= m <= interior depth {}",
                self.interior_depth
            )));
        }
        let n = self.dim();
        let mut b = DMatrix::<f64>::zeros(n, n);
        let mut c = 1.0;
        for (k, g) in self.gram_powers(m).iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            b += g * (sign * c);
            c = c * (m - k) as f64 / (k + 1) as f64;
        }
        Ok(b)
    }

    /// Frobenius norm of `B_m(T)` on its meaningful block.
    pub fn defect_interior_norm(&self, m: usize) -> Result<f64> {
        let b = self.defect(m)?;
        let idx = self.block(self.interior_depth - m);
        Ok(sub(&b, &idx, &idx).norm())
    }

    /// Eigen-decomposition of `T*T` on the interior block, after checking
    /// that the block is decoupled from the rest.
    fn interior_spectrum(&self) -> Result<(Vec<usize>, SymmetricEigen<f64, nalgebra::Dyn>)> {
        let g = self.gram();
        let inner = self.interior();
        let outer: Vec<usize> = (0..self.dim()).filter(|i| !inner.contains(i)).collect();
        let coupling = sub(&g, &inner, &outer).abs().max();
        let scale = 1.0 + g.abs().max();
        if coupling > 1e-12 * scale {
            return Err(Error::Config(format!(
                "T*T couples the interior block to the boundary (entry {coupling:e})"
            )));
        }
        let eig = SymmetricEigen::new(sub(&g, &inner, &inner));
        let (imin, &min) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty interior");
        if min <= 1e-14 * scale {
            let col = eig.eigenvectors.column(imin).iamax();
            return Err(Error::NotLeftInvertible {
                vertex: self.basis[inner[col]].clone(),
                norm: min.max(0.0).sqrt(),
            });
        }
        Ok((inner, eig))
    }

    /// `T′ = T(T*T)⁻¹`, with the inverse taken on the interior block; columns
    /// outside the interior are set to zero.
    pub fn dual_matrix(&self) -> Result<TruncatedOperator> {
        let (inner, eig) = self.interior_spectrum()?;
        let inv = spectral_apply(&eig, |t| 1.0 / t);
        let t_inner = self.matrix.select_columns(&inner);
        let cols = t_inner * inv;
        let mut m = DMatrix::<f64>::zeros(self.dim(), self.dim());
        for (k, &j) in inner.iter().enumerate() {
            m.set_column(j, &cols.column(k));
        }
        Ok(TruncatedOperator {
            matrix: m,
            basis: self.basis.clone(),
            depths: self.depths.clone(),
            materialized_depth: self.materialized_depth,
            interior_depth: self.interior_depth,
        })
    }

    /// Diagonal of `T*ⁿTⁿ`, exact for basis vectors of depth `<= exact_depth`.
    pub fn gram_diag(&self, n: usize) -> Result<GramDiag> {
        Ok(self.gram_diags(n)?.pop().expect("k = n present"))
    }

    /// [`gram_diag`](Self::gram_diag) for every `n` in `0..=nmax`.
    pub fn gram_diags(&self, nmax: usize) -> Result<Vec<GramDiag>> {
        if nmax > self.interior_depth {
            return Err(Error::Range(format!(
                "T*ⁿTⁿ with n = {nmax} exceeds interior depth {}",
                self.interior_depth
            )));
        }
        let diags = self
            .gram_powers(nmax)
            .into_iter()
            .enumerate()
            .map(|(n, g)| {
                let exact_depth = self.materialized_depth - n;
                let idx = self.block(exact_depth);
                let mut off = 0.0_f64;
                for &i in &idx {
                    for &j in &idx {
                        if i != j {
                            off = off.max(g[(i, j)].abs());
                        }
                    }
                }
                GramDiag {
                    n,
                    diagonal: g.diagonal().iter().copied().collect(),
                    exact_depth,
                    max_off_diagonal: off,
                }
            })
            .collect();
        Ok(diags)
    }

    /// Row-major, space-separated dump for debugging.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim() {
            let row: Vec<String> = self.matrix.row(i).iter().map(|x| format!("{x:e}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn sub(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn spectral_apply(eig: &SymmetricEigen<f64, nalgebra::Dyn>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let q = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f));
    q * d * q.transpose()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramDiag {
    pub n: usize,
    pub diagonal: Vec<f64>,
    pub exact_depth: usize,
    pub max_off_diagonal: f64,
}

/// Matrix of `S` in the basis `{e_u}`, vertices in breadth-first order.
pub fn truncate(s: &WeightedShift) -> TruncatedOperator {
    let t = s.tree();
    let n = t.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for u in t.vertices() {
        for &v in t.children(u) {
            m[(v.index(), u.index())] = s.weight(v);
        }
    }
    TruncatedOperator {
        matrix: m,
        basis: t.vertices().map(|v| t.id(v).to_string()).collect(),
        depths: t.vertices().map(|v| t.depth(v)).collect(),
        materialized_depth: t.materialized_depth(),
        interior_depth: t.materialized_depth().saturating_sub(1),
    }
}

/// Brownian shift of covariance `σ`: `V ⊕ U` plus `E`, where `V` is the
/// unweighted unilateral shift on `h_0, …, h_{N−1}`, `U = 1` on a
/// one-dimensional summand `c` and `E c = σ h_0`. The summand `c` is listed
/// last and sits at depth 0.
pub fn build_brownian_shift(sigma: f64, n: usize) -> Result<TruncatedOperator> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Domain(format!("σ must be positive, got {sigma}")));
    }
    if n < 4 {
        return Err(Error::Range(format!("Brownian truncation needs N >= 4, got {n}")));
    }
    let dim = n + 1;
    let c = n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..n - 1 {
        m[(i + 1, i)] = 1.0;
    }
    m[(0, c)] = sigma;
    m[(c, c)] = 1.0;
    let mut basis: Vec<String> = (0..n).map(|i| format!("h{i}")).collect();
    basis.push("c".into());
    let mut depths: Vec<usize> = (1..=n).collect();
    depths.push(0);
    TruncatedOperator::from_parts(m, basis, depths, n)
}

/// Spectral atoms `(x_j, m_j)` of a diagonal operator weight.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteSpectralAtoms {
    atoms: Vec<(f64, usize)>,
}

impl DiscreteSpectralAtoms {
    pub fn new(atoms: Vec<(f64, usize)>) -> Result<Self> {
        for (i, &(x, m)) in atoms.iter().enumerate() {
            if !x.is_finite() || x < 1.0 {
                return Err(Error::Domain(format!("atom x = {x} must be >= 1")));
            }
            if m == 0 {
                return Err(Error::Domain(format!("atom x = {x} has multiplicity 0")));
            }
            if atoms[..i].iter().any(|&(y, _)| y == x) {
                return Err(Error::Domain(format!("atom x = {x} repeated")));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, usize)] {
        &self.atoms
    }

    pub fn dimension(&self) -> usize {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

/// One summand `S_[x]` (the 2-isometric unilateral shift with first weight
/// `x`) repeated `multiplicity` times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarShiftLabel {
    pub first_weight: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub summands: Vec<ScalarShiftLabel>,
}

impl Decomposition {
    /// Weight prefixes of length `len`, one per summand copy.
    pub fn weight_prefixes(&self, len: usize) -> Vec<Vec<f64>> {
        self.summands
            .iter()
            .flat_map(|s| {
                let w = scalar_shift_weights(s.first_weight, len).expect("x >= 1 checked");
                std::iter::repeat_n(w, s.multiplicity)
            })
            .collect()
    }
}

/// Operator-weighted shift with diagonal weights `W_n = diag ξ_n(x_j)` on
/// levels `0..=N`, together with its decomposition into scalar shifts.
pub fn ovws_from_atoms(atoms: &DiscreteSpectralAtoms, n: usize) -> Result<(TruncatedOperator, Decomposition)> {
    let comps: Vec<f64> = atoms
        .atoms
        .iter()
        .flat_map(|&(x, m)| std::iter::repeat_n(x, m))
        .collect();
    let k = comps.len();
    let dim = k * (n + 1);
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut basis = Vec::with_capacity(dim);
    let mut depths = Vec::with_capacity(dim);
    for level in 0..=n {
        for (j, &x) in comps.iter().enumerate() {
            basis.push(format!("n{level}:{j}"));
            depths.push(level);
            if level < n {
                m[((level + 1) * k + j, level * k + j)] = xi_unchecked(level, x);
            }
        }
    }
    let op = TruncatedOperator::from_parts(m, basis, depths, n)?;
    let summands = atoms
        .atoms
        .iter()
        .map(|&(x, m)| ScalarShiftLabel {
            first_weight: x,
            multiplicity: m,
        })
        .collect();
    Ok((op, Decomposition { summands }))
}

/// Operator handed to [`verify_table1`].
#[derive(Clone, Copy, Debug)]
pub enum OperatorSource<'a> {
    Shift(&'a WeightedShift),
    Matrix(&'a TruncatedOperator),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Report {
    pub row: Table1Row,
    pub nmax: usize,
    pub materialized_depth: usize,
    /// `max |T′*ⁿT′ⁿ − r_n(T*T)|` on the exact block, per `n`.
    pub deviation_per_n: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub class_check: String,
}

/// Compares `T′*ⁿT′ⁿ` (by repeated multiplication) with `r_n(T*T)` (by the
/// spectral decomposition of `T*T`) for `n <= nmax`.
pub fn verify_table1(source: OperatorSource<'_>, row: Table1Row, nmax: usize, tol: f64) -> Result<Table1Report> {
    let (op, class_check) = match source {
        OperatorSource::Shift(s) => (truncate(s), shift_class_check(s, row, tol)?),
        OperatorSource::Matrix(m) => {
            if row == Table1Row::AdjacencyPattern {
                return Err(Error::Classification(
                    "the adjacency row is checked on tree shifts only".into(),
                ));
            }
            (m.clone(), matrix_class_check(m, row, tol)?)
        }
    };
    if nmax > op.interior_depth {
        return Err(Error::Range(format!(
            "nmax = {nmax} exceeds interior depth {}",
            op.interior_depth
        )));
    }
    let (inner, eig) = op.interior_spectrum()?;
    let dual = op.dual_matrix()?;
    let n_dim = op.dim();
    let mut p = DMatrix::<f64>::identity(n_dim, n_dim);
    let mut deviation_per_n = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        if n > 0 {
            p = &dual.matrix * p;
        }
        let lhs = p.transpose() * &p;
        let rhs = spectral_apply(&eig, |t| row.r(t, n));
        let exact = op.materialized_depth - n.max(1);
        let pos: Vec<usize> = (0..inner.len()).filter(|&k| op.depths[inner[k]] <= exact).collect();
        let mut dev = 0.0_f64;
        for &a in &pos {
            for &b in &pos {
                dev = dev.max((lhs[(inner[a], inner[b])] - rhs[(a, b)]).abs());
            }
        }
        deviation_per_n.push(dev);
    }
    let max_deviation = deviation_per_n.iter().copied().fold(0.0, f64::max);
    Ok(Table1Report {
        row,
        nmax,
        materialized_depth: op.materialized_depth,
        deviation_per_n,
        max_deviation,
        tolerance: tol,
        passed: max_deviation < tol,
        class_check,
    })
}

fn shift_class_check(s: &WeightedShift, row: Table1Row, tol: f64) -> Result<String> {
    let two = s.is_two_isometry(tol)?;
    if !two.holds() {
        return Err(Error::Classification("not a 2-isometry".into()));
    }
    let t = s.tree();
    let adjacency = t.vertices().skip(1).all(|v| s.weight(v) == 1.0);
    match row {
        Table1Row::Kernel => {
            if s.satisfies_kernel_condition(0, tol)?.holds {
                Ok(format!(
                    "2-isometry with the kernel condition, verified to depth {}",
                    two.verdict.verified_depth
                ))
            } else {
                Err(Error::Classification("kernel condition fails".into()))
            }
        }
        Table1Row::QuasiBrownian => {
            if adjacency {
                let c = classify_adjacency(t, tol)?;
                if c.quasi_brownian_isometry.holds {
                    return Ok("quasi-Brownian adjacency operator".into());
                }
                return Err(Error::Classification("adjacency operator is not quasi-Brownian".into()));
            }
            matrix_class_check(&truncate(s), row, tol)
        }
        Table1Row::AdjacencyPattern => {
            let root = t.root();
            let l = t.degree(root);
            let twos = t.children(root).iter().filter(|&&v| t.degree(v) == 2).count();
            if adjacency && l >= 2 && twos == l - 1 {
                Ok(format!(
                    "2-isometric adjacency operator, root degree {l} with {twos} children of degree 2"
                ))
            } else {
                Err(Error::Classification(
                    "the adjacency row needs an adjacency operator whose root has l − 1 children of degree 2".into(),
                ))
            }
        }
    }
}

fn matrix_class_check(op: &TruncatedOperator, row: Table1Row, tol: f64) -> Result<String> {
    let b2 = op.defect_interior_norm(2)?;
    if b2 > tol {
        return Err(Error::Classification(format!(
            "interior B_2 norm {b2:e} exceeds tolerance"
        )));
    }
    match row {
        Table1Row::Kernel => {
            let r = kernel_identity_residual(op)?;
            if r > tol {
                return Err(Error::Classification(format!(
                    "T′ − 2T + T*T² has interior norm {r:e}; kernel condition fails"
                )));
            }
            Ok(format!(
                "2-isometry (interior B_2 norm {b2:e}) with the kernel condition"
            ))
        }
        Table1Row::QuasiBrownian => {
            let r = quasi_brownian_residual(op)?;
            if r > tol {
                return Err(Error::Classification(format!(
                    "Δ T − Δ^{{1/2}} T Δ^{{1/2}} has interior norm {r:e}; not quasi-Brownian"
                )));
            }
            Ok(format!(
                "quasi-Brownian isometry (interior B_2 norm {b2:e}, residual {r:e})"
            ))
        }
        Table1Row::AdjacencyPattern => Err(Error::Classification(
            "the adjacency row is checked on tree shifts only".into(),
        )),
    }
}

/// Largest column norm of `T′ − 2T + T*T²` over columns of depth `<= N − 2`.
/// Vanishes exactly for 2-isometries with the kernel condition.
pub fn kernel_identity_residual(op: &TruncatedOperator) -> Result<f64> {
    let cols = kernel_identity_columns(op)?;
    Ok(cols.iter().map(|c| c.1).fold(0.0, f64::max))
}

/// Per-column norms of `T′ − 2T + T*T²`, keyed by basis label.
pub fn kernel_identity_columns(op: &TruncatedOperator) -> Result<Vec<(String, f64)>> {
    if op.materialized_depth < 2 {
        return Err(Error::Range("needs materialized depth >= 2".into()));
    }
    let dual = op.dual_matrix()?;
    let t = &op.matrix;
    let r = &dual.matrix - t * 2.0 + t.transpose() * t * t;
    Ok(op
        .block(op.materialized_depth - 2)
        .into_iter()
        .map(|j| (op.basis[j].clone(), r.column(j).norm()))
        .collect())
}

/// Interior norm of `Δ T − Δ^{1/2} T Δ^{1/2}` with `Δ = T*T − I`.
pub fn quasi_brownian_residual(op: &TruncatedOperator) -> Result<f64> {
    if op.materialized_depth < 2 {
        return Err(Error::Range("needs materialized depth >= 2".into()));
    }
    let (inner, eig) = op.interior_spectrum()?;
    let n = op.dim();
    let mut delta = DMatrix::<f64>::zeros(n, n);
    let mut root = DMatrix::<f64>::zeros(n, n);
    let d = spectral_apply(&eig, |t| t - 1.0);
    let r = spectral_apply(&eig, |t| (t - 1.0).max(0.0).sqrt());
    for (a, &i) in inner.iter().enumerate() {
        for (b, &j) in inner.iter().enumerate() {
            delta[(i, j)] = d[(a, b)];
            root[(i, j)] = r[(a, b)];
        }
    }
    let t = &op.matrix;
    let res = &delta * t - &root * t * &root;
    let cols = op.block(op.materialized_depth - 2);
    Ok(cols.iter().map(|&j| res.column(j).norm()).fold(0.0, f64::max))
}

/// Residuals of the Cauchy dual identities on the interior.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualIdentities {
    /// `‖T*T′ − I‖` on the interior block.
    pub left_inverse: f64,
    /// `P = T′T*`: `‖P² − P‖`, `‖P − P*‖`, `‖PT − T‖` on interior columns.
    pub projection_idempotent: f64,
    pub projection_symmetric: f64,
    pub projection_fixes_range: f64,
    /// `‖T′*T′ − (T*T)⁻¹‖` on the interior block.
    pub dual_gram_inverse: f64,
    /// `‖(T′)′ − T‖` on interior columns.
    pub double_dual: f64,
}

impl DualIdentities {
    pub fn max(&self) -> f64 {
        [
            self.left_inverse,
            self.projection_idempotent,
            self.projection_symmetric,
            self.projection_fixes_range,
            self.dual_gram_inverse,
            self.double_dual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn dual_identities(op: &TruncatedOperator) -> Result<DualIdentities> {
    let (inner, eig) = op.interior_spectrum()?;
    let dual = op.dual_matrix()?;
    let t = &op.matrix;
    let tp = &dual.matrix;
    let all: Vec<usize> = (0..op.dim()).collect();
    let id = DMatrix::<f64>::identity(inner.len(), inner.len());
    let left_inverse = (sub(&(t.transpose() * tp), &inner, &inner) - &id).abs().max();
    let p = tp * t.transpose();
    let projection_idempotent = sub(&(&p * &p - &p), &all, &inner).abs().max();
    let projection_symmetric = sub(&(&p - p.transpose()), &inner, &inner).abs().max();
    let projection_fixes_range = sub(&(&p * t - t), &all, &inner).abs().max();
    let inv = spectral_apply(&eig, |x| 1.0 / x);
    let dual_gram_inverse = (sub(&(tp.transpose() * tp), &inner, &inner) - inv).abs().max();
    let dd = dual.dual_matrix()?;
    let double_dual = sub(&(&dd.matrix - t), &all, &inner).abs().max();
    Ok(DualIdentities {
        left_inverse,
        projection_idempotent,
        projection_symmetric,
        projection_fixes_range,
        dual_gram_inverse,
        double_dual,
    })
}

/// `⟨B_m(T) e_i, e_i⟩` for the basis vector labeled `id`.
pub fn defect_entry(op: &TruncatedOperator, m: usize, id: &str) -> Result<f64> {
    let i = op
        .index_of(id)
        .ok_or_else(|| Error::Range(format!("no basis vector `{id}`")))?;
    if op.depths[i] + m > op.interior_depth {
        return Err(Error::Range(format!(
            "B_{m} at `{id}` needs interior depth {}",
            op.depths[i] + m
        )));
    }
    Ok(op.defect(m)?[(i, i)])
}
