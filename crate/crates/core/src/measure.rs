//! Finite atomic measures on `[0, ∞)` and the measures `μ_{a,b}`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Positive measure with finitely many atoms, sorted by location.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

impl DiscreteMeasure {
    /// Sorts atoms, merges equal locations and drops zero masses.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut list: Vec<Atom> = Vec::new();
        for (location, mass) in atoms {
            if !location.is_finite() || location < 0.0 {
                return Err(Error::Domain(format!(
                    "atom location must be in [0, ∞), got {location}"
                )));
            }
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::Domain(format!("atom mass must be finite and >= 0, got {mass}")));
            }
            if mass > 0.0 {
                list.push(Atom { location, mass });
            }
        }
        list.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut atoms: Vec<Atom> = Vec::with_capacity(list.len());
        for a in list {
            match atoms.last_mut() {
                Some(last) if last.location == a.location => last.mass += a.mass,
                _ => atoms.push(a),
            }
        }
        Ok(Self { atoms })
    }

    pub fn zero() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn dirac(location: f64) -> Result<Self> {
        Self::new([(location, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Mass carried by the atom at exactly `location`.
    pub fn mass_at(&self, location: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.location == location)
            .map_or(0.0, |a| a.mass)
    }

    pub fn moment(&self, n: usize) -> f64 {
        self.atoms.iter().map(|a| a.mass * a.location.powi(n as i32)).sum()
    }

    pub fn moments(&self, nmax: usize) -> Vec<f64> {
        (0..=nmax).map(|n| self.moment(n)).collect()
    }

    /// `∫ t⁻¹ dμ`, infinite when there is an atom at 0.
    pub fn integral_inverse(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| {
                if a.location == 0.0 {
                    f64::INFINITY
                } else {
                    a.mass / a.location
                }
            })
            .sum()
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.atoms.iter().map(|a| (a.location, c * a.mass)))
    }

    /// `Σ_i c_i μ_i`.
    pub fn mixture(parts: &[(f64, &DiscreteMeasure)]) -> Result<Self> {
        Self::new(
            parts
                .iter()
                .flat_map(|(c, m)| m.atoms.iter().map(move |a| (a.location, c * a.mass))),
        )
    }

    pub fn support_max(&self) -> f64 {
        self.atoms.last().map_or(0.0, |a| a.location)
    }
}

/// Result of prepending `γ_0 = 1` to the sequence represented by `μ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BackwardExtension {
    pub admissible: bool,
    /// `∫ t⁻¹ dμ`.
    pub integral: f64,
    /// `ν = t⁻¹ μ + (1 − ∫ t⁻¹ dμ) δ_0` when admissible.
    pub nu: Option<DiscreteMeasure>,
}

/// Decides whether `(1, ∫ 1 dμ, ∫ t dμ, …)` is again a Stieltjes moment
/// sequence: exactly when `∫ t⁻¹ dμ <= 1`, with representing measure
/// `ν = t⁻¹ μ + (1 − ∫ t⁻¹ dμ) δ_0`. An atom of `μ` at 0 makes the integral
/// infinite.
pub fn backward_extension(mu: &DiscreteMeasure) -> BackwardExtension {
    let integral = mu.integral_inverse();
    let slack = 1.0 - integral;
    if slack.is_nan() || slack < -1e-14 {
        return BackwardExtension {
            admissible: false,
            integral,
            nu: None,
        };
    }
    let zero_atom = if slack.abs() <= 1e-14 { 0.0 } else { slack };
    let nu = DiscreteMeasure::new(
        std::iter::once((0.0, zero_atom)).chain(mu.atoms.iter().map(|a| (a.location, a.mass / a.location))),
    )
    .expect("masses stay nonnegative");
    BackwardExtension {
        admissible: true,
        integral,
        nu: Some(nu),
    }
}

/// `μ_{a,b}`: the representing measure of `γ(n) = 1/(a + bn)` for `a > 0`,
/// `b >= 0`. For `b = 0` it is `δ_1 / a`; for `b > 0` it has density
/// `t^{a/b − 1} / b` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuAB {
    pub a: f64,
    pub b: f64,
}

impl MuAB {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b >= 0.0) {
            return Err(Error::Domain(format!(
                "1/(a + bn) is a moment sequence only for a > 0, b >= 0; got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn moment(&self, n: usize) -> f64 {
        1.0 / (self.a + self.b * n as f64)
    }

    pub fn describe(&self) -> String {
        if self.b == 0.0 {
            format!("(1/{}) δ_1", self.a)
        } else {
            format!("density t^({}) / {} on [0, 1]", self.a / self.b - 1.0, self.b)
        }
    }

    /// Atomic form. For `b > 0` this is the `nodes`-point Gauss–Jacobi rule
    /// for the density, exact for moments of order `< 2·nodes`.
    pub fn to_discrete(&self, nodes: usize) -> Result<DiscreteMeasure> {
        if self.b == 0.0 {
            return DiscreteMeasure::new([(1.0, 1.0 / self.a)]);
        }
        let beta = self.a / self.b - 1.0;
        let (x, w) = gauss_jacobi(nodes, beta)?;
        // t = (1 + x)/2 turns (1 + x)^β dx into 2^{β+1} t^β dt
        let scale = 0.5_f64.powf(beta + 1.0) / self.b;
        DiscreteMeasure::new(
            x.iter()
                .zip(&w)
                .map(|(&x, &w)| (((1.0 + x) / 2.0).clamp(0.0, 1.0), w * scale)),
        )
    }
}

/// Node count used when `μ_{a,b}` must be represented by atoms.
pub const QUADRATURE_NODES: usize = 64;

/// Gauss–Jacobi nodes and weights for `(1 + x)^β` on `[−1, 1]`, from the
/// eigen-decomposition of the Jacobi matrix.
fn gauss_jacobi(n: usize, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || beta <= -1.0 {
        return Err(Error::Domain(format!(
            "Gauss–Jacobi needs n >= 1 and β > −1 (n = {n}, β = {beta})"
        )));
    }
    let alpha = 0.0;
    let ab = alpha + beta;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        j[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let b2 = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + alpha) * (m + beta) * (m + ab)
                    / ((2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0))
            };
            j[(k, k + 1)] = b2.sqrt();
            j[(k + 1, k)] = b2.sqrt();
        }
    }
    let mu0 = 2f64.powf(beta + 1.0) / (beta + 1.0);
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_sorts() {
        let m = DiscreteMeasure::new([(1.0, 0.5), (0.25, 0.25), (1.0, 0.25), (3.0, 0.0)]).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[0].location, 0.25);
        assert_eq!(m.mass_at(1.0), 0.75);
        assert!(DiscreteMeasure::new([(-1.0, 1.0)]).is_err());
        assert!(DiscreteMeasure::new([(1.0, -1.0)]).is_err());
    }

    #[test]
    fn dirac_extension_is_itself() {
        let d = DiscreteMeasure::dirac(1.0).unwrap();
        let e = backward_extension(&d);
        assert!(e.admissible);
        assert_eq!(e.integral, 1.0);
        assert_eq!(e.nu.unwrap(), d);
    }

    #[test]
    fn atom_at_zero_is_inadmissible() {
        let m = DiscreteMeasure::new([(0.0, 0.1), (1.0, 0.1)]).unwrap();
        let e = backward_extension(&m);
        assert!(!e.admissible && e.integral.is_infinite() && e.nu.is_none());
    }

    #[test]
    fn extension_adds_zero_atom() {
        let mu = DiscreteMeasure::new([(0.25, 4.0 / 27.0), (1.0, 5.0 / 27.0)]).unwrap();
        let e = backward_extension(&mu);
        assert!((e.integral - 7.0 / 9.0).abs() < 1e-15);
        let nu = e.nu.unwrap();
        assert!((nu.mass_at(0.0) - 2.0 / 9.0).abs() < 1e-15);
        for n in 1..10 {
            assert!((nu.moment(n) - mu.moment(n - 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn gauss_jacobi_reproduces_mu_ab_moments() {
        for (a, b) in [(1.0, 1.0), (2.0, 0.5), (3.0, 2.0), (0.5, 1.0)] {
            let mu = MuAB::new(a, b).unwrap();
            let d = mu.to_discrete(QUADRATURE_NODES).unwrap();
            assert!(d.support_max() <= 1.0);
            for n in 0..40 {
                let rel = (d.moment(n) - mu.moment(n)).abs() / mu.moment(n);
                assert!(rel < 1e-11, "a={a} b={b} n={n} rel={rel}");
            }
        }
    }

    #[test]
    fn mu_ab_domain() {
        assert!(MuAB::new(-0.5, 1.0).is_err());
        assert!(MuAB::new(1.0, -1.0).is_err());
        let d = MuAB::new(2.0, 0.0).unwrap().to_discrete(8).unwrap();
        assert_eq!(
            d.atoms(),
            &[Atom {
                location: 1.0,
                mass: 0.5
            }]
        );
    }
}
