//! The self-maps `ξ_n` of `[1, ∞)`.
//!
//! `ξ_n(x)` is the `n`-th weight of the unique 2-isometric unilateral weighted
//! shift whose first weight is `x`:
//!
//! ```text
//! ξ_n(x) = sqrt( (1 + (n+1)(x² − 1)) / (1 + n(x² − 1)) )
//! ```

use crate::error::{Error, Result};

/// Evaluates `ξ_n(x)`. Fails for `x < 1` or non-finite `x`.
pub fn xi(n: usize, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 1.0 {
        return Err(Error::Domain(format!("xi requires x >= 1, got {x}")));
    }
    Ok(xi_unchecked(n, x))
}

pub(crate) fn xi_unchecked(n: usize, x: f64) -> f64 {
    let s = x * x - 1.0;
    let n = n as f64;
    ((1.0 + (n + 1.0) * s) / (1.0 + n * s)).sqrt()
}

/// Weights `ξ_0(x), …, ξ_{len-1}(x)` of the scalar shift `S_[x]`.
pub fn scalar_shift_weights(x: f64, len: usize) -> Result<Vec<f64>> {
    xi(0, x)?;
    Ok((0..len).map(|n| xi_unchecked(n, x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_weight_is_identity() {
        assert_eq!(xi(0, 1.7).unwrap(), 1.7);
    }

    #[test]
    fn fixed_point_at_one() {
        for n in 0..50 {
            assert_eq!(xi(n, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn dirichlet_weights() {
        let x = std::f64::consts::SQRT_2;
        for n in 0..40 {
            let w = xi(n, x).unwrap();
            let expect = (n as f64 + 2.0) / (n as f64 + 1.0);
            assert!((w * w - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_below_one() {
        assert!(matches!(xi(3, 0.99), Err(Error::Domain(_))));
        assert!(xi(0, f64::NAN).is_err());
    }
}
