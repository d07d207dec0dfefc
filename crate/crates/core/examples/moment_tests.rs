//! Hankel and complete-monotonicity tests on moment sequences, and the
//! measures behind `1/(a + bn)`.

use cauchy_dual::measure::{backward_extension, DiscreteMeasure};
use cauchy_dual::moments::{hausdorff_test, mu_ab_moments, stieltjes_test, MomentSequence};
use cauchy_dual::shift::DEFAULT_TOL;

fn main() -> cauchy_dual::Result<()> {
    for (a, b) in [(1.0, 0.0), (1.0, 1.0), (2.0, 0.5), (3.0, 2.0)] {
        let m = mu_ab_moments(a, b, 12)?;
        println!(
            "1/({a} + {b}n): {} | Hausdorff {}",
            m.description,
            hausdorff_test(&m.sequence, DEFAULT_TOL).holds
        );
    }

    let growing = MomentSequence::new((0..10).map(|n| 2f64.powi(n)).collect(), "2^n")?;
    println!(
        "2ⁿ: Stieltjes {}, Hausdorff {}",
        stieltjes_test(&growing, DEFAULT_TOL).holds,
        hausdorff_test(&growing, DEFAULT_TOL).holds
    );

    let bumpy = MomentSequence::new(vec![1.0, 0.5, 0.1, 0.5, 1.0], "bumpy")?;
    let v = stieltjes_test(&bumpy, DEFAULT_TOL);
    println!(
        "1, 0.5, 0.1, 0.5, 1: {} (failing order {:?})",
        v.detail, v.failing_order
    );

    let mu = DiscreteMeasure::new([(0.5, 0.3), (2.0, 0.4)])?;
    let ext = backward_extension(&mu);
    println!(
        "∫ t⁻¹ dμ = {}, admissible {}, ν = {:?}",
        ext.integral,
        ext.admissible,
        ext.nu.map(|n| n.atoms().to_vec())
    );
    Ok(())
}
