//! Brownian shifts as explicit block matrices: the dual Gram powers match
//! `(1 + t^{1−2n})/(1 + t)` applied to `T*T`.

use cauchy_dual::moments::Table1Row;
use cauchy_dual::oracle::{build_brownian_shift, quasi_brownian_residual, verify_table1, OperatorSource};

fn main() -> cauchy_dual::Result<()> {
    for sigma in [0.5, 1.0, 2.0] {
        let op = build_brownian_shift(sigma, 64)?;
        let r = verify_table1(OperatorSource::Matrix(&op), Table1Row::QuasiBrownian, 10, 1e-9)?;
        let dual = op.dual_matrix()?;
        let c = op.index_of("c").expect("summand c");
        println!(
            "σ = {sigma}: ‖B_2‖ = {:.1e}, quasi-Brownian residual {:.1e}, max deviation {:.1e}, ‖T′e_c‖² = {:.6}",
            op.defect_interior_norm(2)?,
            quasi_brownian_residual(&op)?,
            r.max_deviation,
            dual.matrix.column(c).norm_squared()
        );
    }
    Ok(())
}
