//! The Dirichlet shift is a 2-isometry with the kernel condition, so its
//! Cauchy dual (the Bergman shift) is a subnormal contraction.

use std::sync::Arc;

use cauchy_dual::moments::{d_sequence, stieltjes_test, Table1Row};
use cauchy_dual::oracle::{verify_table1, OperatorSource};
use cauchy_dual::shift::{build_shift, WeightSpec, DEFAULT_TOL};
use cauchy_dual::subnormality::{dual_subnormality, SubnormalityOptions};
use cauchy_dual::tree::TreeSpec;

fn main() -> cauchy_dual::Result<()> {
    let tree = Arc::new(TreeSpec::path(64).materialize()?);
    let s = build_shift(&WeightSpec::Dirichlet {}, tree)?;
    let dual = s.cauchy_dual()?;
    let t = s.tree();

    println!("first weights of S and S′:");
    for v in t.vertices().skip(1).take(5) {
        println!("  {:>6}  {:.6}  {:.6}", t.id(v), s.weight(v), dual.weight(v));
    }

    let seq = d_sequence(&s, t.root(), 8, true)?;
    println!("‖S′ⁿe_0‖² = {:?}", seq.values);
    println!("{}", stieltjes_test(&seq, DEFAULT_TOL).detail);

    let report = dual_subnormality(&s, &SubnormalityOptions::default())?;
    println!("[{}] {}", report.decision_path.id(), report.summary);

    let oracle = verify_table1(OperatorSource::Shift(&s), Table1Row::Kernel, 10, 1e-9)?;
    println!(
        "matrix check of S′*ⁿS′ⁿ = (I + nΔ)⁻¹, n <= 10: max deviation {:e}",
        oracle.max_deviation
    );
    Ok(())
}
