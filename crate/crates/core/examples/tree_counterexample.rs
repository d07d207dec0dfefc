//! A 2-isometric weighted shift on a tree with two branches whose Cauchy
//! dual is not subnormal: sibling norms agree from generation 1 on, but not
//! at the root.

use std::sync::Arc;

use cauchy_dual::moments::{d_sequence, dgraph_closed_form, stieltjes_test};
use cauchy_dual::shift::{build_shift, WeightSpec, DEFAULT_TOL};
use cauchy_dual::subnormality::{dual_subnormality, SubnormalityOptions};
use cauchy_dual::tree::TreeSpec;

fn main() -> cauchy_dual::Result<()> {
    let (y1, y2) = (1.1, 1.3);
    let tree = Arc::new(TreeSpec::t_eta_0(2, 16).materialize()?);
    let s = build_shift(&WeightSpec::glowny(y1, y2), tree)?;
    let t = s.tree();

    println!("2-isometry: {}", s.is_two_isometry(DEFAULT_TOL)?.holds());
    for k in 0..3 {
        println!(
            "sibling norms agree from generation {k}: {}",
            s.satisfies_kernel_condition(k, DEFAULT_TOL)?.holds
        );
    }

    let mut sum = 0.0;
    for &v in t.children(t.root()) {
        sum += s.weight(v).powi(2) / (2.0 - s.vertex_norm_sq(v)?);
    }
    println!(
        "Σ λ_v²/(2 − ‖Se_v‖²) = {sum:.6} vs ‖Se_ω‖⁴ = {:.6}",
        s.vertex_norm_sq(t.root())?.powi(2)
    );

    let seq = d_sequence(&s, t.root(), 12, true)?;
    for n in 1..=4 {
        println!(
            "d′(ω, {n}) = {:.12}  explicit formula {:.12}",
            seq.values[n],
            dgraph_closed_form(&s, t.root(), n, DEFAULT_TOL)?
        );
    }
    let v = stieltjes_test(&seq, DEFAULT_TOL);
    println!(
        "root Stieltjes test: {} (worst eigenvalue {:.3e})",
        v.detail, v.worst_value
    );

    let r = dual_subnormality(&s, &SubnormalityOptions::default())?;
    println!("[{}] {}", r.decision_path.id(), r.summary);
    Ok(())
}
