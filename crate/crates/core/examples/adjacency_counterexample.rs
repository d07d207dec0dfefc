//! The adjacency operator of a nested comb-fan tree is a 2-isometry whose
//! Cauchy dual is not subnormal. The dual moment sequence at the first root
//! child is represented by a two-atom measure; its backward extension forces
//! an atom at 0 into the root measure, which then cannot be extended again.

use std::sync::Arc;

use cauchy_dual::measure::{backward_extension, DiscreteMeasure};
use cauchy_dual::moments::{d_sequence, stieltjes_test};
use cauchy_dual::shift::{WeightedShift, DEFAULT_TOL};
use cauchy_dual::subnormality::{dual_subnormality, SubnormalityOptions};
use cauchy_dual::tree::{classify_tree, TreeSpec};

fn main() -> cauchy_dual::Result<()> {
    let l = 3.0;
    let tree = TreeSpec::nested_comb_fan(3, 14).materialize()?;
    println!(
        "degrees per generation: {:?}",
        classify_tree(&tree)
            .degrees_per_generation
            .iter()
            .take(4)
            .collect::<Vec<_>>()
    );
    let s = WeightedShift::adjacency(Arc::new(tree));
    let t = s.tree();
    let psi = t.by_path(&[0])?;

    let mu = DiscreteMeasure::new([
        (0.25, 2.0 * (l - 1.0) / (3.0 * l * l)),
        (1.0, (l + 2.0) / (3.0 * l * l)),
    ])?;
    let at_psi = d_sequence(&s, psi, 6, true)?;
    for n in 1..=6 {
        println!(
            "d′(ψ, {n}) = {:.12}   ∫ t^{} dμ = {:.12}",
            at_psi.values[n],
            n - 1,
            mu.moment(n - 1)
        );
    }

    let ext = backward_extension(&mu);
    let nu = ext.nu.expect("∫ t⁻¹ dμ <= 1");
    println!("∫ t⁻¹ dμ = {:.12}, ν({{0}}) = {:.12}", ext.integral, nu.mass_at(0.0));
    let rho = DiscreteMeasure::mixture(&[
        ((l - 1.0) / (l * l), &DiscreteMeasure::dirac(1.0)?),
        (1.0 / (l * l), &nu),
    ])?;
    println!(
        "ρ({{0}}) = {:.12}; extension of ρ admissible: {}",
        rho.mass_at(0.0),
        backward_extension(&rho).admissible
    );

    let root = d_sequence(&s, t.root(), 12, true)?;
    println!("root: {}", stieltjes_test(&root, DEFAULT_TOL).detail);
    println!("{}", dual_subnormality(&s, &SubnormalityOptions::default())?.summary);
    Ok(())
}
