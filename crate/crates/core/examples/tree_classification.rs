//! Materializes the built-in tree families and classifies their adjacency
//! operators.

use cauchy_dual::shift::{classify_adjacency, DEFAULT_TOL};
use cauchy_dual::tree::{classify_tree, TreeSpec};

fn main() -> cauchy_dual::Result<()> {
    let specs = [
        ("path", TreeSpec::path(8)),
        ("quasi-Brownian, valency 3", TreeSpec::quasi_brownian(3, 8)),
        ("comb fan, valency 2", TreeSpec::comb_fan(2, 8)),
        ("comb fan, valency 3", TreeSpec::comb_fan(3, 8)),
        ("nested comb fan, valency 3", TreeSpec::nested_comb_fan(3, 8)),
    ];
    for (name, spec) in specs {
        let tree = spec.materialize()?;
        let r = classify_tree(&tree);
        let a = classify_adjacency(&tree, DEFAULT_TOL)?;
        println!(
            "{name}: {} vertices, quasi-Brownian tree {}; adjacency: isometry {}, 2-isometry {}, kernel condition {}, quasi-Brownian {}, Brownian {}",
            r.vertices,
            r.quasi_brownian.holds,
            a.isometry.holds,
            a.two_isometry.holds,
            a.kernel_condition.holds,
            a.quasi_brownian_isometry.holds,
            a.brownian_isometry.holds
        );
    }
    Ok(())
}
