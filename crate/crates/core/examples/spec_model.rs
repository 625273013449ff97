//! Build a Sierpinski sponge, validate it, perturb it and print the
//! Moran exponents of its fibers.
//!
//! ```text
//! cargo run --example spec_model
//! ```

use sponge::io::spec_to_json;
use sponge::model::{check_hip, classify, fit_base, make_sierpinski, perturb, t_bounds, validate, BaseTriple, CountTree};

fn main() -> sponge::Result<()> {
    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let base = BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?;
    let spec = make_sierpinski(&counts, &base)?;
    println!("valid: {}, leaves: {}, |J| = {}", validate(&spec).ok, spec.leaf_count(), spec.j_count());

    let tb = t_bounds(&spec)?;
    for (node, t) in spec.j_words().iter().zip(&tb.per_pair) {
        println!("  t_{} = {t:.6}", node.word());
    }
    println!("t in [{:.6}, {:.6}]", tb.t_low, tb.t_high);
    let hip = check_hip(&spec, 9)?;
    println!("hip on grid: {}", hip.holds);

    let noisy = perturb(&spec, 0.02, 7)?;
    let fitted = fit_base(&noisy)?;
    println!(
        "perturbed: eps vs base = {:.5}, fitted (a, b, c) = ({:.5}, {:.5}, {:.5}) with eps {:.5}",
        classify(&noisy, &base)?,
        fitted.base.a,
        fitted.base.b,
        fitted.base.c,
        fitted.base.epsilon
    );
    println!("{}", spec_to_json(&noisy));
    Ok(())
}
