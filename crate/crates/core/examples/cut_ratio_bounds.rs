//! Empirical cut-index ratios `L/n` on perturbed sponges against the
//! `log c / log b +- A eps` band.

use sponge::continuity::check_l_ratio_bounds;
use sponge::model::{make_sierpinski, perturb, BaseTriple, CountTree};

fn main() -> sponge::Result<()> {
    let base = BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?;
    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let spec = make_sierpinski(&counts, &base)?;
    for eps in [0.0, 0.01, 0.05] {
        let r = check_l_ratio_bounds(&perturb(&spec, eps, 5)?, &base, 500, 1000, 6)?;
        println!("eps {eps:<5} A = {:.4}  violations {}/{}", r.a_const, r.violations, r.samples);
        println!("  L1/n {:?}", r.l1);
        println!("  L2/n {:?}", r.l2);
    }
    Ok(())
}
