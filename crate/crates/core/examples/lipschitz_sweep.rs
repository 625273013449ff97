//! Perturb a Sierpinski sponge at several scales, fit the Lipschitz envelope
//! of its VP and check fresh perturbations against it.
//!
//! ```text
//! cargo run --release --example lipschitz_sweep
//! ```

use sponge::continuity::{holdout, sweep, Baseline, DEFAULT_EPS_GRID, DEFAULT_K};
use sponge::model::{make_sierpinski, BaseTriple, CountTree};
use sponge::variational::VpOptions;

fn main() -> sponge::Result<()> {
    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?)?;
    let opts = VpOptions { seed: 8, ..Default::default() };
    let baseline = Baseline::new(&spec, &opts)?;
    println!("VP(0) = {:.10}", baseline.vp.value);

    let report = sweep(&baseline, &DEFAULT_EPS_GRID, DEFAULT_K, 8, &opts)?;
    println!("{:>8}  {:>12}  {:>8}", "eps", "max |dVP|", "ratio");
    for (eps, dev) in &report.max_deviation {
        println!("{eps:>8}  {dev:>12.3e}  {:>8.4}", dev / eps);
    }
    println!(
        "C_fit = {:.4}, C_hat = {:.4}, r2 = {:.4}, max/median ratio = {:.3}",
        report.c_fit,
        report.c_hat,
        report.linearity_r2,
        report.max_ratio / report.median_ratio
    );

    let held = holdout(&baseline, &DEFAULT_EPS_GRID, 100, report.c_hat, 88, &opts)?;
    println!("hold-out: {}/{} fresh perturbations inside the envelope", held.inside, held.draws);
    Ok(())
}
