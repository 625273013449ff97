//! Maximize the dimension functional over the simplex and compare with a
//! brute-force grid on a spec small enough to enumerate.

use sponge::model::{make_sierpinski, make_sierpinski_levels, BaseTriple, CountTree};
use sponge::variational::{vp, vp_grid_oracle, VpOptions};

fn main() -> sponge::Result<()> {
    let opts = VpOptions { starts: 16, seed: 3, ..Default::default() };

    let small = make_sierpinski_levels(&CountTree::new(vec![vec![2], vec![1, 1], vec![1, 3]])?, &[0.5, 0.3, 0.2])?;
    let r = vp(&small, &opts)?;
    println!("|J| = 2: vp = {:.8} ({} of {} starts converged, spread {:.1e})", r.value, r.converged_starts, r.starts, r.spread);
    println!("         grid oracle = {:.8}", vp_grid_oracle(&small, 10_000)?);

    let counts = CountTree::new(vec![vec![2], vec![2, 3], vec![2, 5, 3, 1, 4]])?;
    let spec = make_sierpinski(&counts, &BaseTriple::sierpinski(1.0 / 6.0, 0.25, 0.5)?)?;
    let r = vp(&spec, &opts)?;
    let p: Vec<String> = r.argmax.weights().iter().map(|w| format!("{w:.5}")).collect();
    println!("|J| = 5: vp = {:.10}, argmax [{}], interior {}", r.value, p.join(", "), r.interior);
    Ok(())
}
