//! Simulate, then reconstruct and orient from the sample path.

use gemd::gemd::{gemd_from_data, GemdParams, WitnessPolicy};
use gemd::harness::builtins::{example2_network, Example2Params};
use gemd::ldim::simulate;
use gemd::orientation::orient_all;

fn main() -> gemd::error::Result<()> {
    let m = example2_network(&Example2Params::uniform(0.45))?;
    for (horizon, threshold) in [(2_000, 0.02), (20_000, 0.005)] {
        let data = simulate(&m, horizon, 7)?;
        let params = GemdParams { witness: WitnessPolicy::MinimumScore, ..GemdParams::with_threshold(threshold) };
        let r = gemd_from_data(&data, &params)?;
        let (g, trace) = orient_all(&r);
        println!("T = {horizon}, threshold {threshold}");
        println!("  directed     {:?}", one_based(g.directed()));
        println!("  undirected   {:?}", one_based(g.undirected()));
        println!("  double-headed {:?}", one_based(g.double_headed()));
        println!("  conflicts    {}", trace.conflicts.len());
    }
    Ok(())
}

fn one_based(edges: &std::collections::BTreeSet<(usize, usize)>) -> Vec<(usize, usize)> {
    edges.iter().map(|&(a, b)| (a + 1, b + 1)).collect()
}
