//! Collider detection and propagation on the diamond.

use gemd::gemd::{gemd, GemdParams};
use gemd::harness::builtins::example1_diamond;
use gemd::orientation::orient_all;

fn main() -> gemd::error::Result<()> {
    let m = example1_diamond([1.0; 5])?;
    let r = gemd(&m.population_autocovariance(4)?, &GemdParams { lag_depth: 4, ..GemdParams::default() })?;
    let (g, trace) = orient_all(&r);
    print!("{}", trace.rule_log());
    println!("directed   {:?}", g.directed().iter().map(|&(a, b)| (a + 1, b + 1)).collect::<Vec<_>>());
    println!("undirected {:?}", g.undirected().iter().map(|&(a, b)| (a + 1, b + 1)).collect::<Vec<_>>());
    Ok(())
}
