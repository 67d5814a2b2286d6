//! Exact reconstruction of the six-node network from its covariances.

use gemd::gemd::{gemd, GemdParams};
use gemd::harness::builtins::{example2_network, Example2Params};

fn main() -> gemd::error::Result<()> {
    let m = example2_network(&Example2Params::uniform(0.45))?;
    let params = GemdParams::default();
    let r = gemd(&m.population_autocovariance(params.lag_depth)?, &params)?;
    println!("{}", serde_json::to_string(&r.graph).unwrap());
    for rec in r.records.iter().filter(|r| r.separating_set.is_some()) {
        println!(
            "{:?} y{} / y{} separated by {} (f = {:.1e})",
            rec.kind,
            rec.source + 1,
            rec.target + 1,
            rec.separating_set.unwrap(),
            rec.witness_fscore().unwrap()
        );
    }
    Ok(())
}
