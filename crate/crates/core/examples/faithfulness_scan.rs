//! Faithfulness of single models and of random parameterizations.

use gemd::faithfulness::{check_faithfulness, scan_with_sampler, zero_measure_scan, FAITHFULNESS_TOL};
use gemd::harness::builtins::{example2_network, sec3_triangle, Example2Params};
use gemd::harness::random::ParamLaw;
use gemd::wiener::DEFAULT_LAG_DEPTH;

fn main() -> gemd::error::Result<()> {
    let cancelling = check_faithfulness(&sec3_triangle(0.5, 0.7, -0.35)?, DEFAULT_LAG_DEPTH, FAITHFULNESS_TOL)?;
    println!("cancelling triangle: {} of {} statements violated", cancelling.violations.len(), cancelling.statements_checked);
    for v in &cancelling.violations {
        println!("  {:?} y{} / y{} given {}: f = {:.1e}", v.kind, v.source, v.target, v.set, v.fscore);
    }

    let law = ParamLaw::default();
    let graph = example2_network(&Example2Params::uniform(0.45))?.perfect_representation();
    let s = zero_measure_scan(&graph, 50, &law, 1)?;
    println!("six-node graph, 50 draws: {} faithful, {} unfaithful, {} unstable", s.faithful, s.unfaithful, s.unstable);

    let s = scan_with_sampler(50, 2, DEFAULT_LAG_DEPTH, FAITHFULNESS_TOL, |rng| {
        let (a, b) = (law.draw(rng), law.draw(rng));
        sec3_triangle(a, b, -a * b).ok()
    })?;
    println!("constrained triangles, 50 draws: {} unfaithful", s.unfaithful);
    Ok(())
}
