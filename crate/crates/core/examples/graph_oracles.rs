//! d-connection queries on a multi-arrowed graph.

use gemd::graph::{MultiArrowGraph, VertexSet};

fn main() -> gemd::error::Result<()> {
    // 1 -> 2 -> 3 <- 4, and a lagged edge 3 => 1
    let g = MultiArrowGraph::new(4, [(0, 1), (1, 2), (3, 2)], [(2, 0)])?;
    println!("graph {}", serde_json::to_string(&g).unwrap());
    println!("recursive: {}", g.check_recursive());

    let sets = [VertexSet::EMPTY, VertexSet::singleton(1), VertexSet::singleton(2)];
    for (i, j) in [(0, 3), (2, 0), (2, 1), (3, 0)] {
        for s in sets {
            if s.contains(i) || s.contains(j) {
                continue;
            }
            println!(
                "y{} ~ y{} | {s}: feedthrough {}, delayed {}",
                i + 1,
                j + 1,
                g.feedthrough_d_connected(i, j, s)?,
                g.delayed_d_connected(i, j, s),
            );
        }
    }
    Ok(())
}
