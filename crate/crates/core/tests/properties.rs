use std::collections::BTreeSet;

use gemd::gemd::{gemd, GemdParams};
use gemd::graph::{DiGraph, MultiArrowGraph, VertexSet};
use gemd::harness::random::{parameterize, random_recursive_graph, ParamLaw};
use gemd::ldim::{empirical_autocovariance, simulate, LdimModel};
use gemd::lti::TransferFunction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn relabel(m: &LdimModel, perm: &[usize]) -> LdimModel {
    let entries: Vec<_> = m.entries().map(|(a, b, tf)| (perm[a], perm[b], tf.clone())).collect();
    LdimModel::with_white_noise(m.n(), entries).unwrap()
}

fn small_model(seed: u64, n: usize) -> Option<LdimModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_recursive_graph(n, 0.4, 0.2, &mut rng);
    parameterize(&g, &ParamLaw::default(), &mut rng)
}

fn cond_set(bits: u64, n: usize, i: usize, j: usize) -> VertexSet {
    let mut s = VertexSet::from_bits(bits & ((1u64 << n) - 1));
    s.remove(i);
    s.remove(j);
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reconstruction_commutes_with_relabelling(seed in any::<u64>(), n in 3usize..=5, shift in 1usize..5) {
        let Some(m) = small_model(seed, n) else { return Ok(()) };
        let perm: Vec<usize> = (0..n).map(|v| (v + shift) % n).collect();
        let params = GemdParams { lag_depth: 4, ..GemdParams::default() };
        let a = gemd(&m.population_autocovariance(4).unwrap(), &params).unwrap();
        let b = gemd(&relabel(&m, &perm).population_autocovariance(4).unwrap(), &params).unwrap();
        let moved: BTreeSet<_> = a.graph.undirected().iter().map(|&(x, y)| (perm[x].min(perm[y]), perm[x].max(perm[y]))).collect();
        prop_assert_eq!(&moved, b.graph.undirected());
        let moved: BTreeSet<_> = a.graph.double_headed().iter().map(|&(x, y)| (perm[x], perm[y])).collect();
        prop_assert_eq!(&moved, b.graph.double_headed());
    }

    #[test]
    fn population_output_is_sound(seed in any::<u64>(), n in 3usize..=5) {
        let Some(m) = small_model(seed, n) else { return Ok(()) };
        let truth = m.perfect_representation();
        let r = gemd(&m.population_autocovariance(4).unwrap(), &GemdParams { lag_depth: 4, ..GemdParams::default() }).unwrap();
        for &(a, b) in r.graph.undirected() {
            prop_assert!(truth.single_headed().contains(&(a, b)) || truth.single_headed().contains(&(b, a)));
        }
        for e in r.graph.double_headed() {
            prop_assert!(truth.double_headed().contains(e));
        }
    }

    #[test]
    fn d_connection_is_symmetric(bits in any::<u64>(), n in 2usize..=7, cond in any::<u64>()) {
        let edges = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| a != b && bits >> ((a * 7 + b) % 64) & 1 == 1);
        let g = DiGraph::new(n, edges);
        for i in 0..n {
            for j in i + 1..n {
                let s = cond_set(cond, n, i, j);
                prop_assert_eq!(g.d_connected(i, j, s), g.d_connected(j, i, s));
            }
        }
    }

    #[test]
    fn adjacent_vertices_stay_connected(bits in any::<u64>(), n in 2usize..=7, cond in any::<u64>()) {
        let edges: Vec<_> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| a != b && bits >> ((a * 5 + b) % 64) & 1 == 1).collect();
        let g = DiGraph::new(n, edges.iter().copied());
        for &(a, b) in &edges {
            let s = cond_set(cond, n, a, b);
            prop_assert!(g.d_connected(a, b, s));
        }
    }
}

#[test]
fn same_seed_same_path() {
    let m = LdimModel::with_white_noise(2, [(0, 1, TransferFunction::gain(0.5))]).unwrap();
    assert_eq!(simulate(&m, 200, 3).unwrap(), simulate(&m, 200, 3).unwrap());
    assert_ne!(simulate(&m, 200, 3).unwrap(), simulate(&m, 200, 4).unwrap());
}

#[test]
fn sample_reconstruction_of_a_chain() {
    // 1 -> 2 -> 3: the ends are separated by the middle
    let m = LdimModel::with_white_noise(3, [(0, 1, TransferFunction::gain(0.8)), (1, 2, TransferFunction::gain(0.8))]).unwrap();
    let data = simulate(&m, 20_000, 1).unwrap();
    let params = GemdParams { lag_depth: 3, ..GemdParams::with_threshold(0.01) };
    let r = gemd(&empirical_autocovariance(&data, 3).unwrap(), &params).unwrap();
    assert_eq!(r.graph.undirected(), &BTreeSet::from([(0, 1), (1, 2)]));
    assert!(r.graph.double_headed().is_empty());
    assert_eq!(r.feedthrough_record(0, 2).unwrap().separating_set, Some(VertexSet::singleton(1)));
}

#[test]
fn graph_json_round_trip() {
    let g = MultiArrowGraph::new(3, [(0, 1)], [(2, 0)]).unwrap();
    let text = serde_json::to_string(&g).unwrap();
    assert_eq!(text, r#"{"n":3,"e1":[[1,2]],"e2":[[3,1]]}"#);
    assert_eq!(serde_json::from_str::<MultiArrowGraph>(&text).unwrap(), g);
}
