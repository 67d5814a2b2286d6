//! Named models: the cancelling triangle and its twin, the diamond and the
//! six-node feedback network.
//!
//! Vertices are 0-based here; the comments use the 1-based labels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ldim::LdimModel;
use crate::lti::TransferFunction;

fn g(x: f64) -> TransferFunction {
    TransferFunction::gain(x)
}

/// `y_2 = a y_1 + e_2`, `y_3 = c y_1 + b y_2 + e_3`, unit white noise.
/// With `c = -a b` the pair `(y_1, y_3)` is uncorrelated despite the edge.
pub fn sec3_triangle(a: f64, b: f64, c: f64) -> Result<LdimModel> {
    LdimModel::with_white_noise(3, [(0, 1, g(a)), (0, 2, g(c)), (1, 2, g(b))])
}

/// Second structure with the same spectrum as `sec3_triangle(a, b, -a b)`:
/// `y_2 = a y_1 + b/(b^2+1) y_3 + e_2` with noise variances
/// `(1, 1/(b^2+1), b^2+1)`.
pub fn sec3_twin(a: f64, b: f64) -> Result<LdimModel> {
    let s = b * b + 1.0;
    LdimModel::new(3, [(0, 1, g(a)), (2, 1, g(b / s))], vec![g(1.0); 3], vec![1.0, 1.0 / s, s])
}

/// Diamond `1 -> 2 -> 3 -> 4 <- 1`, `4 -> 5`; gains in that edge order.
pub fn example1_diamond(gains: [f64; 5]) -> Result<LdimModel> {
    LdimModel::with_white_noise(
        5,
        [(0, 1, g(gains[0])), (1, 2, g(gains[1])), (0, 3, g(gains[2])), (2, 3, g(gains[3])), (3, 4, g(gains[4]))],
    )
}

/// Where the strictly causal coefficient `b_32` enters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum B32Placement {
    /// `H_32 = a_32 + b_32 z^{-1}`.
    #[default]
    Combined,
    /// `H_32 = a_32` and a separate feedback entry `H_23 = b_32 z^{-1}`.
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example2Params {
    pub a21: f64,
    pub a32: f64,
    pub a42: f64,
    pub a43: f64,
    pub a54: f64,
    pub a64: f64,
    pub b32: f64,
    pub b25: f64,
    #[serde(default)]
    pub placement: B32Placement,
}

impl Example2Params {
    pub fn uniform(v: f64) -> Self {
        Self { a21: v, a32: v, a42: v, a43: v, a54: v, a64: v, b32: v, b25: v, placement: B32Placement::Combined }
    }

    /// Every coefficient drawn independently from `U(low, high)`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, low: f64, high: f64) -> Self {
        let mut d = || rng.random_range(low..high);
        Self {
            a21: d(),
            a32: d(),
            a42: d(),
            a43: d(),
            a54: d(),
            a64: d(),
            b32: d(),
            b25: d(),
            placement: B32Placement::Combined,
        }
    }
}

/// Six processes with gains on `1->2, 2->3, 2->4, 3->4, 4->5, 6->4`, a
/// delayed term `b_32` (see [`B32Placement`]) and delayed feedback
/// `5 => 2` with coefficient `b_25`.
pub fn example2_network(p: &Example2Params) -> Result<LdimModel> {
    let mut entries = vec![
        (0, 1, g(p.a21)),
        (1, 3, g(p.a42)),
        (2, 3, g(p.a43)),
        (3, 4, g(p.a54)),
        (5, 3, g(p.a64)),
        (4, 1, TransferFunction::delay(p.b25)),
    ];
    match p.placement {
        B32Placement::Combined => entries.push((1, 2, TransferFunction::fir(vec![p.a32, p.b32]))),
        B32Placement::Reverse => {
            entries.push((1, 2, g(p.a32)));
            entries.push((2, 1, TransferFunction::delay(p.b32)));
        }
    }
    LdimModel::with_white_noise(6, entries)
}

pub const BUILTIN_NAMES: [&str; 3] = ["sec3_triangle", "example1_diamond", "example2_network"];

/// Builtins with fixed default coefficients. The triangle defaults to the
/// cancelling parameterization.
pub fn builtin(name: &str) -> Result<LdimModel> {
    match name {
        "sec3_triangle" => sec3_triangle(0.6, 0.5, -0.3),
        "example1_diamond" => example1_diamond([1.0; 5]),
        "example2_network" => example2_network(&Example2Params::uniform(0.45)),
        other => Err(Error::Config(format!("unknown builtin model '{other}' (expected one of {})", BUILTIN_NAMES.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Complex;

    #[test]
    fn builtins_validate() {
        for name in BUILTIN_NAMES {
            let m = builtin(name).unwrap();
            assert!(m.validate().passed());
            assert!(m.perfect_representation().check_recursive());
            assert!(m.to_state_space().is_ok());
        }
        assert!(builtin("nope").is_err());
    }

    #[test]
    fn six_node_structure() {
        let gr = example2_network(&Example2Params::uniform(0.4)).unwrap().perfect_representation();
        let e1: Vec<_> = gr.single_headed().iter().map(|&(a, b)| (a + 1, b + 1)).collect();
        assert_eq!(e1, vec![(1, 2), (2, 3), (2, 4), (3, 4), (4, 5), (6, 4)]);
        let e2: Vec<_> = gr.double_headed().iter().map(|&(a, b)| (a + 1, b + 1)).collect();
        assert_eq!(e2, vec![(5, 2)]);
        let reverse = Example2Params { placement: B32Placement::Reverse, ..Example2Params::uniform(0.4) };
        let gr = example2_network(&reverse).unwrap().perfect_representation();
        assert!(gr.double_headed().contains(&(2, 1)));
    }

    #[test]
    fn diamond_structure() {
        let gr = example1_diamond([1.0; 5]).unwrap().perfect_representation();
        assert_eq!(gr.single_headed().len(), 5);
        assert!(gr.double_headed().is_empty());
    }

    #[test]
    fn twins_share_a_spectrum() {
        let (a, b) = (1.0, 1.0);
        let m1 = sec3_triangle(a, b, -a * b).unwrap();
        let m2 = sec3_twin(a, b).unwrap();
        let expect = [[1.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]];
        for w in [0.0, 0.9, 3.0] {
            let (p1, p2) = (m1.psd(w).unwrap(), m2.psd(w).unwrap());
            assert!((&p1 - &p2).camax() < 1e-12);
            for r in 0..3 {
                for c in 0..3 {
                    assert!((p1[(r, c)] - Complex::new(expect[r][c], 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}
