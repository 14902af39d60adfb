//! Built-in data sets, available by name.

use crate::exactmath::rational::{int, rat};
use crate::rootsys::{AmbientVector, RootSystemType};

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub ty: RootSystemType,
    pub q0: AmbientVector,
    pub p0: AmbientVector,
    /// Second position of a collision pair, when the preset has one.
    pub q2: Option<AmbientVector>,
    /// Time window and sample count for trajectories.
    pub window: (f64, f64),
    pub steps: usize,
}

pub const NAMES: [&str; 3] = ["a2-paper", "a2-literal", "a5-paper"];

fn a2_q0() -> AmbientVector {
    AmbientVector(vec![rat(3, 5), rat(-1, 10), rat(-1, 2)])
}

pub fn preset(name: &str) -> Option<Preset> {
    let a2 = || "A2".parse::<RootSystemType>().unwrap();
    match name {
        "a2-paper" => Some(Preset {
            name: "a2-paper",
            description: "A2 worked example; momentum (-10, 10, 0) gives the reference characteristic polynomial",
            ty: a2(),
            q0: a2_q0(),
            p0: AmbientVector(vec![int(-10), int(10), int(0)]),
            q2: None,
            window: (-1.0, 1.0),
            steps: 2001,
        }),
        "a2-literal" => Some(Preset {
            name: "a2-literal",
            description: "A2 worked example with momentum (1/10, -1/10, 0)",
            ty: a2(),
            q0: a2_q0(),
            p0: AmbientVector(vec![rat(1, 10), rat(-1, 10), int(0)]),
            q2: None,
            window: (-5.0, 1.0),
            steps: 6001,
        }),
        "a5-paper" => Some(Preset {
            name: "a5-paper",
            description: "A5 positions with identical root inner-product multisets, at rest",
            ty: "A5".parse().unwrap(),
            q0: AmbientVector::from_ints(&[-28, -22, -16, 8, 20, 38]),
            p0: AmbientVector::zeros(6),
            q2: Some(AmbientVector::from_ints(&[-34, -28, 2, 8, 20, 32])),
            window: (-20.0, 20.0),
            steps: 401,
        }),
        _ => None,
    }
}
