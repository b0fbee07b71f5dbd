use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::HarnessError;
use crate::assignment::{ged_bipartite, ged_hed, CostModel, LapSolver};
use crate::exact::{ged_astar_with, ged_beam, AStarOptions, GedResult};
use crate::graph::LabeledGraph;
use crate::model::ModelKind;

/// A way of scoring graph pairs: a trained model or a GED algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gsimcnn,
    Embavg,
    Astar,
    Beam(usize),
    Hungarian(CostModel),
    Vj(CostModel),
    Hed,
}

impl Method {
    pub const DEFAULT_EVAL: [Method; 6] = [
        Method::Gsimcnn,
        Method::Embavg,
        Method::Beam(100),
        Method::Hungarian(CostModel::Augmented),
        Method::Vj(CostModel::Augmented),
        Method::Hed,
    ];

    pub fn model_kind(self) -> Option<ModelKind> {
        match self {
            Method::Gsimcnn => Some(ModelKind::Gsimcnn),
            Method::Embavg => Some(ModelKind::Embavg),
            _ => None,
        }
    }

    /// Runs an algorithmic method; `None` for learned models. A* is
    /// unbounded in size here and may exhaust its budget.
    pub fn distance(self, g1: &LabeledGraph, g2: &LabeledGraph) -> Option<Result<GedResult, HarnessError>> {
        Some(Ok(match self {
            Method::Gsimcnn | Method::Embavg => return None,
            Method::Astar => {
                let options = AStarOptions { max_nodes: usize::MAX, ..AStarOptions::default() };
                match ged_astar_with(g1, g2, &options) {
                    Ok(r) => r,
                    Err(e) => return Some(Err(HarnessError::Solver(e.to_string()))),
                }
            }
            Method::Beam(w) => ged_beam(g1, g2, w),
            Method::Hungarian(model) => ged_bipartite(g1, g2, LapSolver::Hungarian, model),
            Method::Vj(model) => ged_bipartite(g1, g2, LapSolver::Jv, model),
            Method::Hed => ged_hed(g1, g2),
        }))
    }

    /// File-name friendly form of the method name.
    pub fn file_stem(self) -> String {
        self.to_string().replace(':', "_")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paper = |m: &CostModel| if *m == CostModel::Paper { ":paper" } else { "" };
        match self {
            Method::Gsimcnn => write!(f, "gsimcnn"),
            Method::Embavg => write!(f, "embavg"),
            Method::Astar => write!(f, "astar"),
            Method::Beam(w) => write!(f, "beam:{w}"),
            Method::Hungarian(m) => write!(f, "hungarian{}", paper(m)),
            Method::Vj(m) => write!(f, "vj{}", paper(m)),
            Method::Hed => write!(f, "hed"),
        }
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::Config(format!("unknown method {s:?}"));
        Ok(match s {
            "gsimcnn" => Method::Gsimcnn,
            "embavg" => Method::Embavg,
            "astar" => Method::Astar,
            "hungarian" => Method::Hungarian(CostModel::Augmented),
            "hungarian:paper" => Method::Hungarian(CostModel::Paper),
            "vj" => Method::Vj(CostModel::Augmented),
            "vj:paper" => Method::Vj(CostModel::Paper),
            "hed" => Method::Hed,
            _ => {
                let width = s.strip_prefix("beam:").ok_or_else(bad)?;
                match width.parse::<usize>() {
                    Ok(w) if w >= 1 => Method::Beam(w),
                    _ => return Err(bad()),
                }
            }
        })
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
