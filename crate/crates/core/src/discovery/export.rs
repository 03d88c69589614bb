use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CandidateScore, DiscoveryConfig, DiscoveryResult};
use crate::scm::{CausalOrdering, ConnectionMatrix};

#[derive(Serialize, Deserialize)]
struct ScoreWire {
    var: usize,
    #[serde(rename = "T")]
    t: f64,
}

#[derive(Serialize, Deserialize)]
struct ResultWire {
    order: CausalOrdering,
    #[serde(rename = "B")]
    b: ConnectionMatrix,
    statistics: Vec<Vec<ScoreWire>>,
    pruned: bool,
    config: DiscoveryConfig,
}

impl Serialize for DiscoveryResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ResultWire {
            order: self.ordering.clone(),
            b: self.b.clone(),
            statistics: self
                .statistics
                .iter()
                .map(|round| {
                    round
                        .iter()
                        .map(|c| ScoreWire { var: c.var + 1, t: c.t })
                        .collect()
                })
                .collect(),
            pruned: self.pruned,
            config: self.config.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscoveryResult {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let w = ResultWire::deserialize(deserializer)?;
        if w.b.p() != w.order.len() {
            return Err(serde::de::Error::custom("B and order disagree on p"));
        }
        let mut statistics = Vec::with_capacity(w.statistics.len());
        for round in w.statistics {
            let mut r = Vec::with_capacity(round.len());
            for s in round {
                if s.var == 0 || s.var > w.order.len() {
                    return Err(serde::de::Error::custom("statistic index out of range"));
                }
                r.push(CandidateScore { var: s.var - 1, t: s.t });
            }
            statistics.push(r);
        }
        Ok(Self {
            ordering: w.order,
            b: w.b,
            statistics,
            pruned: w.pruned,
            config: w.config,
        })
    }
}

fn quoted(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz digraph with an edge `j -> i` labelled `B[i][j]` (3 decimals)
/// for every nonzero entry. `names` defaults to `X1..Xp`.
pub fn to_dot(b: &ConnectionMatrix, names: Option<&[String]>) -> String {
    let name = |j: usize| match names {
        Some(ns) => ns[j].clone(),
        None => format!("X{}", j + 1),
    };
    let mut out = String::from("digraph {\n");
    for j in 0..b.p() {
        let _ = writeln!(out, "  {};", quoted(&name(j)));
    }
    for (child, parent, w) in b.edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{:.3}\"];",
            quoted(&name(parent)),
            quoted(&name(child)),
            w
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result() -> DiscoveryResult {
        let mut b = ConnectionMatrix::zeros(3);
        b.set(0, 2, 0.5);
        b.set(1, 0, -1.23456);
        DiscoveryResult {
            ordering: CausalOrdering::new(vec![2, 0, 1]).unwrap(),
            b,
            statistics: vec![
                vec![
                    CandidateScore { var: 0, t: 0.3 },
                    CandidateScore { var: 1, t: 0.2 },
                    CandidateScore { var: 2, t: 0.1 },
                ],
                vec![CandidateScore { var: 0, t: 0.05 }, CandidateScore { var: 1, t: 0.07 }],
            ],
            pruned: true,
            config: DiscoveryConfig::theil_sen(),
        }
    }

    #[test]
    fn json_schema() {
        let v = serde_json::to_value(result()).unwrap();
        assert_eq!(v["order"], serde_json::json!([3, 1, 2]));
        assert_eq!(v["B"][1][0], serde_json::json!(-1.23456));
        assert_eq!(v["statistics"][0][2], serde_json::json!({"var": 3, "T": 0.1}));
        assert_eq!(v["config"]["slope"], "ts");
        let back: DiscoveryResult = serde_json::from_value(v).unwrap();
        assert_eq!(back, result());
    }

    #[test]
    fn dot_edges() {
        let dot = to_dot(&result().b, None);
        assert!(dot.contains("\"X3\" -> \"X1\" [label=\"0.500\"];"));
        assert!(dot.contains("\"X1\" -> \"X2\" [label=\"-1.235\"];"));
        assert_eq!(dot.matches("->").count(), 2);
        let names = vec!["a".to_string(), "b\"q".to_string(), "c".to_string()];
        assert!(to_dot(&result().b, Some(&names)).contains("\"a\" -> \"b\\\"q\""));
    }
}
