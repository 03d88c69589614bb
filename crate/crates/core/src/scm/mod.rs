//! Linear non-Gaussian acyclic models: specification, random generation and
//! sampling.

mod data;
mod noise;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use data::DataMatrix;
pub use noise::NoiseDistribution;

/// A permutation of variable indices, earliest cause first. Indices are
/// 0-based in the API and 1-based in every serialized form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CausalOrdering(Vec<usize>);

impl CausalOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let p = order.len();
        let mut seen = vec![false; p];
        for &v in &order {
            if v >= p || seen[v] {
                return Err(Error::InvalidInput(format!("{order:?} is not a permutation of 0..{p}")));
            }
            seen[v] = true;
        }
        Ok(Self(order))
    }

    pub fn identity(p: usize) -> Self {
        Self((0..p).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `positions()[v]` is the causal position of variable `v`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (k, &v) in self.0.iter().enumerate() {
            pos[v] = k;
        }
        pos
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }

    pub fn from_one_based(order: &[usize]) -> Result<Self> {
        if order.contains(&0) {
            return Err(Error::InvalidInput("variable indices are 1-based".into()));
        }
        Self::new(order.iter().map(|v| v - 1).collect())
    }
}

impl Serialize for CausalOrdering {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CausalOrdering {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Self::from_one_based(&v).map_err(serde::de::Error::custom)
    }
}

/// Square matrix of connection strengths; entry `(i, j)` is the coefficient
/// of parent `j` in the equation of variable `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ConnectionMatrix {
    p: usize,
    values: Vec<f64>,
}

impl ConnectionMatrix {
    pub fn zeros(p: usize) -> Self {
        Self {
            p,
            values: vec![0.0; p * p],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let p = rows.len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidInput("connection matrix must be square".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("connection matrix must be finite".into()));
        }
        Ok(Self {
            p,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.p + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.p.max(1)).take(self.p).map(<[f64]>::to_vec).collect()
    }

    /// Nonzero entries as `(child, parent, weight)`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.p {
            for j in 0..self.p {
                let w = self.get(i, j);
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// True when every nonzero `(i, j)` has `j` before `i` in `ordering`.
    pub fn respects(&self, ordering: &CausalOrdering) -> bool {
        let pos = ordering.positions();
        self.edges().iter().all(|&(i, j, _)| pos[j] < pos[i])
    }

    /// Zero pattern of `self` contains the zero pattern of `other`.
    pub fn is_subgraph_of(&self, other: &ConnectionMatrix) -> bool {
        self.p == other.p
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| *a == 0.0 || *b != 0.0)
    }

    /// Reindexes rows and columns into causal order.
    pub fn permuted(&self, ordering: &CausalOrdering) -> Self {
        let o = ordering.as_slice();
        let mut out = Self::zeros(self.p);
        for (a, &i) in o.iter().enumerate() {
            for (b, &j) in o.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }

    pub fn is_strictly_lower_triangular(&self) -> bool {
        (0..self.p).all(|i| (i..self.p).all(|j| self.get(i, j) == 0.0))
    }
}

impl TryFrom<Vec<Vec<f64>>> for ConnectionMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<ConnectionMatrix> for Vec<Vec<f64>> {
    fn from(m: ConnectionMatrix) -> Self {
        m.rows()
    }
}

/// A generative model `X = B X + e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScmSpecWire", into = "ScmSpecWire")]
pub struct ScmSpec {
    pub ordering: CausalOrdering,
    pub b: ConnectionMatrix,
    pub noise: Vec<NoiseDistribution>,
}

#[derive(Serialize, Deserialize)]
struct ScmSpecWire {
    p: usize,
    order: CausalOrdering,
    #[serde(rename = "B")]
    b: ConnectionMatrix,
    noise: Vec<NoiseDistribution>,
}

impl TryFrom<ScmSpecWire> for ScmSpec {
    type Error = Error;
    fn try_from(w: ScmSpecWire) -> Result<Self> {
        if w.p != w.order.len() {
            return Err(Error::InvalidInput("'p' disagrees with 'order'".into()));
        }
        Self::new(w.order, w.b, w.noise)
    }
}

impl From<ScmSpec> for ScmSpecWire {
    fn from(s: ScmSpec) -> Self {
        Self {
            p: s.p(),
            order: s.ordering,
            b: s.b,
            noise: s.noise,
        }
    }
}

impl ScmSpec {
    pub fn new(
        ordering: CausalOrdering,
        b: ConnectionMatrix,
        noise: Vec<NoiseDistribution>,
    ) -> Result<Self> {
        let p = ordering.len();
        if b.p() != p || noise.len() != p {
            return Err(Error::InvalidInput("ordering, B and noise sizes differ".into()));
        }
        if !b.respects(&ordering) {
            return Err(Error::InvalidInput("B is not acyclic under the ordering".into()));
        }
        for d in &noise {
            d.validate()?;
        }
        Ok(Self { ordering, b, noise })
    }

    pub fn p(&self) -> usize {
        self.ordering.len()
    }

    /// True when `candidate` places every parent before its child.
    pub fn is_consistent_ordering(&self, candidate: &CausalOrdering) -> bool {
        candidate.len() == self.p() && self.b.respects(candidate)
    }

    /// Draws `n` observations: noise is drawn one variable at a time, then the
    /// variables are filled in causal order.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<DataMatrix> {
        if n == 0 {
            return Err(Error::InvalidInput("sample size must be positive".into()));
        }
        let mut columns: Vec<Vec<f64>> = self.noise.iter().map(|d| d.draw_n(n, rng)).collect();
        let p = self.p();
        for &i in self.ordering.as_slice() {
            let parents: Vec<(usize, f64)> =
                (0..p).map(|j| (j, self.b.get(i, j))).filter(|&(_, w)| w != 0.0).collect();
            for row in 0..n {
                let mut acc = columns[i][row];
                for &(j, w) in &parents {
                    acc += w * columns[j][row];
                }
                columns[i][row] = acc;
            }
        }
        DataMatrix::from_columns(columns)
    }
}

/// Random model: uniform causal order, `Binomial(position - 1, q)` parents
/// drawn from the earlier variables, weights uniform on
/// `[-0.9, -0.1] U [0.1, 0.9]`, and the same noise family for every variable.
pub fn generate_random_scm<R: Rng + ?Sized>(
    p: usize,
    q: f64,
    noise: &NoiseDistribution,
    rng: &mut R,
) -> Result<ScmSpec> {
    if p == 0 {
        return Err(Error::InvalidInput("p must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidInput(format!("edge probability {q} outside [0, 1]")));
    }
    noise.validate()?;
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(rng);
    let mut b = ConnectionMatrix::zeros(p);
    for k in 1..p {
        let child = order[k];
        let count = Binomial::new(k as u64, q).expect("valid binomial").sample(rng) as usize;
        for slot in index::sample(rng, k, count) {
            let magnitude = rng.random_range(0.1..=0.9);
            let weight = if rng.random_bool(0.5) { magnitude } else { -magnitude };
            b.set(child, order[slot], weight);
        }
    }
    ScmSpec::new(CausalOrdering(order), b, vec![*noise; p])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn ordering_validation() {
        assert!(CausalOrdering::new(vec![2, 0, 1]).is_ok());
        assert!(CausalOrdering::new(vec![0, 0, 1]).is_err());
        assert!(CausalOrdering::new(vec![0, 3]).is_err());
        let o = CausalOrdering::new(vec![2, 0, 1]).unwrap();
        assert_eq!(o.positions(), vec![1, 2, 0]);
        assert_eq!(serde_json::to_string(&o).unwrap(), "[3,1,2]");
        assert!(serde_json::from_str::<CausalOrdering>("[0,1]").is_err());
    }

    #[test]
    fn single_variable_model() {
        let spec = generate_random_scm(1, 0.5, &NoiseDistribution::student_t(5.0), &mut stream(1, 0)).unwrap();
        assert_eq!(spec.ordering.as_slice(), [0]);
        assert_eq!(spec.b.get(0, 0), 0.0);
    }

    #[test]
    fn two_variables_full_density_has_one_edge() {
        for seed in 0..50 {
            let spec =
                generate_random_scm(2, 1.0, &NoiseDistribution::pareto(), &mut stream(seed, 0)).unwrap();
            assert_eq!(spec.b.edges().len(), 1);
        }
    }

    #[test]
    fn invalid_generator_arguments() {
        let t = NoiseDistribution::student_t(5.0);
        assert!(generate_random_scm(0, 0.5, &t, &mut stream(0, 0)).is_err());
        assert!(generate_random_scm(3, 1.5, &t, &mut stream(0, 0)).is_err());
    }

    #[test]
    fn single_row_sample() {
        let spec = generate_random_scm(4, 0.5, &NoiseDistribution::lognormal(), &mut stream(3, 0)).unwrap();
        let d = spec.sample(1, &mut stream(3, 1)).unwrap();
        assert_eq!(d.n(), 1);
        assert!(d.row(0).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = generate_random_scm(5, 0.6, &NoiseDistribution::exponential(), &mut stream(9, 0)).unwrap();
        let json = serde_json::to_value(&spec).unwrap();
        assert_eq!(json["p"], 5);
        assert!(json["B"].is_array());
        assert_eq!(json["noise"][0]["kind"], "exponential");
        let back: ScmSpec = serde_json::from_value(json).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn cyclic_spec_is_rejected() {
        let mut b = ConnectionMatrix::zeros(2);
        b.set(0, 1, 0.5);
        let t = NoiseDistribution::student_t(5.0);
        assert!(ScmSpec::new(CausalOrdering::identity(2), b, vec![t; 2]).is_err());
    }
}
