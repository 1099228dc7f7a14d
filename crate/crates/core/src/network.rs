//! Dense weighted directed networks and edge-list ingestion.
//!
//! Every ordered pair of distinct nodes carries a weight; pairs missing from
//! an edge list are stored as zero. The diagonal is always zero.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four network effects under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EffectKind {
    /// η₂ = Cov(e_ij, e_ji)
    #[serde(rename = "eta2")]
    Reciprocity,
    /// η₃ = Cov(e_ij, e_ik)
    #[serde(rename = "eta3")]
    SameSender,
    /// η₄ = Cov(e_ji, e_ki)
    #[serde(rename = "eta4")]
    SameReceiver,
    /// η₅ = Cov(e_ij, e_jk)
    #[serde(rename = "eta5")]
    SenderReceiver,
}

impl EffectKind {
    pub const ALL: [EffectKind; 4] = [
        EffectKind::Reciprocity,
        EffectKind::SameSender,
        EffectKind::SameReceiver,
        EffectKind::SenderReceiver,
    ];

    pub fn code(self) -> &'static str {
        match self {
            EffectKind::Reciprocity => "eta2",
            EffectKind::SameSender => "eta3",
            EffectKind::SameReceiver => "eta4",
            EffectKind::SenderReceiver => "eta5",
        }
    }

    /// Effects whose complete estimator may or may not be degenerate under
    /// the null, and so go through the degeneracy diagnostic first.
    pub fn has_diagnostic(self) -> bool {
        matches!(self, EffectKind::Reciprocity | EffectKind::SenderReceiver)
    }
}

impl fmt::Display for EffectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for EffectKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eta2" | "reciprocity" => Ok(EffectKind::Reciprocity),
            "eta3" | "same-sender" | "same_sender" => Ok(EffectKind::SameSender),
            "eta4" | "same-receiver" | "same_receiver" => Ok(EffectKind::SameReceiver),
            "eta5" | "sender-receiver" | "sender_receiver" => Ok(EffectKind::SenderReceiver),
            other => Err(Error::InvalidParameter(format!("unknown effect '{other}'"))),
        }
    }
}

/// A single weighted directed edge, as read from an edge list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

impl EdgeRecord {
    pub fn new(source: impl Into<String>, target: impl Into<String>, weight: f64) -> Self {
        EdgeRecord {
            source: source.into(),
            target: target.into(),
            weight,
        }
    }
}

/// Dense n×n weight matrix, row-major, zero diagonal, finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedWeightedNetwork {
    n: usize,
    weights: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl DirectedWeightedNetwork {
    /// Builds a network from a row-major weight matrix.
    pub fn from_dense(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewNodes { required: 2, actual: n });
        }
        if weights.len() != n * n {
            return Err(Error::DimensionMismatch { n, len: weights.len() });
        }
        for i in 0..n {
            if weights[i * n + i] != 0.0 {
                return Err(Error::NonZeroDiagonal(i));
            }
        }
        if let Some(pos) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFiniteWeight {
                from: (pos / n).to_string(),
                to: (pos % n).to_string(),
            });
        }
        Ok(DirectedWeightedNetwork {
            n,
            weights,
            labels: None,
        })
    }

    /// Builds a network by evaluating `f(i, j)` for every ordered pair i ≠ j.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    weights[i * n + j] = f(i, j);
                }
            }
        }
        Self::from_dense(n, weights)
    }

    /// Builds a network from edge records.
    ///
    /// Labels (from the records, plus `node_universe` if given) are sorted
    /// lexicographically and assigned indices in that order, so the result
    /// does not depend on record order. Unlisted pairs get weight 0.
    pub fn from_edge_list(records: &[EdgeRecord], node_universe: Option<&[String]>) -> Result<Self> {
        if records.is_empty() && node_universe.is_none_or(|u| u.is_empty()) {
            return Err(Error::EmptyNetwork);
        }
        for rec in records {
            if rec.source == rec.target {
                return Err(Error::SelfLoop(rec.source.clone()));
            }
            if !rec.weight.is_finite() {
                return Err(Error::NonFiniteWeight {
                    from: rec.source.clone(),
                    to: rec.target.clone(),
                });
            }
        }

        let labels: Vec<String> = match node_universe {
            Some(universe) => {
                let set: BTreeSet<&str> = universe.iter().map(String::as_str).collect();
                for rec in records {
                    for end in [&rec.source, &rec.target] {
                        if !set.contains(end.as_str()) {
                            return Err(Error::UnknownNode(end.clone()));
                        }
                    }
                }
                set.into_iter().map(str::to_owned).collect()
            }
            None => records
                .iter()
                .flat_map(|r| [r.source.as_str(), r.target.as_str()])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .map(str::to_owned)
                .collect(),
        };

        let n = labels.len();
        if n < 2 {
            return Err(Error::TooFewNodes { required: 2, actual: n });
        }
        let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();

        let mut weights = vec![0.0; n * n];
        let mut seen = vec![false; n * n];
        for rec in records {
            let cell = index[rec.source.as_str()] * n + index[rec.target.as_str()];
            if std::mem::replace(&mut seen[cell], true) {
                return Err(Error::DuplicateEdge {
                    from: rec.source.clone(),
                    to: rec.target.clone(),
                });
            }
            weights[cell] = rec.weight;
        }

        Ok(DirectedWeightedNetwork {
            n,
            weights,
            labels: Some(labels),
        })
    }

    /// Attaches node labels (one per index).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                n: self.n,
                len: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Weight of the edge i → j.
    #[inline(always)]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of node `i`, falling back to its index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(labels) => labels[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn require_nodes(&self, required: usize) -> Result<()> {
        if self.n < required {
            return Err(Error::TooFewNodes {
                required,
                actual: self.n,
            });
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                weights[j * n + i] = self.weights[i * n + j];
            }
        }
        DirectedWeightedNetwork {
            n,
            weights,
            labels: self.labels.clone(),
        }
    }

    /// Relabels nodes so that new node `perm[i]` is old node `i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut check = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut check[p], true)) {
            return Err(Error::InvalidParameter("not a permutation of the node set".into()));
        }
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                weights[perm[i] * n + perm[j]] = self.weights[i * n + j];
            }
        }
        Ok(DirectedWeightedNetwork {
            n,
            weights,
            labels: None,
        })
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_dense(self.n, self.weights.iter().map(|w| w * factor).collect())
    }

    /// Nonzero edges as records, in row-major order.
    pub fn edges(&self) -> Vec<EdgeRecord> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let w = self.weight(i, j);
                if i != j && w != 0.0 {
                    out.push(EdgeRecord::new(self.label(i), self.label(j), w));
                }
            }
        }
        out
    }

    /// Per-node row/column sums in one pass over the matrix.
    pub fn summaries(&self) -> RowColSummaries {
        RowColSummaries::compute(self)
    }
}

/// Per-node sums that the O(n²) estimators are built from.
#[derive(Debug, Clone, PartialEq)]
pub struct RowColSummaries {
    /// r_i = Σ_j e_ij
    pub out_sum: Vec<f64>,
    /// c_i = Σ_j e_ji
    pub in_sum: Vec<f64>,
    /// q_i = Σ_j e_ij²
    pub out_sq: Vec<f64>,
    /// q'_i = Σ_j e_ji²
    pub in_sq: Vec<f64>,
    /// t_i = Σ_j e_ij e_ji
    pub recip: Vec<f64>,
}

impl RowColSummaries {
    fn compute(net: &DirectedWeightedNetwork) -> Self {
        let n = net.n();
        let mut s = RowColSummaries {
            out_sum: vec![0.0; n],
            in_sum: vec![0.0; n],
            out_sq: vec![0.0; n],
            in_sq: vec![0.0; n],
            recip: vec![0.0; n],
        };
        for i in 0..n {
            let row = net.row(i);
            let (mut r, mut q) = (0.0, 0.0);
            for (j, &w) in row.iter().enumerate() {
                r += w;
                q += w * w;
                s.in_sum[j] += w;
                s.in_sq[j] += w * w;
            }
            s.out_sum[i] = r;
            s.out_sq[i] = q;
            // upper triangle only; each reciprocal product feeds both ends
            for (j, &w) in row.iter().enumerate().skip(i + 1) {
                let p = w * net.weight(j, i);
                s.recip[i] += p;
                s.recip[j] += p;
            }
        }
        s
    }

    /// Σ_{i≠j} e_ij
    pub fn total(&self) -> f64 {
        self.out_sum.iter().sum()
    }
}

/// Reads a `source,target,weight` CSV edge list (header required).
pub fn read_edge_list<R: Read>(reader: R) -> Result<Vec<EdgeRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["source", "target", "weight"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::Parse(format!(
            "expected header 'source,target,weight', found '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, row) in rdr.deserialize::<EdgeRecord>().enumerate() {
        // header is line 1
        out.push(row.map_err(|e| Error::Parse(format!("line {}: {e}", line + 2)))?);
    }
    Ok(out)
}

pub fn write_edge_list<W: Write>(writer: W, records: &[EdgeRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for rec in records {
        wtr.serialize(rec)?;
    }
    wtr.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> DirectedWeightedNetwork {
        // e12=1 e13=2 e21=3 e23=4 e31=5 e32=6
        DirectedWeightedNetwork::from_dense(3, vec![0., 1., 2., 3., 0., 4., 5., 6., 0.]).unwrap()
    }

    #[test]
    fn two_node_edge_list() {
        let recs = [EdgeRecord::new("a", "b", 1.0), EdgeRecord::new("b", "a", 2.0)];
        let net = DirectedWeightedNetwork::from_edge_list(&recs, None).unwrap();
        assert_eq!(net.n(), 2);
        assert_eq!(net.weight(0, 1), 1.0);
        assert_eq!(net.weight(1, 0), 2.0);
    }

    #[test]
    fn duplicate_edge_rejected() {
        let recs = [EdgeRecord::new("a", "b", 1.0), EdgeRecord::new("a", "b", 2.0)];
        assert!(matches!(
            DirectedWeightedNetwork::from_edge_list(&recs, None),
            Err(Error::DuplicateEdge { .. })
        ));
    }

    #[test]
    fn universe_zero_fills() {
        let universe: Vec<String> = ["c", "a", "b"].iter().map(|s| s.to_string()).collect();
        let recs = [EdgeRecord::new("a", "b", 1.0)];
        let net = DirectedWeightedNetwork::from_edge_list(&recs, Some(&universe)).unwrap();
        assert_eq!(net.n(), 3);
        assert_eq!(net.labels().unwrap(), &["a", "b", "c"]);
        let nonzero = net.as_slice().iter().filter(|&&w| w != 0.0).count();
        assert_eq!(nonzero, 1);
        assert_eq!(net.weight(0, 1), 1.0);
    }

    #[test]
    fn self_loop_and_non_finite_rejected() {
        let recs = [EdgeRecord::new("a", "a", 1.0)];
        assert_eq!(
            DirectedWeightedNetwork::from_edge_list(&recs, None),
            Err(Error::SelfLoop("a".into()))
        );
        let recs = [EdgeRecord::new("a", "b", f64::NAN)];
        assert!(matches!(
            DirectedWeightedNetwork::from_edge_list(&recs, None),
            Err(Error::NonFiniteWeight { .. })
        ));
        assert_eq!(
            DirectedWeightedNetwork::from_edge_list(&[], None),
            Err(Error::EmptyNetwork)
        );
    }

    #[test]
    fn unknown_node_outside_universe() {
        let universe = vec!["a".to_string(), "b".to_string()];
        let recs = [EdgeRecord::new("a", "z", 1.0)];
        assert_eq!(
            DirectedWeightedNetwork::from_edge_list(&recs, Some(&universe)),
            Err(Error::UnknownNode("z".into()))
        );
    }

    #[test]
    fn dense_validation() {
        assert!(matches!(
            DirectedWeightedNetwork::from_dense(2, vec![1., 0., 0., 0.]),
            Err(Error::NonZeroDiagonal(0))
        ));
        assert!(matches!(
            DirectedWeightedNetwork::from_dense(2, vec![0., 1., 0.]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            DirectedWeightedNetwork::from_dense(1, vec![0.]),
            Err(Error::TooFewNodes { .. })
        ));
    }

    #[test]
    fn worked_summaries() {
        let s = worked().summaries();
        assert_eq!(s.out_sum, vec![3., 7., 11.]);
        assert_eq!(s.in_sum, vec![8., 7., 6.]);
        assert_eq!(s.recip[0], 1. * 3. + 2. * 5.);
        assert_eq!(s.out_sq, vec![5., 25., 61.]);
        assert_eq!(s.in_sq, vec![34., 37., 20.]);
    }

    #[test]
    fn constant_summaries() {
        let n = 5;
        let net = DirectedWeightedNetwork::from_fn(n, |_, _| 1.5).unwrap();
        let s = net.summaries();
        assert!(s.out_sum.iter().all(|&r| r == 1.5 * (n - 1) as f64));
        let zero = DirectedWeightedNetwork::from_fn(n, |_, _| 0.0).unwrap().summaries();
        assert!(zero.recip.iter().chain(&zero.in_sq).all(|&v| v == 0.0));
    }

    #[test]
    fn csv_round_trip() {
        let text = "source,target,weight\nb,a,2.5\na,b,1\na,c,-3e-1\n";
        let recs = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 3);
        let net = DirectedWeightedNetwork::from_edge_list(&recs, None).unwrap();
        let mut back = net.edges();
        let mut orig = recs.clone();
        let key = |r: &EdgeRecord| (r.source.clone(), r.target.clone());
        back.sort_by_key(key);
        orig.sort_by_key(key);
        assert_eq!(back, orig);

        let mut buf = Vec::new();
        write_edge_list(&mut buf, &back).unwrap();
        assert_eq!(read_edge_list(buf.as_slice()).unwrap(), back);
    }

    #[test]
    fn csv_bad_header_and_weight() {
        assert!(read_edge_list("from,to,w\na,b,1\n".as_bytes()).is_err());
        let err = read_edge_list("source,target,weight\na,b,xyz\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn transpose_and_permute() {
        let net = worked();
        let t = net.transpose();
        assert_eq!(t.weight(0, 1), 3.0);
        let p = net.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.weight(2, 0), net.weight(0, 1));
        assert!(net.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn effect_kind_parse() {
        for e in EffectKind::ALL {
            assert_eq!(e.code().parse::<EffectKind>().unwrap(), e);
        }
        assert!("eta1".parse::<EffectKind>().is_err());
    }
}
