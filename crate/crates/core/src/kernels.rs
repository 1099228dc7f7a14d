//! Motif kernels evaluated on induced sub-networks of 2, 3 or 4 nodes.
//!
//! h₁ and h₂ act on pairs, h₃–h₅ on triples and h₆ on quadruples. The
//! quadruple kernel ψ combines them so that its average over all C(n,4)
//! quadruples reproduces the complete effect estimator exactly; it is the
//! unit evaluated on every subsampled quadruple of a reduced test.

use crate::error::{Error, Result};
use crate::network::{DirectedWeightedNetwork, EffectKind};

/// The sub-network induced by `K` distinct nodes of a parent network.
#[derive(Debug, Clone, Copy)]
pub struct TupleView<'a, const K: usize> {
    net: &'a DirectedWeightedNetwork,
    indices: [usize; K],
}

impl<'a, const K: usize> TupleView<'a, K> {
    pub fn new(net: &'a DirectedWeightedNetwork, indices: [usize; K]) -> Result<Self> {
        let n = net.n();
        let distinct = (0..K).all(|a| (a + 1..K).all(|b| indices[a] != indices[b]));
        if !distinct || indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidTuple {
                indices: indices.to_vec(),
                n,
            });
        }
        Ok(TupleView { net, indices })
    }

    /// Caller guarantees distinct in-range indices.
    #[inline(always)]
    pub(crate) fn new_unchecked(net: &'a DirectedWeightedNetwork, indices: [usize; K]) -> Self {
        debug_assert!(indices.iter().all(|&i| i < net.n()));
        TupleView { net, indices }
    }

    pub fn indices(&self) -> [usize; K] {
        self.indices
    }

    /// Size of the parent network (not of the tuple).
    pub fn network_size(&self) -> usize {
        self.net.n()
    }

    /// Weight between the a-th and b-th tuple members.
    #[inline(always)]
    fn w(&self, a: usize, b: usize) -> f64 {
        self.net.weight(self.indices[a], self.indices[b])
    }

    /// The K×K induced weight matrix.
    #[inline(always)]
    fn local(&self) -> [[f64; K]; K] {
        let mut m = [[0.0; K]; K];
        for (a, row) in m.iter_mut().enumerate() {
            for (b, cell) in row.iter_mut().enumerate() {
                if a != b {
                    *cell = self.w(a, b);
                }
            }
        }
        m
    }
}

/// Edge mean of a pair, (e_ij + e_ji)/2.
pub fn h1(pair: &TupleView<'_, 2>) -> f64 {
    (pair.w(0, 1) + pair.w(1, 0)) / 2.0
}

/// Reciprocal product e_ij·e_ji.
pub fn h2(pair: &TupleView<'_, 2>) -> f64 {
    pair.w(0, 1) * pair.w(1, 0)
}

/// Common-sender products averaged over the three possible senders.
pub fn h3(triple: &TupleView<'_, 3>) -> f64 {
    h3_local(&triple.local(), [0, 1, 2])
}

/// Common-receiver products averaged over the three possible receivers.
pub fn h4(triple: &TupleView<'_, 3>) -> f64 {
    h4_local(&triple.local(), [0, 1, 2])
}

/// Two-path products averaged over all six orderings of the triple.
pub fn h5(triple: &TupleView<'_, 3>) -> f64 {
    h5_local(&triple.local(), [0, 1, 2])
}

/// Disjoint-pair products e_ab·e_cd averaged over all 24 orderings.
pub fn h6(quad: &TupleView<'_, 4>) -> f64 {
    let w = quad.local();
    let s = sym(&w);
    h6_sym(&s)
}

/// Finite-sample correction term of ψ; of order 1/n.
pub fn r_correction(quad: &TupleView<'_, 4>) -> f64 {
    let w = quad.local();
    let s = sym(&w);
    r_from_parts(&w, &s, quad.network_size())
}

/// Quadruple kernel whose average over all quadruples equals the complete
/// estimator of `effect`.
#[inline]
pub fn psi(effect: EffectKind, quad: &TupleView<'_, 4>) -> f64 {
    let w = quad.local();
    let s = sym(&w);
    let n = quad.network_size();
    let lead = match effect {
        EffectKind::Reciprocity => {
            let mut acc = 0.0;
            for a in 0..4 {
                for b in a + 1..4 {
                    acc += w[a][b] * w[b][a];
                }
            }
            acc / 6.0
        }
        EffectKind::SameSender => TRIPLES.iter().map(|&t| h3_local(&w, t)).sum::<f64>() / 4.0,
        EffectKind::SameReceiver => TRIPLES.iter().map(|&t| h4_local(&w, t)).sum::<f64>() / 4.0,
        EffectKind::SenderReceiver => TRIPLES.iter().map(|&t| h5_local(&w, t)).sum::<f64>() / 4.0,
    };
    lead - h6_sym(&s) + r_from_parts(&w, &s, n)
}

const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

#[inline(always)]
fn h3_local<const K: usize>(w: &[[f64; K]; K], [i, j, k]: [usize; 3]) -> f64 {
    (w[i][j] * w[i][k] + w[j][i] * w[j][k] + w[k][i] * w[k][j]) / 3.0
}

#[inline(always)]
fn h4_local<const K: usize>(w: &[[f64; K]; K], [i, j, k]: [usize; 3]) -> f64 {
    (w[i][j] * w[k][j] + w[j][i] * w[k][i] + w[i][k] * w[j][k]) / 3.0
}

#[inline(always)]
fn h5_local<const K: usize>(w: &[[f64; K]; K], [i, j, k]: [usize; 3]) -> f64 {
    // each of the six orderings (a,b,c) contributes e_ab·e_bc
    (w[i][j] * w[j][k]
        + w[i][k] * w[k][j]
        + w[j][i] * w[i][k]
        + w[j][k] * w[k][i]
        + w[k][i] * w[i][j]
        + w[k][j] * w[j][i])
        / 6.0
}

/// s[a][b] = w_ab + w_ba.
#[inline(always)]
fn sym(w: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut s = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            s[a][b] = w[a][b] + w[b][a];
        }
    }
    s
}

#[inline(always)]
fn h6_sym(s: &[[f64; 4]; 4]) -> f64 {
    // 3 perfect matchings, 8 orderings each
    (s[0][1] * s[2][3] + s[0][2] * s[1][3] + s[0][3] * s[1][2]) / 12.0
}

#[inline(always)]
fn r_from_parts(w: &[[f64; 4]; 4], s: &[[f64; 4]; 4], n: usize) -> f64 {
    let n = n as f64;
    let pairs = n * n - n;
    // Σ over 12 ordered pairs of (e_ab e_ba + e_ab²) = Σ over 6 unordered of s_ab²
    let mut pair_sum = 0.0;
    for a in 0..4 {
        for b in a + 1..4 {
            pair_sum += s[a][b] * s[a][b];
        }
    }
    let triple_sum: f64 = TRIPLES
        .iter()
        .map(|&t| h3_local(w, t) + h4_local(w, t) + 2.0 * h5_local(w, t))
        .sum();
    -(pair_sum / (12.0 * pairs) + (n - 2.0) * triple_sum / (4.0 * pairs) + (6.0 - 4.0 * n) * h6_sym(s) / pairs)
}
