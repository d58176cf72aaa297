//! Exact connectivity probability of a random graph with independent edges,
//! by recursion over vertex subsets.

use crate::error::{Error, Result};
use crate::geometry::{distance, Point3};
use crate::linkmodels::ConnectionModel;

/// Largest node count accepted; cost grows as 3^N.
pub const EXACT_MAX_NODES: usize = 12;

/// P(graph connected) where edge (i, j) is present with probability `h[i][j]`.
///
/// f(S) = 1 − Σ_{T ⊊ S, anchor ∈ T} f(T) ∏_{i∈T, j∈S∖T} (1 − h_ij), anchor = lowest index.
pub fn exact_connectivity_from_matrix(h: &[Vec<f64>]) -> Result<f64> {
    let n = h.len();
    if n > EXACT_MAX_NODES {
        return Err(Error::Size(format!(
            "exact connectivity accepts at most {EXACT_MAX_NODES} nodes, got {n}"
        )));
    }
    if h.iter().any(|row| row.len() != n) {
        return Err(Error::Domain("probability matrix must be square".into()));
    }
    if n <= 1 {
        return Ok(1.0);
    }
    let full = 1usize << n;
    // miss[i][M] = ∏_{j ∈ M} (1 − h_ij)
    let mut miss = vec![vec![1.0f64; full]; n];
    for (i, row) in miss.iter_mut().enumerate() {
        for m in 1..full {
            let j = m.trailing_zeros() as usize;
            let q = if j == i { 1.0 } else { 1.0 - h[i][j] };
            row[m] = row[m & (m - 1)] * q;
        }
    }
    let mut f = vec![0.0f64; full];
    for s in 1..full {
        let anchor = s & s.wrapping_neg();
        if s == anchor {
            f[s] = 1.0;
            continue;
        }
        let rest = s ^ anchor;
        let mut disconnected = 0.0;
        // T = anchor ∪ sub for every proper subset `sub` of `rest`.
        let mut sub = (rest - 1) & rest;
        loop {
            let t = anchor | sub;
            let outside = s ^ t;
            let mut cut = 1.0;
            let mut bits = t;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                cut *= miss[i][outside];
                bits &= bits - 1;
            }
            disconnected += f[t] * cut;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        f[s] = 1.0 - disconnected;
    }
    Ok(f[full - 1].clamp(0.0, 1.0))
}

/// Exact P_fc for nodes at fixed positions under `model`.
pub fn exact_connectivity_probability(points: &[Point3], model: &ConnectionModel) -> Result<f64> {
    if points.len() > EXACT_MAX_NODES {
        return Err(Error::Size(format!(
            "exact connectivity accepts at most {EXACT_MAX_NODES} nodes, got {}",
            points.len()
        )));
    }
    let n = points.len();
    let mut h = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let p = model.pair_connectedness(distance(&points[i], &points[j]))?;
            h[i][j] = p;
            h[j][i] = p;
        }
    }
    exact_connectivity_from_matrix(&h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc_sim::connectivity_check;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(h: &[Vec<f64>]) -> f64 {
        let n = h.len();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut total = 0.0;
        for mask in 0u32..(1 << pairs.len()) {
            let mut prob = 1.0;
            let mut edges = Vec::new();
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    prob *= h[i][j];
                    edges.push((i, j));
                } else {
                    prob *= 1.0 - h[i][j];
                }
            }
            if connectivity_check(n, &edges).unwrap().connected {
                total += prob;
            }
        }
        total
    }

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let p: f64 = rng.random();
                h[i][j] = p;
                h[j][i] = p;
            }
        }
        h
    }

    #[test]
    fn two_nodes_give_the_edge_probability() {
        let h = vec![vec![0.0, 0.37], vec![0.37, 0.0]];
        assert!((exact_connectivity_from_matrix(&h).unwrap() - 0.37).abs() < 1e-15);
    }

    #[test]
    fn triangle_closed_form() {
        for p in [0.0, 0.1, 0.5, 0.93, 1.0] {
            let h = vec![vec![0.0, p, p], vec![p, 0.0, p], vec![p, p, 0.0]];
            let expected = p * p * p + 3.0 * p * p * (1.0 - p);
            assert!((exact_connectivity_from_matrix(&h).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_edge_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=5 {
            for _ in 0..40 {
                let h = random_matrix(n, &mut rng);
                let exact = exact_connectivity_from_matrix(&h).unwrap();
                assert!((exact - brute_force(&h)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn size_limit() {
        let pts = vec![[0.0; 3]; EXACT_MAX_NODES + 1];
        let model = ConnectionModel::siso(
            crate::linkmodels::PathLossParams::new(1.0, 2.0, 3).unwrap(),
        );
        assert!(matches!(exact_connectivity_probability(&pts, &model), Err(Error::Size(_))));
        let pts = vec![[0.0; 3]; EXACT_MAX_NODES];
        assert!((exact_connectivity_probability(&pts, &model).unwrap() - 1.0).abs() < 1e-12);
    }
}
