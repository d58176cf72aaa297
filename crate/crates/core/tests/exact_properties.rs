use confnet_core::mc_sim::exact_connectivity_from_matrix;
use proptest::prelude::*;

fn symmetric(n: usize, upper: &[f64]) -> Vec<Vec<f64>> {
    let mut h = vec![vec![0.0; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            h[i][j] = upper[k];
            h[j][i] = upper[k];
            k += 1;
        }
    }
    h
}

fn instance() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2usize..=7).prop_flat_map(|n| (Just(n), proptest::collection::vec(0.0f64..=1.0, n * (n - 1) / 2)))
}

proptest! {
    #[test]
    fn probability_in_unit_interval((n, upper) in instance()) {
        let p = exact_connectivity_from_matrix(&symmetric(n, &upper)).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn invariant_under_relabelling((n, upper) in instance(), shift in 1usize..7) {
        let h = symmetric(n, &upper);
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let g: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| h[perm[i]][perm[j]]).collect()).collect();
        let a = exact_connectivity_from_matrix(&h).unwrap();
        let b = exact_connectivity_from_matrix(&g).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_edge_probabilities((n, upper) in instance(), boost in 0.0f64..1.0) {
        let raised: Vec<f64> = upper.iter().map(|p| p + (1.0 - p) * boost).collect();
        let a = exact_connectivity_from_matrix(&symmetric(n, &upper)).unwrap();
        let b = exact_connectivity_from_matrix(&symmetric(n, &raised)).unwrap();
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn certain_spanning_path_connects((n, upper) in instance()) {
        let mut h = symmetric(n, &upper);
        for i in 0..n - 1 {
            h[i][i + 1] = 1.0;
            h[i + 1][i] = 1.0;
        }
        prop_assert!((exact_connectivity_from_matrix(&h).unwrap() - 1.0).abs() < 1e-12);
    }
}
