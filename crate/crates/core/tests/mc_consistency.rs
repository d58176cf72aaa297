use confnet_core::geometry::{cube_prism, house_prism};
use confnet_core::linkmodels::{ConnectionModel, PathLossParams};
use confnet_core::mc_sim::{
    edge_resampling_estimate, exact_connectivity_probability, run_trials, McConfig,
};
use confnet_core::pfc_analytic::assemble;

fn mimo() -> ConnectionModel {
    ConnectionModel::mimo(2, 2, PathLossParams::new(1.0, 2.0, 3).unwrap()).unwrap()
}

#[test]
fn two_nodes_connect_with_the_pair_probability() {
    let model = mimo();
    let pts = [[0.0, 0.0, 0.0], [1.3, 0.4, 0.2]];
    let r = (1.3f64 * 1.3 + 0.16 + 0.04).sqrt();
    let p = exact_connectivity_probability(&pts, &model).unwrap();
    assert!((p - model.pair_connectedness(r).unwrap()).abs() < 1e-15);
}

#[test]
fn five_points_in_the_house_match_resampling() {
    let model = mimo();
    let prism = house_prism(2.5).unwrap();
    for seed in 0..5 {
        let pts = prism.sample_uniform(5, 100 + seed);
        let p = exact_connectivity_probability(&pts, &model).unwrap();
        let est = edge_resampling_estimate(&pts, &model, 1_000_000, seed).unwrap();
        let sigma = (p * (1.0 - p) / 1e6).sqrt();
        assert!((est.p_fc_hat - p).abs() <= 4.0 * sigma.max(1e-12), "p={p} est={}", est.p_fc_hat);
    }
}

#[test]
fn isolated_nodes_explain_failures_at_high_density() {
    let model = mimo();
    let house = house_prism(7.0).unwrap();
    let rhos = [0.55, 0.7, 0.85];
    let mut estimates = Vec::new();
    for (i, &rho) in rhos.iter().enumerate() {
        let cfg = McConfig::from_density(rho, 1500, 900 + i as u64, model, house.clone()).unwrap();
        estimates.push(run_trials(&cfg).unwrap());
    }
    // no decrease beyond combined 3σ
    for w in estimates.windows(2) {
        let s = (w[0].std_error().powi(2) + w[1].std_error().powi(2)).sqrt();
        assert!(w[1].p_fc_hat >= w[0].p_fc_hat - 3.0 * s);
    }
    let top = estimates.last().unwrap();
    assert!(top.p_isolated_hat > 0.0);
    let ratio = top.p_out_hat() / top.p_isolated_hat;
    assert!((0.7..=1.3).contains(&ratio), "ratio {ratio}");
}

#[test]
fn analytic_outage_is_conservative_at_moderate_density() {
    // The first-order formula overestimates P_out before the high-density regime
    // and the two meet as ρ grows.
    let model = mimo();
    let house = house_prism(7.0).unwrap();
    let rho = 0.67;
    let analytic = assemble(&house, &model, &[rho]).unwrap()[0].p_fc;
    let est = run_trials(&McConfig::from_density(rho, 2000, 5, model, house).unwrap()).unwrap();
    assert!(est.p_fc_hat > analytic);
    assert!(est.p_fc_hat - analytic < 0.06);
}

#[test]
fn larger_domains_are_harder_to_connect() {
    let model = mimo();
    let small = run_trials(&McConfig::new(600, 60, 3, model, cube_prism(4.0).unwrap()).unwrap()).unwrap();
    let large = run_trials(&McConfig::new(600, 60, 3, model, cube_prism(6.0).unwrap()).unwrap()).unwrap();
    assert!(small.p_fc_hat > large.p_fc_hat);
}
