use ritherm::currents::heat_rate_general;
use ritherm::linalg::trace_distance;
use ritherm::models::{BathPair, BathSpec, ChainSpec, Side};
use ritherm::ri_map::{ri_fixed_point, RiConfig};
use ritherm::steady_state::{solve_chain, SteadyOptions};

fn fig4(h_l: f64) -> (ChainSpec, BathPair) {
    let spec = ChainSpec::xxz(3, 1.0, 0.0, 1.0);
    let baths = BathPair::new(
        BathSpec::spin(Side::L, 2.0, h_l, 1.0),
        BathSpec::spin(Side::R, 9.0, 0.2, 1.0),
    )
    .unwrap();
    (spec, baths)
}

#[test]
fn fixed_point_error_is_first_order_in_tau() {
    let (spec, baths) = fig4(0.5);
    let lme = solve_chain(&spec, &baths, &SteadyOptions::default()).unwrap();
    let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
        .iter()
        .map(|&tau| {
            let fp = ri_fixed_point(&spec, &baths, &RiConfig::new(tau)).unwrap();
            trace_distance(&fp.steady.rho, &lme.rho).unwrap()
        })
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.6..=2.4).contains(&ratio), "errors {errs:?}");
    }
}

#[test]
fn stationary_heat_rate_approaches_master_equation() {
    let (spec, baths) = fig4(0.5);
    let lme = solve_chain(&spec, &baths, &SteadyOptions::default()).unwrap();
    let q = heat_rate_general(&spec, &baths.left, &lme.rho).unwrap();
    let fp = ri_fixed_point(&spec, &baths, &RiConfig::new(1e-3)).unwrap();
    assert!(
        (fp.rates.qdot_l - q).abs() <= 0.05 * q.abs(),
        "{} vs {q}",
        fp.rates.qdot_l
    );
    let last = fp.history.last().unwrap();
    assert!(last.work_mismatch().abs() < 1e-8);
}

#[test]
fn bosonic_stationary_heat_rate() {
    let (g, omega) = (0.5, 1.0);
    let spec = ChainSpec::ising(2, 0.6).with_field(0.4);
    let baths = BathPair::new(
        BathSpec::bosonic(Side::L, 3.0, omega, g),
        BathSpec::bosonic(Side::R, 4.0, omega, g),
    )
    .unwrap();
    let fp = ri_fixed_point(&spec, &baths, &RiConfig::new(1e-3)).unwrap();
    let target = -g * g * omega;
    assert!((fp.rates.qdot_l - target).abs() <= 0.05 * target.abs());
}
