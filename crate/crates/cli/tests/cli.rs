use std::process::Command;

use rand::{Rng, SeedableRng};
use ritherm::currents::energy_current_closed_form_3site;
use ritherm_cli::config::{InversionKind, InversionSection};
use ritherm_cli::output::write_csv;
use ritherm_cli::presets::{self, PRESETS};
use ritherm_cli::ri_converge::run_ri_convergence;
use ritherm_cli::sweep::regime_segments;
use ritherm_cli::{check_one_way, run_sweep, Config, EvalOptions, Inversion, Param};

const FULL: &str = r#"
preset = "fig4"

[model]
kind = "xxz"
n_sites = 3
alpha = 1.5
Delta = 0.25
delta = 0.5
h = 0.1
fields = [0.1, 0.2, 0.3]
bond_deltas = [0.0, 0.5]

[bath_L]
kind = "spin"
beta = 2.0
gamma = 0.5

[bath_R]
kind = "spin"
f = -0.3
gamma = 1.0

[sweep]
parameter = "h_L"
from = -1.0
to = 1.0
points = 5
output = "out.csv"

[ri]
taus = [0.01, 0.005, 0.0025]
n_max = 12
max_cycles = 1000
convergence_tol = 1e-10

[inversion]
kind = "custom"
beta_L_scale = 1.0
h_L_scale = -1.0
beta_R_scale = 10.0
h_R_scale = -0.1
"#;

fn opts() -> EvalOptions {
    EvalOptions::default()
}

fn with_beta_l(name: &str, beta: f64) -> Config {
    let user = Config::parse(&format!("[bath_L]\nbeta = {beta}\n")).unwrap();
    presets::resolve(name, Some(&user)).unwrap()
}

fn csv_bytes(cfg: &Config) -> Vec<u8> {
    let res = run_sweep(cfg, &opts()).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, res.parameter.name(), &res.rows).unwrap();
    buf
}

#[test]
fn config_round_trips() {
    let cfg = Config::parse(FULL).unwrap();
    assert_eq!(Config::parse(&cfg.to_toml().unwrap()).unwrap(), cfg);
    assert_eq!(cfg.model.delta_mean, Some(0.25));
    assert_eq!(cfg.model.asymmetry, Some(0.5));
    assert_eq!(cfg.sweep.as_ref().unwrap().parameter, Param::HL);
    for p in PRESETS {
        let c = p.config();
        assert_eq!(
            Config::parse(&c.to_toml().unwrap()).unwrap(),
            c,
            "{}",
            p.name
        );
    }
}

#[test]
fn parser_rejects_bad_input() {
    assert!(Config::parse("[model]\nalpah = 1.0\n").is_err());
    assert!(
        Config::parse("[sweep]\nparameter = \"beta\"\nfrom = 0.0\nto = 1.0\npoints = 3\n").is_err()
    );
    let cfg = Config::parse("[bath_L]\nbeta = 1.0\nh = 1.0\n[bath_R]\nbeta = 1.0\nh = 1.0\n[sweep]\nparameter = \"h_L\"\nfrom = 0.0\nto = 1.0\npoints = 3\n").unwrap();
    assert!(cfg.validate_sweep().is_err(), "swept parameter also fixed");
    let one = Config::parse("[bath_L]\nbeta = 1.0\n[bath_R]\nbeta = 1.0\nh = 1.0\n[sweep]\nparameter = \"h_L\"\nfrom = 0.0\nto = 1.0\npoints = 1\n").unwrap();
    assert!(one.validate_sweep().is_err());
    let over =
        Config::parse("[bath_L]\nbeta = 1.0\nh = 1.0\nf = 0.2\n[bath_R]\nf = 0.1\n").unwrap();
    assert!(over.scenario().is_err());
}

#[test]
fn polarization_sweep_keeps_temperature() {
    let cfg = Config::parse(
        "[bath_L]\nbeta = 2.0\n[bath_R]\nbeta = 1.0\nh = 0.5\n[sweep]\nparameter = \"f_L\"\nfrom = -0.5\nto = 0.5\npoints = 3\n",
    )
    .unwrap();
    let res = run_sweep(&cfg, &opts()).unwrap();
    for r in &res.rows {
        assert!((r.f_l - r.value).abs() < 1e-14);
        assert!(r.is_ok());
    }
}

#[test]
fn two_points_give_two_rows() {
    let mut cfg = presets::find("fig4").unwrap().config();
    cfg.sweep.as_mut().unwrap().points = 2;
    let text = String::from_utf8(csv_bytes(&cfg)).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("h_L,f_L,f_R,qdot_L,qdot_R,wdot_L,wdot_R,wdot_total,F,pi_ss,J,regime,nullspace_dim,residual,error"));
}

#[test]
fn sweep_output_is_deterministic() {
    let cfg = presets::find("fig5").unwrap().config();
    assert_eq!(csv_bytes(&cfg), csv_bytes(&cfg));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, presets::find("ising_boson_n3").unwrap().toml).unwrap();
    let run = |jobs: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ritherm"))
            .args(["sweep", "--config", path.to_str().unwrap(), "--jobs", jobs])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let a = run("1");
    assert_eq!(a, run("4"));
    assert_eq!(a, run("4"));
}

#[test]
fn eq16_rows_match_closed_form() {
    let cfg = presets::find("eq16").unwrap().config();
    let res = run_sweep(&cfg, &opts()).unwrap();
    let (beta_l, beta_r, h_r) = (1.0, 1.0, 0.5);
    for r in &res.rows {
        let exact = energy_current_closed_form_3site(beta_l, r.value, beta_r, h_r);
        assert!(
            (r.f_energy - exact).abs() <= 1e-8 * exact.abs().max(1e-6),
            "{}: {} vs {exact}",
            r.value,
            r.f_energy
        );
    }
}

#[test]
fn fig4_regimes_form_contiguous_segments() {
    let cfg = presets::find("fig4").unwrap().config();
    let rows = run_sweep(&cfg, &opts()).unwrap().rows;
    let segs = regime_segments(&rows);
    for label in ["heater", "engine", "refrigerator"] {
        let runs: Vec<_> = segs.iter().filter(|s| s.0 == label).collect();
        assert_eq!(runs.len(), 1, "{label}: {segs:?}");
    }
    let order: Vec<_> = segs
        .iter()
        .map(|s| s.0.as_str())
        .filter(|l| *l != "other")
        .collect();
    assert_eq!(order, ["heater", "engine", "refrigerator"]);
    // labels only change at single crossing points between physical regimes
    for w in segs.windows(3) {
        if w[1].0 == "other" && w[0].0 != "other" && w[2].0 != "other" {
            assert_eq!(w[1].1, w[1].2, "{segs:?}");
        }
    }
    let second = run_sweep(&cfg, &opts()).unwrap().rows;
    assert_eq!(segs, regime_segments(&second));
}

#[test]
fn polarization_only_bath_explains_missing_split() {
    let cfg = Config::parse("[bath_L]\nf = 0.4\n[bath_R]\nf = -0.4\n").unwrap();
    let sc = cfg.scenario().unwrap();
    let row = ritherm_cli::evaluate(&sc, 0.0, &opts());
    assert!(row.f_energy.is_finite() && row.j.is_finite());
    assert!(row.qdot_l.is_nan());
    let msg = row.error.unwrap();
    assert!(msg.contains("(beta, h)"), "{msg}");
}

#[test]
fn identity_inversion_changes_nothing() {
    let cfg = presets::find("fig5").unwrap().config();
    let rep = check_one_way(&cfg, &Inversion::Identity, 0.0, &opts()).unwrap();
    assert!(rep.pass);
    for d in [
        rep.max_df,
        rep.max_dqdot_l,
        rep.max_dqdot_r,
        rep.max_dwdot_l,
        rep.max_dwdot_r,
        rep.max_dj,
    ] {
        assert_eq!(d, 0.0);
    }
}

#[test]
fn fig1_flip_leaves_every_current_unchanged() {
    let cfg = with_beta_l("fig1", 1.0);
    let inv = Inversion::from_section(cfg.inversion.as_ref().unwrap()).unwrap();
    assert_eq!(inv, Inversion::FlipF);
    let rep = check_one_way(&cfg, &inv, 1e-10, &opts()).unwrap();
    assert!(rep.pass, "{rep:?}");
    for d in [
        rep.max_dqdot_l,
        rep.max_dqdot_r,
        rep.max_dwdot_l,
        rep.max_dwdot_r,
    ] {
        assert!(d <= 1e-10, "{rep:?}");
    }
}

#[test]
fn fig2_remap_reproduces_fig3_and_keeps_f() {
    let fig2 = with_beta_l("fig2", 1.0);
    let fig3 = with_beta_l("fig3", 1.0);
    let inv = Inversion::from_section(fig2.inversion.as_ref().unwrap()).unwrap();
    for delta in [0.0, 2.5] {
        let a = inv
            .apply(&fig2.with_param(Param::Delta, delta).scenario().unwrap())
            .unwrap();
        let b = fig3.with_param(Param::Delta, delta).scenario().unwrap();
        assert_eq!(a.spec, b.spec);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs().max(1.0);
        for (p, q) in [(a.baths.left, b.baths.left), (a.baths.right, b.baths.right)] {
            let (
                ritherm::models::Reservoir::Spin { drive: dp, .. },
                ritherm::models::Reservoir::Spin { drive: dq, .. },
            ) = (p.reservoir, q.reservoir)
            else {
                panic!()
            };
            let (
                ritherm::models::SpinDrive::Thermal { beta: b1, h: h1 },
                ritherm::models::SpinDrive::Thermal { beta: b2, h: h2 },
            ) = (dp, dq)
            else {
                panic!()
            };
            assert!(close(b1, b2) && close(h1, h2));
        }
    }
    let rep = check_one_way(&fig2, &inv, 1e-10, &opts()).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert!(rep.max_dqdot_r > 1e-3, "{rep:?}");
}

#[test]
fn kappa_swap_keeps_energy_current() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut cfg = presets::find("eq16").unwrap().config();
    cfg.sweep.as_mut().unwrap().points = 7;
    for _ in 0..3 {
        let inv = Inversion::KappaSwap {
            kappa_l: rng.gen_range(0.1..10.0),
            kappa_r: rng.gen_range(0.1..10.0),
        };
        let rep = check_one_way(&cfg, &inv, 1e-10, &opts()).unwrap();
        assert!(rep.pass, "{rep:?}");
    }
    let sec = InversionSection {
        kind: InversionKind::KappaSwap,
        kappa_l: Some(1.0),
        kappa_r: None,
        beta_l_scale: None,
        h_l_scale: None,
        beta_r_scale: None,
        h_r_scale: None,
    };
    assert!(Inversion::from_section(&sec).is_err());
}

#[test]
fn ri_convergence_is_first_order() {
    let cfg = presets::find("fig4")
        .unwrap()
        .config()
        .with_param(Param::HL, 0.5);
    let rep = run_ri_convergence(&cfg, None, &opts()).unwrap();
    assert!(rep.strictly_decreasing, "{rep:?}");
    assert!((0.8..=1.2).contains(&rep.fitted_order), "{rep:?}");
}

#[test]
fn ri_bosonic_rates_match_master_equation() {
    let cfg = presets::find("ising_boson_n2")
        .unwrap()
        .config()
        .with_param(Param::Delta, 1.0);
    let rep = run_ri_convergence(&cfg, None, &opts()).unwrap();
    let last = rep.rows.last().unwrap();
    let (gl, wl, gr, wr) = (0.5f64, 1.0, 0.3f64, 1.5);
    assert!(
        (last.qdot_l + gl * gl * wl).abs() <= 0.05 * gl * gl * wl,
        "{last:?}"
    );
    assert!(
        (last.qdot_r + gr * gr * wr).abs() <= 0.05 * gr * gr * wr,
        "{last:?}"
    );
    assert!(
        (last.wdot_l - gl * gl * wl).abs() <= 0.05 * gl * gl * wl,
        "{last:?}"
    );
}

fn exit_code(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_ritherm"))
        .args(args)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&["presets", "list"]), 0);
    assert_eq!(exit_code(&["sweep", "--preset", "nope"]), 2);
    assert_eq!(exit_code(&["sweep", "--preset", "fig1"]), 2);
    assert_eq!(exit_code(&["steady", "--preset", "fig4"]), 0);
    // a uniform field breaks the one-way street
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "[inversion]\nkind = \"flip_f\"\n[sweep]\nparameter = \"h_L\"\nfrom = 0.3\nto = 0.6\npoints = 3\n").unwrap();
    assert_eq!(
        exit_code(&[
            "check-one-way",
            "--preset",
            "fig5",
            "--config",
            path.to_str().unwrap()
        ]),
        4
    );
    assert_eq!(
        exit_code(&[
            "check-one-way",
            "--preset",
            "fig4",
            "--config",
            path.to_str().unwrap()
        ]),
        0
    );
}
