use ilim_core::criteria::{LayerSpec, MSchedule};
use ilim_core::harness::{load_manifest_config, SweepConfig};
use proptest::prelude::*;

fn schedule() -> impl Strategy<Value = MSchedule> {
    prop_oneof![
        (1e-3..10.0f64).prop_map(|c| MSchedule::Constant { c }),
        (1e-3..10.0f64, 0.0..1.0f64).prop_map(|(c, a)| MSchedule::Power { c, a }),
    ]
}

proptest! {
    #[test]
    fn toml_round_trip(
        nus in prop::collection::vec(1e-5..1e-1f64, 1..5),
        nx in 2usize..64,
        ny in 5usize..200,
        t_end in 0.1..5.0f64,
        m in schedule(),
        c in 0.5..50.0f64,
        r in prop_oneof![Just(f64::INFINITY), 1.0..4.0f64],
        seed in any::<u64>(),
    ) {
        let mut nu_list = nus;
        nu_list.sort_by(|a, b| b.partial_cmp(a).unwrap());
        nu_list.dedup();
        let mut cfg = SweepConfig { nu_list, t_end, m_schedule: m, layer: LayerSpec::new(c, r).unwrap(), seed, ..SweepConfig::default() };
        cfg.grid.nx = 2 * nx;
        cfg.grid.ny = ny;
        let back = SweepConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn schedule_text_round_trip(m in schedule()) {
        let back: MSchedule = m.to_string().parse().unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn unknown_keys_rejected() {
    assert!(SweepConfig::from_toml_str("nu_list = [1e-2]\nbogus = 1\n").is_err());
    assert!(SweepConfig::from_toml_str("nu_list = [1e-3, 1e-2]\n").is_err());
}

#[test]
fn manifest_config_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig { nu_list: vec![1e-2], t_end: 0.02, dt: 0.01, outputs: 1, ..SweepConfig::default() };
    let mut small = cfg.clone();
    small.grid.nx = 8;
    small.grid.ny = 17;
    let result = ilim_core::harness::run_sweep(&small, 1).unwrap();
    ilim_core::harness::emit_report(&result, dir.path()).unwrap();
    assert_eq!(load_manifest_config(&dir.path().join("manifest.json")).unwrap(), small);
}
