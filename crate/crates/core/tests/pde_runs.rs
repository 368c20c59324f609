use proptest::prelude::*;
use thinfilm::harness::{contact_drift, nomove_check, nomove_config};
use thinfilm::pde::{
    check_energy_balance, extract_contact_speed, quasi_steady_window, read_diagnostics, read_profiles, simulate,
    write_diagnostics, write_profiles, FarField, Frame, GridSpec, InitialProfile, Solver, SolverConfig, Step,
};
use thinfilm::SlipParameters;

fn partial(theta: f64, gamma: f64) -> SolverConfig {
    SolverConfig {
        p: SlipParameters { n: 2.0, epsilon: 1e-3, theta },
        grid: GridSpec::resolving(512, 4.0, 1e-3),
        far_field: FarField::WedgeMatch { gamma },
        initial_profile: InitialProfile::Wedge { slope: gamma },
        ..SolverConfig::default()
    }
}

#[test]
fn wedge_at_the_contact_angle_is_steady() {
    let cfg = SolverConfig { initial_profile: InitialProfile::Wedge { slope: 1.0 }, ..SolverConfig::default() };
    let traj = simulate(&cfg, 0.5).unwrap().into_result().unwrap();
    assert!(traj.last().s.abs() < 1e-10, "s = {}", traj.last().s);
    assert!(traj.diagnostics.iter().all(|d| d.sdot.abs() < 1e-10));
}

#[test]
fn contact_line_moves_toward_equilibrium() {
    // θ > γ: the film recedes, ṡ > 0; θ < γ: it advances.
    for (theta, gamma, sign) in [(2.0, 1.0, 1.0), (0.5, 1.0, -1.0)] {
        let traj = simulate(&partial(theta, gamma), 1.0).unwrap().into_result().unwrap();
        let (v, _) = extract_contact_speed(&traj.diagnostics, quasi_steady_window(&traj)).unwrap();
        assert!(v * sign > 0.0, "θ={theta} γ={gamma}: ṡ = {v}");
        assert!(traj.last().s * sign > 0.0);
    }
}

#[test]
fn moving_frame_energy_residual_is_first_order() {
    // The data does not satisfy the contact compatibility conditions, so the
    // first step carries an initial layer; the mean residual is the clean measure.
    let res: Vec<f64> = [5e-4, 2.5e-4]
        .iter()
        .map(|&dt| {
            let mut cfg = partial(1.0, 1.0);
            cfg.initial_profile = InitialProfile::WedgeBump { slope: 1.0, amplitude: 0.1, center: 1.0, width: 1.0 };
            cfg.dt0 = dt;
            cfg.dt_max = dt;
            cfg.dt_min = dt * 1e-6;
            let traj = simulate(&cfg, 0.1).unwrap().into_result().unwrap();
            check_energy_balance(&traj.diagnostics).mean_abs
        })
        .collect();
    let order = (res[0] / res[1]).log2();
    assert!(order > 0.8, "residuals {res:?}, order {order}");
}

#[test]
fn no_slip_contact_point_stays_put() {
    let (drift, dx) = nomove_check(&nomove_config(1.0, 512), 1.0).unwrap();
    assert!(drift < 1e-3 * dx, "drift {drift} vs cell {dx}");
}

#[test]
fn complete_wetting_fixed_frame_spreads_monotonically() {
    let eps = 1e-4;
    let b = 1e-5;
    let cfg = SolverConfig {
        p: SlipParameters { n: 2.0, epsilon: eps, theta: 0.0 },
        frame: Frame::Fixed,
        grid: GridSpec::uniform(4096, 4.0),
        initial_profile: InitialProfile::Cap { slope: 1.0, contact: 1.0, bump: 0.0 },
        precursor: b,
        contact_threshold: 10.0 * b,
        ..SolverConfig::default()
    };
    let traj = simulate(&cfg, 0.5).unwrap().into_result().unwrap();
    assert!(traj.diagnostics.windows(2).all(|w| w[1].s <= w[0].s));
    let (v, _) = extract_contact_speed(&traj.diagnostics, quasi_steady_window(&traj)).unwrap();
    assert!(v < 0.0, "ṡ = {v}");
}

#[test]
fn moving_and_fixed_frames_agree_on_spreading() {
    let mut m = SolverConfig {
        p: SlipParameters { n: 2.0, epsilon: 1e-3, theta: 0.0 },
        grid: GridSpec::resolving(1024, 3.0, 1e-3),
        initial_profile: InitialProfile::Cap { slope: 1.0, contact: 0.0, bump: 0.0 },
        ..SolverConfig::default()
    };
    let tm = simulate(&m, 1.0).unwrap().into_result().unwrap();
    m.frame = Frame::Fixed;
    m.grid = GridSpec::uniform(4096, 4.0);
    m.initial_profile = InitialProfile::Cap { slope: 1.0, contact: 1.0, bump: 0.0 };
    m.precursor = 1e-5;
    m.contact_threshold = 1e-4;
    let tf = simulate(&m, 1.0).unwrap().into_result().unwrap();
    let dm = tm.last().s - tm.diagnostics[0].s;
    let df = tf.last().s - tf.diagnostics[0].s;
    assert!(dm < 0.0 && df < 0.0, "{dm} {df}");
    assert!((dm - df).abs() < 0.25 * df.abs(), "moving {dm}, fixed {df}");
}

#[test]
fn csv_output_round_trips_and_is_deterministic() {
    let mut cfg = partial(2.0, 1.0);
    cfg.record_every = 20;
    let write = || {
        let traj = simulate(&cfg, 0.2).unwrap();
        let (mut p, mut d) = (Vec::new(), Vec::new());
        write_profiles(&mut p, &traj).unwrap();
        write_diagnostics(&mut d, &traj.diagnostics).unwrap();
        (traj, p, d)
    };
    let (traj, p1, d1) = write();
    let (_, p2, d2) = write();
    assert_eq!(p1, p2);
    assert_eq!(d1, d2);
    assert_eq!(read_diagnostics(&d1[..]).unwrap(), traj.diagnostics);
    let (frame, blocks) = read_profiles(&p1[..]).unwrap();
    assert_eq!(frame, Frame::Moving);
    assert_eq!(blocks.len(), traj.states.len());
    let last = blocks.last().unwrap();
    assert_eq!(last.h, traj.last().h);
    assert_eq!(last.x, traj.grid.nodes);
}

#[test]
fn invalid_configs_are_rejected_before_running() {
    let cfg = SolverConfig { dt0: -1.0, ..SolverConfig::default() };
    assert!(simulate(&cfg, 1.0).is_err());
    let cfg = SolverConfig {
        initial_profile: InitialProfile::Cosine { mean: 1.0, amplitude: 0.1, modes: 1.0 },
        ..SolverConfig::default()
    };
    assert!(Solver::new(cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fixed_frame_steps_conserve_mass_and_positivity(
        mean in 0.2f64..2.0,
        frac in 0.0f64..0.9,
        modes in 1u32..4,
        eps in 1e-4f64..1e-1,
        dt in 1e-5f64..1e-2,
    ) {
        let cfg = SolverConfig {
            p: SlipParameters { n: 2.0, epsilon: eps, theta: 0.0 },
            grid: GridSpec::uniform(64, 1.0),
            frame: Frame::Fixed,
            initial_profile: InitialProfile::Cosine { mean, amplitude: frac * mean, modes: modes as f64 },
            ..SolverConfig::default()
        };
        let s = Solver::new(cfg).unwrap();
        let st = s.initial_state();
        let m0 = thinfilm::pde::mass(&st, s.grid());
        if let Step::Accepted(next, d) = s.step(&st, dt).unwrap() {
            prop_assert!(next.h.iter().all(|&h| h >= 0.0));
            prop_assert!(((d.mass - m0) / m0).abs() < 1e-12);
            prop_assert!(d.dissipation >= 0.0);
        }
    }

    #[test]
    fn any_contact_angle_wedge_is_steady(theta in 0.2f64..3.0, eps in 1e-4f64..5e-2, n in 1.0f64..2.9) {
        let cfg = SolverConfig {
            p: SlipParameters { n, epsilon: eps, theta },
            grid: GridSpec::uniform(64, 2.0),
            initial_profile: InitialProfile::Wedge { slope: theta },
            ..SolverConfig::default()
        };
        let s = Solver::new(cfg).unwrap();
        match s.step(&s.initial_state(), 1e-3).unwrap() {
            Step::Accepted(next, _) => prop_assert!(next.sdot.abs() < 1e-9, "ṡ = {}", next.sdot),
            Step::Rejected(m) => prop_assert!(false, "rejected: {}", m),
        }
    }

    #[test]
    fn pinned_cap_drift_is_below_a_cell(gamma in 0.3f64..2.5) {
        let traj = simulate(&nomove_config(gamma, 128), 0.05).unwrap().into_result().unwrap();
        prop_assert!(contact_drift(&traj) < traj.grid.max_spacing());
    }
}
