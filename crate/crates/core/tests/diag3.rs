use pswave_core::*;

fn medium_amps(g: GridSpec, amp_mu: f64, amp_lambda: f64, width: f64) -> LameField {
    let c = g.period() / 2.0;
    LameField::from_family(
        g,
        &MediumFamily::SmoothBump {
            mu0: 1.0,
            lambda0: 1.0,
            bumps: vec![BumpSpec {
                center: vec![c; g.dim()],
                extent: width,
                amplitude_mu: amp_mu,
                amplitude_lambda: amp_lambda,
            }],
        },
    )
    .unwrap()
}

#[test]
#[ignore]
fn dt_sensitivity_k64() {
    let g = GridSpec::new(2, 256, 2.0 * std::f64::consts::PI).unwrap();
    let f = medium_amps(g, 0.3, 0.3, 0.7);
    let packet = plane_wave_packet(
        g,
        &PacketSpec::axis_carrier(g, 64, Polarization::P, g.period() / 16.0),
    )
    .unwrap();
    let data = CauchyData::from_displacement(packet);
    for dt in [analysis::sweep_dt(&f, 64), analysis::sweep_dt(&f, 64) / 2.0] {
        let nsteps = ((0.5 / dt - 1e-12).ceil() as usize).max(1);
        let traj = reference_solve(&f, &data, 0.5, dt, nsteps).unwrap();
        let s = project(Mode::S, traj.final_state().0);
        println!(
            "dt={dt:.4e}: L2_S = {:.6e}, H1_S = {:.6e}, drift = {:.2e}",
            s.l2_norm(),
            s.sobolev_norm(1.0).unwrap(),
            traj.energy_drift().unwrap()
        );
    }
}

#[test]
#[ignore]
fn speed_preserving_bump() {
    let n = 128usize;
    let g = GridSpec::new(2, n, 2.0 * std::f64::consts::PI).unwrap();
    for (label, amu, alam, width) in [
        ("p-speed const s0.7", 0.3, -0.6, 0.7),
        ("p-speed const s0.5", 0.3, -0.6, 0.5),
        ("lam-only s0.7", 0.0, 0.3, 0.7),
    ] {
        let f = medium_amps(g, amu, alam, width);
        let (c, _) = ConjugationOperator::calibrate(&f, &[0.0]).unwrap();
        for mode in [Mode::P, Mode::S] {
            let rows = analysis::coupling_sweep(&f, &c, mode, &[8, 16, 32], 0.5).unwrap();
            let opp = mode.opposite();
            let kl2: Vec<f64> = rows
                .iter()
                .map(|r| r.carrier as f64 * r.values[&format!("L2_{}_content", opp.label())])
                .collect();
            println!(
                "{label} {:?}: k*L2 = [{:.4} {:.4} {:.4}] k8/k32 = {:.2}",
                mode,
                kl2[0],
                kl2[1],
                kl2[2],
                kl2[0] / kl2[2]
            );
        }
    }
}
