use pswave_core::*;

fn bump_medium(g: GridSpec, amp: f64, width: f64) -> LameField {
    let c = g.period() / 2.0;
    LameField::from_family(
        g,
        &MediumFamily::SmoothBump {
            mu0: 1.0,
            lambda0: 1.0,
            bumps: vec![BumpSpec {
                center: vec![c; g.dim()],
                extent: width,
                amplitude_mu: amp,
                amplitude_lambda: amp,
            }],
        },
    )
    .unwrap()
}

fn radial_profile(w: &VectorField, nbins: usize, binw: f64) -> Vec<f64> {
    let g = w.grid();
    let mut bins = vec![0.0; nbins];
    for c in 0..g.dim() {
        let hat = w.component(c).hat();
        for lin in 0..g.total_points() {
            let mut m = [0i64; 3];
            g.int_wavevector(lin, &mut m);
            let mag = ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt();
            let b = ((mag / binw) as usize).min(nbins - 1);
            bins[b] += hat[lin].norm_sqr();
        }
    }
    bins
}

#[test]
#[ignore]
fn diagnose_k8() {
    let n = 128usize;
    let g = GridSpec::new(2, n, 2.0 * std::f64::consts::PI).unwrap();

    for amp in [0.3, 0.1] {
        let f = bump_medium(g, amp, 0.7);
        for k in [8i64, 16, 32] {
            let packet = plane_wave_packet(
                g,
                &PacketSpec::axis_carrier(g, k, Polarization::P, g.period() / 16.0),
            )
            .unwrap();
            let data = CauchyData::from_displacement(packet);
            let dt = analysis::sweep_dt(&f, 32);
            let traj = reference_solve(&f, &data, 0.5, dt, 8).unwrap();
            print!("amp={amp} k={k}: |S(t)| =");
            for i in 0..traj.len() {
                let s = project(Mode::S, traj.state(i).0);
                print!(" {:.2}:{:.3e}", traj.times()[i], s.l2_norm());
            }
            println!();
            let s_final = project(Mode::S, traj.final_state().0);
            let prof = radial_profile(&s_final, 12, 4.0);
            let total: f64 = prof.iter().sum();
            let pct: Vec<String> =
                prof.iter().map(|v| format!("{:.0}", 100.0 * v / total)).collect();
            println!("  S spectrum by |xi| bins of 4: [{}]", pct.join(" "));
        }
    }
}
