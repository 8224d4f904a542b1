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
                amplitude_lambda: -2.0 * amp,
            }],
        },
    )
    .unwrap()
}

#[test]
#[ignore]
fn probe_remainder_slopes() {
    for n in [128usize, 256] {
        let g = GridSpec::new(2, n, 2.0 * std::f64::consts::PI).unwrap();
        let f = bump_medium(g, 0.3, 0.7);
        let t0 = std::time::Instant::now();
        let (c, rep) = ConjugationOperator::calibrate(&f, &[-1.0, 0.0, 1.0]).unwrap();
        println!("n={n} calib M={} norms={:?} attempts={} ({:?})", rep.m_threshold, rep.norms, rep.attempts, t0.elapsed());
        let carriers: Vec<i64> = vec![8, 16, 32, 64].into_iter().filter(|&k| k <= (n as i64)/4).collect();
        let t0 = std::time::Instant::now();
        let rows = analysis::remainder_sweep(&f, &c, &carriers, 7).unwrap();
        for r in &rows {
            println!("  k={} {:?}", r.carrier, r.values);
        }
        for q in ["remainder_L2_ratio", "APS_L2_ratio", "APP_L2_ratio", "ASS_L2_ratio", "KPS_order_ratio", "composition_gap_L2_ratio"] {
            let fit = analysis::fit_loglog_slope(&rows, q).unwrap();
            println!("  slope[{q}] = {:.3} (maxres {:.3})", fit.slope, fit.max_residual);
        }
        println!("  sweep took {:?}", t0.elapsed());
    }
}

#[test]
#[ignore]
fn probe_coupling_scan() {
    let n = 256usize;
    let g = GridSpec::new(2, n, 2.0 * std::f64::consts::PI).unwrap();
    let carriers = vec![8i64, 16, 32, 64];
    for (amp, width) in [(0.3, 0.7)] {
        let f = bump_medium(g, amp, width);
        let (c, rep) = ConjugationOperator::calibrate(&f, &[0.0]).unwrap();
        println!("amp={amp} width={width} M={}", rep.m_threshold);
        for mode in [Mode::P, Mode::S] {
            let rows = analysis::coupling_sweep(&f, &c, mode, &carriers, 0.5).unwrap();
            let opp = mode.opposite();
            for r in &rows {
                println!(
                    "  {:?} k={} L2={:.5e} H1={:.5e}",
                    mode,
                    r.carrier,
                    r.values[&format!("L2_{}_content", opp.label())],
                    r.values[&format!("H1_{}_content", opp.label())]
                );
            }
            for q in [format!("L2_{}_content", opp.label()), format!("H1_{}_content", opp.label())] {
                let fit = analysis::fit_loglog_slope(&rows, &q).unwrap();
                println!("  {:?} slope[{q}] = {:.3}", mode, fit.slope);
            }
        }
    }
}

#[test]
#[ignore]
fn probe_volterra() {
    let n = 128usize;
    let g = GridSpec::new(2, n, 2.0 * std::f64::consts::PI).unwrap();
    let f = bump_medium(g, 0.3, 0.7);
    let (c, _) = ConjugationOperator::calibrate(&f, &[-1.0, 0.0, 1.0]).unwrap();
    let packet = plane_wave_packet(
        g,
        &PacketSpec::axis_carrier(g, 12, Polarization::P, g.period() / 16.0),
    )
    .unwrap();
    let s_packet = plane_wave_packet(
        g,
        &PacketSpec::axis_carrier(g, 12, Polarization::S(0), g.period() / 16.0),
    )
    .unwrap();
    let data = CauchyData::new(packet, s_packet.scaled(0.5)).unwrap();
    let dt = cfl_bound(&f) * 0.9;
    let t0 = std::time::Instant::now();
    let sol = volterra_solve(&f, &c, &data, 0.5, dt, 20, 1e-6).unwrap();
    println!("volterra iters={} increments={:?} ratios={:?} ({:?})", sol.iterations, sol.increments, sol.ratios, t0.elapsed());

    let t1 = std::time::Instant::now();
    let fwd = reference_solve(&f, &data, 0.5, dt, 1).unwrap();
    let bwd = evolve(&f, &data, -0.5, dt, 1).unwrap();
    println!("reference took {:?}", t1.elapsed());
    // compare at matching times
    let mut max_rel = 0.0f64;
    let mut ref_max = 0.0f64;
    for i in 0..sol.w.len() {
        let t = sol.w.times()[i];
        let (wv, _) = sol.w.state(i);
        let reference = if t >= 0.0 { &fwd } else { &bwd };
        let idx = reference.times().iter().position(|&rt| (rt - t).abs() < 1e-9).unwrap();
        let (wr, _) = reference.state(idx);
        max_rel = max_rel.max(wv.sub(wr).l2_norm());
        ref_max = ref_max.max(wr.l2_norm());
    }
    println!("volterra vs reference: max abs diff {:.3e}, scale {:.3e}, rel {:.3e}", max_rel, ref_max, max_rel / ref_max);
}
