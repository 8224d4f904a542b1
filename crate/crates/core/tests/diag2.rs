use pswave_core::*;

fn medium_with(g: GridSpec, amp: f64, width: f64, offset: (f64, f64)) -> LameField {
    let c = g.period() / 2.0;
    LameField::from_family(
        g,
        &MediumFamily::SmoothBump {
            mu0: 1.0,
            lambda0: 1.0,
            bumps: vec![BumpSpec {
                center: vec![c + offset.0, c + offset.1],
                extent: width,
                amplitude_mu: amp,
                amplitude_lambda: amp,
            }],
        },
    )
    .unwrap()
}

#[test]
#[ignore]
fn scan_geometry() {
    let n = 128usize;
    let g = GridSpec::new(2, n, 2.0 * std::f64::consts::PI).unwrap();
    let variants: Vec<(&str, f64, f64, (f64, f64))> = vec![
        ("base s0.7", 0.3, 0.7, (0.0, 0.0)),
        ("s0.5", 0.3, 0.5, (0.0, 0.0)),
        ("s0.6", 0.3, 0.6, (0.0, 0.0)),
        ("s0.7 offy0.7", 0.3, 0.7, (0.0, 0.7)),
        ("s0.7 offx0.9", 0.3, 0.7, (0.9, 0.0)),
    ];
    for (label, amp, width, off) in variants {
        let f = medium_with(g, amp, width, off);
        let (c, _) = ConjugationOperator::calibrate(&f, &[0.0]).unwrap();
        let rows = analysis::coupling_sweep(&f, &c, Mode::P, &[8, 16, 32], 0.5).unwrap();
        let kl2: Vec<f64> =
            rows.iter().map(|r| r.carrier as f64 * r.values["L2_S_content"]).collect();
        let kh1: Vec<f64> = rows.iter().map(|r| r.values["H1_S_content"]).collect();
        println!(
            "{label}: k*L2 = [{:.4} {:.4} {:.4}]  H1 = [{:.4} {:.4} {:.4}]  k8/k32 = {:.2}",
            kl2[0], kl2[1], kl2[2], kh1[0], kh1[1], kh1[2], kl2[0] / kl2[2]
        );
    }
}
