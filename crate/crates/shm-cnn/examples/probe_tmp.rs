use shm_cnn::simulator::*;

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn main() {
    let base = calibrate_baseline();
    let modal = modal_analysis(&base).unwrap();
    println!("baseline modes: {:?}", modal.frequencies_hz);

    let target_rms = SHAKER_VOLTS_RMS * SHAKER_NEWTONS_PER_VOLT;
    println!("target force RMS: {target_rms} N");
    let exc = generate_excitation(&ExcitationConfig::new(target_rms, 1)).unwrap();

    // Linear relative displacement between top two floors.
    let lin = simulate_response(&base, &exc, 2560.0).unwrap();
    let rel = &lin.bumper_relative_m;
    let rel_rms = rms(rel);
    let rel_peak = rel.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
    println!("linear |x4-x3|: rms {:.4} mm, peak {:.4} mm", rel_rms * 1e3, rel_peak * 1e3);

    for id in [10u8, 11, 13, 14] {
        let st = state_by_id(id).unwrap();
        let params = build_params(st, &base);
        let nl = simulate_trial(&params, &exc, id, 1, 1).unwrap();
        let ln = simulate_trial(&params.without_bumper(), &exc, id, 1, 1).unwrap();
        // engagement fraction at internal rate
        let raw = simulate_response(&params, &exc, 2560.0).unwrap();
        let gap = params.bumper.unwrap().gap_m;
        let engaged = raw.bumper_relative_m.iter().filter(|&&d| d > gap).count() as f64
            / raw.bumper_relative_m.len() as f64;
        let mut dev_num = 0.0;
        let mut dev_den = 0.0;
        for ch in 0..4 {
            for (a, b) in nl.accel_g[ch].iter().zip(&ln.accel_g[ch]) {
                dev_num += (a - b) * (a - b);
                dev_den += b * b;
            }
        }
        println!(
            "state {id}: gap {:.2} mm, engaged {:.1}%, nl-vs-lin RMS dev {:.1}%, ch5 rms nl {:.3} g lin {:.3} g",
            gap * 1e3,
            engaged * 100.0,
            (dev_num / dev_den).sqrt() * 100.0,
            rms(&nl.accel_g[3]),
            rms(&ln.accel_g[3]),
        );
    }
}
