use regdyn_core::hillsim::{extrema_order, Trajectory};
#[test]
fn dbg() {
    let times: Vec<f64> = (0..2000).map(|i| i as f64 * 0.01).collect();
    let g1: Vec<f64> = times.iter().map(|&t| t.sin() + 1.5).collect();
    let g2: Vec<f64> = times.iter().map(|&t| (t - std::f64::consts::FRAC_PI_2).sin() + 1.5).collect();
    let traj = Trajectory { names: vec!["g1".into(), "g2".into()], times, values: vec![g1, g2] };
    match extrema_order(&traj, 0.05) {
        Ok(o) => println!("ok: {o:?}"),
        Err(e) => println!("err: {e}"),
    }
}
