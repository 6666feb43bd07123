// Development probe; removed before release.
use limitcycle::oracle::{compare_waveforms, extract_limit_cycle, integrate_vdp, OdeRunConfig};
use limitcycle::signal::PeriodicGrid;
use limitcycle::solver::OuterConfig;
use limitcycle::systems::{initial_guess_ramp, van_der_pol, VdpParams};

fn main() {
    let tau = 2.0 * std::f64::consts::PI;
    let o15 = extract_limit_cycle(
        &integrate_vdp(1.5, &OdeRunConfig::new(1e-4, 200.0, (2.0, 0.0))).unwrap(),
        0.5,
        5000,
    )
    .unwrap();
    let o10 = extract_limit_cycle(
        &integrate_vdp(10.0, &OdeRunConfig::new(1e-4, 500.0, (2.0, 0.0))).unwrap(),
        0.5,
        5000,
    )
    .unwrap();

    for (k, period, lambda, feat) in [
        (0.0002, tau, 0.05, None),
        (1.5, o15.period, 0.05, Some(&o15)),
        (10.0, o10.period, 0.01, Some(&o10)),
    ] {
        let grid = PeriodicGrid::new(period, 5000).unwrap();
        let sys = van_der_pol(VdpParams { k, grid }).unwrap();
        let y0 = initial_guess_ramp(grid, 1.0);
        let cfg = OuterConfig::new(lambda);
        let report = sys.solve(&y0, &cfg).unwrap();
        let x = &report.solution;
        let n = x.len();

        // Power balance: sum (x^2-1) xdot^2 vs sum xdot^2.
        let d1 = x.diff1();
        let mut balance = 0.0;
        let mut dsq = 0.0;
        for (xi, di) in x.samples().iter().zip(d1.samples()) {
            balance += (xi * xi - 1.0) * di * di;
            dsq += di * di;
        }

        // Half-wave symmetry: max |x[k + N/2] + x[k]|.
        let mut half_dev = 0.0f64;
        for k in 0..n {
            half_dev = half_dev.max((x.at(k as isize + (n / 2) as isize) + x.samples()[k]).abs());
        }

        // Crest factor.
        let rms = x.norm() / (n as f64).sqrt();
        let crest = x.max_abs() / rms;

        // Best-fit sinusoid at the grid fundamental.
        let mut c = 0.0;
        let mut s = 0.0;
        for (j, &v) in x.samples().iter().enumerate() {
            let th = tau * j as f64 / n as f64;
            c += v * th.cos();
            s += v * th.sin();
        }
        c *= 2.0 / n as f64;
        s *= 2.0 / n as f64;
        let mut fit_err = 0.0;
        for (j, &v) in x.samples().iter().enumerate() {
            let th = tau * j as f64 / n as f64;
            let f = c * th.cos() + s * th.sin();
            fit_err += (v - f) * (v - f);
        }
        let sin_rms = fit_err.sqrt() / x.norm();

        let rms_vs_oracle = feat.map(|f| compare_waveforms(&f.waveform, x).unwrap().0);
        println!(
            "K={k}: outer={} amp={:.4} period_est={:.5} | balance/dsq={:+.5} | half_dev={:.4} ({:.2}% of amp) | crest={:.4} (dev {:.2}%) | sin_rms={:.5} | rms_vs_oracle={:?}",
            report.outer_iters,
            report.amplitude,
            report.period_estimate,
            balance / dsq,
            half_dev,
            100.0 * half_dev / report.amplitude,
            crest,
            100.0 * (crest - 2f64.sqrt()).abs() / 2f64.sqrt(),
            sin_rms,
            rms_vs_oracle.map(|r| (r * 1e5).round() / 1e5),
        );
    }
}
