//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freqshift::carmodel::{car_vs_cascade_pump, car_vs_temperature, cascade_pump_denominator, PhaseMatching};
use freqshift::cascade::{
    cascade_efficiency, heisenberg_step, quantum_efficiency_from_power, shift_to_pump_detuning, MixingAngle,
    ModeAmplitudes,
};
use freqshift::dispersion::{
    chirped_response, phase_mismatch, qpm_temperature, qpm_wavelength, relative_efficiency, sinc, PolingProfile,
    ProcessFamily, ProcessKind,
};
use freqshift::filters::{channels_for_shift, ItuChannel};
use freqshift::montecarlo::{
    add_noise, brute_force_histogram, coincidence_histogram, derive_seed, expected_event_rate, generate_pairs,
    simulate, EventStream, McControls, PairExperiment,
};
use freqshift::pairsource::SpdcSourceParams;
use freqshift::scenario::{first_sinc_zero, shift_point, uniform_equivalent, Scenario};
use freqshift::{thz_to_wavelength, wavelength_to_thz};

type Verdict = Result<(bool, String), String>;

fn criterion(number: u32, title: &str, body: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!(
        "[{number:>2}] {verdict} {title}: {detail} ({:.2} s)",
        start.elapsed().as_secs_f64()
    );
    passed
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn quantum_efficiency_identity() -> Verdict {
    let q = quantum_efficiency_from_power(0.122, 1550.0, 633.0);
    Ok(((q - 0.0498).abs() <= 5e-4, format!("{q:.6} vs 0.0498 ± 5e-4")))
}

fn cascade_half_and_slope() -> Verdict {
    let pmax = 487.0;
    let half = cascade_efficiency(pmax, pmax, pmax);
    let (p_lo, p_hi) = (1e-4 * pmax, 2e-4 * pmax);
    let slope = (cascade_efficiency(p_hi, pmax, pmax) / cascade_efficiency(p_lo, pmax, pmax)).ln() / (p_hi / p_lo).ln();
    let ok = (half - 0.5).abs() <= 1e-12 && (slope - 2.0).abs() <= 0.01;
    Ok((ok, format!("η(Pmax) = {half:.15}, small-signal slope = {slope:.5}")))
}

fn rotation_unitarity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let c = |rng: &mut ChaCha8Rng| Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let modes = ModeAmplitudes::new(c(&mut rng), c(&mut rng));
        let angle = MixingAngle::new(rng.random_range(0.0..std::f64::consts::PI)).map_err(err)?;
        let out = heisenberg_step(modes, &angle);
        worst = worst.max(((out.norm_sqr() - modes.norm_sqr()) / modes.norm_sqr()).abs());
    }
    Ok((worst <= 1e-12, format!("max relative norm change {worst:.2e} over 10⁴ cases")))
}

fn tuning_slope(scn: &Scenario) -> Verdict {
    let crystal = uniform_equivalent(&scn.cascade_crystal).map_err(err)?;
    let signal = scn.cascade.signal_nm;
    let t0 = crystal.temperature_c;
    let at = |t: f64| qpm_wavelength(signal, &crystal.with_temperature(t), ProcessKind::Sfg, (1000.0, 1150.0));
    let centre = at(t0).map_err(err)?;
    let slope = (at(t0 + 2.0).map_err(err)? - at(t0 - 2.0).map_err(err)?) / 4.0;
    let ok = (slope - 0.151).abs() <= 0.15 * 0.151;
    Ok((ok, format!("{slope:.4} nm/°C at {centre:.2} nm (0.151 ± 15%), trim {:.0} ppm", crystal.period_trim_ppm)))
}

fn chirped_bandwidth(scn: &Scenario) -> Verdict {
    let crystal = &scn.cascade_crystal;
    let segments = scn.config.cascade.segments;
    let family = ProcessFamily { fixed_nm: scn.cascade.signal_nm, kind: ProcessKind::Sfg };
    let grid: Vec<f64> = (0..=1120).map(|i| 1050.0 + 0.025 * i as f64).collect();
    let spectrum = chirped_response(crystal, &family, &grid, segments).map_err(err)?;
    let fwhm = spectrum.fwhm_nm().ok_or("spectrum truncated by grid")?;

    let centre = crystal.poling.center_period_um();
    let degenerate = crystal
        .with_poling(PolingProfile::LinearChirp { start_um: centre, end_um: centre })
        .map_err(err)?;
    let uniform = uniform_equivalent(crystal).map_err(err)?;
    let period = uniform.effective_center_period_um();
    let mut worst: f64 = 0.0;
    for &l in grid.iter().step_by(4) {
        let p = family.member(l).map_err(err)?;
        let numeric = relative_efficiency(&p, &degenerate, segments).map_err(err)?;
        let dk = phase_mismatch(&p, &uniform, period).map_err(err)?;
        worst = worst.max((numeric - sinc(dk * uniform.length_m() / 2.0).powi(2)).abs());
    }
    let ok = (fwhm - 0.8).abs() <= 0.25 * 0.8 && worst <= 1e-9;
    Ok((ok, format!("FWHM {fwhm:.3} nm (0.8 ± 25%), degenerate chirp vs sinc² max |Δ| {worst:.1e}")))
}

fn spdc_optimum() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0usize;
    for _ in 0..20 {
        let src = SpdcSourceParams {
            a: 10f64.powf(rng.random_range(4.0..6.5)),
            alpha: [rng.random_range(0.01..0.5), rng.random_range(0.01..0.5)],
            eta: [rng.random_range(0.3..0.95), rng.random_range(0.3..0.95)],
            beta: [rng.random_range(0.0..1e3), rng.random_range(0.0..1e3)],
            n_n: [10f64.powf(rng.random_range(2.0..6.0)), 10f64.powf(rng.random_range(2.0..6.0))],
            delta_tau_s: rng.random_range(1e-10..2e-9),
        };
        let opt = src.optimal_pump_mw();
        let grid: Vec<f64> = (0..401).map(|i| opt * 10f64.powf(-2.0 + 4.0 * i as f64 / 400.0)).collect();
        let cars = grid.iter().map(|&p| src.car(p)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let best = (0..grid.len()).max_by(|&a, &b| cars[a].total_cmp(&cars[b])).unwrap();
        let near = (0..grid.len())
            .min_by(|&a, &b| (grid[a].ln() - opt.ln()).abs().total_cmp(&(grid[b].ln() - opt.ln()).abs()))
            .unwrap();
        worst = worst.max(best.abs_diff(near));
    }
    Ok((worst <= 1, format!("largest argmax offset {worst} grid steps over 20 draws")))
}

fn cascade_pump_shape(scn: &Scenario) -> Verdict {
    let (car, op) = (&scn.car, &scn.operating_point);
    let k = car.constants(op);
    let grid: Vec<f64> = (0..200).map(|i| 1.0 + 19.0 * i as f64 / 199.0).collect();
    let cars = grid.iter().map(|&p| car_vs_cascade_pump(car, op, p)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let increasing = cars.windows(2).all(|w| w[1] > w[0]);
    let d: Vec<f64> = grid.iter().map(|&p| cascade_pump_denominator(&k, p)).collect();
    let d1: Vec<f64> = d.windows(2).map(|w| w[1] - w[0]).collect();
    let first_negative = d1.iter().all(|&x| x < 0.0);
    let second_positive = d1.windows(2).all(|w| w[1] - w[0] > 0.0);
    let cross = k.b_c2 / k.a_c2_hat;
    let (lo, hi) = (20.0 * cross, 40.0 * cross);
    let slope = (car_vs_cascade_pump(car, op, hi).map_err(err)? / car_vs_cascade_pump(car, op, lo).map_err(err)?).ln()
        / (hi / lo).ln();
    let ok = increasing && first_negative && second_positive && (0.95..=1.05).contains(&slope);
    Ok((
        ok,
        format!(
            "increasing {increasing}, ΔD < 0 {first_negative}, Δ²D > 0 {second_positive}, slope {slope:.4} over {lo:.0}–{hi:.0} W"
        ),
    ))
}

fn temperature_line(scn: &Scenario) -> Verdict {
    let (car, op) = (&scn.car, &scn.operating_point);
    let PhaseMatching::Dispersion { crystal, process } = &car.phase else {
        return Err("bundled scenario should use dispersion phase matching".into());
    };
    let t_star = qpm_temperature(process, crystal, (20.0, 40.0)).map_err(err)?;
    let grid: Vec<f64> = (0..=400).map(|i| 28.0 + 0.01 * i as f64).collect();
    let cars = grid.iter().map(|&t| car_vs_temperature(car, op, t)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let best = (0..grid.len()).max_by(|&a, &b| cars[a].total_cmp(&cars[b])).unwrap();
    let peak_ok = (grid[best] - t_star).abs() <= 0.01;
    let t_zero = first_sinc_zero(&car.phase, t_star).map_err(err)?;
    let phase = car.phase.mismatch_phase(t_zero).map_err(err)?.abs();
    let ratio = car_vs_temperature(car, op, t_zero).map_err(err)? / car_vs_temperature(car, op, t_star).map_err(err)?;
    let ok = peak_ok && (phase - std::f64::consts::PI).abs() < 1e-9 && ratio < 1e-6;
    Ok((
        ok,
        format!(
            "grid peak {:.2} °C vs QPM {t_star:.4} °C, first zero at {t_zero:.4} °C with CAR ratio {ratio:.1e}",
            grid[best]
        ),
    ))
}

fn desk_controls(exp: &PairExperiment, index: u64) -> McControls {
    let budget = 9.0e5 / expected_event_rate(exp);
    McControls {
        seed: derive_seed(20240601, index),
        duration_s: 1.0,
        jitter_ps: 50.0,
        bin_ns: 0.2,
        range_ns: 10.0,
        rate_scale: budget.min(1.0),
    }
}

fn montecarlo_vs_analytic(scn: &Scenario) -> Verdict {
    let mut exps: Vec<(String, PairExperiment)> = [1.0, 3.0, 10.0, 30.0, 60.0]
        .iter()
        .map(|&p| (format!("source {p} mW"), scn.spdc_experiment(p)))
        .collect();
    // Shifted arm with a stronger converter so one simulated second holds
    // enough coincidences.
    let mut boosted = scn.car.clone();
    boosted.conversion_per_w2 *= 1000.0;
    for p2 in [4.0, 8.0, 12.0, 16.0, 20.0] {
        let op = freqshift::carmodel::OperatingPoint { p2_w: p2, ..scn.operating_point };
        exps.push((format!("shifted {p2} W"), scn.shifted_experiment(&boosted, &op).map_err(err)?));
    }
    let mut worst: f64 = 0.0;
    let mut max_events = 0;
    let mut failures = Vec::new();
    for (i, (label, exp)) in exps.iter().enumerate() {
        let ctl = desk_controls(exp, i as u64);
        let out = simulate(exp, &ctl).map_err(err)?;
        let z = (out.estimate.car - out.expected_car).abs() / out.estimate.stderr;
        worst = worst.max(z);
        max_events = max_events.max(out.events);
        if !(z <= 3.0 && out.events <= 1_000_000) {
            failures.push(format!("{label}: {:.2} vs {:.2} ± {:.2}", out.estimate.car, out.expected_car, out.estimate.stderr));
        }
    }
    let detail = format!(
        "worst deviation {worst:.2} σ, at most {max_events} events per run{}",
        if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
    );
    Ok((failures.is_empty(), detail))
}

fn coincidence_oracle() -> Verdict {
    for seed in 0..20u64 {
        let (a, b) = generate_pairs(400.0, 1.0, 300.0, seed).map_err(err)?;
        let a = add_noise(&a, 500.0, seed + 100).map_err(err)?;
        let b = add_noise(&b.shifted(1_500), 500.0, seed + 200).map_err(err)?;
        if a.len() > 2000 || b.len() > 2000 {
            return Err(format!("seed {seed}: streams too long"));
        }
        let fast = coincidence_histogram(&a, &b, 0.5, 20.0).map_err(err)?;
        let slow = brute_force_histogram(&a, &b, 0.5, 20.0).map_err(err)?;
        if fast != slow {
            return Ok((false, format!("seed {seed}: histogram differs from all-pairs count")));
        }
    }
    let (r1, r2, duration, bin) = (1.0e5, 1.0e5, 5.0, 1e-9);
    let x = add_noise(&EventStream::empty("a", duration, 0).map_err(err)?, r1, 41).map_err(err)?;
    let y = add_noise(&EventStream::empty("b", duration, 0).map_err(err)?, r2, 42).map_err(err)?;
    let h = coincidence_histogram(&x, &y, bin * 1e9, 50.0).map_err(err)?;
    let bins = h.counts.len() as f64;
    let mean = h.total() as f64 / bins;
    let expect = x.rate() * y.rate() * bin * duration;
    let sigma = (expect / bins).sqrt();
    let z = (mean - expect).abs() / sigma;
    Ok((z <= 4.0, format!("20 streams match all-pairs; floor {mean:.2} vs {expect:.2} per bin ({z:.2} σ)")))
}

fn ladder_and_grid() -> Verdict {
    let c34 = ItuChannel::new(34).map_err(err)?;
    let (lo, hi) = channels_for_shift(c34, 400.0).map_err(err)?;
    let nu = wavelength_to_thz(1063.9);
    let exact = thz_to_wavelength(nu - 0.2) - thz_to_wavelength(nu + 0.2);
    let linear = shift_to_pump_detuning(400.0, 1063.9);
    let ok = (lo.number(), hi.number()) == (30, 38) && ((exact - linear) / linear).abs() <= 1e-3;
    Ok((ok, format!("±400 GHz from {c34} → ({lo}, {hi}); detuning {exact:.5} nm vs λ²Δf/c {linear:.5} nm")))
}

fn shift_trend(scn: &Scenario) -> Verdict {
    let cfg = &scn.config;
    let centre = cfg.filters.center_channel;
    let mut factors = Vec::new();
    let mut cars = Vec::new();
    for s in [100.0, 200.0, 300.0, 400.0] {
        let (_, up) = channels_for_shift(centre, s).map_err(err)?;
        let p = shift_point(scn, s, &cfg.filter_spec(up)).map_err(err)?;
        factors.push(p.efficiency_factor);
        cars.push(freqshift::carmodel::car_full(&p.car, &scn.operating_point).map_err(err)?);
    }
    let efficiency_falls = factors.windows(2).all(|w| w[1] < w[0]);
    let car_falls = cars.windows(2).all(|w| w[1] < w[0]);
    let last = cars[3];
    let ok = efficiency_falls && car_falls && last > 30.0;
    let list: Vec<String> = cars.iter().map(|c| format!("{c:.1}")).collect();
    Ok((ok, format!("CAR at 100–400 GHz = [{}], efficiency falling {efficiency_falls}", list.join(", "))))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let scn = Scenario::bundled();
    let results = [
        criterion(1, "quantum efficiency identity", quantum_efficiency_identity),
        criterion(2, "cascade efficiency at Pmax and small-signal slope", cascade_half_and_slope),
        criterion(3, "Heisenberg rotation unitarity", rotation_unitarity),
        criterion(4, "QPM temperature-tuning slope", || tuning_slope(&scn)),
        criterion(5, "chirped conversion bandwidth", || chirped_bandwidth(&scn)),
        criterion(6, "source CAR optimum", spdc_optimum),
        criterion(7, "CAR vs cascade pump shape", || cascade_pump_shape(&scn)),
        criterion(8, "CAR vs temperature line shape", || temperature_line(&scn)),
        criterion(9, "Monte Carlo vs analytic CAR", || montecarlo_vs_analytic(&scn)),
        criterion(10, "coincidence histogram oracle", coincidence_oracle),
        criterion(11, "channel ladder and pump detuning", ladder_and_grid),
        criterion(12, "CAR trend across shifts", || shift_trend(&scn)),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!(
        "{passed}/{} criteria passed in {:.1} s",
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
