use freqshift::dispersion::{
    chirped_response, phase_mismatch, qpm_period, qpm_wavelength, relative_efficiency, sinc, CrystalSpec,
    DispersionModel, PolingProfile, ProcessFamily, ProcessKind, ThreeWaveProcess,
};
use freqshift::scenario::Scenario;
use proptest::prelude::*;

fn mgo_crystal(temperature_c: f64) -> CrystalSpec {
    let model = DispersionModel::bundled("mgo_cln_e").unwrap();
    CrystalSpec::new(model, 40.0, PolingProfile::Uniform { period_um: 11.8 }, temperature_c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn qpm_period_round_trips_through_the_mismatch(
        a in 1000.0f64..2500.0,
        b in 1000.0f64..2500.0,
        t in 20.0f64..150.0,
    ) {
        let crystal = mgo_crystal(t);
        let process = ThreeWaveProcess::sfg(a, b).unwrap();
        let period = qpm_period(&process, &crystal).unwrap();
        let dk = phase_mismatch(&process, &crystal, period).unwrap();
        prop_assert!(dk.abs() < 1e-6, "Δk = {dk} rad/m at Λ = {period} μm");
    }
}

#[test]
fn qpm_wavelength_is_monotone_in_temperature() {
    let scn = Scenario::bundled();
    let crystal = freqshift::scenario::uniform_equivalent(&scn.cascade_crystal).unwrap();
    for start in (20..=180).step_by(20) {
        let roots: Vec<f64> = (0..=20)
            .map(|dt| {
                let c = crystal.with_temperature((start + dt) as f64);
                qpm_wavelength(1550.0, &c, ProcessKind::Sfg, (1000.0, 1150.0)).unwrap()
            })
            .collect();
        assert!(roots.windows(2).all(|w| w[1] > w[0]), "window from {start} °C: {roots:?}");
    }
}

#[test]
fn degenerate_chirp_matches_closed_form_pointwise() {
    let scn = Scenario::bundled();
    let base = &scn.cascade_crystal;
    let centre = base.poling.center_period_um();
    let degenerate = base.with_poling(PolingProfile::LinearChirp { start_um: centre, end_um: centre }).unwrap();
    let uniform = base.with_poling(PolingProfile::Uniform { period_um: centre }).unwrap();
    let period = uniform.effective_center_period_um();
    let family = ProcessFamily { fixed_nm: 1550.0, kind: ProcessKind::Sfg };
    let mut worst_rel: f64 = 0.0;
    let mut worst_abs: f64 = 0.0;
    for i in 0..=2000 {
        let l = 1060.0 + 0.004 * i as f64;
        let p = family.member(l).unwrap();
        let numeric = relative_efficiency(&p, &degenerate, 256).unwrap();
        let dk = phase_mismatch(&p, &uniform, period).unwrap();
        let closed = sinc(dk * uniform.length_m() / 2.0).powi(2);
        worst_abs = worst_abs.max((numeric - closed).abs());
        // Relative error is only meaningful away from the exact zeros.
        if closed > 1e-6 {
            worst_rel = worst_rel.max(((numeric - closed) / closed).abs());
        }
    }
    assert!(worst_rel <= 1e-9, "relative {worst_rel:e}");
    assert!(worst_abs <= 1e-12, "absolute {worst_abs:e}");
}

#[test]
fn normalized_spectrum_peaks_at_one() {
    let scn = Scenario::bundled();
    let family = ProcessFamily { fixed_nm: 1550.0, kind: ProcessKind::Sfg };
    let grid: Vec<f64> = (0..=200).map(|i| 1055.0 + 0.1 * i as f64).collect();
    let s = chirped_response(&scn.cascade_crystal, &family, &grid, 256).unwrap();
    assert_eq!(s.nqce.iter().cloned().fold(f64::MIN, f64::max), 1.0);
    assert!(s.nqce.iter().all(|&v| (0.0..=1.0).contains(&v)));
}
