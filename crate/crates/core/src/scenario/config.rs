//! Scenario document: schema, validation and the resolved model objects.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::carmodel::{CarModelParams, OperatingPoint, PhaseMatching, RationalConstants};
use crate::cascade::{small_signal_coefficient, CascadeConfig, EfficiencyParams, Pmax};
use crate::dispersion::{calibrate_trim_ppm, CrystalSpec, DispersionLibrary, PolingProfile, ThreeWaveProcess};
use crate::error::{Error, Result};
use crate::filters::{FilterSpec, ItuChannel};
use crate::montecarlo::{ArmModel, DetectorSpec, McControls, PairExperiment};
use crate::pairsource::SpdcSourceParams;

const DEFAULT_SCENARIO: &str = include_str!("../../scenarios/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Coefficient file; the bundled models are used when absent.
    #[serde(default)]
    pub dispersion_file: Option<PathBuf>,
    pub crystals: Crystals,
    pub cascade: CascadeSection,
    pub source: SourceSection,
    pub car_model: CarModelSection,
    pub filters: FilterSection,
    pub detectors: Detectors,
    pub montecarlo: MonteCarloSection,
    pub grids: Grids,
    #[serde(default)]
    pub sweeps: Vec<SweepDef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Crystals {
    pub cascade: CrystalSection,
    pub spdc: CrystalSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    pub material: String,
    pub length_mm: f64,
    pub temperature_c: f64,
    pub poling: PolingProfile,
    /// Explicit poling-period trim; when absent the cascade crystal is
    /// calibrated onto the SFG phase-matching point.
    #[serde(default)]
    pub period_trim_ppm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeSection {
    pub signal_nm: f64,
    pub pump1_nm: f64,
    pub pump2_nm: f64,
    /// Power of each cascade pump, W.
    pub power_w: f64,
    #[serde(default)]
    pub pump2_power_w: Option<f64>,
    /// Signal power used for the classical SFG power curve, mW.
    pub signal_power_mw: f64,
    pub d_eff_pm_per_v: f64,
    #[serde(default)]
    pub pmax_sfg_w: Option<f64>,
    #[serde(default)]
    pub pmax_dfg_w: Option<f64>,
    pub segments: usize,
    pub ladder_order: u32,
    pub order_attenuation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub a: f64,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    /// Ambient background per arm, counts/s. Detector darks are added on top.
    pub n_n: [f64; 2],
    pub delta_tau_s: f64,
    pub pump_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhaseSection {
    Ideal,
    Dispersion,
    Shorthand { first_zero_offset_c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarModelSection {
    pub alpha_c: f64,
    pub beta_c: f64,
    /// Ambient floor of the shifted channel, counts/s.
    pub n_nc: f64,
    /// Small-signal cascade coefficient, 1/W²; derived from the stage `Pmax`
    /// values when absent.
    #[serde(default)]
    pub conversion_per_w2: Option<f64>,
    pub phase: PhaseSection,
    #[serde(default)]
    pub fitted: Option<RationalConstants>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub center_channel: ItuChannel,
    pub fwhm_ghz: f64,
    pub order: u32,
    pub insertion_loss_db: f64,
    pub stages: u32,
    pub shifts_ghz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detectors {
    pub reference: DetectorSpec,
    pub signal: DetectorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub enabled: bool,
    pub seed: u64,
    pub duration_s: f64,
    pub jitter_ps: f64,
    pub bin_ns: f64,
    pub range_ns: f64,
    pub rate_scale: f64,
    /// Upper bound on simulated raw events per point; `rate_scale` is reduced
    /// for points that would exceed it.
    pub max_events: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default)]
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub spdc_pump_mw: GridSpec,
    pub cascade_pump_w: GridSpec,
    pub temperature_c: GridSpec,
    pub sfg_pump_w: GridSpec,
    pub pump_wavelength_nm: GridSpec,
    pub tuning_temperature_c: GridSpec,
    pub filter_frequency_thz: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDef {
    pub variable: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default)]
    pub log: bool,
}

impl SweepDef {
    pub fn grid(&self) -> GridSpec {
        GridSpec { min: self.min, max: self.max, steps: self.steps, log: self.log }
    }
}

impl GridSpec {
    pub fn validate(&self, path: &str) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(Error::config(path, format!("need finite min <= max, got {}..{}", self.min, self.max)));
        }
        if self.log && !(self.min > 0.0) {
            return Err(Error::config(path, "logarithmic grids need min > 0"));
        }
        if self.steps == 1 && self.min != self.max {
            return Err(Error::config(path, "a single-step grid needs min == max"));
        }
        Ok(())
    }

    /// Grid points, inclusive of both ends.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / n;
                if self.log {
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect()
    }
}

/// Re-labels a module-level parameter error with its location in the document.
fn at(prefix: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::InvalidParameter { name, reason } => Error::config(format!("{prefix}.{name}"), reason),
        Error::Config { path, message } => Error::config(format!("{prefix}.{path}"), message),
        Error::UnknownMaterial(m) => Error::config(format!("{prefix}.material"), format!("unknown material `{m}`")),
        other => Error::config(prefix, other.to_string()),
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(path, format!("{v} must be finite and > 0")))
    }
}

fn non_negative(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::config(path, format!("{v} must be finite and >= 0")))
    }
}

impl ScenarioConfig {
    /// The bundled default scenario.
    pub fn bundled() -> Self {
        Self::from_toml_str(DEFAULT_SCENARIO).expect("bundled scenario is valid")
    }

    pub fn default_toml() -> &'static str {
        DEFAULT_SCENARIO
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| format!("byte {}..{}", s.start, s.end)).unwrap_or_default();
            Error::config(path, e.message().to_string())
        })
    }

    /// Reads a document; a relative `dispersion_file` is resolved against the
    /// document's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let (Some(file), Some(dir)) = (&cfg.dispersion_file, path.parent()) {
            if file.is_relative() {
                cfg.dispersion_file = Some(dir.join(file));
            }
        }
        Ok(cfg)
    }

    /// SHA-256 of the resolved document in canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.montecarlo.seed = seed;
        self
    }

    pub fn library(&self) -> Result<DispersionLibrary> {
        match &self.dispersion_file {
            None => Ok(DispersionLibrary::bundled()),
            Some(p) => DispersionLibrary::load(p).map_err(|e| Error::config("dispersion_file", e.to_string())),
        }
    }

    /// Field-level checks that do not need the dispersion models.
    pub fn validate_fields(&self) -> Result<()> {
        let c = &self.cascade;
        for (p, v) in [
            ("cascade.signal_nm", c.signal_nm),
            ("cascade.pump1_nm", c.pump1_nm),
            ("cascade.pump2_nm", c.pump2_nm),
            ("cascade.signal_power_mw", c.signal_power_mw),
            ("cascade.d_eff_pm_per_v", c.d_eff_pm_per_v),
            ("cascade.order_attenuation", c.order_attenuation),
        ] {
            positive(p, v)?;
        }
        non_negative("cascade.power_w", c.power_w)?;
        if let Some(v) = c.pump2_power_w {
            non_negative("cascade.pump2_power_w", v)?;
        }
        for (p, v) in [("cascade.pmax_sfg_w", c.pmax_sfg_w), ("cascade.pmax_dfg_w", c.pmax_dfg_w)] {
            if let Some(v) = v {
                positive(p, v)?;
            }
        }
        if c.segments < crate::dispersion::MIN_SEGMENTS {
            return Err(Error::config("cascade.segments", format!("{} < {}", c.segments, crate::dispersion::MIN_SEGMENTS)));
        }
        if c.ladder_order < 1 {
            return Err(Error::config("cascade.ladder_order", "must be >= 1"));
        }
        positive("source.pump_mw", self.source.pump_mw)?;

        let m = &self.car_model;
        if let Some(v) = m.conversion_per_w2 {
            non_negative("car_model.conversion_per_w2", v)?;
        }
        if let PhaseSection::Shorthand { first_zero_offset_c } = m.phase {
            positive("car_model.phase.first_zero_offset_c", first_zero_offset_c)?;
        }

        let f = &self.filters;
        self.filter_spec(f.center_channel).validate().map_err(at("filters"))?;
        if f.shifts_ghz.is_empty() {
            return Err(Error::config("filters.shifts_ghz", "needs at least one shift"));
        }
        for (i, &s) in f.shifts_ghz.iter().enumerate() {
            crate::filters::channels_for_shift(f.center_channel, s).map_err(|e| Error::config(format!("filters.shifts_ghz[{i}]"), e.to_string()))?;
        }

        self.detectors.reference.validate().map_err(at("detectors.reference"))?;
        self.detectors.signal.validate().map_err(at("detectors.signal"))?;
        self.mc_controls().validate().map_err(at("montecarlo"))?;
        if self.montecarlo.max_events == 0 {
            return Err(Error::config("montecarlo.max_events", "must be >= 1"));
        }

        let g = &self.grids;
        for (p, grid) in [
            ("grids.spdc_pump_mw", g.spdc_pump_mw),
            ("grids.cascade_pump_w", g.cascade_pump_w),
            ("grids.temperature_c", g.temperature_c),
            ("grids.sfg_pump_w", g.sfg_pump_w),
            ("grids.pump_wavelength_nm", g.pump_wavelength_nm),
            ("grids.tuning_temperature_c", g.tuning_temperature_c),
            ("grids.filter_frequency_thz", g.filter_frequency_thz),
        ] {
            grid.validate(p).map_err(|e| match e {
                Error::EmptyGrid => Error::config(p, "grid is empty"),
                e => e,
            })?;
        }
        for (i, s) in self.sweeps.iter().enumerate() {
            let p = format!("sweeps[{i}]");
            if !super::sweep::VARIABLES.contains(&s.variable.as_str()) {
                return Err(Error::config(format!("{p}.variable"), format!("unknown sweep variable `{}`", s.variable)));
            }
            s.grid().validate(&p).map_err(|e| match e {
                Error::EmptyGrid => Error::config(&p, "grid is empty"),
                e => e,
            })?;
        }
        Ok(())
    }

    pub fn filter_spec(&self, channel: ItuChannel) -> FilterSpec {
        let f = &self.filters;
        FilterSpec {
            center_thz: channel.center_thz(),
            fwhm_ghz: f.fwhm_ghz,
            order: f.order,
            insertion_loss_db: f.insertion_loss_db,
            stages: f.stages,
        }
    }

    pub fn mc_controls(&self) -> McControls {
        let m = &self.montecarlo;
        McControls {
            seed: m.seed,
            duration_s: m.duration_s,
            jitter_ps: m.jitter_ps,
            bin_ns: m.bin_ns,
            range_ns: m.range_ns,
            rate_scale: m.rate_scale,
        }
    }
}

/// A validated scenario with every model object built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub hash: String,
    /// Cascade crystal with the resolved poling trim.
    pub cascade_crystal: CrystalSpec,
    pub spdc_crystal: CrystalSpec,
    pub cascade: CascadeConfig,
    pub pmax: (Pmax, Pmax),
    pub source: SpdcSourceParams,
    pub car: CarModelParams,
    pub operating_point: OperatingPoint,
}

fn build_crystal(lib: &DispersionLibrary, s: &CrystalSection, path: &str) -> Result<CrystalSpec> {
    let model = lib.get(&s.material).map_err(at(path))?;
    let c = CrystalSpec::new(model, s.length_mm, s.poling, s.temperature_c).map_err(at(path))?;
    Ok(c.with_trim_ppm(s.period_trim_ppm.unwrap_or(0.0)))
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate_fields()?;
        let lib = config.library()?;
        let cs = &config.cascade;

        let mut cascade_crystal = build_crystal(&lib, &config.crystals.cascade, "crystals.cascade")?;
        let spdc_crystal = build_crystal(&lib, &config.crystals.spdc, "crystals.spdc")?;
        let sfg = ThreeWaveProcess::sfg(cs.signal_nm, cs.pump1_nm).map_err(at("cascade"))?;
        if config.crystals.cascade.period_trim_ppm.is_none() {
            let trim = calibrate_trim_ppm(&sfg, &cascade_crystal).map_err(at("crystals.cascade"))?;
            cascade_crystal = cascade_crystal.with_trim_ppm(trim);
        }

        let t = cascade_crystal.temperature_c;
        let dfg = ThreeWaveProcess::dfg(sfg.lambda_out_nm(), cs.pump2_nm).map_err(at("cascade"))?;
        let mut efficiency = EfficiencyParams::from_dispersion(
            &cascade_crystal.dispersion,
            t,
            cs.d_eff_pm_per_v,
            cascade_crystal.length_m(),
            cs.pump1_nm,
            cs.signal_nm,
            dfg.lambda_out_nm(),
            sfg.lambda_out_nm(),
        )
        .map_err(at("cascade"))?;
        efficiency.pmax1_cal_w = cs.pmax_sfg_w;
        efficiency.pmax2_cal_w = cs.pmax_dfg_w;
        let cascade = CascadeConfig {
            signal_nm: cs.signal_nm,
            pump1_nm: cs.pump1_nm,
            pump2_nm: cs.pump2_nm,
            power_w: cs.power_w,
            pump2_power_w: cs.pump2_power_w,
            crystal: cascade_crystal.clone(),
            efficiency,
        };
        cascade.validate().map_err(at("cascade"))?;
        let pmax = cascade.pmax().map_err(at("cascade"))?;

        let d = &config.detectors;
        let src = &config.source;
        let source = SpdcSourceParams {
            a: src.a,
            alpha: src.alpha,
            eta: [d.reference.efficiency, d.signal.efficiency],
            beta: src.beta,
            n_n: [src.n_n[0] + d.reference.dark_rate, src.n_n[1] + d.signal.dark_rate],
            delta_tau_s: src.delta_tau_s,
        };
        source.validate().map_err(at("source"))?;

        let m = &config.car_model;
        let phase = match m.phase {
            PhaseSection::Ideal => PhaseMatching::Ideal,
            PhaseSection::Shorthand { first_zero_offset_c } => PhaseMatching::Shorthand { peak_c: t, first_zero_offset_c },
            PhaseSection::Dispersion => PhaseMatching::Dispersion {
                crystal: cascade_crystal
                    .with_poling(PolingProfile::Uniform { period_um: cascade_crystal.poling.center_period_um() })
                    .map_err(at("crystals.cascade"))?,
                process: sfg,
            },
        };
        let car = CarModelParams {
            source: source.clone(),
            alpha_c: m.alpha_c,
            eta_c: d.signal.efficiency,
            conversion_per_w2: m.conversion_per_w2.unwrap_or_else(|| small_signal_coefficient(pmax.0.watts, pmax.1.watts)),
            beta_c: m.beta_c,
            n_nc: m.n_nc + d.signal.dark_rate,
            phase,
            fitted: m.fitted,
        };
        car.validate().map_err(at("car_model"))?;
        let operating_point = OperatingPoint { p1_mw: src.pump_mw, p2_w: cs.power_w, t2_c: t };
        car.phase.factor(t).map_err(at("crystals.cascade"))?;

        let hash = config.hash();
        Ok(Self {
            config,
            hash,
            cascade_crystal,
            spdc_crystal,
            cascade,
            pmax,
            source,
            car,
            operating_point,
        })
    }

    pub fn bundled() -> Self {
        Self::new(ScenarioConfig::bundled()).expect("bundled scenario resolves")
    }

    /// Source-only measurement: heralding arm against the unshifted signal arm.
    pub fn spdc_experiment(&self, p1_mw: f64) -> PairExperiment {
        let s = &self.config.source;
        let d = &self.config.detectors;
        PairExperiment {
            pair_rate: self.source.pair_rate(p1_mw),
            arms: [
                ArmModel { survival: s.alpha[0], noise_rate: s.beta[0] * p1_mw + s.n_n[0], detector: d.reference },
                ArmModel { survival: s.alpha[1], noise_rate: s.beta[1] * p1_mw + s.n_n[1], detector: d.signal },
            ],
        }
    }

    /// Heralding arm against the frequency-shifted arm described by `car`.
    pub fn shifted_experiment(&self, car: &CarModelParams, op: &OperatingPoint) -> Result<PairExperiment> {
        let s = &self.config.source;
        let d = &self.config.detectors;
        // Detector darks are added by the simulated detector itself.
        let ambient = car.n_nc - d.signal.dark_rate;
        Ok(PairExperiment {
            pair_rate: car.source.pair_rate(op.p1_mw),
            arms: [
                ArmModel { survival: s.alpha[0], noise_rate: s.beta[0] * op.p1_mw + s.n_n[0], detector: d.reference },
                ArmModel {
                    survival: car.shifted_survival(op.p2_w, op.t2_c)?,
                    noise_rate: car.beta_c * op.p2_w + ambient,
                    detector: d.signal,
                },
            ],
        })
    }

    /// Controls for point `index`, with the seed derived from the base seed
    /// and the rate scale reduced to respect the event budget.
    pub fn mc_controls_for(&self, exp: &PairExperiment, index: usize) -> McControls {
        let base = self.config.mc_controls();
        let raw = crate::montecarlo::expected_event_rate(exp);
        let budget = self.config.montecarlo.max_events as f64 / (raw * base.duration_s).max(f64::MIN_POSITIVE);
        McControls {
            seed: crate::montecarlo::derive_seed(base.seed, index as u64),
            rate_scale: base.rate_scale.min(budget),
            ..base
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenario_resolves() {
        let s = Scenario::bundled();
        assert!(s.cascade_crystal.period_trim_ppm.abs() < 5000.0);
        assert_eq!(s.hash.len(), 64);
        assert!(s.pmax.0.calibrated);
    }

    #[test]
    fn hash_tracks_content() {
        let a = ScenarioConfig::bundled();
        let b = a.clone().with_seed(a.montecarlo.seed + 1);
        assert_eq!(a.hash(), ScenarioConfig::bundled().hash());
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = ScenarioConfig::default_toml().replace("[source]", "[source]\ncolour = 1");
        let err = ScenarioConfig::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn errors_carry_field_paths() {
        let mut c = ScenarioConfig::bundled();
        c.source.alpha[1] = 1.5;
        let err = Scenario::new(c).unwrap_err().to_string();
        assert!(err.contains("source.alpha"), "{err}");

        let mut c = ScenarioConfig::bundled();
        c.grids.cascade_pump_w.steps = 0;
        assert!(Scenario::new(c).unwrap_err().to_string().contains("grids.cascade_pump_w"));

        let mut c = ScenarioConfig::bundled();
        c.crystals.cascade.material = "unobtainium".into();
        assert!(Scenario::new(c).unwrap_err().to_string().contains("crystals.cascade.material"));

        let mut c = ScenarioConfig::bundled();
        c.filters.shifts_ghz.push(150.0);
        assert!(Scenario::new(c).unwrap_err().to_string().contains("filters.shifts_ghz[4]"));
    }

    #[test]
    fn grid_points() {
        let g = GridSpec { min: 1.0, max: 100.0, steps: 3, log: true };
        let p = g.points();
        assert!((p[1] - 10.0).abs() < 1e-12 && p[2] == 100.0f64.ln().exp());
        assert_eq!(GridSpec { min: 0.0, max: 1.0, steps: 5, log: false }.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
