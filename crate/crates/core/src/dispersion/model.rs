//! Temperature-dependent Sellmeier models and the coefficient file loader.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../../data/dispersion.toml");

/// Published Sellmeier forms understood by [`DispersionModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SellmeierFormula {
    /// Jundt-style extended form with the `f = (T - 24.5)(T + 570.82)`
    /// temperature parameter.
    ExtendedTemperature { a: [f64; 6], b: [f64; 4] },
    /// Two-pole room-temperature Sellmeier plus a quadratic thermo-optic
    /// correction whose coefficients are polynomials in `1/λ`.
    TwoPoleThermo {
        sellmeier: [f64; 5],
        n1: [f64; 4],
        n2: [f64; 4],
    },
}

impl SellmeierFormula {
    fn index(&self, lambda_um: f64, temperature_c: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        match self {
            SellmeierFormula::ExtendedTemperature { a, b } => {
                let f = (temperature_c - 24.5) * (temperature_c + 570.82);
                let pole = a[2] + b[2] * f;
                let n2 = a[0] + b[0] * f + (a[1] + b[1] * f) / (l2 - pole * pole)
                    + (a[3] + b[3] * f) / (l2 - a[4] * a[4])
                    - a[5] * l2;
                n2.sqrt()
            }
            SellmeierFormula::TwoPoleThermo { sellmeier: s, n1, n2 } => {
                let n0 = (s[0] + s[1] / (l2 - s[2]) + s[3] / (l2 - s[4])).sqrt();
                let poly = |c: &[f64; 4]| {
                    c.iter()
                        .enumerate()
                        .map(|(m, cm)| cm / lambda_um.powi(m as i32))
                        .sum::<f64>()
                };
                let dt = temperature_c - 25.0;
                n0 + poly(n1) * dt + poly(n2) * dt * dt
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialEntry {
    description: String,
    source: String,
    #[serde(default)]
    doping: Option<String>,
    wavelength_um: [f64; 2],
    temperature_c: [f64; 2],
    #[serde(default)]
    thermal_expansion: Option<[f64; 2]>,
    formula: SellmeierFormula,
}

/// Refractive index of one material axis as a function of wavelength and
/// temperature, restricted to the range the coefficients were fitted on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionModel {
    pub name: String,
    pub description: String,
    pub source: String,
    pub doping: Option<String>,
    pub formula: SellmeierFormula,
    /// Validity range, μm.
    pub wavelength_um: (f64, f64),
    /// Validity range, °C.
    pub temperature_c: (f64, f64),
    /// Linear and quadratic thermal-expansion coefficients about 25 °C.
    pub thermal_expansion: Option<[f64; 2]>,
}

impl DispersionModel {
    /// Looks up a model in the bundled coefficient file.
    pub fn bundled(name: &str) -> Result<Self> {
        DispersionLibrary::bundled().get(name)
    }

    /// Refractive index at a vacuum wavelength (nm) and temperature (°C).
    pub fn refractive_index(&self, wavelength_nm: f64, temperature_c: f64) -> Result<f64> {
        let lambda_um = wavelength_nm * 1e-3;
        self.check("wavelength_um", lambda_um, self.wavelength_um)?;
        self.check("temperature_c", temperature_c, self.temperature_c)?;
        let n = self.formula.index(lambda_um, temperature_c);
        if !(n.is_finite() && n > 1.0) {
            return Err(Error::NonPhysicalIndex {
                model: self.name.clone(),
                wavelength_nm,
                index: n,
            });
        }
        Ok(n)
    }

    /// Wavenumber `2π n / λ` in rad/m.
    pub fn wavenumber(&self, wavelength_nm: f64, temperature_c: f64) -> Result<f64> {
        let n = self.refractive_index(wavelength_nm, temperature_c)?;
        Ok(2.0 * PI * n / (wavelength_nm * 1e-9))
    }

    /// Relative poling-period growth `L(T)/L(25 °C)`; 1 when the model has no
    /// expansion data.
    pub fn expansion_factor(&self, temperature_c: f64) -> f64 {
        match self.thermal_expansion {
            Some([alpha, beta]) => {
                let dt = temperature_c - 25.0;
                1.0 + alpha * dt + beta * dt * dt
            }
            None => 1.0,
        }
    }

    fn check(&self, quantity: &'static str, value: f64, (min, max): (f64, f64)) -> Result<()> {
        if value.is_finite() && value >= min && value <= max {
            Ok(())
        } else {
            Err(Error::OutOfValidityRange {
                model: self.name.clone(),
                quantity,
                value,
                min,
                max,
            })
        }
    }
}

/// A set of named dispersion models parsed from a coefficient file.
#[derive(Debug, Clone)]
pub struct DispersionLibrary {
    models: BTreeMap<String, DispersionModel>,
}

impl DispersionLibrary {
    /// Models shipped in `data/dispersion.toml`.
    pub fn bundled() -> Self {
        Self::from_toml_str(BUNDLED).expect("bundled dispersion file is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let entries: BTreeMap<String, MaterialEntry> =
            toml::from_str(text).map_err(|e| Error::Parse {
                what: "dispersion coefficient file".into(),
                message: e.to_string(),
            })?;
        let mut models = BTreeMap::new();
        for (name, entry) in entries {
            let [wmin, wmax] = entry.wavelength_um;
            let [tmin, tmax] = entry.temperature_c;
            if !(wmin > 0.0 && wmin < wmax && tmin < tmax) {
                return Err(Error::config(
                    name.clone(),
                    "validity ranges must be increasing and wavelengths positive",
                ));
            }
            models.insert(
                name.clone(),
                DispersionModel {
                    name,
                    description: entry.description,
                    source: entry.source,
                    doping: entry.doping,
                    formula: entry.formula,
                    wavelength_um: (wmin, wmax),
                    temperature_c: (tmin, tmax),
                    thermal_expansion: entry.thermal_expansion,
                },
            );
        }
        Ok(Self { models })
    }

    pub fn get(&self, name: &str) -> Result<DispersionModel> {
        self.models
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_file_parses_every_material() {
        let lib = DispersionLibrary::bundled();
        let names: Vec<_> = lib.names().collect();
        assert_eq!(names, ["cln_e", "ktp_y", "ktp_z", "mgo_cln_e"]);
        for name in names {
            assert!(!lib.get(name).unwrap().source.is_empty());
        }
    }

    // Frozen from a standalone evaluation of the published formulas.
    #[test]
    fn matches_independent_evaluation() {
        let cln = DispersionModel::bundled("cln_e").unwrap();
        let n = cln.refractive_index(1064.0, 30.0).unwrap();
        assert!((n - 2.156_019_634_434_053).abs() < 1e-12, "{n}");

        let mgo = DispersionModel::bundled("mgo_cln_e").unwrap();
        let n = mgo.refractive_index(1064.0, 30.0).unwrap();
        assert!((n - 2.149_638_907_950_721_7).abs() < 1e-12, "{n}");

        let ky = DispersionModel::bundled("ktp_y").unwrap();
        let kz = DispersionModel::bundled("ktp_z").unwrap();
        assert!((ky.refractive_index(1550.0, 25.0).unwrap() - 1.734_906_119_407_444_7).abs() < 1e-12);
        assert!((kz.refractive_index(1550.0, 25.0).unwrap() - 1.815_773_110_817_311_4).abs() < 1e-12);
    }

    #[test]
    fn normal_dispersion_ordering() {
        for name in ["cln_e", "mgo_cln_e"] {
            let m = DispersionModel::bundled(name).unwrap();
            assert!(m.refractive_index(633.0, 30.0).unwrap() > m.refractive_index(1550.0, 30.0).unwrap());
        }
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        let m = DispersionModel::bundled("mgo_cln_e").unwrap();
        match m.refractive_index(300.0, 30.0) {
            Err(Error::OutOfValidityRange { quantity, value, .. }) => {
                assert_eq!(quantity, "wavelength_um");
                assert!((value - 0.3).abs() < 1e-12);
            }
            other => panic!("expected range error, got {other:?}"),
        }
        assert!(matches!(
            m.refractive_index(1064.0, 500.0),
            Err(Error::OutOfValidityRange { quantity: "temperature_c", .. })
        ));
        assert!(m.refractive_index(f64::NAN, 30.0).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"
            [x]
            description = "d"
            source = "s"
            wavelength_um = [0.5, 2.0]
            temperature_c = [0.0, 100.0]
            colour = "blue"
            [x.formula]
            kind = "extended-temperature"
            a = [5.0, 0.1, 0.2, 100.0, 11.0, 0.01]
            b = [0.0, 0.0, 0.0, 0.0]
        "#;
        assert!(DispersionLibrary::from_toml_str(text).is_err());
    }

    #[test]
    fn expansion_is_unity_at_reference() {
        let m = DispersionModel::bundled("mgo_cln_e").unwrap();
        assert_eq!(m.expansion_factor(25.0), 1.0);
        assert!(m.expansion_factor(60.0) > 1.0);
        assert_eq!(DispersionModel::bundled("ktp_y").unwrap().expansion_factor(80.0), 1.0);
    }
}
