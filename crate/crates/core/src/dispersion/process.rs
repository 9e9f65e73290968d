use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    /// `1/λ_out = 1/λ_a + 1/λ_b`
    Sfg,
    /// `1/λ_out = 1/λ_a − 1/λ_b`; `a` is the higher-frequency input.
    Dfg,
}

/// Energy-conserving three-wave mixing triple, wavelengths in nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeWaveProcess {
    lambda_a_nm: f64,
    lambda_b_nm: f64,
    lambda_out_nm: f64,
    kind: ProcessKind,
}

const ENERGY_TOLERANCE: f64 = 1e-12;

impl ThreeWaveProcess {
    pub fn sfg(lambda_a_nm: f64, lambda_b_nm: f64) -> Result<Self> {
        check_input("lambda_a_nm", lambda_a_nm)?;
        check_input("lambda_b_nm", lambda_b_nm)?;
        let out = 1.0 / (1.0 / lambda_a_nm + 1.0 / lambda_b_nm);
        Self::new(lambda_a_nm, lambda_b_nm, out, ProcessKind::Sfg)
    }

    pub fn dfg(lambda_a_nm: f64, lambda_b_nm: f64) -> Result<Self> {
        check_input("lambda_a_nm", lambda_a_nm)?;
        check_input("lambda_b_nm", lambda_b_nm)?;
        if lambda_a_nm >= lambda_b_nm {
            return Err(Error::EnergyConservation(format!(
                "DFG needs λ_a < λ_b, got {lambda_a_nm} nm and {lambda_b_nm} nm"
            )));
        }
        let out = 1.0 / (1.0 / lambda_a_nm - 1.0 / lambda_b_nm);
        Self::new(lambda_a_nm, lambda_b_nm, out, ProcessKind::Dfg)
    }

    pub fn with_kind(kind: ProcessKind, lambda_a_nm: f64, lambda_b_nm: f64) -> Result<Self> {
        match kind {
            ProcessKind::Sfg => Self::sfg(lambda_a_nm, lambda_b_nm),
            ProcessKind::Dfg => Self::dfg(lambda_a_nm, lambda_b_nm),
        }
    }

    /// Builds a process from all three wavelengths, checking photon-energy
    /// conservation to 1e-12 relative.
    pub fn new(lambda_a_nm: f64, lambda_b_nm: f64, lambda_out_nm: f64, kind: ProcessKind) -> Result<Self> {
        check_input("lambda_out_nm", lambda_out_nm)?;
        let (fa, fb, fo) = (1.0 / lambda_a_nm, 1.0 / lambda_b_nm, 1.0 / lambda_out_nm);
        let expected = match kind {
            ProcessKind::Sfg => fa + fb,
            ProcessKind::Dfg => fa - fb,
        };
        if !(expected > 0.0) || ((fo - expected) / expected).abs() > ENERGY_TOLERANCE {
            return Err(Error::EnergyConservation(format!(
                "{kind:?}: {lambda_a_nm} nm, {lambda_b_nm} nm -> {lambda_out_nm} nm"
            )));
        }
        Ok(Self {
            lambda_a_nm,
            lambda_b_nm,
            lambda_out_nm,
            kind,
        })
    }

    pub fn lambda_a_nm(&self) -> f64 {
        self.lambda_a_nm
    }
    pub fn lambda_b_nm(&self) -> f64 {
        self.lambda_b_nm
    }
    pub fn lambda_out_nm(&self) -> f64 {
        self.lambda_out_nm
    }
    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    /// `(λ_high, λ_low1, λ_low2)`: the highest-frequency wave and the two
    /// whose photon energies add up to it.
    pub fn by_frequency(&self) -> (f64, f64, f64) {
        match self.kind {
            ProcessKind::Sfg => (self.lambda_out_nm, self.lambda_a_nm, self.lambda_b_nm),
            ProcessKind::Dfg => (self.lambda_a_nm, self.lambda_b_nm, self.lambda_out_nm),
        }
    }

    /// Relative violation of photon-energy conservation.
    pub fn energy_residual(&self) -> f64 {
        let (h, l1, l2) = self.by_frequency();
        ((1.0 / h) - (1.0 / l1 + 1.0 / l2)).abs() * h
    }
}

fn check_input(name: &'static str, lambda_nm: f64) -> Result<()> {
    if lambda_nm.is_finite() && lambda_nm > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{lambda_nm} nm must be finite and positive")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cascade_wavelengths() {
        let sfg = ThreeWaveProcess::sfg(1550.0, 1063.9).unwrap();
        assert!((sfg.lambda_out_nm() - 630.875_320_402_463_8).abs() < 1e-9);
        let dfg = ThreeWaveProcess::dfg(sfg.lambda_out_nm(), 1063.9).unwrap();
        assert!((dfg.lambda_out_nm() - 1550.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_inconsistent_triples() {
        assert!(ThreeWaveProcess::new(1550.0, 1064.0, 640.0, ProcessKind::Sfg).is_err());
        assert!(ThreeWaveProcess::dfg(1064.0, 631.0).is_err());
        assert!(ThreeWaveProcess::sfg(-1.0, 1064.0).is_err());
    }

    proptest! {
        #[test]
        fn constructed_processes_conserve_energy(a in 400.0f64..3000.0, b in 400.0f64..3000.0) {
            let sfg = ThreeWaveProcess::sfg(a, b).unwrap();
            prop_assert!(sfg.energy_residual() < 1e-12);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-3);
            let dfg = ThreeWaveProcess::dfg(lo, hi).unwrap();
            prop_assert!(dfg.energy_residual() < 1e-12);
        }
    }
}
