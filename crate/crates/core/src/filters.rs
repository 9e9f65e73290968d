//! ITU 100 GHz DWDM grid and super-Gaussian channel filters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid origin, GHz.
pub const GRID_ORIGIN_GHZ: i64 = 190_000;
/// Grid spacing, GHz.
pub const GRID_SPACING_GHZ: i64 = 100;
pub const MIN_CHANNEL: i32 = 1;
pub const MAX_CHANNEL: i32 = 99;

/// Channel `Cn` of the 100 GHz grid, centred at `190.0 + 0.1·n` THz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct ItuChannel(i32);

impl ItuChannel {
    pub fn new(number: i32) -> Result<Self> {
        if (MIN_CHANNEL..=MAX_CHANNEL).contains(&number) {
            Ok(Self(number))
        } else {
            Err(Error::UnsupportedChannel(number))
        }
    }

    pub fn number(self) -> i32 {
        self.0
    }

    /// Exact centre in GHz.
    pub fn center_ghz(self) -> i64 {
        GRID_ORIGIN_GHZ + GRID_SPACING_GHZ * self.0 as i64
    }

    pub fn center_thz(self) -> f64 {
        self.center_ghz() as f64 / 1e3
    }
}

impl TryFrom<i32> for ItuChannel {
    type Error = Error;
    fn try_from(n: i32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<ItuChannel> for i32 {
    fn from(c: ItuChannel) -> i32 {
        c.0
    }
}

impl std::fmt::Display for ItuChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "C{}", self.0)
    }
}

/// `channel_center` as a free function, THz.
pub fn channel_center(channel: ItuChannel) -> f64 {
    channel.center_thz()
}

fn default_fwhm() -> f64 {
    100.0
}
fn default_order() -> u32 {
    4
}
fn default_stages() -> u32 {
    1
}

/// Super-Gaussian passband
/// `T(f) = peak·exp(−ln2·(2|f − f0|/FWHM)^(2·order))`, raised to the
/// number of identical cascaded `stages`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub center_thz: f64,
    #[serde(default = "default_fwhm")]
    pub fwhm_ghz: f64,
    #[serde(default = "default_order")]
    pub order: u32,
    #[serde(default)]
    pub insertion_loss_db: f64,
    #[serde(default = "default_stages")]
    pub stages: u32,
}

impl FilterSpec {
    /// Default order-4, 100 GHz, lossless single filter on `channel`.
    pub fn for_channel(channel: ItuChannel) -> Self {
        Self {
            center_thz: channel.center_thz(),
            fwhm_ghz: default_fwhm(),
            order: default_order(),
            insertion_loss_db: 0.0,
            stages: default_stages(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center_thz.is_finite() && self.center_thz > 0.0) {
            return Err(Error::invalid("center_thz", format!("{} must be > 0", self.center_thz)));
        }
        if !(self.fwhm_ghz.is_finite() && self.fwhm_ghz > 0.0) {
            return Err(Error::invalid("fwhm_ghz", format!("{} must be > 0", self.fwhm_ghz)));
        }
        if self.order == 0 {
            return Err(Error::invalid("order", "must be >= 1"));
        }
        if !(self.insertion_loss_db.is_finite() && self.insertion_loss_db >= 0.0) {
            return Err(Error::invalid("insertion_loss_db", "must be finite and >= 0"));
        }
        if self.stages == 0 {
            return Err(Error::invalid("stages", "must be >= 1"));
        }
        Ok(())
    }

    /// Single-stage peak transmittance `10^(−loss/10)`.
    pub fn peak(&self) -> f64 {
        10f64.powf(-self.insertion_loss_db / 10.0)
    }

    /// Transmittance at a detuning from the centre, GHz.
    pub fn transmittance_at_offset(&self, offset_ghz: f64) -> f64 {
        let x = 2.0 * offset_ghz.abs() / self.fwhm_ghz;
        let single = self.peak() * (-std::f64::consts::LN_2 * x.powi(2 * self.order as i32)).exp();
        single.powi(self.stages as i32)
    }

    /// Transmittance at an absolute frequency, THz.
    pub fn transmittance(&self, frequency_thz: f64) -> f64 {
        self.transmittance_at_offset((frequency_thz - self.center_thz) * 1e3)
    }

    /// Suppression in dB at a detuning, relative to the peak.
    pub fn isolation_db(&self, offset_ghz: f64) -> f64 {
        let peak = self.peak().powi(self.stages as i32);
        -10.0 * (self.transmittance_at_offset(offset_ghz) / peak).log10()
    }
}

/// Free-function form of [`FilterSpec::transmittance`].
pub fn transmittance(spec: &FilterSpec, frequency_thz: f64) -> f64 {
    spec.transmittance(frequency_thz)
}

/// Channels `shift` below and above `center`.
pub fn channels_for_shift(center: ItuChannel, shift_ghz: f64) -> Result<(ItuChannel, ItuChannel)> {
    let steps = shift_ghz / GRID_SPACING_GHZ as f64;
    if !(steps.is_finite() && steps >= 0.0 && (steps - steps.round()).abs() < 1e-9) {
        return Err(Error::ShiftNotOnGrid(shift_ghz));
    }
    let k = steps.round() as i32;
    Ok((ItuChannel::new(center.0 - k)?, ItuChannel::new(center.0 + k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ch(n: i32) -> ItuChannel {
        ItuChannel::new(n).unwrap()
    }

    #[test]
    fn grid_centres() {
        assert_eq!(ch(34).center_thz(), 193.4);
        assert_eq!(ch(30).center_thz(), 193.0);
        assert_eq!(ch(38).center_thz(), 193.8);
        assert_eq!(ch(34).to_string(), "C34");
        assert!(matches!(ItuChannel::new(0), Err(Error::UnsupportedChannel(0))));
        assert!(ItuChannel::new(100).is_err());
    }

    #[test]
    fn centre_is_affine_in_channel() {
        for n in 1..99 {
            assert_eq!(ch(n + 1).center_ghz() - ch(n).center_ghz(), 100);
        }
    }

    #[test]
    fn passband_shape() {
        let f = FilterSpec { insertion_loss_db: 1.0, ..FilterSpec::for_channel(ch(34)) };
        let peak = f.peak();
        assert_eq!(f.transmittance(193.4), peak);
        assert!((f.transmittance_at_offset(50.0) - peak / 2.0).abs() < 1e-15);
        assert!((f.transmittance_at_offset(-50.0) - peak / 2.0).abs() < 1e-15);
        assert!(f.transmittance_at_offset(300.0) < 1e-6 * peak);
        assert!(f.transmittance_at_offset(-300.0) < 1e-6 * peak);
    }

    #[test]
    fn cascaded_stages_square_the_response() {
        let one = FilterSpec::for_channel(ch(34));
        let two = FilterSpec { stages: 2, ..one.clone() };
        for d in [0.0, 20.0, 50.0, 70.0] {
            assert!((two.transmittance_at_offset(d) - one.transmittance_at_offset(d).powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn neighbour_isolation_exceeds_thirty_db() {
        let f = FilterSpec::for_channel(ch(34));
        assert!(f.isolation_db(100.0) > 30.0);
        assert!(f.transmittance(ch(35).center_thz()) < 1e-3);
    }

    #[test]
    fn shift_channels() {
        assert_eq!(channels_for_shift(ch(34), 100.0).unwrap(), (ch(33), ch(35)));
        assert_eq!(channels_for_shift(ch(34), 400.0).unwrap(), (ch(30), ch(38)));
        assert_eq!(channels_for_shift(ch(34), 0.0).unwrap(), (ch(34), ch(34)));
        assert!(matches!(channels_for_shift(ch(34), 150.0), Err(Error::ShiftNotOnGrid(_))));
        assert!(matches!(channels_for_shift(ch(3), 400.0), Err(Error::UnsupportedChannel(-1))));
    }

    #[test]
    fn channel_serde_validates() {
        #[derive(Deserialize)]
        struct W {
            c: ItuChannel,
        }
        assert_eq!(toml::from_str::<W>("c = 34").unwrap().c, ch(34));
        assert!(toml::from_str::<W>("c = 120").is_err());
    }

    proptest! {
        #[test]
        fn transmittance_is_symmetric(d in 0.0..500.0f64, order in 1u32..6, loss in 0.0..3.0f64) {
            let f = FilterSpec { order, insertion_loss_db: loss, ..FilterSpec::for_channel(ch(34)) };
            let up = f.transmittance_at_offset(d);
            prop_assert!((up - f.transmittance_at_offset(-d)).abs() <= 1e-15);
            prop_assert!((0.0..=1.0).contains(&up));
        }

        #[test]
        fn shift_round_trip(c in 10i32..90, k in 0i32..10) {
            let (down, up) = channels_for_shift(ch(c), 100.0 * k as f64).unwrap();
            prop_assert_eq!(up.center_ghz() - ch(c).center_ghz(), 100 * k as i64);
            prop_assert_eq!(ch(c).center_ghz() - down.center_ghz(), 100 * k as i64);
        }
    }
}
