//! Behavioral model of the two-stage memristive READ path.
//!
//! The synapse stores a weight as one of `2^b` low-resistance states spread
//! evenly over 5-20 kOhm. A read senses a current whose spacing between
//! adjacent states (the resolution) depends on device sizing and on the
//! run-time knobs (READ voltage, body bias). This module maps levels to
//! currents per configuration, computes resolutions, injects Gaussian read
//! noise, and converts noise into adjacent-level decode error probabilities.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Lowest programmed resistance state, ohms.
pub const R_MIN_OHMS: f64 = 5_000.0;
/// Highest programmed resistance state, ohms.
pub const R_MAX_OHMS: f64 = 20_000.0;
/// Read-stage supply voltage, volts.
pub const VDD_READ_V: f64 = 1.2;
/// Smallest supported weight precision, bits.
pub const MIN_BIT_WIDTH: u8 = 2;
/// Largest supported weight precision, bits.
pub const MAX_BIT_WIDTH: u8 = 4;
/// Default weight precision, bits.
pub const DEFAULT_BIT_WIDTH: u8 = 4;

/// A discrete synaptic state: an index into the `2^b` resistance levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightLevel {
    index: u8,
    bit_width: u8,
}

impl WeightLevel {
    /// Builds a level, rejecting out-of-range indices and bit widths.
    pub fn new(index: u8, bit_width: u8) -> Result<Self> {
        if !(MIN_BIT_WIDTH..=MAX_BIT_WIDTH).contains(&bit_width) {
            return Err(Error::Domain(format!(
                "bit width {bit_width} outside {MIN_BIT_WIDTH}..={MAX_BIT_WIDTH}"
            )));
        }
        let count = 1u8 << bit_width;
        if index >= count {
            return Err(Error::Domain(format!(
                "level index {index} out of range for {bit_width}-bit precision (0..{count})"
            )));
        }
        Ok(Self { index, bit_width })
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn bit_width(&self) -> u8 {
        self.bit_width
    }

    /// Number of levels at this precision (`2^b`).
    pub fn level_count(&self) -> u8 {
        1 << self.bit_width
    }

    /// True for the lowest or highest level, which can only be misread in
    /// one direction.
    pub fn is_boundary(&self) -> bool {
        self.index == 0 || self.index == self.level_count() - 1
    }

    /// Programmed resistance of this level: the affine map from index to
    /// the 5-20 kOhm window. At 4-bit precision the step is exactly 1 kOhm.
    pub fn resistance_ohms(&self) -> f64 {
        let steps = (self.level_count() - 1) as f64;
        R_MIN_OHMS + self.index as f64 * (R_MAX_OHMS - R_MIN_OHMS) / steps
    }
}

/// Resistance of a level in ohms.
pub fn resistance_of(level: WeightLevel) -> f64 {
    level.resistance_ohms()
}

/// Number of levels for a bit width without constructing a level.
pub fn level_count(bit_width: u8) -> u8 {
    1 << bit_width
}

/// The five evaluated device/runtime configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PresetName {
    BaseSizing,
    Stage1Sizing,
    Stage2Sizing,
    VRead063,
    BodyBias03,
}

impl PresetName {
    pub const ALL: [PresetName; 5] = [
        PresetName::BaseSizing,
        PresetName::Stage1Sizing,
        PresetName::Stage2Sizing,
        PresetName::VRead063,
        PresetName::BodyBias03,
    ];
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PresetName::BaseSizing => "BaseSizing",
            PresetName::Stage1Sizing => "Stage1Sizing",
            PresetName::Stage2Sizing => "Stage2Sizing",
            PresetName::VRead063 => "VRead063",
            PresetName::BodyBias03 => "BodyBias03",
        };
        f.write_str(s)
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .flat_map(|c| c.to_lowercase())
            .collect();
        match key.as_str() {
            "basesizing" | "base" => Ok(PresetName::BaseSizing),
            "stage1sizing" | "stage1" => Ok(PresetName::Stage1Sizing),
            "stage2sizing" | "stage2" => Ok(PresetName::Stage2Sizing),
            "vread063" | "vread" => Ok(PresetName::VRead063),
            "bodybias03" | "bodybias" => Ok(PresetName::BodyBias03),
            _ => Err(Error::Config(format!("unknown preset '{s}'"))),
        }
    }
}

/// One named READ configuration: transistor sizing, run-time voltages, and
/// the calibrated resolution/current/power figures.
///
/// Resolution is stored in integer nanoamperes and power in microwatts so
/// the evaluation table reproduces its source values exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadConfiguration {
    pub name: PresetName,
    pub mp1_w_um: f64,
    pub mp1_l_um: f64,
    pub mn1_w_um: f64,
    pub mn1_l_um: f64,
    pub mn2_w_um: f64,
    pub mn2_l_um: f64,
    pub vdd_read_v: f64,
    pub v_read_v: f64,
    pub body_bias_v: f64,
    pub resolution_na: u32,
    pub anchor_current_ua: f64,
    pub max_read_power_uw: f64,
}

impl ReadConfiguration {
    /// Resolution step between adjacent levels, amperes.
    pub fn resolution_delta_a(&self) -> f64 {
        self.resolution_na as f64 * 1e-9
    }

    /// Read current at the 5 kOhm anchor state, amperes.
    pub fn anchor_current_a(&self) -> f64 {
        self.anchor_current_ua * 1e-6
    }

    /// Maximum READ power (both stages), watts.
    pub fn max_read_power_w(&self) -> f64 {
        self.max_read_power_uw * 1e-6
    }

    /// Looks up one of the five presets.
    pub fn preset(name: PresetName) -> ReadConfiguration {
        // The Stage2Sizing anchor is the base 21.8 uA anchor scaled by the
        // 22.48% current overhead of the 4x4 um second stage. Stage1Sizing
        // has no measured anchor of its own and reuses the base value.
        match name {
            PresetName::BaseSizing => ReadConfiguration {
                name,
                mp1_w_um: 0.5,
                mp1_l_um: 0.5,
                mn1_w_um: 1.0,
                mn1_l_um: 0.5,
                mn2_w_um: 0.5,
                mn2_l_um: 0.5,
                vdd_read_v: VDD_READ_V,
                v_read_v: 0.6,
                body_bias_v: 0.0,
                resolution_na: 19,
                anchor_current_ua: 21.8,
                max_read_power_uw: 18.87,
            },
            PresetName::Stage1Sizing => ReadConfiguration {
                name,
                mp1_w_um: 1.0,
                mp1_l_um: 0.5,
                mn1_w_um: 4.0,
                mn1_l_um: 0.5,
                mn2_w_um: 0.5,
                mn2_l_um: 0.5,
                vdd_read_v: VDD_READ_V,
                v_read_v: 0.6,
                body_bias_v: 0.0,
                resolution_na: 81,
                anchor_current_ua: 21.8,
                max_read_power_uw: 19.82,
            },
            PresetName::Stage2Sizing => ReadConfiguration {
                name,
                mp1_w_um: 1.0,
                mp1_l_um: 0.5,
                mn1_w_um: 4.0,
                mn1_l_um: 0.5,
                mn2_w_um: 4.0,
                mn2_l_um: 4.0,
                vdd_read_v: VDD_READ_V,
                v_read_v: 0.6,
                body_bias_v: 0.0,
                resolution_na: 98,
                anchor_current_ua: 26.70064,
                max_read_power_uw: 18.84,
            },
            PresetName::VRead063 => ReadConfiguration {
                name,
                mp1_w_um: 1.0,
                mp1_l_um: 0.5,
                mn1_w_um: 4.0,
                mn1_l_um: 0.5,
                mn2_w_um: 4.0,
                mn2_l_um: 4.0,
                vdd_read_v: VDD_READ_V,
                v_read_v: 0.63,
                body_bias_v: 0.0,
                resolution_na: 143,
                anchor_current_ua: 19.1,
                max_read_power_uw: 19.6,
            },
            PresetName::BodyBias03 => ReadConfiguration {
                name,
                mp1_w_um: 1.0,
                mp1_l_um: 0.5,
                mn1_w_um: 4.0,
                mn1_l_um: 0.5,
                mn2_w_um: 4.0,
                mn2_l_um: 4.0,
                vdd_read_v: VDD_READ_V,
                v_read_v: 0.63,
                body_bias_v: 0.3,
                resolution_na: 165,
                anchor_current_ua: 28.0,
                max_read_power_uw: 18.19,
            },
        }
    }
}

/// The five presets in resolution order (base first).
pub fn preset_table() -> Vec<ReadConfiguration> {
    PresetName::ALL
        .iter()
        .map(|&n| ReadConfiguration::preset(n))
        .collect()
}

/// Presets as CSV with one row per configuration.
pub fn presets_csv() -> String {
    let mut out = String::from(
        "name,mp1_w,mp1_l,mn1_w,mn1_l,mn2_w,mn2_l,v_read,body_bias,resolution_nA,anchor_uA,power_uW\n",
    );
    for c in preset_table() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.name,
            c.mp1_w_um,
            c.mp1_l_um,
            c.mn1_w_um,
            c.mn1_l_um,
            c.mn2_w_um,
            c.mn2_l_um,
            c.v_read_v,
            c.body_bias_v,
            c.resolution_na,
            c.anchor_current_ua,
            c.max_read_power_uw,
        ));
    }
    out
}

/// How level indices map to read currents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurrentMapLaw {
    /// `I(i) = anchor - i * delta`: equal current spacing at every level.
    UniformStep,
    /// `I(R) = anchor - a * (1/R_min - 1/R)`: current affine in conductance,
    /// calibrated so `I(R_min)` equals the anchor exactly and the 19->20 kOhm
    /// step equals the configured resolution.
    ConductanceAffine,
}

impl fmt::Display for CurrentMapLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurrentMapLaw::UniformStep => f.write_str("uniform-step"),
            CurrentMapLaw::ConductanceAffine => f.write_str("conductance-affine"),
        }
    }
}

impl FromStr for CurrentMapLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .flat_map(|c| c.to_lowercase())
            .collect();
        match key.as_str() {
            "uniformstep" | "uniform" => Ok(CurrentMapLaw::UniformStep),
            "conductanceaffine" | "affine" => Ok(CurrentMapLaw::ConductanceAffine),
            _ => Err(Error::Config(format!("unknown current map law '{s}'"))),
        }
    }
}

// Resistances used to calibrate the affine law's minimum step. These are the
// two largest 4-bit states regardless of the precision being read.
const CAL_R_LO_OHMS: f64 = 19_000.0;
const CAL_R_HI_OHMS: f64 = 20_000.0;

/// A current map calibrated against one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentMap {
    law: CurrentMapLaw,
    anchor_a: f64,
    delta_a: f64,
    /// Affine slope against conductance; unused for `UniformStep`.
    affine_coeff: f64,
}

impl CurrentMap {
    /// Calibrates `law` against a configuration's anchor current and
    /// resolution step.
    pub fn calibrate(config: &ReadConfiguration, law: CurrentMapLaw) -> Result<CurrentMap> {
        let anchor_a = config.anchor_current_a();
        let delta_a = config.resolution_delta_a();
        if !(anchor_a > 0.0) || !anchor_a.is_finite() {
            return Err(Error::Config(format!(
                "anchor current must be positive, got {anchor_a} A"
            )));
        }
        if !(delta_a > 0.0) || !delta_a.is_finite() {
            return Err(Error::Config(format!(
                "resolution step must be positive, got {delta_a} A"
            )));
        }
        let affine_coeff = delta_a / (1.0 / CAL_R_LO_OHMS - 1.0 / CAL_R_HI_OHMS);
        Ok(CurrentMap {
            law,
            anchor_a,
            delta_a,
            affine_coeff,
        })
    }

    pub fn law(&self) -> CurrentMapLaw {
        self.law
    }

    /// Ideal read current of a level, amperes. Strictly decreasing in the
    /// level index under both laws.
    pub fn current_a(&self, level: WeightLevel) -> f64 {
        match self.law {
            CurrentMapLaw::UniformStep => self.anchor_a - level.index() as f64 * self.delta_a,
            CurrentMapLaw::ConductanceAffine => {
                let r = level.resistance_ohms();
                self.anchor_a - self.affine_coeff * (1.0 / R_MIN_OHMS - 1.0 / r)
            }
        }
    }

    /// Minimum spacing between adjacent levels over the 16-state design
    /// ladder, amperes. Equals the configured resolution step for both
    /// built-in laws (everywhere for `UniformStep`; at the 19->20 kOhm pair
    /// by calibration for `ConductanceAffine`).
    pub fn min_resolution_a(&self) -> f64 {
        let b = DEFAULT_BIT_WIDTH;
        let n = level_count(b);
        let mut min = f64::INFINITY;
        for i in 0..n - 1 {
            let hi = self.current_a(WeightLevel::new(i, b).unwrap());
            let lo = self.current_a(WeightLevel::new(i + 1, b).unwrap());
            min = min.min((hi - lo).abs());
        }
        min
    }

    /// Decodes a measured current to the nearest ideal level at the given
    /// precision. Exact ties resolve to the lower-current level.
    pub fn decode(&self, measured_a: f64, bit_width: u8) -> Result<WeightLevel> {
        let n = 1u8 << bit_width;
        let mut best = WeightLevel::new(0, bit_width)?;
        let mut best_dist = f64::INFINITY;
        for i in 0..n {
            let level = WeightLevel::new(i, bit_width)?;
            let dist = (self.current_a(level) - measured_a).abs();
            // `<=` walks ties to higher indices, i.e. lower currents.
            if dist <= best_dist {
                best = level;
                best_dist = dist;
            }
        }
        Ok(best)
    }

    /// One noisy read: the measured current (ideal plus Gaussian noise) and
    /// the level it decodes to.
    pub fn noisy_read<R: Rng + ?Sized>(
        &self,
        level: WeightLevel,
        noise: &NoiseModel,
        rng: &mut R,
    ) -> (f64, WeightLevel) {
        let ideal = self.current_a(level);
        let measured = if noise.sigma_a == 0.0 {
            ideal
        } else {
            let normal = Normal::new(0.0, noise.sigma_a).expect("validated sigma");
            ideal + normal.sample(rng)
        };
        let decoded = self
            .decode(measured, level.bit_width())
            .expect("level bit width is valid");
        (measured, decoded)
    }

    /// Sample statistics of `n` noisy reads of one level.
    pub fn monte_carlo_read_stats<R: Rng + ?Sized>(
        &self,
        level: WeightLevel,
        noise: &NoiseModel,
        n: usize,
        rng: &mut R,
    ) -> ReadStats {
        assert!(n >= 1, "monte_carlo_read_stats requires n >= 1");
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut errors = 0usize;
        for _ in 0..n {
            let (measured, decoded) = self.noisy_read(level, noise, rng);
            sum += measured;
            sum_sq += measured * measured;
            if decoded != level {
                errors += 1;
            }
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0);
        ReadStats {
            mean_a: mean,
            std_a: var.sqrt(),
            error_rate: errors as f64 / n as f64,
        }
    }
}

/// Statistics of a Monte-Carlo read run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadStats {
    pub mean_a: f64,
    /// Population standard deviation of the measured currents.
    pub std_a: f64,
    /// Fraction of reads decoded to a level other than the stored one.
    pub error_rate: f64,
}

/// Additive zero-mean Gaussian read noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma_a: f64,
}

impl NoiseModel {
    pub fn new(sigma_a: f64) -> Result<Self> {
        if !(sigma_a >= 0.0) || !sigma_a.is_finite() {
            return Err(Error::Domain(format!(
                "noise sigma must be finite and >= 0, got {sigma_a}"
            )));
        }
        Ok(Self { sigma_a })
    }
}

/// Read current of a level under a law calibrated to `config`, amperes.
pub fn read_current(
    config: &ReadConfiguration,
    level: WeightLevel,
    law: CurrentMapLaw,
) -> Result<f64> {
    Ok(CurrentMap::calibrate(config, law)?.current_a(level))
}

/// Minimum adjacent-level current spacing under a law calibrated to
/// `config`, amperes.
pub fn min_resolution(config: &ReadConfiguration, law: CurrentMapLaw) -> Result<f64> {
    Ok(CurrentMap::calibrate(config, law)?.min_resolution_a())
}

/// Standard Gaussian upper tail `Q(x) = P(Z > x)`.
fn gaussian_upper_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Probability that Gaussian read noise pushes a level across a decode
/// boundary: `2*Q(delta / 2*sigma)` for interior levels, `Q(delta / 2*sigma)`
/// for boundary levels. Zero noise gives zero probability.
pub fn adjacent_error_prob(delta_a: f64, sigma_a: f64, interior: bool) -> Result<f64> {
    if !(delta_a > 0.0) || !delta_a.is_finite() {
        return Err(Error::Domain(format!(
            "resolution delta must be positive, got {delta_a}"
        )));
    }
    if !(sigma_a >= 0.0) || !sigma_a.is_finite() {
        return Err(Error::Domain(format!(
            "noise sigma must be finite and >= 0, got {sigma_a}"
        )));
    }
    if sigma_a == 0.0 {
        return Ok(0.0);
    }
    let tail = gaussian_upper_tail(delta_a / (2.0 * sigma_a));
    Ok(if interior { 2.0 * tail } else { tail })
}

/// Run-time resolution knobs with anchored sweep tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepKind {
    VRead,
    BodyBias,
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepKind::VRead => f.write_str("v_read"),
            SweepKind::BodyBias => f.write_str("body_bias"),
        }
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .flat_map(|c| c.to_lowercase())
            .collect();
        match key.as_str() {
            "vread" => Ok(SweepKind::VRead),
            "bodybias" | "body" => Ok(SweepKind::BodyBias),
            _ => Err(Error::Config(format!("unknown sweep kind '{s}'"))),
        }
    }
}

/// Ordered (control voltage, resolution) anchors for one run-time knob.
/// Only numerically reported points are anchored; there is no extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAnchorTable {
    pub kind: SweepKind,
    anchors: Vec<(f64, f64)>,
}

impl SweepAnchorTable {
    fn new(kind: SweepKind, anchors: Vec<(f64, f64)>) -> Self {
        debug_assert!(anchors.windows(2).all(|w| w[0].0 < w[1].0));
        Self { kind, anchors }
    }

    /// READ-voltage scaling anchors: 98 nA at 0.60 V rising to 143 nA at
    /// 0.63 V (optimized sizing).
    pub fn v_read() -> Self {
        Self::new(SweepKind::VRead, vec![(0.60, 98e-9), (0.63, 143e-9)])
    }

    /// Body-bias anchors: 143 nA unbiased, peak 165 nA at 0.3 V, falling
    /// back to 88 nA at 0.4 V.
    pub fn body_bias() -> Self {
        Self::new(
            SweepKind::BodyBias,
            vec![(0.0, 143e-9), (0.3, 165e-9), (0.4, 88e-9)],
        )
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    /// Control range covered by the anchors, volts.
    pub fn control_range(&self) -> (f64, f64) {
        (
            self.anchors.first().unwrap().0,
            self.anchors.last().unwrap().0,
        )
    }

    /// Piecewise-linear interpolation over the anchors; exact at anchors.
    pub fn interpolate(&self, control_v: f64) -> Result<f64> {
        let (lo, hi) = self.control_range();
        if !control_v.is_finite() || control_v < lo || control_v > hi {
            return Err(Error::Range(format!(
                "{} control {control_v} V outside anchored range [{lo}, {hi}] V",
                self.kind
            )));
        }
        for pair in self.anchors.windows(2) {
            let (x0, y0) = pair[0];
            let (x1, y1) = pair[1];
            if control_v <= x1 {
                if control_v == x0 {
                    return Ok(y0);
                }
                if control_v == x1 {
                    return Ok(y1);
                }
                return Ok(y0 + (y1 - y0) * (control_v - x0) / (x1 - x0));
            }
        }
        unreachable!("control within range but no segment matched");
    }
}

/// Interpolated resolution for a run-time knob setting, amperes.
pub fn sweep_resolution(kind: SweepKind, control_v: f64) -> Result<f64> {
    let table = match kind {
        SweepKind::VRead => SweepAnchorTable::v_read(),
        SweepKind::BodyBias => SweepAnchorTable::body_bias(),
    };
    table.interpolate(control_v)
}
