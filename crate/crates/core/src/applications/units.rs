use serde::{Deserialize, Serialize};

use crate::error::{PrftError, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const EPS0: f64 = 8.854_187_812_8e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

impl Quantity {
    pub fn new(value: f64, unit: &str) -> Self {
        Quantity { value, unit: unit.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Time,
    Power,
    Length,
    InverseLength,
    ElectricField,
    Volume,
}

/// How a frequency quoted in Hz maps onto the angular frequency in formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyConvention {
    /// `w = 2 pi f`
    #[default]
    Cyclic,
    /// the quoted number is used as the angular frequency directly
    Angular,
}

impl FrequencyConvention {
    pub fn angular(self, f: f64) -> f64 {
        match self {
            FrequencyConvention::Cyclic => 2.0 * std::f64::consts::PI * f,
            FrequencyConvention::Angular => f,
        }
    }
}

/// Converts to SI base units (Hz, s, W, m, 1/m, V/m, m^3).
pub fn parse_quantity(q: &Quantity, dim: Dimension) -> Result<f64> {
    let scale = match (dim, q.unit.as_str()) {
        (Dimension::Frequency, "Hz") => 1.0,
        (Dimension::Frequency, "kHz") => 1e3,
        (Dimension::Frequency, "MHz") => 1e6,
        (Dimension::Frequency, "GHz") => 1e9,
        (Dimension::Frequency, "THz") => 1e12,
        (Dimension::Time, "s") => 1.0,
        (Dimension::Time, "ms") => 1e-3,
        (Dimension::Time, "us") => 1e-6,
        (Dimension::Time, "ns") => 1e-9,
        (Dimension::Power, "W") => 1.0,
        (Dimension::Power, "mW") => 1e-3,
        (Dimension::Power, "uW") => 1e-6,
        (Dimension::Power, "nW") => 1e-9,
        (Dimension::Length, "m") => 1.0,
        (Dimension::Length, "km") => 1e3,
        (Dimension::Length, "cm") => 1e-2,
        (Dimension::InverseLength, "1/m") => 1.0,
        (Dimension::InverseLength, "1/km") => 1e-3,
        (Dimension::ElectricField, "V/m") => 1.0,
        (Dimension::Volume, "m^3") => 1.0,
        (Dimension::Volume, "cm^3") => 1e-6,
        (Dimension::Volume, "um^3") => 1e-18,
        _ => {
            return Err(PrftError::InvalidInput(format!("unit '{}' is not a valid {:?} unit", q.unit, dim)));
        }
    };
    if !q.value.is_finite() {
        return Err(PrftError::InvalidInput(format!("non-finite value {}", q.value)));
    }
    Ok(q.value * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert_eq!(parse_quantity(&Quantity::new(400.0, "THz"), Dimension::Frequency).unwrap(), 400e12);
        assert!((parse_quantity(&Quantity::new(0.051, "1/km"), Dimension::InverseLength).unwrap() - 5.1e-5).abs() < 1e-18);
        assert!(parse_quantity(&Quantity::new(1.0, "km"), Dimension::Power).is_err());
    }
}
