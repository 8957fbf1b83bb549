//! Fixed-point mapping between temperatures and transfer amounts.
//!
//! One degree Celsius is 10^18 base units, the same ratio as ether to wei.
//! Temperatures are held as integer milli-degrees so decimal inputs such as
//! 22.9 map to amounts exactly.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use primitive_types::U256;

use super::TelemetryError;

/// Base units per milli-degree.
const UNITS_PER_MILLI: u64 = 1_000_000_000_000_000;
/// Base units per degree.
const UNITS_PER_DEGREE: u64 = 1_000_000_000_000_000_000;

pub const ABSOLUTE_ZERO_MILLI: i64 = -273_150;
pub const MAX_READING_MILLI: i64 = 1_000_000;

/// A temperature in whole milli-degrees Celsius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Temperature(i64);

impl Temperature {
    pub const ZERO: Temperature = Temperature(0);

    pub const fn from_milli(milli: i64) -> Self {
        Temperature(milli)
    }

    pub const fn milli(self) -> i64 {
        self.0
    }

    /// Whether this lies in the range a physical sensor can report.
    pub fn is_admissible(self) -> bool {
        (ABSOLUTE_ZERO_MILLI..=MAX_READING_MILLI).contains(&self.0)
    }
}

impl FromStr for Temperature {
    type Err = TelemetryError;

    /// Parses `[-]digits[.d{1,3}]` exactly, without going through floats.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TelemetryError::BadTemperature(s.to_string());
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !digits(whole) || (body.contains('.') && !digits(frac)) || frac.len() > 3 {
            return Err(bad());
        }
        let whole: i64 = whole.parse().map_err(|_| bad())?;
        let mut frac_milli: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        for _ in frac.len()..3 {
            frac_milli *= 10;
        }
        let milli = whole
            .checked_mul(1000)
            .and_then(|w| w.checked_add(frac_milli))
            .ok_or_else(bad)?;
        Ok(Temperature(if negative { -milli } else { milli }))
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write_decimal(f, sign, &(abs / 1000).to_string(), abs % 1000, 3)
    }
}

/// Writes `sign whole[.frac]` with trailing fractional zeros removed.
fn write_decimal(
    f: &mut fmt::Formatter<'_>,
    sign: &str,
    whole: &str,
    frac: u64,
    width: usize,
) -> fmt::Result {
    if frac == 0 {
        return write!(f, "{sign}{whole}");
    }
    let frac = format!("{frac:0width$}");
    write!(f, "{sign}{whole}.{}", frac.trim_end_matches('0'))
}

/// How temperatures become amounts: `(t + offset) * 10^18`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncodingPolicy {
    offset: Temperature,
}

impl EncodingPolicy {
    /// An offset lets sub-zero readings be sent as non-negative amounts.
    pub fn with_offset(offset: Temperature) -> Result<Self, TelemetryError> {
        if offset.milli() < 0 {
            return Err(TelemetryError::NegativeOffset);
        }
        Ok(EncodingPolicy { offset })
    }

    pub fn offset(&self) -> Temperature {
        self.offset
    }

    pub fn scale() -> U256 {
        U256::from(UNITS_PER_DEGREE)
    }
}

pub fn encode_reading(t: Temperature, policy: &EncodingPolicy) -> Result<U256, TelemetryError> {
    let shifted = t.milli() + policy.offset.milli();
    if shifted < 0 {
        return Err(TelemetryError::NegativeValue(t));
    }
    Ok(U256::from(shifted as u64) * U256::from(UNITS_PER_MILLI))
}

/// The exact temperature an amount represents under a policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodedTemperature {
    negative: bool,
    /// Magnitude in 10^-18 degrees.
    units: U256,
}

impl DecodedTemperature {
    /// The value as whole milli-degrees, if it is exactly representable.
    pub fn to_temperature(&self) -> Option<Temperature> {
        let per_milli = U256::from(UNITS_PER_MILLI);
        if !(self.units % per_milli).is_zero() {
            return None;
        }
        let milli = self.units / per_milli;
        if milli > U256::from(i64::MAX as u64) {
            return None;
        }
        let milli = milli.as_u64() as i64;
        Some(Temperature(if self.negative { -milli } else { milli }))
    }
}

impl PartialEq<Temperature> for DecodedTemperature {
    fn eq(&self, other: &Temperature) -> bool {
        self.to_temperature() == Some(*other)
    }
}

impl fmt::Display for DecodedTemperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let per_degree = U256::from(UNITS_PER_DEGREE);
        let sign = if self.negative && !self.units.is_zero() {
            "-"
        } else {
            ""
        };
        let frac = (self.units % per_degree).as_u64();
        write_decimal(f, sign, &(self.units / per_degree).to_string(), frac, 18)
    }
}

pub fn decode_value(value: U256, policy: &EncodingPolicy) -> DecodedTemperature {
    let offset = U256::from(policy.offset.milli() as u64) * U256::from(UNITS_PER_MILLI);
    match value.cmp(&offset) {
        Ordering::Less => DecodedTemperature {
            negative: true,
            units: offset - value,
        },
        _ => DecodedTemperature {
            negative: false,
            units: value - offset,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: &str) -> Temperature {
        s.parse().unwrap()
    }

    fn units(s: &str) -> U256 {
        U256::from_dec_str(s).unwrap()
    }

    #[test]
    fn explorer_value_encodes_like_to_wei() {
        let policy = EncodingPolicy::default();
        assert_eq!(
            encode_reading(t("22.9"), &policy).unwrap(),
            units("22900000000000000000")
        );
        assert_eq!(
            decode_value(units("22900000000000000000"), &policy).to_string(),
            "22.9"
        );
    }

    #[test]
    fn zero_round_trips() {
        let policy = EncodingPolicy::default();
        assert_eq!(
            encode_reading(Temperature::ZERO, &policy).unwrap(),
            U256::zero()
        );
        assert_eq!(decode_value(U256::zero(), &policy), Temperature::ZERO);
        assert_eq!(decode_value(U256::zero(), &policy).to_string(), "0");
    }

    #[test]
    fn negative_needs_offset() {
        let reading = t("-5.0");
        assert_eq!(
            encode_reading(reading, &EncodingPolicy::default()),
            Err(TelemetryError::NegativeValue(reading))
        );
        let cold = EncodingPolicy::with_offset(t("1000")).unwrap();
        let value = encode_reading(reading, &cold).unwrap();
        assert_eq!(value, units("995000000000000000000"));
        assert_eq!(decode_value(value, &cold), reading);
        assert_eq!(decode_value(value, &cold).to_string(), "-5");
        assert!(EncodingPolicy::with_offset(t("-1")).is_err());
    }

    #[test]
    fn parse_is_exact_and_strict() {
        assert_eq!(t("22.9").milli(), 22_900);
        assert_eq!(t("-0.125").milli(), -125);
        assert_eq!(t("24").milli(), 24_000);
        assert_eq!(t("24.0"), t("24"));
        for bad in [
            "", "-", ".5", "5.", "1.2345", "abc", "+1", "1e3", " 1", "1.-2", "--1",
        ] {
            assert!(bad.parse::<Temperature>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn display_trims_zeros() {
        assert_eq!(t("24.0").to_string(), "24");
        assert_eq!(t("23.80").to_string(), "23.8");
        assert_eq!(t("-0.05").to_string(), "-0.05");
    }

    #[test]
    fn off_grid_values_decode_exactly() {
        let policy = EncodingPolicy::default();
        let d = decode_value(U256::one(), &policy);
        assert_eq!(d.to_string(), "0.000000000000000001");
        assert_eq!(d.to_temperature(), None);
        assert!(decode_value(U256::MAX, &policy).to_temperature().is_none());
    }

    // Oracle: build the expected amount as a decimal string by appending
    // zeros to the reading's digits, independent of the U256 arithmetic.
    fn oracle_amount(tenths: u32) -> String {
        if tenths == 0 {
            return "0".into();
        }
        format!("{tenths}{}", "0".repeat(17))
    }

    proptest! {
        #[test]
        fn one_decimal_round_trip(tenths in 0u32..=500) {
            let text = format!("{}.{}", tenths / 10, tenths % 10);
            let reading: Temperature = text.parse().unwrap();
            let policy = EncodingPolicy::default();
            let value = encode_reading(reading, &policy).unwrap();
            prop_assert_eq!(value.to_string(), oracle_amount(tenths));
            prop_assert_eq!(decode_value(value, &policy), reading);
        }

        #[test]
        fn encode_is_strictly_monotone(a in -273_150i64..=1_000_000, b in -273_150i64..=1_000_000) {
            let policy = EncodingPolicy::with_offset(Temperature::from_milli(273_150)).unwrap();
            let (ea, eb) = (
                encode_reading(Temperature::from_milli(a), &policy).unwrap(),
                encode_reading(Temperature::from_milli(b), &policy).unwrap(),
            );
            prop_assert_eq!(a.cmp(&b), ea.cmp(&eb));
            prop_assert_eq!(decode_value(ea, &policy), Temperature::from_milli(a));
        }

        #[test]
        fn display_parse_round_trip(milli in -273_150i64..=1_000_000) {
            let reading = Temperature::from_milli(milli);
            prop_assert_eq!(reading.to_string().parse::<Temperature>().unwrap(), reading);
        }
    }
}
