//! Unit-suffixed values in the configuration file.
//!
//! Every physical value is a string `"<number> <unit>"`. Values that only
//! make sense relative to the medium (`"0.5 L"`, `"2 gamma"`, `"5 /gamma"`)
//! stay symbolic until [`Units`] resolves them.

use std::f64::consts::PI;
use std::fmt;

use rydberg_switch::UnitSystem;
use serde::Deserialize;

/// Converts parsed quantities to the internal units (γ = 1, μm).
#[derive(Debug, Clone, Copy)]
pub struct Units {
    pub system: UnitSystem,
    /// Medium length in μm, for `L`-relative lengths.
    pub length: f64,
}

fn split(s: &str) -> Result<(f64, &str), String> {
    let s = s.trim();
    let (num, unit) = match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim()),
        None => {
            // bare symbolic unit: "L", "gamma"
            if s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '/') {
                ("1", s)
            } else {
                return Err(format!("`{s}` has no unit; write e.g. \"{s} um\""));
            }
        }
    };
    let value: f64 = num
        .parse()
        .map_err(|_| format!("`{num}` is not a number"))?;
    if !value.is_finite() {
        return Err(format!("`{num}` is not finite"));
    }
    Ok((value, unit))
}

fn unknown(unit: &str, allowed: &str) -> String {
    format!("unknown unit `{unit}`; expected one of {allowed}")
}

macro_rules! string_quantity {
    ($name:ident) => {
        impl TryFrom<String> for $name {
            type Error = String;
            fn try_from(s: String) -> Result<Self, String> {
                s.parse()
            }
        }
        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.text)
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum FrequencyValue {
    Gamma(f64),
    RadPerSecond(f64),
}

/// Angular frequency: `gamma` multiples, cyclic `Hz`..`GHz` (×2π) or `rad/s`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub struct Frequency {
    value: FrequencyValue,
    text: String,
}

impl std::str::FromStr for Frequency {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (v, unit) = split(s)?;
        let cyclic = |scale: f64| FrequencyValue::RadPerSecond(2.0 * PI * v * scale);
        let value = match unit {
            "gamma" => FrequencyValue::Gamma(v),
            "rad/s" => FrequencyValue::RadPerSecond(v),
            "Hz" => cyclic(1.0),
            "kHz" => cyclic(1e3),
            "MHz" => cyclic(1e6),
            "GHz" => cyclic(1e9),
            _ => return Err(unknown(unit, "gamma, rad/s, Hz, kHz, MHz, GHz")),
        };
        Ok(Self { value, text: s.trim().to_owned() })
    }
}
string_quantity!(Frequency);

impl Frequency {
    pub fn internal(&self, u: &Units) -> f64 {
        match self.value {
            FrequencyValue::Gamma(v) => v,
            FrequencyValue::RadPerSecond(v) => u.system.frequency_to_internal(v),
        }
    }

    /// In rad/s; `gamma`-relative values have no absolute meaning here.
    pub fn si(&self) -> Result<f64, String> {
        match self.value {
            FrequencyValue::RadPerSecond(v) => Ok(v),
            FrequencyValue::Gamma(_) => Err(format!("`{}` must be absolute (e.g. MHz)", self.text)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum LengthValue {
    Micrometres(f64),
    OfMedium(f64),
}

/// Length: `m`, `mm`, `um`, `nm`, or multiples of the medium length `L`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub struct Length {
    value: LengthValue,
    text: String,
}

impl std::str::FromStr for Length {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (v, unit) = split(s)?;
        let value = match unit {
            "L" => LengthValue::OfMedium(v),
            "m" => LengthValue::Micrometres(v * 1e6),
            "mm" => LengthValue::Micrometres(v * 1e3),
            "um" => LengthValue::Micrometres(v),
            "nm" => LengthValue::Micrometres(v * 1e-3),
            _ => return Err(unknown(unit, "m, mm, um, nm, L")),
        };
        Ok(Self { value, text: s.trim().to_owned() })
    }
}
string_quantity!(Length);

impl Length {
    pub fn internal(&self, u: &Units) -> f64 {
        match self.value {
            LengthValue::Micrometres(v) => v,
            LengthValue::OfMedium(f) => f * u.length,
        }
    }

    pub fn absolute(&self) -> Result<f64, String> {
        match self.value {
            LengthValue::Micrometres(v) => Ok(v),
            LengthValue::OfMedium(_) => Err(format!("`{}` cannot be relative to L", self.text)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum DurationValue {
    OverGamma(f64),
    Seconds(f64),
}

/// Time: `/gamma` multiples or `s`, `ms`, `us`, `ns`, `ps`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub struct Duration {
    value: DurationValue,
    text: String,
}

impl std::str::FromStr for Duration {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (v, unit) = split(s)?;
        let si = |scale: f64| DurationValue::Seconds(v * scale);
        let value = match unit {
            "/gamma" => DurationValue::OverGamma(v),
            "s" => si(1.0),
            "ms" => si(1e-3),
            "us" => si(1e-6),
            "ns" => si(1e-9),
            "ps" => si(1e-12),
            _ => return Err(unknown(unit, "/gamma, s, ms, us, ns, ps")),
        };
        Ok(Self { value, text: s.trim().to_owned() })
    }
}
string_quantity!(Duration);

impl Duration {
    pub fn internal(&self, u: &Units) -> f64 {
        match self.value {
            DurationValue::OverGamma(v) => v,
            DurationValue::Seconds(v) => u.system.time_to_internal(v),
        }
    }
}

/// Van der Waals coefficient, cyclic frequency times length⁶:
/// `GHz um^6`, `MHz um^6`, `Hz m^6` or `rad/s m^6`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub struct C6 {
    rad_per_s_m6: f64,
    text: String,
}

impl std::str::FromStr for C6 {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (v, unit) = split(s)?;
        let um6 = 1e-36;
        let rad_per_s_m6 = match unit {
            "GHz um^6" => 2.0 * PI * v * 1e9 * um6,
            "MHz um^6" => 2.0 * PI * v * 1e6 * um6,
            "Hz m^6" => 2.0 * PI * v,
            "rad/s m^6" => v,
            _ => return Err(unknown(unit, "GHz um^6, MHz um^6, Hz m^6, rad/s m^6")),
        };
        Ok(Self { rad_per_s_m6, text: s.trim().to_owned() })
    }
}
string_quantity!(C6);

impl C6 {
    pub fn internal(&self, u: &Units) -> f64 {
        u.system.c6_to_internal(self.rad_per_s_m6)
    }
}

/// Speed in `m/s`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub struct Speed {
    m_per_s: f64,
    text: String,
}

impl std::str::FromStr for Speed {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (v, unit) = split(s)?;
        match unit {
            "m/s" => Ok(Self { m_per_s: v, text: s.trim().to_owned() }),
            _ => Err(unknown(unit, "m/s")),
        }
    }
}
string_quantity!(Speed);

impl Speed {
    pub fn internal(&self, u: &Units) -> f64 {
        u.system.speed_to_internal(self.m_per_s)
    }
}

/// Wavenumber: `/um` or `/m`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub struct Wavenumber {
    per_um: f64,
    text: String,
}

impl std::str::FromStr for Wavenumber {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (v, unit) = split(s)?;
        let per_um = match unit {
            "/um" => v,
            "/m" => v * 1e-6,
            _ => return Err(unknown(unit, "/um, /m")),
        };
        Ok(Self { per_um, text: s.trim().to_owned() })
    }
}
string_quantity!(Wavenumber);

impl Wavenumber {
    pub fn internal(&self) -> f64 {
        self.per_um
    }
}
