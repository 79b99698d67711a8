//! JSON number formatting for report types.
//!
//! Reports serialise floating-point fields with 17 significant digits,
//! which round-trips every `f64` exactly. Non-finite values become `null`;
//! report types that can legitimately carry an infinity pair the field with
//! an explicit flag.

use serde::Serializer;
use serde_json::value::RawValue;

/// Format with 17 significant digits in scientific notation.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(format_sig17(*x)).map_err(serde::ser::Error::custom)?;
    serde::Serialize::serialize(&raw, s)
}

pub fn sig17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => sig17(v, s),
        None => s.serialize_none(),
    }
}

pub fn sig17_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&Sig17(*x))?;
    }
    seq.end()
}

/// Wrapper that serialises an `f64` through [`sig17`].
#[derive(Debug, Clone, Copy)]
pub struct Sig17(pub f64);

impl serde::Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        sig17(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(serde::Serialize)]
    struct Probe {
        #[serde(serialize_with = "sig17")]
        x: f64,
        #[serde(serialize_with = "sig17_opt")]
        y: Option<f64>,
        #[serde(serialize_with = "sig17_vec")]
        z: Vec<f64>,
    }

    #[test]
    fn round_trips_and_nulls() {
        let p = Probe {
            x: 0.1 + 0.2,
            y: Some(f64::INFINITY),
            z: vec![1.0, -2.5e-300],
        };
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(
            text,
            r#"{"x":3.0000000000000004e-1,"y":null,"z":[1.0000000000000000e0,-2.5000000000000000e-300]}"#
        );
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1 + 0.2);
    }
}
