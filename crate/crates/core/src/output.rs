//! Number formatting shared by every JSON and CSV writer.
//!
//! Floats are always written with 17 significant digits so that output files
//! round-trip exactly and compare byte-for-byte between runs.

use std::str::FromStr;

use serde::Serializer;
use serde_json::{Number, Value};

/// `x` in scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else {
        format!("{}", x)
    }
}

/// JSON number carrying exactly the digits of [`fmt17`]; non-finite values map to `null`.
pub fn num17(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt17(x)).expect("fmt17 output is a valid JSON number"))
}

/// `serialize_with` adapter for `f64` fields.
pub fn ser17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&num17(*x), s)
}

/// `serialize_with` adapter for `Option<f64>` fields.
pub fn ser17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser17(v, s),
        None => s.serialize_none(),
    }
}

/// Pretty JSON text with a trailing newline.
pub fn to_json_text<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
        let s = fmt17(std::f64::consts::SQRT_2 / 12.0);
        assert_eq!(s.split('e').next().unwrap().replace('.', "").len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::SQRT_2 / 12.0);
    }

    #[test]
    fn json_keeps_digits() {
        let v = serde_json::json!({ "x": num17(0.1) });
        assert_eq!(v.to_string(), r#"{"x":1.0000000000000001e-1}"#);
        assert_eq!(num17(f64::NAN), Value::Null);
    }
}
