//! Canonical JSON: the single serialization convention shared by every
//! engine, the tool protocol and the gateway.
//!
//! Object keys are emitted in sorted order, output is compact, monetary
//! amounts are rounded to cents and probabilities to six decimals. Rounding
//! happens only here, at serialization; internal values keep full precision.

use serde::{Serialize, Serializer};
use serde_json::Value;

/// Rounds `x` to `decimals` places, half away from zero.
pub fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    let r = (x * scale).round() / scale;
    // normalise -0.0 so it prints as 0.0
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Serializes `value` as canonical JSON text.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    let v = to_value(value);
    serde_json::to_string(&v).expect("canonical json: a Value always serializes")
}

/// Serializes `value` as a canonical `serde_json::Value` (keys sorted).
pub fn to_value<T: Serialize + ?Sized>(value: &T) -> Value {
    serde_json::to_value(value).expect("canonical json: domain types always serialize")
}

/// Re-emits arbitrary JSON text canonically. Returns `None` when the text is
/// not JSON.
pub fn canonicalize(text: &str) -> Option<String> {
    serde_json::from_str::<Value>(text)
        .ok()
        .map(|v| to_string(&v))
}

/// Serde helper for USD amounts: two decimals.
pub mod money {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        round_to(*x, 2).serialize(s)
    }
}

/// Serde helper for probabilities: six decimals.
pub mod probability {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        round_to(*x, 6).serialize(s)
    }
}

/// Formats a USD amount with thousands separators and two decimals,
/// e.g. `75668.53` -> `"75,668.53"`.
pub fn format_usd(x: f64) -> String {
    let cents = (round_to(x, 2) * 100.0).round() as i128;
    let negative = cents < 0;
    let cents = cents.unsigned_abs();
    let whole = (cents / 100).to_string();
    let mut grouped = String::with_capacity(whole.len() + whole.len() / 3);
    for (i, ch) in whole.chars().enumerate() {
        if i > 0 && (whole.len() - i).is_multiple_of(3) {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    format!(
        "{}{}.{:02}",
        if negative { "-" } else { "" },
        grouped,
        cents % 100
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_are_sorted() {
        let v = json!({"b": 1, "a": {"d": 2, "c": 3}});
        assert_eq!(to_string(&v), r#"{"a":{"c":3,"d":2},"b":1}"#);
    }

    #[test]
    fn usd_formatting() {
        assert_eq!(format_usd(75668.53), "75,668.53");
        assert_eq!(format_usd(3240.0), "3,240.00");
        assert_eq!(format_usd(0.0), "0.00");
        assert_eq!(format_usd(999.999), "1,000.00");
        assert_eq!(format_usd(123.4), "123.40");
        assert_eq!(format_usd(-1234567.891), "-1,234,567.89");
    }

    #[test]
    fn rounding_never_yields_negative_zero() {
        assert_eq!(round_to(-0.001, 2).to_string(), "0");
    }

    #[test]
    fn canonicalize_reorders() {
        assert_eq!(canonicalize(r#"{ "z": [1, 2], "a": null }"#).unwrap(), r#"{"a":null,"z":[1,2]}"#);
        assert!(canonicalize("{nope").is_none());
    }
}
