//! Number formatting and CSV/JSON helpers.

use serde_json::{Map, Value};

/// `x` with `digits` significant digits, in the style of C's `%g`.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// 12 significant digits, the precision of every text and CSV float.
pub fn g12(x: f64) -> String {
    sig(x, 12)
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line(fields: &[String]) -> String {
    let mut line = fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

/// An ordered JSON object from `(key, value)` pairs.
pub fn object<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}

/// Compact JSON followed by a newline.
pub fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(g12(4.0), "4");
        assert_eq!(g12(3.484_685_453_555_649_7), "3.48468545356");
        assert_eq!(g12(0.021_248_123_456_789), "0.0212481234568");
        assert_eq!(g12(6_881_488.149_650_1), "6881488.14965");
        assert_eq!(g12(1e-7), "1e-07");
        assert_eq!(g12(-2.5e13), "-2.5e+13");
        assert_eq!(g12(123_456_789_012.0), "123456789012");
        assert_eq!(g12(0.0), "0");
        assert_eq!(sig(0.000123456, 3), "0.000123");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(csv_line(&["x".into(), String::new()]), "x,\n");
    }

    #[test]
    fn objects_keep_insertion_order() {
        let v = object([("z", 1.into()), ("a", 2.into())]);
        assert_eq!(json_line(&v), "{\"z\":1,\"a\":2}\n");
    }
}
