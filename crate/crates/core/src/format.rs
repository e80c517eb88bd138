//! Number formatting shared by every CSV writer.

/// Formats a float with 17 significant digits, which round-trips any `f64`.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_owned() } else { "-inf".to_owned() }
    } else {
        format!("{x:.16e}")
    }
}

/// Short label for an accuracy level, e.g. `1e-3`.
pub fn tau_label(tau: f64) -> String {
    format!("{tau:e}")
}

pub fn parse_float(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}
