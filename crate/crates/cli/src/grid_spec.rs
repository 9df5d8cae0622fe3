/// Parses `2^-6..2^4`, `0.5,1,2^3` and mixtures into a list of C values.
pub fn parse_c_grid(spec: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let (lo, hi) = (exponent(a)?, exponent(b)?);
            if lo > hi {
                return Err(format!("empty range `{item}`"));
            }
            values.extend((lo..=hi).map(|e| 2f64.powi(e)));
        } else if item.starts_with("2^") {
            values.push(2f64.powi(exponent(item)?));
        } else {
            let v: f64 = item.parse().map_err(|_| format!("`{item}` is not a C value"))?;
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err("the C grid is empty".into());
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(format!("C values must be positive, got {v}"));
    }
    Ok(values)
}

fn exponent(s: &str) -> Result<i32, String> {
    let s = s.trim();
    s.strip_prefix("2^")
        .and_then(|e| e.parse().ok())
        .ok_or_else(|| format!("`{s}` is not of the form 2^e"))
}
