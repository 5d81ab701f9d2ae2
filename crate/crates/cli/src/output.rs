use std::fmt::Write as _;

/// Twelve significant digits, `.` separator. Plain notation for moderate
/// magnitudes, scientific otherwise. Non-finite values print as `inf`,
/// `-inf`, `nan`.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&mag) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A rectangular table rendered as CSV or as a JSON object of columns.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| sig12(v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Column arrays; non-finite entries become `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, name) in self.columns.iter().enumerate() {
            let col: Vec<serde_json::Value> = self.rows.iter().map(|r| json_number(r[k])).collect();
            map.insert((*name).to_string(), serde_json::Value::Array(col));
        }
        serde_json::Value::Object(map)
    }
}

pub fn json_number(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(3.1197887970385585), "3.11978879704");
        assert_eq!(sig12(-2.0068666377598745), "-2.00686663776");
        assert_eq!(sig12(1234.5), "1234.5");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1e-7), "1.00000000000e-7");
        assert_eq!(sig12(f64::NEG_INFINITY), "-inf");
        assert_eq!(sig12(60.0), "60");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![1.0, 0.5]);
        assert_eq!(t.to_csv(), "a,b\n1,0.5\n");
        assert_eq!(t.to_json()["b"][0], 0.5);
    }
}
