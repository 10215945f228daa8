use std::collections::BTreeMap;

/// Collects human-readable lines and KEY=VALUE results; keys print sorted.
#[derive(Debug, Default)]
pub struct Output {
    machine: bool,
    raw: String,
    lines: Vec<String>,
    values: BTreeMap<String, String>,
}

impl Output {
    pub fn new(machine: bool) -> Self {
        Output { machine, ..Default::default() }
    }

    /// Printed verbatim in both modes, before anything else.
    pub fn raw(&mut self, s: &str) {
        self.raw.push_str(s);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.values.insert(key.into(), value.into().0);
    }

    pub fn render(&self) -> String {
        let mut out = self.raw.clone();
        if !self.machine {
            for l in &self.lines {
                out.push_str(l);
                out.push('\n');
            }
            if !self.lines.is_empty() && !self.values.is_empty() {
                out.push('\n');
            }
        }
        for (k, v) in &self.values {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// A rendered value.
pub struct Value(String);

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value(num(v))
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value(v.to_string())
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value(v.to_string())
    }
}

impl From<&hdx_core::complex::Simplex> for Value {
    fn from(v: &hdx_core::complex::Simplex) -> Self {
        Value(v.to_string())
    }
}

/// Shortest round-trip form, switching to exponent notation for tiny or huge magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn list(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}
