//! Number, matrix and CSV rendering shared by all commands.

use discordbench_core::linalg::{ONE_QUBIT_BASIS, TWO_QUBIT_BASIS};
use discordbench_core::{ComplexMatrix, DensityMatrix};
use serde_json::{json, Value};

/// Rounds to 12 significant digits so that repeated runs print identical text.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn num(x: f64) -> String {
    format!("{}", round12(x))
}

pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

fn basis_for(dim: usize) -> &'static [&'static str] {
    match dim {
        2 => &ONE_QUBIT_BASIS,
        _ => &TWO_QUBIT_BASIS,
    }
}

/// `{"dim", "basis", "re", "im"}` with row-major nested arrays.
pub fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows = |part: fn(&discordbench_core::Complex) -> f64| -> Value {
        Value::Array(
            (0..m.rows())
                .map(|i| Value::Array((0..m.cols()).map(|j| json_num(part(&m[(i, j)]))).collect()))
                .collect(),
        )
    };
    json!({
        "dim": m.rows(),
        "basis": basis_for(m.rows()),
        "re": rows(|z| z.re),
        "im": rows(|z| z.im),
    })
}

pub fn density_json(rho: &DensityMatrix) -> Value {
    matrix_json(rho.matrix())
}

/// `(name, value)` rows for every real and imaginary matrix entry.
pub fn matrix_rows(prefix: &str, m: &ComplexMatrix) -> Vec<(String, f64)> {
    let basis = basis_for(m.rows());
    let mut out = Vec::with_capacity(2 * m.rows() * m.cols());
    for part in ["re", "im"] {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                let v = if part == "re" { z.re } else { z.im };
                out.push((format!("{prefix}_{part}_{}_{}", basis[i], basis[j]), v));
            }
        }
    }
    out
}

/// CSV text with leading `#` comment lines.
pub struct CsvTable {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(provenance: &str, header: &[&str]) -> Self {
        Self {
            comments: vec![format!("generated-by discordbench {provenance}")],
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> anyhow::Result<String> {
        let mut text = String::new();
        for c in &self.comments {
            text.push_str("# ");
            text.push_str(c);
            text.push('\n');
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        text.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(text)
    }
}
