//! Helpers for the acceptance checks: a pass/fail report and readers for the
//! CSV files the scenarios write.

use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Default)]
pub struct Report {
    failed: Vec<String>,
    total: usize,
}

impl Report {
    /// Records one check and prints its line immediately.
    pub fn check(&mut self, id: &str, pass: bool, detail: impl AsRef<str>) {
        self.total += 1;
        if !pass {
            self.failed.push(id.to_string());
        }
        let line = format!(
            "[{}] {id}: {}\n",
            if pass { "PASS" } else { "FAIL" },
            detail.as_ref()
        );
        let _ = std::io::stdout().write_all(line.as_bytes());
        let _ = std::io::stdout().flush();
    }

    pub fn failed(&self) -> &[String] {
        &self.failed
    }

    pub fn total(&self) -> usize {
        self.total
    }
}

/// Numeric columns of a CSV with a header row; non-numeric cells become NaN.
pub fn read_columns(path: impl AsRef<Path>) -> (Vec<String>, Vec<Vec<f64>>) {
    let path = path.as_ref();
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(String::from)
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for line in lines {
        for (col, cell) in cols.iter_mut().zip(line.split(',')) {
            col.push(cell.parse().unwrap_or(f64::NAN));
        }
    }
    (header, cols)
}

pub fn column(path: impl AsRef<Path>, name: &str) -> Vec<f64> {
    let (header, mut cols) = read_columns(&path);
    let i = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("{}: no column {name}", path.as_ref().display()));
    cols.swap_remove(i)
}

/// Power per harmonic from a spectrum CSV, indexed by `k - 1`.
pub fn spectrum_powers(path: impl AsRef<Path>) -> Vec<f64> {
    column(path, "P_W")
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.9)).collect();
        assert!((log_slope(&x, &y) - 1.9).abs() < 1e-12);
    }

    #[test]
    fn reads_named_columns() {
        let dir = std::env::temp_dir().join(format!("cfv-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("s.csv");
        fs::write(&p, "k,f_Hz,P_W,parity\n1,1e9,2.5e-12,odd\n2,2e9,1e-10,even\n").unwrap();
        assert_eq!(spectrum_powers(&p), vec![2.5e-12, 1e-10]);
        assert!(column(&p, "parity")[0].is_nan());
        fs::remove_dir_all(&dir).unwrap();
    }
}
