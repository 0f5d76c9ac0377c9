//! CSV and JSON writers.
//!
//! Floats are written with 17 significant digits so they round-trip exactly;
//! lines end in LF on every platform.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::sha256_hex;
use crate::error::{Error, Result};
use crate::params::{SeriesKind, TimeSeries};
use crate::pulses::PulseMetrics;
use crate::spectrum::Spectrum;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn timeseries_csv(series: &TimeSeries) -> String {
    let header = match series.kind {
        SeriesKind::Voltage => "t_s,V_V",
        SeriesKind::Phase => "t_s,phi_rad",
    };
    let mut s = String::with_capacity(48 * series.len() + 16);
    s.push_str(header);
    s.push('\n');
    for (i, v) in series.values.iter().enumerate() {
        let _ = writeln!(s, "{},{}", fmt_f64(series.time(i)), fmt_f64(*v));
    }
    s
}

pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut s = String::from("k,f_Hz,P_W,parity\n");
    for h in &spectrum.harmonics {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            h.k,
            fmt_f64(h.frequency),
            fmt_f64(h.power),
            h.parity.as_str()
        );
    }
    s
}

pub fn pulses_csv(pulses: &[PulseMetrics]) -> String {
    let mut s = String::from("index,peak_time_s,peak_V,fwhm_s,area_Wb,truncated\n");
    for (i, p) in pulses.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{}",
            fmt_f64(p.peak_time),
            fmt_f64(p.peak_height),
            fmt_f64(p.fwhm),
            fmt_f64(p.signed_area),
            p.truncated
        );
    }
    s
}

/// Generic numeric table; `rows` must match `header` in width.
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| fmt_f64(*x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Collects the files of one run so the manifest can list and hash them.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(OutputDir {
            root,
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len() as u64,
        });
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse {
            context: name.to_string(),
            message: e.to_string(),
        })?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    /// Writes `manifest.json`. Everything except `runtime_seconds` is a
    /// function of the inputs, so two runs differ only in that field.
    pub fn finish(self, mut manifest: Manifest) -> Result<Manifest> {
        manifest.files = self.files;
        let path = self.root.join("manifest.json");
        fs::write(&path, manifest_json(&manifest)).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub name: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub quick: bool,
    pub warnings: Vec<String>,
    pub runtime_seconds: f64,
    pub files: Vec<FileEntry>,
}

pub fn manifest_json(manifest: &Manifest) -> String {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    text
}
