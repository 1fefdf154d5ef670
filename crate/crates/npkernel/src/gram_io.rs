//! Readers and writers for Gram matrices and timing reports.
//!
//! The CSV layout starts with one comment header naming the configuration,
//! followed by `n` comma separated rows. Values are printed with the
//! shortest representation that parses back to the same float, so a write
//! followed by a read is lossless, and equal matrices serialize to equal
//! bytes. Timing never goes into the matrix files; it has its own JSON
//! report.
//!
//! The binary layout is raw little endian `f64` values in row major order,
//! with a JSON sidecar (`<file>.meta.json`) describing the shape and
//! configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{GramMatrix, GramTiming};
use crate::kernels::{BaseKernelSpec, KernelConfig, KernelKind, Scheme};

#[derive(Debug, Error)]
pub enum GramIoError {
    #[error("io error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("metadata error on {path}")]
    Meta {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("expected {expected} values for a {n} by {n} matrix, got {got}")]
    Shape {
        n: usize,
        expected: usize,
        got: usize,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> GramIoError + '_ {
    move |source| GramIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// The one-line CSV header for a configuration.
pub fn csv_header(config: &KernelConfig) -> String {
    format!(
        "# npkernel gram kernel={} h={} alpha={} base={} scheme={}",
        config.kind, config.h, config.alpha, config.base, config.scheme
    )
}

/// Renders the matrix as CSV text, header included.
pub fn gram_csv_string(matrix: &GramMatrix) -> String {
    let mut out = csv_header(&matrix.config);
    out.push('\n');
    for row in matrix.values.chunks(matrix.n.max(1)) {
        let mut first = true;
        for value in row {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{value}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn write_gram_csv(path: &Path, matrix: &GramMatrix) -> Result<(), GramIoError> {
    fs::write(path, gram_csv_string(matrix)).map_err(io_err(path))
}

/// Reads a CSV matrix back: the header line (without the leading `# `),
/// the dimension and the row major values.
pub fn read_gram_csv(path: &Path) -> Result<(String, usize, Vec<f64>), GramIoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut header = String::new();
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (number, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if header.is_empty() {
                header = comment.trim().to_string();
            }
            continue;
        }
        rows += 1;
        for field in line.split(',') {
            let value: f64 = field.trim().parse().map_err(|_| GramIoError::Malformed {
                path: path.to_path_buf(),
                line: number + 1,
                message: format!("bad float {field:?}"),
            })?;
            values.push(value);
        }
    }
    if values.len() != rows * rows {
        return Err(GramIoError::Shape {
            n: rows,
            expected: rows * rows,
            got: values.len(),
        });
    }
    Ok((header, rows, values))
}

/// Shape and configuration stored next to a binary matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMeta {
    pub n: usize,
    pub kernel: KernelKind,
    pub h: usize,
    pub alpha: f64,
    pub base: BaseKernelSpec,
    pub scheme: Scheme,
    pub include_level0: bool,
    pub nps_normalize: bool,
    pub normalized: bool,
}

impl GramMeta {
    fn of(matrix: &GramMatrix) -> GramMeta {
        GramMeta {
            n: matrix.n,
            kernel: matrix.config.kind,
            h: matrix.config.h,
            alpha: matrix.config.alpha,
            base: matrix.config.base,
            scheme: matrix.config.scheme,
            include_level0: matrix.config.include_level0,
            nps_normalize: matrix.config.nps_normalize,
            normalized: matrix.normalized,
        }
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// Writes raw little endian values plus the `.meta.json` sidecar.
pub fn write_gram_binary(path: &Path, matrix: &GramMatrix) -> Result<(), GramIoError> {
    let mut bytes = Vec::with_capacity(matrix.values.len() * 8);
    for value in &matrix.values {
        bytes.extend_from_slice(&value.to_le_bytes());
    }
    fs::write(path, bytes).map_err(io_err(path))?;
    let sidecar = sidecar_path(path);
    let meta = serde_json::to_string_pretty(&GramMeta::of(matrix)).map_err(|source| {
        GramIoError::Meta {
            path: sidecar.clone(),
            source,
        }
    })?;
    fs::write(&sidecar, meta).map_err(io_err(&sidecar))
}

pub fn read_gram_binary(path: &Path) -> Result<(GramMeta, Vec<f64>), GramIoError> {
    let sidecar = sidecar_path(path);
    let meta_text = fs::read_to_string(&sidecar).map_err(io_err(&sidecar))?;
    let meta: GramMeta =
        serde_json::from_str(&meta_text).map_err(|source| GramIoError::Meta {
            path: sidecar.clone(),
            source,
        })?;
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.len() != meta.n * meta.n * 8 {
        return Err(GramIoError::Shape {
            n: meta.n,
            expected: meta.n * meta.n,
            got: bytes.len() / 8,
        });
    }
    let values = bytes
        .chunks_exact(8)
        .map(|chunk| f64::from_le_bytes(chunk.try_into().expect("chunks of eight bytes")))
        .collect();
    Ok((meta, values))
}

#[derive(Debug, Serialize)]
struct TimingReport<'a> {
    kernel: KernelKind,
    scheme: Scheme,
    h: usize,
    n: usize,
    timing: &'a GramTiming,
}

/// Writes the phase timings of one computation as JSON.
pub fn write_timing_json(path: &Path, matrix: &GramMatrix) -> Result<(), GramIoError> {
    let report = TimingReport {
        kernel: matrix.config.kind,
        scheme: matrix.config.scheme,
        h: matrix.config.h,
        n: matrix.n,
        timing: &matrix.timing,
    };
    let text = serde_json::to_string_pretty(&report).map_err(|source| GramIoError::Meta {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, text).map_err(io_err(path))
}
