//! On-disk store for the expensive per-field intermediates: interpolation
//! polynomials keyed by field and index, and special points keyed by field
//! and index pair. Records are JSON files published by write-then-rename,
//! so concurrent writers of the same deterministic record are harmless and
//! readers never observe a partial file.
//!
//! A record is rejected when its stored parameters disagree with the request
//! or when it fails to parse; content that passes those checks is trusted.
//! Delete the directory to rebuild from scratch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::{BiPoly, Fq, FqPoly, UniPoly, Var};
use crate::carlitz::TensorPoint;
use crate::error::PipelineError;

/// Handle on one cache directory.
pub struct CacheStore {
    root: PathBuf,
}

/// Stored H_index: θ-polynomial coefficient digits on each power of t.
#[derive(Serialize, Deserialize)]
struct HRecord {
    kind: String,
    q: u64,
    p: u64,
    e: u32,
    index: usize,
    coeffs: Vec<Vec<u64>>,
}

/// Stored special point: coordinate digits, ascending θ-degree each.
#[derive(Serialize, Deserialize)]
struct XiRecord {
    kind: String,
    q: u64,
    p: u64,
    e: u32,
    s1: usize,
    s2: usize,
    coords: Vec<Vec<u64>>,
}

impl CacheStore {
    // ---- Constructors ----

    /// Opens (creating if needed) the store rooted at `root`.
    pub fn open(root: &Path) -> Result<Self, PipelineError> {
        fs::create_dir_all(root).map_err(|e| io_error(root, e))?;
        Ok(CacheStore {
            root: root.to_path_buf(),
        })
    }

    /// The directory this store reads and writes.
    pub fn root(&self) -> &Path {
        &self.root
    }

    fn h_path(&self, fq: &Fq, index: usize) -> PathBuf {
        self.root.join(format!("h-q{}-i{}.json", fq.q(), index))
    }

    fn xi_path(&self, fq: &Fq, s1: usize, s2: usize) -> PathBuf {
        self.root.join(format!("xi-q{}-s{}-{}.json", fq.q(), s1, s2))
    }

    // ---- Interpolation polynomials ----

    /// Loads H_index if the store has it.
    pub fn load_h(&self, fq: &'static Fq, index: usize) -> Result<Option<BiPoly>, PipelineError> {
        let path = self.h_path(fq, index);
        let Some(text) = read_optional(&path)? else {
            return Ok(None);
        };
        let rec: HRecord = parse(&path, &text)?;
        if rec.kind != "h"
            || rec.q != fq.q()
            || rec.p != fq.p()
            || rec.e != fq.e()
            || rec.index != index
        {
            return Err(mismatch(
                &path,
                format!(
                    "stored kind={} q={} p={} e={} index={}",
                    rec.kind, rec.q, rec.p, rec.e, rec.index
                ),
            ));
        }
        let coeffs = decode_polys(&path, fq, &rec.coeffs)?;
        Ok(Some(BiPoly::from_t_coeffs(fq, coeffs)))
    }

    /// Writes H_index, replacing any previous record atomically.
    pub fn store_h(
        &self,
        fq: &'static Fq,
        index: usize,
        poly: &BiPoly,
    ) -> Result<(), PipelineError> {
        let rec = HRecord {
            kind: "h".into(),
            q: fq.q(),
            p: fq.p(),
            e: fq.e(),
            index,
            coeffs: poly.t_coeffs().iter().map(encode_poly).collect(),
        };
        self.publish(&self.h_path(fq, index), &rec)
    }

    // ---- Special points ----

    /// Loads the special point for the pair (s1, s2) if the store has it.
    pub fn load_xi(
        &self,
        fq: &'static Fq,
        s1: usize,
        s2: usize,
    ) -> Result<Option<TensorPoint>, PipelineError> {
        let path = self.xi_path(fq, s1, s2);
        let Some(text) = read_optional(&path)? else {
            return Ok(None);
        };
        let rec: XiRecord = parse(&path, &text)?;
        if rec.kind != "xi"
            || rec.q != fq.q()
            || rec.p != fq.p()
            || rec.e != fq.e()
            || rec.s1 != s1
            || rec.s2 != s2
        {
            return Err(mismatch(
                &path,
                format!(
                    "stored kind={} q={} p={} e={} pair=({}, {})",
                    rec.kind, rec.q, rec.p, rec.e, rec.s1, rec.s2
                ),
            ));
        }
        if rec.coords.len() != s1 + s2 {
            return Err(mismatch(
                &path,
                format!("{} coordinates for weight {}", rec.coords.len(), s1 + s2),
            ));
        }
        let coords = decode_polys(&path, fq, &rec.coords)?;
        Ok(Some(TensorPoint::new(fq, coords)))
    }

    /// Writes the special point for (s1, s2), replacing atomically.
    pub fn store_xi(
        &self,
        fq: &'static Fq,
        s1: usize,
        s2: usize,
        point: &TensorPoint,
    ) -> Result<(), PipelineError> {
        let rec = XiRecord {
            kind: "xi".into(),
            q: fq.q(),
            p: fq.p(),
            e: fq.e(),
            s1,
            s2,
            coords: point.coords().iter().map(encode_poly).collect(),
        };
        self.publish(&self.xi_path(fq, s1, s2), &rec)
    }

    // ---- Publication ----

    fn publish<T: Serialize>(&self, path: &Path, record: &T) -> Result<(), PipelineError> {
        let text = serde_json::to_string(record)
            .expect("cache records serialize without fallible types");
        let mut tmp =
            tempfile::NamedTempFile::new_in(&self.root).map_err(|e| io_error(&self.root, e))?;
        tmp.write_all(text.as_bytes())
            .map_err(|e| io_error(path, e))?;
        tmp.persist(path).map_err(|e| io_error(path, e.error))?;
        Ok(())
    }
}

// ---- Record codecs ----

/// Coefficient digits, ascending degree.
fn encode_poly(p: &FqPoly) -> Vec<u64> {
    p.coeffs().iter().map(|c| c.digit()).collect()
}

fn decode_polys(
    path: &Path,
    fq: &'static Fq,
    rows: &[Vec<u64>],
) -> Result<Vec<FqPoly>, PipelineError> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut coeffs = Vec::with_capacity(row.len());
        for &digit in row {
            coeffs.push(fq.elem(digit).map_err(|e| PipelineError::CacheFormat {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?);
        }
        out.push(UniPoly::from_vec(Var::Theta, fq.zero(), coeffs));
    }
    Ok(out)
}

fn parse<'a, T: Deserialize<'a>>(path: &Path, text: &'a str) -> Result<T, PipelineError> {
    serde_json::from_str(text).map_err(|e| PipelineError::CacheFormat {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

fn read_optional(path: &Path) -> Result<Option<String>, PipelineError> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(Some(text)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(io_error(path, e)),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> PipelineError {
    PipelineError::CacheIo {
        path: path.display().to_string(),
        source,
    }
}

fn mismatch(path: &Path, detail: String) -> PipelineError {
    PipelineError::CacheMismatch {
        path: path.display().to_string(),
        detail,
    }
}
