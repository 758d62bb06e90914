//! CSV and JSON output. Every file is written to a temporary sibling and
//! renamed into place, so readers never see a partial file.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bethe::BetheState;
use crate::continuum::DispersionCurve;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::scaling::{plot_data, FitResult, ScalingSeries};
use crate::spectra::SpectrumResult;
use crate::vertex::{SectorOperator, C64};

fn temp_path(path: &Path) -> Result<PathBuf> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let mut tmp = name.to_os_string();
    tmp.push(format!(".tmp{}", std::process::id()));
    Ok(path.with_file_name(tmp))
}

/// Write `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let tmp = temp_path(path)?;
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

fn csv_bytes<F>(header: &[&str], fill: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn num(x: f64) -> String {
    // Round-trip exact.
    format!("{x:e}")
}

/// Prefix `body` with `# `-comment lines.
pub fn with_comments(comments: &[String], body: Vec<u8>) -> Vec<u8> {
    let mut out = Vec::with_capacity(body.len() + 64 * comments.len());
    for c in comments {
        for line in c.lines() {
            out.extend_from_slice(b"# ");
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        }
    }
    out.extend(body);
    out
}

/// Sidecar description of an operator dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDescriptor {
    pub sites: usize,
    pub magnetization: usize,
    pub eta: f64,
    pub theta: f64,
    pub convention: String,
    pub dim: usize,
    pub nonzeros: usize,
    /// Basis masks in index order; bit `i` set means site `i` is up.
    pub basis: Vec<u64>,
}

/// `row,col,re,im` for entries with modulus above `tol`, with the descriptor.
pub fn operator_csv(
    op: &SectorOperator,
    params: &ModelParams,
    convention: &str,
    tol: f64,
) -> Result<(Vec<u8>, OperatorDescriptor)> {
    let triplets = op.triplets(tol);
    let bytes = csv_bytes(&["row", "col", "re", "im"], |w| {
        for (r, c, v) in &triplets {
            w.write_record([r.to_string(), c.to_string(), num(v.re), num(v.im)])?;
        }
        Ok(())
    })?;
    let desc = OperatorDescriptor {
        sites: params.sites,
        magnetization: params.magnetization,
        eta: params.eta,
        theta: params.theta,
        convention: convention.to_string(),
        dim: op.dim(),
        nonzeros: triplets.len(),
        basis: op.basis().states().to_vec(),
    };
    Ok((bytes, desc))
}

/// Read back the triplets of an operator CSV (comment lines skipped).
pub fn read_operator_triplets(path: &Path) -> Result<Vec<(usize, usize, C64)>> {
    #[derive(Deserialize)]
    struct Row {
        row: usize,
        col: usize,
        re: f64,
        im: f64,
    }
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    r.deserialize::<Row>()
        .map(|row| {
            row.map(|x| (x.row, x.col, C64::new(x.re, x.im)))
                .map_err(Error::from)
        })
        .collect()
}

/// `index,re,im[,label_re,label_im]`.
pub fn spectrum_csv(s: &SpectrumResult) -> Result<Vec<u8>> {
    let mut header = vec!["index", "re", "im"];
    if s.labels.is_some() {
        header.extend(["label_re", "label_im"]);
    }
    csv_bytes(&header, |w| {
        for (i, (re, im)) in s.eigenvalues.iter().zip(&s.imaginary).enumerate() {
            let mut rec = vec![i.to_string(), num(*re), num(*im)];
            if let Some(l) = &s.labels {
                rec.push(num(l[i].re));
                rec.push(num(l[i].im));
            }
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

/// `index,quantum_number,rapidity`.
pub fn bethe_csv(s: &BetheState) -> Result<Vec<u8>> {
    csv_bytes(&["index", "quantum_number", "rapidity"], |w| {
        for (i, (j, t)) in s.quantum_numbers.iter().zip(&s.roots).enumerate() {
            w.write_record([i.to_string(), num(*j), num(*t)])?;
        }
        Ok(())
    })
}

/// `rapidity,energy,momentum,source`.
pub fn dispersion_csv(curves: &[&DispersionCurve]) -> Result<Vec<u8>> {
    csv_bytes(&["rapidity", "energy", "momentum", "source"], |w| {
        for c in curves {
            let src = format!("{:?}", c.source);
            for s in &c.samples {
                w.write_record([num(s.t), num(s.epsilon), num(s.p), src.clone()])?;
            }
        }
        Ok(())
    })
}

/// `theta,h,value,provenance`.
pub fn series_csv(s: &ScalingSeries) -> Result<Vec<u8>> {
    csv_bytes(&["theta", "h", "value", "provenance"], |w| {
        for i in 0..s.len() {
            w.write_record([
                num(s.thetas[i]),
                num(s.couplings[i]),
                num(s.values[i]),
                format!("{:?}", s.provenance[i]),
            ])?;
        }
        Ok(())
    })
}

/// `x,y,fit` with `x = h`.
pub fn plot_csv(s: &ScalingSeries, fit: &FitResult) -> Result<Vec<u8>> {
    csv_bytes(&["x", "y", "fit"], |w| {
        for (x, y, f) in plot_data(s, fit) {
            w.write_record([num(x), num(y), num(f)])?;
        }
        Ok(())
    })
}
