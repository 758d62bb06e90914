//! Sector-resolved exact diagonalization, two-site translation labels and
//! spectrum comparison.

mod lanczos;

pub use lanczos::{lowest_eigenpairs, LanczosOptions};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::vertex::{translation, SectorOperator, C64};

/// Largest sector handled by full dense diagonalization.
pub const FULL_DIM_CAP: usize = 20000;
/// Relative hermiticity tolerance deciding between the two dense solvers.
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Energies closer than this form one degenerate cluster.
pub const CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagMode {
    Full,
    LowestK(usize),
}

/// Eigenvalues of a sector operator, ascending by real part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub params: ModelParams,
    pub sector: usize,
    pub eigenvalues: Vec<f64>,
    pub imaginary: Vec<f64>,
    pub hermitian: bool,
    /// Eigenvalue of the two-site translation per level, when computed.
    pub labels: Option<Vec<C64>>,
    pub ground_energy: f64,
}

impl SpectrumResult {
    pub fn from_real(params: ModelParams, mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let ground_energy = eigenvalues.first().copied().unwrap_or(f64::NAN);
        Self {
            params,
            sector: params.magnetization,
            imaginary: vec![0.0; eigenvalues.len()],
            eigenvalues,
            hermitian: true,
            labels: None,
            ground_energy,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

fn relative_hermiticity(op: &SectorOperator) -> f64 {
    op.hermiticity_residual() / op.frobenius_norm().max(1.0)
}

/// Eigen-decomposition of `op`. Hermitian operators (to [`HERMITIAN_TOL`])
/// use the symmetric solver; others use a complex Schur form and set
/// `hermitian = false`. `LowestK` on a hermitian operator runs Lanczos.
pub fn diagonalize(
    op: &SectorOperator,
    params: &ModelParams,
    mode: DiagMode,
) -> Result<SpectrumResult> {
    let n = op.dim();
    let hermitian = relative_hermiticity(op) <= HERMITIAN_TOL;
    match mode {
        DiagMode::LowestK(k) if hermitian => {
            let pairs = lowest_eigenpairs(|x| op.apply(x), n, k, &LanczosOptions::default())?;
            Ok(SpectrumResult::from_real(
                *params,
                pairs.into_iter().map(|(e, _)| e).collect(),
            ))
        }
        _ => {
            if n > FULL_DIM_CAP {
                return Err(Error::DimensionExceeded {
                    dim: n,
                    cap: FULL_DIM_CAP,
                });
            }
            let mut res = if hermitian {
                let eig = op.to_dense().into_owned().symmetric_eigen();
                SpectrumResult::from_real(*params, eig.eigenvalues.iter().copied().collect())
            } else {
                let schur = nalgebra::Schur::try_new(
                    op.to_dense().into_owned(),
                    f64::EPSILON,
                    100 * n.max(10),
                )
                .ok_or(Error::NonConvergence {
                    iterations: 100 * n.max(10),
                })?;
                let (_, t) = schur.unpack();
                let mut ev: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
                ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
                SpectrumResult {
                    params: *params,
                    sector: params.magnetization,
                    eigenvalues: ev.iter().map(|z| z.re).collect(),
                    imaginary: ev.iter().map(|z| z.im).collect(),
                    hermitian: false,
                    labels: None,
                    ground_energy: ev.first().map(|z| z.re).unwrap_or(f64::NAN),
                }
            };
            if let DiagMode::LowestK(k) = mode {
                res.eigenvalues.truncate(k);
                res.imaginary.truncate(k);
            }
            Ok(res)
        }
    }
}

/// Eigenpairs of a hermitian operator (dense), ascending.
pub fn eigenpairs(op: &SectorOperator) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = op.dim();
    if n > FULL_DIM_CAP {
        return Err(Error::DimensionExceeded {
            dim: n,
            cap: FULL_DIM_CAP,
        });
    }
    let eig = op.to_dense().into_owned().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Largest `||H v - lambda v||` over the eigenpairs.
pub fn max_eigen_residual(op: &SectorOperator, values: &[f64], vectors: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (c, &lambda) in values.iter().enumerate() {
        let v: Vec<C64> = vectors.column(c).iter().copied().collect();
        let hv = op.apply(&v);
        let r = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

/// Group ascending values into clusters of mutually close entries.
pub fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Attach two-site translation eigenvalues to every level of a hermitian
/// `op`. Degenerate clusters are resolved by diagonalizing the translation
/// inside the cluster.
pub fn translation_labels(op: &SectorOperator, spectrum: SpectrumResult) -> Result<SpectrumResult> {
    let t2 = translation(op.basis().clone(), 2);
    let comm = op.commutator_norm(&t2) / op.frobenius_norm().max(1.0);
    if comm > 1e-8 {
        return Err(Error::TranslationNotConserved { residual: comm });
    }
    let (values, vectors) = eigenpairs(op)?;
    let t2d = t2.to_dense();
    let mut labels = Vec::with_capacity(values.len());
    for range in clusters(&values, CLUSTER_TOL) {
        let v = vectors.columns(range.start, range.len()).into_owned();
        let block = v.adjoint() * t2d.as_ref() * &v;
        let mut ls = normal_eigenvalues(&block);
        ls.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        labels.extend(ls);
    }
    let mut out = spectrum;
    if out.eigenvalues.len() != values.len() {
        out = SpectrumResult::from_real(out.params, values);
    }
    out.labels = Some(labels);
    Ok(out)
}

/// Eigenvalues of a normal matrix `B`, from the eigenvectors of the
/// hermitian combination `Re B + g Im B` with an irrational weight `g`.
fn normal_eigenvalues(b: &DMatrix<C64>) -> Vec<C64> {
    let half = C64::new(0.5, 0.0);
    let re = (b + b.adjoint()) * half;
    let im = (b - b.adjoint()) * C64::new(0.0, -0.5);
    let mix = re + im * C64::new(0.618_033_988_749_895, 0.0);
    let eig = mix.symmetric_eigen();
    (0..b.nrows())
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            (v.adjoint() * b * v)[(0, 0)]
        })
        .collect()
}

/// Outcome of pairing two spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub pairs: Vec<(usize, usize)>,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    /// Mean of `b - a` over the pairs.
    pub mean_shift: f64,
    pub tol: f64,
    pub passed: bool,
}

fn report(a: &[f64], b: &[f64], pairs: Vec<(usize, usize)>, tol: f64) -> ComparisonReport {
    let devs: Vec<f64> = pairs.iter().map(|&(i, j)| b[j] - a[i]).collect();
    let n = devs.len().max(1) as f64;
    let max_deviation = devs.iter().map(|d| d.abs()).fold(0.0, f64::max);
    ComparisonReport {
        pairs,
        max_deviation,
        mean_deviation: devs.iter().map(|d| d.abs()).sum::<f64>() / n,
        mean_shift: devs.iter().sum::<f64>() / n,
        tol,
        passed: max_deviation <= tol,
    }
}

/// Pair two equally sized spectra level by level.
pub fn compare_spectra(
    a: &SpectrumResult,
    b: &SpectrumResult,
    tol: f64,
) -> Result<ComparisonReport> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(a.len(), b.len()));
    }
    let pairs = (0..a.len()).map(|i| (i, i)).collect();
    Ok(report(&a.eigenvalues, &b.eigenvalues, pairs, tol))
}

/// Greedily match each of `values` to the nearest unused level of `spectrum`.
pub fn match_into(values: &[f64], spectrum: &[f64], tol: f64) -> Result<ComparisonReport> {
    if values.len() > spectrum.len() {
        return Err(Error::SizeMismatch(values.len(), spectrum.len()));
    }
    let mut used = vec![false; spectrum.len()];
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut pairs = Vec::with_capacity(values.len());
    for i in order {
        let j = (0..spectrum.len())
            .filter(|&j| !used[j])
            .min_by(|&x, &y| {
                (spectrum[x] - values[i])
                    .abs()
                    .total_cmp(&(spectrum[y] - values[i]).abs())
            })
            .expect("spectrum has enough levels");
        used[j] = true;
        pairs.push((i, j));
    }
    pairs.sort_unstable();
    Ok(report(values, spectrum, pairs, tol))
}
