//! Sketching matrices `P` (r×n) and their alignment diagnostics.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::format;
use crate::keys::{parse_params, split_key};
use crate::rng::RngStream;

/// Singular values at or below this fraction of `σ_max` count as zero.
pub const ZERO_SINGULAR_VALUE_RTOL: f64 = 1e-12;

/// Relative slack on the `‖P‖ ≤ P_max` and `σ_min ≥ σ` comparisons, so that
/// e.g. an orthogonal sketch passes with `P_max = σ = √(n/r)` despite
/// rounding in the computed singular values.
const SINGULAR_VALUE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SketchKind {
    Identity,
    /// Entries i.i.d. N(0, 1/r).
    Gaussian { r: usize },
    /// `s` nonzeros per column, each ±1/√s.
    Hashing { r: usize, s: usize },
    /// √(n/r) times r Haar-distributed orthonormal rows.
    Orthogonal { r: usize },
    /// User-supplied matrix.
    Custom,
}

impl SketchKind {
    pub fn is_random(self) -> bool {
        !matches!(self, SketchKind::Identity | SketchKind::Custom)
    }

    /// Subspace dimension for an ambient dimension `n`.
    pub fn reduced_dim(self, n: usize) -> usize {
        match self {
            SketchKind::Identity | SketchKind::Custom => n,
            SketchKind::Gaussian { r } | SketchKind::Hashing { r, .. } | SketchKind::Orthogonal { r } => r,
        }
    }

    pub fn generate(self, n: usize, rng: &mut RngStream) -> Result<SketchMatrix> {
        match self {
            SketchKind::Identity => make_identity(n),
            SketchKind::Gaussian { r } => make_gaussian(r, n, rng),
            SketchKind::Hashing { r, s } => make_hashing(r, n, s, rng),
            SketchKind::Orthogonal { r } => make_orthogonal(r, n, rng),
            SketchKind::Custom => Err(Error::invalid("custom sketches cannot be generated")),
        }
    }
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SketchKind::Identity => f.write_str("identity"),
            SketchKind::Gaussian { r } => write!(f, "gaussian:r={r}"),
            SketchKind::Hashing { r, s } => write!(f, "hashing:r={r},s={s}"),
            SketchKind::Orthogonal { r } => write!(f, "orthogonal:r={r}"),
            SketchKind::Custom => f.write_str("custom"),
        }
    }
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(key: &str) -> Result<Self> {
        let unknown = || Error::UnknownKey { kind: "sketch", key: key.to_owned() };
        let (name, params) = split_key(key);
        let mut params = parse_params(params)?;
        let kind = match name {
            "identity" => SketchKind::Identity,
            "gaussian" => SketchKind::Gaussian { r: params.usize("r")?.ok_or_else(unknown)? },
            "orthogonal" => SketchKind::Orthogonal { r: params.usize("r")?.ok_or_else(unknown)? },
            "hashing" => {
                let r = params.usize("r")?.ok_or_else(unknown)?;
                let s = params.usize("s")?.unwrap_or(1);
                SketchKind::Hashing { r, s }
            }
            _ => return Err(unknown()),
        };
        match kind {
            SketchKind::Gaussian { r } | SketchKind::Orthogonal { r } | SketchKind::Hashing { r, .. } if r == 0 => {
                Err(Error::invalid("sketch dimension r must be positive"))
            }
            SketchKind::Hashing { r, s } if s == 0 || s > r => {
                Err(Error::invalid(format!("hashing needs 1 <= s <= r, got s={s}, r={r}")))
            }
            _ => params.finish(kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Identity,
    Dense(DMatrix<f64>),
    /// Column-compressed: column `j` owns entries `j*s .. (j+1)*s`.
    Hashing { rows: Vec<usize>, vals: Vec<f64>, s: usize },
}

/// An r×n sketching matrix. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchMatrix {
    kind: SketchKind,
    rows: usize,
    cols: usize,
    storage: Storage,
}

impl SketchMatrix {
    pub fn from_dense(mat: DMatrix<f64>) -> Result<Self> {
        if mat.is_empty() {
            return Err(Error::invalid("sketch matrix must be non-empty"));
        }
        Ok(Self {
            kind: SketchKind::Custom,
            rows: mat.nrows(),
            cols: mat.ncols(),
            storage: Storage::Dense(mat),
        })
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    /// Subspace dimension r.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Ambient dimension n.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `P g` (in R^r).
    pub fn apply(&self, g: &DVector<f64>) -> DVector<f64> {
        assert_eq!(g.len(), self.cols, "dimension mismatch in P g");
        match &self.storage {
            Storage::Identity => g.clone(),
            Storage::Dense(m) => m * g,
            Storage::Hashing { rows, vals, s } => {
                let mut out = DVector::zeros(self.rows);
                for (j, gj) in g.iter().enumerate() {
                    for t in j * s..(j + 1) * s {
                        out[rows[t]] += vals[t] * gj;
                    }
                }
                out
            }
        }
    }

    /// `Pᵀ d` (in R^n).
    pub fn apply_transpose(&self, d: &DVector<f64>) -> DVector<f64> {
        assert_eq!(d.len(), self.rows, "dimension mismatch in Pᵀ d");
        match &self.storage {
            Storage::Identity => d.clone(),
            Storage::Dense(m) => m.tr_mul(d),
            Storage::Hashing { rows, vals, s } => DVector::from_fn(self.cols, |j, _| {
                (j * s..(j + 1) * s).map(|t| vals[t] * d[rows[t]]).sum()
            }),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.storage {
            Storage::Identity => DMatrix::identity(self.rows, self.cols),
            Storage::Dense(m) => m.clone(),
            Storage::Hashing { rows, vals, s } => {
                let mut m = DMatrix::zeros(self.rows, self.cols);
                for j in 0..self.cols {
                    for t in j * s..(j + 1) * s {
                        m[(rows[t], j)] = vals[t];
                    }
                }
                m
            }
        }
    }

    /// Number of stored nonzeros in column `j` (hashing: always `s`).
    pub fn column_nnz(&self, j: usize) -> usize {
        match &self.storage {
            Storage::Identity => 1,
            Storage::Dense(m) => m.column(j).iter().filter(|v| **v != 0.0).count(),
            Storage::Hashing { vals, s, .. } => vals[j * s..(j + 1) * s].iter().filter(|v| **v != 0.0).count(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.storage {
            Storage::Identity => (self.rows as f64).sqrt(),
            Storage::Dense(m) => m.norm(),
            Storage::Hashing { vals, s, .. } => vals
                .chunks(*s)
                .map(|col| col.iter().map(|v| v * v).sum::<f64>())
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Singular values in decreasing order (`min(r, n)` of them).
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = match &self.storage {
            Storage::Identity => vec![1.0; self.rows],
            _ => self.to_dense().singular_values().iter().copied().collect(),
        };
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Operator 2-norm.
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Smallest singular value above `1e-12 · σ_max`.
    pub fn min_nonzero_singular_value(&self) -> Result<f64> {
        let sv = self.singular_values();
        let max = sv.first().copied().unwrap_or(0.0);
        if max == 0.0 {
            return Err(Error::invalid("matrix has no nonzero singular value"));
        }
        Ok(sv
            .into_iter()
            .filter(|v| *v > ZERO_SINGULAR_VALUE_RTOL * max)
            .fold(f64::INFINITY, f64::min))
    }
}

/// `I_n`; well aligned with η = σ = P_max = 1.
pub fn make_identity(n: usize) -> Result<SketchMatrix> {
    if n == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    Ok(SketchMatrix {
        kind: SketchKind::Identity,
        rows: n,
        cols: n,
        storage: Storage::Identity,
    })
}

fn check_dims(r: usize, n: usize) -> Result<()> {
    if r == 0 || r > n {
        return Err(Error::invalid(format!("sketch needs 1 <= r <= n, got r={r}, n={n}")));
    }
    Ok(())
}

pub fn make_gaussian(r: usize, n: usize, rng: &mut RngStream) -> Result<SketchMatrix> {
    check_dims(r, n)?;
    let scale = 1.0 / (r as f64).sqrt();
    let mat = DMatrix::from_fn(r, n, |_, _| scale * rng.standard_normal());
    Ok(SketchMatrix {
        kind: SketchKind::Gaussian { r },
        rows: r,
        cols: n,
        storage: Storage::Dense(mat),
    })
}

/// Each column gets `s` distinct rows (uniform, without replacement) holding
/// independent ±1/√s.
pub fn make_hashing(r: usize, n: usize, s: usize, rng: &mut RngStream) -> Result<SketchMatrix> {
    check_dims(r, n)?;
    if s == 0 || s > r {
        return Err(Error::invalid(format!("hashing needs 1 <= s <= r, got s={s}, r={r}")));
    }
    let mag = 1.0 / (s as f64).sqrt();
    let mut rows = Vec::with_capacity(n * s);
    let mut vals = Vec::with_capacity(n * s);
    for _ in 0..n {
        let mut picked = if s == 1 {
            vec![rng.random_range(0..r)]
        } else {
            index::sample(rng, r, s).into_vec()
        };
        picked.sort_unstable();
        for row in picked {
            rows.push(row);
            vals.push(if rng.random_bool(0.5) { mag } else { -mag });
        }
    }
    Ok(SketchMatrix {
        kind: SketchKind::Hashing { r, s },
        rows: r,
        cols: n,
        storage: Storage::Hashing { rows, vals, s },
    })
}

/// √(n/r)·Qᵀ where `Z = QR` is the thin QR of an n×r standard Gaussian
/// matrix with diag(R) > 0, i.e. the first r rows of a Haar orthogonal matrix.
pub fn make_orthogonal(r: usize, n: usize, rng: &mut RngStream) -> Result<SketchMatrix> {
    check_dims(r, n)?;
    let z = DMatrix::from_fn(n, r, |_, _| rng.standard_normal());
    let qr = z.qr();
    let mut q = qr.q();
    let rdiag = qr.r().diagonal();
    for (j, rjj) in rdiag.iter().enumerate() {
        if *rjj < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let mat = q.transpose() * (n as f64 / r as f64).sqrt();
    Ok(SketchMatrix {
        kind: SketchKind::Orthogonal { r },
        rows: r,
        cols: n,
        storage: Storage::Dense(mat),
    })
}

/// `(η, σ, P_max)`-well-alignedness of `P` for gradient `g`:
/// `‖Pg‖ ≥ η‖g‖`, `‖P‖ ≤ P_max` and `σ_min(P) ≥ σ`.
pub fn is_well_aligned(p: &SketchMatrix, grad: &DVector<f64>, eta: f64, sigma: f64, pmax: f64) -> Result<bool> {
    let gn = grad.norm();
    if gn == 0.0 {
        return Err(Error::invalid("alignment test needs a nonzero gradient"));
    }
    if p.apply(grad).norm() < eta * gn {
        return Ok(false);
    }
    let sv = p.singular_values();
    let max = sv.first().copied().unwrap_or(0.0);
    if max > pmax * (1.0 + SINGULAR_VALUE_SLACK) {
        return Ok(false);
    }
    let min = p.min_nonzero_singular_value()?;
    Ok(min >= sigma * (1.0 - SINGULAR_VALUE_SLACK))
}

/// Monte-Carlo frequency of `‖Pg‖ ≥ η‖g‖` over fresh draws, for the fixed
/// unit gradient `g = e_1`. The identity sketch returns 1 without sampling.
pub fn estimate_alignment_probability(
    kind: SketchKind,
    n: usize,
    eta: f64,
    trials: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    if kind == SketchKind::Identity {
        return Ok(if eta <= 1.0 { 1.0 } else { 0.0 });
    }
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let mut g = DVector::zeros(n);
    g[0] = 1.0;
    let mut hits = 0usize;
    for _ in 0..trials {
        let p = kind.generate(n, rng)?;
        if p.apply(&g).norm() >= eta {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Closed-form `P(‖Pg‖ ≥ η‖g‖)` for the orthogonal ensemble:
/// `(r/n)‖Pg‖²/‖g‖² ~ Beta(r/2, (n-r)/2)`, so the probability is
/// `1 - I_{η² r/n}(r/2, (n-r)/2)`.
pub fn orthogonal_alignment_probability(n: usize, r: usize, eta: f64) -> Result<f64> {
    check_dims(r, n)?;
    if r == n {
        return Ok(if eta <= 1.0 { 1.0 } else { 0.0 });
    }
    let x = eta * eta * r as f64 / n as f64;
    if x >= 1.0 {
        return Ok(0.0);
    }
    Ok(1.0 - beta_reg(r as f64 / 2.0, (n - r) as f64 / 2.0, x))
}

/// Summary of `σ_min` over independent s = 1 hashing matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularValueStats {
    pub n: usize,
    pub r: usize,
    pub trials: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

pub fn hashing_sv_stats(n: usize, r: usize, trials: usize, rng: &mut RngStream) -> Result<SingularValueStats> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for _ in 0..trials {
        let sv = make_hashing(r, n, 1, rng)?.min_nonzero_singular_value()?;
        sum += sv;
        min = min.min(sv);
        max = max.max(sv);
    }
    let mean = if trials == 1 { min } else { sum / trials as f64 };
    Ok(SingularValueStats { n, r, trials, mean, min, max })
}

/// σ_min statistics for every `(n, r)` in `pairs`, in order.
pub fn hashing_singular_value_experiment(
    pairs: &[(usize, usize)],
    trials: usize,
    rng: &mut RngStream,
) -> Result<Vec<SingularValueStats>> {
    pairs
        .iter()
        .map(|&(n, r)| hashing_sv_stats(n, r, trials, rng))
        .collect()
}

pub fn write_sv_csv<W: Write>(stats: &[SingularValueStats], mut out: W) -> Result<()> {
    writeln!(out, "n,r,trials,mean,min,max")?;
    for s in stats {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.n,
            s.r,
            s.trials,
            format::float(s.mean),
            format::float(s.min),
            format::float(s.max)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_examples() {
        let p = make_identity(3).unwrap();
        assert_eq!(p.spectral_norm(), 1.0);
        assert_eq!(p.min_nonzero_singular_value().unwrap(), 1.0);
        assert_eq!(make_identity(1).unwrap().to_dense(), DMatrix::from_element(1, 1, 1.0));
        let g = DVector::from_vec(vec![3.0, -1.0, 2.0]);
        assert_eq!(p.apply(&g).norm(), g.norm());
        assert!(is_well_aligned(&p, &g, 1.0, 1.0, 1.0).unwrap());
    }

    #[test]
    fn gaussian_scalar_case() {
        let mut rng = RngStream::from_seed(3);
        let p = make_gaussian(1, 1, &mut rng).unwrap();
        assert_eq!((p.rows(), p.cols()), (1, 1));
        assert!(make_gaussian(3, 2, &mut rng).is_err());
    }

    #[test]
    fn hashing_structure() {
        let mut rng = RngStream::from_seed(9);
        let p = make_hashing(5, 10, 3, &mut rng).unwrap();
        assert_eq!(p.frobenius_norm(), 10f64.sqrt());
        let dense = p.to_dense();
        for j in 0..10 {
            assert_eq!(p.column_nnz(j), 3);
            assert_abs_diff_eq!(dense.column(j).norm(), 1.0, epsilon = 1e-15);
        }
        let row = make_hashing(1, 4, 1, &mut rng).unwrap().to_dense();
        assert!(row.iter().all(|v| v.abs() == 1.0));
        assert!(matches!(make_hashing(2, 4, 3, &mut rng), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn hashing_sparse_products_match_dense() {
        let mut rng = RngStream::from_seed(10);
        let p = make_hashing(4, 30, 2, &mut rng).unwrap();
        let dense = p.to_dense();
        let g = DVector::from_fn(30, |i, _| (i as f64).sin());
        let d = DVector::from_fn(4, |i, _| 1.0 + i as f64);
        assert_abs_diff_eq!((p.apply(&g) - &dense * &g).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((p.apply_transpose(&d) - dense.tr_mul(&d)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_examples() {
        let mut rng = RngStream::from_seed(12);
        let p = make_orthogonal(3, 9, &mut rng).unwrap();
        for sv in p.singular_values() {
            assert_abs_diff_eq!(sv, 3f64.sqrt(), epsilon = 1e-10);
        }
        let one = make_orthogonal(1, 1, &mut rng).unwrap().to_dense();
        assert_abs_diff_eq!(one[(0, 0)].abs(), 1.0, epsilon = 1e-15);
        let line = make_orthogonal(1, 100, &mut rng).unwrap().to_dense();
        assert_abs_diff_eq!(line.norm(), 10.0, epsilon = 1e-12);
        let p4 = make_orthogonal(2, 4, &mut rng).unwrap();
        assert_abs_diff_eq!(p4.min_nonzero_singular_value().unwrap(), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_norm_conditions_always_hold() {
        let mut rng = RngStream::from_seed(13);
        let s3 = 3f64.sqrt();
        for _ in 0..200 {
            let p = make_orthogonal(3, 9, &mut rng).unwrap();
            let g = DVector::from_fn(9, |_, _| rng.standard_normal());
            // η = 0 isolates the two norm conditions
            assert!(is_well_aligned(&p, &g, 0.0, s3, s3).unwrap());
        }
    }

    #[test]
    fn misaligned_projector() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = 1.0;
        let p = SketchMatrix::from_dense(m).unwrap();
        let g = DVector::from_vec(vec![0.0, 1.0]);
        assert!(!is_well_aligned(&p, &g, 1e-8, 1.0, 1.0).unwrap());
        assert!(is_well_aligned(&p, &DVector::zeros(2), 0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn min_nonzero_ignores_zero_rows() {
        let mut m = DMatrix::zeros(2, 3);
        m[(0, 0)] = 2.0;
        let p = SketchMatrix::from_dense(m).unwrap();
        assert_abs_diff_eq!(p.min_nonzero_singular_value().unwrap(), 2.0, epsilon = 1e-15);
        let zero = SketchMatrix::from_dense(DMatrix::zeros(2, 3)).unwrap();
        assert!(zero.min_nonzero_singular_value().is_err());
    }

    #[test]
    fn hashing_scalar_sigma_is_one() {
        let mut rng = RngStream::from_seed(1);
        let st = hashing_sv_stats(1, 1, 10, &mut rng).unwrap();
        assert_eq!((st.mean, st.min, st.max), (1.0, 1.0, 1.0));
    }

    #[test]
    fn single_trial_stats_are_degenerate() {
        let mut rng = RngStream::from_seed(2);
        let st = hashing_sv_stats(200, 4, 1, &mut rng).unwrap();
        assert_eq!(st.mean, st.min);
        assert_eq!(st.min, st.max);
    }

    #[test]
    fn identity_alignment_probability_is_exact() {
        let mut rng = RngStream::from_seed(0);
        assert_eq!(estimate_alignment_probability(SketchKind::Identity, 10, 0.5, 1, &mut rng).unwrap(), 1.0);
    }

    #[test]
    fn keys_round_trip() {
        for key in ["identity", "gaussian:r=3", "hashing:r=5,s=2", "orthogonal:r=1"] {
            let k: SketchKind = key.parse().unwrap();
            assert_eq!(k.to_string(), key);
        }
        assert_eq!("hashing:r=4".parse::<SketchKind>().unwrap(), SketchKind::Hashing { r: 4, s: 1 });
        assert!("hashing:r=2,s=3".parse::<SketchKind>().is_err());
        assert!("gaussian".parse::<SketchKind>().is_err());
        assert!("gaussian:r=0".parse::<SketchKind>().is_err());
        assert!("sparse:r=2".parse::<SketchKind>().is_err());
    }
}
