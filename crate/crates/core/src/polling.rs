//! Polling-set generators and cosine-measure utilities.
//!
//! All deterministic families are stored implicitly: a direction is
//! materialized on demand in O(r), so `[I_n, -I_n]` at n = 5000 costs nothing
//! up front. Directions are always produced in construction order, which
//! opportunistic polling depends on.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::keys::{parse_params, split_key};
use crate::rng::RngStream;

/// Relative slack allowed on computed norms in the `[1/D_max, D_max]` band.
const NORM_BAND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PollFamily {
    /// Columns of `[I_r, -I_r]`.
    CoordinatePss,
    /// `r + 1` unit vectors with pairwise inner products `-1/r`.
    UniformAnglePss,
    /// Columns of `[I_r, -e]` with `e` the all-ones vector.
    CoordinateNegOnes,
    /// `m` independent vectors uniform on the unit sphere.
    RandomUnit { m: usize },
    /// `{v, -v}` for one uniform unit vector `v`.
    RandomOpposite,
    /// User-supplied vectors.
    Custom,
}

impl PollFamily {
    pub fn is_random(self) -> bool {
        matches!(self, PollFamily::RandomUnit { .. } | PollFamily::RandomOpposite)
    }

    /// Number of directions generated in R^r.
    pub fn size(self, r: usize) -> Option<usize> {
        match self {
            PollFamily::CoordinatePss => Some(2 * r),
            PollFamily::UniformAnglePss | PollFamily::CoordinateNegOnes => Some(r + 1),
            PollFamily::RandomUnit { m } => Some(m),
            PollFamily::RandomOpposite => Some(2),
            PollFamily::Custom => None,
        }
    }

    /// Claimed `(κ, D_max)` for sets of this family in R^r.
    pub fn constants(self, r: usize) -> Option<(f64, f64)> {
        let rf = r as f64;
        match self {
            PollFamily::CoordinatePss
            | PollFamily::RandomUnit { .. }
            | PollFamily::RandomOpposite => Some((1.0 / rf.sqrt(), 1.0)),
            PollFamily::UniformAnglePss => Some((1.0 / rf, 1.0)),
            PollFamily::CoordinateNegOnes => {
                let kappa = 1.0 / (rf * rf + 2.0 * (rf - 1.0) * rf.sqrt()).sqrt();
                Some((kappa, rf.sqrt()))
            }
            PollFamily::Custom => None,
        }
    }

    /// Probability that a fresh set is `(κ, D_max)`-descent; a lower bound
    /// for the random-unit family (with `τ = 1`).
    pub fn success_probability(self) -> f64 {
        match self {
            PollFamily::RandomUnit { m } => random_unit_success_bound(m, 1.0),
            PollFamily::RandomOpposite => random_unit_success_bound(2, 1.0),
            _ => 1.0,
        }
    }

    /// Draws a polling set in R^r.
    pub fn generate(self, r: usize, rng: &mut RngStream) -> Result<DirectionSet> {
        if r == 0 {
            return Err(Error::invalid("polling dimension must be positive"));
        }
        match self {
            PollFamily::CoordinatePss => Ok(make_coordinate_pss(r)),
            PollFamily::UniformAnglePss => Ok(make_uniform_angle_pss(r)),
            PollFamily::CoordinateNegOnes => Ok(make_coordinate_plus_negative_ones(r)),
            PollFamily::RandomUnit { m } => make_random_unit(r, m, rng),
            PollFamily::RandomOpposite => Ok(make_random_opposite(r, rng)),
            PollFamily::Custom => Err(Error::UnsupportedFamily(self.to_string())),
        }
    }
}

impl fmt::Display for PollFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PollFamily::CoordinatePss => f.write_str("coord"),
            PollFamily::UniformAnglePss => f.write_str("uniform"),
            PollFamily::CoordinateNegOnes => f.write_str("coord_neg_e"),
            PollFamily::RandomUnit { m } => write!(f, "random_unit:m={m}"),
            PollFamily::RandomOpposite => f.write_str("random_pm"),
            PollFamily::Custom => f.write_str("custom"),
        }
    }
}

impl FromStr for PollFamily {
    type Err = Error;

    fn from_str(key: &str) -> Result<Self> {
        let unknown = || Error::UnknownKey { kind: "polling", key: key.to_owned() };
        let (name, params) = split_key(key);
        let mut params = parse_params(params)?;
        let family = match name {
            "coord" => PollFamily::CoordinatePss,
            "uniform" => PollFamily::UniformAnglePss,
            "coord_neg_e" => PollFamily::CoordinateNegOnes,
            "random_pm" => PollFamily::RandomOpposite,
            "random_unit" => {
                let m = params.usize("m")?.ok_or_else(unknown)?;
                if m == 0 {
                    return Err(Error::invalid("random_unit needs m >= 1"));
                }
                return params.finish(PollFamily::RandomUnit { m });
            }
            _ => return Err(unknown()),
        };
        params.finish(family)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    CoordinatePss,
    /// Householder vector `w` (length r+1) and `wᵀw`.
    UniformAngle { w: Vec<f64>, ww: f64 },
    CoordinateNegOnes,
    Dense(Vec<DVector<f64>>),
}

/// An ordered set of `m` polling directions in R^r.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    family: PollFamily,
    dim: usize,
    storage: Storage,
    claimed_kappa: f64,
    claimed_dmax: f64,
}

impl DirectionSet {
    /// Wraps arbitrary vectors; all must share one positive dimension.
    pub fn from_vectors(dirs: Vec<DVector<f64>>, claimed_kappa: f64, claimed_dmax: f64) -> Result<Self> {
        let dim = dirs.first().map(|d| d.len()).unwrap_or(0);
        if dim == 0 || dirs.iter().any(|d| d.len() != dim) {
            return Err(Error::invalid("directions must be non-empty with one common dimension"));
        }
        Ok(Self {
            family: PollFamily::Custom,
            dim,
            storage: Storage::Dense(dirs),
            claimed_kappa,
            claimed_dmax,
        })
    }

    pub fn family(&self) -> PollFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        match &self.storage {
            Storage::CoordinatePss => 2 * self.dim,
            Storage::UniformAngle { .. } | Storage::CoordinateNegOnes => self.dim + 1,
            Storage::Dense(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn claimed_kappa(&self) -> f64 {
        self.claimed_kappa
    }

    pub fn claimed_dmax(&self) -> f64 {
        self.claimed_dmax
    }

    /// The `i`-th direction, materialized.
    pub fn direction(&self, i: usize) -> DVector<f64> {
        assert!(i < self.len(), "direction index out of range");
        let r = self.dim;
        match &self.storage {
            Storage::CoordinatePss => {
                let mut d = DVector::zeros(r);
                if i < r {
                    d[i] = 1.0;
                } else {
                    d[i - r] = -1.0;
                }
                d
            }
            Storage::UniformAngle { w, ww } => {
                // row i of -sqrt((r+1)/r) * H[:, ..r], H = I - 2wwᵀ/(wᵀw)
                let scale = ((r + 1) as f64 / r as f64).sqrt();
                DVector::from_fn(r, |j, _| {
                    let h = if i == j { 1.0 } else { 0.0 } - 2.0 * w[i] * w[j] / ww;
                    -scale * h
                })
            }
            Storage::CoordinateNegOnes => {
                if i < r {
                    let mut d = DVector::zeros(r);
                    d[i] = 1.0;
                    d
                } else {
                    DVector::from_element(r, -1.0)
                }
            }
            Storage::Dense(d) => d[i].clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = DVector<f64>> + '_ {
        (0..self.len()).map(move |i| self.direction(i))
    }

    pub fn to_vectors(&self) -> Vec<DVector<f64>> {
        self.iter().collect()
    }

    /// Whether every direction satisfies `1/D_max ≤ ‖d‖ ≤ D_max`.
    pub fn within_norm_band(&self, dmax: f64) -> bool {
        let lo = (1.0 / dmax) * (1.0 - NORM_BAND_SLACK);
        let hi = dmax * (1.0 + NORM_BAND_SLACK);
        self.iter().all(|d| {
            let n = d.norm();
            n >= lo && n <= hi
        })
    }
}

/// `[I_r, -I_r]`: κ = r^{-1/2}, D_max = 1.
pub fn make_coordinate_pss(r: usize) -> DirectionSet {
    assert!(r >= 1);
    let (claimed_kappa, claimed_dmax) = PollFamily::CoordinatePss.constants(r).unwrap();
    DirectionSet {
        family: PollFamily::CoordinatePss,
        dim: r,
        storage: Storage::CoordinatePss,
        claimed_kappa,
        claimed_dmax,
    }
}

/// Regular simplex: `r + 1` unit vectors whose Gram matrix is
/// `((r+1)/r) I - (1/r) eeᵀ`. Built from the Householder reflector that maps
/// `e/√(r+1)` to the last basis vector; its first `r` columns span `e^⊥`.
/// κ = 1/r, D_max = 1.
pub fn make_uniform_angle_pss(r: usize) -> DirectionSet {
    assert!(r >= 1);
    let inv = 1.0 / ((r + 1) as f64).sqrt();
    let mut w = vec![inv; r + 1];
    w[r] = inv - 1.0;
    let ww = w.iter().map(|v| v * v).sum();
    let (claimed_kappa, claimed_dmax) = PollFamily::UniformAnglePss.constants(r).unwrap();
    DirectionSet {
        family: PollFamily::UniformAnglePss,
        dim: r,
        storage: Storage::UniformAngle { w, ww },
        claimed_kappa,
        claimed_dmax,
    }
}

/// `[I_r, -e]`: κ = (r² + 2(r-1)√r)^{-1/2}, D_max = √r.
pub fn make_coordinate_plus_negative_ones(r: usize) -> DirectionSet {
    assert!(r >= 1);
    let (claimed_kappa, claimed_dmax) = PollFamily::CoordinateNegOnes.constants(r).unwrap();
    DirectionSet {
        family: PollFamily::CoordinateNegOnes,
        dim: r,
        storage: Storage::CoordinateNegOnes,
        claimed_kappa,
        claimed_dmax,
    }
}

/// A uniform draw from the unit sphere of R^r (normalized Gaussian).
pub fn random_unit_vector(r: usize, rng: &mut RngStream) -> DVector<f64> {
    loop {
        let g = DVector::from_fn(r, |_, _| rng.standard_normal());
        let n = g.norm();
        if n > 0.0 {
            return g / n;
        }
    }
}

/// `m` independent uniform unit vectors; κ = r^{-1/2} (τ = 1), D_max = 1.
pub fn make_random_unit(r: usize, m: usize, rng: &mut RngStream) -> Result<DirectionSet> {
    if r == 0 || m == 0 {
        return Err(Error::invalid("random_unit needs r >= 1 and m >= 1"));
    }
    let dirs = (0..m).map(|_| random_unit_vector(r, rng)).collect();
    let family = PollFamily::RandomUnit { m };
    let (claimed_kappa, claimed_dmax) = family.constants(r).unwrap();
    Ok(DirectionSet {
        family,
        dim: r,
        storage: Storage::Dense(dirs),
        claimed_kappa,
        claimed_dmax,
    })
}

/// `{v, -v}` with `v` uniform on the unit sphere.
pub fn make_random_opposite(r: usize, rng: &mut RngStream) -> DirectionSet {
    let v = random_unit_vector(r, rng);
    let (claimed_kappa, claimed_dmax) = PollFamily::RandomOpposite.constants(r).unwrap();
    DirectionSet {
        family: PollFamily::RandomOpposite,
        dim: r,
        storage: Storage::Dense(vec![v.clone(), -v]),
        claimed_kappa,
        claimed_dmax,
    }
}

/// `cm(D, v) = max_d dᵀv / (‖d‖‖v‖)`.
pub fn cosine_measure_at(set: &DirectionSet, v: &DVector<f64>) -> Result<f64> {
    if v.len() != set.dim() {
        return Err(Error::invalid(format!(
            "vector has dimension {} but directions live in R^{}",
            v.len(),
            set.dim()
        )));
    }
    let vn = v.norm();
    if vn == 0.0 {
        return Err(Error::invalid("cosine measure needs a nonzero vector"));
    }
    let mut best = f64::NEG_INFINITY;
    for d in set.iter() {
        let dn = d.norm();
        if dn == 0.0 {
            return Err(Error::invalid("direction set contains a zero vector"));
        }
        best = best.max(d.dot(v) / (dn * vn));
    }
    Ok(best)
}

/// Sampled estimate of `cm(D) = min_v cm(D, v)`: the minimum over `samples`
/// uniform unit vectors. It can only overestimate the true value.
pub fn cosine_measure_estimate(set: &DirectionSet, samples: usize, rng: &mut RngStream) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let mut est = f64::INFINITY;
    for _ in 0..samples {
        let v = random_unit_vector(set.dim(), rng);
        est = est.min(cosine_measure_at(set, &v)?);
    }
    Ok(est)
}

/// `(κ, D_max)`-descent test against a sketched gradient `P∇f(x)`: checks
/// `cm(D, -P∇f(x)) ≥ κ` and the norm band.
pub fn is_descent_set(set: &DirectionSet, sketched_grad: &DVector<f64>, kappa: f64, dmax: f64) -> Result<bool> {
    if sketched_grad.iter().all(|&g| g == 0.0) {
        return Err(Error::invalid("descent test needs a nonzero sketched gradient"));
    }
    let cm = cosine_measure_at(set, &(-sketched_grad))?;
    Ok(cm >= kappa && set.within_norm_band(dmax))
}

/// `1 - (1/2 + τ/√(2π))^m`.
pub fn random_unit_success_bound(m: usize, tau: f64) -> f64 {
    1.0 - (0.5 + tau / (2.0 * PI).sqrt()).powi(m as i32)
}

/// Monte-Carlo frequency of `cm(D, v) ≥ τ/√r` over fresh random-unit sets,
/// with `v = e_1` (any fixed unit vector works by rotational invariance).
pub fn estimate_descent_probability(
    family: PollFamily,
    r: usize,
    tau: f64,
    trials: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    let PollFamily::RandomUnit { m } = family else {
        return Err(Error::UnsupportedFamily(family.to_string()));
    };
    if trials == 0 || r == 0 {
        return Err(Error::invalid("need r >= 1 and at least one trial"));
    }
    let threshold = tau / (r as f64).sqrt();
    let mut v = DVector::zeros(r);
    v[0] = 1.0;
    let mut hits = 0usize;
    for _ in 0..trials {
        let set = make_random_unit(r, m, rng)?;
        if cosine_measure_at(&set, &v)? >= threshold {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}
