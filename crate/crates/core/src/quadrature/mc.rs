//! Seeded Monte Carlo for singular double integrals
//! `int int F(x, y) |x-y|^(-d-sigma) dx dy` where `F` vanishes unless `x` or
//! `y` lies in a bounded region `S`.
//!
//! Writing `y = x + h`, the integral equals
//! `int_{x in S} int_h [F(x, x+h) + 1{x+h not in S} F(x+h, x)] |h|^(-d-sigma)`,
//! so only base points in `S` are sampled. Base points follow a density
//! `~ |x_k|^a` near the singular set, and `h` follows a radial mixture: a
//! power law matching the diagonal singularity on `[0, H]`, log-uniform on
//! `[H, L]` and a Pareto tail beyond `L`.
//!
//! The sample budget is split into a fixed number of chunks, each with its
//! own ChaCha stream, so results do not depend on thread scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::special_fns::sphere_surface;
use crate::Estimate;

/// Number of independent RNG streams per estimate.
pub const CHUNKS: u64 = 64;

/// Largest dimension the Monte Carlo engine accepts.
pub const MAX_DIM: usize = 4;

/// How pairs with only the second point in `S` are folded back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SwapRule {
    /// `F` vanishes unless `x` or `y` is in `S`: use `(y, x)`.
    All,
    /// `F` vanishes unless `x' in S'` and (`x_k` or `y_k` in `S_k`): exchange
    /// only the first `k` coordinates.
    KPart,
    /// `F` vanishes unless `x_k in S_k` and (`x'` or `y'` in `S'`): exchange
    /// only the transverse coordinates.
    TransversePart,
}

/// Geometry and exponents of one Monte Carlo problem.
#[derive(Debug, Clone)]
pub(crate) struct McDesign {
    pub d: usize,
    pub k: usize,
    /// Kernel order `sigma` in `|h|^(-d-sigma)`.
    pub sigma: f64,
    /// `F(x, x+h) ~ |h|^diff_power` for small `h`.
    pub diff_power: f64,
    /// Most negative and most positive weight exponents in `|x_k|, |y_k|`.
    pub weight_lo: f64,
    pub weight_hi: f64,
    /// Bounding box of `S`.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub swap: SwapRule,
}

/// Joint estimate of several integrals from common samples.
#[derive(Debug, Clone, PartialEq)]
pub struct McOutput {
    pub means: Vec<f64>,
    /// Covariance of the means, row-major.
    pub cov: Vec<f64>,
    pub samples: u64,
}

impl McOutput {
    pub fn estimate(&self, i: usize) -> Estimate {
        let n = self.means.len();
        Estimate { value: self.means[i], std_error: self.cov[i * n + i].max(0.0).sqrt(), samples_used: self.samples }
    }

    /// `sum c_i I_i` with its standard error.
    pub fn combination(&self, coeffs: &[f64]) -> Estimate {
        let n = self.means.len();
        let value = coeffs.iter().zip(&self.means).map(|(c, m)| c * m).sum();
        let mut var = 0.0;
        for i in 0..n {
            for j in 0..n {
                var += coeffs[i] * coeffs[j] * self.cov[i * n + j];
            }
        }
        Estimate { value, std_error: var.max(0.0).sqrt(), samples_used: self.samples }
    }
}

/// Running mean and co-moment matrix (Welford / Chan).
#[derive(Clone)]
struct Moments {
    n: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(terms: usize) -> Self {
        Self { n: 0, mean: vec![0.0; terms], m2: vec![0.0; terms * terms] }
    }

    fn push(&mut self, x: &[f64], delta: &mut [f64]) {
        let t = self.mean.len();
        self.n += 1;
        let nf = self.n as f64;
        for i in 0..t {
            delta[i] = x[i] - self.mean[i];
            self.mean[i] += delta[i] / nf;
        }
        for i in 0..t {
            let after = x[i] - self.mean[i];
            for j in 0..t {
                self.m2[i * t + j] += delta[j] * after;
            }
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        let t = self.mean.len();
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta: Vec<f64> = (0..t).map(|i| other.mean[i] - self.mean[i]).collect();
        for i in 0..t {
            for j in 0..t {
                self.m2[i * t + j] += other.m2[i * t + j] + delta[i] * delta[j] * na * nb / n;
            }
        }
        for i in 0..t {
            self.mean[i] += delta[i] * nb / n;
        }
        self.n += other.n;
    }
}

/// Radial mixture proposal for `|h|`.
#[derive(Debug, Clone, Copy)]
struct OffsetProposal {
    d: usize,
    e: f64,
    h: f64,
    l: f64,
    tau: f64,
    w_pow: f64,
    w_log: f64,
    surface: f64,
}

impl OffsetProposal {
    fn density(&self, rho: f64) -> f64 {
        let g = if rho <= self.h {
            self.w_pow * (self.e + 1.0) * rho.powf(self.e) / self.h.powf(self.e + 1.0)
        } else if rho <= self.l && self.w_log > 0.0 {
            self.w_log / (rho * (self.l / self.h).ln())
        } else if rho > self.l {
            (1.0 - self.w_pow - self.w_log) * self.tau * self.l.powf(self.tau) * rho.powf(-self.tau - 1.0)
        } else {
            0.0
        };
        g / (self.surface * rho.powi(self.d as i32 - 1))
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let c: f64 = rng.gen();
        let u: f64 = 1.0 - rng.gen::<f64>();
        if c < self.w_pow {
            self.h * u.powf(1.0 / (self.e + 1.0))
        } else if c < self.w_pow + self.w_log {
            self.h * (self.l / self.h).powf(u)
        } else {
            self.l * u.powf(-1.0 / self.tau)
        }
    }
}

/// Base point sampler over `S`.
#[derive(Debug, Clone)]
struct BaseSampler {
    k: usize,
    /// `Some(R_k)`: `|x_k|` drawn with density `~ r^(k-1+a)` on the ball of
    /// radius `R_k`; `None`: uniform on the box.
    ball: Option<f64>,
    a: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Density of the uniform part.
    inv_vol: f64,
    ball_norm: f64,
}

impl BaseSampler {
    fn new(k: usize, lo: &[f64], hi: &[f64], a: f64) -> Self {
        let d = lo.len();
        let away = (0..k).any(|i| lo[i] > 0.0 || hi[i] < 0.0);
        if away {
            let vol: f64 = (0..d).map(|i| hi[i] - lo[i]).product();
            return Self {
                k,
                ball: None,
                a: 0.0,
                lo: lo.to_vec(),
                hi: hi.to_vec(),
                inv_vol: 1.0 / vol,
                ball_norm: 0.0,
            };
        }
        let rk = (0..k).map(|i| lo[i].abs().max(hi[i].abs()).powi(2)).sum::<f64>().sqrt();
        let vol_t: f64 = (k..d).map(|i| hi[i] - lo[i]).product();
        let kf = k as f64;
        let ball_norm = (kf + a) / (rk.powf(kf + a) * sphere_surface::<f64>(k - 1));
        Self { k, ball: Some(rk), a, lo: lo.to_vec(), hi: hi.to_vec(), inv_vol: 1.0 / vol_t, ball_norm }
    }

    /// Draws into `x` and returns the density.
    fn sample<R: Rng>(&self, rng: &mut R, x: &mut [f64]) -> f64 {
        let d = x.len();
        match self.ball {
            None => {
                for i in 0..d {
                    x[i] = self.lo[i] + (self.hi[i] - self.lo[i]) * rng.gen::<f64>();
                }
                self.inv_vol
            }
            Some(rk) => {
                let k = self.k;
                let kf = k as f64;
                let u: f64 = 1.0 - rng.gen::<f64>();
                let r = rk * u.powf(1.0 / (kf + self.a));
                unit_vector(rng, &mut x[..k]);
                for v in x[..k].iter_mut() {
                    *v *= r;
                }
                for i in k..d {
                    x[i] = self.lo[i] + (self.hi[i] - self.lo[i]) * rng.gen::<f64>();
                }
                self.ball_norm * r.powf(self.a) * self.inv_vol
            }
        }
    }

    fn contains_k(&self, y: &[f64]) -> bool {
        match self.ball {
            None => (0..self.k).all(|i| y[i] >= self.lo[i] && y[i] <= self.hi[i]),
            Some(rk) => y[..self.k].iter().map(|v| v * v).sum::<f64>() <= rk * rk,
        }
    }

    fn contains_transverse(&self, y: &[f64]) -> bool {
        (self.k..y.len()).all(|i| y[i] >= self.lo[i] && y[i] <= self.hi[i])
    }
}

fn unit_vector<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            s += *v * *v;
        }
        if s > 1e-300 {
            let inv = 1.0 / s.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// Estimates `int int F_j(x, y) |x-y|^(-d-sigma) dx dy` for every term `j`
/// of `integrand`, which writes `F_j(x, y)` into its output slice.
pub(crate) fn mc_double_integral<F>(
    design: &McDesign,
    terms: usize,
    integrand: F,
    spec: &QuadratureSpec,
) -> Result<McOutput>
where
    F: Fn(&[f64], &[f64], &mut [f64]) + Sync,
{
    spec.validate()?;
    let d = design.d;
    let k = design.k;
    if d > MAX_DIM {
        return Err(Error::domain(format!("the Monte Carlo engine supports d <= {MAX_DIM}")));
    }
    if design.lo.len() != d || design.hi.len() != d || (0..d).any(|i| !(design.hi[i] > design.lo[i])) {
        return Err(Error::domain("Monte Carlo region must be a nondegenerate box"));
    }
    let a = design.weight_lo.min(0.0);
    if !(a > -(k as f64)) {
        return Err(Error::non_integrable("weight exponent must exceed -k"));
    }
    let e = match spec.proposal_exponent {
        Some(pe) => pe + d as f64 - 1.0,
        None => design.diff_power - design.sigma - 1.0,
    };
    if !(e > -1.0) {
        return Err(Error::domain(format!("proposal exponent {e} must exceed -1 radially")));
    }
    let tau = 0.5 * (design.sigma - design.weight_hi.max(0.0));
    if !(tau > 0.0) {
        return Err(Error::non_integrable("weights too large for the kernel tail"));
    }
    let base = BaseSampler::new(k, &design.lo, &design.hi, a);
    let extents: Vec<f64> = match base.ball {
        Some(rk) => (0..k).map(|_| 2.0 * rk).chain((k..d).map(|i| design.hi[i] - design.lo[i])).collect(),
        None => (0..d).map(|i| design.hi[i] - design.lo[i]).collect(),
    };
    let min_ext = extents.iter().cloned().fold(f64::INFINITY, f64::min);
    let diam = extents.iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = 2.0 * min_ext;
    let l = 2.0 * diam;
    let (w_pow, w_log) = if l > h { (0.6, 0.3) } else { (0.8, 0.0) };
    let l = l.max(h);
    let proposal = OffsetProposal { d, e, h, l, tau, w_pow, w_log, surface: sphere_surface::<f64>(d - 1) };
    let kernel_expo = -(d as f64) - design.sigma;

    let n = spec.samples;
    let chunks: Vec<Moments> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let count = n / CHUNKS + u64::from(c < n % CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(c);
            let mut mom = Moments::new(terms);
            let mut x = vec![0.0; d];
            let mut y = vec![0.0; d];
            let mut dir = vec![0.0; d];
            let mut sx = vec![0.0; d];
            let mut sy = vec![0.0; d];
            let mut v1 = vec![0.0; terms];
            let mut v2 = vec![0.0; terms];
            let mut delta = vec![0.0; terms];
            for _ in 0..count {
                let qb = base.sample(&mut rng, &mut x);
                let rho = proposal.sample(&mut rng);
                unit_vector(&mut rng, &mut dir);
                for i in 0..d {
                    y[i] = x[i] + rho * dir[i];
                }
                let qh = proposal.density(rho);
                let scale = rho.powf(kernel_expo) / (qb * qh);
                integrand(&x, &y, &mut v1);
                let swapped = match design.swap {
                    SwapRule::All => {
                        if base.contains_k(&y) && base.contains_transverse(&y) {
                            false
                        } else {
                            sx.copy_from_slice(&y);
                            sy.copy_from_slice(&x);
                            true
                        }
                    }
                    SwapRule::KPart => {
                        if base.contains_k(&y) {
                            false
                        } else {
                            sx[..k].copy_from_slice(&y[..k]);
                            sx[k..].copy_from_slice(&x[k..]);
                            sy[..k].copy_from_slice(&x[..k]);
                            sy[k..].copy_from_slice(&y[k..]);
                            true
                        }
                    }
                    SwapRule::TransversePart => {
                        if base.contains_transverse(&y) {
                            false
                        } else {
                            sx[..k].copy_from_slice(&x[..k]);
                            sx[k..].copy_from_slice(&y[k..]);
                            sy[..k].copy_from_slice(&y[..k]);
                            sy[k..].copy_from_slice(&x[k..]);
                            true
                        }
                    }
                };
                if swapped {
                    integrand(&sx, &sy, &mut v2);
                    for j in 0..terms {
                        v1[j] += v2[j];
                    }
                }
                for v in v1.iter_mut() {
                    *v *= scale;
                    if !v.is_finite() {
                        *v = 0.0;
                    }
                }
                mom.push(&v1, &mut delta);
            }
            mom
        })
        .collect();
    let mut total = Moments::new(terms);
    for c in &chunks {
        total.merge(c);
    }
    let nf = total.n as f64;
    let cov = total.m2.iter().map(|m| if total.n > 1 { m / ((nf - 1.0) * nf) } else { 0.0 }).collect();
    Ok(McOutput { means: total.mean, cov, samples: total.n })
}
