//! Angular reduction for radial integrands when `k = d`.
//!
//! For `G(|x|, |y|)`,
//!
//! ```text
//! int int G(|x|,|y|) |x-y|^(-d-sigma) dx dy
//!   = |S^(d-1)| int_0^1 Phi_{d,sigma}(t) t^(d-1)
//!       int_0^inf [G(r, rt) + G(rt, r)] r^(d-1-sigma) dr dt,
//! ```
//!
//! which is evaluated as a nested pair of adaptive 1-D quadratures with a
//! mesh graded geometrically toward the diagonal `t = 1`.

use crate::error::{Error, Result};
use crate::quadrature::adaptive::{integrate_1d, integrate_1d_with, AdaptiveOptions, Endpoints};
use crate::special_fns::{phi_from_gap, sphere_surface};
use crate::Estimate;

/// Segments whose end ratio exceeds this are integrated in `ln r`.
const LOG_SPLIT_RATIO: f64 = 10.0;

/// Panel budget of one inner segment. Near `t = 1` the differences
/// `G(r, rt)` are dominated by roundoff and cannot meet a relative tolerance.
const INNER_MAX_INTERVALS: usize = 60;

/// Integrates `f` over `[pts[0], pts[last]]` segment by segment. The first
/// segment receives the endpoint exponent `left` when it starts at 0; long
/// segments away from 0 use the substitution `r = e^s`.
pub(crate) fn integrate_segments<G: Fn(f64) -> f64>(
    f: &G,
    pts: &[f64],
    left: Option<f64>,
    opts: &AdaptiveOptions<f64>,
) -> Result<Estimate> {
    let mut acc = Estimate::exact(0.0);
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let est = if a == 0.0 {
            integrate_1d_with(f, a, b, left.map_or(Endpoints::regular(), Endpoints::left), opts)?
        } else if b / a > LOG_SPLIT_RATIO {
            let g = |s: f64| {
                let r = s.exp();
                f(r) * r
            };
            integrate_1d_with(g, a.ln(), b.ln(), Endpoints::regular(), opts)?
        } else {
            integrate_1d_with(f, a, b, Endpoints::regular(), opts)?
        };
        acc = acc.add(&est);
    }
    Ok(acc)
}

/// Sorted, deduplicated breakpoints `lo`, interior points, `hi`.
pub(crate) fn breakpoints(lo: f64, hi: f64, interior: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    pts.extend(interior.into_iter().filter(|v| *v > lo && *v < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
    pts
}

/// A radial double integral in the reduced form above.
pub(crate) struct RadialPair<'a, G> {
    pub d: usize,
    /// Kernel order: `|x-y|^(-d-sigma)`.
    pub sigma: f64,
    /// `G(|x|, |y|)` including weights.
    pub pair: &'a G,
    /// Radii where the underlying profile is not smooth.
    pub kinks: Vec<f64>,
    /// `G(r, rho) = 0` when both radii lie outside `[inner, outer]`.
    pub inner: f64,
    pub outer: f64,
    /// Restrict both radii to `[0, outer]` (truncated families).
    pub truncated: bool,
    /// Endpoint exponent of the `t` integrand at `t = 0`.
    pub t_left: f64,
    /// Endpoint exponent of the `r` integrand at `r = 0`.
    pub r_left: f64,
    /// `G(r, rt) ~ (1-t)^diff_power` near the diagonal.
    pub diff_power: f64,
}

impl<G: Fn(f64, f64) -> f64> RadialPair<'_, G> {
    fn inner_integral(&self, t: f64, tol: f64) -> f64 {
        let hi = if self.truncated { self.outer } else { self.outer / t };
        if !(hi > self.inner) || !hi.is_finite() {
            return 0.0;
        }
        let expo = self.d as f64 - 1.0 - self.sigma;
        let f = |r: f64| {
            let rt = r * t;
            let v = (self.pair)(r, rt) + (self.pair)(rt, r);
            if v == 0.0 {
                0.0
            } else {
                v * r.powf(expo)
            }
        };
        let interior = self.kinks.iter().flat_map(|&k| [k, k / t]);
        let pts = breakpoints(self.inner, hi, interior);
        let left = (self.inner == 0.0).then_some(self.r_left);
        let opts = AdaptiveOptions { max_intervals: INNER_MAX_INTERVALS, ..AdaptiveOptions::relative(tol) };
        integrate_segments(&f, &pts, left, &opts).map(|e| e.value).unwrap_or(f64::NAN)
    }

    pub fn integrate(&self, rel_tol: f64) -> Result<Estimate> {
        if !(self.outer.is_finite() && self.outer > self.inner && self.inner >= 0.0) {
            return Err(Error::domain("radial support must be a finite interval"));
        }
        let right = self.diff_power - 1.0 - self.sigma;
        for (name, e) in [("t = 0", self.t_left), ("r = 0", self.r_left), ("t = 1", right)] {
            if !(e > -1.0) {
                return Err(Error::non_integrable(format!(
                    "radial integrand exponent {e} at {name} is not integrable"
                )));
            }
        }
        let inner_tol = 0.1 * rel_tol;
        let d = self.d;
        let sigma = self.sigma;
        let dm1 = (d - 1) as i32;
        let g = |t: f64| {
            if t <= 0.0 || t >= 1.0 {
                return 0.0;
            }
            let inner = self.inner_integral(t, inner_tol);
            if inner == 0.0 {
                return 0.0;
            }
            phi_from_gap(d, sigma, 1.0 - t) * t.powi(dm1) * inner
        };

        let depth = ((1.0 / rel_tol).log2().ceil() as i32).clamp(4, 50);
        let mut radii: Vec<f64> = self.kinks.clone();
        radii.push(self.outer);
        if self.inner > 0.0 {
            radii.push(self.inner);
        }
        let mut interior: Vec<f64> = (1..=depth).map(|j| 1.0 - 0.5f64.powi(j)).collect();
        for &a in &radii {
            for &b in &radii {
                if a > 0.0 && b > a {
                    interior.push(a / b);
                }
            }
        }
        let pts = breakpoints(0.0, 1.0, interior);
        let mut acc = Estimate::exact(0.0);
        let n = pts.len();
        for (i, w) in pts.windows(2).enumerate() {
            let mut ends = Endpoints::regular();
            if i == 0 {
                ends.left = Some(self.t_left);
            }
            if i + 2 == n {
                ends.right = Some(right);
            }
            acc = acc.add(&integrate_1d(g, w[0], w[1], ends, rel_tol)?);
        }
        if !acc.value.is_finite() {
            return Err(Error::non_integrable("radial quadrature produced a non-finite value"));
        }
        let total = acc.scale(sphere_surface::<f64>(d - 1));
        let bound = total.std_error + inner_tol * total.value.abs();
        Ok(Estimate { std_error: bound, ..total })
    }
}

/// `|S^(d-1)| int f(r) r^(d-1) dr` over the breakpoints `pts`.
pub(crate) fn radial_mass<G: Fn(f64) -> f64>(
    d: usize,
    f: &G,
    pts: &[f64],
    left: Option<f64>,
    rel_tol: f64,
) -> Result<Estimate> {
    let dm1 = (d - 1) as i32;
    let g = |r: f64| {
        let v = f(r);
        if v == 0.0 {
            0.0
        } else {
            v * r.powi(dm1)
        }
    };
    let left = left.map(|e| e + dm1 as f64);
    integrate_segments(&g, pts, left, &AdaptiveOptions::relative(rel_tol))
        .map(|e| e.scale(sphere_surface::<f64>(d - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_segments_handle_wide_ranges() {
        let f = |r: f64| r.powf(-1.5);
        let pts = breakpoints(1.0, 1e12, [10.0]);
        let e = integrate_segments(&f, &pts, None, &AdaptiveOptions::relative(1e-10)).unwrap();
        let exact = 2.0 * (1.0 - 1e-6);
        assert!((e.value / exact - 1.0).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn radial_mass_of_unit_ball() {
        let f = |r: f64| if r < 1.0 { 1.0 } else { 0.0 };
        let e = radial_mass(3, &f, &[0.0, 1.0], None, 1e-12).unwrap();
        assert!((e.value - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }
}
