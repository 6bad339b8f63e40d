//! Analytical solution of Mandel's problem as a Fourier-type series.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{MandelError, MandelParams};

/// First `count` positive roots of `tan α = ratio · α`, one in each interval
/// (nπ, nπ + π/2).
///
/// The function is bisected in the form `sin α − ratio·α·cos α`, which has
/// no poles. Bisection stops once the bracket is narrower than
/// `tol · α` (or cannot shrink further in floating point).
pub fn find_series_roots(ratio: f64, count: usize, tol: f64) -> Result<Vec<f64>, MandelError> {
    if !(ratio > 1.0 && ratio.is_finite()) {
        return Err(MandelError::BadRatio(ratio));
    }
    let f = |a: f64| a.sin() - ratio * a * a.cos();
    let mut roots = Vec::with_capacity(count);
    for n in 0..count {
        let mut lo = n as f64 * PI;
        let mut hi = lo + FRAC_PI_2;
        // f < 0 just right of nπ for even n, > 0 for odd n; the sign flips
        // before (n + ½)π
        let lo_sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        if f(hi) * lo_sign >= 0.0 || (n > 0 && f(lo) * lo_sign <= 0.0) {
            return Err(MandelError::Bracket { index: n });
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= tol * lo.max(f64::MIN_POSITIVE) {
                break;
            }
            if f(mid) * lo_sign > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    Ok(roots)
}

/// Precomputed roots and coefficients for a parameter set.
#[derive(Debug, Clone)]
pub struct MandelSeries {
    params: MandelParams,
    roots: Vec<f64>,
}

impl MandelSeries {
    pub fn new(params: &MandelParams) -> Result<Self, MandelError> {
        params.validate()?;
        let m = &params.material;
        let nu = m.poisson_ratio;
        let nu_u = m.undrained_poisson_ratio();
        let ratio = (1.0 - nu) / (nu_u - nu);
        let roots = find_series_roots(ratio, params.series_terms, params.root_tol)?;
        Ok(Self { params: params.clone(), roots })
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    fn decay(&self, alpha: f64, t: f64) -> f64 {
        let a = self.params.a;
        (-alpha * alpha * self.params.material.diffusivity() * t / (a * a)).exp()
    }

    /// Pore pressure at abscissa `x` and time `t` (independent of y).
    pub fn pressure(&self, x: f64, t: f64) -> f64 {
        let a = self.params.a;
        let p0 = self.params.initial_pressure();
        let sum: f64 = self
            .roots
            .iter()
            .map(|&al| {
                let (s, c) = al.sin_cos();
                s / (al - s * c) * ((al * (x / a)).cos() - c) * self.decay(al, t)
            })
            .sum();
        2.0 * p0 * sum
    }

    /// Displacement at `(x, y)` and time `t`.
    pub fn displacement(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        let MandelParams { a, force: f, .. } = self.params;
        let m = &self.params.material;
        let g = m.shear_modulus();
        let nu = m.poisson_ratio;
        let nu_u = m.undrained_poisson_ratio();
        let (mut s1, mut s2) = (0.0, 0.0);
        for &al in &self.roots {
            let (s, c) = al.sin_cos();
            let e = self.decay(al, t);
            let den = al - s * c;
            s1 += s * c / den * e;
            s2 += c / den * (al * (x / a)).sin() * e;
        }
        let ux = (f * nu / (2.0 * g * a) - f * nu_u / (g * a) * s1) * x + f / g * s2;
        let uy = (-f * (1.0 - nu) / (2.0 * g * a) + f * (1.0 - nu_u) / (g * a) * s1) * y;
        [ux, uy]
    }

    /// Vertical displacement of the rigid plate at y = b.
    pub fn plate_displacement(&self, t: f64) -> f64 {
        self.displacement(0.0, self.params.b, t)[1]
    }
}
