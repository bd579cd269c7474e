//! Reference values of `(-Δ)^s u` straight from the hypersingular integral
//!
//! ```text
//! (-Δ)^s u(x) = c_{n,s} P.V. ∫ (u(x) - u(y)) / |x - y|^{n+2s} dy
//! ```
//!
//! for `u` vanishing outside a bounded set. The principal value is removed by
//! pairing `y = x ± h` inside a ball of radius `δ` around `x`; the rest of
//! the support is integrated by tanh-sinh and the exterior, where only
//! `u(x)` survives, in closed form.

use crate::quadrature::{jacobi01, tanh_sinh};
use crate::spectral::{cheb1_bary_weights, cheb1_nodes, lagrange_row};
use crate::special_fn::{coeff_c_ns, FractionalOrder};
use crate::{Error, Real, Result};

/// Parameters of the reference evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig<T> {
    /// `δ = subtraction_factor · dist(x, ∂Ω)`.
    pub subtraction_factor: T,
    pub quadrature_tolerance: T,
}

impl<T: Real> Default for OracleConfig<T> {
    fn default() -> Self {
        Self {
            subtraction_factor: T::c(0.1),
            quadrature_tolerance: T::c(1e-12),
        }
    }
}

impl<T: Real> OracleConfig<T> {
    fn validate(&self) -> Result<()> {
        if !(self.subtraction_factor > T::zero() && self.subtraction_factor < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "subtraction factor must lie in (0, 1), got {}",
                self.subtraction_factor
            )));
        }
        if !(self.quadrature_tolerance > T::zero()) {
            return Err(Error::InvalidParameter("oracle tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Integral of `q(h) h^{1-2s}` on `[0, δ]`, where
/// `q(h) = (2u(x) - u(x+h) - u(x-h)) / h²` is even and analytic on the
/// ball. `q` is only sampled at Chebyshev points of `[-δ, δ]`, which stay
/// away from `h = 0` where the second difference loses its digits; the
/// interpolant is then integrated by Gauss–Jacobi. Two sizes are compared
/// against `tol` plus the roundoff level implied by `mag ≥ |u|` near `x`.
/// Returns the value and the roundoff estimate.
fn near_field<T: Real>(
    mut q: impl FnMut(T) -> T,
    delta: T,
    s: T,
    mag: T,
    tol: T,
) -> Result<(T, T)> {
    let p = T::one() - T::c(2.0) * s;
    let scale = delta.powf(p + T::one());
    let rule = jacobi01(24, p, T::zero())?;
    let mut apply = |m: usize| -> (T, T) {
        let nodes = cheb1_nodes(2 * m, -delta, delta);
        let bary = cheb1_bary_weights::<T>(2 * m);
        // nodes are symmetric: sample the positive half only
        let half: Vec<T> = nodes[m..].iter().map(|&h| q(h)).collect();
        let vals: Vec<T> = half.iter().rev().chain(half.iter()).copied().collect();
        let mut row = vec![T::zero(); 2 * m];
        let mut v = T::zero();
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            lagrange_row(&nodes, &bary, delta * t, &mut row);
            v += w * row.iter().zip(&vals).map(|(a, b)| *a * *b).sum::<T>();
        }
        let h_min = nodes[m];
        let noise = T::c(8.0) * T::epsilon() * mag / (h_min * h_min) / (p + T::one());
        (v * scale, noise * scale)
    };
    let (a, _) = apply(10);
    let (b, noise) = apply(16);
    if (a - b).abs() > tol * (T::one() + b.abs()) + T::c(10.0) * noise {
        return Err(Error::QuadratureFailure(format!(
            "near-field rule unresolved: {a:e} vs {b:e}"
        )));
    }
    Ok((b, noise))
}

/// `(-Δ)^s u(x)` for `u` supported in `[a, b]`, `x ∈ (a, b)`.
pub fn frac_lap_direct_1d<T: Real>(
    u: &dyn Fn(T) -> T,
    a: T,
    b: T,
    x: T,
    s: FractionalOrder<T>,
    config: &OracleConfig<T>,
) -> Result<T> {
    config.validate()?;
    if !(x > a && x < b) {
        return Err(Error::InvalidParameter(format!(
            "oracle point {x} outside ({a}, {b})"
        )));
    }
    let sv = s.value();
    let two_s = T::c(2.0) * sv;
    let tol = config.quadrature_tolerance;
    let dist = (x - a).min(b - x);
    let delta = config.subtraction_factor * dist;
    let ux = u(x);
    let mag = ux.abs() + x.abs() * (u(x + delta) - u(x - delta)).abs() / delta;
    let (near, _) = near_field(
        |h| (T::c(2.0) * ux - u(x + h) - u(x - h)) / (h * h),
        delta,
        sv,
        mag,
        tol,
    )?;
    let kern = |r: T| r.powf(-T::one() - two_s);
    let left = tanh_sinh(|y| (ux - u(y)) * kern(x - y), a, x - delta, tol)?;
    let right = tanh_sinh(|y| (ux - u(y)) * kern(y - x), x + delta, b, tol)?;
    let tail = ux * ((b - x).powf(-two_s) + (x - a).powf(-two_s)) / two_s;
    Ok(coeff_c_ns(1, s)? * (near + left + right + tail))
}

/// Support of a radial function in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialSupport<T> {
    Disc { radius: T },
    Annulus { inner: T, outer: T },
}

impl<T: Real> RadialSupport<T> {
    fn outer(&self) -> T {
        match *self {
            RadialSupport::Disc { radius } => radius,
            RadialSupport::Annulus { outer, .. } => outer,
        }
    }

    fn inner(&self) -> Option<T> {
        match *self {
            RadialSupport::Disc { .. } => None,
            RadialSupport::Annulus { inner, .. } => Some(inner),
        }
    }
}

/// `(-Δ)^s u` at radius `r` for a radial `u(x) = U(|x|)` vanishing outside
/// `support`.
///
/// In polar coordinates about `x = (r, 0)` the far field is integrated ray by
/// ray between the crossings of the support boundary, and the angle is split
/// at the directions tangent to the hole.
pub fn frac_lap_radial_2d<T: Real>(
    u_radial: &dyn Fn(T) -> T,
    support: RadialSupport<T>,
    r: T,
    s: FractionalOrder<T>,
    config: &OracleConfig<T>,
) -> Result<T> {
    config.validate()?;
    let big_r = support.outer();
    let hole = support.inner();
    if let Some(r1) = hole {
        if !(r1 > T::zero() && r1 < big_r) {
            return Err(Error::InvalidParameter("annulus radii out of order".into()));
        }
    }
    let lo = hole.unwrap_or(T::zero());
    let inside = r < big_r && (r > lo || (hole.is_none() && r >= T::zero()));
    if !inside {
        return Err(Error::InvalidParameter(format!(
            "oracle radius {r} outside the support"
        )));
    }
    let sv = s.value();
    let two_s = T::c(2.0) * sv;
    let tol = config.quadrature_tolerance;
    let dist = match hole {
        Some(r1) => (big_r - r).min(r - r1),
        None => big_r - r,
    };
    let delta = config.subtraction_factor * dist;
    let ux = u_radial(r);
    let pi = T::PI();
    let radius_at = |rho: T, ca: T| (r * r + T::c(2.0) * r * rho * ca + rho * rho).max(T::zero()).sqrt();

    // near field: ∫_0^π ∫_0^δ (2u(x) - u(x+ρe) - u(x-ρe)) ρ^{-1-2s} dρ dα
    let mag = ux.abs() + r * (u_radial(r + delta) - u_radial((r - delta).abs())).abs() / delta;
    let angular = |n_alpha: usize| -> Result<(T, T)> {
        let mut acc = T::zero();
        let mut noise = T::zero();
        for k in 0..n_alpha {
            let alpha = pi * (T::n(k) + T::c(0.5)) / T::n(n_alpha);
            let ca = alpha.cos();
            let (v, e) = near_field(
                |h| {
                    (T::c(2.0) * ux - u_radial(radius_at(h, ca)) - u_radial(radius_at(-h, ca)))
                        / (h * h)
                },
                delta,
                sv,
                mag,
                tol,
            )?;
            acc += v;
            noise += e;
        }
        let w = pi / T::n(n_alpha);
        Ok((acc * w, noise * w))
    };
    let (near_coarse, _) = angular(48)?;
    let (near, noise) = angular(96)?;
    if (near - near_coarse).abs() > tol * (T::one() + near.abs()) + T::c(10.0) * noise {
        return Err(Error::QuadratureFailure(format!(
            "angular near-field rule unresolved: {near_coarse:e} vs {near:e}"
        )));
    }

    // far field: u(x) 2π δ^{-2s}/(2s) - ∫_0^{2π} ∫_δ^∞ u(x+ρe) ρ^{-1-2s} dρ dα,
    // symmetric in α ↦ -α
    let ray = |alpha: T| -> Result<T> {
        let (sa, ca) = alpha.sin_cos();
        let b = r * ca;
        let out = -b + (big_r * big_r - r * r * sa * sa).max(T::zero()).sqrt();
        let mut pieces = Vec::with_capacity(2);
        match hole {
            Some(r1) if (r * sa).abs() < r1 && ca < T::zero() => {
                let root = (r1 * r1 - r * r * sa * sa).max(T::zero()).sqrt();
                pieces.push((delta, -b - root));
                pieces.push((-b + root, out));
            }
            _ => pieces.push((delta, out)),
        }
        let mut acc = T::zero();
        for (p0, p1) in pieces {
            if p1 > p0 {
                acc += tanh_sinh(
                    |rho| u_radial(radius_at(rho, ca)) * rho.powf(-T::one() - two_s),
                    p0,
                    p1,
                    tol,
                )?;
            }
        }
        Ok(acc)
    };
    let mut breaks = vec![T::zero()];
    if let Some(r1) = hole {
        breaks.push(pi - (r1 / r).asin());
    }
    breaks.push(pi);
    let mut far = T::zero();
    for w in breaks.windows(2) {
        let mut err = None;
        let v = tanh_sinh(
            |alpha| match ray(alpha) {
                Ok(v) => v,
                Err(e) => {
                    err.get_or_insert(e);
                    T::zero()
                }
            },
            w[0],
            w[1],
            tol,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        far += T::c(2.0) * v;
    }
    let total = near + ux * T::TAU() * delta.powf(-two_s) / two_s - far;
    Ok(coeff_c_ns(2, s)? * total)
}
