//! The Jacobi family of right-hand sides
//!
//! ```text
//! f = 2^{2s} Γ(s+k+1)²/(k!)² (-1)^k P_k^{(s,0)}(2g - 1),
//! ```
//!
//! its exact solution on the unit disc, and convergence bookkeeping.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::geometry::{DomainGeometry, DomainKind, Point};
use crate::special_fn::{gamma_fn, jacobi_p, FractionalOrder};
use crate::{Error, Real, Result};

/// Choice of `g` in the family.
#[derive(Clone)]
pub enum FamilyG<T> {
    /// `|x|²`; exact solution known on the unit disc.
    RadiusSquared,
    /// `(x₁ + 1.3 (x₂/1.5)²)² + (x₂/1.5)²`, the kite's defining function.
    Kite,
    /// `(4|x|² - 1)/3`.
    AnnulusRadial,
    Custom(Arc<dyn Fn(Point<T>) -> T + Send + Sync>),
}

impl<T: Real> FamilyG<T> {
    pub fn eval(&self, x: Point<T>) -> T {
        let r2 = x[0] * x[0] + x[1] * x[1];
        match self {
            FamilyG::RadiusSquared => r2,
            FamilyG::Kite => {
                let q = x[1] / T::c(1.5);
                let w = x[0] + T::c(1.3) * q * q;
                w * w + q * q
            }
            FamilyG::AnnulusRadial => (T::c(4.0) * r2 - T::one()) / T::c(3.0),
            FamilyG::Custom(g) => g(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyG::RadiusSquared => "radius_squared",
            FamilyG::Kite => "kite",
            FamilyG::AnnulusRadial => "annulus_radial",
            FamilyG::Custom(_) => "custom",
        }
    }
}

impl<T> std::fmt::Debug for FamilyG<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            FamilyG::RadiusSquared => "RadiusSquared",
            FamilyG::Kite => "Kite",
            FamilyG::AnnulusRadial => "AnnulusRadial",
            FamilyG::Custom(_) => "Custom",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone)]
pub struct JacobiFamilySpec<T> {
    pub s: FractionalOrder<T>,
    pub k: usize,
    pub g: FamilyG<T>,
}

impl<T: Real> JacobiFamilySpec<T> {
    pub fn new(s: FractionalOrder<T>, k: usize, g: FamilyG<T>) -> Self {
        Self { s, k, g }
    }

    fn amplitude(&self) -> Result<T> {
        let s = self.s.value();
        let gk = gamma_fn(s + T::n(self.k) + T::one())?;
        let kf = gamma_fn(T::n(self.k) + T::one())?;
        let sign = if self.k % 2 == 0 { T::one() } else { -T::one() };
        Ok(sign * T::c(2.0).powf(T::c(2.0) * s) * (gk / kf).powi(2))
    }
}

/// The closed-form right-hand side.
pub fn family_rhs<T: Real>(spec: &JacobiFamilySpec<T>) -> Result<impl Fn(Point<T>) -> T + Send + Sync + Clone> {
    let amp = spec.amplitude()?;
    let (k, s, g) = (spec.k, spec.s.value(), spec.g.clone());
    // validates the Jacobi parameters once
    jacobi_p(k, s, T::zero(), T::zero())?;
    Ok(move |x: Point<T>| amp * jacobi_p(k, s, T::zero(), T::c(2.0) * g.eval(x) - T::one()).unwrap_or_else(|_| T::nan()))
}

fn check_unit_disc<T: Real>(spec: &JacobiFamilySpec<T>) -> Result<()> {
    if !matches!(spec.g, FamilyG::RadiusSquared) {
        return Err(Error::InvalidParameter(format!(
            "exact solution needs g = |x|^2 on the unit disc, got g = {}",
            spec.g.name()
        )));
    }
    Ok(())
}

/// `φ = (-1)^k P_k^{(s,0)}(2|x|² - 1)` for `d = 1 - |x|²` on the unit disc.
pub fn disc_exact_phi<T: Real>(spec: &JacobiFamilySpec<T>) -> Result<impl Fn(Point<T>) -> T + Send + Sync + Clone> {
    check_unit_disc(spec)?;
    let (k, s) = (spec.k, spec.s.value());
    let sign = if k % 2 == 0 { T::one() } else { -T::one() };
    Ok(move |x: Point<T>| {
        sign * jacobi_p(k, s, T::zero(), T::c(2.0) * (x[0] * x[0] + x[1] * x[1]) - T::one()).unwrap_or_else(|_| T::nan())
    })
}

/// `u = (-1)^k (1 - |x|²)^s P_k^{(s,0)}(2|x|² - 1)`, zero outside the disc.
pub fn disc_exact_u<T: Real>(spec: &JacobiFamilySpec<T>) -> Result<impl Fn(Point<T>) -> T + Send + Sync + Clone> {
    let phi = disc_exact_phi(spec)?;
    let s = spec.s.value();
    Ok(move |x: Point<T>| {
        let d = T::one() - x[0] * x[0] - x[1] * x[1];
        if d <= T::zero() {
            T::zero()
        } else {
            d.powf(s) * phi(x)
        }
    })
}

/// Whether `domain` is the unit disc with the standard `d`.
pub fn is_unit_disc<T: Real>(domain: &DomainGeometry<T>) -> bool {
    matches!(domain.kind, DomainKind::Disc { radius } if radius == T::one())
}

/// `(ε_∞, ε_rms)`: max error over max reference, and the plain root mean
/// square error.
pub fn error_metrics<T: Real>(u: &[T], u_ref: &[T]) -> Result<(T, T)> {
    if u.len() != u_ref.len() || u.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "error metrics need equal non-empty node sets, got {} and {}",
            u.len(),
            u_ref.len()
        )));
    }
    let ref_max = u_ref.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if ref_max == T::zero() {
        return Err(Error::InvalidParameter("reference solution vanishes at every node".into()));
    }
    let mut emax = T::zero();
    let mut sq = T::zero();
    for (a, b) in u.iter().zip(u_ref) {
        let e = (*a - *b).abs();
        emax = emax.max(e);
        sq += e * e;
    }
    Ok((emax / ref_max, (sq / T::n(u.len())).sqrt()))
}

/// `log(ε₁/ε₂) / log(√(N₂/N₁))`.
pub fn noc<T: Real>(n1: usize, eps1: T, n2: usize, eps2: T) -> T {
    (eps1 / eps2).ln() / (T::n(n2) / T::n(n1)).sqrt().ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow<T> {
    /// Unknown count.
    pub n: usize,
    pub eps_inf: T,
    pub eps_rms: T,
    /// Empty for the first row.
    pub noc: Option<T>,
    pub wall_time: f64,
}

/// Errors per refinement; `N` strictly increasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport<T> {
    pub rows: Vec<ConvergenceRow<T>>,
}

impl<T: Real> ConvergenceReport<T> {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    /// Appends a row, computing noc from the previous one.
    pub fn push(&mut self, n: usize, eps_inf: T, eps_rms: T, wall_time: f64) -> Result<()> {
        let noc = match self.rows.last() {
            Some(prev) if n <= prev.n => {
                return Err(Error::InvalidParameter(format!("N must increase, got {n} after {}", prev.n)));
            }
            Some(prev) => Some(noc(prev.n, prev.eps_inf, n, eps_inf)),
            None => None,
        };
        self.rows.push(ConvergenceRow { n, eps_inf, eps_rms, noc, wall_time });
        Ok(())
    }

    /// `N,eps_inf,eps_rms,noc,time_sec`, 16 significant digits. The errors
    /// are sampled at the solution nodes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,eps_inf,eps_rms,noc,time_sec\n");
        for r in &self.rows {
            let noc = r.noc.map(|v| format!("{:.15e}", v.f64())).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{:.15e},{:.15e},{},{:.15e}",
                r.n,
                r.eps_inf.f64(),
                r.eps_rms.f64(),
                noc,
                r.wall_time
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fl_oracle::{frac_lap_radial_2d, OracleConfig, RadialSupport};
    use proptest::prelude::*;

    fn fo(s: f64) -> FractionalOrder<f64> {
        FractionalOrder::new(s).unwrap()
    }

    #[test]
    fn k0_half_is_pi_over_two() {
        let f = family_rhs(&JacobiFamilySpec::new(fo(0.5), 0, FamilyG::RadiusSquared)).unwrap();
        assert!((f([0.3, 0.1]) - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn k1_center_value() {
        for s in [0.25, 0.6] {
            let f = family_rhs(&JacobiFamilySpec::new(fo(s), 1, FamilyG::RadiusSquared)).unwrap();
            let g = gamma_fn(s + 2.0).unwrap();
            // P₁^{(s,0)}(-1) = -1
            let e = (4f64).powf(s) * g * g;
            assert!((f([0.0, 0.0]) - e).abs() < 1e-13 * e);
        }
    }

    #[test]
    fn exact_u_vanishes_on_circle_and_needs_disc() {
        let spec = JacobiFamilySpec::new(fo(0.5), 2, FamilyG::RadiusSquared);
        let u = disc_exact_u(&spec).unwrap();
        assert_eq!(u([0.6, 0.8]), 0.0);
        assert_eq!(u([1.0, 1.0]), 0.0);
        let k0 = disc_exact_u(&JacobiFamilySpec::new(fo(0.3), 0, FamilyG::RadiusSquared)).unwrap();
        assert!((k0([0.3, 0.4]) - 0.75f64.powf(0.3)).abs() < 1e-15);
        assert!(disc_exact_u(&JacobiFamilySpec::new(fo(0.5), 2, FamilyG::Kite)).is_err());
    }

    #[test]
    fn oracle_matches_family_on_disc() {
        let cfg = OracleConfig::default();
        for (s, k) in [(0.5, 2), (0.75, 1), (0.3, 3)] {
            let spec = JacobiFamilySpec::new(fo(s), k, FamilyG::RadiusSquared);
            let u = disc_exact_u(&spec).unwrap();
            let f = family_rhs(&spec).unwrap();
            let ur = |r: f64| u([r, 0.0]);
            for i in 0..10 {
                let r = 0.05 + 0.09 * i as f64;
                let v = frac_lap_radial_2d(&ur, RadialSupport::Disc { radius: 1.0 }, r, fo(s), &cfg).unwrap();
                let e = f([r, 0.0]);
                assert!((v - e).abs() < 1e-6 * e.abs().max(1.0), "s={s} k={k} r={r}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn metrics_and_noc() {
        assert_eq!(error_metrics(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), (0.0, 0.0));
        assert!(error_metrics(&[1.0], &[0.0]).is_err());
        assert!((noc(100, 2e-3, 400, 1e-3) - 1.0f64).abs() < 1e-15);
        // two consecutive rows of a published disc convergence table
        assert!((noc(96, 2.70e-1, 145, 2.00e-2) - 12.6f64).abs() < 0.05);
        let mut rep = ConvergenceReport::new();
        rep.push(96, 2.70e-1, 1e-2, 0.1).unwrap();
        rep.push(145, 2.00e-2, 1e-3, 0.2).unwrap();
        assert!(rep.push(145, 1e-3, 1e-4, 0.3).is_err());
        let csv = rep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,eps_inf,eps_rms,noc,time_sec");
        assert_eq!(lines[1].split(',').nth(3), Some(""));
        assert!(lines[2].starts_with("145,2.000000000000000e-2,"));
    }

    proptest! {
        #[test]
        fn metrics_scale(c in 0.1f64..10.0, v in proptest::collection::vec(-1.0f64..1.0, 2..20)) {
            let r: Vec<f64> = v.iter().map(|x| x + 1.5).collect();
            let u: Vec<f64> = v.iter().map(|x| x + 1.5 + 1e-3 * x).collect();
            let (a1, b1) = error_metrics(&u, &r).unwrap();
            let us: Vec<f64> = u.iter().map(|x| c * x).collect();
            let rs: Vec<f64> = r.iter().map(|x| c * x).collect();
            let (a2, b2) = error_metrics(&us, &rs).unwrap();
            // u - r is ~1e-3 |r|, so scaling costs about 12 digits of it
            prop_assert!((a1 - a2).abs() <= 1e-9 * a1.max(1e-300));
            prop_assert!((b2 - c * b1).abs() <= 1e-9 * b2.max(1e-300));
        }

        #[test]
        fn noc_antisymmetric(n1 in 10usize..1000, m in 2usize..10, e1 in 1e-12f64..1.0, e2 in 1e-12f64..1.0) {
            let n2 = n1 * m;
            let a: f64 = noc(n1, e1, n2, e2);
            let b: f64 = noc(n1, e2, n2, e1);
            prop_assert!((a + b).abs() < 1e-9 * a.abs().max(1.0));
        }
    }
}
