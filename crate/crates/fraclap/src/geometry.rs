//! Intervals and smooth 2D domains.
//!
//! Every 2D domain carries a reference map on `[0, 2π) × [ρ_lo, ρ_hi]`
//! built from polar coordinates `p = ρ e_θ`: `y = R p` on a disc of
//! radius `R`, `y = p` on the annulus (`ρ = r`), and on the kite the
//! polynomial map `y = (p₁ - 1.3 p₂², 1.5 p₂)`, which carries the unit
//! disc onto the kite with constant Jacobian 1.5. Walls are the lines
//! `ρ = ρ_hi` and, for the annulus, `ρ = ρ_lo`; `d` factors as the wall
//! distances times a smooth positive remainder.

use crate::spectral::{cheb1_bary_weights, cheb1_nodes, fejer1_weights, lagrange_row, periodic_nodes, trig_row};
use crate::quadrature::jacobi01;
use crate::{Error, Real, Result};

/// Interval `(a, b)` with `d(y) = (y - a)(b - y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval1D<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> Interval1D<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if a < b && a.is_finite() && b.is_finite() {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidParameter(format!("empty interval ({a}, {b})")))
        }
    }

    #[inline]
    pub fn d(&self, y: T) -> T {
        (y - self.a) * (self.b - y)
    }

    #[inline]
    pub fn contains(&self, y: T) -> bool {
        y > self.a && y < self.b
    }
}

pub type Point<T> = [T; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Outer,
    Hole,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape<T> {
    /// Centered circle; `clockwise` for holes.
    Circle { radius: T, clockwise: bool },
    Kite,
}

/// A smooth closed curve parametrized on `[0, 2π)`. Outer curves run
/// counterclockwise and holes clockwise, so `(x₂', -x₁')/|x'|` is the
/// normal pointing out of the domain on every component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCurve<T> {
    shape: Shape<T>,
    pub orientation: Orientation,
}

impl<T: Real> BoundaryCurve<T> {
    pub fn period(&self) -> T {
        T::TAU()
    }

    pub fn position(&self, t: T) -> Point<T> {
        match self.shape {
            Shape::Circle { radius, clockwise } => {
                let sg = if clockwise { -T::one() } else { T::one() };
                [radius * t.cos(), sg * radius * t.sin()]
            }
            Shape::Kite => kite::x(t),
        }
    }

    pub fn derivative(&self, t: T) -> Point<T> {
        match self.shape {
            Shape::Circle { radius, clockwise } => {
                let sg = if clockwise { -T::one() } else { T::one() };
                [-radius * t.sin(), sg * radius * t.cos()]
            }
            Shape::Kite => kite::dx(t),
        }
    }

    pub fn second_derivative(&self, t: T) -> Point<T> {
        match self.shape {
            Shape::Circle { radius, clockwise } => {
                let sg = if clockwise { -T::one() } else { T::one() };
                [-radius * t.cos(), -sg * radius * t.sin()]
            }
            Shape::Kite => kite::ddx(t),
        }
    }

    pub fn speed(&self, t: T) -> T {
        let d = self.derivative(t);
        d[0].hypot(d[1])
    }

    /// Unit normal pointing out of the domain.
    pub fn normal(&self, t: T) -> Point<T> {
        let d = self.derivative(t);
        let sp = d[0].hypot(d[1]);
        [d[1] / sp, -d[0] / sp]
    }

    /// Signed curvature `(x' × x'')/|x'|³`.
    pub fn curvature(&self, t: T) -> T {
        let d = self.derivative(t);
        let dd = self.second_derivative(t);
        let sp = d[0].hypot(d[1]);
        (d[0] * dd[1] - d[1] * dd[0]) / (sp * sp * sp)
    }
}

/// Nyström node on a boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode<T> {
    pub t: T,
    pub position: Point<T>,
    pub normal: Point<T>,
    pub curvature: T,
    pub speed: T,
}

/// Equispaced nodes `t_j = 2πj/n` with geometric data.
pub fn boundary_nodes<T: Real>(curve: &BoundaryCurve<T>, n: usize) -> Result<Vec<BoundaryNode<T>>> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("boundary node count must be even and positive, got {n}")));
    }
    Ok(periodic_nodes::<T>(n)
        .into_iter()
        .map(|t| BoundaryNode {
            t,
            position: curve.position(t),
            normal: curve.normal(t),
            curvature: curve.curvature(t),
            speed: curve.speed(t),
        })
        .collect())
}

mod kite {
    //! `g(x) = (x₁ + k x₂²)² + m x₂²` with `k = 1.3/1.5²`, `m = 1/1.5²`.
    //! The level set `g = 1` is exactly `X(t) = (cos t - 1.3 sin²t, 1.5 sin t)`,
    //! the image of the unit circle under [`map`].
    use crate::Real;

    pub fn k<T: Real>() -> T {
        T::c(1.3 / 2.25)
    }

    pub fn m<T: Real>() -> T {
        T::c(1.0 / 2.25)
    }

    pub fn g<T: Real>(x: [T; 2]) -> T {
        let w = x[0] + k::<T>() * x[1] * x[1];
        w * w + m::<T>() * x[1] * x[1]
    }

    pub fn grad<T: Real>(x: [T; 2]) -> [T; 2] {
        let two = T::c(2.0);
        let w = x[0] + k::<T>() * x[1] * x[1];
        [two * w, T::c(4.0) * k::<T>() * w * x[1] + two * m::<T>() * x[1]]
    }

    pub fn x<T: Real>(t: T) -> [T; 2] {
        let (c, s) = (t.cos(), t.sin());
        [c - T::c(1.3) * s * s, T::c(1.5) * s]
    }

    pub fn dx<T: Real>(t: T) -> [T; 2] {
        let (c, s) = (t.cos(), t.sin());
        [-s - T::c(2.6) * s * c, T::c(1.5) * c]
    }

    pub fn ddx<T: Real>(t: T) -> [T; 2] {
        [-t.cos() - T::c(2.6) * (t + t).cos(), -T::c(1.5) * t.sin()]
    }

    /// The map `(p₁ - 1.3 p₂², 1.5 p₂)` from the unit disc onto the kite;
    /// `g` of the image is `|p|²`.
    pub fn map<T: Real>(p: [T; 2]) -> [T; 2] {
        [p[0] - T::c(1.3) * p[1] * p[1], T::c(1.5) * p[1]]
    }

    pub fn inverse<T: Real>(y: [T; 2]) -> [T; 2] {
        let q = y[1] / T::c(1.5);
        [y[0] + T::c(1.3) * q * q, q]
    }

    /// `map(p) - map(p0)` from `Δp = p - p0` and `p₂ + p0₂`.
    pub fn map_difference<T: Real>(dp: [T; 2], q_sum: T) -> [T; 2] {
        [dp[0] - T::c(1.3) * q_sum * dp[1], T::c(1.5) * dp[1]]
    }

    /// Jacobian matrix applied to a vector `v` at `p`.
    pub fn push<T: Real>(p: [T; 2], v: [T; 2]) -> [T; 2] {
        [v[0] - T::c(2.6) * p[1] * v[1], T::c(1.5) * v[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind<T> {
    Disc { radius: T },
    Kite,
    Annulus { inner: T, outer: T },
}

/// A smooth bounded domain with its boundary curves and `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainGeometry<T> {
    /// Outer curve first, then holes.
    pub curves: Vec<BoundaryCurve<T>>,
    pub n_h: usize,
    pub kind: DomainKind<T>,
    /// Constant multiplying the closed-form `d`.
    pub d_scale: T,
}

/// Disc of the given radius centered at the origin, `d = R² - |x|²`.
pub fn make_disc<T: Real>(radius: T) -> Result<DomainGeometry<T>> {
    if !(radius > T::zero() && radius.is_finite()) {
        return Err(Error::Geometry(format!("disc radius must be positive, got {radius}")));
    }
    Ok(DomainGeometry {
        curves: vec![BoundaryCurve { shape: Shape::Circle { radius, clockwise: false }, orientation: Orientation::Outer }],
        n_h: 0,
        kind: DomainKind::Disc { radius },
        d_scale: T::one(),
    })
}

/// The kite `g ≤ 1`, `d = 1 - g`.
pub fn make_kite<T: Real>() -> Result<DomainGeometry<T>> {
    Ok(DomainGeometry {
        curves: vec![BoundaryCurve { shape: Shape::Kite, orientation: Orientation::Outer }],
        n_h: 0,
        kind: DomainKind::Kite,
        d_scale: T::one(),
    })
}

/// Annulus `r_inner < |x| < r_outer`, `d = (r_outer² - |x|²)(|x|² - r_inner²)`.
pub fn make_annulus<T: Real>(r_inner: T, r_outer: T) -> Result<DomainGeometry<T>> {
    if !(r_inner > T::zero() && r_inner < r_outer && r_outer.is_finite()) {
        return Err(Error::Geometry(format!("need 0 < r_inner < r_outer, got ({r_inner}, {r_outer})")));
    }
    Ok(DomainGeometry {
        curves: vec![
            BoundaryCurve { shape: Shape::Circle { radius: r_outer, clockwise: false }, orientation: Orientation::Outer },
            BoundaryCurve { shape: Shape::Circle { radius: r_inner, clockwise: true }, orientation: Orientation::Hole },
        ],
        n_h: 1,
        kind: DomainKind::Annulus { inner: r_inner, outer: r_outer },
        d_scale: T::one(),
    })
}

impl<T: Real> DomainGeometry<T> {
    /// Same domain with `d` multiplied by `c > 0`.
    pub fn with_d_scale(mut self, c: T) -> Result<Self> {
        if !(c > T::zero() && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("d scale must be positive, got {c}")));
        }
        self.d_scale = c;
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DomainKind::Disc { .. } => "disc",
            DomainKind::Kite => "kite",
            DomainKind::Annulus { .. } => "annulus",
        }
    }

    pub fn d_eval(&self, x: Point<T>) -> T {
        let r2 = x[0] * x[0] + x[1] * x[1];
        self.d_scale
            * match self.kind {
                DomainKind::Disc { radius } => radius * radius - r2,
                DomainKind::Kite => T::one() - kite::g(x),
                DomainKind::Annulus { inner, outer } => (outer * outer - r2) * (r2 - inner * inner),
            }
    }

    pub fn d_grad(&self, x: Point<T>) -> Point<T> {
        let two = T::c(2.0);
        let r2 = x[0] * x[0] + x[1] * x[1];
        let g = match self.kind {
            DomainKind::Disc { .. } => [-two * x[0], -two * x[1]],
            DomainKind::Kite => {
                let g = kite::grad(x);
                [-g[0], -g[1]]
            }
            DomainKind::Annulus { inner, outer } => {
                let f = two * (outer * outer - r2) - two * (r2 - inner * inner);
                [f * x[0], f * x[1]]
            }
        };
        [self.d_scale * g[0], self.d_scale * g[1]]
    }

    pub fn contains(&self, x: Point<T>) -> bool {
        self.d_eval(x) > T::zero()
    }

    /// Reference range `[ρ_lo, ρ_hi]`.
    pub fn rho_range(&self) -> (T, T) {
        match self.kind {
            DomainKind::Annulus { inner, outer } => (inner, outer),
            _ => (T::zero(), T::one()),
        }
    }

    /// Whether `ρ = ρ_lo` is part of the boundary.
    pub fn lower_wall(&self) -> bool {
        matches!(self.kind, DomainKind::Annulus { .. })
    }

    fn radius(&self) -> T {
        match self.kind {
            DomainKind::Disc { radius } => radius,
            _ => T::one(),
        }
    }

    /// Physical point of reference coordinates `(θ, ρ)`.
    pub fn to_physical(&self, theta: T, rho: T) -> Point<T> {
        let p = [rho * theta.cos(), rho * theta.sin()];
        match self.kind {
            DomainKind::Kite => kite::map(p),
            _ => [self.radius() * p[0], self.radius() * p[1]],
        }
    }

    /// Reference coordinates `(θ, ρ)` of a physical point, θ in `(-π, π]`.
    pub fn to_reference(&self, x: Point<T>) -> (T, T) {
        let p = match self.kind {
            DomainKind::Kite => kite::inverse(x),
            _ => [x[0] / self.radius(), x[1] / self.radius()],
        };
        (p[1].atan2(p[0]), p[0].hypot(p[1]))
    }

    /// `y(θ, ρ) - y(θ₀, ρ₀)` without cancellation for nearby arguments.
    pub fn map_difference(&self, theta: T, rho: T, theta0: T, rho0: T) -> Point<T> {
        let half = T::c(0.5);
        let two = T::c(2.0);
        let sd = (half * (theta - theta0)).sin();
        let (sm, cm) = ((half * (theta + theta0)).sin(), (half * (theta + theta0)).cos());
        // ρ e_θ - ρ₀ e_θ₀ = (ρ - ρ₀) e_θ + ρ₀ (e_θ - e_θ₀)
        let (st, ct) = theta.sin_cos();
        let dr = rho - rho0;
        let dp = [dr * ct - rho0 * two * sm * sd, dr * st + rho0 * two * cm * sd];
        match self.kind {
            DomainKind::Kite => kite::map_difference(dp, rho * st + rho0 * theta0.sin()),
            _ => [self.radius() * dp[0], self.radius() * dp[1]],
        }
    }

    /// Image of a point `p = ρ e_θ` of the reference plane.
    pub fn from_plane(&self, p: Point<T>) -> Point<T> {
        match self.kind {
            DomainKind::Kite => kite::map(p),
            _ => [self.radius() * p[0], self.radius() * p[1]],
        }
    }

    /// `y(p₀ + dp) - y(p₀)` in reference-plane coordinates.
    pub fn plane_difference(&self, p0: Point<T>, dp: Point<T>) -> Point<T> {
        match self.kind {
            DomainKind::Kite => kite::map_difference(dp, T::c(2.0) * p0[1] + dp[1]),
            _ => [self.radius() * dp[0], self.radius() * dp[1]],
        }
    }

    /// Constant `|det ∂y/∂p|`.
    pub fn plane_jacobian(&self) -> T {
        match self.kind {
            DomainKind::Kite => T::c(1.5),
            _ => self.radius() * self.radius(),
        }
    }

    /// `∂y/∂θ`.
    pub fn map_dtheta(&self, theta: T, rho: T) -> Point<T> {
        let (st, ct) = theta.sin_cos();
        let v = [-rho * st, rho * ct];
        match self.kind {
            DomainKind::Kite => kite::push([rho * ct, rho * st], v),
            _ => [self.radius() * v[0], self.radius() * v[1]],
        }
    }

    /// `∂y/∂ρ`.
    pub fn map_drho(&self, theta: T, rho: T) -> Point<T> {
        let (st, ct) = theta.sin_cos();
        match self.kind {
            DomainKind::Kite => kite::push([rho * ct, rho * st], [ct, st]),
            _ => [self.radius() * ct, self.radius() * st],
        }
    }

    /// `|det ∂y/∂(θ, ρ)|`.
    pub fn jacobian(&self, _theta: T, rho: T) -> T {
        match self.kind {
            DomainKind::Kite => T::c(1.5) * rho,
            _ => self.radius() * self.radius() * rho,
        }
    }

    /// Lengths of `∂y/∂θ` and `∂y/∂ρ`.
    pub fn metric(&self, theta: T, rho: T) -> (T, T) {
        let a = self.map_dtheta(theta, rho);
        let b = self.map_drho(theta, rho);
        (a[0].hypot(a[1]), b[0].hypot(b[1]))
    }

    /// Smooth positive factor `h` with `d = (ρ_hi - ρ) [(ρ - ρ_lo)] h`.
    pub fn d_smooth(&self, _theta: T, rho: T) -> T {
        self.d_scale
            * match self.kind {
                DomainKind::Disc { radius } => radius * radius * (T::one() + rho),
                DomainKind::Kite => T::one() + rho,
                DomainKind::Annulus { inner, outer } => (outer + rho) * (rho + inner),
            }
    }

    /// Whether the reference map is odd across the center,
    /// `y(θ + π, ρ) = y(θ, -ρ)`, so grids can use `ρ ∈ (-ρ_hi, ρ_hi)`.
    pub fn has_center(&self) -> bool {
        !self.lower_wall()
    }

    /// `d` in reference coordinates.
    pub fn d_reference(&self, theta: T, rho: T) -> T {
        let (lo, hi) = self.rho_range();
        let mut d = (hi - rho) * self.d_smooth(theta, rho);
        if self.lower_wall() {
            d *= rho - lo;
        }
        d
    }

    /// Reference coordinates of the point `t` on curve `k`.
    pub fn curve_reference(&self, k: usize, t: T) -> (T, T) {
        let (lo, hi) = self.rho_range();
        if k == 0 {
            (t, hi)
        } else {
            (-t, lo)
        }
    }

    /// Winding number of the boundary about `x` (1 inside, 0 outside),
    /// from a polygonal approximation with `n` vertices per curve.
    pub fn winding_number(&self, x: Point<T>, n: usize) -> i64 {
        let mut total = T::zero();
        for c in &self.curves {
            let pts: Vec<Point<T>> = periodic_nodes::<T>(n).into_iter().map(|t| c.position(t)).collect();
            for k in 0..n {
                let a = pts[k];
                let b = pts[(k + 1) % n];
                let (ax, ay) = (a[0] - x[0], a[1] - x[1]);
                let (bx, by) = (b[0] - x[0], b[1] - x[1]);
                total += (ax * by - ay * bx).atan2(ax * bx + ay * by);
            }
        }
        (total / T::TAU()).round().to_i64().unwrap_or(0)
    }
}

/// Tensor grid in reference coordinates: open Chebyshev points in ρ times
/// equispaced angles. Node `(j, i)` (ρ index `j`, θ index `i`) is stored
/// at `j * n_theta + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeGrid<T> {
    pub nodes: Vec<Point<T>>,
    /// `(θ, ρ)` per node.
    pub reference: Vec<(T, T)>,
    /// Smooth quadrature weights including the Jacobian.
    pub weights: Vec<T>,
    pub near_boundary: Vec<bool>,
    pub n_rho: usize,
    pub n_theta: usize,
    pub rho_nodes: Vec<T>,
    pub theta_nodes: Vec<T>,
    /// Radial nodes are the positive half of a Chebyshev grid on
    /// `(-ρ_hi, ρ_hi)`; values at `-ρ` are read from `θ + π`.
    pub parity: bool,
    rho_full: Vec<T>,
    rho_bary: Vec<T>,
}

impl<T: Real> VolumeGrid<T> {
    pub fn new(domain: &DomainGeometry<T>, n_rho: usize, n_theta: usize) -> Result<Self> {
        if n_rho < 2 || n_theta < 2 || n_theta % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "volume grid needs n_rho >= 2 and even n_theta >= 2, got ({n_rho}, {n_theta})"
            )));
        }
        let (lo, hi) = domain.rho_range();
        let parity = domain.has_center();
        let (rho_full, rho_bary, fw) = if parity {
            (cheb1_nodes(2 * n_rho, -hi, hi), cheb1_bary_weights(2 * n_rho), Vec::new())
        } else {
            (cheb1_nodes(n_rho, lo, hi), cheb1_bary_weights(n_rho), fejer1_weights(n_rho, lo, hi))
        };
        let rho_nodes = rho_full[rho_full.len() - n_rho..].to_vec();
        let theta_nodes = periodic_nodes::<T>(n_theta);
        let wt = T::TAU() / T::n(n_theta);
        let band = T::c(0.1) * (hi - lo);
        let mut nodes = Vec::with_capacity(n_rho * n_theta);
        let mut reference = Vec::with_capacity(n_rho * n_theta);
        let mut weights = Vec::with_capacity(n_rho * n_theta);
        let mut near_boundary = Vec::with_capacity(n_rho * n_theta);
        for (j, &rho) in rho_nodes.iter().enumerate() {
            let near = hi - rho < band || (domain.lower_wall() && rho - lo < band);
            for &theta in &theta_nodes {
                let x = domain.to_physical(theta, rho);
                if !domain.contains(x) {
                    return Err(Error::Geometry(format!("grid node ({theta}, {rho}) maps outside the domain")));
                }
                nodes.push(x);
                reference.push((theta, rho));
                weights.push(wt * domain.jacobian(theta, rho) * (if parity { T::one() / rho } else { fw[j] }));
                near_boundary.push(near);
            }
        }
        let mut grid = Self {
            nodes,
            reference,
            weights,
            near_boundary,
            n_rho,
            n_theta,
            rho_nodes,
            theta_nodes,
            parity,
            rho_full,
            rho_bary,
        };
        if parity {
            // ∫₀^ρ_hi ρ (ℓ(ρ) + ℓ(-ρ)) dρ per positive node, Gauss in ρ
            let g = jacobi01::<T>(n_rho + 1, T::one(), T::zero())?;
            let mut rw = vec![T::zero(); n_rho];
            let mut lp = vec![T::zero(); n_rho];
            let mut lm = vec![T::zero(); n_rho];
            for (&t, &w) in g.nodes.iter().zip(&g.weights) {
                grid.rho_rows(t * hi, &mut lp, &mut lm);
                for j in 0..n_rho {
                    rw[j] += w * hi * hi * (lp[j] + lm[j]);
                }
            }
            for (j, &r) in rw.iter().enumerate() {
                for w in &mut grid.weights[j * n_theta..(j + 1) * n_theta] {
                    *w *= r;
                }
            }
        }
        Ok(grid)
    }

    /// Lagrange weights at `ρ` of the positive nodes and of their mirrors.
    fn rho_rows(&self, rho: T, plus: &mut [T], minus: &mut [T]) {
        let n = self.n_rho;
        let mut full = vec![T::zero(); 2 * n];
        lagrange_row(&self.rho_full, &self.rho_bary, rho, &mut full);
        for j in 0..n {
            plus[j] = full[n + j];
            minus[j] = full[n - 1 - j];
        }
    }

    /// `out[node] += ℓ(node at ρ) · m(θ-row)` for the interpolant at radius
    /// `rho` with θ-weights `m` over `theta_nodes`.
    pub fn accumulate(&self, rho: T, m: &[T], out: &mut [T]) {
        let n = self.n_theta;
        if self.parity {
            let mut lp = vec![T::zero(); self.n_rho];
            let mut lm = vec![T::zero(); self.n_rho];
            self.rho_rows(rho, &mut lp, &mut lm);
            let h = n / 2;
            for j in 0..self.n_rho {
                let dst = &mut out[j * n..(j + 1) * n];
                let (a, b) = (lp[j], lm[j]);
                for i in 0..n {
                    dst[i] += a * m[i] + b * m[(i + h) % n];
                }
            }
        } else {
            let mut a = vec![T::zero(); self.n_rho];
            lagrange_row(&self.rho_full, &self.rho_bary, rho, &mut a);
            for (j, &aj) in a.iter().enumerate() {
                for (o, &v) in out[j * n..(j + 1) * n].iter_mut().zip(m) {
                    *o += aj * v;
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Trigonometric interpolation weights in θ.
    pub fn theta_row(&self, theta: T, out: &mut [T]) {
        trig_row(self.n_theta, theta, out);
    }

    /// Interpolation weights over all nodes at reference point `(θ, ρ)`.
    pub fn interpolation_row(&self, theta: T, rho: T) -> Vec<T> {
        let mut b = vec![T::zero(); self.n_theta];
        self.theta_row(theta, &mut b);
        let mut row = vec![T::zero(); self.len()];
        self.accumulate(rho, &b, &mut row);
        row
    }

    /// Evaluates the global interpolant of node values.
    pub fn interpolate(&self, values: &[T], theta: T, rho: T) -> T {
        self.interpolation_row(theta, rho).iter().zip(values).map(|(a, b)| *a * *b).sum()
    }
}
