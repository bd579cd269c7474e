//! Volume integrals `∫_Ω K(x, y) ψ(y) dy` with weakly singular `K`.
//!
//! Each target `x = y(θ₀, ρ₀)` gets its own rule in reference coordinates:
//!
//! - a box `[θ₀ ± Δθ] × [ρ₀ ± Δρ]`, one-sided for targets on a wall, done in
//!   polar coordinates about the target: Gauss–Jacobi `t^{1-2s}` (or
//!   `t log t`) along rays, Gauss–Legendre in angle;
//! - tensor Gauss panels on the rest of the reference rectangle, doubling
//!   in size away from the box, with the wall factor of `d^s` folded into
//!   Gauss–Jacobi weights on panels that touch a wall;
//! - for disc and kite targets near the center, where the polar map is
//!   singular, the core `ρ < ρ_c` in physical polar coordinates about the
//!   target and a tensor ring outside it.
//!
//! The box half-width is at most half the distance to a wall, so `d^s` is
//! smooth on it unless the target sits on the wall.

use crate::geometry::{DomainGeometry, Point, VolumeGrid};
use crate::quadrature::{gauss_legendre, jacobi01, log01, Rule};
use crate::spectral::{cheb1_bary_weights, cheb1_nodes, lagrange_row};
use crate::special_fn::FractionalOrder;
use crate::{Error, Real, Result};

/// Kernel of a volume integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolumeKernel {
    /// `|x - y|^{-2s}`
    RieszPower,
    /// `|x - y|^{-2s} d(y)^s`
    RieszPowerDs,
    /// `(1/2π) log |x - y|`
    NewtonianLog,
}

/// Orders of the pieces of a point rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VolumeQuadConfig {
    /// Gauss points per panel and direction away from the target.
    pub panel_order: usize,
    /// Gauss points in angle per side of the box around the target.
    pub angle_order: usize,
    /// Gauss–Jacobi points along each ray.
    pub ray_order: usize,
    /// Trapezoid angles in the core around central targets.
    pub core_angles: usize,
    /// Trapezoid angles in the ring outside the core.
    pub ring_angles: usize,
    /// Chebyshev points per direction when moving a local rule to a grid.
    pub local_order: usize,
}

impl Default for VolumeQuadConfig {
    fn default() -> Self {
        Self { panel_order: 16, angle_order: 20, ray_order: 20, core_angles: 64, ring_angles: 96, local_order: 16 }
    }
}

// targets below ρ_I in a disc or kite use the core rule, whose radius is ρ_c
const RHO_INNER: f64 = 0.2;
const RHO_CORE: f64 = 0.7;

#[derive(Debug, Clone)]
struct Rules<T> {
    /// `τ^a (1-τ)^b` for `(a, b)` in `(0,0), (σ,0), (0,σ), (σ,σ)`.
    panel: [Rule<T>; 4],
    angle: Rule<T>,
    angle_wall: Rule<T>,
    ray: Rule<T>,
    ray_wall: Rule<T>,
    ray_log: Option<Rule<T>>,
    core_ray: Rule<T>,
    core_log: Option<Rule<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Wall {
    None,
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy)]
struct Target<T> {
    theta: T,
    rho: T,
    wall: Wall,
}

#[derive(Debug, Clone)]
struct Tensor<T> {
    theta: Vec<T>,
    rho: Vec<T>,
    /// `w[j * theta.len() + i]` for node `(theta[i], rho[j])`.
    w: Vec<T>,
}

#[derive(Debug, Clone, Copy)]
enum Patch<T> {
    Box { theta: (T, T), rho: (T, T) },
    Ring { rho: (T, T) },
}

#[derive(Debug, Clone)]
struct Scatter<T> {
    /// `(θ, ρ, w)`
    pts: Vec<(T, T, T)>,
    patch: Patch<T>,
}

/// Quadrature nodes and weights for one target, in reference coordinates.
#[derive(Debug, Clone)]
pub struct PointRule<T> {
    tensors: Vec<Tensor<T>>,
    scatters: Vec<Scatter<T>>,
}

impl<T: Real> PointRule<T> {
    pub fn len(&self) -> usize {
        self.tensors.iter().map(|t| t.w.len()).sum::<usize>() + self.scatters.iter().map(|s| s.pts.len()).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Σ w ψ(θ, ρ)`.
    pub fn apply(&self, mut psi: impl FnMut(T, T) -> T) -> T {
        let mut total = T::zero();
        for tb in &self.tensors {
            let n = tb.theta.len();
            for (j, &rho) in tb.rho.iter().enumerate() {
                for (i, &theta) in tb.theta.iter().enumerate() {
                    let w = tb.w[j * n + i];
                    if w != T::zero() {
                        total += w * psi(theta, rho);
                    }
                }
            }
        }
        for sc in &self.scatters {
            for &(theta, rho, w) in &sc.pts {
                total += w * psi(theta, rho);
            }
        }
        total
    }
}

/// Singular volume quadrature on a fixed domain, kernel and order.
#[derive(Debug, Clone)]
pub struct VolumeQuadrature<T> {
    domain: DomainGeometry<T>,
    kernel: VolumeKernel,
    s: T,
    sigma: T,
    config: VolumeQuadConfig,
    rules: Rules<T>,
}

fn gl01<T: Real>(n: usize) -> Rule<T> {
    let r = gauss_legendre::<T>(n);
    let half = T::c(0.5);
    Rule {
        nodes: r.nodes.iter().map(|&x| half * (x + T::one())).collect(),
        weights: r.weights.iter().map(|&w| half * w).collect(),
    }
}

impl<T: Real> VolumeQuadrature<T> {
    /// `s` is ignored for [`VolumeKernel::NewtonianLog`].
    pub fn new(domain: &DomainGeometry<T>, kernel: VolumeKernel, s: FractionalOrder<T>) -> Result<Self> {
        Self::with_config(domain, kernel, s, VolumeQuadConfig::default())
    }

    pub fn with_config(
        domain: &DomainGeometry<T>,
        kernel: VolumeKernel,
        s: FractionalOrder<T>,
        config: VolumeQuadConfig,
    ) -> Result<Self> {
        let c = config;
        if c.panel_order < 2 || c.angle_order < 2 || c.ray_order < 2 || c.local_order < 2 || c.core_angles < 4 || c.ring_angles < 4 {
            return Err(Error::InvalidParameter(format!("volume quadrature orders too small: {c:?}")));
        }
        let s = s.value();
        let zero = T::zero();
        let sigma = if kernel == VolumeKernel::RieszPowerDs { s } else { zero };
        let p = if kernel == VolumeKernel::NewtonianLog { T::one() } else { T::one() - T::c(2.0) * s };
        let log = kernel == VolumeKernel::NewtonianLog;
        let core_order = c.ray_order + 4;
        let rules = Rules {
            panel: [
                gl01(c.panel_order),
                jacobi01(c.panel_order, sigma, zero)?,
                jacobi01(c.panel_order, zero, sigma)?,
                jacobi01(c.panel_order, sigma, sigma)?,
            ],
            angle: gl01(c.angle_order),
            angle_wall: jacobi01(c.angle_order, sigma, zero)?,
            ray: jacobi01(c.ray_order, p, zero)?,
            ray_wall: jacobi01(c.ray_order, p + sigma, zero)?,
            ray_log: if log { Some(log01(c.ray_order, T::one())?) } else { None },
            core_ray: jacobi01(core_order, p, zero)?,
            core_log: if log { Some(log01(core_order, T::one())?) } else { None },
        };
        Ok(Self { domain: domain.clone(), kernel, s, sigma, config, rules })
    }

    pub fn domain(&self) -> &DomainGeometry<T> {
        &self.domain
    }

    pub fn kernel(&self) -> VolumeKernel {
        self.kernel
    }

    /// `∫_Ω K(x, y) ψ(y) dy` for a target in the closed domain.
    pub fn integrate(&self, x: Point<T>, psi: impl Fn(Point<T>) -> T) -> Result<T> {
        let rule = self.point_rule(x)?;
        Ok(rule.apply(|th, rho| psi(self.domain.to_physical(th, rho))))
    }

    /// Rule for a physical target.
    pub fn point_rule(&self, x: Point<T>) -> Result<PointRule<T>> {
        let (theta, rho) = self.domain.to_reference(x);
        self.point_rule_reference(theta, rho).map_err(|e| match e {
            Error::TargetOutside(..) => Error::TargetOutside(x[0].f64(), x[1].f64()),
            e => e,
        })
    }

    /// Rule for a target given in reference coordinates.
    pub fn point_rule_reference(&self, theta: T, rho: T) -> Result<PointRule<T>> {
        let tg = self.target(theta, rho)?;
        let (lo, _) = self.domain.rho_range();
        if !self.domain.lower_wall() && tg.rho - lo < T::c(RHO_INNER) {
            self.core_rule(&tg)
        } else {
            Ok(self.box_rule(&tg))
        }
    }

    /// Row `w` with `Σ_k w_k ψ(node_k) ≈ ∫ K(x, y) ψ(y) dy` for `ψ` in the
    /// interpolation space of `grid`.
    pub fn grid_row(&self, grid: &VolumeGrid<T>, x: Point<T>) -> Result<Vec<T>> {
        Ok(self.transfer(grid, &self.point_rule(x)?))
    }

    pub fn grid_row_reference(&self, grid: &VolumeGrid<T>, theta: T, rho: T) -> Result<Vec<T>> {
        Ok(self.transfer(grid, &self.point_rule_reference(theta, rho)?))
    }

    fn target(&self, theta: T, rho: T) -> Result<Target<T>> {
        let (lo, hi) = self.domain.rho_range();
        let tol = T::c(1e-12) * (hi - lo);
        let outside = || Error::TargetOutside(theta.f64(), rho.f64());
        if !(theta.is_finite() && rho.is_finite()) || rho > hi + tol {
            return Err(outside());
        }
        let (rho, wall) = if rho >= hi - tol {
            (hi, Wall::Upper)
        } else if self.domain.lower_wall() && rho <= lo + tol {
            if rho < lo - tol {
                return Err(outside());
            }
            (lo, Wall::Lower)
        } else {
            (rho.max(lo), Wall::None)
        };
        Ok(Target { theta, rho, wall })
    }

    /// `|y(θ, ρ) - x|` without cancellation near the target.
    fn distance(&self, tg: &Target<T>, theta: T, rho: T) -> T {
        let d = self.domain.map_difference(theta, rho, tg.theta, tg.rho);
        d[0].hypot(d[1])
    }

    fn riesz(&self, r: T) -> T {
        r.powf(-T::c(2.0) * self.s)
    }

    fn newton(&self, r: T) -> T {
        r.ln() / T::TAU()
    }

    fn kernel_value(&self, r: T) -> T {
        match self.kernel {
            VolumeKernel::NewtonianLog => self.newton(r),
            _ => self.riesz(r),
        }
    }

    fn smooth_pow(&self, theta: T, rho: T) -> T {
        if self.sigma == T::zero() {
            T::one()
        } else {
            self.domain.d_smooth(theta, rho).powf(self.sigma)
        }
    }

    /// Gauss nodes and weights on `[a, b]` in ρ, with the wall factors of
    /// `d^σ` either in the rule or multiplied in.
    fn rho_panel(&self, a: T, b: T, out_x: &mut Vec<T>, out_w: &mut Vec<T>) {
        let (lo, hi) = self.domain.rho_range();
        let sig = self.sigma;
        let weighted = sig > T::zero();
        let at_hi = weighted && b == hi;
        let at_lo = weighted && self.domain.lower_wall() && a == lo;
        let rule = &self.rules.panel[usize::from(at_lo) + 2 * usize::from(at_hi)];
        let len = b - a;
        let mut scale = len;
        if at_lo {
            scale *= len.powf(sig);
        }
        if at_hi {
            scale *= len.powf(sig);
        }
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let rho = a + len * t;
            let mut wr = scale * w;
            if weighted && !at_hi {
                wr *= (hi - rho).powf(sig);
            }
            if weighted && self.domain.lower_wall() && !at_lo {
                wr *= (rho - lo).powf(sig);
            }
            out_x.push(rho);
            out_w.push(wr);
        }
    }

    fn theta_panel(&self, a: T, b: T, out_x: &mut Vec<T>, out_w: &mut Vec<T>) {
        let len = b - a;
        let r = &self.rules.panel[0];
        for (&t, &w) in r.nodes.iter().zip(&r.weights) {
            out_x.push(a + len * t);
            out_w.push(len * w);
        }
    }

    /// Tensor weights `wθ wρ J K h^σ` with cells flagged in `skip` zeroed.
    fn tensor(
        &self,
        tg: &Target<T>,
        theta: (Vec<T>, Vec<T>, Vec<usize>),
        rho: (Vec<T>, Vec<T>, Vec<usize>),
        skip: impl Fn(usize, usize) -> bool,
    ) -> Tensor<T> {
        let (th, wth, pth) = theta;
        let (rh, wrh, prh) = rho;
        let n = th.len();
        let mut w = vec![T::zero(); n * rh.len()];
        for (j, &rho) in rh.iter().enumerate() {
            for (i, &t) in th.iter().enumerate() {
                if skip(pth[i], prh[j]) {
                    continue;
                }
                let r = self.distance(tg, t, rho);
                w[j * n + i] =
                    wth[i] * wrh[j] * self.domain.jacobian(t, rho) * self.kernel_value(r) * self.smooth_pow(t, rho);
            }
        }
        Tensor { theta: th, rho: rh, w }
    }

    fn box_rule(&self, tg: &Target<T>) -> PointRule<T> {
        let dom = &self.domain;
        let (lo, hi) = dom.rho_range();
        let half = T::c(0.5);
        let h = T::c(0.1) * (hi - lo);
        let d_rho = match tg.wall {
            Wall::None => {
                let mut d = h.min(half * (hi - tg.rho)).min(half * (tg.rho - lo));
                if !dom.lower_wall() {
                    d = d.min(half * tg.rho);
                }
                d
            }
            _ => h,
        };
        let (m_th, m_rho) = dom.metric(tg.theta, tg.rho);
        let d_theta = (d_rho * m_rho / m_th).min(T::FRAC_PI_2());
        let eta = match tg.wall {
            Wall::None => (-T::one(), T::one()),
            Wall::Upper => (-T::one(), T::zero()),
            Wall::Lower => (T::zero(), T::one()),
        };
        let near = self.near_box(tg, d_theta, d_rho, eta);

        let (th_breaks, th_box) = breaks(
            tg.theta,
            tg.theta - d_theta,
            tg.theta + d_theta,
            tg.theta - T::PI(),
            tg.theta + T::PI(),
            T::FRAC_PI_4(),
        );
        let r_lo = tg.rho + d_rho * eta.0;
        let r_hi = tg.rho + d_rho * eta.1;
        let (r_breaks, r_box) = breaks(tg.rho, r_lo, r_hi, lo, hi, T::c(0.25) * (hi - lo));
        let mut th = (Vec::new(), Vec::new(), Vec::new());
        for (k, win) in th_breaks.windows(2).enumerate() {
            let before = th.0.len();
            self.theta_panel(win[0], win[1], &mut th.0, &mut th.1);
            th.2.extend(std::iter::repeat(k).take(th.0.len() - before));
        }
        let mut rh = (Vec::new(), Vec::new(), Vec::new());
        for (k, win) in r_breaks.windows(2).enumerate() {
            let before = rh.0.len();
            self.rho_panel(win[0], win[1], &mut rh.0, &mut rh.1);
            rh.2.extend(std::iter::repeat(k).take(rh.0.len() - before));
        }
        let far = self.tensor(tg, th, rh, |i, j| th_box.contains(&i) && r_box.contains(&j));
        PointRule { tensors: vec![far], scatters: vec![near] }
    }

    /// Polar rule about the target over the box `[θ₀ ± Δθ] × [ρ₀ + Δρ η]`.
    fn near_box(&self, tg: &Target<T>, d_theta: T, d_rho: T, eta: (T, T)) -> Scatter<T> {
        let dom = &self.domain;
        let (lo, hi) = dom.rho_range();
        let zero = T::zero();
        let one = T::one();
        let sig = self.sigma;
        let on_wall = tg.wall != Wall::None;
        let corners = [[one, eta.0], [one, eta.1], [-one, eta.1], [-one, eta.0]];
        let area = d_theta * d_rho;
        let two_s = T::c(2.0) * self.s;
        // A = ∂y/∂(θ, ρ) diag(Δθ, Δρ), with the second row flipped if needed
        // so that det A > 0
        let jt = dom.map_dtheta(tg.theta, tg.rho);
        let jr = dom.map_drho(tg.theta, tg.rho);
        let mut lin = [[jt[0] * d_theta, jr[0] * d_rho], [jt[1] * d_theta, jr[1] * d_rho]];
        let mut det = lin[0][0] * lin[1][1] - lin[0][1] * lin[1][0];
        if det < zero {
            lin[1] = [-lin[1][0], -lin[1][1]];
            det = -det;
        }
        let inv = [[lin[1][1] / det, -lin[0][1] / det], [-lin[1][0] / det, lin[0][0] / det]];
        let mut pts = Vec::new();
        for k in 0..4 {
            let ca = corners[k];
            let cb = corners[(k + 1) % 4];
            let (ex, ey) = (cb[0] - ca[0], cb[1] - ca[1]);
            let len = ex.hypot(ey);
            let nrm = [ey / len, -ex / len];
            let p = nrm[0] * ca[0] + nrm[1] * ca[1];
            if p <= T::c(1e-12) {
                continue;
            }
            let a0 = ca[1].atan2(ca[0]);
            let mut a1 = cb[1].atan2(cb[0]);
            while a1 <= a0 {
                a1 += T::TAU();
            }
            let an = nrm[1].atan2(nrm[0]);
            let wall_a = on_wall && ca[1] == zero;
            let wall_b = on_wall && cb[1] == zero;
            // Gauss in the angle φ of the linearized physical offset A u,
            // where the kernel is close to isotropic
            let phi_of = |a: T| {
                let (sa, ca_) = a.sin_cos();
                (lin[1][0] * ca_ + lin[1][1] * sa).atan2(lin[0][0] * ca_ + lin[0][1] * sa)
            };
            let f0 = phi_of(a0);
            let mut f1 = phi_of(a1);
            while f1 <= f0 {
                f1 += T::TAU();
            }
            let lf = f1 - f0;
            let arule = if (wall_a || wall_b) && sig > zero { &self.rules.angle_wall } else { &self.rules.angle };
            for (&u, &wu) in arule.nodes.iter().zip(&arule.weights) {
                let phi = if wall_b { f1 - lf * u } else { f0 + lf * u };
                let (sf, cf) = phi.sin_cos();
                let e = [inv[0][0] * cf + inv[0][1] * sf, inv[1][0] * cf + inv[1][1] * sf];
                let mut alpha = e[1].atan2(e[0]);
                while alpha < a0 {
                    alpha += T::TAU();
                }
                let wa = lf * wu / (det * (e[0] * e[0] + e[1] * e[1]));
                let (sa, ca_) = alpha.sin_cos();
                // |sin α|^σ from the wall factor, less what the rule carries
                let mut wall_fac = one;
                if on_wall && sig > zero {
                    wall_fac = (d_rho * sa.abs()).powf(sig);
                    if wall_a || wall_b {
                        wall_fac = wall_fac / u.powf(sig);
                    }
                }
                let tmax = p / (alpha - an).cos();
                let mut emit = |t: T, w: T, log_part: bool| {
                    let theta = tg.theta + d_theta * t * ca_;
                    let rho = tg.rho + d_rho * t * sa;
                    let r = self.distance(tg, theta, rho);
                    let jac = dom.jacobian(theta, rho);
                    let val = match self.kernel {
                        VolumeKernel::NewtonianLog => {
                            if log_part {
                                -w / T::TAU()
                            } else {
                                w * (tmax.ln() + (r / t).ln()) / T::TAU()
                            }
                        }
                        _ => {
                            let mut v = w * (r / t).powf(-two_s);
                            if sig > zero {
                                v *= self.smooth_pow(theta, rho);
                                match tg.wall {
                                    Wall::None => {
                                        v *= (hi - rho).powf(sig);
                                        if dom.lower_wall() {
                                            v *= (rho - lo).powf(sig);
                                        }
                                    }
                                    Wall::Upper => {
                                        v *= wall_fac;
                                        if dom.lower_wall() {
                                            v *= (rho - lo).powf(sig);
                                        }
                                    }
                                    Wall::Lower => v *= wall_fac * (hi - rho).powf(sig),
                                }
                            }
                            v
                        }
                    };
                    pts.push((theta, rho, area * wa * jac * val));
                };
                let (ray, pe) = if on_wall && sig > zero {
                    (&self.rules.ray_wall, T::one() - two_s + sig)
                } else if self.kernel == VolumeKernel::NewtonianLog {
                    (&self.rules.ray, T::one())
                } else {
                    (&self.rules.ray, T::one() - two_s)
                };
                let scale = tmax.powf(pe + one);
                for (&tau, &w) in ray.nodes.iter().zip(&ray.weights) {
                    emit(tmax * tau, scale * w, false);
                }
                if let Some(lr) = &self.rules.ray_log {
                    for (&tau, &w) in lr.nodes.iter().zip(&lr.weights) {
                        emit(tmax * tau, scale * w, true);
                    }
                }
            }
        }
        Scatter {
            pts,
            patch: Patch::Box {
                theta: (tg.theta - d_theta, tg.theta + d_theta),
                rho: (tg.rho + d_rho * eta.0, tg.rho + d_rho * eta.1),
            },
        }
    }

    /// Rays in the reference plane from the target `p₀` to the circle
    /// `|p| = ρ_c`: `p = p₀ + τ (ρ_c e_θ - p₀)`, trapezoid in θ,
    /// Gauss–Jacobi in τ. Along a ray `|y - x| = τ g(τ)` with `g` smooth.
    /// A tensor ring covers the rest.
    fn core_rule(&self, tg: &Target<T>) -> Result<PointRule<T>> {
        let dom = &self.domain;
        let (_, hi) = dom.rho_range();
        let rho_c = T::c(RHO_CORE) * hi;
        let na = self.config.core_angles;
        let wa = T::TAU() / T::n(na);
        let p0 = [tg.rho * tg.theta.cos(), tg.rho * tg.theta.sin()];
        let jac = dom.plane_jacobian();
        let mut pts = Vec::new();
        for k in 0..na {
            let theta = wa * T::n(k);
            let (st, ct) = theta.sin_cos();
            let v = [rho_c * ct - p0[0], rho_c * st - p0[1]];
            // |∂p/∂(θ, τ)| = τ |v × ρ_c e_θ'|
            let cross = rho_c * (v[0] * ct + v[1] * st);
            let mut emit = |tau: T, w: T, kernel: bool| {
                let dp = [tau * v[0], tau * v[1]];
                let p = [p0[0] + dp[0], p0[1] + dp[1]];
                let y = dom.from_plane(p);
                let mut val = wa * jac * cross * w;
                if kernel {
                    let dy = dom.plane_difference(p0, dp);
                    let g = dy[0].hypot(dy[1]) / tau;
                    val *= match self.rules.core_log {
                        None => self.riesz(g),
                        Some(_) => self.newton(g),
                    };
                }
                if self.sigma > T::zero() {
                    val *= dom.d_eval(y).powf(self.sigma);
                }
                pts.push((p[1].atan2(p[0]), p[0].hypot(p[1]), val));
            };
            let jr = &self.rules.core_ray;
            for (&tau, &w) in jr.nodes.iter().zip(&jr.weights) {
                emit(tau, w, true);
            }
            if let Some(lr) = &self.rules.core_log {
                for (&tau, &w) in lr.nodes.iter().zip(&lr.weights) {
                    emit(tau, -w / T::TAU(), false);
                }
            }
        }
        let core = Scatter { pts, patch: Patch::Ring { rho: (T::zero(), rho_c) } };

        let nr = self.config.ring_angles;
        let wr = T::TAU() / T::n(nr);
        let th: Vec<T> = (0..nr).map(|i| wr * T::n(i)).collect();
        let th_w = vec![wr; nr];
        let mut rh = (Vec::new(), Vec::new());
        let mid = T::c(0.5) * (rho_c + hi);
        self.rho_panel(rho_c, mid, &mut rh.0, &mut rh.1);
        self.rho_panel(mid, hi, &mut rh.0, &mut rh.1);
        let nrh = rh.0.len();
        let ring = self.tensor(tg, (th, th_w, vec![0; nr]), (rh.0, rh.1, vec![0; nrh]), |_, _| false);
        Ok(PointRule { tensors: vec![ring], scatters: vec![core] })
    }

    /// Moves a point rule onto the nodes of `grid` through its interpolant.
    pub fn transfer(&self, grid: &VolumeGrid<T>, rule: &PointRule<T>) -> Vec<T> {
        let mut out = vec![T::zero(); grid.len()];
        for tb in &rule.tensors {
            add_tensor(grid, &tb.theta, &tb.rho, &tb.w, false, &mut out);
        }
        let q = self.config.local_order;
        let bary = cheb1_bary_weights::<T>(q);
        let mut lr = vec![T::zero(); q];
        for sc in &rule.scatters {
            match sc.patch {
                Patch::Box { theta, rho } => {
                    let tn = cheb1_nodes(q, theta.0, theta.1);
                    let rn = cheb1_nodes(q, rho.0, rho.1);
                    let mut lt = vec![T::zero(); q];
                    let mut w = vec![T::zero(); q * q];
                    for &(t, r, wt) in &sc.pts {
                        lagrange_row(&tn, &bary, t, &mut lt);
                        lagrange_row(&rn, &bary, r, &mut lr);
                        for (j, &a) in lr.iter().enumerate() {
                            let wa = wt * a;
                            for (i, &b) in lt.iter().enumerate() {
                                w[j * q + i] += wa * b;
                            }
                        }
                    }
                    add_tensor(grid, &tn, &rn, &w, false, &mut out);
                }
                Patch::Ring { rho } => {
                    let n = grid.n_theta;
                    let rn = cheb1_nodes(q, rho.0, rho.1);
                    let mut lt = vec![T::zero(); n];
                    let mut w = vec![T::zero(); q * n];
                    for &(t, r, wt) in &sc.pts {
                        grid.theta_row(t, &mut lt);
                        lagrange_row(&rn, &bary, r, &mut lr);
                        for (j, &a) in lr.iter().enumerate() {
                            let wa = wt * a;
                            for (i, &b) in lt.iter().enumerate() {
                                w[j * n + i] += wa * b;
                            }
                        }
                    }
                    add_tensor(grid, &grid.theta_nodes, &rn, &w, true, &mut out);
                }
            }
        }
        out
    }
}

/// `out += Lρᵀ W Lθ` for a tensor rule with node lists `theta`, `rho`.
fn add_tensor<T: Real>(grid: &VolumeGrid<T>, theta: &[T], rho: &[T], w: &[T], on_grid: bool, out: &mut [T]) {
    let n = grid.n_theta;
    let nt = theta.len();
    let m: Vec<Vec<T>> = if on_grid {
        (0..rho.len()).map(|b| w[b * nt..(b + 1) * nt].to_vec()).collect()
    } else {
        let mut lt = vec![vec![T::zero(); n]; nt];
        for (row, &t) in lt.iter_mut().zip(theta) {
            grid.theta_row(t, row);
        }
        (0..rho.len())
            .map(|b| {
                let mut acc = vec![T::zero(); n];
                for (a, row) in lt.iter().enumerate() {
                    let wa = w[b * nt + a];
                    if wa != T::zero() {
                        for (o, &v) in acc.iter_mut().zip(row) {
                            *o += wa * v;
                        }
                    }
                }
                acc
            })
            .collect()
    };
    for (b, &r) in rho.iter().enumerate() {
        grid.accumulate(r, &m[b], out);
    }
}

/// Breakpoints on `[lo, hi]` around a box `[inner_lo, inner_hi]` about
/// `center`: the box is split at `center`, outside it intervals double up
/// to `max_len` until they reach the ends, absorbing short leftovers. Also returns the
/// indices of the box intervals.
fn breaks<T: Real>(center: T, inner_lo: T, inner_hi: T, lo: T, hi: T, max_len: T) -> (Vec<T>, Vec<usize>) {
    let half = T::c(0.5);
    let grow = |edge: T, end: T, dir: T| -> Vec<T> {
        let mut out = Vec::new();
        let mut last = edge;
        while (end - last) * dir > T::zero() {
            let step = (last - center).abs().min(max_len);
            let next = last + dir * step;
            if (end - next) * dir <= half * (next - last) * dir {
                out.push(end);
                break;
            }
            out.push(next);
            last = next;
        }
        out
    };
    let down = grow(inner_lo, lo, -T::one());
    let up = grow(inner_hi, hi, T::one());
    let mut pts: Vec<T> = down.into_iter().rev().collect();
    let first_box = pts.len();
    pts.push(inner_lo);
    if inner_lo < center && center < inner_hi {
        pts.push(center);
    }
    pts.push(inner_hi);
    let last_box = pts.len() - 1;
    pts.extend(up);
    (pts, (first_box..last_box).collect())
}

/// Grid row of the singular volume integral at a physical target; builds
/// the quadrature on every call.
pub fn volumetric_singular_quad<T: Real>(
    domain: &DomainGeometry<T>,
    grid: &VolumeGrid<T>,
    target: Point<T>,
    s: FractionalOrder<T>,
    kernel: VolumeKernel,
) -> Result<Vec<T>> {
    VolumeQuadrature::new(domain, kernel, s)?.grid_row(grid, target)
}
