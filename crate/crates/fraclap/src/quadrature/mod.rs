//! Quadrature rules: Gauss–Jacobi and log-weighted Gauss rules, the
//! periodic log rule for boundary operators, tanh-sinh for reference
//! integrals, the 1D rule for the weakly singular kernel and the 2D volume
//! rules (see [`volume`]).

pub mod volume;

pub use volume::{volumetric_singular_quad, VolumeKernel, VolumeQuadrature};

use crate::geometry::Interval1D;
use crate::linalg::{tridiag_eigen, Matrix};
use crate::spectral::cheb_t_all;
use crate::special_fn::{gamma_fn, FractionalOrder};
use crate::{Error, Real, Result};

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to `f`.
    pub fn integrate(&self, mut f: impl FnMut(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    fn from_f64(r: &Rule<f64>) -> Self {
        Rule {
            nodes: r.nodes.iter().map(|&x| T::c(x)).collect(),
            weights: r.weights.iter().map(|&x| T::c(x)).collect(),
        }
    }
}

fn gauss_jacobi_f64(n: usize, alpha: f64, beta: f64) -> Result<Rule<f64>> {
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Gauss–Jacobi parameters must exceed -1, got ({alpha}, {beta})"
        )));
    }
    if n == 0 {
        return Ok(Rule { nodes: vec![], weights: vec![] });
    }
    let ab = alpha + beta;
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                let c = 2.0 * k as f64 + ab;
                (beta * beta - alpha * alpha) / (c * (c + 2.0))
            }
        })
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let b = if k == 1 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let kf = k as f64;
                let c = 2.0 * kf + ab;
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))
            };
            b.sqrt()
        })
        .collect();
    let mu0 = 2f64.powf(ab + 1.0) * gamma_fn(alpha + 1.0)? * gamma_fn(beta + 1.0)?
        / gamma_fn(ab + 2.0)?;
    let pairs = tridiag_eigen(&diag, &off)?;
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| mu0 * p.1 * p.1).collect(),
    })
}

/// Gauss–Jacobi rule for the weight `(1-x)^α (1+x)^β` on `[-1, 1]`,
/// exact for polynomials of degree `2n - 1`.
pub fn gauss_jacobi_nodes<T: Real>(n: usize, alpha: T, beta: T) -> Result<Rule<T>> {
    Ok(Rule::from_f64(&gauss_jacobi_f64(n, alpha.f64(), beta.f64())?))
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> Rule<T> {
    Rule::from_f64(&gauss_jacobi_f64(n, 0.0, 0.0).expect("Legendre parameters are valid"))
}

fn jacobi01_f64(n: usize, p: f64, q: f64) -> Result<Rule<f64>> {
    let r = gauss_jacobi_f64(n, q, p)?;
    let scale = 2f64.powf(-(p + q + 1.0));
    Ok(Rule {
        nodes: r.nodes.iter().map(|&x| 0.5 * (1.0 + x)).collect(),
        weights: r.weights.iter().map(|&w| w * scale).collect(),
    })
}

/// Gauss rule for the weight `t^p (1-t)^q` on `[0, 1]`.
pub fn jacobi01<T: Real>(n: usize, p: T, q: T) -> Result<Rule<T>> {
    Ok(Rule::from_f64(&jacobi01_f64(n, p.f64(), q.f64())?))
}

fn log01_f64(n: usize, p: f64) -> Result<Rule<f64>> {
    if !(p > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "log-weight exponent must exceed -1, got {p}"
        )));
    }
    // Discretize t^p (-log t) dt on dyadic panels; the innermost panel
    // [0, h] replaces -log t by its mean under t^p.
    let levels = ((60.0 / (p + 1.0)).ceil() as usize).clamp(20, 1500);
    let gl = gauss_jacobi_f64(40, 0.0, 0.0)?;
    let mut xs = Vec::with_capacity(levels * 40 + 12);
    let mut ws = Vec::with_capacity(levels * 40 + 12);
    for j in 0..levels {
        let hi = 0.5f64.powi(j as i32);
        let lo = 0.5 * hi;
        for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
            let t = lo + 0.5 * (hi - lo) * (1.0 + x);
            xs.push(t);
            ws.push(0.5 * (hi - lo) * w * t.powf(p) * -t.ln());
        }
    }
    let h = 0.5f64.powi(levels as i32);
    let tail = jacobi01_f64(12, p, 0.0)?;
    let mean_log = -h.ln() + 1.0 / (p + 1.0);
    for (&x, &w) in tail.nodes.iter().zip(&tail.weights) {
        xs.push(h * x);
        ws.push(h.powf(p + 1.0) * w * mean_log);
    }
    stieltjes(n, &xs, &ws)
}

/// Gauss rule for `t^p (-log t)` on `[0, 1]`.
pub fn log01<T: Real>(n: usize, p: T) -> Result<Rule<T>> {
    Ok(Rule::from_f64(&log01_f64(n, p.f64())?))
}

/// Gauss rule of a discrete measure by the discretized Stieltjes procedure.
fn stieltjes(n: usize, x: &[f64], w: &[f64]) -> Result<Rule<f64>> {
    let m = x.len();
    let mu0: f64 = w.iter().sum();
    let mut p_prev = vec![0.0; m];
    let mut p = vec![1.0; m];
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n);
    let mut norm_prev = 1.0;
    for k in 0..n {
        let norm: f64 = (0..m).map(|i| w[i] * p[i] * p[i]).sum();
        let a = (0..m).map(|i| w[i] * x[i] * p[i] * p[i]).sum::<f64>() / norm;
        let b = if k == 0 { 0.0 } else { norm / norm_prev };
        diag.push(a);
        if k > 0 {
            off.push(b.sqrt());
        }
        let next: Vec<f64> = (0..m).map(|i| (x[i] - a) * p[i] - b * p_prev[i]).collect();
        // rescale to keep the recurrence in range
        let scale = norm.sqrt();
        p_prev = p.iter().map(|v| v / scale).collect();
        p = next.iter().map(|v| v / scale).collect();
        norm_prev = norm / (scale * scale);
    }
    let pairs = tridiag_eigen(&diag, &off)?;
    Ok(Rule {
        nodes: pairs.iter().map(|q| q.0).collect(),
        weights: pairs.iter().map(|q| mu0 * q.1 * q.1).collect(),
    })
}

/// Quadrature weights for `∫_0^{2π} log(4 sin²((t-τ)/2)) f(τ) dτ` at the
/// equispaced nodes `τ_j = 2πj/n`. The rule is circulant: the weight for
/// target `t_i` and source `τ_j` depends on `(i - j) mod n` only.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicLogRule<T> {
    pub n: usize,
    pub weights: Vec<T>,
}

impl<T: Real> PeriodicLogRule<T> {
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights[(i + self.n - j) % self.n]
    }

    /// Full `n × n` weight matrix.
    pub fn matrix(&self) -> Matrix<T> {
        Matrix::from_fn(self.n, self.n, |i, j| self.weight(i, j))
    }
}

/// Kress's trigonometric-interpolation rule for periodic log kernels.
pub fn kress_log_weights<T: Real>(n: usize) -> Result<PeriodicLogRule<T>> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "periodic log rule needs an even node count, got {n}"
        )));
    }
    let m = n / 2;
    let mf = m as f64;
    let weights = (0..n)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / mf;
            let mut r = 0.0;
            for j in 1..m {
                r += (j as f64 * t).cos() / j as f64;
            }
            let last = if k % 2 == 0 { 1.0 } else { -1.0 };
            T::c(-2.0 * std::f64::consts::PI / mf * r - std::f64::consts::PI / (mf * mf) * last)
        })
        .collect();
    Ok(PeriodicLogRule { n, weights })
}

/// Tanh-sinh integration of `f` over `[a, b]`, refined until successive
/// levels agree to `tol` relative to the integral of `|f|`.
///
/// Endpoint singularities are allowed; the abscissae near `a` are formed as
/// `a + δ` with `δ` computed without cancellation.
pub fn tanh_sinh<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let len = b - a;
    let half = T::c(0.5);
    let half_pi = T::FRAC_PI_2();
    let floor = T::min_positive_value().powf(T::c(0.8));
    let mut eval = |t: T| -> Option<(T, T)> {
        let u = half_pi * t.sinh();
        let e = (-T::c(2.0) * u.abs()).exp();
        let frac = e / (T::one() + e);
        if frac < floor {
            return None;
        }
        let w = half_pi * t.cosh() * T::c(4.0) * frac / (T::one() + e) * half * len;
        let y = if t < T::zero() {
            a + len * frac
        } else {
            b - len * frac
        };
        let v = w * f(y);
        Some((v, v.abs()))
    };
    let (c0, c0abs) = eval(T::zero()).unwrap_or((T::zero(), T::zero()));
    let mut sum = c0;
    let mut abs_sum = c0abs;
    let mut h = T::one();
    let mut j = 1usize;
    loop {
        let t = T::n(j);
        match (eval(t), eval(-t)) {
            (None, None) => break,
            (p, m) => {
                for (v, va) in [p, m].into_iter().flatten() {
                    sum += v;
                    abs_sum += va;
                }
            }
        }
        j += 1;
    }
    let mut prev = sum * h;
    for _level in 1..=14 {
        h *= half;
        let mut k = 1usize;
        loop {
            let t = h * T::n(k);
            match (eval(t), eval(-t)) {
                (None, None) => break,
                (p, m) => {
                    for (v, va) in [p, m].into_iter().flatten() {
                        sum += v;
                        abs_sum += va;
                    }
                }
            }
            k += 2;
        }
        let cur = sum * h;
        if (cur - prev).abs() <= tol * (abs_sum * h).max(T::min_positive_value()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureFailure(format!(
        "tanh-sinh on [{a}, {b}] did not reach tolerance {tol:e}"
    )))
}

/// Kernel of the 1D weakly singular equation.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Kernel1D {
    Power(f64),
    Log,
}

/// Weighted points for `∫_{-1}^{1} K(x̂ - ŷ) (1 - ŷ²)^s g(ŷ) dŷ` with the
/// kernel singularity at `x̂ ∈ [-1, 1]`.
struct Rules1D {
    s: f64,
    kernel: Kernel1D,
    near: Rule<f64>,
    near_log: Option<Rule<f64>>,
    near_merged: Rule<f64>,
    near_merged_log: Option<Rule<f64>>,
    far: Rule<f64>,
    mid: Rule<f64>,
}

impl Rules1D {
    fn new(s: f64, kernel: Kernel1D, nq: usize) -> Result<Self> {
        let p = match kernel {
            Kernel1D::Power(p) => p,
            Kernel1D::Log => 0.0,
        };
        let log = matches!(kernel, Kernel1D::Log);
        Ok(Rules1D {
            s,
            kernel,
            near: jacobi01_f64(nq, p, 0.0)?,
            near_log: if log { Some(log01_f64(nq, 0.0)?) } else { None },
            near_merged: jacobi01_f64(nq, p + s, 0.0)?,
            near_merged_log: if log { Some(log01_f64(nq, s)?) } else { None },
            far: jacobi01_f64(nq, s, 0.0)?,
            mid: {
                let r = gauss_jacobi_f64(nq, 0.0, 0.0)?;
                Rule {
                    nodes: r.nodes.iter().map(|x| 0.5 * (1.0 + x)).collect(),
                    weights: r.weights.iter().map(|w| 0.5 * w).collect(),
                }
            },
        })
    }

    fn kernel(&self, t: f64) -> f64 {
        match self.kernel {
            Kernel1D::Power(p) => t.powf(p),
            Kernel1D::Log => t.ln(),
        }
    }

    /// One side of the split: `t ∈ [0, len]`, `ŷ = x̂ + dir·t`; the factor
    /// `(e + t)^s` comes from the opposite endpoint, `(len - t)^s` from the
    /// end of this side.
    fn side(&self, xh: f64, dir: f64, len: f64, e: f64, out: &mut Vec<(f64, f64)>) {
        if len <= 0.0 {
            return;
        }
        let s = self.s;
        let mut breaks = vec![0.0];
        if e > 0.0 && e < 0.25 * len {
            let mut c = e;
            while c < 0.5 * len {
                breaks.push(c);
                c *= 2.0;
            }
        }
        breaks.push(0.5 * len);
        breaks.push(len);
        let merged = e == 0.0;
        let opposite = |t: f64| (e + t).powf(s);
        let mut push = |t: f64, w: f64| out.push((xh + dir * t, w));
        let np = breaks.len() - 1;
        for k in 0..np {
            let (lo, hi) = (breaks[k], breaks[k + 1]);
            let width = hi - lo;
            if k == 0 {
                let (rule, log_rule, q) = if merged {
                    (&self.near_merged, &self.near_merged_log, self.pow() + s)
                } else {
                    (&self.near, &self.near_log, self.pow())
                };
                let scale = width.powf(q + 1.0);
                let lw = if log_rule.is_some() { width.ln() } else { 1.0 };
                for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let t = width * x;
                    let o = if merged { 1.0 } else { opposite(t) };
                    push(t, scale * w * lw * o * (len - t).powf(s));
                }
                if let Some(lr) = log_rule {
                    for (&x, &w) in lr.nodes.iter().zip(&lr.weights) {
                        let t = width * x;
                        let o = if merged { 1.0 } else { opposite(t) };
                        push(t, -scale * w * o * (len - t).powf(s));
                    }
                }
            } else if k == np - 1 {
                let scale = width.powf(s + 1.0);
                for (&x, &w) in self.far.nodes.iter().zip(&self.far.weights) {
                    let t = len - width * x;
                    push(t, scale * w * self.kernel(t) * opposite(t));
                }
            } else {
                for (&x, &w) in self.mid.nodes.iter().zip(&self.mid.weights) {
                    let t = lo + width * x;
                    push(t, width * w * self.kernel(t) * opposite(t) * (len - t).powf(s));
                }
            }
        }
    }

    fn pow(&self) -> f64 {
        match self.kernel {
            Kernel1D::Power(p) => p,
            Kernel1D::Log => 0.0,
        }
    }

    fn points(&self, xh: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let xh = xh.clamp(-1.0, 1.0);
        self.side(xh, 1.0, 1.0 - xh, 1.0 + xh, &mut out);
        self.side(xh, -1.0, 1.0 + xh, 1.0 - xh, &mut out);
        out
    }
}

/// Matrix of the 1D weakly singular operator on Chebyshev polynomials:
/// `M[i][j] = ∫_a^b K(x_i - y) d^s(y) T_j(ŷ) dy` with `d = (y-a)(b-y)`,
/// `ŷ` the image of `y` in `[-1, 1]`, and `K(r) = |r|^{1-2s}` or `log|r|`
/// when `s` is one half.
///
/// Each entry is computed with two rule sizes; disagreement above 1e-12
/// (relative to the row scale) is reported as a quadrature failure.
pub fn singular_1d_weights<T: Real>(
    targets: &[T],
    s: FractionalOrder<T>,
    interval: &Interval1D<T>,
    basis_size: usize,
) -> Result<Matrix<T>> {
    let sv = s.value().f64();
    let kernel = if s.is_half() {
        Kernel1D::Log
    } else {
        Kernel1D::Power(1.0 - 2.0 * sv)
    };
    let nq = (basis_size / 2 + 16).max(24);
    let coarse = Rules1D::new(sv, kernel, nq)?;
    let fine = Rules1D::new(sv, kernel, nq + 10)?;
    let (a, b) = (interval.a.f64(), interval.b.f64());
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    // ∫ log|x-y| ... = h^{2s+1} (log h ∫(1-ŷ²)^s g + ∫ log|x̂-ŷ| (1-ŷ²)^s g)
    let plain = match kernel {
        Kernel1D::Log => Some(gauss_jacobi_f64(nq + 10, sv, sv)?),
        Kernel1D::Power(_) => None,
    };
    let scale = match kernel {
        Kernel1D::Power(_) => h * h,
        Kernel1D::Log => h.powf(2.0 * sv + 1.0),
    };
    let mut m = Matrix::zeros(targets.len(), basis_size);
    let mut tbuf = vec![0.0; basis_size];
    for (i, &x) in targets.iter().enumerate() {
        let xh = (x.f64() - c) / h;
        let mut rows = [vec![0.0; basis_size], vec![0.0; basis_size]];
        for (row, rules) in rows.iter_mut().zip([&coarse, &fine]) {
            for (y, w) in rules.points(xh) {
                cheb_t_all(basis_size, y, &mut tbuf);
                for (r, t) in row.iter_mut().zip(&tbuf) {
                    *r += w * t;
                }
            }
            if let Some(pr) = &plain {
                for (&y, &w) in pr.nodes.iter().zip(&pr.weights) {
                    cheb_t_all(basis_size, y, &mut tbuf);
                    for (r, t) in row.iter_mut().zip(&tbuf) {
                        *r += w * h.ln() * t;
                    }
                }
            }
        }
        let row_scale = rows[1].iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        for j in 0..basis_size {
            if (rows[0][j] - rows[1][j]).abs() > 1e-12 * row_scale {
                return Err(Error::QuadratureFailure(format!(
                    "1D singular weight ({i}, {j}) not converged: {:e} vs {:e}",
                    rows[0][j], rows[1][j]
                )));
            }
            m[(i, j)] = T::c(scale * rows[1][j]);
        }
    }
    Ok(m)
}
