//! The 1D problem on an interval: collocation of
//!
//! ```text
//! C_s F_s[φ](x) = P(x) - ζ₁ x - ζ₂,   P'' = f,
//! ```
//!
//! with `φ` expanded in Chebyshev polynomials and `u = d^s φ`.

use std::sync::Arc;

use crate::geometry::Interval1D;
use crate::linalg::{Lu, Matrix};
use crate::quadrature::singular_1d_weights;
use crate::spectral::{cheb2_nodes, cheb_eval, ChebSeries};
use crate::special_fn::{coeff_C_s_1d, FractionalOrder};
use crate::{Error, Real, Result};

/// Right-hand side callable.
pub type Rhs1D<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// `(-Δ)^s u = f` on `(a, b)`, `u = 0` outside.
#[derive(Clone)]
pub struct Problem1D<T> {
    pub interval: Interval1D<T>,
    pub s: FractionalOrder<T>,
    pub f: Rhs1D<T>,
}

impl<T: Real> Problem1D<T> {
    pub fn new(interval: Interval1D<T>, s: FractionalOrder<T>, f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self { interval, s, f: Arc::new(f) }
    }
}

impl<T: Real> std::fmt::Debug for Problem1D<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem1D")
            .field("interval", &self.interval)
            .field("s", &self.s)
            .finish_non_exhaustive()
    }
}

/// Double primitive of `f` with `P(a) = P'(a) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublePrimitive<T> {
    pub series: ChebSeries<T>,
    /// False when the Chebyshev coefficients of `f` did not decay to
    /// roundoff at the largest size tried.
    pub resolved: bool,
}

/// Two spectral integrations of the Chebyshev interpolant of `f`. With
/// `n_cheb = None` the size is doubled from 32 until the coefficients
/// decay (at most 1024).
pub fn double_primitive<T: Real>(
    f: &dyn Fn(T) -> T,
    interval: &Interval1D<T>,
    n_cheb: Option<usize>,
) -> DoublePrimitive<T> {
    let (a, b) = (interval.a, interval.b);
    let tol = T::c(1e-13);
    let (series, resolved) = match n_cheb {
        Some(n) => {
            let s = ChebSeries::interpolate(f, a, b, n.max(1));
            let ok = s.tail_ratio(3) <= tol;
            (s, ok)
        }
        None => {
            let mut n = 32;
            let mut last = ChebSeries::interpolate(f, a, b, n);
            loop {
                let prev_tail = last.tail_ratio(4);
                if prev_tail <= tol || n >= 1024 {
                    break (last, prev_tail <= tol);
                }
                n *= 2;
                let next = ChebSeries::interpolate(f, a, b, n);
                // a plateau means noise in f, not missing resolution
                if next.tail_ratio(4) > T::c(0.5) * prev_tail {
                    break (next, false);
                }
                last = next;
            }
        }
    };
    DoublePrimitive { series: series.integral().integral(), resolved }
}

/// Solution of the collocated 1D system.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution1D<T> {
    pub interval: Interval1D<T>,
    pub s: FractionalOrder<T>,
    /// Chebyshev coefficients of `φ` on the interval.
    pub phi_coeffs: Vec<T>,
    pub zeta1: T,
    pub zeta2: T,
    /// Collocation points (Chebyshev–Lobatto).
    pub collocation: Vec<T>,
    /// Estimated 1-norm condition number of the collocation matrix.
    pub condition: T,
    /// Max residual of the linear solve relative to the right-hand side.
    pub residual: T,
    pub rhs_resolved: bool,
}

impl<T: Real> Solution1D<T> {
    pub fn phi(&self, x: T) -> T {
        let t = (T::c(2.0) * x - self.interval.a - self.interval.b) / (self.interval.b - self.interval.a);
        cheb_eval(&self.phi_coeffs, t)
    }

    /// `u = d^s φ` inside, zero outside.
    pub fn u_eval(&self, x: T) -> T {
        if !self.interval.contains(x) {
            return T::zero();
        }
        self.interval.d(x).powf(self.s.value()) * self.phi(x)
    }

    /// Left-hand side minus right-hand side of the equation at `x` in the
    /// closed interval, for a given double primitive.
    pub fn equation_residual(&self, x: T, p: &ChebSeries<T>) -> Result<T> {
        let m = singular_1d_weights(&[x], self.s, &self.interval, self.phi_coeffs.len())?;
        let lhs = coeff_C_s_1d(self.s)
            * m.row(0).iter().zip(&self.phi_coeffs).map(|(a, b)| *a * *b).sum::<T>();
        Ok(lhs - (p.eval(x) - self.zeta1 * x - self.zeta2))
    }
}

/// Collocates the equation at `n + 2` Chebyshev–Lobatto points with `n`
/// Chebyshev coefficients of `φ` plus `ζ₁, ζ₂` as unknowns.
pub fn solve_1d<T: Real>(problem: &Problem1D<T>, n: usize) -> Result<Solution1D<T>> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("need n >= 4 coefficients, got {n}")));
    }
    let iv = problem.interval;
    let f = problem.f.clone();
    let prim = double_primitive(&move |x| f(x), &iv, None);
    let pts = cheb2_nodes(n + 2, iv.a, iv.b);
    let weights = singular_1d_weights(&pts, problem.s, &iv, n)?;
    let cs = coeff_C_s_1d(problem.s);
    let mut a = Matrix::zeros(n + 2, n + 2);
    let mut rhs = Vec::with_capacity(n + 2);
    for (i, &x) in pts.iter().enumerate() {
        for j in 0..n {
            a[(i, j)] = cs * weights[(i, j)];
        }
        a[(i, n)] = x;
        a[(i, n + 1)] = T::one();
        rhs.push(prim.series.eval(x));
    }
    let lu = Lu::new(a.clone())?;
    let sol = lu.solve(&rhs);
    let condition = lu.condition_estimate();
    let res = a.matvec(&sol);
    let scale = rhs.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let residual = res
        .iter()
        .zip(&rhs)
        .fold(T::zero(), |m, (r, b)| m.max((*r - *b).abs()))
        / scale;
    Ok(Solution1D {
        interval: iv,
        s: problem.s,
        phi_coeffs: sol[..n].to_vec(),
        zeta1: sol[n],
        zeta2: sol[n + 1],
        collocation: pts,
        condition,
        residual,
        rhs_resolved: prim.resolved,
    })
}
