//! Chebyshev and trigonometric interpolation helpers.

use crate::Real;

/// Chebyshev points of the first kind on `[a, b]`, in increasing order.
pub fn cheb1_nodes<T: Real>(n: usize, a: T, b: T) -> Vec<T> {
    let half = T::c(0.5);
    (0..n)
        .map(|k| {
            let t = T::PI() * T::n(2 * (n - 1 - k) + 1) / T::n(2 * n);
            half * (a + b) + half * (b - a) * t.cos()
        })
        .collect()
}

/// Barycentric weights matching [`cheb1_nodes`].
pub fn cheb1_bary_weights<T: Real>(n: usize) -> Vec<T> {
    (0..n)
        .map(|k| {
            let j = n - 1 - k;
            let w = (T::PI() * T::n(2 * j + 1) / T::n(2 * n)).sin();
            if j % 2 == 0 {
                w
            } else {
                -w
            }
        })
        .collect()
}

/// Chebyshev–Lobatto points on `[a, b]`, increasing.
pub fn cheb2_nodes<T: Real>(n: usize, a: T, b: T) -> Vec<T> {
    let half = T::c(0.5);
    if n == 1 {
        return vec![half * (a + b)];
    }
    (0..n)
        .map(|k| {
            if k == 0 {
                return a;
            }
            if k == n - 1 {
                return b;
            }
            let t = T::PI() * T::n(n - 1 - k) / T::n(n - 1);
            half * (a + b) + half * (b - a) * t.cos()
        })
        .collect()
}

/// Barycentric weights matching [`cheb2_nodes`].
pub fn cheb2_bary_weights<T: Real>(n: usize) -> Vec<T> {
    (0..n)
        .map(|k| {
            let mut w = if k % 2 == 0 { T::one() } else { -T::one() };
            if k == 0 || k + 1 == n {
                w *= T::c(0.5);
            }
            w
        })
        .collect()
}

/// Values of all Lagrange basis polynomials at `x` (barycentric form).
pub fn lagrange_row<T: Real>(nodes: &[T], bary: &[T], x: T, out: &mut [T]) {
    for (k, &xk) in nodes.iter().enumerate() {
        if x == xk {
            out.iter_mut().for_each(|o| *o = T::zero());
            out[k] = T::one();
            return;
        }
    }
    let mut den = T::zero();
    for ((o, &xk), &wk) in out.iter_mut().zip(nodes).zip(bary) {
        let t = wk / (x - xk);
        *o = t;
        den += t;
    }
    for o in out.iter_mut() {
        *o /= den;
    }
}

/// Interpolation matrix from `nodes` to `targets`.
pub fn lagrange_matrix<T: Real>(nodes: &[T], bary: &[T], targets: &[T]) -> Vec<Vec<T>> {
    targets
        .iter()
        .map(|&x| {
            let mut row = vec![T::zero(); nodes.len()];
            lagrange_row(nodes, bary, x, &mut row);
            row
        })
        .collect()
}

/// Chebyshev coefficients of the interpolant through values at
/// [`cheb1_nodes`] (increasing order).
pub fn cheb1_coeffs<T: Real>(values: &[T]) -> Vec<T> {
    let n = values.len();
    (0..n)
        .map(|j| {
            let mut s = T::zero();
            for (k, &v) in values.iter().enumerate() {
                let m = n - 1 - k;
                let t = T::PI() * T::n(2 * m + 1) / T::n(2 * n);
                s += v * (T::n(j) * t).cos();
            }
            let f = if j == 0 { T::one() } else { T::c(2.0) };
            f * s / T::n(n)
        })
        .collect()
}

/// Evaluates `Σ c_j T_j(t)` by Clenshaw's recurrence, `t ∈ [-1, 1]`.
pub fn cheb_eval<T: Real>(c: &[T], t: T) -> T {
    let two_t = T::c(2.0) * t;
    let (mut b1, mut b2) = (T::zero(), T::zero());
    for &cj in c.iter().skip(1).rev() {
        let b0 = cj + two_t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(T::zero()) + t * b1 - b2
}

/// All `T_j(t)` for `j < n`.
pub fn cheb_t_all<T: Real>(n: usize, t: T, out: &mut [T]) {
    if n == 0 {
        return;
    }
    out[0] = T::one();
    if n > 1 {
        out[1] = t;
    }
    let two_t = T::c(2.0) * t;
    for j in 2..n {
        out[j] = two_t * out[j - 1] - out[j - 2];
    }
}

/// Coefficients of an antiderivative of `Σ c_j T_j` (variable `t`), with
/// the constant chosen so that it vanishes at `t = -1`.
pub fn cheb_integrate<T: Real>(c: &[T]) -> Vec<T> {
    let n = c.len();
    let mut out = vec![T::zero(); n + 1];
    let get = |j: usize| if j < n { c[j] } else { T::zero() };
    for k in 1..=n {
        let cm = if k == 1 { T::c(2.0) * get(0) } else { get(k - 1) };
        out[k] = (cm - get(k + 1)) / T::n(2 * k);
    }
    let at_minus1 = cheb_eval(&out, -T::one());
    out[0] -= at_minus1;
    out
}

/// Chebyshev coefficients of the derivative with respect to `t`.
pub fn cheb_derivative<T: Real>(c: &[T]) -> Vec<T> {
    let n = c.len();
    if n <= 1 {
        return vec![T::zero()];
    }
    let mut d = vec![T::zero(); n];
    for k in (0..n - 1).rev() {
        let next = if k + 2 < n { d[k + 2] } else { T::zero() };
        d[k] = next + T::n(2 * (k + 1)) * c[k + 1];
    }
    d[0] *= T::c(0.5);
    d.truncate(n - 1);
    d
}

/// Fejér's first rule on `[a, b]`, nodes as in [`cheb1_nodes`].
pub fn fejer1_weights<T: Real>(n: usize, a: T, b: T) -> Vec<T> {
    let half = T::c(0.5);
    (0..n)
        .map(|k| {
            let m = n - 1 - k;
            let th = T::PI() * T::n(2 * m + 1) / T::n(2 * n);
            let mut s = T::zero();
            for j in 1..=n / 2 {
                s += (T::n(2 * j) * th).cos() / T::n(4 * j * j - 1);
            }
            T::c(2.0) / T::n(n) * (T::one() - T::c(2.0) * s) * half * (b - a)
        })
        .collect()
}

/// Equispaced periodic nodes `2πj/n`.
pub fn periodic_nodes<T: Real>(n: usize) -> Vec<T> {
    (0..n).map(|j| T::TAU() * T::n(j) / T::n(n)).collect()
}

/// Periodic cardinal function of the `n`-point trigonometric interpolant
/// (n even) at offset `x` from a node.
pub fn trig_cardinal<T: Real>(n: usize, x: T) -> T {
    let half = T::c(0.5);
    // reduce first: sin(n x/2) loses all relative accuracy near large
    // multiples of π
    let x = x - T::TAU() * (x / T::TAU()).round();
    let s = (half * x).sin();
    if s.abs() < T::epsilon() {
        return T::one();
    }
    (half * T::n(n) * x).sin() * (half * x).cos() / (T::n(n) * s)
}

/// Row of trigonometric interpolation weights at angle `t`.
pub fn trig_row<T: Real>(n: usize, t: T, out: &mut [T]) {
    let h = T::TAU() / T::n(n);
    for (j, o) in out.iter_mut().enumerate().take(n) {
        *o = trig_cardinal(n, t - h * T::n(j));
    }
}

/// Spectral differentiation matrix for `n` equispaced periodic nodes
/// (n even), row-major.
pub fn periodic_diff_matrix<T: Real>(n: usize) -> Vec<T> {
    let h = T::TAU() / T::n(n);
    let half = T::c(0.5);
    let mut d = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let k = i as isize - j as isize;
                let sgn = if k.rem_euclid(2) == 0 { T::one() } else { -T::one() };
                d[i * n + j] = half * sgn / (half * T::n(k.unsigned_abs()) * h).tan()
                    * if k > 0 { T::one() } else { -T::one() };
            }
        }
    }
    d
}

/// Chebyshev series on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries<T> {
    pub a: T,
    pub b: T,
    pub coeffs: Vec<T>,
}

impl<T: Real> ChebSeries<T> {
    /// Interpolant of `f` at `n` first-kind Chebyshev points.
    pub fn interpolate(f: impl Fn(T) -> T, a: T, b: T, n: usize) -> Self {
        let vals: Vec<T> = cheb1_nodes(n, a, b).into_iter().map(f).collect();
        ChebSeries { a, b, coeffs: cheb1_coeffs(&vals) }
    }

    #[inline]
    pub fn to_unit(&self, x: T) -> T {
        (T::c(2.0) * x - self.a - self.b) / (self.b - self.a)
    }

    pub fn eval(&self, x: T) -> T {
        cheb_eval(&self.coeffs, self.to_unit(x))
    }

    /// Antiderivative in `x` vanishing at `a`.
    pub fn integral(&self) -> Self {
        let h = T::c(0.5) * (self.b - self.a);
        let mut c = cheb_integrate(&self.coeffs);
        c.iter_mut().for_each(|v| *v *= h);
        ChebSeries { a: self.a, b: self.b, coeffs: c }
    }

    /// Derivative in `x`.
    pub fn derivative(&self) -> Self {
        let h = T::c(0.5) * (self.b - self.a);
        let mut c = cheb_derivative(&self.coeffs);
        c.iter_mut().for_each(|v| *v /= h);
        ChebSeries { a: self.a, b: self.b, coeffs: c }
    }

    /// Largest coefficient magnitude among the last `k`, relative to the largest overall.
    pub fn tail_ratio(&self, k: usize) -> T {
        let head = self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()));
        if head == T::zero() {
            return T::zero();
        }
        let k = k.min(self.coeffs.len());
        let tail = self.coeffs[self.coeffs.len() - k..]
            .iter()
            .fold(T::zero(), |m, c| m.max(c.abs()));
        tail / head
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_row_sums_to_one_one_period_off_a_node() {
        for n in [16, 20, 24, 40] {
            let mut row = vec![0.0; n];
            for t in [-std::f64::consts::FRAC_PI_2, -std::f64::consts::PI, 1e-17, 2.0 * std::f64::consts::PI - 1e-16] {
                trig_row(n, t, &mut row);
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-13, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn chebyshev_interpolation_is_exact_for_polynomials() {
        let n = 9;
        let x = cheb1_nodes(n, -0.5f64, 2.0);
        let w = cheb1_bary_weights::<f64>(n);
        let p = |t: f64| 1.0 - 2.0 * t + t.powi(5) - 0.1 * t.powi(8);
        let vals: Vec<f64> = x.iter().map(|&t| p(t)).collect();
        let mut row = vec![0.0; n];
        for &t in &[-0.4, 0.3, 1.9, 2.0] {
            lagrange_row(&x, &w, t, &mut row);
            let v: f64 = row.iter().zip(&vals).map(|(a, b)| a * b).sum();
            assert!((v - p(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn lobatto_interpolation() {
        let n = 7;
        let x = cheb2_nodes(n, -1.0f64, 1.0);
        let w = cheb2_bary_weights::<f64>(n);
        let vals: Vec<f64> = x.iter().map(|t| t.powi(6)).collect();
        let mut row = vec![0.0; n];
        lagrange_row(&x, &w, 0.37, &mut row);
        let v: f64 = row.iter().zip(&vals).map(|(a, b)| a * b).sum();
        assert!((v - 0.37f64.powi(6)).abs() < 1e-14);
    }

    #[test]
    fn coefficients_and_clenshaw() {
        let n = 20;
        let x = cheb1_nodes(n, -1.0f64, 1.0);
        let vals: Vec<f64> = x.iter().map(|t| (2.0 * t).cos()).collect();
        let c = cheb1_coeffs(&vals);
        for &t in &[-1.0, -0.2, 0.77, 1.0] {
            assert!((cheb_eval(&c, t) - (2.0 * t).cos()).abs() < 1e-10);
        }
        let ci = cheb_integrate(&c);
        let exact = |t: f64| ((2.0 * t).sin() - (-2.0f64).sin()) / 2.0;
        assert!((cheb_eval(&ci, 0.4) - exact(0.4)).abs() < 1e-10);
        let cd = cheb_derivative(&c);
        assert!((cheb_eval(&cd, 0.3) + 2.0 * (0.6f64).sin()).abs() < 1e-8);
    }

    #[test]
    fn series_calculus_on_interval() {
        let p = ChebSeries::interpolate(|x: f64| x.exp(), 1.0, 3.0, 24);
        assert!((p.eval(2.2) - 2.2f64.exp()).abs() < 1e-13 * 2.2f64.exp());
        let ip = p.integral();
        assert!((ip.eval(2.5) - (2.5f64.exp() - 1f64.exp())).abs() < 1e-12);
        assert!(ip.eval(1.0).abs() < 1e-14);
        assert!((p.derivative().eval(1.5) - 1.5f64.exp()).abs() < 1e-11);
        assert!(p.tail_ratio(3) < 1e-14);
    }

    #[test]
    fn fejer_integrates_polynomials() {
        let n = 10;
        let x = cheb1_nodes(n, 0.0f64, 2.0);
        let w = fejer1_weights(n, 0.0, 2.0);
        let s: f64 = x.iter().zip(&w).map(|(t, w)| w * t.powi(7)).sum();
        assert!((s - 2f64.powi(8) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn trig_interpolation_reproduces_modes() {
        let n = 16;
        let t = periodic_nodes::<f64>(n);
        let f = |x: f64| 1.0 + (3.0 * x).sin() - 0.5 * (7.0 * x).cos();
        let vals: Vec<f64> = t.iter().map(|&x| f(x)).collect();
        let mut row = vec![0.0; n];
        for &x in &[0.0, 0.3, 2.5, 6.0, -1.0] {
            trig_row(n, x, &mut row);
            let v: f64 = row.iter().zip(&vals).map(|(a, b)| a * b).sum();
            assert!((v - f(x)).abs() < 1e-13, "{x}");
        }
    }

    #[test]
    fn periodic_derivative() {
        let n = 24;
        let t = periodic_nodes::<f64>(n);
        let d = periodic_diff_matrix::<f64>(n);
        let vals: Vec<f64> = t.iter().map(|&x| (2.0 * x).sin() + (5.0 * x).cos()).collect();
        for i in 0..n {
            let v: f64 = (0..n).map(|j| d[i * n + j] * vals[j]).sum();
            let e = 2.0 * (2.0 * t[i]).cos() - 5.0 * (5.0 * t[i]).sin();
            assert!((v - e).abs() < 1e-11);
        }
    }
}
