//! Potentials of the Laplacian in 2D with `N(x, y) = (1/2π) log|x - y|`:
//! the volume potential `V`, the weakly singular operator `F_s`, the
//! boundary operators `S`, `D` and the domain potentials `𝒮`, `𝒟`.
//!
//! With the normal pointing out of Ω, `𝒟[1] = 1` inside, `D[1] = 1/2` on a
//! single curve, and the interior limit of `𝒟[ζ]` is `ζ/2 + D[ζ]`.

#![allow(non_snake_case)]

use num_complex::Complex;
use rayon::prelude::*;

use crate::geometry::{boundary_nodes, BoundaryCurve, BoundaryNode, DomainGeometry, Orientation, Point, VolumeGrid};
use crate::linalg::{Lu, Matrix};
use crate::quadrature::{kress_log_weights, VolumeKernel, VolumeQuadrature};
use crate::special_fn::FractionalOrder;
use crate::spectral::periodic_diff_matrix;
use crate::{Error, Real, Result};

/// `N(x, y) = (1/2π) log|x - y|`.
pub fn laplace_fundamental<T: Real>(x: Point<T>, y: Point<T>) -> T {
    (x[0] - y[0]).hypot(x[1] - y[1]).ln() / T::TAU()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    V,
    Fs,
    SBoundary,
    DBoundary,
    SDomain,
    DDomain,
}

/// Dense discretization of one operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator<T> {
    pub matrix: Matrix<T>,
    pub row_targets: Vec<Point<T>>,
    pub col_sources: Vec<Point<T>>,
    pub kind: OperatorKind,
}

impl<T: Real> DiscreteOperator<T> {
    fn new(matrix: Matrix<T>, row_targets: Vec<Point<T>>, col_sources: Vec<Point<T>>, kind: OperatorKind) -> Result<Self> {
        if matrix.rows() != row_targets.len() || matrix.cols() != col_sources.len() {
            return Err(Error::InvalidParameter(format!(
                "{kind:?} matrix is {}x{} for {} targets and {} sources",
                matrix.rows(),
                matrix.cols(),
                row_targets.len(),
                col_sources.len()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::QuadratureFailure(format!("non-finite entries in {kind:?}")));
        }
        Ok(Self { matrix, row_targets, col_sources, kind })
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.matrix.matvec(x)
    }
}

/// Nyström nodes on every boundary curve, `n_per_curve` per curve, outer
/// curve first.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh<T> {
    pub domain: DomainGeometry<T>,
    pub n_per_curve: usize,
    pub nodes: Vec<BoundaryNode<T>>,
    /// Curve index of each node.
    pub curve: Vec<usize>,
    /// Trapezoid weights `|x'(t)| 2π/n`.
    pub weights: Vec<T>,
}

impl<T: Real> BoundaryMesh<T> {
    pub fn new(domain: &DomainGeometry<T>, n_per_curve: usize) -> Result<Self> {
        let mut nodes = Vec::new();
        let mut curve = Vec::new();
        for (k, c) in domain.curves.iter().enumerate() {
            let ns = boundary_nodes(c, n_per_curve)?;
            curve.extend(std::iter::repeat(k).take(ns.len()));
            nodes.extend(ns);
        }
        let h = T::TAU() / T::n(n_per_curve);
        let weights = nodes.iter().map(|n| n.speed * h).collect();
        Ok(Self { domain: domain.clone(), n_per_curve, nodes, curve, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn positions(&self) -> Vec<Point<T>> {
        self.nodes.iter().map(|n| n.position).collect()
    }

    /// Node index range of curve `k`.
    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        k * self.n_per_curve..(k + 1) * self.n_per_curve
    }

    fn curve_of(&self, k: usize) -> &BoundaryCurve<T> {
        &self.domain.curves[k]
    }
}

fn volume_rows<T: Real>(
    quad: &VolumeQuadrature<T>,
    grid: &VolumeGrid<T>,
    targets: &[Point<T>],
) -> Result<Matrix<T>> {
    let rows: Vec<Result<Vec<T>>> = targets.par_iter().map(|&x| quad.grid_row(grid, x)).collect();
    let mut m = Matrix::zeros(targets.len(), grid.len());
    for (i, r) in rows.into_iter().enumerate() {
        m.row_mut(i).copy_from_slice(&r?);
    }
    Ok(m)
}

/// `V[f](x) = ∫ N(x, y) f(y) dy` acting on values of `f` at the grid nodes.
pub fn assemble_V<T: Real>(
    domain: &DomainGeometry<T>,
    grid: &VolumeGrid<T>,
    targets: &[Point<T>],
) -> Result<DiscreteOperator<T>> {
    // the order is unused by the log kernel
    let quad = VolumeQuadrature::new(domain, VolumeKernel::NewtonianLog, FractionalOrder::new(T::c(0.5))?)?;
    let m = volume_rows(&quad, grid, targets)?;
    DiscreteOperator::new(m, targets.to_vec(), grid.nodes.clone(), OperatorKind::V)
}

/// `F_s[φ](x) = ∫ d(y)^s φ(y) |x - y|^{-2s} dy` acting on values of `φ`.
pub fn assemble_Fs<T: Real>(
    domain: &DomainGeometry<T>,
    grid: &VolumeGrid<T>,
    targets: &[Point<T>],
    s: FractionalOrder<T>,
) -> Result<DiscreteOperator<T>> {
    let quad = VolumeQuadrature::new(domain, VolumeKernel::RieszPowerDs, s)?;
    let m = volume_rows(&quad, grid, targets)?;
    DiscreteOperator::new(m, targets.to_vec(), grid.nodes.clone(), OperatorKind::Fs)
}

/// Single-layer operator on the boundary, Kress quadrature on each curve
/// and the trapezoid rule between curves.
pub fn assemble_boundary_S<T: Real>(mesh: &BoundaryMesh<T>) -> Result<DiscreteOperator<T>> {
    let n = mesh.n_per_curve;
    let kress = kress_log_weights::<T>(n)?;
    let h = T::TAU() / T::n(n);
    let nb = mesh.len();
    let half = T::c(0.5);
    let inv = T::one() / T::TAU();
    let m = Matrix::from_fn(nb, nb, |i, j| {
        let (a, b) = (&mesh.nodes[i], &mesh.nodes[j]);
        if mesh.curve[i] != mesh.curve[j] {
            return inv * (a.position[0] - b.position[0]).hypot(a.position[1] - b.position[1]).ln() * mesh.weights[j];
        }
        // log|x - y| = ½ log(4 sin²((t-τ)/2)) + ½ log(|x - y|² / (4 sin²((t-τ)/2)))
        let smooth = if i == j {
            (a.speed * a.speed).ln()
        } else {
            let sn = (half * (a.t - b.t)).sin();
            let r2 = (a.position[0] - b.position[0]).powi(2) + (a.position[1] - b.position[1]).powi(2);
            (r2 / (T::c(4.0) * sn * sn)).ln()
        };
        let (li, lj) = (i % n, j % n);
        inv * half * (kress.weight(li, lj) + h * smooth) * b.speed
    });
    let pos = mesh.positions();
    DiscreteOperator::new(m, pos.clone(), pos, OperatorKind::SBoundary)
}

/// Double-layer operator on the boundary: trapezoid rule with the
/// continuous diagonal limit `-(x''·ν)/(4π|x'|²)`.
pub fn assemble_boundary_D<T: Real>(mesh: &BoundaryMesh<T>) -> Result<DiscreteOperator<T>> {
    let nb = mesh.len();
    let inv = T::one() / T::TAU();
    let m = Matrix::from_fn(nb, nb, |i, j| {
        let (a, b) = (&mesh.nodes[i], &mesh.nodes[j]);
        if i == j {
            let dd = mesh.curve_of(mesh.curve[i]).second_derivative(a.t);
            let xn = dd[0] * a.normal[0] + dd[1] * a.normal[1];
            return -xn / (T::c(4.0) * T::PI() * a.speed * a.speed) * mesh.weights[j];
        }
        let v = [b.position[0] - a.position[0], b.position[1] - a.position[1]];
        let r2 = v[0] * v[0] + v[1] * v[1];
        inv * (v[0] * b.normal[0] + v[1] * b.normal[1]) / r2 * mesh.weights[j]
    });
    let pos = mesh.positions();
    DiscreteOperator::new(m, pos.clone(), pos, OperatorKind::DBoundary)
}

fn check_interior<T: Real>(domain: &DomainGeometry<T>, targets: &[Point<T>]) -> Result<()> {
    for x in targets {
        if !domain.contains(*x) {
            return Err(Error::TargetOutside(x[0].f64(), x[1].f64()));
        }
    }
    Ok(())
}

/// Cauchy-integral form of the double layer. With `c_j = x'(t_j) 2π/n`,
/// `v(z) = (1/2πi) ∮ ζ(y)/(y - z) dy` is holomorphic in Ω and `𝒟[ζ] = Re v`.
/// Its interior boundary values are linear in ζ; `v` at interior points
/// follows from the barycentric Cauchy formula, which stays accurate up to
/// the boundary.
struct CauchyDl<T> {
    nodes: Vec<Complex<T>>,
    c: Vec<Complex<T>>,
    /// Boundary values of `v` per unit ζ, row-major `N_b × N_b`.
    trace: Vec<Complex<T>>,
}

impl<T: Real> CauchyDl<T> {
    fn new(mesh: &BoundaryMesh<T>) -> Self {
        let n = mesh.n_per_curve;
        let nb = mesh.len();
        let h = T::TAU() / T::n(n);
        let nodes: Vec<Complex<T>> = mesh.nodes.iter().map(|p| Complex::new(p.position[0], p.position[1])).collect();
        let c: Vec<Complex<T>> = mesh
            .nodes
            .iter()
            .zip(&mesh.curve)
            .map(|(p, &k)| {
                let d = mesh.curve_of(k).derivative(p.t);
                Complex::new(d[0], d[1]) * h
            })
            .collect();
        let diff = periodic_diff_matrix::<T>(n);
        let i2pi = Complex::new(T::zero(), -T::one() / T::TAU());
        let mut trace = vec![Complex::new(T::zero(), T::zero()); nb * nb];
        for i in 0..nb {
            let row = &mut trace[i * nb..(i + 1) * nb];
            // ζ_i (1/2πi) PV∮ dy/(y - y_i) = ζ_i/2, plus ζ_i/2 from the jump
            let mut diag = Complex::new(T::one(), T::zero());
            for j in 0..nb {
                if j == i {
                    continue;
                }
                let t = c[j] / (nodes[j] - nodes[i]) * i2pi;
                row[j] += t;
                diag -= t;
            }
            row[i] += diag;
            // limit of (ζ_j - ζ_i) c_j / (y_j - y_i) at j = i is ζ'(t_i) h
            let k = mesh.curve[i];
            let li = i % n;
            for lj in 0..n {
                row[k * n + lj] += i2pi * h * diff[li * n + lj];
            }
        }
        Self { nodes, c, trace }
    }

    /// Barycentric weights `b_j(z)` with `v(z) = Σ b_j v_j`.
    fn bary(&self, z: Point<T>) -> Vec<Complex<T>> {
        let z = Complex::new(z[0], z[1]);
        let mut w: Vec<Complex<T>> = self.c.iter().zip(&self.nodes).map(|(&c, &y)| c / (y - z)).collect();
        let total: Complex<T> = w.iter().fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b);
        for v in &mut w {
            *v = *v / total;
        }
        w
    }

    /// Row of `𝒟` at an interior target acting on ζ.
    fn row(&self, z: Point<T>) -> Vec<T> {
        let b = self.bary(z);
        let nb = self.nodes.len();
        let mut out = vec![T::zero(); nb];
        for (j, bj) in b.iter().enumerate() {
            let tr = &self.trace[j * nb..(j + 1) * nb];
            for (o, t) in out.iter_mut().zip(tr) {
                *o += (bj * t).re;
            }
        }
        out
    }
}

/// Rows of `𝒟` at interior targets.
pub fn assemble_DL_domain<T: Real>(mesh: &BoundaryMesh<T>, targets: &[Point<T>]) -> Result<DiscreteOperator<T>> {
    check_interior(&mesh.domain, targets)?;
    let dl = CauchyDl::new(mesh);
    let rows: Vec<Vec<T>> = targets.par_iter().map(|&z| dl.row(z)).collect();
    let mut m = Matrix::zeros(targets.len(), mesh.len());
    for (i, r) in rows.into_iter().enumerate() {
        m.row_mut(i).copy_from_slice(&r);
    }
    DiscreteOperator::new(m, targets.to_vec(), mesh.positions(), OperatorKind::DDomain)
}

/// `𝒟[ζ]` at interior targets.
pub fn eval_DL_domain<T: Real>(mesh: &BoundaryMesh<T>, zeta: &[T], targets: &[Point<T>]) -> Result<Vec<T>> {
    check_len(mesh, zeta)?;
    check_interior(&mesh.domain, targets)?;
    let dl = CauchyDl::new(mesh);
    let nb = mesh.len();
    let v: Vec<Complex<T>> = (0..nb)
        .map(|i| {
            dl.trace[i * nb..(i + 1) * nb]
                .iter()
                .zip(zeta)
                .fold(Complex::new(T::zero(), T::zero()), |a, (t, &z)| a + *t * z)
        })
        .collect();
    Ok(targets
        .par_iter()
        .map(|&z| dl.bary(z).iter().zip(&v).map(|(b, v)| (b * v).re).sum())
        .collect())
}

fn check_len<T>(mesh: &BoundaryMesh<T>, density: &[T]) -> Result<()> {
    if density.len() != mesh.nodes.len() {
        return Err(Error::InvalidParameter(format!(
            "density has {} values for {} boundary nodes",
            density.len(),
            mesh.nodes.len()
        )));
    }
    Ok(())
}

/// Real trigonometric interpolant of equispaced samples on `[0, 2π)`.
#[derive(Debug, Clone)]
struct TrigSeries<T> {
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Real> TrigSeries<T> {
    fn new(values: &[T]) -> Self {
        let n = values.len();
        let m = n / 2;
        let h = T::TAU() / T::n(n);
        let scale = T::c(2.0) / T::n(n);
        let mut a = vec![T::zero(); m + 1];
        let mut b = vec![T::zero(); m + 1];
        for k in 0..=m {
            for (j, &v) in values.iter().enumerate() {
                let arg = h * T::n((k * j) % n);
                a[k] += v * arg.cos();
                b[k] += v * arg.sin();
            }
            a[k] *= scale;
            b[k] *= scale;
        }
        Self { a, b }
    }

    fn eval(&self, t: T) -> T {
        let m = self.a.len() - 1;
        let half = T::c(0.5);
        let (s1, c1) = t.sin_cos();
        let (mut ck, mut sk) = (T::one(), T::zero());
        let mut total = half * self.a[0];
        for k in 1..=m {
            let c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = c;
            let w = if k == m { half } else { T::one() };
            total += w * (self.a[k] * ck + if k == m { T::zero() } else { self.b[k] * sk });
        }
        total
    }
}

/// Curve parameter of the point closest to `x`, and the distance.
fn closest_point<T: Real>(curve: &BoundaryCurve<T>, x: Point<T>, t0: T) -> (T, T) {
    let f = |t: T| {
        let y = curve.position(t);
        let d = curve.derivative(t);
        let dd = curve.second_derivative(t);
        let v = [y[0] - x[0], y[1] - x[1]];
        (v[0] * d[0] + v[1] * d[1], d[0] * d[0] + d[1] * d[1] + v[0] * dd[0] + v[1] * dd[1])
    };
    let mut t = t0;
    for _ in 0..30 {
        let (g, dg) = f(t);
        if dg <= T::zero() {
            break;
        }
        let step = g / dg;
        t -= step.max(-T::c(0.2)).min(T::c(0.2));
        if step.abs() < T::c(1e-15) {
            break;
        }
    }
    let y = curve.position(t);
    (t, (y[0] - x[0]).hypot(y[1] - x[1]))
}

const MAX_UPSAMPLE_LEVEL: usize = 14;

/// `𝒮[β]` at interior targets. Each curve's contribution uses the
/// trapezoid rule on a dyadic refinement of the Nyström nodes, with β
/// interpolated trigonometrically, fine enough that the nearest complex
/// singularity of the log kernel is resolved.
pub fn eval_SL_domain<T: Real>(mesh: &BoundaryMesh<T>, beta: &[T], targets: &[Point<T>]) -> Result<Vec<T>> {
    check_len(mesh, beta)?;
    check_interior(&mesh.domain, targets)?;
    let n = mesh.n_per_curve;
    let nc = mesh.domain.curves.len();
    // required level per target and curve
    let levels: Vec<Vec<usize>> = targets
        .par_iter()
        .map(|&x| {
            (0..nc)
                .map(|k| {
                    let r = mesh.range(k);
                    let (jmin, _) = r
                        .clone()
                        .map(|j| (j, (mesh.nodes[j].position[0] - x[0]).hypot(mesh.nodes[j].position[1] - x[1])))
                        .fold((r.start, T::infinity()), |a, b| if b.1 < a.1 { b } else { a });
                    let curve = mesh.curve_of(k);
                    let (t, dist) = closest_point(curve, x, mesh.nodes[jmin].t);
                    // the trapezoid error decays like exp(-n δ/|x'|)
                    let need = T::c(36.0) * curve.speed(t) / dist.max(T::min_positive_value());
                    let mut level = 0;
                    while level < MAX_UPSAMPLE_LEVEL && T::n(n << level) < need {
                        level += 1;
                    }
                    level
                })
                .collect()
        })
        .collect();
    let top = levels.iter().flatten().copied().max().unwrap_or(0);
    // (position, β |x'| h) per level and curve
    let mut fine: Vec<Vec<Vec<(Point<T>, T)>>> = Vec::with_capacity(nc);
    for k in 0..nc {
        let curve = mesh.curve_of(k);
        let series = TrigSeries::new(&beta[mesh.range(k)]);
        let mut per_level = Vec::new();
        let max_needed = levels.iter().map(|l| l[k]).max().unwrap_or(0).min(top);
        for level in 0..=max_needed {
            let m = n << level;
            let h = T::TAU() / T::n(m);
            let pts: Vec<(Point<T>, T)> = (0..m)
                .into_par_iter()
                .map(|j| {
                    let t = h * T::n(j);
                    let b = if level == 0 { beta[k * n + j] } else { series.eval(t) };
                    (curve.position(t), b * curve.speed(t) * h)
                })
                .collect();
            per_level.push(pts);
        }
        fine.push(per_level);
    }
    let inv = T::one() / T::TAU();
    Ok(targets
        .par_iter()
        .zip(&levels)
        .map(|(&x, lv)| {
            let mut total = T::zero();
            for k in 0..nc {
                for &(y, w) in &fine[k][lv[k]] {
                    total += w * (y[0] - x[0]).hypot(y[1] - x[1]).ln();
                }
            }
            total * inv
        })
        .collect())
}

/// Single-layer densities whose boundary potentials are the component
/// indicators of the holes.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleBasis<T> {
    /// `β_j` at all boundary nodes, one vector per hole.
    pub densities: Vec<Vec<T>>,
    /// Max over holes and nodes of `|S[β_j] - indicator_j|`.
    pub residual: T,
}

impl<T: Real> HoleBasis<T> {
    pub fn len(&self) -> usize {
        self.densities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities.is_empty()
    }
}

/// Solves `S[β_j] = 1` on hole `j`, `0` on the other components.
///
/// The discrete `S` is singular when the logarithmic capacity of ∂Ω is 1
/// (for example an outer unit circle). The bordered system
/// `S β + c = χ_j`, `Σ w β = 0` is regular in any case; a nonzero `c` is
/// removed with the equilibrium density (`S β_e + c_e = 0`, `Σ w β_e = 1`).
/// If `c_e` vanishes the range condition makes `c` vanish too, unless the
/// system is inconsistent, which is reported as
/// [`Error::CapacityDegenerate`].
pub fn solve_hole_basis<T: Real>(mesh: &BoundaryMesh<T>) -> Result<HoleBasis<T>> {
    let n_h = mesh.domain.n_h;
    if n_h == 0 {
        return Ok(HoleBasis { densities: Vec::new(), residual: T::zero() });
    }
    let s = assemble_boundary_S(mesh)?;
    let nb = mesh.len();
    let mut a = Matrix::zeros(nb + 1, nb + 1);
    for i in 0..nb {
        a.row_mut(i)[..nb].copy_from_slice(s.matrix.row(i));
        a[(i, nb)] = T::one();
        a[(nb, i)] = mesh.weights[i];
    }
    let lu = Lu::new(a)?;
    let mut eq_rhs = vec![T::zero(); nb + 1];
    eq_rhs[nb] = T::one();
    let eq = lu.solve(&eq_rhs);
    let c_eq = eq[nb];
    let tol = T::c(1e-10);
    let mut densities = Vec::with_capacity(n_h);
    let mut residual = T::zero();
    for hole in 0..n_h {
        let k = mesh
            .domain
            .curves
            .iter()
            .enumerate()
            .filter(|(_, c)| c.orientation == Orientation::Hole)
            .nth(hole)
            .map(|(k, _)| k)
            .ok_or_else(|| Error::Geometry(format!("hole {hole} has no curve")))?;
        let mut rhs = vec![T::zero(); nb + 1];
        for i in mesh.range(k) {
            rhs[i] = T::one();
        }
        let sol = lu.solve(&rhs);
        let c = sol[nb];
        let mut beta = sol[..nb].to_vec();
        if c.abs() > tol {
            if c_eq.abs() <= tol {
                return Err(Error::CapacityDegenerate);
            }
            let r = c / c_eq;
            for (b, e) in beta.iter_mut().zip(&eq) {
                *b -= r * *e;
            }
        }
        let sb = s.apply(&beta);
        for (i, v) in sb.iter().enumerate() {
            let target = if mesh.curve[i] == k { T::one() } else { T::zero() };
            residual = residual.max((*v - target).abs());
        }
        densities.push(beta);
    }
    Ok(HoleBasis { densities, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_annulus, make_disc, make_kite};

    fn smooth_density(mesh: &BoundaryMesh<f64>) -> Vec<f64> {
        mesh.nodes.iter().map(|p| 1.0 + 0.3 * (2.0 * p.t).cos() - 0.2 * (3.0 * p.t).sin() + 0.1 * p.t.cos()).collect()
    }

    #[test]
    fn circle_identities() {
        let mesh = BoundaryMesh::new(&make_disc(1.0f64).unwrap(), 32).unwrap();
        let ones = vec![1.0; mesh.len()];
        let s = assemble_boundary_S(&mesh).unwrap();
        let d = assemble_boundary_D(&mesh).unwrap();
        for v in s.apply(&ones) {
            assert!(v.abs() < 1e-14, "{v}");
        }
        for v in d.apply(&ones) {
            assert!((v - 0.5).abs() < 1e-14, "{v}");
        }
        // diagonal of D is |x'| h κ/(4π); doubling R halves the kernel value
        let mesh2 = BoundaryMesh::new(&make_disc(2.0f64).unwrap(), 32).unwrap();
        let d2 = assemble_boundary_D(&mesh2).unwrap();
        let k1 = d.matrix[(0, 0)] / mesh.weights[0];
        let k2 = d2.matrix[(0, 0)] / mesh2.weights[0];
        assert!((k1 - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((k2 - 0.5 * k1).abs() < 1e-15);
    }

    #[test]
    fn double_layer_gauss_identity() {
        for dom in [make_kite().unwrap(), make_disc(1.5f64).unwrap()] {
            let mesh = BoundaryMesh::new(&dom, 128).unwrap();
            let ones = vec![1.0; mesh.len()];
            let d = assemble_boundary_D(&mesh).unwrap();
            for v in d.apply(&ones) {
                assert!((v - 0.5).abs() < 1e-12, "{v}");
            }
            let targets = [[0.1, 0.2], [-0.5, 0.9], [0.99 * dom.curves[0].position(0.3)[0], 0.99 * dom.curves[0].position(0.3)[1]]];
            for v in eval_DL_domain(&mesh, &ones, &targets).unwrap() {
                assert!((v - 1.0).abs() < 1e-12, "{v}");
            }
        }
    }

    #[test]
    fn annulus_gauss_identity_and_hole_basis() {
        let dom = make_annulus(0.5f64, 1.0).unwrap();
        let mesh = BoundaryMesh::new(&dom, 64).unwrap();
        let ones = vec![1.0; mesh.len()];
        let d = assemble_boundary_D(&mesh).unwrap();
        // Gauss: every boundary point of Ω sees ½
        for (i, v) in d.apply(&ones).iter().enumerate() {
            assert!((v - 0.5).abs() < 1e-13, "{i}: {v}");
        }
        let hb = solve_hole_basis(&mesh).unwrap();
        assert_eq!(hb.len(), 1);
        assert!(hb.residual < 1e-10, "{}", hb.residual);
        // constant on each circle
        let b = &hb.densities[0];
        for k in 0..2 {
            let r = mesh.range(k);
            let v0 = b[r.start];
            assert!(b[r].iter().all(|v| (v - v0).abs() < 1e-10));
        }
        // 𝒮[β₁] is harmonic with data 1 on the hole, 0 outside:
        // log(r)/log(r₁) between the circles
        let targets: Vec<Point<f64>> = [0.51, 0.6, 0.75, 0.9, 0.999].iter().map(|&r| [r * 0.6, r * 0.8]).collect();
        let vals = eval_SL_domain(&mesh, b, &targets).unwrap();
        for (x, v) in targets.iter().zip(vals) {
            let r = x[0].hypot(x[1]);
            let e = r.ln() / 0.5f64.ln();
            assert!((v - e).abs() < 1e-11, "r={r}: {v} vs {e}");
        }
    }

    #[test]
    fn no_holes_gives_empty_basis() {
        let mesh = BoundaryMesh::<f64>::new(&make_kite().unwrap(), 32).unwrap();
        assert!(solve_hole_basis(&mesh).unwrap().is_empty());
    }

    /// Direct sums with many points, valid away from the boundary.
    fn brute_layers(mesh: &BoundaryMesh<f64>, x: Point<f64>, m: usize) -> (f64, f64) {
        let mut sl = 0.0;
        let mut dl = 0.0;
        for (k, c) in mesh.domain.curves.iter().enumerate() {
            let r = mesh.range(k);
            let series = TrigSeries::new(&smooth_density(mesh)[r]);
            let h = std::f64::consts::TAU / m as f64;
            for j in 0..m {
                let t = h * j as f64;
                let y = c.position(t);
                let nu = c.normal(t);
                let w = series.eval(t) * c.speed(t) * h;
                let v = [y[0] - x[0], y[1] - x[1]];
                let r2 = v[0] * v[0] + v[1] * v[1];
                sl += w * 0.5 * r2.ln() / std::f64::consts::TAU;
                dl += w * (v[0] * nu[0] + v[1] * nu[1]) / r2 / std::f64::consts::TAU;
            }
        }
        (sl, dl)
    }

    #[test]
    fn domain_potentials_match_direct_sums() {
        for dom in [make_kite().unwrap(), make_annulus(0.4f64, 1.2).unwrap()] {
            let mesh = BoundaryMesh::new(&dom, 128).unwrap();
            let zeta = smooth_density(&mesh);
            let targets: Vec<Point<f64>> =
                [(0.3, 0.5), (2.0, 0.4), (-1.0, 0.5)].iter().map(|&(th, f)| {
                    let (lo, hi) = dom.rho_range();
                    dom.to_physical(th, lo + f * (hi - lo))
                }).collect();
            let sl = eval_SL_domain(&mesh, &zeta, &targets).unwrap();
            let dl = eval_DL_domain(&mesh, &zeta, &targets).unwrap();
            let dlm = assemble_DL_domain(&mesh, &targets).unwrap().apply(&zeta);
            for (i, &x) in targets.iter().enumerate() {
                let (s, d) = brute_layers(&mesh, x, 4096);
                assert!((sl[i] - s).abs() < 1e-12, "SL {}: {} vs {s}", dom.name(), sl[i]);
                assert!((dl[i] - d).abs() < 1e-12, "DL {}: {} vs {d}", dom.name(), dl[i]);
                assert!((dlm[i] - d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jump_relations_on_kite() {
        let dom = make_kite().unwrap();
        let mesh = BoundaryMesh::new(&dom, 128).unwrap();
        let zeta = smooth_density(&mesh);
        let s = assemble_boundary_S(&mesh).unwrap().apply(&zeta);
        let d = assemble_boundary_D(&mesh).unwrap().apply(&zeta);
        for i in [0, 17, 64, 100] {
            let p = mesh.nodes[i];
            for eps in [1e-2, 1e-4, 1e-6] {
                let z = [p.position[0] - eps * p.normal[0], p.position[1] - eps * p.normal[1]];
                let dl = eval_DL_domain(&mesh, &zeta, &[z]).unwrap()[0];
                let sl = eval_SL_domain(&mesh, &zeta, &[z]).unwrap()[0];
                let dl_lim = 0.5 * zeta[i] + d[i];
                // 𝒟 and 𝒮 are Lipschitz up to the boundary
                assert!((dl - dl_lim).abs() < 20.0 * eps + 1e-11, "DL i={i} eps={eps}: {:e}", dl - dl_lim);
                assert!((sl - s[i]).abs() < 20.0 * eps + 1e-11, "SL i={i} eps={eps}: {:e}", sl - s[i]);
            }
        }
    }

    #[test]
    fn layer_potentials_are_harmonic() {
        let dom = make_kite().unwrap();
        let mesh = BoundaryMesh::new(&dom, 128).unwrap();
        let zeta = smooth_density(&mesh);
        let h = 1e-3;
        for x in [[0.1, 0.3], [-0.8, 0.7], [0.0, -0.9]] {
            let pts = [x, [x[0] + h, x[1]], [x[0] - h, x[1]], [x[0], x[1] + h], [x[0], x[1] - h]];
            for vals in [eval_SL_domain(&mesh, &zeta, &pts).unwrap(), eval_DL_domain(&mesh, &zeta, &pts).unwrap()] {
                let lap = (vals[1] + vals[2] + vals[3] + vals[4] - 4.0 * vals[0]) / (h * h);
                assert!(lap.abs() < 1e-4, "{lap}");
            }
        }
    }

    #[test]
    fn volume_potential_of_one_on_disc() {
        let dom = make_disc(1.0f64).unwrap();
        let grid = VolumeGrid::new(&dom, 12, 16).unwrap();
        let v = assemble_V(&dom, &grid, &[[0.0, 0.0], [0.3, 0.4]]).unwrap();
        let ones = vec![1.0; grid.len()];
        let r = v.apply(&ones);
        assert!((r[0] + 0.25).abs() < 1e-13);
        assert!((r[1] - (0.25 - 1.0) / 4.0).abs() < 1e-13);
        assert!(matches!(assemble_V(&dom, &grid, &[[1.5, 0.0]]), Err(Error::TargetOutside(..))));
    }

    #[test]
    fn fs_of_odd_function_is_odd() {
        let dom = make_disc(1.0f64).unwrap();
        let grid = VolumeGrid::new(&dom, 16, 32).unwrap();
        let s = FractionalOrder::new(0.5).unwrap();
        let targets = [[0.3, 0.2], [-0.3, 0.2], [0.0, 0.0]];
        let fs = assemble_Fs(&dom, &grid, &targets, s).unwrap();
        let phi: Vec<f64> = grid.nodes.iter().map(|y| y[0] * (1.0 + y[1] * y[1])).collect();
        let v = fs.apply(&phi);
        assert!((v[0] + v[1]).abs() < 1e-12 && v[2].abs() < 1e-12, "{v:?}");
        let ones = vec![1.0; grid.len()];
        let c = fs.apply(&ones)[2];
        let e = std::f64::consts::PI.powi(2) / 2.0;
        assert!((c - e).abs() < 1e-12, "{c}");
    }
}
