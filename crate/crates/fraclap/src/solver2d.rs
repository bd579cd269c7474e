//! The 2D problem: unknowns `(φ, ζ, a)` with `u = d^s φ`, collocated as
//!
//! ```text
//! 𝒟[ζ](x) + Σ a_j 𝒮[β_j](x) - C F_s[φ](x) = -V[f](x)        at volume nodes,
//! ζ/2 + D[ζ](x) + Σ a_j S[β_j](x) - C F_s[φ](x) = -V[f](x)  at boundary nodes,
//! ```
//!
//! plus one gauge row per hole.

use std::sync::Arc;

use rayon::prelude::*;

use crate::geometry::{DomainGeometry, Point, VolumeGrid};
use crate::linalg::{norm_inf, Lu, Matrix};
use crate::potentials::{
    assemble_DL_domain, assemble_boundary_D, assemble_boundary_S, eval_DL_domain, eval_SL_domain, solve_hole_basis,
    BoundaryMesh, HoleBasis,
};
use crate::quadrature::{VolumeKernel, VolumeQuadrature};
use crate::special_fn::{coeff_C_ns, FractionalOrder};
use crate::{Error, Real, Result};

/// Right-hand side callable.
pub type Rhs2D<T> = Arc<dyn Fn(Point<T>) -> T + Send + Sync>;

/// `(-Δ)^s u = f` in Ω, `u = 0` outside.
#[derive(Clone)]
pub struct Problem2D<T> {
    pub domain: DomainGeometry<T>,
    pub s: FractionalOrder<T>,
    pub f: Rhs2D<T>,
}

impl<T: Real> Problem2D<T> {
    pub fn new(domain: DomainGeometry<T>, s: FractionalOrder<T>, f: impl Fn(Point<T>) -> T + Send + Sync + 'static) -> Self {
        Self { domain, s, f: Arc::new(f) }
    }
}

impl<T: Real> std::fmt::Debug for Problem2D<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem2D")
            .field("domain", &self.domain.name())
            .field("s", &self.s)
            .finish_non_exhaustive()
    }
}

/// Removes the null space of ζ on multiply connected domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Gauge {
    /// `∮ ζ ds = 0` over each hole.
    #[default]
    HoleMean,
    /// ζ vanishes at the first node of each hole.
    HoleNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution2D {
    pub n_rho: usize,
    pub n_theta: usize,
    /// Nyström nodes per boundary curve.
    pub n_boundary: usize,
}

impl Resolution2D {
    pub fn new(n_rho: usize, n_theta: usize, n_boundary: usize) -> Self {
        Self { n_rho, n_theta, n_boundary }
    }
}

/// Assembled square system.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem2D<T> {
    pub matrix: Matrix<T>,
    pub rhs: Vec<T>,
    pub n_volume: usize,
    pub n_boundary: usize,
    pub n_holes: usize,
}

impl<T> LinearSystem2D<T> {
    pub fn size(&self) -> usize {
        self.n_volume + self.n_boundary + self.n_holes
    }
}

/// Rows of `-C F_s` and values of `-V[f]` at targets given in reference
/// coordinates.
fn volume_part<T: Real>(
    problem: &Problem2D<T>,
    grid: &VolumeGrid<T>,
    targets: &[(T, T)],
) -> Result<(Vec<Vec<T>>, Vec<T>)> {
    let dom = &problem.domain;
    let c = coeff_C_ns(2, problem.s)?;
    let fs = VolumeQuadrature::new(dom, VolumeKernel::RieszPowerDs, problem.s)?;
    let v = VolumeQuadrature::new(dom, VolumeKernel::NewtonianLog, problem.s)?;
    let f = &problem.f;
    let out: Vec<Result<(Vec<T>, T)>> = targets
        .par_iter()
        .map(|&(theta, rho)| {
            let mut row = fs.grid_row_reference(grid, theta, rho)?;
            for w in &mut row {
                *w = -c * *w;
            }
            let vf = v.point_rule_reference(theta, rho)?.apply(|th, r| f(dom.to_physical(th, r)));
            Ok((row, -vf))
        })
        .collect();
    let mut rows = Vec::with_capacity(targets.len());
    let mut rhs = Vec::with_capacity(targets.len());
    for r in out {
        let (row, b) = r?;
        rows.push(row);
        rhs.push(b);
    }
    Ok((rows, rhs))
}

fn boundary_reference<T: Real>(mesh: &BoundaryMesh<T>) -> Vec<(T, T)> {
    mesh.nodes.iter().zip(&mesh.curve).map(|(n, &k)| mesh.domain.curve_reference(k, n.t)).collect()
}

/// Builds the block system with unknowns `[φ (N_v), ζ (N_b), a (n_h)]`.
pub fn assemble_2d<T: Real>(
    problem: &Problem2D<T>,
    grid: &VolumeGrid<T>,
    mesh: &BoundaryMesh<T>,
    basis: &HoleBasis<T>,
    gauge: Gauge,
) -> Result<LinearSystem2D<T>> {
    let nv = grid.len();
    let nb = mesh.len();
    let nh = problem.domain.n_h;
    if basis.len() != nh {
        return Err(Error::InvalidParameter(format!("{} hole densities for {nh} holes", basis.len())));
    }
    let n = nv + nb + nh;
    let mut a = Matrix::zeros(n, n);
    let mut rhs = vec![T::zero(); n];

    let mut targets = grid.reference.clone();
    targets.extend(boundary_reference(mesh));
    let (rows, b) = volume_part(problem, grid, &targets)?;
    for (i, (row, bi)) in rows.into_iter().zip(b).enumerate() {
        a.row_mut(i)[..nv].copy_from_slice(&row);
        rhs[i] = bi;
    }

    let dl = assemble_DL_domain(mesh, &grid.nodes)?;
    a.set_block(0, nv, &dl.matrix);
    let mut d = assemble_boundary_D(mesh)?.matrix;
    for i in 0..nb {
        d[(i, i)] += T::c(0.5);
    }
    a.set_block(nv, nv, &d);

    if nh > 0 {
        let s = assemble_boundary_S(mesh)?;
        for (j, beta) in basis.densities.iter().enumerate() {
            let col = nv + nb + j;
            for (i, v) in eval_SL_domain(mesh, beta, &grid.nodes)?.into_iter().enumerate() {
                a[(i, col)] = v;
            }
            for (i, v) in s.apply(beta).into_iter().enumerate() {
                a[(nv + i, col)] = v;
            }
        }
        for (j, k) in hole_curves(&problem.domain).into_iter().enumerate() {
            let row = nv + nb + j;
            let range = mesh.range(k);
            match gauge {
                Gauge::HoleMean => {
                    for i in range {
                        a[(row, nv + i)] = mesh.weights[i];
                    }
                }
                Gauge::HoleNode => a[(row, nv + range.start)] = T::one(),
            }
        }
    }
    if !a.is_finite() || rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::QuadratureFailure("non-finite entries in the 2D system".into()));
    }
    Ok(LinearSystem2D { matrix: a, rhs, n_volume: nv, n_boundary: nb, n_holes: nh })
}

fn hole_curves<T: Real>(domain: &DomainGeometry<T>) -> Vec<usize> {
    (1..domain.curves.len()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics2D<T> {
    /// `‖A x - b‖∞ / (‖A‖∞ ‖x‖∞ + ‖b‖∞)`.
    pub residual: T,
    /// Estimated 1-norm condition number.
    pub condition: T,
    pub hole_basis_residual: T,
    /// Largest violation of the gauge rows.
    pub gauge_violation: T,
    pub unknowns: usize,
}

/// Solution of the 2D system.
#[derive(Debug, Clone)]
pub struct Solution2D<T> {
    pub domain: DomainGeometry<T>,
    pub s: FractionalOrder<T>,
    pub grid: VolumeGrid<T>,
    /// `φ` at the volume nodes.
    pub phi: Vec<T>,
    pub mesh: BoundaryMesh<T>,
    /// `ζ` at the boundary nodes.
    pub zeta: Vec<T>,
    /// Coefficients of the hole densities.
    pub a: Vec<T>,
    pub basis: HoleBasis<T>,
    pub diagnostics: Diagnostics2D<T>,
}

impl<T: Real> Solution2D<T> {
    /// Interpolated `φ` at a point of the closed domain.
    pub fn phi_eval(&self, x: Point<T>) -> T {
        let (theta, rho) = self.domain.to_reference(x);
        self.grid.interpolate(&self.phi, theta, rho)
    }

    /// `u = d^s φ` inside, zero outside.
    pub fn u_eval(&self, x: Point<T>) -> T {
        if !self.domain.contains(x) {
            return T::zero();
        }
        self.domain.d_eval(x).powf(self.s.value()) * self.phi_eval(x)
    }

    /// `u` at the volume nodes.
    pub fn u_nodes(&self) -> Vec<T> {
        let s = self.s.value();
        self.grid.nodes.iter().zip(&self.phi).map(|(x, p)| self.domain.d_eval(*x).powf(s) * *p).collect()
    }

    /// Left minus right side of the volume equation at interior points, with
    /// `φ` replaced by its interpolant.
    pub fn equation_residual(&self, problem: &Problem2D<T>, targets: &[Point<T>]) -> Result<Vec<T>> {
        let refs: Vec<(T, T)> = targets
            .iter()
            .map(|&x| {
                if self.domain.contains(x) {
                    Ok(self.domain.to_reference(x))
                } else {
                    Err(Error::TargetOutside(x[0].f64(), x[1].f64()))
                }
            })
            .collect::<Result<_>>()?;
        let (rows, rhs) = volume_part(problem, &self.grid, &refs)?;
        let mut lhs = eval_DL_domain(&self.mesh, &self.zeta, targets)?;
        for (j, beta) in self.basis.densities.iter().enumerate() {
            for (l, v) in lhs.iter_mut().zip(eval_SL_domain(&self.mesh, beta, targets)?) {
                *l += self.a[j] * v;
            }
        }
        Ok(rows
            .iter()
            .zip(lhs)
            .zip(rhs)
            .map(|((row, l), b)| l + row.iter().zip(&self.phi).map(|(w, p)| *w * *p).sum::<T>() - b)
            .collect())
    }
}

/// Assembles and solves by dense LU with partial pivoting.
pub fn solve_2d<T: Real>(problem: &Problem2D<T>, res: Resolution2D) -> Result<Solution2D<T>> {
    solve_2d_with_gauge(problem, res, Gauge::default())
}

pub fn solve_2d_with_gauge<T: Real>(problem: &Problem2D<T>, res: Resolution2D, gauge: Gauge) -> Result<Solution2D<T>> {
    let dom = &problem.domain;
    let grid = VolumeGrid::new(dom, res.n_rho, res.n_theta)?;
    let mesh = BoundaryMesh::new(dom, res.n_boundary)?;
    let basis = solve_hole_basis(&mesh)?;
    let tol = T::c(1e-10);
    if basis.residual > tol {
        return Err(Error::Residual { residual: basis.residual.f64(), tolerance: tol.f64() });
    }
    let sys = assemble_2d(problem, &grid, &mesh, &basis, gauge)?;
    let lu = Lu::new(sys.matrix.clone())?;
    let x = lu.solve(&sys.rhs);
    let ax = sys.matrix.matvec(&x);
    let r: Vec<T> = ax.iter().zip(&sys.rhs).map(|(a, b)| *a - *b).collect();
    let scale = sys.matrix.norm_inf() * norm_inf(&x) + norm_inf(&sys.rhs);
    let residual = if scale > T::zero() { norm_inf(&r) / scale } else { T::zero() };
    let res_tol = T::c(1e-10);
    if !(residual <= res_tol) {
        return Err(Error::Residual { residual: residual.f64(), tolerance: res_tol.f64() });
    }
    let (nv, nb) = (sys.n_volume, sys.n_boundary);
    let gauge_violation = r[nv + nb..].iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let diagnostics = Diagnostics2D {
        residual,
        condition: lu.condition_estimate(),
        hole_basis_residual: basis.residual,
        gauge_violation,
        unknowns: sys.size(),
    };
    Ok(Solution2D {
        domain: dom.clone(),
        s: problem.s,
        grid,
        phi: x[..nv].to_vec(),
        mesh,
        zeta: x[nv..nv + nb].to_vec(),
        a: x[nv + nb..].to_vec(),
        basis,
        diagnostics,
    })
}

/// Outcome of [`verify_composition`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionReport<T> {
    pub targets: Vec<Point<T>>,
    /// `C Δ F_s[φ]` at the targets.
    pub composed: Vec<T>,
    pub f: Vec<T>,
    /// `max |C Δ F_s[φ] - f| / max |f|`.
    pub residual: T,
    /// `max |u - d^s φ|` at the targets.
    pub u_mismatch: T,
}

/// Checks `(-Δ)^s u = C Δ ∫ u(y) |x - y|^{-2s} dy` for `u = d^s φ`, with
/// the Laplacian of the (smooth) potential taken by the fourth-order
/// centered difference of step `h`. Every stencil point must lie inside Ω.
pub fn verify_composition<T: Real>(
    u_exact: impl Fn(Point<T>) -> T,
    phi_exact: impl Fn(Point<T>) -> T + Sync,
    f: impl Fn(Point<T>) -> T,
    domain: &DomainGeometry<T>,
    s: FractionalOrder<T>,
    targets: &[Point<T>],
    h: T,
) -> Result<CompositionReport<T>> {
    let scale = targets.iter().fold(T::one(), |m, x| m.max(x[0].abs()).max(x[1].abs()));
    if !(h > T::c(1e-6) * scale) {
        return Err(Error::StepUnderflow(h.f64()));
    }
    let quad = VolumeQuadrature::new(domain, VolumeKernel::RieszPowerDs, s)?;
    let c = coeff_C_ns(2, s)?;
    let sv = s.value();
    let offsets: [(i32, i32, T); 9] = [
        (0, 0, T::c(-60.0)),
        (1, 0, T::c(16.0)),
        (-1, 0, T::c(16.0)),
        (0, 1, T::c(16.0)),
        (0, -1, T::c(16.0)),
        (2, 0, T::c(-1.0)),
        (-2, 0, T::c(-1.0)),
        (0, 2, T::c(-1.0)),
        (0, -2, T::c(-1.0)),
    ];
    let mut composed = Vec::with_capacity(targets.len());
    let mut fv = Vec::with_capacity(targets.len());
    let mut u_mismatch = T::zero();
    for &x in targets {
        let pts: Vec<Point<T>> =
            offsets.iter().map(|&(i, j, _)| [x[0] + T::c(i as f64) * h, x[1] + T::c(j as f64) * h]).collect();
        let vals: Vec<Result<T>> = pts.par_iter().map(|&p| quad.integrate(p, &phi_exact)).collect();
        let mut lap = T::zero();
        for ((_, _, w), v) in offsets.iter().zip(vals) {
            lap += *w * v?;
        }
        lap /= T::c(12.0) * h * h;
        composed.push(c * lap);
        fv.push(f(x));
        u_mismatch = u_mismatch.max((u_exact(x) - domain.d_eval(x).powf(sv) * phi_exact(x)).abs());
    }
    let fmax = norm_inf(&fv);
    let err = composed.iter().zip(&fv).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    let residual = if fmax > T::zero() { err / fmax } else { err };
    Ok(CompositionReport { targets: targets.to_vec(), composed, f: fv, residual, u_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_annulus, make_disc, make_kite};
    use crate::special_fn::{gamma_fn, jacobi_p};

    fn fo(s: f64) -> FractionalOrder<f64> {
        FractionalOrder::new(s).unwrap()
    }

    /// k = 1 member of the disc family: u = -(1-r²)^s P₁^{(s,0)}(2r²-1).
    fn k1(s: f64) -> (impl Fn(Point<f64>) -> f64 + Copy, impl Fn(Point<f64>) -> f64 + Copy) {
        let phi = move |x: Point<f64>| -jacobi_p(1, s, 0.0, 2.0 * (x[0] * x[0] + x[1] * x[1]) - 1.0).unwrap();
        let f = move |x: Point<f64>| {
            let g = gamma_fn(s + 2.0).unwrap();
            -(4f64).powf(s) * g * g * jacobi_p(1, s, 0.0, 2.0 * (x[0] * x[0] + x[1] * x[1]) - 1.0).unwrap()
        };
        (phi, f)
    }

    #[test]
    fn system_sizes() {
        let p = Problem2D::new(make_disc(1.0f64).unwrap(), fo(0.5), |_| 1.0);
        let grid = VolumeGrid::new(&p.domain, 4, 8).unwrap();
        let mesh = BoundaryMesh::new(&p.domain, 16).unwrap();
        let basis = solve_hole_basis(&mesh).unwrap();
        let sys = assemble_2d(&p, &grid, &mesh, &basis, Gauge::HoleMean).unwrap();
        assert_eq!(sys.size(), 32 + 16);
        let p = Problem2D::new(make_annulus(0.5f64, 1.0).unwrap(), fo(0.5), |_| 1.0);
        let grid = VolumeGrid::new(&p.domain, 4, 8).unwrap();
        let mesh = BoundaryMesh::new(&p.domain, 48).unwrap();
        let basis = solve_hole_basis(&mesh).unwrap();
        let sys = assemble_2d(&p, &grid, &mesh, &basis, Gauge::HoleMean).unwrap();
        assert_eq!((sys.matrix.rows(), sys.matrix.cols()), (32 + 96 + 1, 32 + 96 + 1));
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let p = Problem2D::new(make_kite().unwrap(), fo(0.3), |_| 0.0);
        let sol = solve_2d(&p, Resolution2D::new(6, 16, 32)).unwrap();
        assert!(sol.phi.iter().chain(&sol.zeta).all(|v| *v == 0.0));
    }

    #[test]
    fn disc_constant_phi() {
        // f = 2^{2s} Γ(1+s)² has u = (1-|x|²)^s, φ ≡ 1
        for s in [0.3, 0.5, 0.8] {
            let g = gamma_fn(1.0 + s).unwrap();
            let fval = (4f64).powf(s) * g * g;
            let p = Problem2D::new(make_disc(1.0).unwrap(), fo(s), move |_| fval);
            let sol = solve_2d(&p, Resolution2D::new(8, 16, 32)).unwrap();
            let err = sol.phi.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
            assert!(err < 1e-9, "s={s}: {err:e}");
            assert!((sol.u_eval([0.3, 0.4]) - 0.75f64.powf(s)).abs() < 1e-9);
            assert_eq!(sol.u_eval([1.2, 0.0]), 0.0);
        }
    }

    #[test]
    fn disc_family_k1() {
        let s = 0.75;
        let (phi, f) = k1(s);
        let p = Problem2D::new(make_disc(1.0).unwrap(), fo(s), f);
        let sol = solve_2d(&p, Resolution2D::new(10, 16, 32)).unwrap();
        let err = sol.grid.nodes.iter().zip(&sol.phi).fold(0.0f64, |m, (x, v)| m.max((v - phi(*x)).abs()));
        assert!(err < 1e-8, "{err:e}");
        let r = sol.equation_residual(&p, &[[0.2, -0.1], [0.5, 0.7]]).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-9), "{r:?}");
    }

    #[test]
    fn d_scaling_rescales_phi() {
        let s = 0.5;
        let (_, f) = k1(s);
        let p1 = Problem2D::new(make_disc(1.0).unwrap(), fo(s), f);
        let p2 = Problem2D::new(make_disc(1.0).unwrap().with_d_scale(2.0).unwrap(), fo(s), f);
        let r = Resolution2D::new(10, 16, 32);
        let (a, b) = (solve_2d(&p1, r).unwrap(), solve_2d(&p2, r).unwrap());
        for (x, y) in a.phi.iter().zip(&b.phi) {
            assert!((x * 2f64.powf(-s) - y).abs() < 1e-9);
        }
        for x in [[0.1, 0.2], [-0.6, 0.5]] {
            assert!((a.u_eval(x) - b.u_eval(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn annulus_gauge_does_not_change_u_or_a() {
        let p = Problem2D::new(make_annulus(0.5f64, 1.0).unwrap(), fo(0.75), |x| 1.0 + x[0] * x[0]);
        let r = Resolution2D::new(8, 16, 48);
        let a = solve_2d_with_gauge(&p, r, Gauge::HoleMean).unwrap();
        let b = solve_2d_with_gauge(&p, r, Gauge::HoleNode).unwrap();
        assert!(a.diagnostics.gauge_violation < 1e-12);
        assert!((a.a[0] - b.a[0]).abs() < 1e-9 * a.a[0].abs().max(1.0), "{:?} {:?}", a.a, b.a);
        let dphi = a.phi.iter().zip(&b.phi).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(dphi < 1e-9);
        let dz: Vec<f64> = a.zeta.iter().zip(&b.zeta).map(|(x, y)| x - y).collect();
        assert!(dz.iter().any(|v| v.abs() > 1e-6));
    }

    #[test]
    fn composition_on_disc() {
        let targets = [[0.0, 0.0], [0.3, 0.1], [-0.2, 0.5], [0.6, -0.3]];
        for s in [0.5, 0.75] {
            let g = gamma_fn(1.0 + s).unwrap();
            let fval = (4f64).powf(s) * g * g;
            let rep = verify_composition(
                move |x: Point<f64>| (1.0 - x[0] * x[0] - x[1] * x[1]).powf(s),
                |_| 1.0,
                move |_| fval,
                &make_disc(1.0).unwrap(),
                fo(s),
                &targets,
                1e-2,
            )
            .unwrap();
            assert!(rep.residual < 1e-7, "s={s}: {:e}", rep.residual);
            let (phi, f) = k1(s);
            let rep = verify_composition(
                move |x: Point<f64>| (1.0 - x[0] * x[0] - x[1] * x[1]).powf(s) * phi(x),
                phi,
                f,
                &make_disc(1.0).unwrap(),
                fo(s),
                &targets,
                1e-2,
            )
            .unwrap();
            assert!(rep.residual < 1e-7 && rep.u_mismatch < 1e-15, "s={s}: {:e}", rep.residual);
        }
        let zero = verify_composition(|_| 0.0, |_| 0.0, |_| 0.0, &make_disc(1.0).unwrap(), fo(0.5), &targets, 1e-2).unwrap();
        assert_eq!(zero.residual, 0.0);
        assert!(matches!(
            verify_composition(|_| 0.0, |_| 0.0, |_| 0.0, &make_disc(1.0).unwrap(), fo(0.5), &targets, 1e-9),
            Err(Error::StepUnderflow(_))
        ));
    }
}
