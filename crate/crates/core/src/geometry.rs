//! Parameter box, weighted metric, weighted projection and a Jacobi eigensolver.
//!
//! The projection solves
//!
//! ```text
//! min_{ω ∈ D} (x − ω)ᵀ Q (x − ω)
//! ```
//!
//! for an axis-aligned box `D`. For `p <= 3` every face of the box is
//! enumerated (each coordinate free, at its lower bound or at its upper bound),
//! the face-restricted stationary point is found by a linear solve, and the
//! best feasible KKT point wins. Larger problems use projected gradient steps
//! with Armijo backtracking, accelerated by an exact solve on the current free
//! set once the active set settles.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::Real;

/// Largest dimension solved by exhaustive face enumeration.
pub const ENUMERATION_MAX_DIM: usize = 3;
const PG_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBox<T> {
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Real> ConvexBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::InvalidConfig("box must have at least one coordinate".into()));
        }
        for (i, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::InvalidConfig(format!(
                    "box coordinate {i}: need finite lo < hi, got [{l}, {h}]"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// `[−r, r]^p`.
    pub fn symmetric(radius: T, dim: usize) -> Result<Self> {
        Self::new(vec![-radius; dim], vec![radius; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&l, &h))| l <= v && v <= h)
    }

    pub fn clamp(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&v, (&l, &h))| v.max(l).min(h))
            .collect()
    }

    /// `L = sup_{x ∈ D} ‖x‖`, attained at the corner farthest from the origin.
    pub fn radius(&self) -> T {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| {
                let m = l.abs().max(h.abs());
                m * m
            })
            .sum::<T>()
            .sqrt()
    }
}

/// A symmetric positive-definite weight matrix `Q`.
#[derive(Debug, Clone)]
pub struct WeightedMetric<T> {
    q: Matrix<T>,
}

impl<T: Real> WeightedMetric<T> {
    pub fn new(q: Matrix<T>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::DimensionMismatch {
                expected: q.rows(),
                found: q.cols(),
            });
        }
        let asym = q.max_asymmetry();
        if asym > T::lit(1e-12).max(T::epsilon() * T::lit(4.0)) * q.max_abs().max(T::one()) {
            return Err(Error::NotSymmetric {
                asymmetry: asym.to_f64_lossy(),
            });
        }
        let eig = SymEigen::new(&q)?;
        let min = eig.min();
        if min.is_nan() || min <= T::zero() {
            return Err(Error::SingularMetric {
                min_eigenvalue: min.to_f64_lossy(),
            });
        }
        Ok(Self { q })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            q: Matrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }
}

/// `xᵀ Q x`; the weighted "norm" is used in this squared form throughout.
pub fn weighted_norm<T: Real>(q: &WeightedMetric<T>, x: &[T]) -> Result<T> {
    check_dim(q.dim(), x.len())?;
    Ok(q.q.quad_form(x))
}

/// Weighted projection of `x` onto `domain` in the metric `q`.
pub fn project<T: Real>(q: &WeightedMetric<T>, domain: &ConvexBox<T>, x: &[T]) -> Result<Vec<T>> {
    let p = domain.dim();
    check_dim(p, q.dim())?;
    check_dim(p, x.len())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("projection point"));
    }
    if domain.contains(x) {
        return Ok(x.to_vec());
    }
    if p <= ENUMERATION_MAX_DIM {
        Ok(project_enumerate(&q.q, domain, x))
    } else {
        Ok(project_gradient(&q.q, domain, x))
    }
}

/// Projection by projected gradient + free-set Newton, usable at any dimension.
pub fn project_iterative<T: Real>(
    q: &WeightedMetric<T>,
    domain: &ConvexBox<T>,
    x: &[T],
) -> Result<Vec<T>> {
    check_dim(domain.dim(), q.dim())?;
    check_dim(domain.dim(), x.len())?;
    if domain.contains(x) {
        return Ok(x.to_vec());
    }
    Ok(project_gradient(&q.q, domain, x))
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn objective<T: Real>(q: &Matrix<T>, x: &[T], w: &[T]) -> T {
    let d: Vec<T> = x.iter().zip(w).map(|(&a, &b)| a - b).collect();
    q.quad_form(&d)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Face {
    Free,
    Lower,
    Upper,
}

/// Stationary point of the objective with the coordinates in `fixed` pinned.
/// `None` if the free block is numerically singular.
fn face_solution<T: Real>(q: &Matrix<T>, x: &[T], pinned: &[Option<T>]) -> Option<Vec<T>> {
    let free: Vec<usize> = (0..x.len()).filter(|&i| pinned[i].is_none()).collect();
    let bound: Vec<usize> = (0..x.len()).filter(|&i| pinned[i].is_some()).collect();
    let mut w: Vec<T> = x.to_vec();
    for &i in &bound {
        w[i] = pinned[i].expect("bound index is pinned");
    }
    if free.is_empty() || bound.is_empty() {
        return Some(w);
    }
    // Q_FF (w_F − x_F) = −Q_FB (w_B − x_B)
    let qff = q.submatrix(&free, &free);
    let qfb = q.submatrix(&free, &bound);
    let shift: Vec<T> = bound.iter().map(|&i| w[i] - x[i]).collect();
    let rhs: Vec<T> = qfb.mul_vec(&shift).into_iter().map(|v| -v).collect();
    let delta = qff.solve_spd(&rhs)?;
    for (j, &i) in free.iter().enumerate() {
        w[i] = x[i] + delta[j];
    }
    Some(w)
}

fn kkt_ok<T: Real>(q: &Matrix<T>, x: &[T], w: &[T], faces: &[Face], tol: T) -> bool {
    let d: Vec<T> = w.iter().zip(x).map(|(&a, &b)| a - b).collect();
    let g = q.mul_vec(&d);
    faces.iter().zip(&g).all(|(f, &gi)| match f {
        Face::Free => gi.abs() <= tol,
        Face::Lower => gi >= -tol,
        Face::Upper => gi <= tol,
    })
}

fn lexicographic<T: Real>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

fn project_enumerate<T: Real>(q: &Matrix<T>, domain: &ConvexBox<T>, x: &[T]) -> Vec<T> {
    let p = x.len();
    let count = 3usize.pow(p as u32);
    let scale = q.max_abs().max(T::one())
        * x.iter()
            .chain(domain.lo())
            .chain(domain.hi())
            .fold(T::one(), |m, v| m.max(v.abs()));
    let feas_tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0))
        * domain.lo().iter().chain(domain.hi()).fold(T::one(), |m, v| m.max(v.abs()));
    let kkt_tol = T::lit(1e-8).max(T::epsilon().sqrt()) * scale;

    let mut best_kkt: Option<(T, Vec<T>)> = None;
    let mut best_feasible: Option<(T, Vec<T>)> = None;
    let mut faces = vec![Face::Free; p];
    let mut pinned = vec![None; p];
    for code in 0..count {
        let mut c = code;
        for i in 0..p {
            (faces[i], pinned[i]) = match c % 3 {
                0 => (Face::Free, None),
                1 => (Face::Lower, Some(domain.lo()[i])),
                _ => (Face::Upper, Some(domain.hi()[i])),
            };
            c /= 3;
        }
        let Some(w) = face_solution(q, x, &pinned) else {
            continue;
        };
        let feasible = w.iter().enumerate().all(|(i, &v)| {
            v >= domain.lo()[i] - feas_tol && v <= domain.hi()[i] + feas_tol
        });
        if !feasible {
            continue;
        }
        let w = domain.clamp(&w);
        let obj = objective(q, x, &w);
        let slot = if kkt_ok(q, x, &w, &faces, kkt_tol) {
            &mut best_kkt
        } else {
            &mut best_feasible
        };
        let better = match slot {
            None => true,
            Some((o, v)) => match obj.partial_cmp(o) {
                Some(Ordering::Less) => true,
                Some(Ordering::Equal) => lexicographic(&w, v) == Ordering::Less,
                _ => false,
            },
        };
        if better {
            *slot = Some((obj, w));
        }
    }
    best_kkt
        .or(best_feasible)
        .map(|(_, w)| w)
        .unwrap_or_else(|| domain.clamp(x))
}

/// Projected-gradient residual `‖w − clamp(w − g / diag(Q))‖_∞`, in coordinate units.
fn pg_residual<T: Real>(domain: &ConvexBox<T>, w: &[T], g: &[T], diag: &[T]) -> T {
    let trial: Vec<T> = w.iter().zip(g).zip(diag).map(|((&wi, &gi), &d)| wi - gi / d).collect();
    let c = domain.clamp(&trial);
    w.iter().zip(&c).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
}

fn project_gradient<T: Real>(q: &Matrix<T>, domain: &ConvexBox<T>, x: &[T]) -> Vec<T> {
    let p = x.len();
    let diag = q.diag();
    let coord_scale = x.iter().chain(domain.lo()).chain(domain.hi()).fold(T::one(), |m, v| m.max(v.abs()));
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(16.0)) * coord_scale;
    let grad = |w: &[T]| {
        let d: Vec<T> = w.iter().zip(x).map(|(&a, &b)| a - b).collect();
        q.mul_vec(&d)
    };
    let mut w = domain.clamp(x);
    let mut f = objective(q, x, &w);
    let armijo = T::lit(1e-4);
    let two = T::lit(2.0);

    for _ in 0..PG_MAX_ITER {
        let g = grad(&w);
        if pg_residual(domain, &w, &g, &diag) <= tol {
            break;
        }

        // exact minimiser on the current free set, accepted if it stays inside the box
        let pinned: Vec<Option<T>> = (0..p)
            .map(|i| {
                let at_lo = w[i] <= domain.lo()[i] && g[i] >= T::zero();
                let at_hi = w[i] >= domain.hi()[i] && g[i] <= T::zero();
                if at_lo {
                    Some(domain.lo()[i])
                } else if at_hi {
                    Some(domain.hi()[i])
                } else {
                    None
                }
            })
            .collect();
        if let Some(cand) = face_solution(q, x, &pinned) {
            if domain.contains(&cand) {
                let fc = objective(q, x, &cand);
                if fc <= f {
                    w = cand;
                    f = fc;
                    continue;
                }
            }
        }

        // diagonally scaled projected gradient step with backtracking; ∇f = 2Q(w − x)
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<T> = (0..p).map(|i| w[i] - t * g[i] / diag[i]).collect();
            let trial = domain.clamp(&trial);
            let ft = objective(q, x, &trial);
            let step: Vec<T> = trial.iter().zip(&w).map(|(&a, &b)| a - b).collect();
            if ft <= f + armijo * two * dot(&g, &step) {
                w = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    w
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    values: Vec<T>,
    sweeps: usize,
}

impl<T: Real> SymEigen<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: a.cols(),
            });
        }
        let asym = a.max_asymmetry();
        if asym > T::lit(1e-9) * a.max_abs().max(T::one()) {
            return Err(Error::NotSymmetric {
                asymmetry: asym.to_f64_lossy(),
            });
        }
        let n = a.rows();
        let mut m = a.clone();
        m.symmetrize();
        let target = T::lit(1e-12).max(T::epsilon() * T::lit(4.0)) * m.frobenius();
        let off = |m: &Matrix<T>| {
            let mut s = T::zero();
            for i in 0..n {
                for j in (i + 1)..n {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
            (s + s).sqrt()
        };
        let mut sweeps = 0;
        while off(&m) > target && sweeps < 100 {
            sweeps += 1;
            for pi in 0..n {
                for qi in (pi + 1)..n {
                    let apq = m[(pi, qi)];
                    if apq == T::zero() {
                        continue;
                    }
                    let app = m[(pi, pi)];
                    let aqq = m[(qi, qi)];
                    let theta = (aqq - app) / (apq + apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let t = if theta == T::zero() { T::one() } else { t };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[(k, pi)];
                        let mkq = m[(k, qi)];
                        m[(k, pi)] = c * mkp - s * mkq;
                        m[(k, qi)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(pi, k)];
                        let mqk = m[(qi, k)];
                        m[(pi, k)] = c * mpk - s * mqk;
                        m[(qi, k)] = s * mpk + c * mqk;
                    }
                    m[(pi, qi)] = T::zero();
                    m[(qi, pi)] = T::zero();
                }
            }
        }
        let mut values = m.diag();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Ok(Self { values, sweeps })
    }

    /// Eigenvalues in ascending order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Sum of log eigenvalues; `NaN` unless positive definite.
    pub fn log_det(&self) -> T {
        if self.min() > T::zero() {
            self.values.iter().map(|v| v.ln()).sum()
        } else {
            T::nan()
        }
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }
}

/// `(λ_min, λ_max)` of a symmetric matrix.
pub fn sym_eig_extremes<T: Real>(a: &Matrix<T>) -> Result<(T, T)> {
    let e = SymEigen::new(a)?;
    Ok((e.min(), e.max()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64) -> Matrix<f64> {
        Matrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap()
    }

    #[test]
    fn weighted_norm_examples() {
        let id = WeightedMetric::identity(2);
        assert_eq!(weighted_norm(&id, &[3.0, 4.0]).unwrap(), 25.0);
        let q = WeightedMetric::new(m2(2.0, 1.0, 2.0)).unwrap();
        assert_eq!(weighted_norm(&q, &[1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(weighted_norm(&q, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            weighted_norm(&q, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn project_examples() {
        let q = WeightedMetric::new(m2(2.0, 1.0, 2.0)).unwrap();
        let d = ConvexBox::symmetric(1.0, 2).unwrap();
        let w = project(&q, &d, &[2.0, 0.0]).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15, "{w:?}");
        assert_eq!(project(&q, &d, &[0.3, -0.9]).unwrap(), vec![0.3, -0.9]);
        let id = WeightedMetric::identity(2);
        assert_eq!(project(&id, &d, &[5.0, -3.0]).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn metric_rejects_bad_matrices() {
        assert!(matches!(
            WeightedMetric::new(Matrix::from_diag(&[1.0, -1.0])),
            Err(Error::SingularMetric { .. })
        ));
        assert!(matches!(
            WeightedMetric::new(Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap()),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn box_radius_and_validation() {
        let d = ConvexBox::new(vec![-2.0, 0.3], vec![2.0, 2.0]).unwrap();
        assert!((d.radius() - 8f64.sqrt()).abs() < 1e-15);
        assert!(ConvexBox::new(vec![1.0], vec![1.0]).is_err());
        assert!(ConvexBox::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn eig_examples() {
        assert_eq!(sym_eig_extremes(&Matrix::from_diag(&[2.0, 5.0])).unwrap(), (2.0, 5.0));
        let (lo, hi) = sym_eig_extremes(&m2(2.0, 1.0, 2.0)).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
        assert_eq!(sym_eig_extremes(&Matrix::<f64>::identity(4)).unwrap(), (1.0, 1.0));
        assert!(matches!(
            sym_eig_extremes(&Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap()),
            Err(Error::NotSymmetric { .. })
        ));
    }

    // power iteration on A and on (λ_max I − A) gives both extremes independently of Jacobi
    fn power_extremes(a: &Matrix<f64>) -> (f64, f64) {
        let n = a.rows();
        let top = |m: &Matrix<f64>| {
            let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
            let mut lambda = 0.0;
            for _ in 0..5000 {
                let w = m.mul_vec(&v);
                let nw = crate::linalg::norm(&w);
                lambda = dot(&v, &w) / dot(&v, &v);
                v = w.iter().map(|x| x / nw).collect();
            }
            lambda
        };
        let hi = top(a);
        let shifted = Matrix::from_fn(n, n, |i, j| if i == j { hi - a[(i, j)] } else { -a[(i, j)] });
        (hi - top(&shifted), hi)
    }

    #[test]
    fn jacobi_matches_power_iteration() {
        let a = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.5, 0.0],
            vec![1.0, 3.0, 0.2, 0.1],
            vec![0.5, 0.2, 2.0, 0.3],
            vec![0.0, 0.1, 0.3, 1.0],
        ])
        .unwrap();
        let e = SymEigen::new(&a).unwrap();
        let (lo, hi) = power_extremes(&a);
        assert!((e.min() - lo).abs() < 1e-9, "{} vs {lo}", e.min());
        assert!((e.max() - hi).abs() < 1e-9);
        let trace: f64 = a.diag().iter().sum();
        assert!((e.values().iter().sum::<f64>() - trace).abs() < 1e-12);
        let (_, hi2) = power_extremes(&m2(2.0, 1.0, 2.0));
        assert!((hi2 - 3.0).abs() < 1e-10);
    }

    #[test]
    fn log_det_matches_product() {
        let a = m2(2.0, 1.0, 2.0);
        let e = SymEigen::new(&a).unwrap();
        assert!((e.log_det() - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn iterative_agrees_with_enumeration() {
        let q = WeightedMetric::new(
            Matrix::from_rows(&[
                vec![3.0, 1.0, 0.4],
                vec![1.0, 2.0, -0.3],
                vec![0.4, -0.3, 1.5],
            ])
            .unwrap(),
        )
        .unwrap();
        let d = ConvexBox::new(vec![-1.0f64, 0.0, -0.5], vec![1.0, 2.0, 0.5]).unwrap();
        for x in [[3.0, -2.0, 1.0], [0.2, 5.0, -4.0], [-7.0, 1.0, 0.1]] {
            let a = project(&q, &d, &x).unwrap();
            let b = project_iterative(&q, &d, &x).unwrap();
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-9, "{a:?} vs {b:?}");
            }
        }
    }
}
