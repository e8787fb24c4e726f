//! Type-A root system and sl(N+1)/SL(N+1) matrix primitives with the
//! trace pairing (A, B) = tr(AB).

use crate::error::{Error, Result};
use crate::linalg::{principal_root, CMat};
use crate::scalar::{r, re_cx, Cx, Real};
use num_complex::Complex;
use std::collections::BTreeSet;

/// Tolerance at which construction-time projection turns into a hard error.
pub const PROJECTION_HARD_TOL: f64 = 1e-6;

/// The N of SL(N+1); matrices are (n+1) x (n+1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Dimension("dimension n must be >= 1".into()));
        }
        Ok(Dimension(n))
    }

    /// Number of simple roots.
    pub fn n(&self) -> usize {
        self.0
    }

    /// Matrix size n + 1.
    pub fn size(&self) -> usize {
        self.0 + 1
    }
}

/// Root alpha_{ij} (i != j, 0-based) with root vector e_alpha = E_ij.
/// Positive iff i < j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize, dim: Dimension) -> Result<Self> {
        if i == j || i >= dim.size() || j >= dim.size() {
            return Err(Error::Dimension(format!(
                "invalid root indices ({i},{j}) for size {}",
                dim.size()
            )));
        }
        Ok(Root { i, j })
    }

    pub fn is_positive(&self) -> bool {
        self.i < self.j
    }

    pub fn negated(&self) -> Root {
        Root {
            i: self.j,
            j: self.i,
        }
    }

    /// k-th simple root (1-based): alpha_k = (k-1, k).
    pub fn simple(k: usize) -> Root {
        Root { i: k - 1, j: k }
    }

    /// All roots of the type-A system of the given dimension.
    pub fn all(dim: Dimension) -> Vec<Root> {
        let m = dim.size();
        let mut v = Vec::with_capacity(m * (m - 1));
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    v.push(Root { i, j });
                }
            }
        }
        v
    }
}

/// Subset pi' of the simple roots {1..N} (1-based indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleSubset {
    n: usize,
    members: BTreeSet<usize>,
}

impl SimpleSubset {
    pub fn new(dim: Dimension, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        for &k in &members {
            if k < 1 || k > dim.n() {
                return Err(Error::Dimension(format!(
                    "simple root index {k} out of range 1..={}",
                    dim.n()
                )));
            }
        }
        Ok(SimpleSubset {
            n: dim.n(),
            members,
        })
    }

    pub fn full(dim: Dimension) -> Self {
        SimpleSubset {
            n: dim.n(),
            members: (1..=dim.n()).collect(),
        }
    }

    pub fn empty(dim: Dimension) -> Self {
        SimpleSubset {
            n: dim.n(),
            members: BTreeSet::new(),
        }
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.n
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// A root (i,j) lies in the span <pi'> iff every simple root of the
    /// type-A chain between i and j belongs to the subset.
    pub fn contains_root(&self, root: &Root) -> bool {
        let lo = root.i.min(root.j);
        let hi = root.i.max(root.j);
        ((lo + 1)..=hi).all(|k| self.members.contains(&k))
    }
}

/// A point q in the Cartan, stored as a zero-sum length-(n+1) vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanVector<R: Real> {
    entries: Vec<Cx<R>>,
}

impl<R: Real> CartanVector<R> {
    /// Projects out the mean; errors if the required correction exceeds
    /// the hard tolerance.
    pub fn new(entries: Vec<Cx<R>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("empty Cartan vector".into()));
        }
        let m = r::<R>(entries.len() as f64);
        let mean = entries
            .iter()
            .fold(Complex::new(R::zero(), R::zero()), |a, b| a + b)
            / re_cx(m);
        if mean.norm() > r(PROJECTION_HARD_TOL) {
            return Err(Error::Invariant(format!(
                "Cartan vector sum too far from zero: mean magnitude {}",
                mean.norm()
            )));
        }
        Ok(CartanVector {
            entries: entries.into_iter().map(|z| z - mean).collect(),
        })
    }

    pub fn from_real(entries: &[R]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| re_cx(x)).collect())
    }

    pub fn zero(dim: Dimension) -> Self {
        CartanVector {
            entries: vec![Complex::new(R::zero(), R::zero()); dim.size()],
        }
    }

    pub(crate) fn new_unchecked(entries: Vec<Cx<R>>) -> Self {
        CartanVector { entries }
    }

    pub fn entries(&self) -> &[Cx<R>] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// alpha(q) = q_i - q_j.
    pub fn alpha(&self, root: &Root) -> Cx<R> {
        self.entries[root.i] - self.entries[root.j]
    }

    pub fn is_real(&self, tol: R) -> bool {
        self.entries.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn norm_inf(&self) -> R {
        self.entries.iter().fold(R::zero(), |m, z| m.max(z.norm()))
    }

    pub fn add(&self, other: &Self) -> Self {
        CartanVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        CartanVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    pub fn scaled(&self, s: Cx<R>) -> Self {
        CartanVector {
            entries: self.entries.iter().map(|a| *a * s).collect(),
        }
    }

    pub fn to_diagonal_matrix(&self) -> CMat<R> {
        CMat::from_diag(&self.entries)
    }

    /// exp of the diagonal embedding, an element of the Cartan subgroup.
    pub fn exp_diag(&self) -> GroupElement<R> {
        let d: Vec<Cx<R>> = self.entries.iter().map(|z| z.exp()).collect();
        GroupElement {
            mat: CMat::from_diag(&d),
        }
    }

    /// Minimum of |sinh(alpha(q)/2)| over the roots classified in <pi'>:
    /// the distance to the nearest coth wall (alpha(q) in 2*pi*i*Z).
    pub fn wall_distance(&self, subset: &SimpleSubset) -> R {
        let mut best = R::infinity();
        let m = self.entries.len();
        for i in 0..m {
            for j in (i + 1)..m {
                let root = Root { i, j };
                if subset.contains_root(&root) {
                    let s = (self.alpha(&root) * re_cx(r(0.5))).sinh().norm();
                    best = best.min(s);
                }
            }
        }
        best
    }
}

/// A traceless (n+1) x (n+1) complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<R: Real> {
    mat: CMat<R>,
}

impl<R: Real> AlgebraElement<R> {
    pub fn new(mat: CMat<R>) -> Result<Self> {
        let t = mat.trace();
        if t.norm() > r(PROJECTION_HARD_TOL) {
            return Err(Error::Invariant(format!(
                "matrix trace too far from zero: {}",
                t.norm()
            )));
        }
        let m = r::<R>(mat.dim() as f64);
        let shift = t / re_cx(m);
        let mut out = mat;
        for i in 0..out.dim() {
            out[(i, i)] = out[(i, i)] - shift;
        }
        Ok(AlgebraElement { mat: out })
    }

    pub(crate) fn new_unchecked(mat: CMat<R>) -> Self {
        AlgebraElement { mat }
    }

    pub fn zero(dim: Dimension) -> Self {
        AlgebraElement {
            mat: CMat::zeros(dim.size()),
        }
    }

    pub fn mat(&self) -> &CMat<R> {
        &self.mat
    }

    pub fn size(&self) -> usize {
        self.mat.dim()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        AlgebraElement {
            mat: self.mat.commutator(&other.mat),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        AlgebraElement {
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        AlgebraElement {
            mat: &self.mat - &other.mat,
        }
    }

    pub fn scaled(&self, s: Cx<R>) -> Self {
        AlgebraElement {
            mat: self.mat.scaled(s),
        }
    }
}

/// An (n+1) x (n+1) complex matrix with determinant 1.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<R: Real> {
    mat: CMat<R>,
}

impl<R: Real> GroupElement<R> {
    /// Renormalizes the determinant to 1 by the principal root; errors if
    /// the correction exceeds the hard tolerance.
    pub fn new(mat: CMat<R>) -> Result<Self> {
        let d = mat.det();
        let one = Complex::new(R::one(), R::zero());
        if (d - one).norm() > r(PROJECTION_HARD_TOL) {
            return Err(Error::Invariant(format!(
                "determinant too far from 1: |det - 1| = {}",
                (d - one).norm()
            )));
        }
        Ok(Self::sl_normalized(mat))
    }

    /// Rescale any invertible matrix into SL by the principal root of its
    /// determinant.
    pub fn sl_normalized(mat: CMat<R>) -> Self {
        let d = mat.det();
        let root = principal_root(d, mat.dim());
        GroupElement {
            mat: mat.scaled(Complex::new(R::one(), R::zero()) / root),
        }
    }

    pub fn identity(dim: Dimension) -> Self {
        GroupElement {
            mat: CMat::identity(dim.size()),
        }
    }

    pub fn from_diag(d: &[Cx<R>]) -> Result<Self> {
        Self::new(CMat::from_diag(d))
    }

    pub fn mat(&self) -> &CMat<R> {
        &self.mat
    }

    pub fn size(&self) -> usize {
        self.mat.dim()
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(GroupElement {
            mat: self.mat.inverse()?,
        })
    }

    pub fn multiply(&self, other: &Self) -> Self {
        GroupElement {
            mat: &self.mat * &other.mat,
        }
    }

    pub fn is_diagonal(&self, tol: R) -> bool {
        self.mat.is_diagonal(tol)
    }

    pub fn is_hermitian(&self, tol: R) -> bool {
        self.mat.is_hermitian(tol)
    }

    /// Conjugation Ad_h(X) = h X h^{-1} on a plain matrix.
    pub fn ad(&self, x: &CMat<R>) -> Result<CMat<R>> {
        let hx = &self.mat * x;
        let hinv = self.mat.inverse()?;
        Ok(&hx * &hinv)
    }
}

/// tr(X Y); symmetric and ad-invariant.
pub fn trace_pairing<R: Real>(x: &AlgebraElement<R>, y: &AlgebraElement<R>) -> Result<Cx<R>> {
    trace_pairing_mat(x.mat(), y.mat())
}

/// Trace pairing on raw matrices.
pub fn trace_pairing_mat<R: Real>(x: &CMat<R>, y: &CMat<R>) -> Result<Cx<R>> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "trace pairing: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    let n = x.dim();
    let mut t = Complex::new(R::zero(), R::zero());
    for i in 0..n {
        for k in 0..n {
            t = t + x[(i, k)] * y[(k, i)];
        }
    }
    Ok(t)
}

/// Orthogonal projection onto the Cartan w.r.t. the trace pairing: the
/// diagonal of X. For traceless X the result is automatically zero-sum.
pub fn proj_cartan<R: Real>(x: &AlgebraElement<R>) -> CartanVector<R> {
    CartanVector::new_unchecked(x.mat().diag())
}

/// Diagonal of an arbitrary matrix with the trace removed: the h-part of
/// the decomposition g = h + h_perp extended to gl.
pub fn proj_cartan_mat<R: Real>(x: &CMat<R>) -> CartanVector<R> {
    let m = r::<R>(x.dim() as f64);
    let shift = x.trace() / re_cx(m);
    CartanVector::new_unchecked(x.diag().into_iter().map(|z| z - shift).collect())
}

/// exp of an algebra element, landing in SL (det renormalized to the
/// 1e-10 class by construction).
pub fn matrix_exp<R: Real>(x: &AlgebraElement<R>) -> Result<GroupElement<R>> {
    let e = x.mat().expm()?;
    GroupElement::new(e)
}

/// Branch-continuous logarithm of a path of diagonal group elements,
/// anchored at u0. Returns the u path and the per-sample trace removed
/// from the raw logarithm (must vanish for det-1 input).
pub fn log_diagonal_continuous<R: Real>(
    path: &[GroupElement<R>],
    u0: &CartanVector<R>,
) -> Result<(Vec<CartanVector<R>>, Vec<Cx<R>>)> {
    if path.is_empty() {
        return Err(Error::Dimension("empty path".into()));
    }
    let m = path[0].size();
    if u0.size() != m {
        return Err(Error::Dimension("u0 size mismatch".into()));
    }
    let first = u0.exp_diag();
    let start_err = (path[0].mat() - first.mat()).max_abs();
    if start_err > r(1e-8) {
        return Err(Error::Invariant(format!(
            "path start differs from exp(u0) by {start_err}"
        )));
    }
    let half = r::<R>(0.5);
    let mut prev: Vec<Cx<R>> = path[0].mat().diag();
    let mut u = u0.entries().to_vec();
    let mut out = Vec::with_capacity(path.len());
    let mut removed = Vec::with_capacity(path.len());
    // anchor sample: report zero removed trace
    out.push(CartanVector::new_unchecked(u.clone()));
    removed.push(Complex::new(R::zero(), R::zero()));
    for (step, g) in path.iter().enumerate().skip(1) {
        let cur = g.mat().diag();
        for (idx, (&c, &p)) in cur.iter().zip(prev.iter()).enumerate() {
            if c.norm() == R::zero() || p.norm() == R::zero() {
                return Err(Error::ZeroDiagonal { index: idx });
            }
            let ratio = c / p;
            if (ratio - Complex::new(R::one(), R::zero())).norm() > half {
                return Err(Error::Continuity {
                    step,
                    detail: format!("diagonal entry {idx} moved too far for a unique branch"),
                });
            }
            u[idx] = u[idx] + ratio.ln();
        }
        let mm = r::<R>(m as f64);
        let tr = u
            .iter()
            .fold(Complex::new(R::zero(), R::zero()), |a, b| a + b);
        let shift = tr / re_cx(mm);
        for z in u.iter_mut() {
            *z = *z - shift;
        }
        removed.push(tr);
        out.push(CartanVector::new_unchecked(u.clone()));
        prev = cur;
    }
    Ok((out, removed))
}

/// Gradient of f(g) = sum_k c_k tr(g^k) w.r.t. the trace pairing:
/// Df(g) = sum_k c_k k (g^k - tr(g^k)/(n+1) I). Central: Ad_g Df = Df.
pub fn invariant_gradient<R: Real>(
    g: &GroupElement<R>,
    poly: &[(u32, Cx<R>)],
) -> AlgebraElement<R> {
    let m = g.size();
    let kmax = poly.iter().map(|&(k, _)| k as usize).max().unwrap_or(0);
    let mut out = CMat::zeros(m);
    if kmax == 0 {
        return AlgebraElement::new_unchecked(out);
    }
    let pows = g.mat().powers(kmax);
    let mm = r::<R>(m as f64);
    for &(k, c) in poly {
        if k == 0 {
            continue;
        }
        let gk = &pows[k as usize - 1];
        let tk = gk.trace() / re_cx(mm);
        let kk = re_cx(r::<R>(k as f64));
        for i in 0..m {
            for j in 0..m {
                let base = if i == j { gk[(i, j)] - tk } else { gk[(i, j)] };
                out[(i, j)] = out[(i, j)] + c * kk * base;
            }
        }
    }
    AlgebraElement::new_unchecked(out)
}

/// Value of f(g) = sum_k c_k tr(g^k).
pub fn power_trace_value<R: Real>(g: &CMat<R>, poly: &[(u32, Cx<R>)]) -> Cx<R> {
    let kmax = poly.iter().map(|&(k, _)| k as usize).max().unwrap_or(0);
    let mut v = Complex::new(R::zero(), R::zero());
    if kmax == 0 {
        return v;
    }
    let pows = g.powers(kmax);
    for &(k, c) in poly {
        if k == 0 {
            continue;
        }
        v = v + c * pows[k as usize - 1].trace();
    }
    v
}

/// Power traces tr(g^k) for k = 1..=kmax.
pub fn power_traces<R: Real>(g: &CMat<R>, kmax: usize) -> Vec<Cx<R>> {
    g.powers(kmax).iter().map(|p| p.trace()).collect()
}

/// Fundamental characters chi_k(g) = e_k(spec g), k = 1..n, computed from
/// power traces via Newton's identities (no eigensolve).
pub fn fundamental_characters<R: Real>(g: &GroupElement<R>) -> Vec<Cx<R>> {
    let n = g.size() - 1;
    let p = power_traces(g.mat(), n);
    let mut e: Vec<Cx<R>> = vec![Complex::new(R::one(), R::zero())];
    for k in 1..=n {
        let mut s = Complex::new(R::zero(), R::zero());
        let mut sign = R::one();
        for i in 1..=k {
            s = s + e[k - i] * p[i - 1] * re_cx(sign);
            sign = -sign;
        }
        e.push(s / re_cx(r::<R>(k as f64)));
    }
    e.into_iter().skip(1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Cx<f64>;

    fn e_ij(m: usize, i: usize, j: usize) -> AlgebraElement<f64> {
        let mut mat = CMat::zeros(m);
        mat[(i, j)] = C::new(1.0, 0.0);
        AlgebraElement::new(mat).unwrap()
    }

    fn rand_traceless(m: usize, rng: &mut ChaCha8Rng) -> AlgebraElement<f64> {
        let mat = CMat::from_fn(m, |_, _| {
            C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let t = mat.trace() / C::new(m as f64, 0.0);
        let mut mat = mat;
        for i in 0..m {
            mat[(i, i)] -= t;
        }
        AlgebraElement::new(mat).unwrap()
    }

    #[test]
    fn pairing_on_root_vectors() {
        // (E_12, E_21) = 1
        let v = trace_pairing(&e_ij(2, 0, 1), &e_ij(2, 1, 0)).unwrap();
        assert!((v - C::new(1.0, 0.0)).norm() < 1e-15);
        // (X, X) = 2 for X = diag(1,-1)
        let x = AlgebraElement::new(CMat::from_diag(&[C::new(1.0, 0.0), C::new(-1.0, 0.0)]))
            .unwrap();
        let v = trace_pairing(&x, &x).unwrap();
        assert!((v - C::new(2.0, 0.0)).norm() < 1e-15);
        // (E_12, E_12) = 0
        let v = trace_pairing(&e_ij(2, 0, 1), &e_ij(2, 0, 1)).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn pairing_ad_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (x, y, z) = (
                rand_traceless(3, &mut rng),
                rand_traceless(3, &mut rng),
                rand_traceless(3, &mut rng),
            );
            let lhs = trace_pairing(&z.commutator(&x), &y).unwrap();
            let rhs = trace_pairing(&x, &z.commutator(&y)).unwrap();
            assert!((lhs + rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn proj_cartan_examples() {
        let x = AlgebraElement::new(CMat::from_diag(&[C::new(1.0, 0.0), C::new(-1.0, 0.0)]))
            .unwrap();
        let q = proj_cartan(&x);
        assert!((q.entries()[0] - C::new(1.0, 0.0)).norm() < 1e-15);
        let q = proj_cartan(&e_ij(2, 0, 1));
        assert!(q.norm_inf() < 1e-15);
        let x = AlgebraElement::new(CMat::from_diag(&[
            C::new(2.0, 0.0),
            C::new(-1.0, 0.0),
            C::new(-1.0, 0.0),
        ]))
        .unwrap();
        let q = proj_cartan(&x);
        assert!((q.entries()[0] - C::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn proj_cartan_self_adjoint_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x = rand_traceless(4, &mut rng);
            let y = rand_traceless(4, &mut rng);
            let px = AlgebraElement::new(proj_cartan(&x).to_diagonal_matrix()).unwrap();
            let py = AlgebraElement::new(proj_cartan(&y).to_diagonal_matrix()).unwrap();
            let a = trace_pairing(&px, &y).unwrap();
            let b = trace_pairing(&x, &py).unwrap();
            assert!((a - b).norm() < 1e-12, "self-adjointness");
            let ppx = AlgebraElement::new(proj_cartan(&px).to_diagonal_matrix()).unwrap();
            assert!((px.mat() - ppx.mat()).max_abs() < 1e-14, "idempotence");
        }
    }

    #[test]
    fn exp_det_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let x = rand_traceless(4, &mut rng);
            let g = matrix_exp(&x).unwrap();
            assert!((g.mat().det() - C::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn log_path_examples() {
        // constant path stays at u0
        let u0 = CartanVector::from_real(&[0.3, -0.3]).unwrap();
        let g = u0.exp_diag();
        let path = vec![g.clone(), g.clone(), g];
        let (us, rem) = log_diagonal_continuous(&path, &u0).unwrap();
        for u in &us {
            assert!(u.sub(&u0).norm_inf() < 1e-12);
        }
        for t in &rem {
            assert!(t.norm() < 1e-10);
        }
        // winding path: no 2pi wrap at t = 1
        let dim = Dimension::new(1).unwrap();
        let u0 = CartanVector::zero(dim);
        let steps = 40;
        let path: Vec<GroupElement<f64>> = (0..=steps)
            .map(|k| {
                let t = k as f64 / steps as f64;
                GroupElement::from_diag(&[
                    C::from_polar(1.0, std::f64::consts::PI * t),
                    C::from_polar(1.0, -std::f64::consts::PI * t),
                ])
                .unwrap()
            })
            .collect();
        let (us, _) = log_diagonal_continuous(&path, &u0).unwrap();
        let last = us.last().unwrap();
        assert!((last.entries()[0] - C::new(0.0, std::f64::consts::PI)).norm() < 1e-10);
        // real positive path
        let u0 = CartanVector::from_real(&[1.0, -1.0]).unwrap();
        let path: Vec<GroupElement<f64>> = (0..=20)
            .map(|k| {
                let t = k as f64 / 20.0;
                GroupElement::from_diag(&[C::new((1.0 - t).exp(), 0.0), C::new((t - 1.0).exp(), 0.0)])
                    .unwrap()
            })
            .collect();
        let (us, _) = log_diagonal_continuous(&path, &u0).unwrap();
        let last = us.last().unwrap();
        assert!((last.entries()[0] - C::new(0.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn log_path_large_step_errors() {
        let u0 = CartanVector::from_real(&[0.0, 0.0]).unwrap();
        let path = vec![
            u0.exp_diag(),
            GroupElement::from_diag(&[C::new(-1.0, 0.0), C::new(-1.0, 0.0)]).unwrap(),
        ];
        assert!(matches!(
            log_diagonal_continuous(&path, &u0),
            Err(Error::Continuity { .. })
        ));
    }

    #[test]
    fn invariant_gradient_examples() {
        // f = tr: Df(g) = g - tr(g)/(n+1) I
        let g = GroupElement::from_diag(&[C::new(2.0, 0.0), C::new(0.5, 0.0)]).unwrap();
        let d = invariant_gradient(&g, &[(1, C::new(1.0, 0.0))]);
        assert!((d.mat()[(0, 0)] - C::new(0.75, 0.0)).norm() < 1e-14);
        assert!((d.mat()[(1, 1)] - C::new(-0.75, 0.0)).norm() < 1e-14);
        // f = tr(g^2) at g = I: gradient vanishes
        let dim = Dimension::new(2).unwrap();
        let g = GroupElement::identity(dim);
        let d = invariant_gradient(&g, &[(2, C::new(1.0, 0.0))]);
        assert!(d.mat().max_abs() < 1e-14);
        // empty poly
        let d = invariant_gradient(&g, &[]);
        assert!(d.mat().max_abs() == 0.0);
    }

    #[test]
    fn invariant_gradient_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let poly = [(1u32, C::new(0.7, 0.0)), (2, C::new(-0.3, 0.0)), (3, C::new(0.1, 0.0))];
        let x = rand_traceless(3, &mut rng);
        let g = matrix_exp(&x).unwrap();
        let d = invariant_gradient(&g, &poly);
        let eps = 1e-5;
        for _ in 0..20 {
            let dir = rand_traceless(3, &mut rng);
            // d/dt f(e^{tX} g) |_0 = tr(X Df)
            let step = dir.scaled(C::new(eps, 0.0));
            let gp = &matrix_exp(&step).unwrap().multiply(&g);
            let gm = &matrix_exp(&step.scaled(C::new(-1.0, 0.0))).unwrap().multiply(&g);
            let fp = power_trace_value(gp.mat(), &poly);
            let fm = power_trace_value(gm.mat(), &poly);
            let fd = (fp - fm) / C::new(2.0 * eps, 0.0);
            let an = trace_pairing(&dir, &d).unwrap();
            let rel = (fd - an).norm() / an.norm().max(1.0);
            assert!(rel < 1e-6, "relative error {rel}");
        }
    }

    #[test]
    fn characters_examples() {
        let dim = Dimension::new(2).unwrap();
        let g: GroupElement<f64> = GroupElement::identity(dim);
        let chi = fundamental_characters(&g);
        assert!((chi[0] - C::new(3.0, 0.0)).norm() < 1e-14);
        assert!((chi[1] - C::new(3.0, 0.0)).norm() < 1e-14);
        let g = GroupElement::from_diag(&[C::new(2.0, 0.0), C::new(0.5, 0.0)]).unwrap();
        let chi = fundamental_characters(&g);
        assert!((chi[0] - C::new(2.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn characters_match_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=4usize {
            let m = n + 1;
            let x = rand_traceless(m, &mut rng);
            let g = matrix_exp(&x).unwrap();
            let chi = fundamental_characters(&g);
            let vals = g.mat().eig().unwrap().values;
            // elementary symmetric polynomials by brute-force expansion
            let mut coeffs = vec![C::new(0.0, 0.0); m + 1];
            coeffs[0] = C::new(1.0, 0.0);
            for &lam in &vals {
                for k in (1..=m).rev() {
                    let prev = coeffs[k - 1];
                    coeffs[k] += prev * lam;
                }
            }
            for k in 1..=n {
                assert!(
                    (chi[k - 1] - coeffs[k]).norm() < 1e-8,
                    "n={n} k={k}: {} vs {}",
                    chi[k - 1],
                    coeffs[k]
                );
            }
        }
    }

    #[test]
    fn construction_invariants() {
        // zero-sum projection
        let q = CartanVector::new(vec![cx(1.0 + 1e-8, 0.0), cx(-1.0, 0.0)]).unwrap();
        let s: C = q.entries().iter().sum();
        assert!(s.norm() < 1e-12);
        // hard rejection
        assert!(CartanVector::<f64>::new(vec![cx(1.0, 0.0), cx(1.0, 0.0)]).is_err());
        assert!(AlgebraElement::<f64>::new(CMat::identity(2)).is_err());
        assert!(GroupElement::<f64>::new(CMat::identity(2).scaled(cx(2.0, 0.0))).is_err());
    }

    #[test]
    fn root_span_classification() {
        let dim = Dimension::new(3).unwrap();
        let sub = SimpleSubset::new(dim, [1, 3]).unwrap();
        assert!(sub.contains_root(&Root { i: 0, j: 1 }));
        assert!(sub.contains_root(&Root { i: 2, j: 3 }));
        assert!(!sub.contains_root(&Root { i: 0, j: 2 }));
        assert!(!sub.contains_root(&Root { i: 1, j: 3 }));
        assert!(!sub.contains_root(&Root { i: 3, j: 0 }));
        let full = SimpleSubset::full(dim);
        assert!(Root::all(dim).iter().all(|r| full.contains_root(r)));
    }
}
