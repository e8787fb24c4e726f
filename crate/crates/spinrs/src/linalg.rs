//! Dense complex linear algebra for small square matrices.
//!
//! Everything here is hand-rolled so it stays generic over the real base
//! scalar: LU with partial pivoting, a scaling-and-squaring Pade matrix
//! exponential, and a complex Schur (shifted QR) eigendecomposition with
//! triangular back-substitution for the eigenvectors.

use crate::error::{Error, Result};
use crate::scalar::{cx, r, re_cx, Cx, Real};
use num_complex::Complex;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat<R: Real> {
    n: usize,
    data: Vec<Cx<R>>,
}

impl<R: Real> std::fmt::Debug for CMat<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:?}+{:?}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<R: Real> CMat<R> {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![Complex::new(R::zero(), R::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(R::one(), R::zero());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Cx<R>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Cx<R>>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "expected {n} columns, found {}",
                    row.len()
                )));
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn from_diag(d: &[Cx<R>]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = d[i];
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> Vec<Cx<R>> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> Cx<R> {
        let mut t = Complex::new(R::zero(), R::zero());
        for i in 0..self.n {
            t = t + self[(i, i)];
        }
        t
    }

    pub fn scaled(&self, s: Cx<R>) -> Self {
        let mut m = self.clone();
        for z in m.data.iter_mut() {
            *z = *z * s;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius_norm(&self) -> R {
        let mut s = R::zero();
        for z in &self.data {
            s = s + z.norm_sqr();
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> R {
        let mut m = R::zero();
        for z in &self.data {
            m = m.max(z.norm());
        }
        m
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> R {
        let mut best = R::zero();
        for j in 0..self.n {
            let mut s = R::zero();
            for i in 0..self.n {
                s = s + self[(i, j)].norm();
            }
            best = best.max(s);
        }
        best
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn is_hermitian(&self, tol: R) -> bool {
        (self - &self.adjoint()).max_abs() <= tol
    }

    pub fn is_diagonal(&self, tol: R) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self[(i, j)].norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Matrix powers g, g^2, ..., g^kmax.
    pub fn powers(&self, kmax: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(kmax);
        if kmax == 0 {
            return out;
        }
        out.push(self.clone());
        for _ in 1..kmax {
            let next = &(*out.last().unwrap()) * self;
            out.push(next);
        }
        out
    }

    pub fn lu(&self) -> Lu<R> {
        Lu::new(self)
    }

    pub fn det(&self) -> Cx<R> {
        self.lu().det()
    }

    pub fn inverse(&self) -> Result<Self> {
        self.lu().solve_mat(&Self::identity(self.n))
    }

    /// Matrix exponential by scaling-and-squaring with a [6/6] Pade
    /// approximant.
    pub fn expm(&self) -> Result<Self> {
        let n = self.n;
        let norm = self.norm_one();
        if !norm.is_finite() {
            return Err(Error::Range("non-finite entries in expm".into()));
        }
        if norm.to_f64().unwrap_or(f64::INFINITY) > 1e6 {
            return Err(Error::Range(format!("expm norm too large: {norm}")));
        }
        // scale so that ||A/2^s|| <= 0.5
        let mut s: i32 = 0;
        let half = r::<R>(0.5);
        let mut scaled_norm = norm;
        while scaled_norm > half {
            scaled_norm = scaled_norm * half;
            s += 1;
        }
        let a = self.scaled(re_cx(half.powi(s)));
        // [6/6] Pade coefficients
        let c = [
            1.0,
            0.5,
            5.0 / 44.0,
            1.0 / 66.0,
            1.0 / 792.0,
            1.0 / 15840.0,
            1.0 / 665280.0,
        ];
        let pows = a.powers(6);
        let mut num = Self::identity(n).scaled(cx(c[0], 0.0));
        let mut den = Self::identity(n).scaled(cx(c[0], 0.0));
        for (k, p) in pows.iter().enumerate() {
            let ck = cx::<R>(c[k + 1], 0.0);
            num = &num + &p.scaled(ck);
            let sign = if (k + 1) % 2 == 0 { ck } else { -ck };
            den = &den + &p.scaled(sign);
        }
        let mut e = den.lu().solve_mat(&num)?;
        for _ in 0..s {
            e = &e * &e;
        }
        Ok(e)
    }

    /// Full eigendecomposition via complex Schur form. Eigenvalues are
    /// returned in Schur order with unit-norm eigenvector columns.
    pub fn eig(&self) -> Result<EigDecomp<R>> {
        schur_eig(self)
    }
}

impl<R: Real> Index<(usize, usize)> for CMat<R> {
    type Output = Cx<R>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cx<R> {
        &self.data[i * self.n + j]
    }
}

impl<R: Real> IndexMut<(usize, usize)> for CMat<R> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<R> {
        &mut self.data[i * self.n + j]
    }
}

impl<R: Real> Add for &CMat<R> {
    type Output = CMat<R>;
    fn add(self, rhs: &CMat<R>) -> CMat<R> {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a = *a + *b;
        }
        out
    }
}

impl<R: Real> Sub for &CMat<R> {
    type Output = CMat<R>;
    fn sub(self, rhs: &CMat<R>) -> CMat<R> {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a = *a - *b;
        }
        out
    }
}

impl<R: Real> Mul for &CMat<R> {
    type Output = CMat<R>;
    fn mul(self, rhs: &CMat<R>) -> CMat<R> {
        assert_eq!(self.n, rhs.n, "matrix size mismatch");
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == R::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// LU decomposition with partial pivoting.
pub struct Lu<R: Real> {
    n: usize,
    lu: Vec<Cx<R>>,
    piv: Vec<usize>,
    sign_flips: usize,
    singular: bool,
}

impl<R: Real> Lu<R> {
    fn new(a: &CMat<R>) -> Self {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut flips = 0usize;
        let mut singular = false;
        for k in 0..n {
            // pivot
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == R::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                flips += 1;
            }
            let pivval = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivval;
                lu[i * n + k] = f;
                for j in (k + 1)..n {
                    let sub = f * lu[k * n + j];
                    lu[i * n + j] = lu[i * n + j] - sub;
                }
            }
        }
        Lu {
            n,
            lu,
            piv,
            sign_flips: flips,
            singular,
        }
    }

    pub fn det(&self) -> Cx<R> {
        let mut d = Complex::new(R::one(), R::zero());
        for k in 0..self.n {
            d = d * self.lu[k * self.n + k];
        }
        if self.sign_flips % 2 == 1 {
            d = -d;
        }
        d
    }

    pub fn solve_vec(&self, b: &[Cx<R>]) -> Result<Vec<Cx<R>>> {
        if self.singular {
            return Err(Error::Range("singular matrix in LU solve".into()));
        }
        let n = self.n;
        let mut x: Vec<Cx<R>> = (0..n).map(|i| b[self.piv[i]]).collect();
        for i in 1..n {
            for k in 0..i {
                let sub = self.lu[i * n + k] * x[k];
                x[i] = x[i] - sub;
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let sub = self.lu[i * n + k] * x[k];
                x[i] = x[i] - sub;
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Solve A X = B column by column.
    pub fn solve_mat(&self, b: &CMat<R>) -> Result<CMat<R>> {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for j in 0..n {
            let col: Vec<Cx<R>> = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve_vec(&col)?;
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        Ok(out)
    }
}

pub struct EigDecomp<R: Real> {
    pub values: Vec<Cx<R>>,
    /// Eigenvector columns, unit 2-norm.
    pub vectors: CMat<R>,
}

/// Complex Givens rotation zeroing b against a: G [a; b] = [r; 0] with
/// G = [[c, s], [-conj(s), c]], c real.
fn givens<R: Real>(a: Cx<R>, b: Cx<R>) -> (R, Cx<R>) {
    let an = a.norm();
    let bn = b.norm();
    if bn == R::zero() {
        return (R::one(), Complex::new(R::zero(), R::zero()));
    }
    if an == R::zero() {
        return (R::zero(), b.conj() / re_cx(bn));
    }
    let rho = (an * an + bn * bn).sqrt();
    let c = an / rho;
    let s = (a / re_cx(an)) * b.conj() / re_cx(rho);
    (c, s)
}

/// Reduce to upper Hessenberg form by Householder reflections; returns
/// (H, Q) with A = Q H Q^H.
fn hessenberg<R: Real>(a: &CMat<R>) -> (CMat<R>, CMat<R>) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = CMat::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..(n - 2) {
        // Householder vector for column k, rows k+1..n
        let mut v: Vec<Cx<R>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = v[0];
        let norm = v.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm == R::zero() {
            continue;
        }
        let phase = if alpha.norm() > R::zero() {
            alpha / re_cx(alpha.norm())
        } else {
            Complex::new(R::one(), R::zero())
        };
        let beta = -phase * re_cx(norm);
        v[0] = v[0] - beta;
        let vnorm2 = v.iter().fold(R::zero(), |acc, z| acc + z.norm_sqr());
        if vnorm2 == R::zero() {
            continue;
        }
        let two_over = r::<R>(2.0) / vnorm2;
        // H <- P H P with P = I - 2 v v^H / |v|^2 acting on rows/cols k+1..n
        // rows
        for j in 0..n {
            let mut dot = Complex::new(R::zero(), R::zero());
            for (idx, i) in (k + 1..n).enumerate() {
                dot = dot + v[idx].conj() * h[(i, j)];
            }
            dot = dot * re_cx(two_over);
            for (idx, i) in (k + 1..n).enumerate() {
                let sub = v[idx] * dot;
                h[(i, j)] = h[(i, j)] - sub;
            }
        }
        // columns
        for i in 0..n {
            let mut dot = Complex::new(R::zero(), R::zero());
            for (idx, j) in (k + 1..n).enumerate() {
                dot = dot + h[(i, j)] * v[idx];
            }
            dot = dot * re_cx(two_over);
            for (idx, j) in (k + 1..n).enumerate() {
                let sub = dot * v[idx].conj();
                h[(i, j)] = h[(i, j)] - sub;
            }
        }
        // accumulate Q <- Q P
        for i in 0..n {
            let mut dot = Complex::new(R::zero(), R::zero());
            for (idx, j) in (k + 1..n).enumerate() {
                dot = dot + q[(i, j)] * v[idx];
            }
            dot = dot * re_cx(two_over);
            for (idx, j) in (k + 1..n).enumerate() {
                let sub = dot * v[idx].conj();
                q[(i, j)] = q[(i, j)] - sub;
            }
        }
        // clean explicit zeros below the subdiagonal
        for i in (k + 2)..n {
            h[(i, k)] = Complex::new(R::zero(), R::zero());
        }
    }
    (h, q)
}

fn schur_eig<R: Real>(a: &CMat<R>) -> Result<EigDecomp<R>> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    if n == 1 {
        return Ok(EigDecomp {
            values: vec![a[(0, 0)]],
            vectors: CMat::identity(1),
        });
    }
    let (mut h, mut q) = hessenberg(a);
    let eps = R::epsilon();
    let scale = a.frobenius_norm().max(R::one());
    let tol = eps * scale * r(8.0);
    let max_iter = 60 * n;
    let mut hi = n - 1;
    let mut iter_count = 0usize;
    let mut stall = 0usize;
    while hi > 0 {
        // deflate
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= eps * local.max(scale * eps) + tol * r(1e-3) {
                h[(lo, lo - 1)] = Complex::new(R::zero(), R::zero());
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            stall = 0;
            continue;
        }
        iter_count += 1;
        if iter_count > max_iter {
            return Err(Error::Accuracy("QR iteration failed to converge".into()));
        }
        // Wilkinson shift from trailing 2x2 of the active block
        let aa = h[(hi - 1, hi - 1)];
        let bb = h[(hi - 1, hi)];
        let cc = h[(hi, hi - 1)];
        let dd = h[(hi, hi)];
        let tr = aa + dd;
        let det = aa * dd - bb * cc;
        let half = cx::<R>(0.5, 0.0);
        let disc = (tr * tr * cx(0.25, 0.0) - det).sqrt();
        let l1 = tr * half + disc;
        let l2 = tr * half - disc;
        let mut sigma = if (l1 - dd).norm() < (l2 - dd).norm() {
            l1
        } else {
            l2
        };
        stall += 1;
        if stall % 12 == 0 {
            // exceptional shift
            sigma = sigma + re_cx(h[(hi, hi - 1)].norm() + h[(hi - 1, hi - 2.min(hi - 1))].norm());
        }
        // implicit single-shift QR sweep on rows lo..=hi
        let mut x = h[(lo, lo)] - sigma;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(x, y);
            let sc = Complex::new(c, R::zero());
            // rows k, k+1
            let jstart = if k > lo { k - 1 } else { lo };
            for j in jstart..n {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = sc * t1 + s * t2;
                h[(k + 1, j)] = -s.conj() * t1 + sc * t2;
            }
            // columns k, k+1
            let iend = (k + 2).min(hi) + 1;
            for i in 0..iend {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = sc * t1 + s.conj() * t2;
                h[(i, k + 1)] = -s * t1 + sc * t2;
            }
            // accumulate Q <- Q G^H
            for i in 0..n {
                let t1 = q[(i, k)];
                let t2 = q[(i, k + 1)];
                q[(i, k)] = sc * t1 + s.conj() * t2;
                q[(i, k + 1)] = -s * t1 + sc * t2;
            }
            if k + 2 <= hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    // h is (numerically) upper triangular now
    let values = h.diag();
    // eigenvectors of the triangular factor by back-substitution
    let mut vt = CMat::zeros(n);
    for k in 0..n {
        let lam = values[k];
        let mut v = vec![Complex::new(R::zero(), R::zero()); n];
        v[k] = Complex::new(R::one(), R::zero());
        for i in (0..k).rev() {
            let mut s = Complex::new(R::zero(), R::zero());
            for m in (i + 1)..=k {
                s = s + h[(i, m)] * v[m];
            }
            let mut den = h[(i, i)] - lam;
            if den.norm() < eps * scale {
                den = Complex::new(eps * scale, R::zero());
            }
            v[i] = -s / den;
        }
        for i in 0..n {
            vt[(i, k)] = v[i];
        }
    }
    let mut vectors = &q * &vt;
    // normalize columns
    for j in 0..n {
        let mut nrm = R::zero();
        for i in 0..n {
            nrm = nrm + vectors[(i, j)].norm_sqr();
        }
        let nrm = nrm.sqrt();
        if nrm > R::zero() {
            for i in 0..n {
                vectors[(i, j)] = vectors[(i, j)] / re_cx(nrm);
            }
        }
    }
    Ok(EigDecomp { values, vectors })
}

/// Principal m-th root of a complex scalar.
pub fn principal_root<R: Real>(z: Cx<R>, m: usize) -> Cx<R> {
    let rad = z.norm().powf(R::one() / r(m as f64));
    let ang = z.arg() / r(m as f64);
    Complex::from_polar(rad, ang)
}
