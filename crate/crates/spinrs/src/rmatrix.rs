//! The coth-type dynamical r-matrix on sl(N+1), its shifted maps
//! R +- K, the q-derivative, and residual checkers for skew-symmetry,
//! H-equivariance and the modified dynamical Yang-Baxter equation.
//!
//! Entrywise, (R(q)X)_{ij} = -phi_{ij}(q) X_{ij} for i != j and zero on
//! the diagonal, where phi is +-1/2 off the span of the chosen simple
//! subset and (1/2) coth((q_i - q_j)/2) on it.

use crate::error::{Error, Result};
use crate::lie_typea::{
    trace_pairing, AlgebraElement, CartanVector, Dimension, GroupElement, Root, SimpleSubset,
};
use crate::linalg::CMat;
use crate::scalar::{r, re_cx, Cx, Real};
use num_complex::Complex;

/// Distance (in |sinh(alpha(q)/2)|) below which a coth evaluation is
/// treated as a wall hit.
pub const WALL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Immutable description of the r-matrix: dimension, simple subset pi',
/// and the scale kappa of the symmetric map K = kappa * id.
#[derive(Clone, Debug)]
pub struct RMatrixSpec<R: Real> {
    dim: Dimension,
    subset: SimpleSubset,
    k_scale: R,
}

impl<R: Real> RMatrixSpec<R> {
    pub fn new(dim: Dimension, subset: SimpleSubset, k_scale: R) -> Result<Self> {
        if k_scale == R::zero() {
            return Err(Error::Invariant("K must be a nonzero symmetric map".into()));
        }
        Ok(RMatrixSpec {
            dim,
            subset,
            k_scale,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn subset(&self) -> &SimpleSubset {
        &self.subset
    }

    pub fn k_scale(&self) -> R {
        self.k_scale
    }

    fn check_regular(&self, q: &CartanVector<R>) -> Result<()> {
        let m = self.dim.size();
        for i in 0..m {
            for j in (i + 1)..m {
                let root = Root { i, j };
                if self.subset.contains_root(&root) {
                    let s = (q.alpha(&root) * re_cx(r(0.5))).sinh().norm();
                    if s < r(WALL_TOL) {
                        return Err(Error::Singularity { i, j });
                    }
                }
            }
        }
        Ok(())
    }

    /// phi_alpha(q): +1/2 off the span (positive side), -1/2 (negative
    /// side), (1/2) coth(alpha(q)/2) on the span.
    pub fn phi_alpha(&self, q: &CartanVector<R>, alpha: &Root) -> Result<Cx<R>> {
        let half = re_cx(r::<R>(0.5));
        if self.subset.contains_root(alpha) {
            let a = q.alpha(alpha) * half;
            let s = a.sinh();
            if s.norm() < r(WALL_TOL) {
                return Err(Error::Singularity {
                    i: alpha.i,
                    j: alpha.j,
                });
            }
            Ok(half * a.cosh() / s)
        } else if alpha.is_positive() {
            Ok(half)
        } else {
            Ok(-half)
        }
    }

    /// R(q)X = -sum_alpha phi_alpha(q) X_alpha e_alpha; kills the
    /// diagonal since the sum runs over roots only.
    pub fn apply_r(&self, q: &CartanVector<R>, x: &AlgebraElement<R>) -> Result<AlgebraElement<R>> {
        self.check_regular(q)?;
        Ok(AlgebraElement::new_unchecked(self.apply_r_mat(q, x.mat())?))
    }

    pub(crate) fn apply_r_mat(&self, q: &CartanVector<R>, x: &CMat<R>) -> Result<CMat<R>> {
        let m = self.dim.size();
        if x.dim() != m {
            return Err(Error::Dimension("apply_r: matrix size".into()));
        }
        let mut out = CMat::zeros(m);
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    let phi = self.phi_alpha(q, &Root { i, j })?;
                    out[(i, j)] = -phi * x[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// R(q) +- K with K = kappa * id acting on the full matrix.
    pub fn apply_rpm(
        &self,
        q: &CartanVector<R>,
        x: &AlgebraElement<R>,
        sign: Sign,
    ) -> Result<AlgebraElement<R>> {
        let rx = self.apply_r(q, x)?;
        let k = re_cx(self.k_scale);
        let shift = match sign {
            Sign::Plus => x.scaled(k),
            Sign::Minus => x.scaled(-k),
        };
        Ok(rx.add(&shift))
    }

    /// Directional derivative of q -> R(q)A at q in direction dir. Only
    /// in-span roots contribute; the coefficient derivative is
    /// -(1/4) csch^2(alpha(q)/2) alpha(dir), so the entry derivative of
    /// (R(q)A)_{ij} = -phi_{ij} A_{ij} is
    /// +(1/4) csch^2((q_i-q_j)/2) (dir_i - dir_j) A_{ij}.
    pub fn dr_directional(
        &self,
        q: &CartanVector<R>,
        dir: &CartanVector<R>,
        a: &AlgebraElement<R>,
    ) -> Result<AlgebraElement<R>> {
        self.check_regular(q)?;
        let m = self.dim.size();
        let quarter = re_cx(r::<R>(0.25));
        let half = re_cx(r::<R>(0.5));
        let one = Complex::new(R::one(), R::zero());
        let mut out = CMat::zeros(m);
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let root = Root { i, j };
                if !self.subset.contains_root(&root) {
                    continue;
                }
                let s = (q.alpha(&root) * half).sinh();
                let csch2 = one / (s * s);
                out[(i, j)] = quarter * csch2 * dir.alpha(&root) * a.mat()[(i, j)];
            }
        }
        Ok(AlgebraElement::new_unchecked(out))
    }

    /// Gradient in the Cartan of q -> tr(R(q)A . B): the zero-sum vector
    /// whose pairing with any direction equals
    /// tr(dR(q)[dir]A . B).
    pub fn grad_pairing_term(
        &self,
        q: &CartanVector<R>,
        a: &AlgebraElement<R>,
        b: &AlgebraElement<R>,
    ) -> Result<CartanVector<R>> {
        self.check_regular(q)?;
        let m = self.dim.size();
        let quarter = re_cx(r::<R>(0.25));
        let half = re_cx(r::<R>(0.5));
        let one = Complex::new(R::one(), R::zero());
        let mut grad = vec![Complex::new(R::zero(), R::zero()); m];
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let root = Root { i, j };
                if !self.subset.contains_root(&root) {
                    continue;
                }
                let s = (q.alpha(&root) * half).sinh();
                let csch2 = one / (s * s);
                let term = quarter * csch2 * a.mat()[(i, j)] * b.mat()[(j, i)];
                grad[i] = grad[i] + term;
                grad[j] = grad[j] - term;
            }
        }
        // zero-sum by antisymmetry of the accumulation
        Ok(CartanVector::new_unchecked(grad))
    }

    /// Residual of the modified dynamical Yang-Baxter equation at
    /// (q, A, B), under the identifications ad* = -ad and iota* = Pi_h:
    ///
    ///   [RA, RB] + R([B, RA] - [A, RB])
    ///     + dR(q)[Pi_h A](B) - dR(q)[Pi_h B](A)
    ///     + iota(grad_q tr(R(q)A B)) + kappa^2 [A, B].
    pub fn mdybe_residual(
        &self,
        q: &CartanVector<R>,
        a: &AlgebraElement<R>,
        b: &AlgebraElement<R>,
    ) -> Result<AlgebraElement<R>> {
        let ra = self.apply_r(q, a)?;
        let rb = self.apply_r(q, b)?;
        let t1 = ra.commutator(&rb);
        let coad = b.commutator(&ra).sub(&a.commutator(&rb));
        let t2 = self.apply_r(q, &coad)?;
        let dir_a = crate::lie_typea::proj_cartan(a);
        let dir_b = crate::lie_typea::proj_cartan(b);
        let t3 = self.dr_directional(q, &dir_a, b)?;
        let t4 = self.dr_directional(q, &dir_b, a)?;
        let grad = self.grad_pairing_term(q, a, b)?;
        let t5 = AlgebraElement::new_unchecked(grad.to_diagonal_matrix());
        let kk = re_cx(self.k_scale * self.k_scale);
        let t6 = a.commutator(b).scaled(kk);
        Ok(t1.add(&t2).add(&t3).sub(&t4).add(&t5).add(&t6))
    }

    /// H-equivariance defect R(q)(Ad_h A) - Ad_h (R(q) A) for diagonal h
    /// (Ad*_{h^{-1}} q = q on the Cartan).
    pub fn equivariance_defect(
        &self,
        q: &CartanVector<R>,
        h: &GroupElement<R>,
        a: &AlgebraElement<R>,
    ) -> Result<AlgebraElement<R>> {
        if !h.is_diagonal(r(1e-12)) {
            return Err(Error::Invariant("equivariance_defect: h must be diagonal".into()));
        }
        let ad_a = AlgebraElement::new_unchecked(h.ad(a.mat())?);
        let lhs = self.apply_r(q, &ad_a)?;
        let r_a = self.apply_r(q, a)?;
        let rhs = AlgebraElement::new_unchecked(h.ad(r_a.mat())?);
        Ok(lhs.sub(&rhs))
    }
}

/// Skew-symmetry residual tr(R(q)A . B) + tr(A . R(q)B).
pub fn skew_residual<R: Real>(
    spec: &RMatrixSpec<R>,
    q: &CartanVector<R>,
    a: &AlgebraElement<R>,
    b: &AlgebraElement<R>,
) -> Result<Cx<R>> {
    let ra = spec.apply_r(q, a)?;
    let rb = spec.apply_r(q, b)?;
    Ok(trace_pairing(&ra, b)? + trace_pairing(a, &rb)?)
}

/// Residual of the identity R^-(q) = Ad_{e^q} o R^+(q) - iota o Pi_h,
/// valid for the full simple subset with kappa = 1/2.
pub fn theta_compatibility_defect<R: Real>(
    spec: &RMatrixSpec<R>,
    q: &CartanVector<R>,
    a: &AlgebraElement<R>,
) -> Result<AlgebraElement<R>> {
    let rp = spec.apply_rpm(q, a, Sign::Plus)?;
    let rm = spec.apply_rpm(q, a, Sign::Minus)?;
    let eq = q.exp_diag();
    let ad = AlgebraElement::new_unchecked(eq.ad(rp.mat())?);
    let pih = AlgebraElement::new_unchecked(crate::lie_typea::proj_cartan(a).to_diagonal_matrix());
    Ok(rm.sub(&ad.sub(&pih)))
}
