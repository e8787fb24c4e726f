//! The trivial groupoid U x G x U over the Cartan, its coboundary
//! dynamical Poisson bracket, observables with analytic or
//! finite-difference gradients, the diagonal gauge action and its
//! momentum map.

use crate::error::{Error, Result};
use crate::lie_typea::{
    invariant_gradient, power_trace_value, trace_pairing_mat, AlgebraElement, CartanVector,
    Dimension, GroupElement,
};
use crate::linalg::CMat;
use crate::rmatrix::RMatrixSpec;
use crate::scalar::{r, re_cx, Cx, Real};
use num_complex::Complex;
use std::sync::Arc;

/// Tolerance for the gauge-bundle predicate u = v and for the
/// source/target match in multiplication.
pub const BUNDLE_TOL: f64 = 1e-10;

/// Default central-difference step for observables without analytic
/// gradients.
pub const FD_STEP: f64 = 1e-6;

/// A point (u, g, v) of the trivial groupoid: source u, target v.
#[derive(Clone, Debug)]
pub struct GroupoidPoint<R: Real> {
    pub u: CartanVector<R>,
    pub g: GroupElement<R>,
    pub v: CartanVector<R>,
}

impl<R: Real> GroupoidPoint<R> {
    pub fn new(u: CartanVector<R>, g: GroupElement<R>, v: CartanVector<R>) -> Result<Self> {
        if u.size() != g.size() || v.size() != g.size() {
            return Err(Error::Dimension("groupoid point component sizes".into()));
        }
        Ok(GroupoidPoint { u, g, v })
    }

    pub fn size(&self) -> usize {
        self.g.size()
    }

    /// u = v within the bundle tolerance: the gauge group bundle, where
    /// the dynamics lives.
    pub fn on_gauge_bundle(&self) -> bool {
        self.u.sub(&self.v).norm_inf() < r(BUNDLE_TOL)
    }
}

/// gamma = alpha - beta = u - v; vanishes exactly on the gauge bundle.
pub fn momentum_gamma<R: Real>(p: &GroupoidPoint<R>) -> CartanVector<R> {
    p.u.sub(&p.v)
}

/// h . (u, g, v) = (u, h g h^{-1}, v) for diagonal h (the coadjoint
/// action is trivial on the Cartan).
pub fn h_action<R: Real>(h: &GroupElement<R>, p: &GroupoidPoint<R>) -> Result<GroupoidPoint<R>> {
    if !h.is_diagonal(r(1e-12)) {
        return Err(Error::Invariant("h_action: h must be diagonal".into()));
    }
    let g = GroupElement::new(h.ad(p.g.mat())?)?;
    Ok(GroupoidPoint {
        u: p.u.clone(),
        g,
        v: p.v.clone(),
    })
}

/// m((u,g,v),(v,g',w)) = (u, g g', w); requires target(p1) = source(p2).
pub fn groupoid_multiply<R: Real>(
    p1: &GroupoidPoint<R>,
    p2: &GroupoidPoint<R>,
) -> Result<GroupoidPoint<R>> {
    let gap = p1.v.sub(&p2.u).norm_inf();
    if gap > r(BUNDLE_TOL) {
        return Err(Error::Composability(format!(
            "target/source mismatch: |v1 - u2| = {gap}"
        )));
    }
    Ok(GroupoidPoint {
        u: p1.u.clone(),
        g: p1.g.multiply(&p2.g),
        v: p2.v.clone(),
    })
}

/// (u, g, v)^{-1} = (v, g^{-1}, u).
pub fn groupoid_inverse<R: Real>(p: &GroupoidPoint<R>) -> Result<GroupoidPoint<R>> {
    Ok(GroupoidPoint {
        u: p.v.clone(),
        g: p.g.inverse()?,
        v: p.u.clone(),
    })
}

/// The four gradients of an observable at a point: the two Cartan
/// gradients d1, d2 (in u and v) and the left/right group gradients
/// defined by <dg_left, X> = d/dt phi(u, e^{tX} g, v) and
/// <dg_right, X> = d/dt phi(u, g e^{tX}, v) at t = 0.
#[derive(Clone, Debug)]
pub struct Gradients<R: Real> {
    pub d1: CartanVector<R>,
    pub d2: CartanVector<R>,
    pub dg_left: AlgebraElement<R>,
    pub dg_right: AlgebraElement<R>,
}

type EvalFn<R> = dyn Fn(&GroupoidPoint<R>) -> Result<Cx<R>> + Send + Sync;
type GradFn<R> = dyn Fn(&GroupoidPoint<R>) -> Result<Gradients<R>> + Send + Sync;

/// A scalar function on the groupoid, optionally carrying analytic
/// gradients; otherwise central differences at `fd_step` are used and
/// the result is tagged approximate.
#[derive(Clone)]
pub struct Observable<R: Real> {
    eval: Arc<EvalFn<R>>,
    analytic: Option<Arc<GradFn<R>>>,
    fd_step: R,
}

impl<R: Real> Observable<R> {
    pub fn from_eval(eval: Arc<EvalFn<R>>) -> Self {
        Observable {
            eval,
            analytic: None,
            fd_step: r(FD_STEP),
        }
    }

    pub fn with_analytic(eval: Arc<EvalFn<R>>, grad: Arc<GradFn<R>>) -> Self {
        Observable {
            eval,
            analytic: Some(grad),
            fd_step: r(FD_STEP),
        }
    }

    pub fn with_fd_step(mut self, step: R) -> Self {
        self.fd_step = step;
        self
    }

    pub fn has_analytic_gradients(&self) -> bool {
        self.analytic.is_some()
    }

    pub fn eval(&self, p: &GroupoidPoint<R>) -> Result<Cx<R>> {
        (self.eval)(p)
    }

    /// Gradients at p; the flag is true when they came from finite
    /// differences.
    pub fn gradients(&self, p: &GroupoidPoint<R>) -> Result<(Gradients<R>, bool)> {
        if let Some(g) = &self.analytic {
            return Ok((g(p)?, false));
        }
        Ok((self.fd_gradients(p)?, true))
    }

    fn fd_gradients(&self, p: &GroupoidPoint<R>) -> Result<Gradients<R>> {
        let m = p.size();
        let eps = self.fd_step;
        let two_eps = re_cx(eps + eps);
        let mm = r::<R>(m as f64);

        let diff = |pp: &GroupoidPoint<R>, pm: &GroupoidPoint<R>| -> Result<Cx<R>> {
            Ok((self.eval(pp)? - self.eval(pm)?) / two_eps)
        };

        // Cartan gradients: probe zero-sum directions e_k - 1/m.
        let mut d1 = Vec::with_capacity(m);
        let mut d2 = Vec::with_capacity(m);
        for k in 0..m {
            let mut dir = vec![-R::one() / mm; m];
            dir[k] = dir[k] + R::one();
            let dir = CartanVector::from_real(&dir)?;
            let step = dir.scaled(re_cx(eps));
            let pu_p = GroupoidPoint {
                u: p.u.add(&step),
                g: p.g.clone(),
                v: p.v.clone(),
            };
            let pu_m = GroupoidPoint {
                u: p.u.sub(&step),
                g: p.g.clone(),
                v: p.v.clone(),
            };
            d1.push(diff(&pu_p, &pu_m)?);
            let pv_p = GroupoidPoint {
                u: p.u.clone(),
                g: p.g.clone(),
                v: p.v.add(&step),
            };
            let pv_m = GroupoidPoint {
                u: p.u.clone(),
                g: p.g.clone(),
                v: p.v.sub(&step),
            };
            d2.push(diff(&pv_p, &pv_m)?);
        }

        // Group gradients: <D, E_ab> = D_ba, probed with exp(+-eps E_ab)
        // (exact: I + eps E_ab off the diagonal); diagonal components
        // with the traceless direction E_aa - I/m.
        let mut left = CMat::zeros(m);
        let mut right = CMat::zeros(m);
        let zero = Complex::new(R::zero(), R::zero());
        for a in 0..m {
            for b in 0..m {
                let dir = if a == b {
                    let mut d = CMat::identity(m).scaled(re_cx(-R::one() / mm));
                    d[(a, a)] = d[(a, a)] + Complex::new(R::one(), R::zero());
                    d
                } else {
                    let mut d = CMat::zeros(m);
                    d[(a, b)] = Complex::new(R::one(), R::zero());
                    d
                };
                let ep = dir.scaled(re_cx(eps)).expm()?;
                let em = dir.scaled(re_cx(-eps)).expm()?;
                let gl_p = GroupoidPoint {
                    u: p.u.clone(),
                    g: GroupElement::sl_normalized(&ep * p.g.mat()),
                    v: p.v.clone(),
                };
                let gl_m = GroupoidPoint {
                    u: p.u.clone(),
                    g: GroupElement::sl_normalized(&em * p.g.mat()),
                    v: p.v.clone(),
                };
                left[(b, a)] = diff(&gl_p, &gl_m)?;
                let gr_p = GroupoidPoint {
                    u: p.u.clone(),
                    g: GroupElement::sl_normalized(p.g.mat() * &ep),
                    v: p.v.clone(),
                };
                let gr_m = GroupoidPoint {
                    u: p.u.clone(),
                    g: GroupElement::sl_normalized(p.g.mat() * &em),
                    v: p.v.clone(),
                };
                right[(b, a)] = diff(&gr_p, &gr_m)?;
            }
        }
        // remove the trace picked up by roundoff
        let tl = left.trace() / re_cx(mm);
        let tr_ = right.trace() / re_cx(mm);
        for a in 0..m {
            left[(a, a)] = left[(a, a)] - tl;
            right[(a, a)] = right[(a, a)] - tr_;
        }
        let _ = zero;
        Ok(Gradients {
            d1: CartanVector::new(d1)?,
            d2: CartanVector::new(d2)?,
            dg_left: AlgebraElement::new(left)?,
            dg_right: AlgebraElement::new(right)?,
        })
    }
}

/// Pullback of f(g) = sum c_k tr(g^k) along the middle projection; the
/// Cartan gradients vanish and both group gradients equal the central
/// element Df(g). They are computed as g C and C g with C = sum c_k k
/// g^{k-1} -- equal in exact arithmetic but distinct float products, so
/// downstream cancellations are roundoff-level rather than bitwise.
pub fn power_trace_observable<R: Real>(poly: Vec<(u32, Cx<R>)>) -> Observable<R> {
    let poly_eval = poly.clone();
    let eval: Arc<EvalFn<R>> =
        Arc::new(move |p: &GroupoidPoint<R>| Ok(power_trace_value(p.g.mat(), &poly_eval)));
    let grad: Arc<GradFn<R>> = Arc::new(move |p: &GroupoidPoint<R>| {
        let m = p.size();
        let dim = Dimension::new(m - 1)?;
        let kmax = poly.iter().map(|&(k, _)| k as usize).max().unwrap_or(0);
        let mut c = CMat::zeros(m);
        if kmax >= 1 {
            let pows = p.g.mat().powers(kmax);
            for &(k, coeff) in &poly {
                if k == 0 {
                    continue;
                }
                let kk = re_cx(r::<R>(k as f64));
                let gkm1 = if k == 1 {
                    CMat::identity(m)
                } else {
                    pows[k as usize - 2].clone()
                };
                c = &c + &gkm1.scaled(coeff * kk);
            }
        }
        let gc = p.g.mat() * &c;
        let cg = &c * p.g.mat();
        let mm = re_cx(r::<R>(m as f64));
        let strip = |mut x: CMat<R>| {
            let t = x.trace() / mm;
            for i in 0..m {
                x[(i, i)] = x[(i, i)] - t;
            }
            AlgebraElement::new_unchecked(x)
        };
        Ok(Gradients {
            d1: CartanVector::zero(dim),
            d2: CartanVector::zero(dim),
            dg_left: strip(gc),
            dg_right: strip(cg),
        })
    });
    Observable::with_analytic(eval, grad)
}

/// phi(p) = tr(C g); left gradient is the traceless part of gC, right
/// gradient of Cg.
pub fn linear_g_observable<R: Real>(c: CMat<R>) -> Observable<R> {
    let c_eval = c.clone();
    let eval: Arc<EvalFn<R>> =
        Arc::new(move |p: &GroupoidPoint<R>| trace_pairing_mat(&c_eval, p.g.mat()));
    let grad: Arc<GradFn<R>> = Arc::new(move |p: &GroupoidPoint<R>| {
        let m = p.size();
        let dim = Dimension::new(m - 1)?;
        let gc = p.g.mat() * &c;
        let cg = &c * p.g.mat();
        let mm = re_cx(r::<R>(m as f64));
        let strip = |mut x: CMat<R>| {
            let t = x.trace() / mm;
            for i in 0..m {
                x[(i, i)] = x[(i, i)] - t;
            }
            AlgebraElement::new_unchecked(x)
        };
        Ok(Gradients {
            d1: CartanVector::zero(dim),
            d2: CartanVector::zero(dim),
            dg_left: strip(gc),
            dg_right: strip(cg),
        })
    });
    Observable::with_analytic(eval, grad)
}

/// phi(p) = <a, u> (or <a, v>): linear Cartan coordinate.
pub fn linear_cartan_observable<R: Real>(a: CartanVector<R>, on_source: bool) -> Observable<R> {
    let a_eval = a.clone();
    let eval: Arc<EvalFn<R>> = Arc::new(move |p: &GroupoidPoint<R>| {
        let q = if on_source { &p.u } else { &p.v };
        let mut s = Complex::new(R::zero(), R::zero());
        for (x, y) in a_eval.entries().iter().zip(q.entries()) {
            s = s + *x * *y;
        }
        Ok(s)
    });
    let grad: Arc<GradFn<R>> = Arc::new(move |p: &GroupoidPoint<R>| {
        let m = p.size();
        let dim = Dimension::new(m - 1)?;
        let zero = CartanVector::zero(dim);
        let (d1, d2) = if on_source {
            (a.clone(), zero)
        } else {
            (zero, a.clone())
        };
        Ok(Gradients {
            d1,
            d2,
            dg_left: AlgebraElement::zero(dim),
            dg_right: AlgebraElement::zero(dim),
        })
    });
    Observable::with_analytic(eval, grad)
}

/// Pointwise product; gradients by the Leibniz rule when both factors
/// carry analytic gradients.
pub fn product_observable<R: Real>(a: &Observable<R>, b: &Observable<R>) -> Observable<R> {
    let (ae, be) = (a.clone(), b.clone());
    let eval: Arc<EvalFn<R>> =
        Arc::new(move |p: &GroupoidPoint<R>| Ok(ae.eval(p)? * be.eval(p)?));
    if a.has_analytic_gradients() && b.has_analytic_gradients() {
        let (ag, bg) = (a.clone(), b.clone());
        let grad: Arc<GradFn<R>> = Arc::new(move |p: &GroupoidPoint<R>| {
            let fa = ag.eval(p)?;
            let fb = bg.eval(p)?;
            let (ga, _) = ag.gradients(p)?;
            let (gb, _) = bg.gradients(p)?;
            Ok(Gradients {
                d1: ga.d1.scaled(fb).add(&gb.d1.scaled(fa)),
                d2: ga.d2.scaled(fb).add(&gb.d2.scaled(fa)),
                dg_left: ga.dg_left.scaled(fb).add(&gb.dg_left.scaled(fa)),
                dg_right: ga.dg_right.scaled(fb).add(&gb.dg_right.scaled(fa)),
            })
        });
        Observable::with_analytic(eval, grad)
    } else {
        Observable::from_eval(eval)
    }
}

/// <iota(q), X> = sum_k q_k X_kk: the Cartan vector paired against the
/// diagonal of an algebra element.
fn iota_pairing<R: Real>(q: &CartanVector<R>, x: &AlgebraElement<R>) -> Cx<R> {
    let mut s = Complex::new(R::zero(), R::zero());
    for (k, qk) in q.entries().iter().enumerate() {
        s = s + *qk * x.mat()[(k, k)];
    }
    s
}

/// The coboundary dynamical Poisson bracket {phi, psi} at p, times
/// `rescale` (1 for the bare bracket, 1/2 for the dynamics
/// normalization). The Cartan-Cartan terms vanish identically since the
/// Cartan is abelian.
pub fn bracket_eval<R: Real>(
    spec: &RMatrixSpec<R>,
    phi: &Observable<R>,
    psi: &Observable<R>,
    p: &GroupoidPoint<R>,
    rescale: R,
) -> Result<Cx<R>> {
    let (gp, _) = phi.gradients(p)?;
    let (gq, _) = psi.gradients(p)?;
    let mut s = Complex::new(R::zero(), R::zero());
    s = s - iota_pairing(&gp.d1, &gq.dg_left);
    s = s - iota_pairing(&gp.d2, &gq.dg_right);
    s = s + iota_pairing(&gq.d1, &gp.dg_left);
    s = s + iota_pairing(&gq.d2, &gp.dg_right);
    let rv = spec.apply_r(&p.v, &gp.dg_right)?;
    s = s + crate::lie_typea::trace_pairing(&rv, &gq.dg_right)?;
    let ru = spec.apply_r(&p.u, &gp.dg_left)?;
    s = s - crate::lie_typea::trace_pairing(&ru, &gq.dg_left)?;
    Ok(s * re_cx(rescale))
}

/// Closed form of the bracket of two invariant pullbacks:
/// {f1 o Pr2, f2 o Pr2}(p) = <(R(v) - R(u)) Df1(g), Df2(g)>.
pub fn invariant_pair_bracket<R: Real>(
    spec: &RMatrixSpec<R>,
    f1_poly: &[(u32, Cx<R>)],
    f2_poly: &[(u32, Cx<R>)],
    p: &GroupoidPoint<R>,
) -> Result<Cx<R>> {
    let d1 = invariant_gradient(&p.g, f1_poly);
    let d2 = invariant_gradient(&p.g, f2_poly);
    let rv = spec.apply_r(&p.v, &d1)?;
    let ru = spec.apply_r(&p.u, &d1)?;
    crate::lie_typea::trace_pairing(&rv.sub(&ru), &d2)
}

/// {phi, psi} as an observable of the base point, with finite-difference
/// gradients at `fd_step`; used for sampling the Jacobi identity.
pub fn bracket_observable<R: Real>(
    spec: &RMatrixSpec<R>,
    phi: &Observable<R>,
    psi: &Observable<R>,
    rescale: R,
    fd_step: R,
) -> Observable<R> {
    let spec = spec.clone();
    let (phi, psi) = (phi.clone(), psi.clone());
    let eval: Arc<EvalFn<R>> =
        Arc::new(move |p: &GroupoidPoint<R>| bracket_eval(&spec, &phi, &psi, p, rescale));
    Observable::from_eval(eval).with_fd_step(fd_step)
}

/// Cyclic sum {phi,{psi,chi}} + {psi,{chi,phi}} + {chi,{phi,psi}} with
/// the inner brackets differentiated numerically at `fd_step`.
pub fn jacobi_cyclic<R: Real>(
    spec: &RMatrixSpec<R>,
    phi: &Observable<R>,
    psi: &Observable<R>,
    chi: &Observable<R>,
    p: &GroupoidPoint<R>,
    rescale: R,
    fd_step: R,
) -> Result<Cx<R>> {
    let b_pc = bracket_observable(spec, psi, chi, rescale, fd_step);
    let b_cp = bracket_observable(spec, chi, phi, rescale, fd_step);
    let b_pp = bracket_observable(spec, phi, psi, rescale, fd_step);
    let t1 = bracket_eval(spec, phi, &b_pc, p, rescale)?;
    let t2 = bracket_eval(spec, psi, &b_cp, p, rescale)?;
    let t3 = bracket_eval(spec, chi, &b_pp, p, rescale)?;
    Ok(t1 + t2 + t3)
}
