//! Hamilton equations of the spin RS flow on the gauge bundle,
//! dq = -1/2 Pi_h(Df(g)), dg = 1/2 [R(q)Df(g), g], a componentwise
//! transcription used as an oracle, and RK4 / adaptive RK45 reference
//! integrators with conservation monitoring.

use crate::error::{Error, Result};
use crate::lie_typea::{
    invariant_gradient, power_traces, proj_cartan, CartanVector, GroupElement,
};
use crate::linalg::CMat;
use crate::rmatrix::{RMatrixSpec, WALL_TOL};
use crate::scalar::{r, re_cx, Cx, Real};
use num_complex::Complex;

/// Hard limit on the per-step zero-sum / det-1 projection correction.
pub const PROJECTION_STEP_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct RSState<R: Real> {
    pub q: CartanVector<R>,
    pub g: GroupElement<R>,
}

impl<R: Real> RSState<R> {
    pub fn new(q: CartanVector<R>, g: GroupElement<R>) -> Result<Self> {
        if q.size() != g.size() {
            return Err(Error::Dimension("state component sizes".into()));
        }
        Ok(RSState { q, g })
    }
}

/// f(g) = sum_k c_k tr(g^k) with at least one nonzero coefficient.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec<R: Real> {
    poly: Vec<(u32, Cx<R>)>,
}

impl<R: Real> HamiltonianSpec<R> {
    pub fn new(poly: Vec<(u32, Cx<R>)>) -> Result<Self> {
        if !poly.iter().any(|&(k, c)| k > 0 && c.norm() > R::zero()) {
            return Err(Error::Invariant(
                "Hamiltonian needs a nonzero power-trace term".into(),
            ));
        }
        Ok(HamiltonianSpec { poly })
    }

    pub fn trace() -> Self {
        HamiltonianSpec {
            poly: vec![(1, Complex::new(R::one(), R::zero()))],
        }
    }

    pub fn poly(&self) -> &[(u32, Cx<R>)] {
        &self.poly
    }

    pub fn negated(&self) -> Self {
        HamiltonianSpec {
            poly: self.poly.iter().map(|&(k, c)| (k, -c)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Rk45,
}

#[derive(Clone, Debug)]
pub struct IntegratorConfig<R: Real> {
    pub method: Method,
    /// Fixed step for RK4, initial step for RK45.
    pub step: R,
    pub rtol: R,
    pub atol: R,
    pub max_steps: usize,
    pub wall_tol: R,
}

impl<R: Real> IntegratorConfig<R> {
    pub fn rk4(step: R) -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            step,
            rtol: r(1e-9),
            atol: r(1e-12),
            max_steps: 1_000_000,
            wall_tol: r(WALL_TOL),
        }
    }

    pub fn rk45(rtol: R, atol: R) -> Self {
        IntegratorConfig {
            method: Method::Rk45,
            step: r(1e-2),
            rtol,
            atol,
            max_steps: 1_000_000,
            wall_tol: r(WALL_TOL),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.step <= R::zero()
            || self.rtol <= R::zero()
            || self.atol <= R::zero()
            || self.wall_tol <= R::zero()
        {
            return Err(Error::Config("integrator tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryMeta<R: Real> {
    pub solver: String,
    pub rtol: R,
    pub atol: R,
    /// Time at which a wall hit truncated the run, if any.
    pub breakdown: Option<R>,
    pub max_projection_correction: R,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct Trajectory<R: Real> {
    pub times: Vec<R>,
    pub states: Vec<RSState<R>>,
    /// tr(g^k), k = 1..=n, per sample.
    pub conserved: Vec<Vec<Cx<R>>>,
    pub meta: TrajectoryMeta<R>,
}

/// The vector field at s: dq = -1/2 Pi_h(Df(g)) and
/// dg = 1/2 (R(q)Df(g)) g - 1/2 g (R(q)Df(g)).
pub fn eom_field<R: Real>(
    spec: &RMatrixSpec<R>,
    ham: &HamiltonianSpec<R>,
    s: &RSState<R>,
) -> Result<(CartanVector<R>, CMat<R>)> {
    let df = invariant_gradient(&s.g, ham.poly());
    let half = re_cx(r::<R>(0.5));
    let dq = proj_cartan(&df).scaled(-half);
    let rdf = spec.apply_r(&s.q, &df)?;
    let kg = rdf.mat() * s.g.mat();
    let gk = s.g.mat() * rdf.mat();
    let dg = (&kg - &gk).scaled(half);
    Ok((dq, dg))
}

/// Literal componentwise equations for the full simple subset and
/// f = tr: returns (ddq, dg) with ddq_i the second derivative of q_i.
pub fn eom_componentwise<R: Real>(
    spec: &RMatrixSpec<R>,
    s: &RSState<R>,
) -> Result<(Vec<Cx<R>>, CMat<R>)> {
    if !spec.subset().is_full() {
        return Err(Error::Invariant(
            "componentwise form requires the full simple subset".into(),
        ));
    }
    let m = s.g.size();
    let g = s.g.mat();
    let quarter = re_cx(r::<R>(0.25));
    let half = re_cx(r::<R>(0.5));
    let coth = |i: usize, j: usize| -> Result<Cx<R>> {
        let a = (s.q.entries()[i] - s.q.entries()[j]) * half;
        let sh = a.sinh();
        if sh.norm() < r(WALL_TOL) {
            return Err(Error::Singularity { i, j });
        }
        Ok(a.cosh() / sh)
    };
    let mut ddq = vec![Complex::new(R::zero(), R::zero()); m];
    for i in 0..m {
        for k in 0..m {
            if k != i {
                ddq[i] = ddq[i] + quarter * coth(i, k)? * g[(i, k)] * g[(k, i)];
            }
        }
    }
    let mut dg = CMat::zeros(m);
    for i in 0..m {
        for j in 0..m {
            if i == j {
                dg[(i, i)] = -ddq[i] * re_cx(r::<R>(2.0));
                continue;
            }
            let mut v = quarter * coth(i, j)? * g[(i, j)] * (g[(i, i)] - g[(j, j)]);
            for k in 0..m {
                if k != i && k != j {
                    v = v + quarter * (coth(k, j)? - coth(i, k)?) * g[(i, k)] * g[(k, j)];
                }
            }
            dg[(i, j)] = v;
        }
    }
    Ok((ddq, dg))
}

// flat phase-space vector for the RK steppers
#[derive(Clone)]
struct Flow<R: Real> {
    q: Vec<Cx<R>>,
    g: CMat<R>,
}

impl<R: Real> Flow<R> {
    fn from_state(s: &RSState<R>) -> Self {
        Flow {
            q: s.q.entries().to_vec(),
            g: s.g.mat().clone(),
        }
    }

    fn axpy(&self, a: R, f: &Flow<R>) -> Flow<R> {
        let ac = re_cx(a);
        Flow {
            q: self
                .q
                .iter()
                .zip(&f.q)
                .map(|(x, y)| *x + ac * *y)
                .collect(),
            g: &self.g + &f.g.scaled(ac),
        }
    }

    fn max_abs(&self) -> R {
        let mq = self.q.iter().fold(R::zero(), |m, z| m.max(z.norm()));
        mq.max(self.g.max_abs())
    }

    fn diff_max(&self, o: &Flow<R>) -> R {
        let mq = self
            .q
            .iter()
            .zip(&o.q)
            .fold(R::zero(), |m, (a, b)| m.max((*a - *b).norm()));
        mq.max((&self.g - &o.g).max_abs())
    }
}

fn field_at<R: Real>(
    spec: &RMatrixSpec<R>,
    ham: &HamiltonianSpec<R>,
    y: &Flow<R>,
) -> Result<Flow<R>> {
    let s = RSState {
        q: CartanVector::new(y.q.clone())?,
        g: GroupElement::sl_normalized(y.g.clone()),
    };
    let (dq, dg) = eom_field(spec, ham, &s)?;
    Ok(Flow {
        q: dq.entries().to_vec(),
        g: dg,
    })
}

// Dormand-Prince 5(4) coefficients
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rk4_step<R: Real>(
    spec: &RMatrixSpec<R>,
    ham: &HamiltonianSpec<R>,
    y: &Flow<R>,
    h: R,
) -> Result<Flow<R>> {
    let half = r::<R>(0.5);
    let k1 = field_at(spec, ham, y)?;
    let k2 = field_at(spec, ham, &y.axpy(h * half, &k1))?;
    let k3 = field_at(spec, ham, &y.axpy(h * half, &k2))?;
    let k4 = field_at(spec, ham, &y.axpy(h, &k3))?;
    let sixth = h / r(6.0);
    Ok(y
        .axpy(sixth, &k1)
        .axpy(sixth + sixth, &k2)
        .axpy(sixth + sixth, &k3)
        .axpy(sixth, &k4))
}

/// One Dormand-Prince step; returns (5th-order result, error estimate).
fn dopri_step<R: Real>(
    spec: &RMatrixSpec<R>,
    ham: &HamiltonianSpec<R>,
    y: &Flow<R>,
    h: R,
) -> Result<(Flow<R>, R)> {
    let mut ks: Vec<Flow<R>> = Vec::with_capacity(7);
    ks.push(field_at(spec, ham, y)?);
    for stage in 0..6 {
        let mut yi = y.clone();
        for (j, k) in ks.iter().enumerate() {
            let a = r::<R>(DP_A[stage][j]);
            if a != R::zero() {
                yi = yi.axpy(h * a, k);
            }
        }
        ks.push(field_at(spec, ham, &yi)?);
    }
    let mut y5 = y.clone();
    let mut y4 = y.clone();
    for (j, k) in ks.iter().enumerate() {
        let b5 = r::<R>(DP_B5[j]);
        let b4 = r::<R>(DP_B4[j]);
        if b5 != R::zero() {
            y5 = y5.axpy(h * b5, k);
        }
        if b4 != R::zero() {
            y4 = y4.axpy(h * b4, k);
        }
    }
    let err = y5.diff_max(&y4);
    Ok((y5, err))
}

/// Renormalize y onto zero-sum q and det-1 g; returns the corrected
/// flow, its state view, and the correction magnitude.
fn project<R: Real>(y: &Flow<R>) -> Result<(Flow<R>, RSState<R>, R)> {
    let q = CartanVector::new(y.q.clone())?;
    let g = GroupElement::sl_normalized(y.g.clone());
    let corr_q = q
        .entries()
        .iter()
        .zip(&y.q)
        .fold(R::zero(), |m, (a, b)| m.max((*a - *b).norm()));
    let corr_g = (g.mat() - &y.g).max_abs();
    let corr = corr_q.max(corr_g);
    let fixed = Flow {
        q: q.entries().to_vec(),
        g: g.mat().clone(),
    };
    Ok((fixed, RSState { q, g }, corr))
}

/// Integrate the flow over the sample grid. A wall hit truncates the
/// trajectory and records the breakdown time in the metadata.
pub fn integrate<R: Real>(
    spec: &RMatrixSpec<R>,
    ham: &HamiltonianSpec<R>,
    s0: &RSState<R>,
    t_grid: &[R],
    cfg: &IntegratorConfig<R>,
) -> Result<Trajectory<R>> {
    cfg.validate()?;
    if t_grid.len() < 2 {
        return Err(Error::Config("need at least two sample times".into()));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Config("sample times must be strictly increasing".into()));
        }
    }
    let nchar = s0.g.size() - 1;
    let mut times = vec![t_grid[0]];
    let mut states = vec![s0.clone()];
    let mut conserved = vec![power_traces(s0.g.mat(), nchar)];
    let mut meta = TrajectoryMeta {
        solver: match cfg.method {
            Method::Rk4 => "rk4".to_string(),
            Method::Rk45 => "rk45".to_string(),
        },
        rtol: cfg.rtol,
        atol: cfg.atol,
        breakdown: None,
        max_projection_correction: R::zero(),
        steps: 0,
    };

    let mut y = Flow::from_state(s0);
    let mut t = t_grid[0];
    let mut h = cfg.step;
    let hard_tol = r::<R>(PROJECTION_STEP_TOL);

    'outer: for &t_next in &t_grid[1..] {
        while t < t_next {
            if meta.steps >= cfg.max_steps {
                return Err(Error::StepLimit(meta.steps));
            }
            let remaining = t_next - t;
            let step_result = match cfg.method {
                Method::Rk4 => {
                    let hh = cfg.step.min(remaining);
                    rk4_step(spec, ham, &y, hh).map(|ynew| (ynew, hh, true))
                }
                Method::Rk45 => {
                    let hh = h.min(remaining);
                    dopri_step(spec, ham, &y, hh).map(|(ynew, err)| {
                        let scale = cfg.atol + cfg.rtol * y.max_abs().max(ynew.max_abs());
                        let ratio = err / scale;
                        let factor = if ratio > R::zero() {
                            (r::<R>(0.9) * ratio.powf(-r::<R>(0.2)))
                                .max(r(0.2))
                                .min(r(5.0))
                        } else {
                            r(5.0)
                        };
                        let accept = ratio <= R::one();
                        h = (hh * factor).max(r(1e-12));
                        (ynew, hh, accept)
                    })
                }
            };
            let (ynew, hh, accept) = match step_result {
                Ok(v) => v,
                Err(Error::Singularity { .. }) => {
                    meta.breakdown = Some(t);
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            meta.steps += 1;
            if !accept {
                continue;
            }
            let (fixed, state, corr) = project(&ynew)?;
            if corr > hard_tol {
                return Err(Error::Invariant(format!(
                    "projection correction {corr} exceeds hard limit"
                )));
            }
            meta.max_projection_correction = meta.max_projection_correction.max(corr);
            if state.q.wall_distance(spec.subset()) < cfg.wall_tol {
                meta.breakdown = Some(t + hh);
                break 'outer;
            }
            y = fixed;
            t = t + hh;
        }
        if (t - t_next).abs() > r(1e-12) {
            break;
        }
        let (_, state, _) = project(&y)?;
        times.push(t_next);
        conserved.push(power_traces(state.g.mat(), nchar));
        states.push(state);
    }

    Ok(Trajectory {
        times,
        states,
        conserved,
        meta,
    })
}

#[derive(Clone, Debug)]
pub struct ConservedReport<R: Real> {
    /// Max relative drift of tr(g^k), k = 1..=n.
    pub trace_drifts: Vec<R>,
    /// Max displacement of the matched eigenvalue set of g from t0.
    pub spectrum_drift: R,
}

/// Greedy nearest matching of two eigenvalue sets; returns the max
/// matched displacement.
fn spectrum_distance<R: Real>(a: &[Cx<R>], b: &[Cx<R>]) -> R {
    let mut used = vec![false; b.len()];
    let mut worst = R::zero();
    for x in a {
        let mut best = R::infinity();
        let mut best_j = 0;
        for (j, y) in b.iter().enumerate() {
            if !used[j] {
                let d = (*x - *y).norm();
                if d < best {
                    best = d;
                    best_j = j;
                }
            }
        }
        used[best_j] = true;
        worst = worst.max(best);
    }
    worst
}

pub fn conserved_report<R: Real>(traj: &Trajectory<R>) -> Result<ConservedReport<R>> {
    if traj.states.is_empty() {
        return Err(Error::Invariant("empty trajectory".into()));
    }
    let base = &traj.conserved[0];
    let mut drifts = vec![R::zero(); base.len()];
    for row in &traj.conserved {
        for (k, (v, v0)) in row.iter().zip(base).enumerate() {
            let d = (*v - *v0).norm() / R::one().max(v0.norm());
            drifts[k] = drifts[k].max(d);
        }
    }
    let spec0 = traj.states[0].g.mat().eig()?.values;
    let mut sdrift = R::zero();
    for s in &traj.states[1..] {
        let vals = s.g.mat().eig()?.values;
        sdrift = sdrift.max(spectrum_distance(&spec0, &vals));
    }
    Ok(ConservedReport {
        trace_drifts: drifts,
        spectrum_drift: sdrift,
    })
}
