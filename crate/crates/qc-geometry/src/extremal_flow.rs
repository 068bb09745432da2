//! Normal extremals of the sub-Riemannian Hamiltonian in momentum
//! components, and the exponential map of the flat model in quaternionic
//! Heisenberg group coordinates.
//!
//! Along a geodesic the horizontal and vertical momenta `(u, v)` obey the
//! self-contained system
//!
//! ```text
//! u' = -2 sum_a v_a Ia u,        v_a' = T(xi_a, u, u),
//! ```
//!
//! with `H = |u|^2 / 2` conserved. For torsion-free models (`T0 = 0`) the
//! vertical momentum is constant. Everything is integrated with the shared
//! fixed-step RK4 scheme so results are reproducible bit for bit.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::QcError;
use crate::qc_algebra::QuaternionicStructure;
use crate::qc_model::QcModel;
use crate::rk4;

/// Momentum components of an extremal at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalState {
    /// Arc time.
    pub t: f64,
    /// Horizontal momentum `u_i = <lambda, X_i>`, length `4n`.
    pub u: DVector<f64>,
    /// Vertical momentum `v_a = <lambda, xi_a>`.
    pub v: Vector3<f64>,
}

impl ExtremalState {
    pub fn new(t: f64, u: DVector<f64>, v: Vector3<f64>) -> Self {
        Self { t, u, v }
    }

    /// `H = |u|^2 / 2`, constant along integrated trajectories.
    pub fn hamiltonian(&self) -> f64 {
         0.5 * self.u.norm_squared()
    }
}

pub(crate) fn pack_flow(u: &DVector<f64>, v: &Vector3<f64>) -> DVector<f64> {
    let dim = u.len();
    let mut x = DVector::zeros(dim + 3);
    x.rows_mut(0, dim).copy_from(u);
    x.rows_mut(dim, 3).copy_from(v);
    x
}

pub(crate) fn unpack_flow(dim: usize, x: &DVector<f64>) -> (DVector<f64>, Vector3<f64>) {
    (
        x.rows(0, dim).into_owned(),
        Vector3::new(x[dim], x[dim + 1], x[dim + 2]),
    )
}

/// Right-hand side of the momentum system on the packed state `[u; v]`.
pub(crate) fn flow_rhs(model: &QcModel, x: &DVector<f64>) -> DVector<f64> {
    let dim = model.dim();
    let (u, v) = unpack_flow(dim, x);
    let mut du = DVector::zeros(dim);
    for a in 0..3 {
        du.axpy(-2.0 * v[a], &model.structure().apply(a, &u), 1.0);
    }
    let dv = Vector3::from_fn(|a, _| model.torsion_xi(a, &u, &u));
    pack_flow(&du, &dv)
}

pub(crate) fn flow_step_signed(model: &QcModel, s: &ExtremalState, dt: f64) -> ExtremalState {
    let x = pack_flow(&s.u, &s.v);
    let next = rk4::step(s.t, &x, dt, |_, x| flow_rhs(model, x));
    let (u, v) = unpack_flow(model.dim(), &next);
    ExtremalState::new(s.t + dt, u, v)
}

/// One RK4 step of the momentum system. Rejects non-positive steps.
pub fn flow_step(model: &QcModel, s: &ExtremalState, dt: f64) -> Result<ExtremalState, QcError> {
    if dt <= 0.0 {
        return Err(QcError::NonPositiveStep(dt));
    }
    check_state(model, s)?;
    Ok(flow_step_signed(model, s, dt))
}

/// Integrates the momentum system over `[0, t_end]`, sampling at every
/// multiple of `dt` (the horizon is rounded to a whole number of steps).
pub fn integrate(
    model: &QcModel,
    s0: &ExtremalState,
    t_end: f64,
    dt: f64,
) -> Result<Vec<ExtremalState>, QcError> {
    if dt <= 0.0 {
        return Err(QcError::NonPositiveStep(dt));
    }
    check_state(model, s0)?;
    let steps = rk4::step_count(t_end, dt);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s0.clone());
    for _ in 0..steps {
        let next = flow_step_signed(model, out.last().expect("nonempty"), dt);
        out.push(next);
    }
    Ok(out)
}

fn check_state(model: &QcModel, s: &ExtremalState) -> Result<(), QcError> {
    if s.u.len() != model.dim() {
        return Err(QcError::DimensionMismatch {
            context: "extremal state",
            expected: model.dim(),
            got: s.u.len(),
        });
    }
    Ok(())
}

/// Trajectory CSV: header `t,u1..u{4n},v1,v2,v3`, floats with 17 significant
/// digits.
pub fn trajectory_csv(trajectory: &[ExtremalState]) -> String {
    let mut out = String::from("t");
    if let Some(first) = trajectory.first() {
        for i in 0..first.u.len() {
            out.push_str(&format!(",u{}", i + 1));
        }
        out.push_str(",v1,v2,v3\n");
        for s in trajectory {
            out.push_str(&format!("{:.16e}", s.t));
            for x in s.u.iter() {
                out.push_str(&format!(",{x:.16e}"));
            }
            for x in s.v.iter() {
                out.push_str(&format!(",{x:.16e}"));
            }
            out.push('\n');
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Quaternionic Heisenberg group coordinates (flat model only)
// ---------------------------------------------------------------------------

/// A point of the quaternionic Heisenberg group `H^n x Im(H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    /// `H^n` coordinates as a real `4n`-vector, blocks ordered `(1, i, j, k)`.
    pub z: DVector<f64>,
    /// Center coordinates, components ordered `(i, j, k)`.
    pub w: Vector3<f64>,
}

impl GroupPoint {
    pub fn identity(n: usize) -> Self {
        Self {
            z: DVector::zeros(4 * n),
            w: Vector3::zeros(),
        }
    }
}

fn quat_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// `Im(z zbar')` summed over the `n` quaternion blocks.
fn im_z_conj(z: &DVector<f64>, zp: &DVector<f64>) -> Vector3<f64> {
    let mut im = Vector3::zeros();
    for k in 0..z.len() / 4 {
        let a = [z[4 * k], z[4 * k + 1], z[4 * k + 2], z[4 * k + 3]];
        let b = [zp[4 * k], -zp[4 * k + 1], -zp[4 * k + 2], -zp[4 * k + 3]];
        let p = quat_mul(a, b);
        im += Vector3::new(p[1], p[2], p[3]);
    }
    im
}

/// Group law `(z, w) . (z', w') = (z + z', w + w' + Im(z zbar') / 2)`.
pub fn group_product(p: &GroupPoint, q: &GroupPoint) -> GroupPoint {
    GroupPoint {
        z: &p.z + &q.z,
        w: p.w + q.w + 0.5 * im_z_conj(&p.z, &q.z),
    }
}

/// Right-hand side of the joint system `[u; v; z; w]` on the flat model in
/// the left-invariant frame of the group law:
/// `z' = u`, `w' = Im(z ubar) / 2`.
pub(crate) fn heisenberg_rhs(q: &QuaternionicStructure, x: &DVector<f64>) -> DVector<f64> {
    let dim = q.dim();
    let u = x.rows(0, dim).into_owned();
    let v = Vector3::new(x[dim], x[dim + 1], x[dim + 2]);
    let z = x.rows(dim + 3, dim).into_owned();
    let mut out = DVector::zeros(2 * dim + 6);
    {
        let mut du = out.rows_mut(0, dim);
        for a in 0..3 {
            du.axpy(-2.0 * v[a], &q.apply(a, &u), 1.0);
        }
    }
    // v' = 0 on the flat model.
    out.rows_mut(dim + 3, dim).copy_from(&u);
    let dw = 0.5 * im_z_conj(&z, &u);
    out.rows_mut(2 * dim + 3, 3).copy_from(&dw);
    out
}

pub(crate) fn pack_heisenberg(
    u: &DVector<f64>,
    v: &Vector3<f64>,
    p: &GroupPoint,
) -> DVector<f64> {
    let dim = u.len();
    let mut x = DVector::zeros(2 * dim + 6);
    x.rows_mut(0, dim).copy_from(u);
    x.rows_mut(dim, 3).copy_from(v);
    x.rows_mut(dim + 3, dim).copy_from(&p.z);
    x.rows_mut(2 * dim + 3, 3).copy_from(&p.w);
    x
}

pub(crate) fn unpack_heisenberg(dim: usize, x: &DVector<f64>) -> (DVector<f64>, Vector3<f64>, GroupPoint) {
    (
        x.rows(0, dim).into_owned(),
        Vector3::new(x[dim], x[dim + 1], x[dim + 2]),
        GroupPoint {
            z: x.rows(dim + 3, dim).into_owned(),
            w: Vector3::new(x[2 * dim + 3], x[2 * dim + 4], x[2 * dim + 5]),
        },
    )
}

/// Integrates the flat-model geodesic with initial covector `(u0, v0)` from
/// `start` for time `t_end` and returns the endpoint in group coordinates.
pub fn heisenberg_flow(
    n: usize,
    start: &GroupPoint,
    u0: &DVector<f64>,
    v0: &Vector3<f64>,
    t_end: f64,
    dt: f64,
) -> Result<GroupPoint, QcError> {
    if dt <= 0.0 {
        return Err(QcError::NonPositiveStep(dt));
    }
    let q = QuaternionicStructure::standard(n)?;
    if u0.len() != q.dim() {
        return Err(QcError::DimensionMismatch {
            context: "heisenberg initial momentum",
            expected: q.dim(),
            got: u0.len(),
        });
    }
    let mut x = pack_heisenberg(u0, v0, start);
    let steps = rk4::step_count(t_end, dt);
    let mut t = 0.0;
    for _ in 0..steps {
        x = rk4::step(t, &x, dt, |_, x| heisenberg_rhs(&q, x));
        t += dt;
    }
    let (_, _, p) = unpack_heisenberg(q.dim(), &x);
    Ok(p)
}

/// The flat-model exponential map based at the identity.
pub fn heisenberg_exp(
    n: usize,
    u0: &DVector<f64>,
    v0: &Vector3<f64>,
    t_end: f64,
    dt: f64,
) -> Result<GroupPoint, QcError> {
    heisenberg_flow(n, &GroupPoint::identity(n), u0, v0, t_end, dt)
}
