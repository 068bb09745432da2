//! Constant-tensor qc model data and its curvature contractions.
//!
//! A model consists of a quaternionic structure together with the two
//! trace-free symmetric torsion tensors `T0`, `U` and the normalized scalar
//! curvature `S`, all constant along curves (`nabla T0 = nabla U = 0`,
//! `S` constant). The two built-in models are
//!
//! * flat (quaternionic Heisenberg): `T0 = U = 0`, `S = 0`,
//! * 3-Sasakian: `T0 = U = 0`, `S = 2`.
//!
//! Because the tensors are constant, the mixed Ricci 2-forms
//! `rho_a(xi_a, X)` and `rho_a(xi_b, I_c X)` vanish, and every curvature
//! contraction used downstream reduces to a closed form in `T0`, `U`, `S`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::QcError;
use crate::qc_algebra::{matrix_to_rows, rows_to_matrix, QuaternionicStructure};

/// Validation tolerance for user-supplied torsion tensors (files may carry
/// limited precision).
pub const MODEL_TOL: f64 = 1e-10;

/// Tolerance on `| |X| - 1 |` for operations requiring a unit direction.
pub const UNIT_TOL: f64 = 1e-9;

/// Which built-in family a model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Flat,
    Sasakian,
    Custom,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Flat => "flat",
            ModelKind::Sasakian => "sasakian",
            ModelKind::Custom => "custom",
        }
    }
}

/// A validated constant-tensor model `(Q, T0, U, S)`.
#[derive(Debug, Clone)]
pub struct QcModel {
    q: QuaternionicStructure,
    t0: DMatrix<f64>,
    u: DMatrix<f64>,
    s: f64,
    kind: ModelKind,
}

/// Result of [`QcModel::lemma_t0u_check`].
#[derive(Debug, Clone, Copy)]
pub struct T0uCheck {
    /// `Ric(X, X) - sum_a R(X, Ia X, Ia X, X)`.
    pub lhs: f64,
    /// `2n T0(X, X) + (4n - 8) U(X, X) + 2(n - 1) S`.
    pub rhs: f64,
    pub residual: f64,
}

impl QcModel {
    /// The quaternionic Heisenberg model: `T0 = U = 0`, `S = 0`.
    pub fn flat(q: QuaternionicStructure) -> Self {
        let dim = q.dim();
        Self {
            q,
            t0: DMatrix::zeros(dim, dim),
            u: DMatrix::zeros(dim, dim),
            s: 0.0,
            kind: ModelKind::Flat,
        }
    }

    /// The 3-Sasakian model: `T0 = U = 0`, `S = 2`.
    pub fn sasakian(q: QuaternionicStructure) -> Self {
        let dim = q.dim();
        Self {
            q,
            t0: DMatrix::zeros(dim, dim),
            u: DMatrix::zeros(dim, dim),
            s: 2.0,
            kind: ModelKind::Sasakian,
        }
    }

    /// A custom model; rejects tensors violating the torsion invariants,
    /// naming the first failed property.
    pub fn custom(
        q: QuaternionicStructure,
        t0: DMatrix<f64>,
        u: DMatrix<f64>,
        s: f64,
    ) -> Result<Self, QcError> {
        validate_tensors(&q, &t0, &u)?;
        Ok(Self {
            q,
            t0,
            u,
            s,
            kind: ModelKind::Custom,
        })
    }

    /// Umbrella constructor matching the model file schema: unset tensors
    /// default to zero.
    pub fn new(
        kind: ModelKind,
        q: QuaternionicStructure,
        t0: Option<DMatrix<f64>>,
        u: Option<DMatrix<f64>>,
        s: Option<f64>,
    ) -> Result<Self, QcError> {
        let dim = q.dim();
        let zeros = || DMatrix::zeros(dim, dim);
        match kind {
            ModelKind::Flat | ModelKind::Sasakian => {
                let canonical = if kind == ModelKind::Flat { 0.0 } else { 2.0 };
                if let Some(s) = s {
                    if (s - canonical).abs() > 1e-12 {
                        return Err(QcError::BadInput(format!(
                            "{} model requires S = {}, got {}",
                            kind.as_str(),
                            canonical,
                            s
                        )));
                    }
                }
                for (m, name) in [(&t0, "T0"), (&u, "U")] {
                    if let Some(m) = m {
                        if m.amax() > 1e-12 {
                            return Err(QcError::BadInput(format!(
                                "{} model requires {} = 0",
                                kind.as_str(),
                                name
                            )));
                        }
                    }
                }
                Ok(if kind == ModelKind::Flat {
                    Self::flat(q)
                } else {
                    Self::sasakian(q)
                })
            }
            ModelKind::Custom => {
                Self::custom(q, t0.unwrap_or_else(zeros), u.unwrap_or_else(zeros), s.unwrap_or(0.0))
            }
        }
    }

    /// A random valid custom model: `T0` is the Casimir `[-1]`-projection of
    /// a random symmetric matrix, `U` the trace-free `[3]`-projection.
    pub fn random_custom(q: QuaternionicStructure, rng: &mut impl rand::Rng) -> Self {
        let dim = q.dim();
        let raw = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.5..0.5));
        let sym = (&raw + raw.transpose()) / 2.0;
        let (_, t0) = q.decompose(&sym);

        let raw = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.5..0.5));
        let sym = (&raw + raw.transpose()) / 2.0;
        let (p3, _) = q.decompose(&sym);
        let u = &p3 - DMatrix::identity(dim, dim) * (p3.trace() / dim as f64);

        let s = rng.gen_range(-1.0..3.0);
        Self::custom(q, t0, u, s).expect("projected tensors satisfy the invariants")
    }

    pub fn structure(&self) -> &QuaternionicStructure {
        &self.q
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn t0_matrix(&self) -> &DMatrix<f64> {
        &self.t0
    }

    pub fn u_matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn scalar(&self) -> f64 {
        self.s
    }

    /// True when the torsion endomorphism vanishes (`T0 = U = 0`); the
    /// vertical momentum is then constant along every extremal.
    pub fn is_torsion_free(&self) -> bool {
        self.t0.amax() == 0.0 && self.u.amax() == 0.0
    }

    /// `T0(X, Y)` as a bilinear form.
    pub fn t0(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (&self.t0 * y).dot(x)
    }

    /// `U(X, Y)` as a bilinear form.
    pub fn u_form(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (&self.u * y).dot(x)
    }

    /// Torsion endomorphism value
    /// `T(xi_a, X, Y) = -1/4 [T0(Ia X, Y) + T0(X, Ia Y)] + U(Ia X, Y)`.
    pub fn torsion_xi(&self, alpha: usize, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let iax = self.q.apply(alpha, x);
        let iay = self.q.apply(alpha, y);
        -0.25 * (self.t0(&iax, y) + self.t0(x, &iay)) + self.u_form(&iax, y)
    }

    /// Horizontal Ricci tensor:
    /// `Ric(X, Y) = (2n+2) T0(X,Y) + (4n+10) U(X,Y) + 2(n+2) S <X,Y>`.
    pub fn ric(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let n = self.n() as f64;
        (2.0 * n + 2.0) * self.t0(x, y)
            + (4.0 * n + 10.0) * self.u_form(x, y)
            + 2.0 * (n + 2.0) * self.s * x.dot(y)
    }

    /// Horizontal Ricci 2-form, re-indexed:
    /// `rho_a(X, Ia Y) = -1/2 [T0(X,Y) + T0(Ia X, Ia Y)] - 2 U(X,Y) - S <X,Y>`.
    pub fn rho_horizontal(&self, alpha: usize, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let iax = self.q.apply(alpha, x);
        let iay = self.q.apply(alpha, y);
        -0.5 * (self.t0(x, y) + self.t0(&iax, &iay))
            - 2.0 * self.u_form(x, y)
            - self.s * x.dot(y)
    }

    /// `sum_a R(X, Ia X, Ia X, X) = 2 T0(X,X) + 18 U(X,X) + 6 S`, unit `X`.
    pub fn sum_sectional(&self, x: &DVector<f64>) -> Result<f64, QcError> {
        require_unit(x)?;
        Ok(2.0 * self.t0(x, x) + 6.0 * self.s + 18.0 * self.u_form(x, x))
    }

    /// The Bonnet-Myers quadratic form
    /// `2n T0(X,X) + (4n-8) U(X,X) + 2(n-1) S`, unit `X`.
    pub fn bonnet_myers_form(&self, x: &DVector<f64>) -> Result<f64, QcError> {
        require_unit(x)?;
        let n = self.n() as f64;
        Ok(2.0 * n * self.t0(x, x)
            + (4.0 * n - 8.0) * self.u_form(x, x)
            + 2.0 * (n - 1.0) * self.s)
    }

    /// Largest `kappa` with `bonnet_myers_form(X) >= 4(n-1) kappa` for all
    /// unit `X`: the minimum eigenvalue of `2n T0 + (4n-8) U`, shifted by
    /// `2(n-1) S` and divided by `4(n-1)`.
    pub fn kappa(&self) -> f64 {
        self.kappa_with_witness().0
    }

    /// `kappa` together with a unit direction attaining the minimum.
    pub fn kappa_with_witness(&self) -> (f64, DVector<f64>) {
        let n = self.n() as f64;
        let form = &self.t0 * (2.0 * n) + &self.u * (4.0 * n - 8.0);
        let eigen = SymmetricEigen::new(form);
        let (idx, lambda_min) = eigen
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, l)| {
                if l < acc.1 {
                    (i, l)
                } else {
                    acc
                }
            });
        let witness = eigen.eigenvectors.column(idx).into_owned();
        let kappa = (lambda_min + 2.0 * (n - 1.0) * self.s) / (4.0 * (n - 1.0));
        (kappa, witness)
    }

    /// Checks the trace identity
    /// `Ric(X,X) - sum_a R(X, Ia X, Ia X, X) = 2n T0(X,X) + (4n-8) U(X,X) + 2(n-1) S`
    /// at a unit direction, both sides evaluated by their own closed forms.
    pub fn lemma_t0u_check(&self, x: &DVector<f64>) -> Result<T0uCheck, QcError> {
        let lhs = self.ric(x, x) - self.sum_sectional(x)?;
        let rhs = self.bonnet_myers_form(x)?;
        Ok(T0uCheck {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
        })
    }

    /// Torsion side of the first Bianchi identity:
    /// `sum_cyc R(X,Y,Z,V) = 2 sum_cyc sum_a omega_a(X,Y) T(xi_a, Z, V)`,
    /// the cyclic sum running over `(X, Y, Z)` with `V` fixed.
    pub fn bianchi_rhs(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        v: &DVector<f64>,
    ) -> f64 {
        let term = |x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>| -> f64 {
            (0..3)
                .map(|a| self.q.omega(a, x, y) * self.torsion_xi(a, z, v))
                .sum::<f64>()
        };
        2.0 * (term(x, y, z) + term(y, z, x) + term(z, x, y))
    }

    /// Torsion side of the quaternionic curvature relation
    /// `3R(X,Y,Z,V) - sum_a R(Ia X, Ia Y, Z, V) = ...`, transcribed verbatim.
    pub fn comp1_rhs(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        v: &DVector<f64>,
    ) -> f64 {
        let g = |a: &DVector<f64>, b: &DVector<f64>| a.dot(b);
        let mut total = 2.0
            * (g(y, z) * self.t0(x, v) + g(x, v) * self.t0(z, y)
                - g(z, x) * self.t0(y, v)
                - g(v, y) * self.t0(z, x));
        for a in 0..3 {
            let (iax, iay) = (self.q.apply(a, x), self.q.apply(a, y));
            let (iaz, iav) = (self.q.apply(a, z), self.q.apply(a, v));
            let om = |p: &DVector<f64>, q: &DVector<f64>| self.q.omega(a, p, q);
            total -= 2.0
                * (om(y, z) * self.t0(x, &iav) + om(x, v) * self.t0(z, &iay)
                    - om(z, x) * self.t0(y, &iav)
                    - om(v, y) * self.t0(z, &iax));
            total += 2.0 * om(x, y) * (self.t0(z, &iav) - self.t0(&iaz, v))
                - 8.0 * om(z, v) * self.u_form(&iax, y)
                - 4.0 * self.s * om(x, y) * om(z, v);
        }
        total
    }
}

fn require_unit(x: &DVector<f64>) -> Result<(), QcError> {
    let norm = x.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(QcError::NotUnitSpeed(norm));
    }
    Ok(())
}

fn max_residual_check(name: &str, residual: f64) -> Result<(), QcError> {
    if residual > MODEL_TOL {
        return Err(QcError::InvariantViolated {
            name: name.to_string(),
            residual,
            tol: MODEL_TOL,
        });
    }
    Ok(())
}

fn validate_tensors(
    q: &QuaternionicStructure,
    t0: &DMatrix<f64>,
    u: &DMatrix<f64>,
) -> Result<(), QcError> {
    let dim = q.dim();
    for (m, sym_name) in [(t0, "T0-symmetry"), (u, "U-symmetry")] {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(QcError::DimensionMismatch {
                context: "model tensor",
                expected: dim,
                got: m.nrows(),
            });
        }
        max_residual_check(sym_name, (m - m.transpose()).amax())?;
    }
    // propt line 1: T0 + sum_a Ia^t T0 Ia = 0, i.e. the Casimir
    // [3]-component of T0 vanishes (this forces trace-freeness too).
    max_residual_check("propt-line-1", (t0 + q.casimir(t0)).amax())?;
    max_residual_check("T0-trace", t0.trace().abs())?;
    // propt line 2: U = Ia^t U Ia for each a, i.e. U commutes with each Ia.
    for a in 0..3 {
        let conj = q.i_mat(a).transpose() * u * q.i_mat(a);
        max_residual_check("propt-line-2", (u - conj).amax())?;
    }
    max_residual_check("U-trace", u.trace().abs())?;
    Ok(())
}

/// On-disk JSON form:
/// `{"kind": "flat"|"sasakian"|"custom", "n": .., "S": .., "T0": ..|null, "U": ..|null}`,
/// matrices row-major. Built-in kinds use the standard structure for `n`.
#[derive(Serialize, Deserialize)]
struct ModelDocument {
    kind: ModelKind,
    n: usize,
    #[serde(rename = "S")]
    s: f64,
    #[serde(rename = "T0")]
    t0: Option<Vec<Vec<f64>>>,
    #[serde(rename = "U")]
    u: Option<Vec<Vec<f64>>>,
}

impl QcModel {
    pub fn to_json(&self) -> String {
        let keep = |m: &DMatrix<f64>| {
            if m.amax() == 0.0 {
                None
            } else {
                Some(matrix_to_rows(m))
            }
        };
        let doc = ModelDocument {
            kind: self.kind,
            n: self.n(),
            s: self.s,
            t0: keep(&self.t0),
            u: keep(&self.u),
        };
        serde_json::to_string_pretty(&doc).expect("model document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, QcError> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| QcError::BadInput(format!("model JSON: {e}")))?;
        let q = QuaternionicStructure::standard(doc.n)?;
        let dim = q.dim();
        let parse = |m: &Option<Vec<Vec<f64>>>| -> Result<Option<DMatrix<f64>>, QcError> {
            m.as_ref().map(|rows| rows_to_matrix(rows, dim, dim)).transpose()
        };
        QcModel::new(doc.kind, q, parse(&doc.t0)?, parse(&doc.u)?, Some(doc.s))
    }
}
