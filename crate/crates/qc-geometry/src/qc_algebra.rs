//! Quaternionic structures on the horizontal space `R^{4n}`.
//!
//! A structure is a triple of real `4n x 4n` matrices `I1, I2, I3` that are
//! orthogonal and satisfy the imaginary-quaternion relations
//!
//! ```text
//! Ia Ib = -Ib Ia = Ic          (a, b, c) cyclic,
//! I1^2 = I2^2 = I3^2 = I1 I2 I3 = -id.
//! ```
//!
//! All tensors downstream are stored as matrices in this fixed orthonormal
//! basis, and the metric is the standard inner product, so orthogonality of
//! `Ia` is exactly metric compatibility. The fundamental 2-forms are
//! `omega_a(X, Y) = <Ia X, Y>`.

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::QcError;
use crate::report::{ResidualCheck, ValidationReport};

/// Entrywise tolerance for structure validation. The built-in structures are
/// integer matrices, so this slack exists only for user-supplied data.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// The triple `(I1, I2, I3)` acting on `R^{4n}`, `n >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StructureDocument", into = "StructureDocument")]
pub struct QuaternionicStructure {
    n: usize,
    i_mats: [DMatrix<f64>; 3],
}

impl QuaternionicStructure {
    /// The block-standard structure: `R^{4n} = (R^4)^n` with basis ordered
    /// `(1, i, j, k)` per block, and `I1, I2, I3` acting as left quaternion
    /// multiplication by `i, j, k`.
    pub fn standard(n: usize) -> Result<Self, QcError> {
        if n < 2 {
            return Err(QcError::RankTooSmall(n));
        }
        let dim = 4 * n;
        // Left multiplication tables on one (1, i, j, k) block: entry
        // `[r][c]` is the r-th component of e_imag * basis_c.
        const LEFT_I: [[f64; 4]; 4] = [
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ];
        const LEFT_J: [[f64; 4]; 4] = [
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ];
        const LEFT_K: [[f64; 4]; 4] = [
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ];
        let block = |table: &[[f64; 4]; 4]| {
            let mut m = DMatrix::zeros(dim, dim);
            for b in 0..n {
                for r in 0..4 {
                    for c in 0..4 {
                        m[(4 * b + r, 4 * b + c)] = table[r][c];
                    }
                }
            }
            m
        };
        Ok(Self {
            n,
            i_mats: [block(&LEFT_I), block(&LEFT_J), block(&LEFT_K)],
        })
    }

    /// Builds a structure from explicit matrices and validates it.
    pub fn from_matrices(
        i1: DMatrix<f64>,
        i2: DMatrix<f64>,
        i3: DMatrix<f64>,
    ) -> Result<Self, QcError> {
        let s = Self::from_matrices_unchecked(i1, i2, i3)?;
        let report = s.validate();
        if let Some(fail) = report.failures().next() {
            return Err(QcError::InvariantViolated {
                name: fail.name.clone(),
                residual: fail.residual,
                tol: fail.tol,
            });
        }
        Ok(s)
    }

    /// Builds a structure checking only shapes, not the quaternion relations.
    /// Useful for constructing inputs that [`Self::validate`] should reject.
    pub fn from_matrices_unchecked(
        i1: DMatrix<f64>,
        i2: DMatrix<f64>,
        i3: DMatrix<f64>,
    ) -> Result<Self, QcError> {
        let dim = i1.nrows();
        for (m, ctx) in [(&i1, "I1"), (&i2, "I2"), (&i3, "I3")] {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(QcError::DimensionMismatch {
                    context: "structure matrices",
                    expected: dim,
                    got: if m.nrows() != dim { m.nrows() } else { m.ncols() },
                });
            }
            let _ = ctx;
        }
        if dim % 4 != 0 {
            return Err(QcError::BadInput(format!(
                "structure dimension {dim} is not a multiple of 4"
            )));
        }
        let n = dim / 4;
        if n < 2 {
            return Err(QcError::RankTooSmall(n));
        }
        Ok(Self {
            n,
            i_mats: [i1, i2, i3],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the horizontal space, `4n`.
    pub fn dim(&self) -> usize {
        4 * self.n
    }

    /// The matrix of `I_{alpha+1}` (`alpha` is 0-based: 0, 1, 2).
    pub fn i_mat(&self, alpha: usize) -> &DMatrix<f64> {
        &self.i_mats[alpha]
    }

    /// `I_{alpha+1} x`.
    pub fn apply(&self, alpha: usize, x: &DVector<f64>) -> DVector<f64> {
        self.i_mats[alpha] * x
    }

    /// Fundamental 2-form `omega_a(X, Y) = <Ia X, Y>`; skew-symmetric.
    pub fn omega(&self, alpha: usize, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        assert_eq!(x.len(), self.dim(), "omega: x has wrong dimension");
        assert_eq!(y.len(), self.dim(), "omega: y has wrong dimension");
        self.apply(alpha, x).dot(y)
    }

    /// Gram matrix of the fatness lemma:
    /// `Omega_{ab} = -2 <Ia X, Ib X> = -2 |X|^2 delta_{ab}`.
    pub fn fatness_gram(&self, x: &DVector<f64>) -> Matrix3<f64> {
        let images: Vec<DVector<f64>> = (0..3).map(|a| self.apply(a, x)).collect();
        Matrix3::from_fn(|a, b| -2.0 * images[a].dot(&images[b]))
    }

    /// Casimir operator on endomorphisms: `Upsilon(Psi) = -sum_a Ia Psi Ia`.
    ///
    /// Its eigenvalues on `End(R^{4n})` are 3 (the part commuting with all
    /// three `Ia`) and -1 (the rest); see [`Self::decompose`].
    pub fn casimir(&self, psi: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(psi.nrows(), self.dim(), "casimir: wrong shape");
        assert_eq!(psi.ncols(), self.dim(), "casimir: wrong shape");
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for m in &self.i_mats {
            out -= m * psi * m;
        }
        out
    }

    /// Spectral projections onto the Casimir eigenspaces:
    /// `Psi_[3] = (Upsilon(Psi) + Psi) / 4` and `Psi_[-1] = Psi - Psi_[3]`,
    /// satisfying `Upsilon(Psi_[3]) = 3 Psi_[3]` and
    /// `Upsilon(Psi_[-1]) = -Psi_[-1]`.
    pub fn decompose(&self, psi: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let part3 = (self.casimir(psi) + psi) / 4.0;
        let part_m1 = psi - &part3;
        (part3, part_m1)
    }

    /// Max-norm residuals of every quaternion relation and of orthogonality.
    pub fn validate(&self) -> ValidationReport {
        let dim = self.dim();
        let id = DMatrix::<f64>::identity(dim, dim);
        let max_norm = |m: &DMatrix<f64>| m.amax();
        let mut report = ValidationReport::default();
        let mut push = |name: String, m: &DMatrix<f64>| {
            report.push(ResidualCheck::new(name, max_norm(m), STRUCTURE_TOL));
        };

        let cyclic = [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)];
        for &(a, b, c) in &cyclic {
            let prod = &self.i_mats[a] * &self.i_mats[b];
            push(
                format!("relaz1.I{}I{}-I{}", a + 1, b + 1, c + 1),
                &(&prod - &self.i_mats[c]),
            );
            let anti = &self.i_mats[b] * &self.i_mats[a];
            push(
                format!("relaz1.I{}I{}+I{}", b + 1, a + 1, c + 1),
                &(&anti + &self.i_mats[c]),
            );
        }
        for a in 0..3 {
            let sq = &self.i_mats[a] * &self.i_mats[a];
            push(format!("relaz1.I{}^2+id", a + 1), &(&sq + &id));
        }
        let triple = &self.i_mats[0] * &self.i_mats[1] * &self.i_mats[2];
        push("relaz1.I1I2I3+id".to_string(), &(&triple + &id));
        for a in 0..3 {
            let gram = &self.i_mats[a] * self.i_mats[a].transpose();
            push(format!("relaz2.I{}-orthogonality", a + 1), &(&gram - &id));
        }
        report
    }
}

/// On-disk JSON form: `{"n": .., "I1": [[..]], "I2": [[..]], "I3": [[..]]}`,
/// matrices row-major.
#[derive(Serialize, Deserialize)]
struct StructureDocument {
    n: usize,
    #[serde(rename = "I1")]
    i1: Vec<Vec<f64>>,
    #[serde(rename = "I2")]
    i2: Vec<Vec<f64>>,
    #[serde(rename = "I3")]
    i3: Vec<Vec<f64>>,
}

impl TryFrom<StructureDocument> for QuaternionicStructure {
    type Error = QcError;

    fn try_from(doc: StructureDocument) -> Result<Self, QcError> {
        let dim = 4 * doc.n;
        let s = QuaternionicStructure::from_matrices(
            rows_to_matrix(&doc.i1, dim, dim)?,
            rows_to_matrix(&doc.i2, dim, dim)?,
            rows_to_matrix(&doc.i3, dim, dim)?,
        )?;
        if s.n() != doc.n {
            return Err(QcError::BadInput(format!(
                "declared n = {} does not match matrix dimension {}",
                doc.n,
                4 * s.n()
            )));
        }
        Ok(s)
    }
}

impl From<QuaternionicStructure> for StructureDocument {
    fn from(s: QuaternionicStructure) -> Self {
        StructureDocument {
            n: s.n,
            i1: matrix_to_rows(&s.i_mats[0]),
            i2: matrix_to_rows(&s.i_mats[1]),
            i3: matrix_to_rows(&s.i_mats[2]),
        }
    }
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

pub(crate) fn rows_to_matrix(
    rows: &[Vec<f64>],
    nrows: usize,
    ncols: usize,
) -> Result<DMatrix<f64>, QcError> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(QcError::DimensionMismatch {
            context: "row-major matrix",
            expected: nrows,
            got: rows.len(),
        });
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(dim: usize, k: usize) -> DVector<f64> {
        let mut e = DVector::zeros(dim);
        e[k] = 1.0;
        e
    }

    fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
        DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn standard_structure_is_exact() {
        for n in [2usize, 3] {
            let s = QuaternionicStructure::standard(n).unwrap();
            let report = s.validate();
            assert!(report.passed(), "\n{report}");
            // Integer construction: the relations hold exactly.
            assert_eq!(report.max_residual(), 0.0);
        }
    }

    #[test]
    fn standard_rejects_small_rank() {
        assert!(matches!(
            QuaternionicStructure::standard(1),
            Err(QcError::RankTooSmall(1))
        ));
        assert!(QuaternionicStructure::standard(0).is_err());
    }

    #[test]
    fn i1_squared_is_minus_identity() {
        let s = QuaternionicStructure::standard(2).unwrap();
        let sq = s.i_mat(0) * s.i_mat(0);
        let id = DMatrix::<f64>::identity(8, 8);
        assert_eq!((sq + id).amax(), 0.0);
    }

    #[test]
    fn flipped_i3_fails_with_residual_two() {
        let s = QuaternionicStructure::standard(2).unwrap();
        let bad = QuaternionicStructure::from_matrices_unchecked(
            s.i_mat(0).clone(),
            s.i_mat(1).clone(),
            -s.i_mat(2).clone(),
        )
        .unwrap();
        let report = bad.validate();
        assert!(!report.passed());
        let check = report
            .checks
            .iter()
            .find(|c| c.name == "relaz1.I1I2-I3")
            .unwrap();
        assert_abs_diff_eq!(check.residual, 2.0);
    }

    #[test]
    fn non_orthogonal_i1_is_detected() {
        let s = QuaternionicStructure::standard(2).unwrap();
        let bad = QuaternionicStructure::from_matrices_unchecked(
            s.i_mat(0) * 1.5,
            s.i_mat(1).clone(),
            s.i_mat(2).clone(),
        )
        .unwrap();
        let report = bad.validate();
        let check = report
            .checks
            .iter()
            .find(|c| c.name == "relaz2.I1-orthogonality")
            .unwrap();
        assert!(check.residual > STRUCTURE_TOL);
    }

    #[test]
    fn omega_examples() {
        let s = QuaternionicStructure::standard(2).unwrap();
        let e1 = unit(8, 0);
        let i1e1 = s.apply(0, &e1);
        let i2e1 = s.apply(1, &e1);
        assert_abs_diff_eq!(s.omega(0, &e1, &i1e1), 1.0);
        assert_abs_diff_eq!(s.omega(0, &e1, &i2e1), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = random_vector(&mut rng, 8);
            let y = random_vector(&mut rng, 8);
            for a in 0..3 {
                assert_abs_diff_eq!(s.omega(a, &x, &x), 0.0, epsilon = 1e-14);
                assert_abs_diff_eq!(
                    s.omega(a, &x, &y),
                    -s.omega(a, &y, &x),
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn quaternionic_orthogonality_of_the_x_family() {
        // <X, Ia X> = 0 and <Ia X, Ib X> = 0 for a != b.
        let s = QuaternionicStructure::standard(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x = random_vector(&mut rng, 12);
            for a in 0..3 {
                assert_abs_diff_eq!(x.dot(&s.apply(a, &x)), 0.0, epsilon = 1e-13);
                for b in 0..3 {
                    if a != b {
                        assert_abs_diff_eq!(
                            s.apply(a, &x).dot(&s.apply(b, &x)),
                            0.0,
                            epsilon = 1e-13
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fatness_gram_examples() {
        let s = QuaternionicStructure::standard(2).unwrap();
        let gram = s.fatness_gram(&unit(8, 0));
        assert_abs_diff_eq!(gram, -2.0 * Matrix3::identity(), epsilon = 1e-14);

        assert_eq!(s.fatness_gram(&DVector::zeros(8)), Matrix3::zeros());

        let gram = s.fatness_gram(&(unit(8, 1) * 3.0));
        assert_abs_diff_eq!(gram, -18.0 * Matrix3::identity(), epsilon = 1e-13);

        // Fat condition: invertible for every X != 0.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = random_vector(&mut rng, 8);
            if x.norm() > 1e-6 {
                assert!(s.fatness_gram(&x).determinant().abs() > 1e-12);
            }
        }
    }

    #[test]
    fn casimir_eigenvalues_and_projections() {
        let s = QuaternionicStructure::standard(2).unwrap();
        let id = DMatrix::<f64>::identity(8, 8);
        // Identity commutes with everything: eigenvalue 3.
        assert_eq!((s.casimir(&id) - 3.0 * &id).amax(), 0.0);
        let (p3, pm1) = s.decompose(&id);
        assert_eq!((p3 - &id).amax(), 0.0);
        assert_eq!(pm1.amax(), 0.0);

        // Each Ia is a pure [-1]-component.
        let i1 = s.i_mat(0).clone();
        assert_eq!((s.casimir(&i1) + &i1).amax(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let raw = DMatrix::from_fn(8, 8, |_, _| rng.gen_range(-1.0..1.0));
        let psi = (&raw + raw.transpose()) / 2.0;
        let (p3, pm1) = s.decompose(&psi);
        assert!(((&p3 + &pm1) - &psi).amax() < 1e-12);
        assert!((s.casimir(&p3) - 3.0 * &p3).amax() < 1e-12);
        assert!((s.casimir(&pm1) + &pm1).amax() < 1e-12);
        // Projection pair: applying decompose twice is idempotent.
        let (p33, p3m1) = s.decompose(&p3);
        assert!((p33 - &p3).amax() < 1e-12);
        assert!(p3m1.amax() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let s = QuaternionicStructure::standard(2).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"I1\""));
        let back: QuaternionicStructure = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);

        // Deserialization validates: a corrupted document is rejected.
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["I1"][0][0] = serde_json::json!(0.5);
        let res: Result<QuaternionicStructure, _> =
            serde_json::from_value(doc);
        assert!(res.is_err());
    }
}
