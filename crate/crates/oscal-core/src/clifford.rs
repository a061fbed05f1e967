//! Pauli/Dirac matrix conventions and involution-deformed phase-space
//! representations.
//!
//! All matrices here have entries in `{0, +-1, +-i, +-1/2 hbar}`; products of
//! such matrices are computed without rounding, so the Clifford invariants
//! (`{alpha_i, alpha_j} = 2 delta_ij`, `beta^2 = I`, ...) hold *exactly* in
//! floating point and the tests assert equality, not closeness.
//!
//! The involution part: a Hermitian matrix `eta` with `eta^2 = I` deforms the
//! canonical pair into `Q^i = eta (x) q^i`, `P^j = eta (x) p^j` acting on
//! `C^n (x) Fock^3`, which obeys `[P^i, Q^j] = -i hbar delta^ij (eta^2 (x) I)`
//! on the truncation interior. The time component of the deformed bracket is
//! a pure scalar statement (no ladder content at fixed energy), so only the
//! nine spatial brackets are matrix-verified.

use num_complex::Complex64;

use crate::error::CoreError;
use crate::fock::FockBasis1D;
use crate::matrix::OperatorMatrix;
use crate::report::VerificationReport;
use crate::units::UnitSystem;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pauli matrix `sigma_k`, `k` in `1..=3`.
pub fn pauli(k: usize) -> Result<OperatorMatrix, CoreError> {
    let rows = match k {
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => return Err(CoreError::GeneratorOutOfRange { index: k, dim: 3 }),
    };
    Ok(OperatorMatrix::from_rows(2, &rows))
}

/// 2x2 identity.
pub fn identity2() -> OperatorMatrix {
    OperatorMatrix::identity(2)
}

/// Dirac matrices in the standard representation, plus the spin matrices
/// they generate.
#[derive(Debug, Clone)]
pub struct CliffordSet {
    /// `beta = diag(I_2, -I_2)`.
    pub beta: OperatorMatrix,
    /// `alpha_k = sigma_1 (x) sigma_k` (off-diagonal `sigma_k` blocks).
    pub alpha: [OperatorMatrix; 3],
    /// `Sigma_k = I_2 (x) sigma_k = diag(sigma_k, sigma_k)`.
    pub sigma: [OperatorMatrix; 3],
}

impl CliffordSet {
    pub fn new() -> Self {
        let s1 = pauli(1).expect("pauli(1)");
        let s3 = pauli(3).expect("pauli(3)");
        let i2 = identity2();
        let beta = s3.kron(&i2);
        let alpha = [1, 2, 3].map(|k| s1.kron(&pauli(k).expect("pauli")));
        let sigma = [1, 2, 3].map(|k| i2.kron(&pauli(k).expect("pauli")));
        CliffordSet { beta, alpha, sigma }
    }

    /// Spin operators `S_k = (hbar/2) Sigma_k`.
    pub fn spin(&self, hbar: f64) -> [OperatorMatrix; 3] {
        [0, 1, 2].map(|k| self.sigma[k].scale_re(0.5 * hbar))
    }
}

impl Default for CliffordSet {
    fn default() -> Self {
        Self::new()
    }
}

/// A validated Hermitian involution (`eta^dagger = eta`, `eta^2 = I`).
#[derive(Debug, Clone)]
pub struct EtaRep {
    label: String,
    matrix: OperatorMatrix,
    /// `|Tr eta|`; distinguishes inequivalent involutions of equal dimension.
    trace_label: f64,
}

impl EtaRep {
    /// Validation tolerance on `eta^dagger - eta` and `eta^2 - I`.
    pub const INVOLUTION_TOL: f64 = 1e-12;

    pub fn new(label: impl Into<String>, matrix: OperatorMatrix) -> Result<Self, CoreError> {
        let defect = matrix.hermiticity_defect();
        if defect > Self::INVOLUTION_TOL {
            return Err(CoreError::InvalidInvolution {
                reason: format!("not Hermitian (defect {defect:.3e})"),
            });
        }
        let sq = matrix.mul(&matrix).expect("square dimensions agree");
        let dev = sq
            .sub(&OperatorMatrix::identity(matrix.dim()))
            .expect("dimensions agree")
            .max_norm();
        if dev > Self::INVOLUTION_TOL {
            return Err(CoreError::InvalidInvolution {
                reason: format!("square deviates from identity by {dev:.3e}"),
            });
        }
        let trace_label = matrix.trace().norm();
        Ok(EtaRep {
            label: label.into(),
            matrix,
            trace_label,
        })
    }

    /// `I_n`.
    pub fn identity(n: usize) -> Self {
        Self::new(format!("I{n}"), OperatorMatrix::identity(n)).expect("identity is an involution")
    }

    /// `sigma_1`.
    pub fn pauli1() -> Self {
        Self::new("sigma1", pauli(1).expect("pauli")).expect("sigma1 is an involution")
    }

    /// `sigma_3`.
    pub fn pauli3() -> Self {
        Self::new("sigma3", pauli(3).expect("pauli")).expect("sigma3 is an involution")
    }

    /// `diag(I_p, -I_m)`.
    pub fn block_diag(p: usize, m: usize) -> Result<Self, CoreError> {
        let n = p + m;
        if n == 0 {
            return Err(CoreError::InvalidInvolution {
                reason: "empty block sizes".into(),
            });
        }
        let mat = OperatorMatrix::from_fn(n, |i, j| {
            if i != j {
                ZERO
            } else if i < p {
                ONE
            } else {
                -ONE
            }
        });
        Self::new(format!("block({p},{m})"), mat)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `|Tr eta|` — e.g. `(2, 0, 0)` for `(I_2, sigma_1, sigma_3)`.
    pub fn trace_label(&self) -> f64 {
        self.trace_label
    }
}

/// Deformed canonical operators `Q^i = eta (x) q^i`, `P^j = eta (x) p^j` on
/// `C^n (x) Fock(cutoff)^3`, with the involution as the slow Kronecker factor.
#[derive(Debug, Clone)]
pub struct EtaOscillator {
    pub eta: EtaRep,
    pub units: UnitSystem,
    pub basis: FockBasis1D,
    /// Total dimension `n * cutoff^3`.
    pub dim: usize,
    pub q: [OperatorMatrix; 3],
    pub p: [OperatorMatrix; 3],
    /// `eta^2 (x) I`, the operator appearing on the bracket right-hand side.
    pub eta_sq: OperatorMatrix,
}

/// Number of spacetime components in the deformed bracket family. The time
/// component carries no ladder content in the stationary treatment and is
/// excluded from matrix verification; only the 3x3 spatial block is checked.
pub const SPACETIME_COMPONENTS: usize = 4;

/// Builds the deformed representation on the cubic triple-mode truncation.
pub fn build_eta_representation(
    eta: &EtaRep,
    cutoff: usize,
    units: UnitSystem,
) -> Result<EtaOscillator, CoreError> {
    units.validate()?;
    let basis = FockBasis1D::new(cutoff)?;
    let n = basis.dim();
    let a = basis.lowering();
    let adag = a.adjoint();
    let cq = (units.hbar / (2.0 * units.m0 * units.omega)).sqrt();
    let cp = (units.hbar * units.m0 * units.omega / 2.0).sqrt();
    let q1 = a.add(&adag).expect("dims").scale_re(cq);
    let p1 = adag.sub(&a).expect("dims").scale(Complex64::new(0.0, cp));
    let id = OperatorMatrix::identity(n);

    // Per-axis operators on the cube, axis 0 slowest (after the involution).
    let on_cube = |op: &OperatorMatrix, axis: usize| -> OperatorMatrix {
        match axis {
            0 => op.kron(&id).kron(&id),
            1 => id.kron(op).kron(&id),
            2 => id.kron(&id).kron(op),
            _ => unreachable!("axis < 3"),
        }
    };

    let em = eta.matrix();
    let q = [0, 1, 2].map(|d| em.kron(&on_cube(&q1, d)));
    let p = [0, 1, 2].map(|d| em.kron(&on_cube(&p1, d)));
    let eta_sq_small = em.mul(em).expect("square");
    let cube_id = OperatorMatrix::identity(n * n * n);
    let eta_sq = eta_sq_small.kron(&cube_id);
    let dim = eta.dim() * n * n * n;
    Ok(EtaOscillator {
        eta: eta.clone(),
        units,
        basis,
        dim,
        q,
        p,
        eta_sq,
    })
}

impl EtaOscillator {
    /// Mask keeping states with every axis occupation below `cutoff - buffer`.
    pub fn interior_mask(&self, buffer: usize) -> Result<Vec<bool>, CoreError> {
        let axis = self.basis.interior_mask(buffer)?;
        let n = self.basis.dim();
        let mut cube = Vec::with_capacity(n * n * n);
        for m1 in 0..n {
            for m2 in 0..n {
                for m3 in 0..n {
                    cube.push(axis[m1] && axis[m2] && axis[m3]);
                }
            }
        }
        Ok(crate::fock::spin_extended_mask(self.eta.dim(), &cube))
    }
}

/// Verifies the nine spatial deformed brackets
/// `[P^i, Q^j] + i hbar delta^ij (eta^2 (x) I) = 0` on the interior.
pub fn verify_eta_brackets(
    osc: &EtaOscillator,
    buffer: usize,
    tol: f64,
) -> Result<Vec<VerificationReport>, CoreError> {
    let mask = osc.interior_mask(buffer)?;
    let ihbar_eta_sq = osc.eta_sq.scale(Complex64::new(0.0, osc.units.hbar));
    let mut reports = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let mut dev = osc.p[i].commutator(&osc.q[j]).expect("dims");
            if i == j {
                dev = dev.add(&ihbar_eta_sq).expect("dims");
            }
            let residual = dev.max_norm_masked(&mask);
            let mut report = VerificationReport::new(
                &format!("eta.bracket_p{}_q{}", i + 1, j + 1),
                "c10",
                residual,
                tol,
            );
            if i == 0 && j == 0 {
                report = report.with_note(&format!(
                    "involution {} with |Tr eta| = {}; time component is scalar and not \
                     matrix-checked",
                    osc.eta.label(),
                    osc.eta.trace_label()
                ));
            }
            reports.push(report);
        }
    }
    Ok(reports)
}
