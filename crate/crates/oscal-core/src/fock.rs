//! Truncated Fock (number) bases in one and three dimensions.
//!
//! Truncation is honest: ladder matrices are the exact operator restrictions,
//! so `[a, a^dagger]` picks up the unavoidable corner term `-(N-1)` in the top
//! state. Every consumer that claims a tolerance therefore works through the
//! interior masks defined here, which cut away the buffer of states the
//! truncation can corrupt.
//!
//! Three-dimensional states live on the simplex `n1+n2+n3 <= Nmax` in graded
//! lexicographic order (total quanta first). Operators of the form
//! `raising . lowering` never leave the simplex, which makes number-conserving
//! constructions (angular momentum, oscillator Hamiltonian blocks) exact even
//! at finite cutoff; that fact carries several exactness claims in the tests.

use num_complex::Complex64;

use crate::error::CoreError;
use crate::matrix::OperatorMatrix;
use crate::units::UnitSystem;

/// One oscillator mode truncated to `cutoff` number states `|0..cutoff-1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis1D {
    cutoff: usize,
}

impl FockBasis1D {
    /// Below this the interior of any two-operator identity is empty.
    pub const MIN_CUTOFF: usize = 4;

    pub fn new(cutoff: usize) -> Result<Self, CoreError> {
        if cutoff < Self::MIN_CUTOFF {
            return Err(CoreError::CutoffTooSmall {
                given: cutoff,
                minimum: Self::MIN_CUTOFF,
            });
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff
    }

    /// Lowering operator: `a|n> = sqrt(n)|n-1>`.
    pub fn lowering(&self) -> OperatorMatrix {
        let n = self.cutoff;
        let mut a = OperatorMatrix::zeros(n);
        for k in 1..n {
            a.set(k - 1, k, Complex64::new((k as f64).sqrt(), 0.0));
        }
        a
    }

    /// Raising operator, the exact adjoint of the truncated lowering operator.
    pub fn raising(&self) -> OperatorMatrix {
        self.lowering().adjoint()
    }

    /// Number operator `diag(0..cutoff-1)`, exact at any cutoff.
    pub fn number(&self) -> OperatorMatrix {
        OperatorMatrix::from_fn(self.cutoff, |i, j| {
            if i == j {
                Complex64::new(i as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Mask selecting states `n < cutoff - buffer`, the zone where identities
    /// built from at most `buffer` ladder factors are exact.
    pub fn interior_mask(&self, buffer: usize) -> Result<Vec<bool>, CoreError> {
        if buffer >= self.cutoff {
            return Err(CoreError::EmptyInterior {
                buffer,
                cutoff: self.cutoff,
            });
        }
        Ok((0..self.cutoff).map(|n| n < self.cutoff - buffer).collect())
    }

    /// Indices of interior states, in basis order.
    pub fn interior_indices(&self, buffer: usize) -> Result<Vec<usize>, CoreError> {
        Ok(self
            .interior_mask(buffer)?
            .iter()
            .enumerate()
            .filter_map(|(i, keep)| keep.then_some(i))
            .collect())
    }

    /// Orthogonal projector onto the interior subspace: diagonal 0/1 matrix.
    ///
    /// Requires `buffer >= 1`; a zero buffer would make the projector the
    /// identity and silently disable the truncation defense.
    pub fn interior_projector(&self, buffer: usize) -> Result<OperatorMatrix, CoreError> {
        if buffer == 0 {
            return Err(CoreError::EmptyInterior {
                buffer,
                cutoff: self.cutoff,
            });
        }
        let mask = self.interior_mask(buffer)?;
        Ok(projector_from_mask(&mask))
    }
}

/// Diagonal 0/1 projector for a boolean kept-state mask.
fn projector_from_mask(mask: &[bool]) -> OperatorMatrix {
    let mut p = OperatorMatrix::zeros(mask.len());
    for (i, keep) in mask.iter().enumerate() {
        if *keep {
            p.set(i, i, Complex64::new(1.0, 0.0));
        }
    }
    p
}

/// Extends a Fock-space mask to a `spin_dim x fock`-dimensional product space
/// in which the spin factor is the slow (outer) Kronecker index.
pub fn spin_extended_mask(spin_dim: usize, fock_mask: &[bool]) -> Vec<bool> {
    let mut out = Vec::with_capacity(spin_dim * fock_mask.len());
    for _ in 0..spin_dim {
        out.extend_from_slice(fock_mask);
    }
    out
}

/// Position, momentum, and oscillator Hamiltonian for one truncated mode.
#[derive(Debug, Clone)]
pub struct CanonicalOps1D {
    pub basis: FockBasis1D,
    pub units: UnitSystem,
    /// `q = sqrt(hbar/(2 m0 omega)) (a + a^dagger)`.
    pub q: OperatorMatrix,
    /// `p = i sqrt(hbar m0 omega / 2) (a^dagger - a)`.
    pub p: OperatorMatrix,
    /// `p^2/(2 m0) + m0 omega^2 q^2 / 2`, assembled from the matrices above.
    ///
    /// In natural units the two off-diagonal (n, n+-2) bands cancel bit-exactly
    /// (identical float products with opposite signs), leaving an exactly
    /// diagonal matrix whose only corrupted entry is the top state.
    pub h_ho: OperatorMatrix,
}

impl CanonicalOps1D {
    pub fn new(basis: FockBasis1D, units: UnitSystem) -> Result<Self, CoreError> {
        units.validate()?;
        let a = basis.lowering();
        let adag = basis.raising();
        let cq = (units.hbar / (2.0 * units.m0 * units.omega)).sqrt();
        let cp = (units.hbar * units.m0 * units.omega / 2.0).sqrt();
        let q = a.add(&adag)?.scale_re(cq);
        let p = adag.sub(&a)?.scale(Complex64::new(0.0, cp));
        let p2 = p.mul(&p)?;
        let q2 = q.mul(&q)?;
        let h_ho = p2
            .scale_re(0.5 / units.m0)
            .add(&q2.scale_re(0.5 * units.m0 * units.omega.powi(2)))?;
        Ok(Self {
            basis,
            units,
            q,
            p,
            h_ho,
        })
    }
}

/// Sort key for the graded-lex basis: total quanta, then `(n1, n2, n3)`.
fn graded_lex_key(s: &[usize; 3]) -> (usize, usize, usize, usize) {
    (s[0] + s[1] + s[2], s[0], s[1], s[2])
}

/// Three oscillator modes truncated to the simplex `n1+n2+n3 <= nmax`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis3D {
    nmax: usize,
    states: Vec<[usize; 3]>,
}

impl FockBasis3D {
    pub fn new(nmax: usize) -> Result<Self, CoreError> {
        if nmax < 2 {
            return Err(CoreError::CutoffTooSmall {
                given: nmax,
                minimum: 2,
            });
        }
        let mut states = Vec::with_capacity((nmax + 1) * (nmax + 2) * (nmax + 3) / 6);
        for total in 0..=nmax {
            for n1 in 0..=total {
                for n2 in 0..=(total - n1) {
                    states.push([n1, n2, total - n1 - n2]);
                }
            }
        }
        debug_assert!(states
            .windows(2)
            .all(|w| graded_lex_key(&w[0]) < graded_lex_key(&w[1])));
        Ok(Self { nmax, states })
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[[usize; 3]] {
        &self.states
    }

    pub fn state(&self, index: usize) -> [usize; 3] {
        self.states[index]
    }

    /// Basis index of a state, or `None` when it lies outside the simplex.
    pub fn index(&self, state: [usize; 3]) -> Option<usize> {
        if state[0] + state[1] + state[2] > self.nmax {
            return None;
        }
        self.states
            .binary_search_by_key(&graded_lex_key(&state), graded_lex_key)
            .ok()
    }

    /// Total quanta of the state at `index`.
    pub fn shell_of(&self, index: usize) -> usize {
        let s = self.states[index];
        s[0] + s[1] + s[2]
    }

    /// Basis indices grouped by total quanta, shells `0..=nmax` in order.
    pub fn shells(&self) -> Vec<Vec<usize>> {
        let mut shells = vec![Vec::new(); self.nmax + 1];
        for (i, s) in self.states.iter().enumerate() {
            shells[s[0] + s[1] + s[2]].push(i);
        }
        shells
    }

    /// Lowering operator on one axis: `a_d |..n_d..> = sqrt(n_d) |..n_d-1..>`.
    pub fn lowering(&self, axis: usize) -> OperatorMatrix {
        assert!(axis < 3, "axis must be 0, 1, or 2");
        let mut a = OperatorMatrix::zeros(self.dim());
        for (col, s) in self.states.iter().enumerate() {
            if s[axis] == 0 {
                continue;
            }
            let mut t = *s;
            t[axis] -= 1;
            let row = self.index(t).expect("lowering stays on the simplex");
            a.set(row, col, Complex64::new((s[axis] as f64).sqrt(), 0.0));
        }
        a
    }

    pub fn raising(&self, axis: usize) -> OperatorMatrix {
        self.lowering(axis).adjoint()
    }

    pub fn number(&self, axis: usize) -> OperatorMatrix {
        assert!(axis < 3, "axis must be 0, 1, or 2");
        OperatorMatrix::from_fn(self.dim(), |i, j| {
            if i == j {
                Complex64::new(self.states[i][axis] as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Mask selecting states with `total <= nmax - buffer`.
    pub fn interior_mask(&self, buffer: usize) -> Result<Vec<bool>, CoreError> {
        if buffer > self.nmax {
            return Err(CoreError::EmptyInterior {
                buffer,
                cutoff: self.nmax,
            });
        }
        let keep = self.nmax - buffer;
        Ok(self
            .states
            .iter()
            .map(|s| s[0] + s[1] + s[2] <= keep)
            .collect())
    }

    pub fn interior_indices(&self, buffer: usize) -> Result<Vec<usize>, CoreError> {
        Ok(self
            .interior_mask(buffer)?
            .iter()
            .enumerate()
            .filter_map(|(i, keep)| keep.then_some(i))
            .collect())
    }

    /// Orthogonal projector onto the interior shells (`buffer >= 1`).
    pub fn interior_projector(&self, buffer: usize) -> Result<OperatorMatrix, CoreError> {
        if buffer == 0 {
            return Err(CoreError::EmptyInterior {
                buffer,
                cutoff: self.nmax,
            });
        }
        let mask = self.interior_mask(buffer)?;
        Ok(projector_from_mask(&mask))
    }
}

/// Canonical operators for the three-mode truncation.
#[derive(Debug, Clone)]
pub struct CanonicalOps3D {
    pub basis: FockBasis3D,
    pub units: UnitSystem,
    pub q: [OperatorMatrix; 3],
    pub p: [OperatorMatrix; 3],
    /// Oscillator Hamiltonian assembled from `q` and `p`; exactly diagonal in
    /// natural units (band cancellation as in one dimension), with corruption
    /// confined to the top shell.
    pub h_ho: OperatorMatrix,
    /// Orbital angular momentum `L_k = i hbar (a_j^dagger a_i - a_i^dagger a_j)`
    /// for cyclic `(i, j, k)`; lowering acts first in both products, so these
    /// are exactly shell-preserving and exactly Hermitian at finite cutoff.
    pub l: [OperatorMatrix; 3],
}

impl CanonicalOps3D {
    pub fn new(basis: FockBasis3D, units: UnitSystem) -> Result<Self, CoreError> {
        units.validate()?;
        let dim = basis.dim();
        let a: Vec<OperatorMatrix> = (0..3).map(|d| basis.lowering(d)).collect();
        let adag: Vec<OperatorMatrix> = a.iter().map(|m| m.adjoint()).collect();
        let cq = (units.hbar / (2.0 * units.m0 * units.omega)).sqrt();
        let cp = (units.hbar * units.m0 * units.omega / 2.0).sqrt();

        let mut q = Vec::with_capacity(3);
        let mut p = Vec::with_capacity(3);
        for d in 0..3 {
            q.push(a[d].add(&adag[d])?.scale_re(cq));
            p.push(adag[d].sub(&a[d])?.scale(Complex64::new(0.0, cp)));
        }

        let mut h_ho = OperatorMatrix::zeros(dim);
        for d in 0..3 {
            let p2 = p[d].mul(&p[d])?;
            let q2 = q[d].mul(&q[d])?;
            h_ho = h_ho
                .add(&p2.scale_re(0.5 / units.m0))?
                .add(&q2.scale_re(0.5 * units.m0 * units.omega.powi(2)))?;
        }

        let mut l = Vec::with_capacity(3);
        for k in 0..3 {
            let i = (k + 1) % 3;
            let j = (k + 2) % 3;
            // i hbar (a_j^dagger a_i - a_i^dagger a_j), lowering applied first.
            let term = adag[j].mul(&a[i])?.sub(&adag[i].mul(&a[j])?)?;
            l.push(term.scale(Complex64::new(0.0, units.hbar)));
        }

        let q: [OperatorMatrix; 3] = q.try_into().expect("three components");
        let p: [OperatorMatrix; 3] = p.try_into().expect("three components");
        let l: [OperatorMatrix; 3] = l.try_into().expect("three components");
        Ok(Self {
            basis,
            units,
            q,
            p,
            h_ho,
            l,
        })
    }
}
