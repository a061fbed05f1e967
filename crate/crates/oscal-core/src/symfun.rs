//! Exact symbolic function family and matrix differential operators.
//!
//! The family is spanned by terms `coeff * x^a y^b z^c * r^p * exp(-lambda
//! |x - mu|^2)` and is closed under partial differentiation: the power rule
//! bumps monomial exponents, radial factors differentiate as `p x_i r^(p-2)`,
//! and Gaussians contribute `-2 lambda (x_i - mu_i)`. Products are supported
//! whenever at most one factor carries a Gaussian (the potential-type
//! functions appearing in operator coefficients never do), which keeps every
//! operator application inside the family.
//!
//! [`MatrixDifferentialOperator`] is the first-order form `D = sum_i M_i(x)
//! d_i + V(x)` with 2x2 symbolic matrix coefficients. Applications and
//! commutators are computed exactly; an independent 8th-order central
//! finite-difference applier serves as the numeric cross-oracle.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::CoreError;

/// Gaussian envelope `exp(-lambda |x - center|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFactor {
    pub lambda: f64,
    pub center: [f64; 3],
}

/// One family term `coeff * x^a y^b z^c * r^p * gaussian`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub powers: [u32; 3],
    pub radial_power: f64,
    pub gaussian: Option<GaussianFactor>,
}

/// Merge key: exact structural identity of everything but the coefficient.
type TermKey = ([u32; 3], u64, Option<(u64, [u64; 3])>);

fn term_key(t: &Term) -> TermKey {
    (
        t.powers,
        t.radial_power.to_bits(),
        t.gaussian.map(|g| {
            (
                g.lambda.to_bits(),
                [
                    g.center[0].to_bits(),
                    g.center[1].to_bits(),
                    g.center[2].to_bits(),
                ],
            )
        }),
    )
}

/// Finite sum of family terms, kept in canonical (merged, ordered) form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SymbolicFunction {
    terms: Vec<Term>,
}

impl SymbolicFunction {
    pub fn zero() -> Self {
        SymbolicFunction::default()
    }

    pub fn constant(coeff: Complex64) -> Self {
        SymbolicFunction::from_terms(vec![Term {
            coeff,
            powers: [0; 3],
            radial_power: 0.0,
            gaussian: None,
        }])
    }

    /// `coeff * r^p`.
    pub fn radial(coeff: Complex64, p: f64) -> Self {
        SymbolicFunction::from_terms(vec![Term {
            coeff,
            powers: [0; 3],
            radial_power: p,
            gaussian: None,
        }])
    }

    /// `coeff * x_axis * r^p` — the shape of every potential entry in use.
    pub fn coordinate_radial(coeff: Complex64, axis: usize, p: f64) -> Self {
        let mut powers = [0u32; 3];
        powers[axis] = 1;
        SymbolicFunction::from_terms(vec![Term {
            coeff,
            powers,
            radial_power: p,
            gaussian: None,
        }])
    }

    /// `coeff * exp(-lambda |x - center|^2)`.
    pub fn gaussian(coeff: Complex64, lambda: f64, center: [f64; 3]) -> Self {
        SymbolicFunction::from_terms(vec![Term {
            coeff,
            powers: [0; 3],
            radial_power: 0.0,
            gaussian: Some(GaussianFactor { lambda, center }),
        }])
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut f = SymbolicFunction { terms };
        f.canonicalize();
        f
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn canonicalize(&mut self) {
        let mut merged: BTreeMap<TermKey, Term> = BTreeMap::new();
        for t in self.terms.drain(..) {
            match merged.entry(term_key(&t)) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    e.get_mut().coeff += t.coeff;
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(t);
                }
            }
        }
        self.terms = merged
            .into_values()
            .filter(|t| t.coeff != Complex64::new(0.0, 0.0))
            .collect();
    }

    pub fn add(&self, other: &SymbolicFunction) -> SymbolicFunction {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        SymbolicFunction::from_terms(terms)
    }

    pub fn sub(&self, other: &SymbolicFunction) -> SymbolicFunction {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> SymbolicFunction {
        SymbolicFunction::from_terms(
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * factor,
                    ..*t
                })
                .collect(),
        )
    }

    /// Exact partial derivative along `axis`; stays in the family.
    pub fn derivative(&self, axis: usize) -> SymbolicFunction {
        assert!(axis < 3, "axis out of range");
        let mut out = Vec::with_capacity(3 * self.terms.len());
        for t in &self.terms {
            // Monomial piece: a_i x^(a_i - 1).
            if t.powers[axis] > 0 {
                let mut powers = t.powers;
                powers[axis] -= 1;
                out.push(Term {
                    coeff: t.coeff * (t.powers[axis] as f64),
                    powers,
                    radial_power: t.radial_power,
                    gaussian: t.gaussian,
                });
            }
            // Radial piece: p x_i r^(p-2).
            if t.radial_power != 0.0 {
                let mut powers = t.powers;
                powers[axis] += 1;
                out.push(Term {
                    coeff: t.coeff * t.radial_power,
                    powers,
                    radial_power: t.radial_power - 2.0,
                    gaussian: t.gaussian,
                });
            }
            // Gaussian piece: -2 lambda (x_i - mu_i).
            if let Some(g) = t.gaussian {
                let mut powers = t.powers;
                powers[axis] += 1;
                out.push(Term {
                    coeff: t.coeff * (-2.0 * g.lambda),
                    powers,
                    radial_power: t.radial_power,
                    gaussian: t.gaussian,
                });
                out.push(Term {
                    coeff: t.coeff * (2.0 * g.lambda * g.center[axis]),
                    powers: t.powers,
                    radial_power: t.radial_power,
                    gaussian: t.gaussian,
                });
            }
        }
        SymbolicFunction::from_terms(out)
    }

    /// Exact product. Fails with [`CoreError::FamilyClosure`] if both factors
    /// carry Gaussian envelopes (the product would leave the family).
    pub fn mul(&self, other: &SymbolicFunction) -> Result<SymbolicFunction, CoreError> {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let gaussian = match (a.gaussian, b.gaussian) {
                    (Some(_), Some(_)) => {
                        return Err(CoreError::FamilyClosure {
                            reason: "product of two Gaussian-bearing terms leaves the family"
                                .into(),
                        })
                    }
                    (g, None) => g,
                    (None, g) => g,
                };
                out.push(Term {
                    coeff: a.coeff * b.coeff,
                    powers: [
                        a.powers[0] + b.powers[0],
                        a.powers[1] + b.powers[1],
                        a.powers[2] + b.powers[2],
                    ],
                    radial_power: a.radial_power + b.radial_power,
                    gaussian,
                });
            }
        }
        Ok(SymbolicFunction::from_terms(out))
    }

    /// Pointwise value; finite wherever r > 0.
    pub fn eval(&self, x: &[f64; 3]) -> Complex64 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let mut v = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let mut m = 1.0;
            for (xi, &p) in x.iter().zip(&t.powers) {
                m *= xi.powi(p as i32);
            }
            if t.radial_power != 0.0 {
                m *= r.powf(t.radial_power);
            }
            if let Some(g) = t.gaussian {
                let d0 = x[0] - g.center[0];
                let d1 = x[1] - g.center[1];
                let d2 = x[2] - g.center[2];
                m *= (-g.lambda * (d0 * d0 + d1 * d1 + d2 * d2)).exp();
            }
            v += t.coeff * m;
        }
        v
    }
}

/// Two-component wave function.
pub type Spinor2 = [SymbolicFunction; 2];

pub fn spinor_add(a: &Spinor2, b: &Spinor2) -> Spinor2 {
    [a[0].add(&b[0]), a[1].add(&b[1])]
}

pub fn spinor_sub(a: &Spinor2, b: &Spinor2) -> Spinor2 {
    [a[0].sub(&b[0]), a[1].sub(&b[1])]
}

pub fn spinor_scale(a: &Spinor2, factor: Complex64) -> Spinor2 {
    [a[0].scale(factor), a[1].scale(factor)]
}

pub fn spinor_eval(a: &Spinor2, x: &[f64; 3]) -> [Complex64; 2] {
    [a[0].eval(x), a[1].eval(x)]
}

/// 2x2 matrix of symbolic scalars.
pub type SymMatrix2 = [[SymbolicFunction; 2]; 2];

pub fn zero_matrix() -> SymMatrix2 {
    [
        [SymbolicFunction::zero(), SymbolicFunction::zero()],
        [SymbolicFunction::zero(), SymbolicFunction::zero()],
    ]
}

/// Lifts a constant complex 2x2 matrix into the symbolic family.
pub fn constant_matrix(m: [[Complex64; 2]; 2]) -> SymMatrix2 {
    [
        [
            SymbolicFunction::constant(m[0][0]),
            SymbolicFunction::constant(m[0][1]),
        ],
        [
            SymbolicFunction::constant(m[1][0]),
            SymbolicFunction::constant(m[1][1]),
        ],
    ]
}

pub fn matrix_add(a: &SymMatrix2, b: &SymMatrix2) -> SymMatrix2 {
    [
        [a[0][0].add(&b[0][0]), a[0][1].add(&b[0][1])],
        [a[1][0].add(&b[1][0]), a[1][1].add(&b[1][1])],
    ]
}

pub fn matrix_sub(a: &SymMatrix2, b: &SymMatrix2) -> SymMatrix2 {
    [
        [a[0][0].sub(&b[0][0]), a[0][1].sub(&b[0][1])],
        [a[1][0].sub(&b[1][0]), a[1][1].sub(&b[1][1])],
    ]
}

pub fn matrix_mul(a: &SymMatrix2, b: &SymMatrix2) -> Result<SymMatrix2, CoreError> {
    let mut out = zero_matrix();
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0].mul(&b[0][c])?.add(&a[r][1].mul(&b[1][c])?);
        }
    }
    Ok(out)
}

pub fn matrix_derivative(a: &SymMatrix2, axis: usize) -> SymMatrix2 {
    [
        [a[0][0].derivative(axis), a[0][1].derivative(axis)],
        [a[1][0].derivative(axis), a[1][1].derivative(axis)],
    ]
}

pub fn matrix_is_zero(a: &SymMatrix2) -> bool {
    a.iter()
        .all(|row| row.iter().all(SymbolicFunction::is_zero))
}

/// First-order operator `D = sum_i M_i(x) d_i + V(x)` with 2x2 symbolic
/// matrix coefficients.
#[derive(Debug, Clone, Default)]
pub struct MatrixDifferentialOperator {
    /// `M_i`, one symbolic matrix per Cartesian axis.
    pub derivative_coefficients: [SymMatrix2; 3],
    /// Multiplication part `V`.
    pub potential: SymMatrix2,
}

impl MatrixDifferentialOperator {
    pub fn from_potential(potential: SymMatrix2) -> Self {
        MatrixDifferentialOperator {
            derivative_coefficients: [zero_matrix(), zero_matrix(), zero_matrix()],
            potential,
        }
    }

    pub fn is_multiplication(&self) -> bool {
        self.derivative_coefficients.iter().all(matrix_is_zero)
    }

    /// Exact application `D f`; stays in the family.
    #[allow(clippy::needless_range_loop)]
    pub fn apply(&self, f: &Spinor2) -> Result<Spinor2, CoreError> {
        let mut out = [SymbolicFunction::zero(), SymbolicFunction::zero()];
        for axis in 0..3 {
            let m = &self.derivative_coefficients[axis];
            if matrix_is_zero(m) {
                continue;
            }
            let df = [f[0].derivative(axis), f[1].derivative(axis)];
            for r in 0..2 {
                for c in 0..2 {
                    out[r] = out[r].add(&m[r][c].mul(&df[c])?);
                }
            }
        }
        for r in 0..2 {
            for c in 0..2 {
                out[r] = out[r].add(&self.potential[r][c].mul(&f[c])?);
            }
        }
        Ok(out)
    }

    /// Action-wise commutator `A(Bf) - B(Af)`.
    pub fn commutator_action(
        a: &MatrixDifferentialOperator,
        b: &MatrixDifferentialOperator,
        f: &Spinor2,
    ) -> Result<Spinor2, CoreError> {
        let ab = a.apply(&b.apply(f)?)?;
        let ba = b.apply(&a.apply(f)?)?;
        Ok(spinor_sub(&ab, &ba))
    }

    /// Operator-level commutator `[A, B]`, valid when the second-order terms
    /// cancel (true whenever the derivative coefficients share one constant
    /// matrix direction, as for the minimal-coupling operators). The result
    /// separates the multiplication part (`potential`) from the surviving
    /// first-order derivative part.
    pub fn commutator_operator(
        a: &MatrixDifferentialOperator,
        b: &MatrixDifferentialOperator,
    ) -> Result<MatrixDifferentialOperator, CoreError> {
        // Second-order obstruction: sum_{i,j} (M_i N_j - N_i M_j) d_i d_j
        // must vanish on the symmetrized index pairs.
        for i in 0..3 {
            for j in i..3 {
                let mi_nj =
                    matrix_mul(&a.derivative_coefficients[i], &b.derivative_coefficients[j])?;
                let ni_mj =
                    matrix_mul(&b.derivative_coefficients[i], &a.derivative_coefficients[j])?;
                let obstruction = if i == j {
                    matrix_sub(&mi_nj, &ni_mj)
                } else {
                    let mj_ni =
                        matrix_mul(&a.derivative_coefficients[j], &b.derivative_coefficients[i])?;
                    let nj_mi =
                        matrix_mul(&b.derivative_coefficients[j], &a.derivative_coefficients[i])?;
                    matrix_sub(&matrix_add(&mi_nj, &mj_ni), &matrix_add(&ni_mj, &nj_mi))
                };
                if !matrix_is_zero(&obstruction) {
                    return Err(CoreError::FamilyClosure {
                        reason: "commutator has surviving second-order derivative terms".into(),
                    });
                }
            }
        }
        let mut out = MatrixDifferentialOperator::default();
        for axis in 0..3 {
            // (M_a W - W M_a) + (V N_a - N_a V)
            //   + sum_i [M_i (d_i N_a) - N_i (d_i M_a)].
            let m_a = &a.derivative_coefficients[axis];
            let n_a = &b.derivative_coefficients[axis];
            let mut coeff = matrix_sub(
                &matrix_mul(m_a, &b.potential)?,
                &matrix_mul(&b.potential, m_a)?,
            );
            coeff = matrix_add(
                &coeff,
                &matrix_sub(
                    &matrix_mul(&a.potential, n_a)?,
                    &matrix_mul(n_a, &a.potential)?,
                ),
            );
            for i in 0..3 {
                coeff = matrix_add(
                    &coeff,
                    &matrix_sub(
                        &matrix_mul(&a.derivative_coefficients[i], &matrix_derivative(n_a, i))?,
                        &matrix_mul(&b.derivative_coefficients[i], &matrix_derivative(m_a, i))?,
                    ),
                );
            }
            out.derivative_coefficients[axis] = coeff;
        }
        // sum_i [M_i (d_i W) - N_i (d_i V)] + (V W - W V).
        let mut pot = matrix_sub(
            &matrix_mul(&a.potential, &b.potential)?,
            &matrix_mul(&b.potential, &a.potential)?,
        );
        for i in 0..3 {
            pot = matrix_add(
                &pot,
                &matrix_sub(
                    &matrix_mul(
                        &a.derivative_coefficients[i],
                        &matrix_derivative(&b.potential, i),
                    )?,
                    &matrix_mul(
                        &b.derivative_coefficients[i],
                        &matrix_derivative(&a.potential, i),
                    )?,
                ),
            );
        }
        out.potential = pot;
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Finite-difference cross-oracle.
// ---------------------------------------------------------------------------

/// Step for the 8th-order central stencil: balances truncation against
/// roundoff for the Gaussian-scale functions in use.
pub const FD_STEP: f64 = 0.005;

/// Offsets and weights of the 8th-order central first-derivative stencil
/// (antisymmetric half; divide by h).
const FD_WEIGHTS: [(usize, f64); 4] = [
    (1, 4.0 / 5.0),
    (2, -1.0 / 5.0),
    (3, 4.0 / 105.0),
    (4, -1.0 / 280.0),
];

pub type PointFn<'a> = Box<dyn Fn(&[f64; 3]) -> [Complex64; 2] + 'a>;

/// Numeric partial derivative of a pointwise spinor function.
pub fn fd_derivative(
    f: &dyn Fn(&[f64; 3]) -> [Complex64; 2],
    axis: usize,
    x: &[f64; 3],
    h: f64,
) -> [Complex64; 2] {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for &(k, w) in &FD_WEIGHTS {
        let mut xp = *x;
        let mut xm = *x;
        xp[axis] += k as f64 * h;
        xm[axis] -= k as f64 * h;
        let fp = f(&xp);
        let fm = f(&xm);
        for c in 0..2 {
            out[c] += (fp[c] - fm[c]) * (w / h);
        }
    }
    out
}

/// Numeric application of an operator to a pointwise function: derivatives by
/// the stencil, matrix coefficients and potential evaluated exactly at the
/// probe. Nesting the returned closure realizes compositions.
#[allow(clippy::needless_range_loop)]
pub fn fd_apply<'a>(op: &'a MatrixDifferentialOperator, f: PointFn<'a>, h: f64) -> PointFn<'a> {
    Box::new(move |x: &[f64; 3]| {
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for axis in 0..3 {
            let m = &op.derivative_coefficients[axis];
            if matrix_is_zero(m) {
                continue;
            }
            let df = fd_derivative(f.as_ref(), axis, x, h);
            for r in 0..2 {
                for c in 0..2 {
                    out[r] += m[r][c].eval(x) * df[c];
                }
            }
        }
        let fx = f(x);
        for r in 0..2 {
            for c in 0..2 {
                out[r] += op.potential[r][c].eval(x) * fx[c];
            }
        }
        out
    })
}

/// Wraps an exact spinor as a pointwise function.
pub fn spinor_point_fn(f: &Spinor2) -> PointFn<'_> {
    Box::new(move |x: &[f64; 3]| spinor_eval(f, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const I: Complex64 = Complex64::new(0.0, 1.0);
    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn test_gaussian() -> SymbolicFunction {
        SymbolicFunction::gaussian(Complex64::new(0.7, -0.3), 0.9, [0.4, -0.6, 1.1])
    }

    #[test]
    fn canonicalize_merges_identical_terms() {
        let x = SymbolicFunction::coordinate_radial(ONE, 0, 0.0);
        let two_x = x.add(&x);
        assert_eq!(two_x.terms().len(), 1);
        assert_eq!(two_x.terms()[0].coeff, Complex64::new(2.0, 0.0));
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // x^2 y r^(-1/2) plus an off-center Gaussian exercises every rule.
        let f = SymbolicFunction::from_terms(vec![Term {
            coeff: Complex64::new(1.3, 0.2),
            powers: [2, 1, 0],
            radial_power: -0.5,
            gaussian: None,
        }])
        .add(&test_gaussian());
        let x = [0.8, -0.5, 1.2];
        for axis in 0..3 {
            let exact = f.derivative(axis).eval(&x);
            let spinor = [f.clone(), SymbolicFunction::zero()];
            let numeric =
                fd_derivative(&|p: &[f64; 3]| spinor_eval(&spinor, p), axis, &x, FD_STEP)[0];
            assert_relative_eq!(exact.re, numeric.re, max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(exact.im, numeric.im, max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn second_derivative_of_gaussian_stays_exact() {
        let g = test_gaussian();
        let lap: SymbolicFunction = (0..3)
            .map(|a| g.derivative(a).derivative(a))
            .fold(SymbolicFunction::zero(), |acc, d| acc.add(&d));
        let x = [1.0, 0.3, -0.7];
        // Laplacian of exp(-l |x-mu|^2) = (4 l^2 |x-mu|^2 - 6 l) * g.
        let mu: [f64; 3] = [0.4, -0.6, 1.1];
        let d2: f64 = (0..3).map(|i| (x[i] - mu[i]).powi(2)).sum();
        let want = (4.0 * 0.9 * 0.9 * d2 - 6.0 * 0.9) * g.eval(&x);
        let got = lap.eval(&x);
        assert_relative_eq!(got.re, want.re, max_relative = 1e-13);
        assert_relative_eq!(got.im, want.im, max_relative = 1e-13);
    }

    #[test]
    fn products_stay_pointwise_correct_and_closure_is_enforced() {
        let pot = SymbolicFunction::coordinate_radial(Complex64::new(0.0, -2.0), 1, -1.5);
        let g = test_gaussian();
        let prod = pot.mul(&g).unwrap();
        let x = [0.9, 1.4, -0.3];
        let want = pot.eval(&x) * g.eval(&x);
        let got = prod.eval(&x);
        assert_relative_eq!(got.re, want.re, max_relative = 1e-14);
        assert_relative_eq!(got.im, want.im, max_relative = 1e-14);
        assert!(matches!(g.mul(&g), Err(CoreError::FamilyClosure { .. })));
    }

    #[test]
    fn matrix_operator_application_routes_components() {
        // V = sigma1: swaps components exactly.
        let sigma1 = constant_matrix([
            [Complex64::new(0.0, 0.0), ONE],
            [ONE, Complex64::new(0.0, 0.0)],
        ]);
        let op = MatrixDifferentialOperator::from_potential(sigma1);
        let f: Spinor2 = [
            test_gaussian(),
            SymbolicFunction::constant(Complex64::new(2.0, 0.0)),
        ];
        let out = op.apply(&f).unwrap();
        assert_eq!(out[0], f[1]);
        assert_eq!(out[1], f[0]);
    }

    #[test]
    fn operator_commutator_agrees_with_action_wise_commutator() {
        // A = i sigma1 d_x + sigma3 * y r^(-1), B = sigma2 * x r^(1/2).
        let sigma1 = [
            [Complex64::new(0.0, 0.0), ONE],
            [ONE, Complex64::new(0.0, 0.0)],
        ];
        let sigma2 = [
            [Complex64::new(0.0, 0.0), -I],
            [I, Complex64::new(0.0, 0.0)],
        ];
        let mut a = MatrixDifferentialOperator::default();
        a.derivative_coefficients[0] = constant_matrix([
            [sigma1[0][0] * I, sigma1[0][1] * I],
            [sigma1[1][0] * I, sigma1[1][1] * I],
        ]);
        a.potential[0][0] = SymbolicFunction::coordinate_radial(ONE, 1, -1.0);
        a.potential[1][1] = SymbolicFunction::coordinate_radial(-ONE, 1, -1.0);
        let mut b_pot = zero_matrix();
        for r in 0..2 {
            for c in 0..2 {
                b_pot[r][c] = SymbolicFunction::coordinate_radial(sigma2[r][c], 0, 0.5);
            }
        }
        let b = MatrixDifferentialOperator::from_potential(b_pot);

        let f: Spinor2 = [
            test_gaussian(),
            test_gaussian().scale(Complex64::new(0.2, 0.5)),
        ];
        let action = MatrixDifferentialOperator::commutator_action(&a, &b, &f).unwrap();
        let op = MatrixDifferentialOperator::commutator_operator(&a, &b).unwrap();
        let via_op = op.apply(&f).unwrap();
        for x in [[0.7, -0.4, 1.1], [1.5, 0.2, -0.8]] {
            let u = spinor_eval(&action, &x);
            let v = spinor_eval(&via_op, &x);
            for c in 0..2 {
                assert_relative_eq!(u[c].re, v[c].re, max_relative = 1e-12, epsilon = 1e-13);
                assert_relative_eq!(u[c].im, v[c].im, max_relative = 1e-12, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn surviving_second_order_terms_are_rejected() {
        // [sigma1 d_x, sigma2 d_x] has 2nd-order coefficient [s1, s2] != 0.
        let sigma1 = constant_matrix([
            [Complex64::new(0.0, 0.0), ONE],
            [ONE, Complex64::new(0.0, 0.0)],
        ]);
        let sigma2 = constant_matrix([
            [Complex64::new(0.0, 0.0), -I],
            [I, Complex64::new(0.0, 0.0)],
        ]);
        let mut a = MatrixDifferentialOperator::default();
        a.derivative_coefficients[0] = sigma1;
        let mut b = MatrixDifferentialOperator::default();
        b.derivative_coefficients[0] = sigma2;
        assert!(matches!(
            MatrixDifferentialOperator::commutator_operator(&a, &b),
            Err(CoreError::FamilyClosure { .. })
        ));
    }

    #[test]
    fn fd_applier_matches_exact_application() {
        let mut op = MatrixDifferentialOperator::default();
        let sigma1 =
            constant_matrix([[Complex64::new(0.0, 0.0), I], [I, Complex64::new(0.0, 0.0)]]);
        op.derivative_coefficients[2] = sigma1;
        op.potential[0][0] = SymbolicFunction::radial(Complex64::new(0.5, -0.1), -0.5);
        op.potential[1][1] = SymbolicFunction::coordinate_radial(ONE, 2, -1.0);
        let f: Spinor2 = [test_gaussian(), test_gaussian().scale(I)];
        let exact = op.apply(&f).unwrap();
        let numeric = fd_apply(&op, spinor_point_fn(&f), FD_STEP);
        let x = [0.6, -0.9, 0.8];
        let e = spinor_eval(&exact, &x);
        let n = numeric(&x);
        for c in 0..2 {
            assert_relative_eq!(e[c].re, n[c].re, max_relative = 1e-10, epsilon = 1e-12);
            assert_relative_eq!(e[c].im, n[c].im, max_relative = 1e-10, epsilon = 1e-12);
        }
    }
}
