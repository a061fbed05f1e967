//! The deformed oscillator algebra as a structure-constant engine.
//!
//! Eleven dimensionless generators — `q1..q3, p1..p3, J1..J3, H, C` — close
//! under
//!
//! ```text
//! [q~i, p~j] = i d_ij (C + chi H~)      [H~, q~j] = -i p~j
//! [q~i, q~j] = -i chi e_ijk J~k         [H~, p~j] = +i q~j
//! [p~i, p~j] = -i chi e_ijk J~k         [J~i, J~j] = i e_ijk J~k
//! [J~i, q~j] = i e_ijk q~k              [J~i, p~j] = i e_ijk p~k
//! [H~, J~k] = 0                         C central
//! ```
//!
//! with all brackets written `[X_a, X_b] = i sum_c f[a][b][c] X_c` for real
//! `f`. The module verifies the Jacobi identity exactly, classifies the
//! algebra by the signature of the Killing form `K[a][b] = Tr(ad_a ad_b)`,
//! and re-derives the two deformation coefficients of the dimensionful table
//! by solving the triad Jacobi constraints in exact rational-monomial
//! arithmetic: `zeta = -chi/(m0 omega)` (the companion derivation prints
//! `-chi/omega`, dropping the mass factor) and `xi = -chi m0 omega`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::report::VerificationReport;

/// Number of generators, central element included.
pub const LIE_DIM: usize = 11;

/// Basis order: positions q = 0..3, p = 3..6, J = 6..9, then H, C.
pub const GENERATOR_NAMES: [&str; LIE_DIM] = [
    "q1", "q2", "q3", "p1", "p2", "p3", "J1", "J2", "J3", "H", "C",
];

pub const IDX_Q: [usize; 3] = [0, 1, 2];
pub const IDX_P: [usize; 3] = [3, 4, 5];
pub const IDX_J: [usize; 3] = [6, 7, 8];
pub const IDX_H: usize = 9;
pub const IDX_C: usize = 10;

fn epsilon(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Real structure constants `f[a][b][c]` of `[X_a, X_b] = i sum_c f X_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor {
    pub chi: f64,
    f: Vec<f64>,
}

impl StructureTensor {
    fn flat(a: usize, b: usize, c: usize) -> usize {
        (a * LIE_DIM + b) * LIE_DIM + c
    }

    /// `f[a][b][c]`; out-of-range indices are rejected.
    pub fn coefficient(&self, a: usize, b: usize, c: usize) -> Result<f64, CoreError> {
        for idx in [a, b, c] {
            if idx >= LIE_DIM {
                return Err(CoreError::GeneratorOutOfRange {
                    index: idx,
                    dim: LIE_DIM,
                });
            }
        }
        Ok(self.f[Self::flat(a, b, c)])
    }

    fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.f[Self::flat(a, b, c)]
    }

    /// Sets `f[a][b][c] = v` and the antisymmetric mirror `f[b][a][c] = -v`.
    fn set_bracket(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.f[Self::flat(a, b, c)] = v;
        self.f[Self::flat(b, a, c)] = -v;
    }

    /// Validates a raw coefficient table: antisymmetry in the first two
    /// slots, central last row.
    pub fn from_coefficients(chi: f64, f: Vec<f64>) -> Result<Self, CoreError> {
        if f.len() != LIE_DIM * LIE_DIM * LIE_DIM {
            return Err(CoreError::Invalid(format!(
                "structure tensor needs {} entries, got {}",
                LIE_DIM * LIE_DIM * LIE_DIM,
                f.len()
            )));
        }
        let t = StructureTensor { chi, f };
        for a in 0..LIE_DIM {
            for b in 0..LIE_DIM {
                for c in 0..LIE_DIM {
                    if t.get(a, b, c) != -t.get(b, a, c) {
                        return Err(CoreError::NotAntisymmetric { a, b });
                    }
                }
            }
        }
        for b in 0..LIE_DIM {
            for c in 0..LIE_DIM {
                if t.get(IDX_C, b, c) != 0.0 {
                    return Err(CoreError::Invalid(
                        "central generator has nonzero bracket".into(),
                    ));
                }
            }
        }
        Ok(t)
    }

    /// Copy with `f[a][b][c] += delta` (antisymmetric mirror maintained).
    pub fn with_perturbation(&self, a: usize, b: usize, c: usize, delta: f64) -> Self {
        let mut t = self.clone();
        let v = t.get(a, b, c) + delta;
        t.set_bracket(a, b, c, v);
        t
    }
}

/// Populates the dimensionless bracket table for deformation strength `chi`.
pub fn structure_tensor(chi: f64) -> StructureTensor {
    let mut t = StructureTensor {
        chi,
        f: vec![0.0; LIE_DIM * LIE_DIM * LIE_DIM],
    };
    for i in 0..3 {
        // [q~i, p~i] = i (C + chi H~)
        t.set_bracket(IDX_Q[i], IDX_P[i], IDX_C, 1.0);
        t.set_bracket(IDX_Q[i], IDX_P[i], IDX_H, chi);
        // [H~, q~j] = -i p~j ; [H~, p~j] = i q~j
        t.set_bracket(IDX_H, IDX_Q[i], IDX_P[i], -1.0);
        t.set_bracket(IDX_H, IDX_P[i], IDX_Q[i], 1.0);
    }
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let e = epsilon(i, j, k);
                if e == 0.0 {
                    continue;
                }
                if i < j {
                    // [q~i, q~j] = -i chi e_ijk J~k, same for p.
                    t.set_bracket(IDX_Q[i], IDX_Q[j], IDX_J[k], -chi * e);
                    t.set_bracket(IDX_P[i], IDX_P[j], IDX_J[k], -chi * e);
                    t.set_bracket(IDX_J[i], IDX_J[j], IDX_J[k], e);
                }
                // [J~i, q~j] = i e_ijk q~k ; [J~i, p~j] = i e_ijk p~k
                t.set_bracket(IDX_J[i], IDX_Q[j], IDX_Q[k], e);
                t.set_bracket(IDX_J[i], IDX_P[j], IDX_P[k], e);
            }
        }
    }
    t
}

/// Max-norm of the cyclic Jacobi contraction
/// `sum_e (f[a][b][e] f[e][c][d] + f[b][c][e] f[e][a][d] + f[c][a][e] f[e][b][d])`
/// over all index quadruples. Zero iff the table is a Lie algebra; the
/// oscillator table cancels term-by-term, so the result is exactly `0.0`.
pub fn jacobi_residual(t: &StructureTensor) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..LIE_DIM {
        for b in 0..LIE_DIM {
            for c in 0..LIE_DIM {
                for d in 0..LIE_DIM {
                    let mut s = 0.0;
                    for e in 0..LIE_DIM {
                        s += t.get(a, b, e) * t.get(e, c, d)
                            + t.get(b, c, e) * t.get(e, a, d)
                            + t.get(c, a, e) * t.get(e, b, d);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Three-way classification by Killing signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraClass {
    #[serde(rename = "so(5)")]
    So5,
    #[serde(rename = "so(3,2)")]
    So32,
    #[serde(rename = "Newton-Hooke")]
    NewtonHooke,
}

impl fmt::Display for AlgebraClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraClass::So5 => "so(5)",
            AlgebraClass::So32 => "so(3,2)",
            AlgebraClass::NewtonHooke => "Newton-Hooke",
        })
    }
}

/// Killing form, its spectrum, and the resulting classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillingReport {
    pub chi: f64,
    /// Row-major 11x11 `K[a][b] = Tr(ad_a ad_b)`; symmetric exactly.
    pub killing_matrix: Vec<Vec<f64>>,
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    pub n_positive: usize,
    pub n_negative: usize,
    pub n_null: usize,
    pub classification: AlgebraClass,
}

/// Relative threshold below which a Killing eigenvalue counts as null.
const NULL_EIGENVALUE_RTOL: f64 = 1e-9;

/// Killing matrix `K[a][b] = sum_{d,e} f[a][d][e] f[b][e][d]`.
#[allow(clippy::needless_range_loop)]
fn killing_matrix(t: &StructureTensor) -> Vec<Vec<f64>> {
    let mut k = vec![vec![0.0; LIE_DIM]; LIE_DIM];
    for a in 0..LIE_DIM {
        for b in a..LIE_DIM {
            let mut s = 0.0;
            for d in 0..LIE_DIM {
                for e in 0..LIE_DIM {
                    s += t.get(a, d, e) * t.get(b, e, d);
                }
            }
            k[a][b] = s;
            k[b][a] = s;
        }
    }
    k
}

/// Classifies the algebra by Killing signature. Requires a vanishing Jacobi
/// residual — the Killing form of a non-algebra means nothing.
pub fn killing_form(t: &StructureTensor) -> Result<KillingReport, CoreError> {
    let residual = jacobi_residual(t);
    if residual != 0.0 {
        return Err(CoreError::Invalid(format!(
            "Jacobi residual {residual:.3e} is nonzero; Killing classification undefined"
        )));
    }
    let k = killing_matrix(t);
    let m = DMatrix::from_fn(LIE_DIM, LIE_DIM, |r, c| k[r][c]);
    let mut eigenvalues: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let scale = eigenvalues.iter().fold(1.0f64, |acc, &v| acc.max(v.abs()));
    let cut = NULL_EIGENVALUE_RTOL * scale;
    let n_null = eigenvalues.iter().filter(|v| v.abs() <= cut).count();
    let n_positive = eigenvalues.iter().filter(|v| **v > cut).count();
    let n_negative = eigenvalues.iter().filter(|v| **v < -cut).count();
    let classification = if n_null > 1 {
        AlgebraClass::NewtonHooke
    } else if n_positive == 0 {
        AlgebraClass::So5
    } else {
        AlgebraClass::So32
    };
    Ok(KillingReport {
        chi: t.chi,
        killing_matrix: k,
        eigenvalues,
        n_positive,
        n_negative,
        n_null,
        classification,
    })
}

/// Asserts the rotation generators commute with the Hamiltonian:
/// `f[H][J_k][.] = 0` for all k.
pub fn conserved_rotations_check(t: &StructureTensor) -> VerificationReport {
    let mut worst = 0.0f64;
    for &j in &IDX_J {
        for c in 0..LIE_DIM {
            worst = worst.max(t.get(IDX_H, j, c).abs());
        }
    }
    VerificationReport::new("lie.conserved_rotations", "d40", worst, 0.0)
}

/// Worst violation of `K([x_a, x_b], x_c) + K(x_b, [x_a, x_c]) = 0`, i.e.
/// `|sum_e f[a][b][e] K[e][c] + f[a][c][e] K[b][e]|` over basis triples.
#[allow(clippy::needless_range_loop)]
pub fn ad_invariance_defect(t: &StructureTensor) -> f64 {
    let k = killing_matrix(t);
    let mut worst = 0.0f64;
    for a in 0..LIE_DIM {
        for b in 0..LIE_DIM {
            for c in 0..LIE_DIM {
                let mut s = 0.0;
                for e in 0..LIE_DIM {
                    s += t.get(a, b, e) * k[e][c] + t.get(a, c, e) * k[b][e];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

/// Dimension of the centralizer of the listed generators: the solution space
/// of `[X_g, sum_a x_a X_a] = 0` for every g, found as the nullity of the
/// stacked adjoint maps.
pub fn centralizer_dimension(
    t: &StructureTensor,
    generators: &[usize],
) -> Result<usize, CoreError> {
    for &g in generators {
        if g >= LIE_DIM {
            return Err(CoreError::GeneratorOutOfRange {
                index: g,
                dim: LIE_DIM,
            });
        }
    }
    let rows = generators.len() * LIE_DIM;
    let m = DMatrix::from_fn(rows, LIE_DIM, |r, a| {
        let g = generators[r / LIE_DIM];
        let c = r % LIE_DIM;
        t.get(g, a, c)
    });
    Ok(LIE_DIM - m.svd(false, false).rank(1e-10))
}

// ---------------------------------------------------------------------------
// Exact symbolic re-derivation of the dimensionful deformation coefficients.
// ---------------------------------------------------------------------------

/// Symbol order inside [`Mono`]: chi, m0, omega, hbar, zeta, xi.
const SYM_CHI: usize = 0;
const SYM_M0: usize = 1;
const SYM_OMEGA: usize = 2;
const SYM_HBAR: usize = 3;
const SYM_ZETA: usize = 4;
const SYM_XI: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Mono([i16; 6]);

impl Mono {
    fn symbol(s: usize) -> Mono {
        let mut e = [0i16; 6];
        e[s] = 1;
        Mono(e)
    }

    fn mul(self, other: Mono) -> Mono {
        let mut e = [0i16; 6];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = self.0[i] + other.0[i];
        }
        Mono(e)
    }

    fn pow(self, k: i16) -> Mono {
        let mut e = [0i16; 6];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = self.0[i] * k;
        }
        Mono(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ratio {
    num: i64,
    den: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Ratio {
    const ONE: Ratio = Ratio { num: 1, den: 1 };

    fn new(num: i64, den: i64) -> Ratio {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den);
        Ratio {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    fn add(self, o: Ratio) -> Ratio {
        Ratio::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    fn mul(self, o: Ratio) -> Ratio {
        Ratio::new(self.num * o.num, self.den * o.den)
    }

    fn div(self, o: Ratio) -> Ratio {
        assert!(o.num != 0, "division by zero rational");
        Ratio::new(self.num * o.den, self.den * o.num)
    }

    fn neg(self) -> Ratio {
        Ratio {
            num: -self.num,
            den: self.den,
        }
    }

    fn pow(self, k: u32) -> Ratio {
        let mut out = Ratio::ONE;
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    fn is_zero(self) -> bool {
        self.num == 0
    }
}

/// Sparse exact polynomial over the six symbols.
#[derive(Debug, Clone, Default, PartialEq)]
struct Poly {
    terms: BTreeMap<Mono, Ratio>,
}

impl Poly {
    fn zero() -> Poly {
        Poly::default()
    }

    fn term(coeff: Ratio, mono: Mono) -> Poly {
        let mut p = Poly::zero();
        p.push(coeff, mono);
        p
    }

    fn push(&mut self, coeff: Ratio, mono: Mono) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert(Ratio { num: 0, den: 1 });
        *entry = entry.add(coeff);
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    fn add_assign(&mut self, other: &Poly) {
        for (&m, &c) in &other.terms {
            self.push(c, m);
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (&ma, &ca) in &self.terms {
            for (&mb, &cb) in &other.terms {
                out.push(ca.mul(cb), ma.mul(mb));
            }
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Splits a polynomial linear in `sym` into `(u, v)` with
    /// `self = u * sym + v`, where `u` has the symbol stripped.
    fn split_linear(&self, sym: usize) -> (Poly, Poly) {
        let mut u = Poly::zero();
        let mut v = Poly::zero();
        for (&m, &c) in &self.terms {
            match m.0[sym] {
                0 => v.push(c, m),
                1 => {
                    let mut stripped = m;
                    stripped.0[sym] = 0;
                    u.push(c, stripped);
                }
                _ => panic!("polynomial not linear in solved symbol"),
            }
        }
        (u, v)
    }

    /// Substitutes `sym := coeff * mono` exactly.
    fn substitute(&self, sym: usize, coeff: Ratio, mono: Mono) -> Poly {
        let mut out = Poly::zero();
        for (&m, &c) in &self.terms {
            let k = m.0[sym];
            assert!(k >= 0, "negative power of solved symbol");
            let mut base = m;
            base.0[sym] = 0;
            out.push(c.mul(coeff.pow(k as u32)), base.mul(mono.pow(k)));
        }
        out
    }
}

/// A single exact monomial `(num/den) chi^a m0^b omega^c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientMonomial {
    pub numerator: i64,
    pub denominator: i64,
    pub chi_power: i32,
    pub m0_power: i32,
    pub omega_power: i32,
}

impl CoefficientMonomial {
    pub fn evaluate(&self, chi: f64, m0: f64, omega: f64) -> f64 {
        (self.numerator as f64) / (self.denominator as f64)
            * chi.powi(self.chi_power)
            * m0.powi(self.m0_power)
            * omega.powi(self.omega_power)
    }

    /// Renders e.g. `-chi/(m0*omega)` or `-chi*m0*omega`.
    pub fn render(&self) -> String {
        let mut num_factors: Vec<String> = Vec::new();
        let mut den_factors: Vec<String> = Vec::new();
        let n = self.numerator.unsigned_abs();
        if n != 1 {
            num_factors.push(n.to_string());
        }
        if self.denominator != 1 {
            den_factors.push(self.denominator.to_string());
        }
        for (name, power) in [
            ("chi", self.chi_power),
            ("m0", self.m0_power),
            ("omega", self.omega_power),
        ] {
            let target = if power > 0 {
                &mut num_factors
            } else {
                &mut den_factors
            };
            match power.abs() {
                0 => {}
                1 => target.push(name.to_string()),
                k => target.push(format!("{name}^{k}")),
            }
        }
        let mut out = String::new();
        if self.numerator < 0 {
            out.push('-');
        }
        if num_factors.is_empty() {
            out.push('1');
        } else {
            out.push_str(&num_factors.join("*"));
        }
        match den_factors.len() {
            0 => {}
            1 => {
                out.push('/');
                out.push_str(&den_factors[0]);
            }
            _ => {
                out.push_str("/(");
                out.push_str(&den_factors.join("*"));
                out.push(')');
            }
        }
        out
    }
}

impl fmt::Display for CoefficientMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Output of the symbolic Jacobi solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedCoefficients {
    /// Coefficient of `[q^i, q^j] = i zeta e_ijk J_k`.
    pub zeta: CoefficientMonomial,
    /// Coefficient of `[p^i, p^j] = i xi e_ijk J_k`.
    pub xi: CoefficientMonomial,
    /// The pair in dimensionless normalization; both reduce to `-chi`.
    pub zeta_dimensionless: CoefficientMonomial,
    pub xi_dimensionless: CoefficientMonomial,
    pub notes: Vec<String>,
}

/// Builds the dimensionful bracket table `[X_a, X_b] = i sum_c g[a][b][c] X_c`
/// with symbolic entries and unknown `zeta`, `xi`.
fn dimensionful_table() -> Vec<Poly> {
    let mut g = vec![Poly::zero(); LIE_DIM * LIE_DIM * LIE_DIM];
    let set = |table: &mut Vec<Poly>, a: usize, b: usize, c: usize, p: Poly| {
        let mut neg = Poly::zero();
        for (&m, &q) in &p.terms {
            neg.push(q.neg(), m);
        }
        table[StructureTensor::flat(a, b, c)] = p;
        table[StructureTensor::flat(b, a, c)] = neg;
    };
    let hbar = Mono::symbol(SYM_HBAR);
    let chi = Mono::symbol(SYM_CHI);
    let m0 = Mono::symbol(SYM_M0);
    let omega = Mono::symbol(SYM_OMEGA);
    let inv = |m: Mono| m.pow(-1);
    for i in 0..3 {
        // [q^i, p^i] = i (hbar C + (chi/omega) H)
        set(
            &mut g,
            IDX_Q[i],
            IDX_P[i],
            IDX_C,
            Poly::term(Ratio::ONE, hbar),
        );
        set(
            &mut g,
            IDX_Q[i],
            IDX_P[i],
            IDX_H,
            Poly::term(Ratio::ONE, chi.mul(inv(omega))),
        );
        // [H, q^j] = -i (hbar/m0) p^j ; [H, p^j] = i hbar m0 omega^2 q^j
        set(
            &mut g,
            IDX_H,
            IDX_Q[i],
            IDX_P[i],
            Poly::term(Ratio::ONE.neg(), hbar.mul(inv(m0))),
        );
        set(
            &mut g,
            IDX_H,
            IDX_P[i],
            IDX_Q[i],
            Poly::term(Ratio::ONE, hbar.mul(m0).mul(omega.pow(2))),
        );
    }
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let e = epsilon(i, j, k);
                if e == 0.0 {
                    continue;
                }
                let r = Ratio::new(e as i64, 1);
                if i < j {
                    // Unknown-coefficient rows: [q,q] = i zeta e J, [p,p] = i xi e J.
                    set(
                        &mut g,
                        IDX_Q[i],
                        IDX_Q[j],
                        IDX_J[k],
                        Poly::term(r, Mono::symbol(SYM_ZETA)),
                    );
                    set(
                        &mut g,
                        IDX_P[i],
                        IDX_P[j],
                        IDX_J[k],
                        Poly::term(r, Mono::symbol(SYM_XI)),
                    );
                    set(&mut g, IDX_J[i], IDX_J[j], IDX_J[k], Poly::term(r, hbar));
                }
                set(&mut g, IDX_J[i], IDX_Q[j], IDX_Q[k], Poly::term(r, hbar));
                set(&mut g, IDX_J[i], IDX_P[j], IDX_P[k], Poly::term(r, hbar));
            }
        }
    }
    g
}

/// Symbolic Jacobi contraction for the triad `(a, b, c)`: one polynomial per
/// target generator.
fn symbolic_jacobi(g: &[Poly], a: usize, b: usize, c: usize) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); LIE_DIM];
    for (d, slot) in out.iter_mut().enumerate() {
        for e in 0..LIE_DIM {
            slot.add_assign(
                &g[StructureTensor::flat(a, b, e)].mul(&g[StructureTensor::flat(e, c, d)]),
            );
            slot.add_assign(
                &g[StructureTensor::flat(b, c, e)].mul(&g[StructureTensor::flat(e, a, d)]),
            );
            slot.add_assign(
                &g[StructureTensor::flat(c, a, e)].mul(&g[StructureTensor::flat(e, b, d)]),
            );
        }
    }
    out
}

/// Extracts the unique solution of a single-term linear constraint
/// `u * sym + v = 0`.
fn solve_linear(constraint: &Poly, sym: usize) -> Result<(Ratio, Mono), CoreError> {
    let (u, v) = constraint.split_linear(sym);
    if u.terms.len() != 1 || v.terms.len() != 1 {
        return Err(CoreError::Invalid(
            "deformation constraint is not a single-monomial linear equation".into(),
        ));
    }
    let (&mu, &cu) = u.terms.iter().next().unwrap();
    let (&mv, &cv) = v.terms.iter().next().unwrap();
    // sym = -v/u: exact monomial division.
    let mono = mv.mul(mu.pow(-1));
    Ok((cv.div(cu).neg(), mono))
}

fn monomial_output(coeff: Ratio, mono: Mono) -> Result<CoefficientMonomial, CoreError> {
    if mono.0[SYM_HBAR] != 0 || mono.0[SYM_ZETA] != 0 || mono.0[SYM_XI] != 0 {
        return Err(CoreError::Invalid(format!(
            "deformation coefficient carries unexpected symbols: {mono:?}"
        )));
    }
    Ok(CoefficientMonomial {
        numerator: coeff.num,
        denominator: coeff.den,
        chi_power: mono.0[SYM_CHI] as i32,
        m0_power: mono.0[SYM_M0] as i32,
        omega_power: mono.0[SYM_OMEGA] as i32,
    })
}

/// Re-derives the deformation coefficients of the dimensionful algebra by
/// imposing the Jacobi identity on the `(q^l, q^m, p^i)` and
/// `(p^l, p^m, q^i)` triads, solving the linear constraints exactly, and
/// checking the solved table against every remaining triad symbolically.
#[allow(clippy::needless_range_loop)]
pub fn derive_structure_coefficients() -> Result<DerivedCoefficients, CoreError> {
    let g = dimensionful_table();

    // Triad (q1, q2, p1): the coefficient of p2 reads -hbar zeta - hbar chi/(m0 omega).
    let q_triad = symbolic_jacobi(&g, IDX_Q[0], IDX_Q[1], IDX_P[0]);
    let (zeta_c, zeta_m) = solve_linear(&q_triad[IDX_P[1]], SYM_ZETA)?;
    // Triad (p1, p2, q1): the coefficient of q2 reads -hbar xi - hbar chi m0 omega.
    let p_triad = symbolic_jacobi(&g, IDX_P[0], IDX_P[1], IDX_Q[0]);
    let (xi_c, xi_m) = solve_linear(&p_triad[IDX_Q[1]], SYM_XI)?;

    // Substitute both solutions and demand every Jacobi polynomial vanish.
    let solved: Vec<Poly> = g
        .iter()
        .map(|p| {
            p.substitute(SYM_ZETA, zeta_c, zeta_m)
                .substitute(SYM_XI, xi_c, xi_m)
        })
        .collect();
    for a in 0..LIE_DIM {
        for b in 0..LIE_DIM {
            for c in 0..LIE_DIM {
                for (d, poly) in symbolic_jacobi(&solved, a, b, c).iter().enumerate() {
                    if !poly.is_zero() {
                        return Err(CoreError::Invalid(format!(
                            "solved table violates Jacobi on ({}, {}, {}) -> {}",
                            GENERATOR_NAMES[a],
                            GENERATOR_NAMES[b],
                            GENERATOR_NAMES[c],
                            GENERATOR_NAMES[d]
                        )));
                    }
                }
            }
        }
    }

    let zeta = monomial_output(zeta_c, zeta_m)?;
    let xi = monomial_output(xi_c, xi_m)?;
    // Dimensionless normalization: q-pair coefficients rescale by m0 omega,
    // p-pair by 1/(m0 omega); both land on -chi.
    let m0_omega = Mono::symbol(SYM_M0).mul(Mono::symbol(SYM_OMEGA));
    let zeta_dimensionless = monomial_output(zeta_c, zeta_m.mul(m0_omega))?;
    let xi_dimensionless = monomial_output(xi_c, xi_m.mul(m0_omega.pow(-1)))?;
    Ok(DerivedCoefficients {
        zeta,
        xi,
        zeta_dimensionless,
        xi_dimensionless,
        notes: vec![
            format!(
                "zeta = {} from the (q,q,p) Jacobi triads; the companion derivation prints \
                 -chi/omega, dropping the mass factor",
                zeta.render()
            ),
            format!(
                "xi = {} from the (p,p,q) Jacobi triads, matching the printed result",
                xi.render()
            ),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn antisymmetry_and_center_are_exact() {
        let t = structure_tensor(0.7);
        for a in 0..LIE_DIM {
            for b in 0..LIE_DIM {
                for c in 0..LIE_DIM {
                    assert_eq!(t.get(a, b, c), -t.get(b, a, c));
                    assert_eq!(t.get(IDX_C, b, c), 0.0);
                }
            }
        }
        // Spot values: [q1, p1] components and a chi-scaled rotation entry.
        assert_eq!(t.get(IDX_Q[0], IDX_P[0], IDX_C), 1.0);
        assert_eq!(t.get(IDX_Q[0], IDX_P[0], IDX_H), 0.7);
        assert_eq!(t.get(IDX_Q[0], IDX_Q[1], IDX_J[2]), -0.7);
        let m = structure_tensor(-1.0);
        assert_eq!(m.get(IDX_Q[0], IDX_Q[1], IDX_J[2]), 1.0);
    }

    #[test]
    fn jacobi_residual_is_exactly_zero_across_the_sweep() {
        for chi in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
            assert_eq!(jacobi_residual(&structure_tensor(chi)), 0.0, "chi = {chi}");
        }
    }

    #[test]
    fn perturbed_table_fails_jacobi_and_killing_rejects_it() {
        let t = structure_tensor(1.0).with_perturbation(IDX_P[0], IDX_P[1], IDX_J[2], 0.1);
        assert!(jacobi_residual(&t) > 0.0);
        assert!(matches!(killing_form(&t), Err(CoreError::Invalid(_))));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn killing_matrix_is_the_frozen_diagonal() {
        for chi in [1.0, -1.0, 0.0, 2.5] {
            let k = killing_matrix(&structure_tensor(chi));
            for a in 0..LIE_DIM {
                for b in 0..LIE_DIM {
                    let want = if a != b {
                        0.0
                    } else if a < 6 {
                        6.0 * chi
                    } else if a < 10 {
                        -6.0
                    } else {
                        0.0
                    };
                    assert_eq!(k[a][b], want, "chi={chi} K[{a}][{b}]");
                }
            }
        }
    }

    #[test]
    fn classification_sweep_matches_the_three_regimes() {
        for chi in [-2.0, -1.0, -0.5] {
            let r = killing_form(&structure_tensor(chi)).unwrap();
            assert_eq!(r.classification, AlgebraClass::So5, "chi = {chi}");
            assert_eq!((r.n_positive, r.n_negative, r.n_null), (0, 10, 1));
        }
        for chi in [0.5, 1.0, 2.0] {
            let r = killing_form(&structure_tensor(chi)).unwrap();
            assert_eq!(r.classification, AlgebraClass::So32, "chi = {chi}");
            assert_eq!((r.n_positive, r.n_negative, r.n_null), (6, 4, 1));
        }
        let r = killing_form(&structure_tensor(0.0)).unwrap();
        assert_eq!(r.classification, AlgebraClass::NewtonHooke);
        assert_eq!(r.n_null, 7);
        assert_eq!(r.n_positive + r.n_negative + r.n_null, LIE_DIM);
    }

    #[test]
    fn classification_is_invariant_under_positive_rescaling() {
        for chi in [-1.0, -0.25, 0.25, 1.0] {
            let a = killing_form(&structure_tensor(chi)).unwrap().classification;
            let b = killing_form(&structure_tensor(4.0 * chi))
                .unwrap()
                .classification;
            assert_eq!(a, b, "chi = {chi}");
        }
    }

    #[test]
    fn killing_form_is_ad_invariant() {
        for chi in [1.0, -1.0, 0.7] {
            assert!(ad_invariance_defect(&structure_tensor(chi)) <= 1e-12);
        }
    }

    #[test]
    fn rotations_commute_with_the_hamiltonian() {
        for chi in [1.0, -1.0, 0.0] {
            let r = conserved_rotations_check(&structure_tensor(chi));
            assert_eq!(r.residual, 0.0);
            assert!(r.passed);
        }
    }

    #[test]
    fn centralizer_of_h_and_j3_is_three_dimensional() {
        for chi in [1.0, -0.5, 0.0] {
            let t = structure_tensor(chi);
            assert_eq!(
                centralizer_dimension(&t, &[IDX_H, IDX_J[2]]).unwrap(),
                3,
                "chi = {chi}"
            );
        }
    }

    #[test]
    fn derived_coefficients_solve_the_jacobi_system() {
        let d = derive_structure_coefficients().unwrap();
        assert_eq!(
            d.zeta,
            CoefficientMonomial {
                numerator: -1,
                denominator: 1,
                chi_power: 1,
                m0_power: -1,
                omega_power: -1
            }
        );
        assert_eq!(
            d.xi,
            CoefficientMonomial {
                numerator: -1,
                denominator: 1,
                chi_power: 1,
                m0_power: 1,
                omega_power: 1
            }
        );
        assert_eq!(d.zeta.render(), "-chi/(m0*omega)");
        assert_eq!(d.xi.render(), "-chi*m0*omega");
        assert_eq!(d.zeta_dimensionless.render(), "-chi");
        assert_eq!(d.xi_dimensionless.render(), "-chi");
        // Numeric spot checks.
        assert_eq!(d.zeta.evaluate(2.0, 3.0, 5.0), -2.0 / 15.0);
        assert_eq!(d.xi.evaluate(2.0, 3.0, 5.0), -30.0);
        assert_eq!(d.zeta_dimensionless.evaluate(0.25, 7.0, 9.0), -0.25);
        assert!(d.notes.iter().any(|n| n.contains("-chi/omega")));
    }

    #[test]
    fn raw_table_validation_detects_broken_antisymmetry() {
        let t = structure_tensor(1.0);
        let mut raw = t.f.clone();
        raw[StructureTensor::flat(0, 3, 10)] += 0.5;
        assert!(matches!(
            StructureTensor::from_coefficients(1.0, raw),
            Err(CoreError::NotAntisymmetric { a: 0, b: 3 })
        ));
        assert!(StructureTensor::from_coefficients(1.0, t.f.clone()).is_ok());
    }

    proptest! {
        #[test]
        fn random_chi_is_a_lie_algebra_with_sign_locked_class(chi in -3.0f64..3.0) {
            let t = structure_tensor(chi);
            prop_assert_eq!(jacobi_residual(&t), 0.0);
            // Stay clear of the null-eigenvalue cut when asserting the class.
            prop_assume!(chi.abs() > 1e-6);
            let class = killing_form(&t).unwrap().classification;
            if chi < 0.0 {
                prop_assert_eq!(class, AlgebraClass::So5);
            } else {
                prop_assert_eq!(class, AlgebraClass::So32);
            }
        }
    }
}
