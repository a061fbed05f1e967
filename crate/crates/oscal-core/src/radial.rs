//! Finite-difference radial eigensolver for the Coulomb-plus-linear problem,
//! the nonrelativistic <-> relativistic energy mapping, analytic oracles, and
//! convergence studies.
//!
//! The reduced equation `-(hbar^2 / 2 m0) u'' + [-alpha/r + k r + hbar^2
//! l(l+1) / (2 m0 r^2)] u = eps u` is discretized with second-order central
//! differences and Dirichlet ends on (0, R). The resulting symmetric
//! tridiagonal eigenproblem is solved by Sturm-sequence bisection (exact
//! eigenvalue counts, no convergence failures), refined once by grid doubling,
//! and Richardson-extrapolated.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::units::UnitSystem;

/// Minimum number of interior grid points.
pub const MIN_GRID_POINTS: usize = 100;
/// Maximum number of levels a single solve may request.
pub const MAX_LEVELS: usize = 20;
/// Default interior points of the coarse grid (the fine grid doubles it).
pub const DEFAULT_GRID_POINTS: usize = 4000;
/// Ground-state probability weight near the boundary that flags a too-small box.
pub const BOX_TAIL_THRESHOLD: f64 = 1e-8;

/// Sign of the relativistic energy root (also reused as the spin-branch
/// selector when the Coulomb strength comes from the gauge mapping).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

/// One radial bound-state problem on a finite box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem {
    /// Coulomb strength (energy * length); attractive when positive.
    pub alpha: f64,
    /// Linear slope (energy / length); must be nonnegative.
    pub k: f64,
    /// Orbital quantum number.
    pub l: u32,
    /// Spin branch that selected `alpha` (+1 or -1); metadata for reporting.
    pub sigma3: i8,
    pub units: UnitSystem,
    /// Box radius.
    pub r_max: f64,
    /// Interior points of the coarse grid.
    pub n: usize,
}

impl RadialProblem {
    /// Problem with an automatically sized grid: the box radius follows the
    /// dominant length scale (100 Coulomb lengths `hbar^2 / (m0 alpha)`, or
    /// 20 linear-confinement lengths `(hbar^2 / (2 m0 k))^(1/3)`).
    pub fn new(alpha: f64, k: f64, l: u32, units: UnitSystem) -> Result<Self, CoreError> {
        Self::validate_potential(alpha, k, &units)?;
        let mut r_max: f64 = 0.0;
        if k > 0.0 {
            let scale = (units.hbar * units.hbar / (2.0 * units.m0 * k)).powf(1.0 / 3.0);
            r_max = r_max.max(20.0 * scale);
        }
        if alpha > 0.0 {
            let scale = units.hbar * units.hbar / (units.m0 * alpha);
            r_max = r_max.max(100.0 * scale);
        }
        Self::with_grid(alpha, k, l, units, r_max, DEFAULT_GRID_POINTS)
    }

    /// Problem with an explicit box and coarse-grid size.
    pub fn with_grid(
        alpha: f64,
        k: f64,
        l: u32,
        units: UnitSystem,
        r_max: f64,
        n: usize,
    ) -> Result<Self, CoreError> {
        Self::validate_potential(alpha, k, &units)?;
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(CoreError::RadialProblem {
                reason: format!("box radius must be positive and finite, got {r_max}"),
            });
        }
        if n < MIN_GRID_POINTS {
            return Err(CoreError::RadialProblem {
                reason: format!("grid needs at least {MIN_GRID_POINTS} interior points, got {n}"),
            });
        }
        Ok(RadialProblem {
            alpha,
            k,
            l,
            sigma3: 1,
            units,
            r_max,
            n,
        })
    }

    fn validate_potential(alpha: f64, k: f64, units: &UnitSystem) -> Result<(), CoreError> {
        units.validate()?;
        if !alpha.is_finite() || !k.is_finite() {
            return Err(CoreError::RadialProblem {
                reason: "alpha and k must be finite".into(),
            });
        }
        if k < 0.0 {
            return Err(CoreError::RadialProblem {
                reason: format!("linear slope must be nonnegative, got {k}"),
            });
        }
        if k == 0.0 && alpha <= 0.0 {
            return Err(CoreError::RadialProblem {
                reason: format!(
                    "no bound states: k = 0 requires an attractive Coulomb term, got alpha = {alpha}"
                ),
            });
        }
        Ok(())
    }

    /// Record which spin branch produced `alpha` (+1 or -1).
    pub fn with_sigma3(mut self, sigma3: i8) -> Result<Self, CoreError> {
        if sigma3 != 1 && sigma3 != -1 {
            return Err(CoreError::RadialProblem {
                reason: format!("sigma3 branch must be +1 or -1, got {sigma3}"),
            });
        }
        self.sigma3 = sigma3;
        Ok(self)
    }

    /// Effective potential including the centrifugal term.
    pub fn effective_potential(&self, r: f64) -> f64 {
        let u = &self.units;
        let ll = (self.l as f64) * (self.l as f64 + 1.0);
        -self.alpha / r + self.k * r + u.hbar * u.hbar * ll / (2.0 * u.m0 * r * r)
    }
}

/// Grid metadata of one solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub r_max: f64,
    pub n_coarse: usize,
    pub n_fine: usize,
    pub h_coarse: f64,
    pub h_fine: f64,
}

/// Lowest levels of one problem with extrapolation and error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub alpha: f64,
    pub k: f64,
    pub l: u32,
    pub sigma3: i8,
    pub units: UnitSystem,
    pub grid: GridInfo,
    /// Fine-grid eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Richardson extrapolation of the coarse/fine pair, per level.
    pub richardson_estimate: Vec<f64>,
    /// Estimated error of the extrapolated value, per level.
    pub estimated_error: Vec<f64>,
    /// Ground-state probability weight in the last few grid cells.
    pub boundary_weight: f64,
    /// True when the boundary weight exceeds the box-size threshold.
    pub box_size_warning: bool,
}

// ---------------------------------------------------------------------------
// Symmetric tridiagonal eigenvalues by Sturm bisection.
// ---------------------------------------------------------------------------

/// Symmetric tridiagonal matrix with a constant off-diagonal.
struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `lambda` (Sturm count via the
    /// LDL^T pivot signs).
    fn count_below(&self, lambda: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0usize;
        // off^2 / inf = 0 makes the first pivot plain diag[0] - lambda.
        let mut d = f64::INFINITY;
        for &a in &self.diag {
            d = a - lambda - off2 / d;
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    fn eigenvalue(&self, k: usize) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &a in &self.diag {
            lo = lo.min(a);
            hi = hi.max(a);
        }
        let radius = 2.0 * self.off.abs();
        let mut lo = lo - radius;
        let mut hi = hi + radius;
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.count_below(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn lowest_eigenvalues(&self, m: usize) -> Vec<f64> {
        (0..m).map(|k| self.eigenvalue(k)).collect()
    }

    /// One inverse-iteration pass for the eigenvector at `lambda`, starting
    /// from a constant vector (large overlap with the nodeless ground state).
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        // Slight shift keeps the factorization nonsingular at a converged
        // eigenvalue; inverse iteration then aligns in one or two passes.
        let shift = lambda + 1e-11 * (1.0 + lambda.abs());
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..3 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }

    /// Solve (T - shift I) x = b by tridiagonal LU with partial pivoting.
    /// After elimination `dl` holds the second-superdiagonal fill-in.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        fn safe(p: f64) -> f64 {
            if p == 0.0 {
                1e-300
            } else {
                p
            }
        }
        let n = self.diag.len();
        let mut dl = vec![self.off; n.saturating_sub(1)];
        let mut d: Vec<f64> = self.diag.iter().map(|a| a - shift).collect();
        let mut du = vec![self.off; n.saturating_sub(1)];
        let mut rhs: Vec<f64> = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                let fact = dl[i] / safe(d[i]);
                d[i + 1] -= fact * du[i];
                rhs[i + 1] -= fact * rhs[i];
                dl[i] = 0.0;
            } else {
                // Swap rows i and i+1; the old superdiagonal of row i+1
                // becomes fill-in two places right of the new row i.
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 1 < n - 1 {
                    let old_super = du[i + 1];
                    dl[i] = old_super;
                    du[i + 1] = -fact * old_super;
                } else {
                    dl[i] = 0.0;
                }
                du[i] = temp;
                rhs.swap(i, i + 1);
                rhs[i + 1] -= fact * rhs[i];
            }
        }
        let mut x = vec![0.0f64; n];
        x[n - 1] = rhs[n - 1] / safe(d[n - 1]);
        if n >= 2 {
            x[n - 2] = (rhs[n - 2] - du[n - 2] * x[n - 1]) / safe(d[n - 2]);
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (rhs[i] - du[i] * x[i + 1] - dl[i] * x[i + 2]) / safe(d[i]);
        }
        x
    }
}

fn build_tridiagonal(problem: &RadialProblem, n: usize) -> (Tridiagonal, f64) {
    let h = problem.r_max / (n as f64 + 1.0);
    let u = &problem.units;
    let kinetic = u.hbar * u.hbar / (u.m0 * h * h);
    let diag = (0..n)
        .map(|i| {
            let r = (i as f64 + 1.0) * h;
            kinetic + problem.effective_potential(r)
        })
        .collect();
    (
        Tridiagonal {
            diag,
            off: -0.5 * kinetic,
        },
        h,
    )
}

/// Solve for the lowest `n_levels` of `problem` on the coarse grid and its
/// doubling, with Richardson extrapolation of the pair.
pub fn solve_radial(problem: &RadialProblem, n_levels: usize) -> Result<SpectrumResult, CoreError> {
    if n_levels == 0 || n_levels > MAX_LEVELS {
        return Err(CoreError::RadialProblem {
            reason: format!("level count must be in 1..={MAX_LEVELS}, got {n_levels}"),
        });
    }
    let n_coarse = problem.n;
    // 2n+1 interior points halve the spacing exactly.
    let n_fine = 2 * n_coarse + 1;
    let (tri_coarse, h_coarse) = build_tridiagonal(problem, n_coarse);
    let (tri_fine, h_fine) = build_tridiagonal(problem, n_fine);
    let coarse = tri_coarse.lowest_eigenvalues(n_levels);
    let fine = tri_fine.lowest_eigenvalues(n_levels);
    // Second-order scheme: eps = eps_f + (eps_f - eps_c)/3 + O(h^4).
    let richardson: Vec<f64> = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| f + (f - c) / 3.0)
        .collect();
    let estimated_error: Vec<f64> = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (f - c).abs() / 3.0)
        .collect();
    // Ground-state boundary weight on the fine grid.
    let ground = tri_fine.eigenvector(fine[0]);
    let tail = ground.iter().rev().take(5).map(|x| x * x).sum::<f64>();
    Ok(SpectrumResult {
        alpha: problem.alpha,
        k: problem.k,
        l: problem.l,
        sigma3: problem.sigma3,
        units: problem.units,
        grid: GridInfo {
            r_max: problem.r_max,
            n_coarse,
            n_fine,
            h_coarse,
            h_fine,
        },
        eigenvalues: fine,
        richardson_estimate: richardson,
        estimated_error,
        boundary_weight: tail,
        box_size_warning: tail > BOX_TAIL_THRESHOLD,
    })
}

// ---------------------------------------------------------------------------
// Energy mapping.
// ---------------------------------------------------------------------------

/// Relativistic energies per level; levels whose radicand is negative are
/// unmappable and carry no energy value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMap {
    pub a3: f64,
    /// Requested primary branch (both signs are still exposed).
    pub branch: Branch,
    pub epsilon: Vec<f64>,
    pub e_plus: Vec<Option<f64>>,
    pub e_minus: Vec<Option<f64>>,
}

/// Map extrapolated levels to relativistic energies: `E = +-sqrt(m0^2 c^4 +
/// c^2 a3^2 + 2 m0 c^2 eps)`.
pub fn map_energy(spectrum: &SpectrumResult, a3: f64, branch: Branch) -> EnergyMap {
    let u = &spectrum.units;
    let c2 = u.c * u.c;
    let rest = u.m0 * c2;
    let mut e_plus = Vec::with_capacity(spectrum.richardson_estimate.len());
    let mut e_minus = Vec::with_capacity(spectrum.richardson_estimate.len());
    for &eps in &spectrum.richardson_estimate {
        let radicand = rest * rest + c2 * a3 * a3 + 2.0 * rest * eps;
        if radicand >= 0.0 {
            let e = radicand.sqrt();
            e_plus.push(Some(e));
            e_minus.push(Some(-e));
        } else {
            e_plus.push(None);
            e_minus.push(None);
        }
    }
    EnergyMap {
        a3,
        branch,
        epsilon: spectrum.richardson_estimate.clone(),
        e_plus,
        e_minus,
    }
}

// ---------------------------------------------------------------------------
// Analytic oracles.
// ---------------------------------------------------------------------------

/// Which closed-form (or root-bracketed) spectrum to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Coulomb,
    Airy,
}

/// Gamma(1/3) and Gamma(2/3), entering the Airy series normalization.
const GAMMA_ONE_THIRD: f64 = 2.678_938_534_707_748;
const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_4;

/// The power-series evaluation cancels catastrophically past this radius;
/// it covers the first five zeros comfortably.
const AIRY_SERIES_RADIUS: f64 = 8.5;
const AIRY_MAX_ZEROS: usize = 5;

/// Airy function of the first kind by its Maclaurin series (valid on
/// |x| <= AIRY_SERIES_RADIUS).
pub fn airy_ai(x: f64) -> Result<f64, CoreError> {
    if x.abs() > AIRY_SERIES_RADIUS {
        return Err(CoreError::RadialProblem {
            reason: format!(
                "Airy series evaluation limited to |x| <= {AIRY_SERIES_RADIUS}, got {x}"
            ),
        });
    }
    let c1 = 3.0f64.powf(-2.0 / 3.0) / GAMMA_TWO_THIRDS;
    let c2 = 3.0f64.powf(-1.0 / 3.0) / GAMMA_ONE_THIRD;
    let x3 = x * x * x;
    // f = sum t_k, t_0 = 1, t_{k+1} = t_k x^3 / ((3k+2)(3k+3));
    // g = sum s_k, s_0 = x, s_{k+1} = s_k x^3 / ((3k+3)(3k+4)).
    let mut f = 1.0f64;
    let mut g = x;
    let mut t = 1.0f64;
    let mut s = x;
    for k in 0..200 {
        let kf = k as f64;
        t *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        s *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        f += t;
        g += s;
        if t.abs() < 1e-22 && s.abs() < 1e-22 {
            break;
        }
    }
    Ok(c1 * f - c2 * g)
}

/// Magnitude of the n-th negative zero of Ai (n = 1, 2, ...), found by
/// bracketing around the asymptotic estimate and bisecting the series
/// evaluation; never a hard-coded constant.
pub fn airy_zero(n: usize) -> Result<f64, CoreError> {
    if n == 0 || n > AIRY_MAX_ZEROS {
        return Err(CoreError::RadialProblem {
            reason: format!("Airy-zero oracle supports zeros 1..={AIRY_MAX_ZEROS}, got {n}"),
        });
    }
    // Asymptotic location: a_n ~ (3 pi (4n - 1) / 8)^(2/3).
    let t = 3.0 * std::f64::consts::PI * (4.0 * n as f64 - 1.0) / 8.0;
    let guess = t.powf(2.0 / 3.0);
    let g = |y: f64| airy_ai(-y);
    let mut lo = guess - 0.5;
    let mut hi = guess + 0.5;
    let mut flo = g(lo)?;
    let fhi = g(hi)?;
    if flo.signum() == fhi.signum() {
        // Widen once; the asymptotic estimate is accurate to << 0.5.
        lo = guess - 1.0;
        hi = guess + 1.0;
        flo = g(lo)?;
        if flo.signum() == g(hi)?.signum() {
            return Err(CoreError::RadialProblem {
                reason: format!("failed to bracket Airy zero {n}"),
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = g(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form (coulomb) or root-bracketed (airy) reference levels for
/// validating the finite-difference solver.
pub fn reference_oracles(
    kind: OracleKind,
    alpha: f64,
    k: f64,
    l: u32,
    units: &UnitSystem,
    n_levels: usize,
) -> Result<Vec<f64>, CoreError> {
    units.validate()?;
    match kind {
        OracleKind::Coulomb => {
            if alpha <= 0.0 {
                return Err(CoreError::RadialProblem {
                    reason: "coulomb oracle requires an attractive potential (alpha > 0)".into(),
                });
            }
            let u = units;
            Ok((0..n_levels)
                .map(|nr| {
                    let principal = (nr as f64) + (l as f64) + 1.0;
                    -u.m0 * alpha * alpha / (2.0 * u.hbar * u.hbar * principal * principal)
                })
                .collect())
        }
        OracleKind::Airy => {
            if l != 0 || alpha != 0.0 {
                return Err(CoreError::RadialProblem {
                    reason: "airy oracle is defined for l = 0 and alpha = 0 only".into(),
                });
            }
            if k <= 0.0 {
                return Err(CoreError::RadialProblem {
                    reason: "airy oracle requires a positive linear slope".into(),
                });
            }
            let u = units;
            let scale = (u.hbar * u.hbar * k * k / (2.0 * u.m0)).powf(1.0 / 3.0);
            (1..=n_levels).map(|n| Ok(scale * airy_zero(n)?)).collect()
        }
    }
}

// ---------------------------------------------------------------------------
// Convergence studies.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub epsilon1: f64,
}

/// Ground-level values across a sequence of halving grids with the fitted
/// convergence order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub fitted_order: f64,
    /// Set when the successive differences fail to shrink monotonically.
    pub warning: bool,
}

/// Compute the raw ground level on each grid in `grid_sizes` (each entry must
/// halve the spacing of the previous one: n' = 2n + 1) and fit the observed
/// convergence order from successive differences.
pub fn convergence_study(
    problem: &RadialProblem,
    grid_sizes: &[usize],
) -> Result<ConvergenceStudy, CoreError> {
    if grid_sizes.len() < 3 {
        return Err(CoreError::RadialProblem {
            reason: format!(
                "convergence study needs at least 3 grids, got {}",
                grid_sizes.len()
            ),
        });
    }
    for w in grid_sizes.windows(2) {
        if w[1] != 2 * w[0] + 1 {
            return Err(CoreError::RadialProblem {
                reason: format!(
                    "grid sizes must halve the spacing (n' = 2n + 1): {} does not follow {}",
                    w[1], w[0]
                ),
            });
        }
    }
    if grid_sizes[0] < MIN_GRID_POINTS {
        return Err(CoreError::RadialProblem {
            reason: format!("grid needs at least {MIN_GRID_POINTS} interior points"),
        });
    }
    let mut rows = Vec::with_capacity(grid_sizes.len());
    for &n in grid_sizes {
        let (tri, h) = build_tridiagonal(problem, n);
        rows.push(ConvergenceRow {
            h,
            epsilon1: tri.eigenvalue(0),
        });
    }
    let diffs: Vec<f64> = rows
        .windows(2)
        .map(|w| w[1].epsilon1 - w[0].epsilon1)
        .collect();
    let mut warning = false;
    let mut orders = Vec::new();
    for w in diffs.windows(2) {
        if w[1].abs() >= w[0].abs() || w[1] == 0.0 {
            warning = true;
        }
        if w[0] != 0.0 && w[1] != 0.0 {
            orders.push((w[0] / w[1]).abs().log2());
        }
    }
    if diffs.contains(&0.0) {
        warning = true;
    }
    let fitted_order = if orders.is_empty() {
        warning = true;
        f64::NAN
    } else {
        orders.iter().sum::<f64>() / orders.len() as f64
    };
    Ok(ConvergenceStudy {
        rows,
        fitted_order,
        warning,
    })
}
