//! Spectral clustering and supersymmetric degeneracy-pairing diagnostics.
//!
//! The Hamiltonians this crate verifies conserve total quanta exactly at
//! finite cutoff (their off-shell matrix elements are structural zeros), so
//! spectra are computed per conserved block. That keeps eigenvectors exactly
//! block-supported, which is what makes the reliability classification
//! deterministic: an eigenvector is *reliable* when its weight on the
//! truncation-corrupted top shells is zero, and with block-pure vectors that
//! weight is exactly the block membership, never an arbitrary mixture chosen
//! by the eigensolver inside a degenerate cluster.
//!
//! Pairing: for a supercharge `Q` with `[H, Q] = 0`, every positive-energy
//! eigenvector `v` must map to a partner `Q v` at the same energy. The
//! diagnostic is `|| (H - E) Q v || / || Q v ||`, evaluated for every
//! reliable member of every positive cluster. Zero modes (`H v = 0`) are
//! annihilated by `Q` instead and are reported separately, as is the
//! even-multiplicity bookkeeping: clusters fully inside the reliable zone
//! must have even size, while clusters straddling the reliability boundary
//! are tracked under a separate flag because their unreliable partners are
//! the truncation's fault, not the algebra's.

use serde::{Deserialize, Serialize};

use crate::eigh::eigh;
use crate::error::CoreError;
use crate::matrix::OperatorMatrix;

/// One conserved-quantum-number block of the Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpectralBlock {
    /// Global basis indices belonging to the block.
    pub indices: Vec<usize>,
    /// Whether eigenvectors supported on this block are trustworthy at the
    /// requested truncation (i.e. the block sits below the buffer zone).
    pub reliable: bool,
}

/// Permitted off-block leakage relative to `max(1, ||H||_max)`; anything
/// larger means the supplied blocks are not actually conserved.
pub const OFF_BLOCK_TOL: f64 = 1e-12;

/// One degenerate cluster of the spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterReport {
    /// Mean eigenvalue of the cluster members.
    pub eigenvalue: f64,
    /// Total number of members, reliable or not.
    pub count: usize,
    /// Members supported on reliable blocks.
    pub reliable_count: usize,
    /// True when every member is reliable.
    pub fully_reliable: bool,
    /// Max over reliable members of `||(H - E) Q v|| / ||Q v||`; `None` for
    /// zero modes, negative clusters, and clusters without reliable members.
    pub pairing_residual: Option<f64>,
    /// For zero-mode clusters: max over reliable members of `||Q v||`
    /// (the charge must annihilate exact zero modes).
    pub charge_image_norm: Option<f64>,
}

/// Full pairing diagnostic over a block-diagonal Hamiltonian.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingAnalysis {
    pub clusters: Vec<ClusterReport>,
    /// Smallest eigenvalue carried by any reliable block.
    pub min_reliable_eigenvalue: Option<f64>,
    /// Max pairing residual over all reliable positive-cluster members;
    /// zero when there are none.
    pub max_pairing_residual: f64,
    /// Number of reliable zero modes.
    pub zero_modes_reliable: usize,
    /// Max `||Q v||` over reliable zero modes.
    pub zero_mode_max_image: f64,
    /// Every fully reliable positive cluster has even multiplicity.
    pub evenness_ok: bool,
    /// Reliable-member counts are even also in boundary-straddling positive
    /// clusters. This can legitimately fail at the truncation edge (the 1D
    /// top cluster loses its partner to the buffer zone) and is therefore a
    /// separate flag.
    pub boundary_evenness_ok: bool,
    /// Gap below which adjacent eigenvalues merge into one cluster.
    pub cluster_gap: f64,
    /// `|E| <= zero_tol` classifies a cluster as zero modes.
    pub zero_tol: f64,
}

fn column_norm(m: &OperatorMatrix, col: usize) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for i in 0..n {
        acc += m.get(i, col).norm_sqr();
    }
    acc.sqrt()
}

fn column_residual_norm(hqv: &OperatorMatrix, qv: &OperatorMatrix, e: f64, col: usize) -> f64 {
    let n = hqv.dim();
    let mut acc = 0.0;
    for i in 0..n {
        acc += (hqv.get(i, col) - qv.get(i, col) * e).norm_sqr();
    }
    acc.sqrt()
}

fn validate_blocks(dim: usize, blocks: &[SpectralBlock]) -> Result<Vec<usize>, CoreError> {
    let mut owner = vec![usize::MAX; dim];
    let mut seen = 0usize;
    for (b, block) in blocks.iter().enumerate() {
        for &i in &block.indices {
            if i >= dim {
                return Err(CoreError::GeneratorOutOfRange { index: i, dim });
            }
            if owner[i] != usize::MAX {
                return Err(CoreError::Invalid(format!(
                    "basis index {i} assigned to two spectral blocks"
                )));
            }
            owner[i] = b;
            seen += 1;
        }
    }
    if seen != dim {
        return Err(CoreError::Invalid(format!(
            "spectral blocks cover {seen} of {dim} basis states"
        )));
    }
    Ok(owner)
}

fn check_off_block(h: &OperatorMatrix, owner: &[usize]) -> Result<(), CoreError> {
    let n = h.dim();
    let scale = h.max_norm().max(1.0);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if owner[i] != owner[j] {
                worst = worst.max(h.get(i, j).norm());
            }
        }
    }
    if worst > OFF_BLOCK_TOL * scale {
        return Err(CoreError::NotBlockDiagonal { norm: worst });
    }
    Ok(())
}

struct BlockSpectrum {
    /// Eigenvalues sorted ascending, with the owning block and the column in
    /// the assembled global eigenvector matrix.
    eigenvalues: Vec<f64>,
    reliable: Vec<bool>,
    vectors: OperatorMatrix,
}

/// Diagonalizes per block and assembles globally sorted eigenpairs. Ties are
/// broken by block order, then by the solver's in-block order, so the result
/// is deterministic.
fn block_spectrum(
    h: &OperatorMatrix,
    blocks: &[SpectralBlock],
) -> Result<BlockSpectrum, CoreError> {
    let dim = h.dim();
    let owner = validate_blocks(dim, blocks)?;
    check_off_block(h, &owner)?;

    struct Pair {
        eig: f64,
        order: usize,
        block: usize,
        local: usize,
    }
    let mut pairs: Vec<Pair> = Vec::with_capacity(dim);
    let mut decomps = Vec::with_capacity(blocks.len());
    let mut order = 0usize;
    for (b, block) in blocks.iter().enumerate() {
        let sub = h.restriction(&block.indices);
        let dec = eigh(&sub)?;
        for local in 0..block.indices.len() {
            pairs.push(Pair {
                eig: dec.eigenvalues[local],
                order,
                block: b,
                local,
            });
            order += 1;
        }
        decomps.push(dec);
    }
    pairs.sort_by(|a, b| {
        a.eig
            .partial_cmp(&b.eig)
            .expect("eigenvalues are finite")
            .then(a.order.cmp(&b.order))
    });

    let mut vectors = OperatorMatrix::zeros(dim);
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut reliable = Vec::with_capacity(dim);
    for (col, p) in pairs.iter().enumerate() {
        let dec = &decomps[p.block];
        let idx = &blocks[p.block].indices;
        for (row_local, &row_global) in idx.iter().enumerate() {
            vectors.set(row_global, col, dec.vectors.get(row_local, p.local));
        }
        eigenvalues.push(p.eig);
        reliable.push(blocks[p.block].reliable);
    }
    Ok(BlockSpectrum {
        eigenvalues,
        reliable,
        vectors,
    })
}

/// Groups an ascending eigenvalue list into clusters separated by more than
/// `gap`. Returns `(start, end)` half-open member ranges.
fn cluster_ranges(eigenvalues: &[f64], gap: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let n = eigenvalues.len();
    let mut start = 0usize;
    for i in 1..=n {
        if i == n || eigenvalues[i] - eigenvalues[i - 1] > gap {
            out.push((start, i));
            start = i;
        }
    }
    out
}

/// Spectrum-only variant: clusters and reliability without a charge operator.
pub fn spectrum_analysis(
    h: &OperatorMatrix,
    blocks: &[SpectralBlock],
    gap: f64,
) -> Result<Vec<ClusterReport>, CoreError> {
    let spec = block_spectrum(h, blocks)?;
    let ranges = cluster_ranges(&spec.eigenvalues, gap);
    Ok(ranges
        .into_iter()
        .map(|(s, e)| {
            let members = &spec.eigenvalues[s..e];
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            let reliable_count = spec.reliable[s..e].iter().filter(|&&r| r).count();
            ClusterReport {
                eigenvalue: mean,
                count: e - s,
                reliable_count,
                fully_reliable: reliable_count == e - s,
                pairing_residual: None,
                charge_image_norm: None,
            }
        })
        .collect())
}

/// Full pairing diagnostic of `h` under the supercharge `charge`.
pub fn pairing_analysis(
    h: &OperatorMatrix,
    charge: &OperatorMatrix,
    blocks: &[SpectralBlock],
    gap: f64,
    zero_tol: f64,
) -> Result<PairingAnalysis, CoreError> {
    if h.dim() != charge.dim() {
        return Err(CoreError::DimensionMismatch {
            left: h.dim(),
            right: charge.dim(),
        });
    }
    let spec = block_spectrum(h, blocks)?;
    let qv = charge.mul(&spec.vectors)?;
    let hqv = h.mul(&qv)?;
    let ranges = cluster_ranges(&spec.eigenvalues, gap);

    let mut clusters = Vec::with_capacity(ranges.len());
    let mut min_reliable: Option<f64> = None;
    let mut max_pairing = 0.0f64;
    let mut zero_modes_reliable = 0usize;
    let mut zero_mode_max_image = 0.0f64;
    let mut evenness_ok = true;
    let mut boundary_evenness_ok = true;

    for (&e, &rel) in spec.eigenvalues.iter().zip(spec.reliable.iter()) {
        if rel {
            min_reliable = Some(min_reliable.map_or(e, |m: f64| m.min(e)));
        }
    }

    for (s, e) in ranges {
        let members = &spec.eigenvalues[s..e];
        let mean = members.iter().sum::<f64>() / members.len() as f64;
        let count = e - s;
        let reliable_count = spec.reliable[s..e].iter().filter(|&&r| r).count();
        let fully_reliable = reliable_count == count;
        let mut pairing_residual = None;
        let mut charge_image_norm = None;

        if mean.abs() <= zero_tol {
            let mut worst = 0.0f64;
            for col in s..e {
                if spec.reliable[col] {
                    worst = worst.max(column_norm(&qv, col));
                }
            }
            if reliable_count > 0 {
                zero_modes_reliable += reliable_count;
                zero_mode_max_image = zero_mode_max_image.max(worst);
                charge_image_norm = Some(worst);
            }
        } else if mean > zero_tol {
            if reliable_count > 0 {
                let mut worst = 0.0f64;
                for col in s..e {
                    if spec.reliable[col] {
                        let denom = column_norm(&qv, col);
                        let resid = if denom == 0.0 {
                            // A positive-energy state annihilated by the
                            // charge has no partner: unconditional failure.
                            f64::INFINITY
                        } else {
                            column_residual_norm(&hqv, &qv, mean, col) / denom
                        };
                        worst = worst.max(resid);
                    }
                }
                pairing_residual = Some(worst);
                max_pairing = max_pairing.max(worst);
            }
            if fully_reliable {
                evenness_ok &= count % 2 == 0;
            } else {
                boundary_evenness_ok &= reliable_count % 2 == 0;
            }
        }

        clusters.push(ClusterReport {
            eigenvalue: mean,
            count,
            reliable_count,
            fully_reliable,
            pairing_residual,
            charge_image_norm,
        });
    }

    Ok(PairingAnalysis {
        clusters,
        min_reliable_eigenvalue: min_reliable,
        max_pairing_residual: max_pairing,
        zero_modes_reliable,
        zero_mode_max_image,
        evenness_ok,
        boundary_evenness_ok,
        cluster_gap: gap,
        zero_tol,
    })
}

/// Eigenvalues of the restriction of `h` to the masked interior, ascending.
pub fn interior_spectrum(h: &OperatorMatrix, mask: &[bool]) -> Result<Vec<f64>, CoreError> {
    if mask.len() != h.dim() {
        return Err(CoreError::DimensionMismatch {
            left: h.dim(),
            right: mask.len(),
        });
    }
    let indices: Vec<usize> = mask
        .iter()
        .enumerate()
        .filter_map(|(i, k)| k.then_some(i))
        .collect();
    if indices.is_empty() {
        return Err(CoreError::Invalid("interior mask keeps no states".into()));
    }
    Ok(eigh(&h.restriction(&indices))?.eigenvalues)
}
