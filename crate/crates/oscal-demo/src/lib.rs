//! Browser-facing operations compiled to WebAssembly.
//!
//! Each export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript bindings beyond the wasm-bindgen loader.
//! Failures come back as `{"error": "..."}` instead of trapping, keeping the
//! page responsive to out-of-range inputs.

use oscal_core::lie;
use oscal_core::radial::{solve_radial, RadialProblem};
use oscal_core::susy1d::{self, SusyBundle1D};
use oscal_core::UnitSystem;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Hard ceiling on the browser-side Fock cutoff; dense products grow as the
/// cube of the dimension and anything larger stalls the UI thread.
const MAX_BROWSER_CUTOFF: usize = 128;
const MAX_BROWSER_LEVELS: usize = 8;

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value)
        .unwrap_or_else(|e| format!("{{\"error\":\"serialization failed: {e}\"}}"))
}

#[derive(Serialize)]
struct ErrorOut {
    error: String,
}

fn err_json(msg: impl std::fmt::Display) -> String {
    to_json(&ErrorOut {
        error: msg.to_string(),
    })
}

#[derive(Serialize)]
struct AlgebraOut {
    chi: f64,
    jacobi_residual: f64,
    classification: String,
    n_positive: usize,
    n_negative: usize,
    n_null: usize,
    eigenvalues: Vec<f64>,
}

/// Killing-form classification of the deformed bracket algebra at one value
/// of the deformation constant.
#[wasm_bindgen]
pub fn classify_algebra(chi: f64) -> String {
    if !chi.is_finite() {
        return err_json("chi must be finite");
    }
    let tensor = lie::structure_tensor(chi);
    let jacobi_residual = lie::jacobi_residual(&tensor);
    match lie::killing_form(&tensor) {
        Ok(kr) => to_json(&AlgebraOut {
            chi,
            jacobi_residual,
            classification: kr.classification.to_string(),
            n_positive: kr.n_positive,
            n_negative: kr.n_negative,
            n_null: kr.n_null,
            eigenvalues: kr.eigenvalues,
        }),
        Err(e) => err_json(e),
    }
}

#[derive(Serialize)]
struct CornellOut {
    alpha: f64,
    k: f64,
    l: u32,
    epsilon: Vec<f64>,
    estimated_error: Vec<f64>,
    box_size_warning: bool,
}

/// Lowest levels of the Coulomb-plus-linear radial problem, extrapolated
/// across the grid doubling.
#[wasm_bindgen]
pub fn cornell_levels(alpha: f64, k: f64, l: u32, levels: usize) -> String {
    let levels = levels.clamp(1, MAX_BROWSER_LEVELS);
    let problem = match RadialProblem::new(alpha, k, l, UnitSystem::natural()) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    match solve_radial(&problem, levels) {
        Ok(s) => to_json(&CornellOut {
            alpha,
            k,
            l,
            epsilon: s.richardson_estimate,
            estimated_error: s.estimated_error,
            box_size_warning: s.box_size_warning,
        }),
        Err(e) => err_json(e),
    }
}

#[derive(Serialize)]
struct IdentityOut {
    identity: String,
    residual: f64,
    passed: bool,
}

#[derive(Serialize)]
struct LevelOut {
    eigenvalue: f64,
    multiplicity: usize,
    reliable: bool,
}

#[derive(Serialize)]
struct Susy1dOut {
    cutoff: usize,
    all_passed: bool,
    identities: Vec<IdentityOut>,
    levels: Vec<LevelOut>,
}

/// The (1+1)D supersymmetric suite: identity residuals plus the clustered
/// interior spectrum of the supersymmetric Hamiltonian.
#[wasm_bindgen]
pub fn susy_spectrum_1d(cutoff: usize) -> String {
    let cutoff = cutoff.min(MAX_BROWSER_CUTOFF);
    let bundle = match SusyBundle1D::new(cutoff, UnitSystem::natural()) {
        Ok(b) => b,
        Err(e) => return err_json(e),
    };
    let reports = match susy1d::verify_identities_1d(&bundle, 2, 1e-10) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let clusters = match susy1d::ss_clusters(&bundle, 2, 1e-8) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    to_json(&Susy1dOut {
        cutoff,
        all_passed: reports.iter().all(|r| r.passed),
        identities: reports
            .iter()
            .map(|r| IdentityOut {
                identity: r.identity_id.clone(),
                residual: r.residual,
                passed: r.passed,
            })
            .collect(),
        levels: clusters
            .iter()
            .map(|c| LevelOut {
                eigenvalue: c.eigenvalue,
                multiplicity: c.count,
                reliable: c.fully_reliable,
            })
            .collect(),
    })
}
