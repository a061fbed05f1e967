//! The JSON report envelope every subcommand emits, and its renderers.
//!
//! Field names are a public contract (see README) and must stay stable:
//! `tool_version`, `timestamp`, `command`, `params`, `overall_pass`, `error`,
//! `notes`, `reports`, `killing_reports`, `derived_coefficients`, `spectra`,
//! `energy_maps`, `clusters`, `pairing`, `gauge`, `kappa_q`, `trace_labels`.
//! Empty optional sections are omitted from the serialized form; parsers must
//! treat a missing section as empty.

use std::collections::BTreeMap;

use oscal_core::gauge::{FittedConstant, GaugeVerification, KgeMapping};
use oscal_core::lie::{DerivedCoefficients, KillingReport};
use oscal_core::pairing::{ClusterReport, PairingAnalysis};
use oscal_core::radial::{EnergyMap, SpectrumResult};
use oscal_core::VerificationReport;
use serde::{Deserialize, Serialize};

/// Numeric findings of the gauge suite that are not identity reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaugeFindings {
    /// Least-squares constant fitted to the spatial field-strength candidate.
    pub fitted_spatial_constant: FittedConstant,
    /// Fraction of the temporal field strength acting as a first derivative.
    pub derivative_part_fraction: f64,
    /// Relative deviation of its multiplication part from the displayed candidate.
    pub multiplication_mismatch: f64,
    /// Nonrelativistic potential strengths implied by the reduction.
    pub mapping: KgeMapping,
    /// (stationary energy, reduction residual) pairs.
    pub residual_by_energy: Vec<(f64, f64)>,
    /// Spread of the residual across energies (E-independence measure).
    pub energy_spread: f64,
}

impl From<&GaugeVerification> for GaugeFindings {
    fn from(v: &GaugeVerification) -> Self {
        GaugeFindings {
            fitted_spatial_constant: v.fitted_spatial_constant,
            derivative_part_fraction: v.derivative_part_fraction,
            multiplication_mismatch: v.multiplication_mismatch,
            mapping: v.mapping,
            residual_by_energy: v.residual_by_energy.clone(),
            energy_spread: v.energy_spread,
        }
    }
}

/// Absolute trace label of one involution representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaTraceLabel {
    pub eta: String,
    pub trace_label: f64,
}

/// Everything one invocation produces. One envelope per process run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool_version: String,
    /// RFC 3339 UTC; the only field allowed to differ between identical runs.
    pub timestamp: String,
    /// Subcommand path, e.g. "verify susy1d".
    pub command: String,
    /// Every resolved parameter after flag/config/env/default merging.
    pub params: BTreeMap<String, String>,
    /// True iff every contained report passed and no error occurred.
    pub overall_pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<VerificationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub killing_reports: Vec<KillingReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived_coefficients: Option<DerivedCoefficients>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spectra: Vec<SpectrumResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub energy_maps: Vec<EnergyMap>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clusters: Vec<ClusterReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<PairingAnalysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeFindings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace_labels: Vec<EtaTraceLabel>,
}

impl ReportEnvelope {
    pub fn new(command: &str, params: BTreeMap<String, String>) -> Self {
        ReportEnvelope {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            command: command.to_string(),
            params,
            overall_pass: false,
            error: None,
            notes: Vec::new(),
            reports: Vec::new(),
            killing_reports: Vec::new(),
            derived_coefficients: None,
            spectra: Vec::new(),
            energy_maps: Vec::new(),
            clusters: Vec::new(),
            pairing: None,
            gauge: None,
            kappa_q: None,
            trace_labels: Vec::new(),
        }
    }

    /// Recomputes the overall flag from the contained reports and error.
    pub fn finalize(&mut self) {
        self.overall_pass = self.error.is_none() && self.reports.iter().all(|r| r.passed);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }

    /// Human-readable rendering for `--format text`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("oscal {} — {}\n", self.tool_version, self.command));
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        out.push_str(&format!("params: {}\n", params.join(" ")));
        if let Some(err) = &self.error {
            out.push_str(&format!("error: {err}\n"));
        }
        for r in &self.reports {
            out.push_str(&r.summary_line());
            out.push('\n');
        }
        for k in &self.killing_reports {
            out.push_str(&format!(
                "chi = {}: {} (signature +{}/-{}/0:{})\n",
                k.chi, k.classification, k.n_positive, k.n_negative, k.n_null
            ));
        }
        for s in &self.spectra {
            let levels: Vec<String> = s
                .richardson_estimate
                .iter()
                .map(|e| format!("{e:.8}"))
                .collect();
            out.push_str(&format!("levels (extrapolated): {}\n", levels.join(", ")));
            if s.box_size_warning {
                out.push_str("warning: boundary weight exceeds the box-size threshold\n");
            }
        }
        if !self.clusters.is_empty() {
            for (i, c) in self.clusters.iter().enumerate() {
                out.push_str(&format!(
                    "cluster {i}: E = {:.10}, multiplicity {}, reliable {}\n",
                    c.eigenvalue, c.count, c.fully_reliable
                ));
            }
        }
        if let Some(kappa) = self.kappa_q {
            out.push_str(&format!("kappa_q = {kappa:.12}\n"));
        }
        for t in &self.trace_labels {
            out.push_str(&format!("eta {}: |trace| = {}\n", t.eta, t.trace_label));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.overall_pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

/// Formats one optional energy cell; unmappable levels print as empty cells.
fn energy_cell(e: Option<f64>) -> String {
    e.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV for the radial solver: one row per level.
pub fn cornell_csv(spectrum: &SpectrumResult, map: &EnergyMap) -> String {
    let mut out = String::from("level,epsilon,estimated_error,E_plus,E_minus\n");
    for (i, &eps) in spectrum.richardson_estimate.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            eps,
            spectrum.estimated_error[i],
            energy_cell(map.e_plus[i]),
            energy_cell(map.e_minus[i]),
        ));
    }
    out
}

/// CSV for clustered oscillator spectra: one row per degenerate cluster.
pub fn cluster_csv(clusters: &[ClusterReport]) -> String {
    let mut out = String::from("index,eigenvalue,multiplicity,reliable\n");
    for (i, c) in clusters.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i, c.eigenvalue, c.count, c.fully_reliable
        ));
    }
    out
}

/// CSV for the classification sweep: one row per chi.
pub fn algebra_csv(reports: &[KillingReport], jacobi: &[f64]) -> String {
    let mut out = String::from("chi,jacobi_residual,n_positive,n_negative,n_null,classification\n");
    for (k, &j) in reports.iter().zip(jacobi) {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            k.chi, j, k.n_positive, k.n_negative, k.n_null, k.classification
        ));
    }
    out
}
