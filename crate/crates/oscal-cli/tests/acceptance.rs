//! Acceptance suite: one test per release criterion, each printing a single
//! pass/fail line (visible with `--nocapture`) and enforcing the stated
//! tolerances and runtime budgets. Criteria 1-7 drive the library directly;
//! criterion 8 exercises the compiled binary.

use std::process::{Command, Output};
use std::time::{Duration, Instant};

use oscal_cli::envelope::ReportEnvelope;
use oscal_core::clifford::{self, EtaRep};
use oscal_core::gauge;
use oscal_core::lie::{self, AlgebraClass, CoefficientMonomial};
use oscal_core::pairing::ClusterReport;
use oscal_core::radial::{
    convergence_study, reference_oracles, solve_radial, OracleKind, RadialProblem,
};
use oscal_core::susy1d::{self, SusyBundle1D};
use oscal_core::susy3d::{self, SusyBundle3D};
use oscal_core::{UnitSystem, VerificationReport};

/// Runs one criterion, prints its pass/fail line, enforces the budget.
fn criterion(
    n: u32,
    label: &str,
    budget: Option<Duration>,
    body: impl FnOnce() -> Result<(), String>,
) {
    let start = Instant::now();
    let mut result = body();
    let elapsed = start.elapsed();
    if result.is_ok() {
        if let Some(b) = budget {
            if elapsed > b {
                result = Err(format!("runtime {elapsed:?} exceeds the {b:?} budget"));
            }
        }
    }
    match &result {
        Ok(()) => println!("criterion {n}: PASS ({elapsed:.2?}) - {label}"),
        Err(e) => println!("criterion {n}: FAIL ({elapsed:.2?}) - {label}: {e}"),
    }
    if let Err(e) = result {
        panic!("acceptance criterion {n} failed: {e}");
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn es<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn find<'a>(reports: &'a [VerificationReport], id: &str) -> Result<&'a VerificationReport, String> {
    reports
        .iter()
        .find(|r| r.identity_id == id)
        .ok_or_else(|| format!("missing report {id}"))
}

fn oscal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscal"))
        .args(args)
        .env_remove("OSCAL_SEED")
        .output()
        .expect("binary spawns")
}

fn monomial_is(m: &CoefficientMonomial, num: i64, chi: i32, m0: i32, omega: i32) -> bool {
    m.numerator == num
        && m.denominator == 1
        && m.chi_power == chi
        && m.m0_power == m0
        && m.omega_power == omega
}

#[test]
fn criterion_1_susy_1d_identity_suite() {
    criterion(
        1,
        "(1+1)D identities at N=32, buffer 2, tol 1e-10; exact {Q,P}=0; kappa_Q = 1",
        Some(Duration::from_secs(1)),
        || {
            let bundle = SusyBundle1D::new(32, UnitSystem::natural()).map_err(es)?;
            let reports = susy1d::verify_identities_1d(&bundle, 2, 1e-10).map_err(es)?;
            ensure(
                reports.len() == 7,
                format!("expected 7 reports, got {}", reports.len()),
            )?;
            for r in &reports {
                ensure(
                    r.passed && r.tolerance <= 1e-10,
                    format!("{} failed: residual {:.3e}", r.identity_id, r.residual),
                )?;
            }
            let anti = find(&reports, "susy1d.anticommutator_qp")?;
            ensure(
                anti.residual == 0.0,
                format!("{{Q,P}} residual {:.3e} is not exactly zero", anti.residual),
            )?;
            let kappa = susy1d::fit_kappa_q(&bundle, 2).map_err(es)?;
            ensure(
                (kappa - 1.0).abs() <= 1e-10,
                format!("kappa_Q = {kappa} deviates from 1 beyond 1e-10"),
            )
        },
    );
}

#[test]
fn criterion_2_1d_spectra() {
    criterion(
        2,
        "interior spectra: H_SS = {0,1,1,2,2,3,3,4,4}, H_ZB = +/-{1,3,5,...} within 1e-8",
        None,
        || {
            let bundle = SusyBundle1D::new(32, UnitSystem::natural()).map_err(es)?;

            let ss = susy1d::ss_clusters(&bundle, 2, 1e-8).map_err(es)?;
            let mut levels: Vec<f64> = Vec::new();
            for c in &ss {
                for _ in 0..c.reliable_count {
                    levels.push(c.eigenvalue);
                }
            }
            levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let expected = [0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0];
            ensure(levels.len() >= 9, "fewer than 9 reliable levels")?;
            for (i, want) in expected.iter().enumerate() {
                ensure(
                    (levels[i] - want).abs() <= 1e-8,
                    format!("level {i}: {} vs expected {want}", levels[i]),
                )?;
            }

            let zb = susy1d::zb_clusters(&bundle, 2, 1e-8).map_err(es)?;
            let reliable: Vec<&ClusterReport> =
                zb.iter().filter(|c| c.reliable_count > 0).collect();
            let mut pos: Vec<(f64, usize)> = reliable
                .iter()
                .filter(|c| c.eigenvalue > 0.0)
                .map(|c| (c.eigenvalue, c.reliable_count))
                .collect();
            let mut neg: Vec<(f64, usize)> = reliable
                .iter()
                .filter(|c| c.eigenvalue < 0.0)
                .map(|c| (-c.eigenvalue, c.reliable_count))
                .collect();
            pos.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            neg.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            ensure(!pos.is_empty(), "no reliable positive ZB clusters")?;
            ensure(
                pos.len() == neg.len(),
                format!("asymmetric branch counts: {} vs {}", pos.len(), neg.len()),
            )?;
            for (i, ((p, pm), (m, mm))) in pos.iter().zip(&neg).enumerate() {
                let odd = (2 * i + 1) as f64;
                ensure(
                    (p - odd).abs() <= 1e-8,
                    format!("positive branch level {i}: {p} vs {odd}"),
                )?;
                ensure(
                    (p - m).abs() <= 1e-8,
                    format!("negation asymmetry at level {i}: {p} vs -(-{m})"),
                )?;
                ensure(pm == mm, format!("multiplicity asymmetry at level {i}"))?;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_3_susy_3d_suite() {
    criterion(
        3,
        "(3+1)D at Nmax=10 (dim 1144): bracket identities 1e-10, spectrum >= -1e-10, even pairing <= 1e-8",
        Some(Duration::from_secs(60)),
        || {
            let bundle = SusyBundle3D::new(10, UnitSystem::natural()).map_err(es)?;
            ensure(bundle.dim() == 1144, format!("state dim {} != 1144", bundle.dim()))?;

            let reports = susy3d::verify_identities_3d(&bundle, 2, 1e-10).map_err(es)?;
            for id in ["susy3d.commutator_qp", "susy3d.anticommutator_qp"] {
                let r = find(&reports, id)?;
                ensure(
                    r.passed && r.residual <= 1e-10,
                    format!("{id} residual {:.3e} exceeds 1e-10", r.residual),
                )?;
            }

            let pairing = susy3d::pairing_3d(&bundle, 2, 1e-8, 1e-10).map_err(es)?;
            let min = pairing
                .min_reliable_eigenvalue
                .ok_or("no reliable eigenvalues")?;
            ensure(min >= -1e-10, format!("min reliable eigenvalue {min:.3e} < -1e-10"))?;
            ensure(
                pairing.max_pairing_residual <= 1e-8,
                format!("pairing residual {:.3e} exceeds 1e-8", pairing.max_pairing_residual),
            )?;
            ensure(
                pairing.evenness_ok && pairing.boundary_evenness_ok,
                "a reliable positive eigenvalue has odd multiplicity",
            )
        },
    );
}

#[test]
fn criterion_4_lie_algebra_classification() {
    criterion(
        4,
        "Jacobi exactly 0 on the chi sweep; so(5)/so(3,2)/Newton-Hooke signatures; derived xi, zeta",
        Some(Duration::from_secs(1)),
        || {
            for &chi in &[-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
                let t = lie::structure_tensor(chi);
                let jr = lie::jacobi_residual(&t);
                ensure(jr == 0.0, format!("Jacobi residual {jr:.3e} at chi={chi} not exact"))?;
                let kr = lie::killing_form(&t).map_err(es)?;
                if chi < 0.0 {
                    ensure(
                        kr.classification == AlgebraClass::So5,
                        format!("chi={chi}: {} instead of so(5)", kr.classification),
                    )?;
                    ensure(
                        kr.n_positive.min(kr.n_negative) == 0,
                        format!("chi={chi}: mixed signs ({}, {})", kr.n_positive, kr.n_negative),
                    )?;
                } else if chi > 0.0 {
                    ensure(
                        kr.classification == AlgebraClass::So32,
                        format!("chi={chi}: {} instead of so(3,2)", kr.classification),
                    )?;
                    ensure(
                        kr.n_positive == 6 && kr.n_negative == 4,
                        format!("chi={chi}: split ({}, {}) != (6, 4)", kr.n_positive, kr.n_negative),
                    )?;
                } else {
                    ensure(
                        kr.classification == AlgebraClass::NewtonHooke,
                        format!("chi=0: {} instead of Newton-Hooke", kr.classification),
                    )?;
                    ensure(kr.n_null >= 2, format!("chi=0: nullity {} < 2", kr.n_null))?;
                }
            }

            let d = lie::derive_structure_coefficients().map_err(es)?;
            ensure(
                monomial_is(&d.xi, -1, 1, 1, 1),
                format!("xi = {} instead of -chi*m0*omega", d.xi.render()),
            )?;
            ensure(
                monomial_is(&d.zeta, -1, 1, -1, -1),
                format!("zeta = {} instead of -chi/(m0*omega)", d.zeta.render()),
            )?;
            ensure(
                monomial_is(&d.xi_dimensionless, -1, 1, 0, 0)
                    && monomial_is(&d.zeta_dimensionless, -1, 1, 0, 0),
                "dimensionless coefficients do not reduce to -chi",
            )?;
            ensure(
                d.notes.iter().any(|n| n.contains("-chi/omega")),
                "missing the displayed -chi/omega discrepancy note",
            )
        },
    );
}

#[test]
fn criterion_5_eta_representations() {
    criterion(
        5,
        "deformed brackets <= 1e-12 for eta in {I2, sigma1, sigma3}; trace labels (2, 0, 0)",
        Some(Duration::from_secs(1)),
        || {
            let cases = [
                (EtaRep::identity(2), 2.0),
                (EtaRep::pauli1(), 0.0),
                (EtaRep::pauli3(), 0.0),
            ];
            for (eta, want_label) in cases {
                ensure(
                    eta.trace_label() == want_label,
                    format!(
                        "trace label of {} is {}, want {want_label}",
                        eta.label(),
                        eta.trace_label()
                    ),
                )?;
                let osc = clifford::build_eta_representation(&eta, 4, UnitSystem::natural())
                    .map_err(es)?;
                let reports = clifford::verify_eta_brackets(&osc, 2, 1e-12).map_err(es)?;
                ensure(
                    reports.len() == 9,
                    format!("{}: expected 9 bracket reports", eta.label()),
                )?;
                for r in &reports {
                    ensure(
                        r.passed && r.residual <= 1e-12,
                        format!(
                            "{}: {} residual {:.3e}",
                            eta.label(),
                            r.identity_id,
                            r.residual
                        ),
                    )?;
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_6_gauge_engine() {
    criterion(
        6,
        "FD cross-check 1e-8 (5 fns x 20 probes); c130 at 1e-10; -2i a3 fit; E-independent reduction",
        Some(Duration::from_secs(5)),
        || {
            let probes = gauge::ProbeSet::standard(42);
            ensure(
                probes.functions.len() == 5 && probes.points.len() == 20,
                format!(
                    "probe set is {} functions x {} points",
                    probes.functions.len(),
                    probes.points.len()
                ),
            )?;

            let a3 = 0.2;
            let g = gauge::verify_gauge(1.0, 1.0, a3, 1.5, &UnitSystem::natural(), 42)
                .map_err(es)?;

            let fd = find(&g.reports, "gauge.fd_cross_oracle")?;
            ensure(
                fd.passed && fd.tolerance == 1e-8,
                format!("finite-difference cross-check residual {:.3e}", fd.residual),
            )?;

            let c130 = g
                .reports
                .iter()
                .find(|r| r.paper_eq == "c130")
                .ok_or("no report labeled c130")?;
            ensure(
                c130.passed && c130.residual <= 1e-10,
                format!("c130 residual {:.3e} exceeds 1e-10", c130.residual),
            )?;

            let spatial = find(&g.reports, "gauge.spatial_field_strength")?;
            ensure(
                spatial.passed && spatial.residual <= 1e-8,
                format!("spatial constant fit residual {:.3e}", spatial.residual),
            )?;
            let fit = &g.fitted_spatial_constant;
            ensure(
                fit.re.abs() <= 1e-8 && (fit.im - (-2.0 * a3)).abs() <= 1e-8,
                format!("fitted constant {}+{}i != -2i a3", fit.re, fit.im),
            )?;

            let kge = find(&g.reports, "gauge.kge_reduction")?;
            ensure(
                kge.passed && kge.residual <= 1e-8,
                format!("reduction residual {:.3e}", kge.residual),
            )?;
            ensure(
                g.energy_spread <= 1e-12,
                format!("reduction varies with E by {:.3e} > 1e-12", g.energy_spread),
            )?;

            // The factor-2 finding must surface in the CLI envelope notes.
            let out = oscal(&["verify", "gauge"]);
            ensure(out.status.code() == Some(0), "verify gauge exited nonzero")?;
            let envelope: ReportEnvelope =
                serde_json::from_slice(&out.stdout).map_err(es)?;
            ensure(
                envelope.notes.iter().any(|n| n.contains("factor")),
                "factor-2 finding absent from the envelope notes",
            )
        },
    );
}

#[test]
#[allow(clippy::needless_range_loop)]
fn criterion_7_cornell_solver() {
    criterion(
        7,
        "Coulomb (-1/2, -1/8) and Airy levels to 1e-4 relative; order 2.0 +/- 0.2; monotone in k and l",
        Some(Duration::from_secs(30)),
        || {
            let units = UnitSystem::natural();

            let coulomb = RadialProblem::new(1.0, 0.0, 0, units).map_err(es)?;
            let s = solve_radial(&coulomb, 2).map_err(es)?;
            for (i, want) in [-0.5, -0.125].iter().enumerate() {
                let got = s.richardson_estimate[i];
                let rel = (got - want).abs() / want.abs();
                ensure(
                    rel <= 1e-4,
                    format!("Coulomb level {i}: {got} vs {want} (rel {rel:.2e})"),
                )?;
            }

            let linear = RadialProblem::new(0.0, 1.0, 0, units).map_err(es)?;
            let s = solve_radial(&linear, 3).map_err(es)?;
            let oracle =
                reference_oracles(OracleKind::Airy, 0.0, 1.0, 0, &units, 3).map_err(es)?;
            for i in 0..3 {
                let (got, want) = (s.richardson_estimate[i], oracle[i]);
                let rel = (got - want).abs() / want.abs();
                ensure(
                    rel <= 1e-4,
                    format!("Airy level {i}: {got} vs oracle {want} (rel {rel:.2e})"),
                )?;
            }

            let study = convergence_study(&linear, &[500, 1001, 2003]).map_err(es)?;
            ensure(
                (study.fitted_order - 2.0).abs() <= 0.2,
                format!("fitted convergence order {} outside 2.0 +/- 0.2", study.fitted_order),
            )?;

            let mut prev = f64::NEG_INFINITY;
            for k in [0.0, 0.5, 1.0, 2.0] {
                let p = RadialProblem::new(1.0, k, 0, units).map_err(es)?;
                let e0 = solve_radial(&p, 1).map_err(es)?.richardson_estimate[0];
                ensure(e0 > prev, format!("ground level not increasing at k={k}"))?;
                prev = e0;
            }
            let mut prev = f64::NEG_INFINITY;
            for l in [0u32, 1, 2] {
                let p = RadialProblem::new(0.0, 1.0, l, units).map_err(es)?;
                let e0 = solve_radial(&p, 1).map_err(es)?.richardson_estimate[0];
                ensure(e0 > prev, format!("ground level not increasing at l={l}"))?;
                prev = e0;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_8_cli_contract() {
    criterion(
        8,
        "CLI determinism, exit codes, and schema round-trip over the subcommands",
        None,
        || {
            // Determinism: byte-identical payloads modulo the timestamp line.
            let strip = |out: &Output| -> String {
                String::from_utf8_lossy(&out.stdout)
                    .lines()
                    .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            for args in [
                vec!["verify", "susy1d", "--seed", "7"],
                vec!["verify", "gauge", "--seed", "11"],
                vec!["algebra"],
            ] {
                let a = oscal(&args);
                let b = oscal(&args);
                ensure(
                    strip(&a) == strip(&b),
                    format!("non-deterministic payload for {args:?}"),
                )?;
            }

            // Exit codes: 0 pass, 1 solver failure (envelope still written),
            // 2 usage.
            ensure(
                oscal(&["verify", "susy1d"]).status.code() == Some(0),
                "expected exit 0",
            )?;
            let solver = oscal(&["spectrum", "cornell", "--alpha", "0", "--k", "0"]);
            ensure(
                solver.status.code() == Some(1),
                "expected exit 1 for the free case",
            )?;
            let envelope: ReportEnvelope = serde_json::from_slice(&solver.stdout).map_err(es)?;
            ensure(envelope.error.is_some(), "solver envelope lacks the error")?;
            ensure(
                oscal(&["verify", "susy1d", "--cutoff", "3"]).status.code() == Some(2),
                "expected exit 2 below the minimum cutoff",
            )?;

            // Round-trip: envelopes re-parse and re-serialize identically.
            for args in [
                vec!["verify", "susy1d"],
                vec!["algebra", "--chi", "-1"],
                vec!["spectrum", "zb", "--cutoff", "16"],
            ] {
                let out = oscal(&args);
                ensure(
                    out.status.code() == Some(0),
                    format!("{args:?} exited nonzero"),
                )?;
                let text = String::from_utf8_lossy(&out.stdout).to_string();
                let envelope: ReportEnvelope = serde_json::from_str(&text).map_err(es)?;
                let again: serde_json::Value =
                    serde_json::from_str(&envelope.to_json()).map_err(es)?;
                let original: serde_json::Value = serde_json::from_str(&text).map_err(es)?;
                ensure(again == original, format!("round-trip altered {args:?}"))?;
            }
            Ok(())
        },
    );
}
