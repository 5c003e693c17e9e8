//! One runner per subcommand; each produces the JSON report payload, CSV
//! trace rows, and optional field dumps.

use crate::config::{ExperimentConfig, InitBlock};
use crate::report::{write_field, CsvCell, CsvTrace};
use crate::CliError;
use hardycrit::*;
use serde_json::json;
use std::path::Path;

pub struct Outcome {
    pub report: serde_json::Value,
    pub exit_hypothesis_violated: bool,
    pub exit_non_convergence: bool,
}

fn config_echo(cfg: &ExperimentConfig) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null)
}

fn spec_from(cfg: &ExperimentConfig) -> Result<ProblemSpec, CliError> {
    cfg.build_spec()
        .map_err(|e| CliError::Config(format!("problem block: {e}")))
}

/// verify-groundstate: strong PDE residual of the closed-form family and the
/// Sobolev-quotient identity, with the measured quotient exponent.
pub fn verify_groundstate(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let spec = spec_from(cfg)?;
    let n = spec.dimension;
    let lam = spec.lambda_n();
    let a = spec.coupling;
    let sob = best_sobolev(n, &spec.grid).map_err(CliError::from_core)?;
    let nf = n as f64;

    let mus = if cfg.sweep.mus.is_empty() {
        vec![1.0]
    } else {
        cfg.sweep.mus.clone()
    };
    let mut trace = CsvTrace::new(&["mu", "residual", "quotient", "expected", "rel_error"]);
    let mut worst_residual = 0.0_f64;
    let mut worst_quotient = 0.0_f64;
    for &mu in &mus {
        let w = ground_state(n, a, mu).map_err(CliError::from_core)?;
        let residual =
            hardycrit::energy::strong_residual_norm(&spec, &w).map_err(CliError::from_core)?;
        let q = sobolev_quotient_qa(a, &w, &spec.grid, spec.angular_order)
            .map_err(CliError::from_core)?;
        let expected = sob * (1.0 - a / lam).powf((nf - 1.0) / nf);
        let rel = ((q - expected) / expected).abs();
        worst_residual = worst_residual.max(residual);
        worst_quotient = worst_quotient.max(rel);
        trace.row(&[
            CsvCell::Float(mu),
            CsvCell::Float(residual),
            CsvCell::Float(q),
            CsvCell::Float(expected),
            CsvCell::Float(rel),
        ]);
    }
    trace
        .write(&dir.join("trace.csv"))
        .map_err(CliError::from_io)?;

    // Measured quotient exponent across a coupling sweep (the identity's
    // (N-1)/N power), reported alongside.
    let mut measured_exponent = None;
    if cfg.sweep.coupling_fractions.len() >= 2 {
        let mut pts = Vec::new();
        for &f in &cfg.sweep.coupling_fractions {
            let w = ground_state(n, f * lam, 1.0).map_err(CliError::from_core)?;
            let q = sobolev_quotient_qa(f * lam, &w, &spec.grid, spec.angular_order)
                .map_err(CliError::from_core)?;
            pts.push(((1.0 - f).ln(), (q / sob).ln()));
        }
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        measured_exponent = Some((m * sxy - sx * sy) / (m * sxx - sx * sx));
    }

    let pass = worst_residual <= 1e-6 && worst_quotient <= 1e-4;
    Ok(Outcome {
        report: json!({
            "experiment": "verify-groundstate",
            "config": config_echo(cfg),
            "sobolev_constant": sob,
            "lambda_n": lam,
            "worst_residual": worst_residual,
            "worst_quotient_error": worst_quotient,
            "expected_exponent": (nf - 1.0) / nf,
            "measured_exponent": measured_exponent,
            "pass": pass,
        }),
        exit_hypothesis_violated: false,
        exit_non_convergence: !pass,
    })
}

/// hardy: quotient floor audit over a coupling sweep.
pub fn hardy(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let spec = spec_from(cfg)?;
    let n = spec.dimension;
    let lam = spec.lambda_n();
    let mut trace = CsvTrace::new(&["coupling", "quotient", "floor_margin"]);
    let mut all_above = true;
    let mut rows = Vec::new();
    for &f in &cfg.sweep.coupling_fractions {
        let w = ground_state(n, f * lam, 1.0).map_err(CliError::from_core)?;
        let q = hardy_quotient(&w, &spec.grid, spec.angular_order).map_err(CliError::from_core)?;
        let margin = q - lam;
        all_above &= margin >= -1e-9;
        trace.row(&[
            CsvCell::Float(f * lam),
            CsvCell::Float(q),
            CsvCell::Float(margin),
        ]);
        rows.push(json!({"coupling": f * lam, "quotient": q}));
    }
    trace
        .write(&dir.join("trace.csv"))
        .map_err(CliError::from_io)?;
    Ok(Outcome {
        report: json!({
            "experiment": "hardy",
            "config": config_echo(cfg),
            "lambda_n": lam,
            "rows": rows,
            "floor_respected": all_above,
        }),
        exit_hypothesis_violated: false,
        exit_non_convergence: !all_above,
    })
}

/// thresholds: every explicit constant, the ε₀ gate and the positivity gate.
pub fn thresholds(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let spec = spec_from(cfg)?;
    let lam = spec.lambda_n();
    let nf = spec.dimension as f64;
    let report = threshold_report(&spec).map_err(CliError::from_core)?;
    let sob = report.sobolev;

    let mut trace = CsvTrace::new(&["lambda", "tilde_c", "branch", "tilde_c1", "hat_c"]);
    let fractions = if cfg.sweep.coupling_fractions.is_empty() {
        vec![0.1, 0.3, 0.5, 0.7, 0.9]
    } else {
        cfg.sweep.coupling_fractions.clone()
    };
    for &f in &fractions {
        let lambda = f * lam;
        let tc = tilde_c(spec.dimension, lambda, &spec.k, sob).ok();
        let tc1 = tilde_c1(spec.dimension, lambda, &spec.k, sob).ok();
        let hc = hat_c(spec.dimension, lambda, &spec.k, sob).ok();
        trace.row(&[
            CsvCell::Float(lambda),
            CsvCell::Float(tc.map(|v| v.0).unwrap_or(f64::NAN)),
            CsvCell::Text(
                tc.map(|v| format!("{:?}", v.1)).unwrap_or_default(),
            ),
            CsvCell::Float(tc1.map(|v| v.0).unwrap_or(f64::NAN)),
            CsvCell::Float(hc.map(|v| v.0).unwrap_or(f64::NAN)),
        ]);
    }
    trace
        .write(&dir.join("trace.csv"))
        .map_err(CliError::from_io)?;

    // Positivity gate 2(1-λ/Λ)^{(N-1)/2} > 1 for all λ ≤ ε̄₀.
    let positivity_gate = report.eps0.map(|e0| {
        let mut ok = true;
        for i in 1..=32 {
            let lambda = e0 * i as f64 / 32.0;
            if 2.0 * (1.0 - lambda / lam).powf((nf - 1.0) / 2.0) <= 1.0 {
                ok = false;
            }
        }
        ok
    });

    Ok(Outcome {
        report: json!({
            "experiment": "thresholds",
            "config": config_echo(cfg),
            "thresholds": serde_json::to_value(&report).unwrap(),
            "positivity_gate_holds": positivity_gate,
        }),
        exit_hypothesis_violated: false,
        exit_non_convergence: false,
    })
}

/// pohozaev-audit: run the nonexistence checks; finding an obstruction sets
/// the hypothesis-violated exit code.
pub fn pohozaev_audit(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let spec = spec_from(cfg)?;
    let verdict = nonexistence_audit(&spec).map_err(CliError::from_core)?;
    let obstructed = !matches!(verdict, ObstructionVerdict::NoObstructionFound);
    if cfg.output.write_fields {
        if let ObstructionVerdict::NegativeI1 { witness, .. } = &verdict {
            write_field(dir, "i1_witness", witness).map_err(CliError::from_io)?;
        }
    }
    Ok(Outcome {
        report: json!({
            "experiment": "pohozaev-audit",
            "config": config_echo(cfg),
            "verdict": serde_json::to_value(&verdict).unwrap(),
            "obstructed": obstructed,
        }),
        exit_hypothesis_violated: obstructed,
        exit_non_convergence: false,
    })
}

/// solve: Nehari-constrained radial descent from the configured init.
pub fn solve(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let spec = spec_from(cfg)?;
    let n = spec.dimension;
    let a = spec.coupling;
    let opts = cfg.solver.to_options();

    let (init, seed_note) = match cfg.init.clone().unwrap_or(InitBlock::GroundState {
        scale: 1.0,
        perturbation: 0.0,
    }) {
        InitBlock::GroundState {
            scale,
            perturbation,
        } => {
            let mut f = ground_state(n, a, scale).map_err(CliError::from_core)?;
            if perturbation != 0.0 {
                f.push(
                    perturbation,
                    RadialProfile::talenti(n, 2.0 * scale).map_err(CliError::from_core)?,
                    vec![0.0; n as usize],
                );
            }
            (f, serde_json::Value::Null)
        }
        InitBlock::Talenti { scale } => (
            talenti(n, scale, &vec![0.0; n as usize]).map_err(CliError::from_core)?,
            serde_json::Value::Null,
        ),
        InitBlock::MountainPassSeed => {
            // Theorem-style seed: the first μ with a positive existence
            // integral certifies J(t₀ w_μ) < c*.
            let mus = if cfg.sweep.mus.is_empty() {
                vec![1e-1, 1e-2, 1e-3, 1e-4]
            } else {
                cfg.sweep.mus.clone()
            };
            let big_h = spec.h.value_at_zero().max(spec.h.limsup_at_infinity());
            let mut chosen = None;
            for &mu in &mus {
                let v = condition_h_integral(&spec.h, a, n, mu, &spec.grid, spec.angular_order)
                    .map_err(CliError::from_core)?;
                if v > 0.0 {
                    chosen = Some((mu, v));
                    break;
                }
            }
            let (mu0, value) = chosen.ok_or_else(|| {
                CliError::Hypothesis(
                    "no μ in the sweep certifies the existence integral".into(),
                )
            })?;
            let f = ground_state(n, a + big_h, mu0).map_err(CliError::from_core)?;
            (f, json!({"mu0": mu0, "condition_integral": value}))
        }
    };

    let result = solve_radial(&spec, &init, &opts).map_err(CliError::from_core)?;

    let mut trace = CsvTrace::new(&[
        "iteration",
        "j_value",
        "residual",
        "nehari_t",
        "step",
        "mu",
        "center_distance",
    ]);
    for rec in &result.trace {
        trace.row(&[
            CsvCell::Int(rec.iteration as i64),
            CsvCell::Float(rec.j_value),
            CsvCell::Float(rec.residual),
            CsvCell::Float(rec.nehari_t),
            CsvCell::Float(rec.step),
            CsvCell::Float(rec.mu.unwrap_or(f64::NAN)),
            CsvCell::Float(rec.center_distance.unwrap_or(f64::NAN)),
        ]);
    }
    trace
        .write(&dir.join("trace.csv"))
        .map_err(CliError::from_io)?;
    if cfg.output.write_fields {
        write_field(dir, "solution", &result.field).map_err(CliError::from_io)?;
    }

    let converged = result.converged;
    Ok(Outcome {
        report: json!({
            "experiment": "solve",
            "config": config_echo(cfg),
            "seed": seed_note,
            "energy": serde_json::to_value(&result.energy).unwrap(),
            "residual": result.residual,
            "iterations": result.iterations,
            "converged": result.converged,
            "threshold": result.threshold,
            "below_threshold": result.below_threshold,
            "threshold_margin": result
                .threshold
                .map(|c| (c - result.energy.j_value) / c),
            "localization": result.localization,
        }),
        exit_hypothesis_violated: false,
        exit_non_convergence: !converged,
    })
}

/// multiplicity: one localized solve per peak with the separation audit.
pub fn multiplicity(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let spec = spec_from(cfg)?;
    let opts = cfg.solver.to_options();
    let outcome = multiplicity_run(&spec, &opts).map_err(CliError::from_core)?;

    let mut trace = CsvTrace::new(&[
        "peak",
        "iteration",
        "j_value",
        "residual",
        "nehari_t",
        "mu",
        "center_distance",
    ]);
    for (result, &peak) in outcome.results.iter().zip(&outcome.peak_of) {
        for rec in &result.trace {
            trace.row(&[
                CsvCell::Int(peak as i64),
                CsvCell::Int(rec.iteration as i64),
                CsvCell::Float(rec.j_value),
                CsvCell::Float(rec.residual),
                CsvCell::Float(rec.nehari_t),
                CsvCell::Float(rec.mu.unwrap_or(f64::NAN)),
                CsvCell::Float(rec.center_distance.unwrap_or(f64::NAN)),
            ]);
        }
    }
    trace
        .write(&dir.join("trace.csv"))
        .map_err(CliError::from_io)?;
    if cfg.output.write_fields {
        for (i, result) in outcome.results.iter().enumerate() {
            write_field(dir, &format!("peak_{i}"), &result.field).map_err(CliError::from_io)?;
        }
    }

    let all_converged = outcome.results.iter().all(|r| r.converged);
    let results_json: Vec<serde_json::Value> = outcome
        .results
        .iter()
        .zip(&outcome.peak_of)
        .map(|(r, &peak)| {
            json!({
                "peak": peak,
                "j_value": r.energy.j_value,
                "residual": r.residual,
                "converged": r.converged,
                "below_threshold": r.below_threshold,
                "localization": r.localization,
                "mu": r.field.bubbles[0].profile.scale(),
            })
        })
        .collect();

    Ok(Outcome {
        report: json!({
            "experiment": "multiplicity",
            "config": config_echo(cfg),
            "threshold": outcome.threshold,
            "results": results_json,
            "separation": serde_json::to_value(&outcome.separation).unwrap(),
            "certified": outcome.certified,
        }),
        exit_hypothesis_violated: false,
        exit_non_convergence: !all_converged,
    })
}

/// concentration: localized solves along a decreasing λ-sweep with the
/// concentration trend verification.
pub fn concentration(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let base = spec_from(cfg)?;
    let lam = base.lambda_n();
    let opts = cfg.solver.to_options();
    let mut fractions = cfg.sweep.coupling_fractions.clone();
    fractions.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let frame =
        PeakFrame::from_profile(&base.k, base.dimension).map_err(CliError::from_core)?;
    let m = frame.maxima.len();

    // Sweep points run concurrently; report assembly keeps sweep order.
    let jobs: Vec<(usize, usize)> = fractions
        .iter()
        .enumerate()
        .flat_map(|(i, _)| (0..m).map(move |j| (i, j)))
        .collect();
    let solved: Vec<Result<(f64, usize, SolveResult), CliError>> = {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(i, j)| {
                let lambda = fractions[i] * lam;
                let mut spec_i = base.clone();
                spec_i.coupling = lambda;
                let r = solve_localized(&spec_i, j, &opts).map_err(CliError::from_core)?;
                Ok((lambda, j, r))
            })
            .collect()
    };

    let mut results: Vec<(f64, Field)> = Vec::new();
    let mut peak_of: Vec<usize> = Vec::new();
    let mut rows_json = Vec::new();
    let mut all_converged = true;
    let mut trace = CsvTrace::new(&[
        "lambda",
        "peak",
        "mu",
        "j_value",
        "threshold",
        "converged",
    ]);
    for item in solved {
        let (lambda, j, r) = item?;
        all_converged &= r.converged;
        trace.row(&[
            CsvCell::Float(lambda),
            CsvCell::Int(j as i64),
            CsvCell::Float(r.field.bubbles[0].profile.scale().unwrap_or(f64::NAN)),
            CsvCell::Float(r.energy.j_value),
            CsvCell::Float(r.threshold.unwrap_or(f64::NAN)),
            CsvCell::Int(r.converged as i64),
        ]);
        rows_json.push(json!({
            "lambda": lambda,
            "peak": j,
            "j_value": r.energy.j_value,
            "mu": r.field.bubbles[0].profile.scale(),
            "converged": r.converged,
        }));
        results.push((lambda, r.field.clone()));
        peak_of.push(j);
    }
    let trend =
        concentration_verify(&results, &frame, &base, &peak_of).map_err(CliError::from_core)?;
    let mut trend_trace = CsvTrace::new(&[
        "lambda",
        "peak",
        "mass_fraction",
        "dirichlet_total",
        "critical_total",
    ]);
    for row in &trend.rows {
        trend_trace.row(&[
            CsvCell::Float(row.lambda),
            CsvCell::Int(row.peak as i64),
            CsvCell::Float(row.mass_fraction),
            CsvCell::Float(row.dirichlet_total),
            CsvCell::Float(row.critical_total),
        ]);
    }
    trace
        .write(&dir.join("trace.csv"))
        .map_err(CliError::from_io)?;
    trend_trace
        .write(&dir.join("concentration.csv"))
        .map_err(CliError::from_io)?;

    Ok(Outcome {
        report: json!({
            "experiment": "concentration",
            "config": config_echo(cfg),
            "rows": rows_json,
            "trend": serde_json::to_value(&trend).unwrap(),
        }),
        exit_hypothesis_violated: false,
        exit_non_convergence: !all_converged,
    })
}

/// hypotheses: checker reports for h and k plus condition-integral sweeps.
pub fn hypotheses(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome, CliError> {
    let spec = spec_from(cfg)?;
    let n = spec.dimension;
    let a = spec.coupling;

    let mut trace = CsvTrace::new(&["mu", "condition_h", "condition_k"]);
    let mut condition_rows = Vec::new();
    for &mu in &cfg.sweep.mus {
        let ch = condition_h_integral(&spec.h, a, n, mu, &spec.grid, spec.angular_order).ok();
        let ck = condition_k_integral(&spec.k, a, n, mu, &spec.grid, spec.angular_order).ok();
        trace.row(&[
            CsvCell::Float(mu),
            CsvCell::Float(ch.unwrap_or(f64::NAN)),
            CsvCell::Float(ck.unwrap_or(f64::NAN)),
        ]);
        condition_rows.push(json!({"mu": mu, "condition_h": ch, "condition_k": ck}));
    }
    trace
        .write(&dir.join("trace.csv"))
        .map_err(CliError::from_io)?;

    // Gate: the hypothesis set of the regime the config describes.
    let h_active = !spec.h.is_constant() || spec.h.baseline() != 0.0;
    let k_active = !spec.k.is_constant();
    let mut violated = false;
    if h_active || !k_active {
        violated |= !spec.h_hypotheses.all_passed();
    }
    if k_active {
        for name in ["K0", "K1", "K2"] {
            violated |= !spec.k_hypotheses.passed(name);
        }
    }

    let eps0_value = eps0(n, &spec.k).ok();
    let m_delta = if matches!(
        cfg.problem.k,
        hardycrit::KPreset::K1Example { .. }
    ) {
        Some(
            [0.05_f64, 0.02, 0.01, 0.005]
                .iter()
                .map(|&d| json!({"delta": d, "separated_maxima": delta_separated_count(d)}))
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };

    Ok(Outcome {
        report: json!({
            "experiment": "hypotheses",
            "config": config_echo(cfg),
            "h_hypotheses": serde_json::to_value(&spec.h_hypotheses).unwrap(),
            "k_hypotheses": serde_json::to_value(&spec.k_hypotheses).unwrap(),
            "condition_integrals": condition_rows,
            "eps0": eps0_value,
            "delta_separated_maxima": m_delta,
        }),
        exit_hypothesis_violated: violated,
        exit_non_convergence: false,
    })
}
