//! Analysis runners: each turns a validated config into a JSON fragment,
//! with hypothesis-gate failures reported separately from hard errors so the
//! driver can map them to distinct exit codes.

use crate::config::{Config, Input};
use anyhow::anyhow;
use planode::bounds::{
    classical_envelopes, envelope_verify, log_integral_bounds, riccati_envelope, stability_check,
    system_envelopes, LogBoundKind, Stability, SystemEnvelopeKind,
};
use planode::nonconj::{case_report, nonconjugation_check, NonConjError};
use planode::ode::{solve_riccati, solve_system, SolveOptions};
use planode::oscillation::{classify_oscillation, leighton_test, OscClass, OscillationOptions};
use planode::quad::HorizonPolicy;
use planode::riccati::{
    classify_solution_role, find_boundary_bracket, reg_boundary, sign_pattern_check,
    sign_pattern_predict, RiccatiError,
};
use planode::systemreg::{classify_regularity, minimal_solution, SystemRegularityClass};
use serde_json::{json, Value};

pub enum RunError {
    Gate(String),
    Hard(anyhow::Error),
}

impl<E: std::error::Error + Send + Sync + 'static> From<E> for RunError {
    fn from(e: E) -> Self {
        RunError::Hard(anyhow!(e))
    }
}

type RunResult = Result<Value, RunError>;

fn opts(cfg: &Config) -> SolveOptions {
    SolveOptions::with_tol(cfg.run.tol)
}

fn require_system(cfg: &Config) -> Result<&planode::ode::SystemSpec, RunError> {
    cfg.system().ok_or_else(|| {
        RunError::Gate("this analysis needs a [system] or [equation] input".to_string())
    })
}

fn class_name(c: OscClass) -> &'static str {
    match c {
        OscClass::Oscillatory => "oscillatory",
        OscClass::NonOscillatory => "non_oscillatory",
        OscClass::WeakOscillatory => "weak_oscillatory",
        OscClass::WeakNonOscillatory => "weak_non_oscillatory",
        OscClass::HalfOscillatory => "half_oscillatory",
        OscClass::Singular => "singular",
        OscClass::Undetermined => "undetermined",
    }
}

fn finite(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

pub fn classify(cfg: &Config) -> RunResult {
    let sys = require_system(cfg)?;
    let osc_opts = OscillationOptions {
        solve: SolveOptions::with_tol(cfg.run.tol.max(1e-10)),
        ..Default::default()
    };
    let rep = classify_oscillation(sys, cfg.run.horizon, &osc_opts)?;
    let leighton = leighton_test(sys, &HorizonPolicy::default())?;
    let osc_offsets = rep.witnesses.iter().filter(|w| w.phi_oscillates && w.psi_oscillates).count();
    Ok(json!({
        "oscillation_class": class_name(rep.class),
        "horizon": rep.horizon,
        "nu_grid": rep.witnesses.len(),
        "offsets_with_both_components_oscillating": osc_offsets,
        "theta_total_variation": finite(rep.theta_total_variation),
        "witnesses_head": rep.witnesses.iter().take(8).map(|w| json!({
            "nu": finite(w.nu),
            "phi_zeros": w.phi_zeros,
            "psi_zeros": w.psi_zeros,
            "phi_oscillates": w.phi_oscillates,
            "psi_oscillates": w.psi_oscillates,
        })).collect::<Vec<_>>(),
        "leighton": {
            "verdict": format!("{:?}", leighton.verdict),
            "failing_gate": leighton.failing_gate,
            "first_integral": format!("{:?}", leighton.first_integral),
            "second_integral": format!("{:?}", leighton.second_integral),
        },
    }))
}

pub fn riccati(cfg: &Config) -> RunResult {
    let spec = cfg.riccati();
    let o = opts(cfg);
    let horizon = cfg.run.horizon;
    let cert_a = spec.a.sign_certify(spec.t0, horizon, 512);
    let cert_c = spec.c.sign_certify(spec.t0, horizon, 512);

    let boundary = match find_boundary_bracket(&spec, spec.t0, 0.0, horizon, &o, 1e6) {
        Ok(Some(bracket)) => match reg_boundary(&spec, spec.t0, bracket, horizon, &o) {
            Ok(b) => Some(b),
            Err(RiccatiError::Hypothesis { .. }) => None,
            Err(e) => return Err(e.into()),
        },
        Ok(None) => None,
        Err(e) => return Err(e.into()),
    };

    let mut runs = Vec::new();
    for &x0 in &cfg.init.values {
        let role = classify_solution_role(&spec, x0, spec.t0, 0.0, horizon, &o)?;
        let pattern = match sign_pattern_predict(&spec, x0, horizon, &o) {
            Ok(pred) => {
                let tr = solve_riccati(&spec, x0, (spec.t0, horizon), &o)?;
                let check = pred.pattern.as_ref().map(|p| sign_pattern_check(p, &tr, 1e-9));
                json!({
                    "clause": pred.clause,
                    "predicted": pred.pattern.as_ref().map(|p| format!("{:?}", p.signs)),
                    "regular_expected": pred.regular_expected,
                    "check": check.map(|c| json!({
                        "pass": c.pass,
                        "observed": format!("{:?}", c.observed.signs),
                        "mismatch": c.mismatch,
                    })),
                })
            }
            Err(RiccatiError::CaseMismatch { what }) => json!({ "case_mismatch": what }),
            Err(e) => return Err(e.into()),
        };
        runs.push(json!({
            "x_init": finite(x0),
            "role": format!("{:?}", role.role),
            "nu_verdict": role.nu_kind.map(|k| format!("{k:?}")),
            "blowup": role.evidence[0].blowup.map(|b| json!({
                "t_escape": finite(b.t_escape),
                "direction": format!("{:?}", b.direction),
            })),
            "sign_pattern": pattern,
        }));
    }

    // initial-value envelope on the first gated init
    let envelope = cfg
        .init
        .values
        .first()
        .and_then(|&x0| riccati_envelope(&spec, x0, horizon).ok().map(|env| (x0, env)))
        .map(|(x0, env)| {
            let contained = solve_riccati(&spec, x0, (spec.t0, horizon), &o)
                .map(|tr| envelope_verify(&tr, 0, &env, 1e-7 * tr.sup_component(0).max(1.0), false).pass)
                .unwrap_or(false);
            json!({ "x_init": finite(x0), "contained": contained })
        });

    Ok(json!({
        "cert_a": format!("{:?}", cert_a.verdict),
        "cert_c": format!("{:?}", cert_c.verdict),
        "regular_set_boundary": boundary.map(finite),
        "runs": runs,
        "envelope": envelope,
    }))
}

pub fn stability(cfg: &Config) -> RunResult {
    let sys = require_system(cfg)?;
    let rep = match stability_check(sys, cfg.run.horizon, &opts(cfg)) {
        Ok(r) => r,
        Err(planode::bounds::BoundsError::GateFailed { gate }) => return Err(RunError::Gate(gate)),
        Err(e) => return Err(e.into()),
    };
    let verdict = match rep.verdict {
        Stability::Stable => "stable",
        Stability::AsymptoticallyStable => "asymptotically_stable",
        Stability::Unstable => "unstable",
        Stability::Undetermined => "undetermined",
    };
    let ts: Vec<f64> = rep.f1_samples.iter().map(|p| p.0).collect();
    let vs: Vec<f64> = rep.f1_samples.iter().map(|p| p.1).collect();
    let (slope, _) = planode_linear_fit(&ts, &vs);
    Ok(json!({
        "verdict": verdict,
        "criterion_1_bounded": rep.f1.bounded,
        "criterion_2_bounded": rep.f2.bounded,
        "criterion_1_slope": finite(slope),
        "criterion_1_sup": finite(rep.f1.sup_late),
        "criterion_2_sup": finite(rep.f2.sup_late),
        "solution_tail_fractions": rep.solution_tail_fractions.iter().map(|v| finite(*v)).collect::<Vec<_>>(),
    }))
}

fn planode_linear_fit(ts: &[f64], vs: &[f64]) -> (f64, f64) {
    let n = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / n;
    let mv = vs.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (t, v) in ts.iter().zip(vs) {
        num += (t - mt) * (v - mv);
        den += (t - mt) * (t - mt);
    }
    let s = if den > 0.0 { num / den } else { 0.0 };
    (s, mv - s * mt)
}

pub fn bounds(cfg: &Config) -> RunResult {
    let o = opts(cfg);
    let horizon = cfg.run.horizon;
    match &cfg.input {
        Input::System { sys, power } => {
            let mut ratios = Vec::new();
            let mut gate_failures = Vec::new();
            for &r0 in &cfg.init.ratios {
                match system_envelopes(sys, (1.0, r0), SystemEnvelopeKind::PhiTwoSided, horizon, &o) {
                    Ok(env) => {
                        let tr = solve_system(sys, (1.0, r0), (sys.t0, horizon), &o)?;
                        let rec = envelope_verify(&tr, 0, &env, 1e-6 * tr.sup_component(0).max(1.0), false);
                        ratios.push(json!({
                            "ratio": finite(r0),
                            "contained": rec.pass,
                            "max_violation": finite(rec.max_lower_violation.max(rec.max_upper_violation)),
                        }));
                    }
                    Err(planode::bounds::BoundsError::GateFailed { gate }) => gate_failures.push(gate),
                    Err(e) => return Err(e.into()),
                }
            }
            let classical = match power {
                Some(p) => {
                    let env = classical_envelopes(p).map_err(|e| RunError::Hard(anyhow!(e)))?;
                    let ordering = env.ordering_at(horizon);
                    Some(json!({
                        "ordering_at_horizon": ordering.iter().map(|(n, v)| json!([n, finite(*v)])).collect::<Vec<_>>(),
                    }))
                }
                None => None,
            };
            if ratios.is_empty() && !gate_failures.is_empty() {
                return Err(RunError::Gate(gate_failures.join("; ")));
            }
            Ok(json!({ "phi_envelopes": ratios, "gate_failures": gate_failures, "classical": classical }))
        }
        Input::Riccati(spec) => {
            let mut runs = Vec::new();
            let mut gate_failures = Vec::new();
            for &x0 in &cfg.init.values {
                match riccati_envelope(spec, x0, horizon) {
                    Ok(env) => {
                        let tr = solve_riccati(spec, x0, (spec.t0, horizon), &o)?;
                        let rec = envelope_verify(&tr, 0, &env, 1e-7 * tr.sup_component(0).max(1.0), false);
                        runs.push(json!({ "x_init": finite(x0), "contained": rec.pass }));
                    }
                    Err(planode::bounds::BoundsError::GateFailed { gate }) => gate_failures.push(gate),
                    Err(e) => return Err(e.into()),
                }
            }
            let log_bound = match log_integral_bounds(spec, LogBoundKind::Normal, horizon, &o) {
                Ok(rep) => Some(json!({
                    "kind": "normal upper",
                    "pass": rep.pass,
                    "max_violation": finite(rep.max_violation),
                })),
                Err(planode::bounds::BoundsError::GateFailed { gate }) => {
                    gate_failures.push(gate);
                    None
                }
                Err(e) => return Err(e.into()),
            };
            if runs.is_empty() && log_bound.is_none() {
                return Err(RunError::Gate(gate_failures.join("; ")));
            }
            Ok(json!({ "envelopes": runs, "log_integral": log_bound, "gate_failures": gate_failures }))
        }
    }
}

pub fn nonconj(cfg: &Config) -> RunResult {
    let sys = require_system(cfg)?;
    let o = opts(cfg);
    let check = match nonconjugation_check(sys, cfg.run.horizon, cfg.init.grid, &o) {
        Ok(rep) => json!({
            "verdict": format!("{:?}", rep.verdict),
            "gate": rep.gate,
            "from_t": finite(rep.from_t),
            "max_phi_items": rep.runs.iter().map(|r| r.phi_items).max(),
            "max_psi_items": rep.runs.iter().map(|r| r.psi_items).max(),
        }),
        Err(NonConjError::Hypothesis { what }) => return Err(RunError::Gate(what)),
        Err(e) => return Err(e.into()),
    };
    let case = match case_report(sys, cfg.run.horizon, &o) {
        Ok(rep) => json!({
            "case": format!("{:?}", rep.case),
            "reduced": rep.reduced,
            "clause": rep.clause,
            "iplus_a12_B": format!("{:?}", rep.iplus_a12_b),
            "iplus_a21_minusB": format!("{:?}", rep.iplus_a21_mb),
            "oscillation": rep.oscillation.map(class_name),
            "distinguished": rep.distinguished.iter().map(|d| json!({
                "label": d.label,
                "phi_tail": format!("{:?}", d.phi_tail),
                "psi_tail": format!("{:?}", d.psi_tail),
                "ratio_limit": d.ratio_vs_generic.as_ref().map(|r| finite(r.limit)),
            })).collect::<Vec<_>>(),
            "wronskian_min": rep.wronskian_min.map(finite),
            "notes": rep.notes,
        }),
        Err(NonConjError::CaseUnmatched { a12, a21 }) => json!({
            "skipped": format!("signs match no case: a12 {a12:?}, a21 {a21:?}")
        }),
        Err(NonConjError::Hypothesis { what }) => json!({ "skipped": what }),
        Err(e) => return Err(e.into()),
    };
    Ok(json!({ "nonconjugation": check, "case_report": case }))
}

pub fn regularity(cfg: &Config) -> RunResult {
    let sys = require_system(cfg)?;
    let o = opts(cfg);
    let rep = classify_regularity(sys, cfg.run.horizon, &o)?;
    let minimal = if rep.class == SystemRegularityClass::ExtremalSystem {
        let out_end = cfg.run.horizon * 0.5;
        match minimal_solution(sys, out_end, cfg.run.horizon, &o) {
            Ok(m) => Some(json!({
                "ratio_to_seed": finite(m.ratio_to_seed.limit),
                "ratio_error_bar": finite(m.ratio_to_seed.error_bar),
                "weighted_integral": format!("{:?}", m.weighted_integral_kind),
            })),
            Err(planode::systemreg::SystemRegError::Hypothesis { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    Ok(json!({
        "class": format!("{:?}", rep.class),
        "boundaries": rep.boundaries.iter().map(|b| finite(*b)).collect::<Vec<_>>(),
        "a12_certificate": format!("{:?}", rep.a12_verdict),
        "stable_across_horizons": rep.stable_across_horizons,
        "minimal_solution": minimal,
    }))
}

pub fn check() -> (Value, bool) {
    let results = planode::acceptance::run_all();
    let all = results.iter().all(|r| r.passed);
    let list: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
            })
        })
        .collect();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {:02}: {} — {}", r.id, r.name, r.detail);
    }
    (json!({ "criteria": list, "all_passed": all }), all)
}
