//! Polar substitution for the planar system, non-conjugation verification
//! (each solution component vanishing at most once, possibly on one
//! segment), and the case analysis for sign-definite coefficient pairs with
//! construction of the distinguished solutions.
//!
//! Writing `φ = e^{∫a11} ρ sin θ`, `ψ = e^{∫a22} ρ cos θ` decouples the
//! radius from the phase:
//!
//! ```text
//! ρ' = [Wφ(t) + Wψ(t)] ρ sin θ cos θ
//! θ' =  Wφ(t) cos² θ - Wψ(t) sin² θ
//! ```
//!
//! with the weights `Wφ = a12 e^{-∫B}` (attached to the first equation) and
//! `Wψ = a21 e^{∫B}` (attached to the second). With `a12 ≥ 0 ≥ a21` this
//! gives `θ' ≥ 0` pointwise: the normalized radius vector rotates
//! monotonically clockwise, which is what makes every component vanish at
//! most once.

use crate::expr::{SignCertificate, SignVerdict};
use crate::ode::{
    lift_riccati, solve_ode, solve_riccati, EscapePolicy, OdeError, OdeProblem, SolveOptions,
    SystemSpec, Trajectory, TrajectoryKind, ZeroItem,
};
use crate::oscillation::{classify_oscillation, OscClass, OscillationOptions};
use crate::quad::{Cumulative, HorizonPolicy, QuadError, QuadOptions, VerdictKind};
use crate::riccati::{extremal_from_normal, iplus_verdict, RiccatiError};
use crate::systemreg::{find_regular_solution, RatioLimit, SystemRegError};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum NonConjError {
    #[error("hypothesis not met: {what}")]
    Hypothesis { what: String },
    #[error("trivial solution")]
    TrivialSolution,
    #[error("coefficient signs match no case: a12 {a12:?}, a21 {a21:?}")]
    CaseUnmatched { a12: SignVerdict, a21: SignVerdict },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    #[error(transparent)]
    SystemReg(#[from] SystemRegError),
    #[error(transparent)]
    Oscillation(#[from] crate::oscillation::OscError),
    #[error(transparent)]
    Trajectory(#[from] crate::ode::TrajectoryError),
}

// ---------------------------------------------------------------------------
// Polar substitution
// ---------------------------------------------------------------------------

/// Amplitude-phase form of a solution: `ρ > 0`, unwrapped `θ`, and the two
/// phase weights sampled on the same grid.
pub struct PolarTrajectory {
    pub rho: Trajectory,
    pub theta: Trajectory,
    /// `[Wφ, Wψ]` on the `θ` grid
    pub weights: Trajectory,
    pub reconstruction_residual: f64,
    pub rho_rate_residual: f64,
}

/// Convert a solution to polar form. The phase is obtained by integrating
/// its own ODE (no branch-cut unwrapping); the reconstruction residual ties
/// the phase trajectory back to the source solution.
pub fn to_polar(sys: &SystemSpec, traj: &Trajectory) -> Result<PolarTrajectory, NonConjError> {
    let (lo, hi) = traj.span();
    let init = traj.first();
    let rho0 = (init[0] * init[0] + init[1] * init[1]).sqrt();
    if rho0 < 1e-300 {
        return Err(NonConjError::TrivialSolution);
    }
    let b_expr = sys.b_expr();
    let bcum = std::sync::Arc::new(Cumulative::new(
        move |tau| b_expr.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() }),
        lo,
        hi,
        QuadOptions::default(),
    )?);
    let weights_at = {
        let bcum = bcum.clone();
        let (a12, a21) = (sys.a12.clone(), sys.a21.clone());
        move |t: f64| -> Result<(f64, f64), OdeError> {
            let b = bcum.eval(t).map_err(|e| OdeError::Coefficient { t, what: e.to_string() })?;
            let a12v = a12.eval(t).map_err(|e| OdeError::Coefficient { t, what: e.to_string() })?;
            let a21v = a21.eval(t).map_err(|e| OdeError::Coefficient { t, what: e.to_string() })?;
            Ok((a12v * (-b).exp(), a21v * b.exp()))
        }
    };

    let theta0 = init[0].atan2(init[1]);
    let w_rhs = weights_at.clone();
    let rhs = move |t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), OdeError> {
        let (wphi, wpsi) = w_rhs(t)?;
        let (s, c) = y[0].sin_cos();
        dy[0] = wphi * c * c - wpsi * s * s;
        Ok(())
    };
    let theta = solve_ode(
        &OdeProblem {
            rhs: &rhs,
            init: &[theta0],
            span: (lo, hi),
            names: &["theta"],
            kind: TrajectoryKind::RealScalar,
            escape: EscapePolicy::ErrorOut,
            positivity: None,
        },
        &SolveOptions::default(),
    )?;

    // ρ and the weight samples on the θ grid, plus residuals
    let (a11c, a22c) = (sys.a11.clone(), sys.a22.clone());
    let a11cum = std::sync::Arc::new(Cumulative::new(
        move |tau| a11c.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() }),
        lo,
        hi,
        QuadOptions::default(),
    )?);
    let a22cum = std::sync::Arc::new(Cumulative::new(
        move |tau| a22c.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() }),
        lo,
        hi,
        QuadOptions::default(),
    )?);

    let n = theta.len();
    let mut rho_vals = Vec::with_capacity(n);
    let mut rho_ders = Vec::with_capacity(n);
    let mut w_vals = Vec::with_capacity(2 * n);
    let mut w_ders = Vec::with_capacity(2 * n);
    let mut recon = 0.0f64;
    let mut rate = 0.0f64;
    for i in 0..n {
        let t = theta.times()[i];
        let e11 = a11cum.eval(t)?;
        let e22 = a22cum.eval(t)?;
        let phi = traj.eval_component(t, 0)?;
        let psi = traj.eval_component(t, 1)?;
        let u = (-e11).exp() * phi;
        let v = (-e22).exp() * psi;
        let rho = (u * u + v * v).sqrt();
        let (wphi, wpsi) = weights_at(t)?;
        // u' = Wφ v, v' = Wψ u
        let du = wphi * v;
        let dv = wpsi * u;
        let drho = (u * du + v * dv) / rho;
        rho_vals.push(rho);
        rho_ders.push(drho);
        w_vals.push(wphi);
        w_vals.push(wpsi);
        w_ders.push(0.0);
        w_ders.push(0.0);

        let th = theta.value_at(i, 0);
        let scale = phi.abs().max(psi.abs()).max(rho * e11.exp().max(e22.exp()));
        recon = recon.max((e11.exp() * rho * th.sin() - phi).abs() / scale);
        recon = recon.max((e22.exp() * rho * th.cos() - psi).abs() / scale);
        // (ρ²)' = 2 (Wφ + Wψ) ρ² sinθ cosθ, checked through u, v directly
        let formula = (wphi + wpsi) * rho * th.sin() * th.cos();
        rate = rate.max((drho - formula).abs() / (1.0 + formula.abs()));
    }
    let ts = theta.times().to_vec();
    Ok(PolarTrajectory {
        rho: Trajectory::from_samples(TrajectoryKind::RealScalar, &["rho"], ts.clone(), rho_vals, rho_ders),
        theta: theta.clone(),
        weights: Trajectory::from_samples(TrajectoryKind::Custom, &["w_phi", "w_psi"], ts, w_vals, w_ders),
        reconstruction_residual: recon,
        rho_rate_residual: rate,
    })
}

// ---------------------------------------------------------------------------
// Non-conjugation verification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NonConjVerdict {
    Satisfied,
    Violated,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct InitZeroCounts {
    pub angle: f64,
    pub phi_items: usize,
    pub psi_items: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonConjReport {
    pub verdict: NonConjVerdict,
    /// which sign case admitted the check
    pub gate: String,
    /// start of the verified ray (t0, or the witness time for the mixed case)
    pub from_t: f64,
    pub runs: Vec<InitZeroCounts>,
    pub cert_a12: SignCertificate,
    pub cert_a21: SignCertificate,
}

/// Verify the non-conjugation condition over a grid of initial directions.
/// Requires `a12 ≥ 0` with either `a21 ≥ 0`, or `a21 ≤ 0` together with a
/// solution whose first component stays nonzero (found automatically).
pub fn nonconjugation_check(
    sys: &SystemSpec,
    horizon: f64,
    init_grid: usize,
    opts: &SolveOptions,
) -> Result<NonConjReport, NonConjError> {
    let t0 = sys.t0;
    let cert_a12 = sys.a12.sign_certify(t0, horizon, 512);
    let cert_a21 = sys.a21.sign_certify(t0, horizon, 512);
    if !cert_a12.admits_non_negative() {
        return Err(NonConjError::Hypothesis {
            what: format!("a12 must be non-negative, certificate {:?}", cert_a12.verdict),
        });
    }
    let (gate, from_t) = match cert_a21.verdict {
        SignVerdict::NonNegative => ("both coefficients non-negative".to_string(), t0),
        SignVerdict::NonPositive => {
            // need a witness with φ ≠ 0 on a tail
            let witness = find_regular_solution(sys, horizon, opts)?;
            let Some(w) = witness else {
                return Err(NonConjError::Hypothesis {
                    what: "mixed-sign case needs a solution with eventually nonvanishing first component"
                        .into(),
                });
            };
            let zs = crate::ode::zero_sets(&w, 0, 1e-9);
            let from = zs.last().map(|z| z.end()).unwrap_or(t0);
            ("a21 non-positive with a nonvanishing witness".to_string(), from)
        }
        other => {
            return Err(NonConjError::Hypothesis { what: format!("a21 changes sign: {other:?}") })
        }
    };

    let angles: Vec<f64> =
        (0..init_grid).map(|k| std::f64::consts::PI * k as f64 / init_grid as f64).collect();
    let runs_res: Vec<Result<InitZeroCounts, String>> = crate::batch::map(angles, |beta| {
        let count = |o: &SolveOptions| -> Result<(usize, usize), String> {
            let tr = crate::ode::solve_system(sys, (beta.cos(), beta.sin()), (from_t, horizon), o)
                .map_err(|e| e.to_string())?;
            Ok((
                crate::ode::zero_sets(&tr, 0, 1e-9).len(),
                crate::ode::zero_sets(&tr, 1, 1e-9).len(),
            ))
        };
        let (mut p, mut q) = count(opts)?;
        if p > 1 || q > 1 {
            // re-check at a tighter tolerance before reporting a violation
            let tight = SolveOptions { rtol: opts.rtol * 1e-2, atol: opts.atol * 1e-2, ..*opts };
            (p, q) = count(&tight)?;
        }
        Ok(InitZeroCounts { angle: beta, phi_items: p, psi_items: q })
    });
    let mut runs = Vec::with_capacity(runs_res.len());
    for r in runs_res {
        runs.push(r.map_err(|e| NonConjError::Hypothesis { what: e })?);
    }
    let verdict = if runs.iter().all(|r| r.phi_items <= 1 && r.psi_items <= 1) {
        NonConjVerdict::Satisfied
    } else {
        NonConjVerdict::Violated
    };
    Ok(NonConjReport { verdict, gate, from_t, runs, cert_a12, cert_a21 })
}

// ---------------------------------------------------------------------------
// Case analysis and distinguished solutions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoefficientCase {
    /// `a12 ≥ 0, a21 ≥ 0`
    BothNonNegative,
    /// `a12 ≥ 0, a21 ≤ 0`
    MixedSigns,
    Unmatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailSign {
    Positive,
    Negative,
    Changes,
}

#[derive(Debug, Serialize)]
pub struct DistinguishedSolution {
    pub label: String,
    /// sign of each component on the tail `[T, horizon]`, with the time `T`
    /// past which both stay constant
    pub phi_tail: TailSign,
    pub psi_tail: TailSign,
    pub tail_from: f64,
    /// tail estimate of this solution's φ (or ψ) against an independent one
    pub ratio_vs_generic: Option<RatioLimit>,
    /// partial integrals of `a12 J_S/φ²` along this solution
    pub weighted_partials: Vec<(f64, f64)>,
    #[serde(skip)]
    pub pair: Trajectory,
}

#[derive(Debug, Serialize)]
pub struct CaseReport {
    pub case: CoefficientCase,
    /// `φ -> -φ` reduction applied first (for `a12 ≤ 0` inputs)
    pub reduced: bool,
    pub cert_a12: SignCertificate,
    pub cert_a21: SignCertificate,
    pub iplus_a12_b: VerdictKind,
    pub iplus_a21_mb: VerdictKind,
    /// mixed auxiliary integrals, label -> verdict
    pub auxiliary: Vec<(String, VerdictKind)>,
    pub oscillation: Option<OscClass>,
    pub clause: String,
    pub distinguished: Vec<DistinguishedSolution>,
    /// smallest scaled Wronskian between the two distinguished solutions
    pub wronskian_min: Option<f64>,
    pub notes: Vec<String>,
}

fn tail_sign(traj: &Trajectory, comp: usize) -> (TailSign, f64) {
    let n = traj.len();
    let mut from_idx = 0;
    let mut sign = 0.0f64;
    for i in 0..n {
        let s = traj.value_at(i, comp).signum();
        if s != 0.0 && s != sign {
            sign = s;
            from_idx = i;
        }
    }
    let from = traj.times()[from_idx];
    let tail = match sign {
        s if s > 0.0 => TailSign::Positive,
        s if s < 0.0 => TailSign::Negative,
        _ => TailSign::Changes,
    };
    // constant only if the last stretch covers a meaningful part of the span
    let (lo, hi) = traj.span();
    if hi - from < 0.05 * (hi - lo) {
        (TailSign::Changes, from)
    } else {
        (tail, from)
    }
}

fn transpose(sys: &SystemSpec) -> SystemSpec {
    SystemSpec {
        a11: sys.a22.clone(),
        a12: sys.a21.clone(),
        a21: sys.a12.clone(),
        a22: sys.a11.clone(),
        t0: sys.t0,
    }
}

/// Partial integrals of `a12 J_S / φ²` along a ratio solution `x = ψ/φ`
/// (equal to `∫ a12 e^{-∫(B + 2 a12 x)}`), over doubling windows.
fn weighted_partials(
    sys: &SystemSpec,
    x: &Trajectory,
    t0: f64,
    end: f64,
) -> Result<Vec<(f64, f64)>, NonConjError> {
    let (sysc, xs) = (sys.clone(), std::sync::Arc::new(x.clone()));
    let expo = Cumulative::new(
        move |tau| {
            let [a11, a12, _a21, a22] =
                sysc.eval_matrix(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let xv = xs
                .eval_component(tau, 0)
                .map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            Ok((a11 - a22) + 2.0 * a12 * xv)
        },
        t0,
        end,
        QuadOptions::default(),
    )?;
    let expo = std::sync::Arc::new(expo);
    let sysc = sys.clone();
    let cum = Cumulative::new(
        move |tau| {
            let a12 = sysc.a12.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            Ok(a12 * (-expo.eval(tau)?).exp())
        },
        t0,
        end,
        QuadOptions::default(),
    )?;
    let mut out = Vec::new();
    for k in (0..=10).rev() {
        let t = t0 + (end - t0) * (2.0f64).powi(-k);
        out.push((t, cum.eval(t)?));
    }
    Ok(out)
}

/// Build one distinguished solution from the extremal solution of a Riccati
/// spec, lifted through the given system (which may be the transpose).
#[allow(clippy::too_many_arguments)]
fn distinguished_from_extremal(
    label: &str,
    lift_sys: &SystemSpec,
    spec: &crate::ode::RiccatiSpec,
    seed: f64,
    horizon: f64,
    work_end: f64,
    opts: &SolveOptions,
    generic: Option<&Trajectory>,
) -> Result<DistinguishedSolution, NonConjError> {
    let x0 = solve_riccati(spec, seed, (spec.t0, work_end), opts)?;
    if x0.blowup.is_some() {
        return Err(NonConjError::Hypothesis { what: format!("{label}: seed {seed} is not regular") });
    }
    let x_star = extremal_from_normal(spec, &x0, spec.t0, horizon)?;
    let pair = lift_riccati(lift_sys, &x_star, 1.0, spec.t0)?;
    let (phi_tail, t1) = tail_sign(&pair, 0);
    let (psi_tail, t2) = tail_sign(&pair, 1);
    let ratio = match generic {
        Some(g) => Some(crate::systemreg::ratio_limit(&pair, g, 0.3)?),
        None => None,
    };
    let partials = weighted_partials(lift_sys, &x_star, spec.t0, horizon)?;
    Ok(DistinguishedSolution {
        label: label.to_string(),
        phi_tail,
        psi_tail,
        tail_from: t1.max(t2),
        ratio_vs_generic: ratio,
        weighted_partials: partials,
        pair,
    })
}

/// Case analysis for sign-definite coefficient pairs: determines the case,
/// evaluates the gate integrals, picks the clause, constructs the
/// distinguished solutions from the extremal Riccati solutions of the
/// induced equation and its transpose, and verifies the asserted tail signs
/// and ratio limits numerically.
pub fn case_report(sys: &SystemSpec, horizon: f64, opts: &SolveOptions) -> Result<CaseReport, NonConjError> {
    let t0 = sys.t0;
    let mut notes = Vec::new();

    // reduce a12 ≤ 0 inputs through φ -> -φ
    let cert12_raw = sys.a12.sign_certify(t0, horizon, 512);
    let (sys, reduced) = if cert12_raw.verdict == SignVerdict::NonPositive {
        notes.push("applied the φ -> -φ reduction to make a12 non-negative".to_string());
        (
            SystemSpec {
                a11: sys.a11.clone(),
                a12: sys.a12.negated(),
                a21: sys.a21.negated(),
                a22: sys.a22.clone(),
                t0,
            },
            true,
        )
    } else {
        (sys.clone(), false)
    };

    let cert_a12 = sys.a12.sign_certify(t0, horizon, 512);
    let cert_a21 = sys.a21.sign_certify(t0, horizon, 512);
    let case = match (cert_a12.verdict, cert_a21.verdict) {
        (SignVerdict::NonNegative, SignVerdict::NonNegative) => CoefficientCase::BothNonNegative,
        (SignVerdict::NonNegative, SignVerdict::NonPositive) => CoefficientCase::MixedSigns,
        _ => CoefficientCase::Unmatched,
    };
    if case == CoefficientCase::Unmatched {
        return Err(NonConjError::CaseUnmatched { a12: cert_a12.verdict, a21: cert_a21.verdict });
    }

    let policy = HorizonPolicy::default();
    let b_expr = sys.b_expr();
    let iplus_a12_b = iplus_verdict(&sys.a12, &b_expr, t0, &policy);
    let iplus_a21_mb = iplus_verdict(&sys.a21, &b_expr.negated(), t0, &policy);
    let mut auxiliary = Vec::new();

    let spec = sys.riccati();
    let tsys = transpose(&sys);
    let tspec = tsys.riccati();
    let work_end = horizon + (horizon - t0).max(20.0);

    let mut distinguished = Vec::new();
    let mut oscillation = None;
    let clause;

    match case {
        CoefficientCase::BothNonNegative => {
            let diverging =
                iplus_a12_b == VerdictKind::DivergesPlus || iplus_a21_mb == VerdictKind::DivergesPlus;
            // generic comparison solution from a surviving ratio above the
            // extremal value
            let generic = find_regular_solution(&sys, work_end, opts)?
                .ok_or_else(|| NonConjError::Hypothesis { what: "no regular solution found".into() })?;
            if diverging {
                clause = "case I, divergent gate: unique solution with φ > 0 > ψ".to_string();
                let d = distinguished_from_extremal(
                    "minimal (φ*, ψ*)",
                    &sys,
                    &spec,
                    0.0,
                    horizon,
                    work_end,
                    opts,
                    Some(&generic),
                )?;
                distinguished.push(d);
            } else {
                clause = "case I, both gates finite: two distinguished positive solutions".to_string();
                let d1 = distinguished_from_extremal(
                    "(φ**, ψ0) from the induced equation",
                    &sys,
                    &spec,
                    0.0,
                    horizon,
                    work_end,
                    opts,
                    Some(&generic),
                )?;
                let tgeneric = find_regular_solution(&tsys, work_end, opts)?;
                let d2 = distinguished_from_extremal(
                    "(ψ**, φ0) from the transpose equation",
                    &tsys,
                    &tspec,
                    0.0,
                    horizon,
                    work_end,
                    opts,
                    tgeneric.as_ref(),
                )?;
                distinguished.push(d1);
                distinguished.push(d2);
            }
        }
        CoefficientCase::MixedSigns => {
            // -a21 ≥ 0: the second gate integral of interest is ∫(-a21)e^{∫B}
            let iplus_neg_a21 = iplus_verdict(&sys.a21.negated(), &b_expr.negated(), t0, &policy);
            auxiliary.push(("iplus(-a21, -B)".to_string(), iplus_neg_a21.clone()));
            let both_finite = matches!(iplus_a12_b, VerdictKind::Converged { .. })
                && matches!(iplus_neg_a21, VerdictKind::Converged { .. });
            let osc = classify_oscillation(&sys, horizon, &OscillationOptions::default())?;
            oscillation = Some(osc.class);
            notes.push(
                "phase derivative is non-negative pointwise in this case; the normalized radius \
                 vector rotates monotonically clockwise"
                    .to_string(),
            );
            if both_finite {
                clause = "mixed signs, both gates finite: non-oscillatory with two distinguished solutions"
                    .to_string();
            } else if osc.class == OscClass::Oscillatory {
                let leighton = crate::oscillation::leighton_test(&sys, &policy)?;
                notes.push(format!("system is oscillatory; divergence test verdict: {:?}", leighton.verdict));
                return Ok(CaseReport {
                    case,
                    reduced,
                    cert_a12,
                    cert_a21,
                    iplus_a12_b: iplus_a12_b.clone(),
                    iplus_a21_mb: iplus_a21_mb.clone(),
                    auxiliary,
                    oscillation,
                    clause: "mixed signs, oscillatory: distinguished-solution clauses do not apply"
                        .to_string(),
                    distinguished,
                    wronskian_min: None,
                    notes,
                });
            } else if osc.class == OscClass::Undetermined {
                return Err(NonConjError::Hypothesis {
                    what: "non-oscillation prerequisite could not be established".into(),
                });
            } else {
                clause = match (&iplus_a12_b, &iplus_neg_a21) {
                    (VerdictKind::DivergesPlus, _) => {
                        "mixed signs, first gate divergent: positive extremal ratio".to_string()
                    }
                    (_, VerdictKind::DivergesPlus) => {
                        "mixed signs, second gate divergent: negative extremal ratio".to_string()
                    }
                    _ => "mixed signs: gates undetermined".to_string(),
                };
            }
            let generic = find_regular_solution(&sys, work_end, opts)?
                .ok_or_else(|| NonConjError::Hypothesis { what: "no regular solution found".into() })?;
            let d1 = distinguished_from_extremal(
                "(φ*, ψ0) from the induced equation",
                &sys,
                &spec,
                0.0,
                horizon,
                work_end,
                opts,
                Some(&generic),
            )?;
            distinguished.push(d1);
            let tgeneric = find_regular_solution(&tsys, work_end, opts)?;
            if let Ok(d2) = distinguished_from_extremal(
                "(ψ*, φ0) from the transpose equation",
                &tsys,
                &tspec,
                0.0,
                horizon,
                work_end,
                opts,
                tgeneric.as_ref(),
            ) {
                distinguished.push(d2);
            }
        }
        CoefficientCase::Unmatched => unreachable!(),
    }

    // linear independence of the distinguished pair, verified numerically
    let wronskian_min = if distinguished.len() == 2 {
        let a = &distinguished[0].pair;
        let b = &distinguished[1].pair;
        let (lo, hi) = (a.span().0.max(b.span().0), a.span().1.min(b.span().1));
        let mut min_w = f64::INFINITY;
        for k in 0..=50 {
            let t = lo + (hi - lo) * k as f64 / 50.0;
            // the transpose lift stores (ψ, φ)
            let va = a.eval(t)?;
            let vb = b.eval(t)?;
            let (phi_b, psi_b) = (vb[1], vb[0]);
            let w = va[0] * psi_b - va[1] * phi_b;
            let scale = (va[0].abs() + va[1].abs()) * (phi_b.abs() + psi_b.abs());
            min_w = min_w.min(w.abs() / scale.max(1e-300));
        }
        Some(min_w)
    } else {
        None
    };

    Ok(CaseReport {
        case,
        reduced,
        cert_a12,
        cert_a21,
        iplus_a12_b,
        iplus_a21_mb,
        auxiliary,
        oscillation,
        clause,
        distinguished,
        wronskian_min,
        notes,
    })
}

pub fn zero_items(traj: &Trajectory, comp: usize) -> Vec<ZeroItem> {
    crate::ode::zero_sets(traj, comp, 1e-9)
}
