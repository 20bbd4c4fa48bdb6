//! The fundamental amplitude-phase frame built from the complex Riccati
//! solution, the six-way oscillation classification of the planar system,
//! the generalized Leighton test, the three boundedness principles for the
//! scalar equation `φ'' + r(t) φ = 0`, and the ring-radii measurement.
//!
//! Every real solution of the system can be written as
//! `φ = μ A(t) sin(Θ(t) + ν)`, `ψ = μ |z0| A(t) cos(Θ(t) + ν - α0(t))` with
//! `A = J_{S/2}/√y0` and `Θ = ∫ a12 y0`, where `z0 = x0 + i y0` is the
//! complex Riccati solution starting at `i`. Classification samples the
//! phase offset `ν` over `[0, π)` and counts component zeros.

use crate::expr::{CoeffExpr, SignCertificate};
use crate::ode::{
    solve_ode, solve_system, EscapePolicy, OdeError, OdeProblem, SolveOptions, SystemSpec,
    Trajectory, TrajectoryKind,
};
use crate::quad::{
    Cumulative, HorizonPolicy, IntegralVerdict, QuadError, QuadOptions, VerdictKind,
};
use crate::util;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum OscError {
    #[error("hypothesis not met: {what}")]
    Hypothesis { what: String },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Trajectory(#[from] crate::ode::TrajectoryError),
}

// ---------------------------------------------------------------------------
// Fundamental frame
// ---------------------------------------------------------------------------

/// Augmented frame state: `[x0, y0, Θ, L]` with `Θ' = a12 y0` and
/// `L' = S/2` (so the growth weight is `e^L`).
fn solve_frame_core(sys: &SystemSpec, span: (f64, f64), opts: &SolveOptions) -> Result<Trajectory, OscError> {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), OdeError> {
        let [a11, a12, a21, a22] = sys.eval_matrix(t)?;
        let b = a11 - a22;
        let (x, im) = (y[0], y[1]);
        dy[0] = -a12 * (x * x - im * im) - b * x + a21;
        dy[1] = -2.0 * a12 * x * im - b * im;
        dy[2] = a12 * im;
        dy[3] = 0.5 * (a11 + a22);
        Ok(())
    };
    Ok(solve_ode(
        &OdeProblem {
            rhs: &rhs,
            init: &[0.0, 1.0, 0.0, 0.0],
            span,
            names: &["x0", "y0", "theta", "log_weight"],
            kind: TrajectoryKind::Custom,
            escape: EscapePolicy::ErrorOut,
            positivity: Some((1, 1e-250)),
        },
        opts,
    )?)
}

/// The fundamental frame: complex Riccati parts, phase, growth weight, the
/// phase tilt `α0 = arctan(x0/y0)`, and the two fundamental solution pairs
/// both in closed form and directly integrated.
pub struct FundamentalFrame {
    /// components `[x0, y0, Θ, L]`
    pub core: Trajectory,
    /// `(φ+, ψ+)` from the closed forms, initial data `(1, 0)`
    pub plus: Trajectory,
    /// `(φ-, ψ-)` from the closed forms, initial data `(0, 1)`
    pub minus: Trajectory,
    /// `α0(t)` as a scalar trajectory
    pub alpha0: Trajectory,
    /// worst relative deviation of the closed forms from direct integration
    pub cross_check_dev: f64,
    /// worst relative residual of the three frame identities, evaluated with
    /// the directly integrated pairs
    pub identity_residual: f64,
    /// worst relative Liouville-determinant residual of the direct pairs
    pub liouville_residual: f64,
}

struct FrameAt {
    amp: f64,
    x0: f64,
    y0: f64,
    theta: f64,
}

fn frame_at(core: &Trajectory, i: usize) -> FrameAt {
    let x0 = core.value_at(i, 0);
    let y0 = core.value_at(i, 1);
    let theta = core.value_at(i, 2);
    let amp = core.value_at(i, 3).exp() / y0.sqrt();
    FrameAt { amp, x0, y0, theta }
}

/// Closed-form solution pair for phase offset `nu` on the frame grid.
fn closed_form_pair(sys: &SystemSpec, core: &Trajectory, nu: f64) -> Result<Trajectory, OscError> {
    let n = core.len();
    let mut ys = Vec::with_capacity(2 * n);
    let mut fs = Vec::with_capacity(2 * n);
    for i in 0..n {
        let t = core.times()[i];
        let f = frame_at(core, i);
        let modulus = (f.x0 * f.x0 + f.y0 * f.y0).sqrt();
        let alpha = (f.x0 / f.y0).atan();
        let phi = f.amp * (f.theta + nu).sin();
        let psi = modulus * f.amp * (f.theta + nu - alpha).cos();
        let [a11, a12, a21, a22] = sys.eval_matrix(t)?;
        ys.push(phi);
        ys.push(psi);
        fs.push(a11 * phi + a12 * psi);
        fs.push(a21 * phi + a22 * psi);
    }
    Ok(Trajectory::from_samples(
        TrajectoryKind::RealPair,
        &["phi", "psi"],
        core.times().to_vec(),
        ys,
        fs,
    ))
}

pub fn fundamental_frame(
    sys: &SystemSpec,
    span: (f64, f64),
    opts: &SolveOptions,
) -> Result<FundamentalFrame, OscError> {
    let core = solve_frame_core(sys, span, opts)?;

    // closed-form fundamental pairs: (1,0) is ν = π/2, (0,1) is ν = 0
    let plus = closed_form_pair(sys, &core, std::f64::consts::FRAC_PI_2)?;
    let minus = closed_form_pair(sys, &core, 0.0)?;

    let alpha0 = {
        let n = core.len();
        let mut ys = Vec::with_capacity(n);
        let mut fs = Vec::with_capacity(n);
        for i in 0..n {
            let f = frame_at(&core, i);
            ys.push((f.x0 / f.y0).atan());
            let dx = core.deriv_at(i, 0);
            let dy = core.deriv_at(i, 1);
            fs.push((dx * f.y0 - f.x0 * dy) / (f.x0 * f.x0 + f.y0 * f.y0));
        }
        Trajectory::from_samples(TrajectoryKind::RealScalar, &["alpha0"], core.times().to_vec(), ys, fs)
    };

    // cross-check against direct integration
    let direct_plus = solve_system(sys, (1.0, 0.0), span, opts)?;
    let direct_minus = solve_system(sys, (0.0, 1.0), span, opts)?;
    let mut cross = 0.0f64;
    for (closed, direct) in [(&plus, &direct_plus), (&minus, &direct_minus)] {
        for i in (0..core.len()).step_by(7) {
            let t = core.times()[i];
            for c in 0..2 {
                let a = closed.value_at(i, c);
                let b = direct.eval_component(t, c)?;
                let scale = a.abs().max(b.abs()).max(frame_at(&core, i).amp);
                cross = cross.max((a - b).abs() / scale);
            }
        }
    }

    // frame identities with the directly integrated pairs:
    //   φ+ cosΘ + φ- sinΘ = A
    //   ψ- cosΘ - ψ+ sinΘ = e^L √y0
    //   ψ- sinΘ + ψ+ cosΘ = e^L x0/√y0
    // residuals are scaled by the largest participating term: the left sides
    // cancel terms of size |z0| A down to √y0-size results, so a result-
    // relative residual would amplify solver error by |z0|/y0
    let mut ident = 0.0f64;
    let mut liou = 0.0f64;
    for i in (0..core.len()).step_by(3) {
        let t = core.times()[i];
        let f = frame_at(&core, i);
        let el = core.value_at(i, 3).exp();
        let (ct, st) = (f.theta.cos(), f.theta.sin());
        let pp = direct_plus.eval(t)?;
        let mm = direct_minus.eval(t)?;
        let lhs1 = pp[0] * ct + mm[0] * st;
        let rhs1 = f.amp;
        let scale1 = (pp[0] * ct).abs().max((mm[0] * st).abs()).max(rhs1.abs()).max(1e-30);
        let lhs2 = mm[1] * ct - pp[1] * st;
        let rhs2 = el * f.y0.sqrt();
        let scale2 = (mm[1] * ct).abs().max((pp[1] * st).abs()).max(rhs2.abs()).max(1e-30);
        let lhs3 = mm[1] * st + pp[1] * ct;
        let rhs3 = el * f.x0 / f.y0.sqrt();
        let scale3 = (mm[1] * st).abs().max((pp[1] * ct).abs()).max(rhs3.abs()).max(1e-30);
        ident = ident.max((lhs1 - rhs1).abs() / scale1);
        ident = ident.max((lhs2 - rhs2).abs() / scale2);
        ident = ident.max((lhs3 - rhs3).abs() / scale3);
        let det = pp[0] * mm[1] - mm[0] * pp[1];
        let j = el * el; // Liouville: det = e^{∫S} = (e^L)²
        let dscale = (pp[0] * mm[1]).abs().max((mm[0] * pp[1]).abs()).max(j.abs());
        liou = liou.max((det - j).abs() / dscale);
    }

    Ok(FundamentalFrame {
        core,
        plus,
        minus,
        alpha0,
        cross_check_dev: cross,
        identity_residual: ident,
        liouville_residual: liou,
    })
}

// ---------------------------------------------------------------------------
// Oscillation classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OscClass {
    Oscillatory,
    NonOscillatory,
    WeakOscillatory,
    WeakNonOscillatory,
    HalfOscillatory,
    Singular,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct NuWitness {
    pub nu: f64,
    pub phi_zeros: usize,
    pub psi_zeros: usize,
    pub phi_oscillates: bool,
    pub psi_oscillates: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OscillationReport {
    pub class: OscClass,
    pub witnesses: Vec<NuWitness>,
    pub theta_total_variation: f64,
    pub horizon: f64,
}

/// Tuning for the finite-horizon oscillation surrogate.
#[derive(Debug, Clone, Copy)]
pub struct OscillationOptions {
    pub nu_grid: usize,
    pub zero_min: usize,
    pub gap_factor: f64,
    pub solve: SolveOptions,
}

impl Default for OscillationOptions {
    fn default() -> Self {
        OscillationOptions {
            nu_grid: 64,
            zero_min: 5,
            gap_factor: 4.0,
            solve: SolveOptions::with_tol(1e-8),
        }
    }
}

/// A component oscillates (finite-horizon reading of "arbitrarily large
/// zeros") when it has at least `zero_min` zero items and neither the last
/// inter-zero gap nor the tail beyond the last zero stretches past
/// `gap_factor` times the median gap.
fn oscillates(zeros: &[crate::ode::ZeroItem], horizon_end: f64, zero_min: usize, gap_factor: f64) -> bool {
    if zeros.len() < zero_min {
        return false;
    }
    let starts: Vec<f64> = zeros.iter().map(|z| z.start()).collect();
    let mut gaps: Vec<f64> = starts.windows(2).map(|w| w[1] - w[0]).collect();
    let tail_gap = horizon_end - zeros.last().unwrap().end();
    let last_gap = gaps.last().copied().unwrap_or(f64::INFINITY).max(tail_gap);
    gaps.sort_by(f64::total_cmp);
    let median = gaps[gaps.len() / 2];
    last_gap < gap_factor * median
}

pub fn classify_oscillation(
    sys: &SystemSpec,
    horizon: f64,
    opt: &OscillationOptions,
) -> Result<OscillationReport, OscError> {
    let core = solve_frame_core(sys, (sys.t0, horizon), &opt.solve)?;
    let theta_tv: f64 = (1..core.len())
        .map(|i| (core.value_at(i, 2) - core.value_at(i - 1, 2)).abs())
        .sum();

    let nus: Vec<f64> = (0..opt.nu_grid)
        .map(|k| std::f64::consts::PI * k as f64 / opt.nu_grid as f64)
        .collect();
    let sys_c = sys.clone();
    let core_ref = &core;
    let witnesses: Vec<NuWitness> = crate::batch::map(nus, move |nu| {
        let pair = closed_form_pair(&sys_c, core_ref, nu).expect("coefficients evaluable on frame grid");
        let phi_zero = crate::ode::zero_sets(&pair, 0, 1e-9);
        let psi_zero = crate::ode::zero_sets(&pair, 1, 1e-9);
        NuWitness {
            nu,
            phi_zeros: phi_zero.len(),
            psi_zeros: psi_zero.len(),
            phi_oscillates: oscillates(&phi_zero, horizon, opt.zero_min, opt.gap_factor),
            psi_oscillates: oscillates(&psi_zero, horizon, opt.zero_min, opt.gap_factor),
        }
    });

    let all_both_osc = witnesses.iter().all(|w| w.phi_oscillates && w.psi_oscillates);
    let all_both_non = witnesses.iter().all(|w| !w.phi_oscillates && !w.psi_oscillates);
    let exists_both_osc = witnesses.iter().any(|w| w.phi_oscillates && w.psi_oscillates);
    let exists_both_non = witnesses.iter().any(|w| !w.phi_oscillates && !w.psi_oscillates);
    let every_has_osc = witnesses.iter().all(|w| w.phi_oscillates || w.psi_oscillates);
    let every_has_non = witnesses.iter().all(|w| !w.phi_oscillates || !w.psi_oscillates);
    let every_exactly_one = witnesses.iter().all(|w| w.phi_oscillates != w.psi_oscillates);
    let exists_osc_comp = witnesses.iter().any(|w| w.phi_oscillates || w.psi_oscillates);
    let exists_non_comp = witnesses.iter().any(|w| !w.phi_oscillates || !w.psi_oscillates);

    let class = if all_both_osc {
        OscClass::Oscillatory
    } else if all_both_non {
        OscClass::NonOscillatory
    } else if exists_both_osc && exists_both_non {
        OscClass::Singular
    } else if every_exactly_one {
        OscClass::HalfOscillatory
    } else if every_has_osc && exists_both_osc && exists_non_comp {
        OscClass::WeakOscillatory
    } else if every_has_non && exists_both_non && exists_osc_comp {
        OscClass::WeakNonOscillatory
    } else {
        OscClass::Undetermined
    };

    Ok(OscillationReport { class, witnesses, theta_total_variation: theta_tv, horizon })
}

// ---------------------------------------------------------------------------
// Leighton-type test
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LeightonVerdict {
    Oscillatory,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeightonReport {
    pub verdict: LeightonVerdict,
    pub failing_gate: Option<String>,
    pub cert_a12: SignCertificate,
    pub first_integral: VerdictKind,
    pub second_integral: VerdictKind,
}

/// Oscillation from divergence of the two complementary weighted coefficient
/// integrals `∫ a12 e^{-∫B}` and `∫ (-a21) e^{∫B}`, gated on `a12 ≥ 0`.
pub fn leighton_test(sys: &SystemSpec, policy: &HorizonPolicy) -> Result<LeightonReport, OscError> {
    let t0 = sys.t0;
    let cert = sys.a12.sign_certify(t0, policy.t_max(t0).min(t0 + 1e4), 1024);
    let b_expr = sys.b_expr();

    let mk_weighted = |coeff: CoeffExpr, sign: f64, flip_b: bool| -> Result<IntegralVerdict, OscError> {
        let b = if flip_b { b_expr.negated() } else { b_expr.clone() };
        let bcum = std::sync::Mutex::new(Cumulative::new(
            move |tau| b.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() }),
            t0,
            t0,
            QuadOptions::with_budget(512),
        )?);
        let f = move |tau: f64| -> Result<f64, QuadError> {
            let mut c = bcum.lock().unwrap();
            c.extend(tau)?;
            let w = c.eval(tau)?;
            let v = coeff.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            Ok(sign * v * (-w).exp())
        };
        Ok(crate::quad::classify_improper(&f, t0, policy))
    };

    // ∫ a12 exp{-∫B} and ∫ (-a21) exp{∫B}
    let first = mk_weighted(sys.a12.clone(), 1.0, false)?;
    let second = mk_weighted(sys.a21.clone(), -1.0, true)?;

    let mut failing = None;
    if !cert.admits_non_negative() {
        failing = Some(format!("a12 sign certificate: {:?}", cert.verdict));
    } else if !first.is_diverges_plus() {
        failing = Some(format!("first weighted integral: {:?}", first.kind));
    } else if !second.is_diverges_plus() {
        failing = Some(format!("second weighted integral: {:?}", second.kind));
    }
    Ok(LeightonReport {
        verdict: if failing.is_none() { LeightonVerdict::Oscillatory } else { LeightonVerdict::Inconclusive },
        failing_gate: failing,
        cert_a12: cert,
        first_integral: first.kind,
        second_integral: second.kind,
    })
}

// ---------------------------------------------------------------------------
// The three principles for φ'' + r(t) φ = 0
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PrincipleVerdict {
    Consistent,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionMetrics {
    pub init_angle: f64,
    pub sup_phi: f64,
    pub sup_dphi: f64,
    pub phi_zero_count: usize,
    pub phi_bounded: bool,
    pub phi_window_sups: Vec<f64>,
    pub dphi_window_sups: Vec<f64>,
    pub phi_tail_ratio: f64,
    pub dphi_tail_sup: f64,
    pub norm_min: f64,
    pub norm_max: f64,
    /// min of the norm over the last two quarters, for ring stability
    pub norm_min_q3: f64,
    pub norm_min_q4: f64,
    pub envelope_decreasing_after: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrinciplesReport {
    pub principle_a: PrincipleVerdict,
    pub principle_b: PrincipleVerdict,
    pub principle_c: PrincipleVerdict,
    pub solutions: Vec<SolutionMetrics>,
}

/// Encode `φ'' + r φ = 0` as the planar system with `a12 = 1, a21 = -r`.
pub fn scalar_equation_system(r: &CoeffExpr, t0: f64) -> SystemSpec {
    SystemSpec {
        a11: CoeffExpr::constant(0.0),
        a12: CoeffExpr::constant(1.0),
        a21: r.negated(),
        a22: CoeffExpr::constant(0.0),
        t0,
    }
}

pub fn principles_check(
    r: &CoeffExpr,
    t0: f64,
    horizon: f64,
    init_grid: usize,
    opts: &SolveOptions,
) -> Result<PrinciplesReport, OscError> {
    let sys = scalar_equation_system(r, t0);
    let angles: Vec<f64> =
        (0..init_grid).map(|k| std::f64::consts::PI * k as f64 / init_grid as f64).collect();
    let sys_ref = &sys;
    let runs: Vec<Result<SolutionMetrics, OscError>> = crate::batch::map(angles, move |beta| {
        let tr = solve_system(sys_ref, (beta.cos(), beta.sin()), (t0, horizon), opts)?;
        let n = tr.len();
        let ts = tr.times().to_vec();
        let phis: Vec<f64> = (0..n).map(|i| tr.value_at(i, 0)).collect();
        let dphis: Vec<f64> = (0..n).map(|i| tr.value_at(i, 1)).collect();
        let norms: Vec<f64> =
            (0..n).map(|i| (phis[i] * phis[i] + dphis[i] * dphis[i]).sqrt()).collect();
        let zeros = crate::ode::zero_sets(&tr, 0, 1e-9);
        let sup_phi = phis.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sup_dphi = dphis.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // orbit sups beat over long quasi-periods, so the solution gates use
        // a looser two-half comparison than the criterion-function rule
        let bounded = loosely_bounded(&util::window_sups(&ts, &phis, 8));
        let dphi_sups = util::window_sups(&ts, &dphis, 4);
        let phi_sups = util::window_sups(&ts, &phis, 4);
        let phi_tail_ratio = if phi_sups[0] > 0.0 { phi_sups[3] / phi_sups[0] } else { 0.0 };
        let dphi_tail_sup = dphi_sups[3];
        // amplitude envelope: first time after which successive |φ| peaks
        // never increase (beyond 0.1% slack)
        let peaks = util::envelope_peaks(&ts, &phis);
        let envelope_decreasing_after = (0..peaks.len()).find_map(|k| {
            let dec = peaks[k..].windows(2).all(|w| w[1].1 <= w[0].1 * 1.001);
            (dec && peaks.len() - k >= 3).then_some(peaks[k].0)
        });
        let q = util::window_sups(&ts, &norms, 4);
        let _ = q;
        let quarter_min = |lo: f64, hi: f64| {
            ts.iter()
                .zip(&norms)
                .filter(|(t, _)| {
                    let f = (**t - t0) / (horizon - t0);
                    f >= lo && f < hi
                })
                .fold(f64::INFINITY, |m, (_, v)| m.min(*v))
        };
        Ok(SolutionMetrics {
            init_angle: beta,
            sup_phi,
            sup_dphi,
            phi_zero_count: zeros.len(),
            phi_bounded: bounded,
            dphi_window_sups: dphi_sups,
            phi_tail_ratio,
            dphi_tail_sup,
            norm_min: norms.iter().fold(f64::INFINITY, |m, v| m.min(*v)),
            norm_max: norms.iter().fold(0.0f64, |m, v| m.max(*v)),
            norm_min_q3: quarter_min(0.5, 0.75),
            norm_min_q4: quarter_min(0.75, 1.0),
            envelope_decreasing_after,
            phi_window_sups: phi_sups,
        })
    });
    let mut solutions = Vec::with_capacity(runs.len());
    for r in runs {
        solutions.push(r?);
    }

    // A) all φ bounded ⇒ oscillatory, and φ' does not tend to 0
    let gate_a = solutions.iter().all(|s| s.phi_bounded);
    let concl_a = solutions.iter().all(|s| s.phi_zero_count >= 5)
        && solutions.iter().all(|s| s.dphi_tail_sup > 1e-3 * s.sup_dphi.max(1e-30));
    let principle_a = if !gate_a {
        PrincipleVerdict::NotApplicable
    } else if concl_a {
        PrincipleVerdict::Consistent
    } else {
        PrincipleVerdict::Violated
    };

    // B) all φ → 0 ⇒ every φ' unbounded; vanishing is read as window sups
    // decreasing monotonically to well below their initial level
    let gate_b = solutions.iter().all(|s| {
        let w = &s.phi_window_sups;
        w.windows(2).all(|p| p[1] < p[0]) && s.phi_tail_ratio < 0.8
    });
    let concl_b = solutions
        .iter()
        .all(|s| s.dphi_window_sups.windows(2).all(|w| w[1] > w[0] * 1.001));
    let principle_b = if !gate_b {
        PrincipleVerdict::NotApplicable
    } else if concl_b {
        PrincipleVerdict::Consistent
    } else {
        PrincipleVerdict::Violated
    };

    // C) φ and φ' all bounded ⇒ each orbit stays inside a ring 0 < r < R
    let gate_c = gate_a && solutions.iter().all(util_bounded_dphi);
    let concl_c = solutions.iter().all(|s| {
        s.norm_min > 0.0
            && s.norm_max.is_finite()
            && (s.norm_min_q3 - s.norm_min_q4).abs() <= 0.25 * s.norm_min_q3.max(1e-30)
    });
    let principle_c = if !gate_c {
        PrincipleVerdict::NotApplicable
    } else if concl_c {
        PrincipleVerdict::Consistent
    } else {
        PrincipleVerdict::Violated
    };

    Ok(PrinciplesReport { principle_a, principle_b, principle_c, solutions })
}

fn util_bounded_dphi(s: &SolutionMetrics) -> bool {
    // window sups of φ' must not keep growing
    let w = &s.dphi_window_sups;
    w[3] <= 1.1 * w[1].max(w[0]).max(1e-30)
}

// two-half window comparison: bounded unless the later half's sup exceeds
// the earlier half's by more than 10%
fn loosely_bounded(sups: &[f64]) -> bool {
    let half = sups.len() / 2;
    let early = sups[..half].iter().fold(0.0f64, |m, v| m.max(*v));
    let late = sups[half..].iter().fold(0.0f64, |m, v| m.max(*v));
    late <= 1.1 * early + 1e-12
}

// ---------------------------------------------------------------------------
// Ring radii
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct RingRadii {
    pub r: f64,
    pub big_r: f64,
    pub bounded: util::BoundednessVerdict,
}

/// Inf and sup of the weight-normalized solution norm
/// `e^{-L(t)} ||(φ, ψ)||`, gated on that norm being bounded.
pub fn ring_radii(sys: &SystemSpec, solution: &Trajectory) -> Result<RingRadii, OscError> {
    let (lo, hi) = solution.span();
    let s_expr = sys.s_expr();
    let lcum = Cumulative::new(
        move |tau| {
            s_expr
                .eval(tau)
                .map(|v| 0.5 * v)
                .map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })
        },
        lo,
        hi,
        QuadOptions::default(),
    )?;
    let n = solution.len();
    let mut ts = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let t = solution.times()[i];
        let phi = solution.value_at(i, 0);
        let psi = solution.value_at(i, 1);
        let w = (-lcum.eval(t)?).exp();
        ts.push(t);
        norms.push(w * (phi * phi + psi * psi).sqrt());
    }
    let bounded = util::windowed_bounded(&ts, &norms);
    if !bounded.bounded {
        return Err(OscError::Hypothesis {
            what: format!("normalized norm grows ({:.3e} -> {:.3e})", bounded.sup_early, bounded.sup_late),
        });
    }
    let r = norms.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let big_r = norms.iter().fold(0.0f64, |m, v| m.max(*v));
    if r <= 0.0 {
        return Err(OscError::Hypothesis { what: "trivial solution".into() });
    }
    Ok(RingRadii { r, big_r, bounded })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> SystemSpec {
        SystemSpec::parse("0", "1", "-1", "0", 0.0).unwrap()
    }

    fn phase_system(lambda: f64) -> SystemSpec {
        SystemSpec::parse(
            "0",
            &format!("cos({lambda}*t)"),
            &format!("-cos({lambda}*t)"),
            "0",
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn frame_of_harmonic_system() {
        let f = fundamental_frame(&harmonic(), (0.0, 30.0), &SolveOptions::default()).unwrap();
        // y0 ≡ 1, Θ = t, φ+ = cos t, φ- = sin t
        for &t in &[1.0, 7.7, 29.0] {
            let v = f.core.eval(t).unwrap();
            assert!((v[1] - 1.0).abs() < 1e-8);
            assert!((v[2] - t).abs() < 1e-7);
            assert!((f.plus.eval_component(t, 0).unwrap() - t.cos()).abs() < 1e-7);
            assert!((f.minus.eval_component(t, 0).unwrap() - t.sin()).abs() < 1e-7);
        }
        assert!(f.cross_check_dev < 1e-6, "cross dev {}", f.cross_check_dev);
        assert!(f.identity_residual < 1e-6);
        assert!(f.liouville_residual < 1e-7);
    }

    #[test]
    fn frame_of_bounded_phase_system() {
        // a12 = cos t: z0 ≡ i, Θ = sin t
        let f = fundamental_frame(&phase_system(1.0), (0.0, 20.0), &SolveOptions::default()).unwrap();
        for &t in &[0.5, 3.3, 19.0] {
            let v = f.core.eval(t).unwrap();
            assert!(v[0].abs() < 1e-8);
            assert!((v[1] - 1.0).abs() < 1e-8);
            assert!((v[2] - t.sin()).abs() < 1e-7);
        }
    }

    #[test]
    fn classify_harmonic_as_oscillatory() {
        let rep = classify_oscillation(&harmonic(), 100.0, &OscillationOptions::default()).unwrap();
        assert_eq!(rep.class, OscClass::Oscillatory);
        assert!(rep.theta_total_variation > 90.0);
    }

    #[test]
    fn classify_phase_regimes() {
        // λ = 0.5: phase sweeps ±2 > π/2-interval: oscillatory
        let rep = classify_oscillation(&phase_system(0.5), 200.0, &OscillationOptions::default()).unwrap();
        assert_eq!(rep.class, OscClass::Oscillatory);
        // λ = 1: weak oscillatory; λ = 2: weak non oscillatory
        let rep = classify_oscillation(&phase_system(1.0), 200.0, &OscillationOptions::default()).unwrap();
        assert_eq!(rep.class, OscClass::WeakOscillatory);
        let rep = classify_oscillation(&phase_system(2.0), 200.0, &OscillationOptions::default()).unwrap();
        assert_eq!(rep.class, OscClass::WeakNonOscillatory);
    }

    #[test]
    fn classify_decoupled_growth_as_non_oscillatory() {
        let sys = SystemSpec::parse("0", "1", "1", "0", 0.0).unwrap();
        let rep = classify_oscillation(&sys, 60.0, &OscillationOptions::default()).unwrap();
        assert_eq!(rep.class, OscClass::NonOscillatory);
    }

    #[test]
    fn leighton_examples() {
        let p = HorizonPolicy::default();
        let rep = leighton_test(&harmonic(), &p).unwrap();
        assert_eq!(rep.verdict, LeightonVerdict::Oscillatory);

        let sys = SystemSpec::parse("0", "1", "-1/t", "0", 1.0).unwrap();
        let rep = leighton_test(&sys, &p).unwrap();
        assert_eq!(rep.verdict, LeightonVerdict::Oscillatory, "{:?}", rep);

        let sys = SystemSpec::parse("0", "1", "-1/(4*t^2)", "0", 1.0).unwrap();
        let rep = leighton_test(&sys, &p).unwrap();
        assert_eq!(rep.verdict, LeightonVerdict::Inconclusive);
        assert!(rep.failing_gate.as_deref().unwrap().contains("second"));
    }

    #[test]
    fn leighton_agrees_with_classifier() {
        for sys in [harmonic(), SystemSpec::parse("0", "1", "-1/t", "0", 1.0).unwrap()] {
            let l = leighton_test(&sys, &HorizonPolicy::default()).unwrap();
            if l.verdict == LeightonVerdict::Oscillatory {
                let c = classify_oscillation(&sys, 200.0, &OscillationOptions::default()).unwrap();
                assert!(
                    matches!(c.class, OscClass::Oscillatory | OscClass::Undetermined),
                    "classifier contradicts the divergence test: {:?}",
                    c.class
                );
            }
        }
    }

    #[test]
    fn principles_on_harmonic() {
        let r = CoeffExpr::parse("1").unwrap();
        let rep = principles_check(&r, 0.0, 60.0, 4, &SolveOptions::with_tol(1e-8)).unwrap();
        assert_eq!(rep.principle_a, PrincipleVerdict::Consistent);
        // circle orbits: r = R
        assert_eq!(rep.principle_c, PrincipleVerdict::Consistent);
        for s in &rep.solutions {
            assert!((s.norm_min - 1.0).abs() < 1e-6);
            assert!((s.norm_max - 1.0).abs() < 1e-6);
        }
        // solutions do not vanish at infinity, so B is not applicable
        assert_eq!(rep.principle_b, PrincipleVerdict::NotApplicable);
    }

    #[test]
    fn ring_radii_examples() {
        let sys = harmonic();
        let tr = solve_system(&sys, (1.0, 0.0), (0.0, 40.0), &SolveOptions::default()).unwrap();
        let rr = ring_radii(&sys, &tr).unwrap();
        assert!((rr.r - 1.0).abs() < 1e-7 && (rr.big_r - 1.0).abs() < 1e-7);

        let tr = solve_system(&sys, (2.0, 1.0), (0.0, 40.0), &SolveOptions::default()).unwrap();
        let rr = ring_radii(&sys, &tr).unwrap();
        assert!((rr.r - 5.0f64.sqrt()).abs() < 1e-7);
        assert!((rr.big_r - 5.0f64.sqrt()).abs() < 1e-7);

        // growing system: hypothesis gate rejects
        let grow = SystemSpec::parse("0", "1", "0", "0", 0.0).unwrap();
        let tr = solve_system(&grow, (1.0, 1.0), (0.0, 40.0), &SolveOptions::default()).unwrap();
        assert!(ring_radii(&grow, &tr).is_err());
    }

    #[test]
    fn zero_interlacing_for_positive_a12() {
        // Sturm-type separation for strictly positive a12: zeros of the
        // φ-component at offsets ν and ν + π/2 strictly interlace
        let sys = SystemSpec::parse("0", "1 + 0.5*sin(t)", "-1 - 0.3*cos(2*t)", "0", 0.0).unwrap();
        let core = solve_frame_core(&sys, (0.0, 60.0), &SolveOptions::default()).unwrap();
        for nu in [0.3, 1.1] {
            let a = closed_form_pair(&sys, &core, nu).unwrap();
            let b = closed_form_pair(&sys, &core, nu + std::f64::consts::FRAC_PI_2).unwrap();
            let za: Vec<f64> =
                crate::ode::zero_sets(&a, 0, 1e-9).iter().map(|z| z.start()).collect();
            let zb: Vec<f64> =
                crate::ode::zero_sets(&b, 0, 1e-9).iter().map(|z| z.start()).collect();
            assert!(za.len() > 10 && zb.len() > 10);
            for w in za.windows(2) {
                let inside = zb.iter().filter(|&&z| z > w[0] && z < w[1]).count();
                assert_eq!(inside, 1, "between {} and {}: {} zeros of the shifted solution", w[0], w[1], inside);
            }
        }
    }
}
