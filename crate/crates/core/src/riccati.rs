//! Qualitative machinery for the scalar Riccati equation
//! `x' + a x² + b x + c = 0`: solution roles (regular / normal / extremal),
//! the extremal-from-normal formula `x* = x0 - 1/nu_{x0}`, bisection of the
//! regular-set boundary, sign-pattern prediction from the case tables for
//! sign-definite `a`, `c`, the comparison test, and the extremal
//! log-integral identity check.

use crate::expr::{CoeffExpr, SignCertificate};
use crate::ode::{
    solve_ode, solve_riccati, BlowUpReport, EscapePolicy, OdeError, OdeProblem, RiccatiSpec,
    SolveOptions, Trajectory, TrajectoryKind, ZeroItem,
};
use crate::quad::{
    Cumulative, HorizonPolicy, QuadError, QuadOptions, Signal,
    VerdictKind,
};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum RiccatiError {
    #[error("hypothesis not met: {what}")]
    Hypothesis { what: String },
    #[error("invalid bracket: lo survives = {lo_survives}, hi survives = {hi_survives}")]
    BracketInvalid { lo_survives: bool, hi_survives: bool },
    #[error("sign certificates match none of the case tables: {what}")]
    CaseMismatch { what: String },
    #[error("comparison hypothesis integral goes negative (min {min:.3e} at t = {t})")]
    HypothesisViolated { min: f64, t: f64 },
    #[error("comparison conclusion violated: x0 - x1 = {gap:.3e} at t = {t}")]
    ConclusionViolated { gap: f64, t: f64 },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Trajectory(#[from] crate::ode::TrajectoryError),
}

// ---------------------------------------------------------------------------
// Reciprocal equations
// ---------------------------------------------------------------------------

/// Which reciprocal substitution to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReciprocalForm {
    /// `u = 1/x`, giving `u' + (-c) u² + (-b) u + (-a) = 0`.
    Reciprocal,
    /// `v = -1/x`, giving `v' + c v² + (-b) v + a = 0`.
    NegatedReciprocal,
}

/// Coefficient map of the reciprocal equation; a solution of the returned
/// spec equals `1/x` (or `-1/x`) for any non-vanishing solution `x` of the
/// input spec.
pub fn reciprocal_spec(spec: &RiccatiSpec, form: ReciprocalForm) -> RiccatiSpec {
    match form {
        ReciprocalForm::Reciprocal => RiccatiSpec {
            a: spec.c.negated(),
            b: spec.b.negated(),
            c: spec.a.negated(),
            t0: spec.t0,
        },
        ReciprocalForm::NegatedReciprocal => RiccatiSpec {
            a: spec.c.clone(),
            b: spec.b.negated(),
            c: spec.a.clone(),
            t0: spec.t0,
        },
    }
}

/// Largest scaled residual of `x' + a x² + b x + c` over dense midpoints.
pub fn riccati_residual(spec: &RiccatiSpec, traj: &Trajectory) -> f64 {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), OdeError> {
        dy[0] = spec.rhs(t, y[0])?;
        Ok(())
    };
    crate::ode::max_ode_residual(traj, &rhs)
}

/// Residual at the sample nodes, comparing the stored derivative against the
/// equation's right-hand side. For trajectories built by an algebraic map
/// (reciprocals, the extremal formula) this checks the map identity itself
/// rather than interpolation quality.
pub fn riccati_residual_at_nodes(spec: &RiccatiSpec, traj: &Trajectory) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..traj.len() {
        let t = traj.times()[i];
        let y = traj.value_at(i, 0);
        let Ok(r) = spec.rhs(t, y) else { continue };
        worst = worst.max((traj.deriv_at(i, 0) - r).abs() / (1.0 + r.abs()));
    }
    worst
}

// ---------------------------------------------------------------------------
// nu along a solution, and the extremal formula
// ---------------------------------------------------------------------------

/// `nu_{x0}(t)` evaluated along a solution trajectory, with the tail beyond
/// the trajectory end extrapolated geometrically.
pub struct NuCurve {
    pub ts: Vec<f64>,
    pub nus: Vec<f64>,
    /// absolute uncertainty of each `nu` coming from the tail extrapolation
    pub uncertainty: Vec<f64>,
}

pub fn nu_along(spec: &RiccatiSpec, x0: &Trajectory, t1: f64) -> Result<NuCurve, RiccatiError> {
    let (lo, hi) = x0.span();
    if t1 < lo - 1e-9 {
        return Err(RiccatiError::Hypothesis { what: format!("x0 does not cover t1 = {t1}") });
    }
    let a = spec.a.clone();
    let b = spec.b.clone();
    let x0a = std::sync::Arc::new(x0.clone());
    let g_of = {
        let (a, b, x0a) = (a.clone(), b.clone(), x0a.clone());
        move |tau: f64| -> Result<f64, QuadError> {
            let av = a.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let bv = b.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let xv = x0a
                .eval_component(tau, 0)
                .map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            Ok(2.0 * av * xv + bv)
        }
    };
    let gcum = std::sync::Arc::new(Cumulative::new(g_of.clone(), t1, hi, QuadOptions::default())?);

    // terminal value nu(T) from three trailing windows, with exponents
    // anchored locally so nothing cancels or underflows
    let delta = (hi - t1) * 0.08;
    let window = |wa: f64, wb: f64| -> Result<f64, QuadError> {
        // ∫_{wa}^{wb} a(τ) e^{-(G(τ) - G(T))} dτ, anchored at T = hi
        let (a, gcum) = (a.clone(), gcum.clone());
        let g_hi = gcum.eval(hi)?;
        let f = move |tau: f64| -> Result<f64, QuadError> {
            let av = a.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            Ok(av * (g_hi - gcum.eval(tau)?).exp())
        };
        let (v, _) = crate::quad::integrate(&f, wa, wb, &QuadOptions::default())?;
        Ok(v)
    };
    let (nu_terminal, tail_unc) = {
        let d0 = window(hi - 3.0 * delta, hi - 2.0 * delta)?;
        let d1 = window(hi - 2.0 * delta, hi - delta)?;
        let d2 = window(hi - delta, hi)?;
        let same_sign = d0.signum() == d2.signum() && d1.signum() == d2.signum() && d2 != 0.0;
        let r1 = if d0 != 0.0 { d1 / d0 } else { 0.0 };
        let r2 = if d1 != 0.0 { d2 / d1 } else { 0.0 };
        if !same_sign || d2.abs() < 1e-300 {
            (0.0, d2.abs() * 20.0)
        } else if r2.abs() < 0.95 && r2 > 0.0 {
            let geom = d2 * r2 / (1.0 - r2);
            let alt = if r1 > 0.0 && r1 < 0.999 { d2 * r1 / (1.0 - r1) } else { 2.0 * geom };
            // exact geometric decay has identical window ratios up to
            // quadrature noise; anything looser gets the power-law fit
            if (r2 - r1).abs() <= (1e-3 * r2.abs()).max(1e-12) {
                (geom, (geom - alt).abs() + d2.abs() * 1e-9)
            } else {
                let m0 = hi - 2.5 * delta;
                let m1 = hi - 1.5 * delta;
                let m2 = hi - 0.5 * delta;
                let power_tail = |r: f64, ma: f64, mb: f64, d: f64| -> Option<f64> {
                    if r <= 0.0 || ma <= 0.0 || mb <= 0.0 {
                        return None;
                    }
                    let p = -(r.ln()) / (mb / ma).ln();
                    if p > 1.05 {
                        // tail = d·T·(mb/T)^p / (δ (p-1)), kept in ratio form
                        // so a steep fitted exponent underflows to zero
                        // instead of dividing by an underflowed power
                        let ratio_pow = (mb / hi).powf(p);
                        let v = d * hi * ratio_pow / (delta * (p - 1.0));
                        v.is_finite().then_some(v)
                    } else {
                        None
                    }
                };
                match (power_tail(r2, m1, m2, d2), power_tail(r1, m0, m1, d1)) {
                    (Some(pw), Some(pw_alt)) => {
                        // rescale the alternative to the same endpoint window
                        (pw, (pw - pw_alt * r2).abs() + d2.abs() * 1e-9)
                    }
                    (Some(pw), None) => (pw, (pw - geom).abs() + d2.abs() * 1e-9),
                    _ => (geom, (geom - alt).abs().max(geom.abs())),
                }
            }
        } else {
            // non-decaying windows: the tail cannot be resolved
            (0.0, d2.abs() * 20.0)
        }
    };

    // integrate nu' = g(t) nu - a(t) backward from T = hi, written forward
    // in s = T + t1 - t (contracting wherever the forward form cancels)
    let (a_c, g_c) = (a.clone(), g_of);
    let rhs = move |s: f64, m: &[f64], dm: &mut [f64]| -> Result<(), OdeError> {
        let tau = hi + t1 - s;
        let av = a_c.eval(tau).map_err(|e| OdeError::Coefficient { t: tau, what: e.to_string() })?;
        let gv = g_c(tau).map_err(|e| OdeError::Coefficient { t: tau, what: e.to_string() })?;
        dm[0] = av - gv * m[0];
        Ok(())
    };
    let back = solve_ode(
        &OdeProblem {
            rhs: &rhs,
            init: &[nu_terminal],
            span: (t1, hi),
            names: &["nu"],
            kind: TrajectoryKind::RealScalar,
            escape: EscapePolicy::ErrorOut,
            positivity: None,
        },
        &SolveOptions { rtol: 1e-10, atol: 1e-14, ..Default::default() },
    )?;

    let g_hi = gcum.eval(hi)?;
    let mut ts = Vec::new();
    let mut nus = Vec::new();
    let mut unc = Vec::new();
    for &t in x0.times().iter().filter(|&&t| t >= t1 - 1e-12 && t <= hi + 1e-12) {
        let s = (hi + t1 - t).clamp(t1, hi);
        let v = back.eval_component(s, 0)?;
        // terminal uncertainty decays backward through e^{-(G(T) - G(t))}
        let decay = (gcum.eval(t)? - g_hi).exp();
        ts.push(t);
        nus.push(v);
        unc.push(tail_unc * decay + 1e-9 * v.abs());
    }
    Ok(NuCurve { ts, nus, uncertainty: unc })
}

/// The unique extremal solution built from a normal one:
/// `x*(t) = x0(t) - 1/nu_{x0}(t)` on `[t1, out_end]`.
///
/// `x0` must extend well beyond `out_end` so the tail of `nu` is resolved;
/// the routine fails when the tail uncertainty swamps `nu` or when `nu`
/// vanishes (the necessity condition for an extremal solution).
pub fn extremal_from_normal(
    spec: &RiccatiSpec,
    x0: &Trajectory,
    t1: f64,
    out_end: f64,
) -> Result<Trajectory, RiccatiError> {
    let nu = nu_along(spec, x0, t1)?;
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    let mut fs = Vec::new();
    for (i, &t) in nu.ts.iter().enumerate() {
        if t > out_end + 1e-12 {
            break;
        }
        let v = nu.nus[i];
        let u = nu.uncertainty[i];
        if !v.is_finite() {
            return Err(RiccatiError::Hypothesis { what: format!("nu overflowed at t = {t}") });
        }
        if v.abs() <= 10.0 * u {
            return Err(RiccatiError::Hypothesis {
                what: format!("nu(t) = {v:.3e} ± {u:.3e} at t = {t}: vanishing or undetermined"),
            });
        }
        let x0v = x0.eval_component(t, 0)?;
        let x0d = x0.deriv_component(t, 0)?;
        let (a, b, _c) = spec.coeffs(t)?;
        let star = x0v - 1.0 / v;
        let nu_d = (2.0 * a * x0v + b) * v - a;
        ts.push(t);
        ys.push(star);
        fs.push(x0d + nu_d / (v * v));
    }
    if ts.len() < 2 {
        return Err(RiccatiError::Hypothesis { what: "output span too short".into() });
    }
    Ok(Trajectory::from_samples(TrajectoryKind::RealScalar, &["x"], ts, ys, fs))
}

// ---------------------------------------------------------------------------
// Regular-set boundary and solution roles
// ---------------------------------------------------------------------------

fn survives(spec: &RiccatiSpec, x_init: f64, t1: f64, horizon: f64, opts: &SolveOptions) -> Result<bool, RiccatiError> {
    let tr = solve_riccati(spec, x_init, (t1, horizon), opts)?;
    Ok(tr.blowup.is_none())
}

/// Bisect the boundary of the regular set inside a caller-supplied bracket.
/// Requires `a(t) ≥ 0` (certified by sampling); `bracket.0` must blow up
/// and `bracket.1` must survive to the horizon.
pub fn reg_boundary(
    spec: &RiccatiSpec,
    t1: f64,
    bracket: (f64, f64),
    horizon: f64,
    opts: &SolveOptions,
) -> Result<f64, RiccatiError> {
    let cert = spec.a.sign_certify(t1, horizon, 512);
    if !cert.admits_non_negative() {
        return Err(RiccatiError::Hypothesis {
            what: format!("a(t) is not certified non-negative on [{t1}, {horizon}] ({:?})", cert.verdict),
        });
    }
    let (mut lo, mut hi) = bracket;
    let lo_survives = survives(spec, lo, t1, horizon, opts)?;
    let hi_survives = survives(spec, hi, t1, horizon, opts)?;
    if lo_survives || !hi_survives {
        return Err(RiccatiError::BracketInvalid { lo_survives, hi_survives });
    }
    while (hi - lo).abs() > 1e-8 * hi.abs().max(lo.abs()).max(1.0) {
        let mid = 0.5 * (lo + hi);
        if survives(spec, mid, t1, horizon, opts)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Geometrically widening search for a survival bracket, scanning downward
/// from `seed`. Returns `(non_survivor, survivor)`.
pub fn find_boundary_bracket(
    spec: &RiccatiSpec,
    t1: f64,
    seed: f64,
    horizon: f64,
    opts: &SolveOptions,
    max_magnitude: f64,
) -> Result<Option<(f64, f64)>, RiccatiError> {
    // find a survivor at or above the seed
    let mut survivor = None;
    let mut x = seed;
    let mut step = 1.0f64.max(seed.abs() * 0.5);
    for _ in 0..40 {
        if x.abs() > max_magnitude {
            break;
        }
        if survives(spec, x, t1, horizon, opts)? {
            survivor = Some(x);
            break;
        }
        x += step;
        step *= 2.0;
    }
    let Some(survivor) = survivor else { return Ok(None) };
    // widen downward for a non-survivor
    let mut lo = survivor - 1.0f64.max(survivor.abs() * 0.5);
    let mut width = 1.0f64.max(survivor.abs());
    for _ in 0..40 {
        if !survives(spec, lo, t1, horizon, opts)? {
            return Ok(Some((lo, survivor)));
        }
        if lo.abs() > max_magnitude {
            break;
        }
        lo -= width;
        width *= 2.0;
    }
    // everything survives down to the magnitude cap
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RoleKind {
    Regular,
    Normal,
    Extremal,
    NotRegular,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRun {
    pub x_init: f64,
    pub survived: bool,
    pub blowup: Option<BlowUpReport>,
}

/// Role classification of one initial value by perturbation probes.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionRole {
    pub role: RoleKind,
    pub t1: f64,
    pub evidence: Vec<ProbeRun>,
    pub nu_kind: Option<VerdictKind>,
}

pub fn classify_solution_role(
    spec: &RiccatiSpec,
    x_init: f64,
    t1: f64,
    probe: f64,
    horizon: f64,
    opts: &SolveOptions,
) -> Result<SolutionRole, RiccatiError> {
    let run = |xi: f64| -> Result<(ProbeRun, Option<Trajectory>), RiccatiError> {
        let tr = solve_riccati(spec, xi, (t1, horizon), opts)?;
        let survived = tr.blowup.is_none();
        Ok((ProbeRun { x_init: xi, survived, blowup: tr.blowup }, survived.then_some(tr)))
    };
    let eps = if probe > 0.0 { probe } else { 1e-4 * x_init.abs().max(1.0) };
    let (base, base_tr) = run(x_init)?;
    let (below, _) = run(x_init - eps)?;
    let (above, _) = run(x_init + eps)?;
    let role = if !base.survived {
        RoleKind::NotRegular
    } else if below.survived && above.survived {
        RoleKind::Normal
    } else {
        RoleKind::Extremal
    };
    // nu verdict along the base solution, windows kept inside its span
    let nu_kind = base_tr.as_ref().map(|tr| {
        let (a, b) = (Signal::Expr(spec.a.clone()), Signal::Expr(spec.b.clone()));
        let u = Signal::Traj(std::sync::Arc::new(tr.clone()), 0);
        let policy = HorizonPolicy {
            h0: (horizon - t1) / 4096.0,
            max_doublings: 12,
            ..Default::default()
        };
        crate::quad::transform_nu(&a, &b, &u, t1, &policy).map(|v| v.kind).unwrap_or(VerdictKind::Undetermined)
    });
    Ok(SolutionRole { role, t1, evidence: vec![base, below, above], nu_kind })
}

// ---------------------------------------------------------------------------
// Sign patterns
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

/// Condensed sign pattern: the sequence of signs a solution takes, with
/// `Zero` standing for a zero point or a zero segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignPattern {
    pub signs: Vec<Sign>,
}

impl SignPattern {
    pub fn new(signs: &[Sign]) -> SignPattern {
        SignPattern { signs: signs.to_vec() }
    }
}

/// Observed condensed pattern of a trajectory component.
pub fn observed_pattern(traj: &Trajectory, comp: usize, tol_abs: f64) -> SignPattern {
    let zeros = crate::ode::zero_sets(traj, comp, tol_abs);
    let (lo, hi) = traj.span();
    let mut cuts: Vec<(f64, f64)> = Vec::new(); // zero item extents
    for z in &zeros {
        cuts.push((z.start(), z.end()));
    }
    let mut signs = Vec::new();
    let mut segment_start = lo;
    let sample_sign = |a: f64, b: f64| -> Option<Sign> {
        if b - a < 1e-12 {
            return None;
        }
        let tm = 0.5 * (a + b);
        let v = traj.eval_component(tm, comp).ok()?;
        if v > 0.0 {
            Some(Sign::Plus)
        } else if v < 0.0 {
            Some(Sign::Minus)
        } else {
            Some(Sign::Zero)
        }
    };
    for (za, zb) in cuts {
        if let Some(s) = sample_sign(segment_start, za) {
            signs.push(s);
        }
        signs.push(Sign::Zero);
        segment_start = zb;
    }
    if let Some(s) = sample_sign(segment_start, hi) {
        signs.push(s);
    }
    // merge adjacent duplicates (can happen around interval endpoints)
    signs.dedup();
    SignPattern { signs }
}

/// Gate data recorded with a prediction so the clause used is auditable.
#[derive(Debug, Clone, Serialize)]
pub struct PatternGates {
    pub cert_a: SignCertificate,
    pub cert_c: SignCertificate,
    pub iab: VerdictKind,
    pub icmb: VerdictKind,
    pub inegc_mb: VerdictKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct PatternPrediction {
    pub clause: String,
    /// `None` means "no regular solution exists for this initial value".
    pub pattern: Option<SignPattern>,
    pub regular_expected: bool,
    pub x_star_estimate: Option<f64>,
    pub gates: PatternGates,
}

/// `I+_{a,b}(t0) = ∫ a e^{-∫b}` as a verdict.
pub fn iplus_verdict(u: &CoeffExpr, v: &CoeffExpr, t0: f64, policy: &HorizonPolicy) -> VerdictKind {
    crate::quad::transform_iplus_improper(
        &Signal::Expr(u.clone()),
        &Signal::Expr(v.clone()),
        t0,
        policy,
    )
    .map(|r| r.kind)
    .unwrap_or(VerdictKind::Undetermined)
}

/// Sign-pattern prediction from the case tables for sign-definite `a`, `c`.
pub fn sign_pattern_predict(
    spec: &RiccatiSpec,
    x_init: f64,
    horizon: f64,
    opts: &SolveOptions,
) -> Result<PatternPrediction, RiccatiError> {
    let t0 = spec.t0;
    let cert_a = spec.a.sign_certify(t0, horizon, 512);
    let cert_c = spec.c.sign_certify(t0, horizon, 512);
    let policy = HorizonPolicy::default();
    let iab = iplus_verdict(&spec.a, &spec.b, t0, &policy);
    let icmb = iplus_verdict(&spec.c, &spec.b.negated(), t0, &policy);
    let inegc_mb = iplus_verdict(&spec.c.negated(), &spec.b.negated(), t0, &policy);
    let gates = PatternGates {
        cert_a: cert_a.clone(),
        cert_c: cert_c.clone(),
        iab: iab.clone(),
        icmb: icmb.clone(),
        inegc_mb: inegc_mb.clone(),
    };

    if !cert_a.admits_non_negative() {
        return Err(RiccatiError::CaseMismatch {
            what: format!("a(t) not non-negative ({:?})", cert_a.verdict),
        });
    }
    let c_nonpos = cert_c.admits_non_positive();
    let c_nonneg = cert_c.admits_non_negative();
    if !c_nonpos && !c_nonneg {
        return Err(RiccatiError::CaseMismatch {
            what: format!("c(t) changes sign ({:?})", cert_c.verdict),
        });
    }

    let tol = 1e-6 * x_init.abs().max(1.0);
    let mk = |clause: &str, pattern: Option<&[Sign]>, regular: bool, xs: Option<f64>| PatternPrediction {
        clause: clause.to_string(),
        pattern: pattern.map(SignPattern::new),
        regular_expected: regular,
        x_star_estimate: xs,
        gates: gates.clone(),
    };

    if c_nonpos {
        // non-positive c: negative extremal, everything at or above it regular
        let bracket = find_boundary_bracket(spec, t0, 0.0, horizon, opts, 1e6)?;
        let Some(bracket) = bracket else {
            return Err(RiccatiError::CaseMismatch {
                what: "no regular-set boundary found below a surviving solution".into(),
            });
        };
        let x_star = reg_boundary(spec, t0, bracket, horizon, opts)?;
        if x_init > tol {
            return Ok(mk("nonpositive-c: positive start stays positive", Some(&[Sign::Plus]), true, Some(x_star)));
        }
        if x_init.abs() <= tol {
            return Ok(mk("nonpositive-c: zero start turns positive", Some(&[Sign::Zero, Sign::Plus]), true, Some(x_star)));
        }
        if x_init < x_star - tol {
            return Ok(mk("nonpositive-c: start below the extremal value, escapes negative", Some(&[Sign::Minus]), false, Some(x_star)));
        }
        if (x_init - x_star).abs() <= tol {
            return Ok(mk("nonpositive-c: extremal start, negative throughout", Some(&[Sign::Minus]), true, Some(x_star)));
        }
        // x_init in (x_star, 0)
        let diverging = iab == VerdictKind::DivergesPlus || icmb == VerdictKind::DivergesMinus;
        if diverging {
            return Ok(mk(
                "nonpositive-c, divergent gate: negative, zero, then positive",
                Some(&[Sign::Minus, Sign::Zero, Sign::Plus]),
                true,
                Some(x_star),
            ));
        }
        let both_finite = matches!(iab, VerdictKind::Converged { .. })
            && matches!(inegc_mb, VerdictKind::Converged { .. });
        if both_finite {
            // boundary between eventually-positive and forever-negative
            let xn = bisect_predicate(
                spec,
                t0,
                x_star + 2.0 * tol,
                0.0,
                horizon,
                opts,
                &|tr: &Trajectory| tr.eval_component(tr.span().1, 0).map(|v| v > 0.0).unwrap_or(false),
            )?;
            if x_init > xn + tol {
                return Ok(mk(
                    "nonpositive-c, finite gates, above the negative normal boundary: negative, zero, then positive",
                    Some(&[Sign::Minus, Sign::Zero, Sign::Plus]),
                    true,
                    Some(x_star),
                ));
            }
            return Ok(mk(
                "nonpositive-c, finite gates, below the negative normal boundary: stays negative",
                Some(&[Sign::Minus]),
                true,
                Some(x_star),
            ));
        }
        return Ok(mk("nonpositive-c: integral gates undetermined", None, true, Some(x_star)));
    }

    // non-negative c
    let iab_div = iab == VerdictKind::DivergesPlus;
    let icmb_div = icmb == VerdictKind::DivergesPlus;
    if iab_div && icmb_div {
        // no regular solutions at all
        return Ok(mk("both gates divergent: no regular solutions", None, false, None));
    }
    if iab_div {
        if x_init > tol {
            return Ok(mk("nonnegative-c, first gate divergent: positive throughout", Some(&[Sign::Plus]), true, None));
        }
        let pat: &[Sign] = if x_init.abs() <= tol { &[Sign::Zero, Sign::Minus] } else { &[Sign::Minus] };
        return Ok(mk("nonnegative-c, first gate divergent: non-positive start is not regular", Some(pat), false, None));
    }
    if icmb_div {
        if x_init > tol {
            return Ok(mk(
                "nonnegative-c, second gate divergent: positive, zero, then negative",
                Some(&[Sign::Plus, Sign::Zero, Sign::Minus]),
                true,
                None,
            ));
        }
        if x_init.abs() <= tol {
            return Ok(mk("nonnegative-c, second gate divergent: zero start turns negative", Some(&[Sign::Zero, Sign::Minus]), true, None));
        }
        return Ok(mk("nonnegative-c, second gate divergent: stays negative", Some(&[Sign::Minus]), true, None));
    }
    // both convergent
    let bracket = find_boundary_bracket(spec, t0, 0.0, horizon, opts, 1e6)?;
    let Some(bracket) = bracket else {
        return Err(RiccatiError::CaseMismatch { what: "no boundary found in the doubly-convergent case".into() });
    };
    let x_star = reg_boundary(spec, t0, bracket, horizon, opts)?;
    if x_init < x_star - tol {
        return Ok(mk("nonnegative-c, both gates finite: start below the extremal value, escapes negative", Some(&[Sign::Minus]), false, Some(x_star)));
    }
    if x_init <= tol {
        let pat: &[Sign] = if x_init.abs() <= tol { &[Sign::Zero, Sign::Minus] } else { &[Sign::Minus] };
        return Ok(mk("nonnegative-c, both gates finite: non-positive start stays negative", Some(pat), true, Some(x_star)));
    }
    let xn = bisect_predicate(spec, t0, 0.0, x_init.max(1.0) * 4.0, horizon, opts, &|tr: &Trajectory| {
        tr.eval_component(tr.span().1, 0).map(|v| v > 0.0).unwrap_or(false)
    })?;
    if x_init < xn - tol {
        return Ok(mk(
            "nonnegative-c, both gates finite, below the positive normal boundary: positive, zero, then negative",
            Some(&[Sign::Plus, Sign::Zero, Sign::Minus]),
            true,
            Some(x_star),
        ));
    }
    Ok(mk("nonnegative-c, both gates finite: large positive start stays positive", Some(&[Sign::Plus]), true, Some(x_star)))
}

/// Bisect on an arbitrary predicate of the solved trajectory; assumes the
/// predicate is false at `lo` and true at `hi`.
fn bisect_predicate(
    spec: &RiccatiSpec,
    t1: f64,
    mut lo: f64,
    mut hi: f64,
    horizon: f64,
    opts: &SolveOptions,
    pred: &dyn Fn(&Trajectory) -> bool,
) -> Result<f64, RiccatiError> {
    for _ in 0..60 {
        if (hi - lo).abs() <= 1e-8 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let tr = solve_riccati(spec, mid, (t1, horizon), opts)?;
        if tr.blowup.is_none() && pred(&tr) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Outcome of comparing a predicted pattern against a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct PatternCheck {
    pub pass: bool,
    pub observed: SignPattern,
    pub mismatch: Option<String>,
}

pub fn sign_pattern_check(predicted: &SignPattern, traj: &Trajectory, tol_abs: f64) -> PatternCheck {
    let observed = observed_pattern(traj, 0, tol_abs);
    let matches = |p: &[Sign], o: &[Sign]| p == o;
    let p = &predicted.signs[..];
    let o = &observed.signs[..];
    // a predicted leading zero segment may be degenerate (absent) in the
    // observed pattern, and vice versa
    let pass = matches(p, o)
        || (p.first() == Some(&Sign::Zero) && matches(&p[1..], o))
        || (o.first() == Some(&Sign::Zero) && matches(p, &o[1..]));
    let mismatch = if pass {
        None
    } else {
        Some(format!("predicted {:?}, observed {:?}", predicted.signs, observed.signs))
    };
    PatternCheck { pass, observed, mismatch }
}

// ---------------------------------------------------------------------------
// Comparison theorem
// ---------------------------------------------------------------------------

/// Solution of the linear equation `η' + b η + c = 0` (a solution of the
/// comparison differential inequality whenever `a ≥ 0`).
pub fn linear_inequality_solution(
    spec: &RiccatiSpec,
    eta_init: f64,
    span: (f64, f64),
    opts: &SolveOptions,
) -> Result<Trajectory, RiccatiError> {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), OdeError> {
        let (_a, b, c) = spec.coeffs(t)?;
        dy[0] = -(b * y[0] + c);
        Ok(())
    };
    Ok(solve_ode(
        &OdeProblem {
            rhs: &rhs,
            init: &[eta_init],
            span,
            names: &["eta"],
            kind: TrajectoryKind::RealScalar,
            escape: EscapePolicy::ErrorOut,
            positivity: None,
        },
        opts,
    )?)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRecord {
    pub hypothesis_min: f64,
    pub hypothesis_trace: Vec<(f64, f64)>,
    pub domination_margin: f64,
    pub x0_span_end: f64,
}

/// Comparison test: a solution `x1` of the `spec1` equation, a solution
/// `eta0` of the differential inequality with `eta0(t0) ≥ x1(t0)`, and the
/// weighted defect integral staying non-negative force the `spec` solution
/// from any `x_init ≥ x1(t0)` to dominate `x1`.
pub fn comparison_check(
    spec1: &RiccatiSpec,
    spec: &RiccatiSpec,
    x1: &Trajectory,
    eta0: &Trajectory,
    x_init: f64,
    opts: &SolveOptions,
) -> Result<ComparisonRecord, RiccatiError> {
    let t0 = spec.t0;
    let (_, hi1) = x1.span();
    let (_, hi2) = eta0.span();
    let hi = hi1.min(hi2);
    let cert = spec.a.sign_certify(t0, hi, 512);
    if !cert.admits_non_negative() {
        return Err(RiccatiError::Hypothesis { what: format!("a(t) not non-negative: {:?}", cert.verdict) });
    }
    let x1_at0 = x1.eval_component(t0, 0)?;
    if x_init < x1_at0 - 1e-12 {
        return Err(RiccatiError::Hypothesis {
            what: format!("x_init = {x_init} below x1(t0) = {x1_at0}"),
        });
    }

    let (spec_c, x1c, eta) = (spec.clone(), std::sync::Arc::new(x1.clone()), std::sync::Arc::new(eta0.clone()));
    let weight_exp = Cumulative::new(
        move |tau| {
            let (a, b, _c) = spec_c.coeffs(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let x1v = x1c.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let ev = eta.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            Ok(a * (ev + x1v) + b)
        },
        t0,
        hi,
        QuadOptions::default(),
    )?;
    let weight_exp = std::sync::Arc::new(weight_exp);
    let (s1, s, x1c) = (spec1.clone(), spec.clone(), std::sync::Arc::new(x1.clone()));
    let hyp = Cumulative::new(
        move |tau| {
            let (a1, b1, c1) = s1.coeffs(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let (a, b, c) = s.coeffs(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let x1v = x1c.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let defect = (a1 - a) * x1v * x1v + (b1 - b) * x1v + (c1 - c);
            Ok(weight_exp.eval(tau)?.exp() * defect)
        },
        t0,
        hi,
        QuadOptions::default(),
    )?;

    let mut trace = Vec::new();
    let mut hyp_min = (f64::INFINITY, t0);
    let samples = 200;
    for k in 0..=samples {
        let t = t0 + (hi - t0) * k as f64 / samples as f64;
        let v = hyp.eval(t)?;
        trace.push((t, v));
        if v < hyp_min.0 {
            hyp_min = (v, t);
        }
    }
    let scale = trace.iter().fold(0.0f64, |m, p| m.max(p.1.abs())).max(1.0);
    if hyp_min.0 < -1e-9 * scale {
        return Err(RiccatiError::HypothesisViolated { min: hyp_min.0, t: hyp_min.1 });
    }

    let x0 = solve_riccati(spec, x_init, (t0, hi), opts)?;
    let mut margin = f64::INFINITY;
    let mut worst_t = t0;
    let end = x0.span().1;
    for k in 0..=samples {
        let t = t0 + (end - t0) * k as f64 / samples as f64;
        let a = x0.eval_component(t, 0)?;
        let b = x1.eval_component(t, 0)?;
        if a - b < margin {
            margin = a - b;
            worst_t = t;
        }
    }
    let vscale = x1.sup_component(0).max(1.0);
    if x0.blowup.is_some() || margin < -1e-7 * vscale {
        return Err(RiccatiError::ConclusionViolated { gap: margin, t: worst_t });
    }
    Ok(ComparisonRecord {
        hypothesis_min: hyp_min.0,
        hypothesis_trace: trace,
        domination_margin: margin,
        x0_span_end: end,
    })
}

// ---------------------------------------------------------------------------
// Extremal log-integral identity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct LogIntegralRecord {
    /// `∫ a x*` computed from the extremal solution directly
    pub direct: f64,
    /// the closed-form right-hand side (corrected derivation)
    pub rhs: f64,
    pub difference: f64,
    pub nu_at_t0: f64,
}

/// Compare the accumulated `∫_{t0}^t a x*` against its closed form in terms
/// of a nonvanishing normal solution `x0`. The direct value is the ground
/// truth; the difference is recorded, not asserted.
pub fn extremal_log_integral_check(
    spec: &RiccatiSpec,
    x0: &Trajectory,
    t: f64,
) -> Result<LogIntegralRecord, RiccatiError> {
    let t0 = spec.t0;
    let (_, hi) = x0.span();
    if t >= hi {
        return Err(RiccatiError::Hypothesis { what: format!("t = {t} beyond x0 span end {hi}") });
    }
    let min_abs = (0..x0.len()).fold(f64::INFINITY, |m, i| m.min(x0.value_at(i, 0).abs()));
    if min_abs <= 0.0 {
        return Err(RiccatiError::Hypothesis { what: "x0 vanishes on the span".into() });
    }

    let x_star = extremal_from_normal(spec, x0, t0, t)?;
    let (spec_c, xs) = (spec.clone(), std::sync::Arc::new(x_star));
    let direct = Cumulative::new(
        move |tau| {
            let (a, _b, _c) = spec_c.coeffs(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let v = xs.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            Ok(a * v)
        },
        t0,
        t,
        QuadOptions::default(),
    )?
    .eval(t)?;

    // rhs = -ln nu(t0) + ln[ exp{∫_{t0}^t a x0} · ∫_t^∞ (a x0/x0(t0)) e^{∫_{t0}^s [c/x0 - a x0]} ds ]
    let nu = nu_along(spec, x0, t0)?;
    let nu0 = nu.nus[0];
    let (spec_c, x0c) = (spec.clone(), std::sync::Arc::new(x0.clone()));
    let inner_weight = Cumulative::new(
        move |tau| {
            let (a, _b, c) = spec_c.coeffs(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let v = x0c.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            Ok(c / v - a * v)
        },
        t0,
        hi,
        QuadOptions::default(),
    )?;
    let inner_weight = std::sync::Arc::new(inner_weight);
    let x0_at0 = x0.eval_component(t0, 0)?;
    let (spec_c, x0c, iw) = (spec.clone(), std::sync::Arc::new(x0.clone()), inner_weight.clone());
    let tail_fn = Cumulative::new(
        move |s| {
            let (a, _b, _c) = spec_c.coeffs(s).map_err(|e| QuadError::Singular { t: s, what: e.to_string() })?;
            let v = x0c.eval_component(s, 0).map_err(|e| QuadError::Singular { t: s, what: e.to_string() })?;
            Ok(a * v / x0_at0 * iw.eval(s)?.exp())
        },
        t0,
        hi,
        QuadOptions::default(),
    )?;
    // improper upper limit: integrate to the span end and extrapolate
    let total = tail_fn.eval(hi)?;
    let delta = (hi - t0) * 0.05;
    let d1 = total - tail_fn.eval(hi - delta)?;
    let d2 = tail_fn.eval(hi - delta)? - tail_fn.eval(hi - 2.0 * delta)?;
    let r = if d2.abs() > 0.0 { d1 / d2 } else { 0.0 };
    let tail_beyond = if r.abs() < 0.95 && r.abs() > 0.0 { d1 * r / (1.0 - r) } else { 0.0 };
    let improper_from_t = total - tail_fn.eval(t)? + tail_beyond;

    let (spec_c, x0c) = (spec.clone(), std::sync::Arc::new(x0.clone()));
    let ax0 = Cumulative::new(
        move |tau| {
            let (a, _b, _c) = spec_c.coeffs(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            let v = x0c.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
            Ok(a * v)
        },
        t0,
        t,
        QuadOptions::default(),
    )?
    .eval(t)?;

    let rhs = -nu0.ln() + (ax0.exp() * improper_from_t).ln();
    Ok(LogIntegralRecord { direct, rhs, difference: direct - rhs, nu_at_t0: nu0 })
}

/// Zero items of a trajectory component (re-exported convenience).
pub fn zero_items(traj: &Trajectory, comp: usize, tol_abs: f64) -> Vec<ZeroItem> {
    crate::ode::zero_sets(traj, comp, tol_abs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    fn tanh_spec() -> RiccatiSpec {
        RiccatiSpec::parse("1", "0", "-1", 0.0).unwrap()
    }

    #[test]
    fn reciprocal_maps() {
        let spec = tanh_spec();
        let rec = reciprocal_spec(&spec, ReciprocalForm::Reciprocal);
        // (a, b, c) = (1, 0, -1) maps to itself
        assert_eq!(rec.a.eval(1.0).unwrap(), 1.0);
        assert_eq!(rec.b.eval(1.0).unwrap(), 0.0);
        assert_eq!(rec.c.eval(1.0).unwrap(), -1.0);

        // u = 1/x of a solution solves the reciprocal equation
        let x = solve_riccati(&spec, 2.0, (0.0, 6.0), &opts()).unwrap();
        let mut ts = Vec::new();
        let mut ys = Vec::new();
        let mut fs = Vec::new();
        for i in 0..x.len() {
            let t = x.times()[i];
            let v = x.value_at(i, 0);
            let u = 1.0 / v;
            ts.push(t);
            ys.push(u);
            fs.push(-x.deriv_at(i, 0) / (v * v));
        }
        let u_traj = Trajectory::from_samples(TrajectoryKind::RealScalar, &["u"], ts, ys, fs);
        assert!(riccati_residual_at_nodes(&rec, &u_traj) < 1e-8);
    }

    #[test]
    fn negated_reciprocal_map() {
        // x' + a12 x² + B x - a21 = 0 with (a12, B, a21) = (1, 0.3, 2):
        // attracting fixed point ≈ 1.27, so x stays positive and -1/x is
        // well defined
        let spec = RiccatiSpec::parse("1", "0.3", "-2", 0.0).unwrap();
        let rec = reciprocal_spec(&spec, ReciprocalForm::NegatedReciprocal);
        let x = solve_riccati(&spec, 1.0, (0.0, 4.0), &opts()).unwrap();
        assert!(x.blowup.is_none());
        let mut ts = Vec::new();
        let mut ys = Vec::new();
        let mut fs = Vec::new();
        for i in 0..x.len() {
            let t = x.times()[i];
            let v = x.value_at(i, 0);
            ts.push(t);
            ys.push(-1.0 / v);
            fs.push(x.deriv_at(i, 0) / (v * v));
        }
        let v_traj = Trajectory::from_samples(TrajectoryKind::RealScalar, &["v"], ts, ys, fs);
        let r = riccati_residual_at_nodes(&rec, &v_traj);
        assert!(r < 1e-8, "node residual {r}");
    }

    #[test]
    fn extremal_from_constant_normal() {
        // x0 ≡ 1 is normal; nu = 1/2; x* = 1 - 2 = -1
        let spec = tanh_spec();
        let x0 = solve_riccati(&spec, 1.0, (0.0, 40.0), &opts()).unwrap();
        let xs = extremal_from_normal(&spec, &x0, 0.0, 20.0).unwrap();
        let mut dev = 0.0f64;
        for i in 0..xs.len() {
            dev = dev.max((xs.value_at(i, 0) + 1.0).abs());
        }
        assert!(dev < 1e-6, "max deviation {dev}");
        assert!(riccati_residual(&spec, &xs) < 1e-6);
    }

    #[test]
    fn extremal_zero_case() {
        // a=1, b=0, c=0: x0 = x0/(1 + x0 t) normal for x0 > 0; x* ≡ 0
        let spec = RiccatiSpec::parse("1", "0", "0", 0.0).unwrap();
        let x0 = solve_riccati(&spec, 2.0, (0.0, 60.0), &opts()).unwrap();
        let xs = extremal_from_normal(&spec, &x0, 0.0, 25.0).unwrap();
        let mut dev = 0.0f64;
        for i in 0..xs.len() {
            dev = dev.max(xs.value_at(i, 0).abs());
        }
        // nu_{x0} has a harmonic-type tail here, so the extrapolation is the
        // limiting factor
        assert!(dev < 1e-3, "max deviation {dev}");
    }

    #[test]
    fn extremal_seed_invariance() {
        let spec = tanh_spec();
        let seeds = [0.0, 1.0, 3.0];
        let mut results: Vec<Trajectory> = Vec::new();
        for s in seeds {
            let x0 = solve_riccati(&spec, s, (0.0, 40.0), &opts()).unwrap();
            results.push(extremal_from_normal(&spec, &x0, 0.0, 15.0).unwrap());
        }
        for t in [0.5, 5.0, 14.5] {
            let base = results[0].eval_component(t, 0).unwrap();
            for r in &results[1..] {
                assert!((r.eval_component(t, 0).unwrap() - base).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn reg_boundary_examples() {
        let spec = tanh_spec();
        let b = reg_boundary(&spec, 0.0, (-2.0, 0.0), 40.0, &opts()).unwrap();
        assert!((b + 1.0).abs() < 1e-6, "boundary {b}");

        let spec0 = RiccatiSpec::parse("1", "0", "0", 0.0).unwrap();
        let b = reg_boundary(&spec0, 0.0, (-1.0, 1.0), 60.0, &opts()).unwrap();
        // survival boundary for x' + x² = 0 on a finite horizon sits at
        // -1/horizon, within the stated tolerance band around 0
        assert!(b.abs() < 0.02, "boundary {b}");

        // a=1, b=0, c=1: the tan family blows up from every initial value
        let spec1 = RiccatiSpec::parse("1", "0", "1", 0.0).unwrap();
        match reg_boundary(&spec1, 0.0, (-1e4, 1e4), 50.0, &opts()) {
            Err(RiccatiError::BracketInvalid { lo_survives, hi_survives }) => {
                assert!(!lo_survives && !hi_survives);
            }
            other => panic!("expected invalid bracket, got {other:?}"),
        }
    }

    #[test]
    fn role_classification() {
        let spec = tanh_spec();
        let r = classify_solution_role(&spec, 0.0, 0.0, 1e-4, 40.0, &opts()).unwrap();
        assert_eq!(r.role, RoleKind::Normal);
        assert!(matches!(r.nu_kind, Some(VerdictKind::Converged { .. })));
        let r = classify_solution_role(&spec, -1.0, 0.0, 1e-4, 40.0, &opts()).unwrap();
        assert_eq!(r.role, RoleKind::Extremal);
        let r = classify_solution_role(&spec, -1.5, 0.0, 1e-4, 40.0, &opts()).unwrap();
        assert_eq!(r.role, RoleKind::NotRegular);
        assert!(r.evidence[0].blowup.is_some());
    }

    #[test]
    fn predicted_patterns() {
        let spec = tanh_spec();
        let p = sign_pattern_predict(&spec, -0.5, 40.0, &opts()).unwrap();
        assert_eq!(p.pattern.as_ref().unwrap().signs, vec![Sign::Minus, Sign::Zero, Sign::Plus]);
        assert!(p.clause.contains("divergent gate"));
        let tr = solve_riccati(&spec, -0.5, (0.0, 40.0), &opts()).unwrap();
        let chk = sign_pattern_check(p.pattern.as_ref().unwrap(), &tr, 1e-9);
        assert!(chk.pass, "{:?}", chk.mismatch);
        // the single zero sits at atanh(1/2)
        let zs = zero_items(&tr, 0, 1e-9);
        assert_eq!(zs.len(), 1);
        assert!((zs[0].start() - 0.5f64.atanh()).abs() < 1e-6);

        let p = sign_pattern_predict(&spec, 0.5, 40.0, &opts()).unwrap();
        assert_eq!(p.pattern.as_ref().unwrap().signs, vec![Sign::Plus]);
        let tr = solve_riccati(&spec, 0.5, (0.0, 40.0), &opts()).unwrap();
        assert!(sign_pattern_check(p.pattern.as_ref().unwrap(), &tr, 1e-9).pass);

        // c ≥ 0 with both integrals divergent: no regular solutions
        let spec1 = RiccatiSpec::parse("1", "0", "1", 0.0).unwrap();
        let p = sign_pattern_predict(&spec1, 1.0, 50.0, &opts()).unwrap();
        assert!(!p.regular_expected);
        assert!(p.pattern.is_none());
        assert!(p.clause.contains("no regular solutions"));
    }

    #[test]
    fn pattern_check_fails_on_oscillation() {
        let sys = crate::ode::SystemSpec::parse("0", "1", "-1", "0", 0.0).unwrap();
        let tr = crate::ode::solve_system(&sys, (0.0, 1.0), (0.0, 10.0), &opts()).unwrap();
        let chk = sign_pattern_check(&SignPattern::new(&[Sign::Plus]), &tr, 1e-9);
        assert!(!chk.pass);
    }

    #[test]
    fn comparison_examples() {
        // identical specs: hypothesis ≡ 0, domination with equality
        let spec = tanh_spec();
        let x1 = solve_riccati(&spec, 0.0, (0.0, 20.0), &opts()).unwrap();
        let eta = linear_inequality_solution(&spec, 0.0, (0.0, 20.0), &opts()).unwrap();
        let rec = comparison_check(&spec, &spec, &x1, &eta, 0.0, &opts()).unwrap();
        assert!(rec.hypothesis_min.abs() < 1e-9);
        assert!(rec.domination_margin > -1e-9);

        // c = -1 below c1 = 0: x0 = tanh dominates x1 ≡ 0
        let spec1 = RiccatiSpec::parse("1", "0", "0", 0.0).unwrap();
        let x1 = solve_riccati(&spec1, 0.0, (0.0, 20.0), &opts()).unwrap();
        let eta = linear_inequality_solution(&spec, 0.0, (0.0, 20.0), &opts()).unwrap();
        let rec = comparison_check(&spec1, &spec, &x1, &eta, 0.0, &opts()).unwrap();
        assert!(rec.domination_margin > -1e-9);
    }

    #[test]
    fn log_integral_identity_for_coth_branch() {
        // x0 = coth(t + c) branch: normal, nonvanishing; x* ≡ -1 so the
        // direct integral is -t
        let spec = tanh_spec();
        let x0_init = 1.0f64 / 1.0f64.tanh(); // coth(1)
        let x0 = solve_riccati(&spec, x0_init, (0.0, 50.0), &opts()).unwrap();
        let rec = extremal_log_integral_check(&spec, &x0, 10.0).unwrap();
        assert!((rec.direct + 10.0).abs() < 1e-5, "direct {}", rec.direct);
        assert!(rec.difference.abs() < 1e-4, "difference {}", rec.difference);
    }

    #[test]
    fn normal_difference_integral_converges() {
        // (2.9)-type: a(x1 - x2) decays for two normal solutions
        let spec = tanh_spec();
        let x1 = solve_riccati(&spec, 0.5, (0.0, 80.0), &opts()).unwrap();
        let x2 = solve_riccati(&spec, 2.0, (0.0, 80.0), &opts()).unwrap();
        let (x1a, x2a) = (std::sync::Arc::new(x1), std::sync::Arc::new(x2));
        let f = move |t: f64| -> Result<f64, QuadError> {
            let a = x1a.eval_component(t, 0).map_err(|e| QuadError::Singular { t, what: e.to_string() })?;
            let b = x2a.eval_component(t, 0).map_err(|e| QuadError::Singular { t, what: e.to_string() })?;
            Ok(a - b)
        };
        let policy = HorizonPolicy { h0: 0.02, max_doublings: 11, ..Default::default() };
        let v = crate::quad::classify_improper(&f, 0.0, &policy);
        assert!(matches!(v.kind, VerdictKind::Converged { .. }), "{:?}", v.kind);
    }

    #[test]
    fn extremal_minus_normal_partials_fall() {
        // (2.10)-type: partial integrals of a(x* - x0) decrease without bound
        let spec = tanh_spec();
        let x0 = solve_riccati(&spec, 0.0, (0.0, 40.0), &opts()).unwrap();
        let xs = extremal_from_normal(&spec, &x0, 0.0, 20.0).unwrap();
        let (x0a, xsa) = (std::sync::Arc::new(x0), std::sync::Arc::new(xs));
        let c = Cumulative::new(
            move |t| {
                let a = xsa.eval_component(t, 0).map_err(|e| QuadError::Singular { t, what: e.to_string() })?;
                let b = x0a.eval_component(t, 0).map_err(|e| QuadError::Singular { t, what: e.to_string() })?;
                Ok(a - b)
            },
            0.0,
            20.0,
            QuadOptions::default(),
        )
        .unwrap();
        assert!(c.eval(20.0).unwrap() < -5.0);
    }

    #[test]
    fn monotone_survival_in_initial_value() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let a = format!("{:.3} + {:.3}*sin({:.3}*t)^2", rng.gen_range(0.2..1.0), rng.gen_range(0.0..0.5), rng.gen_range(0.3..2.0));
            let b = format!("{:.3}*cos({:.3}*t)", rng.gen_range(-0.4..0.4), rng.gen_range(0.3..2.0));
            let c = format!("{:.3}", rng.gen_range(-1.0..0.5));
            let spec = RiccatiSpec::parse(&a, &b, &c, 0.0).unwrap();
            let horizon = 15.0;
            let fast = SolveOptions::with_tol(1e-7);
            let inits = [-3.0, -1.0, -0.3, 0.0, 0.5, 2.0];
            let mut seen_survivor = false;
            for xi in inits {
                let s = survives(&spec, xi, 0.0, horizon, &fast).unwrap();
                if seen_survivor {
                    assert!(s, "survival must be monotone in the initial value (spec {a}; {b}; {c}, init {xi})");
                }
                seen_survivor |= s;
            }
        }
    }
}
