//! Lyapunov-stability checking through the weighted criterion functions,
//! pointwise solution envelopes for Riccati solutions and for the planar
//! system, Cauchy-Schwarz bounds on the accumulated `∫ a x`, classical
//! comparison envelopes for the power-coefficient system, and
//! envelope-containment verification.

use crate::expr::CoeffExpr;
use crate::ode::{solve_riccati, solve_system, OdeError, RiccatiSpec, SolveOptions, SystemSpec, Trajectory};
use crate::quad::{Cumulative, HorizonPolicy, QuadError, QuadOptions, VerdictKind};
use crate::riccati::{extremal_from_normal, iplus_verdict, nu_along, RiccatiError};
use crate::systemreg::GateRecord;
use crate::util::{self, BoundednessVerdict};
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum BoundsError {
    #[error("gate failed: {gate}")]
    GateFailed { gate: String },
    #[error("parameter constraint violated: {what}")]
    Constraint { what: String },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    #[error(transparent)]
    Trajectory(#[from] crate::ode::TrajectoryError),
}

fn expr_cum(e: &CoeffExpr, a: f64, b: f64) -> Result<Cumulative, QuadError> {
    let e = e.clone();
    Cumulative::new(
        move |tau| e.eval(tau).map_err(|err| QuadError::Singular { t: tau, what: err.to_string() }),
        a,
        b,
        QuadOptions::default(),
    )
}

// ---------------------------------------------------------------------------
// Envelopes
// ---------------------------------------------------------------------------

/// An evaluable bound curve.
pub struct EnvCurve(Box<dyn Fn(f64) -> f64 + Send + Sync>);

impl EnvCurve {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> EnvCurve {
        EnvCurve(Box::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

/// Lower/upper bound functions with the gate records that license them.
pub struct BoundEnvelope {
    pub lower: Option<EnvCurve>,
    pub upper: Option<EnvCurve>,
    pub provenance: String,
    pub gates: Vec<GateRecord>,
    /// `(name, value, error bar)` for constants estimated numerically from
    /// constructed solutions rather than given in closed form
    pub empirical_constant: Option<(String, f64, f64)>,
}

impl BoundEnvelope {
    pub fn sample(&self, ts: &[f64]) -> Vec<(f64, Option<f64>, Option<f64>)> {
        ts.iter()
            .map(|&t| (t, self.lower.as_ref().map(|c| c.eval(t)), self.upper.as_ref().map(|c| c.eval(t))))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContainmentRecord {
    pub pass: bool,
    pub max_lower_violation: f64,
    pub max_upper_violation: f64,
    pub samples: usize,
}

/// Max signed violation of a trajectory component against an envelope.
/// With `absolute` set, `|value|` is compared against the upper curve only.
pub fn envelope_verify(
    traj: &Trajectory,
    comp: usize,
    env: &BoundEnvelope,
    slack: f64,
    absolute: bool,
) -> ContainmentRecord {
    let mut low_v = 0.0f64;
    let mut up_v = 0.0f64;
    let n = traj.len();
    for i in 0..n {
        let t = traj.times()[i];
        let v = traj.value_at(i, comp);
        let v = if absolute { v.abs() } else { v };
        if let (false, Some(lo)) = (absolute, env.lower.as_ref()) {
            let l = lo.eval(t);
            if l.is_finite() {
                low_v = low_v.max(l - v);
            }
        }
        if let Some(hi) = env.upper.as_ref() {
            let u = hi.eval(t);
            if u.is_finite() {
                up_v = up_v.max(v - u);
            }
        }
    }
    ContainmentRecord {
        pass: low_v < slack && up_v < slack,
        max_lower_violation: low_v,
        max_upper_violation: up_v,
        samples: n,
    }
}

// ---------------------------------------------------------------------------
// Stability criterion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    AsymptoticallyStable,
    Unstable,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub verdict: Stability,
    pub f1: BoundednessVerdict,
    pub f2: BoundednessVerdict,
    /// samples of the first criterion function `e^{∫a11} I+_{a12,B}(t0; t)`
    pub f1_samples: Vec<(f64, f64)>,
    pub f2_samples: Vec<(f64, f64)>,
    /// windowed sups of sampled solutions' norms
    pub solution_growth: Vec<BoundednessVerdict>,
    pub solution_tail_fractions: Vec<f64>,
}

/// Lyapunov stability of the system with non-negative off-diagonal
/// coefficients: both weighted criterion functions must stay bounded. The
/// verdict is cross-checked against sampled solutions and demoted to
/// `Undetermined` on disagreement.
pub fn stability_check(
    sys: &SystemSpec,
    horizon: f64,
    opts: &SolveOptions,
) -> Result<StabilityReport, BoundsError> {
    let t0 = sys.t0;
    for (name, e) in [("a12 >= 0", &sys.a12), ("a21 >= 0", &sys.a21)] {
        let cert = e.sign_certify(t0, horizon, 512);
        if !cert.admits_non_negative() {
            return Err(BoundsError::GateFailed { gate: format!("{name}: {:?}", cert.verdict) });
        }
    }
    let b_expr = sys.b_expr();
    let bcum = Arc::new(expr_cum(&b_expr, t0, horizon)?);
    let a11cum = Arc::new(expr_cum(&sys.a11, t0, horizon)?);
    let a22cum = Arc::new(expr_cum(&sys.a22, t0, horizon)?);
    let inner1 = {
        let (a12, bcum) = (sys.a12.clone(), bcum.clone());
        Cumulative::new(
            move |tau| {
                let a = a12.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                Ok(a * (-bcum.eval(tau)?).exp())
            },
            t0,
            horizon,
            QuadOptions::default(),
        )?
    };
    let inner2 = {
        let (a21, bcum) = (sys.a21.clone(), bcum.clone());
        Cumulative::new(
            move |tau| {
                let a = a21.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                Ok(a * bcum.eval(tau)?.exp())
            },
            t0,
            horizon,
            QuadOptions::default(),
        )?
    };

    let samples = 1024;
    let mut ts = Vec::with_capacity(samples + 1);
    let mut f1v = Vec::with_capacity(samples + 1);
    let mut f2v = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let t = t0 + (horizon - t0) * k as f64 / samples as f64;
        ts.push(t);
        f1v.push(a11cum.eval(t)?.exp() * inner1.eval(t)?);
        f2v.push(a22cum.eval(t)?.exp() * inner2.eval(t)?);
    }
    let f1 = util::windowed_bounded(&ts, &f1v);
    let f2 = util::windowed_bounded(&ts, &f2v);

    // corroborating solution sups
    let mut solution_growth = Vec::new();
    let mut tail_fractions = Vec::new();
    for init in [(1.0, 0.0), (0.0, 1.0), (0.7, -0.7), (-0.3, 0.9)] {
        let tr = solve_system(sys, init, (t0, horizon), opts)?;
        let n = tr.len();
        let tss = tr.times().to_vec();
        let norms: Vec<f64> = (0..n)
            .map(|i| (tr.value_at(i, 0).powi(2) + tr.value_at(i, 1).powi(2)).sqrt())
            .collect();
        solution_growth.push(util::windowed_bounded(&tss, &norms));
        let sups = util::window_sups(&tss, &norms, 4);
        tail_fractions.push(if sups[0] > 0.0 { sups[3] / sups[0] } else { 0.0 });
    }

    let criterion_bounded = f1.bounded && f2.bounded;
    let criterion_unbounded = (!f1.bounded && f1.growth_ratio > 1.5) || (!f2.bounded && f2.growth_ratio > 1.5);
    let solutions_bounded = solution_growth.iter().all(|g| g.bounded || g.growth_ratio < 1.2);
    let some_solution_grows = solution_growth.iter().any(|g| !g.bounded && g.growth_ratio > 1.5);

    let verdict = if criterion_bounded && solutions_bounded {
        if tail_fractions.iter().all(|f| *f < 0.05) {
            Stability::AsymptoticallyStable
        } else {
            Stability::Stable
        }
    } else if criterion_unbounded && some_solution_grows {
        Stability::Unstable
    } else {
        Stability::Undetermined
    };
    let f1_samples: Vec<(f64, f64)> = ts.iter().copied().zip(f1v).collect();
    let f2_samples: Vec<(f64, f64)> = ts.iter().copied().zip(f2v).collect();
    Ok(StabilityReport { verdict, f1, f2, f1_samples, f2_samples, solution_growth, solution_tail_fractions: tail_fractions })
}

// ---------------------------------------------------------------------------
// Riccati solution envelope
// ---------------------------------------------------------------------------

/// Two-sided envelope on a Riccati solution from a gated initial value:
/// `x0 J_{-b}/(1 + x0 I+) ≤ x(t) ≤ J_{-b}[x0 - ∫ e^{∫b} c]`.
pub fn riccati_envelope(
    spec: &RiccatiSpec,
    x_init: f64,
    horizon: f64,
) -> Result<BoundEnvelope, BoundsError> {
    let t0 = spec.t0;
    let mut gates = Vec::new();
    let cert_a = spec.a.sign_certify(t0, horizon, 512);
    gates.push(GateRecord {
        name: "a >= 0".into(),
        passed: cert_a.admits_non_negative(),
        detail: format!("{:?}", cert_a.verdict),
    });
    let cert_c = spec.c.sign_certify(t0, horizon, 512);
    gates.push(GateRecord {
        name: "c <= 0".into(),
        passed: cert_c.admits_non_positive(),
        detail: format!("{:?}", cert_c.verdict),
    });
    let iab = iplus_verdict(&spec.a, &spec.b, t0, &HorizonPolicy::default());
    let threshold = match &iab {
        VerdictKind::DivergesPlus => 0.0,
        VerdictKind::Converged { value, .. } if *value > 0.0 => -1.0 / value,
        other => {
            gates.push(GateRecord {
                name: "I+(a,b) verdict".into(),
                passed: false,
                detail: format!("{other:?}"),
            });
            f64::INFINITY
        }
    };
    gates.push(GateRecord {
        name: "x_init above -1/I+(a,b)".into(),
        passed: x_init >= threshold - 1e-12,
        detail: format!("x_init = {x_init}, threshold = {threshold}"),
    });
    if let Some(g) = gates.iter().find(|g| !g.passed) {
        return Err(BoundsError::GateFailed { gate: format!("{}: {}", g.name, g.detail) });
    }

    let bcum = Arc::new(expr_cum(&spec.b, t0, horizon)?);
    let ipl = {
        let (a, bcum) = (spec.a.clone(), bcum.clone());
        Arc::new(Cumulative::new(
            move |tau| {
                let av = a.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                Ok(av * (-bcum.eval(tau)?).exp())
            },
            t0,
            horizon,
            QuadOptions::default(),
        )?)
    };
    let cw = {
        let (c, bcum) = (spec.c.clone(), bcum.clone());
        Arc::new(Cumulative::new(
            move |tau| {
                let cv = c.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                Ok(cv * bcum.eval(tau)?.exp())
            },
            t0,
            horizon,
            QuadOptions::default(),
        )?)
    };
    let (b1, i1) = (bcum.clone(), ipl.clone());
    let lower = EnvCurve::new(move |t| {
        let jb = (-b1.eval(t).unwrap_or(f64::NAN)).exp();
        let denom = 1.0 + x_init * i1.eval(t).unwrap_or(f64::NAN);
        x_init * jb / denom
    });
    let (b2, c2) = (bcum, cw);
    let upper = EnvCurve::new(move |t| {
        let jb = (-b2.eval(t).unwrap_or(f64::NAN)).exp();
        jb * (x_init - c2.eval(t).unwrap_or(f64::NAN))
    });
    Ok(BoundEnvelope {
        lower: Some(lower),
        upper: Some(upper),
        provenance: "riccati initial-value envelope".into(),
        gates,
        empirical_constant: None,
    })
}

// ---------------------------------------------------------------------------
// Log-integral (Cauchy-Schwarz) bounds
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq)]
pub enum LogBoundKind {
    /// upper bound on `∫ a x0` for the solution with `x0(t0) = 0`, `c ≤ 0`
    Normal,
    /// lower bound on `∫ a x*` through `ln(nu(t)/nu(t0))`
    Extremal,
    /// lower bound on `∫ a x*` with the tail of `I+(a,b)` and an empirical
    /// constant, for the doubly-convergent case
    ExtremalConvergent,
    /// upper bound on `∫ a x1` for a positive regular solution, `c ≥ 0`
    PositiveRegular { x1_init: f64 },
}

pub struct LogBoundReport {
    pub envelope: BoundEnvelope,
    /// `(t, direct ∫ a x, bound)` samples
    pub trace: Vec<(f64, f64, f64)>,
    pub max_violation: f64,
    pub pass: bool,
}

fn sqrt_term(acum: &Cumulative, qcum: &Cumulative, t: f64, extra: f64) -> f64 {
    let av = acum.eval(t).unwrap_or(f64::NAN);
    let qv = qcum.eval(t).unwrap_or(f64::NAN) + extra;
    (av * qv).max(0.0).sqrt()
}

/// Cauchy-Schwarz bounds on the accumulated `∫ a x`, compared against direct
/// integration along the relevant constructed solution.
pub fn log_integral_bounds(
    spec: &RiccatiSpec,
    kind: LogBoundKind,
    horizon: f64,
    opts: &SolveOptions,
) -> Result<LogBoundReport, BoundsError> {
    let t0 = spec.t0;
    let cert_a = spec.a.sign_certify(t0, horizon, 512);
    if !cert_a.admits_non_negative() {
        return Err(BoundsError::GateFailed { gate: format!("a >= 0: {:?}", cert_a.verdict) });
    }
    let mut gates = vec![GateRecord {
        name: "a >= 0".into(),
        passed: true,
        detail: format!("{:?}", cert_a.verdict),
    }];
    let acum = Arc::new(expr_cum(&spec.a, t0, horizon)?);
    let bcum = Arc::new(expr_cum(&spec.b, t0, horizon)?);
    // Q(t) = ∫ (b² - 4 a c)/a
    let qcum = {
        let s = spec.clone();
        Arc::new(Cumulative::new(
            move |tau| {
                let (a, b, c) = s.coeffs(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                if a <= 0.0 {
                    return Err(QuadError::Singular { t: tau, what: "a vanishes inside Q(t)".into() });
                }
                Ok((b * b - 4.0 * a * c) / a)
            },
            t0,
            horizon,
            QuadOptions::default(),
        )?)
    };

    // direct integral of a·x along a trajectory
    let direct_of = |x: &Trajectory, end: f64| -> Result<Cumulative, BoundsError> {
        let (a, xa) = (spec.a.clone(), Arc::new(x.clone()));
        Ok(Cumulative::new(
            move |tau| {
                let av = a.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                let xv = xa
                    .eval_component(tau, 0)
                    .map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                Ok(av * xv)
            },
            t0,
            end,
            QuadOptions::default(),
        )?)
    };

    let work_end = horizon + (horizon - t0).max(10.0);
    let (curve, direct, is_upper, empirical): (EnvCurve, Cumulative, bool, Option<(String, f64, f64)>) =
        match kind {
            LogBoundKind::Normal => {
                let cert_c = spec.c.sign_certify(t0, horizon, 512);
                gates.push(GateRecord {
                    name: "c <= 0".into(),
                    passed: cert_c.admits_non_positive(),
                    detail: format!("{:?}", cert_c.verdict),
                });
                if !cert_c.admits_non_positive() {
                    return Err(BoundsError::GateFailed { gate: "c <= 0".into() });
                }
                let x0 = solve_riccati(spec, 0.0, (t0, horizon), opts)?;
                let (ac, bc, qc) = (acum.clone(), bcum.clone(), qcum.clone());
                let curve = EnvCurve::new(move |t| {
                    -0.5 * bc.eval(t).unwrap_or(f64::NAN) + 0.5 * sqrt_term(&ac, &qc, t, 0.0)
                });
                (curve, direct_of(&x0, horizon)?, true, None)
            }
            LogBoundKind::Extremal => {
                let x0 = solve_riccati(spec, 0.0, (t0, work_end), opts)?;
                let nu = nu_along(spec, &x0, t0)?;
                let x_star = extremal_from_normal(spec, &x0, t0, horizon)?;
                let nu0 = nu.nus[0];
                let nut: Vec<(f64, f64)> = nu.ts.iter().copied().zip(nu.nus.iter().copied()).collect();
                let (ac, bc, qc) = (acum.clone(), bcum.clone(), qcum.clone());
                let curve = EnvCurve::new(move |t| {
                    let i = nut.partition_point(|p| p.0 < t).min(nut.len() - 1);
                    let nuv = nut[i].1;
                    -0.5 * bc.eval(t).unwrap_or(f64::NAN) - 0.5 * sqrt_term(&ac, &qc, t, 0.0)
                        + (nuv / nu0).ln()
                });
                (curve, direct_of(&x_star, horizon)?, false, None)
            }
            LogBoundKind::ExtremalConvergent => {
                let iab = iplus_verdict(&spec.a, &spec.b, t0, &HorizonPolicy::default());
                let inegc = iplus_verdict(&spec.c.negated(), &spec.b.negated(), t0, &HorizonPolicy::default());
                for (name, v) in [("I+(a,b) finite", &iab), ("I+(-c,-b) finite", &inegc)] {
                    let ok = matches!(v, VerdictKind::Converged { .. });
                    gates.push(GateRecord { name: name.into(), passed: ok, detail: format!("{v:?}") });
                    if !ok {
                        return Err(BoundsError::GateFailed { gate: name.into() });
                    }
                }
                let VerdictKind::Converged { value: iab_total, .. } = iab else { unreachable!() };
                let x0 = solve_riccati(spec, 0.0, (t0, work_end), opts)?;
                let nu = nu_along(spec, &x0, t0)?;
                let nu0 = nu.nus[0];
                let x_star = extremal_from_normal(spec, &x0, t0, horizon)?;
                // negative normal boundary: initial values just above it stay
                // negative; estimate by bisecting "eventually positive"
                let x_star0 = x_star.eval_component(t0, 0)?;
                let mut lo = x_star0 * 0.98;
                let mut hi = 0.0;
                for _ in 0..40 {
                    let mid = 0.5 * (lo + hi);
                    let tr = solve_riccati(spec, mid, (t0, work_end), opts)?;
                    let positive_tail = tr.blowup.is_none()
                        && tr.eval_component(tr.span().1, 0).map(|v| v > 0.0).unwrap_or(false);
                    if positive_tail {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let xn = solve_riccati(spec, lo, (t0, work_end), opts)?;
                // empirical offset: -2 ∫ a (x0 - xN) - ln nu(t0), estimated to
                // the work horizon with the truncation as the error bar
                let (a_e, x0a, xna) = (spec.a.clone(), Arc::new(x0.clone()), Arc::new(xn));
                let defect = Cumulative::new(
                    move |tau| {
                        let av = a_e.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                        let p = x0a.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                        let q = xna.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                        Ok(av * (p - q))
                    },
                    t0,
                    work_end,
                    QuadOptions::default(),
                )?;
                let total = defect.eval(work_end)?;
                let trunc = (total - defect.eval(work_end - (work_end - t0) * 0.1)?).abs();
                let offset = -2.0 * total - nu0.ln();
                // tail of I+(a,b) from t: e^{∫b(t)} (total - I(t))
                let ipl = {
                    let (a, bc) = (spec.a.clone(), bcum.clone());
                    Arc::new(Cumulative::new(
                        move |tau| {
                            let av = a.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                            Ok(av * (-bc.eval(tau)?).exp())
                        },
                        t0,
                        horizon,
                        QuadOptions::default(),
                    )?)
                };
                let (ac, bc, qc) = (acum.clone(), bcum.clone(), qcum.clone());
                let curve = EnvCurve::new(move |t| {
                    let tail = (bcum_eval(&bc, t)).exp() * (iab_total - ipl.eval(t).unwrap_or(f64::NAN));
                    -0.5 * bc.eval(t).unwrap_or(f64::NAN) - 0.5 * sqrt_term(&ac, &qc, t, 0.0)
                        + tail.max(1e-300).ln()
                        + offset
                });
                (
                    curve,
                    direct_of(&x_star, horizon)?,
                    false,
                    Some(("tail offset".into(), offset, 2.0 * trunc + 1e-9)),
                )
            }
            LogBoundKind::PositiveRegular { x1_init } => {
                let cert_c = spec.c.sign_certify(t0, horizon, 512);
                gates.push(GateRecord {
                    name: "c >= 0".into(),
                    passed: cert_c.admits_non_negative(),
                    detail: format!("{:?}", cert_c.verdict),
                });
                let iab = iplus_verdict(&spec.a, &spec.b, t0, &HorizonPolicy::default());
                gates.push(GateRecord {
                    name: "I+(a,b) divergent".into(),
                    passed: iab == VerdictKind::DivergesPlus,
                    detail: format!("{iab:?}"),
                });
                if gates.iter().any(|g| !g.passed) {
                    return Err(BoundsError::GateFailed { gate: "positive-regular gates".into() });
                }
                let x1 = solve_riccati(spec, x1_init, (t0, horizon), opts)?;
                if x1.blowup.is_some() {
                    return Err(BoundsError::GateFailed { gate: "supplied solution is not regular".into() });
                }
                let (ac, bc, qc) = (acum.clone(), bcum.clone(), qcum.clone());
                let curve = EnvCurve::new(move |t| {
                    -0.5 * bc.eval(t).unwrap_or(f64::NAN) + 0.5 * sqrt_term(&ac, &qc, t, 4.0 * x1_init)
                });
                (curve, direct_of(&x1, horizon)?, true, None)
            }
        };

    let mut trace = Vec::new();
    let mut violation = 0.0f64;
    let samples = 256;
    for k in 1..=samples {
        let t = t0 + (horizon - t0) * k as f64 / samples as f64;
        let d = direct.eval(t)?;
        let b = curve.eval(t);
        trace.push((t, d, b));
        violation = violation.max(if is_upper { d - b } else { b - d });
    }
    let scale = trace.iter().fold(1.0f64, |m, p| m.max(p.1.abs()));
    let pass = violation < 1e-6 * scale;
    let envelope = BoundEnvelope {
        lower: (!is_upper).then_some(curve_into(&kind, curve, is_upper)),
        upper: None,
        provenance: format!("log-integral bound {kind:?}"),
        gates,
        empirical_constant: empirical,
    };
    // place the curve on the correct side
    let envelope = match (is_upper, envelope) {
        (true, mut e) => {
            e.upper = e.lower.take();
            e
        }
        (false, e) => e,
    };
    Ok(LogBoundReport { envelope, trace, max_violation: violation, pass })
}

fn bcum_eval(c: &Arc<Cumulative>, t: f64) -> f64 {
    c.eval(t).unwrap_or(f64::NAN)
}

fn curve_into(_k: &LogBoundKind, c: EnvCurve, _upper: bool) -> EnvCurve {
    c
}

impl std::fmt::Debug for LogBoundKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LogBoundKind::Normal => write!(f, "normal upper"),
            LogBoundKind::Extremal => write!(f, "extremal lower"),
            LogBoundKind::ExtremalConvergent => write!(f, "extremal lower (convergent gates)"),
            LogBoundKind::PositiveRegular { .. } => write!(f, "positive-regular upper"),
        }
    }
}

// ---------------------------------------------------------------------------
// System envelopes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemEnvelopeKind {
    /// two-sided bound on φ from the ratio envelope
    PhiTwoSided,
    /// two-sided bound on ψ (transpose form)
    PsiTwoSided,
    /// sharper one-sided bound on φ with the empirical constant `c1`
    PhiSharpUpper,
    /// transpose of the sharp bound, for ψ
    PsiSharpUpper,
    /// Cauchy-Schwarz upper bound on the φ of the `(1, 0)` solution
    PhiSchwarz,
    /// Cauchy-Schwarz upper bound on |φ| of an arbitrary solution
    /// (empirical multiplier)
    PhiSchwarzGeneral,
    /// ψ-analog of the general Schwarz bound
    PsiSchwarzGeneral,
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

/// Pointwise envelope on a solution component of the system, for the
/// non-negative coefficient case. `init` is `(φ(t0), ψ(t0))`.
pub fn system_envelopes(
    sys: &SystemSpec,
    init: (f64, f64),
    kind: SystemEnvelopeKind,
    horizon: f64,
    opts: &SolveOptions,
) -> Result<BoundEnvelope, BoundsError> {
    use SystemEnvelopeKind::*;
    match kind {
        PsiTwoSided => {
            let mut env =
                system_envelopes(&transpose(sys), (init.1, init.0), PhiTwoSided, horizon, opts)?;
            env.provenance = "psi two-sided envelope (transpose form)".into();
            return Ok(env);
        }
        PsiSharpUpper => {
            let mut env =
                system_envelopes(&transpose(sys), (init.1, init.0), PhiSharpUpper, horizon, opts)?;
            env.provenance = "psi sharp upper envelope (transpose form)".into();
            return Ok(env);
        }
        PsiSchwarzGeneral => {
            let mut env =
                system_envelopes(&transpose(sys), (init.1, init.0), PhiSchwarzGeneral, horizon, opts)?;
            env.provenance = "psi Cauchy-Schwarz envelope (transpose form)".into();
            return Ok(env);
        }
        _ => {}
    }

    let t0 = sys.t0;
    let mut gates = Vec::new();
    for (name, e) in [("a12 >= 0", &sys.a12), ("a21 >= 0", &sys.a21)] {
        let cert = e.sign_certify(t0, horizon, 512);
        gates.push(GateRecord {
            name: name.into(),
            passed: cert.admits_non_negative(),
            detail: format!("{:?}", cert.verdict),
        });
    }
    if let Some(g) = gates.iter().find(|g| !g.passed) {
        return Err(BoundsError::GateFailed { gate: format!("{}: {}", g.name, g.detail) });
    }
    let (phi0, psi0) = init;
    let b_expr = sys.b_expr();
    let bcum = Arc::new(expr_cum(&b_expr, t0, horizon)?);
    let a11cum = Arc::new(expr_cum(&sys.a11, t0, horizon)?);
    // I+_{a12,B}(t0; t)
    let ipl = {
        let (a12, bc) = (sys.a12.clone(), bcum.clone());
        Arc::new(Cumulative::new(
            move |tau| {
                let a = a12.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                Ok(a * (-bc.eval(tau)?).exp())
            },
            t0,
            horizon,
            QuadOptions::default(),
        )?)
    };
    // K(t) = ∫ a12(τ) I-_{B,a21}(t0; τ) dτ with I- = e^{-∫B(τ)} ∫ e^{∫B} a21
    let kcum = {
        let inner = {
            let (a21, bc) = (sys.a21.clone(), bcum.clone());
            Arc::new(Cumulative::new(
                move |tau| {
                    let a = a21.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                    Ok(a * bc.eval(tau)?.exp())
                },
                t0,
                horizon,
                QuadOptions::default(),
            )?)
        };
        let (a12, bc) = (sys.a12.clone(), bcum.clone());
        Arc::new(Cumulative::new(
            move |tau| {
                let a = a12.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                Ok(a * (-bc.eval(tau)?).exp() * inner.eval(tau)?)
            },
            t0,
            horizon,
            QuadOptions::default(),
        )?)
    };

    match kind {
        PhiTwoSided => {
            if phi0 <= 0.0 {
                return Err(BoundsError::GateFailed { gate: "phi(t0) must be positive".into() });
            }
            let r0 = psi0 / phi0;
            let iab = iplus_verdict(&sys.a12, &b_expr, t0, &HorizonPolicy::default());
            let threshold = match &iab {
                VerdictKind::DivergesPlus => 0.0,
                VerdictKind::Converged { value, .. } if *value > 0.0 => -1.0 / value,
                other => {
                    return Err(BoundsError::GateFailed { gate: format!("I+(a12,B) verdict {other:?}") })
                }
            };
            gates.push(GateRecord {
                name: "initial ratio above -1/I+(a12,B)".into(),
                passed: r0 >= threshold - 1e-12,
                detail: format!("ratio {r0}, threshold {threshold}"),
            });
            if r0 < threshold - 1e-12 {
                return Err(BoundsError::GateFailed { gate: "initial ratio".into() });
            }
            let (a1, i1) = (a11cum.clone(), ipl.clone());
            let lower = EnvCurve::new(move |t| {
                phi0 * a1.eval(t).unwrap_or(f64::NAN).exp() * (1.0 + r0 * i1.eval(t).unwrap_or(f64::NAN))
            });
            let (a2, i2, k2) = (a11cum, ipl, kcum);
            let upper = EnvCurve::new(move |t| {
                phi0
                    * (r0 * i2.eval(t).unwrap_or(f64::NAN)
                        + a2.eval(t).unwrap_or(f64::NAN)
                        + k2.eval(t).unwrap_or(f64::NAN))
                    .exp()
            });
            Ok(BoundEnvelope {
                lower: Some(lower),
                upper: Some(upper),
                provenance: "phi two-sided envelope".into(),
                gates,
                empirical_constant: None,
            })
        }
        PhiSharpUpper => {
            if phi0 <= 0.0 || psi0 <= 0.0 {
                return Err(BoundsError::GateFailed { gate: "needs phi(t0) > 0 and psi(t0) > 0".into() });
            }
            // c1 = exp ∫ a12 (ψ/φ - ψ_ref/φ_ref) with the reference started
            // at ratio 0; estimated to the work horizon
            let work_end = horizon + (horizon - t0).max(10.0);
            let spec = sys.riccati();
            let x = solve_riccati(&spec, psi0 / phi0, (t0, work_end), opts)?;
            let xref = solve_riccati(&spec, 0.0, (t0, work_end), opts)?;
            if x.blowup.is_some() || xref.blowup.is_some() {
                return Err(BoundsError::GateFailed { gate: "ratio solution is not regular".into() });
            }
            let (a12, xa, xr) = (sys.a12.clone(), Arc::new(x), Arc::new(xref));
            let diff = Cumulative::new(
                move |tau| {
                    let a = a12.eval(tau).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                    let p = xa.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                    let q = xr.eval_component(tau, 0).map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                    Ok(a * (p - q))
                },
                t0,
                work_end,
                QuadOptions::default(),
            )?;
            let total = diff.eval(work_end)?;
            let trunc = (total - diff.eval(work_end - (work_end - t0) * 0.1)?).abs();
            let c1 = total.exp();
            let (a2, k2) = (a11cum, kcum);
            let upper = EnvCurve::new(move |t| {
                phi0 * c1 * (a2.eval(t).unwrap_or(f64::NAN) + k2.eval(t).unwrap_or(f64::NAN)).exp()
            });
            Ok(BoundEnvelope {
                lower: None,
                upper: Some(upper),
                provenance: "phi sharp upper envelope".into(),
                gates,
                empirical_constant: Some(("c1".into(), c1, c1 * trunc * 2.0)),
            })
        }
        PhiSchwarz | PhiSchwarzGeneral => {
            // exp{ ∫S/2 + √(∫a12 ∫ (B² + 4 a12 a21)/a12)/2 }
            let s_expr = sys.s_expr();
            let scum = Arc::new(expr_cum(&s_expr, t0, horizon)?);
            let a12cum = Arc::new(expr_cum(&sys.a12, t0, horizon)?);
            let qcum = {
                let sysc = sys.clone();
                Arc::new(Cumulative::new(
                    move |tau| {
                        let [a11, a12, a21, a22] = sysc
                            .eval_matrix(tau)
                            .map_err(|e| QuadError::Singular { t: tau, what: e.to_string() })?;
                        if a12 <= 0.0 {
                            return Err(QuadError::Singular { t: tau, what: "a12 vanishes".into() });
                        }
                        let b = a11 - a22;
                        Ok((b * b + 4.0 * a12 * a21) / a12)
                    },
                    t0,
                    horizon,
                    QuadOptions::default(),
                )?)
            };
            let shape = move |t: f64| {
                let s = scum.eval(t).unwrap_or(f64::NAN);
                let av = a12cum.eval(t).unwrap_or(f64::NAN);
                let qv = qcum.eval(t).unwrap_or(f64::NAN);
                (0.5 * s + 0.5 * (av * qv).max(0.0).sqrt()).exp()
            };
            let (multiplier, empirical) = if kind == PhiSchwarz {
                (1.0, None)
            } else {
                // empirical M: sup of |φ|/shape over the span for this init
                let tr = solve_system(sys, init, (t0, horizon), opts)?;
                let mut m = 0.0f64;
                for i in 0..tr.len() {
                    let t = tr.times()[i];
                    let s = shape(t);
                    if s.is_finite() && s > 0.0 {
                        m = m.max(tr.value_at(i, 0).abs() / s);
                    }
                }
                (m, Some(("M".to_string(), m, m * 1e-6)))
            };
            let upper = EnvCurve::new(move |t| multiplier * shape(t));
            Ok(BoundEnvelope {
                lower: None,
                upper: Some(upper),
                provenance: match kind {
                    PhiSchwarz => "phi Cauchy-Schwarz envelope (unit initial data)".into(),
                    _ => "phi Cauchy-Schwarz envelope (empirical multiplier)".into(),
                },
                gates,
                empirical_constant: empirical,
            })
        }
        PsiTwoSided | PsiSharpUpper | PsiSchwarzGeneral => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// Classical comparison envelopes for the power-coefficient system
// ---------------------------------------------------------------------------

/// Parameters of the power-coefficient system
/// `φ' = λ t^α φ + μ t^β ψ, ψ' = ν t^γ φ + λ t^α ψ` on `t ≥ t0 > 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerLawParams {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub t0: f64,
}

impl PowerLawParams {
    pub fn validate(&self) -> Result<(), BoundsError> {
        let c = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(BoundsError::Constraint { what: what.into() })
            }
        };
        c(self.mu > 0.0, "mu > 0")?;
        c(self.nu > 0.0, "nu > 0")?;
        c(self.alpha > -1.0, "alpha > -1")?;
        c(self.beta > -1.0, "beta > -1")?;
        c(self.gamma < -1.0, "gamma < -1")?;
        c(self.beta >= self.alpha, "beta >= alpha")?;
        c(self.beta + self.gamma + 2.0 > 0.0, "beta + gamma + 2 > 0")?;
        c(self.t0 > 0.0, "t0 > 0")
    }

    pub fn system(&self) -> SystemSpec {
        let diag = format!("{}*t^{}", self.lambda, self.alpha);
        SystemSpec::parse(
            &diag,
            &format!("{}*t^{}", self.mu, self.beta),
            &format!("{}*t^{}", self.nu, self.gamma),
            &diag,
            self.t0,
        )
        .expect("power-law coefficients parse")
    }
}

/// Named envelope shapes (multiplicative constants normalized to 1).
pub struct ClassicalEnvelopes {
    pub shapes: Vec<(String, EnvCurve)>,
}

impl ClassicalEnvelopes {
    /// `(name, value)` at the horizon, ascending — the first entry is the
    /// sharpest bound there.
    pub fn ordering_at(&self, t: f64) -> Vec<(String, f64)> {
        let mut v: Vec<(String, f64)> =
            self.shapes.iter().map(|(n, c)| (n.clone(), c.eval(t))).collect();
        v.sort_by(|a, b| a.1.total_cmp(&b.1));
        v
    }

    pub fn get(&self, name: &str) -> Option<&EnvCurve> {
        self.shapes.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }
}

/// The component-wise power-law envelopes plus the Wazevski, Lyapunov-type,
/// Bogdanov and Lozinski norm envelopes for the power-coefficient system.
pub fn classical_envelopes(p: &PowerLawParams) -> Result<ClassicalEnvelopes, BoundsError> {
    p.validate()?;
    let PowerLawParams { lambda, mu, nu, alpha, beta, gamma, t0 } = *p;
    let lam_term = move |t: f64| lambda / (alpha + 1.0) * t.powf(alpha + 1.0);
    let phi_power = EnvCurve::new(move |t| {
        (lam_term(t)
            + mu * nu * t0.powf(gamma + 1.0) / ((beta + 1.0) * (gamma + 1.0).abs()) * t.powf(beta + 1.0))
        .exp()
    });
    let psi_power = EnvCurve::new(move |t| {
        (lam_term(t) + mu * nu / ((beta + 1.0) * (beta + gamma + 2.0)) * t.powf(beta + gamma + 2.0)).exp()
    });
    let wazevski =
        EnvCurve::new(move |t| (lam_term(t) + mu / (2.0 * (beta + 1.0)) * t.powf(beta + 1.0)).exp());
    let lyap_integrand = move |tau: f64| -> Result<f64, QuadError> {
        let l2 = lambda * lambda * tau.powf(2.0 * alpha);
        let first = (l2 + nu * nu * tau.powf(2.0 * gamma)).sqrt();
        let second = (l2 + mu * mu * tau.powf(2.0 * beta)).sqrt();
        Ok(first.max(second))
    };
    let lyap_cum = Arc::new(Cumulative::new(lyap_integrand, t0, t0 + 1e4, QuadOptions::with_budget(2048))?);
    let lyapunov = EnvCurve::new(move |t| lyap_cum.eval(t).map(|v| v.exp()).unwrap_or(f64::NAN));
    let bogdanov = EnvCurve::new(move |t| {
        (2.0 * lambda.abs() / (alpha + 1.0) * t.powf(alpha + 1.0)
            + mu / (beta + 1.0) * t.powf(beta + 1.0))
        .exp()
    });
    let lozinski = EnvCurve::new(move |t| {
        (lambda * t.powf(alpha + 1.0) + mu / (beta + 1.0) * t.powf(beta + 1.0)).exp()
    });
    Ok(ClassicalEnvelopes {
        shapes: vec![
            ("phi_power".into(), phi_power),
            ("psi_power".into(), psi_power),
            ("wazevski".into(), wazevski),
            ("lyapunov".into(), lyapunov),
            ("bogdanov".into(), bogdanov),
            ("lozinski".into(), lozinski),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn stability_of_trig_squared_system() {
        let sys = SystemSpec::parse("0", "sin(t)^2", "cos(t)^2", "0", 0.0).unwrap();
        let rep = stability_check(&sys, 200.0, &opts()).unwrap();
        assert_eq!(rep.verdict, Stability::Unstable);
        // the first criterion function is ∫ sin², slope 1/2
        let ts: Vec<f64> = rep.f1_samples.iter().map(|p| p.0).collect();
        let vs: Vec<f64> = rep.f1_samples.iter().map(|p| p.1).collect();
        let (slope, _) = util::linear_fit(&ts, &vs);
        assert!((slope - 0.5).abs() < 0.02, "slope {slope}");
    }

    #[test]
    fn stability_of_decaying_coupling() {
        let sys = SystemSpec::parse("0", "exp(-t)", "exp(-t)", "0", 0.0).unwrap();
        let rep = stability_check(&sys, 200.0, &opts()).unwrap();
        assert_eq!(rep.verdict, Stability::Stable);
    }

    #[test]
    fn instability_of_linear_growth() {
        let sys = SystemSpec::parse("0", "1", "0", "0", 0.0).unwrap();
        let rep = stability_check(&sys, 200.0, &opts()).unwrap();
        assert_eq!(rep.verdict, Stability::Unstable);
    }

    #[test]
    fn riccati_envelope_contains_tanh() {
        let spec = RiccatiSpec::parse("1", "0", "-1", 0.0).unwrap();
        let env = riccati_envelope(&spec, 0.0, 20.0).unwrap();
        // x_init = 0: lower ≡ 0, upper = t - t0
        assert!(env.lower.as_ref().unwrap().eval(5.0).abs() < 1e-12);
        assert!((env.upper.as_ref().unwrap().eval(5.0) - 5.0).abs() < 1e-9);
        let tr = solve_riccati(&spec, 0.0, (0.0, 20.0), &opts()).unwrap();
        let rec = envelope_verify(&tr, 0, &env, 1e-7, false);
        assert!(rec.pass, "{rec:?}");
    }

    #[test]
    fn riccati_envelope_is_exact_for_decay_case() {
        // a=1, b=0, c=0 from x(0)=1: solution equals the lower curve
        let spec = RiccatiSpec::parse("1", "0", "0", 0.0).unwrap();
        let env = riccati_envelope(&spec, 1.0, 20.0).unwrap();
        let tr = solve_riccati(&spec, 1.0, (0.0, 20.0), &opts()).unwrap();
        for &t in &[0.5, 3.0, 18.0] {
            let x = tr.eval_component(t, 0).unwrap();
            let lo = env.lower.as_ref().unwrap().eval(t);
            assert!((x - lo).abs() < 1e-8, "x {x} vs lower {lo}");
            assert!((lo - 1.0 / (1.0 + t)).abs() < 1e-9);
        }
    }

    #[test]
    fn riccati_envelope_gate_failure() {
        let spec = RiccatiSpec::parse("1", "0", "1", 0.0).unwrap(); // c > 0
        assert!(matches!(riccati_envelope(&spec, 0.0, 10.0), Err(BoundsError::GateFailed { .. })));
    }

    #[test]
    fn envelope_verify_examples() {
        let sys = SystemSpec::parse("0", "1", "-1", "0", 0.0).unwrap();
        let tr = solve_system(&sys, (0.0, 1.0), (0.0, 10.0), &opts()).unwrap();
        let env = BoundEnvelope {
            lower: Some(EnvCurve::new(|_| -1.0)),
            upper: Some(EnvCurve::new(|_| 1.0)),
            provenance: "test band".into(),
            gates: vec![],
            empirical_constant: None,
        };
        let rec = envelope_verify(&tr, 0, &env, 1e-9, false);
        assert!(rec.pass);
        assert!(rec.max_upper_violation <= 0.0 || rec.max_upper_violation < 1e-9);

        let grow = SystemSpec::parse("1", "0", "0", "0", 0.0).unwrap();
        let tr = solve_system(&grow, (1.0, 0.0), (0.0, 10.0), &opts()).unwrap();
        let env = BoundEnvelope {
            lower: None,
            upper: Some(EnvCurve::new(|t: f64| (0.9 * t).exp())),
            provenance: "too tight".into(),
            gates: vec![],
            empirical_constant: None,
        };
        let rec = envelope_verify(&tr, 0, &env, 1e-9, false);
        assert!(!rec.pass);
        assert!(rec.max_upper_violation > 1.0);
    }

    #[test]
    fn phi_two_sided_envelope_contains_growth_solution() {
        let sys = SystemSpec::parse("0", "1", "1", "0", 0.0).unwrap();
        let env = system_envelopes(&sys, (1.0, 1.0), SystemEnvelopeKind::PhiTwoSided, 8.0, &opts()).unwrap();
        // lower = 1 + t, upper = e^{t + t²/2}; φ = e^t sits between
        let tr = solve_system(&sys, (1.0, 1.0), (0.0, 8.0), &opts()).unwrap();
        let rec = envelope_verify(&tr, 0, &env, 1e-6, false);
        assert!(rec.pass, "{rec:?}");
        assert!((env.lower.as_ref().unwrap().eval(3.0) - 4.0).abs() < 1e-7);
    }

    #[test]
    fn sharp_upper_is_sharper_than_plain_upper_under_divergent_gate() {
        // a12 ≡ 1 has a divergent weighted integral; the c1-form should beat
        // the two-sided upper at the horizon
        let sys = SystemSpec::parse("0", "1", "1", "0", 0.0).unwrap();
        let two = system_envelopes(&sys, (1.0, 1.0), SystemEnvelopeKind::PhiTwoSided, 8.0, &opts()).unwrap();
        let sharp = system_envelopes(&sys, (1.0, 1.0), SystemEnvelopeKind::PhiSharpUpper, 8.0, &opts()).unwrap();
        let t = 8.0;
        assert!(sharp.upper.as_ref().unwrap().eval(t) <= two.upper.as_ref().unwrap().eval(t));
    }

    #[test]
    fn schwarz_envelope_on_unit_solution() {
        let sys = SystemSpec::parse("0", "1", "1", "0", 0.0).unwrap();
        let env = system_envelopes(&sys, (1.0, 0.0), SystemEnvelopeKind::PhiSchwarz, 15.0, &opts()).unwrap();
        let tr = solve_system(&sys, (1.0, 0.0), (0.0, 15.0), &opts()).unwrap();
        let rec = envelope_verify(&tr, 0, &env, 1e-6, false);
        assert!(rec.pass, "{rec:?}");
        // S = 0, B = 0: bound is e^{√(t · 4t)/2} = e^t, and φ = cosh t ≤ e^t
        assert!((env.upper.as_ref().unwrap().eval(5.0) - 5.0f64.exp()).abs() / 5.0f64.exp() < 1e-7);
    }

    #[test]
    fn classical_envelope_ordering() {
        let p = PowerLawParams { lambda: -1.0, mu: 1.0, nu: 1.0, alpha: 0.0, beta: 0.0, gamma: -1.5, t0: 1.0 };
        let env = classical_envelopes(&p).unwrap();
        let wa = env.get("wazevski").unwrap().eval(50.0);
        let bo = env.get("bogdanov").unwrap().eval(50.0);
        assert!(wa < bo, "wazevski {wa} vs bogdanov {bo}");
        // the component-wise ψ bound decays here while the norm bounds grow
        let psi = env.get("psi_power").unwrap().eval(50.0);
        assert!(psi < wa);
    }

    #[test]
    fn power_law_constraint_validation() {
        let bad = PowerLawParams { lambda: 0.0, mu: 1.0, nu: 1.0, alpha: 0.0, beta: 0.0, gamma: -0.5, t0: 1.0 };
        assert!(matches!(classical_envelopes(&bad), Err(BoundsError::Constraint { .. })));
    }

    #[test]
    fn log_integral_normal_bound_constant_coefficients() {
        // constant coefficients: the bound is tight up to a constant summand
        let spec = RiccatiSpec::parse("1", "0", "-1", 0.0).unwrap();
        let rep = log_integral_bounds(&spec, LogBoundKind::Normal, 40.0, &opts()).unwrap();
        assert!(rep.pass, "violation {}", rep.max_violation);
        // gap(t) = bound - direct -> ln 2
        let tail: Vec<f64> = rep.trace.iter().rev().take(20).map(|p| p.2 - p.1).collect();
        let spread = tail.iter().fold(0.0f64, |m, v| m.max(*v)) - tail.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        assert!(spread < 0.01, "gap not settling: spread {spread}");
        assert!((tail[0] - 2.0f64.ln()).abs() < 0.01, "gap {}", tail[0]);
    }

    #[test]
    fn log_integral_extremal_bound() {
        let spec = RiccatiSpec::parse("1", "0", "-1", 0.0).unwrap();
        let rep = log_integral_bounds(&spec, LogBoundKind::Extremal, 30.0, &opts()).unwrap();
        assert!(rep.pass, "violation {}", rep.max_violation);
    }

    #[test]
    fn log_integral_positive_regular_bound() {
        // c must be integrable here: a constant positive c admits no regular
        // solution at all (both gate integrals diverge)
        let spec = RiccatiSpec::parse("1", "0", "0.25*exp(-t)", 0.0).unwrap();
        let rep =
            log_integral_bounds(&spec, LogBoundKind::PositiveRegular { x1_init: 1.0 }, 30.0, &opts()).unwrap();
        assert!(rep.pass, "violation {}", rep.max_violation);
    }

    #[test]
    fn envelope_monotone_in_initial_value() {
        // tightening the initial value toward the extremal one never widens
        // the band
        let spec = RiccatiSpec::parse("1", "0", "-1", 0.0).unwrap();
        let mut prev_width: Option<Vec<f64>> = None;
        for x0 in [1.5, 1.0, 0.5, 0.1] {
            let env = riccati_envelope(&spec, x0, 20.0).unwrap();
            let widths: Vec<f64> = (1..=20)
                .map(|k| {
                    let t = k as f64;
                    env.upper.as_ref().unwrap().eval(t) - env.lower.as_ref().unwrap().eval(t)
                })
                .collect();
            if let Some(p) = &prev_width {
                for (w, pw) in widths.iter().zip(p) {
                    assert!(*w <= *pw + 1e-9);
                }
            }
            prev_width = Some(widths);
        }
    }
}
