//! Adaptive numerical integration of the planar system, of scalar Riccati
//! equations with finite-time blow-up detection, and of the complex Riccati
//! solution with unit imaginary initial value; plus zero-set extraction and
//! the Riccati-to-system solution lift.
//!
//! The integrator is an embedded Dormand-Prince 5(4) pair with PI-free step
//! control and cubic Hermite dense output over the accepted nodes. The
//! maximum step is coupled to the tolerance so that dense-output residuals
//! stay within an order of magnitude of the local error target.

use crate::expr::CoeffExpr;
use serde::Serialize;

#[derive(Debug, Clone, thiserror::Error)]
pub enum TrajectoryError {
    #[error("t = {t} outside trajectory span [{lo}, {hi}]")]
    OutOfSpan { t: f64, lo: f64, hi: f64 },
    #[error("component {comp} out of range (dim {dim})")]
    BadComponent { comp: usize, dim: usize },
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum OdeError {
    #[error("step size collapsed at t = {t} (coefficient singularity or loss of smoothness)")]
    StepSizeCollapse { t: f64 },
    #[error("coefficient evaluation failed at t = {t}: {what}")]
    Coefficient { t: f64, what: String },
    #[error("state magnitude exceeded the overflow guard at t = {t}")]
    Overflow { t: f64 },
    #[error("Im z lost positivity at t = {t}; the tolerance is insufficient for this system")]
    PositivityLoss { t: f64 },
    #[error("exceeded the step budget near t = {t}")]
    TooManySteps { t: f64 },
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

/// Tolerances and guards for one solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step; `None` couples it to `rtol` so that cubic
    /// Hermite interpolation between nodes keeps residuals near `10·rtol`.
    pub hmax: Option<f64>,
    pub max_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { rtol: 1e-9, atol: 1e-12, hmax: None, max_steps: 4_000_000 }
    }
}

impl SolveOptions {
    pub fn with_tol(rtol: f64) -> Self {
        SolveOptions { rtol, atol: rtol * 1e-3, ..Default::default() }
    }

    fn effective_hmax(&self) -> f64 {
        self.hmax.unwrap_or_else(|| (6.0 * self.rtol.cbrt()).clamp(1e-4, 0.25))
    }
}

const OVERFLOW_GUARD: f64 = 1e250;
pub const ESCAPE_THRESHOLD: f64 = 1e8;
// escape times are localized to this step width before truncating
const ESCAPE_LOCALIZE_H: f64 = 2.5e-7;

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

/// The planar linear system `φ' = a11 φ + a12 ψ, ψ' = a21 φ + a22 ψ`.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub a11: CoeffExpr,
    pub a12: CoeffExpr,
    pub a21: CoeffExpr,
    pub a22: CoeffExpr,
    pub t0: f64,
}

impl SystemSpec {
    pub fn parse(a11: &str, a12: &str, a21: &str, a22: &str, t0: f64) -> Result<SystemSpec, crate::expr::ParseError> {
        Ok(SystemSpec {
            a11: CoeffExpr::parse(a11)?,
            a12: CoeffExpr::parse(a12)?,
            a21: CoeffExpr::parse(a21)?,
            a22: CoeffExpr::parse(a22)?,
            t0,
        })
    }

    /// `B(t) = a11(t) - a22(t)`.
    pub fn b_expr(&self) -> CoeffExpr {
        self.a11.difference(&self.a22)
    }

    /// `S(t) = a11(t) + a22(t)`.
    pub fn s_expr(&self) -> CoeffExpr {
        self.a11.sum(&self.a22)
    }

    /// The induced scalar Riccati equation `z' + a12 z² + B z - a21 = 0`
    /// for the ratio z = ψ/φ.
    pub fn riccati(&self) -> RiccatiSpec {
        RiccatiSpec { a: self.a12.clone(), b: self.b_expr(), c: self.a21.negated(), t0: self.t0 }
    }

    pub fn eval_matrix(&self, t: f64) -> Result<[f64; 4], OdeError> {
        let g = |e: &CoeffExpr| e.eval(t).map_err(|err| OdeError::Coefficient { t, what: err.to_string() });
        Ok([g(&self.a11)?, g(&self.a12)?, g(&self.a21)?, g(&self.a22)?])
    }
}

/// Scalar Riccati equation `x' + a x² + b x + c = 0`.
#[derive(Debug, Clone)]
pub struct RiccatiSpec {
    pub a: CoeffExpr,
    pub b: CoeffExpr,
    pub c: CoeffExpr,
    pub t0: f64,
}

impl RiccatiSpec {
    pub fn parse(a: &str, b: &str, c: &str, t0: f64) -> Result<RiccatiSpec, crate::expr::ParseError> {
        Ok(RiccatiSpec { a: CoeffExpr::parse(a)?, b: CoeffExpr::parse(b)?, c: CoeffExpr::parse(c)?, t0 })
    }

    pub fn coeffs(&self, t: f64) -> Result<(f64, f64, f64), OdeError> {
        let g = |e: &CoeffExpr| e.eval(t).map_err(|err| OdeError::Coefficient { t, what: err.to_string() });
        Ok((g(&self.a)?, g(&self.b)?, g(&self.c)?))
    }

    /// Right-hand side `x' = -(a x² + b x + c)`.
    pub fn rhs(&self, t: f64, x: f64) -> Result<f64, OdeError> {
        let (a, b, c) = self.coeffs(t)?;
        Ok(-(a * x * x + b * x + c))
    }
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrajectoryKind {
    RealScalar,
    RealPair,
    ComplexScalar,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BlowUpDirection {
    PlusInfinity,
    MinusInfinity,
}

/// Finite-time escape record for a Riccati solve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlowUpReport {
    pub t_escape: f64,
    pub direction: BlowUpDirection,
    pub last_value: f64,
}

/// Adaptively sampled solution path with cubic Hermite dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    names: Vec<String>,
    dim: usize,
    ts: Vec<f64>,
    ys: Vec<f64>,
    fs: Vec<f64>,
    pub blowup: Option<BlowUpReport>,
}

impl Trajectory {
    pub fn from_samples(
        kind: TrajectoryKind,
        names: &[&str],
        ts: Vec<f64>,
        ys: Vec<f64>,
        fs: Vec<f64>,
    ) -> Trajectory {
        let dim = names.len();
        assert!(dim > 0 && ts.len() >= 2);
        assert_eq!(ys.len(), ts.len() * dim);
        assert_eq!(fs.len(), ts.len() * dim);
        debug_assert!(ts.windows(2).all(|w| w[0] < w[1]), "times must increase strictly");
        Trajectory { kind, names: names.iter().map(|s| s.to_string()).collect(), dim, ts, ys, fs, blowup: None }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.ts[0], *self.ts.last().unwrap())
    }

    pub fn times(&self) -> &[f64] {
        &self.ts
    }

    pub fn value_at(&self, i: usize, comp: usize) -> f64 {
        self.ys[i * self.dim + comp]
    }

    pub fn deriv_at(&self, i: usize, comp: usize) -> f64 {
        self.fs[i * self.dim + comp]
    }

    fn locate(&self, t: f64) -> Result<usize, TrajectoryError> {
        let (lo, hi) = self.span();
        let eps = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if t < lo - eps || t > hi + eps {
            return Err(TrajectoryError::OutOfSpan { t, lo, hi });
        }
        let t = t.clamp(lo, hi);
        let i = match self.ts.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => i.min(self.ts.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.ts.len() - 2),
        };
        Ok(i)
    }

    /// Dense value of one component (cubic Hermite on the bracketing step).
    pub fn eval_component(&self, t: f64, comp: usize) -> Result<f64, TrajectoryError> {
        if comp >= self.dim {
            return Err(TrajectoryError::BadComponent { comp, dim: self.dim });
        }
        let i = self.locate(t)?;
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let y0 = self.value_at(i, comp);
        let y1 = self.value_at(i + 1, comp);
        let f0 = self.deriv_at(i, comp);
        let f1 = self.deriv_at(i + 1, comp);
        let s2 = s * s;
        let s3 = s2 * s;
        Ok((2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * f0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * f1)
    }

    /// Dense derivative of one component.
    pub fn deriv_component(&self, t: f64, comp: usize) -> Result<f64, TrajectoryError> {
        if comp >= self.dim {
            return Err(TrajectoryError::BadComponent { comp, dim: self.dim });
        }
        let i = self.locate(t)?;
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let y0 = self.value_at(i, comp);
        let y1 = self.value_at(i + 1, comp);
        let f0 = self.deriv_at(i, comp);
        let f1 = self.deriv_at(i + 1, comp);
        let s2 = s * s;
        let ds = (6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * h * f0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * h * f1;
        Ok(ds / h)
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>, TrajectoryError> {
        (0..self.dim).map(|c| self.eval_component(t, c)).collect()
    }

    pub fn first(&self) -> Vec<f64> {
        self.ys[..self.dim].to_vec()
    }

    pub fn last(&self) -> Vec<f64> {
        self.ys[self.ys.len() - self.dim..].to_vec()
    }

    /// Maximum |component| over the samples.
    pub fn sup_component(&self, comp: usize) -> f64 {
        (0..self.len()).fold(0.0f64, |m, i| m.max(self.value_at(i, comp).abs()))
    }

    /// CSV with a `t,<names>` header row.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "t")?;
        for n in &self.names {
            write!(w, ",{n}")?;
        }
        writeln!(w)?;
        for i in 0..self.len() {
            write!(w, "{}", self.ts[i])?;
            for c in 0..self.dim {
                write!(w, ",{}", self.value_at(i, c))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)
// ---------------------------------------------------------------------------

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type Rhs<'a> = dyn Fn(f64, &[f64], &mut [f64]) -> Result<(), OdeError> + 'a;

struct StepOut {
    y1: Vec<f64>,
    f1: Vec<f64>,
    err_ratio: f64,
}

/// One trial DOPRI5 step. `None` when a stage fails to evaluate or produces
/// a non-finite value.
fn try_step(rhs: &Rhs, t: f64, y: &[f64], f0: &[f64], h: f64, rtol: f64, atol: f64) -> Option<StepOut> {
    let n = y.len();
    let mut k = vec![vec![0.0; n]; 7];
    k[0].copy_from_slice(f0);
    let mut ytmp = vec![0.0; n];
    for stage in 0..6 {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                acc += A[stage][j] * kj[i];
            }
            ytmp[i] = y[i] + h * acc;
        }
        let ts = t + C[stage] * h;
        let (head, tail) = k.split_at_mut(stage + 1);
        let _ = head;
        if rhs(ts, &ytmp, &mut tail[0]).is_err() {
            return None;
        }
        if tail[0].iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    // stage 7 input is the 5th-order solution (FSAL)
    let y1 = ytmp.clone();
    if y1.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let f1 = k[6].clone();
    let mut err = 0.0;
    for i in 0..n {
        let mut e = 0.0;
        for (j, kj) in k.iter().enumerate() {
            let b5 = if j < 6 { A[5][j] } else { 0.0 };
            e += (b5 - B4[j]) * kj[i];
        }
        e *= h;
        let sc = atol + rtol * y[i].abs().max(y1[i].abs());
        err += (e / sc) * (e / sc);
    }
    let err_ratio = (err / n as f64).sqrt();
    if !err_ratio.is_finite() {
        return None;
    }
    Some(StepOut { y1, f1, err_ratio })
}

/// What a solve should do when the state runs away.
#[derive(Clone, Copy)]
pub enum EscapePolicy {
    /// Treat runaway state as an error (`Overflow`).
    ErrorOut,
    /// Truncate with a `BlowUpReport` once |state| crosses the threshold,
    /// bracketing the escape time by step halving.
    Truncate { threshold: f64 },
}

pub struct OdeProblem<'a> {
    pub rhs: &'a Rhs<'a>,
    pub init: &'a [f64],
    pub span: (f64, f64),
    pub names: &'a [&'a str],
    pub kind: TrajectoryKind,
    pub escape: EscapePolicy,
    /// Error out if component `.0` drops to or below `.1`.
    pub positivity: Option<(usize, f64)>,
}

/// Generic adaptive solve over `[span.0, span.1]`, sampling every accepted
/// node together with its derivative.
pub fn solve_ode(problem: &OdeProblem<'_>, opts: &SolveOptions) -> Result<Trajectory, OdeError> {
    let (t_start, t_end) = problem.span;
    assert!(t_end > t_start, "span must be increasing");
    let n = problem.init.len();
    let hmax = opts.effective_hmax();
    let mut t = t_start;
    let mut y = problem.init.to_vec();
    let mut f = vec![0.0; n];
    (problem.rhs)(t, &y, &mut f)?;

    let mut ts = vec![t];
    let mut ys = y.clone();
    let mut fs = f.clone();
    let mut blowup = None;

    let escape_threshold = match problem.escape {
        EscapePolicy::Truncate { threshold } => Some(threshold),
        EscapePolicy::ErrorOut => None,
    };

    let mut h: f64 = (hmax).min((t_end - t_start) * 1e-3).max(1e-8);
    let mut steps = 0usize;
    'outer: while t < t_end {
        if steps >= opts.max_steps {
            return Err(OdeError::TooManySteps { t });
        }
        steps += 1;
        h = h.min(t_end - t).min(hmax);
        let hmin = 1e-14 * (1.0 + t.abs());
        if h < hmin {
            return Err(OdeError::StepSizeCollapse { t });
        }
        match try_step(problem.rhs, t, &y, &f, h, opts.rtol, opts.atol) {
            Some(step) if step.err_ratio <= 1.0 => {
                let exceeded = escape_threshold
                    .map(|thr| step.y1.iter().any(|v| v.abs() >= thr))
                    .unwrap_or(false);
                if exceeded {
                    // reject and shrink until the crossing is localized
                    if h <= ESCAPE_LOCALIZE_H {
                        let dominant = dominant_component(&step.y1);
                        blowup = Some(BlowUpReport {
                            t_escape: t + h,
                            direction: if step.y1[dominant] > 0.0 {
                                BlowUpDirection::PlusInfinity
                            } else {
                                BlowUpDirection::MinusInfinity
                            },
                            last_value: step.y1[dominant],
                        });
                        break 'outer;
                    }
                    h *= 0.5;
                    continue;
                }
                t += h;
                y = step.y1;
                f = step.f1;
                ts.push(t);
                ys.extend_from_slice(&y);
                fs.extend_from_slice(&f);
                if let Some((comp, floor)) = problem.positivity {
                    if y[comp] <= floor {
                        return Err(OdeError::PositivityLoss { t });
                    }
                }
                if escape_threshold.is_none() && y.iter().any(|v| v.abs() > OVERFLOW_GUARD) {
                    return Err(OdeError::Overflow { t });
                }
                let fac = (0.9 * step.err_ratio.powf(-0.2)).clamp(0.2, 5.0);
                h *= fac;
            }
            Some(step) => {
                let fac = (0.9 * step.err_ratio.powf(-0.2)).clamp(0.1, 0.9);
                h *= fac;
            }
            None => {
                // stage failure: either a pole under the escape policy or a
                // genuine coefficient problem
                if h <= ESCAPE_LOCALIZE_H {
                    if let Some(thr) = escape_threshold {
                        if y.iter().any(|v| v.abs() > thr * 1e-3) {
                            let dominant = dominant_component(&y);
                            blowup = Some(BlowUpReport {
                                t_escape: t + h,
                                direction: if y[dominant] > 0.0 {
                                    BlowUpDirection::PlusInfinity
                                } else {
                                    BlowUpDirection::MinusInfinity
                                },
                                last_value: y[dominant],
                            });
                            break 'outer;
                        }
                    }
                }
                h *= 0.5;
            }
        }
    }

    if ts.len() < 2 {
        // degenerate truncation right at the start: synthesise a tiny segment
        let te = blowup.map(|b| b.t_escape).unwrap_or(t_start + 1e-12);
        ts.push(te.max(t_start + 1e-12));
        ys.extend_from_slice(&y);
        fs.extend_from_slice(&f);
    }

    let mut traj = Trajectory::from_samples(problem.kind, problem.names, ts, ys, fs);
    traj.blowup = blowup;
    Ok(traj)
}

fn dominant_component(y: &[f64]) -> usize {
    y.iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

// ---------------------------------------------------------------------------
// Spec-level solvers
// ---------------------------------------------------------------------------

/// Integrate the planar system from `init` over `span`.
pub fn solve_system(
    sys: &SystemSpec,
    init: (f64, f64),
    span: (f64, f64),
    opts: &SolveOptions,
) -> Result<Trajectory, OdeError> {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), OdeError> {
        let [a11, a12, a21, a22] = sys.eval_matrix(t)?;
        dy[0] = a11 * y[0] + a12 * y[1];
        dy[1] = a21 * y[0] + a22 * y[1];
        Ok(())
    };
    solve_ode(
        &OdeProblem {
            rhs: &rhs,
            init: &[init.0, init.1],
            span,
            names: &["phi", "psi"],
            kind: TrajectoryKind::RealPair,
            escape: EscapePolicy::ErrorOut,
            positivity: None,
        },
        opts,
    )
}

/// Integrate a scalar Riccati equation; finite-time escapes are reported
/// in-band through `Trajectory::blowup`.
pub fn solve_riccati(
    spec: &RiccatiSpec,
    x_init: f64,
    span: (f64, f64),
    opts: &SolveOptions,
) -> Result<Trajectory, OdeError> {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), OdeError> {
        dy[0] = spec.rhs(t, y[0])?;
        Ok(())
    };
    solve_ode(
        &OdeProblem {
            rhs: &rhs,
            init: &[x_init],
            span,
            names: &["x"],
            kind: TrajectoryKind::RealScalar,
            escape: EscapePolicy::Truncate { threshold: ESCAPE_THRESHOLD },
            positivity: None,
        },
        opts,
    )
}

/// The complex Riccati solution of the induced equation with `z(t0) = i`,
/// integrated as its real and imaginary parts. Global existence with
/// `Im z > 0` is guaranteed analytically; numeric loss of positivity is
/// reported as an error, never as a result.
pub fn solve_riccati_complex(
    sys: &SystemSpec,
    span: (f64, f64),
    opts: &SolveOptions,
) -> Result<Trajectory, OdeError> {
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), OdeError> {
        let [a11, a12, a21, a22] = sys.eval_matrix(t)?;
        let b = a11 - a22;
        let (x, im) = (y[0], y[1]);
        dy[0] = -a12 * (x * x - im * im) - b * x + a21;
        dy[1] = -2.0 * a12 * x * im - b * im;
        Ok(())
    };
    solve_ode(
        &OdeProblem {
            rhs: &rhs,
            init: &[0.0, 1.0],
            span,
            names: &["x0", "y0"],
            kind: TrajectoryKind::ComplexScalar,
            escape: EscapePolicy::ErrorOut,
            positivity: Some((1, 1e-250)),
        },
        opts,
    )
}

/// Lift a real Riccati trajectory to a system solution through
/// `φ(t) = φ(t1)·exp ∫ (a12 x + a11)`, `ψ = x φ`.
pub fn lift_riccati(
    sys: &SystemSpec,
    z_traj: &Trajectory,
    phi_at_t1: f64,
    t1: f64,
) -> Result<Trajectory, OdeError> {
    assert!(phi_at_t1 != 0.0, "phi(t1) must be nonzero");
    let (lo, hi) = z_traj.span();
    if t1 < lo - 1e-9 || t1 > hi {
        return Err(OdeError::Trajectory(TrajectoryError::OutOfSpan { t: t1, lo, hi }));
    }
    let mut ts: Vec<f64> = vec![t1];
    ts.extend(z_traj.times().iter().copied().filter(|&t| t > t1 + 1e-14));
    let mut exponent = 0.0;
    let mut ys: Vec<f64> = Vec::with_capacity(ts.len() * 2);
    let mut fs: Vec<f64> = Vec::with_capacity(ts.len() * 2);
    let mut prev_t = t1;
    for (i, &t) in ts.iter().enumerate() {
        if i > 0 {
            let seg = |tau: f64| -> Result<f64, crate::quad::QuadError> {
                let x = z_traj
                    .eval_component(tau, 0)
                    .map_err(|e| crate::quad::QuadError::Singular { t: tau, what: e.to_string() })?;
                let a12 = sys.a12.eval(tau).map_err(|e| crate::quad::QuadError::Singular { t: tau, what: e.to_string() })?;
                let a11 = sys.a11.eval(tau).map_err(|e| crate::quad::QuadError::Singular { t: tau, what: e.to_string() })?;
                Ok(a12 * x + a11)
            };
            let (v, _) = crate::quad::integrate(&seg, prev_t, t, &crate::quad::QuadOptions::default())
                .map_err(|e| OdeError::Coefficient { t, what: e.to_string() })?;
            exponent += v;
        }
        let x = z_traj.eval_component(t, 0)?;
        let phi = phi_at_t1 * exponent.exp();
        let psi = x * phi;
        let [a11, a12, a21, a22] = sys.eval_matrix(t)?;
        ys.push(phi);
        ys.push(psi);
        fs.push(a11 * phi + a12 * psi);
        fs.push(a21 * phi + a22 * psi);
        prev_t = t;
    }
    Ok(Trajectory::from_samples(TrajectoryKind::RealPair, &["phi", "psi"], ts, ys, fs))
}

// ---------------------------------------------------------------------------
// Zero sets
// ---------------------------------------------------------------------------

/// A zero of a trajectory component: an isolated point or a whole segment
/// on which the component stays below the detection threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ZeroItem {
    Point(f64),
    Interval(f64, f64),
}

impl ZeroItem {
    pub fn start(&self) -> f64 {
        match self {
            ZeroItem::Point(t) => *t,
            ZeroItem::Interval(a, _) => *a,
        }
    }

    pub fn end(&self) -> f64 {
        match self {
            ZeroItem::Point(t) => *t,
            ZeroItem::Interval(_, b) => *b,
        }
    }
}

/// Extract the zero set of one component. Sign changes are bisected on the
/// dense output to 1e-9; runs of samples below `tol_abs · local amplitude`
/// merge into interval items. A point zero sitting exactly at the initial
/// sample is not reported (initial conditions routinely start on an axis).
pub fn zero_sets(traj: &Trajectory, comp: usize, tol_abs: f64) -> Vec<ZeroItem> {
    let n = traj.len();
    if n < 2 {
        return vec![];
    }
    let vals: Vec<f64> = (0..n).map(|i| traj.value_at(i, comp)).collect();
    let (t_start, t_end) = traj.span();

    // local amplitude by windowed max of |v|
    let w = (n / 100).clamp(10, 500);
    let mut amp = vec![0.0f64; n];
    {
        use std::collections::VecDeque;
        let mut dq: VecDeque<usize> = VecDeque::new();
        for i in 0..n + w {
            if i < n {
                while let Some(&b) = dq.back() {
                    if vals[b].abs() <= vals[i].abs() {
                        dq.pop_back();
                    } else {
                        break;
                    }
                }
                dq.push_back(i);
            }
            if i >= w {
                let center = i - w;
                while let Some(&f) = dq.front() {
                    if f + w < center {
                        dq.pop_front();
                    } else {
                        break;
                    }
                }
                if let Some(&f) = dq.front() {
                    amp[center] = vals[f].abs();
                }
            }
        }
        let gmax = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for a in amp.iter_mut() {
            *a = a.max(gmax * 1e-9);
        }
    }

    let is_zero = |i: usize| vals[i].abs() <= tol_abs * amp[i].max(f64::MIN_POSITIVE);
    let mut items: Vec<ZeroItem> = Vec::new();

    let median_dt = {
        let mut dts: Vec<f64> = traj.times().windows(2).map(|p| p[1] - p[0]).collect();
        dts.sort_by(f64::total_cmp);
        dts[dts.len() / 2]
    };
    let interval_min_extent = 10.0 * median_dt;

    let mut i = 0usize;
    let mut last_nonzero_sign: Option<(usize, f64)> = None;
    while i < n {
        if is_zero(i) {
            let run_start = i;
            while i < n && is_zero(i) {
                i += 1;
            }
            let run_end = i - 1;
            let (ta, tb) = (traj.times()[run_start], traj.times()[run_end]);
            if tb - ta >= interval_min_extent {
                items.push(ZeroItem::Interval(ta, tb));
            } else {
                // treat as a point zero unless it sits at the initial sample
                let tm = 0.5 * (ta + tb);
                if run_start > 0 {
                    items.push(ZeroItem::Point(tm));
                }
            }
            // a run swallows any sign change across it
            last_nonzero_sign = None;
            continue;
        }
        let s = vals[i].signum();
        if let Some((j, sj)) = last_nonzero_sign {
            if sj != s && j + 1 == i {
                // transversal crossing between two adjacent non-zero samples
                let root = bisect_zero(traj, comp, traj.times()[j], traj.times()[i]);
                items.push(ZeroItem::Point(root));
            } else if sj != s {
                // crossing across a short zero-run already emitted as point
            }
        }
        last_nonzero_sign = Some((i, s));
        i += 1;
    }

    // drop point items at the very start of the span
    let eps_start = 1e-9 * (t_end - t_start).abs().max(1e-12);
    items.retain(|it| match it {
        ZeroItem::Point(t) => *t > t_start + eps_start,
        ZeroItem::Interval(..) => true,
    });
    items.sort_by(|a, b| a.start().total_cmp(&b.start()));
    items.dedup_by(|a, b| (a.start() - b.start()).abs() < 1e-9 * (t_end - t_start).max(1e-9));
    items
}

fn bisect_zero(traj: &Trajectory, comp: usize, mut lo: f64, mut hi: f64) -> f64 {
    let flo = traj.eval_component(lo, comp).unwrap_or(0.0);
    let mut slo = flo.signum();
    if slo == 0.0 {
        return lo;
    }
    for _ in 0..80 {
        if hi - lo < 1e-9 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = traj.eval_component(mid, comp).unwrap_or(0.0);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
        slo = traj.eval_component(lo, comp).unwrap_or(flo).signum();
    }
    0.5 * (lo + hi)
}

/// Largest scaled ODE residual of a trajectory at the dense-output midpoints.
pub fn max_ode_residual(traj: &Trajectory, rhs: &Rhs) -> f64 {
    let n = traj.len();
    let dim = traj.dim();
    let mut worst = 0.0f64;
    let mut f = vec![0.0; dim];
    for i in 0..n - 1 {
        let tm = 0.5 * (traj.times()[i] + traj.times()[i + 1]);
        let ym: Vec<f64> = (0..dim).map(|c| traj.eval_component(tm, c).unwrap()).collect();
        if rhs(tm, &ym, &mut f).is_err() {
            continue;
        }
        for (c, fc) in f.iter().enumerate() {
            let d = traj.deriv_component(tm, c).unwrap();
            let scale = 1.0 + fc.abs();
            worst = worst.max((d - fc).abs() / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn harmonic_rotation() {
        let sys = SystemSpec::parse("0", "1", "-1", "0", 0.0).unwrap();
        let tr = solve_system(&sys, (0.0, 1.0), (0.0, 10.0), &opts()).unwrap();
        for &t in &[0.0, 1.234, 5.5, 9.99] {
            let v = tr.eval(t).unwrap();
            assert!((v[0] - t.sin()).abs() < 1e-8, "phi({t}) = {}", v[0]);
            assert!((v[1] - t.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn residual_at_midpoints_is_small() {
        let sys = SystemSpec::parse("0", "1", "-1", "0", 0.0).unwrap();
        let tr = solve_system(&sys, (0.3, -0.7), (0.0, 20.0), &opts()).unwrap();
        let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<(), OdeError> {
            let [a11, a12, a21, a22] = sys.eval_matrix(t)?;
            dy[0] = a11 * y[0] + a12 * y[1];
            dy[1] = a21 * y[0] + a22 * y[1];
            Ok(())
        };
        let r = max_ode_residual(&tr, &rhs);
        assert!(r < 10.0 * 1e-9, "residual {r}");
    }

    #[test]
    fn oscillating_coefficient_system() {
        // φ' = cos(t) ψ, ψ' = -cos(t) φ from (0,1): φ = sin(sin t), ψ = cos(sin t)
        let sys = SystemSpec::parse("0", "cos(t)", "-cos(t)", "0", 0.0).unwrap();
        let tr = solve_system(&sys, (0.0, 1.0), (0.0, 30.0), &opts()).unwrap();
        for &t in &[0.5, 3.0, 11.0, 29.5] {
            let v = tr.eval(t).unwrap();
            assert!((v[0] - t.sin().sin()).abs() < 1e-8);
            assert!((v[1] - t.sin().cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn linearity_of_solutions() {
        let sys = SystemSpec::parse("0.1*sin(t)", "1 + 0.5*cos(t)", "-1", "0.1", 0.0).unwrap();
        let a = solve_system(&sys, (1.0, 0.0), (0.0, 15.0), &opts()).unwrap();
        let b = solve_system(&sys, (0.0, 1.0), (0.0, 15.0), &opts()).unwrap();
        let (al, be) = (0.7, -1.9);
        let combo = solve_system(&sys, (al, be), (0.0, 15.0), &opts()).unwrap();
        for &t in &[2.0, 7.7, 14.9] {
            let va = a.eval(t).unwrap();
            let vb = b.eval(t).unwrap();
            let vc = combo.eval(t).unwrap();
            for c in 0..2 {
                let want = al * va[c] + be * vb[c];
                let scale = want.abs().max(1.0);
                assert!((vc[c] - want).abs() / scale < 1e-7);
            }
        }
    }

    #[test]
    fn riccati_blow_up_at_unit_time() {
        // x' + x² = 0 from x(0) = -1: x = 1/(t-1), escapes to -∞ at t = 1
        let spec = RiccatiSpec::parse("1", "0", "0", 0.0).unwrap();
        let tr = solve_riccati(&spec, -1.0, (0.0, 5.0), &opts()).unwrap();
        let b = tr.blowup.expect("must blow up");
        assert!((b.t_escape - 1.0).abs() < 1e-4, "t_escape = {}", b.t_escape);
        assert_eq!(b.direction, BlowUpDirection::MinusInfinity);
        assert!(b.last_value.abs() > 1e6);
    }

    #[test]
    fn riccati_tanh_solution() {
        // x' + x² - 1 = 0 from x(0) = 0: x = tanh t
        let spec = RiccatiSpec::parse("1", "0", "-1", 0.0).unwrap();
        let tr = solve_riccati(&spec, 0.0, (0.0, 10.0), &opts()).unwrap();
        assert!(tr.blowup.is_none());
        for &t in &[0.5, 2.0, 8.0] {
            assert!((tr.eval_component(t, 0).unwrap() - t.tanh()).abs() < 1e-8);
        }
    }

    #[test]
    fn riccati_tan_pole() {
        // x' + x² + 1 = 0 from x(0) = 0: x = -tan t, pole at π/2
        let spec = RiccatiSpec::parse("1", "0", "1", 0.0).unwrap();
        let tr = solve_riccati(&spec, 0.0, (0.0, 5.0), &opts()).unwrap();
        let b = tr.blowup.expect("pole expected");
        assert!((b.t_escape - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
        assert_eq!(b.direction, BlowUpDirection::MinusInfinity);
    }

    #[test]
    fn complex_riccati_harmonic_is_stationary() {
        let sys = SystemSpec::parse("0", "1", "-1", "0", 0.0).unwrap();
        let tr = solve_riccati_complex(&sys, (0.0, 50.0), &opts()).unwrap();
        for &t in &[1.0, 17.3, 49.0] {
            let v = tr.eval(t).unwrap();
            assert!(v[0].abs() < 1e-8);
            assert!((v[1] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn complex_riccati_positive_imaginary_part() {
        let sys = SystemSpec::parse("0.2*cos(t)", "1 + 0.3*sin(2*t)", "-1 + 0.2*cos(3*t)", "-0.1", 0.0).unwrap();
        let tr = solve_riccati_complex(&sys, (0.0, 100.0), &opts()).unwrap();
        for i in 0..tr.len() {
            assert!(tr.value_at(i, 1) > 1e-250);
        }
    }

    #[test]
    fn lift_constant_riccati_solution() {
        // a12 = a21 = 1: x ≡ -1 lifts to (e^{-t}, -e^{-t})
        let sys = SystemSpec::parse("0", "1", "1", "0", 0.0).unwrap();
        let spec = sys.riccati();
        let z = solve_riccati(&spec, -1.0, (0.0, 10.0), &opts()).unwrap();
        let lifted = lift_riccati(&sys, &z, 1.0, 0.0).unwrap();
        for &t in &[0.5, 3.0, 9.5] {
            let v = lifted.eval(t).unwrap();
            assert!((v[0] - (-t).exp()).abs() < 1e-7);
            assert!((v[1] + (-t).exp()).abs() < 1e-7);
        }
        // ψ/φ reproduces the Riccati solution where φ is well away from zero
        for &t in &[1.0, 5.0] {
            let v = lifted.eval(t).unwrap();
            assert!((v[1] / v[0] - z.eval_component(t, 0).unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn lift_decoupled_system() {
        let sys = SystemSpec::parse("0.3", "0", "0", "0", 0.0).unwrap();
        let spec = sys.riccati();
        let z = solve_riccati(&spec, 0.0, (0.0, 5.0), &opts()).unwrap();
        let lifted = lift_riccati(&sys, &z, 1.0, 0.0).unwrap();
        for &t in &[1.0, 4.9] {
            assert!((lifted.eval_component(t, 0).unwrap() - (0.3 * t).exp()).abs() < 1e-7);
        }
    }

    #[test]
    fn liouville_determinant() {
        let sys = SystemSpec::parse("0.1 + 0.2*sin(t)", "1", "-1 + 0.1*cos(t)", "-0.2", 0.0).unwrap();
        let p = solve_system(&sys, (1.0, 0.0), (0.0, 10.0), &opts()).unwrap();
        let m = solve_system(&sys, (0.0, 1.0), (0.0, 10.0), &opts()).unwrap();
        let s_expr = sys.s_expr();
        for &t in &[2.0, 6.5, 10.0] {
            let vp = p.eval(t).unwrap();
            let vm = m.eval(t).unwrap();
            let det = vp[0] * vm[1] - vm[0] * vp[1];
            let j = crate::quad::transform_j(
                &crate::quad::Signal::Const(1.0),
                &crate::quad::Signal::Expr(s_expr.clone()),
                0.0,
                t,
                &crate::quad::QuadOptions::default(),
            )
            .unwrap();
            assert!((det - j).abs() / j.abs() < 1e-7, "det {det} vs J {j}");
        }
    }

    #[test]
    fn zero_sets_of_sine() {
        let sys = SystemSpec::parse("0", "1", "-1", "0", 0.0).unwrap();
        let tr = solve_system(&sys, (0.0, 1.0), (0.0, 10.0), &opts()).unwrap();
        let zs = zero_sets(&tr, 0, 1e-9);
        let expect = [std::f64::consts::PI, 2.0 * std::f64::consts::PI, 3.0 * std::f64::consts::PI];
        assert_eq!(zs.len(), expect.len(), "{zs:?}");
        for (z, e) in zs.iter().zip(expect) {
            match z {
                ZeroItem::Point(t) => assert!((t - e).abs() < 1e-9, "zero at {t}, want {e}"),
                other => panic!("expected point zero, got {other:?}"),
            }
        }
    }

    #[test]
    fn zero_sets_constant_has_none() {
        let sys = SystemSpec::parse("0", "0", "0", "0", 0.0).unwrap();
        let tr = solve_system(&sys, (1.0, 1.0), (0.0, 10.0), &opts()).unwrap();
        assert!(zero_sets(&tr, 0, 1e-9).is_empty());
    }

    #[test]
    fn zero_sets_interval_zero() {
        // x' + c(t) = 0 with c = -max(0, t-3) and x(0) = 0 stays exactly zero
        // on [0,3], then grows
        let spec = RiccatiSpec::parse("1", "0", "-max(0, t - 3)", 0.0).unwrap();
        let tr = solve_riccati(&spec, 0.0, (0.0, 8.0), &opts()).unwrap();
        let zs = zero_sets(&tr, 0, 1e-9);
        assert_eq!(zs.len(), 1, "{zs:?}");
        match zs[0] {
            ZeroItem::Interval(a, b) => {
                assert!(a <= 1e-9);
                assert!((b - 3.0).abs() < 0.2, "interval end {b}");
            }
            other => panic!("expected interval, got {other:?}"),
        }
        assert!(tr.eval_component(8.0, 0).unwrap() > 1.0);
    }

    #[test]
    fn tolerance_refinement_converges() {
        let sys = SystemSpec::parse("0", "1 + 0.2*sin(t)", "-1", "0", 0.0).unwrap();
        let reference = solve_system(&sys, (0.0, 1.0), (0.0, 10.0), &SolveOptions::with_tol(1e-12)).unwrap();
        let mut prev_dev: Option<f64> = None;
        for rtol in [1e-5, 1e-7, 1e-9] {
            let tr = solve_system(&sys, (0.0, 1.0), (0.0, 10.0), &SolveOptions::with_tol(rtol)).unwrap();
            let mut dev = 0.0f64;
            for k in 0..=100 {
                let t = 10.0 * k as f64 / 100.0;
                let a = tr.eval_component(t, 0).unwrap();
                let b = reference.eval_component(t, 0).unwrap();
                dev = dev.max((a - b).abs());
            }
            if let Some(p) = prev_dev {
                assert!(dev <= 0.5 * p, "dev {dev} vs prior {p} at rtol {rtol}");
            }
            prev_dev = Some(dev);
        }
    }
}
