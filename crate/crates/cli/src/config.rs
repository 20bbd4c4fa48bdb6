//! Analysis configuration: a TOML file with exactly one input block
//! (`[system]`, `[riccati]`, or `[equation]`), optional run/init/portrait
//! tables, and quoted coefficient expressions.

use anyhow::{bail, Context, Result};
use planode::bounds::PowerLawParams;
use planode::expr::CoeffExpr;
use planode::ode::{RiccatiSpec, SystemSpec};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub system: Option<SystemBlock>,
    pub riccati: Option<RiccatiBlock>,
    pub equation: Option<EquationBlock>,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub init: InitBlock,
    #[serde(default)]
    pub portrait: PortraitBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub a11: Option<String>,
    pub a12: Option<String>,
    pub a21: Option<String>,
    pub a22: Option<String>,
    pub t0: Option<f64>,
    /// power-law parameters; when present and the coefficient strings are
    /// omitted, the coefficients are derived from them
    pub power: Option<PowerBlock>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerBlock {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiBlock {
    pub a: String,
    pub b: String,
    pub c: String,
    pub t0: Option<f64>,
}

/// `(p φ')' + q φ' + r φ = 0`, reduced through `p φ' = ψ` to the system
/// with `a12 = 1/p`, `a21 = -r`, `a22 = -q/p`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationBlock {
    pub p: Option<String>,
    pub q: Option<String>,
    pub r: String,
    pub t0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    pub horizon: f64,
    pub tol: f64,
    pub seed: u64,
    pub threads: usize,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock { horizon: 100.0, tol: 1e-9, seed: 0, threads: 0 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitBlock {
    /// number of initial directions on the unit half-circle
    pub grid: usize,
    /// initial ratios ψ(t0)/φ(t0) for band and envelope checks
    pub ratios: Vec<f64>,
    /// scalar initial values for Riccati analyses
    pub values: Vec<f64>,
}

impl Default for InitBlock {
    fn default() -> Self {
        InitBlock { grid: 16, ratios: vec![0.0, 0.5, -0.5], values: vec![0.0, 1.0, -0.5] }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortraitBlock {
    /// one of `riccati-fan`, `system-plane`, `phi-T`
    pub family: String,
    pub inits: Vec<f64>,
    pub arclength: bool,
    pub samples: usize,
}

impl Default for PortraitBlock {
    fn default() -> Self {
        PortraitBlock {
            family: "riccati-fan".into(),
            inits: vec![-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5],
            arclength: false,
            samples: 800,
        }
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: Option<String>,
}

/// Validated configuration with parsed coefficient expressions.
pub struct Config {
    pub input: Input,
    pub run: RunBlock,
    pub init: InitBlock,
    pub portrait: PortraitBlock,
    pub out_dir: Option<String>,
}

pub enum Input {
    System { sys: SystemSpec, power: Option<PowerLawParams> },
    Riccati(RiccatiSpec),
}

impl Config {
    /// The system under analysis; a bare `[riccati]` block has none.
    pub fn system(&self) -> Option<&SystemSpec> {
        match &self.input {
            Input::System { sys, .. } => Some(sys),
            Input::Riccati(_) => None,
        }
    }

    /// The scalar Riccati equation under analysis (the induced one for a
    /// system input).
    pub fn riccati(&self) -> RiccatiSpec {
        match &self.input {
            Input::System { sys, .. } => sys.riccati(),
            Input::Riccati(spec) => spec.clone(),
        }
    }
}

fn parse_coeff(src: &str, what: &str) -> Result<CoeffExpr> {
    CoeffExpr::parse(src).with_context(|| format!("in coefficient `{what}` = \"{src}\""))
}

pub fn load(text: &str) -> Result<Config> {
    let raw: RawConfig = toml::from_str(text).context("config does not parse")?;
    let blocks =
        usize::from(raw.system.is_some()) + usize::from(raw.riccati.is_some()) + usize::from(raw.equation.is_some());
    if blocks != 1 {
        bail!("exactly one of [system], [riccati], [equation] must be present (found {blocks})");
    }
    let input = if let Some(sb) = raw.system {
        let t0 = sb.t0.unwrap_or(0.0);
        let power = sb.power.map(|p| PowerLawParams {
            lambda: p.lambda,
            mu: p.mu,
            nu: p.nu,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            t0: sb.t0.unwrap_or(1.0),
        });
        let sys = match (&sb.a11, &sb.a12, &sb.a21, &sb.a22) {
            (Some(a11), Some(a12), Some(a21), Some(a22)) => SystemSpec {
                a11: parse_coeff(a11, "a11")?,
                a12: parse_coeff(a12, "a12")?,
                a21: parse_coeff(a21, "a21")?,
                a22: parse_coeff(a22, "a22")?,
                t0,
            },
            _ => match power {
                Some(p) => {
                    p.validate().map_err(|e| anyhow::anyhow!("power parameters: {e}"))?;
                    p.system()
                }
                None => bail!("[system] needs either all four coefficients or a [system.power] table"),
            },
        };
        Input::System { sys, power }
    } else if let Some(rb) = raw.riccati {
        Input::Riccati(RiccatiSpec {
            a: parse_coeff(&rb.a, "a")?,
            b: parse_coeff(&rb.b, "b")?,
            c: parse_coeff(&rb.c, "c")?,
            t0: rb.t0.unwrap_or(0.0),
        })
    } else {
        let eb = raw.equation.unwrap();
        let t0 = eb.t0.unwrap_or(0.0);
        let p = eb.p.as_deref().unwrap_or("1");
        let q = eb.q.as_deref().unwrap_or("0");
        let p_expr = parse_coeff(p, "p")?;
        let q_expr = parse_coeff(q, "q")?;
        let r_expr = parse_coeff(&eb.r, "r")?;
        let one = CoeffExpr::constant(1.0);
        let a12 = CoeffExpr::parse(&format!("1/({p})")).unwrap_or(one);
        let a22_src = format!("-({q})/({p})");
        let a22 = CoeffExpr::parse(&a22_src).with_context(|| "in derived a22")?;
        let _ = (p_expr, q_expr);
        Input::System {
            sys: SystemSpec {
                a11: CoeffExpr::constant(0.0),
                a12,
                a21: r_expr.negated(),
                a22,
                t0,
            },
            power: None,
        }
    };
    if raw.run.horizon <= match &input {
        Input::System { sys, .. } => sys.t0,
        Input::Riccati(spec) => spec.t0,
    } {
        bail!("horizon must exceed t0");
    }
    Ok(Config {
        input,
        run: raw.run,
        init: raw.init,
        portrait: raw.portrait,
        out_dir: raw.output.dir,
    })
}
