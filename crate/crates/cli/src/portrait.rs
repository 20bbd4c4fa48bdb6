//! Phase-portrait data export: families of trajectories written as CSV, one
//! file per member, with a sidecar file documenting the columns.

use crate::config::Config;
use anyhow::{bail, Context, Result};
use planode::ode::{solve_riccati, solve_system, SolveOptions, Trajectory};
use planode::quad::{Cumulative, QuadOptions};
use std::io::Write;
use std::path::Path;

pub struct PortraitOutput {
    pub files: Vec<String>,
    pub columns: String,
}

pub fn emit(cfg: &Config, out_dir: &Path) -> Result<PortraitOutput> {
    std::fs::create_dir_all(out_dir)?;
    let o = SolveOptions::with_tol(cfg.run.tol.max(1e-8));
    let horizon = cfg.run.horizon;
    let mut files = Vec::new();
    let columns;
    match cfg.portrait.family.as_str() {
        "riccati-fan" => {
            let spec = cfg.riccati();
            columns = "t,x — scalar solution from each initial value; members that escape are truncated at the blow-up bracket".to_string();
            for (i, &x0) in cfg.portrait.inits.iter().enumerate() {
                let tr = solve_riccati(&spec, x0, (spec.t0, horizon), &o)?;
                let name = format!("fan_{i:03}.csv");
                write_traj(&tr, &out_dir.join(&name), cfg)?;
                files.push(name);
            }
        }
        "system-plane" => {
            let sys = cfg
                .system()
                .ok_or_else(|| anyhow::anyhow!("system-plane portraits need a system input"))?;
            columns = "t,Phi,Psi — weight-normalized plane coordinates e^{-∫a11}φ, e^{-∫a22}ψ".to_string();
            let (a11, a22) = (sys.a11.clone(), sys.a22.clone());
            let c11 = Cumulative::new(
                move |tau| a11.eval(tau).map_err(|e| planode::quad::QuadError::Singular { t: tau, what: e.to_string() }),
                sys.t0,
                horizon,
                QuadOptions::default(),
            )?;
            let c22 = Cumulative::new(
                move |tau| a22.eval(tau).map_err(|e| planode::quad::QuadError::Singular { t: tau, what: e.to_string() }),
                sys.t0,
                horizon,
                QuadOptions::default(),
            )?;
            for (i, &angle) in cfg.portrait.inits.iter().enumerate() {
                let tr = solve_system(sys, (angle.cos(), angle.sin()), (sys.t0, horizon), &o)?;
                let name = format!("plane_{i:03}.csv");
                let path = out_dir.join(&name);
                let mut rows: Vec<(f64, f64, f64)> = Vec::new();
                for k in 0..=cfg.portrait.samples {
                    let t = sys.t0 + (horizon - sys.t0) * k as f64 / cfg.portrait.samples as f64;
                    let v = tr.eval(t)?;
                    let w1 = (-c11.eval(t)?).exp();
                    let w2 = (-c22.eval(t)?).exp();
                    rows.push((t, w1 * v[0], w2 * v[1]));
                }
                if cfg.portrait.arclength {
                    rows = resample_arclength(&rows, cfg.portrait.samples);
                }
                let mut f = std::fs::File::create(&path).with_context(|| format!("creating {path:?}"))?;
                writeln!(f, "t,Phi,Psi")?;
                for (t, a, b) in rows {
                    writeln!(f, "{t},{a},{b}")?;
                }
                files.push(name);
            }
        }
        "phi-T" => {
            let sys = cfg
                .system()
                .ok_or_else(|| anyhow::anyhow!("phi-T portraits need a system input"))?;
            columns = "t,PhiT — the weight-normalized first component e^{-∫_T a11}φ for the family φ(T) = 1, ψ(T) swept".to_string();
            let a11 = sys.a11.clone();
            let c11 = Cumulative::new(
                move |tau| a11.eval(tau).map_err(|e| planode::quad::QuadError::Singular { t: tau, what: e.to_string() }),
                sys.t0,
                horizon,
                QuadOptions::default(),
            )?;
            for (i, &psi0) in cfg.portrait.inits.iter().enumerate() {
                let tr = solve_system(sys, (1.0, psi0), (sys.t0, horizon), &o)?;
                let name = format!("phiT_{i:03}.csv");
                let mut f = std::fs::File::create(out_dir.join(&name))?;
                writeln!(f, "t,PhiT")?;
                for k in 0..=cfg.portrait.samples {
                    let t = sys.t0 + (horizon - sys.t0) * k as f64 / cfg.portrait.samples as f64;
                    let v = tr.eval_component(t, 0)?;
                    writeln!(f, "{t},{}", (-c11.eval(t)?).exp() * v)?;
                }
                files.push(name);
            }
        }
        other => bail!("unknown portrait family `{other}` (riccati-fan | system-plane | phi-T)"),
    }
    let sidecar = out_dir.join("columns.txt");
    std::fs::write(&sidecar, format!("{columns}\n"))?;
    files.push("columns.txt".into());
    Ok(PortraitOutput { files, columns })
}

fn write_traj(tr: &Trajectory, path: &Path, _cfg: &Config) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    tr.write_csv(&mut f)?;
    Ok(())
}

fn resample_arclength(rows: &[(f64, f64, f64)], n: usize) -> Vec<(f64, f64, f64)> {
    let mut arc = vec![0.0f64];
    for w in rows.windows(2) {
        let d = ((w[1].1 - w[0].1).powi(2) + (w[1].2 - w[0].2).powi(2)).sqrt();
        arc.push(arc.last().unwrap() + d);
    }
    let total = *arc.last().unwrap();
    if total <= 0.0 {
        return rows.to_vec();
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut j = 0usize;
    for k in 0..=n {
        let target = total * k as f64 / n as f64;
        while j + 1 < arc.len() && arc[j + 1] < target {
            j += 1;
        }
        let (a, b) = (arc[j], arc[(j + 1).min(arc.len() - 1)]);
        let frac = if b > a { (target - a) / (b - a) } else { 0.0 };
        let p = rows[j];
        let q = rows[(j + 1).min(rows.len() - 1)];
        out.push((
            p.0 + (q.0 - p.0) * frac,
            p.1 + (q.1 - p.1) * frac,
            p.2 + (q.2 - p.2) * frac,
        ));
    }
    out
}
