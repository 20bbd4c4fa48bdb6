//! Seeded random system generators for property runs: smooth bounded
//! trigonometric-polynomial coefficients, built as expression source text so
//! they exercise the same parsing path as user input.

use crate::expr::CoeffExpr;
use crate::ode::SystemSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn trig_poly(rng: &mut ChaCha8Rng, amp: f64, bias: f64) -> String {
    let c0 = bias + rng.gen_range(-amp..amp) * 0.3;
    let c1 = rng.gen_range(-amp..amp);
    let c2 = rng.gen_range(-amp..amp);
    let w1 = rng.gen_range(0.3..2.0);
    let w2 = rng.gen_range(0.3..2.0);
    format!("{c0:.4} + {c1:.4}*sin({w1:.4}*t) + {c2:.4}*cos({w2:.4}*t)")
}

/// A smooth system with bounded coefficients and zero trace bias, safe to
/// integrate over a few hundred time units.
pub fn random_smooth_system(rng: &mut ChaCha8Rng, t0: f64) -> SystemSpec {
    let a11 = trig_poly(rng, 0.3, 0.0);
    let a22 = trig_poly(rng, 0.3, 0.0);
    // keep the rotation rate order one
    let a12 = trig_poly(rng, 0.5, 1.0);
    let a21 = trig_poly(rng, 0.5, -1.0);
    SystemSpec::parse(&a11, &a12, &a21, &a22, t0).expect("generated coefficients parse")
}

/// A non-negative coefficient built as `base² · decay + offset`.
fn nonneg_coeff(rng: &mut ChaCha8Rng) -> String {
    let amp = rng.gen_range(0.2..1.0);
    let w = rng.gen_range(0.3..1.5);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let beta = rng.gen_range(0.0..0.05);
    let offset = rng.gen_range(0.0..0.3);
    format!("{amp:.4}*sin({w:.4}*t + {phase:.4})^2*exp(-{beta:.4}*t) + {offset:.4}")
}

/// A system with certified non-negative off-diagonal coefficients and
/// bounded diagonal, as used by the non-conjugation property runs.
pub fn random_nonnegative_pair_system(rng: &mut ChaCha8Rng, t0: f64) -> SystemSpec {
    let a12 = nonneg_coeff(rng);
    let a21 = nonneg_coeff(rng);
    let a11 = trig_poly(rng, 0.2, 0.0);
    let a22 = trig_poly(rng, 0.2, 0.0);
    SystemSpec::parse(&a11, &a12, &a21, &a22, t0).expect("generated coefficients parse")
}

/// A gated random Riccati spec with `a ≥ 0`, `c ≤ 0`.
pub fn random_gated_riccati(rng: &mut ChaCha8Rng, t0: f64) -> crate::ode::RiccatiSpec {
    let a = nonneg_coeff(rng);
    let b = trig_poly(rng, 0.3, 0.0);
    let camp = rng.gen_range(0.1..0.8);
    let cw = rng.gen_range(0.3..1.5);
    let c = format!("-{camp:.4}*cos({cw:.4}*t)^2 - {:.4}", rng.gen_range(0.0..0.3));
    crate::ode::RiccatiSpec {
        a: CoeffExpr::parse(&a).unwrap(),
        b: CoeffExpr::parse(&b).unwrap(),
        c: CoeffExpr::parse(&c).unwrap(),
        t0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generated_systems_parse_and_evaluate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let sys = random_smooth_system(&mut rng, 0.0);
            assert!(sys.eval_matrix(3.7).is_ok());
            let nn = random_nonnegative_pair_system(&mut rng, 0.0);
            let cert = nn.a12.sign_certify(0.0, 100.0, 256);
            assert!(cert.admits_non_negative(), "{:?}", cert.verdict);
        }
    }
}
