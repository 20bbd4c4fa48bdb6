//! Property-based invariants: parser round-trips, bit-exact agreement of
//! expression evaluation with an independent fused parse-and-evaluate
//! reference, transform linearity/additivity on random inputs, and survival
//! monotonicity of gated Riccati equations.

use planode::expr::CoeffExpr;
use planode::ode::{solve_riccati, RiccatiSpec, SolveOptions};
use planode::quad::{transform_iplus, transform_j, QuadOptions, Signal};
use proptest::prelude::*;
use std::sync::Arc;

// ---------------------------------------------------------------------------
// Reference evaluator: a fused recursive-descent parse-and-evaluate pass
// that never builds a tree. Entirely independent of the library path.
// ---------------------------------------------------------------------------

struct Ref<'a> {
    s: &'a [u8],
    pos: usize,
    t: f64,
}

impl<'a> Ref<'a> {
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn additive(&mut self) -> Option<f64> {
        let mut acc = self.multiplicative()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.multiplicative()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.multiplicative()?;
                }
                _ => return Some(acc),
            }
        }
    }

    fn multiplicative(&mut self) -> Option<f64> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc *= self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d == 0.0 {
                        return None;
                    }
                    acc /= d;
                }
                _ => return Some(acc),
            }
        }
    }

    fn unary(&mut self) -> Option<f64> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Some(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Option<f64> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            let v = base.powf(exp);
            if !v.is_finite() {
                return None;
            }
            return Some(v);
        }
        Some(base)
    }

    fn primary(&mut self) -> Option<f64> {
        match self.peek()? {
            b'(' => {
                self.pos += 1;
                let v = self.additive()?;
                if self.peek()? != b')' {
                    return None;
                }
                self.pos += 1;
                Some(v)
            }
            b'0'..=b'9' | b'.' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                if self.pos < self.s.len() && (self.s[self.pos] | 32) == b'e' {
                    let mut e = self.pos + 1;
                    if e < self.s.len() && (self.s[e] == b'+' || self.s[e] == b'-') {
                        e += 1;
                    }
                    if e < self.s.len() && self.s[e].is_ascii_digit() {
                        self.pos = e;
                        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                            self.pos += 1;
                        }
                    }
                }
                std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
            }
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).ok()?;
                match name {
                    "t" => Some(self.t),
                    "pi" => Some(std::f64::consts::PI),
                    "e" => Some(std::f64::consts::E),
                    "sin" | "cos" | "exp" | "ln" | "abs" => {
                        if self.peek()? != b'(' {
                            return None;
                        }
                        self.pos += 1;
                        let x = self.additive()?;
                        if self.peek()? != b')' {
                            return None;
                        }
                        self.pos += 1;
                        match name {
                            "sin" => Some(x.sin()),
                            "cos" => Some(x.cos()),
                            "exp" => {
                                let v = x.exp();
                                v.is_finite().then_some(v)
                            }
                            "ln" => (x > 0.0).then(|| x.ln()),
                            _ => Some(x.abs()),
                        }
                    }
                    "min" | "max" => {
                        if self.peek()? != b'(' {
                            return None;
                        }
                        self.pos += 1;
                        let a = self.additive()?;
                        if self.peek()? != b',' {
                            return None;
                        }
                        self.pos += 1;
                        let b = self.additive()?;
                        if self.peek()? != b')' {
                            return None;
                        }
                        self.pos += 1;
                        Some(if name == "min" { a.min(b) } else { a.max(b) })
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

fn reference_eval(src: &str, t: f64) -> Option<f64> {
    let mut r = Ref { s: src.as_bytes(), pos: 0, t };
    let v = r.additive()?;
    r.ws();
    (r.pos == r.s.len()).then_some(v)
}

// random expression source text
fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("t".to_string()),
        (-4.0f64..4.0).prop_map(|c| format!("{c}")),
        (1u32..40).prop_map(|n| format!("{}", n as f64 * 0.25)),
    ]
}

fn expr_text() -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 64, 8, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/({b})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp({a})")),
            inner.clone().prop_map(|a| format!("abs({a})")),
            inner.clone().prop_map(|a| format!("ln({a})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("min({a}, {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("max({a}, {b})")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner, 0u32..5).prop_map(|(a, n)| format!("({a})^{n}")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_render_round_trip(src in expr_text()) {
        let a = CoeffExpr::parse(&src).unwrap();
        let b = CoeffExpr::parse(&a.render()).unwrap();
        prop_assert_eq!(a.root(), b.root());
    }

    #[test]
    fn eval_matches_reference_bit_for_bit(src in expr_text(), t in 0.05f64..10.0) {
        let parsed = CoeffExpr::parse(&src).unwrap();
        let lib = parsed.eval(t).ok();
        let reference = reference_eval(&src, t);
        match (lib, reference) {
            (Some(a), Some(b)) => prop_assert_eq!(a.to_bits(), b.to_bits(), "{} at {}: {} vs {}", src, t, a, b),
            (None, None) => {}
            (a, b) => prop_assert!(false, "disagree on definedness for `{}` at {}: {:?} vs {:?}", src, t, a, b),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn iplus_linear_in_u(
        alpha in -3.0f64..3.0,
        au in 0.1f64..1.5,
        wu in 0.3f64..2.0,
        av in -0.5f64..0.5,
        wv in 0.3f64..2.0,
    ) {
        let opts = QuadOptions::default();
        let u = Signal::expr(&format!("{au}*cos({wu}*t) + 0.7"));
        let v = Signal::expr(&format!("{av}*sin({wv}*t) + 0.2"));
        let base = transform_iplus(&u, &v, 0.0, 6.0, &opts).unwrap();
        let scaled_u = {
            let u = u.clone();
            Signal::Fn(Arc::new(move |t| alpha * u.value(t).unwrap_or(f64::NAN)))
        };
        let scaled = transform_iplus(&scaled_u, &v, 0.0, 6.0, &opts).unwrap();
        prop_assert!((scaled - alpha * base).abs() <= 1e-10 * (1.0 + scaled.abs()));
    }

    #[test]
    fn iplus_splits_multiplicatively(
        s in 1.0f64..4.0,
        au in 0.2f64..1.0,
        av in -0.4f64..0.4,
    ) {
        let opts = QuadOptions::default();
        let u = Signal::expr(&format!("{au} + 0.3*sin(t)"));
        let v = Signal::expr(&format!("{av} + 0.2*cos(2*t)"));
        let (t0, t) = (0.0, 7.0);
        let whole = transform_iplus(&u, &v, t0, t, &opts).unwrap();
        let first = transform_iplus(&u, &v, t0, s, &opts).unwrap();
        let weight = transform_j(&Signal::Const(1.0), &v, t0, s, &opts).unwrap().recip();
        let rest = transform_iplus(&u, &v, s, t, &opts).unwrap();
        prop_assert!((whole - (first + weight * rest)).abs() < 1e-8 * (1.0 + whole.abs()));
    }
}

/// Survival of a gated Riccati equation is monotone in the initial value:
/// direct restatement of the regular-set half-line structure.
#[test]
fn survival_monotone_on_fifty_random_specs() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(501);
    let specs: Vec<RiccatiSpec> =
        (0..50).map(|_| planode::corpus::random_gated_riccati(&mut rng, 0.0)).collect();
    let opts = SolveOptions::with_tol(1e-7);
    let failures: Vec<String> = planode::batch::map(specs, |spec| {
        let inits = [-4.0, -2.0, -1.0, -0.5, -0.2, 0.0, 0.4, 1.0, 3.0];
        let mut seen = false;
        for xi in inits {
            let survives = solve_riccati(&spec, xi, (0.0, 15.0), &opts)
                .map(|tr| tr.blowup.is_none())
                .unwrap_or(false);
            if seen && !survives {
                return Some(format!(
                    "non-monotone survival at init {xi} for a = {}, b = {}, c = {}",
                    spec.a.source(),
                    spec.b.source(),
                    spec.c.source()
                ));
            }
            seen |= survives;
        }
        None
    })
    .into_iter()
    .flatten()
    .collect();
    assert!(failures.is_empty(), "{failures:?}");
}

/// Zero extraction is deterministic: identical inputs give identical items.
#[test]
fn zero_sets_deterministic() {
    let sys = planode::ode::SystemSpec::parse("0", "1 + 0.3*sin(t)", "-1", "0", 0.0).unwrap();
    let run = || {
        let tr = planode::ode::solve_system(&sys, (0.2, 1.0), (0.0, 40.0), &SolveOptions::default()).unwrap();
        planode::ode::zero_sets(&tr, 0, 1e-9)
    };
    let a = run();
    let b = run();
    assert_eq!(a, b);
}
