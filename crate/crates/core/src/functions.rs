//! Registry of named test functions with closed-form fractional derivatives
//! and integrals.
//!
//! The exact maps come from the differentiation rule for power-weighted
//! Mittag-Leffler functions,
//! D^α (t^{β-1} E_{δ,β}(λ t^δ)) = t^{β-α-1} E_{δ,β-α}(λ t^δ),
//! together with the power rule t^ν/Γ(ν+1) ↦ t^{ν∓α}/Γ(ν∓α+1). Functions
//! are families indexed by the operator order where the definition itself
//! depends on it (example1, example4, example5); callers bind the order via
//! [`TestFunction::evaluand`].
//!
//! Registered names: `example1` .. `example6`, `power(nu)`, `constant(c)`,
//! `identity`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::estimators::Evaluand;
use crate::real::Real;
use crate::special::{mittag_leffler, reciprocal_gamma, MlParams};

const REGISTERED: [&str; 9] = [
    "example1",
    "example2",
    "example3",
    "example4",
    "example5",
    "example6",
    "power(nu)",
    "constant(c)",
    "identity",
];

/// Names accepted by [`lookup`].
pub fn registered_names() -> &'static [&'static str] {
    &REGISTERED
}

fn ml<T: Real>(delta: T, beta: T, z: T) -> Result<T> {
    mittag_leffler(&MlParams::new(delta, beta)?, z)
}

/// Series value, or NaN when the series does not apply at the point; the
/// estimators surface NaN as a non-finite-integrand error.
fn ml_or_nan<T: Real>(delta: T, beta: T, z: T) -> T {
    ml(delta, beta, z).unwrap_or_else(|_| T::nan())
}

type Family<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;
type ExactMap<T> = Arc<dyn Fn(T, T) -> Result<T> + Send + Sync>;

/// A named function together with optional closed-form derivative and
/// integral maps (order, t) → value.
#[derive(Clone)]
pub struct TestFunction<T> {
    name: String,
    evaluate: Family<T>,
    exact_derivative: Option<ExactMap<T>>,
    exact_integral: Option<ExactMap<T>>,
    singular_at_zero: bool,
    two_sided: bool,
    valid_alpha: (f64, f64),
}

impl<T: Real> TestFunction<T> {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The evaluand grows without bound towards t = 0; estimators treat its
    /// trial statistics with extra care.
    pub fn singular_at_zero(&self) -> bool {
        self.singular_at_zero
    }

    /// Order interval the registered exact pair is intended for.
    pub fn valid_alpha_range(&self) -> (f64, f64) {
        self.valid_alpha
    }

    /// Evaluate at (order, t). Zero-extended for t < 0 unless the function
    /// is registered as two-sided (the constant).
    pub fn evaluate(&self, alpha: T, t: T) -> T {
        if !self.two_sided && t < T::zero() {
            T::zero()
        } else {
            (self.evaluate)(alpha, t)
        }
    }

    pub fn exact_derivative(&self, alpha: T, t: T) -> Option<Result<T>> {
        self.exact_derivative.as_ref().map(|f| f(alpha, t))
    }

    pub fn exact_integral(&self, alpha: T, t: T) -> Option<Result<T>> {
        self.exact_integral.as_ref().map(|f| f(alpha, t))
    }

    /// Bind the operator order, producing the estimators' evaluand.
    pub fn evaluand(&self, alpha: T) -> Evaluand<T> {
        let f = self.evaluate.clone();
        if self.two_sided {
            Evaluand::two_sided(self.name.clone(), move |t| f(alpha, t))
        } else {
            Evaluand::new(self.name.clone(), move |t| f(alpha, t))
        }
    }
}

impl<T> std::fmt::Debug for TestFunction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("singular_at_zero", &self.singular_at_zero)
            .finish()
    }
}

struct Builder<T> {
    tf: TestFunction<T>,
}

impl<T: Real> Builder<T> {
    fn new(name: &str, evaluate: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        Self {
            tf: TestFunction {
                name: name.to_string(),
                evaluate: Arc::new(evaluate),
                exact_derivative: None,
                exact_integral: None,
                singular_at_zero: false,
                two_sided: false,
                valid_alpha: (0.0, 5.0),
            },
        }
    }

    fn derivative(mut self, f: impl Fn(T, T) -> Result<T> + Send + Sync + 'static) -> Self {
        self.tf.exact_derivative = Some(Arc::new(f));
        self
    }

    fn integral(mut self, f: impl Fn(T, T) -> Result<T> + Send + Sync + 'static) -> Self {
        self.tf.exact_integral = Some(Arc::new(f));
        self
    }

    fn singular(mut self) -> Self {
        self.tf.singular_at_zero = true;
        self
    }

    fn singular_if(self, yes: bool) -> Self {
        if yes {
            self.singular()
        } else {
            self
        }
    }

    fn two_sided(mut self) -> Self {
        self.tf.two_sided = true;
        self
    }

    fn alpha_range(mut self, lo: f64, hi: f64) -> Self {
        self.tf.valid_alpha = (lo, hi);
        self
    }

    fn build(self) -> TestFunction<T> {
        self.tf
    }
}

fn power_pair<T: Real>(name: &str, nu: f64) -> TestFunction<T> {
    let n = T::of(nu);
    Builder::new(name, move |_, t: T| t.powf(n) * reciprocal_gamma(n + T::one()))
        .derivative(move |a, t: T| Ok(t.powf(n - a) * reciprocal_gamma(n - a + T::one())))
        .integral(move |a, t: T| Ok(t.powf(n + a) * reciprocal_gamma(n + a + T::one())))
        .singular_if(nu < 0.0)
        .build()
}

/// Find a registered function by name.
///
/// `power(nu)` and `constant(c)` parse their parameter from the name;
/// `power` requires nu > -1 so the functions stay integrable at 0.
pub fn lookup<T: Real>(name: &str) -> Result<TestFunction<T>> {
    let unknown = || Error::UnknownFunction {
        name: name.to_string(),
        registered: REGISTERED.join(", "),
    };
    match name {
        // y = E_{α,1}(-λt^α) - 1 with λ = 0.4.
        // The derivative's subtrahend is t^-α/Γ(1-α) — the derivative of the
        // constant 1 — cross-checked against the finite-difference oracle in
        // the tests below.
        "example1" => {
            let lam = T::of(0.4);
            Ok(Builder::new(name, move |a, t: T| {
                ml_or_nan(a, T::one(), -lam * t.powf(a)) - T::one()
            })
            .derivative(move |a, t: T| {
                let e = ml(a, T::one() - a, -lam * t.powf(a))?;
                Ok(t.powf(-a) * (e - reciprocal_gamma(T::one() - a)))
            })
            .alpha_range(0.0, 1.0)
            .build())
        }
        "example2" => Ok(Builder::new(name, |_, t: T| t.sin())
            .derivative(|a, t: T| {
                Ok(t.powf(T::one() - a) * ml(T::of(2.0), T::of(2.0) - a, -t * t)?)
            })
            .integral(|a, t: T| {
                Ok(t.powf(T::one() + a) * ml(T::of(2.0), T::of(2.0) + a, -t * t)?)
            })
            .build()),
        // y = e^{-λt} - 1 + λt with λ = 1
        "example3" => {
            let lam = T::one();
            Ok(Builder::new(name, move |_, t: T| (-lam * t).exp() - T::one() + lam * t)
                .derivative(move |a, t: T| {
                    Ok(lam * lam * t.powf(T::of(2.0) - a) * ml(T::one(), T::of(3.0) - a, -lam * t)?)
                })
                .integral(move |a, t: T| {
                    Ok(lam * lam * t.powf(T::of(2.0) + a) * ml(T::one(), T::of(3.0) + a, -lam * t)?)
                })
                .build())
        }
        // y = t^-α E_{2,1-α}(-t²), whose order-α integral is cos t
        "example4" => Ok(Builder::new(name, |a, t: T| {
            t.powf(-a) * ml_or_nan(T::of(2.0), T::one() - a, -t * t)
        })
        .integral(|_, t: T| Ok(t.cos()))
        .singular()
        .build()),
        // y = t^{1-α} E_{2,2-α}(-t²), whose order-α integral is sin t
        "example5" => Ok(Builder::new(name, |a, t: T| {
            t.powf(T::one() - a) * ml_or_nan(T::of(2.0), T::of(2.0) - a, -t * t)
        })
        .integral(|_, t: T| Ok(t.sin()))
        .singular()
        .build()),
        "example6" => Ok(power_pair(name, -0.3)),
        "identity" => Ok(power_pair(name, 1.0)),
        _ => {
            if let Some(arg) = name.strip_prefix("power(").and_then(|s| s.strip_suffix(')')) {
                let nu: f64 = arg.trim().parse().map_err(|_| unknown())?;
                if !nu.is_finite() || nu <= -1.0 {
                    return Err(Error::Domain(format!(
                        "power exponent must be finite and > -1, got {nu}"
                    )));
                }
                return Ok(power_pair(name, nu));
            }
            if let Some(arg) = name.strip_prefix("constant(").and_then(|s| s.strip_suffix(')')) {
                let c: f64 = arg.trim().parse().map_err(|_| unknown())?;
                if !c.is_finite() {
                    return Err(Error::Domain(format!("constant must be finite, got {c}")));
                }
                let cv = T::of(c);
                // Two-sided: the signed-measure scheme annihilates it, so the
                // exact derivative is identically zero.
                return Ok(Builder::new(name, move |_, _| cv)
                    .two_sided()
                    .derivative(|_, _| Ok(T::zero()))
                    .integral(move |a, t: T| Ok(cv * t.powf(a) * reciprocal_gamma(a + T::one())))
                    .build());
            }
            Err(unknown())
        }
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::estimators::{gl_deterministic, rl_integral_quadrature};
    use crate::samplers::{UniformSource, UnitSource};
    use crate::special::gamma;

    fn f64_lookup(name: &str) -> TestFunction<f64> {
        lookup(name).unwrap()
    }

    #[test]
    fn example2_evaluates_to_sine() {
        let f = f64_lookup("example2");
        let v = f.evaluate(1.7, std::f64::consts::FRAC_PI_2);
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(f.evaluate(1.7, -2.0), 0.0, "zero extension");
    }

    /// 50-digit reference values for the registered exact pairs.
    #[test]
    fn exact_maps_match_reference_values() {
        let e1 = f64_lookup("example1");
        let cases = [
            (1.0, -0.268_315_114_117_904_61),
            (2.0, -0.233_401_561_130_924_93),
            (3.0, -0.211_503_335_172_130_99),
        ];
        for (t, want) in cases {
            let got = e1.exact_derivative(0.5, t).unwrap().unwrap();
            assert!((got - want).abs() < 1e-13, "t = {t}: {got} vs {want}");
        }

        let e2 = f64_lookup("example2");
        let got = e2.exact_derivative(1.7, 2.0).unwrap().unwrap();
        // 2^-0.7 E_{2,0.3}(-4)
        assert!((got - -0.971_539_859_383_167_28).abs() < 1e-13, "got {got}");

        let e3 = f64_lookup("example3");
        let got = e3.exact_derivative(2.5, 2.0).unwrap().unwrap();
        assert!((got - -0.111_694_323_392_260_07).abs() < 1e-13, "got {got}");

        // 1/Γ(3.4)
        let p = f64_lookup("power(-0.3)");
        let got = p.exact_integral(2.7, 1.0).unwrap().unwrap();
        assert!((got - 0.335_434_672_019_651_09).abs() < 1e-13, "got {got}");
    }

    #[test]
    fn example1_subtrahend_resolved_by_finite_difference_oracle() {
        // The registered derivative uses t^-α/Γ(1-α); the competing reading
        // would use Γ(1+α). The small-step backward difference arbitrates.
        let e1 = f64_lookup("example1");
        let alpha = 0.5;
        let t = 1.0;
        let oracle = gl_deterministic(&e1.evaluand(alpha), alpha, t, 1e-4);
        let registered = e1.exact_derivative(alpha, t).unwrap().unwrap();
        let e_term = {
            let p = MlParams::new(alpha, 1.0 - alpha).unwrap();
            mittag_leffler(&p, -0.4 * t.powf(alpha)).unwrap()
        };
        let competing = t.powf(-alpha) * (e_term - reciprocal_gamma(1.0 + alpha));
        assert!(
            (oracle - registered).abs() < 0.01,
            "oracle {oracle} vs registered {registered}"
        );
        assert!(
            (oracle - registered).abs() * 10.0 < (oracle - competing).abs(),
            "oracle {oracle} should sit near {registered}, far from {competing}"
        );
    }

    #[test]
    fn exact_maps_agree_with_richardson_differences_in_every_regime() {
        // Richardson-extrapolated backward differences against the
        // registered closed forms, one order per sign regime. The step must
        // grow with the order: the h^-α scaling amplifies rounding, so tiny
        // steps at high orders sit below the cancellation floor.
        let cases = [
            ("example2", vec![0.3, 1.7, 2.2, 3.2, 4.4]),
            ("example3", vec![0.7, 1.3, 2.5, 3.2, 4.6]),
        ];
        for (name, alphas) in cases {
            let f = f64_lookup(name);
            for a in alphas {
                let ev = f.evaluand(a);
                let (h1, h2, tol) = if a > 4.0 { (0.02, 0.01, 5e-2) } else { (1e-3, 5e-4, 5e-3) };
                for t in [1.0, 2.0] {
                    let exact = f.exact_derivative(a, t).unwrap().unwrap();
                    let d1 = gl_deterministic(&ev, a, t, h1);
                    let d2 = gl_deterministic(&ev, a, t, h2);
                    let extrap = 2.0 * d2 - d1;
                    let rel = (extrap - exact).abs() / exact.abs().max(1e-6);
                    assert!(rel < tol, "{name} a {a} t {t}: {extrap} vs {exact} (rel {rel:.2e})");
                }
            }
        }
    }

    #[test]
    fn example2_derivative_is_continuous_in_the_order() {
        // As α → 0⁺ the derivative approaches the function itself.
        let e2 = f64_lookup("example2");
        for t in [1.0, 2.0, 3.0] {
            let v = e2.exact_derivative(1e-6, t).unwrap().unwrap();
            assert!((v - t.sin()).abs() < 1e-4, "t = {t}: {v} vs {}", t.sin());
        }
    }

    #[test]
    fn power_duality_integral_equals_shifted_power() {
        let mut src = UniformSource::new(0xD0A1);
        let e6 = f64_lookup("example6");
        for _ in 0..20 {
            let a = 0.1 + 4.8 * <UniformSource as UnitSource<f64>>::next_unit(&mut src);
            let t = 0.2 + 3.0 * <UniformSource as UnitSource<f64>>::next_unit(&mut src);
            let lhs = e6.exact_integral(a, t).unwrap().unwrap();
            let shifted = f64_lookup(&format!("power({})", -0.3 + a));
            let rhs = shifted.evaluate(a, t);
            assert!(
                (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0),
                "a {a} t {t}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn example4_quadrature_reproduces_cosine() {
        let e4 = f64_lookup("example4");
        for t in [0.5, 1.0, 2.0] {
            let got = rl_integral_quadrature(&e4.evaluand(0.6), 0.6, t, 1e-9).unwrap();
            assert!((got - t.cos()).abs() < 1e-6, "t = {t}: {got} vs {}", t.cos());
        }
    }

    #[test]
    fn constant_is_two_sided_with_zero_derivative() {
        let c = f64_lookup("constant(2.5)");
        assert_eq!(c.evaluate(0.5, -3.0), 2.5);
        assert_eq!(c.exact_derivative(0.7, 1.3).unwrap().unwrap(), 0.0);
        let want = 2.5 * 2.0f64.powf(0.5) * reciprocal_gamma(1.5);
        let got = c.exact_integral(0.5, 2.0).unwrap().unwrap();
        assert!((got - want).abs() < 1e-14);
        let i = f64_lookup("identity");
        assert_eq!(i.evaluate(0.5, -3.0), 0.0);
        // t/Γ(2) up to the gamma approximation's last digit
        assert!((i.evaluate(0.5, 3.0) - 3.0).abs() < 1e-13);
        // D^1 t = 1
        let d = i.exact_derivative(1.0, 5.0).unwrap().unwrap();
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singularity_flags() {
        assert!(f64_lookup("example4").singular_at_zero());
        assert!(f64_lookup("example5").singular_at_zero());
        assert!(f64_lookup("example6").singular_at_zero());
        assert!(f64_lookup("power(-0.5)").singular_at_zero());
        assert!(!f64_lookup("power(1.5)").singular_at_zero());
        assert!(!f64_lookup("example2").singular_at_zero());
        assert_eq!(f64_lookup("example1").valid_alpha_range(), (0.0, 1.0));
    }

    #[test]
    fn lookup_errors() {
        let err = lookup::<f64>("nope").unwrap_err();
        match err {
            Error::UnknownFunction { registered, .. } => {
                assert!(registered.contains("example1"));
                assert!(registered.contains("identity"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(lookup::<f64>("power(-1.5)").is_err());
        assert!(lookup::<f64>("power(abc)").is_err());
        assert!(lookup::<f64>("constant(inf)").is_err());
    }

    #[test]
    fn example6_matches_power_minus_03() {
        let e6 = f64_lookup("example6");
        let p = f64_lookup("power(-0.3)");
        for t in [0.3, 1.0, 2.2] {
            assert_eq!(e6.evaluate(2.7, t), p.evaluate(2.7, t));
        }
        // frozen value: Γ(0.7) = 1.298055...; y(1) = 1/Γ(0.7)
        let y1 = e6.evaluate(2.7, 1.0);
        assert!((y1 - 1.0 / gamma(0.7f64).unwrap()).abs() < 1e-15);
    }
}
