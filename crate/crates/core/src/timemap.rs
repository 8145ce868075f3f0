//! The time map `J(λ, ξ)`: half-width of the symmetric positive hump with
//! amplitude `ξ`, in both curvature regimes.
//!
//! Writing `m = λ|κ|ξ²/2` and `d(θ) = m(1 - θ²)`, the hump profile follows
//! from the first integral and
//!
//! ```text
//! J(λ, ξ) = √|κ| ξ ∫₀¹ c / √|c² - 1| dθ,   c = 1 + d (κ < 0),  c = 1 - d (κ > 0).
//! ```
//!
//! In the Euclidean regime the amplitude is limited by `m < 1`, i.e.
//! `ξ < √(2/(λκ))`. At that bound the integral collapses to `B √(2/λ)`.
//!
//! One positive solution of the Dirichlet problem on `(0, 1)` corresponds to
//! a root of `J(λ, ξ) = 1/2`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::quadrature::{integrate_with, QuadOptions, SingularityFlags};
use crate::roots::{solve_bracketed, RootOptions};

/// Sign of the curvature parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeKind {
    Euclidean,
    Minkowski,
}

/// Curvature parameter `κ ≠ 0` together with its regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    kind: RegimeKind,
    kappa: f64,
}

impl Regime {
    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() || kappa == 0.0 {
            return Err(Error::InvalidInput(format!(
                "curvature must be finite and non-zero, got {kappa}"
            )));
        }
        let kind = if kappa > 0.0 {
            RegimeKind::Euclidean
        } else {
            RegimeKind::Minkowski
        };
        Ok(Self { kind, kappa })
    }

    pub fn kind(&self) -> RegimeKind {
        self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_euclidean(&self) -> bool {
        self.kind == RegimeKind::Euclidean
    }

    /// Largest admissible amplitude at `lambda`: `√(2/(λκ))` for κ > 0,
    /// unbounded for κ < 0.
    pub fn amplitude_bound(&self, lambda: f64) -> f64 {
        match self.kind {
            RegimeKind::Euclidean => (2.0 / (lambda * self.kappa)).sqrt(),
            RegimeKind::Minkowski => f64::INFINITY,
        }
    }
}

/// A single evaluation of the time map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMapEval {
    pub lambda: f64,
    pub xi: f64,
    pub value: f64,
    pub error_estimate: f64,
}

/// Integrand variant for [`TimeMap::derivative_xi_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeKernel {
    /// `2√-κ (1-α²)^(-3/2) (1-α)² (α+½)`, obtained by differentiating `J`
    /// under the integral sign.
    Differentiated,
    /// The same product with exponent `+3/2` on `(1-α²)`. Positive like the
    /// true derivative but of the wrong magnitude; kept for comparison.
    PositiveExponent,
}

/// `B = ∫₀¹ dθ / √(θ⁻⁴ - 1)`, computed once.
pub fn compute_b() -> Result<f64> {
    static B: OnceLock<f64> = OnceLock::new();
    if let Some(&b) = B.get() {
        return Ok(b);
    }
    let r = integrate_with(
        // θ⁻⁴ - 1 = (1 - θ)(1 + θ)(1 + θ²)/θ⁴
        |t, c| t * t / (c * (1.0 + t) * (1.0 + t * t)).sqrt(),
        SingularityFlags::RIGHT,
        &QuadOptions::with_tol(1e-14),
    )?;
    Ok(*B.get_or_init(|| r.value))
}

/// `lim_{ξ→0} J(λ, ξ) = π / (2√λ)`, the same in both regimes.
pub fn small_amplitude_limit(lambda: f64) -> f64 {
    FRAC_PI_2 / lambda.sqrt()
}

/// Time-map evaluator for one regime with fixed numerical settings.
#[derive(Debug, Clone, Copy)]
pub struct TimeMap {
    pub regime: Regime,
    pub quad: QuadOptions,
    /// Root residual `|J - target|` required of the solvers.
    pub root_tol: f64,
    /// Grid size of the sign-change scan used for uniqueness.
    pub scan_points: usize,
    /// Upper end of the λ search in [`TimeMap::lambda_of_xi`].
    pub lambda_budget: f64,
    pub execution: Execution,
}

impl TimeMap {
    pub fn new(regime: Regime) -> Self {
        Self {
            regime,
            quad: QuadOptions::default(),
            root_tol: 1e-10,
            scan_points: 512,
            lambda_budget: 1e6,
            execution: Execution::default(),
        }
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Self {
        self.quad = QuadOptions::with_tol(tol);
        self
    }

    pub fn with_root_tol(mut self, tol: f64) -> Self {
        self.root_tol = tol;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// `J(λ, ξ)`.
    pub fn eval(&self, lambda: f64, xi: f64) -> Result<TimeMapEval> {
        check_positive("lambda", lambda)?;
        check_positive("xi", xi)?;
        let bound = self.regime.amplitude_bound(lambda);
        if xi >= bound {
            return Err(Error::DomainViolation(format!(
                "amplitude {xi} not below the Euclidean bound {bound} at lambda {lambda}"
            )));
        }
        self.eval_unchecked(lambda, xi)
    }

    fn eval_unchecked(&self, lambda: f64, xi: f64) -> Result<TimeMapEval> {
        let kappa = self.regime.kappa;
        let m = 0.5 * lambda * kappa.abs() * xi * xi;
        let scale = kappa.abs().sqrt() * xi;
        let euclidean = self.regime.is_euclidean();
        let r = integrate_with(
            |t, comp| {
                let d = m * comp * (1.0 + t);
                if euclidean {
                    scale * (1.0 - d) / (d * (2.0 - d)).sqrt()
                } else {
                    scale * (1.0 + d) / (d * (2.0 + d)).sqrt()
                }
            },
            SingularityFlags::RIGHT,
            &self.quad,
        )?;
        Ok(TimeMapEval {
            lambda,
            xi,
            value: r.value,
            error_estimate: r.error_estimate,
        })
    }

    /// `J` on the closed Euclidean amplitude range: the exact boundary value
    /// `B √(2/λ)` at `ξ = √(2/(λκ))`, the quadrature below it.
    fn value_closed(&self, lambda: f64, xi: f64) -> Result<f64> {
        if self.regime.is_euclidean() && xi >= self.regime.amplitude_bound(lambda) {
            return Ok(compute_b()? * (2.0f64 / lambda).sqrt());
        }
        Ok(self.eval_unchecked(lambda, xi)?.value)
    }

    /// `∂J/∂ξ` in the Minkowski regime.
    pub fn derivative_xi(&self, lambda: f64, xi: f64) -> Result<f64> {
        self.derivative_xi_with(lambda, xi, DerivativeKernel::Differentiated)
    }

    pub fn derivative_xi_with(&self, lambda: f64, xi: f64, kernel: DerivativeKernel) -> Result<f64> {
        if self.regime.is_euclidean() {
            return Err(Error::DomainViolation(
                "analytic amplitude derivative is only available for kappa < 0".into(),
            ));
        }
        check_positive("lambda", lambda)?;
        check_positive("xi", xi)?;
        let root = (-self.regime.kappa).sqrt();
        let m = 0.5 * lambda * (-self.regime.kappa) * xi * xi;
        let r = integrate_with(
            |t, comp| {
                let d = m * comp * (1.0 + t);
                match kernel {
                    // With α = 1/(1+d) the product reduces to
                    // √d (3+d) / (2+d)^(3/2).
                    DerivativeKernel::Differentiated => {
                        root * d.sqrt() * (3.0 + d) / (2.0 + d).powf(1.5)
                    }
                    DerivativeKernel::PositiveExponent => {
                        let alpha = 1.0 / (1.0 + d);
                        let one_minus = d / (1.0 + d);
                        let one_minus_sq = d * (2.0 + d) / ((1.0 + d) * (1.0 + d));
                        2.0 * root * one_minus_sq.powf(1.5) * one_minus * one_minus * (alpha + 0.5)
                    }
                }
            },
            SingularityFlags::RIGHT,
            &self.quad,
        )?;
        Ok(r.value)
    }

    /// Sign changes of `J(λ, ·) - target` on a uniform amplitude grid.
    ///
    /// The Euclidean grid spans `(0, √(2/(λκ))]`; the Minkowski grid spans
    /// `(0, target/√-κ]`, beyond which `J > ξ√-κ > target`. The ξ → 0 end
    /// uses the analytic limit `π/(2√λ)`.
    pub fn scan_brackets(&self, lambda: f64, target: f64) -> Result<Vec<(f64, f64)>> {
        check_positive("lambda", lambda)?;
        check_positive("target", target)?;
        let top = self.scan_top(lambda, target);
        let n = self.scan_points.max(2);
        let grid: Vec<f64> = (1..=n).map(|k| top * k as f64 / n as f64).collect();
        let values = par::map(self.execution, &grid, |&xi| self.value_closed(lambda, xi));

        let mut brackets = Vec::new();
        let mut prev = (0.0, small_amplitude_limit(lambda) - target);
        for (&xi, v) in grid.iter().zip(values) {
            let g = v? - target;
            if g == 0.0 || g.signum() != prev.1.signum() {
                brackets.push((prev.0, xi));
            }
            prev = (xi, g);
        }
        Ok(brackets)
    }

    fn scan_top(&self, lambda: f64, target: f64) -> f64 {
        match self.regime.kind {
            RegimeKind::Euclidean => self.regime.amplitude_bound(lambda),
            RegimeKind::Minkowski => target / (-self.regime.kappa).sqrt(),
        }
    }

    /// The unique `ξ` with `J(λ, ξ) = target`.
    pub fn solve_amplitude(&self, lambda: f64, target: f64) -> Result<f64> {
        check_positive("lambda", lambda)?;
        check_positive("target", target)?;
        let top = self.scan_top(lambda, target);
        let g0 = small_amplitude_limit(lambda) - target;

        let (lo, hi) = match self.regime.kind {
            RegimeKind::Minkowski => {
                // J increases from π/(2√λ) and exceeds target at `top`.
                if g0 >= 0.0 {
                    return Err(Error::NoSolution {
                        reason: format!(
                            "J(lambda, xi) > {target} for every amplitude at lambda {lambda}"
                        ),
                        lower_sign: sign(g0),
                        upper_sign: 1,
                    });
                }
                (0.0, top)
            }
            RegimeKind::Euclidean => {
                let brackets = self.scan_brackets(lambda, target)?;
                match brackets.as_slice() {
                    [] => {
                        let g_top = self.value_closed(lambda, top)? - target;
                        return Err(Error::NoSolution {
                            reason: format!(
                                "J(lambda, xi) - {target} keeps one sign on the amplitude range at lambda {lambda}"
                            ),
                            lower_sign: sign(g0),
                            upper_sign: sign(g_top),
                        });
                    }
                    [one] => *one,
                    many => return Err(Error::MultipleRoots { count: many.len() }),
                }
            }
        };

        let g = |xi: f64| -> Result<f64> {
            if xi <= 0.0 {
                Ok(g0)
            } else {
                Ok(self.value_closed(lambda, xi)? - target)
            }
        };
        let root = solve_bracketed(g, lo, hi, g(lo)?, g(hi)?, &self.root_options())?;
        self.accept(root.x, root.residual, root.iterations)
    }

    /// The unique `λ` with `J(λ, ξ) = target`, using that `J` decreases in λ.
    pub fn lambda_of_xi(&self, xi: f64, target: f64) -> Result<f64> {
        check_positive("xi", xi)?;
        check_positive("target", target)?;
        let g = |lambda: f64| -> Result<f64> { Ok(self.value_closed(lambda, xi)? - target) };

        let (lo, hi, g_lo, g_hi) = match self.regime.kind {
            RegimeKind::Minkowski => {
                // J ≥ π/(2√λ), with J → ξ√-κ as λ → ∞.
                let floor = xi * (-self.regime.kappa).sqrt() - target;
                if floor >= 0.0 {
                    return Err(Error::NoSolution {
                        reason: format!("amplitude {xi} too large: J > {target} for every lambda"),
                        lower_sign: 1,
                        upper_sign: sign(floor),
                    });
                }
                let lo = (FRAC_PI_2 / target).powi(2);
                let g_lo = g(lo)?;
                let mut hi = 2.0 * lo;
                let mut g_hi = g(hi)?;
                while g_hi > 0.0 {
                    if hi >= self.lambda_budget {
                        return Err(Error::NoSolution {
                            reason: format!(
                                "J(lambda, {xi}) stays above {target} up to lambda {}",
                                self.lambda_budget
                            ),
                            lower_sign: sign(g_lo),
                            upper_sign: sign(g_hi),
                        });
                    }
                    hi = (2.0 * hi).min(self.lambda_budget);
                    g_hi = g(hi)?;
                }
                (lo, hi, g_lo, g_hi)
            }
            RegimeKind::Euclidean => {
                // λ ≤ 2/(κξ²), where J = B ξ √κ.
                let hi = 2.0 / (self.regime.kappa * xi * xi);
                let g_hi = g(hi)?;
                if g_hi >= 0.0 {
                    return Err(Error::NoSolution {
                        reason: format!(
                            "amplitude {xi} at or beyond the singular limit 1/(2B sqrt(kappa))"
                        ),
                        lower_sign: 1,
                        upper_sign: sign(g_hi),
                    });
                }
                // J ≥ π/(4√λ) on the admissible range.
                let mut lo = (PI / (4.0 * target)).powi(2).min(0.5 * hi);
                let mut g_lo = g(lo)?;
                while g_lo <= 0.0 {
                    lo *= 0.25;
                    if lo < f64::MIN_POSITIVE.sqrt() {
                        return Err(Error::NoSolution {
                            reason: format!("no lambda with J(lambda, {xi}) above {target}"),
                            lower_sign: sign(g_lo),
                            upper_sign: sign(g_hi),
                        });
                    }
                    g_lo = g(lo)?;
                }
                (lo, hi, g_lo, g_hi)
            }
        };

        let root = solve_bracketed(g, lo, hi, g_lo, g_hi, &self.root_options())?;
        self.accept(root.x, root.residual, root.iterations)
    }

    fn root_options(&self) -> RootOptions {
        RootOptions {
            f_tol: self.root_tol,
            x_tol: 0.0,
            max_iterations: 300,
        }
    }

    fn accept(&self, x: f64, residual: f64, iterations: usize) -> Result<f64> {
        if residual.abs() > self.root_tol {
            return Err(Error::NonConvergence {
                error: residual.abs(),
                evaluations: iterations,
            });
        }
        Ok(x)
    }
}

/// `J(λ, ξ)` with default settings.
pub fn time_map(regime: Regime, lambda: f64, xi: f64) -> Result<TimeMapEval> {
    TimeMap::new(regime).eval(lambda, xi)
}

/// `∂J/∂ξ` (κ < 0) with default settings.
pub fn time_map_derivative_xi(regime: Regime, lambda: f64, xi: f64) -> Result<f64> {
    TimeMap::new(regime).derivative_xi(lambda, xi)
}

pub fn solve_amplitude(regime: Regime, lambda: f64, target: f64) -> Result<f64> {
    TimeMap::new(regime).solve_amplitude(lambda, target)
}

pub fn lambda_of_xi(regime: Regime, xi: f64, target: f64) -> Result<f64> {
    TimeMap::new(regime).lambda_of_xi(xi, target)
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {value}")))
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}
