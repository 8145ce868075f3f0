//! Direct integration of the initial value problem
//!
//! ```text
//! u' = v,   v' = -λ u (1 + κ v²)^(3/2),   u(0) = 0, v(0) = b,
//! ```
//!
//! used to verify time-map solutions independently. Integration uses the
//! Dormand-Prince 5(4) pair with a PI step controller; zeros are located
//! on a cubic Hermite interpolant between accepted steps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: f64,
    pub u: f64,
    pub v: f64,
}

/// Accepted steps of one IVP integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub lambda: f64,
    pub kappa: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    /// Mixed absolute/relative local error bound per step.
    pub step_tol: f64,
    /// Euclidean slopes beyond this are treated as the singular branch.
    pub gradient_cap: f64,
    pub max_steps: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            step_tol: 1e-11,
            gradient_cap: 1e6,
            max_steps: 2_000_000,
        }
    }
}

/// First integral `λ(κ/2)u² - 1/√(1 + κv²)`.
pub fn energy(kappa: f64, lambda: f64, u: f64, v: f64) -> Result<f64> {
    let w = 1.0 + kappa * v * v;
    if !(w > 0.0) {
        return Err(Error::DomainViolation(format!(
            "1 + kappa v^2 = {w} is not positive (kappa {kappa}, v {v})"
        )));
    }
    Ok(0.5 * lambda * kappa * u * u - 1.0 / w.sqrt())
}

/// The non-negative boundary slope whose trajectory reaches amplitude `xi`.
pub fn slope_from_amplitude(kappa: f64, lambda: f64, xi: f64) -> Result<f64> {
    // With q = λκξ²/2 and c = 1 - q: b² = (c⁻² - 1)/κ = q(2 - q) / (c² κ).
    let q = 0.5 * lambda * kappa * xi * xi;
    let c = 1.0 - q;
    if !(c > 0.0) {
        return Err(Error::DomainViolation(format!(
            "amplitude {xi} reaches the Euclidean bound at lambda {lambda}, kappa {kappa}"
        )));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    Ok((q * (2.0 - q) / (c * c * kappa)).sqrt())
}

impl Trajectory {
    pub fn end(&self) -> Sample {
        *self.samples.last().expect("trajectory has samples")
    }

    /// Largest `|E(x) - E(0)|` over the samples.
    pub fn energy_drift(&self) -> f64 {
        let e0 = energy(self.kappa, self.lambda, 0.0, self.b).unwrap_or(f64::NAN);
        self.samples
            .iter()
            .map(|s| {
                energy(self.kappa, self.lambda, s.u, s.v)
                    .map(|e| (e - e0).abs())
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }

    /// `u(x)` from the cubic Hermite interpolant.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let i = self.samples.partition_point(|s| s.x <= x);
        if i == 0 {
            return None;
        }
        if i == self.samples.len() {
            let last = self.end();
            return (x == last.x).then_some(last.u);
        }
        Some(hermite(&self.samples[i - 1], &self.samples[i], x))
    }

    /// Zero crossings of `u` closer than `margin` to neither end.
    pub fn interior_zeros(&self, margin: f64) -> Result<Vec<f64>> {
        let end = self.end().x;
        Ok(find_zeros(self)?
            .into_iter()
            .filter(|&x| x > margin && x < end - margin)
            .collect())
    }
}

fn hermite(s0: &Sample, s1: &Sample, x: f64) -> f64 {
    let h = s1.x - s0.x;
    let t = (x - s0.x) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * s0.u
        + (t3 - 2.0 * t2 + t) * h * s0.v
        + (-2.0 * t3 + 3.0 * t2) * s1.u
        + (t3 - t2) * h * s1.v
}

/// All sign changes of `u` after `x = 0`, refined by bisection on the
/// Hermite interpolant.
pub fn find_zeros(traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.b == 0.0 {
        return Ok(Vec::new());
    }
    const DEGENERATE: f64 = 1e-10;
    let mut zeros = Vec::new();
    for pair in traj.samples.windows(2) {
        let (s0, s1) = (&pair[0], &pair[1]);
        if s1.u.abs() < DEGENERATE && s1.v.abs() < DEGENERATE {
            return Err(Error::DegenerateZero { x: s1.x });
        }
        // An exact zero at s0 was already reported as the end of the
        // previous interval (or is the start point).
        if s0.u == 0.0 {
            continue;
        }
        if s0.u.signum() == s1.u.signum() && s1.u != 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (s0.x, s1.x);
        let sign_lo = s0.u.signum();
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hermite(s0, s1, mid).signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        let v = 0.5 * (s0.v + s1.v);
        if v.abs() < DEGENERATE {
            return Err(Error::DegenerateZero { x });
        }
        zeros.push(x);
    }
    Ok(zeros)
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

fn rhs(kappa: f64, lambda: f64, y: [f64; 2]) -> [f64; 2] {
    let w = 1.0 + kappa * y[1] * y[1];
    [y[1], -lambda * y[0] * w * w.sqrt()]
}

/// Integrates from `x = 0` to `x_end` with the default options and the
/// given local error bound.
pub fn integrate_ivp(kappa: f64, lambda: f64, b: f64, x_end: f64, step_tol: f64) -> Result<Trajectory> {
    integrate_ivp_with(
        kappa,
        lambda,
        b,
        x_end,
        &ShootingOptions {
            step_tol,
            ..ShootingOptions::default()
        },
    )
}

pub fn integrate_ivp_with(
    kappa: f64,
    lambda: f64,
    b: f64,
    x_end: f64,
    opts: &ShootingOptions,
) -> Result<Trajectory> {
    if kappa == 0.0 || !kappa.is_finite() {
        return Err(Error::InvalidInput(format!("kappa must be non-zero, got {kappa}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    if !(x_end > 0.0 && x_end <= 1.0) {
        return Err(Error::InvalidInput(format!("x_end must lie in (0, 1], got {x_end}")));
    }
    if !(opts.step_tol > 0.0) {
        return Err(Error::InvalidInput("step_tol must be positive".into()));
    }
    // Minkowski slopes must stay strictly below 1/√-κ.
    let slope_limit = if kappa < 0.0 {
        (1.0 - 1e-12) / (-kappa).sqrt()
    } else {
        opts.gradient_cap
    };
    let check_slope = |x: f64, v: f64| -> Result<()> {
        if v.abs() < slope_limit {
            Ok(())
        } else if kappa < 0.0 {
            Err(Error::ConstraintViolation { x, slope: v.abs() })
        } else {
            Err(Error::GradientBlowup { x, slope: v.abs() })
        }
    };
    check_slope(0.0, b)?;

    let mut samples = vec![Sample { x: 0.0, u: 0.0, v: b }];
    let mut x = 0.0;
    let mut y = [0.0, b];
    let mut k1 = rhs(kappa, lambda, y);
    let mut h = initial_step(k1, y, opts.step_tol, x_end);
    let mut err_prev: f64 = 1.0;
    let mut rejected_last = false;

    for _ in 0..opts.max_steps {
        if x >= x_end {
            return Ok(Trajectory {
                samples,
                lambda,
                kappa,
                b,
            });
        }
        let last = x + h >= x_end;
        if last {
            h = x_end - x;
        }

        let mut k = [[0.0; 2]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = rhs(kappa, lambda, ys);
        }
        // FSAL: the seventh stage is evaluated at the fifth-order solution.
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            y_new[0] += h * A[6][j] * kj[0];
            y_new[1] += h * A[6][j] * kj[1];
        }
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
            let scale = opts.step_tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            err = err.max((e / scale).abs());
        }

        if !err.is_finite() || !y_new[1].is_finite() {
            h *= 0.2;
            rejected_last = true;
        } else if err <= 1.0 {
            x = if last { x_end } else { x + h };
            y = y_new;
            k1 = k[6];
            check_slope(x, y[1])?;
            samples.push(Sample {
                x,
                u: y[0],
                v: y[1],
            });
            // PI controller.
            let mut factor = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            factor = factor.clamp(0.2, 5.0);
            if rejected_last {
                factor = factor.min(1.0);
            }
            h *= factor;
            err_prev = err.max(1e-4);
            rejected_last = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            rejected_last = true;
        }

        if h < 1e-15 * x.abs().max(1.0) {
            return Err(Error::StepUnderflow { x, step: h });
        }
    }
    Err(Error::StepUnderflow { x, step: h })
}

fn initial_step(f0: [f64; 2], y0: [f64; 2], tol: f64, span: f64) -> f64 {
    let d0 = y0[0].abs().max(y0[1].abs());
    let d1 = f0[0].abs().max(f0[1].abs());
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    // Fifth-order local error scales like h⁵.
    h.min(tol.powf(0.2)).min(span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn zero_slope_is_trivial() {
        let t = integrate_ivp(1.0, 5.0, 0.0, 1.0, 1e-11).unwrap();
        assert!(t.samples.iter().all(|s| s.u == 0.0 && s.v == 0.0));
        assert_eq!(t.end().x, 1.0);
        assert!(find_zeros(&t).unwrap().is_empty());
    }

    #[test]
    fn linear_limit_matches_sine() {
        for &kappa in &[1e-12, -1e-12] {
            let lambda = PI * PI;
            let t = integrate_ivp(kappa, lambda, 1.0, 1.0, 1e-11).unwrap();
            for s in &t.samples {
                let exact = (lambda.sqrt() * s.x).sin() / lambda.sqrt();
                assert_abs_diff_eq!(s.u, exact, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn linear_limit_zero_at_half() {
        for &kappa in &[1e-12, -1e-12] {
            let t = integrate_ivp(kappa, 4.0 * PI * PI, 1.0, 1.0, 1e-11).unwrap();
            let zeros = t.interior_zeros(1e-6).unwrap();
            assert_eq!(zeros.len(), 1, "{zeros:?}");
            assert_abs_diff_eq!(zeros[0], 0.5, epsilon = 1e-8);
        }
    }

    #[test]
    fn energy_basics() {
        assert_eq!(energy(3.0, 7.0, 0.0, 0.0).unwrap(), -1.0);
        assert_eq!(energy(-3.0, 7.0, 0.0, 0.0).unwrap(), -1.0);
        assert!(matches!(
            energy(-1.0, 1.0, 0.0, 1.0),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn energy_at_apex_equals_energy_at_start() {
        for &(kappa, lambda, xi) in &[(-1.0, 20.0, 0.3), (-4.0, 100.0, 0.2), (1.0, 6.0, 0.4)] {
            let b = slope_from_amplitude(kappa, lambda, xi).unwrap();
            let apex = energy(kappa, lambda, xi, 0.0).unwrap();
            let start = energy(kappa, lambda, 0.0, b).unwrap();
            assert_abs_diff_eq!(apex, start, epsilon = 1e-14 * apex.abs().max(1.0) * 10.0);
        }
    }

    #[test]
    fn energy_is_conserved() {
        let t = integrate_ivp(1.0, 6.0, 0.9, 1.0, 1e-11).unwrap();
        assert!(t.energy_drift() <= 1e-9, "drift {}", t.energy_drift());
    }

    #[test]
    fn slope_from_amplitude_edges() {
        assert_eq!(slope_from_amplitude(1.0, 6.0, 0.0).unwrap(), 0.0);
        for &xi in &[0.01, 0.3, 1.0, 10.0, 1e3] {
            let b = slope_from_amplitude(-1.0, 50.0, xi).unwrap();
            assert!(b < 1.0 && b > 0.0);
        }
        let lambda = 6.0;
        let bound = (2.0f64 / lambda).sqrt();
        assert!(slope_from_amplitude(1.0, lambda, 0.99 * bound).unwrap() > 10.0);
        assert!(slope_from_amplitude(1.0, lambda, 0.999 * bound).unwrap() > 1e2);
        assert!(matches!(
            slope_from_amplitude(1.0, lambda, 1.0001 * bound),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn minkowski_slope_stays_below_bound() {
        let t = integrate_ivp(-1.0, 1e4, 0.999, 1.0, 1e-11).unwrap();
        assert!(t.samples.iter().all(|s| s.v.abs() < 1.0));
        assert!(matches!(
            integrate_ivp(-1.0, 10.0, 1.0, 1.0, 1e-11),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn euclidean_gradient_cap() {
        let opts = ShootingOptions {
            gradient_cap: 10.0,
            ..ShootingOptions::default()
        };
        assert!(matches!(
            integrate_ivp_with(1.0, 6.0, 20.0, 1.0, &opts),
            Err(Error::GradientBlowup { .. })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(integrate_ivp(0.0, 1.0, 1.0, 1.0, 1e-9).is_err());
        assert!(integrate_ivp(1.0, -1.0, 1.0, 1.0, 1e-9).is_err());
        assert!(integrate_ivp(1.0, 1.0, 1.0, 1.5, 1e-9).is_err());
    }

    #[test]
    fn first_hump_is_symmetric() {
        // Hump from x = 0 to the first zero is symmetric about its midpoint.
        for &(kappa, lambda, b) in &[(-1.0, 40.0, 0.8), (1.0, 30.0, 0.7), (-2.0, 200.0, 0.6)] {
            let t = integrate_ivp(kappa, lambda, b, 1.0, 1e-12).unwrap();
            let z = t.interior_zeros(1e-6).unwrap()[0];
            for k in 1..50 {
                let x = z * k as f64 / 100.0;
                let left = t.eval(x).unwrap();
                let right = t.eval(z - x).unwrap();
                assert_abs_diff_eq!(left, right, epsilon = 1e-8);
            }
        }
    }
}
