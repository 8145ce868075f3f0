//! Nodal solutions, spectral intervals and bifurcation branches.
//!
//! An `n`-hump solution on `(0, 1)` is the `n = 1` solution of the problem
//! with `κ̃ = κn²`, `λ̃ = λ/n²`, compressed by `x = y/n` and tiled by
//! alternating reflections. All humps share one profile, so the whole
//! construction reduces to one time-map root and one hump profile.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::quadrature::{integrate_interval, QuadOptions};
use crate::shooting::{integrate_ivp_with, slope_from_amplitude, ShootingOptions};
use crate::timemap::{compute_b, Regime, RegimeKind, TimeMap};

/// Half-width every rescaled hump must have.
pub const HALF_WIDTH: f64 = 0.5;

/// Required `|J(λ̃, ξ) - 1/2|` for a profile to count as a solution.
const PROFILE_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            other => Err(Error::InvalidInput(format!("sign must be + or -, got {other:?}"))),
        }
    }
}

/// Number of humps and the sign of the solution near `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodalClass {
    pub n: u32,
    pub nu: Sign,
}

impl NodalClass {
    pub fn new(n: u32, nu: Sign) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("nodal class needs n >= 1".into()));
        }
        Ok(Self { n, nu })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub u: f64,
}

/// Open interval of `λ` for which solutions with `n` humps exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralInterval {
    pub lower: f64,
    /// `f64::INFINITY` in the Minkowski regime.
    pub upper: f64,
}

impl SpectralInterval {
    pub fn contains(&self, lambda: f64) -> bool {
        lambda > self.lower && lambda < self.upper
    }
}

/// `(8n²B², n²π²)` for κ > 0 and `(n²π², ∞)` for κ < 0.
pub fn spectrum_interval(kappa: f64, n: u32) -> Result<SpectralInterval> {
    let regime = Regime::new(kappa)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let n2 = f64::from(n * n);
    Ok(match regime.kind() {
        RegimeKind::Euclidean => {
            let b = compute_b()?;
            SpectralInterval {
                lower: 8.0 * n2 * b * b,
                upper: n2 * PI * PI,
            }
        }
        RegimeKind::Minkowski => SpectralInterval {
            lower: n2 * PI * PI,
            upper: f64::INFINITY,
        },
    })
}

/// `(κn², λ/n²)`: parameters of the one-hump problem equivalent to the
/// `n`-hump one under `u(x) = v(nx)`.
pub fn rescale(kappa: f64, lambda: f64, n: u32) -> (f64, f64) {
    let n2 = f64::from(n * n);
    (kappa * n2, lambda / n2)
}

/// First hump on `[0, 1/n]`, sampled uniformly in `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumpProfile {
    pub n: u32,
    pub xi: f64,
    /// `u'(0)`.
    pub b: f64,
    pub lambda: f64,
    pub kappa: f64,
    /// `|J(λ̃, ξ) - 1/2|` of the rescaled problem.
    pub residual: f64,
    pub grid: Vec<Point>,
}

/// Builds the first hump for amplitude `xi`, which must solve the rescaled
/// time-map equation. `grid_points` is the number of uniform intervals on
/// `[0, 1/n]` and must be even and at least 16.
pub fn build_hump(kappa: f64, lambda: f64, n: u32, xi: f64, grid_points: usize) -> Result<HumpProfile> {
    build_hump_with(&TimeMap::new(Regime::new(kappa * f64::from(n * n))?), lambda, n, xi, grid_points)
}

/// As [`build_hump`], with the rescaled time-map settings supplied.
pub fn build_hump_with(
    tm: &TimeMap,
    lambda: f64,
    n: u32,
    xi: f64,
    grid_points: usize,
) -> Result<HumpProfile> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if grid_points < 16 || !grid_points.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "grid_points must be even and >= 16, got {grid_points}"
        )));
    }
    let n2 = f64::from(n * n);
    let kappa = tm.regime.kappa() / n2;
    let lambda_t = lambda / n2;
    let residual = (tm.eval(lambda_t, xi)?.value - HALF_WIDTH).abs();
    if residual > PROFILE_RESIDUAL {
        return Err(Error::NotASolution { xi, residual });
    }
    let b = slope_from_amplitude(kappa, lambda, xi)?;

    // In the rescaled variable y = nx, with u = ξ sin τ, the hump satisfies
    // dy/dτ = √(2/λ̃) (1 ± m cos²τ) / √(2 ± m cos²τ), m = λ̃|κ̃|ξ²/2.
    let m = 0.5 * lambda_t * tm.regime.kappa().abs() * xi * xi;
    let sgn = if tm.regime.is_euclidean() { -1.0 } else { 1.0 };
    let scale = (2.0 / lambda_t).sqrt();
    let density = move |t: f64| {
        let q = sgn * m * t.cos().powi(2);
        scale * (1.0 + q) / (2.0 + q).sqrt()
    };
    let quad = QuadOptions::with_tol(1e-14);

    // Cumulative y at panel boundaries in τ.
    const PANELS: usize = 256;
    let taus: Vec<f64> = (0..=PANELS)
        .map(|k| FRAC_PI_2 * k as f64 / PANELS as f64)
        .collect();
    let mut ys = vec![0.0; PANELS + 1];
    for k in 0..PANELS {
        ys[k + 1] = ys[k] + integrate_interval(density, taus[k], taus[k + 1], &quad)?.value;
    }

    let half = grid_points / 2;
    let mut left = Vec::with_capacity(half + 1);
    for i in 0..=half {
        let y = i as f64 / grid_points as f64;
        let u = if i == 0 {
            0.0
        } else if i == half || y >= ys[PANELS] {
            xi
        } else {
            let k = ys.partition_point(|&v| v <= y).clamp(1, PANELS) - 1;
            let tau = invert_panel(&density, taus[k], taus[k + 1], ys[k], y, &quad)?;
            xi * tau.sin()
        };
        left.push(u);
    }

    let inv = 1.0 / (f64::from(n) * grid_points as f64);
    let grid = (0..=grid_points)
        .map(|i| Point {
            x: i as f64 * inv,
            u: left[i.min(grid_points - i)],
        })
        .collect();

    Ok(HumpProfile {
        n,
        xi,
        b,
        lambda,
        kappa,
        residual,
        grid,
    })
}

/// Solves `y0 + ∫_{a}^{τ} density = target` for `τ ∈ [a, b]` by safeguarded
/// Newton iteration.
fn invert_panel<F: Fn(f64) -> f64 + Copy>(
    density: &F,
    a: f64,
    b: f64,
    y0: f64,
    target: f64,
    quad: &QuadOptions,
) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut tau = 0.5 * (a + b);
    for _ in 0..100 {
        let g = y0 + integrate_interval(*density, a, tau, quad)?.value - target;
        if g.abs() <= 1e-15 {
            break;
        }
        if g > 0.0 {
            hi = tau;
        } else {
            lo = tau;
        }
        let step = tau - g / density(tau);
        tau = if step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(tau)
}

/// Full solution on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalSolution {
    pub class: NodalClass,
    pub lambda: f64,
    pub kappa: f64,
    pub grid: Vec<Point>,
    /// Interior zeros `j/n`.
    pub zeros: Vec<f64>,
    pub sup_norm: f64,
    /// `u'(0) = ν b`.
    pub boundary_slope: f64,
    /// Time-map residual of the underlying hump.
    pub residual: f64,
}

/// Tiles the first hump into `u(x) = ν (-1)^j hump(x - j/n)` on
/// `[j/n, (j+1)/n]`.
pub fn assemble_nodal(hump: &HumpProfile, class: NodalClass) -> Result<NodalSolution> {
    if hump.n != class.n {
        return Err(Error::InvalidInput(format!(
            "hump built for n = {} cannot tile class n = {}",
            hump.n, class.n
        )));
    }
    let per = hump.grid.len() - 1;
    let total = per * class.n as usize;
    let inv = 1.0 / total as f64;
    let nu = class.nu.value();
    let grid = (0..=total)
        .map(|k| {
            let (j, local) = (k / per, k % per);
            let u = if local == 0 {
                0.0
            } else {
                let parity = if j % 2 == 0 { 1.0 } else { -1.0 };
                nu * parity * hump.grid[local].u
            };
            Point { x: k as f64 * inv, u }
        })
        .collect();
    let zeros = (1..class.n).map(|j| f64::from(j) / f64::from(class.n)).collect();
    Ok(NodalSolution {
        class,
        lambda: hump.lambda,
        kappa: hump.kappa,
        grid,
        zeros,
        sup_norm: hump.xi,
        boundary_slope: nu * hump.b,
        residual: hump.residual,
    })
}

/// Numerical settings shared by the solution and branch pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub quad_tol: f64,
    pub root_tol: f64,
    pub step_tol: f64,
    /// Uniform intervals per hump.
    pub grid_points: usize,
    pub execution: Execution,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            quad_tol: 1e-12,
            root_tol: 1e-10,
            step_tol: 1e-11,
            grid_points: 1024,
            execution: Execution::default(),
        }
    }
}

impl Settings {
    /// Time map of the one-hump problem equivalent to `(kappa, n)`.
    pub fn rescaled_time_map(&self, kappa: f64, n: u32) -> Result<TimeMap> {
        let (kappa_t, _) = rescale(kappa, 1.0, n);
        Ok(TimeMap::new(Regime::new(kappa_t)?)
            .with_quad_tol(self.quad_tol)
            .with_root_tol(self.root_tol)
            .with_execution(self.execution))
    }

    fn shooting(&self) -> ShootingOptions {
        ShootingOptions {
            step_tol: self.step_tol,
            ..ShootingOptions::default()
        }
    }
}

/// Solves for the `class` solution at `lambda`: amplitude from the rescaled
/// time map, then hump profile and tiling.
pub fn solve_nodal(kappa: f64, lambda: f64, class: NodalClass, settings: &Settings) -> Result<NodalSolution> {
    let tm = settings.rescaled_time_map(kappa, class.n)?;
    let (_, lambda_t) = rescale(kappa, lambda, class.n);
    let xi = tm.solve_amplitude(lambda_t, HALF_WIDTH)?;
    let hump = build_hump_with(&tm, lambda, class.n, xi, settings.grid_points)?;
    assemble_nodal(&hump, class)
}

/// One point of a bifurcation branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub xi: f64,
    pub lambda: f64,
    /// `|u'(0)|`.
    pub b: f64,
    /// `‖u‖∞`; the hump amplitude.
    pub sup_norm: f64,
    /// `J(λ̃, ξ) - 1/2`.
    pub residual_j: f64,
    /// `|u(1)|` from shooting with slope `b`.
    pub residual_shoot: f64,
    /// Interior zeros found by the shooting replay.
    pub shoot_zeros: usize,
    /// Largest first-integral drift along the replay.
    pub energy_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub xi: f64,
    pub reason: String,
}

/// Branch of `class` solutions, ordered by amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub kappa: f64,
    pub regime: RegimeKind,
    pub class: NodalClass,
    pub points: Vec<BranchPoint>,
    pub skipped: Vec<SkippedPoint>,
}

impl Branch {
    /// Number of adjacent pairs breaking the expected monotonicity: λ
    /// increasing in ξ (Minkowski only), and `b` decreasing in λ for κ > 0,
    /// increasing for κ < 0.
    pub fn monotonicity_violations(&self) -> usize {
        let mut violations = 0;
        if self.regime == RegimeKind::Minkowski {
            violations += self
                .points
                .windows(2)
                .filter(|w| !(w[1].lambda > w[0].lambda))
                .count();
        }
        let mut by_lambda = self.points.clone();
        by_lambda.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        violations += by_lambda
            .windows(2)
            .filter(|w| match self.regime {
                RegimeKind::Euclidean => !(w[1].b < w[0].b && w[1].lambda > w[0].lambda),
                RegimeKind::Minkowski => !(w[1].b > w[0].b && w[1].lambda > w[0].lambda),
            })
            .count();
        violations
    }
}

/// Traces the branch at the given amplitudes. Points where the time-map
/// solve fails are recorded in `skipped`.
pub fn trace_branch(kappa: f64, class: NodalClass, xi_grid: &[f64]) -> Result<Branch> {
    trace_branch_with(kappa, class, xi_grid, &Settings::default())
}

pub fn trace_branch_with(
    kappa: f64,
    class: NodalClass,
    xi_grid: &[f64],
    settings: &Settings,
) -> Result<Branch> {
    let regime = Regime::new(kappa)?;
    if xi_grid.is_empty() || !xi_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(
            "amplitude grid must be non-empty and strictly increasing".into(),
        ));
    }
    if xi_grid[0] <= 0.0 {
        return Err(Error::InvalidInput("amplitudes must be positive".into()));
    }
    let tm = settings.rescaled_time_map(kappa, class.n)?.with_execution(Execution::Sequential);
    let results = par::map(settings.execution, xi_grid, |&xi| {
        branch_point(&tm, kappa, class.n, xi, settings)
    });

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (&xi, r) in xi_grid.iter().zip(results) {
        match r {
            Ok(p) => points.push(p),
            Err(e) => skipped.push(SkippedPoint {
                xi,
                reason: e.to_string(),
            }),
        }
    }
    Ok(Branch {
        kappa,
        regime: regime.kind(),
        class,
        points,
        skipped,
    })
}

fn branch_point(tm: &TimeMap, kappa: f64, n: u32, xi: f64, settings: &Settings) -> Result<BranchPoint> {
    let n2 = f64::from(n * n);
    let lambda_t = tm.lambda_of_xi(xi, HALF_WIDTH)?;
    let residual_j = tm.eval(lambda_t, xi)?.value - HALF_WIDTH;
    let lambda = n2 * lambda_t;
    let b = slope_from_amplitude(kappa, lambda, xi)?;
    let traj = integrate_ivp_with(kappa, lambda, b, 1.0, &settings.shooting())?;
    Ok(BranchPoint {
        xi,
        lambda,
        b,
        sup_norm: xi,
        residual_j,
        residual_shoot: traj.end().u.abs(),
        shoot_zeros: traj.interior_zeros(1e-6)?.len(),
        energy_drift: traj.energy_drift(),
    })
}

/// Outcome of one asymptotic claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteReport {
    pub kappa: f64,
    pub n: u32,
    pub claims: Vec<Claim>,
}

impl AsymptoteReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }
}

/// Checks the ends of the branch.
///
/// κ > 0: as `ξ ↑ 1/(2nB√κ)`, `λ ↓ 8n²B²` monotonically and `u'(0)` grows.
/// κ < 0: across `λ ∈ {10³, 10⁴, 10⁵}`, `‖u‖∞` increases and stays below
/// `1/(2n√-κ)`, and `u'(0)` increases towards `1/√-κ`.
pub fn asymptote_check(kappa: f64, n: u32) -> Result<AsymptoteReport> {
    let regime = Regime::new(kappa)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let settings = Settings::default();
    let tm = settings.rescaled_time_map(kappa, n)?;
    let n2 = f64::from(n * n);
    let mut claims = Vec::new();
    let mut claim = |name: &str, passed: bool, detail: String| {
        claims.push(Claim {
            name: name.to_string(),
            passed,
            detail,
        })
    };

    match regime.kind() {
        RegimeKind::Euclidean => {
            let b_const = compute_b()?;
            let limit_xi = 1.0 / (2.0 * f64::from(n) * b_const * kappa.sqrt());
            let limit_lambda = 8.0 * n2 * b_const * b_const;
            let xis: Vec<f64> = (1..=4).map(|k| (1.0 - 10f64.powi(-k)) * limit_xi).collect();
            let lambdas = xis
                .iter()
                .map(|&xi| tm.lambda_of_xi(xi, HALF_WIDTH).map(|l| n2 * l))
                .collect::<Result<Vec<_>>>()?;
            let slopes = xis
                .iter()
                .zip(&lambdas)
                .map(|(&xi, &l)| slope_from_amplitude(kappa, l, xi))
                .collect::<Result<Vec<_>>>()?;
            claim(
                "lambda decreasing as amplitude approaches 1/(2nB sqrt(kappa))",
                lambdas.windows(2).all(|w| w[1] < w[0]),
                format!("xi {xis:?} -> lambda {lambdas:?}"),
            );
            let last = *lambdas.last().unwrap();
            claim(
                "lambda approaches 8n^2B^2",
                (last - limit_lambda).abs() < 1e-2 && lambdas.iter().all(|&l| l > limit_lambda),
                format!("lambda {last} vs limit {limit_lambda}"),
            );
            claim(
                "boundary slope grows without bound",
                slopes.windows(2).all(|w| w[1] > w[0]) && *slopes.last().unwrap() > 10.0,
                format!("b {slopes:?}"),
            );
        }
        RegimeKind::Minkowski => {
            let root = (-kappa).sqrt();
            let bound = 1.0 / (2.0 * f64::from(n) * root);
            let lambdas = [1e3, 1e4, 1e5];
            let xis = lambdas
                .iter()
                .map(|&l| tm.solve_amplitude(l / n2, HALF_WIDTH))
                .collect::<Result<Vec<_>>>()?;
            let slopes = xis
                .iter()
                .zip(&lambdas)
                .map(|(&xi, &l)| slope_from_amplitude(kappa, l, xi))
                .collect::<Result<Vec<_>>>()?;
            claim(
                "sup-norm increasing in lambda",
                xis.windows(2).all(|w| w[1] > w[0]),
                format!("lambda {lambdas:?} -> xi {xis:?}"),
            );
            claim(
                "sup-norm below 1/(2n sqrt(-kappa))",
                xis.iter().all(|&x| x < bound),
                format!("max xi {} vs bound {bound}", xis[2]),
            );
            claim(
                "boundary slope increasing towards 1/sqrt(-kappa)",
                slopes.windows(2).all(|w| w[1] > w[0]) && slopes.iter().all(|&b| b * root < 1.0),
                format!("b {slopes:?}, limit {}", 1.0 / root),
            );
            claim(
                "boundary slope within 1% of 1/sqrt(-kappa) at lambda 1e5",
                slopes[2] * root > 0.99,
                format!("b(1e5) sqrt(-kappa) = {}", slopes[2] * root),
            );
        }
    }
    Ok(AsymptoteReport { kappa, n, claims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const B: f64 = 0.599_070_117_367_796_1;

    fn plus(n: u32) -> NodalClass {
        NodalClass::new(n, Sign::Plus).unwrap()
    }

    #[test]
    fn intervals() {
        let i = spectrum_interval(1.0, 1).unwrap();
        assert_abs_diff_eq!(i.lower, 8.0 * B * B, epsilon = 1e-11);
        assert_abs_diff_eq!(i.upper, PI * PI, epsilon = 1e-12);
        let i = spectrum_interval(5.0, 2).unwrap();
        assert_abs_diff_eq!(i.lower, 11.484_320_176_738_08, epsilon = 1e-10);
        assert_abs_diff_eq!(i.upper, 4.0 * PI * PI, epsilon = 1e-12);
        let i = spectrum_interval(-1.0, 3).unwrap();
        assert_abs_diff_eq!(i.lower, 88.826_439_609_804_23, epsilon = 1e-10);
        assert!(i.upper.is_infinite());
        assert!(spectrum_interval(0.0, 1).is_err());
        assert!(spectrum_interval(1.0, 0).is_err());
    }

    #[test]
    fn rescale_cases() {
        assert_eq!(rescale(3.0, 7.0, 1), (3.0, 7.0));
        assert_eq!(rescale(1.0, 24.0, 2), (4.0, 6.0));
        for &kappa in &[1.0, -1.0] {
            for n in 1..4 {
                let (kt, _) = rescale(kappa, 1.0, n);
                let one = spectrum_interval(kt, 1).unwrap();
                let many = spectrum_interval(kappa, n).unwrap();
                let n2 = f64::from(n * n);
                assert_abs_diff_eq!(one.lower * n2, many.lower, epsilon = 1e-10);
                assert_eq!(one.upper * n2, many.upper);
            }
        }
    }

    #[test]
    fn sign_parsing() {
        assert_eq!("+".parse::<Sign>().unwrap(), Sign::Plus);
        assert_eq!("-".parse::<Sign>().unwrap(), Sign::Minus);
        assert!("x".parse::<Sign>().is_err());
        assert!(NodalClass::new(0, Sign::Plus).is_err());
    }

    #[test]
    fn hump_invariants() {
        let settings = Settings::default();
        for &(kappa, lambda) in &[(1.0, 6.0), (-1.0, 2.0 * PI * PI), (-4.0, 30.0)] {
            let sol = solve_nodal(kappa, lambda, plus(1), &settings).unwrap();
            let g = &sol.grid;
            assert_eq!(g.len(), 1025);
            assert_eq!(g[0].u, 0.0);
            assert_eq!(g[1024].u, 0.0);
            assert_eq!(g[512].u, sol.sup_norm);
            assert!(g.iter().all(|p| p.u <= sol.sup_norm));
            assert!(g[..=512].windows(2).all(|w| w[1].u > w[0].u));
            for i in 0..=1024 {
                assert_eq!(g[i].u, g[1024 - i].u);
            }
        }
    }

    #[test]
    fn hump_matches_shooting() {
        let settings = Settings::default();
        for &(kappa, lambda) in &[(1.0, 6.0), (-1.0, 2.0 * PI * PI), (1.0, 3.0)] {
            let sol = solve_nodal(kappa, lambda, plus(1), &settings).unwrap();
            let b = slope_from_amplitude(kappa, lambda, sol.sup_norm).unwrap();
            assert_abs_diff_eq!(sol.boundary_slope, b, epsilon = 1e-12);
            let traj = crate::shooting::integrate_ivp(kappa, lambda, b, 1.0, 1e-12).unwrap();
            assert!(traj.end().u.abs() < 1e-8, "u(1) = {}", traj.end().u);
            assert!(traj.interior_zeros(1e-6).unwrap().is_empty());
            let worst = sol
                .grid
                .iter()
                .map(|p| (traj.eval(p.x).unwrap() - p.u).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-6, "sup diff {worst}");
        }
    }

    #[test]
    fn near_linear_profile_is_a_sine() {
        let settings = Settings::default();
        let sol = solve_nodal(-1e-8, PI * PI + 1e-4, plus(1), &settings).unwrap();
        let xi = sol.sup_norm;
        let worst = sol
            .grid
            .iter()
            .map(|p| (p.u - xi * (PI * p.x).sin()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn non_solution_amplitude_rejected() {
        let err = build_hump(-1.0, 2.0 * PI * PI, 1, 0.1, 64).unwrap_err();
        assert!(matches!(err, Error::NotASolution { .. }));
        assert!(matches!(
            build_hump(-1.0, 2.0 * PI * PI, 1, 0.1, 15),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn assembly_signs_and_zeros() {
        let settings = Settings::default();
        let minus = NodalClass::new(2, Sign::Minus).unwrap();
        let sol = solve_nodal(-1.0, 60.0, minus, &settings).unwrap();
        assert_eq!(sol.zeros, vec![0.5]);
        let mid = sol.grid.len() / 2;
        assert_eq!(sol.grid[mid].u, 0.0);
        assert!(sol.grid[1..mid].iter().all(|p| p.u < 0.0));
        assert!(sol.grid[mid + 1..sol.grid.len() - 1].iter().all(|p| p.u > 0.0));
        assert!(sol.boundary_slope < 0.0);

        let pos = solve_nodal(-1.0, 60.0, plus(2), &settings).unwrap();
        for (a, b) in pos.grid.iter().zip(&sol.grid) {
            assert_eq!(a.u, -b.u);
        }
        let hump = HumpProfile {
            n: 3,
            ..build_hump(-1.0, 60.0, 1, solve_nodal(-1.0, 60.0, plus(1), &settings).unwrap().sup_norm, 16)
                .unwrap()
        };
        assert!(assemble_nodal(&hump, plus(2)).is_err());
    }

    #[test]
    fn branch_monotone_small() {
        let grid: Vec<f64> = (1..=8).map(|k| 0.05 * k as f64).collect();
        let mink = trace_branch(-1.0, plus(1), &grid).unwrap();
        assert!(mink.skipped.is_empty());
        assert_eq!(mink.monotonicity_violations(), 0);
        assert!(mink.points.iter().all(|p| p.lambda > PI * PI));

        let eucl = trace_branch(1.0, plus(1), &grid).unwrap();
        assert_eq!(eucl.monotonicity_violations(), 0);
        assert!(eucl
            .points
            .iter()
            .all(|p| p.lambda > 8.0 * B * B && p.lambda < PI * PI));
        for p in eucl.points.iter().chain(&mink.points) {
            assert!(p.residual_j.abs() <= 1e-10);
            assert!(p.residual_shoot < 1e-6);
            assert_eq!(p.shoot_zeros, 0);
        }
    }

    #[test]
    fn branch_near_singular_end() {
        let xi = 0.99 / (2.0 * B);
        let br = trace_branch(1.0, plus(1), &[xi]).unwrap();
        let p = br.points[0];
        assert!((p.lambda - 8.0 * B * B).abs() < 0.05, "{p:?}");
        assert!(p.b > 10.0);
    }

    #[test]
    fn branch_records_failures() {
        let br = trace_branch(1.0, plus(1), &[0.1, 0.9]).unwrap();
        assert_eq!(br.points.len(), 1);
        assert_eq!(br.skipped.len(), 1);
        assert!(trace_branch(1.0, plus(1), &[0.2, 0.1]).is_err());
    }

    #[test]
    fn asymptotes() {
        for &(kappa, n) in &[(1.0, 1), (-1.0, 1), (-4.0, 2)] {
            let report = asymptote_check(kappa, n).unwrap();
            assert!(report.passed(), "{report:#?}");
        }
    }
}
