//! Analytical evaluation of the geometric measure `E_G^(k)(f⁺, f⁻)` for GHZ-symmetric states.
//!
//! For `k >= 3` the measure is a one-parameter maximization over the Legendre
//! multiplier `μ ∈ [0, μ_max]`, with `μ_max = 2^{k-3}/(2^{k-2}-1)`:
//!
//! ```text
//! E = max_μ ½[1 + μ(2f⁺ - 1) - √γ + f⁻ μ(μ + √γ)/(μ - μ_max)],   γ = (μ-1)² + 2^{3-k} μ
//! ```
//!
//! The `f⁻` term is `2 f⁻ ν(μ)` where `ν(μ)` is the curve on which the two branches of
//! the Legendre transform coincide. For `k = 3` it is the familiar
//! `f⁻ μ(μ + √α)/(μ - 1)` with `α = 1 - μ + μ²`. For `k = 2` the measure has the closed
//! form `½ - √(f(1-f))` with `f = max(f⁺, f⁻) >= 1/2`.
//!
//! Independent routes to the same numbers: a two-dimensional Legendre reconstruction
//! ([`measure_via_legendre_2d`]) and, for three qubits, the fidelity to the closest
//! separable state on the deltoid border ([`measure_via_fidelity_obs4`]).

use std::fmt;

use crate::error::{Error, Result};
use crate::ghz::{self, GhzParams, SeparabilityClass};
use crate::scalar::{maximize, ScanOptions};

/// Distance kept from the pole of the objective at `μ_max` when `f⁻ > 0`.
pub const POLE_GAP: f64 = 1e-9;

/// Minimum pre-scan resolution accepted by [`measure_via_legendre_2d`].
pub const MIN_LEGENDRE_GRID: usize = 100;

/// Which evaluation route produced a [`MeasureResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Obs1,
    Obs2,
    Obs3,
    Obs4Fidelity,
    Legendre2d,
    ConvexRoof,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Obs1 => "obs1",
            Method::Obs2 => "obs2",
            Method::Obs3 => "obs3",
            Method::Obs4Fidelity => "obs4_fidelity",
            Method::Legendre2d => "legendre_2d",
            Method::ConvexRoof => "convex_roof",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Location of the optimum: `μ`, and `ν` where the route has one.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Optimizer {
    pub mu: Option<f64>,
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    pub optimizer: Optimizer,
    pub method: Method,
}

/// A point `(μ, ν)` at which the Legendre transform is evaluated, for class `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendrePoint {
    pub mu: f64,
    pub nu: f64,
    pub k: usize,
}

/// Branch of the Legendre transform that is active at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegendreRegion {
    /// Optimal product state at the `|+>^k` corner; independent of `ν`.
    PlusCorner,
    /// Optimal product state `|0…0>`.
    ZeroCorner,
    /// `μ < 0` and `ν < 0`: the transform vanishes.
    Negative,
    /// Biseparable transform (`k = 2`, `ν = 0`).
    Biseparable,
}

/// Upper end `2^{k-3}/(2^{k-2}-1)` of the `μ` interval; infinite for `k = 2`.
pub fn mu_max(k: usize) -> f64 {
    if k <= 2 {
        return f64::INFINITY;
    }
    let k = k as i32;
    2f64.powi(k - 3) / (2f64.powi(k - 2) - 1.0)
}

/// `γ = (μ-1)² + 2^{3-k} μ`; equals `α = 1 - μ + μ²` at `k = 3`.
pub fn gamma(mu: f64, k: usize) -> f64 {
    (mu - 1.0).powi(2) + 2f64.powi(3 - k as i32) * mu
}

fn check_k3(k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::Domain(format!("this route needs k >= 3, got k={k}")));
    }
    Ok(())
}

/// Objective of the `μ`-maximization for `k >= 3`, assuming `f⁺ >= f⁻`.
///
/// With `f⁻ = 0` the pole term is dropped, so `μ = μ_max` is admissible.
pub fn objective_obs1(mu: f64, f_plus: f64, f_minus: f64, k: usize) -> Result<f64> {
    check_k3(k)?;
    let top = mu_max(k);
    if !(0.0..=top).contains(&mu) {
        return Err(Error::Domain(format!("μ={mu} outside [0, {top}]")));
    }
    let root = gamma(mu, k).sqrt();
    let base = 0.5 * (1.0 + mu * (2.0 * f_plus - 1.0) - root);
    if f_minus == 0.0 {
        return Ok(base);
    }
    if mu == top {
        return Err(Error::Domain(format!("pole at μ=μ_max={top} with f⁻={f_minus} > 0")));
    }
    Ok(base + 0.5 * f_minus * mu * (mu + root) / (mu - top))
}

/// Boundary `ν(μ) = [μ² + μ√(1-μ+μ²)]/[2(μ-1)]` between the two Legendre branches for `k = 3`.
pub fn nu_boundary(mu: f64) -> Result<f64> {
    nu_boundary_k(mu, 3)
}

/// Boundary `ν(μ) = μ(μ + √γ)/[2(μ - μ_max)]` for class `k >= 3`, `μ ∈ [0, μ_max)`.
pub fn nu_boundary_k(mu: f64, k: usize) -> Result<f64> {
    check_k3(k)?;
    let top = mu_max(k);
    if !(mu >= 0.0 && mu < top) {
        return Err(Error::Domain(format!("ν boundary needs μ in [0, {top}), got {mu}")));
    }
    Ok(mu * (mu + gamma(mu, k).sqrt()) / (2.0 * (mu - top)))
}

/// Transform value at the `|+>^k` corner: `½[μ - 1 + √γ]`.
fn plus_corner(mu: f64, k: usize) -> f64 {
    0.5 * (mu - 1.0 + gamma(mu, k).sqrt())
}

/// Transform value at the `|0…0>` corner: `½[μ + ν - 1 + √(1 + (μ-ν)²)]`.
///
/// Evaluated as `½[2 max(μ,ν) - 1 + 1/(d + √(1+d²))]`, `d = |μ-ν|`, which stays exact
/// when `ν` is far negative.
fn zero_corner(mu: f64, nu: f64) -> f64 {
    let d = (mu - nu).abs();
    0.5 * (2.0 * mu.max(nu) - 1.0 + 1.0 / (d + d.hypot(1.0)))
}

/// Which branch of the transform is active at `point`.
pub fn legendre_region(point: LegendrePoint) -> Result<LegendreRegion> {
    let LegendrePoint { mu, nu, k } = point;
    if !mu.is_finite() || !nu.is_finite() {
        return Err(Error::Domain("Legendre point must be finite".into()));
    }
    if k == 2 {
        if nu != 0.0 {
            return Err(Error::Domain(format!("biseparable transform needs ν = 0, got {nu}")));
        }
        return Ok(LegendreRegion::Biseparable);
    }
    check_k3(k)?;
    if mu < 0.0 && nu < 0.0 {
        return Ok(LegendreRegion::Negative);
    }
    // μ < 0 < ν mirrors μ > 0 > ν
    let (a, b) = if mu < 0.0 { (nu, mu) } else { (mu, nu) };
    if b < 0.0 && a < mu_max(k) && b < nu_boundary_k(a, k)? {
        Ok(LegendreRegion::PlusCorner)
    } else {
        Ok(LegendreRegion::ZeroCorner)
    }
}

/// Legendre transform `Ê(μ W₊ + ν W₋)` of the geometric measure, piecewise by region.
pub fn legendre_transform(point: LegendrePoint) -> Result<f64> {
    let LegendrePoint { mu, nu, k } = point;
    Ok(match legendre_region(point)? {
        LegendreRegion::Negative => 0.0,
        LegendreRegion::Biseparable => 0.5 * (mu - 1.0 + mu.hypot(1.0)),
        LegendreRegion::PlusCorner => plus_corner(if mu < 0.0 { nu } else { mu }, k),
        LegendreRegion::ZeroCorner => zero_corner(mu, nu),
    })
}

fn ordered(params: GhzParams) -> (f64, f64) {
    let (a, b) = (params.f_plus.max(0.0), params.f_minus.max(0.0));
    if a >= b { (a, b) } else { (b, a) }
}

/// `½ - √(f(1-f))` for `f >= 1/2`, zero below.
pub fn biseparable_closed_form(f: f64) -> f64 {
    if f <= 0.5 {
        0.0
    } else {
        (0.5 - (f * (1.0 - f)).max(0.0).sqrt()).clamp(0.0, 1.0)
    }
}

/// Geometric measure of the GHZ-symmetric state with respect to class `cls`.
pub fn eval_measure(params: GhzParams, cls: SeparabilityClass) -> Result<MeasureResult> {
    params.validate()?;
    cls.check_against(params.n_qubits)?;
    let (fp, fm) = ordered(params);
    let k = cls.k();

    if k == 2 {
        let value = biseparable_closed_form(fp);
        let mu = if fp <= 0.5 {
            Some(0.0)
        } else if fp < 1.0 {
            Some((2.0 * fp - 1.0) / (2.0 * (fp * (1.0 - fp)).sqrt()))
        } else {
            None
        };
        return Ok(MeasureResult {
            value,
            optimizer: Optimizer { mu, nu: Some(0.0) },
            method: Method::Obs3,
        });
    }

    let top = mu_max(k);
    let hi = if fm > 0.0 { top - POLE_GAP } else { top };
    let best = maximize(
        |mu| objective_obs1(mu, fp, fm, k).unwrap_or(f64::NEG_INFINITY),
        0.0,
        hi,
        &ScanOptions::default(),
    );
    let nu = nu_boundary_k(best.x, k).ok();
    Ok(MeasureResult {
        value: best.value.clamp(0.0, 1.0),
        optimizer: Optimizer { mu: Some(best.x), nu },
        method: if params.n_qubits == 3 && k == 3 { Method::Obs1 } else { Method::Obs2 },
    })
}

/// `½(1 - √(1 - (2f⁺-1)²))` on the hypotenuse `f⁺ + f⁻ = 1`, `f⁺ ∈ [1/2, 1]`.
pub fn closed_form_hypotenuse(f_plus: f64) -> Result<f64> {
    if !(0.5 - 1e-12..=1.0 + 1e-12).contains(&f_plus) {
        return Err(Error::Domain(format!("hypotenuse formula needs f⁺ in [1/2, 1], got {f_plus}")));
    }
    let s = (2.0 * f_plus - 1.0).clamp(0.0, 1.0);
    Ok(0.5 * (1.0 - (1.0 - s * s).sqrt()))
}

/// Measure on the lower cathetus `f⁻ = 0` (three qubits, full separability).
pub fn closed_form_lower_cathetus(f_plus: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&f_plus) {
        return Err(Error::Domain(format!("f⁺={f_plus} outside [0, 1]")));
    }
    let v = if f_plus < 0.25 {
        0.0
    } else if f_plus <= 0.75 {
        0.25 * (1.0 + 2.0 * f_plus - 2.0 * 3f64.sqrt() * (f_plus * (1.0 - f_plus)).sqrt())
    } else {
        f_plus - 0.5
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Closed-form value when the point lies on an edge where one is known (`k = 3`),
/// or for any biseparable query.
pub fn closed_form_measure(params: GhzParams, cls: SeparabilityClass) -> Result<Option<MeasureResult>> {
    params.validate()?;
    cls.check_against(params.n_qubits)?;
    let (fp, fm) = ordered(params);
    let value = match cls.k() {
        2 => Some(biseparable_closed_form(fp)),
        3 if fm == 0.0 => Some(closed_form_lower_cathetus(fp)?),
        3 if (fp + fm - 1.0).abs() <= 1e-12 => Some(closed_form_hypotenuse(fp)?),
        _ => None,
    };
    Ok(value.map(|value| MeasureResult {
        value,
        optimizer: Optimizer::default(),
        method: Method::ClosedForm,
    }))
}

/// Supremum of `μ f⁺ + ν f⁻ - Ê(μ, ν)` over a `(μ, ν)` region, found by nested
/// pre-scan/golden-section searches with `grid` pre-scan points per axis.
///
/// `ν` is searched through `ν = -sinh(s)`, which reaches both small positive values
/// and the far negative tail where the optimum sits near `μ = μ_max`.
pub fn measure_via_legendre_2d(
    params: GhzParams,
    cls: SeparabilityClass,
    grid: usize,
) -> Result<MeasureResult> {
    params.validate()?;
    cls.check_against(params.n_qubits)?;
    let k = cls.k();
    check_k3(k)?;
    if grid < MIN_LEGENDRE_GRID {
        return Err(Error::Domain(format!(
            "Legendre grid resolution {grid} below {MIN_LEGENDRE_GRID}"
        )));
    }
    let (fp, fm) = ordered(params);
    let inner_opts = ScanOptions { prescan: grid, tol: 1e-12, max_iter: 300 };
    let outer_opts = ScanOptions { prescan: grid, tol: 1e-11, max_iter: 300 };

    let dual = |mu: f64, nu: f64| -> f64 {
        match legendre_transform(LegendrePoint { mu, nu, k }) {
            Ok(t) => mu * fp + nu * fm - t,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let best_nu = |mu: f64| maximize(|s| dual(mu, -s.sinh()), -2.0, 25.0, &inner_opts);

    let outer = maximize(|mu| best_nu(mu).value, 0.0, 3.0, &outer_opts);
    let inner = best_nu(outer.x);
    // μ = ν = 0 is always feasible and gives zero
    let value = outer.value.max(inner.value).max(0.0);
    Ok(MeasureResult {
        value: value.min(1.0),
        optimizer: Optimizer { mu: Some(outer.x), nu: Some(-inner.x.sinh()) },
        method: Method::Legendre2d,
    })
}

/// Three-qubit measure as `1 - max F(ρ, σ)` over separable `σ` on the deltoid border
/// `f⁺ = 1/4 + f⁻/2`, parametrized by `μ = σ`'s GHZ⁻ fidelity in `[0, 1/2]`.
///
/// Only valid for entangled states; separable inputs are rejected.
pub fn measure_via_fidelity_obs4(params: GhzParams) -> Result<MeasureResult> {
    params.validate()?;
    if params.n_qubits != 3 {
        return Err(Error::Domain(format!(
            "fidelity route is for three qubits, got {}",
            params.n_qubits
        )));
    }
    let (fp, fm) = ordered(params);
    if ghz::deltoid_margin(fp, fm, 3) >= -ghz::DELTOID_SLACK {
        return Err(Error::Domain(format!(
            "(f+, f-) = ({fp}, {fm}) is fully separable; the fidelity formula does not apply"
        )));
    }
    let rest = (1.0 - fp - fm).max(0.0);
    let fidelity = |mu: f64| {
        let s = 3f64.sqrt() * rest.sqrt() * (1.0 - 2.0 * mu).max(0.0).sqrt()
            + 2.0 * fm.sqrt() * mu.sqrt()
            + fp.sqrt() * (1.0 + 2.0 * mu).sqrt();
        0.25 * s * s
    };
    let best = maximize(fidelity, 0.0, 0.5, &ScanOptions::default());
    Ok(MeasureResult {
        value: (1.0 - best.value).clamp(0.0, 1.0),
        optimizer: Optimizer { mu: Some(best.x), nu: None },
        method: Method::Obs4Fidelity,
    })
}

/// `2 - 2√(1 - E_G)`.
pub fn bures_from_value(e_g: f64) -> f64 {
    2.0 - 2.0 * (1.0 - e_g).clamp(0.0, 1.0).sqrt()
}

/// `√E_G`.
pub fn groverian_from_value(e_g: f64) -> f64 {
    e_g.max(0.0).sqrt()
}

/// Bures measure of entanglement, via the closest separable state.
pub fn bures_measure(params: GhzParams, cls: SeparabilityClass) -> Result<f64> {
    Ok(bures_from_value(eval_measure(params, cls)?.value))
}

/// Groverian measure of entanglement.
pub fn groverian_measure(params: GhzParams, cls: SeparabilityClass) -> Result<f64> {
    Ok(groverian_from_value(eval_measure(params, cls)?.value))
}
