//! GHZ-symmetric states: construction, twirling and the k-separability deltoids.
//!
//! The family is `f⁺|GHZ⁺><GHZ⁺| + f⁻|GHZ⁻><GHZ⁻| + (1 - f⁺ - f⁻) Π/(2^N - 2)` with `Π`
//! the projector onto the complement of the two GHZ states. It is the image of the
//! twirl over qubit permutations, the global spin flip and zero-sum correlated
//! z-rotations (plus diagonal averaging over `Π` for N > 3).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{self, CMatrix, DensityMatrix, PureState};
use crate::sampling::{haar_state, seeded_rng};

/// Slack granted toward "inside" when testing deltoid membership.
pub const DELTOID_SLACK: f64 = 1e-12;

/// Default number of random product states for the coefficient scatter.
pub const DEFAULT_PRODUCT_SAMPLES: usize = 10_000;

const PARAM_SLACK: f64 = 1e-12;

/// A point `(f⁺, f⁻)` of the fidelity triangle for `n_qubits` qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzParams {
    pub n_qubits: usize,
    pub f_plus: f64,
    pub f_minus: f64,
}

impl GhzParams {
    pub fn new(n_qubits: usize, f_plus: f64, f_minus: f64) -> Result<Self> {
        let p = Self { n_qubits, f_plus, f_minus };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 || self.n_qubits > quantum::MAX_QUBITS {
            return Err(Error::InvalidParams(format!(
                "n_qubits must be in 2..={}, got {}",
                quantum::MAX_QUBITS,
                self.n_qubits
            )));
        }
        let (fp, fm) = (self.f_plus, self.f_minus);
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::InvalidParams("fidelities must be finite".into()));
        }
        if fp < -PARAM_SLACK || fm < -PARAM_SLACK || fp + fm > 1.0 + PARAM_SLACK {
            return Err(Error::InvalidParams(format!(
                "(f+, f-) = ({fp}, {fm}) lies outside the triangle f± >= 0, f+ + f- <= 1"
            )));
        }
        Ok(())
    }

    /// The same point with `f⁺` and `f⁻` exchanged.
    pub fn swapped(&self) -> Self {
        Self { f_plus: self.f_minus, f_minus: self.f_plus, ..*self }
    }

    /// Weight `(1 - f⁺ - f⁻)/(2^N - 2)` of each state orthogonal to the GHZ pair.
    pub fn background(&self) -> f64 {
        ((1.0 - self.f_plus - self.f_minus) / ((1usize << self.n_qubits) - 2) as f64).max(0.0)
    }
}

/// Separability class `k`: `k = n` is full separability, `k = 2` biseparability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeparabilityClass {
    k: usize,
}

impl SeparabilityClass {
    /// Class `k` for an `n`-qubit system; requires `2 <= k <= n`.
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < 2 || k > n {
            return Err(Error::InvalidClass { k, n });
        }
        Ok(Self { k })
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn biseparable() -> Self {
        Self { k: 2 }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn check_against(&self, n: usize) -> Result<()> {
        Self::new(self.k, n).map(|_| ())
    }
}

/// Density matrix of the GHZ-symmetric state, built in the computational basis.
pub fn build_state(params: GhzParams) -> Result<DensityMatrix> {
    params.validate()?;
    let dim = 1usize << params.n_qubits;
    let last = dim - 1;
    let (fp, fm) = (params.f_plus.max(0.0), params.f_minus.max(0.0));
    let bg = params.background();
    let mut m = CMatrix::zeros(dim, dim);
    for i in 1..last {
        m[(i, i)] = Complex64::from(bg);
    }
    m[(0, 0)] = Complex64::from((fp + fm) / 2.0);
    m[(last, last)] = m[(0, 0)];
    m[(0, last)] = Complex64::from((fp - fm) / 2.0);
    m[(last, 0)] = m[(0, last)];
    DensityMatrix::new(m)
}

/// `(<GHZ⁺|ρ|GHZ⁺>, <GHZ⁻|ρ|GHZ⁻>)`.
pub fn extract_fidelities(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let dim = rho.dim();
    if quantum::qubit_count(dim).is_none_or(|n| n < 2) {
        return Err(Error::NotQubitDimension(dim));
    }
    let m = rho.matrix();
    let last = dim - 1;
    let diag = (m[(0, 0)].re + m[(last, last)].re) / 2.0;
    let coh = (m[(0, last)].re + m[(last, 0)].re) / 2.0;
    Ok((diag + coh, diag - coh))
}

/// Projects `rho` onto the GHZ-symmetric family, preserving both GHZ fidelities.
pub fn twirl(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let n = rho.n_qubits().ok_or(Error::NotQubitDimension(rho.dim()))?;
    let (fp, fm) = extract_fidelities(rho)?;
    let (fp, fm) = (fp.max(0.0), fm.max(0.0));
    let scale = (fp + fm).max(1.0);
    build_state(GhzParams::new(n, fp / scale, fm / scale)?)
}

/// Right-hand side `[1 + (2^{k-1} - 2) x] / 2^{k-1}` of the k-separability bound.
pub fn deltoid_bound(other: f64, k: usize) -> f64 {
    let m = (1u64 << (k - 1)) as f64;
    (m - 2.0).mul_add(other, 1.0) / m
}

/// How far `(a, b)` lies inside the k-deltoid: positive inside, negative outside.
///
/// For `k = 2` the bound degenerates to the square `max(a, b) <= 1/2`.
pub fn deltoid_margin(a: f64, b: f64, k: usize) -> f64 {
    (deltoid_bound(b, k) - a).min(deltoid_bound(a, k) - b)
}

/// Whether the GHZ-symmetric state is k-separable, i.e. the measure vanishes.
pub fn k_sep_deltoid_contains(params: GhzParams, cls: SeparabilityClass) -> Result<bool> {
    params.validate()?;
    cls.check_against(params.n_qubits)?;
    Ok(deltoid_margin(params.f_plus, params.f_minus, cls.k()) >= -DELTOID_SLACK)
}

/// Whether `(α₁², α₂²)` lies in the convex hull of GHZ overlaps reachable by
/// k-separable pure states.
pub fn product_coefficient_bounds(alpha1_sq: f64, alpha2_sq: f64, k: usize) -> bool {
    k >= 2 && deltoid_margin(alpha1_sq, alpha2_sq, k) >= -DELTOID_SLACK
}

/// `(|<GHZ⁺|φ>|², |<GHZ⁻|φ>|²)`.
pub fn ghz_coefficients(phi: &PureState) -> Result<(f64, f64)> {
    let n = phi
        .n_qubits()
        .filter(|&n| n >= 2)
        .ok_or(Error::NotQubitDimension(phi.dim()))?;
    let plus = quantum::ghz_state(n, true)?;
    let minus = quantum::ghz_state(n, false)?;
    Ok((
        quantum::overlap(phi, &plus)?.norm_sqr(),
        quantum::overlap(phi, &minus)?.norm_sqr(),
    ))
}

/// GHZ coefficients of random states that factor into groups of the given sizes,
/// each group factor Haar-random. All-ones sizes give fully product states.
pub fn sample_grouped_coefficients(
    group_sizes: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if group_sizes.is_empty() || group_sizes.contains(&0) {
        return Err(Error::InvalidParams("group sizes must be positive".into()));
    }
    let mut rng = seeded_rng(seed);
    (0..samples)
        .map(|_| {
            let factors: Vec<PureState> =
                group_sizes.iter().map(|&s| haar_state(1 << s, &mut rng)).collect();
            ghz_coefficients(&quantum::tensor_product(&factors)?)
        })
        .collect()
}

/// Coefficient scatter for fully product states of `n` qubits.
pub fn sample_product_coefficients(n: usize, samples: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    sample_grouped_coefficients(&vec![1; n], samples, seed)
}
