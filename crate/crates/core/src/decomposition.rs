//! Optimal pure-state ensembles for three-qubit GHZ-symmetric states with `f⁻ = 0`.
//!
//! For `f⁺ ∈ [1/4, 3/4]` the state is a mixture of 28 states: seven phase groups
//! applied to a symmetric state `ψ₁`, each expanded into four σ_z-flipped copies.
//! Every element has the same entanglement as `ψ₁`. Above `3/4` the ensemble at
//! `3/4` is mixed with `|GHZ⁺>`.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ghz::{build_state, GhzParams};
use crate::oracle::{ensemble_average, OracleConfig};
use crate::quantum::{
    density_from_mixture, ghz_state, kron_all, sigma_z, z_rotation, CMatrix,
    Decomposition, DensityMatrix, PureState,
};

/// Residual above which a constructed ensemble is rejected.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
const RANGE_SLACK: f64 = 1e-12;

/// Local phases `(φ₁, φ₂, φ₃)` with `φ₁ + φ₂ + φ₃ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTriple([f64; 3]);

impl PhaseTriple {
    pub fn new(phi1: f64, phi2: f64, phi3: f64) -> Result<Self> {
        let sum = phi1 + phi2 + phi3;
        if sum.abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("phases sum to {sum}, not 0")));
        }
        Ok(Self([phi1, phi2, phi3]))
    }

    pub fn phases(&self) -> [f64; 3] {
        self.0
    }
}

const Q: f64 = FRAC_PI_4;

/// The seven phase groups.
pub const GROUP_PHASES: [[f64; 3]; 7] = [
    [0.0, 0.0, 0.0],
    [Q, Q, -2.0 * Q],
    [-Q, -Q, 2.0 * Q],
    [Q, -2.0 * Q, Q],
    [-Q, 2.0 * Q, -Q],
    [-2.0 * Q, Q, Q],
    [2.0 * Q, -Q, -Q],
];

/// Group weights: minimum-norm solution of the reconstruction system, valid for all
/// `f⁺ ∈ [1/4, 3/4]`.
pub const GROUP_WEIGHTS: [f64; 7] = [0.25, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125];

fn check_range(fp: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(fp >= lo - RANGE_SLACK && fp <= hi + RANGE_SLACK) {
        return Err(Error::Domain(format!("f+ = {fp} outside [{lo}, {hi}]")));
    }
    Ok(fp.clamp(lo, hi))
}

/// `√(f⁺/2)` on `|000>` and `|111>`, `√((1-f⁺)/6)` on the six other basis states.
pub fn build_psi1(fp: f64) -> Result<PureState> {
    let fp = check_range(fp, 0.25, 0.75)?;
    let alpha = (fp / 2.0).sqrt();
    let beta = ((1.0 - fp) / 6.0).sqrt();
    let amps: Vec<f64> = (0..8).map(|i| if i == 0 || i == 7 { alpha } else { beta }).collect();
    PureState::from_real(&amps)
}

/// `(e^{iφ₁σ_z} ⊗ e^{iφ₂σ_z} ⊗ e^{iφ₃σ_z}) ψ₁`.
pub fn build_xi(fp: f64, phases: PhaseTriple) -> Result<PureState> {
    let [a, b, c] = phases.phases();
    build_psi1(fp)?.apply(&kron_all(&[z_rotation(a), z_rotation(b), z_rotation(c)]))
}

/// `ξ`, `(Z⊗Z⊗1)ξ`, `(Z⊗1⊗Z)ξ`, `(1⊗Z⊗Z)ξ`.
pub fn sigma_z_symmetrize(state: &PureState) -> Result<[PureState; 4]> {
    if state.dim() != 8 {
        return Err(Error::DimensionMismatch { expected: 8, actual: state.dim() });
    }
    let (z, id) = (sigma_z(), CMatrix::identity(2, 2));
    let flips = [
        kron_all(&[z.clone(), z.clone(), id.clone()]),
        kron_all(&[z.clone(), id.clone(), z.clone()]),
        kron_all(&[id, z.clone(), z]),
    ];
    Ok([
        state.clone(),
        state.apply(&flips[0])?,
        state.apply(&flips[1])?,
        state.apply(&flips[2])?,
    ])
}

/// Frobenius distance between the mixture and `target`.
pub fn verify_decomposition(dec: &Decomposition, target: &DensityMatrix) -> Result<f64> {
    if dec.dim() != target.dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), actual: dec.dim() });
    }
    density_from_mixture(dec)?.frobenius_distance(target)
}

fn lower_cathetus_target(fp: f64) -> Result<DensityMatrix> {
    build_state(GhzParams::new(3, fp, 0.0)?)
}

fn checked(dec: Decomposition, target: &DensityMatrix) -> Result<Decomposition> {
    let residual = verify_decomposition(&dec, target)?;
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::Verification { residual, tolerance: RECONSTRUCTION_TOL });
    }
    Ok(dec)
}

fn group_elements(fp: f64) -> Result<Vec<(f64, PureState)>> {
    let mut elements = Vec::with_capacity(28);
    for (phases, w) in GROUP_PHASES.iter().zip(GROUP_WEIGHTS) {
        let xi = build_xi(fp, PhaseTriple::new(phases[0], phases[1], phases[2])?)?;
        for psi in sigma_z_symmetrize(&xi)? {
            elements.push((w / 4.0, psi));
        }
    }
    Ok(elements)
}

/// The 28-element ensemble for `f⁺ ∈ [1/4, 3/4]`, `f⁻ = 0`.
pub fn build_optimal_decomposition(fp: f64) -> Result<Decomposition> {
    let fp = check_range(fp, 0.25, 0.75)?;
    checked(Decomposition::new(group_elements(fp)?)?, &lower_cathetus_target(fp)?)
}

/// Ensemble for `f⁺ ∈ [3/4, 1]`, `f⁻ = 0`: weight `p = 4f⁺ - 3` on `|GHZ⁺>` and the rest
/// spread over the ensemble at `3/4`. Zero-weight parts are omitted.
pub fn decomposition_high_fidelity(fp: f64) -> Result<Decomposition> {
    let fp = check_range(fp, 0.75, 1.0)?;
    let p = 4.0 * fp - 3.0;
    let mut elements = Vec::with_capacity(29);
    if p < 1.0 {
        elements.extend(group_elements(0.75)?.into_iter().map(|(w, psi)| (w * (1.0 - p), psi)));
    }
    if p > 0.0 {
        elements.push((p, ghz_state(3, true)?));
    }
    checked(Decomposition::new(elements)?, &lower_cathetus_target(fp)?)
}

/// Dispatches on `f⁺`: the 28-element ensemble up to `3/4`, the GHZ mixture above.
pub fn decomposition_for(fp: f64) -> Result<Decomposition> {
    if fp <= 0.75 {
        build_optimal_decomposition(fp)
    } else {
        decomposition_high_fidelity(fp)
    }
}

/// Ensemble average of the pure-state k-separable measure, from the see-saw oracle.
pub fn average_entanglement(dec: &Decomposition, k: usize, cfg: &OracleConfig) -> Result<f64> {
    ensemble_average(dec, k, cfg)
}

/// Coefficient matrix of the reconstruction system: column `g` holds the real and
/// imaginary parts of the group-`g` mixture.
pub fn group_system(fp: f64) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let fp = check_range(fp, 0.25, 0.75)?;
    let mut cols = Vec::with_capacity(7);
    for phases in GROUP_PHASES {
        let xi = build_xi(fp, PhaseTriple::new(phases[0], phases[1], phases[2])?)?;
        let mut m = CMatrix::zeros(8, 8);
        for psi in sigma_z_symmetrize(&xi)? {
            m += psi.projector() * Complex64::from(0.25);
        }
        cols.push(flatten(&m));
    }
    let a = DMatrix::from_columns(&cols);
    let b = flatten(lower_cathetus_target(fp)?.matrix());
    Ok((a, b))
}

fn flatten(m: &CMatrix) -> DVector<f64> {
    let entries: Vec<f64> = m.iter().map(|c| c.re).chain(m.iter().map(|c| c.im)).collect();
    DVector::from_vec(entries)
}
