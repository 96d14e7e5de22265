//! Brute-force verifiers for the analytical formulas.
//!
//! * [`pure_state_measure`] computes `1 - max |<φ|ψ>|²` over k-separable `φ` by running
//!   a see-saw for every partition of the qubits into `k` groups.
//! * [`convex_roof_upper_bound`] searches decompositions of a mixed state and returns
//!   the smallest ensemble average it finds, an upper bound on the convex roof.
//! * [`obs3_derivation_check`] maximizes the biseparable Legendre dual numerically.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::{hermitize, CMatrix, CVector, Decomposition, DensityMatrix, PureState};
use crate::sampling::{haar_state, haar_unitary, seeded_rng};
use crate::scalar::{maximize, ScanOptions};

/// Largest register for partition enumeration.
pub const MAX_PARTITION_QUBITS: usize = 8;
/// Largest register the pure-state oracle accepts.
pub const MAX_ORACLE_QUBITS: usize = 6;
/// Largest ensemble searched by [`convex_roof_upper_bound`].
pub const MAX_ENSEMBLE: usize = 64;

/// Eigenvalues below this are dropped from the canonical ensemble.
const RANK_CUTOFF: f64 = 1e-13;
/// Relative slack when checking that see-saw overlaps never decrease.
const MONOTONE_SLACK: f64 = 1e-13;

/// Disjoint qubit groups (0-based indices, each group sorted) covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    groups: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut groups: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = groups.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for g in &mut groups {
            if g.is_empty() {
                return Err(Error::InvalidParams("empty group in partition".into()));
            }
            g.sort_unstable();
            for &q in g.iter() {
                if q >= n || seen[q] {
                    return Err(Error::InvalidParams(format!(
                        "groups {groups:?} do not partition 0..{n}"
                    )));
                }
                seen[q] = true;
            }
        }
        groups.sort();
        Ok(Self { groups })
    }

    /// All qubits in separate groups.
    pub fn singletons(n: usize) -> Self {
        Self { groups: (0..n).map(|q| vec![q]).collect() }
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }
}

impl fmt::Display for Partition {
    /// 1-based, e.g. `{1}{2,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.groups {
            let names: Vec<String> = g.iter().map(|q| (q + 1).to_string()).collect();
            write!(f, "{{{}}}", names.join(","))?;
        }
        Ok(())
    }
}

/// Search parameters for the see-saw and the ensemble search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { restarts: 50, max_iterations: 500, tolerance: 1e-12, seed: 0 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParams("restarts must be >= 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParams("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// All partitions of `n` qubits into exactly `k` nonempty unlabeled groups,
/// enumerated as restricted growth strings.
pub fn set_partitions(n: usize, k: usize) -> Result<Vec<Partition>> {
    if k == 0 || k > n || n > MAX_PARTITION_QUBITS {
        return Err(Error::InvalidParams(format!(
            "set partitions need 1 <= k <= n <= {MAX_PARTITION_QUBITS}, got n={n}, k={k}"
        )));
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn grow(i: usize, used: usize, k: usize, labels: &mut [usize], out: &mut Vec<Partition>) {
        let n = labels.len();
        // remaining slots must be able to open the missing groups
        if k - used > n - i {
            return;
        }
        if i == n {
            let mut groups = vec![Vec::new(); k];
            for (q, &l) in labels.iter().enumerate() {
                groups[l].push(q);
            }
            out.push(Partition { groups });
            return;
        }
        for l in 0..=used.min(k - 1) {
            labels[i] = l;
            grow(i + 1, used.max(l + 1), k, labels, out);
        }
    }
    grow(0, 0, k, &mut labels, &mut out);
    Ok(out)
}

/// Result of a see-saw search over one partition.
#[derive(Debug, Clone)]
pub struct SeesawOutcome {
    pub overlap_sq: f64,
    pub state: PureState,
    /// Overlap² after each sweep of the best restart.
    pub history: Vec<f64>,
    /// Whether every restart produced a non-decreasing overlap sequence.
    pub monotone: bool,
    /// Whether at least one restart met the tolerance.
    pub converged: bool,
}

/// Per-group index maps for contracting a state against grouped factors.
struct GroupLayout {
    /// `local[g][i]`: index of basis state `i` inside group `g`.
    local: Vec<Vec<usize>>,
    sizes: Vec<usize>,
}

impl GroupLayout {
    fn new(partition: &Partition) -> Self {
        let n = partition.n_qubits();
        let dim = 1usize << n;
        let local = partition
            .groups()
            .iter()
            .map(|g| {
                (0..dim)
                    .map(|i| {
                        g.iter().fold(0usize, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1))
                    })
                    .collect()
            })
            .collect();
        let sizes = partition.groups().iter().map(|g| 1usize << g.len()).collect();
        Self { local, sizes }
    }

    /// Contraction of `psi` with the conjugates of all factors except `skip`.
    fn contract(&self, psi: &CVector, factors: &[CVector], skip: usize) -> CVector {
        let mut v = CVector::zeros(self.sizes[skip]);
        for (i, amp) in psi.iter().enumerate() {
            if *amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut c = *amp;
            for (g, f) in factors.iter().enumerate() {
                if g != skip {
                    c *= f[self.local[g][i]].conj();
                }
            }
            v[self.local[skip][i]] += c;
        }
        v
    }

    fn assemble(&self, factors: &[CVector]) -> CVector {
        let dim = self.local[0].len();
        CVector::from_fn(dim, |i, _| {
            factors
                .iter()
                .enumerate()
                .fold(Complex64::new(1.0, 0.0), |acc, (g, f)| acc * f[self.local[g][i]])
        })
    }
}

struct Run {
    overlap_sq: f64,
    factors: Vec<CVector>,
    history: Vec<f64>,
    monotone: bool,
    converged: bool,
}

fn seesaw_run(
    psi: &CVector,
    layout: &GroupLayout,
    cfg: &OracleConfig,
    rng: &mut impl Rng,
) -> Run {
    let mut factors: Vec<CVector> = layout
        .sizes
        .iter()
        .map(|&d| haar_state(d, rng).into_amplitudes())
        .collect();
    let mut history: Vec<f64> = Vec::new();
    let mut monotone = true;
    let mut converged = false;
    let mut prev = 0.0;
    for _ in 0..cfg.max_iterations {
        let mut current = prev;
        for g in 0..factors.len() {
            let v = layout.contract(psi, &factors, g);
            let norm = v.norm();
            current = norm * norm;
            if norm > 0.0 {
                factors[g] = v / Complex64::from(norm);
            } else {
                // factor orthogonal to ψ: any direction is as good as another
                factors[g] = haar_state(layout.sizes[g], rng).into_amplitudes();
            }
        }
        if let Some(&last) = history.last() {
            if current < last - MONOTONE_SLACK * last.max(1.0) {
                monotone = false;
            }
        }
        history.push(current);
        if current - prev < cfg.tolerance && !history.is_empty() && history.len() > 1 {
            converged = true;
            break;
        }
        prev = current;
    }
    let overlap_sq = history.last().copied().unwrap_or(0.0);
    Run { overlap_sq, factors, history, monotone, converged }
}

fn check_partition(psi: &PureState, partition: &Partition) -> Result<usize> {
    let n = psi
        .n_qubits()
        .ok_or(Error::NotQubitDimension(psi.dim()))?;
    if partition.n_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: partition.n_qubits() });
    }
    Ok(n)
}

/// See-saw search for the product state (with respect to `partition`) closest to `psi`,
/// keeping every restart's overlap history.
pub fn seesaw(psi: &PureState, partition: &Partition, cfg: &OracleConfig) -> Result<SeesawOutcome> {
    cfg.validate()?;
    check_partition(psi, partition)?;
    let layout = GroupLayout::new(partition);
    let mut rng = seeded_rng(cfg.seed);
    let mut best: Option<Run> = None;
    let mut monotone = true;
    let mut converged = false;
    for _ in 0..cfg.restarts {
        let run = seesaw_run(psi.amplitudes(), &layout, cfg, &mut rng);
        monotone &= run.monotone;
        converged |= run.converged;
        if best.as_ref().is_none_or(|b| run.overlap_sq > b.overlap_sq) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    Ok(SeesawOutcome {
        overlap_sq: best.overlap_sq.min(1.0),
        state: PureState::normalized(layout.assemble(&best.factors))?,
        history: best.history,
        monotone,
        converged,
    })
}

/// Maximal overlap² of `psi` with states that are product across `partition`, and the
/// maximizing state. Fails with [`Error::NotConverged`] if no restart met the tolerance.
pub fn closest_grouped_product_state(
    psi: &PureState,
    partition: &Partition,
    cfg: &OracleConfig,
) -> Result<(f64, PureState)> {
    let out = seesaw(psi, partition, cfg)?;
    if !out.converged {
        return Err(Error::NotConverged { iterations: cfg.max_iterations, best: out.overlap_sq });
    }
    Ok((out.overlap_sq, out.state))
}

/// `1 - max overlap²` over all k-separable pure states, maximizing over every
/// partition into `k` groups. Partition `j` uses seed `cfg.seed + j`.
pub fn pure_state_measure(psi: &PureState, k: usize, cfg: &OracleConfig) -> Result<f64> {
    pure_measure(psi, k, cfg, true)
}

/// With `strict = false`, unconverged see-saw runs still contribute their best
/// overlap, which keeps the result a valid upper bound.
fn pure_measure(psi: &PureState, k: usize, cfg: &OracleConfig, strict: bool) -> Result<f64> {
    cfg.validate()?;
    let n = psi.n_qubits().ok_or(Error::NotQubitDimension(psi.dim()))?;
    if n > MAX_ORACLE_QUBITS || k > n || k < 1 {
        return Err(Error::InvalidClass { k, n });
    }
    let partitions = set_partitions(n, k)?;
    let overlaps: Result<Vec<f64>> = partitions
        .par_iter()
        .enumerate()
        .map(|(j, part)| {
            let cfg = cfg.with_seed(cfg.seed.wrapping_add(j as u64));
            if strict {
                closest_grouped_product_state(psi, part, &cfg).map(|(o, _)| o)
            } else {
                seesaw(psi, part, &cfg).map(|out| out.overlap_sq)
            }
        })
        .collect();
    let best = overlaps?.into_iter().fold(0.0, f64::max);
    Ok((1.0 - best).clamp(0.0, 1.0))
}

/// `Σ p_i E(ψ_i)` with each term from [`pure_state_measure`]; element `i` uses seed
/// `cfg.seed + (i << 16)`.
pub fn ensemble_average(dec: &Decomposition, k: usize, cfg: &OracleConfig) -> Result<f64> {
    weighted_average(dec, k, cfg, true)
}

fn weighted_average(dec: &Decomposition, k: usize, cfg: &OracleConfig, strict: bool) -> Result<f64> {
    let terms: Result<Vec<f64>> = dec
        .elements()
        .par_iter()
        .enumerate()
        .map(|(i, (w, psi))| {
            if *w == 0.0 {
                return Ok(0.0);
            }
            let cfg = cfg.with_seed(cfg.seed.wrapping_add((i as u64) << 16));
            pure_measure(psi, k, &cfg, strict).map(|e| w * e)
        })
        .collect();
    Ok(terms?.into_iter().sum())
}

/// Canonical ensemble `√λ_j |e_j>` of `rho` (unnormalized columns).
fn canonical_ensemble(rho: &DensityMatrix) -> CMatrix {
    let eig = hermitize(rho.matrix()).symmetric_eigen();
    let cols: Vec<CVector> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .filter(|(l, _)| **l > RANK_CUTOFF)
        .map(|(l, v)| v.into_owned() * Complex64::from(l.sqrt()))
        .collect();
    CMatrix::from_columns(&cols)
}

/// Ensemble obtained from the canonical one by the isometry `iso` (`m × r`).
fn ensemble_from_isometry(canonical: &CMatrix, iso: &CMatrix) -> Result<Decomposition> {
    let vectors = canonical * iso.transpose();
    let mut elements = Vec::with_capacity(vectors.ncols());
    let mut total = 0.0;
    for col in vectors.column_iter() {
        let w = col.norm_squared();
        if w > 1e-16 {
            elements.push((w, PureState::normalized(col.into_owned())?));
            total += w;
        }
    }
    for (w, _) in &mut elements {
        *w /= total;
    }
    Decomposition::new(elements)
}

/// Small random unitary `exp(iεH)` via its Cayley transform.
fn near_identity(dim: usize, eps: f64, rng: &mut impl Rng) -> CMatrix {
    let g = haar_unitary(dim, rng);
    let h = hermitize(&(&g + g.adjoint())) * Complex64::new(0.0, eps * 0.5);
    let id = CMatrix::identity(dim, dim);
    let inv = (&id - &h).try_inverse().unwrap_or_else(|| id.clone());
    inv * (&id + &h)
}

/// Upper bound on the convex roof `E_G^(k)(rho)` from random ensembles.
///
/// Candidates are the eigen-ensemble, `cfg.restarts` Haar-random isometries of size
/// `ensemble_size`, then `cfg.restarts` local perturbations of the best isometry.
pub fn convex_roof_upper_bound(
    rho: &DensityMatrix,
    k: usize,
    ensemble_size: usize,
    cfg: &OracleConfig,
) -> Result<f64> {
    convex_roof_upper_bound_with(rho, k, ensemble_size, cfg, &[])
}

/// As [`convex_roof_upper_bound`], additionally scoring the given decompositions of
/// `rho` (each must reconstruct it to 1e-10).
pub fn convex_roof_upper_bound_with(
    rho: &DensityMatrix,
    k: usize,
    ensemble_size: usize,
    cfg: &OracleConfig,
    warm_starts: &[Decomposition],
) -> Result<f64> {
    cfg.validate()?;
    let canonical = canonical_ensemble(rho);
    let rank = canonical.ncols();
    if rank == 0 || rank > ensemble_size || ensemble_size > MAX_ENSEMBLE {
        return Err(Error::InvalidParams(format!(
            "need rank ({rank}) <= ensemble size ({ensemble_size}) <= {MAX_ENSEMBLE}"
        )));
    }
    let inner = OracleConfig { restarts: cfg.restarts.clamp(1, 8), ..*cfg };

    let mut best = f64::INFINITY;
    for (i, dec) in warm_starts.iter().enumerate() {
        let residual = (crate::quantum::density_from_mixture(dec)?.matrix() - rho.matrix()).norm();
        if residual > 1e-10 {
            return Err(Error::Verification { residual, tolerance: 1e-10 });
        }
        best = best.min(weighted_average(dec, k, &inner.with_seed(cfg.seed ^ (i as u64 + 1)), false)?);
    }

    let eye = CMatrix::identity(rank, rank);
    best = best.min(weighted_average(&ensemble_from_isometry(&canonical, &eye)?, k, &inner, false)?);

    let isometry = |seed: u64| -> CMatrix {
        let u = haar_unitary(ensemble_size, &mut seeded_rng(seed));
        u.columns(0, rank).into_owned()
    };
    let scored: Result<Vec<(f64, u64)>> = (0..cfg.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.seed.wrapping_add(r + 1);
            let dec = ensemble_from_isometry(&canonical, &isometry(seed))?;
            Ok((weighted_average(&dec, k, &inner.with_seed(seed), false)?, seed))
        })
        .collect();
    let (random_best, best_seed) = scored?
        .into_iter()
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
    best = best.min(random_best);

    // local refinement around the best random isometry
    let mut iso = isometry(best_seed);
    let mut current = random_best;
    let mut rng = seeded_rng(cfg.seed ^ 0x5eed);
    let mut eps = 0.3;
    for step in 0..cfg.restarts {
        let trial = near_identity(ensemble_size, eps, &mut rng) * &iso;
        let dec = ensemble_from_isometry(&canonical, &trial)?;
        let value = weighted_average(&dec, k, &inner.with_seed(cfg.seed.wrapping_add(step as u64) ^ 0xa5a5), false)?;
        if value < current {
            current = value;
            iso = trial;
        } else {
            eps = (eps * 0.9).max(1e-3);
        }
    }
    Ok(best.min(current).clamp(0.0, 1.0))
}

/// Numerical maximization of `μ f - ½[μ - 1 + √(1 + μ²)]` over `μ ∈ [0, 10⁶]`.
///
/// For `f = 1` the supremum is only reached as `μ → ∞`; its limit `1/2` is added as
/// a candidate.
pub fn obs3_derivation_check(f: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&f) {
        return Err(Error::Domain(format!("f must lie in [1/2, 1], got {f}")));
    }
    let dual = |mu: f64| mu * f - 0.5 * (mu - 1.0 + mu.hypot(1.0));
    let upper = (1e6f64 + 1.0).ln();
    let best = maximize(|t: f64| dual(t.exp() - 1.0), 0.0, upper, &ScanOptions::default());
    let limit = if f == 1.0 { 0.5 } else { f64::NEG_INFINITY };
    Ok(best.value.max(limit))
}
