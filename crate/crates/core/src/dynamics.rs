//! Exact unitary evolution by spectral decomposition, and survival
//! probabilities of states started on a subgraph.
//!
//! `psi(t) = sum_n exp(-i e_n t) <g_n|psi0> g_n` with `hbar = 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // float methods come from libm without std
use num_traits::Float;

use crate::linalg::{self, LinalgError, Matrix, SymmetricEigen};
use crate::Complex64;

/// Allowed deviation of the initial norm from one.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Fewest in-horizon samples [`classify_decay`] will work with.
pub const MIN_CLASSIFY_SAMPLES: usize = 50;
/// A series whose minimum stays above `1 - UNITARY_TOLERANCE` is unitary.
pub const UNITARY_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub enum DynamicsError {
    Linalg(LinalgError),
    NotNormalized { norm: f64 },
    DimensionMismatch { expected: usize, found: usize },
    SiteOutOfRange { site: usize, site_count: usize },
    InsufficientSamples { found: usize, needed: usize },
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::Linalg(e) => write!(f, "{e}"),
            DynamicsError::NotNormalized { norm } => {
                write!(f, "initial state has norm {norm}, expected 1")
            }
            DynamicsError::DimensionMismatch { expected, found } => {
                write!(f, "state has {found} entries, Hamiltonian has dimension {expected}")
            }
            DynamicsError::SiteOutOfRange { site, site_count } => {
                write!(f, "site {site} out of range for {site_count} sites")
            }
            DynamicsError::InsufficientSamples { found, needed } => {
                write!(f, "only {found} samples inside the reflection-free window, need {needed}")
            }
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<LinalgError> for DynamicsError {
    fn from(e: LinalgError) -> Self {
        DynamicsError::Linalg(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub time: f64,
    pub amplitudes: Vec<Complex64>,
}

impl WaveState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<psi|H|psi>`.
    pub fn energy(&self, h: &Matrix) -> f64 {
        let hpsi = h.mul_vec_complex(&self.amplitudes);
        self.amplitudes.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Probability of finding the particle on `sites`.
    pub fn probability_on(&self, sites: &[usize]) -> f64 {
        sites.iter().map(|&s| self.amplitudes[s].norm_sqr()).sum()
    }
}

/// Lifts a real vector to complex amplitudes.
pub fn complex_state(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

/// `samples` equally spaced times on `[0, t_max]`, both ends included.
pub fn time_grid(t_max: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..samples).map(|i| t_max * i as f64 / (samples - 1) as f64).collect(),
    }
}

/// Time evolution under a fixed Hamiltonian. Diagonalizes once.
#[derive(Clone, Debug)]
pub struct Propagator {
    eig: SymmetricEigen,
}

impl Propagator {
    pub fn new(h: &Matrix) -> Result<Self, DynamicsError> {
        Ok(Propagator { eig: linalg::eigh(h)? })
    }

    pub fn with_size_cap(h: &Matrix, cap: usize) -> Result<Self, DynamicsError> {
        Ok(Propagator {
            eig: linalg::eigh_with_cap(h, cap)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    pub fn energies(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn eigen(&self) -> &SymmetricEigen {
        &self.eig
    }

    /// Expansion coefficients `<g_n|psi0>`; checks size and norm.
    pub fn coefficients(&self, psi0: &[Complex64]) -> Result<Vec<Complex64>, DynamicsError> {
        let n = self.dim();
        if psi0.len() != n {
            return Err(DynamicsError::DimensionMismatch {
                expected: n,
                found: psi0.len(),
            });
        }
        let norm = psi0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(DynamicsError::NotNormalized { norm });
        }
        Ok(self
            .eig
            .vectors()
            .map(|g| g.iter().zip(psi0).map(|(&gi, &p)| p * gi).sum())
            .collect())
    }

    pub fn evolve(&self, psi0: &[Complex64], times: &[f64]) -> Result<Vec<WaveState>, DynamicsError> {
        let coeffs = self.coefficients(psi0)?;
        let n = self.dim();
        Ok(times
            .iter()
            .map(|&t| {
                let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
                for (idx, (g, c)) in self.eig.vectors().zip(&coeffs).enumerate() {
                    let w = c * Complex64::from_polar(1.0, -self.eig.values[idx] * t);
                    for (a, &gi) in amplitudes.iter_mut().zip(g) {
                        *a += w * gi;
                    }
                }
                WaveState { time: t, amplitudes }
            })
            .collect())
    }

    /// Probability on `sites` at each time. Only the amplitudes on `sites`
    /// are reconstructed.
    pub fn survival(&self, psi0: &[Complex64], sites: &[usize], times: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        let n = self.dim();
        if let Some(&site) = sites.iter().find(|&&s| s >= n) {
            return Err(DynamicsError::SiteOutOfRange { site, site_count: n });
        }
        let coeffs = self.coefficients(psi0)?;
        // restricted[s * n + k] = g_k(sites[s])
        let mut restricted = vec![0.0; sites.len() * n];
        for (k, g) in self.eig.vectors().enumerate() {
            for (s, &site) in sites.iter().enumerate() {
                restricted[s * n + k] = g[site];
            }
        }
        let mut phased = vec![Complex64::new(0.0, 0.0); n];
        Ok(times
            .iter()
            .map(|&t| {
                for (k, p) in phased.iter_mut().enumerate() {
                    *p = coeffs[k] * Complex64::from_polar(1.0, -self.eig.values[k] * t);
                }
                restricted
                    .chunks_exact(n)
                    .map(|row| {
                        let a: Complex64 = row.iter().zip(&phased).map(|(&g, &p)| p * g).sum();
                        a.norm_sqr()
                    })
                    .sum()
            })
            .collect())
    }
}

/// One-shot evolution; use [`Propagator`] to reuse the diagonalization.
pub fn evolve(h: &Matrix, psi0: &[Complex64], times: &[f64]) -> Result<Vec<WaveState>, DynamicsError> {
    Propagator::new(h)?.evolve(psi0, times)
}

/// Time for the fastest lead component (group velocity `2 kappa`) to
/// cover `m` sites, less a 10% margin. Survival samples up to here are free
/// of wall reflections.
pub fn safe_horizon(m: usize, kappa: f64) -> f64 {
    0.9 * m as f64 / (2.0 * kappa)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalSeries {
    /// Caller's tag, usually the initial mode index.
    pub label: usize,
    pub times: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// Samples after this time may contain wall reflections.
    pub safe_horizon: f64,
}

impl SurvivalSeries {
    pub fn from_states(label: usize, states: &[WaveState], sites: &[usize], safe_horizon: f64) -> Self {
        SurvivalSeries {
            label,
            times: states.iter().map(|s| s.time).collect(),
            probabilities: states.iter().map(|s| s.probability_on(sites)).collect(),
            safe_horizon,
        }
    }

    /// `(time, probability)` pairs no later than the horizon.
    fn trusted(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let horizon = self.safe_horizon * (1.0 + 1e-12);
        self.times
            .iter()
            .copied()
            .zip(self.probabilities.iter().copied())
            .filter(move |&(t, _)| t <= horizon)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayClass {
    /// Stays at one: a trapped mode.
    Unitary,
    /// Leaks out gradually with no early drop.
    SlowDamping,
    /// Falls quickly and settles near a nonzero value.
    DropToPlateau,
}

impl DecayClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecayClass::Unitary => "unitary",
            DecayClass::SlowDamping => "slow_damping",
            DecayClass::DropToPlateau => "drop_to_plateau",
        }
    }
}

impl fmt::Display for DecayClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Classifies a survival curve using only samples inside its horizon.
///
/// Unitary: minimum above `1 - 1e-4`. Drop to plateau: below 0.9 within
/// the first quarter of the window, and the last quarter has variance
/// below `1e-3` around a positive mean. Anything else is slow damping.
pub fn classify_decay(series: &SurvivalSeries) -> Result<DecayClass, DynamicsError> {
    let pts: Vec<(f64, f64)> = series.trusted().collect();
    if pts.len() < MIN_CLASSIFY_SAMPLES {
        return Err(DynamicsError::InsufficientSamples {
            found: pts.len(),
            needed: MIN_CLASSIFY_SAMPLES,
        });
    }
    let t0 = pts[0].0;
    let window = pts[pts.len() - 1].0 - t0;
    let min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    if min > 1.0 - UNITARY_TOLERANCE {
        return Ok(DecayClass::Unitary);
    }
    let early_drop = pts.iter().any(|&(t, p)| t - t0 <= 0.25 * window && p < 0.9);
    let tail: Vec<f64> = pts.iter().filter(|&&(t, _)| t - t0 >= 0.75 * window).map(|p| p.1).collect();
    let (mean, var) = mean_var(&tail);
    if early_drop && var < 1e-3 && mean > 0.0 {
        Ok(DecayClass::DropToPlateau)
    } else {
        Ok(DecayClass::SlowDamping)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlateauEstimate {
    /// Mean over the last quarter of the trusted window.
    pub window_mean: f64,
    /// Long-time limit assuming the running average approaches it as `1/t`.
    pub extrapolated: f64,
}

fn last_quarter_mean(pts: &[(f64, f64)], t0: f64, w: f64) -> f64 {
    let tail: Vec<f64> = pts
        .iter()
        .filter(|&&(t, _)| t - t0 >= 0.75 * w && t - t0 <= w * (1.0 + 1e-12))
        .map(|p| p.1)
        .collect();
    mean_var(&tail).0
}

/// Long-time value of a survival curve.
///
/// The excess over the limit decays like `1/t`, so the last-quarter mean
/// `Pbar(W)` over `[3W/4, W]` does too. Combining windows `W` and
/// `W' = 2W/3` cancels that term: `(W Pbar(W) - W' Pbar(W')) / (W - W')`.
pub fn plateau_estimate(series: &SurvivalSeries) -> Result<PlateauEstimate, DynamicsError> {
    let pts: Vec<(f64, f64)> = series.trusted().collect();
    if pts.len() < MIN_CLASSIFY_SAMPLES {
        return Err(DynamicsError::InsufficientSamples {
            found: pts.len(),
            needed: MIN_CLASSIFY_SAMPLES,
        });
    }
    let t0 = pts[0].0;
    let w = pts[pts.len() - 1].0 - t0;
    let w_short = 2.0 * w / 3.0;
    let window_mean = last_quarter_mean(&pts, t0, w);
    let short_mean = last_quarter_mean(&pts, t0, w_short);
    let extrapolated = if w > 0.0 {
        (w * window_mean - w_short * short_mean) / (w - w_short)
    } else {
        window_mean
    };
    Ok(PlateauEstimate {
        window_mean,
        extrapolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::LatticeGraph;
    use crate::pi_lattice::{build_pi_lattice, central_modes, embed_central, PiLatticeSpec, CENTRAL};

    fn chain(n: usize) -> Matrix {
        let hops: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        LatticeGraph::from_hoppings(n, &hops).unwrap().hamiltonian()
    }

    #[test]
    fn dimer_rabi_oscillation() {
        let h = chain(2);
        let psi0 = complex_state(&[1.0, 0.0]);
        let times = time_grid(3.0, 31);
        let states = evolve(&h, &psi0, &times).unwrap();
        for s in &states {
            assert!((s.amplitudes[0].norm_sqr() - s.time.cos().powi(2)).abs() < 1e-12);
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenstate_only_picks_up_phase() {
        let h = chain(5);
        let modes = crate::spectra::eigenmodes(&h).unwrap();
        let psi0 = complex_state(&modes[1].amplitudes);
        let states = evolve(&h, &psi0, &[0.0, 1.3, 7.0]).unwrap();
        for s in &states {
            for (a, b) in s.amplitudes.iter().zip(&psi0) {
                let expect = b * Complex64::from_polar(1.0, -modes[1].energy * s.time);
                assert!((a - expect).norm() < 1e-12);
            }
            assert!((s.energy(&h) - modes[1].energy).abs() < 1e-12);
        }
    }

    #[test]
    fn survival_fast_path_matches_full_evolution() {
        let h = chain(9);
        let mut v = vec![0.0; 9];
        v[2] = 0.6;
        v[3] = 0.8;
        let psi0 = complex_state(&v);
        let times = time_grid(5.0, 11);
        let prop = Propagator::new(&h).unwrap();
        let fast = prop.survival(&psi0, &[1, 2, 3, 4], &times).unwrap();
        let full = prop.evolve(&psi0, &times).unwrap();
        for (p, s) in fast.iter().zip(&full) {
            assert!((p - s.probability_on(&[1, 2, 3, 4])).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unnormalized_and_mismatched_states() {
        let prop = Propagator::new(&chain(3)).unwrap();
        let bad = complex_state(&[1.0, 1.0, 0.0]);
        assert!(matches!(prop.evolve(&bad, &[0.0]), Err(DynamicsError::NotNormalized { .. })));
        let short = complex_state(&[1.0]);
        assert!(matches!(
            prop.evolve(&short, &[0.0]),
            Err(DynamicsError::DimensionMismatch { expected: 3, found: 1 })
        ));
        let ok = complex_state(&[1.0, 0.0, 0.0]);
        assert!(matches!(
            prop.survival(&ok, &[5], &[0.0]),
            Err(DynamicsError::SiteOutOfRange { site: 5, .. })
        ));
    }

    #[test]
    fn size_cap_is_enforced() {
        let r = Propagator::with_size_cap(&chain(10), 4);
        assert!(matches!(r, Err(DynamicsError::Linalg(LinalgError::SizeCapExceeded { .. }))));
    }

    #[test]
    fn horizon_and_grid() {
        assert!((safe_horizon(400, 1.0) - 180.0).abs() < 1e-12);
        let g = time_grid(180.0, 720);
        assert_eq!(g.len(), 720);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[719], 180.0);
        assert_eq!(time_grid(1.0, 1), vec![0.0]);
    }

    #[test]
    fn classification_of_synthetic_curves() {
        let times = time_grid(100.0, 200);
        let mk = |f: &dyn Fn(f64) -> f64| SurvivalSeries {
            label: 0,
            probabilities: times.iter().map(|&t| f(t)).collect(),
            times: times.clone(),
            safe_horizon: 100.0,
        };
        assert_eq!(classify_decay(&mk(&|_| 1.0)).unwrap(), DecayClass::Unitary);
        assert_eq!(
            classify_decay(&mk(&|t| 0.5 + 0.5 * (-t).exp())).unwrap(),
            DecayClass::DropToPlateau
        );
        assert_eq!(
            classify_decay(&mk(&|t| (-t / 1000.0).exp())).unwrap(),
            DecayClass::SlowDamping
        );
        let short = SurvivalSeries {
            safe_horizon: 10.0,
            ..mk(&|_| 1.0)
        };
        assert!(matches!(
            classify_decay(&short),
            Err(DynamicsError::InsufficientSamples { found: 20, .. })
        ));
    }

    #[test]
    fn plateau_extrapolation_removes_inverse_time_tail() {
        let times = time_grid(150.0, 3001);
        let series = SurvivalSeries {
            label: 0,
            probabilities: times.iter().map(|&t| 0.3 + 0.9 / (5.0 + t) + 0.05 * (3.0 * t).cos() / (1.0 + t)).collect(),
            times,
            safe_horizon: 150.0,
        };
        let est = plateau_estimate(&series).unwrap();
        assert!((est.extrapolated - 0.3).abs() < 1e-3, "{est:?}");
        assert!((est.extrapolated - 0.3).abs() < 0.1 * (est.window_mean - 0.3));
        assert!(est.window_mean > 0.3);
    }

    #[test]
    fn trapped_mode_stays_put_in_pi_lattice() {
        let spec = PiLatticeSpec::uniform(2, 4, 60);
        let (graph, part, sites) = build_pi_lattice(&spec).unwrap();
        let modes = central_modes(&spec).unwrap();
        // n = 3 of the 8-site central chain has nodes on both joints.
        let psi0 = complex_state(&embed_central(&sites, &modes[2].amplitudes));
        let times = time_grid(safe_horizon(60, 1.0), 100);
        let p = Propagator::new(&graph.hamiltonian())
            .unwrap()
            .survival(&psi0, &part.sites(CENTRAL), &times)
            .unwrap();
        assert!(p.iter().all(|&x| (x - 1.0).abs() < 1e-10));
    }
}
