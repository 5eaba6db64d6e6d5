//! Exact bound states of the pi-lattice from a piecewise plane-wave ansatz.
//!
//! Along chain `c` the trial state is
//!
//! ```text
//! psi_c(j) = C1 e^{-ik(j-1)}                  j <= 1
//! psi_c(j) = C2 e^{ik(j-1)} + C3 e^{-ik(j-1)}   1 <= j <= L
//! psi_c(j) = C4 e^{ik(j-L)}                   j >= L
//! ```
//!
//! and on the side chains `psi_a(j) = A1 e^{iqj} + A2 e^{-iqj}` for
//! `0 <= j <= N0 + 1`, with `psi_a(0) = psi_c(1)` and a hard wall at
//! `psi_a(N0 + 1) = 0` (likewise `b` hanging from `c_L`). The energy is
//! `E = -2 kappa cos k = -2 kappa0 cos q`.
//!
//! Two families exist. Resonant states have real `k` and `C1 = C4 = 0`:
//! they sit inside the band and never touch the leads. Evanescent states
//! have `k = i gamma` (below the band) or `k = pi + i gamma` (above it) and
//! decay exponentially along the leads.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // float methods come from libm without std
use num_traits::Float;

use crate::pi_lattice::{central_modes, PiLatticeSpec, PiSites, PiSpecError};
use crate::roots::{self, RootError};
use crate::spectra::SpectraError;
use crate::Complex64;

/// Energy-match tolerance for resonant `(k, q)` pairs.
pub const RESONANT_MATCH_TOLERANCE: f64 = 1e-10;
/// Search window for the evanescent decay rate.
pub const GAMMA_MIN: f64 = 1e-4;
pub const GAMMA_MAX: f64 = 5.0;
pub const GAMMA_STEP: f64 = 1e-3;
/// Bisection target for the decay rate.
pub const GAMMA_TOLERANCE: f64 = 1e-12;
/// Relative matching residual above which a sign change is treated as a pole.
const POLE_REJECT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum BetheError {
    Spec(PiSpecError),
    Spectra(SpectraError),
    /// Refinement of a bracketed root failed.
    Root { branch: Branch, sign: f64, error: RootError },
    /// The evanescent tail is still above `1e-12` of the peak at the wall.
    TailTooFat { m: usize, tail: f64 },
    ModeOutOfRange { n: usize, count: usize },
}

impl fmt::Display for BetheError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetheError::Spec(e) => write!(f, "{e}"),
            BetheError::Spectra(e) => write!(f, "{e}"),
            BetheError::Root { branch, sign, error } => {
                write!(f, "root refinement failed on the {branch:?} branch, sign {sign}: {error}")
            }
            BetheError::TailTooFat { m, tail } => {
                write!(f, "bound-state tail is {tail:e} of the peak at the wall; M = {m} is too short")
            }
            BetheError::ModeOutOfRange { n, count } => {
                write!(f, "mode {n} out of range 1..={count}")
            }
        }
    }
}

impl core::error::Error for BetheError {}

impl From<PiSpecError> for BetheError {
    fn from(e: PiSpecError) -> Self {
        BetheError::Spec(e)
    }
}

impl From<SpectraError> for BetheError {
    fn from(e: SpectraError) -> Self {
        BetheError::Spectra(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Resonant,
    Evanescent,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Resonant => "resonant",
            BoundKind::Evanescent => "evanescent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl Parity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
        }
    }
}

/// Evanescent branch: below the band (`k = i gamma`) or above it
/// (`k = pi + i gamma`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Bottom,
    Top,
}

impl Branch {
    pub fn momentum(&self, gamma: f64) -> Complex64 {
        match self {
            Branch::Bottom => Complex64::new(0.0, gamma),
            Branch::Top => Complex64::new(PI, gamma),
        }
    }
}

/// Ansatz coefficients, scaled like the normalized amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnsatzCoefficients {
    /// `C1..C4` on chain `c`.
    pub c: [Complex64; 4],
    /// `A1, A2` on side chain `a`.
    pub a: [Complex64; 2],
    /// `B1, B2` on side chain `b`.
    pub b: [Complex64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundState {
    pub kind: BoundKind,
    pub k: Complex64,
    pub q: Complex64,
    pub energy: f64,
    /// Mirror eigenvalue measured on the constructed state.
    pub parity: Option<Parity>,
    /// Lead decay rate; `None` for resonant states.
    pub gamma: Option<f64>,
    pub coefficients: AnsatzCoefficients,
    /// Amplitudes on the central chain (`a_N0 .. a_1, c_1 .. c_L,
    /// b_1 .. b_N0`), normalized over the infinite lattice.
    pub central: Vec<f64>,
    /// Lead amplitudes continue as `psi(c_{1-m}) = psi(c_1) r^m` and
    /// `psi(c_{L+m}) = psi(c_L) r^m` with this `r`; zero for resonant states.
    pub lead_ratio: f64,
}

impl BoundState {
    /// Probability weight on the central chain.
    pub fn central_weight(&self) -> f64 {
        self.central.iter().map(|x| x * x).sum()
    }
}

/// Chebyshev `U_n(x)`, i.e. `sin((n+1)q)/sin q` at `x = cos q`.
fn chebyshev_u(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return 1.0;
    }
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Side-chain amplitude ratio `psi_a(1)/psi_a(0)` for a chain of `n0`
/// sites ending in a wall: `sin(q N0)/sin(q (N0 + 1))`.
fn side_chain_ratio(n0: usize, cos_q: f64) -> f64 {
    chebyshev_u(n0 - 1, cos_q) / chebyshev_u(n0, cos_q)
}

/// `acos` of a real number with `Re q` in `[0, pi]` and `Im q >= 0`.
pub fn acos_upper(x: f64) -> Complex64 {
    let q = Complex64::new(x, 0.0).acos();
    if q.im < 0.0 {
        q.conj()
    } else {
        q
    }
}

/// Integer pairs `(m, n)` with `(L - 1) m = (N0 + 1) n`, `1 <= n <= L - 2`,
/// `1 <= m <= N0`. Each gives a resonant state at `k = q = m pi/(N0 + 1)`
/// when `kappa == kappa0`.
pub fn resonant_existence(n0: usize, len: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if len < 3 {
        return out;
    }
    for m in 1..=n0 {
        for n in 1..=len - 2 {
            if (len - 1) * m == (n0 + 1) * n {
                out.push((m, n));
            }
        }
    }
    out
}

fn mirror_parity(central: &[f64]) -> Option<Parity> {
    let scale = central.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let n = central.len();
    let sym = (0..n).map(|i| (central[i] - central[n - 1 - i]).abs()).fold(0.0, f64::max);
    let anti = (0..n).map(|i| (central[i] + central[n - 1 - i]).abs()).fold(0.0, f64::max);
    let tol = 1e-8 * scale;
    if sym <= tol {
        Some(Parity::Symmetric)
    } else if anti <= tol {
        Some(Parity::Antisymmetric)
    } else {
        None
    }
}

/// Flips the overall sign so the first significant amplitude is positive.
fn fix_sign(central: &[f64]) -> f64 {
    let scale = central.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    match central.iter().find(|x| x.abs() > 1e-9 * scale) {
        Some(&x) if x < 0.0 => -1.0,
        _ => 1.0,
    }
}

/// Side-chain amplitudes `psi(j) = amp sin(q (N0 + 1 - j))` as exponentials.
fn wall_coefficients(amp: Complex64, q: Complex64, n0: usize) -> [Complex64; 2] {
    let i2 = Complex64::new(0.0, 2.0);
    let phase = Complex64::new(0.0, (n0 + 1) as f64) * q;
    [-amp * (-phase).exp() / i2, amp * phase.exp() / i2]
}

/// Resonant states: `sin k(L-1) = sin q(N0+1) = 0` with matching energies.
pub fn resonant_bound_states(spec: &PiLatticeSpec) -> Result<Vec<BoundState>, BetheError> {
    spec.validate()?;
    let (n0, len, kappa, kappa0) = (spec.n0, spec.len, spec.kappa, spec.kappa0);
    let mut out = Vec::new();
    if len < 3 {
        return Ok(out);
    }
    for a in 1..=len - 2 {
        let k = a as f64 * PI / (len - 1) as f64;
        for b in 1..=n0 {
            let q = b as f64 * PI / (n0 + 1) as f64;
            if (kappa * k.cos() - kappa0 * q.cos()).abs() >= RESONANT_MATCH_TOLERANCE {
                continue;
            }
            // c_j = sin k(j-1) on 1..=L; side chains from the joint equations.
            let chain: Vec<f64> = (1..=len).map(|j| (k * (j - 1) as f64).sin()).collect();
            let side = kappa0 * (q * n0 as f64).sin();
            let amp_a = -kappa * chain[1] / side;
            let amp_b = -kappa * chain[len - 2] / side;
            let wall = |amp: f64, j: usize| amp * (q * (n0 + 1 - j) as f64).sin();

            let mut central = Vec::with_capacity(2 * n0 + len);
            central.extend((1..=n0).rev().map(|j| wall(amp_a, j)));
            central.extend_from_slice(&chain);
            central.extend((1..=n0).map(|j| wall(amp_b, j)));
            let norm = central.iter().map(|x| x * x).sum::<f64>().sqrt();
            let scale = fix_sign(&central) / norm;
            central.iter_mut().for_each(|x| *x *= scale);

            let i2 = Complex64::new(0.0, 2.0);
            let qc = Complex64::new(q, 0.0);
            let s = Complex64::new(scale, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let coefficients = AnsatzCoefficients {
                c: [zero, s / i2, -s / i2, zero],
                a: wall_coefficients(s * amp_a, qc, n0),
                b: wall_coefficients(s * amp_b, qc, n0),
            };
            out.push(BoundState {
                kind: BoundKind::Resonant,
                k: Complex64::new(k, 0.0),
                q: qc,
                energy: -2.0 * kappa * k.cos(),
                parity: mirror_parity(&central),
                gamma: None,
                coefficients,
                central,
                lead_ratio: 0.0,
            });
        }
    }
    Ok(out)
}

/// Left side minus right side of the evanescent matching equation
/// `kappa z(k)/z(k(L-1)) [e^{-ik(L-1)} + sign] = kappa0 z(q N0)/z(q(N0+1))`
/// with `z(t) = i sin t`, as a function of the decay rate.
pub fn evanescent_mismatch(spec: &PiLatticeSpec, branch: Branch, sign: f64, gamma: f64) -> f64 {
    let k = branch.momentum(gamma);
    let span = (spec.len - 1) as f64;
    let chain = (k.sin() / (k * span).sin()) * ((-Complex64::i() * k * span).exp() + sign) * spec.kappa;
    let energy = -2.0 * spec.kappa * k.cos().re;
    let side = spec.kappa0 * side_chain_ratio(spec.n0, -energy / (2.0 * spec.kappa0));
    chain.re - side
}

struct Constructed {
    central: Vec<Complex64>,
    coefficients: AnsatzCoefficients,
    residual: f64,
}

/// Builds the state for an evanescent momentum by matching from the left
/// joint, without assuming a parity. `residual` is the mismatch of the
/// Schrodinger equation at the right joint relative to the peak amplitude.
fn construct_evanescent(spec: &PiLatticeSpec, k: Complex64, q: Complex64, energy: f64) -> Constructed {
    let (n0, len, kappa, kappa0) = (spec.n0, spec.len, spec.kappa, spec.kappa0);
    let r = (Complex64::i() * k).exp();
    let ratio = side_chain_ratio(n0, -energy / (2.0 * kappa0));
    let e = Complex64::new(energy, 0.0);

    // c_0 .. c_{L+1}, with psi_c(1) = C1 = 1.
    let mut c = vec![Complex64::new(0.0, 0.0); len + 2];
    c[0] = r;
    c[1] = Complex64::new(1.0, 0.0);
    c[2] = -(e * c[1] + kappa * c[0] + kappa0 * ratio * c[1]) / kappa;
    for j in 2..len {
        c[j + 1] = -(e * c[j] + kappa * c[j - 1]) / kappa;
    }
    c[len + 1] = c[len] * r;
    let psi_b1 = c[len] * ratio;
    let mismatch = kappa * c[len - 1] + kappa * c[len + 1] + kappa0 * psi_b1 + e * c[len];

    let qn1 = (q * (n0 + 1) as f64).sin();
    let amp_a = c[1] / qn1;
    let amp_b = c[len] / qn1;
    let wall = |amp: Complex64, j: usize| amp * (q * (n0 + 1 - j) as f64).sin();

    let mut central = Vec::with_capacity(2 * n0 + len);
    central.extend((1..=n0).rev().map(|j| wall(amp_a, j)));
    central.extend_from_slice(&c[1..=len]);
    central.extend((1..=n0).map(|j| wall(amp_b, j)));
    let peak = central.iter().fold(0.0f64, |a, x| a.max(x.norm()));

    let zk = r - r.inv();
    let c2 = (c[2] - c[1] * r.inv()) / zk;
    let c3 = c[1] - c2;
    Constructed {
        central,
        coefficients: AnsatzCoefficients {
            c: [c[1], c2, c3, c[len]],
            a: wall_coefficients(amp_a, q, n0),
            b: wall_coefficients(amp_b, q, n0),
        },
        residual: mismatch.norm() / peak,
    }
}

/// Evanescent states on both branches and both signs of the matching
/// equation, found by scanning the decay rate over `(1e-4, 5]`.
pub fn evanescent_bound_states(spec: &PiLatticeSpec) -> Result<Vec<BoundState>, BetheError> {
    spec.validate()?;
    let steps = ((GAMMA_MAX - GAMMA_MIN) / GAMMA_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| GAMMA_MIN + GAMMA_STEP * i as f64).collect();
    let mut out = Vec::new();
    for branch in [Branch::Bottom, Branch::Top] {
        for sign in [1.0, -1.0] {
            let f = |g: f64| evanescent_mismatch(spec, branch, sign, g);
            for (lo, hi) in roots::sign_change_brackets(&grid, f) {
                let gamma = roots::bisect(lo, hi, f, GAMMA_TOLERANCE)
                    .map_err(|error| BetheError::Root { branch, sign, error })?;
                if let Some(state) = evanescent_state(spec, branch, gamma) {
                    out.push(state);
                }
            }
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

fn evanescent_state(spec: &PiLatticeSpec, branch: Branch, gamma: f64) -> Option<BoundState> {
    let k = branch.momentum(gamma);
    let energy = -2.0 * spec.kappa * k.cos().re;
    let q = acos_upper(-energy / (2.0 * spec.kappa0));
    let built = construct_evanescent(spec, k, q, energy);
    if built.residual.is_nan() || built.residual >= POLE_REJECT {
        return None;
    }
    let lead_ratio = (Complex64::i() * k).exp().re;
    let tail = lead_ratio * lead_ratio / (1.0 - lead_ratio * lead_ratio);
    let c1 = built.central[spec.n0];
    let cl = built.central[spec.n0 + spec.len - 1];
    let total: f64 = built.central.iter().map(|x| x.norm_sqr()).sum::<f64>() + (c1.norm_sqr() + cl.norm_sqr()) * tail;
    let mut central: Vec<f64> = built.central.iter().map(|x| x.re).collect();
    let scale = fix_sign(&central) / total.sqrt();
    central.iter_mut().for_each(|x| *x *= scale);
    let s = Complex64::new(scale, 0.0);
    let co = built.coefficients;
    Some(BoundState {
        kind: BoundKind::Evanescent,
        k,
        q,
        energy,
        parity: mirror_parity(&central),
        gamma: Some(gamma),
        coefficients: AnsatzCoefficients {
            c: co.c.map(|x| x * s),
            a: co.a.map(|x| x * s),
            b: co.b.map(|x| x * s),
        },
        central,
        lead_ratio,
    })
}

/// Resonant and evanescent states, ascending in energy.
pub fn bound_states(spec: &PiLatticeSpec) -> Result<Vec<BoundState>, BetheError> {
    let mut all = resonant_bound_states(spec)?;
    all.extend(evanescent_bound_states(spec)?);
    all.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(all)
}

/// Amplitudes of a bound state on the lattice truncated to `m` lead sites
/// per side (flat order of [`PiSites`]), renormalized there.
pub fn bound_state_wavefunction(state: &BoundState, sites: &PiSites) -> Result<Vec<f64>, BetheError> {
    assert_eq!(state.central.len(), sites.central_len(), "bound state belongs to another lattice");
    let m = sites.m;
    let (j1, jl) = sites.joint_positions();
    let left = state.central[j1 - 1];
    let right = state.central[jl - 1];
    let peak = state.central.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let wall = left.abs().max(right.abs()) * state.lead_ratio.abs().powi(m as i32);
    if state.kind == BoundKind::Evanescent && wall > 1e-12 * peak {
        return Err(BetheError::TailTooFat { m, tail: wall / peak });
    }
    let mut v = vec![0.0; sites.total()];
    v[sites.central()].copy_from_slice(&state.central);
    let mut pow = 1.0;
    for d in 1..=m {
        pow *= state.lead_ratio;
        v[sites.c(1 - d as isize)] = left * pow;
        v[sites.c((sites.len + d) as isize)] = right * pow;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LongTimeSurvival {
    pub value: f64,
    pub states: Vec<BoundState>,
    /// `<b|psi0>` per entry of `states`.
    pub overlaps: Vec<f64>,
}

/// Long-time survival on the central chain for initial central-chain
/// eigenmode `n` (1-based, ascending energy).
///
/// Only bound states survive the dispersal into the leads, and their cross
/// terms average out, so `P = sum_b |<b|psi0>|^2 w_b` with `w_b` the central
/// weight of `b`. The lead count `spec.m` is ignored.
pub fn long_time_survival(spec: &PiLatticeSpec, n: usize) -> Result<LongTimeSurvival, BetheError> {
    let modes = central_modes(spec)?;
    if n == 0 || n > modes.len() {
        return Err(BetheError::ModeOutOfRange { n, count: modes.len() });
    }
    let psi0 = &modes[n - 1].amplitudes;
    let states = bound_states(spec)?;
    let overlaps: Vec<f64> = states
        .iter()
        .map(|b| b.central.iter().zip(psi0).map(|(x, y)| x * y).sum())
        .collect();
    let value = states.iter().zip(&overlaps).map(|(b, o)| o * o * b.central_weight()).sum();
    Ok(LongTimeSurvival { value, states, overlaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi_lattice::build_pi_lattice;
    use crate::spectra::eigen_residual;

    fn uniform(n0: usize, len: usize) -> PiLatticeSpec {
        PiLatticeSpec::uniform(n0, len, 0)
    }

    #[test]
    fn existence_pairs() {
        assert_eq!(resonant_existence(3, 5), vec![(1, 1), (2, 2), (3, 3)]);
        assert_eq!(resonant_existence(2, 4), vec![(1, 1), (2, 2)]);
        assert!(resonant_existence(1, 4).is_empty());
        assert!(resonant_existence(2, 5).is_empty());
    }

    #[test]
    fn chebyshev_ratio_matches_trig() {
        for &q in &[0.3, 1.1, 2.9] {
            for n0 in 1..5 {
                let trig = (q * n0 as f64).sin() / (q * (n0 + 1) as f64).sin();
                assert!((side_chain_ratio(n0, f64::cos(q)) - trig).abs() < 1e-12 * trig.abs().max(1.0));
            }
        }
    }

    #[test]
    fn acos_upper_branch() {
        let q = acos_upper(f64::cosh(0.5));
        assert!(q.re.abs() < 1e-12 && (q.im - 0.5).abs() < 1e-12);
        let q = acos_upper(-f64::cosh(0.5));
        assert!((q.re - PI).abs() < 1e-12 && (q.im - 0.5).abs() < 1e-12);
        assert!((acos_upper(0.5).re - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn resonant_states_three_five() {
        let states = resonant_bound_states(&uniform(3, 5)).unwrap();
        let e: Vec<f64> = states.iter().map(|s| s.energy).collect();
        let s2 = 2f64.sqrt();
        assert_eq!(e.len(), 3);
        for (got, want) in e.iter().zip([-s2, 0.0, s2]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(resonant_bound_states(&uniform(2, 5)).unwrap().is_empty());
    }

    #[test]
    fn resonant_states_are_eigenstates_with_empty_leads() {
        let spec = PiLatticeSpec::uniform(3, 5, 50);
        let (graph, _, sites) = build_pi_lattice(&spec).unwrap();
        let h = graph.hamiltonian();
        for s in resonant_bound_states(&spec).unwrap() {
            assert_eq!(s.coefficients.c[0], Complex64::new(0.0, 0.0));
            let v = bound_state_wavefunction(&s, &sites).unwrap();
            assert!(eigen_residual(&h, &v, s.energy) < 1e-10);
            for idx in (0..sites.total()).filter(|i| !sites.central().contains(i)) {
                assert_eq!(v[idx], 0.0);
            }
        }
    }

    #[test]
    fn evanescent_decay_rates() {
        let states = evanescent_bound_states(&uniform(3, 5)).unwrap();
        assert_eq!(states.len(), 4);
        for s in &states {
            let g = s.gamma.unwrap();
            assert!((g - 0.382245).abs() < 1e-5 || (g - 0.191123).abs() < 1e-5, "{g}");
            assert!(s.energy.abs() > 2.0);
            assert!(s.parity.is_some());
            // uniform hopping: q equals k
            assert!((s.q - s.k).norm() < 1e-9);
        }
        let states = evanescent_bound_states(&uniform(2, 4)).unwrap();
        assert_eq!(states.len(), 2);
        assert!((states[0].energy + 2.147899).abs() < 1e-5);
        assert!((states[1].energy - 2.147899).abs() < 1e-5);
    }

    #[test]
    fn evanescent_states_are_eigenstates() {
        let spec = PiLatticeSpec::uniform(3, 5, 200);
        let (graph, _, sites) = build_pi_lattice(&spec).unwrap();
        let h = graph.hamiltonian();
        for s in evanescent_bound_states(&spec).unwrap() {
            let v = bound_state_wavefunction(&s, &sites).unwrap();
            assert!(eigen_residual(&h, &v, s.energy) < 1e-10);
            // left tail follows e^{ik}
            let c1 = v[sites.c(1)];
            for d in 1..5 {
                let expect = c1 * s.lead_ratio.powi(d);
                assert!((v[sites.c(1 - d as isize)] - expect).abs() < 1e-12);
            }
            let mirrored: Vec<f64> = (0..sites.total()).map(|i| v[sites.mirror(i)]).collect();
            let sign = if s.parity == Some(Parity::Symmetric) { 1.0 } else { -1.0 };
            for (a, b) in v.iter().zip(&mirrored) {
                assert!((a - sign * b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn short_lead_is_rejected() {
        let spec = PiLatticeSpec::uniform(3, 5, 20);
        let s = &evanescent_bound_states(&spec).unwrap()[0];
        assert!(matches!(
            bound_state_wavefunction(s, &spec.sites()),
            Err(BetheError::TailTooFat { m: 20, .. })
        ));
    }

    #[test]
    fn detuned_hopping_has_consistent_energies() {
        let spec = PiLatticeSpec {
            n0: 2,
            len: 4,
            kappa: 1.0,
            kappa0: 1.3,
            m: 200,
        };
        let (graph, _, sites) = build_pi_lattice(&spec).unwrap();
        let h = graph.hamiltonian();
        let states = bound_states(&spec).unwrap();
        assert!(!states.is_empty());
        for s in &states {
            let eq = -2.0 * spec.kappa0 * s.q.cos();
            assert!((eq.re - s.energy).abs() < 1e-9 && eq.im.abs() < 1e-9);
            let v = bound_state_wavefunction(s, &sites).unwrap();
            assert!(eigen_residual(&h, &v, s.energy) < 1e-10);
        }
    }

    #[test]
    fn long_time_values() {
        let spec = uniform(2, 4);
        let p = |n| long_time_survival(&spec, n).unwrap().value;
        assert!((p(1) - 0.5032).abs() < 5e-4);
        assert!((p(2) - 0.0027).abs() < 5e-5);
        assert!((p(3) - 1.0).abs() < 1e-12);
        assert!((p(4) - 0.0058).abs() < 5e-5);
        assert!(matches!(
            long_time_survival(&spec, 9),
            Err(BetheError::ModeOutOfRange { n: 9, count: 8 })
        ));
    }
}
