//! Transmission through the pi-lattice for a plane wave on chain `c`.
//!
//! With incident momentum `k`, energy `E = -2 kappa cos k` and side-chain
//! momentum `q` fixed by `kappa cos k = kappa0 cos q`, the two side chains
//! enter only through
//!
//! ```text
//! alpha = kappa  sin(q (N0 + 1))
//! beta  = kappa0 sin(q N0)
//! ```
//!
//! Conventions: `psi_c(j) = e^{ik(j-1)} + r e^{-ik(j-1)}` for `j <= 1` and
//! `psi_c(j) = t e^{ik(j-1)}` for `j >= L`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // float methods come from libm without std
use num_traits::Float;

use crate::bethe::acos_upper;
use crate::linalg::{self, LinalgError};
use crate::pi_lattice::{build_pi_lattice, PiLatticeSpec, PiSpecError};
use crate::roots;
use crate::Complex64;

/// `|alpha|` or `|beta|` below this (relative to the hoppings) counts as zero.
pub const ZERO_TOLERANCE: f64 = 1e-8;
/// Grid size for bracketing length-dependent reflection zeros.
pub const ZERO_SCAN_POINTS: usize = 2000;
pub const ZERO_K_TOLERANCE: f64 = 1e-10;
/// Step applied to `k` when the oracle's linear system is singular.
pub const ORACLE_NUDGE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScatterFlag {
    /// `sin k = 0`; `T` is the limiting value.
    BandEdge,
    /// `alpha = beta = 0`; evaluated from the limit along real `k`.
    DegenerateZero,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringPoint {
    pub k: f64,
    pub energy: f64,
    pub q: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub delta: f64,
    pub t: Complex64,
    pub r: Complex64,
    /// `|t|^2` from the amplitude.
    pub transmission: f64,
    pub reflection: f64,
    pub flag: Option<ScatterFlag>,
}

/// Side-chain data at momentum `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SideChainCoupling {
    pub q: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl SideChainCoupling {
    pub fn at(k: f64, n0: usize, kappa: f64, kappa0: f64) -> Self {
        let q = acos_upper(kappa / kappa0 * k.cos());
        SideChainCoupling {
            q,
            alpha: (q * (n0 + 1) as f64).sin() * kappa,
            beta: (q * n0 as f64).sin() * kappa0,
        }
    }

    /// `(alpha, beta)` with their common phase (`1` or `i`) removed. Both
    /// share it because each is a real multiple of `sin` at the same `q`.
    pub fn real_pair(&self) -> (f64, f64) {
        let im = self.alpha.im.abs() + self.beta.im.abs();
        let re = self.alpha.re.abs() + self.beta.re.abs();
        if im > re {
            (self.alpha.im, self.beta.im)
        } else {
            (self.alpha.re, self.beta.re)
        }
    }

    fn is_zero(x: f64, kappa: f64, kappa0: f64) -> bool {
        x.abs() < ZERO_TOLERANCE * kappa.max(kappa0)
    }
}

/// `d alpha/dq` and `d beta/dq` (phase removed like [`SideChainCoupling::real_pair`]).
fn derivative_pair(q: Complex64, n0: usize, kappa: f64, kappa0: f64) -> (f64, f64) {
    let da = (q * (n0 + 1) as f64).cos() * (kappa * (n0 + 1) as f64);
    let db = (q * n0 as f64).cos() * (kappa0 * n0 as f64);
    (da.re, db.re)
}

/// Transmission and reflection amplitudes for real `(a, b)`.
fn amplitudes(a: f64, b: f64, k: f64, len: usize) -> (Complex64, Complex64) {
    let s = k.sin();
    let i = Complex64::i();
    let phase = k * (len - 1) as f64;
    let wind = (i * (2.0 * phase)).exp();
    // e^{2i phase} - 1 without cancellation near the band edges
    let wind_m1 = i * (i * phase).exp() * (2.0 * phase.sin());
    let num = Complex64::new(a * a * s * s, 0.0);
    let den = num - i * (a * b * s) + wind_m1 * (0.25 * b * b);
    let t = num / den;
    let r = -(t * wind + 1.0) * b / (i * (2.0 * s * a) + b);
    (t, r)
}

/// `T` in the closed form that isolates the length dependence in
/// `sin^2(k (L - 1) - delta)`.
fn probability(a: f64, b: f64, k: f64, len: usize) -> (f64, f64) {
    let s = k.sin();
    let delta = (2.0 * a * s).atan2(b);
    let a4 = (a * s).powi(4);
    // sin(k (L-1) - delta) by the angle-difference identity: the direct
    // form loses digits when the argument sits near a multiple of pi.
    let rho = (b * b + 4.0 * a * a * s * s).sqrt();
    let phase = k * (len - 1) as f64;
    let osc = (phase.sin() * b - phase.cos() * 2.0 * a * s) / rho;
    let t = a4 / (a4 + 0.25 * b * b * (b * b + 4.0 * a * a * s * s) * osc * osc);
    (t, delta)
}

fn reduced_pair(k: f64, n0: usize, kappa: f64, kappa0: f64) -> (SideChainCoupling, f64, f64, Option<ScatterFlag>) {
    let side = SideChainCoupling::at(k, n0, kappa, kappa0);
    let (a, b) = side.real_pair();
    if SideChainCoupling::is_zero(a, kappa, kappa0) && SideChainCoupling::is_zero(b, kappa, kappa0) {
        let (da, db) = derivative_pair(side.q, n0, kappa, kappa0);
        return (side, da, db, Some(ScatterFlag::DegenerateZero));
    }
    (side, a, b, None)
}

/// Complex transmission and reflection amplitudes at momentum `k`.
pub fn transmission_amplitude(spec: &PiLatticeSpec, k: f64) -> Result<ScatteringPoint, PiSpecError> {
    spec.validate()?;
    let (n0, len, kappa, kappa0) = (spec.n0, spec.len, spec.kappa, spec.kappa0);
    let (side, a, b, mut flag) = reduced_pair(k, n0, kappa, kappa0);
    let (t, r) = if k.sin().abs() < 1e-15 {
        flag = Some(ScatterFlag::BandEdge);
        if SideChainCoupling::is_zero(b, kappa, kappa0) {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0))
        }
    } else {
        amplitudes(a, b, k, len)
    };
    let delta = (2.0 * a * k.sin()).atan2(b);
    Ok(ScatteringPoint {
        k,
        energy: -2.0 * kappa * k.cos(),
        q: side.q,
        alpha: side.alpha,
        beta: side.beta,
        delta,
        t,
        r,
        transmission: t.norm_sqr(),
        reflection: r.norm_sqr(),
        flag,
    })
}

/// `T(k)` from the closed-form probability, independent of the amplitude.
pub fn transmission_probability(spec: &PiLatticeSpec, k: f64) -> Result<f64, PiSpecError> {
    spec.validate()?;
    let (_, a, b, _) = reduced_pair(k, spec.n0, spec.kappa, spec.kappa0);
    if k.sin().abs() < 1e-15 {
        return Ok(if SideChainCoupling::is_zero(b, spec.kappa, spec.kappa0) { 1.0 } else { 0.0 });
    }
    Ok(probability(a, b, k, spec.len).0)
}

/// `T` for a single side chain of `n0` sites hanging from an infinite
/// chain: an effective on-site potential `kappa0 sin(qN0)/sin(q(N0+1))`.
pub fn single_side_chain_transmission(k: f64, n0: usize, kappa: f64, kappa0: f64) -> f64 {
    let side = SideChainCoupling::at(k, n0, kappa, kappa0);
    let (mut a, mut b) = side.real_pair();
    if SideChainCoupling::is_zero(a, kappa, kappa0) && SideChainCoupling::is_zero(b, kappa, kappa0) {
        (a, b) = derivative_pair(side.q, n0, kappa, kappa0);
    }
    let s = k.sin();
    let num = 4.0 * s * s * a * a;
    if num == 0.0 && b == 0.0 {
        return 1.0;
    }
    num / (num + b * b)
}

/// Where a zero comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroKind {
    /// `alpha = 0`: total reflection for every `L`.
    CommonAlpha,
    /// `beta = 0`: full transmission for every `L`.
    CommonBeta,
    /// `sin(k (L - 1) - delta) = 0`: full transmission at this `L` only.
    LengthDependent,
}

impl ZeroKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZeroKind::CommonAlpha => "common-alpha",
            ZeroKind::CommonBeta => "common-beta",
            ZeroKind::LengthDependent => "L-dependent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralZero {
    pub kind: ZeroKind,
    pub k: f64,
    pub energy: f64,
    /// Side-chain index `n` for common zeros.
    pub n: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropReason {
    /// `|cos k|` would exceed one: the energy lies outside the band of `c`.
    OutOfBand,
    /// `q = 0` or `pi`, where `alpha` and `beta` vanish together.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DroppedZero {
    pub kind: ZeroKind,
    pub n: usize,
    /// The would-be `cos k`.
    pub cos_k: f64,
    pub reason: DropReason,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZeroCatalog {
    /// Common transmission zeros.
    pub minima: Vec<SpectralZero>,
    /// Common reflection zeros.
    pub maxima: Vec<SpectralZero>,
    /// Reflection zeros that depend on `L`.
    pub length_dependent: Vec<SpectralZero>,
    pub dropped: Vec<DroppedZero>,
}

impl ZeroCatalog {
    pub fn all(&self) -> impl Iterator<Item = &SpectralZero> {
        self.minima.iter().chain(&self.maxima).chain(&self.length_dependent)
    }
}

fn common_family(
    kind: ZeroKind,
    period: usize,
    kappa: f64,
    kappa0: f64,
    kept: &mut Vec<SpectralZero>,
    dropped: &mut Vec<DroppedZero>,
) {
    for n in 0..=period {
        let cos_k = kappa0 / kappa * (n as f64 * PI / period as f64).cos();
        let reason = if cos_k.abs() > 1.0 + 1e-12 {
            Some(DropReason::OutOfBand)
        } else if n == 0 || n == period {
            Some(DropReason::Degenerate)
        } else {
            None
        };
        match reason {
            Some(reason) => dropped.push(DroppedZero { kind, n, cos_k, reason }),
            None => {
                let k = cos_k.clamp(-1.0, 1.0).acos();
                kept.push(SpectralZero {
                    kind,
                    k,
                    energy: -2.0 * kappa * cos_k,
                    n: Some(n),
                });
            }
        }
    }
    kept.sort_by(|a, b| a.k.total_cmp(&b.k));
}

/// Zeros shared by every `L`: `alpha = 0` (`q = n pi/(N0+1)`) and
/// `beta = 0` (`q = n pi/N0`).
pub fn common_zeros(n0: usize, kappa: f64, kappa0: f64) -> ZeroCatalog {
    let mut cat = ZeroCatalog::default();
    common_family(ZeroKind::CommonAlpha, n0 + 1, kappa, kappa0, &mut cat.minima, &mut cat.dropped);
    common_family(ZeroKind::CommonBeta, n0, kappa, kappa0, &mut cat.maxima, &mut cat.dropped);
    cat
}

/// Roots in `(0, pi)` of `sin(k (L - 1) - delta(k))` away from the common
/// zeros.
pub fn length_dependent_zeros(spec: &PiLatticeSpec) -> Result<Vec<SpectralZero>, PiSpecError> {
    spec.validate()?;
    let (n0, len, kappa, kappa0) = (spec.n0, spec.len, spec.kappa, spec.kappa0);
    let phase = |k: f64| {
        let (_, a, b, _) = reduced_pair(k, n0, kappa, kappa0);
        (k * (len - 1) as f64 - (2.0 * a * k.sin()).atan2(b)).sin()
    };
    let h = PI / (ZERO_SCAN_POINTS + 1) as f64;
    let grid: Vec<f64> = (1..=ZERO_SCAN_POINTS).map(|i| i as f64 * h).collect();
    let mut out: Vec<SpectralZero> = Vec::new();
    for (lo, hi) in roots::sign_change_brackets(&grid, phase) {
        // bisect to machine precision; ZERO_K_TOLERANCE is the guaranteed bound
        let Ok(k) = roots::bisect(lo, hi, phase, 0.0) else {
            continue;
        };
        let (a, b) = SideChainCoupling::at(k, n0, kappa, kappa0).real_pair();
        if SideChainCoupling::is_zero(a, kappa, kappa0) || SideChainCoupling::is_zero(b, kappa, kappa0) {
            continue;
        }
        if out.last().is_some_and(|z| (z.k - k).abs() < 10.0 * ZERO_K_TOLERANCE) {
            continue;
        }
        out.push(SpectralZero {
            kind: ZeroKind::LengthDependent,
            k,
            energy: -2.0 * kappa * k.cos(),
            n: None,
        });
    }
    Ok(out)
}

/// Common zeros plus the zeros specific to `spec.len`.
pub fn zero_catalog(spec: &PiLatticeSpec) -> Result<ZeroCatalog, PiSpecError> {
    let mut cat = common_zeros(spec.n0, spec.kappa, spec.kappa0);
    cat.length_dependent = length_dependent_zeros(spec)?;
    Ok(cat)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Incidence {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub t: Complex64,
    pub r: Complex64,
    /// Momentum actually used (differs from the request after a nudge).
    pub k: f64,
    pub nudged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    Spec(PiSpecError),
    LeadTooShort { m: usize, needed: usize },
    MomentumOutOfRange { k: f64 },
    Linalg(LinalgError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Spec(e) => write!(f, "{e}"),
            OracleError::LeadTooShort { m, needed } => {
                write!(f, "lead length {m} too short, need at least {needed}")
            }
            OracleError::MomentumOutOfRange { k } => write!(f, "momentum {k} not in (0, pi)"),
            OracleError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for OracleError {}

/// Transmission by direct solution of the site equations on the truncated
/// lattice, with outgoing-wave boundary rows on the outermost lead sites
/// and the incident wave as the source. Needs `spec.m >= L + 20`.
pub fn numeric_scatter_oracle(spec: &PiLatticeSpec, k: f64, incidence: Incidence) -> Result<OracleResult, OracleError> {
    let needed = spec.len + 20;
    if spec.m < needed {
        return Err(OracleError::LeadTooShort { m: spec.m, needed });
    }
    if !(k > 0.0 && k < PI) {
        return Err(OracleError::MomentumOutOfRange { k });
    }
    match oracle_solve(spec, k, incidence) {
        Err(OracleError::Linalg(LinalgError::Singular { .. })) => {
            let nudged = if k + ORACLE_NUDGE < PI { k + ORACLE_NUDGE } else { k - ORACLE_NUDGE };
            let mut res = oracle_solve(spec, nudged, incidence)?;
            res.nudged = true;
            Ok(res)
        }
        other => other,
    }
}

fn oracle_solve(spec: &PiLatticeSpec, k: f64, incidence: Incidence) -> Result<OracleResult, OracleError> {
    let (graph, _, sites) = build_pi_lattice(spec).map_err(OracleError::Spec)?;
    let h = graph.hamiltonian();
    let n = sites.total();
    let energy = -2.0 * spec.kappa * k.cos();
    let i = Complex64::i();
    let out_going = (i * k).exp() * spec.kappa;

    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for c in 0..n {
            a[r * n + c] = Complex64::new(-h[(r, c)], 0.0);
        }
        a[r * n + r] += energy;
    }
    let (m, len) = (spec.m as isize, spec.len as isize);
    let (j0, j1) = (1 - m, len + m);
    let (i0, i1) = (sites.c(j0), sites.c(j1));
    a[i0 * n + i0] += out_going;
    a[i1 * n + i1] += out_going;

    let source = 2.0 * spec.kappa * k.sin() * i;
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    let wave = |j: isize| (i * (k * j as f64)).exp();
    match incidence {
        Incidence::Left => b[i0] = source * wave(j0 - 1),
        Incidence::Right => b[i1] = source * wave(-(j1 - len)),
    }
    let psi = linalg::solve_complex(n, a, b, 1e-13).map_err(OracleError::Linalg)?;
    let (t, r) = match incidence {
        Incidence::Left => (psi[i1] * wave(-(j1 - 1)), (psi[i0] - wave(j0 - 1)) * wave(j0 - 1)),
        Incidence::Right => (psi[i0] * wave(j0 - 1), (psi[i1] - wave(-(j1 - len))) * wave(-(j1 - len))),
    };
    Ok(OracleResult { t, r, k, nudged: false })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearestZero {
    pub k: f64,
    pub energy: f64,
    pub side: Side,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DipComparison {
    /// The common transmission zero.
    pub dip: SpectralZero,
    pub nearest_a: Option<NearestZero>,
    pub nearest_b: Option<NearestZero>,
    /// The two nearest peaks lie on opposite sides of the dip.
    pub straddle: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeakDipReport {
    pub n0: usize,
    pub len_a: usize,
    pub len_b: usize,
    pub zeros_a: Vec<SpectralZero>,
    pub zeros_b: Vec<SpectralZero>,
    pub dips: Vec<DipComparison>,
}

fn nearest(zeros: &[SpectralZero], k: f64) -> Option<NearestZero> {
    zeros
        .iter()
        .min_by(|x, y| (x.k - k).abs().total_cmp(&(y.k - k).abs()))
        .map(|z| NearestZero {
            k: z.k,
            energy: z.energy,
            side: if z.k < k { Side::Left } else { Side::Right },
        })
}

/// Compares where the length-dependent peaks of two lattices (`L = len_a`
/// and `L = len_b`, otherwise equal to `spec`) sit relative to each common
/// dip.
pub fn peak_dip_report(spec: &PiLatticeSpec, len_a: usize, len_b: usize) -> Result<PeakDipReport, PiSpecError> {
    let zeros_a = length_dependent_zeros(&PiLatticeSpec { len: len_a, ..*spec })?;
    let zeros_b = length_dependent_zeros(&PiLatticeSpec { len: len_b, ..*spec })?;
    let common = common_zeros(spec.n0, spec.kappa, spec.kappa0);
    let dips = common
        .minima
        .iter()
        .map(|dip| {
            let nearest_a = nearest(&zeros_a, dip.k);
            let nearest_b = nearest(&zeros_b, dip.k);
            let straddle = len_a != len_b
                && matches!((nearest_a, nearest_b), (Some(x), Some(y)) if x.side != y.side);
            DipComparison {
                dip: *dip,
                nearest_a,
                nearest_b,
                straddle,
            }
        })
        .collect();
    Ok(PeakDipReport {
        n0: spec.n0,
        len_a,
        len_b,
        zeros_a,
        zeros_b,
        dips,
    })
}
