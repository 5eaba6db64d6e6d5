use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use trapnet_core::bethe::{self, BoundState};
use trapnet_core::dynamics::{
    classify_decay, complex_state, plateau_estimate, safe_horizon, DynamicsError, PlateauEstimate, Propagator,
    SurvivalSeries,
};
use trapnet_core::pi_lattice::{central_modes, embed_central, CENTRAL};
use trapnet_core::scatter::{self, ScatteringPoint, SpectralZero, ZeroCatalog, ZeroKind};
use trapnet_core::spectra::{find_trapping_modes_with, wave_nodes};
use trapnet_core::{build_pi_lattice, LatticeGraph, Partition, PiLatticeSpec};

use crate::config::{Command, Format, RunConfig};
use crate::error::CliError;
use crate::graph_file::GraphFile;
use crate::report::{emit, sibling, to_json, Csv};

/// Outcome of a run that did not fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// `trap` found nothing.
    NoCertificates,
}

impl Status {
    pub fn exit_code(&self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::NoCertificates => 3,
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Status, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Trap => trap(cfg),
        Command::Evolve => evolve(cfg).map(|_| Status::Ok),
        Command::Bound => bound(cfg).map(|_| Status::Ok),
        Command::Transmit => transmit(cfg).map(|_| Status::Ok),
    }
}

/// Shortest round-trip form; exponent notation for very small or large
/// magnitudes.
fn fmt(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

// ---- trap

#[derive(Serialize)]
struct CertificateOut {
    energy: f64,
    sites: Vec<String>,
    nodes: Vec<String>,
    amplitudes: Vec<f64>,
    residual: f64,
}

#[derive(Serialize)]
struct TrapOut {
    subgraph: usize,
    criterion: crate::config::Criterion,
    certificates: Vec<CertificateOut>,
}

fn trap(cfg: &RunConfig) -> Result<Status, CliError> {
    let (graph, partition, names, kappa, default_l): (LatticeGraph, Partition, Vec<String>, f64, usize) =
        match &cfg.graph {
            Some(path) => {
                let (graph, partition) = GraphFile::load(path)?.build()?;
                let names = (0..graph.site_count())
                    .map(|i| graph.label(i).map_or_else(|| i.to_string(), str::to_string))
                    .collect();
                (graph, partition, names, 1.0, 0)
            }
            None => {
                let spec = cfg.lattice()?;
                let (graph, partition, sites) = build_pi_lattice(&spec)?;
                let names = (0..sites.total()).map(|i| sites.name(i)).collect();
                (graph, partition, names, spec.kappa, CENTRAL)
            }
        };
    let l = cfg.subgraph.unwrap_or(default_l);
    if l >= partition.subgraph_count() {
        return Err(CliError::Input(format!(
            "subgraph {l} does not exist (partition has {})",
            partition.subgraph_count()
        )));
    }
    if partition.joint_sites(l).is_empty() {
        eprintln!("warning: subgraph {l} has no joint sites; every one of its modes is trapped");
    }
    let certs = find_trapping_modes_with(&graph, &partition, l, cfg.criterion.into())?;
    let members = partition.sites(l);
    let out: Vec<CertificateOut> = certs
        .iter()
        .map(|c| {
            let amplitudes: Vec<f64> = members.iter().map(|&i| c.vector[i]).collect();
            CertificateOut {
                energy: c.energy,
                sites: members.iter().map(|&i| names[i].clone()).collect(),
                nodes: wave_nodes(&amplitudes).into_iter().map(|j| names[members[j]].clone()).collect(),
                amplitudes,
                residual: c.residual,
            }
        })
        .collect();
    let text = match cfg.format {
        Format::Json => to_json(&TrapOut {
            subgraph: l,
            criterion: cfg.criterion,
            certificates: out,
        }),
        Format::Csv => {
            let mut csv = Csv::new(
                &[("subgraph", l.to_string()), ("certificates", out.len().to_string())],
                kappa,
                &["index", "energy", "residual", "nodes"],
            );
            for (i, c) in out.iter().enumerate() {
                csv.row(&[(i + 1).to_string(), fmt(c.energy), fmt(c.residual), c.nodes.join(" ")]);
            }
            csv.into_string()
        }
    };
    emit(cfg.output.as_deref(), &text)?;
    Ok(if certs.is_empty() { Status::NoCertificates } else { Status::Ok })
}

// ---- evolve

struct ModeRun {
    n: usize,
    energy: f64,
    series: SurvivalSeries,
    class: &'static str,
    plateau: Option<PlateauEstimate>,
}

#[derive(Serialize)]
struct PlateauOut {
    window_mean: f64,
    extrapolated: f64,
}

#[derive(Serialize)]
struct ModeOut<'a> {
    n: usize,
    energy: f64,
    class: &'a str,
    plateau: Option<PlateauOut>,
    times: &'a [f64],
    probabilities: &'a [f64],
}

#[derive(Serialize)]
struct EvolveOut<'a> {
    n0: usize,
    len: usize,
    kappa: f64,
    kappa0: f64,
    m: usize,
    safe_horizon: f64,
    modes: Vec<ModeOut<'a>>,
}

fn evolve(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.lattice()?;
    let times = cfg.time_grid();
    let horizon = safe_horizon(spec.m, spec.kappa);
    if !cfg.allow_reflections {
        if let Some(t) = times.iter().find(|&&t| t > horizon * (1.0 + 1e-12)) {
            return Err(CliError::Domain(format!(
                "t = {t} exceeds the reflection-free horizon {horizon} for m = {}; \
                 raise --m or pass --allow-reflections",
                spec.m
            )));
        }
    }
    let modes = central_modes(&spec)?;
    let selected: Vec<usize> = cfg.modes.clone().unwrap_or_else(|| (1..=modes.len()).collect());
    if let Some(&n) = selected.iter().find(|&&n| n == 0 || n > modes.len()) {
        return Err(CliError::Input(format!("mode {n} is outside 1..={}", modes.len())));
    }
    let (graph, _, sites) = build_pi_lattice(&spec)?;
    let propagator = Propagator::new(&graph.hamiltonian())?;
    let central: Vec<usize> = sites.central().collect();

    let runs: Vec<ModeRun> = selected
        .par_iter()
        .map(|&n| {
            let mode = &modes[n - 1];
            let psi0 = complex_state(&embed_central(&sites, &mode.amplitudes));
            let probabilities = propagator.survival(&psi0, &central, &times)?;
            let series = SurvivalSeries {
                label: n,
                times: times.clone(),
                probabilities,
                safe_horizon: horizon,
            };
            let (class, plateau) = match classify_decay(&series) {
                Ok(c) => (c.as_str(), plateau_estimate(&series).ok()),
                Err(DynamicsError::InsufficientSamples { .. }) => ("unclassified", None),
                Err(e) => return Err(e),
            };
            Ok(ModeRun {
                n,
                energy: mode.energy,
                series,
                class,
                plateau,
            })
        })
        .collect::<Result<_, DynamicsError>>()?;

    for r in &runs {
        match r.plateau {
            Some(p) => eprintln!(
                "mode {}: {} (plateau {:.4}, last-quarter mean {:.4})",
                r.n, r.class, p.extrapolated, p.window_mean
            ),
            None => eprintln!("mode {}: {}", r.n, r.class),
        }
    }

    let text = match cfg.format {
        Format::Json => to_json(&EvolveOut {
            n0: spec.n0,
            len: spec.len,
            kappa: spec.kappa,
            kappa0: spec.kappa0,
            m: spec.m,
            safe_horizon: horizon,
            modes: runs
                .iter()
                .map(|r| ModeOut {
                    n: r.n,
                    energy: r.energy,
                    class: r.class,
                    plateau: r.plateau.map(|p| PlateauOut {
                        window_mean: p.window_mean,
                        extrapolated: p.extrapolated,
                    }),
                    times: &r.series.times,
                    probabilities: &r.series.probabilities,
                })
                .collect(),
        }),
        Format::Csv => {
            let mut csv = Csv::new(&lattice_meta(&spec, true), spec.kappa, &["N0", "L", "n", "t", "P", "class"]);
            for r in &runs {
                for (t, p) in r.series.times.iter().zip(&r.series.probabilities) {
                    csv.row(&[
                        spec.n0.to_string(),
                        spec.len.to_string(),
                        r.n.to_string(),
                        fmt(*t),
                        fmt(*p),
                        r.class.to_string(),
                    ]);
                }
            }
            csv.into_string()
        }
    };
    emit(cfg.output.as_deref(), &text)
}

fn lattice_meta(spec: &PiLatticeSpec, with_leads: bool) -> Vec<(&'static str, String)> {
    let mut meta = vec![
        ("N0", spec.n0.to_string()),
        ("L", spec.len.to_string()),
        ("kappa", fmt(spec.kappa)),
        ("kappa0", fmt(spec.kappa0)),
    ];
    if with_leads {
        meta.push(("M", spec.m.to_string()));
        meta.push(("safe_horizon", fmt(safe_horizon(spec.m, spec.kappa))));
    }
    meta
}

// ---- bound

#[derive(Serialize)]
struct StateOut {
    kind: &'static str,
    k_re: f64,
    k_im: f64,
    q_re: f64,
    q_im: f64,
    #[serde(rename = "E")]
    energy: f64,
    parity: Option<&'static str>,
    gamma: Option<f64>,
    central_weight: f64,
    /// Overlap with each isolated central-chain mode, ascending energy.
    overlaps: Vec<f64>,
}

#[derive(Serialize)]
struct LongTimeOut {
    n: usize,
    value: f64,
}

#[derive(Serialize)]
struct BoundOut {
    n0: usize,
    len: usize,
    kappa: f64,
    kappa0: f64,
    states: Vec<StateOut>,
    long_time: Option<LongTimeOut>,
}

fn state_out(s: &BoundState, central: &[Vec<f64>]) -> StateOut {
    StateOut {
        kind: s.kind.as_str(),
        k_re: s.k.re,
        k_im: s.k.im,
        q_re: s.q.re,
        q_im: s.q.im,
        energy: s.energy,
        parity: s.parity.map(|p| p.as_str()),
        gamma: s.gamma,
        central_weight: s.central_weight(),
        overlaps: central
            .iter()
            .map(|g| g.iter().zip(&s.central).map(|(a, b)| a * b).sum())
            .collect(),
    }
}

fn bound(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.lattice()?;
    let states = bethe::bound_states(&spec)?;
    let central: Vec<Vec<f64>> = central_modes(&spec)?.into_iter().map(|m| m.amplitudes).collect();
    let long_time = match cfg.long_time {
        Some(n) if n == 0 || n > central.len() => {
            return Err(CliError::Input(format!("mode {n} is outside 1..={}", central.len())));
        }
        Some(n) => Some(LongTimeOut {
            n,
            value: bethe::long_time_survival(&spec, n)?.value,
        }),
        None => None,
    };
    let out = BoundOut {
        n0: spec.n0,
        len: spec.len,
        kappa: spec.kappa,
        kappa0: spec.kappa0,
        states: states.iter().map(|s| state_out(s, &central)).collect(),
        long_time,
    };
    let text = match cfg.format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut meta = lattice_meta(&spec, false);
            if let Some(lt) = &out.long_time {
                meta.push(("long_time_n", lt.n.to_string()));
                meta.push(("long_time_P", fmt(lt.value)));
            }
            let mut csv = Csv::new(
                &meta,
                spec.kappa,
                &["kind", "k_re", "k_im", "q_re", "q_im", "E", "parity", "gamma", "central_weight"],
            );
            for s in &out.states {
                csv.row(&[
                    s.kind.to_string(),
                    fmt(s.k_re),
                    fmt(s.k_im),
                    fmt(s.q_re),
                    fmt(s.q_im),
                    fmt(s.energy),
                    s.parity.unwrap_or("").to_string(),
                    s.gamma.map(fmt).unwrap_or_default(),
                    fmt(s.central_weight),
                ]);
            }
            csv.into_string()
        }
    };
    emit(cfg.output.as_deref(), &text)
}

// ---- transmit

#[derive(Serialize)]
struct PointOut {
    k: f64,
    #[serde(rename = "E")]
    energy: f64,
    #[serde(rename = "T")]
    transmission: f64,
    #[serde(rename = "R")]
    reflection: f64,
    re_t: f64,
    im_t: f64,
    flag: Option<String>,
}

#[derive(Serialize)]
struct ZeroOut {
    k: f64,
    #[serde(rename = "E")]
    energy: f64,
    n: Option<usize>,
    provenance: &'static str,
    method: &'static str,
}

#[derive(Serialize)]
struct DroppedOut {
    kind: &'static str,
    n: usize,
    cos_k: f64,
    reason: String,
}

#[derive(Serialize)]
struct CatalogOut {
    n0: usize,
    len: usize,
    kappa: f64,
    kappa0: f64,
    zeros: Vec<ZeroOut>,
    dropped: Vec<DroppedOut>,
}

fn zero_out(z: &SpectralZero) -> ZeroOut {
    ZeroOut {
        k: z.k,
        energy: z.energy,
        n: z.n,
        provenance: z.kind.as_str(),
        method: match z.kind {
            ZeroKind::LengthDependent => "bisection",
            ZeroKind::CommonAlpha | ZeroKind::CommonBeta => "closed-form",
        },
    }
}

fn catalog_out(spec: &PiLatticeSpec, cat: &ZeroCatalog) -> CatalogOut {
    CatalogOut {
        n0: spec.n0,
        len: spec.len,
        kappa: spec.kappa,
        kappa0: spec.kappa0,
        zeros: cat.all().map(zero_out).collect(),
        dropped: cat
            .dropped
            .iter()
            .map(|d| DroppedOut {
                kind: d.kind.as_str(),
                n: d.n,
                cos_k: d.cos_k,
                reason: format!("{:?}", d.reason),
            })
            .collect(),
    }
}

#[derive(Serialize)]
struct NearestOut {
    k: f64,
    #[serde(rename = "E")]
    energy: f64,
    side: String,
}

#[derive(Serialize)]
struct DipOut {
    dip: ZeroOut,
    nearest_a: Option<NearestOut>,
    nearest_b: Option<NearestOut>,
    straddle: bool,
}

#[derive(Serialize)]
struct PeakDipOut {
    n0: usize,
    len_a: usize,
    len_b: usize,
    zeros_a: Vec<ZeroOut>,
    zeros_b: Vec<ZeroOut>,
    dips: Vec<DipOut>,
}

fn sweep(spec: &PiLatticeSpec, momenta: &[f64]) -> Result<Vec<ScatteringPoint>, CliError> {
    momenta
        .iter()
        .map(|&k| Ok(scatter::transmission_amplitude(spec, k)?))
        .collect()
}

fn sweep_text(spec: &PiLatticeSpec, points: &[ScatteringPoint], format: Format) -> String {
    match format {
        Format::Json => to_json(
            &points
                .iter()
                .map(|p| PointOut {
                    k: p.k,
                    energy: p.energy,
                    transmission: p.transmission,
                    reflection: p.reflection,
                    re_t: p.t.re,
                    im_t: p.t.im,
                    flag: p.flag.map(|f| format!("{f:?}")),
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut csv = Csv::new(&lattice_meta(spec, false), spec.kappa, &["k", "E", "T", "R", "re_t", "im_t"]);
            for p in points {
                csv.row(&[
                    fmt(p.k),
                    fmt(p.energy),
                    fmt(p.transmission),
                    fmt(p.reflection),
                    fmt(p.t.re),
                    fmt(p.t.im),
                ]);
            }
            csv.into_string()
        }
    }
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Momenta of the sweep, from the k range if one was given and from the
/// energy range otherwise.
fn sweep_momenta(cfg: &RunConfig, kappa: f64) -> Result<Vec<f64>, CliError> {
    if let Some((lo, hi)) = cfg.momentum_range() {
        if lo <= 0.0 || hi >= PI {
            return Err(CliError::Domain(format!(
                "momentum range [{lo}, {hi}] must lie strictly inside (0, pi)"
            )));
        }
        return Ok(linspace(lo, hi, cfg.steps));
    }
    let edge = 2.0 * kappa;
    let (lo, hi) = cfg.energy_range();
    if lo <= -edge || hi >= edge {
        return Err(CliError::Domain(format!(
            "energy range [{lo}, {hi}] must lie strictly inside the band (-{edge}, {edge})"
        )));
    }
    Ok(linspace(lo, hi, cfg.steps)
        .into_iter()
        .map(|e| (-e / edge).clamp(-1.0, 1.0).acos())
        .collect())
}

fn transmit(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.lattice()?;
    let momenta = sweep_momenta(cfg, spec.kappa)?;
    if cfg.compare.is_some() && cfg.output.is_none() {
        return Err(CliError::Input("--compare writes several files and needs --output".into()));
    }
    let points = sweep(&spec, &momenta)?;
    emit(cfg.output.as_deref(), &sweep_text(&spec, &points, cfg.format))?;

    let cat = scatter::zero_catalog(&spec)?;
    match cfg.output.as_deref() {
        Some(path) => emit(Some(&sibling(path, "zeros.json")), &to_json(&catalog_out(&spec, &cat)))?,
        None => summarize_catalog(&cat),
    }

    if let (Some(len_b), Some(path)) = (cfg.compare, cfg.output.as_deref()) {
        compare(&spec, len_b, &momenta, path, cfg.format)?;
    }
    Ok(())
}

fn summarize_catalog(cat: &ZeroCatalog) {
    let list = |zs: &[SpectralZero]| {
        zs.iter()
            .map(|z| format!("{:.6}", z.energy))
            .collect::<Vec<_>>()
            .join(" ")
    };
    eprintln!("transmission zeros (E): {}", list(&cat.minima));
    eprintln!("common full transmission (E): {}", list(&cat.maxima));
    eprintln!("length-dependent full transmission (E): {}", list(&cat.length_dependent));
}

fn compare(spec: &PiLatticeSpec, len_b: usize, momenta: &[f64], path: &Path, format: Format) -> Result<(), CliError> {
    let spec_b = PiLatticeSpec { len: len_b, ..*spec };
    spec_b.validate()?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let points = sweep(&spec_b, momenta)?;
    emit(
        Some(&sibling(path, &format!("L{len_b}.{ext}"))),
        &sweep_text(&spec_b, &points, format),
    )?;
    let report = scatter::peak_dip_report(spec, spec.len, len_b)?;
    let nearest = |n: Option<scatter::NearestZero>| {
        n.map(|z| NearestOut {
            k: z.k,
            energy: z.energy,
            side: format!("{:?}", z.side).to_lowercase(),
        })
    };
    let out = PeakDipOut {
        n0: report.n0,
        len_a: report.len_a,
        len_b: report.len_b,
        zeros_a: report.zeros_a.iter().map(zero_out).collect(),
        zeros_b: report.zeros_b.iter().map(zero_out).collect(),
        dips: report
            .dips
            .iter()
            .map(|d| DipOut {
                dip: zero_out(&d.dip),
                nearest_a: nearest(d.nearest_a),
                nearest_b: nearest(d.nearest_b),
                straddle: d.straddle,
            })
            .collect(),
    };
    emit(Some(&sibling(path, "peakdip.json")), &to_json(&out))
}
