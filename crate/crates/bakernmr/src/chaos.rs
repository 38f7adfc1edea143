//! Entropy growth and hypersensitivity to perturbation.

pub mod partition;

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{self, apply_perturbation, perturbation_unitary, EvolutionEngine, NoiseModel};
use crate::nmr::{self, HamiltonianModel, PulseSequence, Spin};
use crate::qstate::{DensityMatrix, Mat, StateVector, UnitaryOperator, C64};

use partition::SetPartitions;

/// Tolerance under which two entropy reductions count as the same value.
pub const DS_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// Alternating odd/even steps of the simplified baker's map.
    Chaotic,
    /// Refocused near-identity map of the same average duration.
    Regular,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::Chaotic => "chaotic",
            MapKind::Regular => "regular",
        })
    }
}

impl FromStr for MapKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chaotic" => Ok(Self::Chaotic),
            "regular" => Ok(Self::Regular),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Realistic dephasing times.
    Fig2,
    /// Idealized times, carbon 2 still short-lived.
    Fig3,
    /// Long times plus artificial perturbation after every step.
    Fig4,
}

impl Preset {
    /// 1/Gamma for (H, C1, C2), seconds.
    pub fn times(self) -> [f64; 3] {
        match self {
            Preset::Fig2 => [4.0, 0.7, 0.4],
            Preset::Fig3 => [10.0, 10.0, 0.2],
            Preset::Fig4 => [10.0, 10.0, 10.0],
        }
    }

    pub fn perturbed(self) -> bool {
        self == Preset::Fig4
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Self::Fig2),
            "fig3" => Ok(Self::Fig3),
            "fig4" => Ok(Self::Fig4),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub map: MapKind,
    pub model: HamiltonianModel,
    pub noise: NoiseModel,
    pub steps: usize,
    /// Apply the averaging superoperator after every step.
    pub perturbation: bool,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset, map: MapKind) -> Self {
        let [h, c1, c2] = preset.times();
        Self {
            map,
            model: HamiltonianModel::default(),
            noise: NoiseModel::from_times(h, c1, c2).expect("preset times are positive"),
            steps: 6,
            perturbation: preset.perturbed(),
            seed: 1,
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn engine(&self) -> Result<EvolutionEngine> {
        EvolutionEngine::exact(self.model, self.noise)
    }
}

/// ((|0> + i|1>)/sqrt 2) on every spin.
pub fn initial_state() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = StateVector::new(DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, s)])).expect("normalized");
    StateVector::product(&[q.clone(), q.clone(), q]).expect("normalized")
}

/// The sequences used by one map: (odd, even). Both are `t_regular` for the
/// regular map.
pub fn step_sequences(map: MapKind, model: &HamiltonianModel) -> (PulseSequence, PulseSequence) {
    match map {
        MapKind::Chaotic => (nmr::t_odd(model), nmr::t_even(model)),
        MapKind::Regular => (nmr::t_regular(model), nmr::t_regular(model)),
    }
}

/// Spin whose z rotation perturbs step `n` (1-based). The same logical bit is
/// hit on odd and even chaotic steps despite the relabeling.
pub fn perturbed_spin(map: MapKind, n: usize) -> Spin {
    match map {
        MapKind::Chaotic if n % 2 == 0 => Spin::C2,
        _ => Spin::H,
    }
}

/// S(n) in bits for n = 0..=steps.
pub fn entropy_experiment(cfg: &ExperimentConfig) -> Result<Vec<(usize, f64)>> {
    if cfg.steps < 1 {
        return Err(Error::Unsupported("need at least one step".into()));
    }
    let engine = cfg.engine()?;
    let (odd, even) = step_sequences(cfg.map, &cfg.model);
    let mut rho = initial_state().projector();
    let mut out = vec![(0, rho.entropy_bits()?)];
    for n in 1..=cfg.steps {
        let seq = if n % 2 == 1 { &odd } else { &even };
        rho = lindblad::run_sequence(&rho, seq, &engine)?;
        if cfg.perturbation {
            rho = apply_perturbation(&rho, perturbed_spin(cfg.map, n))?;
        }
        out.push((n, rho.entropy_bits()?));
    }
    Ok(out)
}

/// Whether history `h` perturbs step `n` (1-based); the first step is the
/// most significant bit of `h`.
pub fn history_bit(h: usize, n: usize, steps: usize) -> bool {
    (h >> (steps - n)) & 1 == 1
}

/// Final states of all 2^n perturbation histories, in history-index order.
pub fn history_ensemble(cfg: &ExperimentConfig, n: usize) -> Result<Vec<DensityMatrix>> {
    history_ensemble_with(cfg, n, &perturbation_unitary)
}

/// As `history_ensemble` with a caller-chosen kick per perturbed step.
pub fn history_ensemble_with(
    cfg: &ExperimentConfig,
    n: usize,
    kick: &(dyn Fn(Spin) -> UnitaryOperator + Sync),
) -> Result<Vec<DensityMatrix>> {
    if n == 0 || n > 6 {
        return Err(Error::Unsupported(format!("history ensembles need 1..=6 steps, got {n}")));
    }
    let engine = cfg.engine()?;
    let (odd, even) = step_sequences(cfg.map, &cfg.model);
    let rho0 = initial_state().projector();
    (0..1usize << n)
        .into_par_iter()
        .map(|h| {
            let mut rho = rho0.clone();
            for step in 1..=n {
                let seq = if step % 2 == 1 { &odd } else { &even };
                rho = lindblad::run_sequence(&rho, seq, &engine)?;
                if history_bit(h, step, n) {
                    rho = rho.conjugate(&kick(perturbed_spin(cfg.map, step)))?;
                }
            }
            Ok(rho)
        })
        .collect()
}

pub fn average_rho(list: &[DensityMatrix]) -> Result<DensityMatrix> {
    let first = list.first().ok_or(Error::Empty)?;
    let d = first.dim();
    let mut sum = Mat::zeros(d, d);
    for r in list {
        if r.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: r.dim() });
        }
        sum += r.matrix();
    }
    DensityMatrix::from_matrix_unchecked(sum / C64::new(list.len() as f64, 0.0))
}

/// Group label of each list element; labels are 0..R with no gaps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    n_groups: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::Empty);
        }
        let n_groups = partition::block_count(&assignment);
        let mut seen = vec![false; n_groups];
        for &g in &assignment {
            seen[g] = true;
        }
        if let Some(g) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyGroup(g));
        }
        Ok(Self { assignment, n_groups })
    }

    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![0; n])
    }

    pub fn singletons(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn n_groups(&self) -> usize {
        self.n_groups
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Member indices of each group.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut g = vec![Vec::new(); self.n_groups];
        for (i, &r) in self.assignment.iter().enumerate() {
            g[r].push(i);
        }
        g
    }

    /// Bit mask of each group (lists up to 64 long).
    pub fn masks(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.n_groups];
        for (i, &r) in self.assignment.iter().enumerate() {
            m[r] |= 1 << i;
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct GroupingStats {
    pub probabilities: Vec<f64>,
    pub group_states: Vec<DensityMatrix>,
    pub group_entropies: Vec<f64>,
    /// Probability-weighted mean of the group entropies, bits.
    pub s_bar: f64,
    /// Information needed to name the group, bits.
    pub info: f64,
}

pub fn grouping_stats(partition: &Partition, list: &[DensityMatrix]) -> Result<GroupingStats> {
    if partition.len() != list.len() {
        return Err(Error::DimensionMismatch { expected: list.len(), found: partition.len() });
    }
    let n = list.len() as f64;
    let mut st = GroupingStats {
        probabilities: Vec::new(),
        group_states: Vec::new(),
        group_entropies: Vec::new(),
        s_bar: 0.0,
        info: 0.0,
    };
    for members in partition.groups() {
        let sub: Vec<DensityMatrix> = members.iter().map(|&i| list[i].clone()).collect();
        let rho = average_rho(&sub)?;
        let p = members.len() as f64 / n;
        let s = rho.entropy_bits()?;
        st.s_bar += p * s;
        st.info -= p * p.log2();
        st.probabilities.push(p);
        st.group_states.push(rho);
        st.group_entropies.push(s);
    }
    Ok(st)
}

/// S((a+b)/2) - (S(a) + S(b))/2 in bits.
pub fn js_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let mix = DensityMatrix::from_matrix_unchecked((a.matrix() + b.matrix()) * C64::new(0.5, 0.0))?;
    Ok(mix.entropy_bits()? - 0.5 * (a.entropy_bits()? + b.entropy_bits()?))
}

/// Seed R groups with distinct random members, then add the rest in list
/// order to the group whose running average is nearest.
pub fn greedy_grouping(list: &[DensityMatrix], r: usize, seed: u64) -> Result<Partition> {
    let n = list.len();
    if r < 1 || r > n {
        return Err(Error::GroupCount { r, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds = rand::seq::index::sample(&mut rng, n, r).into_vec();
    let mut assignment = vec![usize::MAX; n];
    let mut sums: Vec<Mat> = Vec::with_capacity(r);
    let mut counts = vec![1usize; r];
    for (g, &i) in seeds.iter().enumerate() {
        assignment[i] = g;
        sums.push(list[i].matrix().clone());
    }
    for i in 0..n {
        if assignment[i] != usize::MAX {
            continue;
        }
        let mut best = (f64::INFINITY, 0);
        for g in 0..r {
            let avg = DensityMatrix::from_matrix_unchecked(&sums[g] / C64::new(counts[g] as f64, 0.0))?;
            let d = js_distance(&avg, &list[i])?;
            if d < best.0 {
                best = (d, g);
            }
        }
        let g = best.1;
        assignment[i] = g;
        sums[g] += list[i].matrix();
        counts[g] += 1;
    }
    // relabel in order of first appearance so labels are canonical
    let mut map = vec![usize::MAX; r];
    let mut next = 0;
    for a in assignment.iter_mut() {
        if map[*a] == usize::MAX {
            map[*a] = next;
            next += 1;
        }
        *a = map[*a];
    }
    Partition::new(assignment)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Entropy reduction S_max - S_bar, bits.
    pub delta_s: f64,
    /// Grouping information, bits.
    pub info: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Greedy,
    Exhaustive,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Greedy => "greedy",
            Provenance::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypersensitivityCurve {
    /// Ascending in delta_s.
    pub points: Vec<CurvePoint>,
    pub provenance: Provenance,
}

impl HypersensitivityCurve {
    /// I_min at the given entropy reduction; None beyond the largest one.
    pub fn imin_at(&self, delta_s: f64) -> Option<f64> {
        self.points.iter().find(|p| p.delta_s >= delta_s - DS_MERGE_TOL).map(|p| p.info)
    }

    /// Least-squares slope of I_min against delta_s over the interior
    /// 20%-80% of the achieved range.
    pub fn slope(&self) -> Option<f64> {
        let lo = self.points.first()?.delta_s;
        let hi = self.points.last()?.delta_s;
        let (a, b) = (lo + 0.2 * (hi - lo), lo + 0.8 * (hi - lo));
        let sel: Vec<&CurvePoint> = self.points.iter().filter(|p| p.delta_s >= a && p.delta_s <= b).collect();
        if sel.len() < 2 {
            return None;
        }
        let n = sel.len() as f64;
        let mx = sel.iter().map(|p| p.delta_s).sum::<f64>() / n;
        let my = sel.iter().map(|p| p.info).sum::<f64>() / n;
        let sxy: f64 = sel.iter().map(|p| (p.delta_s - mx) * (p.info - my)).sum();
        let sxx: f64 = sel.iter().map(|p| (p.delta_s - mx).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        Some(sxy / sxx)
    }
}

/// Lower envelope I_min(dS) = min{I : delta_s >= dS}, one point per distinct
/// achieved delta_s (values closer than `DS_MERGE_TOL` are merged).
pub fn frontier(points: &[CurvePoint], provenance: Provenance) -> HypersensitivityCurve {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.delta_s.total_cmp(&b.delta_s).then(a.info.total_cmp(&b.info)));
    // clusters of equal delta_s, keeping the largest value and smallest I
    let mut clusters: Vec<CurvePoint> = Vec::new();
    let mut start = f64::NEG_INFINITY;
    for p in sorted {
        match clusters.last_mut() {
            Some(c) if p.delta_s - start <= DS_MERGE_TOL => {
                c.delta_s = p.delta_s;
                c.info = c.info.min(p.info);
            }
            _ => {
                start = p.delta_s;
                clusters.push(p);
            }
        }
    }
    let mut running = f64::INFINITY;
    for c in clusters.iter_mut().rev() {
        running = running.min(c.info);
        c.info = running;
    }
    HypersensitivityCurve { points: clusters, provenance }
}

/// Every set partition of the list scored as (delta_s, I).
#[derive(Debug, Clone)]
pub struct ExhaustiveScan {
    pub s_bar_max: f64,
    pub points: Vec<CurvePoint>,
    pub partitions: Vec<Vec<usize>>,
}

pub const MAX_EXHAUSTIVE: usize = 10;

pub fn exhaustive_scan(list: &[DensityMatrix]) -> Result<ExhaustiveScan> {
    let n = list.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if n > MAX_EXHAUSTIVE {
        return Err(Error::TooMany(n));
    }
    // entropy of the average over every nonempty subset
    let subset_entropy: Vec<f64> = (0..1u64 << n)
        .into_par_iter()
        .map(|mask| {
            if mask == 0 {
                return Ok(0.0);
            }
            let sub: Vec<DensityMatrix> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| list[i].clone()).collect();
            average_rho(&sub)?.entropy_bits()
        })
        .collect::<Result<_>>()?;
    let full = (1u64 << n) - 1;
    let s_bar_max = subset_entropy[full as usize];
    let mut points = Vec::new();
    let mut partitions = Vec::new();
    for a in SetPartitions::new(n) {
        let p = Partition::new(a.clone())?;
        let (mut s_bar, mut info) = (0.0, 0.0);
        for m in p.masks() {
            let pr = m.count_ones() as f64 / n as f64;
            s_bar += pr * subset_entropy[m as usize];
            info -= pr * pr.log2();
        }
        points.push(CurvePoint { delta_s: s_bar_max - s_bar, info });
        partitions.push(a);
    }
    Ok(ExhaustiveScan { s_bar_max, points, partitions })
}

pub fn exhaustive_imin(list: &[DensityMatrix]) -> Result<HypersensitivityCurve> {
    Ok(frontier(&exhaustive_scan(list)?.points, Provenance::Exhaustive))
}

pub const GREEDY_RESTARTS: usize = 64;

fn restart_seed(seed: u64, r: usize, k: usize) -> u64 {
    seed ^ ((r as u64) << 32 | k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Scores of all greedy groupings for R = 1..=N with `restarts` seeds each.
pub fn greedy_points(list: &[DensityMatrix], seed: u64, restarts: usize) -> Result<Vec<CurvePoint>> {
    let n = list.len();
    let s_max = average_rho(list)?.entropy_bits()?;
    let jobs: Vec<(usize, usize)> = (1..=n).flat_map(|r| (0..restarts).map(move |k| (r, k))).collect();
    jobs.par_iter()
        .map(|&(r, k)| {
            let p = greedy_grouping(list, r, restart_seed(seed, r, k))?;
            let st = grouping_stats(&p, list)?;
            Ok(CurvePoint { delta_s: s_max - st.s_bar, info: st.info })
        })
        .collect()
}

/// Best greedy points: the lower envelope of all restarts.
pub fn greedy_curve(list: &[DensityMatrix], seed: u64, restarts: usize) -> Result<HypersensitivityCurve> {
    Ok(frontier(&greedy_points(list, seed, restarts)?, Provenance::Greedy))
}

#[derive(Debug, Clone)]
pub struct HyperResult {
    pub s_bar_max: f64,
    pub mean_entropy: f64,
    pub exhaustive: HypersensitivityCurve,
    pub greedy: HypersensitivityCurve,
    pub greedy_points: Vec<CurvePoint>,
    pub scan: ExhaustiveScan,
    pub slope: Option<f64>,
}

/// Ensemble of 2^steps histories, exhaustive and greedy frontiers, slope.
pub fn hypersensitivity_experiment(cfg: &ExperimentConfig) -> Result<HyperResult> {
    let list = history_ensemble(cfg, cfg.steps)?;
    let scan = exhaustive_scan(&list)?;
    let exhaustive = frontier(&scan.points, Provenance::Exhaustive);
    let gp = greedy_points(&list, cfg.seed, GREEDY_RESTARTS)?;
    let greedy = frontier(&gp, Provenance::Greedy);
    let mut mean_entropy = 0.0;
    for r in &list {
        mean_entropy += r.entropy_bits()? / list.len() as f64;
    }
    Ok(HyperResult {
        s_bar_max: scan.s_bar_max,
        mean_entropy,
        slope: exhaustive.slope(),
        exhaustive,
        greedy,
        greedy_points: gp,
        scan,
    })
}
