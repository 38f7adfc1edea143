//! Command-line front end: configuration resolution, experiment runs and
//! output formatting for the `bakernmr` binary.
//!
//! Settings are resolved in three layers: the preset, then an optional flat
//! INI file (`--config`), then command-line flags. Every output starts with
//! the fully resolved configuration as `# key=value` lines.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use bakernmr::baker::{self, BitString, MapVariant};
use bakernmr::chaos::{self, ExperimentConfig, HyperResult, MapKind, Preset};
use bakernmr::lindblad::{self, EvolutionEngine, NoiseModel};
use bakernmr::nmr::{self, FrequencyConvention, HamiltonianModel, HamiltonianVariant, Spin};
use bakernmr::qstate::{max_abs, phase_invariant_distance};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("unknown configuration key '{key}' in {path}")]
    UnknownKey { key: String, path: String },
    #[error(transparent)]
    Sim(#[from] bakernmr::Error),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("plot data line {line}: {msg}")]
    PlotParse { line: usize, msg: String },
    #[error("nothing to plot: empty series")]
    EmptySeries,
}

impl CliError {
    /// 2 usage or configuration, 3 physics violation, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Sim(e) if e.is_physics_violation() => 3,
            CliError::Read { .. } | CliError::Write { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "bakernmr", version, about = "Quantum baker's map on a three-spin NMR register")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy S(n) versus step count.
    Entropy(Opts),
    /// Hypersensitivity to perturbation: I_min versus entropy reduction.
    Hyper(Opts),
    /// Run the built-in consistency checks.
    Verify(Opts),
    /// Print a canned pulse sequence.
    Compile {
        #[arg(value_enum)]
        sequence: SequenceArg,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Flat key = value file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    #[arg(long, value_enum)]
    pub map: Option<MapArg>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// 1/Gamma of the proton, seconds.
    #[arg(long)]
    pub gamma_h: Option<f64>,
    /// 1/Gamma of carbon 1, seconds.
    #[arg(long)]
    pub gamma_c1: Option<f64>,
    /// 1/Gamma of carbon 2, seconds.
    #[arg(long)]
    pub gamma_c2: Option<f64>,
    #[arg(long, value_enum)]
    pub hamiltonian: Option<HamiltonianArg>,
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    #[arg(long, value_enum)]
    pub perturbation: Option<PerturbationArg>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapArg {
    Chaotic,
    Regular,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HamiltonianArg {
    Full,
    Noxy,
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Angular,
    Cycles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PerturbationArg {
    None,
    Superoperator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Gnuplot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequenceArg {
    TOdd,
    TEven,
    TEvenUncorrected,
    TRegular,
    FullBaker,
}

impl SequenceArg {
    fn name(self) -> &'static str {
        match self {
            SequenceArg::TOdd => "t_odd",
            SequenceArg::TEven => "t_even",
            SequenceArg::TEvenUncorrected => "t_even_uncorrected",
            SequenceArg::TRegular => "t_regular",
            SequenceArg::FullBaker => "full_baker",
        }
    }
}

fn label<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

/// Everything a run needs, with all defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub preset: PresetArg,
    pub map: MapArg,
    pub steps: usize,
    pub seed: u64,
    /// 1/Gamma for H, C1, C2 in seconds.
    pub times: [f64; 3],
    pub hamiltonian: HamiltonianArg,
    pub convention: ConventionArg,
    pub perturbation: PerturbationArg,
    pub format: FormatArg,
    pub out: Option<PathBuf>,
}

/// Keys accepted in a `--config` file (dashes may replace underscores), in
/// addition to the informational `command`, `version` and `method`.
pub const CONFIG_KEYS: [&str; 12] = [
    "preset",
    "map",
    "steps",
    "seed",
    "gamma_h",
    "gamma_c1",
    "gamma_c2",
    "hamiltonian",
    "convention",
    "perturbation",
    "format",
    "out",
];

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T> {
    T::from_str(v, false).map_err(|_| CliError::Usage(format!("invalid value '{v}' for {key}")))
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| CliError::Usage(format!("invalid value '{v}' for {key}")))
}

/// Read a flat INI file into `Opts`. Sections and unknown keys are errors.
pub fn load_config(path: &Path) -> Result<Opts> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: shown.clone(), source })?;
    let ini = ini::Ini::load_from_str(&text).map_err(|e| CliError::Usage(format!("{shown}: {e}")))?;
    let mut o = Opts::default();
    for (section, props) in ini.iter() {
        if let Some(s) = section {
            return Err(CliError::Usage(format!("{shown}: sections are not supported ([{s}])")));
        }
        for (raw_key, v) in props.iter() {
            let key = raw_key.replace('-', "_");
            let v = v.trim();
            match key.as_str() {
                "preset" => o.preset = Some(parse_enum(&key, v)?),
                "map" => o.map = Some(parse_enum(&key, v)?),
                "steps" => o.steps = Some(parse_num(&key, v)?),
                "seed" => o.seed = Some(parse_num(&key, v)?),
                "gamma_h" => o.gamma_h = Some(parse_num(&key, v)?),
                "gamma_c1" => o.gamma_c1 = Some(parse_num(&key, v)?),
                "gamma_c2" => o.gamma_c2 = Some(parse_num(&key, v)?),
                "hamiltonian" => o.hamiltonian = Some(parse_enum(&key, v)?),
                "convention" => o.convention = Some(parse_enum(&key, v)?),
                "perturbation" => o.perturbation = Some(parse_enum(&key, v)?),
                "format" => o.format = Some(parse_enum(&key, v)?),
                "out" => o.out = if v == "-" { None } else { Some(PathBuf::from(v)) },
                // written into every output header; accepted so a header can be fed back
                "command" | "version" => {}
                "method" if v == "superoperator_expm" => {}
                "method" => return Err(CliError::Usage(format!("{shown}: unsupported method '{v}'"))),
                _ => return Err(CliError::UnknownKey { key: raw_key.to_string(), path: shown }),
            }
        }
    }
    Ok(o)
}

fn merge(base: Opts, top: &Opts) -> Opts {
    Opts {
        config: None,
        preset: top.preset.or(base.preset),
        map: top.map.or(base.map),
        steps: top.steps.or(base.steps),
        seed: top.seed.or(base.seed),
        gamma_h: top.gamma_h.or(base.gamma_h),
        gamma_c1: top.gamma_c1.or(base.gamma_c1),
        gamma_c2: top.gamma_c2.or(base.gamma_c2),
        hamiltonian: top.hamiltonian.or(base.hamiltonian),
        convention: top.convention.or(base.convention),
        perturbation: top.perturbation.or(base.perturbation),
        format: top.format.or(base.format),
        out: top.out.clone().or(base.out),
    }
}

/// Preset defaults: (1/Gamma times, perturbation, steps).
fn preset_defaults(p: PresetArg) -> Option<([f64; 3], bool, usize)> {
    match p {
        PresetArg::Fig2 => Some((Preset::Fig2.times(), false, 6)),
        PresetArg::Fig3 => Some((Preset::Fig3.times(), false, 6)),
        PresetArg::Fig4 => Some((Preset::Fig4.times(), true, 6)),
        PresetArg::Fig5 => Some((Preset::Fig2.times(), false, 3)),
        PresetArg::Custom => None,
    }
}

pub fn resolve(command: &'static str, cli: &Opts) -> Result<RunConfig> {
    let opts = match &cli.config {
        Some(p) => merge(load_config(p)?, cli),
        None => cli.clone(),
    };
    let preset = opts.preset.unwrap_or(PresetArg::Fig2);
    let (times, perturbed, steps) = match preset_defaults(preset) {
        Some(d) => d,
        None => {
            let (Some(h), Some(c1), Some(c2)) = (opts.gamma_h, opts.gamma_c1, opts.gamma_c2) else {
                return Err(CliError::Usage("preset custom needs gamma_h, gamma_c1 and gamma_c2".into()));
            };
            ([h, c1, c2], false, 6)
        }
    };
    let times = [
        opts.gamma_h.unwrap_or(times[0]),
        opts.gamma_c1.unwrap_or(times[1]),
        opts.gamma_c2.unwrap_or(times[2]),
    ];
    for t in times {
        if !(t > 0.0) {
            return Err(CliError::Usage(format!("1/Gamma times must be positive seconds, got {t}")));
        }
    }
    let default_map = if command == "entropy" { MapArg::Both } else { MapArg::Chaotic };
    let cfg = RunConfig {
        command,
        preset,
        map: opts.map.unwrap_or(default_map),
        steps: opts.steps.unwrap_or(steps),
        seed: opts.seed.unwrap_or(1),
        times,
        hamiltonian: opts.hamiltonian.unwrap_or(HamiltonianArg::Noxy),
        convention: opts.convention.unwrap_or(ConventionArg::Angular),
        perturbation: opts
            .perturbation
            .unwrap_or(if perturbed { PerturbationArg::Superoperator } else { PerturbationArg::None }),
        format: opts.format.unwrap_or(FormatArg::Csv),
        out: opts.out,
    };
    if cfg.steps < 1 {
        return Err(CliError::Usage("steps must be at least 1".into()));
    }
    if command == "hyper" && cfg.map == MapArg::Both {
        return Err(CliError::Usage("hyper runs one map at a time: choose chaotic or regular".into()));
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn model(&self) -> HamiltonianModel {
        let variant = match self.hamiltonian {
            HamiltonianArg::Full => HamiltonianVariant::Full,
            HamiltonianArg::Noxy => HamiltonianVariant::NoXY,
            HamiltonianArg::Simplified => HamiltonianVariant::Simplified,
        };
        let conv = match self.convention {
            ConventionArg::Angular => FrequencyConvention::Angular,
            ConventionArg::Cycles => FrequencyConvention::Cycles,
        };
        HamiltonianModel::measured(variant).with_convention(conv)
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        let [h, c1, c2] = self.times;
        Ok(NoiseModel::from_times(h, c1, c2)?)
    }

    pub fn experiment(&self, map: MapKind) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            map,
            model: self.model(),
            noise: self.noise()?,
            steps: self.steps,
            perturbation: self.perturbation == PerturbationArg::Superoperator,
            seed: self.seed,
        })
    }

    fn maps(&self) -> Vec<MapKind> {
        match self.map {
            MapArg::Chaotic => vec![MapKind::Chaotic],
            MapArg::Regular => vec![MapKind::Regular],
            MapArg::Both => vec![MapKind::Chaotic, MapKind::Regular],
        }
    }

    /// The resolved settings in a fixed order.
    pub fn header(&self) -> Vec<(String, String)> {
        vec![
            ("command".into(), self.command.into()),
            ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ("preset".into(), label(&self.preset)),
            ("map".into(), label(&self.map)),
            ("steps".into(), self.steps.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("gamma_h".into(), fmt_f64(self.times[0])),
            ("gamma_c1".into(), fmt_f64(self.times[1])),
            ("gamma_c2".into(), fmt_f64(self.times[2])),
            ("hamiltonian".into(), label(&self.hamiltonian)),
            ("convention".into(), label(&self.convention)),
            ("perturbation".into(), label(&self.perturbation)),
            ("method".into(), "superoperator_expm".into()),
            ("format".into(), label(&self.format)),
            ("out".into(), self.out.as_ref().map_or("-".into(), |p| p.display().to_string())),
        ]
    }

    fn header_block(&self) -> String {
        self.header().iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
    }
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Numeric columns for gnuplot with a single `#` header line.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Whitespace-separated columns; the header names each column and carries
/// the run settings.
pub fn emit_plot_data(series: &PlotSeries) -> Result<String> {
    if series.rows.is_empty() || series.columns.is_empty() {
        return Err(CliError::EmptySeries);
    }
    let mut out = String::from("#");
    for (k, v) in &series.meta {
        write!(out, " {k}={v}").unwrap();
    }
    write!(out, " columns={}", series.columns.join(",")).unwrap();
    out.push('\n');
    for row in &series.rows {
        if row.len() != series.columns.len() {
            return Err(CliError::Usage(format!("row has {} values for {} columns", row.len(), series.columns.len())));
        }
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_plot_data(text: &str) -> Result<PlotSeries> {
    let mut lines = text.lines().enumerate();
    let (_, head) = lines.next().ok_or(CliError::EmptySeries)?;
    let head = head.strip_prefix('#').ok_or(CliError::PlotParse { line: 1, msg: "missing header".into() })?;
    let mut meta = Vec::new();
    let mut columns = Vec::new();
    for kv in head.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::PlotParse { line: 1, msg: format!("bad field {kv}") })?;
        if k == "columns" {
            columns = v.split(',').map(str::to_string).collect();
        } else {
            meta.push((k.to_string(), v.to_string()));
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let row = line
            .split_whitespace()
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CliError::PlotParse { line: i + 1, msg: e.to_string() })?;
        if row.len() != columns.len() {
            return Err(CliError::PlotParse { line: i + 1, msg: format!("expected {} columns", columns.len()) });
        }
        rows.push(row);
    }
    Ok(PlotSeries { meta, columns, rows })
}

pub fn entropy_output(cfg: &RunConfig) -> Result<String> {
    let maps = cfg.maps();
    let mut series = Vec::new();
    for &m in &maps {
        series.push((m, chaos::entropy_experiment(&cfg.experiment(m)?)?));
    }
    match cfg.format {
        FormatArg::Csv => {
            let mut out = cfg.header_block();
            out.push_str("step,variant,entropy_bits\n");
            for (m, s) in &series {
                for (n, v) in s {
                    writeln!(out, "{n},{m},{}", fmt_f64(*v)).unwrap();
                }
            }
            Ok(out)
        }
        FormatArg::Gnuplot => {
            let mut columns = vec!["step".to_string()];
            columns.extend(maps.iter().map(|m| format!("entropy_bits_{m}")));
            let rows = (0..=cfg.steps)
                .map(|n| {
                    let mut r = vec![n as f64];
                    r.extend(series.iter().map(|(_, s)| s[n].1));
                    r
                })
                .collect();
            emit_plot_data(&PlotSeries { meta: cfg.header(), columns, rows })
        }
    }
}

fn summary(h: &HyperResult) -> Vec<(String, String)> {
    vec![
        ("s_bar_max".into(), fmt_f64(h.s_bar_max)),
        ("slope".into(), h.slope.map_or("nan".into(), fmt_f64)),
        ("mean_entropy".into(), fmt_f64(h.mean_entropy)),
        ("greedy_restarts".into(), chaos::GREEDY_RESTARTS.to_string()),
    ]
}

pub fn hyper_output(cfg: &RunConfig) -> Result<String> {
    let map = cfg.maps()[0];
    let h = chaos::hypersensitivity_experiment(&cfg.experiment(map)?)?;
    match cfg.format {
        FormatArg::Csv => {
            let mut out = cfg.header_block();
            out.push_str("delta_s_bits,i_min_bits,provenance\n");
            for curve in [&h.exhaustive, &h.greedy] {
                for p in &curve.points {
                    writeln!(out, "{},{},{}", fmt_f64(p.delta_s), fmt_f64(p.info), curve.provenance).unwrap();
                }
            }
            let s: Vec<String> = summary(&h).iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "# summary {}", s.join(" ")).unwrap();
            Ok(out)
        }
        FormatArg::Gnuplot => {
            let mut meta = cfg.header();
            meta.extend(summary(&h));
            let rows = h.exhaustive.points.iter().map(|p| vec![p.delta_s, p.info]).collect();
            emit_plot_data(&PlotSeries { meta, columns: vec!["delta_s_bits".into(), "i_min_bits".into()], rows })
        }
    }
}

/// One row of the verification table.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub distance: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &str, distance: f64, tolerance: f64) -> Self {
        Self { name: name.into(), distance, tolerance }
    }

    pub fn pass(&self) -> bool {
        self.distance < self.tolerance
    }
}

/// Gate-level, pulse-level and open-system consistency checks. Noiseless
/// checks use the diagonal Hamiltonian with j2 = j1/2 in the configured
/// convention; noisy ones use the configured model and noise.
pub fn verify_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let seq = baker::baker_gate_sequence(3)?;
    out.push(Check::new(
        "gate_sequence_vs_closed_form",
        phase_invariant_distance(&baker::sequence_product(&seq, 3)?, &baker::baker_unitary(3)?)?,
        1e-10,
    ));
    for (name, variant) in [("shift_full", MapVariant::Full), ("shift_simplified", MapVariant::Simplified)] {
        let u = baker::map_unitary(variant)?;
        let mut worst: f64 = 0.0;
        for b in BitString::all(3) {
            let dom = baker::shift_domain_state(&b, variant)?;
            let img = baker::shift_image_state(&b, variant)?;
            worst = worst.max(1.0 - img.fidelity(&u.apply(&dom)?)?);
        }
        out.push(Check::new(name, worst, 1e-10));
    }

    let conv = cfg.model().convention;
    let m = HamiltonianModel::exact_ratio().with_convention(conv);
    let pulse_checks = [
        (nmr::t_odd(&m), nmr::ideal_t_odd(), 1e-8),
        (nmr::t_even(&m), nmr::ideal_t_even(), 1e-8),
        (nmr::t_regular(&m), nmr::ideal_t_regular(&m), 1e-10),
        (nmr::full_baker(&m), nmr::ideal_full_baker(), 1e-7),
    ];
    for (seq, ideal, tol) in &pulse_checks {
        let r = nmr::verify_sequence(seq, ideal, &m, *tol)?;
        out.push(Check::new(&format!("pulses_{}", r.name), r.distance, *tol));
    }
    let t1 = m.tau1();
    for (seq, units) in [(nmr::t_odd(&m), 7.0), (nmr::t_even(&m), 14.0), (nmr::t_regular(&m), 10.5)] {
        out.push(Check::new(&format!("delay_{}", seq.name), (seq.total_delay() / t1 - units).abs(), 1e-12));
    }
    for (a, b) in [(Spin::C1, Spin::H), (Spin::C1, Spin::C2)] {
        let u = nmr::sequence_unitary(&nmr::swap_pulses(a, b, &m)?, &m)?;
        out.push(Check::new(&format!("swap_{a}_{b}"), phase_invariant_distance(&u, &nmr::spin_swap(a, b)?)?, 1e-8));
    }

    let model = cfg.model();
    let noise = cfg.noise()?;
    let engine = EvolutionEngine::exact(model, noise)?;
    let psi0 = chaos::initial_state();
    let rho0 = psi0.projector();
    let mut rk4_gap: f64 = 0.0;
    for t in nmr::t_odd(&model).distinct_delays() {
        let a = engine.apply_delay(rho0.matrix(), t)?;
        let b = engine.rk4_evolve(rho0.matrix(), t, model.tau1() / 200.0);
        rk4_gap = rk4_gap.max(max_abs(&(a - b)));
    }
    out.push(Check::new("lindblad_expm_vs_rk4", rk4_gap, 1e-6));
    // coherences between states differing on one spin, under the diagonal model
    let diag = EvolutionEngine::exact(model.with_variant(HamiltonianVariant::NoXY), noise)?;
    let mut deph: f64 = 0.0;
    for (j, g) in [(4, noise.gamma_h), (2, noise.gamma_c1), (1, noise.gamma_c2)] {
        for t in [0.01, 0.1] {
            let r = diag.apply_delay(rho0.matrix(), t)?;
            deph = deph.max((r[(0, j)].norm() - rho0.matrix()[(0, j)].norm() * (-2.0 * g * t).exp()).abs());
        }
    }
    out.push(Check::new("lindblad_dephasing", deph, 1e-8));

    let mut integrity: f64 = 0.0;
    for map in [MapKind::Chaotic, MapKind::Regular] {
        let ec = cfg.experiment(map)?;
        let (odd, even) = chaos::step_sequences(map, &ec.model);
        let mut rho = rho0.clone();
        for n in 1..=6 {
            rho = lindblad::run_sequence(&rho, if n % 2 == 1 { &odd } else { &even }, &engine)?;
            integrity = integrity.max((rho.trace().re - 1.0).abs()).max(-rho.min_eigenvalue());
        }
    }
    out.push(Check::new("state_integrity", integrity, 1e-9));

    let ec = cfg.experiment(MapKind::Chaotic)?.with_steps(3);
    let scan = chaos::exhaustive_scan(&chaos::history_ensemble(&ec, 3)?)?;
    let excess = scan.points.iter().map(|p| p.delta_s - p.info).fold(0.0, f64::max);
    out.push(Check::new("information_bound", excess, 1e-12));
    Ok(out)
}

pub fn verify_output(cfg: &RunConfig) -> Result<(String, bool)> {
    let checks = verify_checks(cfg)?;
    let mut out = cfg.header_block();
    out.push_str("check,distance,tolerance,result\n");
    let mut ok = true;
    for c in &checks {
        ok &= c.pass();
        writeln!(
            out,
            "{},{},{},{}",
            c.name,
            fmt_f64(c.distance),
            fmt_f64(c.tolerance),
            if c.pass() { "PASS" } else { "FAIL" }
        )
        .unwrap();
    }
    Ok((out, ok))
}

pub fn compile_output(cfg: &RunConfig, sequence: SequenceArg) -> Result<String> {
    let seq = nmr::named_sequence(sequence.name(), &cfg.model())?;
    let mut out = cfg.header_block();
    out.push_str(&nmr::dump(&seq));
    Ok(out)
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write { path: p.display().to_string(), source }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
        }
    }
}

/// Run one invocation; returns the process exit status on success.
pub fn run(cli: &Cli) -> Result<i32> {
    let (cfg, text, status) = match &cli.command {
        Command::Entropy(o) => {
            let cfg = resolve("entropy", o)?;
            let text = entropy_output(&cfg)?;
            (cfg, text, 0)
        }
        Command::Hyper(o) => {
            let cfg = resolve("hyper", o)?;
            let text = hyper_output(&cfg)?;
            (cfg, text, 0)
        }
        Command::Verify(o) => {
            let cfg = resolve("verify", o)?;
            let (text, ok) = verify_output(&cfg)?;
            (cfg, text, if ok { 0 } else { 1 })
        }
        Command::Compile { sequence, opts } => {
            let cfg = resolve("compile", opts)?;
            let text = compile_output(&cfg, *sequence)?;
            (cfg, text, 0)
        }
    };
    write_output(&cfg, &text)?;
    Ok(status)
}
