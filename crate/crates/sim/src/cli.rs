//! The `rbf` command line.
//!
//! Exit codes: 0 on success, 2 for unparseable or invalid flags, 1 when a
//! valid request fails at run time.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rbf_core::bounds::{max_messages, optimal_k, per_insert_fp, worst_case_fp, Bound, BoundReport, DEFAULT_SEARCH_CAP};
use rbf_core::markov::{CapacityConvention, ModelVariant, SigmaModel};
use rbf_core::planner::{compare_capacities, one_vs_two_phase, CapacityNormalization, CapacityPlan, PlannerOptions};
use rbf_core::{FilterParams, HashVariant, Phases, RecyclePolicy, Retention, TwoPhaseInsert};

use crate::error::{Result, SimError};
use crate::experiment::{run_experiment, ExperimentConfig};
use crate::format::{report_table, steady_table, transition_table, Cell, Format, Table};
use crate::workload::Workload;

/// Environment variable holding the default simulation seed.
pub const SEED_ENV: &str = "RBF_SEED";
const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "rbf",
    version,
    about = "Recycling Bloom filters: exact models, bounds, capacity planning and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Long-run false-positive rate and expected messages per cycle of a
    /// σ-bounded filter.
    Model(ModelArgs),
    /// Worst-case, oracle and average-case rates of an N-bounded filter.
    Bounds(BoundsArgs),
    /// Best σ-bounded configuration and the N-bounded capacities for a
    /// target rate.
    Plan(PlanArgs),
    /// Run a multi-epoch simulation.
    Simulate(SimulateArgs),
    /// Capacity of every model over a grid of filter sizes and targets.
    Compare(CompareArgs),
    /// One-phase over two-phase capacity across targets.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HashArg {
    Colliding,
    #[value(name = "noncolliding", alias = "non-colliding")]
    NonColliding,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RetentionArg {
    Retaining,
    #[value(name = "nonretaining", alias = "non-retaining")]
    NonRetaining,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PhasesArg {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InsertArg {
    OnCombinedMiss,
    Always,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Strict,
    Literal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NormalizationArg {
    PerSwap,
    PerTotalMemory,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<HashArg> for HashVariant {
    fn from(a: HashArg) -> Self {
        match a {
            HashArg::Colliding => HashVariant::Colliding,
            HashArg::NonColliding => HashVariant::NonColliding,
        }
    }
}

impl From<RetentionArg> for Retention {
    fn from(a: RetentionArg) -> Self {
        match a {
            RetentionArg::Retaining => Retention::Retaining,
            RetentionArg::NonRetaining => Retention::NonRetaining,
        }
    }
}

impl From<PhasesArg> for Phases {
    fn from(a: PhasesArg) -> Self {
        match a {
            PhasesArg::One => Phases::One,
            PhasesArg::Two => Phases::Two,
        }
    }
}

impl From<InsertArg> for TwoPhaseInsert {
    fn from(a: InsertArg) -> Self {
        match a {
            InsertArg::OnCombinedMiss => TwoPhaseInsert::OnCombinedMiss,
            InsertArg::Always => TwoPhaseInsert::Always,
        }
    }
}

impl From<ConventionArg> for CapacityConvention {
    fn from(a: ConventionArg) -> Self {
        match a {
            ConventionArg::Strict => CapacityConvention::Strict,
            ConventionArg::Literal => CapacityConvention::Literal,
        }
    }
}

impl From<NormalizationArg> for CapacityNormalization {
    fn from(a: NormalizationArg) -> Self {
        match a {
            NormalizationArg::PerSwap => CapacityNormalization::PerSwap,
            NormalizationArg::PerTotalMemory => CapacityNormalization::PerTotalMemory,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Total filter size in bits (two phases: two arrays of floor(M/2)).
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub sigma: usize,
    #[arg(long, value_enum, default_value_t = HashArg::Colliding)]
    pub variant: HashArg,
    #[arg(long, value_enum, default_value_t = RetentionArg::NonRetaining)]
    pub retention: RetentionArg,
    #[arg(long, value_enum, default_value_t = PhasesArg::One)]
    pub phases: PhasesArg,
    #[arg(long, value_enum, default_value_t = ConventionArg::Strict)]
    pub convention: ConventionArg,
    /// Also write the transition table as `i,j,tau` CSV.
    #[arg(long)]
    pub dump_table: Option<PathBuf>,
    /// Also write the steady state as `i,pi` CSV.
    #[arg(long)]
    pub dump_steady: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    /// Counted insertions per cycle.
    #[arg(long = "N")]
    pub n: u64,
    /// Also invert each bound into a capacity at this rate.
    #[arg(long)]
    pub target: Option<f64>,
    /// Print `i,f_i` for every insertion instead of the summary row.
    #[arg(long)]
    pub per_insert: bool,
    #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
    pub cap: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PlannerArgs {
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    #[arg(long, default_value_t = 15)]
    pub k_max: usize,
    #[arg(long, value_enum, default_value_t = HashArg::Colliding)]
    pub variant: HashArg,
    #[arg(long, value_enum, default_value_t = ConventionArg::Strict)]
    pub convention: ConventionArg,
    /// Upper limit for the N-bounded searches.
    #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long)]
    pub target: f64,
    #[command(flatten)]
    pub planner: PlannerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Comma-separated filter sizes.
    #[arg(long = "M", value_delimiter = ',', default_values_t = [500, 1000, 2000, 4000])]
    pub m: Vec<usize>,
    /// Comma-separated target rates.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01])]
    pub target: Vec<f64>,
    #[command(flatten)]
    pub planner: PlannerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Total memory; each two-phase array gets floor(M/2) bits.
    #[arg(long = "M", default_value_t = 1000)]
    pub m: usize,
    /// Comma-separated target rates.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.01, 0.001, 0.0001])]
    pub target: Vec<f64>,
    #[arg(long, value_enum, default_value_t = NormalizationArg::PerSwap)]
    pub normalization: NormalizationArg,
    #[command(flatten)]
    pub planner: PlannerArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON experiment config; flags given explicitly override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, conflicts_with = "n")]
    pub sigma: Option<usize>,
    /// N-bounded recycling after N counted insertions.
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// N-bounded: count every new message, not only bit-setting ones.
    #[arg(long)]
    pub oracle_count: bool,
    #[arg(long, value_enum)]
    pub variant: Option<HashArg>,
    #[arg(long, value_enum)]
    pub retention: Option<RetentionArg>,
    #[arg(long, value_enum)]
    pub phases: Option<PhasesArg>,
    #[arg(long, value_enum)]
    pub two_phase_insert: Option<InsertArg>,
    /// Master seed [default: $RBF_SEED, else 1].
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Arrivals per epoch.
    #[arg(long)]
    pub arrivals: Option<u64>,
    /// Uniform arrivals over this many messages [default workload: 1000].
    #[arg(long, conflicts_with = "p_repeat")]
    pub universe: Option<u64>,
    /// Bernoulli repeats with this probability.
    #[arg(long)]
    pub p_repeat: Option<f64>,
    #[arg(long)]
    pub confidence: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_invalid_input() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Model(a) => model(a, stdout),
        Command::Bounds(a) => bounds(a, stdout),
        Command::Plan(a) => plan(a, stdout),
        Command::Simulate(a) => simulate(a, stdout),
        Command::Compare(a) => compare(a, stdout),
        Command::Sweep(a) => sweep(a, stdout),
    }
}

fn format_of(o: &OutputArgs) -> Format {
    match o.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn emit(output: &OutputArgs, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

fn emit_table(table: &Table, output: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    emit(output, stdout, |w| table.write(format_of(output), w))
}

fn write_csv_file(table: &Table, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn model(a: ModelArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = FilterParams {
        bits: a.m,
        hashes: a.k,
        hash_variant: a.variant.into(),
        retention: a.retention.into(),
        recycle: RecyclePolicy::SigmaBounded { sigma: a.sigma },
        phases: a.phases.into(),
        two_phase_insert: TwoPhaseInsert::default(),
    };
    params.validate()?;
    let variant = ModelVariant::new(params.hash_variant, params.retention);
    let bits = params.array_bits();
    if params.phases == Phases::Two && variant.retains() {
        return Err(SimError::InvalidConfig(
            "the two-phase model needs --retention nonretaining".into(),
        ));
    }
    let model = SigmaModel::solve(variant, bits, a.k, a.sigma)?;
    if let Some(path) = &a.dump_table {
        write_csv_file(&transition_table(&model.table), path)?;
    }
    if let Some(path) = &a.dump_steady {
        write_csv_file(&steady_table(&model.steady), path)?;
    }
    let f2 = match params.phases {
        Phases::One => None,
        Phases::Two => Some(model.two_phase_fp()?),
    };
    let capacity = match variant.retains() {
        true => None,
        false => Some(model.expected_capacity(a.convention.into())?),
    };
    let mut t = Table::new(vec![
        "M",
        "k",
        "sigma",
        "variant",
        "array_bits",
        "f_sigma_1",
        "f_sigma_2",
        "expected_messages",
    ]);
    t.push(vec![
        a.m.into(),
        a.k.into(),
        a.sigma.into(),
        variant.tag().into(),
        bits.into(),
        model.one_phase_fp().into(),
        f2.into(),
        capacity.into(),
    ]);
    emit_table(&t, &a.output, stdout)
}

fn bounds(a: BoundsArgs, stdout: &mut dyn Write) -> Result<()> {
    if let Some(t) = a.target {
        if !(t > 0.0 && t < 1.0) {
            return Err(SimError::InvalidConfig(format!("target must lie in (0, 1) (got {t})")));
        }
    }
    let report = BoundReport::compute(a.m, a.k, a.n, false)?;
    if a.per_insert {
        let mut t = Table::new(vec!["i", "f_i"]);
        for (i, f) in per_insert_fp(a.m, a.k, a.n).into_iter().enumerate() {
            t.push(vec![(i + 1).into(), f.into()]);
        }
        return emit_table(&t, &a.output, stdout);
    }
    let caps = a.target.map(|target| {
        [Bound::WorstCase, Bound::AverageCase, Bound::Oracle].map(|b| max_messages(b, a.m, a.k, target, a.cap))
    });
    let mut t = Table::new(vec![
        "M", "k", "N", "f_w", "f_w_last", "f_o", "f_a", "optimal_k", "target", "n_worst", "n_avg", "n_oracle",
    ]);
    t.push(vec![
        a.m.into(),
        a.k.into(),
        a.n.into(),
        report.worst_case.into(),
        worst_case_fp(a.m, a.k, a.n - 1).into(),
        report.oracle.into(),
        report.average_case.into(),
        optimal_k(a.m, a.n).into(),
        a.target.into(),
        caps.map(|c| c[0]).into(),
        caps.map(|c| c[1]).into(),
        caps.map(|c| c[2]).into(),
    ]);
    emit_table(&t, &a.output, stdout)
}

fn planner_options(p: &PlannerArgs) -> Result<PlannerOptions> {
    if p.k_min < 1 || p.k_min > p.k_max {
        return Err(SimError::InvalidConfig(format!(
            "hash range must satisfy 1 <= k-min <= k-max (got {}..={})",
            p.k_min, p.k_max
        )));
    }
    Ok(PlannerOptions {
        variant: ModelVariant::new(p.variant.into(), Retention::NonRetaining),
        hashes: p.k_min..=p.k_max,
        convention: p.convention.into(),
        search_cap: p.cap,
    })
}

const PLAN_HEADER: [&str; 14] = [
    "M",
    "target",
    "best_sigma",
    "best_k",
    "expected_messages_sigma",
    "n_worst",
    "k_worst",
    "n_avg",
    "k_avg",
    "n_oracle",
    "k_oracle",
    "ratio_worst",
    "ratio_avg",
    "ratio_oracle",
];

fn plan_row(p: &CapacityPlan) -> Vec<Cell> {
    vec![
        p.bits.into(),
        p.target.into(),
        p.best_sigma.into(),
        p.best_k.into(),
        p.expected_messages_sigma.into(),
        p.n_worst.into(),
        p.k_worst.into(),
        p.n_avg.into(),
        p.k_avg.into(),
        p.n_oracle.into(),
        p.k_oracle.into(),
        p.ratio_worst.into(),
        p.ratio_avg.into(),
        p.ratio_oracle.into(),
    ]
}

fn plan(a: PlanArgs, stdout: &mut dyn Write) -> Result<()> {
    let opts = planner_options(&a.planner)?;
    let mut t = Table::new(PLAN_HEADER.to_vec());
    t.push(plan_row(&compare_capacities(a.m, a.target, &opts)?));
    emit_table(&t, &a.output, stdout)
}

fn compare(a: CompareArgs, stdout: &mut dyn Write) -> Result<()> {
    let opts = planner_options(&a.planner)?;
    let mut t = Table::new(PLAN_HEADER.to_vec());
    for &m in &a.m {
        for &target in &a.target {
            t.push(plan_row(&compare_capacities(m, target, &opts)?));
        }
    }
    emit_table(&t, &a.output, stdout)
}

fn sweep(a: SweepArgs, stdout: &mut dyn Write) -> Result<()> {
    let opts = planner_options(&a.planner)?;
    let normalization: CapacityNormalization = a.normalization.into();
    let mut t = Table::new(vec![
        "M",
        "target",
        "normalization",
        "one_sigma",
        "one_k",
        "one_expected_messages",
        "one_fp",
        "two_array_bits",
        "two_sigma",
        "two_k",
        "two_expected_messages",
        "two_fp",
        "ratio",
    ]);
    let label = match normalization {
        CapacityNormalization::PerSwap => "per-swap",
        CapacityNormalization::PerTotalMemory => "per-total-memory",
    };
    for &target in &a.target {
        let c = one_vs_two_phase(a.m, target, &opts, normalization)?;
        t.push(vec![
            a.m.into(),
            target.into(),
            label.into(),
            c.one_phase.sigma.into(),
            c.one_phase.hashes.into(),
            c.one_phase.expected_messages.into(),
            c.one_phase.fp_rate.into(),
            c.two_phase.bits.into(),
            c.two_phase.sigma.into(),
            c.two_phase.hashes.into(),
            c.two_phase.expected_messages.into(),
            c.two_phase.fp_rate.into(),
            c.ratio.into(),
        ]);
    }
    emit_table(&t, &a.output, stdout)
}

fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| SimError::InvalidConfig(format!("{SEED_ENV} must be an unsigned integer (got {s:?})"))),
        Err(_) => Ok(None),
    }
}

/// Explicit flags, then the config file, then `$RBF_SEED` (seed only),
/// then defaults.
fn experiment_config(a: &SimulateArgs) -> Result<ExperimentConfig> {
    let base = match &a.config {
        Some(path) => Some(serde_json::from_reader::<_, ExperimentConfig>(File::open(path)?)?),
        None => None,
    };
    let missing = |what: &str| SimError::InvalidConfig(format!("simulate needs {what} (or --config)"));

    let mut filter = match base.as_ref().map(|c| c.filter) {
        Some(f) => f,
        None => {
            let recycle = match (a.sigma, a.n) {
                (Some(sigma), _) => RecyclePolicy::SigmaBounded { sigma },
                (None, Some(limit)) => RecyclePolicy::NBounded {
                    limit,
                    oracle: a.oracle_count,
                },
                (None, None) => return Err(missing("--sigma or --N")),
            };
            FilterParams {
                bits: a.m.ok_or_else(|| missing("--M"))?,
                hashes: a.k.ok_or_else(|| missing("--k"))?,
                hash_variant: HashVariant::Colliding,
                retention: Retention::NonRetaining,
                recycle,
                phases: Phases::One,
                two_phase_insert: TwoPhaseInsert::default(),
            }
        }
    };
    if let Some(m) = a.m {
        filter.bits = m;
    }
    if let Some(k) = a.k {
        filter.hashes = k;
    }
    if let Some(sigma) = a.sigma {
        filter.recycle = RecyclePolicy::SigmaBounded { sigma };
    }
    if let Some(limit) = a.n {
        filter.recycle = RecyclePolicy::NBounded {
            limit,
            oracle: a.oracle_count,
        };
    }
    if a.oracle_count {
        match &mut filter.recycle {
            RecyclePolicy::NBounded { oracle, .. } => *oracle = true,
            RecyclePolicy::SigmaBounded { .. } => {
                return Err(SimError::InvalidConfig("--oracle-count needs N-bounded recycling".into()))
            }
        }
    }
    if let Some(v) = a.variant {
        filter.hash_variant = v.into();
    }
    if let Some(r) = a.retention {
        filter.retention = r.into();
    }
    if let Some(p) = a.phases {
        filter.phases = p.into();
    }
    if let Some(i) = a.two_phase_insert {
        filter.two_phase_insert = i.into();
    }

    let workload = match (a.universe, a.p_repeat) {
        (Some(size), _) => Workload::UniformUniverse { size },
        (None, Some(p_repeat)) => Workload::BernoulliRepeat { p_repeat },
        (None, None) => base
            .as_ref()
            .map(|c| c.workload)
            .unwrap_or(Workload::UniformUniverse { size: 1000 }),
    };
    let seed = match a.seed.or(base.as_ref().map(|c| c.seed)) {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(DEFAULT_SEED),
    };
    let config = ExperimentConfig {
        filter,
        workload,
        epochs: a.epochs.or(base.as_ref().map(|c| c.epochs)).unwrap_or(7),
        arrivals: a.arrivals.or(base.as_ref().map(|c| c.arrivals)).unwrap_or(100_000),
        seed,
        confidence_level: a
            .confidence
            .or(base.as_ref().map(|c| c.confidence_level))
            .unwrap_or(0.99),
        trace: base.and_then(|c| c.trace),
    };
    config.validate()?;
    Ok(config)
}

fn simulate(a: SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let config = experiment_config(&a)?;
    let report = run_experiment(&config)?;
    emit(&a.output, stdout, |w| match format_of(&a.output) {
        Format::Csv => report_table(&report).write_csv(w),
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, &report)?;
            writeln!(w)?;
            Ok(())
        }
    })
}
