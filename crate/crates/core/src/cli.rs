//! Command-line front end. The `scratch-creativity` binary only calls
//! [`main`].

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::measures::{CreativityVector, MeasureConfig};
use crate::media::{
    audio_scores, export_assets, extract_baseline, run_adapter, visual_scores, FeatureStore,
};
use crate::rank::{
    evaluate, synthetic_labels, train_model, ExpertLabels, Mode, Protocol, ScoredCorpus, Target, TauVariant,
    DEFAULT_SEED,
};
use crate::scratch::{code_creativity, code_project_distance, parse_sb3_with, AssetKind, ParseOptions, Sb3Project};
use crate::synth::{expert_assignment, write_synthetic_corpus};

pub const SIDECAR_ENV: &str = "SCRATCH_CREATIVITY_SIDECARS";
pub const ADAPTER_ENV: &str = "SCRATCH_CREATIVITY_ADAPTER";

#[derive(Debug, Parser)]
#[command(name = "scratch-creativity", version, about = "Creativity measures for Scratch projects")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nine creativity features per project.
    Score(ScoreArgs),
    /// Product distance between two projects.
    Distance(DistanceArgs),
    /// Fit a rank model on labeled projects and save it.
    Train(TrainArgs),
    /// Cross-validated Kendall's tau report.
    Evaluate(EvaluateArgs),
    /// Write feature sidecars for project assets.
    ExtractFeatures(ExtractArgs),
    /// Generate a synthetic labeled corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Modality {
    Code,
    Visual,
    Audio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    PerExpert,
    Combined,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Code,
    Visual,
    Audio,
    Weighted,
    All,
}

impl TargetArg {
    fn targets(self) -> Vec<Target> {
        match self {
            TargetArg::Code => vec![Target::Code],
            TargetArg::Visual => vec![Target::Visual],
            TargetArg::Audio => vec![Target::Audio],
            TargetArg::Weighted => vec![Target::Weighted],
            TargetArg::All => Target::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    /// Directory of `<digest>.cfv` feature sidecars.
    #[arg(long, env = SIDECAR_ENV)]
    pub sidecars: Option<PathBuf>,
    /// Compute baseline features for assets without a sidecar.
    #[arg(long)]
    pub fallback_features: bool,
    /// Keep shadow blocks in the syntax trees.
    #[arg(long)]
    pub include_shadow: bool,
    /// Use plain instead of squared block distances.
    #[arg(long)]
    pub no_squared: bool,
    /// Keep duplicate concepts in flexibility.
    #[arg(long)]
    pub no_dedup: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl MeasureArgs {
    fn store(&self) -> FeatureStore {
        match &self.sidecars {
            Some(dir) => FeatureStore::sidecars(dir, self.fallback_features),
            None => FeatureStore::baseline(),
        }
    }

    fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            include_shadow: self.include_shadow,
            ..Default::default()
        }
    }

    fn code_config(&self) -> MeasureConfig {
        MeasureConfig {
            squared: !self.no_squared,
            dedup: !self.no_dedup,
            ..MeasureConfig::code()
        }
    }

    fn visual_config(&self) -> MeasureConfig {
        MeasureConfig {
            dedup: !self.no_dedup,
            ..MeasureConfig::visual()
        }
    }

    fn audio_config(&self) -> MeasureConfig {
        MeasureConfig {
            dedup: !self.no_dedup,
            ..MeasureConfig::audio()
        }
    }

    fn pool(&self) -> anyhow::Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.jobs {
            b = b.num_threads(n);
        }
        Ok(b.build()?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        emit(self.output.as_deref(), text)
    }
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// `.sb3` files to score.
    #[arg(required = true)]
    pub projects: Vec<PathBuf>,
    /// Directory of `.sb3` files used as the originality reference sample.
    /// A scored project is left out of its own sample.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, value_enum, default_value = "code")]
    pub modality: Modality,
    #[command(flatten)]
    pub measure: MeasureArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LabelArgs {
    /// CSV `project_id,expert_id,code,visual,audio,idea,final`.
    #[arg(long)]
    pub labels: PathBuf,
    /// CSV `expert_id,w_code,w_visual,w_audio,w_idea,w_other`.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Directory of the labeled `.sb3` files; ids are file stems.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "b")]
    pub tau_variant: TauVariant,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: LabelArgs,
    #[arg(long, value_enum, default_value = "weighted")]
    pub target: TargetArg,
    /// Train on one expert's rows only.
    #[arg(long)]
    pub expert: Option<String>,
    /// Model file to write.
    #[arg(long, short)]
    pub output: PathBuf,
    #[command(flatten)]
    pub measure: MeasureArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: LabelArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "all")]
    pub target: TargetArg,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: ReportFormat,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    #[arg(required = true)]
    pub projects: Vec<PathBuf>,
    /// Sidecar output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// External extractor, called as `<adapter> extract --in <assets>
    /// --out <sidecars> [--images] [--sounds]`.
    #[arg(long, env = ADAPTER_ENV)]
    pub adapter: Option<PathBuf>,
    /// Where assets are exported for the adapter (default `<out>/assets`).
    #[arg(long)]
    pub assets: Option<PathBuf>,
    #[arg(long)]
    pub images: bool,
    #[arg(long)]
    pub sounds: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Output directory; projects go to `<out>/projects`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreRow {
    pub project: String,
    pub path: String,
    pub code_fluency: f64,
    pub code_flexibility: f64,
    pub code_originality: Option<f64>,
    pub visual_fluency: f64,
    pub visual_flexibility: f64,
    pub visual_originality: Option<f64>,
    pub audio_fluency: f64,
    pub audio_flexibility: f64,
    pub audio_originality: Option<f64>,
    pub image_features: &'static str,
    pub sound_features: &'static str,
}

#[derive(Debug, Clone, Serialize)]
struct ItemError {
    input: String,
    error: String,
}

fn report_errors(errors: &[ItemError]) -> bool {
    if errors.is_empty() {
        return true;
    }
    let json = serde_json::json!({ "errors": errors });
    eprintln!("{json}");
    false
}

fn canonical(p: &Path) -> PathBuf {
    p.canonicalize().unwrap_or_else(|_| p.to_path_buf())
}

/// `.sb3` files of `dir`, sorted by name.
pub fn sb3_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("sb3")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn load_corpus(dir: &Path, opts: &ParseOptions) -> anyhow::Result<Vec<Sb3Project>> {
    let files = sb3_files(dir)?;
    if files.is_empty() {
        bail!("no .sb3 files in {}", dir.display());
    }
    files
        .par_iter()
        .map(|f| parse_sb3_with(f, opts).with_context(|| format!("parsing {}", f.display())))
        .collect()
}

fn score_one(
    project: &Sb3Project,
    path: &Path,
    reference: Option<&[(PathBuf, Sb3Project)]>,
    args: &MeasureArgs,
    store: &FeatureStore,
) -> crate::Result<ScoreRow> {
    let own = canonical(path);
    let sample: Vec<&Sb3Project> = reference
        .unwrap_or_default()
        .iter()
        .filter(|(p, _)| *p != own)
        .map(|(_, q)| q)
        .collect();
    let code = code_creativity(project, &sample, &args.code_config())?;
    let feats = store.project_features(project)?;
    let sample_feats = sample
        .iter()
        .map(|q| store.project_features(q))
        .collect::<crate::Result<Vec<_>>>()?;
    let refs: Vec<_> = sample_feats.iter().collect();
    let visual = visual_scores(&feats, &refs, &args.visual_config())?;
    let audio = audio_scores(&feats, &refs, &args.audio_config())?;
    let with_ref = |v: f64| reference.map(|_| v);
    Ok(ScoreRow {
        project: project.name.clone(),
        path: path.display().to_string(),
        code_fluency: code.fluency,
        code_flexibility: code.flexibility,
        code_originality: reference.map(|_| code.originality.unwrap_or(0.0)),
        visual_fluency: visual.fluency,
        visual_flexibility: visual.flexibility,
        visual_originality: with_ref(visual.originality),
        audio_fluency: audio.fluency,
        audio_flexibility: audio.flexibility,
        audio_originality: with_ref(audio.originality),
        image_features: feats.image_source.as_str(),
        sound_features: feats.sound_source.as_str(),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

fn score_table(rows: &[ScoreRow]) -> String {
    let mut out = String::from("project");
    for n in CreativityVector::NAMES {
        out.push('\t');
        out.push_str(n);
    }
    out.push_str("\timages\tsounds\n");
    for r in rows {
        let cells = [
            format!("{:.4}", r.code_fluency),
            format!("{:.4}", r.code_flexibility),
            fmt_opt(r.code_originality),
            format!("{:.4}", r.visual_fluency),
            format!("{:.4}", r.visual_flexibility),
            fmt_opt(r.visual_originality),
            format!("{:.4}", r.audio_fluency),
            format!("{:.4}", r.audio_flexibility),
            fmt_opt(r.audio_originality),
        ];
        out.push_str(&r.project);
        for c in cells {
            out.push('\t');
            out.push_str(&c);
        }
        out.push_str(&format!("\t{}\t{}\n", r.image_features, r.sound_features));
    }
    out
}

fn cmd_score(args: &ScoreArgs) -> anyhow::Result<bool> {
    let m = &args.measure;
    let opts = m.parse_options();
    let store = m.store();
    m.pool()?.install(|| {
        let reference = match &args.reference {
            Some(dir) => {
                let files = sb3_files(dir)?;
                if files.is_empty() {
                    bail!("reference directory {} has no .sb3 files", dir.display());
                }
                let parsed = files
                    .par_iter()
                    .map(|f| Ok((canonical(f), parse_sb3_with(f, &opts).with_context(|| format!("parsing {}", f.display()))?)))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                Some(parsed)
            }
            None => None,
        };
        let results: Vec<Result<ScoreRow, ItemError>> = args
            .projects
            .par_iter()
            .map(|path| {
                parse_sb3_with(path, &opts)
                    .and_then(|p| score_one(&p, path, reference.as_deref(), m, &store))
                    .map_err(|e| ItemError {
                        input: path.display().to_string(),
                        error: e.to_string(),
                    })
            })
            .collect();
        let (mut rows, mut errors) = (Vec::new(), Vec::new());
        for r in results {
            match r {
                Ok(row) => rows.push(row),
                Err(e) => errors.push(e),
            }
        }
        let text = match args.out.format {
            Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in &rows {
                    w.serialize(r)?;
                }
                String::from_utf8(w.into_inner()?)?
            }
            Format::Table => score_table(&rows),
        };
        args.out.emit(&text)?;
        Ok(report_errors(&errors))
    })
}

fn cmd_distance(args: &DistanceArgs) -> anyhow::Result<bool> {
    let m = &args.measure;
    let opts = m.parse_options();
    let parse = |p: &Path| parse_sb3_with(p, &opts).with_context(|| format!("parsing {}", p.display()));
    let (a, b) = (parse(&args.a)?, parse(&args.b)?);
    let d = match args.modality {
        Modality::Code => code_project_distance(&a, &b, &m.code_config())?,
        Modality::Visual | Modality::Audio => {
            let store = m.store();
            let (fa, fb) = (store.project_features(&a)?, store.project_features(&b)?);
            if args.modality == Modality::Visual {
                visual_scores(&fa, &[&fb], &m.visual_config())?.originality
            } else {
                audio_scores(&fa, &[&fb], &m.audio_config())?.originality
            }
        }
    };
    println!("{d}");
    Ok(true)
}

fn labeled_corpus(data: &LabelArgs, m: &MeasureArgs) -> anyhow::Result<(ScoredCorpus, ExpertLabels)> {
    let labels = ExpertLabels::load(&data.labels, data.weights.as_deref())
        .with_context(|| format!("loading {}", data.labels.display()))?;
    let projects = load_corpus(&data.corpus, &m.parse_options())?;
    let needed: HashSet<&str> = labels.rows.iter().map(|r| r.project_id.as_str()).collect();
    let projects: Vec<Sb3Project> = projects.into_iter().filter(|p| needed.contains(p.name.as_str())).collect();
    let corpus = ScoredCorpus::build(&projects, &m.store(), &m.code_config())?;
    corpus.resolve(&labels)?;
    Ok((corpus, labels))
}

fn protocol(data: &LabelArgs) -> Protocol {
    Protocol {
        tau: data.tau_variant,
        ..Protocol::default()
    }
}

fn cmd_train(args: &TrainArgs) -> anyhow::Result<bool> {
    args.measure.pool()?.install(|| {
        let (corpus, labels) = labeled_corpus(&args.data, &args.measure)?;
        let targets = args.target.targets();
        if targets.len() != 1 {
            bail!("train needs a single target");
        }
        let model = train_model(&corpus, &labels, args.expert.as_deref(), targets[0], &protocol(&args.data))?;
        model.save(&args.output)?;
        Ok(true)
    })
}

fn cmd_evaluate(args: &EvaluateArgs) -> anyhow::Result<bool> {
    args.measure.pool()?.install(|| {
        let (corpus, labels) = labeled_corpus(&args.data, &args.measure)?;
        let modes = match args.mode {
            ModeArg::PerExpert => vec![Mode::PerExpert],
            ModeArg::Combined => vec![Mode::Combined],
            ModeArg::Both => vec![Mode::PerExpert, Mode::Combined],
        };
        let report = evaluate(&corpus, &labels, &modes, &args.target.targets(), &protocol(&args.data), args.data.seed)?;
        let text = match args.format {
            ReportFormat::Table => report.to_table(),
            ReportFormat::Json => report.to_json()?,
        };
        emit(args.output.as_deref(), &text)?;
        Ok(report.entries.iter().all(|e| e.error.is_none()))
    })
}

fn cmd_extract(args: &ExtractArgs) -> anyhow::Result<bool> {
    let (images, sounds) = if args.images || args.sounds {
        (args.images, args.sounds)
    } else {
        (true, true)
    };
    let mut errors = Vec::new();
    let mut projects = Vec::new();
    for path in &args.projects {
        match parse_sb3_with(path, &ParseOptions::default()) {
            Ok(p) => projects.push(p),
            Err(e) => errors.push(ItemError {
                input: path.display().to_string(),
                error: e.to_string(),
            }),
        }
    }
    fs::create_dir_all(&args.out)?;
    match &args.adapter {
        Some(program) => {
            let assets = args.assets.clone().unwrap_or_else(|| args.out.join("assets"));
            for p in &mut projects {
                if !images {
                    p.images.clear();
                }
                if !sounds {
                    p.sounds.clear();
                }
                export_assets(p, &assets)?;
            }
            let kinds: Vec<AssetKind> = [(images, AssetKind::Image), (sounds, AssetKind::Sound)]
                .into_iter()
                .filter_map(|(on, k)| on.then_some(k))
                .collect();
            run_adapter(program, &assets, &args.out, &kinds)?;
        }
        None => {
            let frames = FeatureStore::baseline().frames;
            for p in &mut projects {
                if !images {
                    p.images.clear();
                }
                if !sounds {
                    p.sounds.clear();
                }
                if let Err(e) = extract_baseline(p, &args.out, &frames) {
                    errors.push(ItemError {
                        input: p.name.clone(),
                        error: e.to_string(),
                    });
                }
            }
        }
    }
    Ok(report_errors(&errors))
}

fn cmd_synth(args: &SynthArgs) -> anyhow::Result<bool> {
    let dir = args.out.join("projects");
    let projects = write_synthetic_corpus(&dir, 45, args.seed)?
        .iter()
        .map(|p| parse_sb3_with(p, &ParseOptions::default()))
        .collect::<crate::Result<Vec<_>>>()?;
    let corpus = ScoredCorpus::build(&projects, &FeatureStore::baseline(), &MeasureConfig::code())?;
    let labels = synthetic_labels(&corpus, &expert_assignment(45, args.seed)?, args.seed)?;
    labels.write_labels(fs::File::create(args.out.join("labels.csv"))?)?;
    labels.write_weights(fs::File::create(args.out.join("weights.csv"))?)?;
    Ok(true)
}

/// Runs one command. `Ok(false)` means some items failed and were
/// reported on stderr.
pub fn run(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Score(a) => cmd_score(a),
        Command::Distance(a) => cmd_distance(a),
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::ExtractFeatures(a) => cmd_extract(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

pub fn main_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

pub fn main() -> ExitCode {
    main_from(std::env::args_os())
}
