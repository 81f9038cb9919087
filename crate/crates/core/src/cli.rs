//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::masking::{build_views, write_views, MaskConfig, Strategy};
use crate::motif::{build_vocab_par, decompose, MotifVocab};
use crate::parse_smiles;
use crate::targets::TargetKind;
use crate::workbench::{
    ingest, read_report, write_csv, write_json, write_svg, DatasetManifest, RunConfig, Workbench, WorkbenchError,
};

#[derive(Debug, Parser)]
#[command(
    name = "molmask",
    version,
    about = "Masking strategies, targets and information measures for molecular graphs"
)]
pub struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse every SMILES of a CSV and report skipped rows.
    ParseCheck(DataArgs),
    /// Print the motifs of SMILES strings, or write them for a whole CSV.
    Decompose {
        smiles: Vec<String>,
        #[command(flatten)]
        data: OptionalData,
    },
    /// Build a motif vocabulary or measure its coverage.
    #[command(subcommand)]
    Vocab(VocabCommand),
    /// Sampled atom-type MI under masking strategies.
    MaskSim {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        mask: MaskArgs,
        #[arg(long, value_delimiter = ',', default_value = "uniform,pagerank")]
        strategy: Vec<Strategy>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        /// Pool every atom of each plan instead of one atom per plan.
        #[arg(long)]
        without_replacement: bool,
    },
    /// Exact MI between target labels and the graph label.
    Mi {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        targets: TargetArgs,
    },
    /// JSD curves over rare-label thresholds.
    Jsd {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        targets: TargetArgs,
        #[arg(long, value_delimiter = ',')]
        tau: Vec<f64>,
    },
    /// MI after shuffling local labels across units.
    ShuffleControl {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        targets: TargetArgs,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Write masked views and their targets as JSON lines.
    ExportViews {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        mask: MaskArgs,
        #[arg(long, default_value = "uniform")]
        strategy: Strategy,
        #[arg(long, default_value = "atom_type")]
        target: TargetKind,
        #[arg(long, default_value_t = 1)]
        draws_per_graph: usize,
        #[arg(long, default_value = "views.jsonl")]
        output: PathBuf,
    },
    /// Render an MI or JSD report CSV as SVG.
    Plot {
        report: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum VocabCommand {
    Build {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "vocab.tsv")]
        output: PathBuf,
    },
    Coverage {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        vocab: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset CSV; repeat for several datasets.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = "smiles")]
    pub smiles_column: String,
    /// Active task column (default: first non-SMILES column).
    #[arg(long)]
    pub task: Option<String>,
    /// External per-atom score file, one per --input.
    #[arg(long)]
    pub scores: Vec<PathBuf>,
    /// Per-atom embedding CSV for vq_code targets, one per --input.
    #[arg(long)]
    pub embeddings: Vec<PathBuf>,
    /// Per-atom logit CSV for argmax_token targets, one per --input.
    #[arg(long)]
    pub logits: Vec<PathBuf>,
    /// Codebook CSV for vq_code targets, one per --input.
    #[arg(long)]
    pub codebook: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptionalData {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "smiles")]
    pub smiles_column: String,
}

#[derive(Debug, Args)]
pub struct MaskArgs {
    #[arg(long, default_value_t = 0.15)]
    pub ratio: f64,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub epoch: u32,
    /// Defaults to --epoch, so the annealed ratio equals --ratio.
    #[arg(long)]
    pub max_epoch: Option<u32>,
    #[arg(long, default_value_t = 0.5)]
    pub intra_frac: f64,
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    #[arg(long, value_delimiter = ',', default_value = "atom_type,motif_label")]
    pub targets: Vec<TargetKind>,
    /// Motif vocabulary TSV (default: each dataset's own vocabulary).
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long)]
    pub normalize_embeddings: bool,
}

impl MaskArgs {
    fn config(&self, seed: u64) -> MaskConfig {
        MaskConfig {
            ratio: self.ratio,
            epoch: self.epoch,
            max_epoch: self.max_epoch.unwrap_or(self.epoch),
            beta: self.beta,
            intra_motif_fraction: self.intra_frac,
            seed,
        }
    }
}

impl DataArgs {
    fn manifests(&self) -> Result<Vec<DatasetManifest>, WorkbenchError> {
        let per_input = |v: &[PathBuf], flag: &str| -> Result<Vec<Option<PathBuf>>, WorkbenchError> {
            match v.len() {
                0 => Ok(vec![None; self.inputs.len()]),
                n if n == self.inputs.len() => Ok(v.iter().cloned().map(Some).collect()),
                n => Err(WorkbenchError::Config(format!(
                    "{n} --{flag} files given for {} inputs",
                    self.inputs.len()
                ))),
            }
        };
        let scores = per_input(&self.scores, "scores")?;
        let embeddings = per_input(&self.embeddings, "embeddings")?;
        let logits = per_input(&self.logits, "logits")?;
        let codebook = per_input(&self.codebook, "codebook")?;
        Ok(self
            .inputs
            .iter()
            .enumerate()
            .map(|(i, path)| DatasetManifest {
                smiles_column: self.smiles_column.clone(),
                active_task: self.task.clone(),
                external_scores: scores[i].clone(),
                embeddings: embeddings[i].clone(),
                logits: logits[i].clone(),
                codebook: codebook[i].clone(),
                ..DatasetManifest::from_path(path)
            })
            .collect())
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(1);
        }
        // Fails only if a pool already exists, which changes speed, not results.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn out_path(cli: &Cli, name: impl AsRef<Path>) -> Result<PathBuf, WorkbenchError> {
    std::fs::create_dir_all(&cli.out_dir).map_err(|e| WorkbenchError::io(&cli.out_dir, e))?;
    Ok(cli.out_dir.join(name))
}

fn run_config(cli: &Cli, data: &DataArgs) -> Result<RunConfig, WorkbenchError> {
    Ok(RunConfig {
        datasets: data.manifests()?,
        mask: MaskConfig {
            seed: cli.seed,
            ..MaskConfig::default()
        },
        workers: cli.workers,
        out_dir: cli.out_dir.clone(),
        ..RunConfig::default()
    })
}

fn with_targets(mut config: RunConfig, targets: &TargetArgs) -> RunConfig {
    config.target_kinds = targets.targets.clone();
    config.vocab = targets.vocab.clone();
    config.normalize_embeddings = targets.normalize_embeddings;
    config
}

fn finish(cli: &Cli, wb: &Workbench, report: &Path) -> Result<(), WorkbenchError> {
    write_json(&wb.summary(), out_path(cli, "summary.json")?)?;
    for d in wb.summary().datasets {
        eprintln!(
            "{}: {} rows, {} parsed, {} parse failures, {} multi-fragment, {} analysed",
            d.dataset,
            d.ingest.rows,
            d.ingest.parsed,
            d.ingest.skipped_parse,
            d.ingest.skipped_multi_fragment,
            d.analysed
        );
    }
    println!("{}", report.display());
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), WorkbenchError> {
    match &cli.command {
        Command::ParseCheck(data) => {
            let path = out_path(cli, "parse_failures.csv")?;
            let mut writer = csv::Writer::from_path(&path)?;
            writer.write_record(["dataset", "row", "smiles", "reason"])?;
            for m in data.manifests()? {
                let d = ingest(&m)?;
                let s = &d.summary;
                println!(
                    "{}: rows={} parsed={} skipped_parse={} skipped_multi_fragment={} unlabeled={} singletons={}",
                    m.name, s.rows, s.parsed, s.skipped_parse, s.skipped_multi_fragment, s.unlabeled, s.singletons
                );
                for f in &d.failures {
                    writer.write_record([m.name.as_str(), &f.row.to_string(), &f.smiles, &f.reason])?;
                }
            }
            writer.flush().map_err(|e| WorkbenchError::io(&path, e))?;
            Ok(())
        }
        Command::Decompose { smiles, data } => decompose_cmd(cli, smiles, data),
        Command::Vocab(VocabCommand::Build { data, output }) => {
            let mut graphs = Vec::new();
            for m in data.manifests()? {
                graphs.extend(ingest(&m)?.records.into_iter().map(|r| r.graph));
            }
            let vocab = build_vocab_par(&graphs);
            let path = out_path(cli, output)?;
            let file = File::create(&path).map_err(|e| WorkbenchError::io(&path, e))?;
            vocab
                .write_tsv(std::io::BufWriter::new(file))
                .map_err(|e| WorkbenchError::io(&path, e))?;
            eprintln!("{} motifs from {} graphs", vocab.size(), graphs.len());
            println!("{}", path.display());
            Ok(())
        }
        Command::Vocab(VocabCommand::Coverage { data, vocab }) => {
            let file = File::open(vocab).map_err(|e| WorkbenchError::io(vocab, e))?;
            let vocab = MotifVocab::read_tsv(BufReader::new(file))?;
            let wb = Workbench::load(run_config(cli, data)?)?;
            let path = out_path(cli, "coverage.csv")?;
            write_csv(&wb.coverage_rows(&vocab)?, &path)?;
            finish(cli, &wb, &path)
        }
        Command::MaskSim {
            data,
            mask,
            strategy,
            repeats,
            without_replacement,
        } => {
            let config = RunConfig {
                strategies: strategy.clone(),
                mask: mask.config(cli.seed),
                repeats: *repeats,
                without_replacement: *without_replacement,
                ..run_config(cli, data)?
            };
            let wb = Workbench::load(config)?;
            let path = out_path(cli, "mask_sim.csv")?;
            write_csv(&wb.mask_sim_rows()?, &path)?;
            finish(cli, &wb, &path)
        }
        Command::Mi { data, targets } => {
            let wb = Workbench::load(with_targets(run_config(cli, data)?, targets))?;
            let path = out_path(cli, "mi.csv")?;
            write_csv(&wb.mi_rows()?, &path)?;
            finish(cli, &wb, &path)
        }
        Command::Jsd { data, targets, tau } => {
            let mut config = with_targets(run_config(cli, data)?, targets);
            if !tau.is_empty() {
                config.taus = tau.clone();
            }
            let wb = Workbench::load(config)?;
            let path = out_path(cli, "jsd.csv")?;
            write_csv(&wb.jsd_rows()?, &path)?;
            finish(cli, &wb, &path)
        }
        Command::ShuffleControl { data, targets, repeats } => {
            let config = RunConfig {
                repeats: *repeats,
                ..with_targets(run_config(cli, data)?, targets)
            };
            let wb = Workbench::load(config)?;
            let path = out_path(cli, "shuffle_control.csv")?;
            write_csv(&wb.shuffle_rows()?, &path)?;
            finish(cli, &wb, &path)
        }
        Command::ExportViews {
            data,
            mask,
            strategy,
            target,
            draws_per_graph,
            output,
        } => {
            if data.inputs.len() != 1 {
                return Err(WorkbenchError::Config("export-views takes exactly one --input".into()));
            }
            let config = RunConfig {
                strategies: vec![*strategy],
                target_kinds: vec![*target],
                mask: mask.config(cli.seed),
                ..run_config(cli, data)?
            };
            let wb = Workbench::load(config)?;
            let path = out_path(cli, output)?;
            let file = File::create(&path).map_err(|e| WorkbenchError::io(&path, e))?;
            let mut views = Vec::new();
            for d in wb.datasets() {
                let sampler = wb.full_sampler(d, *strategy)?;
                let spec = wb.target_spec(d, *target)?;
                let graphs: Vec<_> = d.dataset.records.iter().map(|r| r.graph.clone()).collect();
                views.extend(build_views(
                    &graphs,
                    &sampler,
                    &spec,
                    &wb.config().mask,
                    *draws_per_graph,
                )?);
            }
            write_views(&views, file)?;
            finish(cli, &wb, &path)
        }
        Command::Plot { report, output } => {
            let parsed = read_report(report)?;
            let path = match output {
                Some(p) => p.clone(),
                None => {
                    let stem = report
                        .file_stem()
                        .map_or("report".into(), |s| s.to_string_lossy().into_owned());
                    out_path(cli, format!("{stem}.svg"))?
                }
            };
            write_svg(&parsed, &path)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn decompose_cmd(cli: &Cli, smiles: &[String], data: &OptionalData) -> Result<(), WorkbenchError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for s in smiles {
        let graph = parse_smiles(s).map_err(|e| WorkbenchError::Config(format!("{s}: {e}")))?;
        let p = decompose(&graph);
        writeln!(out, "{s}\t{} motifs", p.len()).map_err(|e| WorkbenchError::io("<stdout>", e))?;
        for (i, atoms) in p.motifs.iter().enumerate() {
            writeln!(out, "  {i}\t{atoms:?}\t{}", p.signatures[i]).map_err(|e| WorkbenchError::io("<stdout>", e))?;
        }
    }
    if let Some(input) = &data.input {
        let manifest = DatasetManifest {
            smiles_column: data.smiles_column.clone(),
            ..DatasetManifest::from_path(input)
        };
        let d = ingest(&manifest)?;
        let path = out_path(cli, "motifs.csv")?;
        let mut writer = csv::Writer::from_path(&path)?;
        writer.write_record(["graph_index", "motif_index", "atoms", "signature"])?;
        for (g, rec) in d.records.iter().enumerate() {
            let p = decompose(&rec.graph);
            for (m, atoms) in p.motifs.iter().enumerate() {
                let atoms: Vec<String> = atoms.iter().map(usize::to_string).collect();
                writer.write_record([g.to_string(), m.to_string(), atoms.join(" "), p.signatures[m].clone()])?;
            }
        }
        writer.flush().map_err(|e| WorkbenchError::io(&path, e))?;
        println!("{}", path.display());
    } else if smiles.is_empty() {
        return Err(WorkbenchError::Config("give SMILES arguments or --input".into()));
    }
    Ok(())
}
