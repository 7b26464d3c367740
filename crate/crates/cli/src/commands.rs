use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wordlen::corpus::{
    encode_all, encode_sample, filter_by_alpha, fixture_vocabulary, parse_alignments, parse_sentence_id,
    parse_speaker, read_dataset_csv, read_pos_table, write_dataset_csv, Dataset, EncodedSample, Emotion, PosTable,
    RelativeSequence,
};
use wordlen::eval::{
    anova_oneway, distribution_summary, evaluate, ros_groups, tukey_hsd, write_anova_csv, write_meanvar_csv,
    write_metrics_csv, write_pairs_csv, write_tukey_csv, AnovaResult, EvalOptions, Factor, TukeyPair,
};
use wordlen::model::Generator;
use wordlen::ssml::{sentence_words, ssml_file_name, SsmlDocument};
use wordlen::training::{
    generate_padded, load_checkpoint, save_checkpoint, Checkpoint, ImleTrainer, ModelKind, WganTrainer,
};

use crate::config::RunConfig;
use crate::{Cli, Command, InputContext, InputError, ModelChoice};

pub const GAN_LOSS_HEADER: &str = "epoch,wasserstein,critic_loss,generator_loss,recon_loss";
pub const IMLE_LOSS_HEADER: &str = "epoch,phase,loss";
pub const GENERATED_HEADER: &str = "sample,sentence_id,emotion,speaker_id,lengths";

pub fn run(cli: Cli) -> Result<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(cli.seed, cli.out);
    let out = cfg.out_dir();
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    match cli.command {
        Command::Prepare { input } => prepare(&cfg, input),
        Command::Train { model, dataset, epochs, resume } => train(&cfg, model, dataset, epochs, resume),
        Command::Generate { checkpoint, sentence, emotion, speaker, count } => {
            generate(&cfg, checkpoint, &sentence, &emotion, &speaker, count)
        }
        Command::Evaluate { checkpoint, dataset } => evaluate_cmd(&cfg, checkpoint, dataset),
        Command::Stats { dataset, alpha } => stats(&cfg, dataset, alpha),
        Command::Ssml { sentence, lengths, emotion, input } => ssml(&cfg, sentence, lengths, &emotion, input),
    }
}

fn input_err(msg: String) -> anyhow::Error {
    InputError(anyhow!(msg)).into()
}

/// Creates `path` and writes the seed/config comment line.
fn create_output(cfg: &RunConfig, path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    writeln!(w, "{}", cfg.header())?;
    Ok(w)
}

fn write_output(
    cfg: &RunConfig,
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> wordlen::Result<()>,
) -> Result<()> {
    let mut w = create_output(cfg, path)?;
    body(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()?;
    Ok(())
}

fn prepare(cfg: &RunConfig, input: Option<PathBuf>) -> Result<()> {
    let input = input
        .or_else(|| cfg.paths.alignments.clone())
        .ok_or_else(|| input_err("no alignment input: pass --input or set paths.alignments".into()))?;
    if !input.exists() {
        return Err(input_err(format!("{} does not exist", input.display())));
    }
    if input.is_dir() && !input.join("metadata.csv").exists() {
        return Err(input_err(format!("{} has no metadata.csv", input.display())));
    }
    let records = parse_alignments(&input).input(format!("reading {}", input.display()))?;
    if records.is_empty() {
        return Err(input_err(format!("{} contains no clips", input.display())));
    }
    let kept = filter_by_alpha(&records, cfg.alpha_threshold);
    if kept.is_empty() {
        return Err(input_err(format!("no clip reaches alpha >= {}", cfg.alpha_threshold)));
    }
    let data = Dataset::from_records(kept).input("computing relative lengths")?;
    let path = cfg.dataset_path();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_output(cfg, &path, |w| write_dataset_csv(w, &data))?;

    println!("read {} clips, retained {} at alpha >= {}", records.len(), data.records.len(), cfg.alpha_threshold);
    for e in Emotion::ALL {
        let n = data.records.iter().filter(|r| r.emotion == e).count();
        if n > 0 {
            println!("  {e}: {n}");
        }
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn load_dataset(cfg: &RunConfig, flag: Option<PathBuf>) -> Result<Dataset> {
    let path = flag.unwrap_or_else(|| cfg.dataset_path());
    let f = File::open(&path).input(format!("opening dataset {}", path.display()))?;
    read_dataset_csv(f).input(format!("reading dataset {}", path.display()))
}

fn pos_table(cfg: &RunConfig) -> Result<PosTable> {
    match &cfg.paths.pos {
        Some(p) => read_pos_table(p).input(format!("reading POS table {}", p.display())),
        None => Ok(PosTable::builtin()),
    }
}

fn selected(cfg: &RunConfig, data: &Dataset) -> Vec<RelativeSequence> {
    let emotions = cfg.emotions();
    data.relative.iter().filter(|r| emotions.contains(&r.emotion)).cloned().collect()
}

fn append_or_create(cfg: &RunConfig, path: &Path, append: bool, header: &str) -> Result<BufWriter<File>> {
    if append && path.exists() {
        let f = OpenOptions::new().append(true).open(path).with_context(|| format!("opening {}", path.display()))?;
        return Ok(BufWriter::new(f));
    }
    let mut w = create_output(cfg, path)?;
    writeln!(w, "{header}")?;
    Ok(w)
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn train(
    cfg: &RunConfig,
    model: ModelChoice,
    dataset: Option<PathBuf>,
    epochs: Option<usize>,
    resume: Option<PathBuf>,
) -> Result<()> {
    let data = load_dataset(cfg, dataset)?;
    let rels = selected(cfg, &data);
    if rels.is_empty() {
        return Err(input_err("dataset has no clips for the configured emotions".into()));
    }
    let samples = encode_all(&rels, &fixture_vocabulary(), cfg.model.input_mode, &pos_table(cfg)?).input("encoding dataset")?;
    let resumed = match &resume {
        Some(p) => Some(load_checkpoint(p).input(format!("loading checkpoint {}", p.display()))?),
        None => None,
    };
    let expected = match model {
        ModelChoice::Gan => ModelKind::Gan,
        ModelChoice::Imle => ModelKind::Imle,
    };
    if let Some(ck) = &resumed {
        if ck.meta.kind != expected {
            return Err(input_err(format!("checkpoint holds a {:?} model, not {:?}", ck.meta.kind, expected)));
        }
    }
    let out = cfg.out_dir();
    let ck_path = out.join("checkpoint.pfck");
    let loss_path = out.join("loss.csv");

    let ck = match model {
        ModelChoice::Gan => {
            let mut t = match resumed {
                Some(ck) => WganTrainer::from_checkpoint(ck).input("restoring trainer")?,
                None => WganTrainer::new(cfg.model.clone(), cfg.train.clone()).input("model configuration")?,
            };
            let epochs = epochs.unwrap_or_else(|| t.config.epochs.saturating_sub(t.epoch));
            let mut loss = append_or_create(cfg, &loss_path, resume.is_some(), GAN_LOSS_HEADER)?;
            for _ in 0..epochs {
                let epoch = t.epoch;
                let s = match t.run_epoch(&samples, &mut |_| {}) {
                    Ok(s) => s,
                    Err(e) => {
                        loss.flush()?;
                        return Err(anyhow::Error::from(e).context(format!("training epoch {epoch}")));
                    }
                };
                writeln!(
                    loss,
                    "{},{},{},{},{}",
                    s.epoch,
                    s.wasserstein,
                    s.critic_loss,
                    opt(s.generator_loss),
                    opt(s.recon_loss)
                )?;
            }
            loss.flush()?;
            t.to_checkpoint()
        }
        ModelChoice::Imle => {
            let mut t = match resumed {
                Some(ck) => ImleTrainer::from_checkpoint(ck).input("restoring trainer")?,
                None => ImleTrainer::new(cfg.model.clone(), cfg.imle.clone()).input("model configuration")?,
            };
            let epochs = epochs.unwrap_or_else(|| t.total_epochs().saturating_sub(t.epoch));
            let mut loss = append_or_create(cfg, &loss_path, resume.is_some(), IMLE_LOSS_HEADER)?;
            for _ in 0..epochs {
                let (epoch, phase) = (t.epoch, if t.in_pretraining() { "pretrain" } else { "imle" });
                match t.run_epoch(&samples) {
                    Ok(l) => writeln!(loss, "{epoch},{phase},{l}")?,
                    Err(e) => {
                        loss.flush()?;
                        return Err(anyhow::Error::from(e).context(format!("training epoch {epoch}")));
                    }
                }
            }
            loss.flush()?;
            t.to_checkpoint()
        }
    };
    save_checkpoint(&ck_path, &ck).with_context(|| format!("writing {}", ck_path.display()))?;
    println!("trained to epoch {}; wrote {} and {}", ck.meta.epoch, ck_path.display(), loss_path.display());
    Ok(())
}

struct Loaded {
    generator: Generator,
    pad_to: Option<usize>,
    kind: ModelKind,
}

fn load_model(cfg: &RunConfig, checkpoint: Option<PathBuf>) -> Result<Loaded> {
    let path = checkpoint.unwrap_or_else(|| cfg.out_dir().join("checkpoint.pfck"));
    let ck: Checkpoint = load_checkpoint(&path).input(format!("loading checkpoint {}", path.display()))?;
    let (kind, pad_to) = (ck.meta.kind, ck.meta.pad_to);
    let generator = Generator::from_params(ck.meta.model, ck.generator).input("checkpoint parameters")?;
    Ok(Loaded { generator, pad_to, kind })
}

/// Model input for a (sentence, emotion, speaker) triple; the target is unused.
fn query(
    generator: &Generator,
    pos: &PosTable,
    sentence_id: usize,
    emotion: Emotion,
    speaker_id: usize,
) -> Result<EncodedSample> {
    let n = sentence_words(sentence_id)?.len();
    let rel = RelativeSequence { sentence_id, emotion, speaker_id, values: vec![0.0; n] };
    Ok(encode_sample(&rel, &fixture_vocabulary(), generator.config.input_mode, pos)?)
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

/// Writes one SSML file, with the seed/config comment after the XML declaration.
fn write_ssml(cfg: &RunConfig, sentence_id: usize, emotion: Emotion, k: usize, values: &[f64]) -> Result<PathBuf> {
    let words = sentence_words(sentence_id)?;
    let (doc, clamps) = SsmlDocument::from_relative(&words, values, &cfg.voice)
        .input(format!("sentence {sentence_id} sample {k}"))?;
    for c in clamps {
        eprintln!(
            "warning: sentence {sentence_id} sample {k}: word {} `{}` (r = {}) clamped to {}%",
            c.word_index, c.token, c.relative, c.rate
        );
    }
    let text = doc.render();
    let (decl, rest) = text.split_once('\n').expect("declaration line");
    let comment = cfg.header().trim_start_matches("# ").to_string();
    let path = cfg.out_dir().join(ssml_file_name(sentence_id, emotion, k));
    fs::write(&path, format!("{decl}\n<!-- {comment} -->\n{rest}")).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn parse_arg<T>(value: &str, what: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
    f(value).map_err(|e| input_err(format!("--{what}: {e}")))
}

fn generate(cfg: &RunConfig, checkpoint: Option<PathBuf>, sentence: &str, emotion: &str, speaker: &str, count: usize) -> Result<()> {
    let sid = parse_arg(sentence, "sentence", parse_sentence_id)?;
    let emotion: Emotion = parse_arg(emotion, "emotion", str::parse)?;
    let spk = parse_arg(speaker, "speaker", parse_speaker)?;
    let m = load_model(cfg, checkpoint)?;
    let sample = query(&m.generator, &pos_table(cfg)?, sid, emotion, spk)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        rows.push(generate_padded(&m.generator, &sample, m.pad_to, &mut rng)?);
    }
    let path = cfg.out_dir().join("generated.csv");
    let mut w = create_output(cfg, &path)?;
    writeln!(w, "{GENERATED_HEADER}")?;
    for (k, r) in rows.iter().enumerate() {
        writeln!(w, "{k},{sid},{emotion},{spk},{}", join(&r.values))?;
    }
    w.flush()?;
    for (k, r) in rows.iter().enumerate() {
        write_ssml(cfg, sid, emotion, k, &r.values)?;
    }
    println!("wrote {} and {count} SSML files", path.display());
    Ok(())
}

fn evaluate_cmd(cfg: &RunConfig, checkpoint: Option<PathBuf>, dataset: Option<PathBuf>) -> Result<()> {
    let m = load_model(cfg, checkpoint)?;
    let data = load_dataset(cfg, dataset)?;
    let real = selected(cfg, &data);
    if real.is_empty() {
        return Err(input_err("dataset has no clips for the configured emotions".into()));
    }
    let pos = pos_table(cfg)?;

    // Speakers of each cell's real clips, cycled over when sampling.
    let mut cells: BTreeMap<(usize, Emotion), Vec<usize>> = BTreeMap::new();
    for r in &real {
        cells.entry((r.sentence_id, r.emotion)).or_default().push(r.speaker_id);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut generated = Vec::new();
    for (&(sid, emotion), speakers) in &cells {
        for k in 0..cfg.eval.samples {
            let sample = query(&m.generator, &pos, sid, emotion, speakers[k % speakers.len()])?;
            generated.push(generate_padded(&m.generator, &sample, m.pad_to, &mut rng)?);
        }
    }
    let reference: Vec<Vec<f64>> = data.sentence_references().into_iter().map(Option::unwrap_or_default).collect();
    let opts = EvalOptions { fd_mode: cfg.eval.fd_mode, frame_rate: cfg.eval.frame_rate };
    let report = evaluate(&generated, &real, &reference, &opts)?;

    let n_sentences = wordlen::fixtures::SENTENCES.len();
    for sid in 0..n_sentences {
        for e in cfg.emotions() {
            if !cells.contains_key(&(sid, e)) {
                eprintln!("warning: no real clips for sentence {sid}, {e}; cell skipped");
            }
        }
    }
    for (sid, e) in &report.missing {
        eprintln!("warning: sentence {sid}, {e} missing from one side; cell skipped");
    }

    let out = cfg.out_dir();
    let model = match m.kind {
        ModelKind::Gan => "gan",
        ModelKind::Imle => "imle",
    };
    write_output(cfg, &out.join("metrics.csv"), |w| write_metrics_csv(w, model, &report))?;
    let real_sum = distribution_summary(&real)?;
    let gen_sum = distribution_summary(&generated)?;
    let keys: std::collections::BTreeSet<_> = real_sum.pairs.keys().chain(gen_sum.pairs.keys()).copied().collect();
    for (i, j) in keys {
        let r = real_sum.pairs.get(&(i, j)).map_or(&[][..], Vec::as_slice);
        let g = gen_sum.pairs.get(&(i, j)).map_or(&[][..], Vec::as_slice);
        write_output(cfg, &out.join(format!("pairs_{i}_{j}.csv")), |w| {
            write_pairs_csv(w, &[("real", r), ("generated", g)])
        })?;
    }
    write_output(cfg, &out.join("meanvar.csv"), |w| {
        write_meanvar_csv(w, &[("real", &real_sum), ("generated", &gen_sum)])
    })?;
    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.5}"));
    println!(
        "{} cells: mse_to_mean {} rmse {} pcc {} dtw {} fd {}",
        report.cells.len(),
        show(report.mean_mse_to_mean()),
        show(report.mean_rmse()),
        show(report.mean_pcc()),
        show(report.mean_dtw()),
        show(report.mean_fd())
    );
    Ok(())
}

fn stats(cfg: &RunConfig, dataset: Option<PathBuf>, alpha: f64) -> Result<()> {
    let data = load_dataset(cfg, dataset)?;
    let mut anovas: Vec<(&str, usize, AnovaResult)> = Vec::new();
    let mut tukeys: Vec<(&str, Vec<String>, Vec<TukeyPair>)> = Vec::new();
    for factor in [Factor::Emotion, Factor::Speaker, Factor::Intensity] {
        let name = factor.name();
        let (labels, groups) = ros_groups(&data.records, factor).input("rate of speech")?;
        let a = match anova_oneway(&groups, alpha) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("warning: {name}: ANOVA skipped: {e}");
                continue;
            }
        };
        println!("{name}: F({}, {}) = {:.4}, p = {:.3e}", a.df_between, a.df_within, a.f, a.p_value);
        anovas.push((name, groups.len(), a));
        match tukey_hsd(&groups, alpha) {
            Ok(t) => tukeys.push((name, labels, t)),
            Err(e) => eprintln!("warning: {name}: Tukey test skipped: {e}"),
        }
    }
    let out = cfg.out_dir();
    let rows: Vec<_> = anovas.iter().map(|(n, k, a)| (*n, *k, a)).collect();
    write_output(cfg, &out.join("anova.csv"), |w| write_anova_csv(w, &rows))?;
    let rows: Vec<_> = tukeys.iter().map(|(n, l, t)| (*n, l.as_slice(), t.as_slice())).collect();
    write_output(cfg, &out.join("tukey.csv"), |w| write_tukey_csv(w, &rows))?;
    Ok(())
}

fn parse_lengths(s: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| input_err(format!("`{t}` is not a number"))))
        .collect()
}

fn ssml(cfg: &RunConfig, sentence: Option<String>, lengths: Option<String>, emotion: &str, input: Option<PathBuf>) -> Result<()> {
    let mut written = Vec::new();
    if let Some(path) = input {
        let f = File::open(&path).input(format!("opening {}", path.display()))?;
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(f);
        for (n, row) in rdr.records().enumerate() {
            let row = row.input(format!("{}", path.display()))?;
            let ctx = || format!("{} row {}", path.display(), n + 1);
            let field = |i: usize| row.get(i).ok_or_else(|| input_err(format!("{}: missing column {i}", ctx())));
            let k: usize = field(0)?.parse().input(ctx())?;
            let sid = parse_sentence_id(field(1)?).map_err(|e| input_err(format!("{}: {e}", ctx())))?;
            let e: Emotion = field(2)?.parse().map_err(|e| input_err(format!("{}: {e}", ctx())))?;
            let values = parse_lengths(field(4)?)?;
            written.push(write_ssml(cfg, sid, e, k, &values)?);
        }
    } else {
        let sid = parse_arg(sentence.as_deref().unwrap_or_default(), "sentence", parse_sentence_id)?;
        let e: Emotion = parse_arg(emotion, "emotion", str::parse)?;
        let values = match lengths {
            Some(l) => parse_lengths(&l)?,
            None => bail!(InputError(anyhow!("--lengths or --input is required"))),
        };
        written.push(write_ssml(cfg, sid, e, 0, &values)?);
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(())
}
