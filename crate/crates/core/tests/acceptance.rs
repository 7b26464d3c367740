//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and fails
//! if any criterion fails.
//!
//! `ACCEPTANCE_ONLY=3,5` restricts the run to the listed criteria (`4` selects
//! 4a-4c, `4b` just one of them; 4a-4c always run 3 first as their baseline).
//! `WORDLEN_CREMAD=<alignments file or directory>` enables criterion 9.
//!
//! Run with `cargo test --release -p wordlen --test acceptance -- --nocapture`.

mod common;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wordlen::corpus::{
    encode_all, filter_by_alpha, fixture_vocabulary, parse_alignments, relative_with_reference, synth_corpus, tokenize,
    EncodedSample, Emotion, InputMode, PosTable, RelativeSequence, SynthCell, SynthSpec,
};
use wordlen::eval::{anova_oneway, dtw, mse_to_population_mean, pcc, rmse, ros_groups, tukey_hsd, Factor};
use wordlen::fixtures::{NUM_SPEAKERS, SENTENCES};
use wordlen::model::{Generator, ModelConfig};
use wordlen::nn::RmsPropConfig;
use wordlen::ssml::{emit_ssml, sentence_words, SsmlDocument, DEFAULT_VOICE};
use wordlen::training::{
    decode_checkpoint, encode_checkpoint, imle_loss, EpochStats, ImleConfig, ImleTrainer, PaddingMode, StepKind,
    TrainConfig, WganTrainer,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Status {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    id: &'static str,
    name: &'static str,
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(id: &'static str, name: &'static str, ok: bool, detail: String) -> Self {
        Self { id, name, status: if ok { Status::Pass } else { Status::Fail }, detail }
    }

    fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        format!("[{tag}] {:<3} {}: {}", self.id, self.name, self.detail)
    }
}

// ---------------------------------------------------------------------------
// shared synthetic setup for criteria 3 and 4

const EMOTIONS: [Emotion; 3] = [Emotion::Happy, Emotion::Anger, Emotion::Neutral];
const NOISE: f64 = 0.05;
const PER_CELL: usize = 40;
const CONVERGENCE_EPOCHS: usize = 2000;
const CONVERGENCE_LIMIT: Duration = Duration::from_secs(15 * 60);
const EVAL_EVERY: usize = 25;
const EVAL_SAMPLES: usize = 100;
/// Epoch budget shared by both arms of every ablation.
const ABLATION_EPOCHS: usize = 300;
/// MSE comparisons average the evaluations at the last this-many multiples
/// of `EVAL_EVERY` up to the budget.
const ABLATION_WINDOW: usize = 5;

/// Neutral speech is its own reference, so its relative lengths are zero;
/// the other emotions follow a smooth per-word pattern of amplitude 0.3.
fn spec_means(sentence_id: usize, emotion: Emotion) -> Vec<f64> {
    let n = tokenize(SENTENCES[sentence_id]).len();
    if emotion == Emotion::Neutral {
        return vec![0.0; n];
    }
    let e = emotion.index() as f64;
    (0..n).map(|i| 0.3 * ((i as f64 + 1.0) * (e + 1.0) * 0.7 + sentence_id as f64).sin()).collect()
}

fn synth_cells(sentences: &[usize]) -> Vec<SynthCell> {
    sentences
        .iter()
        .flat_map(|&s| EMOTIONS.iter().map(move |&e| SynthCell { sentence_id: s, emotion: e, means: spec_means(s, e) }))
        .collect()
}

struct Corpus {
    spec: SynthSpec,
    rels: Vec<RelativeSequence>,
    data: Vec<EncodedSample>,
}

fn build_corpus(spec: SynthSpec, seed: u64) -> Corpus {
    let c = synth_corpus(&spec, seed);
    let rels = relative_with_reference(&c.records, &c.reference).unwrap();
    let data = encode_all(&rels, &fixture_vocabulary(), InputMode::Tokens, &PosTable::builtin()).unwrap();
    Corpus { spec, rels, data }
}

fn convergence_corpus() -> Corpus {
    build_corpus(SynthSpec::new(synth_cells(&(0..SENTENCES.len()).collect::<Vec<_>>()), PER_CELL, NOISE), 1)
}

fn mid_model() -> ModelConfig {
    ModelConfig {
        text_embed_dim: 16,
        text_lstm_hidden: 16,
        text_latent_dim: 16,
        decoder_hidden: 32,
        decoder_layers: 1,
        critic_hidden: 16,
        critic_layers: 1,
        ..ModelConfig::default()
    }
}

/// Default schedule and clipping with a larger step size and the
/// reconstruction term on every generator update.
fn synth_train() -> TrainConfig {
    TrainConfig {
        optimizer: RmsPropConfig { lr: 1e-3, ..RmsPropConfig::default() },
        recon_every: 1,
        seed: 3,
        ..TrainConfig::default()
    }
}

type Cell = (usize, Emotion);

fn cell_samples(data: &[EncodedSample]) -> BTreeMap<Cell, Vec<&EncodedSample>> {
    let mut m: BTreeMap<Cell, Vec<&EncodedSample>> = BTreeMap::new();
    for s in data {
        m.entry((s.sentence_id, s.emotion)).or_default().push(s);
    }
    m
}

#[derive(Clone, Copy)]
struct Fit {
    /// Largest |generated cell mean - target mean| over all cells and words.
    max_dev: f64,
    mse: f64,
}

/// Draws `EVAL_SAMPLES` sequences per cell, cycling over the cell's real
/// clips for the conditioning inputs.
fn measure_fit(t: &WganTrainer, corpus: &Corpus) -> Fit {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let by_cell = cell_samples(&corpus.data);
    let mut generated = Vec::new();
    let mut max_dev = 0.0f64;
    for cell in &corpus.spec.cells {
        let clips = &by_cell[&(cell.sentence_id, cell.emotion)];
        let mut mean = vec![0.0; cell.means.len()];
        for k in 0..EVAL_SAMPLES {
            let g = t.generate(clips[k % clips.len()], &mut rng).unwrap();
            mean.iter_mut().zip(&g.values).for_each(|(m, v)| *m += v / EVAL_SAMPLES as f64);
            generated.push(((cell.sentence_id, cell.emotion), g.values));
        }
        for (m, s) in mean.iter().zip(&cell.means) {
            max_dev = max_dev.max((m - s).abs());
        }
    }
    let real: Vec<(Cell, Vec<f64>)> = corpus.rels.iter().map(|r| ((r.sentence_id, r.emotion), r.values.clone())).collect();
    Fit { max_dev, mse: mse_to_population_mean(&generated, &real).unwrap() }
}

/// First epoch whose critic estimate lies within `band` of zero.
fn band_entry(history: &[EpochStats], band: f64) -> Option<usize> {
    history.iter().find(|h| h.wasserstein.abs() <= band).map(|h| h.epoch)
}

fn train_for(model: ModelConfig, cfg: TrainConfig, data: &[EncodedSample], epochs: usize) -> WganTrainer {
    let mut t = WganTrainer::new(model, cfg).unwrap();
    t.train(data, epochs, &mut |_| {}).unwrap();
    t
}

/// The convergence run doubles as the baseline arm of the ablations, so it
/// always covers at least `ABLATION_EPOCHS`.
struct Baseline {
    trainer: WganTrainer,
    window: Vec<Fit>,
}

fn in_window(epoch: usize) -> bool {
    epoch % EVAL_EVERY == 0 && epoch <= ABLATION_EPOCHS && epoch > ABLATION_EPOCHS - ABLATION_WINDOW * EVAL_EVERY
}

fn mean_mse(fits: &[Fit]) -> f64 {
    fits.iter().map(|f| f.mse).sum::<f64>() / fits.len() as f64
}

// ---------------------------------------------------------------------------
// criteria

fn c1_gradients() -> Outcome {
    use common::gradcheck::{self, TOL, TRIALS};
    let start = Instant::now();
    let groups = [
        gradcheck::primitive_ops(),
        gradcheck::linear_layer(),
        gradcheck::lstm_layer(),
        gradcheck::bilstm_layer(),
        gradcheck::generator_end_to_end(),
        gradcheck::critic_of_generator_end_to_end(),
    ];
    let elapsed = start.elapsed();
    let all: Vec<(String, f64)> = groups.into_iter().flatten().collect();
    let (worst_name, worst) = all.iter().fold(("", 0.0f64), |acc, (n, w)| if *w > acc.1 { (n.as_str(), *w) } else { acc });
    let failing: Vec<&str> = all.iter().filter(|(_, w)| !(*w <= TOL)).map(|(n, _)| n.as_str()).collect();
    let ok = failing.is_empty() && TRIALS >= 20 && elapsed < Duration::from_secs(120);
    let mut detail = format!(
        "{} checks x {TRIALS} trials, worst rel err {worst:.2e} ({worst_name}), tol {TOL:.0e}, {:.2}s",
        all.len(),
        elapsed.as_secs_f64()
    );
    if !failing.is_empty() {
        let _ = write!(detail, "; failing: {}", failing.join(", "));
    }
    Outcome::check("1", "gradient suite", ok, detail)
}

/// Minimum cost over every monotone path, enumerated without memoization.
fn brute_dtw(a: &[f64], b: &[f64], i: usize, j: usize) -> f64 {
    let c = (a[i] - b[j]).abs();
    if i == 0 && j == 0 {
        return c;
    }
    let mut best = f64::INFINITY;
    if i > 0 && j > 0 {
        best = best.min(brute_dtw(a, b, i - 1, j - 1));
    }
    if i > 0 {
        best = best.min(brute_dtw(a, b, i - 1, j));
    }
    if j > 0 {
        best = best.min(brute_dtw(a, b, i, j - 1));
    }
    c + best
}

fn c2_metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut problems = Vec::new();

    let mut dtw_exact = 0;
    for _ in 0..50 {
        let a: Vec<f64> = (0..rng.random_range(1..=8)).map(|_| rng.random_range(0..6) as f64 * 0.5).collect();
        let b: Vec<f64> = (0..rng.random_range(1..=8)).map(|_| rng.random_range(0..6) as f64 * 0.5).collect();
        let (d, _) = dtw(&a, &b).unwrap();
        if d == brute_dtw(&a, &b, a.len() - 1, b.len() - 1) {
            dtw_exact += 1;
        }
    }
    if dtw_exact != 50 {
        problems.push(format!("dtw exact on {dtw_exact}/50"));
    }

    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..12);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nf = n as f64;
        let rmse_oracle = (a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / nf).sqrt();
        let (ma, mb) = (a.iter().sum::<f64>() / nf, b.iter().sum::<f64>() / nf);
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
        let pcc_oracle = cov / (va * vb).sqrt();
        // generated rows a and b against the single real row a: MSE is (0 + mean squared diff) / 2
        let mse_oracle = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / nf / 2.0;
        let mse = mse_to_population_mean(&[(0, a.clone()), (0, b.clone())], &[(0, a.clone())]).unwrap();
        worst = worst
            .max((rmse(&a, &b).unwrap() - rmse_oracle).abs())
            .max((pcc(&a, &b).unwrap() - pcc_oracle).abs())
            .max((mse - mse_oracle).abs());
    }
    if worst > 1e-10 {
        problems.push(format!("rmse/pcc/mse deviation {worst:.1e}"));
    }

    let groups = vec![vec![1.0, 2.0, 3.0], vec![2.0, 3.0, 4.0], vec![3.0, 4.0, 5.0]];
    let f = anova_oneway(&groups, 0.05).unwrap().f;
    let q = tukey_hsd(&groups, 0.05).unwrap().into_iter().find(|p| (p.a, p.b) == (0, 2)).unwrap().q;
    if (f - 3.0).abs() > 1e-9 {
        problems.push(format!("F = {f}"));
    }
    if (q - 3.4641).abs() > 1e-4 {
        problems.push(format!("q = {q}"));
    }
    let detail = format!(
        "dtw {dtw_exact}/50 exact, rmse/pcc/mse max dev {worst:.1e}, F = {f:.12}, q(0,2) = {q:.6}{}",
        if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
    );
    Outcome::check("2", "metric oracles", problems.is_empty(), detail)
}

fn c3_convergence(corpus: &Corpus) -> (Outcome, Baseline) {
    let start = Instant::now();
    let mut t = WganTrainer::new(mid_model(), synth_train()).unwrap();
    let mut passed_at = None;
    let mut last = Fit { max_dev: f64::NAN, mse: f64::NAN };
    let mut window = Vec::new();
    let mut timed_out = false;
    let (mut evals, mut passing) = (0, 0);
    for epoch in 1..=CONVERGENCE_EPOCHS {
        t.run_epoch(&corpus.data, &mut |_| {}).unwrap();
        if epoch % EVAL_EVERY == 0 {
            let fit = measure_fit(&t, corpus);
            evals += 1;
            if fit.max_dev <= 0.05 && fit.mse <= 2.0 * NOISE * NOISE {
                passing += 1;
                passed_at.get_or_insert((epoch, start.elapsed()));
            }
            if in_window(epoch) {
                window.push(fit);
            }
            last = fit;
        }
        if start.elapsed() > CONVERGENCE_LIMIT {
            timed_out = true;
        }
        if (passed_at.is_some() || timed_out) && epoch >= ABLATION_EPOCHS {
            break;
        }
    }
    let (ok, detail) = match passed_at {
        Some((epoch, elapsed)) if elapsed <= CONVERGENCE_LIMIT => (
            true,
            format!(
                "criteria met at epoch {epoch} after {:.0}s ({passing} of {evals} evaluations passing); at epoch {}: max |mean - target| {:.4}, mse {:.5}",
                elapsed.as_secs_f64(),
                t.epoch,
                last.max_dev,
                last.mse
            ),
        ),
        _ => (
            false,
            format!(
                "not met by epoch {} ({:.0}s{}): max |mean - target| {:.4} (tol 0.05), mse {:.5} (tol {:.4})",
                t.epoch,
                start.elapsed().as_secs_f64(),
                if timed_out { ", time limit" } else { "" },
                last.max_dev,
                last.mse,
                2.0 * NOISE * NOISE
            ),
        ),
    };
    let baseline = Baseline { trainer: t, window };
    (Outcome::check("3", "WGAN convergence", ok, detail), baseline)
}

/// Speaker offsets uniform in ±0.15, one per pseudo-speaker.
fn offset_corpus() -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let offsets: Vec<f64> = (0..NUM_SPEAKERS).map(|_| rng.random_range(-0.15..0.15)).collect();
    let mut spec = SynthSpec::new(synth_cells(&(0..SENTENCES.len()).collect::<Vec<_>>()), PER_CELL, NOISE);
    spec.speaker_offsets = Some(offsets);
    build_corpus(spec, 1)
}

/// Squared error of generations against the clip's own expected sequence,
/// `target mean + speaker offset`, averaged over three draws per clip.
fn speaker_mse(t: &WganTrainer, corpus: &Corpus) -> f64 {
    let offsets = corpus.spec.speaker_offsets.as_ref().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut total, mut n) = (0.0, 0);
    for s in &corpus.data {
        let means = spec_means(s.sentence_id, s.emotion);
        for _ in 0..3 {
            let g = t.generate(s, &mut rng).unwrap();
            total += g.values.iter().zip(&means).map(|(v, m)| (v - m - offsets[s.speaker_id]).powi(2)).sum::<f64>()
                / means.len() as f64;
            n += 1;
        }
    }
    total / n as f64
}

fn c4a_speaker() -> Outcome {
    let corpus = offset_corpus();
    let full = train_for(mid_model(), synth_train(), &corpus.data, ABLATION_EPOCHS);
    let ablated = train_for(ModelConfig { use_speaker: false, ..mid_model() }, synth_train(), &corpus.data, ABLATION_EPOCHS);
    let (f, a) = (speaker_mse(&full, &corpus), speaker_mse(&ablated, &corpus));
    Outcome::check(
        "4a",
        "ablation: speaker conditioning",
        a >= f,
        format!("{ABLATION_EPOCHS} epochs each, offsets ±0.15: mse full {f:.5}, no-speaker {a:.5}"),
    )
}

fn c4b_padding(corpus: &Corpus, baseline: &Baseline) -> Outcome {
    let cfg = TrainConfig { padding_mode: PaddingMode::Zero, ..synth_train() };
    let mut padded = WganTrainer::new(mid_model(), cfg).unwrap();
    let mut window = Vec::new();
    for epoch in 1..=ABLATION_EPOCHS {
        padded.run_epoch(&corpus.data, &mut |_| {}).unwrap();
        if in_window(epoch) {
            window.push(measure_fit(&padded, corpus));
        }
    }
    let (p, b) = (mean_mse(&window), mean_mse(&baseline.window));
    let (p_end, b_end) = (window.last().unwrap().mse, baseline.window.last().unwrap().mse);
    Outcome::check(
        "4b",
        "ablation: zero padding",
        p >= b,
        format!(
            "{ABLATION_EPOCHS} epochs each, mse over the last {ABLATION_WINDOW} evaluations: accumulation {b:.5}, zero padding {p:.5} (at epoch {ABLATION_EPOCHS}: {b_end:.5} / {p_end:.5})"
        ),
    )
}

fn c4c_reconstruction(corpus: &Corpus, baseline: &Baseline) -> Outcome {
    let cfg = TrainConfig { recon_every: 0, ..synth_train() };
    let plain = train_for(mid_model(), cfg, &corpus.data, ABLATION_EPOCHS);
    let history = &baseline.trainer.history[..ABLATION_EPOCHS];
    let (with, without) = (band_entry(history, 0.05), band_entry(&plain.history, 0.05));
    let ok = match (with, without) {
        (Some(w), Some(wo)) => wo > w,
        (Some(_), None) => true,
        _ => false,
    };
    let max_abs = |h: &[EpochStats]| h.iter().map(|s| s.wasserstein.abs()).fold(0.0f64, f64::max);
    Outcome::check(
        "4c",
        "ablation: reconstruction loss",
        ok,
        format!(
            "epoch entering |W| <= 0.05: with recon {with:?}, without {without:?}; max |W| over run {:.2e} / {:.2e}",
            max_abs(history),
            max_abs(&plain.history)
        ),
    )
}

const MODE_OFFSET: f64 = 0.2;
const COVERAGE_EPS: f64 = 0.1;
const DIVERSITY_EPOCHS: usize = 200;

/// Root-mean-square per-word distance.
fn rms_distance(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64).sqrt()
}

/// Fraction of real sequences with a same-cell generation within `COVERAGE_EPS`.
fn coverage(corpus: &Corpus, mut generate: impl FnMut(&EncodedSample, &mut ChaCha8Rng) -> Vec<f64>) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let by_cell = cell_samples(&corpus.data);
    let mut covered = 0;
    for (cell, clips) in &by_cell {
        let generated: Vec<Vec<f64>> = (0..EVAL_SAMPLES).map(|k| generate(clips[k % clips.len()], &mut rng)).collect();
        for r in corpus.rels.iter().filter(|r| (r.sentence_id, r.emotion) == *cell) {
            if generated.iter().any(|g| rms_distance(g, &r.values) <= COVERAGE_EPS) {
                covered += 1;
            }
        }
    }
    covered as f64 / corpus.rels.len() as f64
}

fn c5_imle_diversity() -> Outcome {
    let mut spec = SynthSpec::new(synth_cells(&[0, 4, 7]), PER_CELL, 0.02);
    spec.mode_offset = Some(MODE_OFFSET);
    let corpus = build_corpus(spec, 5);
    let optimizer = RmsPropConfig { lr: 1e-3, ..RmsPropConfig::default() };

    let gan = train_for(mid_model(), synth_train(), &corpus.data, DIVERSITY_EPOCHS);
    let pretrain = DIVERSITY_EPOCHS / 10;
    let cfg = ImleConfig { pretrain_epochs: pretrain, epochs: DIVERSITY_EPOCHS - pretrain, optimizer, seed: 3, ..ImleConfig::default() };
    let mut imle = ImleTrainer::new(mid_model(), cfg).unwrap();
    imle.train(&corpus.data, DIVERSITY_EPOCHS).unwrap();

    let gan_cov = coverage(&corpus, |s, rng| gan.generate(s, rng).unwrap().values);
    let imle_cov = coverage(&corpus, |s, rng| imle.generator.generate_with(s, rng).unwrap().values);

    let probe = build_corpus(SynthSpec::new(synth_cells(&[0, 3, 8, 11]), 1, 0.1), 9);
    let mut monotone = 0;
    for trial in 0..100u64 {
        let g = Generator::new(mid_model(), trial).unwrap();
        let s = &probe.data[trial as usize % probe.data.len()];
        let losses: Vec<f64> = (1..=10).map(|m| imle_loss(&g, s, m, 500 + trial).unwrap()).collect();
        if losses.windows(2).all(|w| w[1] <= w[0]) {
            monotone += 1;
        }
    }
    Outcome::check(
        "5",
        "IMLE diversity",
        imle_cov > gan_cov && monotone == 100,
        format!(
            "{DIVERSITY_EPOCHS} epochs each, modes ±{MODE_OFFSET}: coverage at eps {COVERAGE_EPS} IMLE {imle_cov:.3} vs GAN {gan_cov:.3}; loss non-increasing in m on {monotone}/100 trials"
        ),
    )
}

fn small_data(seed: u64) -> Vec<EncodedSample> {
    common::dataset(&[0, 6], &[Emotion::Happy, Emotion::Sad], 4, 0.05, seed)
}

fn c6_clip_invariant() -> Outcome {
    let data = small_data(6);
    let cfg = TrainConfig { optimizer: RmsPropConfig { lr: 1e-2, ..RmsPropConfig::default() }, accumulate: 4, seed: 6, ..TrainConfig::default() };
    let mut t = WganTrainer::new(common::tiny_model(), cfg).unwrap();
    let (mut critic_steps, mut gen_steps, mut worst) = (0u64, 0u64, 0.0f64);
    t.train(&data, 200, &mut |info| {
        match info.kind {
            StepKind::Critic => critic_steps += 1,
            StepKind::Generator => gen_steps += 1,
        }
        worst = worst.max(info.critic_max_abs);
    })
    .unwrap();
    let now = t.critic.params.max_abs();
    Outcome::check(
        "6",
        "critic weight invariant",
        worst <= 0.03 && now <= 0.03 && t.epoch == 200 && critic_steps > 0,
        format!("200 epochs, hook saw {critic_steps} critic + {gen_steps} generator steps, max |w| {worst:.6} (bound 0.03)"),
    )
}

fn loss_csv(history: &[EpochStats]) -> String {
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let mut s = String::from("epoch,wasserstein,critic_loss,generator_loss,recon_loss\n");
    for h in history {
        let _ = writeln!(s, "{},{},{},{},{}", h.epoch, h.wasserstein, h.critic_loss, opt(h.generator_loss), opt(h.recon_loss));
    }
    s
}

fn c7_determinism() -> Outcome {
    let data = small_data(7);
    let cfg = TrainConfig { optimizer: RmsPropConfig { lr: 1e-3, ..RmsPropConfig::default() }, accumulate: 4, seed: 7, ..TrainConfig::default() };
    let full = train_for(common::tiny_model(), cfg.clone(), &data, 100);
    let half = train_for(common::tiny_model(), cfg.clone(), &data, 50);
    let mut resumed = WganTrainer::from_checkpoint(decode_checkpoint(&encode_checkpoint(&half.to_checkpoint()).unwrap()).unwrap()).unwrap();
    resumed.train(&data, 50, &mut |_| {}).unwrap();
    let gan_ok = encode_checkpoint(&resumed.to_checkpoint()).unwrap() == encode_checkpoint(&full.to_checkpoint()).unwrap();

    let icfg = ImleConfig { pretrain_epochs: 10, epochs: 90, m: 4, accumulate: 4, seed: 7, optimizer: cfg.optimizer };
    let mut ifull = ImleTrainer::new(common::tiny_model(), icfg.clone()).unwrap();
    ifull.train(&data, 100).unwrap();
    let mut ihalf = ImleTrainer::new(common::tiny_model(), icfg).unwrap();
    ihalf.train(&data, 50).unwrap();
    let mut iresumed = ImleTrainer::from_checkpoint(decode_checkpoint(&encode_checkpoint(&ihalf.to_checkpoint()).unwrap()).unwrap()).unwrap();
    iresumed.train(&data, 50).unwrap();
    let imle_ok = encode_checkpoint(&iresumed.to_checkpoint()).unwrap() == encode_checkpoint(&ifull.to_checkpoint()).unwrap();

    let again = train_for(common::tiny_model(), cfg, &data, 100);
    let csv_ok = loss_csv(&again.history) == loss_csv(&full.history);
    Outcome::check(
        "7",
        "determinism and checkpointing",
        gan_ok && imle_ok && csv_ok,
        format!("100 vs 50+save/load+50 checkpoint bytes equal: gan {gan_ok}, imle {imle_ok}; repeated-seed loss CSV equal: {csv_ok}"),
    )
}

fn c8_ssml() -> Outcome {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut matched = 0;
    for id in 0..SENTENCES.len() {
        let words = sentence_words(id).unwrap();
        let r: Vec<f64> = (0..words.len()).map(|k| [-0.5, 0.0, 1.0][k % 3]).collect();
        let (doc, _) = SsmlDocument::from_relative(&words, &r, DEFAULT_VOICE).unwrap();
        let expected = std::fs::read(golden.join(format!("sentence_{id:02}.ssml"))).unwrap_or_default();
        if doc.render().as_bytes() == expected.as_slice() {
            matched += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let alphabet: Vec<char> = "ab <>&\"'\u{0}\u{1}\u{8}\t\n\r\u{7f}\u{fffe}\u{ffff}é日😀]]>--?".chars().collect();
    let mut well_formed = 0;
    const FUZZ: usize = 2000;
    for _ in 0..FUZZ {
        let tokens: Vec<String> = (0..rng.random_range(1..6))
            .map(|_| (0..rng.random_range(0..10)).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect())
            .collect();
        let rates: Vec<u32> = tokens.iter().map(|_| rng.random_range(20..=400)).collect();
        let text = emit_ssml(&tokens, &rates, DEFAULT_VOICE).unwrap();
        if let Ok(doc) = roxmltree::Document::parse(&text) {
            if doc.descendants().filter(|n| n.has_tag_name("prosody")).count() == tokens.len() {
                well_formed += 1;
            }
        }
    }
    Outcome::check(
        "8",
        "SSML",
        matched == SENTENCES.len() && well_formed == FUZZ,
        format!("{matched}/{} golden files byte-equal; {well_formed}/{FUZZ} fuzzed documents well-formed", SENTENCES.len()),
    )
}

fn c9_real_data() -> Outcome {
    let Some(path) = std::env::var_os("WORDLEN_CREMAD") else {
        return Outcome {
            id: "9",
            name: "real-data statistics",
            status: Status::Skip,
            detail: "set WORDLEN_CREMAD to an alignments file or directory to run".into(),
        };
    };
    let records = match parse_alignments(path.as_ref()) {
        Ok(r) => r,
        Err(e) => return Outcome::check("9", "real-data statistics", false, format!("cannot read input: {e}")),
    };
    let kept = filter_by_alpha(&records, 0.667);
    let within = |x: f64, target: f64| (x - target).abs() <= 0.05 * target;
    let emotion = ros_groups(&kept, Factor::Emotion).and_then(|(_, g)| anova_oneway(&g, 0.01));
    let speaker = ros_groups(&kept, Factor::Speaker).and_then(|(_, g)| anova_oneway(&g, 0.01));
    match (emotion, speaker) {
        (Ok(e), Ok(s)) => Outcome::check(
            "9",
            "real-data statistics",
            kept.len() == 3413
                && (e.df_between, e.df_within) == (5, 3402)
                && within(e.f, 95.89)
                && (s.df_between, s.df_within) == (90, 3317)
                && within(s.f, 4.34),
            format!(
                "retained {} of {}; emotion F({}, {}) = {:.2}; speaker F({}, {}) = {:.2}",
                kept.len(),
                records.len(),
                e.df_between,
                e.df_within,
                e.f,
                s.df_between,
                s.df_within,
                s.f
            ),
        ),
        (e, s) => Outcome::check("9", "real-data statistics", false, format!("anova failed: {:?} / {:?}", e.err(), s.err())),
    }
}

// ---------------------------------------------------------------------------

fn selected() -> Option<Vec<String>> {
    std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').map(|x| x.trim().to_string()).collect())
}

fn wanted(only: &Option<Vec<String>>, id: &str) -> bool {
    only.as_ref().is_none_or(|ids| ids.iter().any(|x| id.starts_with(x.as_str())))
}

fn report(outcomes: &mut Vec<Outcome>, o: Outcome) {
    println!("{}", o.line());
    outcomes.push(o);
}

#[test]
fn acceptance() {
    let only = selected();
    println!();
    let mut outcomes = Vec::new();
    let simple: [(&str, fn() -> Outcome); 4] =
        [("1", c1_gradients), ("2", c2_metric_oracles), ("5", c5_imle_diversity), ("6", c6_clip_invariant)];
    for (id, f) in &simple[..2] {
        if wanted(&only, id) {
            report(&mut outcomes, f());
        }
    }
    if ["3", "4a", "4b", "4c"].iter().any(|id| wanted(&only, id)) {
        let corpus = convergence_corpus();
        let (c3, baseline) = c3_convergence(&corpus);
        report(&mut outcomes, c3);
        if wanted(&only, "4a") {
            report(&mut outcomes, c4a_speaker());
        }
        if wanted(&only, "4b") {
            report(&mut outcomes, c4b_padding(&corpus, &baseline));
        }
        if wanted(&only, "4c") {
            report(&mut outcomes, c4c_reconstruction(&corpus, &baseline));
        }
    }
    for (id, f) in &simple[2..] {
        if wanted(&only, id) {
            report(&mut outcomes, f());
        }
    }
    for (id, f) in [("7", c7_determinism as fn() -> Outcome), ("8", c8_ssml), ("9", c9_real_data)] {
        if wanted(&only, id) {
            report(&mut outcomes, f());
        }
    }

    let failed: Vec<&str> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id).collect();
    let count = |s| outcomes.iter().filter(|o| o.status == s).count();
    println!("acceptance: {} passed, {} failed, {} skipped", count(Status::Pass), failed.len(), count(Status::Skip));
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
