use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wordlen::corpus::{
    read_dataset_csv, synth_corpus, tokenize, write_alignments_csv, write_dataset_csv, ClipRecord, Dataset, Emotion,
    Intensity, SynthCell, SynthSpec, WordAlignment,
};
use wordlen::fixtures::SENTENCES;
use wordlen::model::Generator;
use wordlen::training::load_checkpoint;

const TINY: &str = r#"
seed = 1
emotions = ["happy", "anger", "neutral"]

[model]
text_embed_dim = 6
text_lstm_hidden = 5
text_latent_dim = 6
emotion_hidden_dim = 4
speaker_hidden_dim = 4
speaker_latent_dim = 3
noise_dim = 4
decoder_hidden = 8
decoder_layers = 1
critic_hidden = 6
critic_layers = 1

[train]
epochs = 3
accumulate = 4

[imle]
pretrain_epochs = 1
epochs = 2
m = 3
accumulate = 4

[eval]
samples = 3
"#;

fn wordlen(dir: &Path, args: &[&str]) -> Output {
    let config = dir.join("run.toml");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wordlen"));
    if config.exists() {
        cmd.arg("--config").arg(&config);
    }
    cmd.arg("--out").arg(dir.join("out")).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = wordlen(dir, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn pattern(s: usize, e: Emotion) -> Vec<f64> {
    let n = tokenize(SENTENCES[s]).len();
    (0..n).map(|i| if e == Emotion::Neutral { 0.0 } else { 0.3 * ((i + 1) as f64 * (e.index() + 1) as f64 * 0.7).sin() }).collect()
}

fn synth_records(sentences: &[usize], per_cell: usize, noise: f64, speakers: usize) -> Vec<ClipRecord> {
    let cells = sentences
        .iter()
        .flat_map(|&s| {
            [Emotion::Happy, Emotion::Anger, Emotion::Neutral].map(|e| SynthCell { sentence_id: s, emotion: e, means: pattern(s, e) })
        })
        .collect();
    let mut spec = SynthSpec::new(cells, per_cell, noise);
    spec.speakers = speakers;
    synth_corpus(&spec, 5).records
}

fn write_alignments(dir: &Path, records: &[ClipRecord]) -> PathBuf {
    let path = dir.join("alignments.csv");
    write_alignments_csv(fs::File::create(&path).unwrap(), records).unwrap();
    path
}

/// Temp dir holding the tiny config and a prepared dataset.
fn prepared(sentences: &[usize], per_cell: usize) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), TINY).unwrap();
    let input = write_alignments(dir.path(), &synth_records(sentences, per_cell, 0.05, 4));
    ok(dir.path(), &["prepare", "--input", input.to_str().unwrap()]);
    dir
}

#[test]
fn prepare_filters_by_alpha_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut records = synth_records(&[0, 1], 17, 0.05, 91);
    records.truncate(100);
    for (i, r) in records.iter_mut().enumerate() {
        r.alpha = if i % 5 < 2 { 0.5 } else { 0.8 };
    }
    assert_eq!(records.iter().filter(|r| r.alpha >= 0.667).count(), 60);
    let input = write_alignments(dir.path(), &records);
    let stdout = ok(dir.path(), &["prepare", "--input", input.to_str().unwrap()]);
    assert!(stdout.contains("read 100 clips, retained 60"), "{stdout}");

    let dataset = dir.path().join("out/dataset.csv");
    let first = fs::read(&dataset).unwrap();
    assert!(first.starts_with(b"# wordlen seed=0 config="));
    let parsed = read_dataset_csv(first.as_slice()).unwrap();
    assert_eq!(parsed.records.len(), 60);
    ok(dir.path(), &["prepare", "--input", input.to_str().unwrap()]);
    assert_eq!(fs::read(&dataset).unwrap(), first);
}

#[test]
fn prepare_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let o = wordlen(dir.path(), &["prepare", "--input", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("metadata.csv"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "clip_id,speaker_id\n").unwrap();
    assert_eq!(wordlen(dir.path(), &["prepare", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(wordlen(dir.path(), &["prepare"]).status.code(), Some(2));
    assert_eq!(wordlen(dir.path(), &["train"]).status.code(), Some(2));
}

#[test]
fn zero_epoch_checkpoint_is_the_initialization() {
    let dir = prepared(&[0], 4);
    ok(dir.path(), &["--seed", "7", "train", "--model", "gan", "--epochs", "0"]);
    let ck = load_checkpoint(dir.path().join("out/checkpoint.pfck")).unwrap();
    assert_eq!(ck.meta.epoch, 0);
    let fresh = Generator::new(ck.meta.model.clone(), 7).unwrap();
    assert_eq!(Generator::from_params(ck.meta.model.clone(), ck.generator).unwrap(), fresh);
    let loss = fs::read_to_string(dir.path().join("out/loss.csv")).unwrap();
    assert_eq!(loss.lines().count(), 2);
}

#[test]
fn same_seed_same_loss_csv_and_resume_matches() {
    let dir = prepared(&[0, 3], 4);
    let out = dir.path().join("out");
    let run = |args: &[&str]| {
        ok(dir.path(), args);
        (fs::read(out.join("loss.csv")).unwrap(), fs::read(out.join("checkpoint.pfck")).unwrap())
    };
    for model in ["gan", "imle"] {
        let a = run(&["--seed", "7", "train", "--model", model, "--epochs", "4"]);
        let b = run(&["--seed", "7", "train", "--model", model, "--epochs", "4"]);
        assert_eq!(a, b, "{model}");
        assert_eq!(String::from_utf8_lossy(&a.0).lines().count(), 6);

        run(&["--seed", "7", "train", "--model", model, "--epochs", "2"]);
        let ck = out.join("half.pfck");
        fs::rename(out.join("checkpoint.pfck"), &ck).unwrap();
        let resumed = run(&["--seed", "7", "train", "--model", model, "--epochs", "2", "--resume", ck.to_str().unwrap()]);
        assert_eq!(resumed, a, "{model} resume");
    }
    let other = run(&["--seed", "8", "train", "--model", "gan", "--epochs", "4"]);
    assert!(other.0.starts_with(b"# wordlen seed=8"));
}

#[test]
fn resume_rejects_the_wrong_model_kind() {
    let dir = prepared(&[0], 4);
    ok(dir.path(), &["train", "--model", "imle", "--epochs", "1"]);
    let ck = dir.path().join("out/checkpoint.pfck");
    let o = wordlen(dir.path(), &["train", "--model", "gan", "--resume", ck.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_finite_training_exits_3() {
    let dir = prepared(&[0], 4);
    let cfg = TINY.replace("[train]\n", "[train]\noptimizer = { lr = 1e300, decay = 0.9, eps = 1e-8 }\n");
    fs::write(dir.path().join("run.toml"), cfg).unwrap();
    let o = wordlen(dir.path(), &["train", "--model", "gan", "--epochs", "5"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(3), "{err}");
    assert!(err.contains("epoch"), "{err}");
}

#[test]
fn generate_writes_rows_and_ssml() {
    let dir = prepared(&[5], 4);
    ok(dir.path(), &["train", "--epochs", "1"]);
    let args = ["generate", "--sentence", "5", "--emotion", "happy", "--speaker", "1003", "--count", "2"];
    ok(dir.path(), &args);
    let out = dir.path().join("out");
    let csv = fs::read_to_string(out.join("generated.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("0,5,happy,2,"));
    let n_words = tokenize(SENTENCES[5]).len();
    assert_eq!(rows[1].split(',').nth(4).unwrap().split(' ').count(), n_words);
    let ssml: Vec<_> = (0..2).map(|k| fs::read_to_string(out.join(format!("s5_happy_{k}.ssml"))).unwrap()).collect();
    for doc in &ssml {
        assert!(doc.contains("<!-- wordlen seed=1 config="));
        assert_eq!(doc.matches("<prosody").count(), n_words);
    }
    ok(dir.path(), &args);
    assert_eq!(fs::read_to_string(out.join("generated.csv")).unwrap(), csv);
    assert_eq!(fs::read_to_string(out.join("s5_happy_1.ssml")).unwrap(), ssml[1]);

    assert_eq!(wordlen(dir.path(), &["generate", "--sentence", "12", "--emotion", "happy"]).status.code(), Some(2));
    assert_eq!(wordlen(dir.path(), &["generate", "--sentence", "5", "--emotion", "bored"]).status.code(), Some(2));
}

#[test]
fn ssml_command_from_lengths_and_generated_csv() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["ssml", "--sentence", "IEO", "--lengths", "-0.5,0,1", "--emotion", "sad"]);
    let doc = fs::read_to_string(dir.path().join("out/s6_sad_0.ssml")).unwrap();
    assert!(doc.contains(r#"<prosody rate="200%">It's</prosody>"#), "{doc}");
    assert!(doc.contains(r#"<prosody rate="50%">o'clock</prosody>"#), "{doc}");
    assert_eq!(wordlen(dir.path(), &["ssml", "--sentence", "6", "--lengths", "0,0"]).status.code(), Some(2));

    let input = dir.path().join("gen.csv");
    fs::write(&input, "# comment\nsample,sentence_id,emotion,speaker_id,lengths\n3,0,anger,0,0.1 0.2 0.3 0.4 0.5 0.6 0.7\n").unwrap();
    ok(dir.path(), &["ssml", "--input", input.to_str().unwrap()]);
    assert!(dir.path().join("out/s0_anger_3.ssml").exists());
}

#[test]
fn evaluate_writes_reports_and_warns_on_missing_cells() {
    let dir = prepared(&[0, 2], 3);
    ok(dir.path(), &["train", "--epochs", "1"]);
    let o = wordlen(dir.path(), &["evaluate"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("no real clips for sentence 1, happy"), "{err}");
    let out = dir.path().join("out");
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 2 + 6);
    assert!(metrics.lines().nth(2).unwrap().starts_with("gan,0,anger,3,3,"));
    let meanvar = fs::read_to_string(out.join("meanvar.csv")).unwrap();
    assert_eq!(meanvar.lines().filter(|l| l.starts_with("real,")).count(), 18);
    assert_eq!(meanvar.lines().filter(|l| l.starts_with("generated,")).count(), 18);
    let pairs = fs::read_to_string(out.join("pairs_0_1.csv")).unwrap();
    assert_eq!(pairs.lines().nth(1), Some("source,sentence_id,emotion,r_i,r_j"));
}

/// Clips with chosen rates of speech on sentence 0.
fn ros_records(groups: &[(Emotion, &[f64])]) -> Vec<ClipRecord> {
    let words = tokenize(SENTENCES[0]);
    let mut out = Vec::new();
    for (e, rates) in groups {
        for (k, &ros) in rates.iter().enumerate() {
            let step = 1.0 / ros;
            out.push(ClipRecord {
                clip_id: format!("{e}_{k}"),
                speaker_id: 0,
                sentence_id: 0,
                emotion: *e,
                intensity: Intensity::Medium,
                alpha: 1.0,
                words: (0..words.len())
                    .map(|i| WordAlignment { word: words[i].clone(), start: i as f64 * step, end: (i + 1) as f64 * step })
                    .collect(),
            });
        }
    }
    out
}

#[test]
fn stats_on_the_hand_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let records =
        ros_records(&[(Emotion::Anger, &[1.0, 2.0, 3.0]), (Emotion::Happy, &[2.0, 3.0, 4.0]), (Emotion::Sad, &[3.0, 4.0, 5.0])]);
    let n = records.len();
    let data = Dataset {
        references: records.iter().map(|r| vec![0.1; r.words.len()]).collect(),
        relative: Vec::new(),
        records,
    };
    let mut data = data;
    data.relative = data
        .records
        .iter()
        .map(|r| wordlen::corpus::RelativeSequence {
            sentence_id: 0,
            emotion: r.emotion,
            speaker_id: 0,
            values: vec![0.0; r.words.len()],
        })
        .collect();
    let path = dir.path().join("data.csv");
    write_dataset_csv(fs::File::create(&path).unwrap(), &data).unwrap();
    assert_eq!(n, 9);

    let o = wordlen(dir.path(), &["stats", "--dataset", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("speaker: ANOVA skipped"));
    let anova = fs::read_to_string(dir.path().join("out/anova.csv")).unwrap();
    let row: Vec<&str> = anova.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[..2], ["emotion", "3"]);
    assert!((row[2].parse::<f64>().unwrap() - 3.0).abs() < 1e-9);
    assert_eq!(row[3..5], ["2", "6"]);
    assert_eq!(anova.lines().count(), 3);
    let tukey = fs::read_to_string(dir.path().join("out/tukey.csv")).unwrap();
    let ah = tukey.lines().find(|l| l.starts_with("emotion,anger,sad,")).unwrap();
    let q: f64 = ah.split(',').nth(4).unwrap().parse().unwrap();
    assert!((q - 3.4641).abs() < 1e-4);
}

#[test]
fn neutral_generation_stays_near_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = TINY.replace("[train]\nepochs = 3\n", "[train]\nepochs = 600\noptimizer = { lr = 3e-3, decay = 0.9, eps = 1e-8 }\n");
    fs::write(dir.path().join("run.toml"), cfg).unwrap();
    let input = write_alignments(dir.path(), &synth_records(&[0, 4], 8, 0.0, 1));
    ok(dir.path(), &["prepare", "--input", input.to_str().unwrap()]);
    ok(dir.path(), &["train"]);
    ok(dir.path(), &["generate", "--sentence", "4", "--emotion", "neutral", "--count", "20"]);
    let csv = fs::read_to_string(dir.path().join("out/generated.csv")).unwrap();
    let values: Vec<f64> = csv
        .lines()
        .skip(2)
        .flat_map(|l| l.split(',').nth(4).unwrap().split(' ').map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .collect();
    let mean_abs = values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64;
    println!("neutral mean |r| = {mean_abs:.4}");
    assert!(mean_abs < 0.05, "{mean_abs}");
}

#[test]
fn example_config_parses() {
    let dir = tempfile::tempdir().unwrap();
    let example = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example.toml");
    fs::copy(&example, dir.path().join("run.toml")).unwrap();
    ok(dir.path(), &["ssml", "--sentence", "0", "--lengths", "0,0,0,0,0,0,0"]);
    let doc = fs::read_to_string(dir.path().join("out/s0_neutral_0.ssml")).unwrap();
    assert!(doc.contains("wordlen seed=1 "), "{doc}");
}
