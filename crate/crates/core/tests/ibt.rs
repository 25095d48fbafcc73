mod common;

use std::cell::Cell;

use common::scorers::TableScorer;
use lingsel::corpus::{MonolingualCorpus, ParallelCorpus};
use lingsel::ibt::*;
use lingsel::selection::{RawScore, ScoreOptions};

fn identity(lines: &[String]) -> Result<Vec<String>, IbtError> {
    Ok(lines.to_vec())
}

/// "m3" becomes "t3": the translation carries its source index.
fn tagging(lines: &[String]) -> Result<Vec<String>, IbtError> {
    Ok(lines.iter().map(|l| l.replacen('m', "t", 1)).collect())
}

fn drops_one(lines: &[String]) -> Result<Vec<String>, IbtError> {
    Ok(lines[1..].to_vec())
}

fn plain() -> ScoreOptions {
    ScoreOptions {
        transliterate: false,
        raw: RawScore::PerToken,
    }
}

struct Fixture {
    in_domain: ParallelCorpus,
    mono_src: MonolingualCorpus,
    mono_tgt: MonolingualCorpus,
    scorer: TableScorer,
}

fn fixture() -> Fixture {
    Fixture {
        in_domain: ParallelCorpus::from_pairs("id", &[("i0", "j0"), ("i1", "j1")]).unwrap(),
        mono_src: MonolingualCorpus::from_lines("s", &["m0", "m1", "m2", "m3"]).unwrap(),
        mono_tgt: MonolingualCorpus::from_lines("t", &["m0", "m1", "m2", "m3"]).unwrap(),
        // Two in-domain-like outputs (t0, t2) and two gibberish ones.
        scorer: TableScorer::new(&[
            ("t0", -1.0),
            ("t1", -4.0),
            ("t2", -1.5),
            ("t3", -9.0),
            ("m0", -2.0),
            ("m1", -2.0),
            ("m2", -2.0),
            ("m3", -2.0),
        ]),
    }
}

fn inputs<'a>(f: &'a Fixture, t: &'a dyn Translator, threshold: f64) -> IbtInputs<'a> {
    IbtInputs {
        in_domain: &f.in_domain,
        mono_src: &f.mono_src,
        mono_tgt: &f.mono_tgt,
        lm_src: &f.scorer,
        lm_tgt: &f.scorer,
        forward: t,
        backward: t,
        threshold_src: threshold,
        threshold_tgt: threshold,
        scoring: plain(),
    }
}

#[test]
fn identity_translator_threshold_zero_keeps_everything() {
    let f = fixture();
    let mut state = IbtState::new(&f.in_domain);
    let report = ibt_iterate(&mut state, &inputs(&f, &identity, 0.0)).unwrap();
    assert_eq!(state.iteration, 1);
    assert_eq!(report.kept_src, [0, 1, 2, 3]);
    assert_eq!(state.forward.len(), f.in_domain.len() + f.mono_tgt.len());
    for (i, (s, t)) in state.forward.pairs().skip(2).enumerate() {
        assert_eq!(s, &f.mono_tgt.sentences[i]);
        assert_eq!(t, &f.mono_tgt.sentences[i]);
    }
}

#[test]
fn four_scripted_outputs_by_hand() {
    // SSS = (L + 9) / 8: t0 1, t1 0.625, t2 0.9375, t3 0.
    let f = fixture();
    let mut state = IbtState::new(&f.in_domain);
    let report = ibt_iterate(&mut state, &inputs(&f, &tagging, 0.8)).unwrap();
    assert_eq!(report.kept_src, [0, 2]);
    assert_eq!(report.kept_tgt, [0, 2]);
    let fwd: Vec<_> = state.forward.pairs().map(|(s, t)| (s.text(), t.text())).collect();
    assert_eq!(fwd, [("i0", "j0"), ("i1", "j1"), ("t0", "m0"), ("t2", "m2")]);
    let bwd: Vec<_> = state.backward.pairs().map(|(s, t)| (s.text(), t.text())).collect();
    assert_eq!(bwd, [("i0", "j0"), ("i1", "j1"), ("m0", "t0"), ("m2", "t2")]);
}

#[test]
fn threshold_one_keeps_argmax() {
    let f = fixture();
    let mut state = IbtState::new(&f.in_domain);
    let report = ibt_iterate(&mut state, &inputs(&f, &tagging, 1.0)).unwrap();
    assert_eq!(report.kept_src, [0]);
    assert_eq!(report.kept_tgt, [0]);
}

#[test]
fn pair_integrity_and_threshold_monotonicity() {
    let f = fixture();
    let mut previous: Option<Vec<usize>> = None;
    for t in [0.0, 0.3, 0.62, 0.625, 0.9, 0.95, 1.0] {
        let mut state = IbtState::new(&f.in_domain);
        let report = ibt_iterate(&mut state, &inputs(&f, &tagging, t)).unwrap();
        assert!(state.forward.len() >= f.in_domain.len());
        for (s, tg) in state.forward.pairs().skip(f.in_domain.len()) {
            assert_eq!(&s.text()[1..], &tg.text()[1..]);
        }
        for (s, tg) in state.backward.pairs().skip(f.in_domain.len()) {
            assert_eq!(&s.text()[1..], &tg.text()[1..]);
        }
        if let Some(prev) = &previous {
            assert!(report.kept_src.iter().all(|i| prev.contains(i)));
        }
        previous = Some(report.kept_src);
    }
}

#[test]
fn line_count_mismatch_is_an_error() {
    let f = fixture();
    let mut state = IbtState::new(&f.in_domain);
    let err = ibt_iterate(&mut state, &inputs(&f, &drops_one, 0.5)).unwrap_err();
    assert!(matches!(err, IbtError::LineCount { sent: 4, received: 3, .. }), "{err}");
    assert_eq!(state.iteration, 0);
}

#[test]
fn rebuilt_fresh_each_iteration() {
    let f = fixture();
    let mut state = IbtState::new(&f.in_domain);
    let inp = inputs(&f, &tagging, 0.8);
    ibt_iterate(&mut state, &inp).unwrap();
    let first = state.forward.clone();
    ibt_iterate(&mut state, &inp).unwrap();
    assert_eq!(state.iteration, 2);
    assert_eq!(state.forward.len(), first.len());
    assert_eq!(state.forward.source(), first.source());
}

struct Scripted<'a> {
    scores: Vec<f64>,
    retrained: &'a Cell<usize>,
    fail_at: Option<usize>,
}

impl IbtHooks for Scripted<'_> {
    fn retrain(&mut self, _: &IbtState) -> Result<(), IbtError> {
        self.retrained.set(self.retrained.get() + 1);
        Ok(())
    }

    fn evaluate(&mut self, state: &IbtState) -> Result<f64, IbtError> {
        if self.fail_at == Some(state.iteration) {
            return Err(IbtError::Output {
                command: "scorer".into(),
                reason: "scripted failure".into(),
            });
        }
        Ok(self.scores[(state.iteration - 1).min(self.scores.len() - 1)])
    }
}

fn run_scripted(scores: Vec<f64>, policy: LoopPolicy) -> (IbtState, Vec<LogRecord>, usize, String) {
    let f = fixture();
    let retrained = Cell::new(0);
    let mut hooks = Scripted {
        scores,
        retrained: &retrained,
        fail_at: None,
    };
    let mut log = Vec::new();
    let (state, records) = ibt_loop(&inputs(&f, &tagging, 0.8), &policy, &mut hooks, &mut log).unwrap();
    (state, records, retrained.get(), String::from_utf8(log).unwrap())
}

#[test]
fn single_iteration_cap() {
    let policy = LoopPolicy {
        max_iterations: 1,
        ..LoopPolicy::default()
    };
    let (state, records, retrained, _) = run_scripted(vec![0.3], policy);
    assert_eq!(state.iteration, 1);
    assert_eq!(records.len(), 1);
    assert_eq!(retrained, 1);
    assert_eq!(state.history, [0.3]);
}

#[test]
fn constant_score_stops_after_patience() {
    let (state, records, _, log) = run_scripted(vec![0.25], LoopPolicy::default());
    assert_eq!(state.iteration, 1 + DEFAULT_PATIENCE);
    assert_eq!(state.stall, DEFAULT_PATIENCE);
    assert_eq!(records.len(), 11);
    assert_eq!(log.lines().count(), 11);
    assert!(log.lines().last().unwrap().contains("stall=10"));
}

#[test]
fn improving_scores_run_to_the_cap() {
    let policy = LoopPolicy {
        max_iterations: 25,
        ..LoopPolicy::default()
    };
    let (state, _, _, _) = run_scripted((0..25).map(f64::from).collect(), policy);
    assert_eq!(state.iteration, 25);
    assert_eq!(state.stall, 0);
    assert_eq!(state.best, Some(24.0));
}

#[test]
fn ten_stalls_after_best() {
    let mut scores = vec![10.0, 11.0, 12.0, 13.0];
    scores.extend([13.0, 12.0, 9.0, 13.0, 11.0, 12.5, 13.0, 1.0, 13.0, 12.0, 20.0]);
    let (state, _, _, _) = run_scripted(scores, LoopPolicy::default());
    assert_eq!(state.iteration, 14);
    assert_eq!(state.best, Some(13.0));
    assert_eq!(state.history.len(), 14);
}

#[test]
fn hook_failure_keeps_partial_log() {
    let f = fixture();
    let retrained = Cell::new(0);
    let mut hooks = Scripted {
        scores: vec![1.0, 2.0, 3.0],
        retrained: &retrained,
        fail_at: Some(3),
    };
    let mut log = Vec::new();
    let err = ibt_loop(&inputs(&f, &tagging, 0.8), &LoopPolicy::default(), &mut hooks, &mut log).unwrap_err();
    assert!(matches!(err, IbtError::Iteration { iteration: 3, .. }), "{err}");
    assert_eq!(String::from_utf8(log).unwrap().lines().count(), 2);
}

#[test]
fn deterministic_given_translator() {
    let f = fixture();
    let run = || {
        let mut s = IbtState::new(&f.in_domain);
        ibt_iterate(&mut s, &inputs(&f, &tagging, 0.8)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        s.forward.write(&dir.path().join("c")).unwrap();
        (
            std::fs::read(dir.path().join("c.src")).unwrap(),
            std::fs::read(dir.path().join("c.tgt")).unwrap(),
        )
    };
    assert_eq!(run(), run());
}

#[test]
fn shell_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let write = |name: &str, text: &str| std::fs::write(d.join(name), text).unwrap();
    write("id.src", "राम घर जाता है\nसीता घर जाती है\n");
    write("id.tgt", "राम घर जाइछ\nसीता घर जाइछिन\n");
    write("mono.src", "राम घर जाता है\nबीज खेत\n");
    write("mono.tgt", "सीता घर जाइछिन\nपानी\n");
    write(
        "run.cfg",
        "# test run\n\
         in_src = id.src\nin_tgt = id.tgt\nmono_src = mono.src\nmono_tgt = mono.tgt\n\
         work_dir = work\ntranslate_s2t = cat\ntranslate_t2s = cat\n\
         retrain = echo \"$@\" >> retrain.args\n\
         dev_scorer = echo 0.5\n\
         order = 3\npatience = 2\nmax_iterations = 10\ntimeout = 30\n",
    );
    let config = IbtConfig::load(&d.join("run.cfg")).unwrap();
    let run = ibt_run(&config).unwrap();
    assert_eq!(run.state.iteration, 3);
    let log = std::fs::read_to_string(&run.log_path).unwrap();
    assert_eq!(log.lines().count(), 3);
    assert!(log.starts_with("iteration=1 kept_src="));
    let s2t = d.join("work/iter-002/s2t.src");
    assert!(s2t.exists());
    let n = std::fs::read_to_string(&s2t).unwrap().lines().count();
    assert_eq!(n, 2 + run.records[1].kept_src);
}

#[test]
fn shell_run_default_dev_bleu() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let write = |name: &str, text: &str| std::fs::write(d.join(name), text).unwrap();
    write("id.src", "a b c d\ne f g h\n");
    write("id.tgt", "a b c d\ne f g h\n");
    write("mono.src", "a b c d\n");
    write("mono.tgt", "e f g h\n");
    write("dev.src", "a b c d e\n");
    write("dev.tgt", "a b c d e\n");
    write(
        "run.cfg",
        "in_src = id.src\nin_tgt = id.tgt\nmono_src = mono.src\nmono_tgt = mono.tgt\n\
         dev_src = dev.src\ndev_tgt = dev.tgt\nwork_dir = w\n\
         translate_s2t = cat\ntranslate_t2s = cat\nmax_iterations = 1\nwx = false\n",
    );
    let run = ibt_run(&IbtConfig::load(&d.join("run.cfg")).unwrap()).unwrap();
    assert_eq!(run.state.history, [1.0]);
}

#[test]
fn failing_retrain_reports_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (n, t) in [("a", "x y\n"), ("b", "x y\n"), ("c", "x\n"), ("e", "y\n")] {
        std::fs::write(d.join(n), t).unwrap();
    }
    std::fs::write(
        d.join("run.cfg"),
        "in_src = a\nin_tgt = b\nmono_src = c\nmono_tgt = e\nwork_dir = w\n\
         translate_s2t = cat\ntranslate_t2s = cat\ndev_scorer = echo 1\n\
         retrain = test \"$1\" -lt 2\n",
    )
    .unwrap();
    let err = ibt_run(&IbtConfig::load(&d.join("run.cfg")).unwrap()).unwrap_err();
    assert!(matches!(err, IbtError::Iteration { iteration: 2, .. }), "{err}");
    let log = std::fs::read_to_string(d.join("w/run.log")).unwrap();
    assert_eq!(log.lines().count(), 1);
}
