use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::time::Duration;

use super::config::{IbtConfig, TranslatorSpec};
use super::translator::{run_shell, DirectoryTranslator, Direction, ProcessTranslator, Translator};
use super::{ibt_loop, IbtError, IbtHooks, IbtInputs, IbtState, LogRecord};
use crate::corpus::{read_corpus, read_parallel, MonolingualCorpus, ParallelCorpus};
use crate::lm::NGramModel;
use crate::metrics::{bleu, BleuMode};
use crate::selection::{RawScore, ScoreOptions};

#[derive(Debug, Clone)]
pub struct IbtRun {
    pub state: IbtState,
    pub records: Vec<LogRecord>,
    pub log_path: PathBuf,
}

/// Hooks that write each iteration's corpora under `work_dir/iter-NNN/`
/// and call out to shell commands.
pub struct ShellHooks<'a> {
    pub work_dir: PathBuf,
    pub retrain: Option<String>,
    pub dev_scorer: Option<String>,
    pub dev: Option<ParallelCorpus>,
    pub forward: &'a dyn Translator,
    pub backward: &'a dyn Translator,
    pub timeout: Duration,
}

impl ShellHooks<'_> {
    fn paths(&self, iteration: usize) -> (PathBuf, PathBuf) {
        let dir = self.work_dir.join(format!("iter-{iteration:03}"));
        (dir.join("s2t"), dir.join("t2s"))
    }

    fn args(&self, iteration: usize) -> Vec<String> {
        let (s2t, t2s) = self.paths(iteration);
        let p = |prefix: &Path, ext: &str| crate::corpus::with_suffix(prefix, ext).display().to_string();
        vec![
            iteration.to_string(),
            p(&s2t, "src"),
            p(&s2t, "tgt"),
            p(&t2s, "src"),
            p(&t2s, "tgt"),
        ]
    }
}

impl IbtHooks for ShellHooks<'_> {
    fn retrain(&mut self, state: &IbtState) -> Result<(), IbtError> {
        let (s2t, t2s) = self.paths(state.iteration);
        fs::create_dir_all(s2t.parent().expect("has parent"))?;
        state.forward.write(&s2t)?;
        state.backward.write(&t2s)?;
        if let Some(cmd) = &self.retrain {
            run_shell(cmd, &self.args(state.iteration), &[], self.timeout)?;
        }
        Ok(())
    }

    fn evaluate(&mut self, state: &IbtState) -> Result<f64, IbtError> {
        if let Some(cmd) = &self.dev_scorer {
            let out = run_shell(cmd, &self.args(state.iteration), &[], self.timeout)?;
            let last = out.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("");
            return last.trim().parse().map_err(|_| IbtError::Output {
                command: cmd.clone(),
                reason: format!("expected a number on the last line, found `{last}`"),
            });
        }
        let dev = self.dev.as_ref().expect("config requires a dev set or scorer");
        let lines = |s: &[crate::corpus::Sentence]| s.iter().map(|x| x.text().to_owned()).collect::<Vec<_>>();
        let src = lines(dev.source());
        let tgt = lines(dev.target());
        let (fwd, bwd) = rayon::join(|| self.forward.translate(&src), || self.backward.translate(&tgt));
        let (fwd, bwd) = (fwd?, bwd?);
        let a = bleu(&fwd, &tgt, BleuMode::Standard)?.value;
        let b = bleu(&bwd, &src, BleuMode::Standard)?.value;
        Ok((a + b) / 2.0)
    }
}

fn read_side(path: &Path, lang: &str) -> Result<MonolingualCorpus, IbtError> {
    let r = read_corpus(path, lang)?;
    if r.skipped_blank > 0 {
        log::warn!("{}: skipped {} blank lines", path.display(), r.skipped_blank);
    }
    Ok(r.corpus)
}

/// Loads everything named in `config`, trains the two filter models and
/// runs the loop. The run log is appended to `work_dir/run.log`.
pub fn ibt_run(config: &IbtConfig) -> Result<IbtRun, IbtError> {
    let in_domain = read_parallel(&config.in_src, &config.in_tgt, "in-domain")?.corpus;
    let mono_src = read_side(&config.mono_src, "src")?;
    let mono_tgt = read_side(&config.mono_tgt, "tgt")?;
    let dev = match (&config.dev_src, &config.dev_tgt) {
        (Some(s), Some(t)) => Some(read_parallel(s, t, "dev")?.corpus),
        _ => None,
    };
    let prepare = |c: MonolingualCorpus| if config.wx { c.to_wx() } else { c };
    let (lm_src, lm_tgt) = rayon::join(
        || NGramModel::train(&prepare(in_domain.source_corpus("src")), config.order),
        || NGramModel::train(&prepare(in_domain.target_corpus("tgt")), config.order),
    );
    let (lm_src, lm_tgt) = (lm_src?, lm_tgt?);

    let (forward, backward): (Box<dyn Translator>, Box<dyn Translator>) = match &config.translator {
        TranslatorSpec::Process { s2t, t2s } => (
            Box::new(ProcessTranslator::new(s2t.clone(), Direction::SourceToTarget, config.timeout)),
            Box::new(ProcessTranslator::new(t2s.clone(), Direction::TargetToSource, config.timeout)),
        ),
        TranslatorSpec::Directory(dir) => {
            fs::create_dir_all(dir)?;
            (
                Box::new(DirectoryTranslator::new(dir, Direction::SourceToTarget, config.timeout)),
                Box::new(DirectoryTranslator::new(dir, Direction::TargetToSource, config.timeout)),
            )
        }
    };

    fs::create_dir_all(&config.work_dir)?;
    let log_path = config.work_dir.join("run.log");
    let mut log = OpenOptions::new().create(true).append(true).open(&log_path)?;
    let inputs = IbtInputs {
        in_domain: &in_domain,
        mono_src: &mono_src,
        mono_tgt: &mono_tgt,
        lm_src: &lm_src,
        lm_tgt: &lm_tgt,
        forward: forward.as_ref(),
        backward: backward.as_ref(),
        threshold_src: config.threshold_src,
        threshold_tgt: config.threshold_tgt,
        scoring: ScoreOptions {
            transliterate: config.wx,
            raw: if config.raw_total { RawScore::Total } else { RawScore::PerToken },
        },
    };
    let mut hooks = ShellHooks {
        work_dir: config.work_dir.clone(),
        retrain: config.retrain.clone(),
        dev_scorer: config.dev_scorer.clone(),
        dev,
        forward: forward.as_ref(),
        backward: backward.as_ref(),
        timeout: config.timeout,
    };
    let (state, records) = ibt_loop(&inputs, &config.policy, &mut hooks, &mut log)?;
    Ok(IbtRun {
        state,
        records,
        log_path,
    })
}
