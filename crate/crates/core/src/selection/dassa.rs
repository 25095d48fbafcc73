//! Domain adaptation by scaled-score selection over a multi-domain pool.
//!
//! One model is trained on each side of the in-domain corpus. The pool's
//! source side is scored with the source model and its target side with
//! the target model. Pairs whose source SSS clears the source threshold are
//! appended to the in-domain corpus to train source→target; pairs whose
//! target SSS clears the target threshold do the same for target→source.
//! Whole pairs are always kept, so alignment is preserved.

use super::{
    check_threshold, filter_by_threshold, sss_scores, ScoreOptions, SelectionError,
    SelectionResult, SentenceScorer, Side, DEFAULT_THRESHOLD,
};
use crate::corpus::{combine_domains, ParallelCorpus};
use crate::lm::NGramModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DassaConfig {
    pub order: usize,
    pub threshold_source: f64,
    pub threshold_target: f64,
    pub scoring: ScoreOptions,
}

impl Default for DassaConfig {
    fn default() -> Self {
        DassaConfig {
            order: 5,
            threshold_source: DEFAULT_THRESHOLD,
            threshold_target: DEFAULT_THRESHOLD,
            scoring: ScoreOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DassaReport {
    pub in_domain: usize,
    pub pool: usize,
    pub source: SelectionResult,
    pub target: SelectionResult,
    /// Pool indices kept by both sides.
    pub overlap: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct DassaOutput {
    /// In-domain plus pairs selected on the source side.
    pub forward: ParallelCorpus,
    /// In-domain plus pairs selected on the target side.
    pub backward: ParallelCorpus,
    pub report: DassaReport,
}

/// Trains both side models on the in-domain corpus, then selects.
pub fn select_dassa(
    in_domain: &ParallelCorpus,
    pool: &ParallelCorpus,
    config: &DassaConfig,
) -> Result<DassaOutput, SelectionError> {
    check_threshold(config.threshold_source)?;
    check_threshold(config.threshold_target)?;
    if in_domain.is_empty() {
        return Err(SelectionError::EmptyCorpus("in-domain"));
    }
    if pool.is_empty() {
        return Err(SelectionError::EmptyCorpus("pool"));
    }
    let prepare = |c: crate::corpus::MonolingualCorpus| {
        if config.scoring.transliterate {
            c.to_wx()
        } else {
            c
        }
    };
    let (src_lm, tgt_lm) = rayon::join(
        || NGramModel::train(&prepare(in_domain.source_corpus("src")), config.order),
        || NGramModel::train(&prepare(in_domain.target_corpus("tgt")), config.order),
    );
    let (src_lm, tgt_lm) = (src_lm?, tgt_lm?);
    let mut out = dassa_with_scorers(in_domain, pool, &src_lm, &tgt_lm, config)?;
    out.report
        .warnings
        .splice(0..0, src_lm.warnings().iter().chain(tgt_lm.warnings()).cloned());
    Ok(out)
}

/// Selection with caller-supplied scorers for each side.
pub fn dassa_with_scorers<S, T>(
    in_domain: &ParallelCorpus,
    pool: &ParallelCorpus,
    source_scorer: &S,
    target_scorer: &T,
    config: &DassaConfig,
) -> Result<DassaOutput, SelectionError>
where
    S: SentenceScorer + ?Sized,
    T: SentenceScorer + ?Sized,
{
    check_threshold(config.threshold_source)?;
    check_threshold(config.threshold_target)?;
    if pool.is_empty() {
        return Err(SelectionError::EmptyCorpus("pool"));
    }
    let src_run = sss_scores(source_scorer, &pool.source_corpus("src"), config.scoring)?;
    let tgt_run = sss_scores(target_scorer, &pool.target_corpus("tgt"), config.scoring)?;
    let source = filter_by_threshold(&src_run, config.threshold_source, Side::Source)?;
    let target = filter_by_threshold(&tgt_run, config.threshold_target, Side::Target)?;

    let selected_fwd = pool.select(format!("{}-src-selected", pool.name), &source.kept);
    let selected_bwd = pool.select(format!("{}-tgt-selected", pool.name), &target.kept);
    let forward = combine_domains(
        &[in_domain.clone(), selected_fwd],
        &format!("{}+{}.s2t", in_domain.name, pool.name),
    )?;
    let backward = combine_domains(
        &[in_domain.clone(), selected_bwd],
        &format!("{}+{}.t2s", in_domain.name, pool.name),
    )?;

    let tgt_set: std::collections::HashSet<usize> = target.kept.iter().copied().collect();
    let overlap = source.kept.iter().filter(|i| tgt_set.contains(i)).count();
    let warnings = src_run.warnings.into_iter().chain(tgt_run.warnings).collect();
    Ok(DassaOutput {
        forward,
        backward,
        report: DassaReport {
            in_domain: in_domain.len(),
            pool: pool.len(),
            source,
            target,
            overlap,
            warnings,
        },
    })
}

impl std::fmt::Display for DassaReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "in_domain\t{}", self.in_domain)?;
        writeln!(f, "pool\t{}", self.pool)?;
        for r in [&self.source, &self.target] {
            writeln!(
                f,
                "{}\tkept={}\tthreshold={:.6}\tmin={:.6}\tmax={:.6}",
                r.side,
                r.kept.len(),
                r.threshold,
                r.min,
                r.max
            )?;
        }
        writeln!(f, "overlap\t{}", self.overlap)?;
        writeln!(f, "size_s2t\t{}", self.in_domain + self.source.kept.len())?;
        write!(f, "size_t2s\t{}", self.in_domain + self.target.kept.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(name: &str, pairs: &[(&str, &str)]) -> ParallelCorpus {
        ParallelCorpus::from_pairs(name, pairs).unwrap()
    }

    #[test]
    fn identical_pool_threshold_zero_doubles() {
        let id = corpus("id", &[("a b", "x y"), ("b c", "y z"), ("c a", "z x")]);
        let cfg = DassaConfig {
            order: 3,
            threshold_source: 0.0,
            threshold_target: 0.0,
            scoring: ScoreOptions::default(),
        };
        let out = select_dassa(&id, &id, &cfg).unwrap();
        assert_eq!(out.forward.len(), 6);
        assert_eq!(out.backward.len(), 6);
        assert_eq!(out.report.overlap, 3);
    }

    #[test]
    fn rejects_threshold_above_one() {
        let id = corpus("id", &[("a", "x")]);
        let cfg = DassaConfig {
            threshold_source: 1.2,
            ..DassaConfig::default()
        };
        assert!(matches!(
            select_dassa(&id, &id, &cfg),
            Err(SelectionError::Threshold(t)) if t == 1.2
        ));
    }

    #[test]
    fn empty_inputs_rejected() {
        let id = corpus("id", &[("a", "x")]);
        let empty = corpus("e", &[]);
        assert!(select_dassa(&empty, &id, &DassaConfig::default()).is_err());
        assert!(select_dassa(&id, &empty, &DassaConfig::default()).is_err());
    }
}
