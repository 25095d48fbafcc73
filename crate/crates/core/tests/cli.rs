use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use clap::CommandFactory;
use lingsel::cli::Cli;

fn lingsel(dir: &Path, args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lingsel"))
        .args(args)
        .current_dir(dir)
        .env_remove("LINGSEL_THREADS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        pipe.write_all(text.as_bytes()).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let files = [
        ("in.src", "राम घर जाता है\nसीता घर जाती है\nराम स्कूल जाता है\n"),
        ("in.tgt", "राम घर जाइछ\nसीता घर जाइछिन\nराम स्कूल जाइछ\n"),
        ("pool.src", "राम घर जाता है\nबीज खेत मिट्टी\n\nसीता स्कूल जाती है\n"),
        ("pool.tgt", "राम घर जाइछ\nबीउ खेत माटो\nखाली\nसीता स्कूल जाइछिन\n"),
        ("short.tgt", "एक\nदो\n"),
    ];
    for (name, text) in files {
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn translit_stdin_to_stdout() {
    let dir = setup();
    let o = lingsel(dir.path(), &["translit", "--to-wx"], Some("हिंदी\nक्या abc\n"));
    assert!(o.status.success());
    assert_eq!(stdout(&o), "hiMxI\nkyA abc\n");
    assert_eq!(stderr(&o), "");
    let back = lingsel(dir.path(), &["translit", "--from-wx"], Some("hiMxI\nkyA\n"));
    assert_eq!(stdout(&back), "हिंदी\nक्या\n");
}

#[test]
fn translit_needs_exactly_one_direction() {
    let dir = setup();
    assert_eq!(lingsel(dir.path(), &["translit"], Some("")).status.code(), Some(1));
    let o = lingsel(dir.path(), &["translit", "--to-wx", "--from-wx"], Some(""));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn threshold_out_of_range_is_usage_error() {
    let dir = setup();
    std::fs::write(dir.path().join("s.tsv"), "0\t-1.0\t1.0\ta\n").unwrap();
    let o = lingsel(dir.path(), &["filter", "--threshold", "1.5", "s.tsv"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("outside [0, 1]"));
    assert_eq!(stdout(&o), "");
}

#[test]
fn misaligned_dassa_is_data_error() {
    let dir = setup();
    let o = lingsel(
        dir.path(),
        &["dassa", "--in-src", "in.src", "--in-tgt", "short.tgt", "--pool-src", "pool.src", "--pool-tgt", "pool.tgt", "--out", "o"],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alignment mismatch"));
    assert_eq!(stdout(&o), "");
}

#[test]
fn unknown_subcommand_lists_valid_ones() {
    let dir = setup();
    let o = lingsel(dir.path(), &["frobnicate"], None);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for name in ["translit", "train-lm", "dassa", "moore-lewis", "ibt"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn help_documents_every_flag() {
    let dir = setup();
    for sub in Cli::command().get_subcommands() {
        let o = lingsel(dir.path(), &[sub.get_name(), "--help"], None);
        assert!(o.status.success());
        let help = stdout(&o);
        for arg in sub.get_arguments() {
            if let Some(long) = arg.get_long() {
                assert!(help.contains(&format!("--{long}")), "{} --{long}", sub.get_name());
            }
        }
        for global in ["--threads", "--verbose", "--quiet"] {
            assert!(help.contains(global));
        }
    }
}

#[test]
fn pipeline_train_score_filter() {
    let dir = setup();
    let d = dir.path();
    let o = lingsel(d, &["train-lm", "--order", "3", "--wx", "in.src", "--out", "lm.arpa"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "");
    let arpa = std::fs::read_to_string(d.join("lm.arpa")).unwrap();
    assert!(arpa.starts_with("\\data\\\n"));

    let score = lingsel(d, &["score", "--arpa", "lm.arpa", "--wx", "pool.src"], None);
    assert!(score.status.success(), "{}", stderr(&score));
    let tsv = stdout(&score);
    let rows: Vec<Vec<&str>> = tsv.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 3);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i.to_string());
        assert_eq!(r[1].split('.').nth(1).unwrap().len(), 6);
        assert_eq!(r[2].split('.').nth(1).unwrap().len(), 6);
    }
    assert_eq!(rows[0][2], "1.000000");
    assert_eq!(rows[1][2], "0.000000");
    assert_eq!(rows[0][3], "राम घर जाता है");

    let again = lingsel(d, &["score", "--arpa", "lm.arpa", "--wx", "--threads", "1", "pool.src"], None);
    assert_eq!(again.stdout, score.stdout);

    std::fs::write(d.join("scored.tsv"), &tsv).unwrap();
    // The scored file skipped the blank source line; drop the same pair from the pool.
    std::fs::write(d.join("p.src"), "राम घर जाता है\nबीज खेत मिट्टी\nसीता स्कूल जाती है\n").unwrap();
    std::fs::write(d.join("p.tgt"), "राम घर जाइछ\nबीउ खेत माटो\nसीता स्कूल जाइछिन\n").unwrap();
    let f = lingsel(
        d,
        &["filter", "--threshold", "0.8", "scored.tsv", "--pool-src", "p.src", "--pool-tgt", "p.tgt", "--out", "kept"],
        None,
    );
    assert!(f.status.success(), "{}", stderr(&f));
    let kept = std::fs::read_to_string(d.join("kept.src")).unwrap();
    assert!(kept.starts_with("राम घर जाता है\n"));
    assert!(!kept.contains("बीज"));
    assert_eq!(
        kept.lines().count(),
        std::fs::read_to_string(d.join("kept.tgt")).unwrap().lines().count()
    );
}

#[test]
fn filter_pool_size_mismatch_is_data_error() {
    let dir = setup();
    let d = dir.path();
    std::fs::write(d.join("s.tsv"), "0\t-1.0\t1.0\ta\n").unwrap();
    let o = lingsel(d, &["filter", "s.tsv", "--pool-src", "in.src", "--pool-tgt", "in.tgt", "--out", "k"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = lingsel(d, &["filter", "s.tsv", "--pool-src", "in.src"], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dassa_writes_both_directions() {
    let dir = setup();
    let d = dir.path();
    let o = lingsel(
        d,
        &["dassa", "--in-src", "in.src", "--in-tgt", "in.tgt", "--pool-src", "pool.src", "--pool-tgt", "pool.tgt", "--order", "3", "--out", "md"],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let report = stdout(&o);
    assert!(report.contains("in_domain\t3"));
    assert!(report.contains("pool\t3"));
    for f in ["md.s2t.src", "md.s2t.tgt", "md.t2s.src", "md.t2s.tgt"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let size = |f: &str| std::fs::read_to_string(d.join(f)).unwrap().lines().count();
    assert_eq!(size("md.s2t.src"), size("md.s2t.tgt"));
    let line = report.lines().find(|l| l.starts_with("size_s2t")).unwrap();
    assert_eq!(line, format!("size_s2t\t{}", size("md.s2t.src")));
}

#[test]
fn metrics_report_four_decimals() {
    let dir = setup();
    let d = dir.path();
    std::fs::write(d.join("h"), "a b c d\n").unwrap();
    std::fs::write(d.join("r"), "a b c d e\n").unwrap();
    let o = lingsel(d, &["metrics", "--product-bleu", "--ter", "h", "r"], None);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("bleu-product\t0.8000\t"), "{out}");
    assert!(out.contains("ter\t0.2000\t"), "{out}");
    assert_eq!(stderr(&o), "");
}

#[test]
fn overlap_combine_perplexity_moore_lewis() {
    let dir = setup();
    let d = dir.path();
    let o = lingsel(d, &["overlap", "in.src", "in.tgt", "--list"], None);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("overlap\t"));
    assert!(out.contains("\nrAma\n"));

    let o = lingsel(d, &["combine", "--part", "in.src", "in.tgt", "--part", "in.src", "in.tgt", "--name", "MD", "--out", "md"], None);
    assert_eq!(stdout(&o), "MD\t6\n");

    lingsel(d, &["train-lm", "--order", "2", "in.src", "--out", "in.arpa"], None);
    lingsel(d, &["train-lm", "--order", "2", "md.src", "--out", "md.arpa"], None);
    let p = lingsel(d, &["perplexity", "--arpa", "in.arpa", "in.src"], None);
    let text = stdout(&p);
    assert!(text.contains("sentences\t3\n"), "{text}");
    assert!(text.lines().last().unwrap().starts_with("perplexity\t"));

    let m = lingsel(d, &["moore-lewis", "--in-arpa", "in.arpa", "--pool-arpa", "in.arpa", "pool.src"], None);
    assert!(m.status.success(), "{}", stderr(&m));
    for line in stdout(&m).lines() {
        assert_eq!(line.split('\t').nth(1), Some("0.000000"));
    }
}

#[test]
fn malformed_arpa_is_data_error() {
    let dir = setup();
    std::fs::write(dir.path().join("bad.arpa"), "\\data\\\nngram 1=2\n\n\\1-grams:\n-1.0\ta\n\\end\\\n").unwrap();
    let o = lingsel(dir.path(), &["perplexity", "--arpa", "bad.arpa", "in.src"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.arpa"));
}

#[test]
fn threads_from_environment() {
    let dir = setup();
    let o = Command::new(env!("CARGO_BIN_EXE_lingsel"))
        .args(["translit", "--to-wx", "in.src"])
        .current_dir(dir.path())
        .env("LINGSEL_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_lingsel"))
        .args(["translit", "--to-wx", "in.src"])
        .current_dir(dir.path())
        .env("LINGSEL_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn ibt_from_config() {
    let dir = setup();
    let d = dir.path();
    std::fs::write(
        d.join("run.cfg"),
        "in_src = in.src\nin_tgt = in.tgt\nmono_src = in.src\nmono_tgt = in.tgt\nwork_dir = work\n\
         translate_s2t = cat\ntranslate_t2s = cat\ndev_scorer = echo 0.1\norder = 2\npatience = 1\n",
    )
    .unwrap();
    let o = lingsel(d, &["ibt", "--config", "run.cfg"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("iteration=2 "), "{out}");
    assert!(out.ends_with("iterations=2 best=0.100000\n"), "{out}");

    std::fs::write(d.join("broken.cfg"), "in_src = in.src\n").unwrap();
    let o = lingsel(d, &["ibt", "--config", "broken.cfg"], None);
    assert_eq!(o.status.code(), Some(2));
}
