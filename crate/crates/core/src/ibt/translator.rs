//! External translators. A translator turns N lines into exactly N lines.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use super::IbtError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    SourceToTarget,
    TargetToSource,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::SourceToTarget => "s2t",
            Direction::TargetToSource => "t2s",
        })
    }
}

pub trait Translator: Sync {
    fn translate(&self, lines: &[String]) -> Result<Vec<String>, IbtError>;
}

impl<F> Translator for F
where
    F: Fn(&[String]) -> Result<Vec<String>, IbtError> + Sync,
{
    fn translate(&self, lines: &[String]) -> Result<Vec<String>, IbtError> {
        self(lines)
    }
}

pub(crate) fn check_count(what: &str, sent: usize, received: usize) -> Result<(), IbtError> {
    if sent == received {
        Ok(())
    } else {
        Err(IbtError::LineCount {
            translator: what.to_owned(),
            sent,
            received,
        })
    }
}

fn split_output(text: &str) -> Vec<String> {
    let text = text.strip_suffix('\n').unwrap_or(text);
    if text.is_empty() {
        return Vec::new();
    }
    text.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_owned())
        .collect()
}

/// Runs `sh -c <command>` once per batch, lines on stdin, translations on stdout.
#[derive(Debug, Clone)]
pub struct ProcessTranslator {
    pub command: String,
    pub direction: Direction,
    pub timeout: Duration,
}

impl ProcessTranslator {
    pub fn new(command: impl Into<String>, direction: Direction, timeout: Duration) -> Self {
        ProcessTranslator {
            command: command.into(),
            direction,
            timeout,
        }
    }
}

/// Runs a shell command with `input` on stdin and a deadline.
/// Returns stdout; non-zero exit and timeout are errors.
pub(crate) fn run_shell(
    command: &str,
    args: &[String],
    input: &[u8],
    timeout: Duration,
) -> Result<String, IbtError> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .arg("sh")
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| IbtError::Spawn {
            command: command.to_owned(),
            source,
        })?;
    let mut stdin = child.stdin.take().expect("piped");
    let mut stdout = child.stdout.take().expect("piped");
    let mut stderr = child.stderr.take().expect("piped");
    let input = input.to_vec();
    // A command that ignores stdin closes the pipe early; that is not an error.
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(&input);
    });
    let out_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        stdout.read_to_end(&mut buf).map(|_| buf)
    });
    let err_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    let deadline = Instant::now() + timeout;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Err(IbtError::Timeout {
                command: command.to_owned(),
                seconds: timeout.as_secs_f64(),
            });
        }
        thread::sleep(Duration::from_millis(5));
    };
    let _ = writer.join();
    let out = out_reader.join().expect("reader thread")?;
    let err = err_reader.join().expect("reader thread");
    if !status.success() {
        return Err(IbtError::Exit {
            command: command.to_owned(),
            status: status.to_string(),
            stderr: String::from_utf8_lossy(&err).trim().to_owned(),
        });
    }
    String::from_utf8(out).map_err(|_| IbtError::Output {
        command: command.to_owned(),
        reason: "output is not UTF-8".into(),
    })
}

impl Translator for ProcessTranslator {
    fn translate(&self, lines: &[String]) -> Result<Vec<String>, IbtError> {
        let mut input = String::new();
        for l in lines {
            input.push_str(l);
            input.push('\n');
        }
        let out = split_output(&run_shell(&self.command, &[], input.as_bytes(), self.timeout)?);
        check_count(&self.command, lines.len(), out.len())?;
        Ok(out)
    }
}

/// Exchanges files with a translator that runs elsewhere, such as a batch job.
///
/// Each batch is written to `<dir>/<direction>-<n>.in`. The translator must
/// create `<dir>/<direction>-<n>.out` atomically (write elsewhere, then
/// rename) with one line per input line.
#[derive(Debug)]
pub struct DirectoryTranslator {
    pub dir: PathBuf,
    pub direction: Direction,
    pub timeout: Duration,
    pub poll: Duration,
    batch: AtomicUsize,
}

impl DirectoryTranslator {
    pub fn new(dir: impl Into<PathBuf>, direction: Direction, timeout: Duration) -> Self {
        DirectoryTranslator {
            dir: dir.into(),
            direction,
            timeout,
            poll: Duration::from_millis(200),
            batch: AtomicUsize::new(0),
        }
    }
}

impl Translator for DirectoryTranslator {
    fn translate(&self, lines: &[String]) -> Result<Vec<String>, IbtError> {
        let n = self.batch.fetch_add(1, Ordering::SeqCst);
        let stem = format!("{}-{n:06}", self.direction);
        let input = self.dir.join(format!("{stem}.in"));
        let output = self.dir.join(format!("{stem}.out"));
        let mut text = String::new();
        for l in lines {
            text.push_str(l);
            text.push('\n');
        }
        fs::write(&input, text)?;
        let deadline = Instant::now() + self.timeout;
        while !output.exists() {
            if Instant::now() >= deadline {
                return Err(IbtError::Timeout {
                    command: output.display().to_string(),
                    seconds: self.timeout.as_secs_f64(),
                });
            }
            thread::sleep(self.poll);
        }
        let out = split_output(&fs::read_to_string(&output)?);
        check_count(&output.display().to_string(), lines.len(), out.len())?;
        Ok(out)
    }
}
