//! Ordered execution of a suite over its parameter list.
//!
//! Workers share nothing but the immutable task list and one result channel;
//! verdicts are re-sequenced into parameter order before anything is written,
//! so results files and summaries are byte-stable regardless of worker count.
//! A checkpoint is rewritten atomically every [`CHECKPOINT_EVERY`] completed
//! parameters and once more when the run finishes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::suite::{enumerate_params, run_param, ParamOutcome, Suite, SuiteOptions};
use qres_core::report::Verdict;

/// How many completed parameters between checkpoint rewrites.
pub const CHECKPOINT_EVERY: u64 = 64;

/// Exit status used when a run stops at the hidden `--halt-after` marker,
/// imitating an interrupt.
pub const INTERRUPT_EXIT: u8 = 130;

/// An error that terminates the command with exit status 2.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, a malformed checkpoint, or inconsistent inputs.
    Usage(String),
    /// The filesystem said no.
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

/// Everything needed to execute one run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub suite: Suite,
    pub from: u64,
    pub to: u64,
    pub opts: SuiteOptions,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    /// Include per-parameter timings in result lines (sacrifices
    /// byte-stability across runs).
    pub timing: bool,
    /// Stop at the first failing verdict (the `scan` command).
    pub scan: bool,
    /// Test hook: stop right after this parameter completes, as if the
    /// process had been interrupted.
    pub halt_after: Option<u64>,
}

/// One recorded failure, small enough to keep in checkpoints and summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRec {
    pub p: u64,
    pub params: String,
    pub lhs: String,
    pub rhs: String,
}

/// Tallies accumulated in parameter order as a run emits outcomes.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Tallies {
    pub passes: u64,
    pub failures: Vec<FailureRec>,
    pub skipped: Vec<(u64, String)>,
    /// Result lines written so far (failures and passes both emit one line).
    pub lines_emitted: u64,
    /// Highest parameter whose outcome has been fully recorded; everything
    /// before it in the parameter list is also recorded.
    pub last_completed_param: Option<u64>,
}

impl Tallies {
    pub fn completed(&self) -> u64 {
        self.passes + self.failures.len() as u64 + self.skipped.len() as u64
    }
}

/// On-disk checkpoint: the full run configuration plus the tallies at the
/// last safe point. Rewritten atomically (write + rename), never appended.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub suite: String,
    pub from: u64,
    pub to: u64,
    pub a_set: Option<Vec<i64>>,
    pub grid: Option<i64>,
    pub tolerance: f64,
    pub jobs: usize,
    pub out: Option<String>,
    pub timing: bool,
    pub scan: bool,
    pub complete: bool,
    pub tallies: Tallies,
}

/// Final outcome of a run, fresh or resumed.
#[derive(Debug)]
pub struct RunSummary {
    pub suite: String,
    pub from: u64,
    pub to: u64,
    pub desc: String,
    pub tallies: Tallies,
    /// Parameter at which a scan stopped on its first counterexample.
    pub halted_at: Option<u64>,
    /// The hidden interrupt hook fired; the run is incomplete.
    pub interrupted: bool,
    pub wall: f64,
}

impl RunSummary {
    pub fn attempted(&self) -> u64 {
        self.tallies.completed()
    }
}

/// Render the option set for the human summary line.
pub fn params_desc(opts: &SuiteOptions) -> String {
    let a = match &opts.a_set {
        Some(v) => format!(
            "a={}",
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        ),
        None => "a=default".to_string(),
    };
    let grid = match opts.grid {
        Some(g) => format!(" grid={g}"),
        None => String::new(),
    };
    format!("{a}{grid} tol={:e}", opts.tolerance)
}

/// One result line. Field order is fixed by this struct and never changes.
#[derive(Serialize)]
struct JsonLine<'a> {
    suite: &'a str,
    p: u64,
    params: &'a str,
    pass: bool,
    lhs: &'a str,
    rhs: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    observed_sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u64>,
}

fn render_line(suite: &str, v: &Verdict, elapsed_ms: Option<u64>) -> String {
    serde_json::to_string(&JsonLine {
        suite,
        p: v.p,
        params: &v.params,
        pass: v.pass,
        lhs: &v.lhs,
        rhs: &v.rhs,
        observed_sign: v.observed_sign,
        elapsed_ms,
    })
    .expect("verdict serializes")
}

fn io_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{context}: {e}"))
}

/// Write the checkpoint atomically; a no-op when the run has no checkpoint
/// path configured.
fn write_checkpoint(spec: &RunSpec, tallies: &Tallies, complete: bool) -> Result<(), CliError> {
    let Some(path) = &spec.checkpoint else {
        return Ok(());
    };
    let ck = Checkpoint {
        suite: spec.suite.token(),
        from: spec.from,
        to: spec.to,
        a_set: spec.opts.a_set.clone(),
        grid: spec.opts.grid,
        tolerance: spec.opts.tolerance,
        jobs: spec.jobs,
        out: spec.out.as_ref().map(|p| p.display().to_string()),
        timing: spec.timing,
        scan: spec.scan,
        complete,
        tallies: tallies.clone(),
    };
    let text = serde_json::to_string_pretty(&ck).expect("checkpoint serializes");
    let tmp = path.with_extension("ck.tmp");
    fs::write(&tmp, text).map_err(|e| io_err(&format!("writing {}", tmp.display()), e))?;
    fs::rename(&tmp, path)
        .map_err(|e| io_err(&format!("renaming checkpoint into {}", path.display()), e))?;
    Ok(())
}

fn summary_from(spec: &RunSpec, tallies: Tallies, halted_at: Option<u64>, wall: f64) -> RunSummary {
    RunSummary {
        suite: spec.suite.token(),
        from: spec.from,
        to: spec.to,
        desc: params_desc(&spec.opts),
        tallies,
        halted_at,
        interrupted: false,
        wall,
    }
}

/// Run a fresh spec from its first parameter, truncating any previous
/// results file. An initial checkpoint records the configuration before any
/// work happens so even an immediately-interrupted run can be resumed.
pub fn run_fresh(spec: &RunSpec) -> Result<RunSummary, CliError> {
    write_checkpoint(spec, &Tallies::default(), false)?;
    run(spec, Tallies::default(), 0, false)
}

/// Execute `spec` starting at `params[start_index]`, with `prior` tallies
/// already covering everything before it. `append` keeps an existing results
/// file (resume); otherwise it is recreated.
fn run(
    spec: &RunSpec,
    prior: Tallies,
    start_index: usize,
    append: bool,
) -> Result<RunSummary, CliError> {
    let t0 = Instant::now();
    let params = enumerate_params(&spec.suite, spec.from, spec.to);
    let start_index = start_index.min(params.len());
    let remaining: &[u64] = &params[start_index..];

    let mut out = match &spec.out {
        Some(path) => {
            let file = if append {
                fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .map_err(|e| io_err(&format!("opening {}", path.display()), e))?
            } else {
                fs::File::create(path)
                    .map_err(|e| io_err(&format!("creating {}", path.display()), e))?
            };
            Some(file)
        }
        None => None,
    };

    let suite_token = spec.suite.token();
    let mut tallies = prior;
    let mut halted_at: Option<u64> = None;
    let mut interrupted = false;

    if !remaining.is_empty() {
        let next = AtomicUsize::new(0);
        let stop = AtomicBool::new(false);
        let result: Result<(), CliError> = std::thread::scope(|s| {
            let (tx, rx) = mpsc::channel::<(usize, ParamOutcome, u64)>();
            for _ in 0..spec.jobs.max(1) {
                let tx = tx.clone();
                let next = &next;
                let stop = &stop;
                let suite = &spec.suite;
                let opts = &spec.opts;
                s.spawn(move || loop {
                    if stop.load(Ordering::Relaxed) {
                        break;
                    }
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= remaining.len() {
                        break;
                    }
                    let t = Instant::now();
                    let outcome = run_param(suite, remaining[i], opts);
                    let ms = t.elapsed().as_millis() as u64;
                    if tx.send((i, outcome, ms)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);

            let mut buffer: BTreeMap<usize, (ParamOutcome, u64)> = BTreeMap::new();
            for (i, &param) in remaining.iter().enumerate() {
                let (outcome, ms) = loop {
                    if let Some(v) = buffer.remove(&i) {
                        break v;
                    }
                    match rx.recv() {
                        Ok((j, o, t)) => {
                            if j == i {
                                break (o, t);
                            }
                            buffer.insert(j, (o, t));
                        }
                        Err(_) => {
                            return Err(CliError::Io(
                                "worker pool ended before all results were emitted".into(),
                            ))
                        }
                    }
                };
                let mut halt = false;
                match outcome {
                    ParamOutcome::Skipped(reason) => {
                        tallies.skipped.push((param, reason));
                    }
                    ParamOutcome::Checked(v) => {
                        let line =
                            render_line(&suite_token, &v, spec.timing.then_some(ms));
                        if let Some(w) = out.as_mut() {
                            writeln!(w, "{line}")
                                .and_then(|_| w.flush())
                                .map_err(|e| io_err("writing results", e))?;
                        }
                        if v.pass {
                            tallies.passes += 1;
                        } else {
                            tallies.failures.push(FailureRec {
                                p: v.p,
                                params: v.params.clone(),
                                lhs: v.lhs.clone(),
                                rhs: v.rhs.clone(),
                            });
                            if spec.scan {
                                halted_at = Some(param);
                                halt = true;
                            }
                        }
                        tallies.lines_emitted += 1;
                    }
                }
                tallies.last_completed_param = Some(param);
                if !halt && tallies.completed() % CHECKPOINT_EVERY == 0 {
                    write_checkpoint(spec, &tallies, false)?;
                }
                if spec.halt_after == Some(param) {
                    interrupted = true;
                    halt = true;
                }
                if halt {
                    stop.store(true, Ordering::Relaxed);
                    break;
                }
            }
            stop.store(true, Ordering::Relaxed);
            Ok(())
        });
        result?;
    }

    if let Some(w) = out.as_mut() {
        w.flush().map_err(|e| io_err("flushing results", e))?;
    }
    if !interrupted {
        write_checkpoint(spec, &tallies, true)?;
    }
    let mut summary = summary_from(spec, tallies, halted_at, t0.elapsed().as_secs_f64());
    summary.interrupted = interrupted;
    Ok(summary)
}

/// Read and validate a checkpoint file.
pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read checkpoint {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("corrupt checkpoint {}: {e}", path.display())))
}

/// Continue the run recorded in `path`. The final report (results file and
/// summary) is identical to what an uninterrupted run would have produced:
/// lines already on disk are reconciled, never rewritten.
pub fn resume(
    path: &Path,
    expect_suite: Option<&str>,
    jobs_override: Option<usize>,
) -> Result<RunSummary, CliError> {
    let ck = load_checkpoint(path)?;
    let suite = Suite::parse(&ck.suite)
        .map_err(|e| CliError::Usage(format!("checkpoint {}: {e}", path.display())))?;
    if let Some(want) = expect_suite {
        let want_token = Suite::parse(want)
            .or_else(|_| Suite::parse_conjecture(want))
            .map_err(CliError::Usage)?
            .token();
        if want_token != ck.suite {
            return Err(CliError::Usage(format!(
                "suite mismatch: checkpoint records '{}' but '{want_token}' was requested",
                ck.suite
            )));
        }
    }
    let spec = RunSpec {
        suite,
        from: ck.from,
        to: ck.to,
        opts: SuiteOptions {
            a_set: ck.a_set.clone(),
            grid: ck.grid,
            tolerance: ck.tolerance,
        },
        jobs: jobs_override.unwrap_or(ck.jobs).max(1),
        out: ck.out.as_ref().map(PathBuf::from),
        checkpoint: Some(path.to_path_buf()),
        timing: ck.timing,
        scan: ck.scan,
        halt_after: None,
    };

    if ck.complete {
        let halted_at = (spec.scan && !ck.tallies.failures.is_empty())
            .then(|| ck.tallies.failures.last().expect("nonempty").p);
        return Ok(summary_from(&spec, ck.tallies, halted_at, 0.0));
    }

    let params = enumerate_params(&spec.suite, spec.from, spec.to);
    let mut tallies = ck.tallies.clone();
    let mut idx = match tallies.last_completed_param {
        None => 0,
        Some(lp) => match params.iter().position(|&q| q == lp) {
            Some(i) => i + 1,
            None => {
                return Err(CliError::Usage(format!(
                    "corrupt checkpoint: recorded parameter {lp} is not in the run's \
                     parameter list"
                )))
            }
        },
    };
    if let Some(out_path) = &spec.out {
        idx = recover_tail(out_path, &spec.suite, &params, idx, &mut tallies)?;
    }

    // A scan that already recorded its counterexample is finished; seal it.
    if spec.scan && !tallies.failures.is_empty() {
        let halted_at = Some(tallies.failures.last().expect("nonempty").p);
        write_checkpoint(&spec, &tallies, true)?;
        return Ok(summary_from(&spec, tallies, halted_at, 0.0));
    }

    run(&spec, tallies, idx, true)
}

/// Reconcile a results file with the checkpoint tallies: lines written after
/// the last checkpoint (but before the interruption) are absorbed into the
/// tallies rather than recomputed, and a torn final fragment without a
/// newline is truncated away. Returns the index of the first parameter that
/// still needs to run.
fn recover_tail(
    out_path: &Path,
    suite: &Suite,
    params: &[u64],
    mut idx: usize,
    tallies: &mut Tallies,
) -> Result<usize, CliError> {
    let bytes = match fs::read(out_path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            if tallies.lines_emitted == 0 {
                return Ok(idx);
            }
            return Err(CliError::Usage(format!(
                "results file {} is missing but the checkpoint records {} emitted lines",
                out_path.display(),
                tallies.lines_emitted
            )));
        }
        Err(e) => return Err(io_err(&format!("reading {}", out_path.display()), e)),
    };
    let text = String::from_utf8(bytes).map_err(|_| {
        CliError::Usage(format!("results file {} is not valid UTF-8", out_path.display()))
    })?;
    let mut lines: Vec<&str> = text.split('\n').collect();
    // split() leaves "" after a final newline; anything else is a torn write.
    let torn_len = match lines.last() {
        Some(&"") | None => {
            lines.pop();
            0
        }
        Some(frag) => {
            let n = frag.len();
            lines.pop();
            n
        }
    };
    if (lines.len() as u64) < tallies.lines_emitted {
        return Err(CliError::Usage(format!(
            "results file {} has {} lines but the checkpoint records {}",
            out_path.display(),
            lines.len(),
            tallies.lines_emitted
        )));
    }
    for line in &lines[tallies.lines_emitted as usize..] {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|_| {
            CliError::Usage(format!(
                "results file {} holds an unparsable line beyond the checkpoint",
                out_path.display()
            ))
        })?;
        let lp = v
            .get("p")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| CliError::Usage("results line lacks a parameter field".into()))?;
        while idx < params.len() && params[idx] != lp {
            match crate::suite::static_skip(suite, params[idx]) {
                Some(reason) => {
                    tallies.skipped.push((params[idx], reason));
                    tallies.last_completed_param = Some(params[idx]);
                    idx += 1;
                }
                None => {
                    return Err(CliError::Usage(format!(
                        "results file {} does not match the parameter list \
                         (line for {lp}, expected {})",
                        out_path.display(),
                        params[idx]
                    )))
                }
            }
        }
        if idx >= params.len() {
            return Err(CliError::Usage(format!(
                "results file {} holds lines beyond the parameter range",
                out_path.display()
            )));
        }
        let pass = v
            .get("pass")
            .and_then(|x| x.as_bool())
            .ok_or_else(|| CliError::Usage("results line lacks a pass field".into()))?;
        let field = |k: &str| v.get(k).and_then(|x| x.as_str()).unwrap_or("").to_string();
        if pass {
            tallies.passes += 1;
        } else {
            tallies.failures.push(FailureRec {
                p: lp,
                params: field("params"),
                lhs: field("lhs"),
                rhs: field("rhs"),
            });
        }
        tallies.lines_emitted += 1;
        tallies.last_completed_param = Some(params[idx]);
        idx += 1;
    }
    if torn_len > 0 {
        let keep = (text.len() - torn_len) as u64;
        let f = fs::OpenOptions::new()
            .write(true)
            .open(out_path)
            .map_err(|e| io_err(&format!("reopening {}", out_path.display()), e))?;
        f.set_len(keep)
            .map_err(|e| io_err(&format!("truncating torn line in {}", out_path.display()), e))?;
    }
    Ok(idx)
}

/// Apply `f` to every item on `jobs` workers, returning results in item
/// order regardless of completion order.
pub fn ordered_parallel_map<T: Send>(
    items: &[u64],
    jobs: usize,
    f: impl Fn(u64) -> T + Sync,
) -> Vec<T> {
    let n = items.len();
    let mut slots: Vec<Option<T>> = std::iter::repeat_with(|| None).take(n).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        let (tx, rx) = mpsc::channel::<(usize, T)>();
        let f = &f;
        let next = &next;
        for _ in 0..jobs.max(1) {
            let tx = tx.clone();
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                if tx.send((i, f(items[i]))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        while let Ok((i, v)) = rx.recv() {
            slots[i] = Some(v);
        }
    });
    slots
        .into_iter()
        .map(|o| o.expect("every slot filled"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_map_is_order_stable() {
        let items: Vec<u64> = (1..=50).collect();
        let one = ordered_parallel_map(&items, 1, |x| x * x);
        let four = ordered_parallel_map(&items, 4, |x| x * x);
        assert_eq!(one, four);
        assert_eq!(one[0], 1);
        assert_eq!(one[49], 2500);
    }

    #[test]
    fn checkpoint_round_trips_through_json() {
        let ck = Checkpoint {
            suite: "mordell".into(),
            from: 3,
            to: 99,
            a_set: Some(vec![1, -2]),
            grid: None,
            tolerance: 1e-9,
            jobs: 2,
            out: Some("x.jsonl".into()),
            timing: false,
            scan: false,
            complete: false,
            tallies: Tallies {
                passes: 5,
                failures: vec![FailureRec {
                    p: 7,
                    params: "a=1".into(),
                    lhs: "l".into(),
                    rhs: "r".into(),
                }],
                skipped: vec![(3, "why".into())],
                lines_emitted: 6,
                last_completed_param: Some(23),
            },
        };
        let text = serde_json::to_string(&ck).unwrap();
        let back: Checkpoint = serde_json::from_str(&text).unwrap();
        assert_eq!(back.suite, "mordell");
        assert_eq!(back.tallies.completed(), 7);
        assert_eq!(back.tallies.failures[0].p, 7);
        assert_eq!(back.tallies.last_completed_param, Some(23));
    }

    #[test]
    fn json_lines_have_fixed_field_order() {
        let v = Verdict::new("x", 11, "a=1", true, "lhs", "rhs");
        let line = render_line("thm14", &v, None);
        assert_eq!(
            line,
            r#"{"suite":"thm14","p":11,"params":"a=1","pass":true,"lhs":"lhs","rhs":"rhs"}"#
        );
        let signed = Verdict::new("x", 11, "", false, "l", "r").with_sign(-1);
        let line = render_line("thm12", &signed, Some(4));
        assert_eq!(
            line,
            r#"{"suite":"thm12","p":11,"params":"","pass":false,"lhs":"l","rhs":"r","observed_sign":-1,"elapsed_ms":4}"#
        );
    }
}
