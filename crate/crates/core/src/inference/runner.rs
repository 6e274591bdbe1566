//! Bounded-concurrency orchestration with retries and resumable output.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};

use super::{
    unix_ms, BackendError, ChatBackend, ChatRequest, DecodeSettings, InferenceRecord, Message, Mode,
};
use crate::error::{Error, Result};
use crate::synthesis::ProbeInstance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            initial_backoff: Duration::from_millis(500),
            max_backoff: Duration::from_secs(30),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `attempt` (0-based); a server hint wins.
    pub fn delay(&self, attempt: u32, hint: Option<Duration>) -> Duration {
        if let Some(hint) = hint {
            return hint.min(self.max_backoff);
        }
        let factor = 2u32.saturating_pow(attempt.min(16));
        self.initial_backoff.saturating_mul(factor).min(self.max_backoff)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub launched: usize,
    pub skipped: usize,
    pub failed: usize,
}

pub struct Runner<B: ChatBackend + ?Sized> {
    backend: Arc<B>,
    pub decode: DecodeSettings,
    pub retry: RetryPolicy,
    pub max_parallel: usize,
}

impl<B: ChatBackend + ?Sized> Runner<B> {
    pub fn new(backend: Arc<B>) -> Self {
        Runner {
            backend,
            decode: DecodeSettings::default(),
            retry: RetryPolicy::default(),
            max_parallel: 4,
        }
    }

    pub fn with_decode(mut self, decode: DecodeSettings) -> Self {
        self.decode = decode;
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_max_parallel(mut self, max_parallel: usize) -> Self {
        self.max_parallel = max_parallel.max(1);
        self
    }

    async fn call(&self, request: &ChatRequest) -> std::result::Result<String, BackendError> {
        let mut attempt = 0;
        loop {
            match self.backend.complete(request).await {
                Ok(text) => return Ok(text),
                Err(e) if e.retryable() && attempt < self.retry.max_retries => {
                    let hint = match &e {
                        BackendError::RateLimited { retry_after } => *retry_after,
                        _ => None,
                    };
                    let delay = self.retry.delay(attempt, hint);
                    tracing::debug!(probe = %request.probe_id, attempt, ?delay, "retrying: {e}");
                    tokio::time::sleep(delay).await;
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// Sends user turns one at a time, each followed by an assistant reply.
    /// A failure keeps the partial transcript and sets `error`.
    async fn converse(&self, probe: &ProbeInstance, mode: Mode, turns: Vec<String>) -> InferenceRecord {
        let started_ms = unix_ms();
        let mut transcript: Vec<Message> = Vec::with_capacity(turns.len() * 2);
        let mut error = None;
        for (turn, content) in turns.into_iter().enumerate() {
            transcript.push(Message::user(content));
            let request = ChatRequest {
                probe_id: probe.probe_id.clone(),
                instruction_id: instruction_id(probe),
                turn,
                messages: transcript.clone(),
                decode: self.decode,
            };
            match self.call(&request).await {
                Ok(reply) => transcript.push(Message::assistant(reply)),
                Err(e) => {
                    error = Some(format!("turn {turn}: {e}"));
                    break;
                }
            }
        }
        let final_response = match transcript.last() {
            Some(m) if error.is_none() && m.role == super::Role::Assistant => m.content.clone(),
            _ => String::new(),
        };
        InferenceRecord {
            probe_id: probe.probe_id.clone(),
            mode,
            transcript,
            final_response,
            decode: self.decode,
            model_id: self.backend.model_id().to_string(),
            started_ms,
            finished_ms: unix_ms(),
            error,
        }
    }

    /// The whole composed instruction as one user turn.
    pub async fn run_single_round(&self, probe: &ProbeInstance) -> InferenceRecord {
        self.converse(probe, Mode::SingleRound, vec![probe.text.clone()]).await
    }

    /// The seed first, then one constraint per turn in probe order.
    pub async fn run_multi_round(&self, probe: &ProbeInstance) -> Result<InferenceRecord> {
        if probe.constraints.is_empty() {
            return Err(Error::Argument(format!(
                "probe {} has no constraints for a multi-round conversation",
                probe.probe_id
            )));
        }
        let mut turns = vec![probe.seed_text.clone()];
        turns.extend(probe.constraints.iter().map(|c| c.rendered_text.clone()));
        Ok(self.converse(probe, Mode::MultiRound, turns).await)
    }

    pub async fn run(&self, probe: &ProbeInstance, mode: Mode) -> Result<InferenceRecord> {
        match mode {
            Mode::SingleRound => Ok(self.run_single_round(probe).await),
            Mode::MultiRound => self.run_multi_round(probe).await,
        }
    }

    /// Runs every probe not yet recorded in `out`, appending one line per
    /// probe as results arrive (in input order).
    pub async fn run_all(&self, probes: &[ProbeInstance], mode: Mode, out: &Path) -> Result<RunSummary> {
        let mut ids = HashSet::new();
        for p in probes {
            if !ids.insert(p.probe_id.as_str()) {
                return Err(Error::Argument(format!("duplicate probe id {}", p.probe_id)));
            }
            if mode == Mode::MultiRound && p.constraints.is_empty() {
                return Err(Error::Argument(format!("probe {} has no constraints", p.probe_id)));
            }
        }
        let done = resume(out)?;
        let todo: Vec<&ProbeInstance> = probes.iter().filter(|p| !done.contains(&p.probe_id)).collect();
        let mut summary = RunSummary {
            skipped: probes.len() - todo.len(),
            ..RunSummary::default()
        };
        if todo.is_empty() {
            return Ok(summary);
        }
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(out)
            .map_err(|e| Error::io(out, e))?;
        let mut writer = std::io::BufWriter::new(file);
        let mut results = stream::iter(todo)
            .map(|p| self.run(p, mode))
            .buffered(self.max_parallel);
        while let Some(record) = results.next().await {
            let record = record?;
            summary.launched += 1;
            if let Some(e) = &record.error {
                summary.failed += 1;
                tracing::warn!(probe = %record.probe_id, "inference failed: {e}");
            }
            let line = serde_json::to_string(&record)?;
            writeln!(writer, "{line}").map_err(|e| Error::io(out, e))?;
            writer.flush().map_err(|e| Error::io(out, e))?;
        }
        Ok(summary)
    }
}

pub fn instruction_id(probe: &ProbeInstance) -> String {
    format!("{}/{}", probe.seed_id, probe.combination_id)
}

/// Ids already present in a records file. Unparseable lines (a write cut
/// short by a kill) are dropped by rewriting the file without them.
fn resume(out: &Path) -> Result<HashSet<String>> {
    if !out.exists() {
        return Ok(HashSet::new());
    }
    let text = std::fs::read_to_string(out).map_err(|e| Error::io(out, e))?;
    let mut kept = Vec::new();
    let mut done = HashSet::new();
    let mut dropped = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        match serde_json::from_str::<InferenceRecord>(line) {
            Ok(r) if done.insert(r.probe_id.clone()) => kept.push(r),
            _ => dropped += 1,
        }
    }
    if dropped > 0 || (!text.is_empty() && !text.ends_with('\n')) {
        tracing::warn!("dropping {dropped} incomplete or duplicate lines from {}", out.display());
        crate::io::write_jsonl_atomic(out, &kept)?;
    }
    Ok(done)
}
