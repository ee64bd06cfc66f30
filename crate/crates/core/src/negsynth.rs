//! Synthesis of hard-negative trajectories by instruction translation.
//!
//! Starting from a verified successful trajectory, an external
//! vision-language service is asked for an *unpaired* instruction: one that
//! is plausible in the same interface context but not what the segment
//! demonstrates, together with a justification and the step where the
//! mismatch first becomes evident. Replies land in a verification queue;
//! only human-approved entries become negative records, which share their
//! keyframes byte-for-byte with the positive source.
//!
//! The service is a pluggable request/response exchange with JSON bodies.
//! A deterministic mock ships for tests and offline runs; an HTTP transport
//! posts to a real endpoint.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::Interval;
use crate::trajectory::{JudgmentLabel, Keyframe, TrajectoryRecord};

/// Request sent to the translation service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationRequest {
    pub template: String,
    /// Keyframe references in step order.
    pub frames: Vec<String>,
    /// Opaque generation parameters; ordered map so serialization is
    /// deterministic.
    pub params: BTreeMap<String, serde_json::Value>,
}

/// Parsed service reply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationResponse {
    /// The unpaired instruction: plausible here, but not what happened.
    pub instruction: String,
    /// Why the segment violates that instruction.
    pub justification: String,
    /// Step index where the mismatch first becomes evident.
    pub reference_step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerificationStatus {
    Pending,
    Approved,
    Rejected,
}

/// Review state of one synthesized pair. Only approved responses may enter
/// the output dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationState {
    pub status: VerificationStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationState {
    pub fn pending() -> Self {
        Self {
            status: VerificationStatus::Pending,
            note: None,
        }
    }

    pub fn approved() -> Self {
        Self {
            status: VerificationStatus::Approved,
            note: None,
        }
    }
}

fn keyframe_ref(image: &Keyframe) -> String {
    match image {
        Keyframe::Path(p) => p.clone(),
        // Embedded images are referenced by content hash.
        Keyframe::Bytes { data } => format!("bytes:{:016x}", fnv1a64(data)),
    }
}

/// Builds the service request for a positive trajectory.
///
/// Negatives are outputs of this pipeline, not inputs: the source must carry
/// a success label. Keyframes are referenced in step order and any action
/// summaries ride along under `params["actions"]`. Deterministic given its
/// inputs.
pub fn build_request(record: &TrajectoryRecord, template_id: &str) -> Result<TranslationRequest> {
    match &record.label {
        Some(label) if label.success => {}
        Some(_) => {
            return Err(Error::invalid_input(
                "source trajectory is labeled as a failure; negatives are outputs, not inputs",
            ))
        }
        None => {
            return Err(Error::invalid_input(
                "source trajectory is unlabeled; only verified successes are translated",
            ))
        }
    }
    if record.steps.is_empty() {
        return Err(Error::invalid_input("source trajectory has no steps"));
    }
    let frames = record.steps.iter().map(|s| keyframe_ref(&s.image)).collect();
    let mut params = BTreeMap::new();
    if record.steps.iter().any(|s| s.action.is_some()) {
        let actions: Vec<serde_json::Value> = record
            .steps
            .iter()
            .map(|s| match &s.action {
                Some(a) => serde_json::Value::String(a.clone()),
                None => serde_json::Value::Null,
            })
            .collect();
        params.insert("actions".to_string(), serde_json::Value::Array(actions));
    }
    Ok(TranslationRequest {
        template: template_id.to_string(),
        frames,
        params,
    })
}

/// Strict-schema parse of a raw service reply.
///
/// All three fields must be present, the text fields nonempty, and the
/// reference step within the segment. Schema problems and range violations
/// are distinct error kinds and both carry the raw payload for audit.
pub fn parse_response(raw: &str, segment_steps: usize) -> Result<TranslationResponse> {
    let schema_err = |message: &str| Error::Schema {
        message: message.to_string(),
        raw: raw.to_string(),
    };
    let value: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| schema_err(&format!("reply is not JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| schema_err("reply is not a JSON object"))?;
    let text_field = |name: &str| -> Result<String> {
        let text = obj
            .get(name)
            .ok_or_else(|| schema_err(&format!("missing field `{name}`")))?
            .as_str()
            .ok_or_else(|| schema_err(&format!("field `{name}` is not a string")))?;
        if text.trim().is_empty() {
            return Err(schema_err(&format!("field `{name}` is empty")));
        }
        Ok(text.to_string())
    };
    let instruction = text_field("instruction")?;
    let justification = text_field("justification")?;
    let reference_step = obj
        .get("reference_step")
        .ok_or_else(|| schema_err("missing field `reference_step`"))?
        .as_u64()
        .ok_or_else(|| schema_err("field `reference_step` is not a nonnegative integer"))?
        as usize;
    if reference_step >= segment_steps {
        return Err(Error::Validation {
            message: format!(
                "reference_step {reference_step} out of range for a {segment_steps}-step segment"
            ),
            raw: raw.to_string(),
        });
    }
    Ok(TranslationResponse {
        instruction,
        justification,
        reference_step,
    })
}

/// Materializes an approved response as a negative trajectory.
///
/// The negative keeps the source's keyframes and platform, takes the
/// unpaired instruction, and is labeled a failure at the single instant of
/// the reference step (1 FPS seconds).
pub fn emit_negative(
    source: &TrajectoryRecord,
    response: &TranslationResponse,
    verification: &VerificationState,
) -> Result<TrajectoryRecord> {
    if verification.status != VerificationStatus::Approved {
        return Err(Error::State(format!(
            "only approved responses may be emitted, status is {:?}",
            verification.status
        )));
    }
    if response.instruction == source.instruction {
        return Err(Error::Validation {
            message: "unpaired instruction equals the source instruction".to_string(),
            raw: serde_json::to_string(response)?,
        });
    }
    let t = response.reference_step as f64;
    Ok(TrajectoryRecord {
        instruction: response.instruction.clone(),
        platform: source.platform,
        steps: source.steps.clone(),
        label: Some(JudgmentLabel {
            success: false,
            error_interval: Some(Interval::new(t, t)?),
            justification: Some(response.justification.clone()),
        }),
    })
}

/// Transport-agnostic exchange with the translation service. Returns the raw
/// reply body so schema validation stays in [`parse_response`].
pub trait TranslationService {
    fn translate(&self, request: &TranslationRequest) -> Result<String>;
}

/// Retry schedule for transport failures. Schema and validation errors are
/// never retried; they indicate prompt or template problems.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 3,
            base_delay: Duration::from_millis(200),
        }
    }
}

impl RetryPolicy {
    /// No waiting between attempts, for tests.
    pub fn immediate() -> Self {
        Self {
            max_retries: 3,
            base_delay: Duration::ZERO,
        }
    }
}

/// Calls the service, retrying transport failures with exponential backoff.
pub fn translate_with_retry<S: TranslationService + ?Sized>(
    service: &S,
    request: &TranslationRequest,
    policy: &RetryPolicy,
) -> Result<String> {
    let mut attempt = 0;
    loop {
        match service.translate(request) {
            Err(Error::Transport(msg)) if attempt < policy.max_retries => {
                let delay = policy.base_delay * 2u32.saturating_pow(attempt);
                if !delay.is_zero() {
                    std::thread::sleep(delay);
                }
                attempt += 1;
                let _ = msg;
            }
            other => return other,
        }
    }
}

const MOCK_VERBS: [&str; 5] = ["Open", "Rename", "Archive", "Export", "Pin"];
const MOCK_OBJECTS: [&str; 6] = [
    "the settings panel",
    "the most recent download",
    "the project dashboard",
    "the notification center",
    "the draft document",
    "the shared calendar",
];

/// Deterministic stand-in for the real vision-language service.
///
/// Replies are a pure function of the seed and the request, so the whole
/// synthesis pipeline is reproducible in tests and offline runs.
#[derive(Debug, Clone, Copy)]
pub struct MockService {
    pub seed: u64,
}

impl TranslationService for MockService {
    fn translate(&self, request: &TranslationRequest) -> Result<String> {
        if request.frames.is_empty() {
            return Err(Error::invalid_input("request has no keyframes"));
        }
        let canonical = serde_json::to_string(request)?;
        let mut key = self.seed.to_le_bytes().to_vec();
        key.extend_from_slice(canonical.as_bytes());
        let h = fnv1a64(&key);
        let verb = MOCK_VERBS[(h % MOCK_VERBS.len() as u64) as usize];
        let object = MOCK_OBJECTS[((h >> 8) % MOCK_OBJECTS.len() as u64) as usize];
        let reference_step = ((h >> 16) % request.frames.len() as u64) as usize;
        let reply = serde_json::json!({
            "instruction": format!("{verb} {object} and confirm the change"),
            "justification": format!(
                "The recorded steps never touch {object}; the mismatch first becomes evident at step {reference_step}."
            ),
            "reference_step": reference_step,
        });
        Ok(reply.to_string())
    }
}

/// HTTP transport: posts the request JSON to an endpoint and returns the
/// reply body. Credentials, when set, go out as a bearer token.
#[derive(Debug, Clone)]
pub struct HttpService {
    pub endpoint: String,
    pub bearer_token: Option<String>,
}

impl HttpService {
    pub fn new(endpoint: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            bearer_token: None,
        }
    }
}

impl TranslationService for HttpService {
    fn translate(&self, request: &TranslationRequest) -> Result<String> {
        let body = serde_json::to_string(request)?;
        let mut builder = ureq::post(&self.endpoint).header("content-type", "application/json");
        if let Some(token) = &self.bearer_token {
            builder = builder.header("authorization", &format!("Bearer {token}"));
        }
        let mut reply = builder
            .send(&body)
            .map_err(|e| Error::Transport(format!("{}: {e}", self.endpoint)))?;
        reply
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Transport(format!("{}: {e}", self.endpoint)))
    }
}

/// One synthesized pair awaiting (or past) review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueEntry {
    pub id: String,
    /// Index of the source record in the input set.
    pub source_index: usize,
    pub request: TranslationRequest,
    pub response: TranslationResponse,
    pub state: VerificationState,
}

/// Append-only JSON-lines verification queue.
///
/// Review decisions are recorded by appending a superseding line with the
/// same id; the effective state of an entry is its last line.
#[derive(Debug, Clone)]
pub struct VerificationQueue {
    path: PathBuf,
}

impl VerificationQueue {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, entry: &QueueEntry) -> Result<()> {
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        file.write_all(serde_json::to_string(entry)?.as_bytes())?;
        file.write_all(b"\n")?;
        Ok(())
    }

    /// Effective entries: last line per id, in order of first appearance.
    pub fn load(&self) -> Result<Vec<QueueEntry>> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        let text = std::fs::read_to_string(&self.path)?;
        let mut order: Vec<String> = Vec::new();
        let mut latest: BTreeMap<String, QueueEntry> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: QueueEntry = serde_json::from_str(line).map_err(|e| {
                Error::invalid_input(format!("queue line {}: {e}", idx + 1))
            })?;
            if !latest.contains_key(&entry.id) {
                order.push(entry.id.clone());
            }
            latest.insert(entry.id.clone(), entry);
        }
        Ok(order.into_iter().map(|id| latest.remove(&id).unwrap()).collect())
    }

    /// Appends a superseding line that moves `id` to the given status.
    pub fn set_status(
        &self,
        id: &str,
        status: VerificationStatus,
        note: Option<String>,
    ) -> Result<()> {
        let entries = self.load()?;
        let entry = entries
            .into_iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::State(format!("queue has no entry {id}")))?;
        self.append(&QueueEntry {
            state: VerificationState { status, note },
            ..entry
        })
    }
}

/// Runs translation for every positively labeled record and returns pending
/// queue entries. Unlabeled and negative records are skipped; they are not
/// valid translation sources.
pub fn synthesize_pending<S: TranslationService + ?Sized>(
    records: &[TrajectoryRecord],
    service: &S,
    template_id: &str,
    policy: &RetryPolicy,
) -> Result<Vec<QueueEntry>> {
    let mut entries = Vec::new();
    for (idx, record) in records.iter().enumerate() {
        if !record.label.as_ref().map(|l| l.success).unwrap_or(false) {
            continue;
        }
        let request = build_request(record, template_id)?;
        let raw = translate_with_retry(service, &request, policy)?;
        let response = parse_response(&raw, record.steps.len())?;
        entries.push(QueueEntry {
            id: format!("neg-{idx:04}"),
            source_index: idx,
            request,
            response,
            state: VerificationState::pending(),
        });
    }
    Ok(entries)
}

/// Emits a negative record for every approved queue entry.
pub fn emit_approved(
    records: &[TrajectoryRecord],
    entries: &[QueueEntry],
) -> Result<Vec<TrajectoryRecord>> {
    let mut negatives = Vec::new();
    for entry in entries {
        if entry.state.status != VerificationStatus::Approved {
            continue;
        }
        let source = records.get(entry.source_index).ok_or_else(|| {
            Error::State(format!(
                "queue entry {} points at record {} but only {} records were given",
                entry.id,
                entry.source_index,
                records.len()
            ))
        })?;
        negatives.push(emit_negative(source, &entry.response, &entry.state)?);
    }
    Ok(negatives)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{build_keyframe_video, Platform, RawStep};
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn positive(steps: usize) -> TrajectoryRecord {
        let raw = (0..steps)
            .map(|k| RawStep {
                screenshot: Some(Keyframe::Path(format!("frames/{k:03}.png"))),
                action: Some(format!("click {k}")),
            })
            .collect();
        let mut rec = build_keyframe_video("install the editor", Platform::UbuntuHuman, raw).unwrap();
        rec.label = Some(JudgmentLabel {
            success: true,
            error_interval: None,
            justification: None,
        });
        rec
    }

    #[test]
    fn build_request_references_frames_in_order() {
        let rec = positive(3);
        let req = build_request(&rec, "adversarial-v1").unwrap();
        assert_eq!(
            req.frames,
            vec!["frames/000.png", "frames/001.png", "frames/002.png"]
        );
        assert_eq!(req.template, "adversarial-v1");
        assert!(req.params.contains_key("actions"));
    }

    #[test]
    fn build_request_rejects_unlabeled_and_negative() {
        let mut rec = positive(2);
        rec.label = None;
        assert!(build_request(&rec, "t").is_err());
        let mut rec = positive(2);
        rec.label.as_mut().unwrap().success = false;
        assert!(build_request(&rec, "t").is_err());
    }

    #[test]
    fn build_request_is_deterministic() {
        let rec = positive(4);
        let a = serde_json::to_string(&build_request(&rec, "t").unwrap()).unwrap();
        let b = serde_json::to_string(&build_request(&rec, "t").unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_well_formed_reply() {
        let raw = r#"{"instruction":"Open the settings","justification":"never opened","reference_step":2}"#;
        let resp = parse_response(raw, 4).unwrap();
        assert_eq!(resp.reference_step, 2);
        assert_eq!(resp.instruction, "Open the settings");
    }

    #[test]
    fn parse_missing_field_is_schema_error_with_payload() {
        let raw = r#"{"instruction":"Open the settings","reference_step":2}"#;
        match parse_response(raw, 4) {
            Err(Error::Schema { message, raw: payload }) => {
                assert!(message.contains("justification"));
                assert_eq!(payload, raw);
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn parse_out_of_range_step_is_validation_error() {
        let raw = r#"{"instruction":"Open","justification":"j","reference_step":7}"#;
        match parse_response(raw, 4) {
            Err(Error::Validation { message, raw: payload }) => {
                assert!(message.contains('7'));
                assert_eq!(payload, raw);
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_empty_text_and_non_json() {
        let raw = r#"{"instruction":"  ","justification":"j","reference_step":0}"#;
        assert!(matches!(parse_response(raw, 2), Err(Error::Schema { .. })));
        assert!(matches!(parse_response("nope", 2), Err(Error::Schema { .. })));
    }

    #[test]
    fn emit_maps_reference_step_to_instant() {
        let rec = positive(4);
        let resp = TranslationResponse {
            instruction: "Pin the dashboard".into(),
            justification: "never pinned".into(),
            reference_step: 2,
        };
        let neg = emit_negative(&rec, &resp, &VerificationState::approved()).unwrap();
        assert!(!neg.label.as_ref().unwrap().success);
        let interval = neg.label.as_ref().unwrap().error_interval.unwrap();
        assert_eq!((interval.start(), interval.end()), (2.0, 2.0));
        assert_eq!(neg.steps, rec.steps);
        assert_eq!(neg.platform, rec.platform);
    }

    #[test]
    fn emit_requires_approval() {
        let rec = positive(2);
        let resp = TranslationResponse {
            instruction: "other".into(),
            justification: "j".into(),
            reference_step: 0,
        };
        assert!(matches!(
            emit_negative(&rec, &resp, &VerificationState::pending()),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn emit_rejects_identical_instruction() {
        let rec = positive(2);
        let resp = TranslationResponse {
            instruction: rec.instruction.clone(),
            justification: "j".into(),
            reference_step: 0,
        };
        assert!(matches!(
            emit_negative(&rec, &resp, &VerificationState::approved()),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn mock_is_deterministic_and_in_range() {
        let rec = positive(5);
        let req = build_request(&rec, "t").unwrap();
        let a = MockService { seed: 42 }.translate(&req).unwrap();
        let b = MockService { seed: 42 }.translate(&req).unwrap();
        assert_eq!(a, b);
        let resp = parse_response(&a, 5).unwrap();
        assert!(resp.reference_step < 5);

        let c = MockService { seed: 43 }.translate(&req).unwrap();
        assert_ne!(a, c);
    }

    struct FlakyService {
        failures: AtomicUsize,
        calls: AtomicUsize,
    }

    impl TranslationService for FlakyService {
        fn translate(&self, request: &TranslationRequest) -> Result<String> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            if self.failures.load(Ordering::SeqCst) > 0 {
                self.failures.fetch_sub(1, Ordering::SeqCst);
                return Err(Error::Transport("connection reset".into()));
            }
            MockService { seed: 1 }.translate(request)
        }
    }

    #[test]
    fn transport_failures_retried_then_succeed() {
        let svc = FlakyService {
            failures: AtomicUsize::new(2),
            calls: AtomicUsize::new(0),
        };
        let req = build_request(&positive(3), "t").unwrap();
        let raw = translate_with_retry(&svc, &req, &RetryPolicy::immediate()).unwrap();
        assert!(parse_response(&raw, 3).is_ok());
        assert_eq!(svc.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn transport_failures_exhaust_retries() {
        let svc = FlakyService {
            failures: AtomicUsize::new(10),
            calls: AtomicUsize::new(0),
        };
        let req = build_request(&positive(3), "t").unwrap();
        assert!(matches!(
            translate_with_retry(&svc, &req, &RetryPolicy::immediate()),
            Err(Error::Transport(_))
        ));
        // One initial attempt plus three retries.
        assert_eq!(svc.calls.load(Ordering::SeqCst), 4);
    }

    struct BrokenSchemaService;

    impl TranslationService for BrokenSchemaService {
        fn translate(&self, _request: &TranslationRequest) -> Result<String> {
            Ok("{\"instruction\":\"x\"}".to_string())
        }
    }

    #[test]
    fn schema_errors_surface_without_retry() {
        let rec = positive(2);
        let err = synthesize_pending(
            &[rec],
            &BrokenSchemaService,
            "t",
            &RetryPolicy::immediate(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
    }

    #[test]
    fn queue_last_line_wins() {
        let dir = tempfile::tempdir().unwrap();
        let queue = VerificationQueue::new(dir.path().join("queue.jsonl"));
        let rec = positive(3);
        let entries = synthesize_pending(
            &[rec],
            &MockService { seed: 9 },
            "t",
            &RetryPolicy::immediate(),
        )
        .unwrap();
        for entry in &entries {
            queue.append(entry).unwrap();
        }
        queue
            .set_status("neg-0000", VerificationStatus::Approved, Some("looks right".into()))
            .unwrap();
        let loaded = queue.load().unwrap();
        assert_eq!(loaded.len(), 1);
        assert_eq!(loaded[0].state.status, VerificationStatus::Approved);
        assert_eq!(loaded[0].state.note.as_deref(), Some("looks right"));
        // The log itself keeps both lines.
        let lines = std::fs::read_to_string(queue.path()).unwrap();
        assert_eq!(lines.lines().count(), 2);
    }

    #[test]
    fn pipeline_emits_only_approved() {
        let records = vec![positive(3), positive(4), positive(5)];
        let svc = MockService { seed: 77 };
        let mut entries =
            synthesize_pending(&records, &svc, "t", &RetryPolicy::immediate()).unwrap();
        assert_eq!(entries.len(), 3);
        entries[0].state = VerificationState::approved();
        entries[2].state = VerificationState {
            status: VerificationStatus::Rejected,
            note: Some("implausible".into()),
        };
        let negatives = emit_approved(&records, &entries).unwrap();
        assert_eq!(negatives.len(), 1);
        assert_eq!(negatives[0].steps, records[0].steps);
        assert_ne!(negatives[0].instruction, records[0].instruction);
    }

    #[test]
    fn http_service_round_trip() {
        use std::io::{Read, Write};
        use std::net::TcpListener;

        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let body = MockService { seed: 5 }
            .translate(&build_request(&positive(2), "t").unwrap())
            .unwrap();
        let served = body.clone();
        let handle = std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = [0u8; 4096];
            let _ = stream.read(&mut buf).unwrap();
            let reply = format!(
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\n\r\n{}",
                served.len(),
                served
            );
            stream.write_all(reply.as_bytes()).unwrap();
        });

        let svc = HttpService::new(format!("http://{addr}/translate"));
        let req = build_request(&positive(2), "t").unwrap();
        let raw = svc.translate(&req).unwrap();
        handle.join().unwrap();
        assert_eq!(raw, body);
        assert!(parse_response(&raw, 2).is_ok());
    }

    #[test]
    fn http_service_unreachable_is_transport_error() {
        // Grab a free port, then close it so the connection is refused.
        let port = {
            let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
            listener.local_addr().unwrap().port()
        };
        let svc = HttpService {
            endpoint: format!("http://127.0.0.1:{port}/translate"),
            bearer_token: None,
        };
        let req = build_request(&positive(1), "t").unwrap();
        assert!(matches!(svc.translate(&req), Err(Error::Transport(_))));
    }
}
