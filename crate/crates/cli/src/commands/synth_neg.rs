//! `vidtok synth-neg`: translate positive trajectories into hard negatives
//! through the verification queue.
//!
//! Each run queues one pending entry per positive record (skipping records
//! already queued), then emits negatives for every approved entry in the
//! queue. Requests go out concurrently up to the worker cap; queue writes
//! are serialized and ordered by record index. Transport failures do not
//! abort the batch; they are reported per record and the command exits with
//! the external-service code.

use std::path::Path;

use rayon::prelude::*;
use vidtok_core::negsynth::{
    build_request, emit_approved, parse_response, translate_with_retry, HttpService, MockService,
    QueueEntry, RetryPolicy, TranslationRequest, TranslationResponse, TranslationService,
    VerificationQueue, VerificationState, VerificationStatus,
};
use vidtok_core::trajectory::{load_manifest, save_manifest, TrajectoryRecord};

use crate::config::RunConfig;
use crate::CliError;

type Service = Box<dyn TranslationService + Send + Sync>;

fn build_service(spec: Option<&str>, cfg: &RunConfig) -> Result<Service, CliError> {
    let spec = match spec {
        Some(s) => s.to_string(),
        None => match &cfg.service_endpoint {
            Some(endpoint) => endpoint.clone(),
            None => format!("mock:{}", cfg.seed),
        },
    };
    if spec == "mock" {
        return Ok(Box::new(MockService { seed: cfg.seed }));
    }
    if let Some(seed) = spec.strip_prefix("mock:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| CliError::input(format!("bad mock seed `{seed}`")))?;
        return Ok(Box::new(MockService { seed }));
    }
    if spec.starts_with("http://") || spec.starts_with("https://") {
        let mut svc = HttpService::new(spec);
        svc.bearer_token = cfg.service_token.clone();
        return Ok(Box::new(svc));
    }
    Err(CliError::input(format!(
        "service must be `mock`, `mock:<seed>`, or an http(s) endpoint, got `{spec}`"
    )))
}

enum Translation {
    Done(TranslationRequest, TranslationResponse),
    TransportFailed(String),
}

fn translate_record(
    record: &TrajectoryRecord,
    service: &(dyn TranslationService + Send + Sync),
    template: &str,
    policy: &RetryPolicy,
) -> Result<Translation, CliError> {
    let request = build_request(record, template).map_err(CliError::from_input)?;
    let raw = match translate_with_retry(service, &request, policy) {
        Ok(raw) => raw,
        Err(err) => return Ok(Translation::TransportFailed(err.to_string())),
    };
    let response = parse_response(&raw, record.steps.len()).map_err(CliError::from_processing)?;
    Ok(Translation::Done(request, response))
}

pub fn run(
    records_path: &Path,
    service_spec: Option<&str>,
    out: &Path,
    queue_path: Option<&Path>,
    approve_all: bool,
    cfg: &RunConfig,
) -> Result<(), CliError> {
    let records = load_manifest(records_path).map_err(CliError::from_input)?;
    let positives: Vec<usize> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.label.as_ref().map(|l| l.success).unwrap_or(false))
        .map(|(idx, _)| idx)
        .collect();
    if positives.is_empty() {
        return Err(CliError::input(
            "no positively labeled records; negatives are translated from verified successes",
        ));
    }

    let service = build_service(service_spec, cfg)?;
    let default_queue = out.with_extension("queue.jsonl");
    let queue = VerificationQueue::new(queue_path.unwrap_or(&default_queue));
    let existing = queue.load().map_err(CliError::from_input)?;

    let fresh: Vec<usize> = positives
        .iter()
        .copied()
        .filter(|idx| {
            let id = format!("neg-{idx:04}");
            let queued = existing.iter().any(|e| e.id == id);
            if queued {
                println!("{id}: already queued, skipping");
            }
            !queued
        })
        .collect();

    let policy = RetryPolicy::default();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::processing(e.to_string()))?;
    let translations: Vec<(usize, Result<Translation, CliError>)> = pool.install(|| {
        fresh
            .par_iter()
            .map(|&idx| {
                (
                    idx,
                    translate_record(&records[idx], service.as_ref(), &cfg.template, &policy),
                )
            })
            .collect()
    });

    let mut transport_failures = Vec::new();
    let mut queued = 0usize;
    for (idx, outcome) in translations {
        let id = format!("neg-{idx:04}");
        match outcome? {
            Translation::TransportFailed(err) => {
                println!("{id}: transport failed after retries ({err})");
                transport_failures.push(id);
            }
            Translation::Done(request, response) => {
                let entry = QueueEntry {
                    id: id.clone(),
                    source_index: idx,
                    request,
                    response,
                    state: VerificationState::pending(),
                };
                queue.append(&entry).map_err(CliError::from_processing)?;
                println!("{id}: queued");
                queued += 1;
            }
        }
    }

    // --approve-all stands in for review: every pending entry is approved,
    // whether queued by this run or an earlier one.
    if approve_all {
        for entry in queue.load().map_err(CliError::from_processing)? {
            if entry.state.status == VerificationStatus::Pending {
                queue
                    .set_status(&entry.id, VerificationStatus::Approved, Some("auto-approved".into()))
                    .map_err(CliError::from_processing)?;
                println!("{}: approved", entry.id);
            }
        }
    }

    let entries = queue.load().map_err(CliError::from_processing)?;
    let negatives = emit_approved(&records, &entries).map_err(CliError::from_processing)?;
    save_manifest(out, &negatives).map_err(CliError::from_processing)?;

    let approved = entries
        .iter()
        .filter(|e| e.state.status == VerificationStatus::Approved)
        .count();
    println!(
        "queued {queued} new entries; {} in queue ({approved} approved); emitted {} negatives to {}",
        entries.len(),
        negatives.len(),
        out.display()
    );

    if !transport_failures.is_empty() {
        return Err(CliError::service(format!(
            "translation failed for {} record(s): {}",
            transport_failures.len(),
            transport_failures.join(", ")
        )));
    }
    Ok(())
}
