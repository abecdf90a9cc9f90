//! Remote elaboration against a counting stub endpoint: cache hits must
//! skip the network, marker-free prose must be rejected, and a dead
//! endpoint must surface as unavailable after retries.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use cotforge::remote::{RemoteElaborator, RetryPolicy};
use cotforge_core::elaborate::{Elaborate, ElaborateError, StepFact, TraceSkeleton};
use cotforge_core::cot::CoTFormat;
use cotforge_core::maze::{Cell, Direction};

/// Minimal HTTP/1.1 stub: answers every POST with a canned chat-completion
/// body and counts requests.
fn spawn_stub(content: String) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub");
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let recorded = hits.clone();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            recorded.fetch_add(1, Ordering::SeqCst);
            // Read headers, then the declared body length.
            let mut buf = Vec::new();
            let mut byte = [0u8; 1];
            while !buf.ends_with(b"\r\n\r\n") {
                if stream.read_exact(&mut byte).is_err() {
                    break;
                }
                buf.push(byte[0]);
            }
            let headers = String::from_utf8_lossy(&buf).to_string();
            let content_length: usize = headers
                .lines()
                .find_map(|l| {
                    let (name, value) = l.split_once(':')?;
                    name.eq_ignore_ascii_case("content-length")
                        .then(|| value.trim().parse().ok())?
                })
                .unwrap_or(0);
            let mut body = vec![0u8; content_length];
            let _ = stream.read_exact(&mut body);

            let payload = serde_json::json!({
                "choices": [{"message": {"role": "assistant", "content": content}}]
            })
            .to_string();
            let response = format!(
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
                payload.len()
            );
            let _ = stream.write_all(response.as_bytes());
        }
    });
    (format!("http://{addr}/v1/chat/completions"), hits)
}

fn two_step_skeleton() -> TraceSkeleton {
    TraceSkeleton {
        format: CoTFormat::LCot,
        steps: vec![
            StepFact::Head {
                from: Cell::new(1, 1),
                to: Cell::new(1, 2),
                dir: Direction::East,
            },
            StepFact::Head {
                from: Cell::new(1, 2),
                to: Cell::new(2, 2),
                dir: Direction::South,
            },
        ],
    }
}

#[test]
fn cache_hit_makes_zero_network_calls() {
    let (endpoint, hits) = spawn_stub(
        "I stroll <<east>> to the next cell.\nThen I turn <<south>> and continue.".into(),
    );
    let cache = tempfile::tempdir().unwrap();
    let client = RemoteElaborator::new(
        endpoint,
        "stub-model",
        "v1",
        Some(cache.path().to_path_buf()),
        RetryPolicy {
            max_attempts: 2,
            backoff_ms: 1,
        },
        2,
    );
    let skeleton = two_step_skeleton();
    let first = client.elaborate(&skeleton).unwrap();
    assert_eq!(first.len(), 2);
    assert_eq!(hits.load(Ordering::SeqCst), 1);

    let second = client.elaborate(&skeleton).unwrap();
    assert_eq!(second, first);
    assert_eq!(hits.load(Ordering::SeqCst), 1, "cache hit must not POST");

    // A different skeleton is a different key.
    let mut other = two_step_skeleton();
    other.steps.pop();
    // One line of response vs one step: the stub's two-line body now fails
    // the line-count check, proving the request really went out.
    let outcome = client.elaborate(&other);
    assert!(matches!(outcome, Err(ElaborateError::Rejected(_))));
    assert_eq!(hits.load(Ordering::SeqCst), 2);
}

#[test]
fn marker_free_prose_is_rejected() {
    let (endpoint, hits) = spawn_stub(
        "The journey begins pleasantly.\nIt ends without incident.".into(),
    );
    let client = RemoteElaborator::new(
        endpoint,
        "stub-model",
        "v1",
        None,
        RetryPolicy {
            max_attempts: 3,
            backoff_ms: 1,
        },
        1,
    );
    let outcome = client.elaborate(&two_step_skeleton());
    assert!(matches!(outcome, Err(ElaborateError::Rejected(_))));
    // Rejection is not retried: the response was well-formed HTTP.
    assert_eq!(hits.load(Ordering::SeqCst), 1);
}

#[test]
fn dead_endpoint_is_unavailable_after_retries() {
    // Bind then drop, so the port is very likely refused.
    let port = {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        listener.local_addr().unwrap().port()
    };
    let client = RemoteElaborator::new(
        format!("http://127.0.0.1:{port}/v1/chat/completions"),
        "stub-model",
        "v1",
        None,
        RetryPolicy {
            max_attempts: 2,
            backoff_ms: 1,
        },
        1,
    );
    let outcome = client.elaborate(&two_step_skeleton());
    assert!(matches!(outcome, Err(ElaborateError::Unavailable(_))));
}
