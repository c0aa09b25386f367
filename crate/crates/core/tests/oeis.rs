use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rowland::accel::{accel_iterate, Algorithm};
use rowland::oeis::{compare_sequences, parse_bfile, Fetcher, HttpResponse, OeisError, OeisId, Transport, UreqTransport};

const FIXTURE: &[u8] = include_bytes!("fixtures/oeis/b137613.txt");

fn a137613() -> OeisId {
    "A137613".parse().unwrap()
}

#[derive(Clone)]
struct Fake {
    calls: Arc<AtomicUsize>,
    response: Result<HttpResponse, OeisError>,
}

impl Fake {
    fn ok(body: &[u8]) -> Self {
        Fake {
            calls: Arc::default(),
            response: Ok(HttpResponse {
                status: 200,
                body: body.to_vec(),
            }),
        }
    }

    fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Transport for Fake {
    fn get(&self, _url: &str) -> Result<HttpResponse, OeisError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.response.clone()
    }
}

#[test]
fn cold_then_warm_cache() {
    let dir = tempfile::tempdir().unwrap();
    let fake = Fake::ok(FIXTURE);
    let fetcher = Fetcher::new(dir.path(), fake.clone());
    let cold = fetcher.fetch(a137613()).unwrap();
    assert_eq!(cold, FIXTURE);
    assert_eq!(fake.calls(), 1);
    assert_eq!(std::fs::read(dir.path().join("b137613.txt")).unwrap(), FIXTURE);

    let warm = fetcher.fetch(a137613()).unwrap();
    assert_eq!(warm, cold);
    assert_eq!(fake.calls(), 1);

    let offline = Fetcher::new(dir.path(), Fake::ok(b"")).offline(true);
    assert_eq!(offline.fetch(a137613()).unwrap(), FIXTURE);

    let parsed = fetcher.fetch_parsed(a137613()).unwrap();
    assert_eq!(parsed.id, Some(a137613()));
    assert_eq!(parsed.values().take(5).collect::<Vec<_>>(), ["5", "3", "11", "3", "23"]);
}

#[test]
fn distinct_errors() {
    let dir = tempfile::tempdir().unwrap();
    let miss = Fetcher::new(dir.path(), Fake::ok(FIXTURE)).offline(true).fetch(a137613());
    assert!(matches!(miss, Err(OeisError::CacheMiss { .. })));

    let status = Fake {
        calls: Arc::default(),
        response: Ok(HttpResponse {
            status: 404,
            body: b"not found".to_vec(),
        }),
    };
    let err = Fetcher::new(dir.path(), status).fetch(a137613());
    assert!(matches!(err, Err(OeisError::HttpStatus { status: 404, .. })));
    assert!(!dir.path().join("b137613.txt").exists(), "non-200 responses are not cached");

    let down = Fake {
        calls: Arc::default(),
        response: Err(OeisError::Network {
            url: "x".into(),
            message: "refused".into(),
        }),
    };
    assert!(matches!(Fetcher::new(dir.path(), down).fetch(a137613()), Err(OeisError::Network { .. })));
    assert_eq!("A16814".parse::<OeisId>(), Err(OeisError::InvalidId("A16814".into())));
}

#[test]
fn requests_are_rate_limited() {
    let dir = tempfile::tempdir().unwrap();
    let fetcher = Fetcher::new(dir.path(), Fake::ok(b"1 1\n")).min_interval(Duration::from_millis(300));
    let start = Instant::now();
    fetcher.fetch("A000001".parse().unwrap()).unwrap();
    fetcher.fetch("A000002".parse().unwrap()).unwrap();
    assert!(start.elapsed() >= Duration::from_millis(300));
}

/// Serves `routes` over HTTP/1.1 on a loopback port, one connection at a time.
fn serve(routes: Vec<(&'static str, u16, &'static [u8])>, connections: usize) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for stream in listener.incoming().take(connections) {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut line = String::new();
            while reader.read_line(&mut line).unwrap() > 2 {
                line.clear();
            }
            let path = request_line.split(' ').nth(1).unwrap_or("");
            let (status, body) = routes
                .iter()
                .find(|r| r.0 == path)
                .map_or((404, &b"missing"[..]), |r| (r.1, r.2));
            write!(
                stream,
                "HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                body.len()
            )
            .unwrap();
            stream.write_all(body).unwrap();
            let _ = stream.read(&mut [0; 1]);
        }
    });
    format!("http://{addr}")
}

#[test]
fn live_transport_against_local_server() {
    let base = serve(vec![("/A137613/b137613.txt", 200, FIXTURE)], 2);
    let dir = tempfile::tempdir().unwrap();
    let fetcher = Fetcher::new(dir.path(), UreqTransport::default())
        .base_url(&base)
        .min_interval(Duration::ZERO);
    assert_eq!(fetcher.url(a137613()), format!("{base}/A137613/b137613.txt"));
    let b = fetcher.fetch_parsed(a137613()).unwrap();
    assert_eq!(b.len(), 172);
    assert_eq!(std::fs::read(fetcher.cache_path(a137613())).unwrap(), FIXTURE);

    let missing = fetcher.fetch("A168143".parse().unwrap());
    assert!(matches!(missing, Err(OeisError::HttpStatus { status: 404, .. })), "{missing:?}");
}

#[test]
fn unreachable_host_is_a_network_error() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let dir = tempfile::tempdir().unwrap();
    let err = Fetcher::new(dir.path(), UreqTransport::default())
        .base_url(format!("http://127.0.0.1:{port}"))
        .fetch(a137613());
    assert!(matches!(err, Err(OeisError::Network { .. })), "{err:?}");
}

#[test]
fn fixture_matches_accelerated_stream() {
    let b = parse_bfile(FIXTURE).unwrap();
    assert_eq!(b.first_index(), Some(1));
    let run = accel_iterate(Algorithm::A1, b.len()).unwrap();
    let cmp = compare_sequences(&run.primes, &b);
    assert!(cmp.matches());
    assert_eq!(cmp.common_prefix, 172);
}
