//! OEIS b-files: parse, render, fetch through a cache, and compare.
//!
//! Values are kept as canonical decimal strings so arbitrarily large
//! reference terms survive parsing; generated values are compared through
//! their decimal rendering.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

/// Cache directory override.
pub const CACHE_ENV: &str = "ROWLAND_OEIS_CACHE";
/// Base URL override, e.g. for a local mirror.
pub const BASE_URL_ENV: &str = "ROWLAND_OEIS_BASE_URL";
pub const DEFAULT_BASE_URL: &str = "https://oeis.org";
pub const MIN_REQUEST_INTERVAL: Duration = Duration::from_secs(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OeisError {
    #[error("malformed OEIS identifier `{0}` (expected A followed by 6 digits)")]
    InvalidId(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: index {found} does not follow {previous}")]
    Structure { line: usize, previous: i64, found: i64 },
    #[error("network error fetching {url}: {message}")]
    Network { url: String, message: String },
    #[error("HTTP status {status} fetching {url}")]
    HttpStatus { url: String, status: u16 },
    #[error("offline and {id} is not cached at {}", path.display())]
    CacheMiss { id: OeisId, path: PathBuf },
    #[error("cache I/O on {}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OeisId(u32);

impl OeisId {
    pub fn number(self) -> u32 {
        self.0
    }

    /// `b137613.txt`
    pub fn bfile_name(self) -> String {
        format!("b{:06}.txt", self.0)
    }
}

impl FromStr for OeisId {
    type Err = OeisError;

    fn from_str(s: &str) -> Result<Self, OeisError> {
        let digits = s.strip_prefix('A').filter(|d| d.len() == 6 && d.bytes().all(|b| b.is_ascii_digit()));
        match digits {
            Some(d) => Ok(OeisId(d.parse().expect("six digits"))),
            None => Err(OeisError::InvalidId(s.to_string())),
        }
    }
}

impl fmt::Display for OeisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{:06}", self.0)
    }
}

impl Serialize for OeisId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFileEntry {
    pub index: i64,
    /// Canonical decimal: optional `-`, no leading zeros.
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFile {
    pub id: Option<OeisId>,
    pub entries: Vec<BFileEntry>,
}

impl BFile {
    pub fn values(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.value.as_str())
    }

    pub fn first_index(&self) -> Option<i64> {
        self.entries.first().map(|e| e.index)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One `index value` line per entry, LF-terminated. Comments are not kept.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&e.index.to_string());
            out.push(' ');
            out.push_str(&e.value);
            out.push('\n');
        }
        out
    }
}

fn canonical_integer(field: &str) -> Option<String> {
    let (sign, digits) = match field.strip_prefix('-') {
        Some(d) => ("-", d),
        None => ("", field),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let trimmed = digits.trim_start_matches('0');
    Some(match trimmed {
        "" => "0".to_string(),
        t => format!("{sign}{t}"),
    })
}

/// Parses b-file text. Lines are `index value`; `#` lines and blank lines
/// are skipped; LF and CRLF endings are both accepted.
pub fn parse_bfile(bytes: &[u8]) -> Result<BFile, OeisError> {
    let text = std::str::from_utf8(bytes).map_err(|e| OeisError::Parse {
        line: 1 + bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count(),
        message: "invalid UTF-8".into(),
    })?;
    let mut entries: Vec<BFileEntry> = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = i + 1;
        let content = raw.strip_suffix('\r').unwrap_or(raw);
        if content.trim().is_empty() || content.starts_with('#') {
            continue;
        }
        let mut fields = content.split(' ').filter(|f| !f.is_empty());
        let (Some(index), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(OeisError::Parse {
                line,
                message: format!("expected `index value`, found `{content}`"),
            });
        };
        let index: i64 = index.parse().map_err(|_| OeisError::Parse {
            line,
            message: format!("bad index `{index}`"),
        })?;
        let value = canonical_integer(value).ok_or_else(|| OeisError::Parse {
            line,
            message: format!("bad value `{value}`"),
        })?;
        if let Some(prev) = entries.last() {
            if prev.index.checked_add(1) != Some(index) {
                return Err(OeisError::Structure {
                    line,
                    previous: prev.index,
                    found: index,
                });
            }
        }
        entries.push(BFileEntry { index, value });
    }
    Ok(BFile { id: None, entries })
}

/// Parses and tags with `id`.
pub fn parse_bfile_for(id: OeisId, bytes: &[u8]) -> Result<BFile, OeisError> {
    parse_bfile(bytes).map(|b| BFile { id: Some(id), ..b })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

/// Performs one GET. Non-2xx statuses are returned, not raised.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<HttpResponse, OeisError>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl Default for UreqTransport {
    fn default() -> Self {
        UreqTransport {
            agent: ureq::AgentBuilder::new()
                .timeout(Duration::from_secs(30))
                .user_agent(concat!("rowland/", env!("CARGO_PKG_VERSION")))
                .build(),
        }
    }
}

impl Transport for UreqTransport {
    fn get(&self, url: &str) -> Result<HttpResponse, OeisError> {
        let network = |message: String| OeisError::Network {
            url: url.to_string(),
            message,
        };
        let response = match self.agent.get(url).call() {
            Ok(r) => r,
            Err(ureq::Error::Status(status, r)) => {
                let _ = r.into_string();
                return Ok(HttpResponse { status, body: Vec::new() });
            }
            Err(ureq::Error::Transport(t)) => return Err(network(t.to_string())),
        };
        let status = response.status();
        let mut body = Vec::new();
        std::io::Read::read_to_end(&mut response.into_reader(), &mut body).map_err(|e| network(e.to_string()))?;
        Ok(HttpResponse { status, body })
    }
}

/// `$ROWLAND_OEIS_CACHE`, else `$XDG_CACHE_HOME/rowland/oeis`, else
/// `$HOME/.cache/rowland/oeis`, else `./oeis-cache`.
pub fn default_cache_dir() -> PathBuf {
    let env = |k| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    if let Some(dir) = env(CACHE_ENV) {
        return dir;
    }
    if let Some(dir) = env("XDG_CACHE_HOME") {
        return dir.join("rowland").join("oeis");
    }
    match env("HOME") {
        Some(home) => home.join(".cache").join("rowland").join("oeis"),
        None => PathBuf::from("oeis-cache"),
    }
}

/// Cache-first b-file fetcher with a per-fetcher rate limit.
pub struct Fetcher<T = UreqTransport> {
    cache_dir: PathBuf,
    base_url: String,
    offline: bool,
    min_interval: Duration,
    transport: T,
    last_request: Mutex<Option<Instant>>,
}

impl Fetcher<UreqTransport> {
    /// Live fetcher configured from the environment.
    pub fn from_env(offline: bool) -> Self {
        let base = std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        Fetcher::new(default_cache_dir(), UreqTransport::default())
            .base_url(base)
            .offline(offline)
    }
}

impl<T: Transport> Fetcher<T> {
    pub fn new(cache_dir: impl Into<PathBuf>, transport: T) -> Self {
        Fetcher {
            cache_dir: cache_dir.into(),
            base_url: DEFAULT_BASE_URL.to_string(),
            offline: false,
            min_interval: MIN_REQUEST_INTERVAL,
            transport,
            last_request: Mutex::new(None),
        }
    }

    pub fn base_url(mut self, url: impl Into<String>) -> Self {
        self.base_url = url.into().trim_end_matches('/').to_string();
        self
    }

    pub fn offline(mut self, offline: bool) -> Self {
        self.offline = offline;
        self
    }

    pub fn min_interval(mut self, interval: Duration) -> Self {
        self.min_interval = interval;
        self
    }

    pub fn cache_dir(&self) -> &Path {
        &self.cache_dir
    }

    pub fn cache_path(&self, id: OeisId) -> PathBuf {
        self.cache_dir.join(id.bfile_name())
    }

    pub fn url(&self, id: OeisId) -> String {
        format!("{}/{id}/{}", self.base_url, id.bfile_name())
    }

    /// Raw b-file bytes, from the cache when present.
    pub fn fetch(&self, id: OeisId) -> Result<Vec<u8>, OeisError> {
        let path = self.cache_path(id);
        match fs::read(&path) {
            Ok(bytes) => return Ok(bytes),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => {
                return Err(OeisError::Io {
                    path,
                    message: e.to_string(),
                })
            }
        }
        if self.offline {
            return Err(OeisError::CacheMiss { id, path });
        }
        let url = self.url(id);
        let response = {
            let mut last = self.last_request.lock().unwrap_or_else(|e| e.into_inner());
            if let Some(t) = *last {
                let wait = self.min_interval.saturating_sub(t.elapsed());
                if !wait.is_zero() {
                    std::thread::sleep(wait);
                }
            }
            *last = Some(Instant::now());
            self.transport.get(&url)?
        };
        if response.status != 200 {
            return Err(OeisError::HttpStatus {
                url,
                status: response.status,
            });
        }
        write_atomic(&path, &response.body)?;
        Ok(response.body)
    }

    pub fn fetch_parsed(&self, id: OeisId) -> Result<BFile, OeisError> {
        parse_bfile_for(id, &self.fetch(id)?)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), OeisError> {
    let io = |e: std::io::Error| OeisError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("bfile"),
        std::process::id()
    ));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Divergence {
    /// 0-based position in both sequences.
    pub position: usize,
    /// Reference index at that position, when a b-file is involved.
    pub index: Option<i64>,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub common_prefix: usize,
    pub left_len: usize,
    pub right_len: usize,
    pub divergence: Option<Divergence>,
}

impl Comparison {
    /// No differing position (lengths may still differ).
    pub fn matches(&self) -> bool {
        self.divergence.is_none()
    }
}

/// Positional comparison of two value lists.
pub fn compare_values<A, B>(left: &[A], right: &[B]) -> Comparison
where
    A: AsRef<str>,
    B: AsRef<str>,
{
    let common_prefix = left
        .iter()
        .zip(right)
        .take_while(|(a, b)| a.as_ref() == b.as_ref())
        .count();
    let divergence = match (left.get(common_prefix), right.get(common_prefix)) {
        (Some(a), Some(b)) => Some(Divergence {
            position: common_prefix,
            index: None,
            left: a.as_ref().to_string(),
            right: b.as_ref().to_string(),
        }),
        _ => None,
    };
    Comparison {
        common_prefix,
        left_len: left.len(),
        right_len: right.len(),
        divergence,
    }
}

/// Compares generated values (left) against a b-file (right), aligned at the
/// b-file's first entry.
pub fn compare_sequences<V: fmt::Display>(generated: &[V], reference: &BFile) -> Comparison {
    let left: Vec<String> = generated.iter().map(|v| v.to_string()).collect();
    let right: Vec<&str> = reference.values().collect();
    let mut cmp = compare_values(&left, &right);
    if let (Some(d), Some(first)) = (cmp.divergence.as_mut(), reference.first_index()) {
        d.index = Some(first + d.position as i64);
    }
    cmp
}
