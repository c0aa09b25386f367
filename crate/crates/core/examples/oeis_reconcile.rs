//! Compares the A1 stream with a cached A137613 b-file.
//!
//! Reads from `$ROWLAND_OEIS_CACHE` (defaulting to the bundled fixtures) and
//! only goes online when `--online` is passed and the file is missing.

use rowland::accel::{accel_iterate, Algorithm};
use rowland::oeis::{compare_sequences, Fetcher, OeisId, UreqTransport, CACHE_ENV};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let online = std::env::args().any(|a| a == "--online");
    let cache = std::env::var_os(CACHE_ENV)
        .map(Into::into)
        .unwrap_or_else(|| std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/oeis"));
    let fetcher = Fetcher::new(cache, UreqTransport::default()).offline(!online);

    let id: OeisId = "A137613".parse()?;
    let reference = fetcher.fetch_parsed(id)?;
    let generated = accel_iterate(Algorithm::A1, reference.len())?.primes;
    let cmp = compare_sequences(&generated, &reference);
    println!("{id}: {} reference terms, {} generated", reference.len(), generated.len());
    println!("{}", serde_json::to_string_pretty(&cmp)?);
    Ok(())
}
