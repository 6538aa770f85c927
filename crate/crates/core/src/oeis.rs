//! OEIS b-file ingestion, bundled fixtures, comparison with local oracles and
//! an opt-in cached fetcher.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::Registry;

/// Shift window searched when aligning a local sequence with a b-file.
pub const SHIFT_WINDOW: i64 = 3;
/// Consecutive agreements required before a match is declared.
pub const MIN_AGREEMENT: usize = 20;

pub const CACHE_ENV: &str = "OEIS_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = "./.oeis-cache";
pub const DEFAULT_BASE_URL: &str = "https://oeis.org";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BFileTable {
    pub id: String,
    pub entries: BTreeMap<i64, BigInt>,
    pub source: String,
}

impl BFileTable {
    pub fn first_index(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn get(&self, index: i64) -> Option<&BigInt> {
        self.entries.get(&index)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parses b-file text: `index value` per line, `#` comments, blank lines,
/// LF or CRLF endings.
pub fn parse_bfile(id: &str, text: &str, source: &str) -> Result<BFileTable> {
    let mut entries = BTreeMap::new();
    let mut last: Option<i64> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| Error::BFileParse {
            line: line_no,
            reason,
        };
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `index value`, got `{line}`")));
        };
        let idx: i64 = idx
            .parse()
            .map_err(|_| err(format!("bad index `{idx}`")))?;
        let val: BigInt = val
            .parse()
            .map_err(|_| err(format!("bad value `{val}`")))?;
        if last.is_some_and(|prev| idx <= prev) {
            return Err(err(format!("index {idx} does not increase")));
        }
        last = Some(idx);
        entries.insert(idx, val);
    }
    Ok(BFileTable {
        id: id.to_string(),
        entries,
        source: source.to_string(),
    })
}

/// Inverse of [`parse_bfile`] on the entries.
pub fn serialize_bfile(table: &BFileTable) -> String {
    let mut out = String::new();
    for (i, v) in &table.entries {
        writeln!(out, "{i} {v}").expect("writing to a String");
    }
    out
}

macro_rules! fixtures {
    ($($id:literal => $file:literal),* $(,)?) => {
        const BUNDLED: &[(&str, &str)] = &[
            $(($id, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/bfiles/", $file)))),*
        ];
    };
}

fixtures! {
    "A000129" => "b000129.txt",
    "A001075" => "b001075.txt",
    "A001353" => "b001353.txt",
    "A007052" => "b007052.txt",
    "A052975" => "b052975.txt",
    "A080937" => "b080937.txt",
    "A081567" => "b081567.txt",
    "A094648" => "b094648.txt",
    "A094667" => "b094667.txt",
    "A094789" => "b094789.txt",
    "A094831" => "b094831.txt",
    "A095930" => "b095930.txt",
    "A095931" => "b095931.txt",
    "A216597" => "b216597.txt",
}

pub fn bundled_ids() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(id, _)| *id)
}

/// A fixture shipped with the crate.
pub fn bundled(id: &str) -> Option<BFileTable> {
    BUNDLED.iter().find(|(i, _)| *i == id).map(|(i, text)| {
        parse_bfile(i, text, &format!("bundled:{i}")).expect("bundled fixtures parse")
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub index: i64,
    pub local: String,
    pub bfile: String,
}

/// Outcome of aligning local values against a b-file. `shift` means local
/// index `j` is compared with b-file index `j + shift`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub id: String,
    pub shift: i64,
    pub matched: usize,
    pub compared: usize,
    pub first_mismatch: Option<Mismatch>,
    pub is_match: bool,
}

fn align_at(local: &[(i64, BigInt)], table: &BFileTable, shift: i64) -> (usize, usize, Option<Mismatch>) {
    let mut matched = 0;
    let mut compared = 0;
    for (j, v) in local {
        let Some(b) = table.get(j + shift) else {
            if compared == 0 {
                continue;
            }
            break;
        };
        compared += 1;
        if b != v {
            let mismatch = Mismatch {
                index: *j,
                local: v.to_string(),
                bfile: b.to_string(),
            };
            return (matched, compared, Some(mismatch));
        }
        matched += 1;
    }
    (matched, compared, None)
}

/// Tries every shift in the window and keeps the longest agreement.
pub fn compare_values(local: &[(i64, BigInt)], table: &BFileTable) -> AlignmentReport {
    let mut best: Option<(i64, usize, usize, Option<Mismatch>)> = None;
    let mut shifts: Vec<i64> = (-SHIFT_WINDOW..=SHIFT_WINDOW).collect();
    shifts.sort_by_key(|s| (s.abs(), *s));
    for shift in shifts {
        let (matched, compared, mismatch) = align_at(local, table, shift);
        let better = match &best {
            None => true,
            Some((_, m, _, bm)) => {
                matched > *m || (matched == *m && bm.is_some() && mismatch.is_none())
            }
        };
        if better {
            best = Some((shift, matched, compared, mismatch));
        }
    }
    let (shift, matched, compared, first_mismatch) = best.expect("window is non-empty");
    AlignmentReport {
        id: table.id.clone(),
        shift,
        matched,
        compared,
        is_match: first_mismatch.is_none() && matched >= MIN_AGREEMENT,
        first_mismatch,
    }
}

/// Compares `count` terms of a registered sequence with `table`.
pub fn compare(
    registry: &Registry,
    name: &str,
    params: &[i64],
    table: &BFileTable,
    count: usize,
) -> Result<AlignmentReport> {
    if count < MIN_AGREEMENT {
        return Err(Error::InvalidArgument(format!(
            "comparison needs at least {MIN_AGREEMENT} terms, got {count}"
        )));
    }
    let oracle = registry.get(name, params)?;
    let start = oracle.start();
    let local = (start..start + count as i64)
        .map(|j| oracle.eval(j).map(|v| (j, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(compare_values(&local, table))
}

pub fn validate_id(id: &str) -> Result<&str> {
    let digits = id
        .strip_prefix('A')
        .filter(|d| d.len() == 6 && d.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| Error::InvalidId(id.to_string()))?;
    Ok(digits)
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub network: bool,
    pub cache_dir: PathBuf,
    pub base_url: String,
}

impl FetchOptions {
    /// Offline options with the cache directory taken from `OEIS_CACHE_DIR`.
    pub fn from_env() -> Self {
        FetchOptions {
            network: false,
            cache_dir: std::env::var_os(CACHE_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR)),
            base_url: DEFAULT_BASE_URL.to_string(),
        }
    }
}

pub fn cache_path(cache_dir: &Path, id: &str) -> Result<PathBuf> {
    let digits = validate_id(id)?;
    Ok(cache_dir.join(format!("b{digits}.txt")))
}

/// Returns the cached b-file for `id`, downloading it first when the
/// network is enabled and the cache is empty.
pub fn fetch(id: &str, opts: &FetchOptions) -> Result<BFileTable> {
    let path = cache_path(&opts.cache_dir, id)?;
    if path.exists() {
        let text = std::fs::read_to_string(&path)?;
        return parse_bfile(id, &text, &path.display().to_string());
    }
    if !opts.network {
        return Err(Error::NetworkDisabled(id.to_string()));
    }
    let digits = validate_id(id)?;
    let url = format!("{}/{id}/b{digits}.txt", opts.base_url.trim_end_matches('/'));
    let text = ureq::get(&url)
        .call()
        .map_err(|e| Error::Fetch(format!("{url}: {e}")))?
        .body_mut()
        .read_to_string()
        .map_err(|e| Error::Fetch(format!("{url}: {e}")))?;
    let table = parse_bfile(id, &text, &url)?;
    std::fs::create_dir_all(&opts.cache_dir)?;
    let nonce = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or_default();
    let tmp = opts
        .cache_dir
        .join(format!(".b{digits}.{}.{nonce}.tmp", std::process::id()));
    std::fs::write(&tmp, &text)?;
    std::fs::rename(&tmp, &path)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(pairs: &[(i64, i64)]) -> BFileTable {
        BFileTable {
            id: "T".into(),
            entries: pairs.iter().map(|&(i, v)| (i, BigInt::from(v))).collect(),
            source: String::new(),
        }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_bfile("T", "0 1\n1 2\n2 7\n", "").unwrap(),
            table(&[(0, 1), (1, 2), (2, 7)])
        );
        assert_eq!(parse_bfile("T", "# comment\n5 42\n", "").unwrap(), table(&[(5, 42)]));
        assert_eq!(
            parse_bfile("T", "3 x\n", ""),
            Err(Error::BFileParse {
                line: 1,
                reason: "bad value `x`".into()
            })
        );
    }

    #[test]
    fn parse_edge_cases() {
        assert_eq!(
            parse_bfile("T", "0 1\r\n\r\n1 -3\r\n", "").unwrap(),
            table(&[(0, 1), (1, -3)])
        );
        assert!(matches!(
            parse_bfile("T", "1 1\n1 2\n", ""),
            Err(Error::BFileParse { line: 2, .. })
        ));
        assert!(matches!(
            parse_bfile("T", "1\n", ""),
            Err(Error::BFileParse { line: 1, .. })
        ));
        let big = "7 123456789012345678901234567890\n";
        assert_eq!(serialize_bfile(&parse_bfile("T", big, "").unwrap()), big);
    }

    #[test]
    fn bundled_fixtures_round_trip() {
        for id in bundled_ids() {
            let t = bundled(id).unwrap();
            assert!(t.len() >= 60, "{id}");
            let again = parse_bfile(id, &serialize_bfile(&t), &t.source).unwrap();
            assert_eq!(again, t);
        }
    }

    #[test]
    fn alignment_finds_shift() {
        let t = table(&(0..40).map(|i| (i, i * i)).collect::<Vec<_>>());
        let local: Vec<(i64, BigInt)> = (1..31).map(|j| (j, BigInt::from((j + 2) * (j + 2)))).collect();
        let r = compare_values(&local, &t);
        assert_eq!((r.shift, r.matched, r.is_match), (2, 30, true));

        let local: Vec<(i64, BigInt)> = (0..25).map(|j| (j, BigInt::from(j * j + (j == 21) as i64))).collect();
        let r = compare_values(&local, &t);
        assert!(!r.is_match);
        assert_eq!(r.first_mismatch.unwrap().index, 21);

        let short: Vec<(i64, BigInt)> = (0..10).map(|j| (j, BigInt::from(j * j))).collect();
        assert!(!compare_values(&short, &t).is_match);
    }

    #[test]
    fn id_validation() {
        assert_eq!(validate_id("A080937").unwrap(), "080937");
        assert!(matches!(validate_id("not-an-id"), Err(Error::InvalidId(_))));
        assert!(validate_id("A12345").is_err());
        assert!(validate_id("B123456").is_err());
    }

    #[test]
    fn fetch_is_cache_first_and_offline_by_default() {
        let dir = tempfile::tempdir().unwrap();
        let mut opts = FetchOptions::from_env();
        opts.cache_dir = dir.path().to_path_buf();
        assert_eq!(
            fetch("A080937", &opts),
            Err(Error::NetworkDisabled("A080937".into()))
        );
        assert!(matches!(fetch("not-an-id", &opts), Err(Error::InvalidId(_))));
        std::fs::write(dir.path().join("b080937.txt"), "0 1\n1 1\n2 2\n").unwrap();
        let t = fetch("A080937", &opts).unwrap();
        assert_eq!(t.len(), 3);
    }
}
