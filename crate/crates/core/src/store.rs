//! Persistent trace cache.
//!
//! File layout, line-oriented text:
//!
//! ```text
//! # stlab-cache v1 family=<16 hex digits>
//! p,t,a
//! p,t,a
//! ```
//!
//! `t` is stored reduced modulo `p`. Rows are appended in ascending `(p, t)`
//! order per flush while holding an exclusive advisory lock on the file.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::FamilyPoly;
use crate::field::{is_prime, residue};
use crate::points::{satisfies_hasse, TraceRecord};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Default)]
struct State {
    rows: HashMap<(u64, u64), i64>,
    pending: BTreeMap<(u64, u64), i64>,
}

/// In-memory view of one cache file, shareable across threads.
#[derive(Debug)]
pub struct TraceCache {
    path: PathBuf,
    fingerprint: u64,
    state: RwLock<State>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub path: String,
    pub family: String,
    pub rows: usize,
    pub pending: usize,
    pub primes: usize,
    pub min_p: Option<u64>,
    pub max_p: Option<u64>,
}

pub fn header_line(fingerprint: u64) -> String {
    format!("# stlab-cache v{FORMAT_VERSION} family={fingerprint:016x}")
}

impl TraceCache {
    /// Opens (or creates) the cache at `path` for `family`.
    pub fn open(path: impl AsRef<Path>, family: &FamilyPoly) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let fingerprint = family.fingerprint();
        let io = |source| Error::Io {
            path: path.clone(),
            source,
        };
        let mut rows = HashMap::new();
        let existing = match File::open(&path) {
            Ok(f) => Some(f),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => return Err(io(e)),
        };
        let mut have_header = false;
        if let Some(file) = existing {
            for (idx, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io)?;
                let lineno = idx + 1;
                if lineno == 1 {
                    Self::check_header(&path, &line, fingerprint)?;
                    have_header = true;
                    continue;
                }
                if line.trim().is_empty() {
                    continue;
                }
                let (key, a) = parse_row(&line).map_err(|msg| Error::CacheRow {
                    path: path.clone(),
                    line: lineno,
                    msg,
                })?;
                if rows.insert(key, a).is_some() {
                    return Err(Error::CacheRow {
                        path: path.clone(),
                        line: lineno,
                        msg: format!("duplicate key p={}, t={}", key.0, key.1),
                    });
                }
            }
        }
        if !have_header {
            let mut f = OpenOptions::new()
                .create(true)
                .truncate(true)
                .write(true)
                .open(&path)
                .map_err(io)?;
            writeln!(f, "{}", header_line(fingerprint)).map_err(io)?;
        }
        Ok(Self {
            path,
            fingerprint,
            state: RwLock::new(State {
                rows,
                pending: BTreeMap::new(),
            }),
        })
    }

    fn check_header(path: &Path, line: &str, fingerprint: u64) -> Result<()> {
        let bad = |msg: String| Error::CacheRow {
            path: path.to_path_buf(),
            line: 1,
            msg,
        };
        let rest = line
            .strip_prefix("# stlab-cache v")
            .ok_or_else(|| bad(format!("not a cache header: {line:?}")))?;
        let (version, family) = rest
            .split_once(" family=")
            .ok_or_else(|| bad(format!("malformed header: {line:?}")))?;
        if version != FORMAT_VERSION.to_string() {
            return Err(bad(format!("unsupported format version {version}")));
        }
        let stored = u64::from_str_radix(family, 16)
            .ok()
            .filter(|_| family.len() == 16)
            .ok_or_else(|| bad(format!("malformed fingerprint {family:?}")))?;
        if stored != fingerprint {
            return Err(Error::Cache {
                path: path.to_path_buf(),
                msg: format!(
                    "fingerprint mismatch: file has {stored:016x}, family is {fingerprint:016x}"
                ),
            });
        }
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn check_family(&self, family: &FamilyPoly) -> Result<()> {
        if family.fingerprint() == self.fingerprint {
            Ok(())
        } else {
            Err(Error::Cache {
                path: self.path.clone(),
                msg: format!(
                    "cache belongs to family {:016x}, queried with {}",
                    self.fingerprint,
                    family.fingerprint_hex()
                ),
            })
        }
    }

    /// Stored trace for `E(t) mod p`, if any.
    pub fn get(&self, p: u64, t: i64) -> Option<i64> {
        let key = (p, residue(t, p));
        self.state
            .read()
            .expect("cache lock poisoned")
            .rows
            .get(&key)
            .copied()
    }

    pub fn put(&self, rec: TraceRecord) -> Result<()> {
        self.put_all(std::iter::once(rec))
    }

    /// Buffers records for the next flush. Re-putting an identical record is
    /// a no-op; a conflicting trace for a stored key is an error.
    pub fn put_all(&self, recs: impl IntoIterator<Item = TraceRecord>) -> Result<()> {
        let mut st = self.state.write().expect("cache lock poisoned");
        for rec in recs {
            if !satisfies_hasse(rec.p, rec.a) {
                return Err(self.err(format!("refusing row violating Hasse: {rec:?}")));
            }
            let key = (rec.p, residue(rec.t, rec.p));
            match st.rows.get(&key) {
                Some(&a) if a == rec.a => {}
                Some(&a) => {
                    return Err(self.err(format!(
                        "conflicting trace for p={}, t={}: stored {a}, new {}",
                        key.0, key.1, rec.a
                    )))
                }
                None => {
                    st.rows.insert(key, rec.a);
                    st.pending.insert(key, rec.a);
                }
            }
        }
        Ok(())
    }

    /// Appends buffered rows to the file.
    pub fn flush(&self) -> Result<()> {
        let mut st = self.state.write().expect("cache lock poisoned");
        if st.pending.is_empty() {
            return Ok(());
        }
        let io = |source| Error::Io {
            path: self.path.clone(),
            source,
        };
        let file = OpenOptions::new()
            .append(true)
            .open(&self.path)
            .map_err(io)?;
        file.lock().map_err(io)?;
        let mut w = BufWriter::new(&file);
        for (&(p, t), &a) in &st.pending {
            writeln!(w, "{p},{t},{a}").map_err(io)?;
        }
        w.flush().map_err(io)?;
        drop(w);
        file.unlock().map_err(io)?;
        st.pending.clear();
        Ok(())
    }

    pub fn close(self) -> Result<()> {
        self.flush()
    }

    pub fn len(&self) -> usize {
        self.state.read().expect("cache lock poisoned").rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stats(&self) -> CacheStats {
        let st = self.state.read().expect("cache lock poisoned");
        let primes: std::collections::BTreeSet<u64> = st.rows.keys().map(|&(p, _)| p).collect();
        CacheStats {
            path: self.path.display().to_string(),
            family: format!("{:016x}", self.fingerprint),
            rows: st.rows.len(),
            pending: st.pending.len(),
            primes: primes.len(),
            min_p: primes.first().copied(),
            max_p: primes.last().copied(),
        }
    }

    fn err(&self, msg: String) -> Error {
        Error::Cache {
            path: self.path.clone(),
            msg,
        }
    }
}

impl Drop for TraceCache {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}

fn parse_row(line: &str) -> std::result::Result<((u64, u64), i64), String> {
    let mut it = line.split(',');
    let (Some(p), Some(t), Some(a), None) = (it.next(), it.next(), it.next(), it.next()) else {
        return Err(format!("expected `p,t,a`, got {line:?}"));
    };
    let p: u64 = p.parse().map_err(|_| format!("bad prime field {p:?}"))?;
    let t: u64 = t
        .parse()
        .map_err(|_| format!("bad parameter field {t:?}"))?;
    let a: i64 = a.parse().map_err(|_| format!("bad trace field {a:?}"))?;
    if p <= 3 || !is_prime(p) {
        return Err(format!("{p} is not a prime greater than 3"));
    }
    if t >= p {
        return Err(format!("parameter {t} not reduced modulo {p}"));
    }
    if !satisfies_hasse(p, a) {
        return Err(format!("trace {a} violates the Hasse bound at p = {p}"));
    }
    Ok(((p, t), a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fam() -> FamilyPoly {
        FamilyPoly::from_i64(&[0, 1], &[0, 1]).unwrap()
    }

    #[test]
    fn fresh_file_is_empty_with_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let c = TraceCache::open(&path, &fam()).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.get(5, 1), None);
        drop(c);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, format!("{}\n", header_line(fam().fingerprint())));
    }

    #[test]
    fn put_get_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let c = TraceCache::open(&path, &fam()).unwrap();
        c.put(TraceRecord { p: 5, t: 1, a: -3 }).unwrap();
        assert_eq!(c.get(5, 1), Some(-3));
        assert_eq!(c.get(5, 6), Some(-3));
        c.put(TraceRecord { p: 5, t: 6, a: -3 }).unwrap();
        assert!(matches!(
            c.put(TraceRecord { p: 5, t: 1, a: 2 }),
            Err(Error::Cache { .. })
        ));
        assert!(matches!(
            c.put(TraceRecord { p: 5, t: 2, a: 5 }),
            Err(Error::Cache { .. })
        ));
        c.close().unwrap();

        let c = TraceCache::open(&path, &fam()).unwrap();
        assert_eq!(c.get(5, 1), Some(-3));
        assert_eq!(c.len(), 1);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().nth(1), Some("5,1,-3"));
    }

    #[test]
    fn wrong_fingerprint_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        TraceCache::open(&path, &fam()).unwrap();
        let other = FamilyPoly::from_i64(&[1], &[0, 1]).unwrap();
        assert!(matches!(
            TraceCache::open(&path, &other),
            Err(Error::Cache { .. })
        ));
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let header = header_line(fam().fingerprint());
        for (body, line) in [
            ("5,1,-3\n7,1\n", 3),
            ("5,1,-3\n5,1,-3\n", 3),
            ("9,1,0\n", 2),
            ("5,7,0\n", 2),
            ("5,1,9\n", 2),
            ("5,1,x\n", 2),
        ] {
            std::fs::write(&path, format!("{header}\n{body}")).unwrap();
            match TraceCache::open(&path, &fam()) {
                Err(Error::CacheRow { line: l, .. }) => assert_eq!(l, line, "{body:?}"),
                other => panic!("expected row error for {body:?}, got {other:?}"),
            }
        }
        std::fs::write(&path, "garbage\n").unwrap();
        assert!(matches!(
            TraceCache::open(&path, &fam()),
            Err(Error::CacheRow { line: 1, .. })
        ));
    }

    #[test]
    fn random_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let primes: Vec<u64> = (5..5000).filter(|&n| is_prime(n)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut expect = HashMap::new();
        let c = TraceCache::open(&path, &fam()).unwrap();
        while expect.len() < 10_000 {
            let p = primes[rng.gen_range(0..primes.len())];
            let t = rng.gen_range(0..p);
            let bound = (2.0 * (p as f64).sqrt()).floor() as i64;
            let a = *expect
                .entry((p, t))
                .or_insert_with(|| rng.gen_range(-bound..=bound));
            c.put(TraceRecord { p, t: t as i64, a }).unwrap();
        }
        c.close().unwrap();
        let c = TraceCache::open(&path, &fam()).unwrap();
        assert_eq!(c.len(), expect.len());
        for (&(p, t), &a) in &expect {
            assert_eq!(c.get(p, t as i64), Some(a));
        }
        let stats = c.stats();
        assert_eq!(stats.rows, 10_000);
        assert_eq!(stats.pending, 0);
    }
}
