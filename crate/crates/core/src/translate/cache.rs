//! Append-only translation cache.
//!
//! The store is a newline-delimited log of records
//! `hash<TAB>src<TAB>tgt<TAB>text<TAB>translation`. Appends are atomic at
//! record granularity (one `write` call per record), later records for the
//! same key win, and corrupted lines are skipped on load rather than
//! aborting. Lookups go by the 64-bit content hash with a full-key
//! comparison guarding against collisions.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use super::TranslationRequest;

/// FNV-1a over `source_lang NUL target_lang NUL text`. The function is part
/// of the on-disk format: changing it would orphan existing cache files.
pub fn fnv1a64(source_lang: &str, target_lang: &str, text: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for chunk in [
        source_lang.as_bytes(),
        &[0u8],
        target_lang.as_bytes(),
        &[0u8],
        text.as_bytes(),
    ] {
        for &byte in chunk {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(PRIME);
        }
    }
    hash
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Record {
    source_lang: String,
    target_lang: String,
    text: String,
    translation: String,
}

/// A persistent translation cache: concurrent readers, one serialized
/// writer.
#[derive(Debug)]
pub struct CacheStore {
    path: PathBuf,
    map: RwLock<HashMap<u64, Vec<Record>>>,
    writer: Mutex<File>,
    skipped_on_load: usize,
}

impl CacheStore {
    /// Opens (creating if needed) the cache at `path`. Corrupted records are
    /// counted and skipped; the count is available via
    /// [`CacheStore::skipped_on_load`].
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut map: HashMap<u64, Vec<Record>> = HashMap::new();
        let mut skipped = 0usize;
        match File::open(&path) {
            Ok(file) => {
                for line in BufReader::new(file).lines() {
                    let line = line?;
                    if line.is_empty() {
                        continue;
                    }
                    match parse_record(&line) {
                        Some((hash, record)) => insert_record(&mut map, hash, record),
                        None => skipped += 1,
                    }
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        let writer = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self {
            path,
            map: RwLock::new(map),
            writer: Mutex::new(writer),
            skipped_on_load: skipped,
        })
    }

    /// Number of corrupted records dropped while loading.
    pub fn skipped_on_load(&self) -> usize {
        self.skipped_on_load
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.map.read().unwrap().is_empty()
    }

    /// Exact lookup of a previous translation.
    pub fn lookup(&self, request: &TranslationRequest) -> Option<String> {
        let hash = fnv1a64(request.source_lang(), request.target_lang(), request.text());
        let map = self.map.read().unwrap();
        map.get(&hash)?
            .iter()
            .find(|r| {
                r.source_lang == request.source_lang()
                    && r.target_lang == request.target_lang()
                    && r.text == request.text()
            })
            .map(|r| r.translation.clone())
    }

    /// Appends a record to the log and the in-memory index. The translation
    /// must not contain tabs or newlines (the backend normalizes whitespace
    /// before calling this).
    pub fn append(&self, request: &TranslationRequest, translation: &str) -> io::Result<()> {
        debug_assert!(!translation.contains(['\t', '\n', '\r']));
        let hash = fnv1a64(request.source_lang(), request.target_lang(), request.text());
        let line = format!(
            "{hash}\t{}\t{}\t{}\t{translation}\n",
            request.source_lang(),
            request.target_lang(),
            request.text(),
        );
        {
            let mut writer = self.writer.lock().unwrap();
            writer.write_all(line.as_bytes())?;
            writer.flush()?;
        }
        let record = Record {
            source_lang: request.source_lang().into(),
            target_lang: request.target_lang().into(),
            text: request.text().into(),
            translation: translation.into(),
        };
        insert_record(&mut self.map.write().unwrap(), hash, record);
        Ok(())
    }

    /// Rewrites the log keeping only the latest record per key, then swaps
    /// it into place atomically.
    pub fn compact(&self) -> io::Result<()> {
        let map = self.map.read().unwrap();
        let mut keys: Vec<&u64> = map.keys().collect();
        keys.sort_unstable();
        let mut buf = String::new();
        for hash in keys {
            for r in &map[hash] {
                buf.push_str(&format!(
                    "{hash}\t{}\t{}\t{}\t{}\n",
                    r.source_lang, r.target_lang, r.text, r.translation
                ));
            }
        }
        drop(map);

        let tmp = self.path.with_extension("tmp");
        {
            let mut file = File::create(&tmp)?;
            file.write_all(buf.as_bytes())?;
            file.sync_all()?;
        }
        std::fs::rename(&tmp, &self.path)?;
        *self.writer.lock().unwrap() = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        Ok(())
    }
}

fn insert_record(map: &mut HashMap<u64, Vec<Record>>, hash: u64, record: Record) {
    let bucket = map.entry(hash).or_default();
    // Last writer wins for an existing key.
    if let Some(existing) = bucket.iter_mut().find(|r| {
        r.source_lang == record.source_lang
            && r.target_lang == record.target_lang
            && r.text == record.text
    }) {
        *existing = record;
    } else {
        bucket.push(record);
    }
}

fn parse_record(line: &str) -> Option<(u64, Record)> {
    let mut fields = line.splitn(5, '\t');
    let hash: u64 = fields.next()?.parse().ok()?;
    let source_lang = fields.next()?.to_string();
    let target_lang = fields.next()?.to_string();
    let text = fields.next()?.to_string();
    let translation = fields.next()?.to_string();
    if translation.is_empty() || text.is_empty() {
        return None;
    }
    // Integrity guard: the stored hash must match the stored key.
    if hash != fnv1a64(&source_lang, &target_lang, &text) {
        return None;
    }
    Some((
        hash,
        Record {
            source_lang,
            target_lang,
            text,
            translation,
        },
    ))
}
