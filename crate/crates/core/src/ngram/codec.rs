//! Binary model format (little-endian).
//!
//! ```text
//! "CSPK"                      magic
//! u16                         format version
//! u64                         body length: bytes from here up to the CRC
//! varint + bytes              language code (UTF-8)
//! u32, u64                    min_word_len, min_word_freq
//! u64                         total_unigrams
//! varint                      word count; then per word (index = id):
//!   varint + bytes, u64       word (UTF-8), count
//! bigram section              per head id: varint n, then n × (varint id delta, varint count)
//! trigram section             per stored bigram, in bigram order: same layout
//! u32                         CRC32 of every preceding byte
//! ```
//!
//! Child ids are delta-coded against the previous child (the first against 0).

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use super::{Level, ModelError, NgramModel, WordId, WordIdMap};

pub const MAGIC: [u8; 4] = *b"CSPK";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 14;

pub fn save_model(model: &NgramModel, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let mut file = io::BufWriter::new(fs::File::create(path)?);
    write_model(model, &mut file)?;
    file.flush()?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<NgramModel, ModelError> {
    read_model(&fs::read(path)?)
}

pub fn write_model<W: Write>(model: &NgramModel, mut out: W) -> Result<(), ModelError> {
    let mut buf = Vec::with_capacity(1 << 16);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&0u64.to_le_bytes());
    put_bytes(&mut buf, model.language.as_bytes());
    buf.extend_from_slice(&(model.min_word_len as u32).to_le_bytes());
    buf.extend_from_slice(&model.min_word_freq.to_le_bytes());
    buf.extend_from_slice(&model.total_unigrams.to_le_bytes());

    put_varint(&mut buf, model.vocab.len() as u64);
    for (word, &count) in model.vocab.words().iter().zip(&model.unigram_counts) {
        put_bytes(&mut buf, word.as_bytes());
        buf.extend_from_slice(&count.to_le_bytes());
    }
    put_level(&mut buf, &model.bigrams);
    put_level(&mut buf, &model.trigrams);

    let body_len = (buf.len() - HEADER_LEN) as u64;
    buf[6..HEADER_LEN].copy_from_slice(&body_len.to_le_bytes());
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_model(bytes: &[u8]) -> Result<NgramModel, ModelError> {
    if bytes.len() < MAGIC.len() {
        return Err(if MAGIC.starts_with(bytes) {
            ModelError::Truncated
        } else {
            ModelError::BadMagic
        });
    }
    if bytes[..4] != MAGIC {
        return Err(ModelError::BadMagic);
    }
    let version = bytes
        .get(4..6)
        .map(|v| u16::from_le_bytes([v[0], v[1]]))
        .ok_or(ModelError::Truncated)?;
    if version != FORMAT_VERSION {
        return Err(ModelError::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let body_len = bytes
        .get(6..HEADER_LEN)
        .map(|v| u64::from_le_bytes(v.try_into().expect("8 bytes")))
        .ok_or(ModelError::Truncated)?;
    let expected = usize::try_from(body_len)
        .ok()
        .and_then(|n| n.checked_add(HEADER_LEN + 4))
        .ok_or_else(|| ModelError::Malformed("body length overflow".into()))?;
    if bytes.len() < expected {
        return Err(ModelError::Truncated);
    }
    if bytes.len() > expected {
        return Err(ModelError::Malformed("trailing bytes after checksum".into()));
    }
    let (payload, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4-byte tail"));
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(ModelError::Checksum { stored, computed });
    }
    parse(payload).map_err(|e| match e {
        ModelError::Truncated => ModelError::Malformed("section ends before body length".into()),
        e => e,
    })
}

/// Plain-text dump, one n-gram per line as `w1 [w2 [w3]] count`.
pub fn write_text_dump<W: Write>(model: &NgramModel, mut out: W) -> io::Result<()> {
    let word = |id: WordId| model.vocab.word(id);
    for (id, count) in model.unigram_counts.iter().enumerate() {
        writeln!(out, "{} {}", word(id as WordId), count)?;
    }
    for (a, b, count) in model.bigrams() {
        writeln!(out, "{} {} {}", word(a), word(b), count)?;
    }
    for (a, b, c, count) in model.trigrams() {
        writeln!(out, "{} {} {} {}", word(a), word(b), word(c), count)?;
    }
    Ok(())
}

fn parse(payload: &[u8]) -> Result<NgramModel, ModelError> {
    let mut r = Reader { buf: payload, pos: HEADER_LEN };
    let language = r.string()?;
    let min_word_len = r.u32()? as usize;
    let min_word_freq = r.u64()?;
    let total_unigrams = r.u64()?;

    let n_words = r.len_prefix()?;
    let mut words = Vec::with_capacity(n_words.min(payload.len()));
    let mut unigram_counts = Vec::with_capacity(n_words.min(payload.len()));
    for _ in 0..n_words {
        words.push(r.string()?);
        unigram_counts.push(r.u64()?);
    }
    let vocab = WordIdMap::from_words(words);
    if vocab.ids.len() != vocab.len() {
        return Err(ModelError::Malformed("duplicate word in table".into()));
    }
    if unigram_counts.iter().sum::<u64>() != total_unigrams {
        return Err(ModelError::Malformed("unigram total does not match counts".into()));
    }

    let bigrams = r.level(n_words, n_words)?;
    let trigrams = r.level(bigrams.len(), n_words)?;
    if r.pos != payload.len() {
        return Err(ModelError::Malformed("trailing bytes after trigram section".into()));
    }

    Ok(NgramModel {
        language,
        min_word_len,
        min_word_freq,
        vocab,
        unigram_counts,
        total_unigrams,
        bigrams,
        trigrams,
    })
}

fn put_level(buf: &mut Vec<u8>, level: &Level) {
    for parent in 0..level.offsets.len() - 1 {
        let range = level.range(parent);
        put_varint(buf, range.len() as u64);
        let mut prev = 0;
        for slot in range {
            let child = level.children[slot];
            put_varint(buf, u64::from(child - prev));
            put_varint(buf, level.counts[slot]);
            prev = child;
        }
    }
}

fn put_bytes(buf: &mut Vec<u8>, bytes: &[u8]) {
    put_varint(buf, bytes.len() as u64);
    buf.extend_from_slice(bytes);
}

/// LEB128.
fn put_varint(buf: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        buf.push((v as u8) | 0x80);
        v >>= 7;
    }
    buf.push(v as u8);
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], ModelError> {
        let end = self.pos.checked_add(n).ok_or(ModelError::Truncated)?;
        let out = self.buf.get(self.pos..end).ok_or(ModelError::Truncated)?;
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, ModelError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn varint(&mut self) -> Result<u64, ModelError> {
        let mut value = 0u64;
        for shift in (0..64).step_by(7) {
            let byte = *self.buf.get(self.pos).ok_or(ModelError::Truncated)?;
            self.pos += 1;
            value |= u64::from(byte & 0x7f) << shift;
            if byte & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(ModelError::Malformed("varint longer than 64 bits".into()))
    }

    fn len_prefix(&mut self) -> Result<usize, ModelError> {
        usize::try_from(self.varint()?).map_err(|_| ModelError::Malformed("length overflow".into()))
    }

    fn string(&mut self) -> Result<String, ModelError> {
        let n = self.len_prefix()?;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| ModelError::Malformed("word is not UTF-8".into()))
    }

    fn level(&mut self, parents: usize, vocab: usize) -> Result<Level, ModelError> {
        let mut level = Level::with_parents(parents);
        for parent in 0..parents {
            let n = self.len_prefix()?;
            let mut prev: u64 = 0;
            for i in 0..n {
                let delta = self.varint()?;
                if i > 0 && delta == 0 {
                    return Err(ModelError::Malformed("child ids not strictly increasing".into()));
                }
                let id = prev
                    .checked_add(delta)
                    .filter(|&id| id < vocab as u64)
                    .ok_or_else(|| ModelError::Malformed("child id out of range".into()))?;
                level.children.push(id as WordId);
                level.counts.push(self.varint()?);
                prev = id;
            }
            level.offsets[parent + 1] = level.offsets[parent] + n;
        }
        Ok(level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::tests::toy_model;

    fn encode(m: &NgramModel) -> Vec<u8> {
        let mut v = Vec::new();
        write_model(m, &mut v).unwrap();
        v
    }

    #[test]
    fn round_trip_preserves_everything() {
        let m = toy_model();
        let back = read_model(&encode(&m)).unwrap();
        assert_eq!(back, m);
        for (a, b, _) in m.bigrams() {
            assert_eq!(back.cond_prob_ids(&[a], b), m.cond_prob_ids(&[a], b));
        }
        for (a, b, c, _) in m.trigrams() {
            assert_eq!(back.cond_prob_ids(&[a, b], c), m.cond_prob_ids(&[a, b], c));
        }
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&toy_model());
        assert_eq!(&bytes[..4], b"CSPK");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), FORMAT_VERSION);
        let body = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
        assert_eq!(body as usize, bytes.len() - 18);
        assert_eq!(bytes[14], 2);
        assert_eq!(&bytes[15..17], b"en");
    }

    #[test]
    fn distinct_load_errors() {
        let good = encode(&toy_model());

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(matches!(read_model(&bad_magic), Err(ModelError::BadMagic)));

        let mut bad_version = good.clone();
        bad_version[4] = 9;
        assert!(matches!(read_model(&bad_version), Err(ModelError::Version { found: 9, .. })));

        for pos in HEADER_LEN..good.len() {
            let mut flipped = good.clone();
            flipped[pos] ^= 0x01;
            assert!(matches!(read_model(&flipped), Err(ModelError::Checksum { .. })), "byte {pos}");
        }

        let mut longer = good.clone();
        longer.push(0);
        assert!(matches!(read_model(&longer), Err(ModelError::Malformed(_))));

        for cut in [2, 5, 8, 13, 20, good.len() - 1] {
            assert!(
                matches!(read_model(&good[..cut]), Err(ModelError::Truncated)),
                "cut at {cut}"
            );
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.cspk");
        save_model(&toy_model(), &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), toy_model());
    }

    #[test]
    fn varint_encoding() {
        let mut buf = Vec::new();
        for v in [0u64, 1, 127, 128, 300, u64::MAX] {
            buf.clear();
            put_varint(&mut buf, v);
            let mut r = Reader { buf: &buf, pos: 0 };
            assert_eq!(r.varint().unwrap(), v);
            assert_eq!(r.pos, buf.len());
        }
        buf.clear();
        put_varint(&mut buf, 300);
        assert_eq!(buf, [0xac, 0x02]);
    }

    #[test]
    fn text_dump_lists_every_ngram() {
        let mut out = Vec::new();
        write_text_dump(&toy_model(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("the cat 2\n"));
        assert!(text.contains("the cat sat 1\n"));
        assert_eq!(text.lines().count(), 4 + 3 + 2);
    }
}
