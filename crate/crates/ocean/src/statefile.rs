//! The versioned binary state file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "OCN1" | u32 version | f64 alpha | u64 h | u64 p | u64 q | u32 cap | u8 width
//! | u64 count, then count x (u32 len, UTF-8 bytes)   row ids
//! | u64 count, then count x (u32 len, UTF-8 bytes)   column ids
//! | p * q categories, row-major, `width` bytes each
//! | u64 CRC-64/XZ of every preceding byte
//! ```

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crc::{Crc, Digest, CRC_64_XZ};
use ocean_core::{
    width_for_cap, Alpha, CategoryMatrix, CategoryStorage, HommelConstant, PreparedState,
    STATE_FORMAT_VERSION,
};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"OCN1";

static CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

struct HashingWriter<'a, W> {
    inner: W,
    digest: Digest<'a, u64>,
}

impl<W: Write> Write for HashingWriter<'_, W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.digest.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn write_ids(w: &mut impl Write, ids: &[String]) -> io::Result<()> {
    w.write_all(&(ids.len() as u64).to_le_bytes())?;
    for id in ids {
        let len = u32::try_from(id.len())
            .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "identifier too long"))?;
        w.write_all(&len.to_le_bytes())?;
        w.write_all(id.as_bytes())?;
    }
    Ok(())
}

/// Serializes `state` to `out`.
pub fn write_state(state: &PreparedState, out: impl Write) -> io::Result<()> {
    let mut w = HashingWriter {
        inner: out,
        digest: CRC64.digest(),
    };
    let cats = state.categories();
    w.write_all(&MAGIC)?;
    w.write_all(&STATE_FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&state.alpha().get().to_le_bytes())?;
    w.write_all(&state.h().h().to_le_bytes())?;
    w.write_all(&(state.rows() as u64).to_le_bytes())?;
    w.write_all(&(state.cols() as u64).to_le_bytes())?;
    w.write_all(&state.cap().to_le_bytes())?;
    w.write_all(&[cats.width()])?;
    write_ids(&mut w, state.row_ids())?;
    write_ids(&mut w, state.col_ids())?;
    const CHUNK: usize = 1 << 16;
    match cats.storage() {
        CategoryStorage::U8(v) => w.write_all(v)?,
        CategoryStorage::U16(v) => {
            for c in v.chunks(CHUNK) {
                let bytes: Vec<u8> = c.iter().flat_map(|x| x.to_le_bytes()).collect();
                w.write_all(&bytes)?;
            }
        }
        CategoryStorage::U32(v) => {
            for c in v.chunks(CHUNK) {
                let bytes: Vec<u8> = c.iter().flat_map(|x| x.to_le_bytes()).collect();
                w.write_all(&bytes)?;
            }
        }
    }
    let checksum = w.digest.finalize();
    w.inner.write_all(&checksum.to_le_bytes())?;
    w.inner.flush()
}

pub fn save(state: &PreparedState, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_state(state, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Reads fields while hashing every consumed byte; running out of bytes means the
/// file was truncated.
struct Fields<'a, R> {
    inner: R,
    digest: Digest<'a, u64>,
    /// Upper bound on the remaining payload, when known, to reject absurd sizes
    /// before allocating.
    remaining: Option<u64>,
}

fn truncated() -> Error {
    Error::Checksum("unexpected end of file".into())
}

impl<R: Read> Fields<'_, R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.fill(&mut buf)?;
        Ok(buf)
    }

    fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        self.inner.read_exact(buf).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => truncated(),
            _ => Error::Validation(format!("reading state file: {e}")),
        })?;
        self.digest.update(buf);
        if let Some(r) = self.remaining.as_mut() {
            *r = r.saturating_sub(buf.len() as u64);
        }
        Ok(())
    }

    fn u32(&mut self) -> Result<u32> {
        self.bytes().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.bytes().map(u64::from_le_bytes)
    }

    fn check_room(&self, needed: u64) -> Result<()> {
        match self.remaining {
            Some(r) if needed > r => Err(truncated()),
            _ => Ok(()),
        }
    }

    fn ids(&mut self, expected: u64, axis: &str) -> Result<Vec<String>> {
        let count = self.u64()?;
        if count != expected {
            return Err(Error::Checksum(format!(
                "{axis} id table has {count} entries, header says {expected}"
            )));
        }
        self.check_room(count.saturating_mul(4))?;
        let mut ids = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let len = self.u32()? as u64;
            self.check_room(len)?;
            let mut buf = vec![0u8; len as usize];
            self.fill(&mut buf)?;
            ids.push(
                String::from_utf8(buf)
                    .map_err(|_| Error::Checksum(format!("{axis} id is not UTF-8")))?,
            );
        }
        Ok(ids)
    }
}

fn corrupt(e: ocean_core::Error) -> Error {
    Error::Checksum(e.to_string())
}

/// Reads a state written by [`write_state`]. `size_hint` is the total byte length
/// when known. The magic is checked first, then the version, then the checksum.
pub fn read_state(input: impl Read, size_hint: Option<u64>) -> Result<PreparedState> {
    let mut f = Fields {
        inner: input,
        digest: CRC64.digest(),
        remaining: size_hint,
    };
    let magic: [u8; 4] = f
        .bytes()
        .map_err(|_| Error::StateFormat("file too short for magic bytes".into()))?;
    if magic != MAGIC {
        return Err(Error::StateFormat(format!("bad magic bytes {magic:02x?}")));
    }
    let version = f.u32()?;
    if version != STATE_FORMAT_VERSION {
        return Err(Error::StateVersion {
            found: version,
            expected: STATE_FORMAT_VERSION,
        });
    }
    let alpha = f64::from_le_bytes(f.bytes()?);
    let h = f.u64()?;
    let p = f.u64()?;
    let q = f.u64()?;
    let cap = f.u32()?;
    let [width] = f.bytes::<1>()?;
    let row_ids = f.ids(p, "row")?;
    let col_ids = f.ids(q, "column")?;
    if width != width_for_cap(cap) {
        return Err(Error::Checksum(format!(
            "entry width {width} does not match cap {cap}"
        )));
    }
    let m = p
        .checked_mul(q)
        .ok_or_else(|| Error::Checksum("dimensions overflow".into()))?;
    let bytes_len = m
        .checked_mul(width as u64)
        .ok_or_else(|| Error::Checksum("dimensions overflow".into()))?;
    f.check_room(bytes_len.saturating_add(8))?;
    let mut raw = vec![0u8; bytes_len as usize];
    f.fill(&mut raw)?;
    let computed = f.digest.finalize();
    let mut stored = [0u8; 8];
    f.inner.read_exact(&mut stored).map_err(|_| truncated())?;
    let stored = u64::from_le_bytes(stored);
    if stored != computed {
        return Err(Error::Checksum(format!(
            "stored {stored:016x}, computed {computed:016x}"
        )));
    }
    let mut extra = [0u8; 1];
    if f.inner
        .read(&mut extra)
        .map_err(|e| Error::Validation(e.to_string()))?
        != 0
    {
        return Err(Error::Checksum("trailing bytes after checksum".into()));
    }
    let (p, q) = (p as usize, q as usize);
    let categories = match width {
        1 => CategoryMatrix::from_iter_checked(p, q, cap, raw.iter().map(|&b| b as u32)),
        2 => CategoryMatrix::from_iter_checked(
            p,
            q,
            cap,
            raw.chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]) as u32),
        ),
        _ => CategoryMatrix::from_iter_checked(
            p,
            q,
            cap,
            raw.chunks_exact(4)
                .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])),
        ),
    }
    .map_err(corrupt)?;
    drop(raw);
    let alpha = Alpha::new(alpha).map_err(corrupt)?;
    let h = HommelConstant::new(h, m).map_err(corrupt)?;
    PreparedState::from_parts(alpha, h, categories, row_ids, col_ids).map_err(corrupt)
}

pub fn load(path: &Path) -> Result<PreparedState> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let size = file.metadata().ok().map(|m| m.len());
    read_state(BufReader::new(file), size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ocean_core::{prepare, AssociationMatrix};

    fn toy_state(pvalue: impl Fn(usize) -> f64, rows: usize, cols: usize) -> PreparedState {
        let ids = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let pv = (0..rows * cols).map(pvalue).collect();
        let m = AssociationMatrix::new(ids("gene_", rows), ids("band_", cols), pv).unwrap();
        prepare(&m, Alpha::new(0.05).unwrap()).unwrap()
    }

    fn bytes(state: &PreparedState) -> Vec<u8> {
        let mut buf = Vec::new();
        write_state(state, &mut buf).unwrap();
        buf
    }

    #[test]
    fn round_trip_at_every_width() {
        for (rows, cols) in [(3, 4), (40, 50), (300, 300)] {
            let st = toy_state(|i| ((i * 7919) % 1000) as f64 / 1000.0, rows, cols);
            let buf = bytes(&st);
            let back = read_state(buf.as_slice(), Some(buf.len() as u64)).unwrap();
            assert_eq!(back, st);
            assert_eq!(buf, bytes(&back));
        }
        let widths: Vec<u8> = [(3, 4), (40, 50), (300, 300)]
            .iter()
            .map(|&(r, c)| {
                toy_state(|i| ((i * 7919) % 1000) as f64 / 1000.0, r, c)
                    .categories()
                    .width()
            })
            .collect();
        assert_eq!(widths, [1, 2, 4]);
    }

    #[test]
    fn header_layout() {
        let st = toy_state(|_| 1.0, 2, 3);
        let b = bytes(&st);
        assert_eq!(&b[..4], b"OCN1");
        assert_eq!(u32::from_le_bytes(b[4..8].try_into().unwrap()), 1);
        assert_eq!(f64::from_le_bytes(b[8..16].try_into().unwrap()), 0.05);
        assert_eq!(u64::from_le_bytes(b[16..24].try_into().unwrap()), 6);
        assert_eq!(u64::from_le_bytes(b[24..32].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(b[32..40].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(b[40..44].try_into().unwrap()), st.cap());
        assert_eq!(b[44], 1);
        let body = &b[..b.len() - 8];
        assert_eq!(
            u64::from_le_bytes(b[b.len() - 8..].try_into().unwrap()),
            CRC64.checksum(body)
        );
        // all p = 1: every category equals the cap
        assert!(b[b.len() - 14..b.len() - 8]
            .iter()
            .all(|&c| c as u32 == st.cap()));
    }

    #[test]
    fn truncation_is_a_checksum_error() {
        let b = bytes(&toy_state(|i| i as f64 / 20.0, 4, 5));
        for cut in [9, 30, 50, b.len() - 20, b.len() - 1] {
            let err = read_state(&b[..cut], None).unwrap_err();
            assert!(matches!(err, Error::Checksum(_)), "cut {cut}: {err}");
            let err = read_state(&b[..cut], Some(cut as u64)).unwrap_err();
            assert!(
                matches!(err, Error::Checksum(_)),
                "cut {cut} with size: {err}"
            );
        }
    }

    #[test]
    fn flipped_byte_bad_magic_and_version() {
        let b = bytes(&toy_state(|i| i as f64 / 20.0, 4, 5));
        let mut c = b.clone();
        let last = c.len() - 10;
        c[last] ^= 0x01;
        assert!(matches!(
            read_state(c.as_slice(), None),
            Err(Error::Checksum(_))
        ));

        let mut c = b.clone();
        c[0] = b'X';
        assert!(matches!(
            read_state(c.as_slice(), None),
            Err(Error::StateFormat(_))
        ));

        let mut c = b.clone();
        c[4] = 9;
        assert!(matches!(
            read_state(c.as_slice(), None),
            Err(Error::StateVersion { found: 9, .. })
        ));

        let mut c = b;
        c.push(0);
        assert!(matches!(
            read_state(c.as_slice(), None),
            Err(Error::Checksum(_))
        ));
    }
}
