//! Binary columnar series cache.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset 0   4 bytes  magic "LRM1"
//! offset 4   u32      domain tag (0 = real-time seconds, 1 = event ticks)
//! offset 8   u64      point count n
//! offset 16  n x f64  time column
//!            n x f64  value column
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::series::{Series, TimeDomain};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"LRM1";
pub const HEADER_LEN: usize = 16;

pub fn write_series<W: Write>(mut w: W, series: &Series) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&series.domain.tag().to_le_bytes())?;
    w.write_all(&(series.len() as u64).to_le_bytes())?;
    for t in &series.times {
        w.write_all(&t.to_le_bytes())?;
    }
    for x in &series.values {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()
}

/// Write through a temporary sibling file and rename into place.
pub fn save(path: &Path, series: &Series) -> Result<()> {
    let tmp = path.with_extension("lrm.tmp");
    let file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    write_series(BufWriter::new(file), series).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn read_series<R: Read>(mut r: R, label: &Path) -> Result<Series> {
    let bad = |msg: &str| Error::Cache {
        path: label.to_path_buf(),
        msg: msg.to_string(),
    };
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| bad("truncated header"))?;
    if &header[0..4] != MAGIC {
        return Err(bad("bad magic"));
    }
    let tag = u32::from_le_bytes(header[4..8].try_into().unwrap());
    let domain = TimeDomain::from_tag(tag).ok_or_else(|| bad("unknown domain tag"))?;
    let n = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
    let column = |r: &mut R| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        let mut buf = [0u8; 8];
        for _ in 0..n {
            r.read_exact(&mut buf)
                .map_err(|_| bad("truncated column"))?;
            out.push(f64::from_le_bytes(buf));
        }
        Ok(out)
    };
    let times = column(&mut r)?;
    let values = column(&mut r)?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra).map_err(|e| Error::io(label, e))? != 0 {
        return Err(bad("trailing bytes after value column"));
    }
    Series::new(domain, times, values)
}

pub fn load(path: &Path) -> Result<Series> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_series(BufReader::new(file), path)
}
