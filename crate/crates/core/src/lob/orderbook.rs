use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::message::{csv_error, csv_reader, MessageEvent};
use crate::{Error, Result};

/// Price LOBSTER writes for an unoccupied ask level.
pub const EMPTY_ASK_PRICE: i64 = 9_999_999_999;
/// Price LOBSTER writes for an unoccupied bid level.
pub const EMPTY_BID_PRICE: i64 = -9_999_999_999;

/// One price level on both sides. An unoccupied side has volume 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Level {
    pub ask_price: i64,
    pub ask_volume: u64,
    pub bid_price: i64,
    pub bid_volume: u64,
}

/// Snapshot of the top `K` levels of the book.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthRow {
    /// Seconds after midnight, copied from the aligned message row.
    pub time: f64,
    pub levels: Vec<Level>,
}

impl DepthRow {
    pub fn bid_total(&self) -> u64 {
        self.levels.iter().map(|l| l.bid_volume).sum()
    }

    pub fn ask_total(&self) -> u64 {
        self.levels.iter().map(|l| l.ask_volume).sum()
    }

    /// Best bid and ask prices, when both sides are occupied.
    pub fn best_quotes(&self) -> Option<(i64, i64)> {
        let top = self.levels.first()?;
        (top.bid_volume > 0 && top.ask_volume > 0).then_some((top.bid_price, top.ask_price))
    }
}

/// Parse an orderbook file. Row times are left at zero; use
/// [`attach_times`] with the companion message file to fill them.
pub fn parse_orderbook_file(path: &Path, levels: usize) -> Result<Vec<DepthRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_orderbook(file, &path.display().to_string(), levels)
}

pub fn read_orderbook<R: Read>(reader: R, label: &str, levels: usize) -> Result<Vec<DepthRow>> {
    let mut rows = Vec::new();
    let mut rdr = csv_reader(reader);
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_error(label, e)),
        }
        let line = record.position().map_or(0, |p| p.line());
        rows.push(parse_depth_record(&record, levels, label, line)?);
    }
    Ok(rows)
}

pub(crate) fn parse_depth_record(
    record: &csv::StringRecord,
    levels: usize,
    label: &str,
    line: u64,
) -> Result<DepthRow> {
    let err = |msg: String| Error::Parse {
        file: label.to_string(),
        line,
        msg,
    };
    if levels == 0 {
        return Err(Error::InvalidArgument(
            "level count must be positive".into(),
        ));
    }
    if record.len() != 4 * levels {
        return Err(err(format!(
            "expected {} columns for {levels} levels, found {}",
            4 * levels,
            record.len()
        )));
    }
    let int = |i: usize| -> Result<i64> {
        record[i].parse::<i64>().map_err(|_| {
            err(format!(
                "column {}: not an integer: {:?}",
                i + 1,
                &record[i]
            ))
        })
    };
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let base = 4 * k;
        let ask_price = int(base)?;
        let ask_size = int(base + 1)?;
        let bid_price = int(base + 2)?;
        let bid_size = int(base + 3)?;
        if ask_size < 0 || bid_size < 0 {
            return Err(err(format!("negative volume at level {}", k + 1)));
        }
        let ask_volume = if ask_price >= EMPTY_ASK_PRICE {
            0
        } else {
            ask_size as u64
        };
        let bid_volume = if bid_price <= EMPTY_BID_PRICE {
            0
        } else {
            bid_size as u64
        };
        out.push(Level {
            ask_price,
            ask_volume,
            bid_price,
            bid_volume,
        });
    }
    Ok(DepthRow {
        time: 0.0,
        levels: out,
    })
}

/// Copy message times onto the row-aligned depth rows. The two files of a
/// day must have the same number of rows.
pub fn attach_times(rows: &mut [DepthRow], events: &[MessageEvent]) -> Result<()> {
    if rows.len() != events.len() {
        return Err(Error::InvalidArgument(format!(
            "orderbook has {} rows but message file has {}",
            rows.len(),
            events.len()
        )));
    }
    for (row, ev) in rows.iter_mut().zip(events) {
        row.time = ev.time;
    }
    Ok(())
}
