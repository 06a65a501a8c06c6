use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Submission,
    /// Partial cancellation.
    Cancellation,
    /// Total deletion of a limit order.
    Deletion,
    ExecutionVisible,
    ExecutionHidden,
    /// Auction cross trade (LOBSTER type 6).
    CrossTrade,
    TradingHalt,
}

impl EventKind {
    pub fn from_code(code: i64) -> Option<Self> {
        Some(match code {
            1 => EventKind::Submission,
            2 => EventKind::Cancellation,
            3 => EventKind::Deletion,
            4 => EventKind::ExecutionVisible,
            5 => EventKind::ExecutionHidden,
            6 => EventKind::CrossTrade,
            7 => EventKind::TradingHalt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Buy,
    Sell,
}

/// One row of a LOBSTER message file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MessageEvent {
    /// Seconds after midnight.
    pub time: f64,
    pub kind: EventKind,
    pub order_id: u64,
    pub size: u64,
    /// Dollar price times 10000.
    pub price: i64,
    pub direction: Direction,
}

/// Bookkeeping returned next to parsed rows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParseReport {
    pub rows: usize,
    pub warnings: Vec<String>,
}

pub fn parse_message_file(path: &Path) -> Result<(Vec<MessageEvent>, ParseReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_messages(file, &path.display().to_string())
}

/// Parse message rows from any reader; `label` names the source in errors.
pub fn read_messages<R: Read>(reader: R, label: &str) -> Result<(Vec<MessageEvent>, ParseReport)> {
    let mut events = Vec::new();
    let mut report = ParseReport::default();
    let mut parser = MessageParser::new(label);
    let mut rdr = csv_reader(reader);
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_error(label, e)),
        }
        let line = record.position().map_or(0, |p| p.line());
        let ev = parser.parse(&record, line, &mut report.warnings)?;
        events.push(ev);
    }
    report.rows = events.len();
    Ok((events, report))
}

pub(crate) fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

pub(crate) fn csv_error(label: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        file: label.to_string(),
        line,
        msg: e.to_string(),
    }
}

/// Row-by-row message decoding with the monotone-time check.
pub(crate) struct MessageParser<'a> {
    label: &'a str,
    last_time: f64,
}

impl<'a> MessageParser<'a> {
    pub(crate) fn new(label: &'a str) -> Self {
        MessageParser {
            label,
            last_time: f64::NEG_INFINITY,
        }
    }

    pub(crate) fn parse(
        &mut self,
        record: &csv::StringRecord,
        line: u64,
        warnings: &mut Vec<String>,
    ) -> Result<MessageEvent> {
        let err = |msg: String| Error::Parse {
            file: self.label.to_string(),
            line,
            msg,
        };
        if record.len() != 6 {
            return Err(err(format!(
                "expected 6 columns (time, type, order id, size, price, direction), found {}",
                record.len()
            )));
        }
        let time: f64 = record[0]
            .parse()
            .map_err(|_| err(format!("bad time {:?}", &record[0])))?;
        if !time.is_finite() {
            return Err(err(format!("bad time {:?}", &record[0])));
        }
        let code: i64 = record[1]
            .parse()
            .map_err(|_| err(format!("bad event type {:?}", &record[1])))?;
        let kind =
            EventKind::from_code(code).ok_or_else(|| err(format!("unknown event type {code}")))?;
        let order_id: u64 = record[2]
            .parse()
            .map_err(|_| err(format!("bad order id {:?}", &record[2])))?;
        let size: i64 = record[3]
            .parse()
            .map_err(|_| err(format!("bad size {:?}", &record[3])))?;
        let price: i64 = record[4]
            .parse()
            .map_err(|_| err(format!("bad price {:?}", &record[4])))?;
        let dir: i64 = record[5]
            .parse()
            .map_err(|_| err(format!("bad direction {:?}", &record[5])))?;
        let direction = match dir {
            1 => Direction::Buy,
            -1 => Direction::Sell,
            other => return Err(err(format!("direction must be 1 or -1, found {other}"))),
        };
        // halt rows carry -1 / 0 / 1 in the price column as a status flag
        if kind != EventKind::TradingHalt && (size < 0 || price < 0) {
            return Err(err(format!("negative size or price ({size}, {price})")));
        }
        if time < self.last_time {
            let w = format!(
                "{}:{line}: time {time} earlier than previous {}",
                self.label, self.last_time
            );
            tracing::warn!("{w}");
            warnings.push(w);
        }
        self.last_time = self.last_time.max(time);
        Ok(MessageEvent {
            time,
            kind,
            order_id,
            size: size.max(0) as u64,
            price,
            direction,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<(Vec<MessageEvent>, ParseReport)> {
        read_messages(text.as_bytes(), "test.csv")
    }

    #[test]
    fn documented_row() {
        let (ev, rep) = parse("34200.189,1,11885113,21,2238100,1\n").unwrap();
        assert_eq!(rep.rows, 1);
        assert_eq!(
            ev[0],
            MessageEvent {
                time: 34200.189,
                kind: EventKind::Submission,
                order_id: 11885113,
                size: 21,
                price: 2238100,
                direction: Direction::Buy,
            }
        );
    }

    #[test]
    fn empty_file() {
        let (ev, rep) = parse("").unwrap();
        assert!(ev.is_empty());
        assert_eq!(rep.rows, 0);
    }

    #[test]
    fn short_row_names_line() {
        let text = "34200.189,1,11885113,21,2238100,1\n34200.2,3,11885113,21,2238100\n";
        match parse(text) {
            Err(Error::Parse { line, file, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(file, "test.csv");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_order_time_is_kept_with_warning() {
        let text = "10.0,1,1,5,100,1\n9.5,1,2,5,100,-1\n";
        let (ev, rep) = parse(text).unwrap();
        assert_eq!(ev.len(), 2);
        assert_eq!(rep.warnings.len(), 1);
        assert_eq!(ev[1].direction, Direction::Sell);
    }

    #[test]
    fn halt_rows_allow_flag_price() {
        let (ev, _) = parse("34300.0,7,0,0,-1,-1\n").unwrap();
        assert_eq!(ev[0].kind, EventKind::TradingHalt);
        assert_eq!(ev[0].price, -1);
        assert!(parse("34300.0,1,0,5,-1,-1\n").is_err());
    }

    #[test]
    fn bad_fields() {
        assert!(parse("x,1,1,1,1,1\n").is_err());
        assert!(parse("1.0,9,1,1,1,1\n").is_err());
        assert!(parse("1.0,1,1,1,1,0\n").is_err());
    }
}
