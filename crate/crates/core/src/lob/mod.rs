//! LOBSTER ingestion: message/orderbook parsing, book snapshots, and the
//! order dis-balance and mid-price series built from them.
//!
//! A LOBSTER day is a pair of headerless CSV files,
//! `<SYMBOL>_<DATE>_<start>_<end>_message_<K>.csv` and
//! `<SYMBOL>_<DATE>_<start>_<end>_orderbook_<K>.csv`, whose rows are aligned:
//! orderbook row `i` is the book state right after message `i`.

mod build;
mod files;
mod message;
mod orderbook;

pub use build::{
    build_disbalance_series, build_event_series, compute_disbalance, dedup_last_per_time,
    disbalance_points, flow_intensity, midprice_points, midprice_return_series, stitch_days,
    trim_day, DaySeries, DEFAULT_TRIM_EPSILON,
};
pub use files::{discover_days, LobsterDay};
pub use message::{
    parse_message_file, read_messages, Direction, EventKind, MessageEvent, ParseReport,
};
pub use orderbook::{
    attach_times, parse_orderbook_file, read_orderbook, DepthRow, Level, EMPTY_ASK_PRICE,
    EMPTY_BID_PRICE,
};
