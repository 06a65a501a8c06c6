use std::path::{Path, PathBuf};

use crate::{Error, Result};

/// Message/orderbook file pair for one symbol and trading day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LobsterDay {
    pub symbol: String,
    pub date: String,
    pub levels: usize,
    pub message_path: PathBuf,
    pub orderbook_path: PathBuf,
}

/// Find the complete file pairs for `symbol` with `levels` levels in `dir`,
/// sorted by date. Message files without a companion orderbook file are
/// returned in the second list.
pub fn discover_days(
    dir: &Path,
    symbol: &str,
    levels: usize,
) -> Result<(Vec<LobsterDay>, Vec<PathBuf>)> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let suffix = format!("_message_{levels}.csv");
    let prefix = format!("{symbol}_");
    let mut days = Vec::new();
    let mut orphans = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(stem) = name.strip_suffix(&suffix) else {
            continue;
        };
        let Some(rest) = stem.strip_prefix(&prefix) else {
            continue;
        };
        // rest = <DATE>_<start>_<end>
        let date = rest.split('_').next().unwrap_or_default().to_string();
        let ob_name = format!("{stem}_orderbook_{levels}.csv");
        let ob_path = dir.join(ob_name);
        if ob_path.is_file() {
            days.push(LobsterDay {
                symbol: symbol.to_string(),
                date,
                levels,
                message_path: entry.path(),
                orderbook_path: ob_path,
            });
        } else {
            orphans.push(entry.path());
        }
    }
    days.sort_by(|a, b| {
        a.date
            .cmp(&b.date)
            .then(a.message_path.cmp(&b.message_path))
    });
    orphans.sort();
    Ok((days, orphans))
}
