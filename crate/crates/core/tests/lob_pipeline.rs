use std::fmt::Write as _;
use std::path::Path;

use lrm_core::cache;
use lrm_core::lob::{
    discover_days, flow_intensity, stitch_days, trim_day, DaySeries, DEFAULT_TRIM_EPSILON,
};
use lrm_core::TimeDomain;

/// Write a two-level LOBSTER day. Row `i` has bid volume `100 + v_i` and
/// ask volume `100 - v_i` on the first level, so the dis-balance is
/// `2 v_i / 300 = v_i / 150` (the second level adds 50 on each side).
fn write_day(dir: &Path, date: &str, rows: &[(f64, i64)], halt_at: Option<usize>) {
    let mut msg = String::new();
    let mut book = String::new();
    for (i, &(t, v)) in rows.iter().enumerate() {
        if halt_at == Some(i) {
            writeln!(msg, "{t},7,0,0,-1,-1").unwrap();
            writeln!(
                book,
                "9999999999,0,-9999999999,0,9999999999,0,-9999999999,0"
            )
            .unwrap();
        }
        writeln!(msg, "{t},1,{},{},1000000,1", 1000 + i, 10).unwrap();
        writeln!(
            book,
            "1000100,{},1000000,{},1000200,50,999900,50",
            100 - v,
            100 + v
        )
        .unwrap();
    }
    let stem = format!("{dir}/AAPL_{date}_34200000_57600000", dir = dir.display());
    std::fs::write(format!("{stem}_message_2.csv"), msg).unwrap();
    std::fs::write(format!("{stem}_orderbook_2.csv"), book).unwrap();
}

#[test]
fn two_days_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    // day 1: starts away from zero, repeated timestamp at 34201.0
    let day1 = [
        (34200.0, 60),
        (34200.5, 20),
        (34201.0, 8),
        (34201.0, 2),
        (34202.0, -30),
        (34203.0, 4),
        (34204.0, 80),
    ];
    let day2 = [(34200.0, 0), (34210.0, 50), (34220.0, -6), (34230.0, 90)];
    write_day(dir.path(), "2012-06-21", &day1, Some(3));
    write_day(dir.path(), "2012-06-22", &day2, None);
    std::fs::write(
        dir.path()
            .join("AAPL_2012-06-23_34200000_57600000_message_2.csv"),
        "",
    )
    .unwrap();

    let (days, orphans) = discover_days(dir.path(), "AAPL", 2).unwrap();
    assert_eq!(days.len(), 2);
    assert_eq!(orphans.len(), 1);
    assert_eq!(days[0].date, "2012-06-21");

    let d1 = DaySeries::load(&days[0]).unwrap();
    assert_eq!(d1.message_rows, 8);
    assert_eq!(d1.disbalance.len(), 7);
    let real = d1.real_time();
    assert_eq!(
        real.times,
        vec![34200.0, 34200.5, 34201.0, 34202.0, 34203.0, 34204.0]
    );
    // last value at the repeated timestamp wins
    assert_eq!(real.values[2], 2.0 / 150.0);
    let event = d1.event_time();
    assert_eq!(event.len(), 7);
    assert_eq!(event.domain, TimeDomain::EventTicks);
    assert_eq!(event.values[3], 2.0 / 150.0);

    // |x| <= 0.05 means |v| <= 7.5: first at 34201.0, last at 34203.0
    let t1 = trim_day(&real, DEFAULT_TRIM_EPSILON).unwrap();
    assert_eq!(t1.times, vec![34201.0, 34202.0, 34203.0]);
    let d2 = DaySeries::load(&days[1]).unwrap();
    let t2 = trim_day(&d2.real_time(), DEFAULT_TRIM_EPSILON).unwrap();
    assert_eq!(t2.times, vec![34200.0, 34210.0, 34220.0]);

    let stitched = stitch_days(&[t1.clone(), t2.clone()]);
    assert_eq!(stitched.len(), 6);
    assert_eq!(stitched.origin.day_starts, vec![0, 3]);
    assert_eq!(stitched.origin.dates, vec!["2012-06-21", "2012-06-22"]);
    assert!(stitched.times.windows(2).all(|w| w[0] < w[1]));
    // median of the positive gaps 1, 1, 10, 10
    let gap = stitched.times[3] - stitched.times[2];
    assert_eq!(gap, 5.5);

    let nu = flow_intensity(&d1.disbalance).unwrap();
    assert!((nu - 7.0 / (4.0 / 3600.0)).abs() < 1e-9);

    let path = dir.path().join("AAPL_real.lrm");
    cache::save(&path, &stitched).unwrap();
    let back = cache::load(&path).unwrap();
    assert_eq!(back.times, stitched.times);
    assert_eq!(back.values, stitched.values);
    assert_eq!(back.domain, stitched.domain);
}

#[test]
fn mismatched_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    write_day(dir.path(), "2012-06-21", &[(1.0, 1), (2.0, 2)], None);
    let book = dir
        .path()
        .join("AAPL_2012-06-21_34200000_57600000_orderbook_2.csv");
    let text = std::fs::read_to_string(&book).unwrap();
    std::fs::write(&book, text.lines().next().unwrap().to_string() + "\n").unwrap();
    let (days, _) = discover_days(dir.path(), "AAPL", 2).unwrap();
    assert!(DaySeries::load(&days[0]).is_err());
}

#[test]
fn day_never_near_zero() {
    let dir = tempfile::tempdir().unwrap();
    write_day(dir.path(), "2012-06-21", &[(1.0, 40), (2.0, 60)], None);
    let (days, _) = discover_days(dir.path(), "AAPL", 2).unwrap();
    let d = DaySeries::load(&days[0]).unwrap();
    assert!(trim_day(&d.real_time(), DEFAULT_TRIM_EPSILON).is_err());
}
