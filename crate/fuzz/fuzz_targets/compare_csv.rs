#![no_main]

use libfuzzer_sys::fuzz_target;
use vacfield_cli::compare::compare;
use vacfield_cli::table::Table;

fuzz_target!(|data: &[u8]| {
    let Ok(t) = Table::read_from(data) else { return };
    let text = t.to_csv_string();
    let back = Table::read_from(text.as_bytes()).expect("written tables read back");
    assert_eq!(back.to_csv_string(), text);
    if let Ok(d) = compare(&t, &t, None) {
        assert_eq!(d.table.rows.len(), t.rows.len());
        assert!(d.summaries.iter().all(|s| s.max_abs == 0.0 || s.max_abs.is_nan()));
    }
});
