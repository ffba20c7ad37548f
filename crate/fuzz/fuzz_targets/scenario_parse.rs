#![no_main]

use libfuzzer_sys::fuzz_target;
use vacfield_cli::{CliError, Scenario};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match Scenario::from_json(text) {
        Ok(sc) => {
            let again = Scenario::from_json(&sc.to_json()).expect("a valid scenario reparses");
            assert_eq!(again, sc);
        }
        Err(e) => assert!(matches!(e, CliError::Schema(_))),
    }
});
