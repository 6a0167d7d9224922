#![no_main]

use ia_core::search::IntervalAssignment;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = IntervalAssignment::parse(text) {
        let again = IntervalAssignment::parse(&a.to_text()).expect("canonical text reparses");
        assert_eq!(again.to_text(), a.to_text());
    }
});
