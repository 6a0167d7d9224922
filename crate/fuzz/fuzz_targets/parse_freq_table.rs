#![no_main]

use ia_core::search::FrequencyTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = FrequencyTable::parse(text) {
        assert_eq!(FrequencyTable::parse(&table.to_text()).unwrap(), table);
    }
});
