#![no_main]

use ia_core::Network;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = Network::load(text) {
        assert!(net.validate().is_empty());
        let again = Network::load(&net.to_edge_list()).expect("canonical text reparses");
        assert_eq!(again.to_edge_list(), net.to_edge_list());
    }
});
