#![no_main]

use ia_core::Network;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = Network::parse_matrix(text) {
        assert!(net.validate().is_empty());
        assert_eq!(Network::parse(&net.to_edge_list()).unwrap(), net);
    }
});
