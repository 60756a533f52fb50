#![no_main]

use frkan::data::csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|bytes: &[u8]| {
    let Ok(text) = std::str::from_utf8(bytes) else {
        return;
    };
    if let Ok(set) = csv::parse_csv(text, None) {
        let back = csv::parse_csv(&csv::to_csv(&set), Some(set.n_classes())).expect("round trip");
        assert_eq!(back.labels(), set.labels());
        assert_eq!(back.features(), set.features());
    }
});
