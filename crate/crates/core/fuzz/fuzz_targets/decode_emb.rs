#![no_main]

use frkan::data::emb;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|bytes: &[u8]| {
    if let Ok(set) = emb::decode(bytes) {
        let again = emb::encode(&set).expect("decoded sets re-encode");
        assert_eq!(again.as_slice(), bytes);
    }
});
