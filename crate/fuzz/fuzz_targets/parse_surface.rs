#![no_main]

use extend_core::surface::parse_surface;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = parse_surface(text) {
        let back = parse_surface(&s.to_json().to_string()).expect("serialized surface parses");
        assert_eq!(back.vertices, s.vertices);
        assert_eq!(back.triangles, s.triangles);
    }
});
