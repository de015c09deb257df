#![no_main]

use entwit::detection::Slot;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|label: &str| {
    if let Ok(slot) = label.parse::<Slot>() {
        let printed = slot.to_string();
        assert_eq!(printed.parse::<Slot>().expect("printed label parses"), slot);
    }
});
