#![no_main]

use entwit::scenario::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let Ok(scenario) = Scenario::parse(text) else {
        return;
    };
    let canonical = scenario.to_text();
    let again = Scenario::parse(&canonical).expect("canonical text parses");
    assert_eq!(again, scenario);
    assert_eq!(again.to_text(), canonical);
});
