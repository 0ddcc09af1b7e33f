//! Scenarios shipped with the binary.

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        pub const SCENARIOS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../scenarios/", $name, ".json")))),*
        ];
    };
}

bundled!(
    "fig2a",
    "fig2b_low",
    "fig2b_high",
    "fig3",
    "fig4a",
    "fig4b",
    "fig5",
    "fig7_grid",
    "coherence_optical",
    "coherence_radio",
    "transfer_500km",
    "protocol_desk",
);

pub fn get(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SCENARIOS.iter().map(|(n, _)| *n)
}
