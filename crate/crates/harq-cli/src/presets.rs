//! Plot presets bundled into the binary.

pub const PRESETS: [(&str, &str); 10] = [
    ("outage-relay-gain", include_str!("../presets/outage-relay-gain.cfg")),
    ("outage-by-rate", include_str!("../presets/outage-by-rate.cfg")),
    ("transmissions", include_str!("../presets/transmissions.cfg")),
    ("rate-vs-snr", include_str!("../presets/rate-vs-snr.cfg")),
    ("rate-vs-rounds", include_str!("../presets/rate-vs-rounds.cfg")),
    ("efficiency-vs-rate", include_str!("../presets/efficiency-vs-rate.cfg")),
    ("efficiency-vs-snr", include_str!("../presets/efficiency-vs-snr.cfg")),
    ("waiting-vs-snr", include_str!("../presets/waiting-vs-snr.cfg")),
    ("waiting-vs-load", include_str!("../presets/waiting-vs-load.cfg")),
    ("sojourn-vs-snr", include_str!("../presets/sojourn-vs-snr.cfg")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// First comment line of a preset, used as its description.
pub fn describe(text: &str) -> &str {
    text.lines().next().and_then(|l| l.strip_prefix('#')).map(str::trim).unwrap_or("")
}
