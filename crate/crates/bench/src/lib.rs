//! Expressions shared by the criterion benches.

pub use dicenote::perf::NDN_LADDER;

/// One representative expression per feature family.
pub const FEATURES: &[(&str, &str)] = &[
    ("basic", "3d6+2"),
    ("fate", "4df"),
    ("math", "(d6;d6;d6)*2-(d4;d4)/2"),
    ("keep_drop", "4d6dl"),
    ("explode", "10d6!"),
    ("penetrate", "10d6!p"),
    ("reroll", "10d6rr<3"),
    ("filter_count", "10d10f>6c"),
    ("unique", "10d10uc"),
    ("macro", "#STAT = 4d6dl;@STAT;@STAT;@STAT;@STAT;@STAT;@STAT"),
    ("faces", "5d{1,2,3..8,9,10,100}kh2"),
];
