use std::fmt;
use std::str::FromStr;

/// Relay-selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    /// Best composite channel `h·d^(−α)` toward the source.
    Bcc,
    /// Best hop-1 SIR toward the source.
    Bsir,
    /// Best hop-2 SIR toward the destination among relays that decoded.
    Bstd,
    /// Uniformly random relay. Not one of the analysed schemes; a reference
    /// point only, flagged as such in every output.
    RandomBaseline,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [Self::Bcc, Self::Bsir, Self::Bstd, Self::RandomBaseline];
    pub const ANALYSED: [SchemeId; 3] = [Self::Bcc, Self::Bsir, Self::Bstd];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Bcc => "bcc",
            Self::Bsir => "bsir",
            Self::Bstd => "bstd",
            Self::RandomBaseline => "random_baseline",
        }
    }

    /// False for the random baseline, which has no analytical counterpart.
    pub fn is_analysed(&self) -> bool {
        !matches!(self, Self::RandomBaseline)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bcc" | "bccts" => Ok(Self::Bcc),
            "bsir" | "bsirts" | "bsts" => Ok(Self::Bsir),
            "bstd" => Ok(Self::Bstd),
            "random_baseline" | "random" | "nrs" => Ok(Self::RandomBaseline),
            other => Err(format!(
                "unknown scheme `{other}` (expected bcc, bsir, bstd or random_baseline)"
            )),
        }
    }
}
