//! Resource caps shared by the exhaustive and sampling routines.

/// Environment variable overriding [`Limits::enumeration_cap`].
pub const ENUM_CAP_ENV: &str = "GGL_ENUM_CAP";

pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;
pub const DEFAULT_RELATOR_CAP: u64 = 1_000_000;
pub const DEFAULT_GRAPH_CATALOG_CAP: u64 = 2_000_000;
pub const DEFAULT_WHITEHEAD_MAX_RANK: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of words (or tuples) an exact enumeration may visit.
    pub enumeration_cap: u64,
    /// Maximum number of relators a sampled presentation may hold.
    pub relator_cap: u64,
    /// Maximum number of graphs in an exact readability catalog.
    pub graph_catalog_cap: u64,
    /// Largest rank for which Whitehead automorphisms are enumerated.
    pub whitehead_max_rank: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            relator_cap: DEFAULT_RELATOR_CAP,
            graph_catalog_cap: DEFAULT_GRAPH_CATALOG_CAP,
            whitehead_max_rank: DEFAULT_WHITEHEAD_MAX_RANK,
        }
    }
}

impl Limits {
    /// Defaults, with the enumeration cap taken from `GGL_ENUM_CAP` when set.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(cap) = std::env::var(ENUM_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            limits.enumeration_cap = cap;
        }
        limits
    }

    pub fn with_enumeration_cap(mut self, cap: u64) -> Self {
        self.enumeration_cap = cap;
        self
    }

    pub fn with_relator_cap(mut self, cap: u64) -> Self {
        self.relator_cap = cap;
        self
    }
}
