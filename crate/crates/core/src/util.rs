//! Small shared helpers: column fingerprints, a seeded RNG for generators
//! and tests, and float comparisons.

/// Integrality tolerance used across the master and the tree search.
pub const TOL_INT: f64 = 1e-6;

/// Feasibility tolerance (row and bound violations).
pub const TOL_FEAS: f64 = 1e-9;

/// Optimality tolerance (reduced costs, duality gaps).
pub const TOL_OPT: f64 = 1e-7;

/// FNV-1a over the rounded entries of a vector, prefixed with a tag.
///
/// Rounding to 1e-9 units makes fingerprints stable against float noise so
/// the column pool can deduplicate patterns and paths reliably.
pub fn fingerprint(tag: u64, values: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |byte: u8| {
        h ^= byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    };
    for b in tag.to_le_bytes() {
        eat(b);
    }
    for &v in values {
        let q = (v * 1e9).round() as i64;
        for b in q.to_le_bytes() {
            eat(b);
        }
    }
    h
}

/// Distance from the nearest integer.
pub fn frac_distance(v: f64) -> f64 {
    (v - v.round()).abs()
}

pub fn is_integral(v: f64, tol: f64) -> bool {
    frac_distance(v) <= tol
}

/// Log level selected through `COLGEN_LOG` (`off`, `info`, `debug`).
fn log_level() -> u8 {
    use std::sync::OnceLock;
    static LEVEL: OnceLock<u8> = OnceLock::new();
    *LEVEL.get_or_init(|| match std::env::var("COLGEN_LOG").as_deref() {
        Ok("debug") => 2,
        Ok("info") => 1,
        _ => 0,
    })
}

pub fn log_info(msg: impl FnOnce() -> String) {
    if log_level() >= 1 {
        eprintln!("[colgen] {}", msg());
    }
}

pub fn log_debug(msg: impl FnOnce() -> String) {
    if log_level() >= 2 {
        eprintln!("[colgen] {}", msg());
    }
}

/// Deterministic splitmix64 generator.
///
/// Used by the instance generators and the seeded property tests; a
/// hand-rolled generator keeps outputs byte-identical regardless of
/// dependency versions.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            state: seed.wrapping_add(0x9e3779b97f4a7c15),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, n).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform integer in [lo, hi] inclusive.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// Uniform float in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform float in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.unit() * (hi - lo)
    }
}
