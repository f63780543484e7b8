//! Library behind the `dgp1` binary: report assembly, method dispatch, and
//! the benchmark harness. Kept as a library so integration suites can drive
//! the exact code paths the binary runs.

pub mod bench;
pub mod report;
pub mod solve;

use clap::ValueEnum;

/// Report schema identifier emitted by every run report.
pub const REPORT_SCHEMA: &str = "dgp1-report/1";

/// Solution path selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Depth-first enumeration of the realization tree.
    Bp,
    /// Streamed sign-matrix row scan.
    Mvm,
    /// Simulated optical processor.
    Optics,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Bp => "bp",
            Method::Mvm => "mvm",
            Method::Optics => "optics",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Output encoding for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parses an inclusive size range: either `a..b` or a single `n`.
pub fn parse_size_range(text: &str) -> Result<(usize, usize), String> {
    let parse_one = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid size `{s}` in range `{text}`"))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let lo = parse_one(lo)?;
        let hi = parse_one(hi.strip_prefix('=').unwrap_or(hi))?;
        if lo == 0 || hi < lo {
            return Err(format!("range `{text}` must satisfy 1 <= lo <= hi"));
        }
        Ok((lo, hi))
    } else {
        let n = parse_one(text)?;
        if n == 0 {
            return Err("size must be positive".into());
        }
        Ok((n, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_size_range("4..20"), Ok((4, 20)));
        assert_eq!(parse_size_range("4..=20"), Ok((4, 20)));
        assert_eq!(parse_size_range("7"), Ok((7, 7)));
        assert!(parse_size_range("20..4").is_err());
        assert!(parse_size_range("0..4").is_err());
        assert!(parse_size_range("x..4").is_err());
    }

    #[test]
    fn method_names() {
        assert_eq!(Method::Bp.to_string(), "bp");
        assert_eq!(Method::Mvm.to_string(), "mvm");
        assert_eq!(Method::Optics.to_string(), "optics");
    }
}
