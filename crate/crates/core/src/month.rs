use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A calendar month. Ordering is `(year, month)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthIndex {
    year: i32,
    month: u8,
}

impl MonthIndex {
    pub fn new(year: i32, month: u8) -> Result<Self, Error> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidSeries(format!(
                "month {month} outside 1..=12"
            )));
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    /// Zero-based calendar slot, January = 0.
    pub fn slot(self) -> usize {
        (self.month - 1) as usize
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_ordinal(n: i64) -> Self {
        Self {
            year: n.div_euclid(12) as i32,
            month: (n.rem_euclid(12) + 1) as u8,
        }
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    pub fn offset(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(self, other: MonthIndex) -> i64 {
        other.ordinal() - self.ordinal()
    }
}

impl fmt::Display for MonthIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidSeries(format!("month {s:?} is not YYYY-MM"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year = y.parse().map_err(|_| bad())?;
        let month = m.parse().map_err(|_| bad())?;
        Self::new(year, month)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn december_wraps_to_january() {
        let d = MonthIndex::new(2019, 12).unwrap();
        assert_eq!(d.succ(), MonthIndex::new(2020, 1).unwrap());
        assert_eq!(d.offset(-12), MonthIndex::new(2018, 12).unwrap());
    }

    #[test]
    fn jan_2018_plus_84_is_jan_2025() {
        let start: MonthIndex = "2018-01".parse().unwrap();
        assert_eq!(start.offset(84).to_string(), "2025-01");
        assert_eq!(start.months_until("2025-01".parse().unwrap()), 84);
    }

    #[test]
    fn rejects_malformed() {
        for s in ["2018-13", "2018-00", "18-01", "2018/01", "2018-1", ""] {
            assert!(s.parse::<MonthIndex>().is_err(), "{s}");
        }
    }

    #[test]
    fn ordering_is_chronological() {
        let a: MonthIndex = "2019-12".parse().unwrap();
        let b: MonthIndex = "2020-01".parse().unwrap();
        assert!(a < b);
    }
}
