//! Annual new passenger-car registrations, the demand backbone every
//! trajectory is expressed against.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

const REFERENCE_CSV: &str = include_str!("../data/reference_registrations.csv");

pub const REFERENCE_FIRST_YEAR: i32 = 2015;
pub const REFERENCE_LAST_YEAR: i32 = 2050;

/// Contiguous yearly registration counts. All counts are strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct RegistrationSeries {
    first_year: i32,
    counts: Vec<f64>,
}

impl RegistrationSeries {
    pub fn new(first_year: i32, counts: Vec<f64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Domain("registration series is empty".into()));
        }
        for (offset, &count) in counts.iter().enumerate() {
            if !(count.is_finite() && count > 0.0) {
                return Err(Error::NonPositiveCount {
                    year: first_year + offset as i32,
                    count,
                });
            }
        }
        Ok(Self { first_year, counts })
    }

    /// Builds a series from `(year, count)` pairs, rejecting duplicates and gaps.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i32, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (year, count) in pairs {
            if map.insert(year, count).is_some() {
                return Err(Error::DuplicateYear { year });
            }
        }
        let (&first, &last) = match (map.keys().next(), map.keys().next_back()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::Domain("registration series is empty".into())),
        };
        let missing: Vec<i32> = (first..=last).filter(|y| !map.contains_key(y)).collect();
        if !missing.is_empty() {
            return Err(Error::Gap { missing });
        }
        Self::new(first, map.into_values().collect())
    }

    /// The bundled EU27+UK reference series, 2015–2050.
    pub fn reference() -> Self {
        Self::from_csv_reader(REFERENCE_CSV.as_bytes()).expect("bundled reference series is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    /// Parses a two-column `year,new_registrations` CSV with a mandatory header.
    /// Lines starting with `#` are ignored.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);

        let headers = rdr.headers().map_err(|e| parse_error(&e, 1))?.clone();
        let names: Vec<&str> = headers.iter().collect();
        if names != ["year", "new_registrations"] {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header 'year,new_registrations', found '{}'", names.join(",")),
            });
        }

        let mut pairs = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| parse_error(&e, 0))?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let year: i32 = record[0].parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid year '{}'", &record[0]),
            })?;
            let count: f64 = record[1].parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid registration count '{}'", &record[1]),
            })?;
            if !(count.is_finite() && count > 0.0) {
                return Err(Error::NonPositiveCount { year, count });
            }
            pairs.push((year, count));
        }
        Self::from_pairs(pairs)
    }

    pub fn first_year(&self) -> i32 {
        self.first_year
    }

    pub fn last_year(&self) -> i32 {
        self.first_year + self.counts.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn covers(&self, year: i32) -> bool {
        year >= self.first_year && year <= self.last_year()
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        if self.covers(year) {
            Some(self.counts[(year - self.first_year) as usize])
        } else {
            None
        }
    }

    /// Like [`get`](Self::get) but a missing year is a coverage error.
    pub fn require(&self, year: i32) -> Result<f64> {
        self.get(year).ok_or(Error::MissingYear { year })
    }

    /// Errors on the first year of `[first, last]` the series does not cover.
    pub fn require_span(&self, first: i32, last: i32) -> Result<()> {
        match (first..=last).find(|&y| !self.covers(y)) {
            Some(year) => Err(Error::MissingYear { year }),
            None => Ok(()),
        }
    }

    /// Sum of registrations over the inclusive span.
    pub fn period_sum(&self, first: i32, last: i32) -> Result<f64> {
        self.require_span(first, last)?;
        Ok((first..=last)
            .map(|y| self.counts[(y - self.first_year) as usize])
            .sum())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.first_year + i as i32, c))
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.first_year, self.counts.iter().map(|c| c * factor).collect())
    }

    /// Canonical CSV text, used for hashing and for writing the series out.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("year,new_registrations\n");
        for (year, count) in self.iter() {
            out.push_str(&format!("{year},{count}\n"));
        }
        out
    }
}

fn parse_error(err: &csv::Error, fallback_line: u64) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(fallback_line);
    Error::Parse {
        line,
        message: err.to_string(),
    }
}
