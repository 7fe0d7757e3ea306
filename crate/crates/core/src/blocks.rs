//! Block extrema and seasonal statistics on a 365-day no-leap calendar.
//!
//! Calendar conventions (1-based day of year): Jul 1 = day 182, JJA = days
//! 152-243, DJF = days 335-365 of one year joined with days 1-59 of the next.
//! Maxima blocks follow calendar years; minima blocks run Jul 1 through
//! Jun 30 so a single cold season is never split across blocks.

use crate::error::{Error, Result};
use crate::gev::Orientation;
use crate::num::Real;

pub const DAYS_PER_YEAR: usize = 365;
/// 1-based day of year of July 1 on the no-leap calendar.
pub const JUL_1: u32 = 182;
pub const JJA_FIRST: u32 = 152;
pub const JJA_LAST: u32 = 243;
pub const DJF_FIRST: u32 = 335;
pub const DJF_LAST: u32 = 59;

/// Which daily variable a series carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    Tmax,
    Tmin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Season {
    Jja,
    Djf,
}

/// True when the 1-based day of year falls inside the season window.
pub fn in_season(day_of_year: u32, season: Season) -> bool {
    match season {
        Season::Jja => (JJA_FIRST..=JJA_LAST).contains(&day_of_year),
        Season::Djf => day_of_year >= DJF_FIRST || day_of_year <= DJF_LAST,
    }
}

/// Daily values for one grid cell, a whole number of 365-day years.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries<T> {
    pub cell_id: String,
    pub latitude: f64,
    pub longitude: f64,
    pub start_year: i32,
    pub variable: Variable,
    pub values: Vec<T>,
}

impl<T: Real> DailySeries<T> {
    pub fn new(
        cell_id: impl Into<String>,
        latitude: f64,
        longitude: f64,
        start_year: i32,
        variable: Variable,
        values: Vec<T>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if values.len() % DAYS_PER_YEAR != 0 {
            return Err(Error::RaggedSeries(values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { cell_id: cell_id.into(), latitude, longitude, start_year, variable, values })
    }

    pub fn n_years(&self) -> usize {
        self.values.len() / DAYS_PER_YEAR
    }

    /// All days of calendar year `year_index` (0-based from the series start).
    pub fn year(&self, year_index: usize) -> &[T] {
        &self.values[year_index * DAYS_PER_YEAR..(year_index + 1) * DAYS_PER_YEAR]
    }

    /// Copy of `n_years` consecutive years starting at `first_year_index`.
    pub fn slice_years(&self, first_year_index: usize, n_years: usize) -> Result<Self> {
        let end = first_year_index
            .checked_add(n_years)
            .filter(|&e| e <= self.n_years())
            .ok_or(Error::SeriesTooShort { need: first_year_index + n_years, got: self.n_years() })?;
        Ok(Self {
            cell_id: self.cell_id.clone(),
            latitude: self.latitude,
            longitude: self.longitude,
            start_year: self.start_year + first_year_index as i32,
            variable: self.variable,
            values: self.values[first_year_index * DAYS_PER_YEAR..end * DAYS_PER_YEAR].to_vec(),
        })
    }
}

/// Block extrema with the block length in years.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockExtremes<T> {
    pub orientation: Orientation,
    pub block_length_b: u32,
    pub values: Vec<T>,
}

impl<T: Real> BlockExtremes<T> {
    pub fn n_blocks(&self) -> usize {
        self.values.len()
    }

    /// New extrema made of `values[i]` for each index in `idx` (resampling).
    pub fn take(&self, idx: &[usize]) -> Self {
        Self {
            orientation: self.orientation,
            block_length_b: self.block_length_b,
            values: idx.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Pooled seasonal mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeasonalStats<T> {
    pub season: Season,
    pub mean_m: T,
    pub sd_s: T,
}

/// One maximum per calendar year (days 1-365).
pub fn annual_maxima<T: Real>(series: &DailySeries<T>) -> Result<BlockExtremes<T>> {
    let values = (0..series.n_years())
        .map(|y| fold_extreme(series.year(y), Orientation::Maxima))
        .collect();
    Ok(BlockExtremes { orientation: Orientation::Maxima, block_length_b: 1, values })
}

/// One minimum per Jul 1 .. Jun 30 block. The leading and trailing half
/// years are dropped, so an n-year series yields n - 1 minima.
pub fn annual_minima<T: Real>(series: &DailySeries<T>) -> Result<BlockExtremes<T>> {
    let n = series.n_years();
    if n < 2 {
        return Err(Error::SeriesTooShort { need: 2, got: n });
    }
    let offset = (JUL_1 - 1) as usize; // 0-based index of Jul 1 within a year
    let values = (0..n - 1)
        .map(|y| {
            let start = y * DAYS_PER_YEAR + offset;
            fold_extreme(&series.values[start..start + DAYS_PER_YEAR], Orientation::Minima)
        })
        .collect();
    Ok(BlockExtremes { orientation: Orientation::Minima, block_length_b: 1, values })
}

/// Consecutive non-overlapping groups of `group` blocks reduced to their
/// extreme; a trailing remainder is dropped. Block length multiplies.
pub fn multi_year_extremes<T: Real>(
    extremes: &BlockExtremes<T>,
    group: u32,
) -> Result<BlockExtremes<T>> {
    let g = group as usize;
    if g == 0 || g > extremes.values.len() {
        return Err(Error::BlockTooLong { b: g, n: extremes.values.len() });
    }
    let values = extremes
        .values
        .chunks_exact(g)
        .map(|chunk| fold_extreme(chunk, extremes.orientation))
        .collect();
    Ok(BlockExtremes {
        orientation: extremes.orientation,
        block_length_b: extremes.block_length_b * group,
        values,
    })
}

/// Pooled mean and SD (denominator n - 1) of all daily values inside the
/// season across the whole series. Only complete seasons count: JJA is
/// complete within each year; a complete winter joins December of year y
/// with January-February of year y + 1, so the first Jan-Feb and the last
/// December are excluded.
pub fn seasonal_stats<T: Real>(series: &DailySeries<T>, season: Season) -> Result<SeasonalStats<T>> {
    let n = series.n_years();
    let mut pool = Vec::new();
    match season {
        Season::Jja => {
            for y in 0..n {
                let year = series.year(y);
                pool.extend_from_slice(&year[(JJA_FIRST - 1) as usize..JJA_LAST as usize]);
            }
        }
        Season::Djf => {
            if n < 2 {
                return Err(Error::SeriesTooShort { need: 2, got: n });
            }
            for w in 0..n - 1 {
                let dec = series.year(w);
                pool.extend_from_slice(&dec[(DJF_FIRST - 1) as usize..DAYS_PER_YEAR]);
                let janfeb = series.year(w + 1);
                pool.extend_from_slice(&janfeb[..DJF_LAST as usize]);
            }
        }
    }
    let (mean_m, sd_s) = crate::math::mean_sd(&pool);
    Ok(SeasonalStats { season, mean_m, sd_s })
}

fn fold_extreme<T: Real>(slice: &[T], orientation: Orientation) -> T {
    let first = slice[0];
    match orientation {
        Orientation::Maxima => slice.iter().copied().fold(first, T::max),
        Orientation::Minima => slice.iter().copied().fold(first, T::min),
    }
}
