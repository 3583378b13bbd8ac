//! Validated points of R^n: finite coordinates, fixed dimension.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::Error;
use crate::linalg;

#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Point, Error> {
        if coords.is_empty() {
            return Err(Error::bad_param("point", "zero-dimensional point"));
        }
        if !linalg::all_finite(&coords) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Point {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![1.0, -2.0]).is_ok());
    }
}
