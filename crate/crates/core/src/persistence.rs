//! Persistent homology over Z2 in dimensions 0 and 1, computed by the
//! standard left-to-right column reduction of the boundary matrix in the
//! filtration's total order.
//!
//! Columns are sorted index lists and addition is symmetric difference, so
//! the algebra is exact; filtration values are carried alongside and never
//! enter the arithmetic. A class alive at the final filtration value gets an
//! infinite death. Pairs with equal birth and death values are dropped at
//! emission (they are invisible in a barcode plot and would contribute
//! zero-length terms to the statistics).

use crate::filtration::Filtration;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PersistenceError {
    #[error("filtration violates face order at index {index}: a face of the simplex does not appear earlier")]
    FaceOrderViolation { index: usize },
    #[error("filtration values decrease at index {index}")]
    UnsortedValues { index: usize },
    #[error("duplicate simplex at index {index}")]
    DuplicateSimplex { index: usize },
    #[error("bar has birth {birth} not strictly below death {death}")]
    InvalidBar { birth: f64, death: f64 },
    #[error("bar in dimension-{expected} barcode does not match")]
    DimensionMismatch { expected: usize },
}

/// A half-open persistence interval `[birth, death)`. `death` is
/// `f64::INFINITY` for a class that never dies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(birth: f64, death: f64) -> Result<Self, PersistenceError> {
        if !(birth >= 0.0 && birth < death) || birth.is_nan() || death.is_nan() {
            return Err(PersistenceError::InvalidBar { birth, death });
        }
        Ok(Self { birth, death })
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    /// `death - birth`; infinite for immortal classes.
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }
}

/// All bars of one homological dimension.
#[derive(Debug, Clone)]
pub struct Barcode {
    dimension: usize,
    bars: Vec<Bar>,
}

impl Barcode {
    pub fn new(dimension: usize, bars: Vec<Bar>) -> Self {
        Self { dimension, bars }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn infinite_count(&self) -> usize {
        self.bars.iter().filter(|b| b.is_infinite()).count()
    }

    pub fn finite_lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.bars
            .iter()
            .filter(|b| !b.is_infinite())
            .map(Bar::length)
    }

    /// Number of bars `[b, d)` with `b <= value < d`.
    pub fn bars_containing(&self, value: f64) -> usize {
        self.bars
            .iter()
            .filter(|b| b.birth <= value && value < b.death)
            .count()
    }
}

/// Barcodes in dimensions 0 and 1, plus how many zero-length pairs were
/// discarded per dimension.
#[derive(Debug, Clone)]
pub struct Barcodes {
    pub dim0: Barcode,
    pub dim1: Barcode,
    pub zero_length_dropped: [usize; 2],
}

/// Symmetric difference of two sorted index lists (Z2 column addition).
fn add_columns(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Computes the dimension-0 and dimension-1 barcodes of a filtration.
///
/// The filtration must list every face before its cofaces with
/// non-decreasing values; the index of the first violation is reported
/// otherwise.
pub fn compute_persistence(filtration: &Filtration) -> Result<Barcodes, PersistenceError> {
    let entries = filtration.entries();
    let n = entries.len();

    let mut index_of = HashMap::with_capacity(n);
    for (idx, e) in entries.iter().enumerate() {
        if idx > 0 && entries[idx - 1].value > e.value {
            return Err(PersistenceError::UnsortedValues { index: idx });
        }
        if index_of.insert(e.simplex, idx).is_some() {
            return Err(PersistenceError::DuplicateSimplex { index: idx });
        }
    }

    // Reduce columns in filtration order. `pivot_owner[i]` is the reduced
    // column whose lowest 1 sits in row i.
    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];
    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(n);
    // pairs[i] = Some(j) when the class created by simplex i dies at j.
    let mut death_of: Vec<Option<usize>> = vec![None; n];
    let mut creates_class: Vec<bool> = vec![false; n];

    for (j, e) in entries.iter().enumerate() {
        let mut col: Vec<usize> = Vec::with_capacity(3);
        for facet in e.simplex.facets() {
            match index_of.get(&facet) {
                Some(&fi) if fi < j => col.push(fi),
                _ => return Err(PersistenceError::FaceOrderViolation { index: j }),
            }
        }
        col.sort_unstable();
        loop {
            match col.last() {
                None => {
                    creates_class[j] = true;
                    break;
                }
                Some(&low) => match pivot_owner[low] {
                    Some(k) => col = add_columns(&col, &reduced[k]),
                    None => {
                        pivot_owner[low] = Some(j);
                        death_of[low] = Some(j);
                        break;
                    }
                },
            }
        }
        reduced.push(col);
    }

    let mut bars: [Vec<Bar>; 2] = [Vec::new(), Vec::new()];
    let mut dropped = [0usize; 2];
    for (i, e) in entries.iter().enumerate() {
        if !creates_class[i] {
            continue;
        }
        let dim = e.simplex.dim();
        if dim > 1 {
            continue;
        }
        let birth = e.value;
        let death = match death_of[i] {
            Some(j) => entries[j].value,
            None => f64::INFINITY,
        };
        if birth < death {
            bars[dim].push(Bar { birth, death });
        } else {
            dropped[dim] += 1;
        }
    }

    Ok(Barcodes {
        dim0: Barcode::new(0, std::mem::take(&mut bars[0])),
        dim1: Barcode::new(1, std::mem::take(&mut bars[1])),
        zero_length_dropped: dropped,
    })
}
