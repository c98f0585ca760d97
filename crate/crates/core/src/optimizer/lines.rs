//! Separation lines and their linear-time ordering.
//!
//! As the assumed direction of the optimal channel rotates around the circle,
//! an element's best choice only changes when the direction crosses one of
//! that element's separation lines. Each element contributes `L` lines
//! (`L = K` or `K + 1`); the line offsets relative to `∠v_n` depend only on
//! the phase set, so every element has the same column layout.

use std::cell::Cell;
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::channel::{realize_g, ChannelRealization, ElementChoice, PhaseShiftSet};
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, ComplexVec, ANGLE_EPS};

/// A direction at which one element's optimal choice changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationLine {
    /// Argument of the line, in `[0, 2π)`.
    pub argument: f64,
    /// Row of the owning element in the matrix this line came from.
    pub element: usize,
    /// Column of the line within its element's row.
    pub column: usize,
    /// Element choice just before the line (counterclockwise).
    pub starting: ElementChoice,
    /// Element choice just after the line.
    pub ending: ElementChoice,
    /// Phase gap of the region between the two candidates this line splits.
    pub gap: f64,
}

impl SeparationLine {
    /// True when the line borders the OFF sector of a gap wider than π.
    pub fn borders_off(&self) -> bool {
        self.starting == ElementChoice::Off || self.ending == ElementChoice::Off
    }
}

#[derive(Debug, Clone, Copy)]
struct LineTemplate {
    offset: f64,
    starting: ElementChoice,
    ending: ElementChoice,
    gap: f64,
}

fn templates(set: &PhaseShiftSet) -> Vec<LineTemplate> {
    let k = set.len();
    let mut out = Vec::with_capacity(k + 1);
    for i in 0..k {
        let next = (i + 1) % k;
        let gap = set.gap(i);
        let lo = set.phase(i);
        let on_i = ElementChoice::On(i);
        let on_next = ElementChoice::On(next);
        if (gap - PI).abs() <= ANGLE_EPS {
            // zero-width OFF sector collapses into a single line
            out.push(LineTemplate {
                offset: wrap_angle(lo + FRAC_PI_2),
                starting: on_i,
                ending: on_next,
                gap,
            });
        } else if gap < PI {
            out.push(LineTemplate {
                offset: wrap_angle(lo + gap / 2.0),
                starting: on_i,
                ending: on_next,
                gap,
            });
        } else {
            out.push(LineTemplate {
                offset: wrap_angle(lo + FRAC_PI_2),
                starting: on_i,
                ending: ElementChoice::Off,
                gap,
            });
            out.push(LineTemplate {
                offset: wrap_angle(lo + gap - FRAC_PI_2),
                starting: ElementChoice::Off,
                ending: on_next,
                gap,
            });
        }
    }
    out
}

/// `N × L` matrix of separation lines, row-major, rows in the element order
/// of the realization it was built from.
#[derive(Debug, Clone)]
pub struct SeparationMatrix {
    lines: Vec<SeparationLine>,
    element_args: Vec<f64>,
    cols: usize,
}

impl SeparationMatrix {
    pub fn rows(&self) -> usize {
        self.element_args.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, n: usize) -> &[SeparationLine] {
        &self.lines[n * self.cols..(n + 1) * self.cols]
    }

    pub fn get(&self, n: usize, l: usize) -> &SeparationLine {
        &self.lines[n * self.cols + l]
    }

    pub fn lines(&self) -> &[SeparationLine] {
        &self.lines
    }

    /// `∠v_n` of each row.
    pub fn element_args(&self) -> &[f64] {
        &self.element_args
    }
}

/// Builds every element's separation lines.
pub fn separation_lines(real: &ChannelRealization, set: &PhaseShiftSet) -> SeparationMatrix {
    let tpl = templates(set);
    let cols = tpl.len();
    let element_args: Vec<f64> = real
        .elements()
        .iter()
        .map(|v| v.arg_mod_2pi().expect("realization elements are nonzero"))
        .collect();
    let mut lines = Vec::with_capacity(element_args.len() * cols);
    for (n, &arg) in element_args.iter().enumerate() {
        for (l, t) in tpl.iter().enumerate() {
            lines.push(SeparationLine {
                argument: wrap_angle(arg + t.offset),
                element: n,
                column: l,
                starting: t.starting,
                ending: t.ending,
                gap: t.gap,
            });
        }
    }
    SeparationMatrix {
        lines,
        element_args,
        cols,
    }
}

/// Comparison counters for [`sort_separation_lines`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SortStats {
    /// Comparisons spent locating each column's break point.
    pub rotation_comparisons: u64,
    /// Comparisons performed inside the min-heap during the merge.
    pub heap_comparisons: u64,
}

fn line_order(a: &SeparationLine, b: &SeparationLine) -> Ordering {
    a.argument
        .total_cmp(&b.argument)
        .then(a.element.cmp(&b.element))
        .then(a.column.cmp(&b.column))
}

struct HeapEntry<'a> {
    line: SeparationLine,
    col: usize,
    counter: &'a Cell<u64>,
}

impl PartialEq for HeapEntry<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry<'_> {}

impl PartialOrd for HeapEntry<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.counter.set(self.counter.get() + 1);
        line_order(&self.line, &other.line)
    }
}

/// Sorts all lines by argument in `O(N·L·log L)`.
///
/// Rows must be ordered by non-decreasing `∠v_n`. Each column is then a
/// cyclic rotation of a sorted sequence with a single break point, so it is
/// sorted by one rotation; the `L` sorted columns are merged with a min-heap.
/// Equal arguments come out ordered by (row, column).
pub fn sort_separation_lines(
    matrix: &SeparationMatrix,
) -> Result<(Vec<SeparationLine>, SortStats)> {
    let args = matrix.element_args();
    if let Some(i) = args.windows(2).position(|w| w[0] > w[1]) {
        return Err(Error::UnsortedRows { row: i + 1 });
    }
    let n = matrix.rows();
    let cols = matrix.cols();
    let mut stats = SortStats::default();
    if n == 0 {
        return Ok((Vec::new(), stats));
    }

    let mut sorted_cols: Vec<Vec<SeparationLine>> = Vec::with_capacity(cols);
    for l in 0..cols {
        let mut start = 0;
        for r in 0..n - 1 {
            stats.rotation_comparisons += 1;
            if matrix.get(r, l).argument > matrix.get(r + 1, l).argument {
                start = r + 1;
                break;
            }
        }
        let col: Vec<SeparationLine> = (0..n).map(|i| *matrix.get((start + i) % n, l)).collect();
        debug_assert!(col
            .windows(2)
            .all(|w| line_order(&w[0], &w[1]) != Ordering::Greater));
        sorted_cols.push(col);
    }

    let counter = Cell::new(0u64);
    let mut heads = vec![0usize; cols];
    let mut heap = BinaryHeap::with_capacity(cols);
    for (l, col) in sorted_cols.iter().enumerate() {
        heap.push(Reverse(HeapEntry {
            line: col[0],
            col: l,
            counter: &counter,
        }));
    }
    let mut out = Vec::with_capacity(n * cols);
    while let Some(Reverse(entry)) = heap.pop() {
        out.push(entry.line);
        let l = entry.col;
        heads[l] += 1;
        if let Some(&next) = sorted_cols[l].get(heads[l]) {
            heap.push(Reverse(HeapEntry {
                line: next,
                col: l,
                counter: &counter,
            }));
        }
    }
    stats.heap_comparisons = counter.get();
    Ok((out, stats))
}

/// Channel in the sector after `line`, given the channel before it.
pub fn update_h(
    h_prev: ComplexVec,
    line: &SeparationLine,
    real: &ChannelRealization,
    set: &PhaseShiftSet,
) -> ComplexVec {
    let v = real.elements()[line.element];
    h_prev - realize_g(v, set, line.starting) + realize_g(v, set, line.ending)
}
