//! Block and chain structure of letter sequences, shared by words and boundary cycles.

use crate::presentation::{Letter, Presentation};

/// A maximal gap-0 run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Run {
    pub start: usize,
    pub len: usize,
    /// Gap to the next run; `None` at the end of a linear sequence.
    pub gap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    LongBlock,
    LongChain,
    HalfBlock,
    HalfChain,
}

/// A block or chain inside a sequence: consecutive blocks starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: usize,
    pub blocks: Vec<usize>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

pub fn gaps(pres: &Presentation, w: &[Letter], cyclic: bool) -> Vec<usize> {
    let n = w.len();
    let m = if cyclic { n } else { n.saturating_sub(1) };
    (0..m).map(|i| pres.slot_gap(w[i], w[(i + 1) % n])).collect()
}

pub fn linear_runs(pres: &Presentation, w: &[Letter]) -> Vec<Run> {
    let g = gaps(pres, w, false);
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 0..w.len() {
        if i + 1 == w.len() {
            runs.push(Run { start, len: i + 1 - start, gap: None });
        } else if g[i] != 0 {
            runs.push(Run { start, len: i + 1 - start, gap: Some(g[i]) });
            start = i + 1;
        }
    }
    runs
}

/// Runs of a cyclic sequence, listed from the first run starting at or after index 0.
pub fn cyclic_runs(pres: &Presentation, w: &[Letter]) -> Vec<Run> {
    let g = gaps(pres, w, true);
    cyclic_runs_from_gaps(&g)
}

pub fn cyclic_runs_from_gaps(g: &[usize]) -> Vec<Run> {
    let n = g.len();
    if n == 0 {
        return Vec::new();
    }
    let Some(first) = (0..n).find(|&i| g[(i + n - 1) % n] != 0) else {
        return vec![Run { start: 0, len: n, gap: Some(0) }];
    };
    let mut runs = Vec::new();
    let mut start = first;
    for k in 0..n {
        let i = (first + k) % n;
        if g[i] != 0 {
            let len = (i + n - start) % n + 1;
            runs.push(Run { start, len, gap: Some(g[i]) });
            start = (i + 1) % n;
        }
    }
    runs
}

pub fn long_blocks(pres: &Presentation, runs: &[Run]) -> Vec<Segment> {
    let two_g = 2 * pres.genus();
    runs.iter()
        .filter(|r| r.len > two_g)
        .map(|r| Segment {
            kind: SegmentKind::LongBlock,
            start: r.start,
            blocks: vec![r.len.min(pres.degree())],
        })
        .collect()
}

pub fn half_blocks(pres: &Presentation, runs: &[Run]) -> Vec<Segment> {
    let two_g = 2 * pres.genus();
    runs.iter()
        .filter(|r| r.len == two_g)
        .map(|r| Segment {
            kind: SegmentKind::HalfBlock,
            start: r.start,
            blocks: vec![two_g],
        })
        .collect()
}

pub fn long_chains(pres: &Presentation, runs: &[Run], cyclic: bool) -> Vec<Segment> {
    let two_g = 2 * pres.genus();
    let m = runs.len();
    let mut out = Vec::new();
    for j in 0..m {
        if runs[j].len != two_g {
            continue;
        }
        let mut blocks = vec![two_g];
        let mut k = j;
        loop {
            if runs[k].gap != Some(1) {
                break;
            }
            let next = if k + 1 < m {
                k + 1
            } else if cyclic {
                0
            } else {
                break;
            };
            if next == j {
                break;
            }
            let len = runs[next].len;
            if len == two_g - 1 {
                blocks.push(len);
                k = next;
            } else {
                if len == two_g {
                    blocks.push(len);
                    out.push(Segment {
                        kind: SegmentKind::LongChain,
                        start: runs[j].start,
                        blocks,
                    });
                }
                break;
            }
        }
    }
    out
}

pub fn is_half_chain(pres: &Presentation, runs: &[Run]) -> bool {
    let l = 2 * pres.genus() - 1;
    !runs.is_empty() && runs.iter().all(|r| r.len == l && r.gap == Some(1))
}

pub fn half_chain(pres: &Presentation, runs: &[Run]) -> Option<Segment> {
    is_half_chain(pres, runs).then(|| Segment {
        kind: SegmentKind::HalfChain,
        start: runs[0].start,
        blocks: runs.iter().map(|r| r.len).collect(),
    })
}

/// True if every gap is 1 (a cyclic chain), in which case the count of even blocks must be even.
pub fn chain_parity_holds(runs: &[Run]) -> bool {
    if runs.is_empty() || !runs.iter().all(|r| r.gap == Some(1)) {
        return true;
    }
    runs.iter().filter(|r| r.len % 2 == 0).count() % 2 == 0
}

/// Path along the far side of the faces bounding `seg`, between the same endpoints.
/// `seg_letters` are the letters of the segment in order.
pub fn complement(pres: &Presentation, seg_letters: &[Letter], blocks: &[usize]) -> Vec<Letter> {
    let n = pres.degree();
    let mut out = Vec::new();
    let mut offset = 0;
    let m = blocks.len();
    for (i, &b) in blocks.iter().enumerate() {
        let p = pres.relator_position(seg_letters[offset]);
        let hi = if i == 0 { n - 1 } else { n - 2 };
        let lo = if i + 1 == m { b } else { b + 1 };
        for k in (lo..=hi).rev() {
            out.push(pres.relator_letter(p + k).inverse());
        }
        offset += b;
    }
    out
}

/// Complement of a whole cyclic half-chain, as a cyclic sequence.
pub fn half_chain_complement(pres: &Presentation, seg_letters: &[Letter], blocks: &[usize]) -> Vec<Letter> {
    let n = pres.degree();
    let mut out = Vec::new();
    let mut offset = 0;
    for &b in blocks {
        let p = pres.relator_position(seg_letters[offset]);
        for k in (b + 1..=n - 2).rev() {
            out.push(pres.relator_letter(p + k).inverse());
        }
        offset += b;
    }
    out
}

/// Letters of `w` starting at `start`, wrapping around.
pub fn cyclic_slice(w: &[Letter], start: usize, len: usize) -> Vec<Letter> {
    (0..len).map(|k| w[(start + k) % w.len()]).collect()
}
