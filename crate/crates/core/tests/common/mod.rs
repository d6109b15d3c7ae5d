#![allow(dead_code)]

use corefold::{Letter, Presentation, TiledSurface, Word};
use rand::Rng;

pub fn p2() -> Presentation {
    Presentation::new(2).unwrap()
}

pub fn w(p: &Presentation, s: &str) -> Word {
    p.parse_word(s).unwrap()
}

/// Uniform freely reduced word of exactly `len` letters.
pub fn reduced_word<R: Rng>(rng: &mut R, p: &Presentation, len: usize) -> Word {
    let k = 2 * p.rank();
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let l = Letter::from_code(rng.gen_range(0..k) as u8);
        if out.last() != Some(&l.inverse()) {
            out.push(l);
        }
    }
    Word(out)
}

pub fn word_upto<R: Rng>(rng: &mut R, p: &Presentation, max: usize) -> Word {
    let n = rng.gen_range(0..=max);
    reduced_word(rng, p, n)
}

/// Word over the given letters only.
pub fn word_over<R: Rng>(rng: &mut R, letters: &[Letter], len: usize) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let l = letters[rng.gen_range(0..letters.len())];
        if out.last() != Some(&l.inverse()) {
            out.push(l);
        }
    }
    Word(out)
}

/// All freely reduced words of length exactly `n`, in lexicographic order of codes.
pub fn for_each_reduced_word<F: FnMut(&[Letter])>(p: &Presentation, n: usize, mut f: F) {
    let k = 2 * p.rank();
    let mut buf: Vec<Letter> = Vec::with_capacity(n);
    fn go<F: FnMut(&[Letter])>(buf: &mut Vec<Letter>, n: usize, k: usize, f: &mut F) {
        if buf.len() == n {
            f(buf);
            return;
        }
        for c in 0..k {
            let l = Letter::from_code(c as u8);
            if buf.last() == Some(&l.inverse()) {
                continue;
            }
            buf.push(l);
            go(buf, n, k, f);
            buf.pop();
        }
    }
    go(&mut buf, n, k, &mut f);
}

/// Finite cover of the surface given by a permutation action of each generator on `0..n`.
/// Edges of generator `g` go `x -> perms[g][x]`; one relator face starts at every point.
pub fn permutation_cover(p: &Presentation, n: usize, perms: &[Vec<usize>]) -> TiledSurface {
    let mut y = TiledSurface::new(p.clone());
    for _ in 0..n {
        y.add_vertex();
    }
    let mut inv = vec![vec![0; n]; perms.len()];
    for (g, perm) in perms.iter().enumerate() {
        for x in 0..n {
            y.add_edge(x, perm[x], g);
            inv[g][perm[x]] = x;
        }
    }
    for x in 0..n {
        let mut v = x;
        let mut steps = Vec::new();
        for &l in p.relator() {
            let g = l.generator();
            if l.is_inverse() {
                let u = inv[g][v];
                steps.push(corefold::Step::new(g * n + u, false));
                v = u;
            } else {
                steps.push(corefold::Step::new(g * n + v, true));
                v = perms[g][v];
            }
        }
        assert_eq!(v, x, "relator does not act trivially");
        y.add_face(steps);
    }
    y
}

/// Cover for the quotient onto the infinite dihedral group, cut to `2r` points.
/// `a, b` act as one involution and `c, d` as another, pairing neighbours on a cycle.
pub fn dihedral_cover(p: &Presentation, r: usize) -> TiledSurface {
    let n = 2 * r;
    let s: Vec<usize> = (0..n).map(|x| x ^ 1).collect();
    let t: Vec<usize> = (0..n).map(|x| if x % 2 == 1 { (x + 1) % n } else { (x + n - 1) % n }).collect();
    permutation_cover(p, n, &[s.clone(), s, t.clone(), t])
}

/// Independent check of the boundary-length identity and even-block parity on cyclic chains.
#[derive(Default)]
pub struct Audit {
    pub complexes: usize,
    pub cycles: usize,
    pub chains: usize,
    pub violations: Vec<String>,
}

impl Audit {
    pub fn check(&mut self, y: &TiledSurface, what: &str) {
        self.complexes += 1;
        let p = y.presentation();
        let d = p.degree();
        let cycles = match y.boundary_cycles() {
            Ok(c) => c,
            Err(e) => {
                self.violations.push(format!("{what}: {e}"));
                return;
            }
        };
        let total: usize = cycles.iter().map(|c| c.len()).sum();
        let expect = 2 * y.edge_count() as i64 - (d * y.face_count()) as i64;
        if total as i64 != expect {
            self.violations.push(format!("{what}: boundary {total} != 2e - 4gf = {expect}"));
        }
        for c in &cycles {
            self.cycles += 1;
            let n = c.letters.len();
            if n == 0 {
                continue;
            }
            let gaps: Vec<usize> = (0..n)
                .map(|i| {
                    let (x, y) = (c.letters[i], c.letters[(i + 1) % n]);
                    let dep = p.departure_slot(y);
                    let arr = p.arrival_slot(x);
                    (dep + 2 * d - arr - 1) % d
                })
                .collect();
            if gaps.iter().all(|&g| g == 0) {
                continue;
            }
            let nonzero: Vec<usize> = gaps.iter().copied().filter(|&g| g != 0).collect();
            if nonzero.iter().any(|&g| g != 1) {
                continue;
            }
            self.chains += 1;
            let start = (0..n).find(|&i| gaps[i] != 0).unwrap() + 1;
            let mut even = 0;
            let mut len = 0;
            for k in 0..n {
                len += 1;
                if gaps[(start + k) % n] != 0 {
                    if len % 2 == 0 {
                        even += 1;
                    }
                    len = 0;
                }
            }
            if even % 2 != 0 {
                self.violations.push(format!("{what}: cyclic chain with {even} even blocks"));
            }
        }
    }
}

/// Freely reduced words over the g = 2 alphabet of length at most `max`.
pub fn words(max: usize) -> impl proptest::strategy::Strategy<Value = Word> {
    use proptest::prelude::*;
    proptest::collection::vec(0u8..8, 0..=max)
        .prop_map(|v| Word(corefold::presentation::free_reduce(&v.into_iter().map(Letter::from_code).collect::<Vec<_>>())))
}

/// Words that contain a stretch of the relator (or its inverse) of length `arc`, padded on both sides.
pub fn words_with_arc(pad: usize, arc: std::ops::RangeInclusive<usize>) -> impl proptest::strategy::Strategy<Value = Word> {
    use proptest::prelude::*;
    (words(pad), words(pad), 0usize..8, arc, any::<bool>()).prop_map(|(x, y, start, len, inv)| {
        let p = p2();
        let r: Vec<Letter> = if inv { corefold::presentation::invert(p.relator()) } else { p.relator().to_vec() };
        let arc: Vec<Letter> = (0..len).map(|k| r[(start + k) % 8]).collect();
        Word(corefold::presentation::free_reduce(&[x.letters(), &arc, y.letters()].concat()))
    })
}
