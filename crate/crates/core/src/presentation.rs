use std::fmt;

use crate::error::Error;

/// A signed generator. Generator `2i` is `a_{i+1}`, generator `2i+1` is `b_{i+1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        Letter((2 * generator + inverse as usize) as u8)
    }

    pub fn from_code(code: u8) -> Letter {
        Letter(code)
    }

    /// Dense code `2 * generator + inverse`; also the canonical letter order.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

/// The standard one-relator presentation of the genus-g surface group,
/// together with the clockwise slot order of half-edges at a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    genus: usize,
    relator: Vec<Letter>,
    position: Vec<usize>,
}

impl Presentation {
    pub fn new(genus: usize) -> Result<Presentation, Error> {
        if genus < 2 {
            return Err(Error::InvalidGenus(genus));
        }
        let mut relator = Vec::with_capacity(4 * genus);
        for i in 0..genus {
            let (a, b) = (2 * i, 2 * i + 1);
            relator.push(Letter::new(a, false));
            relator.push(Letter::new(b, false));
            relator.push(Letter::new(a, true));
            relator.push(Letter::new(b, true));
        }
        let mut position = vec![usize::MAX; 4 * genus];
        for (p, l) in relator.iter().enumerate() {
            position[l.code()] = p;
        }
        let n = relator.len();
        for shift in 1..n {
            assert!(
                (0..n).any(|k| relator[k] != relator[(k + shift) % n]),
                "relator has a rotational symmetry"
            );
        }
        Ok(Presentation {
            genus,
            relator,
            position,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    /// Length of the relator, which is also the number of slots per vertex.
    pub fn degree(&self) -> usize {
        4 * self.genus
    }

    pub fn relator(&self) -> &[Letter] {
        &self.relator
    }

    pub fn relator_word(&self) -> Word {
        Word(self.relator.clone())
    }

    pub fn relator_position(&self, l: Letter) -> usize {
        self.position[l.code()]
    }

    pub fn relator_letter(&self, pos: usize) -> Letter {
        self.relator[pos % self.relator.len()]
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..4 * self.genus).map(|c| Letter(c as u8))
    }

    pub fn outgoing_slot(&self, generator: usize) -> usize {
        let i = generator / 2;
        if generator % 2 == 0 {
            4 * i
        } else {
            4 * i + 3
        }
    }

    pub fn incoming_slot(&self, generator: usize) -> usize {
        let i = generator / 2;
        if generator % 2 == 0 {
            4 * i + 2
        } else {
            4 * i + 1
        }
    }

    /// Slot of the half-edge a path uses to leave a vertex when reading `l`.
    pub fn departure_slot(&self, l: Letter) -> usize {
        if l.is_inverse() {
            self.incoming_slot(l.generator())
        } else {
            self.outgoing_slot(l.generator())
        }
    }

    /// Slot of the half-edge a path uses to enter a vertex after reading `l`.
    pub fn arrival_slot(&self, l: Letter) -> usize {
        if l.is_inverse() {
            self.outgoing_slot(l.generator())
        } else {
            self.incoming_slot(l.generator())
        }
    }

    /// The letter whose departure slot is `slot`.
    pub fn departing_letter(&self, slot: usize) -> Letter {
        let i = slot / 4;
        match slot % 4 {
            0 => Letter::new(2 * i, false),
            1 => Letter::new(2 * i + 1, true),
            2 => Letter::new(2 * i, true),
            _ => Letter::new(2 * i + 1, false),
        }
    }

    /// Number of slots strictly between arriving via `arrival` and leaving via `departure`.
    pub fn slot_gap(&self, arrival: Letter, departure: Letter) -> usize {
        let n = self.degree();
        (self.departure_slot(departure) + 2 * n - self.arrival_slot(arrival) - 1) % n
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, Error> {
        parse_word(self, text)
    }

    pub fn format_letter(&self, l: Letter) -> String {
        let g = l.generator();
        let mut s = format!("{}{}", if g % 2 == 0 { 'a' } else { 'b' }, g / 2 + 1);
        if l.is_inverse() {
            s.push('\'');
        }
        s
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        let toks: Vec<String> = w.iter().map(|&l| self.format_letter(l)).collect();
        toks.join(" ")
    }

    /// Generator label token as used in the JSON format (`a1`, `b1`, ...).
    pub fn generator_token(&self, generator: usize) -> String {
        self.format_letter(Letter::new(generator, false))
    }

    pub fn parse_generator_token(&self, tok: &str) -> Option<usize> {
        let mut chars = tok.chars();
        let family = match chars.next()? {
            'a' => 0,
            'b' => 1,
            _ => return None,
        };
        let rest = chars.as_str();
        if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let i: usize = rest.parse().ok()?;
        if i == 0 || i > self.genus {
            return None;
        }
        Some(2 * (i - 1) + family)
    }
}

fn parse_word(pres: &Presentation, text: &str) -> Result<Word, Error> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() || c == '*' || c == '.' {
            i += 1;
            continue;
        }
        let (generator, inverse_alias) = match c {
            'a' | 'b' => {
                let family = if c == 'a' { 0 } else { 1 };
                let mut j = i + 1;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                if j > i + 1 {
                    let digits: String = chars[i + 1..j].iter().map(|x| x.1).collect();
                    let k: usize = digits.parse().map_err(|_| Error::Parse {
                        pos,
                        msg: format!("bad index '{digits}'"),
                    })?;
                    if k == 0 || k > pres.genus() {
                        return Err(Error::Parse {
                            pos,
                            msg: format!("generator {c}{k} out of range for genus {}", pres.genus()),
                        });
                    }
                    i = j;
                    (2 * (k - 1) + family, false)
                } else if pres.genus() == 2 {
                    i += 1;
                    (family, false)
                } else {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("'{c}' needs an index"),
                    });
                }
            }
            'c' | 'd' | 'A' | 'B' | 'C' | 'D' if pres.genus() == 2 => {
                i += 1;
                match c {
                    'c' => (2, false),
                    'd' => (3, false),
                    'A' => (0, true),
                    'B' => (1, true),
                    'C' => (2, true),
                    _ => (3, true),
                }
            }
            _ => {
                return Err(Error::Parse {
                    pos,
                    msg: format!("unexpected character '{c}'"),
                })
            }
        };
        let mut inverse = inverse_alias;
        if i < chars.len() && chars[i].1 == '\'' {
            inverse = !inverse;
            i += 1;
        }
        if i < chars.len() && chars[i].1 == '^' {
            let start = chars[i].0;
            let mut j = i + 1;
            let neg = j < chars.len() && chars[j].1 == '-';
            if neg {
                j += 1;
            }
            let k0 = j;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            if j == k0 {
                return Err(Error::Parse {
                    pos: start,
                    msg: "exponent expected".into(),
                });
            }
            let digits: String = chars[k0..j].iter().map(|x| x.1).collect();
            let e: usize = digits.parse().map_err(|_| Error::Parse {
                pos: start,
                msg: "bad exponent".into(),
            })?;
            let l = Letter::new(generator, inverse ^ neg);
            out.extend(std::iter::repeat(l).take(e));
            i = j;
            continue;
        }
        out.push(Letter::new(generator, inverse));
    }
    Ok(Word(out))
}

/// A word in the generators, not necessarily reduced.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(invert(&self.0))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn free_reduce(&self) -> Word {
        Word(free_reduce(&self.0))
    }

    /// `x w x⁻¹`.
    pub fn conjugate_by(&self, x: &Word) -> Word {
        x.concat(self).concat(&x.inverse())
    }

    pub fn display<'a>(&'a self, pres: &'a Presentation) -> WordDisplay<'a> {
        WordDisplay(&self.0, pres)
    }
}

pub struct WordDisplay<'a>(&'a [Letter], &'a Presentation);

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", self.1.format_word(self.0))
    }
}

pub fn invert(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inverse()).collect()
}

pub fn free_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Rotation amount `k` such that `w[k..] ++ w[..k]` is lexicographically least.
pub fn least_rotation(w: &[Letter]) -> usize {
    let n = w.len();
    let mut best = 0;
    for k in 1..n {
        for i in 0..n {
            let (x, y) = (w[(k + i) % n], w[(best + i) % n]);
            if x != y {
                if x < y {
                    best = k;
                }
                break;
            }
        }
    }
    best
}

pub fn rotate(w: &[Letter], k: usize) -> Vec<Letter> {
    if w.is_empty() {
        return Vec::new();
    }
    let k = k % w.len();
    let mut v = w[k..].to_vec();
    v.extend_from_slice(&w[..k]);
    v
}

/// A word up to rotation, stored in its least rotation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn new(letters: &[Letter]) -> CyclicWord {
        CyclicWord(rotate(letters, least_rotation(letters)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::new(&invert(&self.0))
    }

    pub fn to_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn display<'a>(&'a self, pres: &'a Presentation) -> WordDisplay<'a> {
        WordDisplay(&self.0, pres)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Presentation {
        Presentation::new(2).unwrap()
    }

    #[test]
    fn slot_order_matches_rotation() {
        let p = p2();
        let names: Vec<String> = (0..8)
            .map(|s| p.format_letter(p.departing_letter(s)))
            .collect();
        assert_eq!(names, ["a1", "b1'", "a1'", "b1", "a2", "b2'", "a2'", "b2"]);
    }

    #[test]
    fn gap_examples() {
        let p = p2();
        let w = p.parse_word("a b c D").unwrap().0;
        assert_eq!(p.slot_gap(w[0], w[2]), 1);
        assert_eq!(p.slot_gap(w[0], w[1]), 0);
        assert_eq!(p.slot_gap(w[3], w[0]), 0);
    }

    #[test]
    fn relator_pairs_have_gap_zero() {
        for g in 2..5 {
            let p = Presentation::new(g).unwrap();
            let n = p.degree();
            for k in 0..n {
                let x = p.relator_letter(k);
                let y = p.relator_letter(k + 1);
                assert_eq!(p.slot_gap(x, y), 0);
                let chain_next = p.departing_letter((p.departure_slot(y) + 1) % n);
                assert_eq!(p.slot_gap(x, chain_next), 1);
                assert_eq!(p.slot_gap(x, x.inverse()), n - 1);
            }
        }
    }

    #[test]
    fn parse_forms() {
        let p = p2();
        let w = p.parse_word("a1 b1 a1' b1'").unwrap();
        assert_eq!(w, p.parse_word("abAB").unwrap());
        assert_eq!(w, p.relator_word().0[..4].to_vec().into_word());
        assert_eq!(p.parse_word("a^-2").unwrap(), p.parse_word("AA").unwrap());
        let p3 = Presentation::new(3).unwrap();
        assert!(p3.parse_word("c").is_err());
        assert!(p3.parse_word("a4").is_err());
        match p.parse_word("a b x") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
    }

    trait IntoWord {
        fn into_word(self) -> Word;
    }
    impl IntoWord for Vec<Letter> {
        fn into_word(self) -> Word {
            Word(self)
        }
    }

    #[test]
    fn genus_one_rejected() {
        assert!(Presentation::new(1).is_err());
    }

    #[test]
    fn cyclic_word_is_rotation_invariant() {
        let p = p2();
        let w = p.parse_word("abAABc").unwrap().0;
        let c = CyclicWord::new(&w);
        for k in 0..w.len() {
            assert_eq!(CyclicWord::new(&rotate(&w, k)), c);
        }
    }
}
