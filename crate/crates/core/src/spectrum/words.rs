//! Words in a one-relator surface group: free and cyclic reduction, minimal
//! rotations, Dehn windows and the relator-aware canonical form.

use std::collections::{HashSet, VecDeque};

pub type Letter = u8;

/// Letters `0..n` are generators, `n..2n` their inverses.
#[derive(Clone, Debug)]
pub struct WordRules {
    n: u8,
    relator_len: usize,
    /// All cyclic conjugates of the relator and of its inverse.
    conjugates: Vec<Vec<Letter>>,
    window: usize,
    bits: u32,
    forbidden: WindowSet,
}

#[derive(Clone, Debug)]
enum WindowSet {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl WindowSet {
    fn contains(&self, code: u64) -> bool {
        match self {
            WindowSet::Dense(bits) => bits[(code >> 6) as usize] & (1 << (code & 63)) != 0,
            WindowSet::Sparse(set) => set.contains(&code),
        }
    }
}

/// Outcome of canonicalizing a cyclic word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalClass {
    pub word: Vec<Letter>,
    /// Some minimal representative is a proper power `root^k`.
    pub root: Option<(Vec<Letter>, u32)>,
    /// The closure search hit its size cap before finishing.
    pub truncated: bool,
}

impl WordRules {
    pub fn new(n: u8, relator: &[Letter]) -> Self {
        let r = relator.len();
        let inv_rel = invert_word(n, relator);
        let mut conjugates = Vec::with_capacity(2 * r);
        for base in [relator, inv_rel.as_slice()] {
            for i in 0..r {
                let rot: Vec<Letter> = base[i..].iter().chain(&base[..i]).copied().collect();
                if !conjugates.contains(&rot) {
                    conjugates.push(rot);
                }
            }
        }
        let window = r / 2 + 1;
        let bits = (32 - (2 * n as u32 - 1).leading_zeros()).max(1);
        let total_bits = bits * window as u32;
        let codes: Vec<u64> = conjugates.iter().map(|c| encode(bits, &c[..window])).collect();
        let forbidden = if total_bits <= 24 {
            let mut table = vec![0u64; (1usize << total_bits).div_ceil(64)];
            for c in codes {
                table[(c >> 6) as usize] |= 1 << (c & 63);
            }
            WindowSet::Dense(table)
        } else {
            WindowSet::Sparse(codes.into_iter().collect())
        };
        Self { n, relator_len: r, conjugates, window, bits, forbidden }
    }

    pub fn generators(&self) -> u8 {
        self.n
    }

    pub fn alphabet(&self) -> u8 {
        2 * self.n
    }

    #[inline]
    pub fn inv(&self, x: Letter) -> Letter {
        if x < self.n { x + self.n } else { x - self.n }
    }

    /// Length of a window that, if it matches a relator conjugate, makes a
    /// word Dehn-reducible.
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn window_mask(&self) -> u64 {
        (1u64 << (self.bits * self.window as u32)) - 1
    }

    #[inline]
    pub fn is_forbidden_code(&self, code: u64) -> bool {
        self.forbidden.contains(code)
    }

    /// True when no cyclic window of the word is more than half a relator.
    pub fn is_cyclically_dehn_reduced(&self, w: &[Letter]) -> bool {
        let n = w.len();
        if n < self.window {
            return true;
        }
        let mask = self.window_mask();
        let mut code = 0u64;
        for i in 0..n + self.window - 1 {
            code = ((code << self.bits) | w[i % n] as u64) & mask;
            if i + 1 >= self.window && self.is_forbidden_code(code) {
                return false;
            }
        }
        true
    }

    pub fn free_reduce(&self, w: &[Letter]) -> Vec<Letter> {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        for &x in w {
            if out.last() == Some(&self.inv(x)) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        out
    }

    pub fn cyclic_reduce(&self, w: &[Letter]) -> Vec<Letter> {
        let w = self.free_reduce(w);
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == self.inv(w[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        w[lo..hi].to_vec()
    }

    pub fn invert(&self, w: &[Letter]) -> Vec<Letter> {
        invert_word(self.n, w)
    }

    fn normalize(&self, w: &[Letter]) -> Vec<Letter> {
        min_rotation(&self.cyclic_reduce(w))
    }

    /// Canonical representative of the conjugacy class of `w`: the
    /// lexicographically least word of minimal length among the cyclic words
    /// reachable by relator substitutions that lengthen by at most `slack`.
    pub fn canonical(&self, w: &[Letter], slack: usize, cap: usize) -> CanonicalClass {
        let start = self.normalize(w);
        let mut best = start.len();
        let mut seen: HashSet<Vec<Letter>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start.clone());
        queue.push_back(start);
        let r = self.relator_len;
        let mut truncated = false;
        while let Some(u) = queue.pop_front() {
            let n = u.len();
            if n > best + slack || n == 0 {
                continue;
            }
            for i in 0..n {
                for rel in &self.conjugates {
                    let mut m = 0;
                    while m < n && m < r - 1 && u[(i + m) % n] == rel[m] {
                        m += 1;
                    }
                    if m == 0 {
                        continue;
                    }
                    let limit = best + slack;
                    // new length n + r - 2k must stay within the limit
                    let k_min = (n + r).saturating_sub(limit).div_ceil(2).max(1);
                    for k in k_min..=m {
                        let mut v: Vec<Letter> = self.invert(&rel[k..]);
                        v.extend((0..n - k).map(|j| u[(i + k + j) % n]));
                        let v = self.normalize(&v);
                        if v.len() > limit || seen.contains(&v) {
                            continue;
                        }
                        if v.len() < best {
                            best = v.len();
                        }
                        if seen.len() >= cap {
                            truncated = true;
                            continue;
                        }
                        seen.insert(v.clone());
                        queue.push_back(v);
                    }
                }
            }
        }
        let mut minimal: Vec<&Vec<Letter>> = seen.iter().filter(|v| v.len() == best).collect();
        minimal.sort();
        let word = minimal[0].clone();
        let root = minimal.iter().find_map(|v| {
            let p = primitive_period(v);
            (p < v.len()).then(|| (v[..p].to_vec(), (v.len() / p) as u32))
        });
        CanonicalClass { word, root, truncated }
    }
}

fn encode(bits: u32, w: &[Letter]) -> u64 {
    w.iter().fold(0u64, |acc, &x| (acc << bits) | x as u64)
}

pub fn invert_word(n: u8, w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|&x| if x < n { x + n } else { x - n }).collect()
}

/// Lexicographically least rotation (Booth's algorithm).
pub fn min_rotation(w: &[Letter]) -> Vec<Letter> {
    let n = w.len();
    if n == 0 {
        return Vec::new();
    }
    let s: Vec<Letter> = w.iter().chain(w).copied().collect();
    let mut f = vec![-1isize; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = s[j];
        let mut i = f[j - k - 1];
        while i != -1 && sj != s[k + i as usize + 1] {
            if sj < s[k + i as usize + 1] {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if i == -1 && sj != s[k] {
            if sj < s[k] {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    s[k..k + n].to_vec()
}

/// Smallest `p` dividing `w.len()` with `w` equal to its rotation by `p`.
pub fn primitive_period(w: &[Letter]) -> usize {
    let n = w.len();
    (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p])).unwrap_or(n)
}

pub fn render(labels: &[char], w: &[Letter]) -> String {
    w.iter().map(|&x| labels[x as usize]).collect()
}
