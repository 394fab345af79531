//! Independent conjugacy dedup by matrices: two candidate words are joined
//! when some rotation of one, conjugated by a short word, matches the other
//! numerically. Used to validate the word-level canonical form.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::enumerate::{harvest, EnumerationParams};
use super::words::Letter;
use super::{mat_mul, Mat2, SurfaceGroupPresentation, IDENTITY};

const GRID: f64 = 1e6;
const MATCH_TOL: f64 = 1e-7;

#[derive(Clone, Debug, Serialize)]
pub struct DedupCrossCheck {
    pub candidates: usize,
    pub canonical_classes: usize,
    pub trace_bucket_classes: usize,
}

impl DedupCrossCheck {
    pub fn agrees(&self) -> bool {
        self.canonical_classes == self.trace_bucket_classes
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Projective normalization: `±M` are the same isometry.
fn projective(m: Mat2) -> Mat2 {
    let flip = if m[0] + m[3] < 0.0 || (m[0] + m[3] == 0.0 && m[1] < 0.0) { -1.0 } else { 1.0 };
    m.map(|x| x * flip)
}

fn cell(x: f64, shift: f64) -> i64 {
    (x * GRID + shift).floor() as i64
}

fn close(a: &Mat2, b: &Mat2) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= MATCH_TOL * (1.0 + x.abs()))
}

fn short_words(n: u8) -> Vec<Vec<Letter>> {
    let alphabet = 2 * n;
    let inv = |x: Letter| if x < n { x + n } else { x - n };
    let mut out = vec![Vec::new()];
    for x in 0..alphabet {
        out.push(vec![x]);
        for y in 0..alphabet {
            if y != inv(x) {
                out.push(vec![x, y]);
            }
        }
    }
    out
}

pub fn dedup_crosscheck(p: &SurfaceGroupPresentation, params: &EnumerationParams) -> DedupCrossCheck {
    let rules = p.rules();
    let cands = harvest(p, &rules, params).candidates;
    let canonical: BTreeSet<Vec<Letter>> = params
        .exec
        .map(&cands, |c| rules.canonical(&c.word, params.closure_slack, params.closure_cap).word)
        .into_iter()
        .collect();

    let rotations: Vec<Vec<Mat2>> = params.exec.map(&cands, |c| {
        let n = c.word.len();
        (0..n)
            .map(|r| projective((0..n).fold(IDENTITY, |acc, j| mat_mul(&acc, &p.matrices[c.word[(r + j) % n] as usize]))))
            .collect()
    });
    let mut table: HashMap<[i64; 4], Vec<(usize, Mat2)>> = HashMap::new();
    for (i, rots) in rotations.iter().enumerate() {
        for m in rots {
            table.entry(m.map(|x| cell(x, 0.0))).or_default().push((i, *m));
        }
    }

    let conj: Vec<(Mat2, Mat2)> = short_words(rules.generators())
        .iter()
        .map(|s| (p.word_matrix(s), p.word_matrix(&rules.invert(s))))
        .collect();
    let links: Vec<Vec<usize>> = params.exec.map_range(cands.len(), |i| {
        let mut hits = Vec::new();
        let m = rotations[i][0];
        for (s, s_inv) in &conj {
            let x = projective(mat_mul(&mat_mul(s, &m), s_inv));
            let mut keys: Vec<[i64; 4]> = Vec::with_capacity(16);
            for mask in 0..16 {
                let key: [i64; 4] =
                    std::array::from_fn(|k| cell(x[k], if mask >> k & 1 == 1 { 0.1 } else { -0.1 }));
                if !keys.contains(&key) {
                    keys.push(key);
                }
            }
            for key in keys {
                if let Some(bucket) = table.get(&key) {
                    hits.extend(bucket.iter().filter(|(j, y)| *j != i && close(&x, y)).map(|(j, _)| *j));
                }
            }
        }
        hits
    });
    let mut uf = UnionFind((0..cands.len()).collect());
    for (i, js) in links.iter().enumerate() {
        for &j in js {
            uf.union(i, j);
        }
    }
    let components = (0..cands.len()).filter(|&i| uf.find(i) == i).count();
    DedupCrossCheck { candidates: cands.len(), canonical_classes: canonical.len(), trace_bucket_classes: components }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::bolza_generators;

    #[test]
    fn routes_agree_on_short_words() {
        let p = bolza_generators();
        let check = dedup_crosscheck(&p, &EnumerationParams::new(5, 9.0));
        assert!(check.agrees(), "{check:?}");
    }
}
