//! Word search for conjugacy classes with bounded translation length.
//!
//! Only necklaces (rotation-minimal words) can be canonical, so the search
//! walks prenecklaces in the Fredricksen–Kessler–Maiorana order, pruned by
//! free reduction and by the Dehn windows of the relator. The tree is split
//! into prefix shards that are searched independently.

use std::collections::BTreeMap;

use super::words::{CanonicalClass, Letter, WordRules};
use super::{
    length_from_trace, mat_det, mat_mul, trace_bound, ConjugacyClassRecord, LengthSpectrum, Mat2, Result,
    SpectrumDiagnostics, SpectrumError, SurfaceGroupPresentation, IDENTITY,
};
use crate::exec::Execution;

#[derive(Clone, Debug)]
pub struct EnumerationParams {
    pub max_word_length: usize,
    pub max_geodesic_length: f64,
    pub dedup_tolerance: f64,
    /// Extra length allowed while searching relator substitutions.
    pub closure_slack: usize,
    /// Cap on the number of words visited per canonicalization.
    pub closure_cap: usize,
    pub exec: Execution,
}

impl EnumerationParams {
    pub fn new(max_word_length: usize, max_geodesic_length: f64) -> Self {
        Self {
            max_word_length,
            max_geodesic_length,
            dedup_tolerance: 1e-9,
            closure_slack: 2,
            closure_cap: 200_000,
            exec: Execution::default(),
        }
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

/// A cyclically reduced, rotation-minimal, cyclically Dehn-reduced word whose
/// trace is within the length bound.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub word: Vec<Letter>,
    pub trace: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Harvest {
    pub candidates: Vec<Candidate>,
    pub nodes: u64,
    pub recomputations: u64,
}

#[derive(Clone, Copy)]
struct Node {
    m: Mat2,
    period: usize,
    code: u64,
}

struct Walker<'a> {
    rules: &'a WordRules,
    mats: &'a [Mat2],
    max_len: usize,
    bound: f64,
    mask: u64,
    word: Vec<Letter>,
    out: Harvest,
}

impl<'a> Walker<'a> {
    fn new(rules: &'a WordRules, mats: &'a [Mat2], max_len: usize, bound: f64) -> Self {
        Self { rules, mats, max_len, bound, mask: rules.window_mask(), word: Vec::new(), out: Harvest::default() }
    }

    /// Extend the current word by `x`, or `None` if the result cannot be a
    /// prefix of a candidate.
    #[inline]
    fn step(&mut self, node: &Node, x: Letter) -> Option<Node> {
        let len = self.word.len();
        let period = if len == 0 {
            1
        } else {
            if x == self.rules.inv(self.word[len - 1]) {
                return None;
            }
            let r = self.word[len - node.period];
            if x < r {
                return None;
            }
            if x == r { node.period } else { len + 1 }
        };
        let code = ((node.code << self.rules.bits()) | x as u64) & self.mask;
        if len + 1 >= self.rules.window() && self.rules.is_forbidden_code(code) {
            return None;
        }
        let mut m = mat_mul(&node.m, &self.mats[x as usize]);
        let scale = (m[0] * m[3]).abs() + (m[1] * m[2]).abs();
        if (mat_det(&m) - 1.0).abs() > DRIFT_TOL * scale {
            self.word.push(x);
            m = self.word.iter().fold(IDENTITY, |acc, &y| mat_mul(&acc, &self.mats[y as usize]));
            self.word.pop();
            self.out.recomputations += 1;
        }
        Some(Node { m, period, code })
    }

    fn visit(&mut self, node: &Node) {
        self.out.nodes += 1;
        let len = self.word.len();
        let trace = node.m[0] + node.m[3];
        if len.is_multiple_of(node.period)
            && trace.abs() <= self.bound
            && trace.abs() > 2.0
            && self.word[0] != self.rules.inv(self.word[len - 1])
            && self.rules.is_cyclically_dehn_reduced(&self.word)
        {
            self.out.candidates.push(Candidate { word: self.word.clone(), trace });
        }
    }

    fn descend(&mut self, node: Node) {
        self.visit(&node);
        if self.word.len() == self.max_len {
            return;
        }
        for x in 0..self.rules.alphabet() {
            if let Some(next) = self.step(&node, x) {
                self.word.push(x);
                self.descend(next);
                self.word.pop();
            }
        }
    }

    /// Visit all nodes shorter than `depth` and return the frontier at
    /// `depth` as shard roots.
    fn frontier(&mut self, node: Node, depth: usize, roots: &mut Vec<(Vec<Letter>, Node)>) {
        if !self.word.is_empty() {
            if self.word.len() == depth {
                roots.push((self.word.clone(), node));
                return;
            }
            self.visit(&node);
        }
        if self.word.len() == self.max_len {
            return;
        }
        for x in 0..self.rules.alphabet() {
            if let Some(next) = self.step(&node, x) {
                self.word.push(x);
                self.frontier(next, depth, roots);
                self.word.pop();
            }
        }
    }
}

/// Determinant drift, relative to the size of the products in `ad − bc`,
/// that triggers recomputing a prefix from the generator matrices.
const DRIFT_TOL: f64 = 1e-9;

const SHARD_DEPTH: usize = 3;

/// All candidate words up to the given word length and geodesic length, in a
/// deterministic order independent of the execution mode.
pub fn harvest(p: &SurfaceGroupPresentation, rules: &WordRules, params: &EnumerationParams) -> Harvest {
    let bound = trace_bound(params.max_geodesic_length) * (1.0 + 1e-12);
    let root = Node { m: IDENTITY, period: 1, code: 0 };
    let mut head = Walker::new(rules, &p.matrices, params.max_word_length, bound);
    let mut roots = Vec::new();
    head.frontier(root, SHARD_DEPTH, &mut roots);
    let shards = params.exec.map(&roots, |(prefix, node)| {
        let mut w = Walker::new(rules, &p.matrices, params.max_word_length, bound);
        w.word = prefix.clone();
        w.descend(*node);
        w.out
    });
    let mut out = head.out;
    for s in shards {
        out.candidates.extend(s.candidates);
        out.nodes += s.nodes;
        out.recomputations += s.recomputations;
    }
    out
}

pub fn enumerate_classes(
    p: &SurfaceGroupPresentation,
    max_word_length: usize,
    max_geodesic_length: f64,
) -> Result<LengthSpectrum> {
    enumerate_with(p, &EnumerationParams::new(max_word_length, max_geodesic_length))
}

struct ClassInfo {
    root: Option<(Vec<Letter>, u32)>,
    traces: Vec<f64>,
}

pub fn enumerate_with(p: &SurfaceGroupPresentation, params: &EnumerationParams) -> Result<LengthSpectrum> {
    if params.max_word_length == 0 {
        return Err(SpectrumError::InvalidParameter("max_word_length must be at least 1".into()));
    }
    if !(params.max_geodesic_length > 0.0) {
        return Err(SpectrumError::InvalidParameter("max_geodesic_length must be positive".into()));
    }
    if !(params.dedup_tolerance > 0.0) {
        return Err(SpectrumError::InvalidParameter("dedup_tolerance must be positive".into()));
    }
    let rules = p.rules();
    let harvest = harvest(p, &rules, params);
    let canon = |w: &[Letter]| rules.canonical(w, params.closure_slack, params.closure_cap);
    let classes: Vec<CanonicalClass> = params.exec.map(&harvest.candidates, |c| canon(&c.word));

    let mut diagnostics = SpectrumDiagnostics {
        nodes_visited: harvest.nodes,
        candidate_words: harvest.candidates.len(),
        recomputations: harvest.recomputations,
        ..Default::default()
    };
    let mut merged: BTreeMap<Vec<Letter>, ClassInfo> = BTreeMap::new();
    for (cand, class) in harvest.candidates.iter().zip(classes) {
        diagnostics.closure_truncations += class.truncated as usize;
        let info = merged.entry(class.word).or_insert(ClassInfo { root: None, traces: Vec::new() });
        if info.root.is_none() {
            info.root = class.root;
        }
        info.traces.push(cand.trace);
    }

    let keys: Vec<&Vec<Letter>> = merged.keys().collect();
    let built: Vec<Option<(ConjugacyClassRecord, usize)>> = params.exec.map(&keys, |w| {
        let info = &merged[*w];
        let trace = p.word_matrix(w)[0] + p.word_matrix(w)[3];
        let length = length_from_trace(trace).ok()?;
        if length > params.max_geodesic_length * (1.0 + 1e-12) {
            return None;
        }
        let failures = info
            .traces
            .iter()
            .filter(|t| (t.abs() - trace.abs()).abs() > params.dedup_tolerance * trace.abs().max(1.0))
            .count();
        let (primitive, power, power_of) = match &info.root {
            Some((root, k)) => (false, *k, Some(p.render(&canon(root).word))),
            None => (true, 1, None),
        };
        let partner = canon(&rules.invert(w)).word;
        Some((
            ConjugacyClassRecord {
                canonical_word: p.render(w),
                trace,
                length,
                primitive,
                power,
                power_of,
                orientation_partner: p.render(&partner),
            },
            failures,
        ))
    });

    let mut records = Vec::with_capacity(built.len());
    for (rec, failures) in built.into_iter().flatten() {
        diagnostics.trace_checksum_failures += failures;
        records.push(rec);
    }
    super::sort_records(&mut records);

    let names: std::collections::HashSet<&str> = records.iter().map(|r| r.canonical_word.as_str()).collect();
    diagnostics.unpaired_classes =
        records.iter().filter(|r| !names.contains(r.orientation_partner.as_str())).count();
    diagnostics.tolerance_collisions = count_collisions(&records, params.dedup_tolerance);

    Ok(LengthSpectrum {
        records,
        max_word_length: params.max_word_length,
        max_geodesic_length: params.max_geodesic_length,
        dedup_tolerance: params.dedup_tolerance,
        diagnostics,
    })
}

/// Classes that share a trace within the tolerance with an earlier class
/// other than their orientation partner.
fn count_collisions(records: &[ConjugacyClassRecord], tol: f64) -> usize {
    let mut count = 0;
    let mut start = 0;
    for i in 0..records.len() {
        while (records[i].length - records[start].length) > tol * records[i].length.max(1.0) {
            start += 1;
        }
        let clash = records[start..i].iter().any(|r| {
            (r.trace.abs() - records[i].trace.abs()).abs() <= tol * r.trace.abs()
                && r.canonical_word != records[i].orientation_partner
        });
        count += clash as usize;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{bolza_generators, counting_function};

    #[test]
    fn generators_only() {
        let p = bolza_generators();
        let spec = enumerate_classes(&p, 1, 3.1).unwrap();
        assert_eq!(spec.len(), 8);
        for r in &spec.records {
            assert!((r.length - 3.057142).abs() < 1e-6);
            assert!(r.primitive);
        }
        assert_eq!(counting_function(&spec, 3.1).unwrap(), 8);
        assert_eq!(counting_function(&spec, 3.0).unwrap(), 0);
        let a = spec.records.iter().find(|r| r.canonical_word == "a").unwrap();
        assert_eq!(a.orientation_partner, "A");
    }

    #[test]
    fn short_words_keep_the_systole() {
        let p = bolza_generators();
        let spec = enumerate_classes(&p, 6, 6.5).unwrap();
        assert!((spec.systole().unwrap() - 3.057142).abs() < 1e-6);
        assert_eq!(spec.diagnostics.unpaired_classes, 0);
        assert_eq!(spec.diagnostics.trace_checksum_failures, 0);
        for s in spec.shells() {
            assert_eq!(s.count % 2, 0, "shell at {}", s.length);
        }
    }

    #[test]
    fn parameters_are_validated() {
        let p = bolza_generators();
        assert!(enumerate_classes(&p, 0, 5.0).is_err());
        assert!(enumerate_classes(&p, 2, -1.0).is_err());
    }
}
