//! Noncrossing partitions: enumeration, refinement order, Kreweras
//! complements and the Möbius function.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set accepted by [`enumerate_nc`].
pub const MAX_ENUM: usize = 14;

/// A noncrossing partition of `{1,…,n}` in canonical form: blocks sorted by
/// their minimum, elements ascending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct NcPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl fmt::Debug for NcPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NcPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl TryFrom<Vec<Vec<usize>>> for NcPartition {
    type Error = Error;
    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.iter().map(|b| b.len()).sum();
        NcPartition::new(n, blocks)
    }
}

impl From<NcPartition> for Vec<Vec<usize>> {
    fn from(p: NcPartition) -> Self {
        p.blocks
    }
}

/// Checks that `blocks` is a set partition of `{1,…,n}`, returning the block
/// label of each element (0-based, in first-seen order of the input).
fn labels_of(n: usize, blocks: &[Vec<usize>]) -> Result<Vec<usize>> {
    let mut label = vec![usize::MAX; n];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::Malformed("empty block".into()));
        }
        for &x in block {
            if x == 0 || x > n {
                return Err(Error::Malformed(format!("element {x} outside 1..={n}")));
            }
            if label[x - 1] != usize::MAX {
                return Err(Error::Malformed(format!("element {x} appears twice")));
            }
            label[x - 1] = b;
        }
    }
    if let Some(i) = label.iter().position(|&l| l == usize::MAX) {
        return Err(Error::Malformed(format!("element {} is not covered", i + 1)));
    }
    Ok(label)
}

fn crossing(label: &[usize]) -> bool {
    // Stack test: scanning left to right, a block may only be revisited while
    // it is on top of the stack of still-open blocks.
    let mut last = BTreeMap::new();
    for (i, &l) in label.iter().enumerate() {
        last.insert(l, i);
    }
    let mut stack: Vec<usize> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, &l) in label.iter().enumerate() {
        if !seen.insert(l) {
            if stack.last() != Some(&l) {
                return true;
            }
        } else {
            stack.push(l);
        }
        if last[&l] == i {
            if stack.last() != Some(&l) {
                return true;
            }
            stack.pop();
        }
    }
    false
}

/// Is the set partition `blocks` of `{1,…,n}` noncrossing?
pub fn is_noncrossing(n: usize, blocks: &[Vec<usize>]) -> Result<bool> {
    Ok(!crossing(&labels_of(n, blocks)?))
}

impl NcPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::SizeLimit { n, max: usize::MAX });
        }
        let label = labels_of(n, &blocks)?;
        if crossing(&label) {
            return Err(Error::Malformed(format!("blocks {blocks:?} cross")));
        }
        Ok(Self::from_labels(&label))
    }

    /// Builds the canonical partition whose element `i` (0-based) lies in block `label[i]`.
    /// The labels need not be canonical; crossing is not checked.
    pub(crate) fn from_labels(label: &[usize]) -> Self {
        let mut map: BTreeMap<usize, usize> = BTreeMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &l) in label.iter().enumerate() {
            let b = *map.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i + 1);
        }
        NcPartition { n: label.len(), blocks }
    }

    /// `0_n`, all singletons.
    pub fn zero(n: usize) -> Self {
        NcPartition { n, blocks: (1..=n).map(|i| vec![i]).collect() }
    }

    /// `1_n`, a single block.
    pub fn one(n: usize) -> Self {
        NcPartition { n, blocks: vec![(1..=n).collect()] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks, `|π|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index (0-based, canonical order) of each element.
    pub fn labels(&self) -> Vec<usize> {
        let mut l = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                l[x - 1] = b;
            }
        }
        l
    }

    /// Sorted block sizes, the isomorphism type of `[0_n, π]`.
    pub fn type_key(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.blocks.iter().map(|b| b.len()).collect();
        t.sort_unstable();
        t
    }

    /// The next element of each block in cyclic order, as a 0-based permutation.
    fn as_permutation(&self) -> Vec<usize> {
        let mut p = vec![0; self.n];
        for b in &self.blocks {
            for (k, &x) in b.iter().enumerate() {
                p[x - 1] = b[(k + 1) % b.len()] - 1;
            }
        }
        p
    }

    fn from_permutation(p: &[usize]) -> Self {
        let mut label = vec![usize::MAX; p.len()];
        for start in 0..p.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let mut i = start;
            while label[i] == usize::MAX {
                label[i] = start;
                i = p[i];
            }
        }
        Self::from_labels(&label)
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ENUM {
        Err(Error::SizeLimit { n, max: MAX_ENUM })
    } else {
        Ok(())
    }
}

/// All of `NC(n)` in canonical form, `1 ≤ n ≤ 14`.
pub fn enumerate_nc(n: usize) -> Result<Vec<NcPartition>> {
    check_size(n)?;
    let mut out = Vec::new();
    let mut label = vec![0usize; n];
    let mut stack = Vec::new();
    grow(0, 0, &mut label, &mut stack, &mut out);
    Ok(out)
}

/// Shared, lazily built copy of `NC(n)`.
pub fn nc_cached(n: usize) -> Result<Arc<Vec<NcPartition>>> {
    static CACHE: OnceLock<Vec<OnceLock<Arc<Vec<NcPartition>>>>> = OnceLock::new();
    check_size(n)?;
    let slots = CACHE.get_or_init(|| (0..=MAX_ENUM).map(|_| OnceLock::new()).collect());
    Ok(slots[n].get_or_init(|| Arc::new(enumerate_nc(n).expect("size checked"))).clone())
}

// Element i either opens a new block or joins an open block, closing every
// block opened after it.
fn grow(i: usize, nblocks: usize, label: &mut [usize], stack: &mut Vec<usize>, out: &mut Vec<NcPartition>) {
    if i == label.len() {
        out.push(NcPartition::from_labels(label));
        return;
    }
    for depth in (0..stack.len()).rev() {
        let b = stack[depth];
        let saved: Vec<usize> = stack.drain(depth + 1..).collect();
        label[i] = b;
        grow(i + 1, nblocks, label, stack, out);
        stack.extend(saved);
    }
    label[i] = nblocks;
    stack.push(nblocks);
    grow(i + 1, nblocks + 1, label, stack, out);
    stack.pop();
}

fn same_n(a: &NcPartition, b: &NcPartition) -> Result<()> {
    if a.n != b.n {
        Err(Error::Dimension { expected: a.n, got: b.n })
    } else {
        Ok(())
    }
}

/// Refinement order: every block of `sigma` lies inside a block of `pi`.
pub fn leq(sigma: &NcPartition, pi: &NcPartition) -> Result<bool> {
    same_n(sigma, pi)?;
    let lp = pi.labels();
    Ok(sigma
        .blocks
        .iter()
        .all(|b| b.iter().all(|&x| lp[x - 1] == lp[b[0] - 1])))
}

/// `Kr(π)`, computed as the permutation `π⁻¹γ` with `γ = (1 2 … n)`.
pub fn kreweras(pi: &NcPartition) -> NcPartition {
    let n = pi.n;
    let p = pi.as_permutation();
    let mut pinv = vec![0; n];
    for (i, &j) in p.iter().enumerate() {
        pinv[j] = i;
    }
    let k: Vec<usize> = (0..n).map(|i| pinv[(i + 1) % n]).collect();
    NcPartition::from_permutation(&k)
}

/// `Kr(π)` by exhaustive search: the coarsest `σ ∈ NC(n)` such that `π` on
/// `1,…,n` together with `σ` on the interleaved barred points is noncrossing.
pub fn kreweras_by_search(pi: &NcPartition) -> Result<NcPartition> {
    let n = pi.n;
    let lp = pi.labels();
    let mut best: Option<NcPartition> = None;
    for sigma in enumerate_nc(n)? {
        let ls = sigma.labels();
        // i ↦ 2i, ī ↦ 2i+1 on 0..2n
        let joint: Vec<usize> = (0..2 * n)
            .map(|k| if k % 2 == 0 { lp[k / 2] } else { n + ls[k / 2] })
            .collect();
        if crossing(&joint) {
            continue;
        }
        if best.as_ref().map(|b| sigma.len() < b.len()).unwrap_or(true) {
            best = Some(sigma);
        }
    }
    Ok(best.expect("0_n is always compatible"))
}

/// Restricts `sigma` to the ordered ground set `elems` and relabels it to `{1,…,k}`.
pub fn restrict(sigma: &NcPartition, elems: &[usize]) -> NcPartition {
    let ls = sigma.labels();
    let label: Vec<usize> = elems.iter().map(|&x| ls[x - 1]).collect();
    NcPartition::from_labels(&label)
}

/// `Kr_π(σ)`: the blockwise Kreweras complement of `σ` inside each block of `π`.
pub fn relative_kreweras(sigma: &NcPartition, pi: &NcPartition) -> Result<NcPartition> {
    if !leq(sigma, pi)? {
        return Err(Error::OrderViolation(format!("{sigma} is not below {pi}")));
    }
    let mut label = vec![0usize; sigma.n];
    let mut next = 0;
    for v in &pi.blocks {
        let k = kreweras(&restrict(sigma, v));
        for b in &k.blocks {
            for &x in b {
                label[v[x - 1] - 1] = next;
            }
            next += 1;
        }
    }
    Ok(NcPartition::from_labels(&label))
}

static FULL_MOBIUS: Mutex<Vec<i64>> = Mutex::new(Vec::new());

/// `μ(0_k, 1_k)`, from `Σ_{τ ∈ NC(k)} μ(τ, 1_k) = 0` and the product structure of intervals.
pub fn mobius_full(k: usize) -> i64 {
    if k <= 1 {
        return 1;
    }
    if let Some(&v) = FULL_MOBIUS.lock().unwrap().get(k) {
        return v;
    }
    let mut sum = 0i64;
    for tau in enumerate_nc(k).expect("k within enumeration range") {
        if tau.len() == k {
            continue;
        }
        sum += kreweras(&tau).blocks.iter().map(|b| mobius_full(b.len())).product::<i64>();
    }
    let v = -sum;
    let mut cache = FULL_MOBIUS.lock().unwrap();
    if cache.len() <= k {
        cache.resize(k + 1, 0);
    }
    cache[k] = v;
    cache[0] = 1;
    cache[1] = 1;
    v
}

/// `μ(σ, π)`. The interval `[σ, π]` is a product of full lattices `NC(|V|)`
/// over the blocks `V` of `Kr_π(σ)`, so the value is a product of [`mobius_full`].
pub fn mobius(sigma: &NcPartition, pi: &NcPartition) -> Result<i64> {
    let k = relative_kreweras(sigma, pi)?;
    Ok(k.blocks.iter().map(|b| mobius_full(b.len())).product())
}

/// The closed interval `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcInterval {
    pub lower: NcPartition,
    pub upper: NcPartition,
    pub elements: Vec<NcPartition>,
}

/// All `τ` with `σ ≤ τ ≤ π`.
pub fn interval(sigma: &NcPartition, pi: &NcPartition) -> Result<NcInterval> {
    if !leq(sigma, pi)? {
        return Err(Error::OrderViolation(format!("{sigma} is not below {pi}")));
    }
    let n = sigma.n;
    let ls = sigma.labels();
    // For each block of π, the admissible ways of merging the σ-blocks inside it.
    let mut per_block: Vec<Vec<Vec<usize>>> = Vec::new();
    for v in &pi.blocks {
        let mut sub: Vec<usize> = Vec::new(); // σ-block labels inside v, by first appearance
        for &x in v {
            if !sub.contains(&ls[x - 1]) {
                sub.push(ls[x - 1]);
            }
        }
        let mut options = Vec::new();
        for rho in enumerate_nc(sub.len())? {
            let lr = rho.labels();
            let merged: Vec<usize> = v
                .iter()
                .map(|&x| lr[sub.iter().position(|&s| s == ls[x - 1]).unwrap()])
                .collect();
            if !crossing(&merged) {
                options.push(merged);
            }
        }
        per_block.push(options);
    }
    let mut elements = Vec::new();
    let mut choice = vec![0usize; per_block.len()];
    loop {
        let mut label = vec![0usize; n];
        for (bi, v) in pi.blocks.iter().enumerate() {
            for (k, &x) in v.iter().enumerate() {
                label[x - 1] = bi * n + per_block[bi][choice[bi]][k];
            }
        }
        elements.push(NcPartition::from_labels(&label));
        let mut j = 0;
        while j < choice.len() {
            choice[j] += 1;
            if choice[j] < per_block[j].len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
        if j == choice.len() {
            break;
        }
    }
    elements.sort();
    Ok(NcInterval { lower: sigma.clone(), upper: pi.clone(), elements })
}

/// `Cat(n) = (2n)! / (n! (n+1)!)`.
pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(blocks: &[&[usize]]) -> NcPartition {
        let v: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        NcPartition::try_from(v).unwrap()
    }

    #[test]
    fn counts_are_catalan() {
        for n in 1..=10 {
            let all = enumerate_nc(n).unwrap();
            assert_eq!(all.len() as u64, catalan(n), "n = {n}");
            let mut sorted = all.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), all.len());
        }
        assert_eq!(enumerate_nc(1).unwrap(), vec![p(&[&[1]])]);
        assert!(matches!(enumerate_nc(0), Err(Error::SizeLimit { .. })));
        assert!(matches!(enumerate_nc(15), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn enumeration_matches_filtered_set_partitions() {
        // all set partitions of {1..6} via restricted growth strings
        fn rgs(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i == n {
                out.push(cur.clone());
                return;
            }
            for l in 0..=max + 1 {
                cur.push(l);
                rgs(i + 1, n, max.max(l), cur, out);
                cur.pop();
            }
        }
        let mut all = Vec::new();
        rgs(1, 6, 0, &mut vec![0], &mut all);
        let mut nc: Vec<NcPartition> = all
            .iter()
            .filter(|l| !crossing(l))
            .map(|l| NcPartition::from_labels(l))
            .collect();
        nc.sort();
        let mut e = enumerate_nc(6).unwrap();
        e.sort();
        assert_eq!(nc, e);
    }

    #[test]
    fn noncrossing_check() {
        assert!(!is_noncrossing(4, &[vec![1, 3], vec![2, 4]]).unwrap());
        assert!(is_noncrossing(4, &[vec![1, 4], vec![2, 3]]).unwrap());
        assert!(is_noncrossing(3, &[vec![1, 2, 3]]).unwrap());
        assert!(is_noncrossing(3, &[vec![1, 2]]).is_err());
        assert!(is_noncrossing(3, &[vec![1, 2], vec![2, 3]]).is_err());
        assert!(NcPartition::try_from(vec![vec![1, 3], vec![2, 4]]).is_err());
    }

    #[test]
    fn canonical_form() {
        let a = NcPartition::new(4, vec![vec![3, 2], vec![4, 1]]).unwrap();
        assert_eq!(a.blocks(), &[vec![1, 4], vec![2, 3]]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[[1,4],[2,3]]");
        let back: NcPartition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn order() {
        assert!(leq(&NcPartition::zero(3), &NcPartition::one(3)).unwrap());
        assert!(!leq(&p(&[&[1, 2], &[3]]), &p(&[&[1], &[2, 3]])).unwrap());
        let x = p(&[&[1, 4], &[2, 3]]);
        assert!(leq(&x, &x).unwrap());
        assert!(leq(&x, &NcPartition::zero(3)).is_err());
    }

    #[test]
    fn kreweras_examples() {
        for n in 1..=5 {
            assert_eq!(kreweras(&NcPartition::zero(n)), NcPartition::one(n));
            assert_eq!(kreweras(&NcPartition::one(n)), NcPartition::zero(n));
        }
        assert_eq!(kreweras(&p(&[&[1, 2], &[3]])), p(&[&[1], &[2, 3]]));
        assert_eq!(kreweras(&p(&[&[1, 3], &[2], &[4]])), p(&[&[1, 2], &[3, 4]]));
    }

    #[test]
    fn kreweras_agrees_with_search() {
        for n in 1..=7 {
            for pi in enumerate_nc(n).unwrap() {
                assert_eq!(kreweras(&pi), kreweras_by_search(&pi).unwrap(), "{pi}");
            }
        }
    }

    #[test]
    fn search_maximum_is_unique() {
        // every compatible σ must refine the reported maximum
        for pi in enumerate_nc(5).unwrap() {
            let k = kreweras(&pi);
            let lp = pi.labels();
            for sigma in enumerate_nc(5).unwrap() {
                let ls = sigma.labels();
                let joint: Vec<usize> =
                    (0..10).map(|j| if j % 2 == 0 { lp[j / 2] } else { 5 + ls[j / 2] }).collect();
                if !crossing(&joint) {
                    assert!(leq(&sigma, &k).unwrap());
                }
            }
        }
    }

    #[test]
    fn kreweras_cardinality_and_injectivity() {
        for n in 1..=8 {
            let all = enumerate_nc(n).unwrap();
            let mut images: Vec<NcPartition> = all.iter().map(kreweras).collect();
            for (pi, k) in all.iter().zip(&images) {
                assert_eq!(pi.len() + k.len(), n + 1);
            }
            images.sort();
            images.dedup();
            assert_eq!(images.len(), all.len());
        }
    }

    #[test]
    fn relative_kreweras_basics() {
        for n in 1..=5 {
            let all = enumerate_nc(n).unwrap();
            for s in &all {
                assert_eq!(relative_kreweras(s, &NcPartition::one(n)).unwrap(), kreweras(s));
                assert_eq!(relative_kreweras(s, s).unwrap(), NcPartition::zero(n));
                assert_eq!(relative_kreweras(&NcPartition::zero(n), s).unwrap(), *s);
                for pi in &all {
                    if leq(s, pi).unwrap() {
                        let k = relative_kreweras(s, pi).unwrap();
                        assert_eq!(s.len() + k.len(), n + pi.len());
                    } else {
                        assert!(relative_kreweras(s, pi).is_err());
                    }
                }
            }
        }
    }

    #[test]
    fn cardinality_identity() {
        for n in 1..=6 {
            let all = enumerate_nc(n).unwrap();
            for pi in &all {
                for s in &all {
                    if !leq(s, pi).unwrap() {
                        continue;
                    }
                    let r = relative_kreweras(s, pi).unwrap();
                    assert_eq!(
                        kreweras(pi).len() + 1,
                        kreweras(s).len() + kreweras(&r).len(),
                        "σ = {s}, π = {pi}"
                    );
                }
            }
        }
    }

    // Möbius values from the defining recursion over explicit intervals.
    fn mobius_direct(s: &NcPartition, pi: &NcPartition, all: &[NcPartition]) -> i64 {
        if s == pi {
            return 1;
        }
        let mut sum = 0;
        for t in all {
            if t != s && leq(s, t).unwrap() && leq(t, pi).unwrap() {
                sum += mobius_direct(t, pi, all);
            }
        }
        -sum
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius_full(2), -1);
        assert_eq!(mobius_full(3), 2);
        for k in 1..=9 {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(mobius_full(k), sign * catalan(k - 1) as i64);
        }
        let x = p(&[&[1, 2], &[3]]);
        assert_eq!(mobius(&x, &x).unwrap(), 1);
        assert!(mobius(&NcPartition::one(3), &NcPartition::zero(3)).is_err());
    }

    #[test]
    fn mobius_matches_direct_recursion() {
        for n in 1..=5 {
            let all = enumerate_nc(n).unwrap();
            for s in &all {
                for pi in &all {
                    if leq(s, pi).unwrap() {
                        assert_eq!(mobius(s, pi).unwrap(), mobius_direct(s, pi, &all));
                    }
                }
            }
        }
    }

    #[test]
    fn mobius_axiom() {
        for n in 1..=6 {
            let all = enumerate_nc(n).unwrap();
            for s in &all {
                for pi in &all {
                    if !leq(s, pi).unwrap() {
                        continue;
                    }
                    let sum: i64 = interval(s, pi)
                        .unwrap()
                        .elements
                        .iter()
                        .map(|t| mobius(t, pi).unwrap())
                        .sum();
                    assert_eq!(sum, if s == pi { 1 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn interval_matches_filter() {
        for n in 1..=6 {
            let all = enumerate_nc(n).unwrap();
            for s in &all {
                for pi in &all {
                    if !leq(s, pi).unwrap() {
                        continue;
                    }
                    let mut want: Vec<NcPartition> = all
                        .iter()
                        .filter(|t| leq(s, t).unwrap() && leq(t, pi).unwrap())
                        .cloned()
                        .collect();
                    want.sort();
                    assert_eq!(interval(s, pi).unwrap().elements, want);
                }
            }
        }
        let x = p(&[&[1, 3], &[2]]);
        assert_eq!(interval(&x, &x).unwrap().elements, vec![x]);
    }

    #[test]
    fn poset_isomorphism() {
        for n in 1..=6 {
            for s in enumerate_nc(n).unwrap() {
                let up = interval(&s, &NcPartition::one(n)).unwrap().elements;
                let down = interval(&NcPartition::zero(n), &kreweras(&s)).unwrap().elements;
                assert_eq!(up.len(), down.len());
                let mut img: Vec<NcPartition> =
                    up.iter().map(|t| relative_kreweras(&s, t).unwrap()).collect();
                for (a, ia) in up.iter().zip(&img) {
                    for (b, ib) in up.iter().zip(&img) {
                        assert_eq!(leq(a, b).unwrap(), leq(ia, ib).unwrap());
                    }
                }
                img.sort();
                assert_eq!(img, down);
            }
        }
    }
}
