//! Symmetric-group machinery for invariant labels.
//!
//! A grade-`m` invariant is addressed by a tuple of permutations of `m`
//! letters. Tuples related by simultaneous conjugation (`≈`) give the same
//! mixed-state polynomial; tuples related by the two-sided diagonal action
//! (`∼`) give the same pure-state polynomial. This module enumerates the
//! `≈`-orbits, picks canonical representatives, and splits a `∼`-class into
//! its `≈`-classes.
//!
//! Permutations are stored zero-based internally; the text form and
//! [`Perm::from_images`] use one-based image lists. Cycle notation follows
//! `s = (123)` ↦ `[2,3,1]` and `t = (12)(3)` ↦ `[2,1,3]`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest grade accepted by the brute-force routines.
pub const MAX_GRADE: usize = 8;

/// Upper bound on the number of elementary steps an enumeration may take.
pub const ENUMERATION_LIMIT: u128 = 1 << 28;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(m: usize) -> Self {
        Perm {
            images: (0..m).collect(),
        }
    }

    /// Builds a permutation from a one-based image list, `images[l-1] = σ(l)`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::NotAPermutation(images.to_vec()));
        }
        Self::from_zero_based(images.iter().map(|&x| x - 1).collect())
            .map_err(|_| Error::NotAPermutation(images.to_vec()))
    }

    pub fn from_zero_based(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &x in &images {
            if x >= m || seen[x] {
                return Err(Error::NotAPermutation(
                    images.iter().map(|v| v + 1).collect(),
                ));
            }
            seen[x] = true;
        }
        Ok(Perm { images })
    }

    /// Named element of `S_2` or `S_3` (`e`, `t`, `s`, `s2`, `ts`, `ts2`).
    pub fn named(name: &str, m: usize) -> Result<Self> {
        let canon = match name {
            "s^2" => "s2",
            "ts^2" => "ts2",
            other => other,
        };
        match (canon, m) {
            ("e", _) => Ok(Perm::identity(m)),
            ("t", 2) => Ok(Perm { images: vec![1, 0] }),
            ("t", 3) => Ok(Perm {
                images: vec![1, 0, 2],
            }),
            ("s", 3) => Ok(Perm {
                images: vec![1, 2, 0],
            }),
            ("s2", 3) => Ok(Perm {
                images: vec![2, 0, 1],
            }),
            ("ts", 3) => Ok(Perm {
                images: vec![0, 2, 1],
            }),
            ("ts2", 3) => Ok(Perm {
                images: vec![2, 1, 0],
            }),
            _ => Err(Error::Parse(format!(
                "unknown permutation name '{name}' for m = {m}"
            ))),
        }
    }

    /// Inverse of [`Perm::named`] for grades up to 3.
    pub fn name(&self) -> Option<&'static str> {
        match self.images.as_slice() {
            [] | [0] | [0, 1] | [0, 1, 2] => Some("e"),
            [1, 0] | [1, 0, 2] => Some("t"),
            [1, 2, 0] => Some("s"),
            [2, 0, 1] => Some("s2"),
            [0, 2, 1] => Some("ts"),
            [2, 1, 0] => Some("ts2"),
            _ => None,
        }
    }

    pub fn m(&self) -> usize {
        self.images.len()
    }

    /// Zero-based images.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }

    #[inline]
    pub fn apply(&self, l: usize) -> usize {
        self.images[l]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(l, &x)| l == x)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.m()];
        for (l, &x) in self.images.iter().enumerate() {
            inv[x] = l;
        }
        Perm { images: inv }
    }

    /// Disjoint cycles, each starting at its smallest element, in order of
    /// that element. Fixed points appear as one-element cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.m()];
        let mut out = Vec::new();
        for start in 0..self.m() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// `β·self·β⁻¹` without allocating an inverse.
    fn conjugated_by(&self, beta: &Perm) -> Perm {
        let mut images = vec![0; self.m()];
        for l in 0..self.m() {
            images[beta.images[l]] = beta.images[self.images[l]];
        }
        Perm { images }
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m() <= 3 {
            if let Some(name) = self.name() {
                return f.write_str(name);
            }
        }
        let parts: Vec<String> = self.one_based().iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `(a∘b)(l) = a(b(l))`.
pub fn compose(a: &Perm, b: &Perm) -> Result<Perm> {
    if a.m() != b.m() {
        return Err(Error::GradeMismatch(a.m(), b.m()));
    }
    Ok(Perm {
        images: b.images.iter().map(|&x| a.images[x]).collect(),
    })
}

/// `β·g·β⁻¹`.
pub fn conjugate(beta: &Perm, g: &Perm) -> Result<Perm> {
    if beta.m() != g.m() {
        return Err(Error::GradeMismatch(beta.m(), g.m()));
    }
    Ok(g.conjugated_by(beta))
}

/// All permutations of `m` letters in lexicographic order of their images.
pub fn all_perms(m: usize) -> Vec<Perm> {
    let mut cur: Vec<usize> = (0..m).collect();
    let mut out = vec![Perm {
        images: cur.clone(),
    }];
    while next_permutation(&mut cur) {
        out.push(Perm {
            images: cur.clone(),
        });
    }
    out
}

fn next_permutation(xs: &mut [usize]) -> bool {
    let n = xs.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

pub(crate) fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

pub(crate) fn check_grade(m: usize) -> Result<()> {
    if m > MAX_GRADE {
        Err(Error::GradeTooLarge { m, max: MAX_GRADE })
    } else {
        Ok(())
    }
}

pub(crate) fn check_budget(what: &'static str, size: u128) -> Result<()> {
    if size > ENUMERATION_LIMIT {
        Err(Error::ResourceLimit {
            what,
            size,
            limit: ENUMERATION_LIMIT,
        })
    } else {
        Ok(())
    }
}

/// An `r`-tuple of permutations of equal grade.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PermTuple {
    m: usize,
    perms: Vec<Perm>,
}

impl PermTuple {
    pub fn new(m: usize, perms: Vec<Perm>) -> Result<Self> {
        if let Some(p) = perms.iter().find(|p| p.m() != m) {
            return Err(Error::GradeMismatch(m, p.m()));
        }
        Ok(PermTuple { m, perms })
    }

    pub fn identity(m: usize, r: usize) -> Self {
        PermTuple {
            m,
            perms: vec![Perm::identity(m); r],
        }
    }

    /// Convenience constructor from named elements, e.g. `&["s", "s2"]`.
    pub fn from_names(m: usize, names: &[&str]) -> Result<Self> {
        let perms = names
            .iter()
            .map(|n| Perm::named(n, m))
            .collect::<Result<_>>()?;
        Ok(PermTuple { m, perms })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn get(&self, j: usize) -> &Perm {
        &self.perms[j]
    }

    /// `ı(σ) = (σ₁,…,σ_r,e)`.
    pub fn with_identity_appended(&self) -> PermTuple {
        let mut perms = self.perms.clone();
        perms.push(Perm::identity(self.m));
        PermTuple { m: self.m, perms }
    }

    /// Simultaneous conjugation `β·σ_j·β⁻¹`.
    pub fn conjugate_by(&self, beta: &Perm) -> Result<PermTuple> {
        if beta.m() != self.m {
            return Err(Error::GradeMismatch(self.m, beta.m()));
        }
        Ok(self.conjugated_unchecked(beta))
    }

    fn conjugated_unchecked(&self, beta: &Perm) -> PermTuple {
        PermTuple {
            m: self.m,
            perms: self.perms.iter().map(|p| p.conjugated_by(beta)).collect(),
        }
    }

    /// The tuple restricted to a union of orbits, relabelled to `0..vertices.len()`
    /// in the order given. `vertices` must be closed under every component.
    pub fn restrict(&self, vertices: &[usize]) -> Result<PermTuple> {
        let mut pos = vec![usize::MAX; self.m];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let perms = self
            .perms
            .iter()
            .map(|p| {
                let images = vertices
                    .iter()
                    .map(|&v| pos[p.apply(v)])
                    .collect::<Vec<_>>();
                if images.contains(&usize::MAX) {
                    return Err(Error::DimensionMismatch(
                        "vertex subset is not closed under the permutations".into(),
                    ));
                }
                Perm::from_zero_based(images)
            })
            .collect::<Result<_>>()?;
        Ok(PermTuple {
            m: vertices.len(),
            perms,
        })
    }

    /// Parses the text form: comma-separated names (`e,t,s,s2,ts,ts2`) or
    /// one-based image lists like `[2,1,3]`. `()` or an empty string is the
    /// empty tuple.
    pub fn parse(text: &str, m: usize) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "()" {
            return Ok(PermTuple::identity(m, 0));
        }
        let chars: Vec<char> = text.chars().collect();
        let mut perms = Vec::new();
        let mut i = 0;
        loop {
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            if i >= chars.len() {
                return Err(Error::Parse(format!("dangling separator in '{text}'")));
            }
            let perm = if chars[i] == '[' {
                let close = chars[i..]
                    .iter()
                    .position(|&c| c == ']')
                    .map(|p| p + i)
                    .ok_or_else(|| Error::Parse(format!("unclosed '[' in '{text}'")))?;
                let body: String = chars[i + 1..close].iter().collect();
                let images = body
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<usize>().map_err(|_| {
                            Error::Parse(format!("bad image '{}' in '{text}'", s.trim()))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                if images.len() != m {
                    return Err(Error::Parse(format!(
                        "image list [{body}] has length {} but m = {m}",
                        images.len()
                    )));
                }
                i = close + 1;
                Perm::from_images(&images)?
            } else {
                let end = chars[i..]
                    .iter()
                    .position(|&c| c == ',')
                    .map(|p| p + i)
                    .unwrap_or(chars.len());
                let name: String = chars[i..end].iter().collect();
                i = end;
                Perm::named(name.trim(), m)?
            };
            perms.push(perm);
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            if i >= chars.len() {
                break;
            }
            if chars[i] != ',' {
                return Err(Error::Parse(format!(
                    "expected ',' at position {i} in '{text}'"
                )));
            }
            i += 1;
        }
        Ok(PermTuple { m, perms })
    }
}

impl fmt::Debug for PermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl fmt::Display for PermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.perms.is_empty() {
            return f.write_str("()");
        }
        let parts: Vec<String> = self.perms.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Canonical representative of a `≈`-class: the lexicographically smallest
/// simultaneous conjugate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrbitLabel(PermTuple);

impl OrbitLabel {
    pub fn rep(&self) -> &PermTuple {
        &self.0
    }

    pub fn into_rep(self) -> PermTuple {
        self.0
    }

    pub fn m(&self) -> usize {
        self.0.m
    }

    pub fn r(&self) -> usize {
        self.0.r()
    }

    pub fn parse(text: &str, m: usize) -> Result<Self> {
        canonical_form(&PermTuple::parse(text, m)?)
    }
}

impl fmt::Debug for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0)
    }
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A `∼`-class written as the disjoint union of its `≈`-classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimClass {
    /// Sorted, pairwise distinct.
    pub members: Vec<OrbitLabel>,
    /// The class of `ı(σ)`; every tuple in it ends with `e`.
    pub anchor: OrbitLabel,
}

pub fn canonical_form(sigma: &PermTuple) -> Result<OrbitLabel> {
    check_grade(sigma.m)?;
    let betas = all_perms(sigma.m);
    Ok(OrbitLabel(canonical_with(sigma, &betas)))
}

fn canonical_with(sigma: &PermTuple, betas: &[Perm]) -> PermTuple {
    let mut best = sigma.clone();
    for beta in betas {
        let cand = sigma.conjugated_unchecked(beta);
        if cand < best {
            best = cand;
        }
    }
    best
}

/// The full `≈`-orbit of a tuple, sorted and deduplicated.
pub fn orbit(sigma: &PermTuple) -> Result<Vec<PermTuple>> {
    check_grade(sigma.m)?;
    let set: BTreeSet<PermTuple> = all_perms(sigma.m)
        .iter()
        .map(|b| sigma.conjugated_unchecked(b))
        .collect();
    Ok(set.into_iter().collect())
}

/// All of `S_m^r / S_m`, sorted.
pub fn enumerate_orbits(m: usize, r: usize) -> Result<Vec<OrbitLabel>> {
    check_grade(m)?;
    let fact = factorial(m);
    let tuples = fact.checked_pow(r as u32).unwrap_or(u128::MAX);
    check_budget("orbit enumeration", tuples.saturating_mul(fact))?;

    let group = all_perms(m);
    let mut labels = BTreeSet::new();
    let mut idx = vec![0usize; r];
    loop {
        let tuple = PermTuple {
            m,
            perms: idx.iter().map(|&i| group[i].clone()).collect(),
        };
        // Only canonical tuples are kept; each orbit contributes exactly one.
        if canonical_with(&tuple, &group) == tuple {
            labels.insert(OrbitLabel(tuple));
        }
        if !advance(&mut idx, group.len()) {
            break;
        }
    }
    Ok(labels.into_iter().collect())
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// True iff the group generated by the components has a single orbit on the
/// `m` letters.
pub fn is_transitive(sigma: &PermTuple) -> bool {
    orbits_of_generated_group(sigma).len() <= 1
}

/// Orbits of `⟨σ₁,…,σ_r⟩` on `{0..m}`, each sorted, ordered by smallest element.
pub fn orbits_of_generated_group(sigma: &PermTuple) -> Vec<Vec<usize>> {
    let m = sigma.m;
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for p in &sigma.perms {
        for l in 0..m {
            let (a, b) = (find(&mut parent, l), find(&mut parent, p.apply(l)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; m];
    for l in 0..m {
        let root = find(&mut parent, l);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(l);
    }
    groups
}

/// Labels of the algebraically independent generators: the transitive ones.
///
/// For `m = 1` the single label is transitive and is returned, so the norm
/// counts as a generator.
pub fn generator_labels(m: usize, r: usize) -> Result<Vec<OrbitLabel>> {
    Ok(enumerate_orbits(m, r)?
        .into_iter()
        .filter(|l| is_transitive(l.rep()))
        .collect())
}

/// Splits `[ı(σ)]_∼` into its `≈`-classes. `sigma` is a pure-state label
/// (arity `k-1`).
pub fn sim_decompose(sigma: &PermTuple) -> Result<SimClass> {
    let m = sigma.m;
    check_grade(m)?;
    let fact = factorial(m);
    check_budget("double coset enumeration", fact * fact * fact)?;

    let embedded = sigma.with_identity_appended();
    let group = all_perms(m);
    let inverses: Vec<Perm> = group.iter().map(Perm::inverse).collect();
    let mut members = BTreeSet::new();
    for alpha in &group {
        for beta_inv in &inverses {
            let perms = embedded
                .perms
                .iter()
                .map(|p| {
                    let images = beta_inv
                        .images
                        .iter()
                        .map(|&x| alpha.images[p.images[x]])
                        .collect();
                    Perm { images }
                })
                .collect();
            let tuple = PermTuple { m, perms };
            members.insert(OrbitLabel(canonical_with(&tuple, &group)));
        }
    }
    let anchor = OrbitLabel(canonical_with(&embedded, &group));
    Ok(SimClass {
        members: members.into_iter().collect(),
        anchor,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum S3Class {
    E,
    S,
    T,
}

/// Representatives of `S_3^r / S_3` built position by position from
/// conjugacy-class patterns, without any search over the group. One tuple
/// per `≈`-class; these are generally not the lexicographic minima.
pub fn s3_orbit_representatives(r: usize) -> Result<Vec<PermTuple>> {
    check_budget(
        "S3 pattern enumeration",
        6u128.checked_pow(r as u32).unwrap_or(u128::MAX),
    )?;
    let names = ["e", "s", "s2", "t", "ts", "ts2"];
    let el: Vec<Perm> = names.iter().map(|n| Perm::named(n, 3).unwrap()).collect();
    let (e, s, s2, t, ts, ts2) = (&el[0], &el[1], &el[2], &el[3], &el[4], &el[5]);

    let mut out = Vec::new();
    let classes = [S3Class::E, S3Class::S, S3Class::T];
    let mut assign = vec![0usize; r];
    loop {
        let pattern: Vec<S3Class> = assign.iter().map(|&i| classes[i]).collect();
        let has_s = pattern.contains(&S3Class::S);

        // Each position lists the elements it may take given what came before.
        let mut partial: Vec<(Vec<Perm>, bool, bool, bool)> =
            vec![(Vec::new(), false, false, false)];
        for &class in &pattern {
            let mut next = Vec::new();
            for (prefix, seen_s, seen_t, seen_ts) in partial {
                let choices: Vec<&Perm> = match class {
                    S3Class::E => vec![e],
                    S3Class::S if !seen_s => vec![s],
                    S3Class::S => vec![s, s2],
                    S3Class::T if !seen_t => vec![t],
                    S3Class::T if has_s || seen_ts => vec![t, ts, ts2],
                    S3Class::T => vec![t, ts],
                };
                for c in choices {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    next.push((
                        p,
                        seen_s || class == S3Class::S,
                        seen_t || class == S3Class::T,
                        seen_ts || c == ts,
                    ));
                }
            }
            partial = next;
        }
        out.extend(
            partial
                .into_iter()
                .map(|(perms, ..)| PermTuple { m: 3, perms }),
        );
        if !advance(&mut assign, 3) {
            break;
        }
    }
    Ok(out)
}
