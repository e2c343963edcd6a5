//! Schreier coset graphs `X(G, K, ψ)` for finite groups given by a table,
//! lattices `Z^d`, and free products of copies of `Z_2`, and their
//! word-problem languages.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lang::{count_sequence, LabeledDigraph};

/// Largest number of cosets an exact construction may enumerate.
pub const COSET_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GroupSpec {
    /// `table[g][h]` is the index of `gh`; `subgroup` generates `K`.
    Finite {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
        subgroup: Vec<usize>,
    },
    /// `Z^d` with `K` generated by the given vectors.
    Lattice { d: usize, subgroup: Vec<Vec<i64>> },
    /// Free product of `factors` copies of `Z_2` with trivial `K`.
    FreeProductZ2 { factors: usize },
}

/// Group element in the representation of its family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupElement {
    Finite(usize),
    Lattice(Vec<i64>),
    /// Reduced word in the involutions `s_i`.
    Word {
        word: Vec<usize>,
    },
}

/// `ψ: Σ -> G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Presentation {
    pub map: BTreeMap<char, GroupElement>,
}

/// Splits on commas that are not inside parentheses.
pub fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur).trim().to_string());
        } else {
            cur.push(c);
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn parse_vector(s: &str) -> Result<Vec<i64>> {
    let inner = s
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    inner
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad integer {t:?} in {s:?}")))
        })
        .collect()
}

fn reduce_word(word: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for s in word {
        if out.last() == Some(&s) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

impl GroupSpec {
    /// `Z_2 = {1, t}`.
    pub fn z2(subgroup: Vec<usize>) -> Self {
        GroupSpec::Finite {
            table: vec![vec![0, 1], vec![1, 0]],
            names: Some(vec!["1".into(), "t".into()]),
            subgroup,
        }
    }

    /// `group` is `z2`, `zd:D` or `freeprod:K`; `subgroup` is `trivial` or a
    /// comma-separated list of elements.
    pub fn parse(group: &str, subgroup: &str) -> Result<Self> {
        let trivial = subgroup.trim().is_empty() || subgroup.trim() == "trivial";
        let (family, param) = group.split_once(':').unwrap_or((group, ""));
        let spec = match family {
            "z2" => {
                let gens = if trivial {
                    Vec::new()
                } else {
                    split_top_level(subgroup)
                };
                let mut idx = Vec::new();
                for g in gens {
                    idx.push(match g.as_str() {
                        "1" | "e" => 0,
                        "t" => 1,
                        other => {
                            return Err(Error::Parse(format!("unknown Z_2 element {other:?}")))
                        }
                    });
                }
                GroupSpec::z2(idx)
            }
            "zd" => {
                let d = param
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad dimension in {group:?}")))?;
                let subgroup = if trivial {
                    Vec::new()
                } else {
                    split_top_level(subgroup)
                        .iter()
                        .map(|g| parse_vector(g))
                        .collect::<Result<Vec<_>>>()?
                };
                GroupSpec::Lattice { d, subgroup }
            }
            "freeprod" => {
                if !trivial {
                    return Err(Error::Group(
                        "free products support only the trivial subgroup".into(),
                    ));
                }
                let factors = param
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad factor count in {group:?}")))?;
                GroupSpec::FreeProductZ2 { factors }
            }
            other => return Err(Error::Parse(format!("unknown group family {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Finite {
                table,
                names,
                subgroup,
            } => {
                let n = table.len();
                if n == 0
                    || table
                        .iter()
                        .any(|r| r.len() != n || r.iter().any(|&x| x >= n))
                {
                    return Err(Error::Group(
                        "multiplication table must be square with entries in range".into(),
                    ));
                }
                let e = (0..n)
                    .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
                    .ok_or_else(|| Error::Group("no identity element".into()))?;
                for a in 0..n {
                    if !(0..n).any(|b| table[a][b] == e && table[b][a] == e) {
                        return Err(Error::Group(format!("element {a} has no inverse")));
                    }
                    for b in 0..n {
                        for c in 0..n {
                            if table[table[a][b]][c] != table[a][table[b][c]] {
                                return Err(Error::Group(format!(
                                    "not associative at ({a},{b},{c})"
                                )));
                            }
                        }
                    }
                }
                if names.as_ref().is_some_and(|v| v.len() != n) {
                    return Err(Error::Group("one name per element required".into()));
                }
                if let Some(&g) = subgroup.iter().find(|&&g| g >= n) {
                    return Err(Error::Group(format!("subgroup generator {g} out of range")));
                }
            }
            GroupSpec::Lattice { d, subgroup } => {
                if *d == 0 {
                    return Err(Error::Group("lattice dimension must be >= 1".into()));
                }
                if subgroup.iter().any(|v| v.len() != *d) {
                    return Err(Error::Group(format!(
                        "subgroup generators must have {d} coordinates"
                    )));
                }
            }
            GroupSpec::FreeProductZ2 { factors } => {
                if *factors == 0 {
                    return Err(Error::Group(
                        "free product needs at least one factor".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn check_element(&self, g: &GroupElement) -> Result<()> {
        let ok = match (self, g) {
            (GroupSpec::Finite { table, .. }, GroupElement::Finite(i)) => *i < table.len(),
            (GroupSpec::Lattice { d, .. }, GroupElement::Lattice(v)) => v.len() == *d,
            (GroupSpec::FreeProductZ2 { factors }, GroupElement::Word { word }) => {
                word.iter().all(|&s| s < *factors) && reduce_word(word.iter().copied()) == *word
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Presentation(format!(
                "{g:?} is not an element of the group"
            )))
        }
    }

    /// Element syntax: a name or index (`t`), a vector (`(1,-1)` or `-1`),
    /// or a word in involutions (`s0s1`).
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let g = match self {
            GroupSpec::Finite { names, .. } => {
                let by_name = names.as_ref().and_then(|n| n.iter().position(|x| x == s));
                match by_name {
                    Some(i) => GroupElement::Finite(i),
                    None => GroupElement::Finite(
                        s.parse()
                            .map_err(|_| Error::Parse(format!("unknown group element {s:?}")))?,
                    ),
                }
            }
            GroupSpec::Lattice { .. } => GroupElement::Lattice(parse_vector(s)?),
            GroupSpec::FreeProductZ2 { .. } => {
                let word = s
                    .split('s')
                    .skip(1)
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad involution word {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if !s.starts_with('s') && !s.is_empty() {
                    return Err(Error::Parse(format!(
                        "involution words look like s0s1, got {s:?}"
                    )));
                }
                GroupElement::Word { word }
            }
        };
        self.check_element(&g)?;
        Ok(g)
    }
}

impl Presentation {
    pub fn new(map: BTreeMap<char, GroupElement>) -> Self {
        Self { map }
    }

    /// `a=t,b=(1,0)`.
    pub fn parse(spec: &GroupSpec, s: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in split_top_level(s) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected letter=element, got {item:?}")))?;
            let mut chars = k.trim().chars();
            let letter = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(Error::Parse(format!(
                        "letters must be single characters, got {k:?}"
                    )))
                }
            };
            if map.insert(letter, spec.parse_element(v)?).is_some() {
                return Err(Error::Presentation(format!(
                    "letter {letter:?} mapped twice"
                )));
            }
        }
        Ok(Self { map })
    }

    /// Elements must belong to the group and generate it as a semigroup.
    pub fn validate(&self, spec: &GroupSpec) -> Result<()> {
        if self.map.is_empty() {
            return Err(Error::Presentation(
                "presentation needs at least one letter".into(),
            ));
        }
        for g in self.map.values() {
            spec.check_element(g)?;
        }
        match spec {
            GroupSpec::Finite { table, .. } => {
                let gens: Vec<usize> = self.map.values().map(finite).collect();
                let mut seen = vec![false; table.len()];
                let mut queue: VecDeque<usize> = gens.iter().copied().collect();
                for &g in &gens {
                    seen[g] = true;
                }
                while let Some(x) = queue.pop_front() {
                    for &g in &gens {
                        let y = table[x][g];
                        if !seen[y] {
                            seen[y] = true;
                            queue.push_back(y);
                        }
                    }
                }
                if !seen.iter().all(|&s| s) {
                    return Err(Error::Presentation(
                        "ψ(Σ) does not generate the group".into(),
                    ));
                }
            }
            GroupSpec::Lattice { d, .. } => {
                for i in 0..*d {
                    for sign in [1, -1] {
                        let mut e = vec![0; *d];
                        e[i] = sign;
                        if !self
                            .map
                            .values()
                            .any(|g| *g == GroupElement::Lattice(e.clone()))
                        {
                            return Err(Error::Presentation(format!(
                                "ψ(Σ) must contain every ±e_i; missing {e:?}"
                            )));
                        }
                    }
                }
            }
            GroupSpec::FreeProductZ2 { factors } => {
                for s in 0..*factors {
                    if !self
                        .map
                        .values()
                        .any(|g| *g == GroupElement::Word { word: vec![s] })
                    {
                        return Err(Error::Presentation(format!(
                            "ψ(Σ) must contain the involution s{s}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn finite(g: &GroupElement) -> usize {
    match g {
        GroupElement::Finite(i) => *i,
        _ => unreachable!("checked against the family"),
    }
}

/// Row echelon basis of the lattice spanned by `gens`: pivots strictly
/// increase, are positive, and entries above each pivot are reduced into
/// `[0, pivot)`.
pub fn hermite_basis(gens: &[Vec<i64>], d: usize) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i128>> = gens
        .iter()
        .map(|g| g.iter().map(|&x| x as i128).collect())
        .filter(|r: &Vec<i128>| r.iter().any(|&x| x != 0))
        .collect();
    let mut basis: Vec<Vec<i128>> = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..d {
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            for &i in &nonzero {
                if i != p {
                    let q = rows[i][col].div_euclid(rows[p][col]);
                    let pr = rows[p].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pr) {
                        *x -= q * y;
                    }
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            let mut r = rows.swap_remove(i);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            basis.push(r);
            pivots.push(col);
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    for i in 0..basis.len() {
        for j in 0..i {
            let q = basis[j][pivots[i]].div_euclid(basis[i][pivots[i]]);
            let bi = basis[i].clone();
            for (x, y) in basis[j].iter_mut().zip(&bi) {
                *x -= q * y;
            }
        }
    }
    basis
        .into_iter()
        .map(|r| r.into_iter().map(|x| x as i64).collect())
        .collect()
}

/// Canonical representative of `v + L` for the lattice with the given
/// Hermite basis.
pub fn reduce_mod(v: &[i64], basis: &[Vec<i64>]) -> Vec<i64> {
    let mut v = v.to_vec();
    for b in basis {
        let p = b.iter().position(|&x| x != 0).unwrap();
        let q = v[p].div_euclid(b[p]);
        for (x, y) in v.iter_mut().zip(b) {
            *x -= q * y;
        }
    }
    v
}

/// Schreier graph rooted at the coset `K` (vertex 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchreierGraph {
    #[serde(flatten)]
    pub graph: LabeledDigraph,
    pub root: usize,
    /// Boundary edges were dropped; counts are exact only up to `radius`.
    pub truncated: bool,
    pub radius: usize,
    /// Canonical representative of each coset.
    pub cosets: Vec<String>,
}

/// Cosets in BFS order, labelled edges, and whether the radius cut anything.
type Exploration<C> = (Vec<C>, Vec<(usize, char, usize)>, bool);

fn explore<C, F>(
    root: C,
    letters: &[char],
    step: F,
    radius: Option<usize>,
) -> Result<Exploration<C>>
where
    C: Clone + Eq + Hash,
    F: Fn(&C, usize) -> C,
{
    let mut index: HashMap<C, usize> = HashMap::from([(root.clone(), 0)]);
    let mut cosets = vec![root];
    let mut depth = vec![0usize];
    let mut edges = Vec::new();
    let mut truncated = false;
    let mut i = 0;
    while i < cosets.len() {
        let at_edge = radius.is_some_and(|r| depth[i] >= r);
        for (a, &c) in letters.iter().enumerate() {
            let next = step(&cosets[i], a);
            let j = match index.get(&next) {
                Some(&j) => j,
                None if at_edge => {
                    truncated = true;
                    continue;
                }
                None => {
                    if cosets.len() >= COSET_LIMIT {
                        return Err(Error::StateSpaceTooLarge(COSET_LIMIT));
                    }
                    index.insert(next.clone(), cosets.len());
                    cosets.push(next);
                    depth.push(depth[i] + 1);
                    cosets.len() - 1
                }
            };
            edges.push((i, c, j));
        }
        i += 1;
    }
    Ok((cosets, edges, truncated))
}

/// Graph on the right cosets `Kg` reachable from `K` with edges
/// `Kg -a-> Kgψ(a)`. Finite quotients are built completely; infinite ones
/// are cut at the given radius.
pub fn build_schreier(
    spec: &GroupSpec,
    psi: &Presentation,
    radius: usize,
) -> Result<SchreierGraph> {
    spec.validate()?;
    psi.validate(spec)?;
    let letters: Vec<char> = psi.map.keys().copied().collect();
    let images: Vec<&GroupElement> = psi.map.values().collect();
    let (graph, truncated, cosets) = match spec {
        GroupSpec::Finite {
            table,
            names,
            subgroup,
        } => {
            let n = table.len();
            let e = (0..n).find(|&e| (0..n).all(|g| table[e][g] == g)).unwrap();
            let mut k = vec![false; n];
            k[e] = true;
            let mut members = vec![e];
            let mut i = 0;
            while i < members.len() {
                for &g in subgroup {
                    let y = table[members[i]][g];
                    if !k[y] {
                        k[y] = true;
                        members.push(y);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            let canon = |g: usize| members.iter().map(|&h| table[h][g]).min().unwrap();
            let gens: Vec<usize> = images.iter().map(|g| finite(g)).collect();
            let (cosets, edges, truncated) =
                explore(canon(e), &letters, |c, a| canon(table[*c][gens[a]]), None)?;
            let label = |g: usize| names.as_ref().map_or(g.to_string(), |v| v[g].clone());
            (
                LabeledDigraph::new(cosets.len(), letters.clone(), edges)?,
                truncated,
                cosets.into_iter().map(label).collect(),
            )
        }
        GroupSpec::Lattice { d, subgroup } => {
            let basis = hermite_basis(subgroup, *d);
            let full_rank = basis.len() == *d;
            if full_rank {
                let index: u128 = (0..*d)
                    .map(|i| basis[i][i].unsigned_abs() as u128)
                    .product();
                if index > COSET_LIMIT as u128 {
                    return Err(Error::StateSpaceTooLarge(COSET_LIMIT));
                }
            } else if radius == 0 {
                return Err(Error::Parameter(
                    "radius must be >= 1 for an infinite quotient".into(),
                ));
            }
            let gens: Vec<Vec<i64>> = images
                .iter()
                .map(|g| match g {
                    GroupElement::Lattice(v) => v.clone(),
                    _ => unreachable!("checked against the family"),
                })
                .collect();
            let step = |c: &Vec<i64>, a: usize| {
                let v: Vec<i64> = c.iter().zip(&gens[a]).map(|(x, y)| x + y).collect();
                reduce_mod(&v, &basis)
            };
            let (cosets, edges, truncated) =
                explore(vec![0; *d], &letters, step, (!full_rank).then_some(radius))?;
            let label = |v: Vec<i64>| {
                format!(
                    "({})",
                    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
                )
            };
            (
                LabeledDigraph::new(cosets.len(), letters.clone(), edges)?,
                truncated,
                cosets.into_iter().map(label).collect(),
            )
        }
        GroupSpec::FreeProductZ2 { factors } => {
            if radius == 0 && *factors > 1 {
                return Err(Error::Parameter(
                    "radius must be >= 1 for an infinite group".into(),
                ));
            }
            let gens: Vec<Vec<usize>> = images
                .iter()
                .map(|g| match g {
                    GroupElement::Word { word } => word.clone(),
                    _ => unreachable!("checked against the family"),
                })
                .collect();
            let step = |c: &Vec<usize>, a: usize| reduce_word(c.iter().chain(&gens[a]).copied());
            let (cosets, edges, truncated) = explore(Vec::new(), &letters, step, Some(radius))?;
            let label = |w: Vec<usize>| {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    w.iter().map(|s| format!("s{s}")).collect()
                }
            };
            (
                LabeledDigraph::new(cosets.len(), letters.clone(), edges)?,
                truncated,
                cosets.into_iter().map(label).collect(),
            )
        }
    };
    Ok(SchreierGraph {
        graph,
        root: 0,
        truncated,
        radius,
        cosets,
    })
}

/// `L(G, K, ψ) = L_{o,o}`: words whose image lies in `K`.
#[derive(Clone, Copy, Debug)]
pub struct WordProblem<'a> {
    pub schreier: &'a SchreierGraph,
}

pub fn word_problem_language(g: &SchreierGraph) -> WordProblem<'_> {
    WordProblem { schreier: g }
}

impl WordProblem<'_> {
    /// Largest length whose count is exact.
    pub fn horizon(&self) -> Option<usize> {
        self.schreier.truncated.then_some(self.schreier.radius)
    }

    /// Counts for lengths `0..=n_max`.
    pub fn counts(&self, n_max: usize) -> Result<Vec<u128>> {
        if let Some(r) = self.horizon() {
            if n_max > r {
                return Err(Error::Horizon {
                    n: n_max,
                    radius: r,
                });
            }
        }
        count_sequence(
            &self.schreier.graph,
            self.schreier.root,
            self.schreier.root,
            n_max,
        )
    }

    pub fn count(&self, n: usize) -> Result<u128> {
        Ok(*self.counts(n)?.last().unwrap())
    }
}
