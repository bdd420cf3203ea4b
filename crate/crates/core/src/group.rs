//! Finite groups given by Cayley tables, builtin families, and
//! isomorphism/automorphism search.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

/// Environment variable that overrides the default order cap.
pub const ORDER_CAP_ENV: &str = "LIPTROP_ORDER_CAP";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("empty table: a group has at least one element")]
    Empty,
    #[error("table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare {
        row: usize,
        len: usize,
        order: usize,
    },
    #[error("entry table[{row}][{col}] = {value} is out of range [0, {order})")]
    OutOfRangeEntry {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} is not a two-sided identity")]
    NoIdentity(usize),
    #[error("element {0} has no two-sided inverse")]
    MissingInverse(usize),
    #[error("unsupported group family: {0}")]
    UnsupportedFamily(String),
    #[error("group order {order} exceeds the configured cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },
    #[error("map is not a group isomorphism: {0}")]
    NotIsomorphism(String),
}

/// Upper bound on group orders accepted by the exhaustive routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderCap(pub usize);

impl OrderCap {
    pub const DEFAULT: OrderCap = OrderCap(64);

    /// Reads [`ORDER_CAP_ENV`], falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(ORDER_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&n: &usize| n > 0)
            .map(OrderCap)
            .unwrap_or_default()
    }

    pub fn check(self, order: usize) -> Result<(), GroupError> {
        if order > self.0 {
            Err(GroupError::OrderTooLarge { order, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for OrderCap {
    fn default() -> Self {
        OrderCap::DEFAULT
    }
}

/// A finite group stored as a dense Cayley table over element indices `0..n`.
#[derive(Clone)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.identity == other.identity && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("identity", &self.identity)
            .finish()
    }
}

impl FiniteGroup {
    /// Validates a raw Cayley table with a claimed identity element.
    ///
    /// Checks run in order: shape, entry range, associativity (all n³
    /// triples), identity, inverses. The error names the first failing witness.
    pub fn from_table(
        name: impl Into<String>,
        rows: &[Vec<usize>],
        identity: usize,
    ) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        let mut table = Vec::with_capacity(order * order);
        for (row, entries) in rows.iter().enumerate() {
            if entries.len() != order {
                return Err(GroupError::NotSquare {
                    row,
                    len: entries.len(),
                    order,
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::OutOfRangeEntry {
                        row,
                        col,
                        value,
                        order,
                    });
                }
                table.push(value);
            }
        }
        let at = |i: usize, j: usize| table[i * order + j];
        for i in 0..order {
            for j in 0..order {
                let ij = at(i, j);
                for k in 0..order {
                    if at(ij, k) != at(i, at(j, k)) {
                        return Err(GroupError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        if identity >= order || (0..order).any(|i| at(identity, i) != i || at(i, identity) != i) {
            return Err(GroupError::NoIdentity(identity));
        }
        let mut inverses = Vec::with_capacity(order);
        for i in 0..order {
            let inv = (0..order).find(|&j| at(i, j) == identity && at(j, i) == identity);
            match inv {
                Some(j) => inverses.push(j),
                None => return Err(GroupError::MissingInverse(i)),
            }
        }
        Ok(FiniteGroup {
            name: name.into(),
            order,
            table,
            identity,
            inverses,
        })
    }

    /// Builds from a product function already known to define a group with
    /// identity 0. Still validated.
    fn from_fn(name: String, order: usize, mul: impl Fn(usize, usize) -> usize) -> Self {
        let rows: Vec<Vec<usize>> = (0..order)
            .map(|i| (0..order).map(|j| mul(i, j)).collect())
            .collect();
        FiniteGroup::from_table(name, &rows, 0).expect("builtin family produced an invalid table")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverses
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// Smallest k ≥ 1 with x^k = e.
    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut p = x;
        while p != self.identity {
            p = self.mul(p, x);
            k += 1;
        }
        k
    }

    pub fn element_orders(&self) -> Vec<usize> {
        self.elements().map(|x| self.element_order(x)).collect()
    }

    /// Sorted multiset of element orders.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut v = self.element_orders();
        v.sort_unstable();
        v
    }

    /// First non-commuting pair in index order, if any.
    pub fn commutativity_witness(&self) -> Option<(usize, usize)> {
        for x in self.elements() {
            for y in (x + 1)..self.order {
                if self.mul(x, y) != self.mul(y, x) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    pub fn is_abelian(&self) -> bool {
        self.commutativity_witness().is_none()
    }

    /// The copy of this group with element `i` renamed `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<FiniteGroup, GroupError> {
        if !is_permutation(perm, self.order) {
            return Err(GroupError::NotIsomorphism(
                "relabeling is not a permutation of the elements".into(),
            ));
        }
        let mut rows = vec![vec![0; self.order]; self.order];
        for i in self.elements() {
            for j in self.elements() {
                rows[perm[i]][perm[j]] = perm[self.mul(i, j)];
            }
        }
        FiniteGroup::from_table(format!("{}'", self.name), &rows, perm[self.identity])
    }

    /// Componentwise product; element `(g, h)` has index `g * |H| + h`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
        let m = h.order;
        let order = g.order * m;
        let rows: Vec<Vec<usize>> = (0..order)
            .map(|a| {
                (0..order)
                    .map(|b| g.mul(a / m, b / m) * m + h.mul(a % m, b % m))
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(
            format!("{}x{}", g.name, h.name),
            &rows,
            g.identity * m + h.identity,
        )
        .expect("direct product of groups is a group")
    }
}

fn is_permutation(map: &[usize], n: usize) -> bool {
    if map.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in map {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Builtin group families. Every builtin places the identity at index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupFamily {
    Cyclic(usize),
    /// Symmetries of the regular n-gon, order 2n. Element `r^k s^b` has index `b*n + k`.
    Dihedral(usize),
    /// Permutations of `n ≤ 4` points in lexicographic order, composed as `(στ)(i) = σ(τ(i))`.
    Symmetric(usize),
    /// `±1, ±i, ±j, ±k` at indices 0..8 in that order.
    Quaternion8,
    DirectProduct(Box<GroupFamily>, Box<GroupFamily>),
}

impl GroupFamily {
    pub fn order(&self) -> usize {
        match self {
            GroupFamily::Cyclic(n) => *n,
            GroupFamily::Dihedral(n) => 2 * n,
            GroupFamily::Symmetric(n) => (1..=*n).product(),
            GroupFamily::Quaternion8 => 8,
            GroupFamily::DirectProduct(a, b) => a.order() * b.order(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GroupFamily::Cyclic(n) => format!("Z{n}"),
            GroupFamily::Dihedral(n) => format!("D{n}"),
            GroupFamily::Symmetric(n) => format!("S{n}"),
            GroupFamily::Quaternion8 => "Q8".into(),
            GroupFamily::DirectProduct(a, b) => format!("{}x{}", a.label(), b.label()),
        }
    }

    /// Parses `cyclic(4)`, `dihedral(4)`, `symmetric(3)`, `quaternion8`,
    /// `direct_product(cyclic(2),cyclic(2))`, and the short aliases
    /// `z4`, `d4`, `s3`, `q8`, `klein4`.
    pub fn parse(s: &str) -> Result<GroupFamily, GroupError> {
        let unsupported = || GroupError::UnsupportedFamily(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.to_ascii_lowercase();
        if t == "quaternion8" || t == "q8" {
            return Ok(GroupFamily::Quaternion8);
        }
        if t == "klein4" || t == "v4" {
            return Ok(GroupFamily::DirectProduct(
                Box::new(GroupFamily::Cyclic(2)),
                Box::new(GroupFamily::Cyclic(2)),
            ));
        }
        if let Some(rest) = t.strip_prefix("direct_product(") {
            let inner = rest.strip_suffix(')').ok_or_else(unsupported)?;
            let split = top_level_comma(inner).ok_or_else(unsupported)?;
            let a = GroupFamily::parse(&inner[..split])?;
            let b = GroupFamily::parse(&inner[split + 1..])?;
            return Ok(GroupFamily::DirectProduct(Box::new(a), Box::new(b)));
        }
        let (head, arg) = if let Some(open) = t.find('(') {
            let arg = t[open + 1..].strip_suffix(')').ok_or_else(unsupported)?;
            (&t[..open], arg)
        } else {
            let split = t
                .find(|c: char| c.is_ascii_digit())
                .ok_or_else(unsupported)?;
            (&t[..split], &t[split..])
        };
        let n: usize = arg.parse().map_err(|_| unsupported())?;
        match head {
            "cyclic" | "z" | "c" => Ok(GroupFamily::Cyclic(n)),
            "dihedral" | "d" => Ok(GroupFamily::Dihedral(n)),
            "symmetric" | "s" => Ok(GroupFamily::Symmetric(n)),
            _ => Err(unsupported()),
        }
    }

    fn check_supported(&self) -> Result<(), GroupError> {
        match self {
            GroupFamily::Cyclic(0) | GroupFamily::Dihedral(0) | GroupFamily::Symmetric(0) => Err(
                GroupError::UnsupportedFamily(format!("{} has no elements", self.label())),
            ),
            GroupFamily::Symmetric(n) if *n > 4 => Err(GroupError::UnsupportedFamily(format!(
                "symmetric({n}): only n <= 4 is supported"
            ))),
            GroupFamily::DirectProduct(a, b) => {
                a.check_supported()?;
                b.check_supported()
            }
            _ => Ok(()),
        }
    }

    /// The Cayley table of this family, subject to `cap`.
    pub fn build(&self, cap: OrderCap) -> Result<FiniteGroup, GroupError> {
        self.check_supported()?;
        cap.check(self.order())?;
        Ok(self.build_unchecked())
    }

    fn build_unchecked(&self) -> FiniteGroup {
        let name = self.label();
        match self {
            GroupFamily::Cyclic(n) => {
                let n = *n;
                FiniteGroup::from_fn(name, n, |a, b| (a + b) % n)
            }
            GroupFamily::Dihedral(n) => {
                let n = *n;
                FiniteGroup::from_fn(name, 2 * n, |a, b| {
                    let (k1, b1) = (a % n, a / n);
                    let (k2, b2) = (b % n, b / n);
                    let k = if b1 == 0 {
                        (k1 + k2) % n
                    } else {
                        (k1 + n - k2) % n
                    };
                    (b1 ^ b2) * n + k
                })
            }
            GroupFamily::Symmetric(n) => {
                let perms = permutations_lex(*n);
                FiniteGroup::from_fn(name, perms.len(), |a, b| {
                    let composed: Vec<usize> = (0..*n).map(|i| perms[a][perms[b][i]]).collect();
                    perms.iter().position(|p| *p == composed).unwrap()
                })
            }
            GroupFamily::Quaternion8 => FiniteGroup::from_fn(name, 8, quaternion_mul),
            GroupFamily::DirectProduct(a, b) => {
                FiniteGroup::direct_product(&a.build_unchecked(), &b.build_unchecked())
                    .with_name(name)
            }
        }
    }
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

fn permutations_lex(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

// Index 2u + s encodes sign s (0 = +, 1 = -) on unit u ∈ {1, i, j, k}.
fn quaternion_mul(a: usize, b: usize) -> usize {
    // UNIT[u][v] = (sign, unit) of u*v
    const UNIT: [[(usize, usize); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    let (ua, sa) = (a / 2, a % 2);
    let (ub, sb) = (b / 2, b % 2);
    let (s, u) = UNIT[ua][ub];
    2 * u + (s ^ sa ^ sb)
}

/// A product-preserving bijection between two groups.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupIso {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    map: Vec<usize>,
}

impl fmt::Debug for GroupIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupIso({} -> {}: {:?})",
            self.source.name, self.target.name, self.map
        )
    }
}

impl GroupIso {
    /// Checks bijectivity and `map[ab] = map[a]map[b]` for all pairs.
    pub fn new(
        source: Arc<FiniteGroup>,
        target: Arc<FiniteGroup>,
        map: Vec<usize>,
    ) -> Result<Self, GroupError> {
        if source.order != target.order {
            return Err(GroupError::NotIsomorphism(format!(
                "orders differ: {} vs {}",
                source.order, target.order
            )));
        }
        if !is_permutation(&map, source.order) {
            return Err(GroupError::NotIsomorphism("map is not a bijection".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(GroupError::NotIsomorphism(format!(
                        "product {a}*{b} is not preserved"
                    )));
                }
            }
        }
        Ok(GroupIso {
            source,
            target,
            map,
        })
    }

    pub fn identity(group: Arc<FiniteGroup>) -> Self {
        let map = group.elements().collect();
        GroupIso {
            source: group.clone(),
            target: group,
            map,
        }
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> GroupIso {
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        GroupIso {
            source: self.target.clone(),
            target: self.source.clone(),
            map: inv,
        }
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &GroupIso) -> Result<GroupIso, GroupError> {
        if *self.target != *other.source {
            return Err(GroupError::NotIsomorphism(
                "composition of maps with mismatched carriers".into(),
            ));
        }
        Ok(GroupIso {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&m| other.map[m]).collect(),
        })
    }
}

/// Greedy generating set: scan elements by decreasing order, keep each one
/// not already in the subgroup generated so far.
fn generating_set(g: &FiniteGroup) -> Vec<usize> {
    let orders = g.element_orders();
    let mut candidates: Vec<usize> = g.elements().collect();
    candidates.sort_by_key(|&x| (std::cmp::Reverse(orders[x]), x));
    let mut gens = Vec::new();
    let mut span = vec![false; g.order()];
    span[g.identity()] = true;
    for x in candidates {
        if span[x] {
            continue;
        }
        gens.push(x);
        span = closure(g, &gens);
        if span.iter().all(|&b| b) {
            break;
        }
    }
    gens
}

fn closure(g: &FiniteGroup, gens: &[usize]) -> Vec<bool> {
    let mut span = vec![false; g.order()];
    span[g.identity()] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(x, s);
            if !span[y] {
                span[y] = true;
                queue.push_back(y);
            }
        }
    }
    span
}

/// Extends generator images to a map on all of `g` along the right Cayley
/// graph. Returns `None` on any inconsistency or non-injectivity.
fn extend_homomorphism(
    g: &FiniteGroup,
    h: &FiniteGroup,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    const UNSET: usize = usize::MAX;
    let mut map = vec![UNSET; g.order()];
    let mut hit = vec![false; h.order()];
    map[g.identity()] = h.identity();
    hit[h.identity()] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let image = h.mul(map[x], t);
            if map[y] == UNSET {
                if hit[image] {
                    return None;
                }
                map[y] = image;
                hit[image] = true;
                queue.push_back(y);
            } else if map[y] != image {
                return None;
            }
        }
    }
    // every edge x -> xs is consistent, so map(xw) = map(x)map(w) for all words w
    if map.contains(&UNSET) {
        return None;
    }
    Some(map)
}

fn search_isomorphisms(
    g: &FiniteGroup,
    h: &FiniteGroup,
    cap: OrderCap,
    mut visit: impl FnMut(Vec<usize>) -> bool,
) -> Result<(), GroupError> {
    cap.check(g.order())?;
    cap.check(h.order())?;
    if g.order() != h.order() || g.order_profile() != h.order_profile() {
        return Ok(());
    }
    let gens = generating_set(g);
    let g_orders = g.element_orders();
    let h_orders = h.element_orders();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            h.elements()
                .filter(|&t| h_orders[t] == g_orders[s])
                .collect()
        })
        .collect();

    let mut images = Vec::with_capacity(gens.len());
    fn rec(
        depth: usize,
        images: &mut Vec<usize>,
        candidates: &[Vec<usize>],
        g: &FiniteGroup,
        h: &FiniteGroup,
        gens: &[usize],
        visit: &mut dyn FnMut(Vec<usize>) -> bool,
    ) -> bool {
        if depth == gens.len() {
            if let Some(map) = extend_homomorphism(g, h, gens, images) {
                return visit(map);
            }
            return true;
        }
        for &t in &candidates[depth] {
            if images.contains(&t) {
                continue;
            }
            images.push(t);
            let keep_going = rec(depth + 1, images, candidates, g, h, gens, visit);
            images.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    rec(0, &mut images, &candidates, g, h, &gens, &mut visit);
    Ok(())
}

/// All isomorphisms `g → h`, sorted lexicographically by their maps.
/// Empty iff the groups are not isomorphic.
pub fn enumerate_isomorphisms(
    g: &Arc<FiniteGroup>,
    h: &Arc<FiniteGroup>,
    cap: OrderCap,
) -> Result<Vec<GroupIso>, GroupError> {
    let mut maps = Vec::new();
    search_isomorphisms(g, h, cap, |m| {
        maps.push(m);
        true
    })?;
    maps.sort();
    Ok(maps
        .into_iter()
        .map(|map| GroupIso {
            source: g.clone(),
            target: h.clone(),
            map,
        })
        .collect())
}

/// First isomorphism found by the search, if the groups are isomorphic.
pub fn find_isomorphism(
    g: &Arc<FiniteGroup>,
    h: &Arc<FiniteGroup>,
    cap: OrderCap,
) -> Result<Option<GroupIso>, GroupError> {
    let mut found = None;
    search_isomorphisms(g, h, cap, |m| {
        found = Some(m);
        false
    })?;
    Ok(found.map(|map| GroupIso {
        source: g.clone(),
        target: h.clone(),
        map,
    }))
}

pub fn enumerate_automorphisms(
    g: &Arc<FiniteGroup>,
    cap: OrderCap,
) -> Result<Vec<GroupIso>, GroupError> {
    enumerate_isomorphisms(g, g, cap)
}
