//! Exhaustive abelian-subgroup search in small finite groups.
//!
//! Uses only the multiplication table, so it is independent of any
//! structural description of the group.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

/// A finite group with elements numbered `0..order()`.
pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn identity_index(&self) -> usize;
    fn mul_index(&self, a: usize, b: usize) -> usize;
}

/// Products are cached for groups small enough to hold the full table.
const TABLE_LIMIT: usize = 4096;

struct Table<'a, G: ?Sized> {
    group: &'a G,
    order: usize,
    mul: Option<Vec<u32>>,
}

impl<'a, G: FiniteGroup + ?Sized> Table<'a, G> {
    fn build(group: &'a G) -> Self {
        let order = group.order();
        let mul = (order <= TABLE_LIMIT).then(|| {
            let mut mul = Vec::with_capacity(order * order);
            for a in 0..order {
                for b in 0..order {
                    mul.push(group.mul_index(a, b) as u32);
                }
            }
            mul
        });
        Table { group, order, mul }
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        match &self.mul {
            Some(t) => t[a * self.order + b] as usize,
            None => self.group.mul_index(a, b),
        }
    }

    fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }
}

fn words(order: usize) -> usize {
    order.div_ceil(64)
}

fn has(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

/// Orders of every abelian subgroup, found by growing subgroups one
/// commuting element at a time from the trivial subgroup.
pub fn abelian_subgroup_orders<G: FiniteGroup + ?Sized>(g: &G) -> Vec<usize> {
    let table = Table::build(g);
    let order = table.order;
    let id = g.identity_index();
    let mut trivial = alloc::vec![0u64; words(order)];
    trivial[id / 64] |= 1 << (id % 64);

    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut stack = alloc::vec![(trivial.clone(), alloc::vec![id])];
    seen.insert(trivial);
    let mut orders = Vec::new();
    while let Some((set, members)) = stack.pop() {
        orders.push(members.len());
        for cand in 0..order {
            if has(&set, cand) || !members.iter().all(|&m| table.commute(m, cand)) {
                continue;
            }
            // <S, g> = S·<g> when g centralizes S.
            let mut powers = alloc::vec![id];
            let mut x = cand;
            while x != id {
                powers.push(x);
                x = table.mul(x, cand);
            }
            let mut next = alloc::vec![0u64; set.len()];
            let mut next_members = Vec::with_capacity(members.len() * powers.len());
            for &s in &members {
                for &q in &powers {
                    let e = table.mul(s, q);
                    if !has(&next, e) {
                        next[e / 64] |= 1 << (e % 64);
                        next_members.push(e);
                    }
                }
            }
            if seen.insert(next.clone()) {
                stack.push((next, next_members));
            }
        }
    }
    orders
}

pub fn max_abelian_order<G: FiniteGroup + ?Sized>(g: &G) -> usize {
    abelian_subgroup_orders(g).into_iter().max().unwrap_or(1)
}
