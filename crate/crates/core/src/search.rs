//! Depth-first branch and bound for min-max pair assignment.
//!
//! Each variable picks one item (an index pair) from its candidate list.
//! The objective is the largest pairwise cost among the chosen items and is
//! minimized. Both the widening defect (items are `x -> y` assignments) and
//! the correspondence distortion (items are related pairs) fit this shape.
//!
//! The search keeps, for every unassigned variable and every candidate, the
//! cost of that candidate against everything already chosen (forward
//! checking). A node is pruned as soon as it cannot beat the incumbent. When
//! the node budget runs out the unexplored subtrees contribute their bounds
//! to a certified global lower bound.

use crate::ext::ExtReal;
use crate::scalar::Scalar;

pub(crate) type Item = (usize, usize);

pub(crate) struct Problem<F> {
    /// Candidate items per variable, in branching order.
    pub candidates: Vec<Vec<Item>>,
    /// `ordered_after[v] = Some(u)` (with `u < v`) forces the candidate index
    /// chosen for `v` to be at least the one chosen for `u`. Used to break the
    /// symmetry between interchangeable points.
    pub ordered_after: Vec<Option<usize>>,
    pub cost: F,
}

#[derive(Clone, Debug)]
pub(crate) struct Outcome<T> {
    /// Objective of the best assignment found.
    pub best: ExtReal<T>,
    /// Candidate index chosen per variable by the best assignment.
    pub choice: Vec<usize>,
    /// Certified lower bound on the optimum; equals `best` when exact.
    pub lower: ExtReal<T>,
    pub exact: bool,
}

struct Ctx<'a, T, F> {
    p: &'a Problem<F>,
    best: ExtReal<T>,
    best_choice: Vec<usize>,
    choice: Vec<usize>,
    frontier: ExtReal<T>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl<T: Scalar, F: Fn(Item, Item) -> ExtReal<T>> Problem<F> {
    fn n(&self) -> usize {
        self.candidates.len()
    }

    /// Objective of a complete assignment.
    pub fn evaluate(&self, choice: &[usize]) -> ExtReal<T> {
        let items: Vec<Item> = choice
            .iter()
            .enumerate()
            .map(|(v, &c)| self.candidates[v][c])
            .collect();
        let mut worst = ExtReal::zero();
        for a in 0..items.len() {
            for b in (a + 1)..items.len() {
                worst = worst.max((self.cost)(items[a], items[b]));
            }
        }
        worst
    }

    /// Sequential greedy: each variable takes its cheapest admissible candidate.
    pub fn greedy(&self) -> Vec<usize> {
        let n = self.n();
        let mut choice = Vec::with_capacity(n);
        let mut chosen: Vec<Item> = Vec::with_capacity(n);
        for v in 0..n {
            let floor = self.ordered_after[v].map_or(0, |u| choice[u]);
            let mut best_c = floor;
            let mut best_cost = ExtReal::<T>::INF;
            let mut first = true;
            for (c, &it) in self.candidates[v].iter().enumerate().skip(floor) {
                let cost = chosen
                    .iter()
                    .fold(ExtReal::zero(), |m, &o| m.max((self.cost)(o, it)));
                if first || cost < best_cost {
                    best_cost = cost;
                    best_c = c;
                    first = false;
                }
            }
            choice.push(best_c);
            chosen.push(self.candidates[v][best_c]);
        }
        choice
    }

    /// First-improvement local search over single-variable moves.
    pub fn local_search(&self, mut choice: Vec<usize>, max_sweeps: usize) -> Vec<usize> {
        let mut value = self.evaluate(&choice);
        for _ in 0..max_sweeps {
            let mut improved = false;
            for v in 0..self.n() {
                let floor = self.ordered_after[v].map_or(0, |u| choice[u]);
                let ceiling = (v + 1..self.n())
                    .filter(|&w| self.ordered_after[w] == Some(v))
                    .map(|w| choice[w])
                    .min()
                    .unwrap_or(usize::MAX);
                let original = choice[v];
                for c in floor..self.candidates[v].len().min(ceiling.saturating_add(1)) {
                    if c == original {
                        continue;
                    }
                    choice[v] = c;
                    let val = self.evaluate(&choice);
                    if val < value {
                        value = val;
                        improved = true;
                        break;
                    }
                    choice[v] = original;
                }
            }
            if !improved {
                break;
            }
        }
        choice
    }

    /// Runs the search from an incumbent assignment within a node budget.
    pub fn solve(&self, incumbent: Vec<usize>, budget: u64) -> Outcome<T> {
        let n = self.n();
        let best = self.evaluate(&incumbent);
        let mut ctx = Ctx {
            p: self,
            best,
            best_choice: incumbent,
            choice: vec![0; n],
            frontier: ExtReal::INF,
            nodes: 0,
            budget,
            aborted: false,
        };
        if n > 0 && best > ExtReal::zero() {
            let table: Vec<Vec<ExtReal<T>>> = self
                .candidates
                .iter()
                .map(|c| vec![ExtReal::zero(); c.len()])
                .collect();
            ctx.descend(0, ExtReal::zero(), &table);
        }
        let lower = if ctx.aborted { ctx.best.min(ctx.frontier) } else { ctx.best };
        Outcome {
            best: ctx.best,
            choice: ctx.best_choice,
            lower,
            exact: !ctx.aborted,
        }
    }
}

impl<T: Scalar, F: Fn(Item, Item) -> ExtReal<T>> Ctx<'_, T, F> {
    fn descend(&mut self, v: usize, cur: ExtReal<T>, table: &[Vec<ExtReal<T>>]) {
        let p = self.p;
        let n = p.n();
        let floor = p.ordered_after[v].map_or(0, |u| self.choice[u]);
        let mut order: Vec<usize> = (floor..p.candidates[v].len()).collect();
        order.sort_by(|&a, &b| {
            table[v][a]
                .partial_cmp(&table[v][b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for (pos, &c) in order.iter().enumerate() {
            let here = cur.max(table[v][c]);
            if here >= self.best {
                break;
            }
            if self.aborted || self.nodes >= self.budget {
                self.aborted = true;
                for &rest in &order[pos..] {
                    let bound = cur.max(table[v][rest]);
                    if bound < self.best {
                        self.frontier = self.frontier.min(bound);
                    }
                }
                return;
            }
            self.nodes += 1;
            self.choice[v] = c;
            if v + 1 == n {
                self.best = here;
                self.best_choice = self.choice.clone();
                continue;
            }
            let item = p.candidates[v][c];
            let mut next: Vec<Vec<ExtReal<T>>> = Vec::with_capacity(n);
            next.extend(table[..=v].iter().map(|_| Vec::new()));
            let mut bound = here;
            let mut dead = false;
            for w in (v + 1)..n {
                let row: Vec<ExtReal<T>> = p.candidates[w]
                    .iter()
                    .zip(&table[w])
                    .map(|(&it, &old)| old.max((p.cost)(item, it)))
                    .collect();
                let wfloor = match p.ordered_after[w] {
                    Some(u) if u == v => c,
                    Some(u) if u < v => self.choice[u],
                    _ => 0,
                };
                let least = row[wfloor.min(row.len())..]
                    .iter()
                    .copied()
                    .fold(ExtReal::INF, ExtReal::min);
                bound = bound.max(least);
                if bound >= self.best {
                    dead = true;
                    break;
                }
                next.push(row);
            }
            if dead {
                continue;
            }
            self.descend(v + 1, here, &next);
        }
    }
}

/// Groups interchangeable points: `i` and `j` are twins when
/// `d(i,k) = d(j,k)` for every other `k`. Returns, for each position of
/// `order`, the previous position holding a twin.
pub(crate) fn twin_links<T: Scalar>(
    d: impl Fn(usize, usize) -> ExtReal<T>,
    n: usize,
    order: &[usize],
    frozen: &[usize],
) -> Vec<Option<usize>> {
    let twins = |i: usize, j: usize| (0..n).all(|k| k == i || k == j || d(i, k) == d(j, k));
    let mut links = vec![None; order.len()];
    for b in 0..order.len() {
        if frozen.contains(&order[b]) {
            continue;
        }
        for a in (0..b).rev() {
            if !frozen.contains(&order[a]) && twins(order[a], order[b]) {
                links[b] = Some(a);
                break;
            }
        }
    }
    links
}
