//! Syntactic composition, quotient and conjunction of specifications.
//!
//! Composition is the synchronized product with per-clock guard
//! intersection. Quotient and conjunction mirror the system-level
//! constructions at location level, but their bad-state rules depend on
//! clock values, not just locations: a requirement may be undeliverable
//! only in part of a location's valuation space. Both are therefore built
//! over a finite valuation grid (guards have integer constants, and values
//! above the shared cap are indistinguishable): bad valuations are closed
//! backward under required transitions — delays are always required, which
//! folds time-predecessors in — and the surviving edges are re-expressed
//! as guards by decomposing the remaining valuation sets into boxes.
//! Arrivals into removed valuations are cut by strengthening the incoming
//! guards, which is what location-level pruning alone cannot express.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::label::{interval_quotient, Interval, Symbol};
use crate::mecs::{ClockConstraint, LocId, Mecs};
use crate::value::{Rational, Value};

/// Synchronized product: shared actions, per-clock guard intersection,
/// may with may and must with must. Edges with contradictory guards drop.
pub fn mecs_compose(a: &Mecs, b: &Mecs) -> Result<Mecs> {
    check_alphabets(a, b)?;
    let mut out = Mecs::with_names(
        a.alphabet().to_vec(),
        vec![format!("{}|{}", a.name(a.initial()), b.name(b.initial()))],
        LocId(0),
    );
    let mut index: BTreeMap<(LocId, LocId), LocId> = BTreeMap::new();
    index.insert((a.initial(), b.initial()), LocId(0));
    let mut frontier = vec![(a.initial(), b.initial())];
    while let Some((qa, qb)) = frontier.pop() {
        let from = index[&(qa, qb)];
        for required in [false, true] {
            let (left, right) = if required {
                (a.must(qa), b.must(qb))
            } else {
                (a.may(qa), b.may(qb))
            };
            for ea in left {
                for eb in right {
                    if ea.action != eb.action {
                        continue;
                    }
                    let Some(guard) = ea.guard.intersect(&eb.guard) else {
                        continue;
                    };
                    let key = (ea.target, eb.target);
                    let to = match index.get(&key) {
                        Some(&id) => id,
                        None => {
                            let id = out
                                .add_location(format!("{}|{}", a.name(key.0), b.name(key.1)));
                            index.insert(key, id);
                            frontier.push(key);
                            id
                        }
                    };
                    if required {
                        out.add_must(from, ea.action, guard, to);
                    } else {
                        out.add_may(from, ea.action, guard, to);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn check_alphabets(a: &Mecs, b: &Mecs) -> Result<()> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::Config(
            "operands must share their alphabet".into(),
        ));
    }
    Ok(())
}

/// Valuation grid over the tracked clocks: one integer coordinate per
/// clock in `0..=cap`, where `cap` reads as "at least cap".
struct Grid {
    clocks: Vec<Symbol>,
    cap: i64,
    n_points: usize,
}

/// Per-clock `[lo, hi]` with `hi == cap` meaning unbounded above.
type BoxG = Vec<(i64, i64)>;

impl Grid {
    fn new(clocks: Vec<Symbol>, cap: i64) -> Result<Grid> {
        let dim = (cap + 1) as usize;
        let mut n: usize = 1;
        for _ in &clocks {
            n = n.saturating_mul(dim);
            if n > 200_000 {
                return Err(Error::Budget(
                    "valuation grid too large for the quotient construction".into(),
                ));
            }
        }
        Ok(Grid {
            clocks,
            cap,
            n_points: n,
        })
    }

    fn coords(&self, mut idx: usize) -> Vec<i64> {
        let dim = (self.cap + 1) as usize;
        let mut out = vec![0i64; self.clocks.len()];
        for i in (0..self.clocks.len()).rev() {
            out[i] = (idx % dim) as i64;
            idx /= dim;
        }
        out
    }

    fn index(&self, coords: &[i64]) -> usize {
        let dim = (self.cap + 1) as usize;
        let mut idx = 0usize;
        for &c in coords {
            idx = idx * dim + c as usize;
        }
        idx
    }

    fn plus(&self, idx: usize, d: i64) -> usize {
        let mut c = self.coords(idx);
        for x in &mut c {
            *x = (*x + d).min(self.cap);
        }
        self.index(&c)
    }

    fn reset(&self, idx: usize, action: Symbol) -> usize {
        match self.clocks.iter().position(|&c| c == action) {
            None => idx,
            Some(pos) => {
                let mut c = self.coords(idx);
                c[pos] = 0;
                self.index(&c)
            }
        }
    }

    fn guard_box(&self, g: &ClockConstraint) -> BoxG {
        self.clocks
            .iter()
            .map(|&c| {
                let w = g.get(c);
                let lo = w.lo().to_integer().min(self.cap);
                let hi = match w.hi() {
                    Value::Infinity => self.cap,
                    Value::Finite(h) => h.to_integer().min(self.cap),
                };
                (lo, hi)
            })
            .collect()
    }

    fn sat(&self, idx: usize, boxg: &BoxG) -> bool {
        self.coords(idx)
            .iter()
            .zip(boxg.iter())
            .all(|(&x, &(lo, hi))| x >= lo && (hi == self.cap || x <= hi))
    }

    fn box_nonempty(boxg: &BoxG) -> bool {
        boxg.iter().all(|&(lo, hi)| lo <= hi)
    }

    /// Renders a box back into a clock constraint; components spanning the
    /// whole range vanish and `hi == cap` becomes unbounded.
    fn constraint_of(&self, boxg: &BoxG) -> ClockConstraint {
        let mut g = ClockConstraint::top();
        for (&c, &(lo, hi)) in self.clocks.iter().zip(boxg.iter()) {
            let hi_v = if hi >= self.cap {
                Value::Infinity
            } else {
                Value::from_int(hi as u64)
            };
            if lo == 0 && hi_v == Value::Infinity {
                continue;
            }
            let w = Interval::new(Rational::from_integer(lo), hi_v).expect("valid box");
            g = g.with(c, w).expect("integral box");
        }
        g
    }

    /// Decomposes a point set into maximal-run boxes, recursing over the
    /// clock coordinates and merging adjacent slices with identical
    /// sub-decompositions.
    fn decompose(&self, bits: &[bool]) -> Vec<BoxG> {
        fn go(bits: &[bool], k: usize, dim: usize) -> Vec<Vec<(i64, i64)>> {
            if k == 0 {
                return if bits[0] { vec![Vec::new()] } else { Vec::new() };
            }
            let block = bits.len() / dim;
            let mut slices: Vec<Vec<Vec<(i64, i64)>>> = Vec::with_capacity(dim);
            for x in 0..dim {
                slices.push(go(&bits[x * block..(x + 1) * block], k - 1, dim));
            }
            let mut out = Vec::new();
            let mut x = 0;
            while x < dim {
                if slices[x].is_empty() {
                    x += 1;
                    continue;
                }
                let mut end = x;
                while end + 1 < dim && slices[end + 1] == slices[x] {
                    end += 1;
                }
                for sub in &slices[x] {
                    let mut b = Vec::with_capacity(k);
                    b.push((x as i64, end as i64));
                    b.extend_from_slice(sub);
                    out.push(b);
                }
                x = end + 1;
            }
            out
        }
        go(bits, self.clocks.len(), (self.cap + 1) as usize)
    }
}

/// A candidate edge of a product construction, grid-compiled.
struct CEdge {
    action: Symbol,
    boxg: BoxG,
    target: usize,
}

/// The grid-compiled product: candidate edges, initially-bad valuations
/// and (for quotients) per-action complements.
struct Candidate {
    grid: Grid,
    pairs: Vec<(LocId, LocId)>,
    mays: Vec<Vec<CEdge>>,
    musts: Vec<Vec<CEdge>>,
    bad: Vec<Vec<bool>>,
    compl: Vec<Vec<(Symbol, Vec<bool>)>>,
}

impl Candidate {
    /// Backward closure of the bad valuations under required transitions:
    /// all delays (folding in time-predecessors) and the candidate musts.
    fn bad_star(&self) -> Vec<Vec<bool>> {
        let mut star = self.bad.clone();
        loop {
            let mut changed = false;
            for p in 0..self.pairs.len() {
                for v in 0..self.grid.n_points {
                    if star[p][v] {
                        continue;
                    }
                    let mut doomed = false;
                    for d in 1..=self.grid.cap {
                        if star[p][self.grid.plus(v, d)] {
                            doomed = true;
                            break;
                        }
                    }
                    if !doomed {
                        for e in &self.musts[p] {
                            if self.grid.sat(v, &e.boxg)
                                && star[e.target][self.grid.reset(v, e.action)]
                            {
                                doomed = true;
                                break;
                            }
                        }
                    }
                    if doomed {
                        star[p][v] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                return star;
            }
        }
    }

    /// Forward reachability over the carved edges. Returns the reached
    /// pairs and whether the universal location is referenced.
    fn reach(&self, star: &[Vec<bool>], root: usize) -> (Vec<bool>, bool) {
        let mut seen = vec![vec![false; self.grid.n_points]; self.pairs.len()];
        let zero = self.grid.index(&vec![0; self.grid.clocks.len()]);
        seen[root][zero] = true;
        let mut stack = vec![(root, zero)];
        let mut u_reached = false;
        while let Some((p, v)) = stack.pop() {
            for d in 1..=self.grid.cap {
                let v2 = self.grid.plus(v, d);
                if !seen[p][v2] {
                    seen[p][v2] = true;
                    stack.push((p, v2));
                }
            }
            for e in self.mays[p].iter().chain(self.musts[p].iter()) {
                if !self.grid.sat(v, &e.boxg) {
                    continue;
                }
                let v2 = self.grid.reset(v, e.action);
                if star[e.target][v2] {
                    continue;
                }
                if !seen[e.target][v2] {
                    seen[e.target][v2] = true;
                    stack.push((e.target, v2));
                }
            }
            if !u_reached {
                for (_, bits) in &self.compl[p] {
                    if bits[v] {
                        u_reached = true;
                        break;
                    }
                }
            }
        }
        let reached_pairs = seen.iter().map(|bits| bits.iter().any(|&b| b)).collect();
        (reached_pairs, u_reached)
    }

    /// Emits the carved construction as a specification.
    fn emit(
        &self,
        alphabet: &[Symbol],
        names: impl Fn(usize) -> String,
        star: &[Vec<bool>],
        root: usize,
    ) -> Option<Mecs> {
        let zero = self.grid.index(&vec![0; self.grid.clocks.len()]);
        if star[root][zero] {
            return None;
        }
        let (reached, u_reached) = self.reach(star, root);

        let mut loc_of: Vec<Option<LocId>> = vec![None; self.pairs.len()];
        let mut loc_names: Vec<String> = Vec::new();
        for (p, &r) in reached.iter().enumerate() {
            if r {
                loc_of[p] = Some(LocId(loc_names.len() as u32));
                loc_names.push(names(p));
            }
        }
        let u_loc = if u_reached {
            loc_names.push("u".into());
            Some(LocId(loc_names.len() as u32 - 1))
        } else {
            None
        };
        let mut out = Mecs::with_names(alphabet.to_vec(), loc_names, loc_of[root].unwrap());

        let mut scratch = vec![false; self.grid.n_points];
        for p in 0..self.pairs.len() {
            let Some(from) = loc_of[p] else { continue };
            for (required, edges) in [(false, &self.mays[p]), (true, &self.musts[p])] {
                for e in edges {
                    let Some(to) = loc_of[e.target] else { continue };
                    for v in 0..self.grid.n_points {
                        scratch[v] = self.grid.sat(v, &e.boxg)
                            && !star[e.target][self.grid.reset(v, e.action)];
                    }
                    for b in self.grid.decompose(&scratch) {
                        let g = self.grid.constraint_of(&b);
                        if required {
                            out.add_must_with_may(from, e.action, g, to);
                        } else {
                            out.add_may(from, e.action, g, to);
                        }
                    }
                }
            }
            if let Some(u) = u_loc {
                for (action, bits) in &self.compl[p] {
                    for b in self.grid.decompose(bits) {
                        out.add_may(from, *action, self.grid.constraint_of(&b), u);
                    }
                }
            }
        }
        if let Some(u) = u_loc {
            for &c in alphabet {
                out.add_may(u, c, ClockConstraint::top(), u);
            }
        }
        Some(out)
    }
}

fn shared_grid(a: &Mecs, b: &Mecs) -> Result<Grid> {
    let mut clocks = a.relevant_clocks();
    clocks.extend(b.relevant_clocks());
    clocks.sort();
    clocks.dedup();
    let maxc = a.max_constant().max(b.max_constant());
    let cap = maxc.ceil().to_integer() + 1;
    Grid::new(clocks, cap)
}

/// The quotient `b ⧵⧵ a`: the most permissive specification whose
/// composition with `a` refines `b`. `None` when the construction does
/// not exist. The guarantees require `a` strongly deterministic; the
/// construction runs regardless.
pub fn mecs_quotient(b: &Mecs, a: &Mecs) -> Result<Option<Mecs>> {
    check_alphabets(a, b)?;
    let grid = shared_grid(a, b)?;
    let mut pairs = Vec::new();
    let mut pidx: BTreeMap<(LocId, LocId), usize> = BTreeMap::new();
    for bq in 0..b.n_locations() {
        for aq in 0..a.n_locations() {
            pidx.insert((LocId(bq as u32), LocId(aq as u32)), pairs.len());
            pairs.push((LocId(bq as u32), LocId(aq as u32)));
        }
    }

    let mut mays = Vec::new();
    let mut musts = Vec::new();
    let mut bad = Vec::new();
    let mut compl = Vec::new();
    for &(bq, aq) in &pairs {
        // Allowed behavior: per-clock interval quotient of the guards.
        let mut pm = Vec::new();
        for eb in b.may(bq) {
            for ea in a.may(aq) {
                if ea.action != eb.action {
                    continue;
                }
                let mut boxg = BoxG::new();
                let mut defined = true;
                for &c in &grid.clocks {
                    match interval_quotient(&eb.guard.get(c), &ea.guard.get(c)) {
                        None => {
                            defined = false;
                            break;
                        }
                        Some(w) => {
                            let lo = w.lo().to_integer().min(grid.cap);
                            let hi = match w.hi() {
                                Value::Infinity => grid.cap,
                                Value::Finite(h) => h.to_integer().min(grid.cap),
                            };
                            boxg.push((lo, hi));
                        }
                    }
                }
                if defined {
                    pm.push(CEdge {
                        action: eb.action,
                        boxg,
                        target: pidx[&(eb.target, ea.target)],
                    });
                }
            }
        }
        // Required behavior: deliverable exactly where both requirements
        // are enabled.
        let mut pu = Vec::new();
        for eb in b.must(bq) {
            for ea in a.must(aq) {
                if ea.action != eb.action {
                    continue;
                }
                if let Some(g) = eb.guard.intersect(&ea.guard) {
                    let boxg = grid.guard_box(&g);
                    if Grid::box_nonempty(&boxg) {
                        pu.push(CEdge {
                            action: eb.action,
                            boxg,
                            target: pidx[&(eb.target, ea.target)],
                        });
                    }
                }
            }
        }
        // Bad valuations: b requires an action a cannot be required to do.
        let mut pb = vec![false; grid.n_points];
        for eb in b.must(bq) {
            let gb = grid.guard_box(&eb.guard);
            let amusts: Vec<BoxG> = a
                .must(aq)
                .iter()
                .filter(|ea| ea.action == eb.action)
                .map(|ea| grid.guard_box(&ea.guard))
                .collect();
            for (v, flag) in pb.iter_mut().enumerate() {
                if !*flag && grid.sat(v, &gb) && !amusts.iter().any(|g| grid.sat(v, g)) {
                    *flag = true;
                }
            }
        }
        // Complement: where a allows nothing on an action, the quotient is
        // free to do it.
        let mut pc = Vec::new();
        for &c in a.alphabet() {
            let amays: Vec<BoxG> = a
                .may(aq)
                .iter()
                .filter(|ea| ea.action == c)
                .map(|ea| grid.guard_box(&ea.guard))
                .collect();
            let bits: Vec<bool> = (0..grid.n_points)
                .map(|v| !amays.iter().any(|g| grid.sat(v, g)))
                .collect();
            if bits.iter().any(|&x| x) {
                pc.push((c, bits));
            }
        }
        mays.push(pm);
        musts.push(pu);
        bad.push(pb);
        compl.push(pc);
    }

    let cand = Candidate {
        grid,
        pairs,
        mays,
        musts,
        bad,
        compl,
    };
    let star = cand.bad_star();
    let root = pidx[&(b.initial(), a.initial())];
    Ok(cand.emit(
        a.alphabet(),
        |p| format!("{}|{}", b.name(cand.pairs[p].0), a.name(cand.pairs[p].1)),
        &star,
        root,
    ))
}

/// Conjunction: the greatest lower bound. Requirements of either side
/// must be allowed by the other where enabled, or the valuation is bad.
/// `None` when the construction does not exist.
pub fn mecs_conjoin(a: &Mecs, b: &Mecs) -> Result<Option<Mecs>> {
    check_alphabets(a, b)?;
    let grid = shared_grid(a, b)?;
    let mut pairs = Vec::new();
    let mut pidx: BTreeMap<(LocId, LocId), usize> = BTreeMap::new();
    for aq in 0..a.n_locations() {
        for bq in 0..b.n_locations() {
            pidx.insert((LocId(aq as u32), LocId(bq as u32)), pairs.len());
            pairs.push((LocId(aq as u32), LocId(bq as u32)));
        }
    }

    let mut mays = Vec::new();
    let mut musts = Vec::new();
    let mut bad = Vec::new();
    for &(aq, bq) in &pairs {
        let mut pm = Vec::new();
        let mut pu = Vec::new();
        let mut push = |list: &mut Vec<CEdge>,
                        ea: &crate::mecs::MecsEdge,
                        eb: &crate::mecs::MecsEdge| {
            if ea.action != eb.action {
                return;
            }
            if let Some(g) = ea.guard.intersect(&eb.guard) {
                let boxg = grid.guard_box(&g);
                if Grid::box_nonempty(&boxg) {
                    list.push(CEdge {
                        action: ea.action,
                        boxg,
                        target: pidx[&(ea.target, eb.target)],
                    });
                }
            }
        };
        for ea in a.may(aq) {
            for eb in b.may(bq) {
                push(&mut pm, ea, eb);
            }
        }
        for ea in a.must(aq) {
            for eb in b.may(bq) {
                push(&mut pu, ea, eb);
            }
        }
        for ea in a.may(aq) {
            for eb in b.must(bq) {
                push(&mut pu, ea, eb);
            }
        }

        let mut pb = vec![false; grid.n_points];
        let mut mark = |req: &crate::mecs::MecsEdge, others: &[crate::mecs::MecsEdge]| {
            let gb = grid.guard_box(&req.guard);
            let allowed: Vec<BoxG> = others
                .iter()
                .filter(|e| e.action == req.action)
                .map(|e| grid.guard_box(&e.guard))
                .collect();
            for (v, flag) in pb.iter_mut().enumerate() {
                if !*flag && grid.sat(v, &gb) && !allowed.iter().any(|g| grid.sat(v, g)) {
                    *flag = true;
                }
            }
        };
        for ea in a.must(aq) {
            mark(ea, b.may(bq));
        }
        for eb in b.must(bq) {
            mark(eb, a.may(aq));
        }
        mays.push(pm);
        musts.push(pu);
        bad.push(pb);
    }

    let compl = vec![Vec::new(); pairs.len()];
    let cand = Candidate {
        grid,
        pairs,
        mays,
        musts,
        bad,
        compl,
    };
    let star = cand.bad_star();
    let root = pidx[&(a.initial(), b.initial())];
    Ok(cand.emit(
        a.alphabet(),
        |p| format!("{}|{}", a.name(cand.pairs[p].0), b.name(cand.pairs[p].1)),
        &star,
        root,
    ))
}
