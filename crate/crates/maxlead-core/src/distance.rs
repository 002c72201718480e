//! The refinement distance between systems, as a least fixed point.
//!
//! For states `s` of `S` and `t` of `T` the distance table `h(s,t)` is the
//! least fixed point of
//!
//! ```text
//! h(s,t) = max { sup over s-may (k,s')  of inf over t-may (l,t')  of F(k,l,h(s',t')),
//!                sup over t-must (l,t') of inf over s-must (k,s') of F(k,l,h(s',t')) }
//! ```
//!
//! where `F` is the label-distance lift, an empty sup is ⊥ and an empty inf
//! is ⊤. The distance of the systems is the table at the initial pair
//! evaluated at lead zero.
//!
//! # Finitization and exactness
//!
//! Tables are computed over a bounded lead grid with values saturated above
//! a cap. Saturating can only increase the fixed point, and a play that
//! leaves the bounded lead window has already incurred a cost above the
//! bound, so every *finite* reported value is exact. An infinite reported
//! value is certified exact whenever the configured bounds reach the
//! divergence threshold `(max constant + 1) × (product states + 1)`: a
//! finite distance on grid systems cannot exceed that bound, because any
//! play pushing the lead beyond it revisits a state pair with a strictly
//! grown lead and can be pumped forever. Below the threshold an infinite
//! result is flagged as `saturated`.
//!
//! By default the bounds escalate automatically: small caps are tried
//! first (cheap, and sufficient for every finite answer they confirm), the
//! certification bound only when the result keeps coming back infinite.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::error::{Error, Result};
use crate::label::{f_units_into, Action, FScratch, GTable};
use crate::lattice::{GridConfig, LeadFunction, INF};
use crate::smts::{Smts, StateId};
use crate::value::{Rational, Value};

/// Grid selection for a distance query. `None` bounds are derived per
/// query from the operands: both default to the divergence threshold.
#[derive(Clone, Debug)]
pub struct GridSettings {
    pub step: Rational,
    pub lead_bound: Option<Rational>,
    pub value_cap: Option<Rational>,
}

impl Default for GridSettings {
    fn default() -> GridSettings {
        GridSettings {
            step: Rational::one(),
            lead_bound: None,
            value_cap: None,
        }
    }
}

impl GridSettings {
    pub fn with_step(step: Rational) -> GridSettings {
        GridSettings {
            step,
            lead_bound: None,
            value_cap: None,
        }
    }
}

/// Outcome of a distance computation.
#[derive(Clone, Debug)]
pub struct DistanceResult {
    /// The distance: the initial pair's table at lead zero.
    pub value: Value,
    /// Grid of the final run.
    pub grid: GridConfig,
    /// Converged tables for every explored state pair.
    pub table: BTreeMap<(StateId, StateId), LeadFunction>,
    /// Total node recomputations across all runs.
    pub iterations: u64,
    /// True when the value is infinite but the configured bounds stayed
    /// below the certification threshold, so a large finite distance
    /// cannot be ruled out. Finite values are always exact.
    pub saturated: bool,
}

/// Memory guard for distance tables.
const MAX_TABLE_BYTES: u64 = 1 << 31;

struct UnitEdge {
    action: Action,
    lo: i64,
    hi: Option<i64>,
    target: StateId,
}

struct UnitSystem {
    may: Vec<Vec<UnitEdge>>,
    must: Vec<Vec<UnitEdge>>,
}

impl UnitSystem {
    fn build(s: &Smts, step: Rational) -> Result<UnitSystem> {
        let conv = |edges: &[(crate::label::TimedLabel, StateId)]| -> Result<Vec<UnitEdge>> {
            edges
                .iter()
                .map(|&(l, t)| {
                    let lo = units_of(l.window.lo(), step)?;
                    let hi = match l.window.hi() {
                        Value::Infinity => None,
                        Value::Finite(r) => Some(units_of(r, step)?),
                    };
                    Ok(UnitEdge {
                        action: l.action,
                        lo,
                        hi,
                        target: t,
                    })
                })
                .collect()
        };
        let mut may = Vec::with_capacity(s.n_states());
        let mut must = Vec::with_capacity(s.n_states());
        for i in 0..s.n_states() {
            may.push(conv(s.may(StateId(i as u32)))?);
            must.push(conv(s.must(StateId(i as u32)))?);
        }
        Ok(UnitSystem { may, must })
    }
}

fn units_of(r: Rational, step: Rational) -> Result<i64> {
    let q = r / step;
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(Error::Config(
            "label endpoint is not aligned to the grid step".into(),
        ))
    }
}

/// Computes the refinement distance from `s` to `t`.
pub fn refinement_distance(s: &Smts, t: &Smts, settings: &GridSettings) -> Result<DistanceResult> {
    let step = settings.step;
    if step <= Rational::from_integer(0) {
        return Err(Error::Config("grid step must be positive".into()));
    }
    let us = UnitSystem::build(s, step)?;
    let ut = UnitSystem::build(t, step)?;

    // Pairs reachable from the initial pair through matched-action co-moves
    // of both kinds; only these influence the table at the initial pair.
    let mut index: BTreeMap<(StateId, StateId), u32> = BTreeMap::new();
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut succs: Vec<Vec<u32>> = Vec::new();
    let root = (s.initial(), t.initial());
    index.insert(root, 0);
    pairs.push(root);
    succs.push(Vec::new());
    let mut frontier = VecDeque::new();
    frontier.push_back(0u32);
    while let Some(p) = frontier.pop_front() {
        let (a, b) = pairs[p as usize];
        let mut out: Vec<u32> = Vec::new();
        {
            let mut co = |left: &[UnitEdge], right: &[UnitEdge]| {
                for ke in left {
                    for le in right {
                        if ke.action == le.action {
                            let key = (ke.target, le.target);
                            let q = match index.get(&key) {
                                Some(&q) => q,
                                None => {
                                    let q = pairs.len() as u32;
                                    index.insert(key, q);
                                    pairs.push(key);
                                    succs.push(Vec::new());
                                    frontier.push_back(q);
                                    q
                                }
                            };
                            out.push(q);
                        }
                    }
                }
            };
            co(&us.may[a.index()], &ut.may[b.index()]);
            co(&us.must[a.index()], &ut.must[b.index()]);
        }
        out.sort_unstable();
        out.dedup();
        succs[p as usize] = out;
    }
    let npairs = pairs.len();
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); npairs];
    for (p, out) in succs.iter().enumerate() {
        for &q in out {
            preds[q as usize].push(p as u32);
        }
    }
    for v in &mut preds {
        v.sort_unstable();
        v.dedup();
    }

    // Largest time constant of either operand, in units.
    let maxc = {
        let mut m: i64 = 0;
        for sys in [&us, &ut] {
            for edges in sys.may.iter().chain(sys.must.iter()) {
                for e in edges {
                    m = m.max(e.lo);
                    if let Some(h) = e.hi {
                        m = m.max(h);
                    }
                }
            }
        }
        m
    };
    let bump = {
        let q = Rational::one() / step;
        let c = q.ceil().to_integer();
        c.max(1)
    };
    let cert: i64 = (maxc as i128 + bump as i128)
        .saturating_mul(npairs as i128 + 1)
        .min(i64::MAX as i128 / 4) as i64;
    // Largest bound the memory guard admits.
    let mem_max: i64 = {
        let per_unit = (npairs as u64).max(1) * 16;
        ((MAX_TABLE_BYTES / per_unit) as i64 / 2).max(4)
    };

    let user_lead = settings
        .lead_bound
        .map(|r| units_of(r, step))
        .transpose()?;
    let user_cap = settings.value_cap.map(|r| units_of(r, step)).transpose()?;
    for (name, u) in [("lead bound", user_lead), ("value cap", user_cap)] {
        if let Some(u) = u {
            if u <= 0 {
                return Err(Error::Config(alloc::format!("{} must be positive", name)));
            }
        }
    }

    // Per-run bounds, smallest first. A finite result from any run is
    // exact; only a persistent infinite result escalates.
    let mut plan: Vec<(i64, i64)> = Vec::new();
    match (user_lead, user_cap) {
        (Some(l), Some(c)) => plan.push((l, c)),
        (Some(l), None) => plan.push((l, cert.min(l))),
        (None, Some(c)) => plan.push((c.max(1), c)),
        (None, None) => {
            let full = cert.min(mem_max);
            let mut c = (4 * (maxc + bump)).max(32).min(full);
            loop {
                plan.push((c, c));
                if c >= full {
                    break;
                }
                c = c.saturating_mul(8).min(full);
            }
        }
    }
    {
        let (l0, _) = plan[0];
        let bytes = (npairs as u64) * (2 * l0 as u64 + 1) * 8;
        if bytes > MAX_TABLE_BYTES {
            return Err(Error::Budget(alloc::format!(
                "distance tables would need {} bytes over {} state pairs",
                bytes,
                npairs
            )));
        }
    }

    let mut iterations: u64 = 0;
    let mut last: Option<(GridConfig, Vec<Vec<u64>>)> = None;
    for &(lead_u, cap_u) in &plan {
        let grid = GridConfig::new(
            step,
            step * Rational::from_integer(lead_u),
            step * Rational::from_integer(cap_u),
        )?;
        let tables = solve(&us, &ut, &pairs, &index, &preds, &grid, &mut iterations);
        let root_units = tables[0][grid.lead_units() as usize];
        let finite = root_units != INF;
        let is_last = (lead_u, cap_u) == *plan.last().unwrap();
        if finite || is_last {
            last = Some((grid, tables));
            break;
        }
    }
    let (grid, tables) = last.expect("at least one run");
    let root_units = tables[0][grid.lead_units() as usize];
    let value = grid.units_to_value(root_units);
    let reached = grid.lead_units().min(grid.cap_units() as i64);
    let saturated = value.is_infinite() && reached < cert;

    let mut table = BTreeMap::new();
    for (p, units) in tables.into_iter().enumerate() {
        table.insert(pairs[p], LeadFunction::from_units(&grid, units));
    }
    Ok(DistanceResult {
        value,
        grid,
        table,
        iterations,
        saturated,
    })
}

/// Worklist Kleene iteration from the all-⊥ table.
fn solve(
    us: &UnitSystem,
    ut: &UnitSystem,
    pairs: &[(StateId, StateId)],
    index: &BTreeMap<(StateId, StateId), u32>,
    preds: &[Vec<u32>],
    grid: &GridConfig,
    iterations: &mut u64,
) -> Vec<Vec<u64>> {
    let w = grid.table_len();
    let n = pairs.len();
    let mut tables: Vec<Vec<u64>> = vec![vec![0u64; w]; n];
    let mut queued = vec![true; n];
    let mut worklist: VecDeque<u32> = (0..n as u32).collect();

    let mut scratch = FScratch::default();
    let mut tmp = vec![0u64; w];
    let mut inner = vec![0u64; w];
    let mut result = vec![0u64; w];

    while let Some(p) = worklist.pop_front() {
        queued[p as usize] = false;
        *iterations += 1;
        let (a, b) = pairs[p as usize];

        // Tables of successors referenced in this recomputation, lifted to
        // g-tables on demand.
        let mut gcache: BTreeMap<u32, GTable> = BTreeMap::new();

        result.fill(0);
        {
            let mut half = |left: &[UnitEdge], right: &[UnitEdge]| {
                for ke in left {
                    inner.fill(INF);
                    for le in right {
                        if ke.action != le.action {
                            continue;
                        }
                        let q = index[&(ke.target, le.target)];
                        let gt = gcache
                            .entry(q)
                            .or_insert_with(|| GTable::new(&tables[q as usize], grid));
                        f_units_into(
                            &mut tmp,
                            (ke.lo, ke.hi),
                            (le.lo, le.hi),
                            gt,
                            grid,
                            &mut scratch,
                        );
                        for (iv, &tv) in inner.iter_mut().zip(tmp.iter()) {
                            if tv < *iv {
                                *iv = tv;
                            }
                        }
                    }
                    for (rv, &iv) in result.iter_mut().zip(inner.iter()) {
                        if iv > *rv {
                            *rv = iv;
                        }
                    }
                }
            };
            // Allowed behavior of the left against allowed of the right.
            half(&us.may[a.index()], &ut.may[b.index()]);
            // Required behavior of the right against required of the left:
            // the sup ranges over the right system's musts.
            let mut half_must = |left: &[UnitEdge], right: &[UnitEdge]| {
                for le in right {
                    inner.fill(INF);
                    for ke in left {
                        if ke.action != le.action {
                            continue;
                        }
                        let q = index[&(ke.target, le.target)];
                        let gt = gcache
                            .entry(q)
                            .or_insert_with(|| GTable::new(&tables[q as usize], grid));
                        f_units_into(
                            &mut tmp,
                            (ke.lo, ke.hi),
                            (le.lo, le.hi),
                            gt,
                            grid,
                            &mut scratch,
                        );
                        for (iv, &tv) in inner.iter_mut().zip(tmp.iter()) {
                            if tv < *iv {
                                *iv = tv;
                            }
                        }
                    }
                    for (rv, &iv) in result.iter_mut().zip(inner.iter()) {
                        if iv > *rv {
                            *rv = iv;
                        }
                    }
                }
            };
            half_must(&us.must[a.index()], &ut.must[b.index()]);
        }

        if result != tables[p as usize] {
            tables[p as usize].copy_from_slice(&result);
            for &q in &preds[p as usize] {
                if !queued[q as usize] {
                    queued[q as usize] = true;
                    worklist.push_back(q);
                }
            }
        }
    }
    tables
}
