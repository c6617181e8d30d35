//! Ground truth for small instances.
//!
//! [`solve_exact`] is a branch-and-bound over user -> (BS, channel)
//! assignments. Whether a set of users fits on one BS is decided exactly:
//! with per-cell energy accounting by an as-late-as-possible demand bound,
//! otherwise by a dynamic program over slots. Neither shares code with the
//! schedulers it is used to judge.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::Instance;
use crate::multi::AssociationOutcome;
use crate::scsb::{EnergyLedger, EnergyMode, Schedule, ScheduleOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_users: usize,
    pub max_bs: usize,
    pub max_channels: usize,
    pub max_slots: usize,
    pub max_nodes: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_users: 20,
            max_bs: 4,
            max_channels: 2,
            max_slots: 10,
            max_nodes: 200_000_000,
        }
    }
}

impl OracleLimits {
    pub fn admits(&self, users: usize, bs: usize, channels: usize, slots: usize) -> bool {
        users <= self.max_users
            && bs <= self.max_bs
            && channels <= self.max_channels
            && slots <= self.max_slots
    }

    fn check(&self, inst: &Instance) -> Result<()> {
        if !self.admits(inst.num_users(), inst.num_bs(), inst.num_channels(), inst.num_slots()) {
            return Err(Error::ResourceLimit(format!(
                "instance U={} B={} C={} T={} exceeds oracle limits U<={} B<={} C<={} T<={}",
                inst.num_users(),
                inst.num_bs(),
                inst.num_channels(),
                inst.num_slots(),
                self.max_users,
                self.max_bs,
                self.max_channels,
                self.max_slots
            )));
        }
        Ok(())
    }
}

/// A user placed on a channel of some BS: `(user, channel, nu, deadline)`.
pub type Placement = (usize, usize, u32, usize);

/// Exact feasibility of serving `placements` on one BS with per-cell energy
/// accounting.
///
/// Per channel, `late[t]` is the fewest cells that any deadline-feasible
/// layout must put in slots `1..=t`; the latest-possible layout attains it
/// for every `t` at once. The set fits iff each channel meets its deadlines
/// and the summed `late[t]` never exceeds the energy harvested by `t`.
pub fn fits_per_channel(
    num_slots: usize,
    num_channels: usize,
    arrivals: &[u32],
    placements: &[Placement],
) -> bool {
    let mut demand = vec![vec![0u64; num_slots + 1]; num_channels];
    for &(_, c, nu, d) in placements {
        demand[c][d] += u64::from(nu);
    }
    let mut need = vec![0u64; num_slots + 1];
    for per_channel in &mut demand {
        for d in 1..=num_slots {
            per_channel[d] += per_channel[d - 1];
            if per_channel[d] > d as u64 {
                return false;
            }
        }
        let mut late = 0u64;
        for t in (1..=num_slots).rev() {
            late = per_channel[t].max(late.saturating_sub(1));
            need[t] += late;
        }
    }
    let mut harvested = 0u64;
    for t in 1..=num_slots {
        harvested += u64::from(arrivals[t - 1]);
        if need[t] > harvested {
            return false;
        }
    }
    true
}

/// Exact feasibility under either accounting, with a witness grid.
///
/// Within a channel the users can always be served in EDF order over
/// whichever cells are busy, so a state is the slot, the number of cells
/// done per channel and the energy left; only the largest bank per
/// (slot, progress) needs keeping.
pub fn fit_exhaustive(
    num_slots: usize,
    num_channels: usize,
    arrivals: &[u32],
    placements: &[Placement],
    mode: EnergyMode,
) -> Option<Vec<Vec<Option<usize>>>> {
    // EDF cell sequence per channel: (deadline, user) per cell.
    let mut cells: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_channels];
    let mut sorted = placements.to_vec();
    sorted.sort_by_key(|&(u, c, nu, d)| (c, d, nu, u));
    for (u, c, nu, d) in sorted {
        for _ in 0..nu {
            cells[c].push((d, u));
        }
    }
    if cells.iter().any(|seq| seq.len() > num_slots) {
        return None;
    }
    let radix: Vec<usize> = cells.iter().map(|seq| seq.len() + 1).collect();
    let states: usize = radix.iter().product();
    let encode = |p: &[usize]| p.iter().zip(&radix).rev().fold(0, |acc, (&v, &r)| acc * r + v);
    let decode = |mut code: usize| {
        radix
            .iter()
            .map(|&r| {
                let v = code % r;
                code /= r;
                v
            })
            .collect::<Vec<_>>()
    };

    // bank[t][state] after slot t; parent records (previous state, mask).
    let mut bank: Vec<Vec<Option<u64>>> = vec![vec![None; states]; num_slots + 1];
    let mut parent: Vec<Vec<(usize, u32)>> = vec![vec![(0, 0); states]; num_slots + 1];
    bank[0][0] = Some(0);
    for t in 1..=num_slots {
        for code in 0..states {
            let Some(have) = bank[t - 1][code] else { continue };
            let have = have + u64::from(arrivals[t - 1]);
            let progress = decode(code);
            for mask in 0u32..(1 << num_channels) {
                let mut next = progress.clone();
                let mut busy = 0;
                let mut ok = true;
                for c in 0..num_channels {
                    if mask & (1 << c) != 0 {
                        if next[c] == cells[c].len() {
                            ok = false;
                            break;
                        }
                        next[c] += 1;
                        busy += 1;
                    }
                }
                if !ok {
                    continue;
                }
                let cost = mode.cost(busy) as u64;
                if cost > have {
                    continue;
                }
                // Every cell whose deadline is t must be done by now.
                let on_time = (0..num_channels)
                    .all(|c| next[c] == cells[c].len() || cells[c][next[c]].0 > t);
                if !on_time {
                    continue;
                }
                let target = encode(&next);
                let left = have - cost;
                if bank[t][target].is_none_or(|b| left > b) {
                    bank[t][target] = Some(left);
                    parent[t][target] = (code, mask);
                }
            }
        }
    }

    let full = encode(&cells.iter().map(Vec::len).collect::<Vec<_>>());
    bank[num_slots][full]?;
    let mut grid = vec![vec![None; num_channels]; num_slots];
    let mut code = full;
    for t in (1..=num_slots).rev() {
        let (prev, mask) = parent[t][code];
        let before = decode(prev);
        for c in 0..num_channels {
            if mask & (1 << c) != 0 {
                grid[t - 1][c] = Some(cells[c][before[c]].1);
            }
        }
        code = prev;
    }
    Some(grid)
}

fn fits(inst: &Instance, bs: usize, placements: &[Placement], mode: EnergyMode) -> bool {
    let arrivals = inst.energy().bs(bs);
    match mode {
        EnergyMode::PerChannel => {
            fits_per_channel(inst.num_slots(), inst.num_channels(), arrivals, placements)
        }
        EnergyMode::PerSlot => {
            fit_exhaustive(inst.num_slots(), inst.num_channels(), arrivals, placements, mode)
                .is_some()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub optimum: usize,
    pub witness: AssociationOutcome,
    /// Search nodes visited.
    pub nodes: u64,
}

struct Search<'a> {
    inst: &'a Instance,
    mode: EnergyMode,
    max_nodes: u64,
    users: Vec<usize>,
    /// Options per position of `users`: `(bs, channel, nu)` by increasing nu.
    options: Vec<Vec<(usize, usize, u32)>>,
    /// Cheapest nu per (position, bs), if any.
    cheapest: Vec<Vec<Option<u32>>>,
    cap: Vec<u64>,
    load: Vec<u64>,
    placed: Vec<Vec<Placement>>,
    current: Vec<Option<(usize, usize)>>,
    best: usize,
    best_assignment: Vec<Option<(usize, usize)>>,
    nodes: u64,
}

impl Search<'_> {
    fn bound(&self, from: usize) -> usize {
        let left = self.users.len() - from;
        let mut total = 0;
        for b in 0..self.cap.len() {
            let mut room = self.cap[b] - self.load[b];
            let mut sizes: Vec<u32> = (from..self.users.len())
                .filter_map(|i| self.cheapest[i][b])
                .collect();
            sizes.sort_unstable();
            for nu in sizes {
                if u64::from(nu) > room {
                    break;
                }
                room -= u64::from(nu);
                total += 1;
            }
            if total >= left {
                return left;
            }
        }
        total.min(left)
    }

    fn dfs(&mut self, i: usize, served: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::ResourceLimit(format!(
                "search exceeded {} nodes",
                self.max_nodes
            )));
        }
        if i == self.users.len() {
            if served > self.best {
                self.best = served;
                self.best_assignment = self.current.clone();
            }
            return Ok(());
        }
        if served + self.bound(i) <= self.best {
            return Ok(());
        }
        let u = self.users[i];
        for k in 0..self.options[i].len() {
            let (b, c, nu) = self.options[i][k];
            if self.load[b] + u64::from(nu) > self.cap[b] {
                continue;
            }
            self.placed[b].push((u, c, nu, self.inst.deadline(u)));
            if fits(self.inst, b, &self.placed[b], self.mode) {
                self.load[b] += u64::from(nu);
                self.current[u] = Some((b, c));
                self.dfs(i + 1, served + 1)?;
                self.current[u] = None;
                self.load[b] -= u64::from(nu);
            }
            self.placed[b].pop();
        }
        self.dfs(i + 1, served)
    }
}

/// Most cells BS `bs` can ever keep busy: a layout can use at most `E(t)`
/// units up to `t` and `C` cells per later slot.
fn cell_capacity(inst: &Instance, bs: usize, mode: EnergyMode) -> u64 {
    let big_t = inst.num_slots() as u64;
    let c = inst.num_channels() as u64;
    let mut harvested = 0u64;
    let mut best = big_t * c;
    for (t, &a) in inst.energy().bs(bs).iter().enumerate() {
        harvested += u64::from(a);
        let rest = big_t - (t as u64 + 1);
        let bound = match mode {
            EnergyMode::PerChannel => harvested + c * rest,
            EnergyMode::PerSlot => c * (harvested.min(t as u64 + 1) + rest),
        };
        best = best.min(bound);
    }
    best
}

/// Maximum number of users any feasible association serves, with a witness.
pub fn solve_exact(inst: &Instance, limits: &OracleLimits) -> Result<ExactSolution> {
    solve_exact_with_mode(inst, limits, EnergyMode::PerChannel)
}

pub fn solve_exact_with_mode(
    inst: &Instance,
    limits: &OracleLimits,
    mode: EnergyMode,
) -> Result<ExactSolution> {
    limits.check(inst)?;
    let mut users = Vec::new();
    let mut options = Vec::new();
    let mut cheapest = Vec::new();
    for u in 0..inst.num_users() {
        let mut opts = Vec::new();
        let mut per_bs = vec![None; inst.num_bs()];
        for b in 0..inst.num_bs() {
            for c in 0..inst.num_channels() {
                if let Some(nu) = inst.servable_nu(u, b, c) {
                    if nu as usize <= inst.deadline(u) {
                        opts.push((b, c, nu));
                        per_bs[b] = Some(per_bs[b].map_or(nu, |m: u32| m.min(nu)));
                    }
                }
            }
        }
        if !opts.is_empty() {
            opts.sort_by_key(|&(b, c, nu)| (nu, b, c));
            users.push(u);
            options.push(opts);
            cheapest.push(per_bs);
        }
    }
    // Cheap users first: good incumbents early make the bound bite.
    let mut order: Vec<usize> = (0..users.len()).collect();
    order.sort_by_key(|&i| (options[i][0].2, inst.deadline(users[i]), users[i]));
    let users: Vec<usize> = order.iter().map(|&i| users[i]).collect();
    let options: Vec<_> = order.iter().map(|&i| options[i].clone()).collect();
    let cheapest: Vec<_> = order.iter().map(|&i| cheapest[i].clone()).collect();

    let mut search = Search {
        inst,
        mode,
        max_nodes: limits.max_nodes,
        users,
        options,
        cheapest,
        cap: (0..inst.num_bs()).map(|b| cell_capacity(inst, b, mode)).collect(),
        load: vec![0; inst.num_bs()],
        placed: vec![Vec::new(); inst.num_bs()],
        current: vec![None; inst.num_users()],
        best: 0,
        best_assignment: vec![None; inst.num_users()],
        nodes: 0,
    };
    search.dfs(0, 0)?;

    let witness = build_witness(inst, &search.best_assignment, mode)?;
    if witness.served_total != search.best {
        return Err(Error::Internal("witness does not match the optimum".into()));
    }
    Ok(ExactSolution {
        optimum: search.best,
        witness,
        nodes: search.nodes,
    })
}

fn build_witness(
    inst: &Instance,
    assignment: &[Option<(usize, usize)>],
    mode: EnergyMode,
) -> Result<AssociationOutcome> {
    let mut per_bs = BTreeMap::new();
    let mut served_total = 0;
    for b in 0..inst.num_bs() {
        let placements: Vec<Placement> = assignment
            .iter()
            .enumerate()
            .filter_map(|(u, a)| match *a {
                Some((bb, c)) if bb == b => {
                    Some((u, c, inst.servable_nu(u, b, c)?, inst.deadline(u)))
                }
                _ => None,
            })
            .collect();
        if placements.is_empty() {
            continue;
        }
        let arrivals = inst.energy().bs(b);
        let grid = fit_exhaustive(inst.num_slots(), inst.num_channels(), arrivals, &placements, mode)
            .ok_or_else(|| Error::Internal(format!("no layout for the chosen users of BS {}", b + 1)))?;
        let served = placements.iter().map(|p| p.0).collect();
        let schedule = Schedule::from_parts(grid, served)?;
        let ledger = EnergyLedger::for_schedule(arrivals, &schedule, mode)?;
        served_total += schedule.served_count();
        per_bs.insert(b, ScheduleOutcome::from_parts(schedule, ledger));
    }
    let mut used: Vec<(usize, usize)> = per_bs.iter().map(|(&b, o)| (o.served_count, b)).collect();
    used.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(AssociationOutcome {
        used_bs: used.iter().map(|&(_, b)| b).collect(),
        iteration_counts: used.iter().map(|&(n, _)| n).collect(),
        per_bs,
        served_total,
    })
}

/// Classic maximum number of on-time jobs on one machine with no energy
/// limit: EDF, dropping the longest job whenever the running total passes
/// the current deadline.
pub fn moore_hodgson(nu: &[u32], deadlines: &[usize], num_slots: usize) -> Result<usize> {
    if nu.len() != deadlines.len() {
        return Err(Error::Dimension {
            what: "deadlines",
            expected: nu.len(),
            actual: deadlines.len(),
        });
    }
    let mut jobs: Vec<(usize, u32)> = deadlines
        .iter()
        .zip(nu)
        .map(|(&d, &n)| (d.min(num_slots), n))
        .collect();
    jobs.sort_unstable();
    let mut kept: Vec<u32> = Vec::new();
    let mut total = 0u64;
    for (d, n) in jobs {
        kept.push(n);
        total += u64::from(n);
        if total > d as u64 {
            let (pos, &longest) = kept
                .iter()
                .enumerate()
                .max_by_key(|&(_, &v)| v)
                .expect("just pushed");
            total -= u64::from(longest);
            kept.swap_remove(pos);
        }
    }
    Ok(kept.len())
}

/// Fewest users the greedy association can end up serving when every tie
/// is resolved against it.
///
/// Each round the adversary may commit any BS whose optimal count is
/// maximal, with any optimal user set of that BS. Every tie-breaking rule
/// for the per-BS scheduler and for the BS choice yields one of these
/// branches, so the result is a lower bound over all tie-breaking rules.
pub fn scmb_worst_case(inst: &Instance, limits: &OracleLimits) -> Result<usize> {
    if inst.num_channels() != 1 {
        return Err(invalid("worst-case analysis expects a single channel"));
    }
    limits.check(inst)?;
    if inst.num_users() > 16 {
        return Err(Error::ResourceLimit("worst-case analysis is limited to 16 users".into()));
    }
    let all: Vec<usize> = (0..inst.num_users()).collect();
    let open: Vec<usize> = (0..inst.num_bs()).collect();
    let mut nodes = 0u64;
    worst_case_rec(inst, &all, &open, limits.max_nodes, &mut nodes)
}

fn worst_case_rec(
    inst: &Instance,
    remaining: &[usize],
    open: &[usize],
    max_nodes: u64,
    nodes: &mut u64,
) -> Result<usize> {
    *nodes += 1;
    if *nodes > max_nodes {
        return Err(Error::ResourceLimit(format!("worst-case analysis exceeded {max_nodes} nodes")));
    }
    if remaining.is_empty() || open.is_empty() {
        return Ok(0);
    }
    let mut best_sets: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    let mut best = 0;
    for &b in open {
        let sets = maximum_sets(inst, b, remaining);
        let size = sets.first().map_or(0, Vec::len);
        if size > best {
            best = size;
            best_sets.clear();
        }
        if size == best {
            best_sets.push((b, sets));
        }
    }
    if best == 0 {
        return Ok(0);
    }
    let mut worst = usize::MAX;
    for (b, sets) in best_sets {
        let rest_open: Vec<usize> = open.iter().copied().filter(|&x| x != b).collect();
        for set in sets {
            let rest: Vec<usize> = remaining.iter().copied().filter(|u| !set.contains(u)).collect();
            worst = worst.min(best + worst_case_rec(inst, &rest, &rest_open, max_nodes, nodes)?);
        }
    }
    Ok(worst)
}

/// All maximum-cardinality user sets BS `bs` can serve alone.
fn maximum_sets(inst: &Instance, bs: usize, users: &[usize]) -> Vec<Vec<usize>> {
    let candidates: Vec<usize> = users
        .iter()
        .copied()
        .filter(|&u| inst.servable_nu(u, bs, 0).is_some())
        .collect();
    let mut best: Vec<Vec<usize>> = vec![Vec::new()];
    for mask in 1u32..(1 << candidates.len()) {
        let size = mask.count_ones() as usize;
        if size < best[0].len() {
            continue;
        }
        let set: Vec<usize> = (0..candidates.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| candidates[i])
            .collect();
        let placements: Vec<Placement> = set
            .iter()
            .map(|&u| (u, 0, inst.servable_nu(u, bs, 0).unwrap(), inst.deadline(u)))
            .collect();
        if fits_per_channel(inst.num_slots(), 1, inst.energy().bs(bs), &placements) {
            if size > best[0].len() {
                best.clear();
            }
            best.push(set);
        }
    }
    if best[0].is_empty() {
        return Vec::new();
    }
    best
}

fn var_x(u: usize, b: usize, c: usize, t: usize) -> String {
    format!("x_{}_{}_{}_{}", u + 1, b + 1, c + 1, t + 1)
}

fn var_z(b: usize, t: usize) -> String {
    format!("z_{}_{}", b + 1, t + 1)
}

/// One `name: expr op rhs` row, wrapped so no line runs past 80 columns.
fn emit_row(out: &mut String, name: &str, terms: &[(i64, String)], op: &str, rhs: i64) {
    let mut line = format!(" {name}:");
    let mut first = true;
    for (coef, var) in terms {
        let piece = if first {
            if *coef < 0 {
                format!(" - {} {var}", -coef)
            } else {
                format!(" {coef} {var}")
            }
        } else if *coef < 0 {
            format!(" - {} {var}", -coef)
        } else {
            format!(" + {coef} {var}")
        };
        first = false;
        if line.len() + piece.len() > 80 {
            out.push_str(&line);
            out.push('\n');
            line = format!("  {}", piece.trim_start());
        } else {
            line.push_str(&piece);
        }
    }
    let tail = format!(" {op} {rhs}");
    if line.len() + tail.len() > 80 {
        out.push_str(&line);
        out.push('\n');
        line = String::from(" ");
    }
    line.push_str(&tail);
    out.push_str(&line);
    out.push('\n');
}

/// The full integer program in CPLEX LP format.
///
/// Variables are `x_u_b_c_t` (binary: user `u` served by BS `b` on channel
/// `c` in slot `t`) and `z_b_t` (continuous: energy banked at BS `b` in slot
/// `t`), all one-based. The objective weights each `x` by `1/nu`, so a served
/// user counts once. Pairwise exclusion rows are written once per unordered
/// pair. The demand rows use the big-M pair with `M = T`. Pairs a user can
/// never be served on get the fixed bound `x = 0` and no demand rows.
pub fn export_ilp(inst: &Instance) -> String {
    let (nu_, nb, nc, nt) = (inst.num_users(), inst.num_bs(), inst.num_channels(), inst.num_slots());
    let big_m = nt as i64;
    let mut out = String::new();
    let _ = writeln!(out, "\\ Association, scheduling and channel allocation with harvested energy");
    let _ = writeln!(out, "\\ U={nu_} B={nb} C={nc} T={nt}");
    out.push_str("Maximize\n");

    let mut objective = String::from(" obj:");
    let mut first = true;
    for u in 0..nu_ {
        for b in 0..nb {
            for c in 0..nc {
                let Some(nu) = inst.nu(u, b, c) else { continue };
                for t in 0..nt {
                    let piece = format!(
                        "{}{} {}",
                        if first { " " } else { " + " },
                        1.0 / f64::from(nu),
                        var_x(u, b, c, t)
                    );
                    first = false;
                    if objective.len() + piece.len() > 80 {
                        out.push_str(&objective);
                        out.push('\n');
                        objective = format!(" {}", piece.trim_start());
                    } else {
                        objective.push_str(&piece);
                    }
                }
            }
        }
    }
    if first {
        objective.push_str(" 0 z_1_1");
    }
    out.push_str(&objective);
    out.push('\n');

    out.push_str("Subject To\n");
    // One channel per user and BS.
    for u in 0..nu_ {
        for b in 0..nb {
            for c in 0..nc {
                for c2 in c + 1..nc {
                    for t in 0..nt {
                        for t2 in 0..nt {
                            emit_row(
                                &mut out,
                                &format!("p1c_{}_{}_{}_{}_{}_{}", u + 1, b + 1, t + 1, t2 + 1, c + 1, c2 + 1),
                                &[(1, var_x(u, b, c, t)), (1, var_x(u, b, c2, t2))],
                                "<=",
                                1,
                            );
                        }
                    }
                }
            }
        }
    }
    // No two users in one cell.
    for b in 0..nb {
        for c in 0..nc {
            for t in 0..nt {
                let terms: Vec<(i64, String)> = (0..nu_).map(|u| (1, var_x(u, b, c, t))).collect();
                if !terms.is_empty() {
                    emit_row(&mut out, &format!("p1d_{}_{}_{}", b + 1, c + 1, t + 1), &terms, "<=", 1);
                }
            }
        }
    }
    // One BS per user.
    for u in 0..nu_ {
        for b in 0..nb {
            for b2 in b + 1..nb {
                for t in 0..nt {
                    for t2 in 0..nt {
                        for c in 0..nc {
                            for c2 in 0..nc {
                                emit_row(
                                    &mut out,
                                    &format!(
                                        "p1e_{}_{}_{}_{}_{}_{}_{}",
                                        u + 1,
                                        b + 1,
                                        b2 + 1,
                                        t + 1,
                                        t2 + 1,
                                        c + 1,
                                        c2 + 1
                                    ),
                                    &[(1, var_x(u, b, c, t)), (1, var_x(u, b2, c2, t2))],
                                    "<=",
                                    1,
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    // Energy bank recursion and its initial value.
    for b in 0..nb {
        let arrivals = inst.energy().bs(b);
        for t in 0..nt.saturating_sub(1) {
            let mut terms = vec![(1, var_z(b, t + 1)), (-1, var_z(b, t))];
            for u in 0..nu_ {
                for c in 0..nc {
                    terms.push((1, var_x(u, b, c, t)));
                }
            }
            emit_row(
                &mut out,
                &format!("p1f_{}_{}", b + 1, t + 1),
                &terms,
                "=",
                i64::from(arrivals[t + 1]),
            );
        }
        emit_row(
            &mut out,
            &format!("p1g_{}", b + 1),
            &[(1, var_z(b, 0))],
            "=",
            i64::from(arrivals[0]),
        );
    }
    // Serve only with energy in the bank.
    for u in 0..nu_ {
        for b in 0..nb {
            for c in 0..nc {
                for t in 0..nt {
                    emit_row(
                        &mut out,
                        &format!("p1h_{}_{}_{}_{}", u + 1, b + 1, c + 1, t + 1),
                        &[(1, var_x(u, b, c, t)), (-1, var_z(b, t))],
                        "<=",
                        0,
                    );
                }
            }
        }
    }
    // Exactly nu slots once any slot is used (big-M pair).
    for u in 0..nu_ {
        for b in 0..nb {
            for c in 0..nc {
                let Some(nu) = inst.nu(u, b, c) else { continue };
                let nu = i64::from(nu);
                for t in 0..nt {
                    let lower: Vec<(i64, String)> = (0..nt)
                        .map(|s| (if s == t { 1 - nu } else { 1 }, var_x(u, b, c, s)))
                        .collect();
                    emit_row(
                        &mut out,
                        &format!("p1i_{}_{}_{}_{}", u + 1, b + 1, c + 1, t + 1),
                        &lower,
                        ">=",
                        0,
                    );
                    let upper: Vec<(i64, String)> = (0..nt)
                        .map(|s| (if s == t { 1 + big_m - nu } else { 1 }, var_x(u, b, c, s)))
                        .collect();
                    emit_row(
                        &mut out,
                        &format!("p1j_{}_{}_{}_{}", u + 1, b + 1, c + 1, t + 1),
                        &upper,
                        "<=",
                        big_m,
                    );
                }
            }
        }
    }
    // Deadlines.
    for u in 0..nu_ {
        let d = inst.deadline(u) as i64;
        for b in 0..nb {
            for c in 0..nc {
                for t in 0..nt {
                    emit_row(
                        &mut out,
                        &format!("p1k_{}_{}_{}_{}", u + 1, b + 1, c + 1, t + 1),
                        &[((t + 1) as i64, var_x(u, b, c, t))],
                        "<=",
                        d,
                    );
                }
            }
        }
    }

    out.push_str("Bounds\n");
    for b in 0..nb {
        for t in 0..nt {
            let _ = writeln!(out, " {} >= 0", var_z(b, t));
        }
    }
    for u in 0..nu_ {
        for b in 0..nb {
            for c in 0..nc {
                if inst.nu(u, b, c).is_none() {
                    for t in 0..nt {
                        let _ = writeln!(out, " {} = 0", var_x(u, b, c, t));
                    }
                }
            }
        }
    }
    out.push_str("Binaries\n");
    let mut line = String::new();
    for u in 0..nu_ {
        for b in 0..nb {
            for c in 0..nc {
                for t in 0..nt {
                    let v = var_x(u, b, c, t);
                    if line.len() + v.len() + 1 > 80 {
                        out.push_str(&line);
                        out.push('\n');
                        line.clear();
                    }
                    line.push(' ');
                    line.push_str(&v);
                }
            }
        }
    }
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("End\n");
    out
}
