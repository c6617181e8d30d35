//! Several BSs and several channels.
//!
//! Association is greedy: each round schedules the remaining users on every
//! remaining BS, keeps the BS that serves the most and removes its users.
//! With one channel the per-BS step is the optimal single-channel scheduler
//! and the result serves at least half the optimum. With several channels
//! every user is first pinned to its cheapest channel and the same engine
//! runs over the whole slot/channel grid.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::model::Instance;
use crate::scsb::{run_engine, schedule_scsb1_at, EnergyMode, Job, ScheduleOutcome};

/// Committed per-BS schedules of a greedy association run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationOutcome {
    pub per_bs: BTreeMap<usize, ScheduleOutcome>,
    /// BSs in the order they were committed.
    pub used_bs: Vec<usize>,
    pub served_total: usize,
    /// Served count of the committed BS in each round.
    pub iteration_counts: Vec<usize>,
}

impl AssociationOutcome {
    /// BS serving `user`, if any.
    pub fn bs_of(&self, user: usize) -> Option<usize> {
        self.per_bs
            .iter()
            .find(|(_, o)| o.schedule.served().contains(&user))
            .map(|(&b, _)| b)
    }

    pub fn served_users(&self) -> BTreeSet<usize> {
        self.per_bs
            .values()
            .flat_map(|o| o.schedule.served().iter().copied())
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

impl Serialize for AssociationOutcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            per_bs: BTreeMap<usize, &'a crate::scsb::Schedule>,
            used_bs: Vec<usize>,
            served_total: usize,
            iteration_counts: &'a [usize],
        }
        Repr {
            per_bs: self.per_bs.iter().map(|(b, o)| (b + 1, &o.schedule)).collect(),
            used_bs: self.used_bs.iter().map(|b| b + 1).collect(),
            served_total: self.served_total,
            iteration_counts: &self.iteration_counts,
        }
        .serialize(serializer)
    }
}

/// Channel picked for each user on one BS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChannelAssignment {
    /// `channel[u]`, zero-based; `None` for users outside the considered set
    /// or with no usable channel.
    pub channel: Vec<Option<usize>>,
    /// Considered users that no channel of this BS can serve.
    pub unservable: Vec<usize>,
}

/// Cheapest channel per user on BS `bs`, visiting `users` in increasing id.
/// Ties go to the channel with the fewest users so far, then the lowest
/// index.
pub fn allocate_channels(inst: &Instance, bs: usize, users: &[usize]) -> Result<ChannelAssignment> {
    if bs >= inst.num_bs() {
        return Err(invalid(format!("BS {} out of range", bs + 1)));
    }
    let mut order = users.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut channel = vec![None; inst.num_users()];
    let mut unservable = Vec::new();
    let mut load = vec![0usize; inst.num_channels()];
    for u in order {
        if u >= inst.num_users() {
            return Err(invalid(format!("user {} out of range", u + 1)));
        }
        let pick = (0..inst.num_channels())
            .filter_map(|c| inst.servable_nu(u, bs, c).map(|nu| (nu, load[c], c)))
            .min();
        match pick {
            Some((_, _, c)) => {
                channel[u] = Some(c);
                load[c] += 1;
            }
            None => unservable.push(u),
        }
    }
    Ok(ChannelAssignment { channel, unservable })
}

/// Multi-channel heuristic for BS `bs` restricted to `users`.
pub fn schedule_mcsb_at(
    inst: &Instance,
    bs: usize,
    users: &[usize],
    mode: EnergyMode,
) -> Result<ScheduleOutcome> {
    let assignment = allocate_channels(inst, bs, users)?;
    let jobs = assignment
        .channel
        .iter()
        .enumerate()
        .filter_map(|(u, &c)| {
            let c = c?;
            Some(Job {
                user: u,
                nu: inst.servable_nu(u, bs, c)?,
                deadline: inst.deadline(u),
                channel: c,
            })
        })
        .collect();
    run_engine(
        inst.num_slots(),
        inst.num_channels(),
        inst.energy().bs(bs),
        mode,
        jobs,
        &mut |_| {},
    )
}

/// Multi-channel heuristic on a single-BS instance.
pub fn schedule_mcsb(inst: &Instance) -> Result<ScheduleOutcome> {
    schedule_mcsb_with_mode(inst, EnergyMode::PerChannel)
}

pub fn schedule_mcsb_with_mode(inst: &Instance, mode: EnergyMode) -> Result<ScheduleOutcome> {
    if inst.num_bs() != 1 {
        return Err(invalid(format!("expected one BS, got {}", inst.num_bs())));
    }
    let users: Vec<usize> = (0..inst.num_users()).collect();
    schedule_mcsb_at(inst, 0, &users, mode)
}

/// Greedy association driven by an arbitrary per-BS scheduler.
///
/// Stops early once no remaining BS can serve any remaining user, so it
/// runs at most `min(U, B)` rounds.
pub fn associate<F>(inst: &Instance, mut per_bs: F) -> Result<AssociationOutcome>
where
    F: FnMut(usize, &[usize]) -> Result<ScheduleOutcome>,
{
    let mut remaining: Vec<usize> = (0..inst.num_users()).collect();
    let mut open: Vec<usize> = (0..inst.num_bs()).collect();
    let mut outcome = AssociationOutcome {
        per_bs: BTreeMap::new(),
        used_bs: Vec::new(),
        served_total: 0,
        iteration_counts: Vec::new(),
    };
    while !remaining.is_empty() && !open.is_empty() {
        let mut best: Option<(usize, ScheduleOutcome)> = None;
        for &b in &open {
            let candidate = per_bs(b, &remaining)?;
            if best
                .as_ref()
                .is_none_or(|(_, o)| candidate.served_count > o.served_count)
            {
                best = Some((b, candidate));
            }
        }
        let (b_star, chosen) = best.expect("open set is non-empty");
        if chosen.served_count == 0 {
            break;
        }
        remaining.retain(|u| !chosen.schedule.served().contains(u));
        open.retain(|&b| b != b_star);
        outcome.used_bs.push(b_star);
        outcome.iteration_counts.push(chosen.served_count);
        outcome.served_total += chosen.served_count;
        outcome.per_bs.insert(b_star, chosen);
    }
    Ok(outcome)
}

/// Greedy association over single-channel BSs; serves at least half of the
/// optimum.
pub fn schedule_scmb(inst: &Instance) -> Result<AssociationOutcome> {
    if inst.num_channels() != 1 {
        return Err(invalid(format!("expected one channel, got {}", inst.num_channels())));
    }
    associate(inst, |b, users| schedule_scsb1_at(inst, b, users))
}

/// Greedy association with the multi-channel heuristic as the per-BS step.
pub fn schedule_mcmb(inst: &Instance) -> Result<AssociationOutcome> {
    schedule_mcmb_with_mode(inst, EnergyMode::PerChannel)
}

pub fn schedule_mcmb_with_mode(inst: &Instance, mode: EnergyMode) -> Result<AssociationOutcome> {
    associate(inst, |b, users| schedule_mcsb_at(inst, b, users, mode))
}
