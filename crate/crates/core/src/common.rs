//! Optimal single-BS scheduling when every user shares the deadline `T`.
//!
//! With a common deadline the order of users is irrelevant; what matters is
//! the longest run of slots the harvested energy can keep busy. [`budget`]
//! finds the best starting slot and run length, and [`pack`] fills that run
//! with the smallest requests first.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::model::Instance;
use crate::scsb::{EnergyLedger, EnergyMode, Schedule, ScheduleOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityProfile {
    /// `capacity[t]`: slots usable back to back from one-based slot `t + 1`.
    pub capacity: Vec<usize>,
    pub best: usize,
    /// One-based start slot attaining `best` (smallest on ties).
    pub best_slot: usize,
    /// Fixed-point steps taken over all start slots.
    pub iterations: usize,
}

/// Accumulated capacity for every start slot by fixed-point iteration on
/// the prefix energy `G(t) = A_1 + ... + A_t`.
pub fn budget(arrivals: &[u32]) -> Result<CapacityProfile> {
    let big_t = arrivals.len();
    if big_t == 0 {
        return Err(invalid("energy vector is empty"));
    }
    // prefix[t] = G(t) for one-based t; G beyond T is clamped to G(T).
    let mut prefix = vec![0u64; big_t + 1];
    for t in 1..=big_t {
        prefix[t] = prefix[t - 1] + u64::from(arrivals[t - 1]);
    }
    let gamma = |t: u64| prefix[(t as usize).min(big_t)];

    let mut capacity = Vec::with_capacity(big_t);
    let mut iterations = 0;
    for t in 1..=big_t as u64 {
        let mut t_prime = t + gamma(t);
        let mut steps = 0;
        while t_prime <= big_t as u64 && t_prime != t + gamma(t_prime) {
            t_prime = t + gamma(t_prime);
            steps += 1;
            if steps > big_t {
                return Err(Error::Internal(format!(
                    "capacity iteration from slot {t} did not settle within {big_t} steps"
                )));
            }
        }
        iterations += steps;
        let lambda = gamma(t_prime).min(big_t as u64 - t + 1);
        capacity.push(lambda as usize);
    }

    let mut best_slot = 1;
    for (i, &c) in capacity.iter().enumerate() {
        if c > capacity[best_slot - 1] {
            best_slot = i + 1;
        }
    }
    Ok(CapacityProfile {
        best: capacity[best_slot - 1],
        best_slot,
        capacity,
        iterations,
    })
}

/// Admits users by increasing `nu` (ties by id) while the total fits in
/// `capacity`, and lays them out back to back from one-based slot `start`.
///
/// `jobs` are `(user, nu)` pairs. The ledger pays every busy slot from the
/// earliest arrivals; an argument error means the requested run is not
/// covered by `arrivals`.
pub fn pack(
    num_slots: usize,
    arrivals: &[u32],
    jobs: &[(usize, u32)],
    capacity: usize,
    start: usize,
) -> Result<ScheduleOutcome> {
    check_dim("arrivals per slot", num_slots, arrivals.len())?;
    if start == 0 || start > num_slots {
        return Err(invalid(format!("start slot {start} outside 1..={num_slots}")));
    }
    let mut sorted = jobs.to_vec();
    sorted.sort_by_key(|&(user, nu)| (nu, user));

    let mut schedule = Schedule::empty(num_slots, 1);
    let mut used = 0usize;
    let mut cursor = start - 1;
    for (user, nu) in sorted {
        let nu = nu as usize;
        if nu == 0 || used + nu > capacity {
            break;
        }
        if cursor + nu > num_slots {
            return Err(invalid(format!(
                "capacity {capacity} from slot {start} overruns the frame"
            )));
        }
        schedule.place_block(user, 0, cursor, nu);
        cursor += nu;
        used += nu;
    }
    let ledger = EnergyLedger::for_schedule(arrivals, &schedule, EnergyMode::PerChannel)?;
    Ok(ScheduleOutcome::from_parts(schedule, ledger))
}

/// Optimal schedule for one BS, one channel and `d_u = T` for all users.
pub fn schedule_scsb2(inst: &Instance) -> Result<ScheduleOutcome> {
    if inst.num_bs() != 1 || inst.num_channels() != 1 {
        return Err(invalid(format!(
            "expected one BS and one channel, got B={} C={}",
            inst.num_bs(),
            inst.num_channels()
        )));
    }
    let big_t = inst.num_slots();
    if let Some(u) = (0..inst.num_users()).find(|&u| inst.deadline(u) != big_t) {
        return Err(invalid(format!(
            "user {} has deadline {} but common deadline {big_t} is required",
            u + 1,
            inst.deadline(u)
        )));
    }
    let arrivals = inst.energy().bs(0);
    let profile = budget(arrivals)?;
    let jobs: Vec<(usize, u32)> = (0..inst.num_users())
        .filter_map(|u| inst.servable_nu(u, 0, 0).map(|nu| (u, nu)))
        .collect();
    pack(big_t, arrivals, &jobs, profile.best, profile.best_slot)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_front_loaded() {
        let p = budget(&[6, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!((p.best, p.best_slot), (6, 1));
    }

    #[test]
    fn budget_no_energy() {
        let p = budget(&[0, 0, 0]).unwrap();
        assert_eq!((p.best, p.best_slot), (0, 1));
        assert_eq!(p.capacity, vec![0, 0, 0]);
    }

    #[test]
    fn budget_alternating() {
        let p = budget(&[1, 0, 1, 0]).unwrap();
        assert_eq!(p.capacity, vec![1, 2, 2, 1]);
        assert_eq!((p.best, p.best_slot), (2, 2));
    }

    #[test]
    fn budget_rejects_empty() {
        assert!(budget(&[]).is_err());
    }

    #[test]
    fn pack_zero_capacity() {
        let out = pack(3, &[1, 1, 1], &[(0, 1)], 0, 1).unwrap();
        assert_eq!(out.served_count, 0);
    }

    #[test]
    fn pack_prefers_small_requests() {
        let out = pack(4, &[3, 0, 0, 0], &[(0, 3), (1, 1), (2, 2)], 3, 1).unwrap();
        assert_eq!(out.schedule.served().iter().copied().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(out.schedule.cells_of(1), vec![(0, 0)]);
        assert_eq!(out.schedule.cells_of(2), vec![(1, 0), (2, 0)]);
    }

    #[test]
    fn pack_back_to_back_from_start() {
        let out = pack(8, &[5, 0, 0, 0, 0, 0, 0, 0], &[(0, 1), (1, 1), (2, 1)], 5, 3).unwrap();
        assert_eq!(out.served_count, 3);
        let slots: Vec<usize> = (0..3).map(|u| out.schedule.cells_of(u)[0].0 + 1).collect();
        assert_eq!(slots, vec![3, 4, 5]);
    }

    #[test]
    fn scsb2_single_user() {
        let inst = Instance::single(3, vec![0, 1, 0], &[(1, 3)]).unwrap();
        assert_eq!(schedule_scsb2(&inst).unwrap().served_count, 1);
    }

    #[test]
    fn scsb2_alternating_energy() {
        let inst = Instance::single(4, vec![1, 0, 1, 0], &[(1, 4), (1, 4), (1, 4)]).unwrap();
        let out = schedule_scsb2(&inst).unwrap();
        assert_eq!(out.served_count, 2);
        let first = out.schedule.grid().iter().position(|row| row[0].is_some()).unwrap();
        assert_eq!(first + 1, 2);
    }

    #[test]
    fn scsb2_rejects_distinct_deadlines() {
        let inst = Instance::single(4, vec![1, 0, 1, 0], &[(1, 4), (1, 3)]).unwrap();
        assert!(schedule_scsb2(&inst).is_err());
    }
}
