// Shared generators and a brute-force optimum for the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use ehs::model::{EnergyProfile, SlotCount, UserRequest};
use ehs::{EnergyMode, Instance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_users: usize,
    pub max_bs: usize,
    pub max_channels: usize,
    pub max_slots: usize,
    pub max_arrival: u32,
    /// Probability that a `(u, b, c)` entry is unservable.
    pub p_unservable: f64,
}

impl Shape {
    pub fn single(max_users: usize, max_slots: usize, max_arrival: u32) -> Self {
        Self {
            max_users,
            max_bs: 1,
            max_channels: 1,
            max_slots,
            max_arrival,
            p_unservable: 0.05,
        }
    }
}

/// Random instance with exactly `b` BSs and `c` channels, up to the other
/// limits of `shape`.
pub fn random_instance_with(rng: &mut ChaCha8Rng, shape: Shape, b: usize, c: usize) -> Instance {
    let t = rng.random_range(1..=shape.max_slots);
    let u = rng.random_range(0..=shape.max_users);
    let users: Vec<UserRequest> = (0..u)
        .map(|_| UserRequest {
            size: rng.random_range(1..=1000),
            deadline: rng.random_range(1..=t),
        })
        .collect();
    let nu: Vec<Vec<Vec<SlotCount>>> = (0..u)
        .map(|_| {
            (0..b)
                .map(|_| {
                    (0..c)
                        .map(|_| {
                            if rng.random_bool(shape.p_unservable) {
                                None
                            } else {
                                Some(rng.random_range(1..=(t as u32 + 1).min(4)))
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let energy = (0..b)
        .map(|_| (0..t).map(|_| rng.random_range(0..=shape.max_arrival)).collect())
        .collect();
    Instance::with_channels(t, c, users, nu, EnergyProfile::new(energy)).unwrap()
}

pub fn random_instance(rng: &mut ChaCha8Rng, shape: Shape) -> Instance {
    let b = rng.random_range(1..=shape.max_bs);
    let c = rng.random_range(1..=shape.max_channels);
    random_instance_with(rng, shape, b, c)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Proptest strategy over instances of `shape`, driven by a seed so that
/// failures print a reproducible value.
pub fn instances(shape: Shape) -> impl Strategy<Value = Instance> {
    any::<u64>().prop_map(move |seed| random_instance(&mut rng(seed), shape))
}

/// Single-BS, single-channel instance where every user has deadline `T`.
pub fn random_common_deadline(rng: &mut ChaCha8Rng, max_users: usize, max_slots: usize, max_arrival: u32) -> Instance {
    let t = rng.random_range(1..=max_slots);
    let u = rng.random_range(0..=max_users);
    let jobs: Vec<(u32, usize)> = (0..u).map(|_| (rng.random_range(1..=t as u32 + 1), t)).collect();
    let energy = (0..t).map(|_| rng.random_range(0..=max_arrival)).collect();
    Instance::single(t, energy, &jobs).unwrap()
}

/// Largest number of users any association can serve, found by trying
/// every assignment of users to (BS, channel) and searching every grid.
/// Only meant for very small instances.
pub fn brute_force_optimum(inst: &Instance, mode: EnergyMode) -> usize {
    let n = inst.num_users();
    let mut options: Vec<Vec<(usize, usize, u32)>> = Vec::new();
    for u in 0..n {
        let mut list = Vec::new();
        for b in 0..inst.num_bs() {
            for c in 0..inst.num_channels() {
                if let Some(nu) = inst.nu(u, b, c) {
                    if nu as usize <= inst.num_slots() {
                        list.push((b, c, nu));
                    }
                }
            }
        }
        options.push(list);
    }
    let mut best = 0;
    let mut choice: Vec<Option<(usize, usize, u32)>> = vec![None; n];
    assign(inst, mode, &options, 0, &mut choice, &mut best);
    best
}

fn assign(
    inst: &Instance,
    mode: EnergyMode,
    options: &[Vec<(usize, usize, u32)>],
    next: usize,
    choice: &mut Vec<Option<(usize, usize, u32)>>,
    best: &mut usize,
) {
    let chosen = choice.iter().flatten().count();
    if chosen + (options.len() - next) <= *best {
        return;
    }
    if next == options.len() {
        let ok = (0..inst.num_bs()).all(|b| {
            let users: Vec<(usize, u32, usize)> = choice
                .iter()
                .enumerate()
                .filter_map(|(u, o)| match o {
                    Some((bb, c, nu)) if *bb == b => Some((*c, *nu, inst.deadline(u))),
                    _ => None,
                })
                .collect();
            bs_feasible(inst.num_slots(), inst.num_channels(), inst.energy().bs(b), &users, mode)
        });
        if ok {
            *best = chosen;
        }
        return;
    }
    for &opt in &options[next] {
        choice[next] = Some(opt);
        assign(inst, mode, options, next + 1, choice, best);
    }
    choice[next] = None;
    assign(inst, mode, options, next + 1, choice, best);
}

/// Whether `users` (channel, nu, deadline) fit on one BS, by depth-first
/// search over every slot and channel with a memo of dead states.
pub fn bs_feasible(
    num_slots: usize,
    num_channels: usize,
    arrivals: &[u32],
    users: &[(usize, u32, usize)],
    mode: EnergyMode,
) -> bool {
    let remaining: Vec<u32> = users.iter().map(|u| u.1).collect();
    let mut dead = HashSet::new();
    dfs(num_slots, num_channels, arrivals, users, mode, 0, 0, remaining, &mut dead)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    num_slots: usize,
    num_channels: usize,
    arrivals: &[u32],
    users: &[(usize, u32, usize)],
    mode: EnergyMode,
    t: usize,
    bank: u64,
    remaining: Vec<u32>,
    dead: &mut HashSet<(usize, u64, Vec<u32>)>,
) -> bool {
    if remaining.iter().all(|&r| r == 0) {
        return true;
    }
    if t == num_slots {
        return false;
    }
    // A user past its deadline with work left, or with more work than slots.
    for (i, &(_, _, d)) in users.iter().enumerate() {
        if remaining[i] as usize > d.saturating_sub(t) {
            return false;
        }
    }
    let key = (t, bank, remaining.clone());
    if dead.contains(&key) {
        return false;
    }
    let bank = bank + u64::from(arrivals[t]);
    // Every way to fill the channels of slot t.
    let mut picks: Vec<Option<usize>> = vec![None; num_channels];
    let found = fill(num_slots, num_channels, arrivals, users, mode, t, bank, &remaining, 0, &mut picks, dead);
    if !found {
        dead.insert(key);
    }
    found
}

#[allow(clippy::too_many_arguments)]
fn fill(
    num_slots: usize,
    num_channels: usize,
    arrivals: &[u32],
    users: &[(usize, u32, usize)],
    mode: EnergyMode,
    t: usize,
    bank: u64,
    remaining: &[u32],
    channel: usize,
    picks: &mut Vec<Option<usize>>,
    dead: &mut HashSet<(usize, u64, Vec<u32>)>,
) -> bool {
    if channel == num_channels {
        let busy = picks.iter().flatten().count();
        let cost = match mode {
            EnergyMode::PerChannel => busy as u64,
            EnergyMode::PerSlot => u64::from(busy > 0),
        };
        if cost > bank {
            return false;
        }
        let mut next = remaining.to_vec();
        for &i in picks.iter().flatten() {
            next[i] -= 1;
        }
        return dfs(num_slots, num_channels, arrivals, users, mode, t + 1, bank - cost, next, dead);
    }
    for i in 0..users.len() {
        let (c, _, d) = users[i];
        if c == channel && remaining[i] > 0 && t < d {
            picks[channel] = Some(i);
            if fill(num_slots, num_channels, arrivals, users, mode, t, bank, remaining, channel + 1, picks, dead) {
                return true;
            }
        }
    }
    picks[channel] = None;
    fill(num_slots, num_channels, arrivals, users, mode, t, bank, remaining, channel + 1, picks, dead)
}

/// A feasible schedule with random structure: users are dropped into random
/// free cells before a random deadline, `nu` is whatever they got, and each
/// busy cell is paid by a unit arriving at a random earlier slot.
pub fn random_feasible_schedule(rng: &mut ChaCha8Rng, max_users: usize, max_slots: usize, channels: usize) -> (Instance, ehs::Schedule) {
    let t = rng.random_range(1..=max_slots);
    let u = rng.random_range(0..=max_users);
    let mut grid: Vec<Vec<Option<usize>>> = vec![vec![None; channels]; t];
    let mut users = Vec::new();
    let mut nu = Vec::new();
    let mut served = std::collections::BTreeSet::new();
    for id in 0..u {
        let d = rng.random_range(1..=t);
        let c = rng.random_range(0..channels);
        let free: Vec<usize> = (0..d).filter(|&s| grid[s][c].is_none()).collect();
        let want = rng.random_range(1..=d);
        let mut count = 0;
        for s in free {
            if count < want && rng.random_bool(0.6) {
                grid[s][c] = Some(id);
                count += 1;
            }
        }
        users.push(UserRequest {
            size: 1,
            deadline: d,
        });
        let mut row = vec![Some(rng.random_range(1..=t as u32)); channels];
        if count > 0 {
            row[c] = Some(count as u32);
            served.insert(id);
        }
        nu.push(vec![row]);
    }
    let mut energy = vec![0u32; t];
    for (s, row) in grid.iter().enumerate() {
        for cell in row {
            if cell.is_some() {
                energy[rng.random_range(0..=s)] += 1;
            }
        }
    }
    for e in &mut energy {
        if rng.random_bool(0.2) {
            *e += 1;
        }
    }
    let inst = Instance::with_channels(t, channels, users, nu, EnergyProfile::new(vec![energy])).unwrap();
    let schedule = ehs::Schedule::from_parts(grid, served).unwrap();
    (inst, schedule)
}
