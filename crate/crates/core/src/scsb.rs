//! Single-BS scheduling: the optimal EDF/eviction scheduler, its
//! rescheduling step, the feasibility checker and the non-preemptive
//! transform.
//!
//! The engine works on a `T x C` grid so that the multi-channel heuristic in
//! [`crate::multi`] can reuse it unchanged; with `C = 1` it is the optimal
//! single-channel algorithm.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::model::Instance;

/// How simultaneous transmissions on several channels draw energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyMode {
    /// One unit per busy (slot, channel) cell.
    #[default]
    PerChannel,
    /// One unit per slot in which at least one channel is busy.
    PerSlot,
}

impl EnergyMode {
    /// Units a slot with `busy` active channels consumes.
    pub fn cost(self, busy: usize) -> usize {
        match self {
            EnergyMode::PerChannel => busy,
            EnergyMode::PerSlot => usize::from(busy > 0),
        }
    }
}

/// Assignment of users to (slot, channel) cells of one BS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRepr", into = "ScheduleRepr")]
pub struct Schedule {
    /// `grid[t][c]`, zero-based slot and channel.
    grid: Vec<Vec<Option<usize>>>,
    served: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    grid: Vec<Vec<usize>>,
    served: Vec<usize>,
}

impl From<Schedule> for ScheduleRepr {
    fn from(s: Schedule) -> Self {
        ScheduleRepr {
            grid: s
                .grid
                .iter()
                .map(|row| row.iter().map(|cell| cell.map_or(0, |u| u + 1)).collect())
                .collect(),
            served: s.served.iter().map(|u| u + 1).collect(),
        }
    }
}

impl TryFrom<ScheduleRepr> for Schedule {
    type Error = Error;

    fn try_from(repr: ScheduleRepr) -> Result<Self> {
        if repr.served.contains(&0) {
            return Err(invalid("served user ids are one-based"));
        }
        let grid = repr
            .grid
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.checked_sub(1)).collect())
            .collect();
        Schedule::from_parts(grid, repr.served.into_iter().map(|u| u - 1).collect())
    }
}

impl Schedule {
    pub fn empty(num_slots: usize, num_channels: usize) -> Self {
        Self {
            grid: vec![vec![None; num_channels]; num_slots],
            served: BTreeSet::new(),
        }
    }

    /// Checks only the shape; use [`check_schedule`] for semantics.
    pub fn from_parts(grid: Vec<Vec<Option<usize>>>, served: BTreeSet<usize>) -> Result<Self> {
        let width = grid.first().map_or(0, Vec::len);
        if grid.is_empty() || width == 0 {
            return Err(invalid("schedule grid must be non-empty"));
        }
        for row in &grid {
            check_dim("schedule channels per slot", width, row.len())?;
        }
        Ok(Self { grid, served })
    }

    /// Single-channel schedule from one-based slot lists; every listed user
    /// is marked served.
    pub fn from_slots(num_slots: usize, users: &[(usize, &[usize])]) -> Result<Self> {
        let mut schedule = Self::empty(num_slots, 1);
        for &(user, slots) in users {
            for &slot in slots {
                if slot == 0 || slot > num_slots {
                    return Err(invalid(format!("slot {slot} outside 1..={num_slots}")));
                }
                if schedule.grid[slot - 1][0].is_some() {
                    return Err(invalid(format!("slot {slot} assigned twice")));
                }
                schedule.grid[slot - 1][0] = Some(user);
            }
            schedule.served.insert(user);
        }
        Ok(schedule)
    }

    pub fn num_slots(&self) -> usize {
        self.grid.len()
    }

    pub fn num_channels(&self) -> usize {
        self.grid[0].len()
    }

    /// Occupant of zero-based `(slot, channel)`.
    pub fn cell(&self, slot: usize, channel: usize) -> Option<usize> {
        self.grid[slot][channel]
    }

    pub fn grid(&self) -> &[Vec<Option<usize>>] {
        &self.grid
    }

    pub fn served(&self) -> &BTreeSet<usize> {
        &self.served
    }

    pub fn served_count(&self) -> usize {
        self.served.len()
    }

    pub fn busy_in_slot(&self, slot: usize) -> usize {
        self.grid[slot].iter().filter(|c| c.is_some()).count()
    }

    /// Zero-based `(slot, channel)` cells of `user`, in slot order.
    pub fn cells_of(&self, user: usize) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for (t, row) in self.grid.iter().enumerate() {
            for (c, &cell) in row.iter().enumerate() {
                if cell == Some(user) {
                    cells.push((t, c));
                }
            }
        }
        cells
    }

    /// Puts `user` on `len` consecutive cells of `channel` from zero-based
    /// `start` and marks it served.
    pub(crate) fn place_block(&mut self, user: usize, channel: usize, start: usize, len: usize) {
        for t in start..start + len {
            self.grid[t][channel] = Some(user);
        }
        self.served.insert(user);
    }

    fn last_slot_of(&self, user: usize) -> Option<usize> {
        (0..self.num_slots())
            .rev()
            .find(|&t| self.grid[t].contains(&Some(user)))
    }

    /// True when every served user occupies consecutive slots.
    pub fn is_gap_free(&self) -> bool {
        self.served.iter().all(|&u| {
            let cells = self.cells_of(u);
            cells.windows(2).all(|w| w[1].0 == w[0].0 + 1)
        })
    }

    /// Text strip in the style of a slot diagram: one row per channel, one
    /// column per slot, `.` for idle, optionally followed by the arrivals.
    pub fn render(&self, arrivals: Option<&[u32]>) -> String {
        let mut width = self.num_slots().to_string().len();
        for row in &self.grid {
            for cell in row.iter().flatten() {
                width = width.max((cell + 1).to_string().len());
            }
        }
        if let Some(a) = arrivals {
            for v in a {
                width = width.max(v.to_string().len());
            }
        }
        let mut out = String::new();
        let mut line = |label: &str, cells: Vec<String>| {
            out.push_str(&format!("{label:<7}|"));
            for cell in cells {
                out.push_str(&format!(" {cell:>width$}"));
            }
            out.push('\n');
        };
        line("slot", (1..=self.num_slots()).map(|t| t.to_string()).collect());
        for c in 0..self.num_channels() {
            let label = if self.num_channels() == 1 {
                "user".to_string()
            } else {
                format!("ch {}", c + 1)
            };
            line(
                &label,
                self.grid
                    .iter()
                    .map(|row| row[c].map_or(".".to_string(), |u| (u + 1).to_string()))
                    .collect(),
            );
        }
        if let Some(a) = arrivals {
            line("energy", a.iter().map(|v| v.to_string()).collect());
        }
        out
    }
}

/// Residual energy of one BS plus, for every slot, the arrival slots whose
/// units pay for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyLedger {
    mode: EnergyMode,
    arrivals: Vec<u32>,
    residual: Vec<u32>,
    /// `provenance[s]`: zero-based arrival slots of the units used at `s`.
    provenance: Vec<Vec<usize>>,
}

impl EnergyLedger {
    pub fn new(arrivals: &[u32], mode: EnergyMode) -> Self {
        Self {
            mode,
            arrivals: arrivals.to_vec(),
            residual: arrivals.to_vec(),
            provenance: vec![Vec::new(); arrivals.len()],
        }
    }

    /// Ledger for an existing schedule, paying each slot with the earliest
    /// unused arrivals. Fails if the schedule is not energy-feasible.
    pub fn for_schedule(arrivals: &[u32], schedule: &Schedule, mode: EnergyMode) -> Result<Self> {
        check_dim("arrivals vs schedule slots", schedule.num_slots(), arrivals.len())?;
        let mut ledger = Self::new(arrivals, mode);
        for s in 0..schedule.num_slots() {
            let cost = mode.cost(schedule.busy_in_slot(s));
            if !ledger.take_earliest(s, cost) {
                return Err(invalid(format!("not enough energy for slot {}", s + 1)));
            }
        }
        Ok(ledger)
    }

    pub fn mode(&self) -> EnergyMode {
        self.mode
    }

    pub fn arrivals(&self) -> &[u32] {
        &self.arrivals
    }

    pub fn residual(&self) -> &[u32] {
        &self.residual
    }

    /// Zero-based arrival slots paying for zero-based slot `s`.
    pub fn provenance(&self, slot: usize) -> &[usize] {
        &self.provenance[slot]
    }

    pub fn residual_total(&self) -> u64 {
        self.residual.iter().map(|&v| u64::from(v)).sum()
    }

    pub fn consumed_total(&self) -> u64 {
        self.provenance.iter().map(|p| p.len() as u64).sum()
    }

    /// Unit conservation and provenance sanity against `schedule`.
    pub fn is_consistent_with(&self, schedule: &Schedule) -> bool {
        let arrived: u64 = self.arrivals.iter().map(|&v| u64::from(v)).sum();
        if self.residual_total() + self.consumed_total() != arrived {
            return false;
        }
        if schedule.num_slots() != self.provenance.len() {
            return false;
        }
        let mut used = vec![0u64; self.arrivals.len()];
        for (s, units) in self.provenance.iter().enumerate() {
            if units.len() != self.mode.cost(schedule.busy_in_slot(s)) {
                return false;
            }
            for &a in units {
                if a > s {
                    return false;
                }
                used[a] += 1;
            }
        }
        used.iter()
            .zip(self.arrivals.iter().zip(&self.residual))
            .all(|(&u, (&a, &r))| u + u64::from(r) == u64::from(a))
    }

    fn take_from(&mut self, slot: usize, arrival: usize) {
        debug_assert!(arrival <= slot && self.residual[arrival] > 0);
        self.residual[arrival] -= 1;
        self.provenance[slot].push(arrival);
    }

    /// Pays `count` units for `slot` from the earliest arrivals not after it.
    fn take_earliest(&mut self, slot: usize, count: usize) -> bool {
        let available: u64 = self.residual[..=slot].iter().map(|&v| u64::from(v)).sum();
        if available < count as u64 {
            return false;
        }
        let mut left = count;
        let mut a = 0;
        while left > 0 {
            if self.residual[a] > 0 {
                self.take_from(slot, a);
                left -= 1;
            } else {
                a += 1;
            }
        }
        true
    }

    /// Returns every unit used at slots `>= from` to its arrival slot.
    fn release_from(&mut self, from: usize) {
        for s in from..self.provenance.len() {
            for a in std::mem::take(&mut self.provenance[s]) {
                self.residual[a] += 1;
            }
        }
    }

    fn extra_cost(&self, slot: usize, busy_before: usize, added: usize) -> usize {
        debug_assert_eq!(self.provenance[slot].len(), self.mode.cost(busy_before));
        self.mode.cost(busy_before + added) - self.mode.cost(busy_before)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleOutcome {
    pub schedule: Schedule,
    pub ledger: EnergyLedger,
    pub served_count: usize,
}

impl ScheduleOutcome {
    pub fn from_parts(schedule: Schedule, ledger: EnergyLedger) -> Self {
        let served_count = schedule.served_count();
        Self {
            schedule,
            ledger,
            served_count,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// State after one user of the EDF order has been processed.
#[derive(Debug, Clone, Copy)]
pub struct StepSnapshot<'a> {
    /// User just processed (zero-based instance index).
    pub user: usize,
    pub schedule: &'a Schedule,
    pub ledger: &'a EnergyLedger,
}

/// One user as seen by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Job {
    pub user: usize,
    pub nu: u32,
    /// One-based deadline.
    pub deadline: usize,
    pub channel: usize,
}

struct Engine {
    schedule: Schedule,
    ledger: EnergyLedger,
    jobs: BTreeMap<usize, Job>,
}

impl Engine {
    fn place(&mut self, job: &Job, slot: usize, arrival: usize) {
        let busy = self.schedule.busy_in_slot(slot);
        if self.ledger.extra_cost(slot, busy, 1) > 0 {
            self.ledger.take_from(slot, arrival);
        }
        self.schedule.grid[slot][job.channel] = Some(job.user);
    }

    fn free_cell(&self, slot: usize, channel: usize) -> bool {
        slot < self.schedule.num_slots()
            && self.schedule.grid[slot][channel].is_none()
            && self.ledger.extra_cost(slot, self.schedule.busy_in_slot(slot), 1) == 0
    }

    /// Largest served user: maximal `nu`, smallest id on ties.
    fn largest(&self) -> usize {
        let mut best: Option<&Job> = None;
        for job in self.jobs.values() {
            if best.is_none_or(|b| job.nu > b.nu) {
                best = Some(job);
            }
        }
        best.map(|j| j.user).expect("largest() on an empty served set")
    }

    fn update(&mut self, ell: usize) -> Result<()> {
        self.jobs.remove(&ell);
        reschedule_in_place(&mut self.schedule, &mut self.ledger, ell)
    }

    fn misses_deadline(&self, job: &Job) -> bool {
        self.schedule
            .last_slot_of(job.user)
            .is_some_and(|last| last + 1 > job.deadline)
    }
}

/// Runs the EDF/eviction scheduler on one BS. Jobs needing more slots than
/// the frame holds never enter the loop.
pub(crate) fn run_engine(
    num_slots: usize,
    num_channels: usize,
    arrivals: &[u32],
    mode: EnergyMode,
    mut jobs: Vec<Job>,
    hook: &mut dyn FnMut(StepSnapshot<'_>),
) -> Result<ScheduleOutcome> {
    check_dim("arrivals per slot", num_slots, arrivals.len())?;
    jobs.retain(|j| j.nu >= 1 && j.nu as usize <= num_slots);
    jobs.sort_by_key(|j| (j.deadline, j.nu, j.user));

    let big_t = num_slots;
    let mut eng = Engine {
        schedule: Schedule::empty(num_slots, num_channels),
        ledger: EnergyLedger::new(arrivals, mode),
        jobs: BTreeMap::new(),
    };

    for job in jobs {
        let u = job.user;
        let nu = job.nu as usize;
        let c = job.channel;
        eng.schedule.served.insert(u);
        eng.jobs.insert(u, job);
        let (mut x, mut t, mut r) = (0usize, 0usize, 0usize);
        while t < big_t {
            r = r.max(t);
            if eng.ledger.residual[t] > 0 || eng.free_cell(r, c) {
                let mut delta = (eng.ledger.residual[t] as usize).min(nu - x).min(big_t - r);
                // Busy cells inside the window are stepped over without
                // spending energy. Cells in an already paid slot (per-slot
                // accounting only) are taken without spending either.
                while x < nu && r < big_t {
                    if eng.schedule.grid[r][c].is_none() {
                        if eng.free_cell(r, c) {
                            eng.place(&job, r, t);
                        } else if delta > 0 {
                            eng.place(&job, r, t);
                            delta -= 1;
                        } else {
                            break;
                        }
                        x += 1;
                    }
                    r += 1;
                }
            } else {
                t += 1;
            }

            if x == nu {
                if eng.misses_deadline(&job) {
                    let ell = eng.largest();
                    eng.update(ell)?;
                    if ell != u && eng.misses_deadline(&job) {
                        // Only reachable on multi-channel grids, where the
                        // shift is not guaranteed to pull u back in time.
                        eng.update(u)?;
                    }
                }
                break;
            } else if r.max(t) >= big_t {
                let ell = eng.largest();
                eng.update(ell)?;
                if ell == u {
                    break;
                }
                t = 0;
                r = 0;
            }
        }
        hook(StepSnapshot {
            user: u,
            schedule: &eng.schedule,
            ledger: &eng.ledger,
        });
    }
    Ok(ScheduleOutcome::from_parts(eng.schedule, eng.ledger))
}

/// Removes `ell` and shifts every cell at or after its first slot left into
/// the earliest idle, energy-covered cell of its own channel.
fn reschedule_in_place(schedule: &mut Schedule, ledger: &mut EnergyLedger, ell: usize) -> Result<()> {
    if !schedule.served.remove(&ell) {
        return Err(invalid(format!("user {} is not served", ell + 1)));
    }
    let cells = schedule.cells_of(ell);
    let Some(&(start, _)) = cells.first() else {
        return Ok(());
    };

    // Groups that must move together: single cells when each cell pays its
    // own unit, whole slots when a slot pays once.
    let mut groups: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    for t in start..schedule.num_slots() {
        for c in 0..schedule.num_channels() {
            if let Some(v) = schedule.grid[t][c].take() {
                if v == ell {
                    continue;
                }
                match ledger.mode {
                    EnergyMode::PerSlot if groups.last().is_some_and(|g| g.0 == t) => {
                        groups.last_mut().unwrap().1.push((c, v));
                    }
                    _ => groups.push((t, vec![(c, v)])),
                }
            }
        }
    }
    ledger.release_from(start);

    for (orig, members) in groups {
        let mut placed = false;
        for s in start..=orig {
            if members.iter().any(|&(c, _)| schedule.grid[s][c].is_some()) {
                continue;
            }
            let busy = schedule.busy_in_slot(s);
            let cost = ledger.extra_cost(s, busy, members.len());
            if ledger.take_earliest(s, cost) {
                for &(c, v) in &members {
                    schedule.grid[s][c] = Some(v);
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Internal(format!(
                "could not re-place cells from slot {}",
                orig + 1
            )));
        }
    }
    Ok(())
}

/// The rescheduling step on its own: removes `ell` from `schedule`, shifts
/// the later cells left and returns the ledger units of freed cells. Also
/// returns the one-based cursor `(t, r) = (1, 1)` the scheduler restarts
/// from.
pub fn update_reschedule(
    schedule: &Schedule,
    ledger: &EnergyLedger,
    ell: usize,
) -> Result<(Schedule, EnergyLedger, usize, usize)> {
    if !schedule.served.contains(&ell) {
        return Err(invalid(format!("user {} is not served", ell + 1)));
    }
    if !ledger.is_consistent_with(schedule) {
        return Err(invalid("ledger does not match the schedule"));
    }
    let mut schedule = schedule.clone();
    let mut ledger = ledger.clone();
    reschedule_in_place(&mut schedule, &mut ledger, ell)?;
    Ok((schedule, ledger, 1, 1))
}

fn single_bs_single_channel(inst: &Instance) -> Result<()> {
    if inst.num_bs() != 1 || inst.num_channels() != 1 {
        return Err(invalid(format!(
            "expected one BS and one channel, got B={} C={}",
            inst.num_bs(),
            inst.num_channels()
        )));
    }
    Ok(())
}

/// Optimal schedule for a single BS and a single channel.
pub fn schedule_scsb1(inst: &Instance) -> Result<ScheduleOutcome> {
    schedule_scsb1_with_hook(inst, |_| {})
}

/// [`schedule_scsb1`] with a callback after each user of the EDF order.
pub fn schedule_scsb1_with_hook(
    inst: &Instance,
    mut hook: impl FnMut(StepSnapshot<'_>),
) -> Result<ScheduleOutcome> {
    single_bs_single_channel(inst)?;
    let users: Vec<usize> = (0..inst.num_users()).collect();
    scsb1_for_bs(inst, 0, &users, &mut hook)
}

/// Single-channel scheduler on BS `bs` restricted to `users`.
pub fn schedule_scsb1_at(inst: &Instance, bs: usize, users: &[usize]) -> Result<ScheduleOutcome> {
    if inst.num_channels() != 1 {
        return Err(invalid(format!("expected one channel, got {}", inst.num_channels())));
    }
    scsb1_for_bs(inst, bs, users, &mut |_| {})
}

fn scsb1_for_bs(
    inst: &Instance,
    bs: usize,
    users: &[usize],
    hook: &mut dyn FnMut(StepSnapshot<'_>),
) -> Result<ScheduleOutcome> {
    if bs >= inst.num_bs() {
        return Err(invalid(format!("BS {} out of range", bs + 1)));
    }
    let mut jobs = Vec::with_capacity(users.len());
    for &u in users {
        if u >= inst.num_users() {
            return Err(invalid(format!("user {} out of range", u + 1)));
        }
        if let Some(nu) = inst.servable_nu(u, bs, 0) {
            jobs.push(Job {
                user: u,
                nu,
                deadline: inst.deadline(u),
                channel: 0,
            });
        }
    }
    run_engine(
        inst.num_slots(),
        1,
        inst.energy().bs(bs),
        EnergyMode::PerChannel,
        jobs,
        hook,
    )
}

/// A broken rule of the feasibility definition. Slots are one-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownUser { user: usize },
    NotMarkedServed { user: usize },
    ServedWithoutSlots { user: usize },
    SeveralChannels { user: usize },
    WrongSlotCount { user: usize, required: Option<u32>, allocated: usize },
    DeadlineMissed { user: usize, slot: usize, deadline: usize },
    EnergyDeficit { slot: usize, used: u64, harvested: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::UnknownUser { user } => write!(f, "user {} does not exist", user + 1),
            Violation::NotMarkedServed { user } => {
                write!(f, "user {} occupies slots but is not served", user + 1)
            }
            Violation::ServedWithoutSlots { user } => {
                write!(f, "user {} is served but has no slots", user + 1)
            }
            Violation::SeveralChannels { user } => {
                write!(f, "user {} uses more than one channel", user + 1)
            }
            Violation::WrongSlotCount { user, required, allocated } => match required {
                Some(n) => write!(f, "user {} needs {n} slots, has {allocated}", user + 1),
                None => write!(f, "user {} cannot be served on this link", user + 1),
            },
            Violation::DeadlineMissed { user, slot, deadline } => {
                write!(f, "user {} uses slot {slot} after deadline {deadline}", user + 1)
            }
            Violation::EnergyDeficit { slot, used, harvested } => {
                write!(f, "by slot {slot} {used} units used but only {harvested} harvested")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Deadline and energy feasibility of `schedule` as the schedule of BS `bs`.
///
/// Energy feasibility is the prefix balance `used(1..=t) <= harvested(1..=t)`
/// for every `t`, which is equivalent to the existence of an assignment of
/// arrived units to busy slots (Hall's condition on an interval structure).
pub fn check_schedule(
    inst: &Instance,
    bs: usize,
    schedule: &Schedule,
    mode: EnergyMode,
) -> Result<FeasibilityReport> {
    if bs >= inst.num_bs() {
        return Err(invalid(format!("BS {} out of range", bs + 1)));
    }
    check_dim("schedule slots", inst.num_slots(), schedule.num_slots())?;
    check_dim("schedule channels", inst.num_channels(), schedule.num_channels())?;

    let mut violations = Vec::new();
    let mut cells: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (t, row) in schedule.grid.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            if let Some(u) = *cell {
                cells.entry(u).or_default().push((t, c));
            }
        }
    }
    for &u in &schedule.served {
        if u >= inst.num_users() {
            violations.push(Violation::UnknownUser { user: u });
        } else if !cells.contains_key(&u) {
            violations.push(Violation::ServedWithoutSlots { user: u });
        }
    }
    for (&u, list) in &cells {
        if u >= inst.num_users() {
            if !schedule.served.contains(&u) {
                violations.push(Violation::UnknownUser { user: u });
            }
            continue;
        }
        if !schedule.served.contains(&u) {
            violations.push(Violation::NotMarkedServed { user: u });
        }
        let channel = list[0].1;
        if list.iter().any(|&(_, c)| c != channel) {
            violations.push(Violation::SeveralChannels { user: u });
        }
        let required = inst.nu(u, bs, channel);
        if required != Some(list.len() as u32) {
            violations.push(Violation::WrongSlotCount {
                user: u,
                required,
                allocated: list.len(),
            });
        }
        let deadline = inst.deadline(u);
        if let Some(&(t, _)) = list.iter().find(|&&(t, _)| t + 1 > deadline) {
            violations.push(Violation::DeadlineMissed {
                user: u,
                slot: t + 1,
                deadline,
            });
        }
    }

    let arrivals = inst.energy().bs(bs);
    let (mut harvested, mut used) = (0u64, 0u64);
    for t in 0..inst.num_slots() {
        harvested += u64::from(arrivals[t]);
        used += mode.cost(schedule.busy_in_slot(t)) as u64;
        if used > harvested {
            violations.push(Violation::EnergyDeficit {
                slot: t + 1,
                used,
                harvested,
            });
            break;
        }
    }
    Ok(FeasibilityReport { violations })
}

/// [`check_schedule`] for single-BS instances.
pub fn is_feasible(schedule: &Schedule, inst: &Instance) -> Result<FeasibilityReport> {
    if inst.num_bs() != 1 {
        return Err(invalid("is_feasible expects a single-BS instance; use check_schedule"));
    }
    check_schedule(inst, 0, schedule, EnergyMode::PerChannel)
}

/// One-based starting and completion slot of `user`.
pub fn starting_completion(schedule: &Schedule, user: usize) -> Result<(usize, usize)> {
    if !schedule.served.contains(&user) {
        return Err(Error::NotServed(user + 1));
    }
    let cells = schedule.cells_of(user);
    match (cells.first(), cells.last()) {
        (Some(first), Some(last)) => Ok((first.0 + 1, last.0 + 1)),
        _ => Err(Error::NotServed(user + 1)),
    }
}

/// Makes every user's transmission contiguous without dropping anyone.
///
/// Users are laid out per channel as late as possible: by decreasing
/// completion time, each one becomes a block ending at its old completion
/// slot, or just before the next block if that comes first. Postponing work
/// never breaks the prefix energy balance, and the deadlines hold because no
/// block ends later than before. On schedules produced by the scheduler in
/// this module no two blocks collide, so every user keeps its completion
/// slot and starts no earlier than before.
pub fn to_nonpreemptive(schedule: &Schedule, inst: &Instance) -> Result<Schedule> {
    to_nonpreemptive_at(schedule, inst, 0, EnergyMode::PerChannel)
}

pub fn to_nonpreemptive_at(
    schedule: &Schedule,
    inst: &Instance,
    bs: usize,
    mode: EnergyMode,
) -> Result<Schedule> {
    let report = check_schedule(inst, bs, schedule, mode)?;
    if let Some(v) = report.violations.first() {
        return Err(invalid(format!("input schedule is infeasible: {v}")));
    }
    let mut out = Schedule::empty(schedule.num_slots(), schedule.num_channels());
    out.served = schedule.served.clone();
    for c in 0..schedule.num_channels() {
        let mut users: Vec<(usize, usize, usize)> = Vec::new();
        for &u in &schedule.served {
            let cells = schedule.cells_of(u);
            if cells[0].1 == c {
                users.push((cells.last().unwrap().0, u, cells.len()));
            }
        }
        users.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut next_start = schedule.num_slots();
        for (completion, u, len) in users {
            let end = completion.min(next_start - 1);
            let begin = end + 1 - len;
            for t in begin..=end {
                out.grid[t][c] = Some(u);
            }
            next_start = begin;
        }
    }
    let report = check_schedule(inst, bs, &out, mode)?;
    if let Some(v) = report.violations.first() {
        return Err(invalid(format!(
            "contiguous layout is infeasible under {mode:?} accounting: {v}"
        )));
    }
    Ok(out)
}
