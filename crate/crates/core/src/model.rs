//! Domain types, the radio layer (SINR, rate, required slots) and random
//! instance generation.
//!
//! Slots are numbered `1..=T` wherever they cross the public API (deadlines,
//! rendered schedules, JSON); internal vectors are indexed from zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};

/// Number of slots a user needs from one (BS, channel) pair. `None` marks a
/// pair that can never serve the user (zero rate, or more slots than the
/// frame holds).
pub type SlotCount = Option<u32>;

/// Physical layer of one frame: powers, noise, bandwidth and the slow
/// timescale gains between every user, BS and channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioModel {
    /// Transmit power per BS, watts.
    pub tx_power: Vec<f64>,
    /// Total bandwidth, hertz. Each of the `C` channels gets `W / C`.
    pub bandwidth: f64,
    /// Noise power per channel, watts.
    pub noise_power: f64,
    /// Slot duration, seconds.
    pub slot_duration: f64,
    pub num_channels: usize,
    /// Linear power gains indexed `[user][bs][channel]`.
    pub gains: Vec<Vec<Vec<f64>>>,
}

impl RadioModel {
    pub fn new(
        tx_power: Vec<f64>,
        bandwidth: f64,
        noise_power: f64,
        slot_duration: f64,
        num_channels: usize,
        gains: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let model = Self {
            tx_power,
            bandwidth,
            noise_power,
            slot_duration,
            num_channels,
            gains,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn num_users(&self) -> usize {
        self.gains.len()
    }

    pub fn num_bs(&self) -> usize {
        self.tx_power.len()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if self.tx_power.is_empty() {
            return Err(invalid("radio model needs at least one BS"));
        }
        if self.num_channels == 0 {
            return Err(invalid("radio model needs at least one channel"));
        }
        if !self.tx_power.iter().all(|&p| positive(p)) {
            return Err(invalid("transmit powers must be strictly positive"));
        }
        if !positive(self.bandwidth) || !positive(self.noise_power) || !positive(self.slot_duration) {
            return Err(invalid(
                "bandwidth, noise power and slot duration must be strictly positive",
            ));
        }
        for per_user in &self.gains {
            check_dim("gain rows per user", self.num_bs(), per_user.len())?;
            for per_bs in per_user {
                check_dim("gain entries per BS", self.num_channels, per_bs.len())?;
                if !per_bs.iter().all(|&h| h.is_finite() && h >= 0.0) {
                    return Err(invalid("channel gains must be finite and non-negative"));
                }
            }
        }
        Ok(())
    }

    fn check_index(&self, user: usize, bs: usize, channel: usize) -> Result<()> {
        if user >= self.num_users() || bs >= self.num_bs() || channel >= self.num_channels {
            return Err(invalid(format!(
                "index (user {user}, bs {bs}, channel {channel}) outside {}x{}x{}",
                self.num_users(),
                self.num_bs(),
                self.num_channels
            )));
        }
        Ok(())
    }

    /// Downlink SINR of `user` served by `bs` on `channel`; every other BS
    /// transmitting on the same channel interferes.
    pub fn sinr(&self, user: usize, bs: usize, channel: usize) -> Result<f64> {
        self.check_index(user, bs, channel)?;
        let gains = &self.gains[user];
        let signal = self.tx_power[bs] * gains[bs][channel];
        let interference: f64 = (0..self.num_bs())
            .filter(|&other| other != bs)
            .map(|other| self.tx_power[other] * gains[other][channel])
            .sum();
        Ok(signal / (self.noise_power + interference))
    }

    /// Slots `user` needs from (`bs`, `channel`) to move `request.size` bits.
    pub fn required_slots(
        &self,
        user: usize,
        bs: usize,
        channel: usize,
        request: &UserRequest,
    ) -> Result<SlotCount> {
        let spectral = rate(self.sinr(user, bs, channel)?)?;
        Ok(slots_for_rate(
            request.size,
            self.num_channels,
            self.slot_duration,
            self.bandwidth,
            spectral,
        ))
    }
}

/// Achievable spectral efficiency in bps/Hz.
pub fn rate(sinr: f64) -> Result<f64> {
    if sinr.is_nan() || sinr < 0.0 {
        return Err(invalid(format!("SINR must be non-negative, got {sinr}")));
    }
    Ok((1.0 + sinr).log2())
}

/// `ceil(bits * C / (tau * W * R))`, or `None` when the rate is zero or the
/// count does not fit in a `u32`.
pub fn slots_for_rate(
    bits: u64,
    num_channels: usize,
    slot_duration: f64,
    bandwidth: f64,
    spectral_rate: f64,
) -> SlotCount {
    if !(spectral_rate > 0.0) {
        return None;
    }
    let exact = bits as f64 * num_channels as f64 / (slot_duration * bandwidth * spectral_rate);
    if !exact.is_finite() {
        return None;
    }
    // Snap values within float noise of an integer so that exact quotients
    // do not round up to the next slot.
    let nearest = exact.round();
    let slots = if (exact - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        exact.ceil()
    };
    if slots > u32::MAX as f64 {
        return None;
    }
    Some((slots as u32).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRequest {
    /// Request size in bits.
    pub size: u64,
    /// Last slot (1-based) in which the user may be served.
    pub deadline: usize,
}

/// Harvested energy per BS and slot, already normalized to slot units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyProfile {
    /// `arrivals[b][t]` units arriving at BS `b` at the start of slot `t + 1`.
    pub arrivals: Vec<Vec<u32>>,
}

impl EnergyProfile {
    pub fn new(arrivals: Vec<Vec<u32>>) -> Self {
        Self { arrivals }
    }

    pub fn bs(&self, b: usize) -> &[u32] {
        &self.arrivals[b]
    }
}

/// One frame's complete problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    num_slots: usize,
    num_channels: usize,
    users: Vec<UserRequest>,
    /// `nu[u][b][c]`.
    nu: Vec<Vec<Vec<SlotCount>>>,
    energy: EnergyProfile,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    #[serde(rename = "T")]
    num_slots: usize,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    num_channels: Option<usize>,
    users: Vec<UserRequest>,
    nu: Vec<Vec<Vec<SlotCount>>>,
    energy: Vec<Vec<u32>>,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = Error;

    fn try_from(repr: InstanceRepr) -> Result<Self> {
        let num_channels = repr
            .num_channels
            .or_else(|| repr.nu.first().and_then(|row| row.first()).map(Vec::len))
            .unwrap_or(1);
        Instance::with_channels(
            repr.num_slots,
            num_channels,
            repr.users,
            repr.nu,
            EnergyProfile::new(repr.energy),
        )
    }
}

impl From<Instance> for InstanceRepr {
    fn from(inst: Instance) -> Self {
        InstanceRepr {
            num_slots: inst.num_slots,
            num_channels: Some(inst.num_channels),
            users: inst.users,
            nu: inst.nu,
            energy: inst.energy.arrivals,
        }
    }
}

impl Instance {
    /// Builds an instance, inferring `C` from the tensor (at least one user
    /// required; use [`Instance::with_channels`] otherwise).
    pub fn new(
        num_slots: usize,
        users: Vec<UserRequest>,
        nu: Vec<Vec<Vec<SlotCount>>>,
        energy: EnergyProfile,
    ) -> Result<Self> {
        let num_channels = nu
            .first()
            .and_then(|row| row.first())
            .map(Vec::len)
            .ok_or_else(|| invalid("cannot infer channel count from an empty tensor"))?;
        Self::with_channels(num_slots, num_channels, users, nu, energy)
    }

    pub fn with_channels(
        num_slots: usize,
        num_channels: usize,
        users: Vec<UserRequest>,
        nu: Vec<Vec<Vec<SlotCount>>>,
        energy: EnergyProfile,
    ) -> Result<Self> {
        let inst = Self {
            num_slots,
            num_channels,
            users,
            nu,
            energy,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Single BS, single channel instance from `(nu, deadline)` pairs. Sizes
    /// are set to `nu` bits; they play no role once `nu` is fixed.
    pub fn single(num_slots: usize, energy: Vec<u32>, jobs: &[(u32, usize)]) -> Result<Self> {
        let users = jobs
            .iter()
            .map(|&(nu, deadline)| UserRequest {
                size: u64::from(nu.max(1)),
                deadline,
            })
            .collect();
        let nu = jobs.iter().map(|&(nu, _)| vec![vec![Some(nu)]]).collect();
        Self::with_channels(num_slots, 1, users, nu, EnergyProfile::new(vec![energy]))
    }

    fn validate(&self) -> Result<()> {
        if self.num_slots == 0 {
            return Err(invalid("frame must contain at least one slot"));
        }
        if self.num_channels == 0 {
            return Err(invalid("at least one channel is required"));
        }
        if self.energy.arrivals.is_empty() {
            return Err(invalid("at least one BS is required"));
        }
        for row in &self.energy.arrivals {
            check_dim("energy arrivals per BS", self.num_slots, row.len())?;
        }
        check_dim("required-slot rows", self.users.len(), self.nu.len())?;
        for (u, user) in self.users.iter().enumerate() {
            if user.size == 0 {
                return Err(invalid(format!("user {} has an empty request", u + 1)));
            }
            if user.deadline == 0 || user.deadline > self.num_slots {
                return Err(invalid(format!(
                    "deadline {} of user {} outside 1..={}",
                    user.deadline,
                    u + 1,
                    self.num_slots
                )));
            }
            check_dim("required-slot entries per user", self.num_bs(), self.nu[u].len())?;
            for per_bs in &self.nu[u] {
                check_dim("required-slot entries per BS", self.num_channels, per_bs.len())?;
                if per_bs.contains(&Some(0)) {
                    return Err(invalid(format!("user {} has a zero slot requirement", u + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_bs(&self) -> usize {
        self.energy.arrivals.len()
    }

    pub fn num_channels(&self) -> usize {
        self.num_channels
    }

    pub fn users(&self) -> &[UserRequest] {
        &self.users
    }

    pub fn deadline(&self, user: usize) -> usize {
        self.users[user].deadline
    }

    pub fn nu(&self, user: usize, bs: usize, channel: usize) -> SlotCount {
        self.nu[user][bs][channel]
    }

    pub fn nu_tensor(&self) -> &[Vec<Vec<SlotCount>>] {
        &self.nu
    }

    pub fn energy(&self) -> &EnergyProfile {
        &self.energy
    }

    /// Requirement that is actually usable within the frame.
    pub fn servable_nu(&self, user: usize, bs: usize, channel: usize) -> Option<u32> {
        self.nu[user][bs][channel].filter(|&v| v as usize <= self.num_slots)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// How user deadlines are drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeadlineMode {
    /// `d_u ~ unif{1, T}`.
    #[default]
    Uniform,
    /// `d_u = T` for every user.
    Common,
}

/// Log-distance pathloss in dB: `intercept + slope * log10(distance_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pathloss {
    pub intercept_db: f64,
    pub slope_db: f64,
}

impl Pathloss {
    /// Distances below one meter are clamped to one meter.
    pub fn gain(&self, distance_m: f64) -> f64 {
        let db = self.intercept_db + self.slope_db * distance_m.max(1.0).log10();
        10f64.powf(-db / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationParams {
    /// Side of the square deployment area, meters.
    pub area_side: f64,
    pub pathloss: Pathloss,
    pub tx_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub noise_density_dbm_hz: f64,
    pub slot_duration_s: f64,
    /// Mean energy arrivals per BS and slot.
    pub poisson_rate: f64,
    /// Inclusive bounds on the request size, bits.
    pub size_range: (u64, u64),
    pub deadline_mode: DeadlineMode,
    pub seed: u64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            area_side: 20.0,
            pathloss: Pathloss {
                intercept_db: 30.6,
                slope_db: 36.7,
            },
            tx_power_dbm: 30.0,
            bandwidth_hz: 20e6,
            noise_density_dbm_hz: -174.0,
            slot_duration_s: 1e-3,
            poisson_rate: 0.5,
            size_range: (1_000, 1_000_000),
            deadline_mode: DeadlineMode::Uniform,
            seed: 0,
        }
    }
}

impl GenerationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.poisson_rate >= 0.0) || !self.poisson_rate.is_finite() {
            return Err(invalid(format!(
                "energy arrival rate must be non-negative, got {}",
                self.poisson_rate
            )));
        }
        let (lo, hi) = self.size_range;
        if lo == 0 || lo > hi {
            return Err(invalid(format!("bad size range [{lo}, {hi}]")));
        }
        if !(self.area_side > 0.0)
            || !(self.bandwidth_hz > 0.0)
            || !(self.slot_duration_s > 0.0)
        {
            return Err(invalid("area, bandwidth and slot duration must be positive"));
        }
        Ok(())
    }
}

/// Problem dimensions `(U, B, C, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub users: usize,
    pub bs: usize,
    pub channels: usize,
    pub slots: usize,
}

impl Dims {
    pub fn new(users: usize, bs: usize, channels: usize, slots: usize) -> Self {
        Self {
            users,
            bs,
            channels,
            slots,
        }
    }
}

fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Draws a random deployment and returns the instance together with the
/// radio model it was derived from.
pub fn generate_scenario(params: &GenerationParams, dims: Dims) -> Result<(Instance, RadioModel)> {
    params.validate()?;
    if dims.users == 0 || dims.bs == 0 || dims.channels == 0 || dims.slots == 0 {
        return Err(invalid(format!("all dimensions must be positive, got {dims:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let side = params.area_side;
    let mut place = |n: usize| -> Vec<(f64, f64)> {
        (0..n)
            .map(|_| (rng.random_range(0.0..side), rng.random_range(0.0..side)))
            .collect()
    };
    let bs_pos = place(dims.bs);
    let user_pos = place(dims.users);

    // Slow-timescale pathloss only: every channel sees the same gain.
    let gains: Vec<Vec<Vec<f64>>> = user_pos
        .iter()
        .map(|&(ux, uy)| {
            bs_pos
                .iter()
                .map(|&(bx, by)| {
                    let h = params.pathloss.gain((ux - bx).hypot(uy - by));
                    vec![h; dims.channels]
                })
                .collect()
        })
        .collect();

    let channel_bw = params.bandwidth_hz / dims.channels as f64;
    let radio = RadioModel::new(
        vec![dbm_to_watts(params.tx_power_dbm); dims.bs],
        params.bandwidth_hz,
        dbm_to_watts(params.noise_density_dbm_hz) * channel_bw,
        params.slot_duration_s,
        dims.channels,
        gains,
    )?;

    let (lo, hi) = params.size_range;
    let users: Vec<UserRequest> = (0..dims.users)
        .map(|_| {
            let size = rng.random_range(lo..=hi);
            let deadline = match params.deadline_mode {
                DeadlineMode::Uniform => rng.random_range(1..=dims.slots),
                DeadlineMode::Common => dims.slots,
            };
            UserRequest { size, deadline }
        })
        .collect();

    let arrivals = if params.poisson_rate > 0.0 {
        let poisson = Poisson::new(params.poisson_rate)
            .map_err(|e| invalid(format!("poisson rate {}: {e}", params.poisson_rate)))?;
        (0..dims.bs)
            .map(|_| {
                (0..dims.slots)
                    .map(|_| {
                        let draw: f64 = poisson.sample(&mut rng);
                        draw as u32
                    })
                    .collect()
            })
            .collect()
    } else {
        vec![vec![0; dims.slots]; dims.bs]
    };

    let mut nu = Vec::with_capacity(dims.users);
    for (u, request) in users.iter().enumerate() {
        let mut per_bs = Vec::with_capacity(dims.bs);
        for b in 0..dims.bs {
            let mut per_channel = Vec::with_capacity(dims.channels);
            for c in 0..dims.channels {
                let slots = radio
                    .required_slots(u, b, c, request)?
                    .filter(|&v| v as usize <= dims.slots);
                per_channel.push(slots);
            }
            per_bs.push(per_channel);
        }
        nu.push(per_bs);
    }

    let inst = Instance::with_channels(
        dims.slots,
        dims.channels,
        users,
        nu,
        EnergyProfile::new(arrivals),
    )?;
    Ok((inst, radio))
}

pub fn generate_instance(params: &GenerationParams, dims: Dims) -> Result<Instance> {
    generate_scenario(params, dims).map(|(inst, _)| inst)
}
