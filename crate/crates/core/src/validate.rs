//! Constraint-by-constraint check of an association against the integer
//! program, written directly from the `x`/`z` formulation.
//!
//! This module deliberately avoids the schedule helpers: it expands the
//! outcome into the binary tensor `x[u][b][c][t]`, replays the energy bank
//! `z[b][t]` and tests every row family as the program states it. Energy
//! is charged per busy (slot, channel) cell.

use crate::model::Instance;
use crate::multi::AssociationOutcome;

/// Violated row families, as readable messages. Empty means valid.
pub fn validate_association(inst: &Instance, outcome: &AssociationOutcome) -> Vec<String> {
    let (nu_, nb, nc, nt) = (inst.num_users(), inst.num_bs(), inst.num_channels(), inst.num_slots());
    let mut errors = Vec::new();

    let mut x = vec![vec![vec![vec![0u8; nt]; nc]; nb]; nu_];
    let mut claimed = vec![0usize; nu_];
    for (&b, out) in &outcome.per_bs {
        if b >= nb {
            errors.push(format!("outcome names BS {} of {nb}", b + 1));
            continue;
        }
        let grid = out.schedule.grid();
        if grid.len() != nt || grid.iter().any(|row| row.len() != nc) {
            errors.push(format!("grid of BS {} has the wrong shape", b + 1));
            continue;
        }
        for (t, row) in grid.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Some(u) = *cell {
                    if u >= nu_ {
                        errors.push(format!("grid of BS {} names user {}", b + 1, u + 1));
                    } else {
                        x[u][b][c][t] += 1;
                    }
                }
            }
        }
        for &u in out.schedule.served() {
            if u < nu_ {
                claimed[u] += 1;
            }
        }
    }

    // Served sets match the grids and never overlap.
    for u in 0..nu_ {
        let cells: usize = x[u].iter().flatten().flatten().map(|&v| usize::from(v)).sum();
        if claimed[u] > 1 {
            errors.push(format!("user {} is listed as served by {} BSs", u + 1, claimed[u]));
        }
        if (cells > 0) != (claimed[u] > 0) {
            errors.push(format!("user {} served flag disagrees with its cells", u + 1));
        }
    }
    let listed: usize = claimed.iter().sum();
    if listed != outcome.served_total {
        errors.push(format!("served_total {} but {listed} users listed", outcome.served_total));
    }

    for u in 0..nu_ {
        for b in 0..nb {
            // One channel per (user, BS).
            for c in 0..nc {
                for c2 in c + 1..nc {
                    let a = x[u][b][c].iter().any(|&v| v > 0);
                    let z = x[u][b][c2].iter().any(|&v| v > 0);
                    if a && z {
                        errors.push(format!("user {} uses two channels of BS {}", u + 1, b + 1));
                    }
                }
            }
            // One BS per user.
            for b2 in b + 1..nb {
                let here = x[u][b].iter().flatten().any(|&v| v > 0);
                let there = x[u][b2].iter().flatten().any(|&v| v > 0);
                if here && there {
                    errors.push(format!("user {} uses BS {} and BS {}", u + 1, b + 1, b2 + 1));
                }
            }
        }
    }

    // No collisions in a cell.
    for b in 0..nb {
        for c in 0..nc {
            for t in 0..nt {
                let load: u32 = (0..nu_).map(|u| u32::from(x[u][b][c][t])).sum();
                if load > 1 {
                    errors.push(format!("BS {} channel {} slot {} holds {load} users", b + 1, c + 1, t + 1));
                }
            }
        }
    }

    // Energy bank: z[1] = A[1] and z[t+1] = z[t] + A[t+1] - used[t]. A
    // slot may only transmit with a unit in the bank (x <= z), and what it
    // spends must already be banked; with one channel the second rule
    // follows from the first, with several it closes the gap the bank rows
    // leave open.
    for b in 0..nb {
        let arrivals = inst.energy().bs(b);
        let mut z = i64::from(arrivals[0]);
        for t in 0..nt {
            let used: i64 = (0..nu_)
                .flat_map(|u| (0..nc).map(move |c| (u, c)))
                .map(|(u, c)| i64::from(x[u][b][c][t]))
                .sum();
            if used > 0 && z < 1 {
                errors.push(format!("BS {} transmits at slot {} with an empty bank", b + 1, t + 1));
            }
            if z - used < 0 {
                errors.push(format!("BS {} spends {used} at slot {} with {z} banked", b + 1, t + 1));
                break;
            }
            let next_arrival = if t + 1 < nt { i64::from(arrivals[t + 1]) } else { 0 };
            z = z - used + next_arrival;
        }
    }

    // Demand and deadline rows.
    for u in 0..nu_ {
        let d = inst.deadline(u);
        for b in 0..nb {
            for c in 0..nc {
                let total: usize = x[u][b][c].iter().map(|&v| usize::from(v)).sum();
                if total == 0 {
                    continue;
                }
                match inst.nu(u, b, c) {
                    Some(nu) if total == nu as usize => {}
                    Some(nu) => errors.push(format!(
                        "user {} has {total} slots on BS {} channel {}, needs {nu}",
                        u + 1,
                        b + 1,
                        c + 1
                    )),
                    None => errors.push(format!(
                        "user {} is served on BS {} channel {} which cannot serve it",
                        u + 1,
                        b + 1,
                        c + 1
                    )),
                }
                for t in 0..nt {
                    if x[u][b][c][t] > 0 && t + 1 > d {
                        errors.push(format!("user {} served at slot {} past deadline {d}", u + 1, t + 1));
                    }
                }
            }
        }
    }
    errors
}
