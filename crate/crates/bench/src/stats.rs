//! Seed mixing and order-independent averaging.

/// One step of the SplitMix64 generator, used as a 64-bit mixer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Standard error of the mean; `0` for a single sample.
    pub stderr: f64,
}

impl Summary {
    pub fn of(values: impl Iterator<Item = f64> + Clone) -> Summary {
        let mut total = CompensatedSum::default();
        let mut count = 0usize;
        for v in values.clone() {
            total.add(v);
            count += 1;
        }
        if count == 0 {
            return Summary {
                count,
                mean: 0.0,
                stderr: 0.0,
            };
        }
        let mean = total.value() / count as f64;
        let mut squares = CompensatedSum::default();
        for v in values {
            squares.add((v - mean) * (v - mean));
        }
        let stderr = if count > 1 {
            (squares.value() / (count - 1) as f64).sqrt() / (count as f64).sqrt()
        } else {
            0.0
        };
        Summary { count, mean, stderr }
    }
}
