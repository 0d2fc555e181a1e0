use std::cmp::Ordering;
use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// `log₂(1 + 2^x)` for `x ≤ 0`.
fn log2_1p_exp2(x: f64) -> f64 {
    x.exp2().ln_1p() / LN_2
}

/// `log₂(1 − 2^x)` for `x < 0`.
pub(crate) fn log2_1m_exp2(x: f64) -> f64 {
    let a = x * LN_2;
    if a > -LN_2 {
        (-a.exp_m1()).ln() / LN_2
    } else {
        (-a.exp()).ln_1p() / LN_2
    }
}

/// A process value `z` held as `(log₂ z, log₂(1 − z))`.
///
/// Whichever of `z` and `1 − z` is smaller is authoritative; the other side
/// is carried along with log1p-accurate updates so both endpoints of `(0,1)`
/// stay resolvable long after `z` itself would underflow. Values at or above
/// 1 (reachable only under the doubling rule) keep `log₂ z` alone and store
/// NaN on the other side.
#[derive(Debug, Clone, Copy)]
pub struct ZState {
    log_z: f64,
    log_1mz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Side {
    /// `z ≤ ½`, keyed by `log₂ z`.
    Low,
    /// `½ < z < 1`, keyed by `−log₂(1 − z)`.
    High,
    /// `z ≥ 1`, keyed by `log₂ z`.
    Above,
}

impl ZState {
    /// State for `z ∈ (0, 1)`.
    pub fn new(z: f64) -> Result<Self> {
        if !(z > 0.0 && z < 1.0) {
            return Err(Error::param("z0", format!("{z} not in (0,1)")));
        }
        Ok(ZState {
            log_z: z.log2(),
            log_1mz: (-z).ln_1p() / LN_2,
        })
    }

    /// State whose value is `2^log_z`; any finite or infinite exponent.
    pub fn from_log2(log_z: f64) -> Self {
        let log_1mz = if log_z < 0.0 {
            log2_1m_exp2(log_z)
        } else {
            f64::NAN
        };
        ZState { log_z, log_1mz }
    }

    pub fn log2_z(&self) -> f64 {
        self.log_z
    }

    /// `log₂(1 − z)`, NaN when `z ≥ 1`.
    pub fn log2_one_minus_z(&self) -> f64 {
        self.log_1mz
    }

    /// `log₂ Q` for `Q = z(1 − z)`.
    pub fn log2_q(&self) -> f64 {
        self.log_z + self.log_1mz
    }

    pub fn is_above_one(&self) -> bool {
        self.log_1mz.is_nan()
    }

    fn side(&self) -> Side {
        if self.log_1mz.is_nan() {
            Side::Above
        } else if self.log_z <= self.log_1mz {
            Side::Low
        } else {
            Side::High
        }
    }

    fn key(&self) -> (Side, f64) {
        match self.side() {
            Side::High => (Side::High, -self.log_1mz),
            side => (side, self.log_z),
        }
    }

    /// The value in binary64; underflows to 0 deep in the lower tail.
    pub fn value(&self) -> f64 {
        match self.side() {
            Side::Low | Side::Above => self.log_z.exp2(),
            Side::High => 1.0 - self.log_1mz.exp2(),
        }
    }

    /// `log₂(1 + z)`.
    fn log2_one_plus_z(&self) -> f64 {
        match self.side() {
            Side::Low => log2_1p_exp2(self.log_z),
            Side::High => 1.0 + (-0.5 * self.log_1mz.exp2()).ln_1p() / LN_2,
            Side::Above => (self.log_z.exp2()).ln_1p() / LN_2,
        }
    }

    /// `log₂(2 − z)` for `z < 1`.
    fn log2_two_minus_z(&self) -> f64 {
        match self.side() {
            Side::Low => 1.0 + (-0.5 * self.log_z.exp2()).ln_1p() / LN_2,
            Side::High => log2_1p_exp2(self.log_1mz),
            Side::Above => f64::NAN,
        }
    }

    /// `z ↦ z²`.
    pub fn squared(&self) -> Self {
        if self.is_above_one() {
            return ZState {
                log_z: 2.0 * self.log_z,
                log_1mz: f64::NAN,
            };
        }
        ZState {
            log_z: 2.0 * self.log_z,
            log_1mz: self.log_1mz + self.log2_one_plus_z(),
        }
    }

    /// `z ↦ 2z − z²`, i.e. `1 − z ↦ (1 − z)²`.
    pub fn mirrored_square(&self) -> Self {
        debug_assert!(!self.is_above_one());
        ZState {
            log_z: self.log_z + self.log2_two_minus_z(),
            log_1mz: 2.0 * self.log_1mz,
        }
    }

    /// `z ↦ 2z`, unclamped.
    pub fn doubled(&self) -> Self {
        if self.is_above_one() {
            return ZState {
                log_z: self.log_z + 1.0,
                log_1mz: f64::NAN,
            };
        }
        ZState::from_log2(self.log_z + 1.0)
    }

    /// `|2^log_z + 2^log_1mz − 1|`, the representation's consistency error.
    pub fn consistency_error(&self) -> f64 {
        (self.log_z.exp2() + self.log_1mz.exp2() - 1.0).abs()
    }
}

impl PartialEq for ZState {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ZState {}

impl PartialOrd for ZState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by value, using the authoritative side of each state.
impl Ord for ZState {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, ka) = self.key();
        let (sb, kb) = other.key();
        sa.cmp(&sb).then(ka.total_cmp(&kb))
    }
}
