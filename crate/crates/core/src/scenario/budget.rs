use crate::error::{invalid, Result};

/// Log-distance path loss and Rician factor of one link class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    /// Path loss at 1 m, dB.
    pub intercept_db: f64,
    /// Path-loss exponent; the loss grows by `10·exponent` dB per decade.
    pub exponent: f64,
    /// Rician factor κ in dB. `-inf` is Rayleigh, `+inf` pure line of sight.
    pub rician_k_db: f64,
}

impl LinkModel {
    /// `PL(d) = intercept + 10·exponent·log10(d)`, dB.
    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        self.intercept_db + 10.0 * self.exponent * distance_m.log10()
    }

    /// Large-scale amplitude gain `10^(−PL/20)`.
    pub fn amplitude(&self, distance_m: f64) -> f64 {
        10f64.powf(-self.path_loss_db(distance_m) / 20.0)
    }

    /// Weights `(√(κ/(1+κ)), √(1/(1+κ)))` of the LoS and scattered parts.
    pub fn rician_weights(&self) -> (f64, f64) {
        let k = 10f64.powf(self.rician_k_db / 10.0);
        if k.is_infinite() {
            (1.0, 0.0)
        } else {
            ((k / (1.0 + k)).sqrt(), (1.0 / (1.0 + k)).sqrt())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_irs: LinkModel,
    pub irs_user: LinkModel,
    pub tx_user: LinkModel,
}

impl Default for LinkBudget {
    fn default() -> Self {
        let irs_hop = LinkModel {
            intercept_db: 35.6,
            exponent: 2.2,
            rician_k_db: 10.0,
        };
        Self {
            noise_psd_dbm_hz: -174.0,
            bandwidth_hz: 10.0e6,
            tx_irs: irs_hop,
            irs_user: irs_hop,
            tx_user: LinkModel {
                intercept_db: 32.6,
                exponent: 3.67,
                rician_k_db: f64::NEG_INFINITY,
            },
        }
    }
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) || !self.bandwidth_hz.is_finite() {
            return Err(invalid("bandwidth_hz", "must be finite and positive"));
        }
        if !self.noise_psd_dbm_hz.is_finite() {
            return Err(invalid("noise_psd_dbm_hz", "must be finite"));
        }
        for l in [self.tx_irs, self.irs_user, self.tx_user] {
            if !l.intercept_db.is_finite() || !l.exponent.is_finite() || l.rician_k_db.is_nan() {
                return Err(invalid("link model", "path-loss constants must be finite"));
            }
        }
        Ok(())
    }
}

/// Total noise power `PSD + 10 log10(B)`, dBm.
pub fn noise_power_dbm(budget: &LinkBudget) -> Result<f64> {
    budget.validate()?;
    Ok(budget.noise_psd_dbm_hz + 10.0 * budget.bandwidth_hz.log10())
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}
