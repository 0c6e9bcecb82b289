/// Smoothed RTT, variance and retransmission timeout, plus the minimum
/// RTT ever observed.
#[derive(Clone, Debug)]
pub struct RttEstimator {
    base_rtt_s: Option<f64>,
    last_rtt_s: Option<f64>,
    srtt_s: Option<f64>,
    rttvar_s: f64,
    rto_s: f64,
    min_rto_s: f64,
    max_rto_s: f64,
    backoffs: u32,
}

impl RttEstimator {
    pub fn new(initial_rto_s: f64, min_rto_s: f64, max_rto_s: f64) -> Self {
        Self {
            base_rtt_s: None,
            last_rtt_s: None,
            srtt_s: None,
            rttvar_s: 0.0,
            rto_s: initial_rto_s.clamp(min_rto_s, max_rto_s),
            min_rto_s,
            max_rto_s,
            backoffs: 0,
        }
    }

    pub fn base_rtt_s(&self) -> Option<f64> {
        self.base_rtt_s
    }

    pub fn last_rtt_s(&self) -> Option<f64> {
        self.last_rtt_s
    }

    pub fn srtt_s(&self) -> Option<f64> {
        self.srtt_s
    }

    pub fn rttvar_s(&self) -> f64 {
        self.rttvar_s
    }

    pub fn rto_s(&self) -> f64 {
        self.rto_s
    }

    pub fn backoffs(&self) -> u32 {
        self.backoffs
    }

    /// Feeds a valid sample. Clears any timeout backoff.
    pub fn on_sample(&mut self, rtt_s: f64) {
        assert!(
            rtt_s > 0.0 && rtt_s.is_finite(),
            "invalid RTT sample {rtt_s}"
        );
        self.last_rtt_s = Some(rtt_s);
        self.base_rtt_s = Some(self.base_rtt_s.map_or(rtt_s, |b| b.min(rtt_s)));
        match self.srtt_s {
            None => {
                self.srtt_s = Some(rtt_s);
                self.rttvar_s = rtt_s / 2.0;
            }
            Some(srtt) => {
                self.rttvar_s = 0.75 * self.rttvar_s + 0.25 * (srtt - rtt_s).abs();
                self.srtt_s = Some(0.875 * srtt + 0.125 * rtt_s);
            }
        }
        let srtt = self.srtt_s.expect("set above");
        self.rto_s = (srtt + 4.0 * self.rttvar_s).clamp(self.min_rto_s, self.max_rto_s);
        self.backoffs = 0;
    }

    /// Exponential backoff after a timeout.
    pub fn back_off(&mut self) {
        self.rto_s = (self.rto_s * 2.0).min(self.max_rto_s);
        self.backoffs += 1;
    }
}
