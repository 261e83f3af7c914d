//! Five-point parameter ranges and their random perturbation.
//!
//! A range is `[inf_down, inf_up, center, sup_down, sup_up]`, strictly
//! ascending. Grid search evaluates the cross product of a gamma range and a
//! C range. When a grid fails to improve the incumbent, [`perturb`] redraws
//! the four non-center values:
//!
//! | slot       | drawn from                                 | effect                 |
//! |------------|--------------------------------------------|------------------------|
//! | `inf_down` | `[inf_down / 10, inf_down)`                | farther below center   |
//! | `inf_up`   | `[(center - inf_up) / 2, center)`          | closer, from below     |
//! | `sup_down` | `[center, center + (sup_down - center)/2)` | closer, from above     |
//! | `sup_up`   | `[sup_up, 10 * sup_up)`                    | farther above center   |
//!
//! If the draws break the strict ordering, the offending inner value is
//! redrawn up to [`MAX_REDRAWS`] times and then set to the geometric mean of
//! its neighbours. The center never moves.

use crate::error::{Error, Result};
use crate::rng::SearchRng;
use crate::svm::HyperParams;

pub const MAX_REDRAWS: usize = 100;

/// Strictly ascending, positive, finite five-point range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    values: [f64; 5],
}

impl ParamRange {
    pub fn new(values: [f64; 5]) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "range values must be positive and finite: {values:?}"
            )));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "range values must be strictly ascending: {values:?}"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> [f64; 5] {
        self.values
    }

    pub fn inf_down(&self) -> f64 {
        self.values[0]
    }

    pub fn inf_up(&self) -> f64 {
        self.values[1]
    }

    pub fn center(&self) -> f64 {
        self.values[2]
    }

    pub fn sup_down(&self) -> f64 {
        self.values[3]
    }

    pub fn sup_up(&self) -> f64 {
        self.values[4]
    }
}

/// Powers of ten from 10^-2 to 10^2 for both gamma and C.
pub fn initial_ranges() -> (ParamRange, ParamRange) {
    let r = ParamRange {
        values: [0.01, 0.1, 1.0, 10.0, 100.0],
    };
    (r, r)
}

/// `[p/100, p/10, p, 10p, 100p]`
pub fn ranges_around(p: f64) -> Result<ParamRange> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "range center must be positive and finite, got {p}"
        )));
    }
    ParamRange::new([p / 100.0, p / 10.0, p, p * 10.0, p * 100.0])
}

/// The 25 (gamma, C) pairs of a grid, gamma index outer and C index inner,
/// both ascending. Position 12 is the pair of centers.
pub fn cartesian_candidates(range_gamma: &ParamRange, range_c: &ParamRange) -> Vec<HyperParams> {
    range_gamma
        .values
        .iter()
        .flat_map(|&gamma| {
            range_c
                .values
                .iter()
                .map(move |&c| HyperParams::new(c, gamma).expect("range values are positive"))
        })
        .collect()
}

fn draw(rng: &mut SearchRng, lo: f64, hi: f64) -> f64 {
    if lo < hi {
        rng.uniform(lo, hi)
    } else {
        lo
    }
}

fn geometric_mean(a: f64, b: f64) -> f64 {
    a.sqrt() * b.sqrt()
}

/// Draws a perturbed copy of `r`; see the module docs for the rules.
///
/// Variates are consumed in slot order (`inf_down`, `inf_up`, `sup_down`,
/// `sup_up`), followed by any repair redraws.
pub fn perturb(r: &ParamRange, rng: &mut SearchRng) -> ParamRange {
    let c = r.center();

    let inf_down = draw(
        rng,
        (r.inf_down() / 10.0).max(f64::MIN_POSITIVE),
        r.inf_down(),
    );
    let inf_up_lo = (c - r.inf_up()) / 2.0;
    let mut inf_up = draw(rng, inf_up_lo, c);
    let sup_down_hi = c + (r.sup_down() - c) / 2.0;
    let mut sup_down = draw(rng, c, sup_down_hi);
    let sup_up = draw(rng, r.sup_up(), (r.sup_up() * 10.0).min(f64::MAX));

    let mut tries = 0;
    while !(inf_down < inf_up) && tries < MAX_REDRAWS {
        inf_up = draw(rng, inf_up_lo, c);
        tries += 1;
    }
    if !(inf_down < inf_up) {
        inf_up = geometric_mean(inf_down, c);
    }

    let mut tries = 0;
    while !(c < sup_down) && tries < MAX_REDRAWS {
        sup_down = draw(rng, c, sup_down_hi);
        tries += 1;
    }
    if !(c < sup_down) {
        sup_down = geometric_mean(c, sup_up);
    }

    let out = ParamRange {
        values: [inf_down, inf_up, c, sup_down, sup_up],
    };
    debug_assert!(ParamRange::new(out.values).is_ok(), "{out:?}");
    out
}

/// Coupled gamma and C ranges plus the random stream that perturbs them.
#[derive(Debug, Clone)]
pub struct SearchState {
    range_gamma: ParamRange,
    range_c: ParamRange,
    rng: SearchRng,
}

impl SearchState {
    pub fn new(range_gamma: ParamRange, range_c: ParamRange, rng: SearchRng) -> Self {
        Self {
            range_gamma,
            range_c,
            rng,
        }
    }

    /// State whose ranges are built by [`ranges_around`] the given pair.
    pub fn around(params: HyperParams, rng: SearchRng) -> Result<Self> {
        Ok(Self::new(
            ranges_around(params.gamma())?,
            ranges_around(params.c())?,
            rng,
        ))
    }

    pub fn range_gamma(&self) -> &ParamRange {
        &self.range_gamma
    }

    pub fn range_c(&self) -> &ParamRange {
        &self.range_c
    }

    /// The pair of range centers.
    pub fn incumbent(&self) -> HyperParams {
        HyperParams::new(self.range_c.center(), self.range_gamma.center())
            .expect("range centers are positive")
    }

    /// Rebuilds both ranges around a new incumbent; the random stream carries on.
    pub fn recenter(&mut self, params: HyperParams) -> Result<()> {
        let range_gamma = ranges_around(params.gamma())?;
        let range_c = ranges_around(params.c())?;
        self.range_gamma = range_gamma;
        self.range_c = range_c;
        Ok(())
    }
}

/// Perturbs the gamma range, then the C range, on the state's single stream.
pub fn perturb_state(mut s: SearchState) -> SearchState {
    s.range_gamma = perturb(&s.range_gamma, &mut s.rng);
    s.range_c = perturb(&s.range_c, &mut s.rng);
    s
}
