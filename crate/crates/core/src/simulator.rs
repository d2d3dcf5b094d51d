//! Monte Carlo of the three-slot protocol.
//!
//! One realization draws, in this order and regardless of scheme or flags:
//! the PR field, the relay field (hop-1 and hop-2 gains per relay), the PT
//! field(s), the direct ST→SD gain and one uniform used by the random
//! baseline. Fixing the order keeps streams paired across schemes and
//! direct-link settings.
//!
//! PT fields per [`SlotPositionModel`]:
//! - `independent`: three position draws. Slot 0 (harvest) has one mark
//!   column for ST; slot 1 (ST→SR) has one column per relay and one for SD,
//!   which hears ST directly; slot 2 (SR→SD) has a column for ST's second
//!   harvest and one for SD.
//! - `static`: one position draw carrying all of the above columns.

use std::num::NonZeroUsize;

use rand::Rng;
use rayon::prelude::*;

use crate::scalar::Scalar;
use crate::scheme::SchemeId;
use crate::stochgeom::{
    is_clear_of_guard_zones, path_gain_sum, sample_disc_ppp, sample_plane_ppp, Point, PointField,
    RngStream, MIN_DISTANCE,
};
use crate::units::{SlotPositionModel, ValidatedConfig};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Per-trial record of every event the success definition is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationOutcome<T> {
    pub harvest_ok: bool,
    pub st_clear: bool,
    pub relay_count: usize,
    pub selected_relay: Option<usize>,
    pub sr_decode_ok: bool,
    pub sr_clear: bool,
    pub sd_decode_ok: bool,
    pub direct_decode_ok: bool,
    pub success: bool,
    /// `E_h`, mJ.
    pub harvested_energy: T,
    /// `K = E_h / (η P_t T)`.
    pub k_value: T,
    /// Relays whose hop-1 SIR clears the threshold, counted only when ST's
    /// guard zone is clear (ST stays silent otherwise).
    pub decode_set_size: usize,
}

/// Energy harvested over the two harvesting slots.
///
/// `k1_gain_sum` and `k2_gain_sum` are `Σ h d^(−α)` over the PTs heard in
/// the harvest slot and in the SR→SD slot. Returns `(E_h in mJ, K)`.
pub fn harvested_energy<T: Scalar>(k1_gain_sum: T, k2_gain_sum: T, cfg: &ValidatedConfig<T>) -> (T, T) {
    let k = cfg.a * k1_gain_sum + (T::one() - cfg.a) / T::lit(2.0) * k2_gain_sum;
    (cfg.eta * cfg.p_t_mw * cfg.t_block * k, k)
}

/// `tx_power · gain · distance^(−α) / interference`; `+∞` when there is no
/// interference and a nonzero signal.
pub fn sir<T: Scalar>(tx_power: T, gain: T, distance: T, interference: T, alpha: T) -> T {
    let d = distance.max(T::lit(MIN_DISTANCE));
    let signal = tx_power * gain * d.powf(-alpha);
    if signal <= T::zero() {
        return T::zero();
    }
    if interference <= T::zero() {
        return T::infinity();
    }
    signal / interference
}

/// Relay picked by a scheme and the value it was ranked on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection<T> {
    pub index: usize,
    /// `h·d^(−α)` (bcc), `h·d^(−α)/I_j` (bsir), hop-2 SIR (bstd), or the
    /// pick's composite channel (random baseline).
    pub metric: T,
}

/// Applies `scheme` to a relay field whose marks are `[hop-1 gain, hop-2
/// gain]`. `relay_interference[j]` is the hop-1 interference at relay `j`,
/// `sd_interference` the hop-2 interference at SD, `pick` a uniform draw in
/// `[0, 1)` used only by the random baseline. Ties go to the lowest index.
pub fn select_relay<T: Scalar>(
    scheme: SchemeId,
    relays: &PointField<T>,
    relay_interference: &[T],
    sd_interference: T,
    cfg: &ValidatedConfig<T>,
    pick: T,
) -> Option<Selection<T>> {
    let n = relays.len();
    if n == 0 {
        return None;
    }
    assert_eq!(relay_interference.len(), n, "one interference value per relay");
    let st = Point::origin();
    let sd = Point::new(cfg.d_sd, T::zero());
    let eps = T::lit(MIN_DISTANCE);
    let composite = |j: usize| relays.mark(j, 0) * relays.point(j).distance(&st).max(eps).powf(-cfg.alpha);

    let argmax = |candidates: &mut dyn Iterator<Item = (usize, T)>| {
        let mut best: Option<Selection<T>> = None;
        for (index, metric) in candidates {
            if best.is_none_or(|b| metric > b.metric) {
                best = Some(Selection { index, metric });
            }
        }
        best
    };

    match scheme {
        SchemeId::Bcc => argmax(&mut (0..n).map(|j| (j, composite(j)))),
        SchemeId::Bsir => argmax(&mut (0..n).map(|j| (j, composite(j) / relay_interference[j]))),
        SchemeId::Bstd => argmax(&mut (0..n).filter_map(|j| {
            let hop1 = sir(cfg.p_st_mw, relays.mark(j, 0), relays.point(j).norm(), relay_interference[j], cfg.alpha);
            (hop1 >= cfg.gamma_th_lin).then(|| {
                let d = relays.point(j).distance(&sd);
                (j, sir(cfg.p_st_mw, relays.mark(j, 1), d, sd_interference, cfg.alpha))
            })
        })),
        SchemeId::RandomBaseline => {
            let index = (pick * T::from_usize(n).unwrap()).floor().to_usize().unwrap_or(0).min(n - 1);
            Some(Selection {
                index,
                metric: composite(index),
            })
        }
    }
}

/// Which PT field and mark column serves each receiver role.
#[derive(Debug, Clone, Copy)]
enum Role {
    Harvest1,
    Relay(usize),
    SdHop1,
    Harvest2,
    SdHop2,
}

/// Every random quantity of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization<T> {
    pub pr: PointField<T>,
    /// Relays in the disc; marks `[hop-1 gain, hop-2 gain]`.
    pub relays: PointField<T>,
    /// One field per slot (`independent`) or a single shared field (`static`).
    pub pt: Vec<PointField<T>>,
    pub h_direct: T,
    pub pick: T,
}

impl<T: Scalar> Realization<T> {
    pub fn sample<R: Rng + ?Sized>(cfg: &ValidatedConfig<T>, rng: &mut R) -> Self {
        let origin = Point::origin();
        let pr = sample_disc_ppp(cfg.lambda_p, cfg.r_disc + cfg.r_gz, origin, 0, rng);
        let relays = sample_disc_ppp(cfg.lambda_sr, cfg.r_disc, origin, 2, rng);
        let n = relays.len();
        let pt = match cfg.slot_position_model {
            SlotPositionModel::Independent => vec![
                sample_plane_ppp(cfg.lambda_p, cfg.r_max, origin, 1, rng),
                sample_plane_ppp(cfg.lambda_p, cfg.r_max, origin, n + 1, rng),
                sample_plane_ppp(cfg.lambda_p, cfg.r_max, origin, 2, rng),
            ],
            SlotPositionModel::Static => {
                vec![sample_plane_ppp(cfg.lambda_p, cfg.r_max, origin, n + 4, rng)]
            }
        };
        let h_direct = T::sample_exp1(rng);
        let pick = T::sample_unit(rng);
        Self {
            pr,
            relays,
            pt,
            h_direct,
            pick,
        }
    }

    fn slot(&self, role: Role) -> (&PointField<T>, usize) {
        let n = self.relays.len();
        if self.pt.len() == 1 {
            let col = match role {
                Role::Harvest1 => 0,
                Role::Relay(j) => 1 + j,
                Role::SdHop1 => 1 + n,
                Role::Harvest2 => 2 + n,
                Role::SdHop2 => 3 + n,
            };
            return (&self.pt[0], col);
        }
        match role {
            Role::Harvest1 => (&self.pt[0], 0),
            Role::Relay(j) => (&self.pt[1], j),
            Role::SdHop1 => (&self.pt[1], n),
            Role::Harvest2 => (&self.pt[2], 0),
            Role::SdHop2 => (&self.pt[2], 1),
        }
    }

    /// `Σ h d^(−α)` for `role` at `at`, plus the normalized tail term.
    fn gain_sum(&self, role: Role, at: Point<T>, cfg: &ValidatedConfig<T>) -> T {
        let (field, col) = self.slot(role);
        path_gain_sum(field, col, at, cfg.alpha) + cfg.tail_interference() / cfg.p_t_mw
    }

    /// Interference and SIR on every link of the trial.
    pub fn links(&self, cfg: &ValidatedConfig<T>) -> Links<T> {
        let st = Point::origin();
        let sd = Point::new(cfg.d_sd, T::zero());
        let (harvested_energy, k_value) = harvested_energy(
            self.gain_sum(Role::Harvest1, st, cfg),
            self.gain_sum(Role::Harvest2, st, cfg),
            cfg,
        );
        let n = self.relays.len();
        let relay_interference: Vec<T> = (0..n)
            .map(|j| cfg.p_t_mw * self.gain_sum(Role::Relay(j), self.relays.point(j), cfg))
            .collect();
        let sd_interference = cfg.p_t_mw * self.gain_sum(Role::SdHop2, sd, cfg);
        let sd_interference_direct = cfg.p_t_mw * self.gain_sum(Role::SdHop1, sd, cfg);
        let hop1_sir = (0..n)
            .map(|j| {
                let p = self.relays.point(j);
                sir(cfg.p_st_mw, self.relays.mark(j, 0), p.norm(), relay_interference[j], cfg.alpha)
            })
            .collect();
        let hop2_sir = (0..n)
            .map(|j| {
                let d = self.relays.point(j).distance(&sd);
                sir(cfg.p_st_mw, self.relays.mark(j, 1), d, sd_interference, cfg.alpha)
            })
            .collect();
        let direct_sir = sir(cfg.p_st_mw, self.h_direct, cfg.d_sd, sd_interference_direct, cfg.alpha);
        Links {
            harvested_energy,
            k_value,
            st_clear: is_clear_of_guard_zones(st, &self.pr, cfg.r_gz),
            relay_interference,
            sd_interference,
            sd_interference_direct,
            hop1_sir,
            hop2_sir,
            direct_sir,
        }
    }

    /// Applies `scheme` and the success definition to this realization.
    pub fn evaluate(&self, links: &Links<T>, cfg: &ValidatedConfig<T>, scheme: SchemeId) -> RealizationOutcome<T> {
        let gamma = cfg.gamma_th_lin;
        let harvest_ok = links.k_value >= cfg.harvest_threshold_k();
        let st_clear = links.st_clear;
        let relay_count = self.relays.len();
        let selected = select_relay(
            scheme,
            &self.relays,
            &links.relay_interference,
            links.sd_interference,
            cfg,
            self.pick,
        )
        .map(|s| s.index);
        let sr_decode_ok = selected.is_some_and(|b| links.hop1_sir[b] >= gamma);
        let sr_clear = selected.is_some_and(|b| is_clear_of_guard_zones(self.relays.point(b), &self.pr, cfg.r_gz));
        let sd_decode_ok = selected.is_some_and(|b| links.hop2_sir[b] >= gamma);
        let direct_decode_ok = links.direct_sir >= gamma;
        let decode_set_size = if st_clear {
            links.hop1_sir.iter().filter(|&&s| s >= gamma).count()
        } else {
            0
        };

        let transmitted = harvest_ok && st_clear;
        let relayed = sr_decode_ok && sr_clear && sd_decode_ok;
        let delivered = if !cfg.direct_link {
            relayed
        } else if cfg.literal_direct_events {
            if sr_decode_ok {
                sr_clear && (sd_decode_ok || direct_decode_ok)
            } else {
                direct_decode_ok
            }
        } else {
            relayed || direct_decode_ok
        };

        RealizationOutcome {
            harvest_ok,
            st_clear,
            relay_count,
            selected_relay: selected,
            sr_decode_ok,
            sr_clear,
            sd_decode_ok,
            direct_decode_ok,
            success: transmitted && delivered,
            harvested_energy: links.harvested_energy,
            k_value: links.k_value,
            decode_set_size,
        }
    }
}

/// Link-level quantities derived from a [`Realization`].
#[derive(Debug, Clone, PartialEq)]
pub struct Links<T> {
    pub harvested_energy: T,
    pub k_value: T,
    pub st_clear: bool,
    /// Hop-1 interference at each relay, mW.
    pub relay_interference: Vec<T>,
    /// Hop-2 interference at SD, mW.
    pub sd_interference: T,
    /// Interference at SD during the ST→SR slot, mW.
    pub sd_interference_direct: T,
    pub hop1_sir: Vec<T>,
    pub hop2_sir: Vec<T>,
    pub direct_sir: T,
}

/// One trial on stream `(seed, trial)`.
pub fn run_realization<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    scheme: SchemeId,
    stream: RngStream,
) -> RealizationOutcome<T> {
    let real = Realization::sample(cfg, &mut stream.rng());
    let links = real.links(cfg);
    real.evaluate(&links, cfg, scheme)
}

/// Wilson score interval for a Bernoulli proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateCI {
    pub p_hat: f64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl EstimateCI {
    pub fn wilson(successes: u64, trials: u64, seed: u64) -> Self {
        Self::wilson_z(successes, trials, seed, Z95)
    }

    pub fn wilson_z(successes: u64, trials: u64, seed: u64, z: f64) -> Self {
        assert!(trials > 0 && successes <= trials);
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Self {
            p_hat: p,
            trials,
            ci_low: (centre - half).clamp(0.0, p),
            ci_high: (centre + half).clamp(p, 1.0),
            seed,
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }

    /// Binomial standard error `√(p̂(1−p̂)/n)`.
    pub fn std_err(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Outcome flags counted by [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    Success,
    HarvestOk,
    StClear,
    Nonempty,
    Selected,
    SrDecodeOk,
    SrClear,
    SdDecodeOk,
    DirectDecodeOk,
}

impl Flag {
    pub const ALL: [Flag; 9] = [
        Flag::Success,
        Flag::HarvestOk,
        Flag::StClear,
        Flag::Nonempty,
        Flag::Selected,
        Flag::SrDecodeOk,
        Flag::SrClear,
        Flag::SdDecodeOk,
        Flag::DirectDecodeOk,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::Success => "success",
            Flag::HarvestOk => "harvest_ok",
            Flag::StClear => "st_clear",
            Flag::Nonempty => "relay_nonempty",
            Flag::Selected => "relay_selected",
            Flag::SrDecodeOk => "sr_decode_ok",
            Flag::SrClear => "sr_clear",
            Flag::SdDecodeOk => "sd_decode_ok",
            Flag::DirectDecodeOk => "direct_decode_ok",
        }
    }

    fn of<T>(&self, o: &RealizationOutcome<T>) -> bool {
        match self {
            Flag::Success => o.success,
            Flag::HarvestOk => o.harvest_ok,
            Flag::StClear => o.st_clear,
            Flag::Nonempty => o.relay_count > 0,
            Flag::Selected => o.selected_relay.is_some(),
            Flag::SrDecodeOk => o.sr_decode_ok,
            Flag::SrClear => o.sr_clear,
            Flag::SdDecodeOk => o.sd_decode_ok,
            Flag::DirectDecodeOk => o.direct_decode_ok,
        }
    }
}

/// Integer counts over a batch of trials; merging is order-independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub trials: u64,
    pub counts: [u64; 9],
    pub decode_set_sum: u64,
    pub decode_set_sq_sum: u64,
}

impl Tally {
    pub fn record<T>(&mut self, o: &RealizationOutcome<T>) {
        self.trials += 1;
        for (c, f) in self.counts.iter_mut().zip(Flag::ALL) {
            *c += u64::from(f.of(o));
        }
        let d = o.decode_set_size as u64;
        self.decode_set_sum += d;
        self.decode_set_sq_sum += d * d;
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.decode_set_sum += other.decode_set_sum;
        self.decode_set_sq_sum += other.decode_set_sq_sum;
        self
    }

    pub fn count(&self, flag: Flag) -> u64 {
        self.counts[flag as usize]
    }
}

/// Result of [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSummary {
    pub scheme: SchemeId,
    pub seed: u64,
    pub tally: Tally,
}

impl SimulationSummary {
    pub fn success(&self) -> EstimateCI {
        self.flag(Flag::Success)
    }

    pub fn flag(&self, flag: Flag) -> EstimateCI {
        EstimateCI::wilson(self.tally.count(flag), self.tally.trials, self.seed)
    }

    /// Sample mean and standard error of the decode-set size.
    pub fn decode_set_mean(&self) -> (f64, f64) {
        let n = self.tally.trials as f64;
        let mean = self.tally.decode_set_sum as f64 / n;
        let var = (self.tally.decode_set_sq_sum as f64 / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    }
}

/// Runs `trials` independent realizations on streams `(seed, 0..trials)`.
///
/// With `workers = None` the global rayon pool is used. Counts are summed as
/// integers, so the result does not depend on the worker count.
pub fn simulate<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    scheme: SchemeId,
    trials: u64,
    seed: u64,
    workers: Option<NonZeroUsize>,
) -> SimulationSummary {
    simulate_schemes(cfg, &[scheme], trials, seed, workers)
        .pop()
        .expect("one summary per scheme")
}

/// [`simulate`] for several schemes on the same realizations. Each summary
/// equals the one `simulate` returns for that scheme alone.
pub fn simulate_schemes<T: Scalar>(
    cfg: &ValidatedConfig<T>,
    schemes: &[SchemeId],
    trials: u64,
    seed: u64,
    workers: Option<NonZeroUsize>,
) -> Vec<SimulationSummary> {
    assert!(trials >= 1, "at least one trial");
    let k = schemes.len();
    let run = || {
        (0..trials)
            .into_par_iter()
            .fold(
                || vec![Tally::default(); k],
                |mut tallies, i| {
                    let real = Realization::sample(cfg, &mut RngStream::new(seed, i).rng());
                    let links = real.links(cfg);
                    for (t, &s) in tallies.iter_mut().zip(schemes) {
                        t.record(&real.evaluate(&links, cfg, s));
                    }
                    tallies
                },
            )
            .reduce(
                || vec![Tally::default(); k],
                |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
            )
    };
    let tallies = match workers {
        None => run(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.get())
            .build()
            .expect("worker pool")
            .install(run),
    };
    schemes
        .iter()
        .zip(tallies)
        .map(|(&scheme, tally)| SimulationSummary { scheme, seed, tally })
        .collect()
}
