//! Deterministic simulator of the layered transmission architecture:
//! source -> 3 base stations -> 3 routes -> destination.
//!
//! The adversary is worst-case deterministic: it may jam one base station
//! (dropping a whole column before route transit) and one route (dropping a
//! whole row after fan-out), and may passively observe one column and one
//! row. No timing or stochastic channel is modeled.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bitstring::BitString;
use crate::codec::{
    enc2, recover_from_shares, split_secret, CodecError, FailurePattern, PadSet2,
};
use crate::randomness::{PadGenerator, PadSource, RandomnessError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("index {0} out of range 1..=3")]
    IndexOutOfRange(u8),
    #[error("secret bits must be even, got {0}")]
    OddSecretBits(usize),
    #[error("exhaustive campaign supports at most {1} secret bits, got {0}")]
    ExhaustiveTooLarge(usize, usize),
    #[error("recovery failed for jam (r={},c={}) observe (r={},c={})", .jam.route(), .jam.bs(), .observe.route(), .observe.bs())]
    RecoveryFailure {
        jam: FailurePattern,
        observe: FailurePattern,
    },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Randomness(#[from] RandomnessError),
}

/// What the adversary does during one transfer. At most one jam and one
/// observation per layer, per the single-BS/single-route model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AdversaryPlan {
    pub jam_bs: Option<u8>,
    pub jam_route: Option<u8>,
    pub observe_bs: Option<u8>,
    pub observe_route: Option<u8>,
}

impl AdversaryPlan {
    fn validate(&self) -> Result<(), SimError> {
        for idx in [self.jam_bs, self.jam_route, self.observe_bs, self.observe_route]
            .into_iter()
            .flatten()
        {
            if !(1..=3).contains(&idx) {
                return Err(SimError::IndexOutOfRange(idx));
            }
        }
        Ok(())
    }
}

/// The result of one simulated transfer.
#[derive(Debug, Clone)]
pub struct TransferOutcome {
    pub recovered: bool,
    pub recovered_secret: Option<BitString>,
    /// Index-tagged shares the eavesdropper saw, ascending `(i, j)`.
    pub observation: Vec<((u8, u8), BitString)>,
    pub delivered_count: usize,
}

/// Encodes, applies the adversary, and decodes at the destination, drawing
/// pads from `gen`.
pub fn simulate_transfer(
    secret: &BitString,
    plan: &AdversaryPlan,
    gen: &mut PadGenerator,
) -> Result<TransferOutcome, SimError> {
    let (padded, _, _) = split_secret(secret);
    let pads = gen.pads2(padded.half_length());
    transfer_with_pads(secret, plan, &pads)
}

/// Same as [`simulate_transfer`] but with caller-supplied pads, so campaigns
/// can enumerate the pad space exhaustively.
pub fn transfer_with_pads(
    secret: &BitString,
    plan: &AdversaryPlan,
    pads: &PadSet2,
) -> Result<TransferOutcome, SimError> {
    plan.validate()?;
    let (padded, _, _) = split_secret(secret);
    let matrix = enc2(&padded, pads)?;

    let observation: Vec<((u8, u8), BitString)> = matrix
        .entries()
        .filter(|((i, j), _)| {
            plan.observe_route == Some(*i) || plan.observe_bs == Some(*j)
        })
        .map(|(pos, share)| (pos, share.clone()))
        .collect();

    // BS jam removes its column before route transit; route jam removes its
    // row after fan-out. Order is fixed for log determinism only.
    let delivered: BTreeMap<(u8, u8), BitString> = matrix
        .entries()
        .filter(|((_, j), _)| plan.jam_bs != Some(*j))
        .filter(|((i, _), _)| plan.jam_route != Some(*i))
        .map(|(pos, share)| (pos, share.clone()))
        .collect();

    let delivered_count = delivered.len();
    let (recovered, recovered_secret) =
        match recover_from_shares(&delivered, secret.len()) {
            Ok((s, _)) => (s == *secret, Some(s)),
            Err(_) => (false, None),
        };

    Ok(TransferOutcome {
        recovered,
        recovered_secret,
        observation,
        delivered_count,
    })
}

/// How a campaign draws its pads (and its per-trial secrets).
pub enum CampaignPads {
    /// All secrets x all pad assignments per pattern combination.
    Exhaustive,
    /// `trials` random secrets and pad sets per pattern combination.
    Random {
        trials: u32,
        source: PadSource,
        insecure_test_mode: bool,
    },
}

#[derive(Debug, Clone)]
pub struct CampaignRow {
    pub jam: FailurePattern,
    pub observe: FailurePattern,
    pub runs: u64,
    pub delivered_count: usize,
    pub recovered: bool,
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub secret_bits: usize,
    pub rows: Vec<CampaignRow>,
}

impl CampaignReport {
    pub fn combinations_recovered(&self) -> usize {
        self.rows.iter().filter(|r| r.recovered).count()
    }

    pub fn total_runs(&self) -> u64 {
        self.rows.iter().map(|r| r.runs).sum()
    }
}

impl fmt::Display for CampaignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "campaign, |S| = {} bits", self.secret_bits)?;
        for row in &self.rows {
            writeln!(
                f,
                "jam (r={},c={}) observe (r={},c={}): runs={} delivered={} recovered={}",
                row.jam.route(),
                row.jam.bs(),
                row.observe.route(),
                row.observe.bs(),
                row.runs,
                row.delivered_count,
                if row.recovered { "yes" } else { "NO" }
            )?;
        }
        write!(
            f,
            "{}/{} recovered ({} runs)",
            self.combinations_recovered(),
            self.rows.len(),
            self.total_runs()
        )
    }
}

const MAX_EXHAUSTIVE_SECRET_BITS: usize = 4;

/// Runs all 9 jam patterns x 9 observation patterns and asserts recovery in
/// every run. Any failure aborts with the offending pattern pair.
pub fn run_campaign(secret_bits: usize, pads: CampaignPads) -> Result<CampaignReport, SimError> {
    if secret_bits % 2 != 0 {
        return Err(SimError::OddSecretBits(secret_bits));
    }
    let mut gen = match &pads {
        CampaignPads::Exhaustive => {
            if secret_bits > MAX_EXHAUSTIVE_SECRET_BITS {
                return Err(SimError::ExhaustiveTooLarge(
                    secret_bits,
                    MAX_EXHAUSTIVE_SECRET_BITS,
                ));
            }
            None
        }
        CampaignPads::Random {
            source,
            insecure_test_mode,
            ..
        } => Some(source.generator(*insecure_test_mode)?),
    };

    let mut rows = Vec::with_capacity(81);
    for jam in FailurePattern::all() {
        for observe in FailurePattern::all() {
            let plan = AdversaryPlan {
                jam_bs: Some(jam.bs()),
                jam_route: Some(jam.route()),
                observe_bs: Some(observe.bs()),
                observe_route: Some(observe.route()),
            };
            let mut runs = 0u64;
            let mut delivered_count = 0usize;
            let mut all_recovered = true;
            match &pads {
                CampaignPads::Exhaustive => {
                    let half = secret_bits / 2;
                    for s in 0..1u64 << secret_bits {
                        let secret =
                            BitString::from_u128(u128::from(s), secret_bits).unwrap();
                        for padset in crate::randomness::exhaustive_pads2(half)? {
                            let outcome = transfer_with_pads(&secret, &plan, &padset)?;
                            runs += 1;
                            delivered_count = outcome.delivered_count;
                            all_recovered &= outcome.recovered;
                        }
                    }
                }
                CampaignPads::Random { trials, .. } => {
                    let gen = gen.as_mut().expect("random mode has a generator");
                    for _ in 0..*trials {
                        let secret = gen.bits(secret_bits);
                        let outcome = simulate_transfer(&secret, &plan, gen)?;
                        runs += 1;
                        delivered_count = outcome.delivered_count;
                        all_recovered &= outcome.recovered;
                    }
                }
            }
            if !all_recovered {
                return Err(SimError::RecoveryFailure { jam, observe });
            }
            rows.push(CampaignRow {
                jam,
                observe,
                runs,
                delivered_count,
                recovered: all_recovered,
            });
        }
    }
    Ok(CampaignReport { secret_bits, rows })
}
