//! Two-dimensional XOR secret sharing for a 3x3 layered multipath network.
//!
//! A secret is split into two halves and XOR-encoded twice: once into three
//! intermediate shares and then, per intermediate share, into a column of a
//! 3x3 matrix. Row `i` of the matrix transits route `i`, column `j` transits
//! base station `j`. The scheme tolerates the loss of any one full row plus
//! any one full column, and an eavesdropper seeing any one full row plus one
//! full column learns nothing about the secret. Both claims are checked
//! exhaustively at small bit widths by the [`privacy`] and [`netsim`]
//! modules.

pub mod bitstring;
pub mod codec;
pub mod container;
pub mod netsim;
pub mod privacy;
pub mod randomness;

pub use bitstring::{BitString, BitStringError};
pub use codec::{
    build_decoding_set, dec1, dec2, enc1, enc2, enc2_composed, join_secret, recover_from_shares,
    split_secret, CodecError, DecodingSet, FailurePattern, OneLayerShares, PadSet1, PadSet2,
    PaddedSecret, ShareMatrix,
};
pub use container::{
    decode_share, encode_share, secret_digest, ContainerError, Manifest, ManifestShare,
    ShareRecord, FORMAT_VERSION, MAGIC,
};
pub use netsim::{
    run_campaign, simulate_transfer, transfer_with_pads, AdversaryPlan, CampaignPads,
    CampaignReport, CampaignRow, SimError, TransferOutcome,
};
pub use privacy::{
    audit_all_cases, build_observation, case_expression_check, exact_mutual_information,
    full_matrix_mutual_information, pad_marginals_uniform, reduced_tuple,
    reduced_tuple_mutual_information, single_share_audit, two_share_audit, AuditError,
    AuditReport, JointDistribution, MiValue, ObservationSet,
};
pub use randomness::{
    exhaustive_pads1, exhaustive_pads2, PadGenerator, PadSource, RandomnessError,
};
