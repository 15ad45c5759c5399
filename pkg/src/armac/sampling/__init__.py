"""Trajectory sampling, outcome-sampling baselines and episode records."""

from armac.exact.policy import epsilon_mix

from .outcome import (
    Reservoir,
    SampledCFEstimate,
    mc_rcfr_run,
    mccfr_outcome_sampling_run,
    outcome_sampling_estimate,
)
from .records import (
    EpisodeRecord,
    RecordFormatError,
    RecordStep,
    build_episode_record,
    decode_record,
    encode_record,
    read_records,
    write_records,
)
from .trajectory import (
    EpsilonPolicy,
    PolicySource,
    Step,
    TablePolicy,
    Trajectory,
    sample_action,
    sample_episode,
    uniform_policy,
)

__all__ = [
    "EpisodeRecord",
    "EpsilonPolicy",
    "PolicySource",
    "RecordFormatError",
    "RecordStep",
    "Reservoir",
    "SampledCFEstimate",
    "Step",
    "TablePolicy",
    "Trajectory",
    "build_episode_record",
    "decode_record",
    "encode_record",
    "epsilon_mix",
    "mc_rcfr_run",
    "mccfr_outcome_sampling_run",
    "outcome_sampling_estimate",
    "read_records",
    "sample_action",
    "sample_episode",
    "uniform_policy",
    "write_records",
]

from .checks import EstimatorCheck, outcome_sampling_check  # noqa: E402

__all__ += ["EstimatorCheck", "outcome_sampling_check"]
