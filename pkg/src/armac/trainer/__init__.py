"""Retrospective advantage-regression trainer."""

from .candidates import CandidatePolicy, build_behavior, default_candidates, evaluate_candidates, primary_index, select_candidate
from .config import EPSILONS, EpochConfig
from .heads import Head
from .loop import ArmacTrainer, EpochStats, ReplayBuffer
from .snapshot import PolicyReservoir, PolicySnapshot, derive_current_policy
from .targets import enumerate_episodes, exact_q_by_history, tree_backup_fixed_point, tree_backup_targets
from .exact_mode import EquivalenceReport, ExactArmac, compare_with_cfr
from .unbiased import OracleSnapshot, UnbiasednessReport, random_policy, unbiasedness_harness
