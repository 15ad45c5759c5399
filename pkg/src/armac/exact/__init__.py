"""Exact, enumeration-based game-theory machinery."""

from armac.exact.cfr import AverageAccumulator, CFRSolver, RegretTable, cfr_iteration, immediate_regrets
from armac.exact.oracles import cumulative_regret_oracle, exact_q_table, exact_W_array, exact_W_oracle
from armac.exact.policy import PolicyTable, as_policy_array, epsilon_mix, regret_matching, regret_matching_rows
from armac.exact.tree import MAX_NODES, GameTree, TreeTooLarge, load_tree, perfect_recall_violations
from armac.exact.values import (
    CFValueReport,
    NashConvReport,
    Reach,
    advantages,
    best_response,
    best_response_array,
    counterfactual_values,
    expected_values,
    nash_conv,
    nash_conv_report,
    node_values,
    reach_probabilities,
)

__all__ = [
    "AverageAccumulator",
    "CFRSolver",
    "CFValueReport",
    "GameTree",
    "MAX_NODES",
    "NashConvReport",
    "PolicyTable",
    "Reach",
    "RegretTable",
    "TreeTooLarge",
    "advantages",
    "as_policy_array",
    "best_response",
    "best_response_array",
    "cfr_iteration",
    "counterfactual_values",
    "cumulative_regret_oracle",
    "epsilon_mix",
    "exact_W_array",
    "exact_W_oracle",
    "exact_q_table",
    "expected_values",
    "immediate_regrets",
    "load_tree",
    "nash_conv",
    "nash_conv_report",
    "perfect_recall_violations",
    "node_values",
    "reach_probabilities",
    "regret_matching",
    "regret_matching_rows",
]
