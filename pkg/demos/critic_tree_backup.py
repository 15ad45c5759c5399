"""
Tree-Backup(lambda) critic on Kuhn poker
========================================

A tabular critic trained to the Tree-Backup fixed point from off-policy
episodes (uniform behaviour) recovers the exact action values of the target
policy for every trace parameter.
"""

import numpy as np

from armac.exact import PolicyTable, load_tree
from armac.sampling.trajectory import TablePolicy
from armac.trainer import exact_q_by_history, random_policy, tree_backup_fixed_point

tree = load_tree("kuhn")
target_array = random_policy(tree, np.random.default_rng(1))
target = TablePolicy(PolicyTable.from_array(tree, target_array))
exact = exact_q_by_history("kuhn", target_array)


def uniform(key, mask):
    return mask / mask.sum()


for lam in (0.0, 0.5, 0.9, 1.0):
    q, sweeps = tree_backup_fixed_point("kuhn", target, uniform, lam)
    err = max(float(np.abs(q[h] - row).max()) for h, row in exact.items())
    print(f"lambda={lam:.1f}: {sweeps:3d} sweeps, max |q - q_exact| = {err:.1e}")
