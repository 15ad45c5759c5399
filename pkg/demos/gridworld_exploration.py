"""
Exploration in a gridworld with a distractor reward
===================================================

A +1 exit two cells from the start and a +2 exit in the far corner. A
greedy learner that finds the +1 exit first tends to stay there. ARMAC's
behaviour mixes in the uniform and epsilon-regret candidates, so the far
corner keeps being visited every epoch. Over this short run the uniform
candidate often scores best and stays primary, so the far corner is reached
by design rather than by luck.
"""

import numpy as np

from armac.trainer import ArmacTrainer, EpochConfig

trainer = ArmacTrainer("gridworld", EpochConfig(k_act=256, k_learn=50, step_size=1e-3), seed=0)
for epoch in range(30):
    stats = trainer.step_epoch()
    counts = {r: int(np.sum(stats.returns[:, 0] == r)) for r in (0.0, 1.0, 2.0)}
    if epoch % 5 == 4:
        print(f"epoch {epoch + 1:3d}  episodes ending with 0/+1/+2: {counts[0.0]}/{counts[1.0]}/{counts[2.0]}  primary {stats.primary}")
