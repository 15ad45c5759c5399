"""
Sampled ARMAC on Kuhn poker
===========================

Small feedforward heads, 256 episodes per epoch. Each epoch the candidate
behaviour policies are scored and the best one becomes the primary source
of learner behaviour. NashConv of the average-policy head is printed every
20 epochs; uniform play sits at about 0.92.
"""

from armac.trainer import ArmacTrainer, EpochConfig

config = EpochConfig(k_act=256, k_learn=50, batch_episodes=32, eval_episodes=64, step_size=1e-3, step_size_decay=0.05)
trainer = ArmacTrainer("kuhn", config, seed=0)


def show(stats):
    if stats.nash_conv_avg is not None:
        print(
            f"epoch {stats.epoch + 1:4d}  steps {stats.acting_steps:7d}  "
            f"NashConv avg {stats.nash_conv_avg:.3f}  current {stats.nash_conv_current:.3f}  primary {stats.primary}"
        )


trainer.run(100, eval_interval=20, callback=show)
