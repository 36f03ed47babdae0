"""Walkthrough: why merely-monotone assumptions cannot give a contraction.

Two small operator families each leave an entire ray of states exactly fixed,
so the lifted operator has multiple fixed points and no contraction factor
beta < 1 can exist for them.
"""

import numpy as np

from minlift import (
    SplitProblem,
    counterexample_cone_ops,
    counterexample_zero_ops,
    mt_fixed_point_residual,
)

zero_prob = SplitProblem(ops=counterexample_zero_ops(), gamma=0.5)
print("three zero operators on R: the diagonal ray is fixed")
for t in (-2.0, 1.0, 7.5):
    res, _ = mt_fixed_point_residual(zero_prob, np.array([[t], [t]]))
    print(f"  z = ({t}, {t}): residual {res:.1e}")

cone_prob = SplitProblem(ops=counterexample_cone_ops(1.0), gamma=0.5)
print("cone-restricted strongly monotone family: the ray R_- x {0} is fixed")
for t in (-2.0, -0.5, 0.0):
    res, _ = mt_fixed_point_residual(cone_prob, np.array([[t], [0.0]]))
    print(f"  z = ({t}, 0): residual {res:.1e}")
