"""An independent oracle: the same identities as finite matrices.

Operators are realized on a spinor times two-oscillator Fock space.  Truncation
spoils matrix elements near the top level, so comparisons use the block of
states that stay a guard band away from it.
"""
# %%
import numpy as np

from ncehrenfest import FockBasisConfig, OperatorExpr, identity_residual, p, realize, x
from ncehrenfest.config import RunConfig
from ncehrenfest.scalar import I
from ncehrenfest.workflows import verify

values = {"hbar": 1.0, "m": 1.0}
basis = FockBasisConfig(dim=2, levels=16, guard=6)
xm = realize(OperatorExpr.atom(x(1)), basis, values)
pm = realize(OperatorExpr.atom(p(1)), basis, values)
comm = xm @ pm - pm @ xm

# %% On the full space [x, p] = i hbar fails badly at the top level ...
print("full-space error:", np.abs(comm.dense - 1j * np.eye(basis.size)).max())
# ... but on the guarded block it is exact to rounding.
print("guarded residual:", identity_residual(comm, OperatorExpr.scalar(I), basis, values))

# %% The whole verification batch at Theta = eta = 0.01, B = 1, E = (0.1, 0, 0).
report = verify(RunConfig.from_dict())
by_category: dict[str, list] = {}
for check in report.checks:
    by_category.setdefault(check.category, []).append(check)
for category, checks in by_category.items():
    worst = max((c.residual or 0.0) for c in checks)
    statuses = {s: sum(c.status == s for c in checks) for s in ("pass", "fail", "skip")}
    print(f"{category:>14}: {statuses}  worst residual {worst:.1e}")
print("overall pass:", report.passed)
