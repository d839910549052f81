"""Does the derived velocity actually move the wave packet?

A coherent-state packet is evolved exactly under the realized deformed
Hamiltonian.  The finite-difference slope of <x> and <D> is compared with the
expectation of the derived rates; halving dt should cut the mismatch by four.
"""
# %%
import numpy as np

from ncehrenfest.config import RunConfig
from ncehrenfest.workflows import evolution_report

cfg = RunConfig.from_dict()
report = evolution_report(cfg)

# %% Residuals and invariants of the default run.
for record in report.records:
    flag = "pass" if record["pass"] else "FAIL"
    print(f"{flag}  {record['identity']}: {record['residual']:.4g}")

# %% A look at the trajectory itself.
traj = report.trajectory
for name in ("x1", "x2", "D1", "D2"):
    col = traj.columns[name]
    print(f"<{name}> from {col[0]: .5f} to {col[-1]: .5f}, range {np.ptp(col):.3e}")

# %% Convergence order estimated from dt and dt/2.
for name, conv in report.convergence.items():
    print(f"{name}: ratio {conv['ratio']:.4f}, order {conv['order']:.3f}")
