"""Where does the noncommutative algebra come from, and does it agree with the printed one?

Positions and momenta are Bopp-shifted from commuting variables; their commutators
then follow from the canonical ones.  This script derives each commutator under
the three conventions and prints the comparison table.
"""
# %%
from ncehrenfest import CONVENTIONS, OperatorExpr, bopp_shift, canonicalize, render, x
from ncehrenfest.context import AlgebraContext, NCParameters
from ncehrenfest.nc_algebra import algebra_consistency_report

params = NCParameters()
conv = CONVENTIONS["default"]
ctx = AlgebraContext(params=params, convention=conv)

# %% The shifted position operators are ordinary linear combinations.
for k in (1, 2, 3):
    shifted = canonicalize(bopp_shift(OperatorExpr.atom(x(k)), params, conv), ctx)
    print(f"x{k} -> {render(shifted)}")

# %% Default convention: Theta enters through Theta/2 and the shift divides by 4 hbar.
print()
print(algebra_consistency_report(params, conv).to_text())

# %% Each alternative convention repairs some rows and breaks others.
for name in ("unit", "half-2hbar"):
    rep = algebra_consistency_report(params, CONVENTIONS[name])
    print(f"{name}: mismatched rows -> {[r.relation for r in rep.findings()]}")

# %% Without noncommutativity the audit is clean.
clean = algebra_consistency_report(NCParameters.commutative())
print("commutative findings:", clean.findings())
