"""Velocity and force from Heisenberg's equation, grouped and audited.

The time derivative of position splits into the Dirac velocity c*alpha plus a
Theta-dependent shift; the time derivative of kinetic momentum splits into the
Lorentz force plus Theta and eta corrections.  Nothing is left over.
"""
# %%
from ncehrenfest import E_SYMBOLS, FieldSpec, deformed_hamiltonian, render
from ncehrenfest.heisenberg import (
    commutative_limit,
    deformed_lorentz_template,
    kinetic_momentum_rate,
    paper_form_comparison,
    position_rate,
    position_rate_template,
    spinor_component_action,
)

bundle = deformed_hamiltonian(FieldSpec.symmetric_gauge(e_field=E_SYMBOLS))
xdot = position_rate(bundle)
ddot = kinetic_momentum_rate(bundle)

# %% Position rate by group.
for name, comps in xdot.groups.items():
    print(f"{name:>9}: " + " | ".join(render(c) for c in comps))

# %% Each alpha_k has eigenvalues -1, -1, +1, +1, so every velocity component is +-c.
act = spinor_component_action(xdot)
print("speeds along axis 1:", [s.to_plain() for s in act.component_speeds[0]])

# %% Kinetic momentum rate by group.
print()
for name, comps in ddot.groups.items():
    print(f"{name:>9}: " + " | ".join(render(c) for c in comps))

# %% The commutative limit is exactly the Lorentz force.
print()
print("limit:", " | ".join(render(c) for c in commutative_limit(ddot)))

# %% Coefficients against the printed forms.
print()
print(paper_form_comparison(xdot, position_rate_template(bundle)).to_text())
print(paper_form_comparison(ddot, deformed_lorentz_template(bundle)).to_text())
