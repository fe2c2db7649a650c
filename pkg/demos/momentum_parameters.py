"""How the constant momentum is chosen.

For a fixed step the per-epoch contraction factor is a parabola in omega;
its vertex gives the best momentum as long as it respects the variance
bound. The preset table picks (eta, omega) from the ratio m mu / L.

    python3 demos/momentum_parameters.py
"""
import numpy as np

from vropt.solvers import contraction_factor, omega_bound, omega_optimal, option1_range, table_preset

m, mu, L = 1000, 1e-3, 1.0
eta = 0.2
w_opt = omega_optimal(m, mu, eta)
print(f"m={m} mu={mu} L={L} eta={eta}: best omega {w_opt:.3f}, bound {omega_bound(L, eta):.3f}")
for w in np.linspace(0.02, 0.3, 8):
    print(f"  omega={w:.3f}  rho={contraction_factor(w, m, mu, eta):.4f}")

lo, hi = option1_range()
print(f"\nOption I presets apply for {lo:.5f} <= m mu / L <= {hi:.2f}")
for r in (0.01, 0.5, 1.0, 10.0, 100.0, 1000.0):
    for opt in ("I", "II"):
        pre = table_preset(opt, m, r * L / m, L)
        print(f"  m mu/L={r:<7g} option {opt:<2} eta*L={pre.eta * L:.4f} omega={pre.omega:.4f} "
              f"m={pre.m or m} restart={pre.restart}")
