"""Curvature next to the fixed ends.

Run with ``python3 demos/04_endpoint_curvature.py``.
"""

# %% [markdown]
# A fixed end cannot accelerate, so F_tt = 0 there and the wave equation
# forces F_xx to vanish at the end too. For the profile x^3(1-x)^3 this holds
# and F_xx shrinks linearly as the distance eps to the end shrinks.

# %%
from stringseries.fnspace import make_function
from stringseries.wave import WaveParams, endpoint_curvature_limit, solve

params = WaveParams()
zero = make_function("zero")
smooth = solve(make_function("bump", power=3), zero, params, 400)
eps = [1e-1, 1e-2, 1e-3, 1e-4]
for t in (0.0, 0.3, 1.7):
    trace = endpoint_curvature_limit(smooth, t, eps)
    values = ", ".join(f"{v:+.2e}" for v in trace.left)
    print(f"t={t}: F_xx(eps) = {values}; |F_xx| <= {trace.fitted_slope_bound():.2f} eps")

# %% [markdown]
# The parabola x(1-x) has curvature -2 at the ends. The series still
# converges, but F_xx near the end settles at -2 instead of 0, which shows
# that the data is incompatible with a classical solution. Resolving eps
# needs many more modes than 1/eps.

# %%
rough = solve(make_function("poly", coefficients=[0, 1, -1]), zero, params, 200_000)
trace = endpoint_curvature_limit(rough, 0.0, [1e-1, 3e-2, 1e-2])
for e, v in trace.pairs():
    print(f"eps={e:g}: F_xx = {v:+.5f}")
