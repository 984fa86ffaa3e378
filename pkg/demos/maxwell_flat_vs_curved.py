"""Grassmann-Maxwell equations: the flat metric admits no sources, a curved one admits all co-closed ones."""

from supergrass import GrassmannElement as G, Metric, linalg
from supergrass import maxwell as mx

metrics = {
    "flat": Metric.standard(2),
    "curved": Metric.from_upper(2, {(1, 2): G.scalar(2, 1) + G.monomial(2, (1, 2))}),
}
ncols = len(mx.potential_basis(2))
for name, g in metrics.items():
    rank = linalg.rank(mx.maxwell_operator(g), ncols)
    currents = [mx.potential_from_vector(2, v) for v in linalg.nullspace(mx.codifferential_operator(g), ncols)]
    print(f"{name}: rank(delta Q) = {rank}, co-closed currents = {len(currents)}")
    for J in currents:
        sol = mx.maxwell_solve(J, g)
        print(f"   J = {J.form()}: {sol.status}, charge (normal) = {mx.grassmann_charge(J, g, 'normal')}")
    print(f"   gauge kernel dim = {mx.maxwell_solve(None, g).kernel_dim}")
