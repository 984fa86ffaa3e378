"""Levi-Civita connection, curvature and the Grassmann-Einstein residual for g_12 = 1 + xi^1 xi^2."""

from supergrass import GrassmannElement as G, Metric
from supergrass import gravity as gr

g = Metric.from_upper(2, {(1, 2): G.scalar(2, 1) + G.monomial(2, (1, 2))})
C = gr.levi_civita(g)
for c in range(2):
    for a in range(2):
        for b in range(2):
            if C(c, a, b):
                print(f"Gamma^{c + 1}_{a + 1}{b + 1} = {C(c, a, b)}")
print("Ricci scalar     :", gr.ricci_scalar(g))
print("Hilbert action   :", gr.hilbert_action(g))
print("simplified action:", gr.simplified_action(g))
print("identities       :", gr.frame_identity_report(C))
print("symmetries       :", gr.curvature_symmetries_check(C, g))
print("Einstein residual:", gr.einstein_residual(g))
print("component count  : formula", gr.curvature_component_count(1), "computed", gr.symmetry_space_dimension(2))
