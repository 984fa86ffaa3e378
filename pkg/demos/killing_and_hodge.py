"""Killing fields of the flat metric on R^{0|2} and the degenerate Hodge pairing."""

from supergrass import Metric, PseudoForm, killing_bound, killing_solve
from supergrass.hodge import codifferential, form_inner_product, hodge_star, hodge_star_back

g = Metric.standard(2)
even, odd = killing_solve(g, False, 0), killing_solve(g, False, 1)
print(f"Killing fields: {len(even)} even | {len(odd)} odd, bound {killing_bound(2)}")
for K in even + odd:
    print("  ", K.field)

f = PseudoForm.term(2, (1, 0), (2,))
print("f          =", f)
print("*f         =", hodge_star(f, g))
print("**f        =", hodge_star_back(hodge_star(f, g), g))
print("delta f    =", codifferential(f, g))

closed = [PseudoForm.term(2, e, ()) for e in ((2, 0), (1, 1), (0, 2))]
print("pairings of closed even 2-forms:", [form_inner_product(a, b, g) for a in closed for b in closed])
