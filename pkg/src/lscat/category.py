"""Lusternik-Schnirelmann category variants via exact cover search.

All variants are computed the same way: precompute the catalogue of
admissible subsets for each cover role (categorical opens, opens
deformable to Y, ...), then solve an exact minimum set cover by branch
and bound seeded with a greedy upper bound.  Every result carries a
certificate that re-validates from scratch.

The shared infinity token and its comparison conventions
(inf >= inf, inf >= n, inf >= inf - n, 0 >= n - inf) live here and are
used by every verifier.
"""

from __future__ import annotations

from .action import (
    G_fence_search,
    GroupAction,
    HomogeneousClass,
    inclusion_map,
    is_G_deformable,
    _EMPTY_DEFORMATION,
)
from .poset import (
    SizeCapExceeded,
    SpaceMap,
    Subset,
    bits,
    is_contractible_in,
    is_homotopy_equivalence,
    homotopy_inverse,
    concat_fences,
    fence_search,
)


class HypothesisUnmet(RuntimeError):
    def __init__(self, which, detail=""):
        self.which = which
        super().__init__(f"hypothesis unmet: {which}" + (f" ({detail})" if detail else ""))


# -- the shared infinity token ------------------------------------------


class _Infinity:
    __slots__ = ()

    def __repr__(self):
        return "INFINITE"

    def __deepcopy__(self, memo):
        return self


INFINITE = _Infinity()


def is_infinite(v):
    return v is INFINITE


def value_ge(a, b):
    """a >= b where either side may be INFINITE (inf >= inf, inf >= n)."""
    if a is INFINITE:
        return True
    if b is INFINITE:
        return False
    return a >= b


def value_ge_diff(lhs, x, y):
    """lhs >= x - y under the conventions inf >= inf - n and 0 >= n - inf.

    All left-hand sides in this package are nonnegative, so a
    subtrahend of INFINITE makes the inequality vacuous.
    """
    if y is INFINITE:
        return True
    if x is INFINITE:
        return lhs is INFINITE
    return value_ge(lhs, x - y)


def value_add(*vals):
    total = 0
    for v in vals:
        if v is INFINITE:
            return INFINITE
        total += v
    return total


def value_str(v):
    return "inf" if v is INFINITE else str(v)


# -- queries and results -------------------------------------------------

MODES = ("plain", "pair", "mod", "semi", "closed", "classB")


class CatQuery:
    """A category computation request.

    mode 'plain' counts categorical opens; 'pair'/'mod'/'semi' allow one
    extra open deformable to Y (mod Y / also containing A & Y); 'closed'
    counts closed categorical sets; 'classB' counts opens isomorphic to a
    member of the reference list ``class_b``.
    """

    __slots__ = ("space", "action", "klass", "A", "Y", "mode", "class_b")

    def __init__(self, space, A=None, Y=0, mode="plain", action=None,
                 klass=None, class_b=None):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.space = space
        self.action = action if action is not None else GroupAction.trivial(space)
        self.klass = klass if klass is not None else HomogeneousClass.point_only(self.action)
        self.A = space.full_mask() if A is None else _mask_of(A)
        self.Y = _mask_of(Y)
        self.mode = mode
        self.class_b = tuple(class_b or ())
        if mode in ("plain", "closed", "classB") and self.Y:
            raise ValueError(f"mode {mode!r} takes no reference subset Y")
        if mode == "classB" and not self.class_b:
            raise ValueError("classB mode needs a reference list")
        if not self.action.is_invariant(self.A):
            raise ValueError("A must be G-invariant")
        if not self.action.is_invariant(self.Y):
            raise ValueError("Y must be G-invariant")


def _mask_of(x):
    if isinstance(x, Subset):
        return x.mask
    return x


class CoverEntry:
    __slots__ = ("mask", "role", "certificate")

    def __init__(self, mask, role, certificate):
        self.mask = mask
        self.role = role
        self.certificate = certificate


class CatResult:
    """Value plus a re-checkable cover certificate."""

    __slots__ = ("query", "value", "cover")

    def __init__(self, query, value, cover):
        self.query = query
        self.value = value
        self.cover = cover

    def __repr__(self):
        return f"CatResult({value_str(self.value)}, mode={self.query.mode})"

    def verify(self):
        """Re-validate the certificate from scratch."""
        if self.value is INFINITE:
            return True
        q = self.query
        space = q.space
        covered = 0
        deformable_seen = 0
        for entry in self.cover:
            covered |= entry.mask
            if entry.role == "deformable":
                deformable_seen += 1
                if q.mode in ("mod", "semi") and (q.A & q.Y) & ~entry.mask:
                    raise ValueError("A0 must contain A & Y")
                _check_deformation_certificate(q, entry)
            elif entry.role == "categorical":
                if q.mode == "closed":
                    if not space.is_down_set(entry.mask):
                        raise ValueError("closed-mode cover set is not closed")
                else:
                    if not space.is_up_set(entry.mask):
                        raise ValueError("cover set is not open")
                _check_categorical_certificate(q, entry)
            elif entry.role == "iso":
                if not space.is_up_set(entry.mask):
                    raise ValueError("classB cover set is not open")
                _check_iso_certificate(q, entry)
            else:
                raise ValueError(f"unknown role {entry.role!r}")
        if q.A & ~covered:
            raise ValueError("cover does not cover A")
        counted = sum(1 for e in self.cover if e.role != "deformable")
        if counted != self.value:
            raise ValueError("cover size disagrees with the value")
        if q.mode in ("pair", "mod", "semi") and deformable_seen > 1:
            raise ValueError("at most one deformable set allowed")
        return True


def _check_deformation_certificate(query, entry):
    if entry.certificate is _EMPTY_DEFORMATION:
        if entry.mask != 0:
            raise ValueError("empty-deformation certificate on a nonempty set")
        return
    fence = entry.certificate
    space = query.space
    if not space.is_up_set(entry.mask):
        raise ValueError("A0 is not open")
    parents = tuple(bits(entry.mask))
    wy = [k for k, p in enumerate(parents) if query.Y >> p & 1]
    stage_ok = None
    if query.mode == "mod":
        def stage_ok(images):
            return all(query.Y >> images[k] & 1 for k in wy)
    fence.validate(stage_ok=stage_ok)
    if fence.start.images != parents:
        raise ValueError("deformation fence does not start at the inclusion")
    if fence.end.image_mask() & ~query.Y:
        raise ValueError("deformation does not end inside Y")


def _check_categorical_certificate(query, entry):
    ok, _ = is_categorical(
        entry.mask, query.space, query.action, query.klass,
        with_certificate=False,
    )
    if not ok:
        raise ValueError("cover set is not categorical")


def _check_iso_certificate(query, entry):
    sub, _ = query.space.subspace(entry.mask)
    if not any(order_isomorphic(sub, ref) for ref in query.class_b):
        raise ValueError("classB cover set matches no reference space")


# -- categorical sets ----------------------------------------------------


def is_categorical(mask, space, action=None, klass=None, node_cap=None,
                   with_certificate=True):
    """Does the inclusion factor, up to equivariant fence, through an
    admissible homogeneous orbit?

    For the trivial group with the point class this is exactly
    contractibility within the space.
    """
    action = action or GroupAction.trivial(space)
    klass = klass or HomogeneousClass.point_only(action)
    if mask == 0:
        raise ValueError("the empty set is not categorical")
    if not action.is_invariant(mask):
        return False, None
    if action.is_trivial():
        return is_contractible_in(Subset(space, mask), space,
                                  node_cap=node_cap,
                                  with_certificate=with_certificate)
    targets = _factor_targets(mask, action, klass)
    if not targets:
        return False, None
    incl, parents = inclusion_map(space, mask)
    fence = G_fence_search(
        incl, action, parents,
        targets=set(targets), node_cap=node_cap,
    )
    if fence is None:
        return False, None
    return True, (fence if with_certificate else None)


def _comparability_components(sub):
    n = len(sub)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if sub.comparable(i, j):
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[ra] = rb
    comps = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    return [tuple(sorted(c)) for c in sorted(comps.values())]


def _factor_targets(mask, action, klass):
    """All composite maps (through an admissible G/H) as image tuples.

    A factoring map is constant on comparability components of the
    domain, equivariant, with values g.x0 for a point x0 fixed by H; the
    coset assignment must absorb each component's setwise stabiliser.
    """
    space = action.space
    sub, parents = space.subspace(mask)
    comps = _comparability_components(sub)
    comp_of = {}
    for c, comp in enumerate(comps):
        for k in comp:
            comp_of[frozenset(parents[k] for k in comp)] = c
    comp_parent_sets = [frozenset(parents[k] for k in comp) for comp in comps]

    def component_image(g, c):
        moved = frozenset(g[p] for p in comp_parent_sets[c])
        return comp_of[moved]

    # orbits of components
    comp_orbit = {}
    orbit_reps = []
    for c in range(len(comps)):
        if c in comp_orbit:
            continue
        orbit_reps.append(c)
        for k, g in enumerate(action.elements):
            comp_orbit.setdefault(component_image(g, c), c)
    setwise = {
        c: [k for k, g in enumerate(action.elements) if component_image(g, c) == c]
        for c in orbit_reps
    }

    targets = set()
    for H in klass.subgroup_list:
        coset_reps = _coset_reps(action, H)
        for x0 in bits(action.fixed_mask(H)):
            choices = []
            for c in orbit_reps:
                valid = []
                for gamma in coset_reps:
                    gi = action.inverse(gamma)
                    if all(
                        action.compose(action.compose(gi, s), gamma) in H
                        for s in setwise[c]
                    ):
                        valid.append(gamma)
                choices.append(valid)
            if any(not v for v in choices):
                continue
            for assign in _product(choices):
                images = [None] * len(parents)
                ok = True
                for c, gamma in zip(orbit_reps, assign):
                    base = action.elements[gamma][x0]
                    for k, g in enumerate(action.elements):
                        c2 = component_image(g, c)
                        val = g[base]
                        for local in comps[c2]:
                            cur = images[local]
                            if cur is not None and cur != val:
                                ok = False
                                break
                            images[local] = val
                        if not ok:
                            break
                    if not ok:
                        break
                if ok and all(v is not None for v in images):
                    targets.add(tuple(images))
    return sorted(targets)


def _product(choices):
    if not choices:
        yield ()
        return
    for head in choices[0]:
        for rest in _product(choices[1:]):
            yield (head,) + rest


def _coset_reps(action, H):
    seen = set()
    reps = []
    for k in range(len(action.elements)):
        coset = frozenset(action.compose(k, h) for h in H)
        if coset not in seen:
            seen.add(coset)
            reps.append(k)
    return reps


# -- catalogues ----------------------------------------------------------


def _cache(action, key, builder):
    cache = action._caches
    if key not in cache:
        cache[key] = builder()
    return cache[key]


def _categorical_cached(space, action, klass, mask, node_cap=None):
    """Memoised is_categorical with certificate (production path only;
    certificate re-validation always recomputes from scratch)."""
    return _cache(
        action,
        ("cat-cert", klass.key(), mask),
        lambda: is_categorical(mask, space, action, klass, node_cap=node_cap),
    )


def invariant_up_sets(space, action):
    return [m for m in space.up_sets() if m and action.is_invariant(m)]


def invariant_down_sets(space, action):
    full = space.full_mask()
    return [full ^ m for m in space.up_sets() if action.is_invariant(full ^ m)
            and full ^ m]


def categorical_open_catalog(space, action, klass, node_cap=None):
    key = ("cat-open", klass.key())

    def build():
        out = []
        for m in invariant_up_sets(space, action):
            ok, _ = _categorical_cached(space, action, klass, m, node_cap)
            if ok:
                out.append(m)
        return tuple(out)

    return _cache(action, key, build)


def categorical_closed_catalog(space, action, klass, node_cap=None):
    key = ("cat-closed", klass.key())

    def build():
        out = []
        for m in invariant_down_sets(space, action):
            ok, _ = is_categorical(m, space, action, klass,
                                   node_cap=node_cap, with_certificate=False)
            if ok:
                out.append(m)
        return tuple(out)

    return _cache(action, key, build)


def deformable_open_catalog(space, action, Y_mask, mod, node_cap=None):
    """Invariant opens deformable to Y (mod Y when ``mod``); includes 0."""
    key = ("deformable", Y_mask, mod)

    def build():
        out = {0: _EMPTY_DEFORMATION}
        for m in invariant_up_sets(space, action):
            fence = is_G_deformable(action, m, Y_mask, mod=mod,
                                    node_cap=node_cap)
            if fence is not None:
                out[m] = fence
        return out

    return _cache(action, key, build)


def classB_catalog(space, action, class_b):
    if not action.is_trivial():
        raise SizeCapExceeded(
            "classB mode is implemented for trivial actions only"
        )
    key = ("classB", tuple(id(b) for b in class_b))

    def build():
        out = []
        for m in invariant_up_sets(space, action):
            sub, _ = space.subspace(m)
            if any(order_isomorphic(sub, ref) for ref in class_b):
                out.append(m)
        return tuple(out)

    return _cache(action, key, build)


def order_isomorphic(s1, s2):
    """Backtracking poset isomorphism on small spaces."""
    if len(s1) != len(s2):
        return False

    def profile(space, i):
        return (space.up[i].bit_count(), space.down[i].bit_count())

    p1 = sorted(profile(s1, i) for i in range(len(s1)))
    p2 = sorted(profile(s2, i) for i in range(len(s2)))
    if p1 != p2:
        return False
    n = len(s1)
    used = [False] * n
    assign = [None] * n

    def bt(i):
        if i == n:
            return True
        for j in range(n):
            if used[j] or profile(s1, i) != profile(s2, j):
                continue
            ok = True
            for i2 in range(i):
                j2 = assign[i2]
                if s1.leq(i, i2) != s2.leq(j, j2) or s1.leq(i2, i) != s2.leq(j2, j):
                    ok = False
                    break
            if ok:
                assign[i] = j
                used[j] = True
                if bt(i + 1):
                    return True
                used[j] = False
                assign[i] = None
        return False

    return bt(0)


# -- exact set cover -----------------------------------------------------


def min_cover(target_mask, candidate_masks):
    """Exact minimum cover of target by candidates; None if impossible.

    Deterministic branch and bound seeded with a greedy solution; ties
    broken by mask value.
    """
    if target_mask == 0:
        return []
    cands = []
    seen = set()
    for k, m in enumerate(candidate_masks):
        eff = m & target_mask
        if eff and eff not in seen:
            seen.add(eff)
            cands.append((eff, k))
    union = 0
    for eff, _ in cands:
        union |= eff
    if target_mask & ~union:
        return None
    # drop dominated candidates (effective coverage contained in another's)
    cands.sort(key=lambda t: (-t[0].bit_count(), candidate_masks[t[1]]))
    kept = []
    for eff, k in cands:
        if not any(eff & ~e2 == 0 and eff != e2 for e2, _ in kept):
            kept.append((eff, k))
    cands = kept

    greedy = []
    remaining = target_mask
    while remaining:
        best = max(cands, key=lambda t: ((t[0] & remaining).bit_count(), -t[0]))
        greedy.append(best[1])
        remaining &= ~best[0]
    best_solution = [greedy]

    def bnb(remaining, chosen):
        if not remaining:
            best_solution[0] = list(chosen)
            return
        if len(chosen) + 1 >= len(best_solution[0]):
            remaining_bits = remaining.bit_count()
            biggest = max((e & remaining).bit_count() for e, _ in cands)
            if len(chosen) + (remaining_bits + biggest - 1) // biggest >= len(
                best_solution[0]
            ):
                return
        pivot = (remaining & -remaining).bit_length() - 1
        options = [t for t in cands if t[0] >> pivot & 1]
        options.sort(key=lambda t: (-(t[0] & remaining).bit_count(), t[0]))
        for eff, k in options:
            chosen.append(k)
            bnb(remaining & ~eff, chosen)
            chosen.pop()

    bnb(target_mask, [])
    return [candidate_masks[k] for k in best_solution[0]]


# -- the main entry point -------------------------------------------------


def cover_category(query, node_cap=None):
    """Compute the requested category variant with certificates."""
    space, action, klass = query.space, query.action, query.klass
    if query.mode == "classB":
        catalog = classB_catalog(space, action, query.class_b)
        cover = min_cover(query.A, catalog)
        if cover is None:
            return CatResult(query, INFINITE, ())
        entries = [CoverEntry(m, "iso", None) for m in cover]
        return CatResult(query, len(cover), entries)

    if query.mode == "closed":
        catalog = categorical_closed_catalog(space, action, klass, node_cap)
        cover = min_cover(query.A, catalog)
        if cover is None:
            return CatResult(query, INFINITE, ())
        entries = [
            CoverEntry(m, "categorical",
                       is_categorical(m, space, action, klass,
                                      node_cap=node_cap)[1])
            for m in cover
        ]
        return CatResult(query, len(cover), entries)

    cat_catalog = categorical_open_catalog(space, action, klass, node_cap)

    if query.mode == "plain":
        cover = min_cover(query.A, cat_catalog)
        if cover is None:
            return CatResult(query, INFINITE, ())
        entries = [
            CoverEntry(m, "categorical",
                       _categorical_cached(space, action, klass, m,
                                           node_cap)[1])
            for m in cover
        ]
        return CatResult(query, len(cover), entries)

    # pair / mod / semi
    deform = deformable_open_catalog(
        space, action, query.Y, mod=(query.mode == "mod"), node_cap=node_cap
    )
    required = query.A & query.Y if query.mode in ("mod", "semi") else 0
    best = None
    cover_memo = {}
    a0_candidates = sorted(
        (m for m in deform if required & ~m == 0),
        key=lambda m: ((query.A & ~m).bit_count(), m),
    )
    for a0 in a0_candidates:
        target = query.A & ~a0
        if target not in cover_memo:
            cover_memo[target] = min_cover(target, cat_catalog)
        cover = cover_memo[target]
        if cover is None:
            continue
        if best is None or len(cover) < len(best[1]):
            best = (a0, cover)
            if len(cover) == 0:
                break
    if best is None:
        return CatResult(query, INFINITE, ())
    a0, cover = best
    entries = [CoverEntry(a0, "deformable", deform[a0])]
    entries.extend(
        CoverEntry(m, "categorical",
                   _categorical_cached(space, action, klass, m, node_cap)[1])
        for m in cover
    )
    return CatResult(query, len(cover), entries)


# -- convenience wrappers -------------------------------------------------


def cat(space, A=None, action=None, klass=None):
    """Plain (equivariant) category value of A within the space."""
    return cover_category(CatQuery(space, A=A, action=action, klass=klass)).value


def cat_pair(space, A, Y, action=None, klass=None):
    return cover_category(
        CatQuery(space, A=A, Y=Y, mode="pair", action=action, klass=klass)
    ).value


def cat_mod(space, A, Y, action=None, klass=None):
    return cover_category(
        CatQuery(space, A=A, Y=Y, mode="mod", action=action, klass=klass)
    ).value


def cat_semi(space, A, Y, action=None, klass=None):
    return cover_category(
        CatQuery(space, A=A, Y=Y, mode="semi", action=action, klass=klass)
    ).value


def cat_closed(space, A=None, action=None, klass=None):
    return cover_category(
        CatQuery(space, A=A, mode="closed", action=action, klass=klass)
    ).value


def cat_classB(space, class_b, A=None, action=None):
    return cover_category(
        CatQuery(space, A=A, mode="classB", action=action, class_b=class_b)
    ).value


# -- structural checkers ---------------------------------------------------


def check_preimage_categorical(phi, U, action=None, klass=None, node_cap=None):
    """For a homotopy equivalence phi and a categorical open U, certify
    that the preimage is again an open categorical set.

    The certificate composes the inverse equivalence with U's
    factorisation and is re-validated stage by stage.
    """
    space = phi.domain
    action = action or GroupAction.trivial(space)
    klass = klass or HomogeneousClass.point_only(action)
    U_mask = _mask_of(U)
    if not is_homotopy_equivalence(phi):
        raise HypothesisUnmet("homotopy_equivalence")
    if not space.is_up_set(U_mask):
        raise HypothesisUnmet("open", "U is not open")
    ok, u_cert = is_categorical(U_mask, space, action, klass, node_cap)
    if not ok:
        raise HypothesisUnmet("categorical", "U is not categorical")
    pre_mask = phi.preimage_mask(U_mask)
    assert space.is_up_set(pre_mask)  # preimage of open under continuous
    if pre_mask == 0:
        return {"preimage": Subset(space, pre_mask), "categorical": True,
                "certificate": None, "note": "empty preimage"}

    psi = homotopy_inverse(phi)
    incl_pre, pre_parents = inclusion_map(space, pre_mask)
    # fence 1: incl ~ (psi o phi) o incl, restricted to the preimage
    psiphi = psi.compose(phi)
    outer = fence_search(SpaceMap.identity(space), targets={psiphi.images},
                         node_cap=node_cap)
    if outer is None:  # cannot happen for a genuine equivalence
        raise HypothesisUnmet("homotopy_equivalence", "no fence id ~ psi phi")
    part1 = outer.compose_right(incl_pre)
    # fence 2: psi o (U's factorisation fence) o phi|
    sub_u, u_parents = space.subspace(U_mask)
    u_pos = {p: k for k, p in enumerate(u_parents)}
    phi_restr = SpaceMap(
        incl_pre.domain, sub_u,
        tuple(u_pos[phi.images[p]] for p in pre_parents),
    )
    part2 = u_cert.compose_left(psi).compose_right(phi_restr)
    full = concat_fences(part1, part2)
    full.validate()
    ok2, _ = is_categorical(pre_mask, space, action, klass, node_cap,
                            with_certificate=False)
    return {
        "preimage": Subset(space, pre_mask),
        "categorical": True,
        "certificate": full,
        "independent_recheck": ok2,
    }


def closed_category_report(A, space, action=None, klass=None, node_cap=None):
    """Compare the four open/closed category quantities for a closed A.

    Asserting the full chain needs normality; finite non-discrete models
    are not normal, so the chain is only asserted on discrete spaces and
    reported elsewhere.
    """
    action = action or GroupAction.trivial(space)
    klass = klass or HomogeneousClass.point_only(action)
    A_mask = _mask_of(A)
    if not space.is_down_set(A_mask):
        raise HypothesisUnmet("closed", "A is not closed")
    sub, idx = space.subspace(A_mask)
    sub_action, sub_klass = _induced(action, klass, sub, idx)

    value_in_sub = cover_category(
        CatQuery(sub, action=sub_action, klass=sub_klass), node_cap
    ).value
    closed_in_sub = cover_category(
        CatQuery(sub, mode="closed", action=sub_action, klass=sub_klass),
        node_cap,
    ).value
    closed_in_x = cover_category(
        CatQuery(space, A=A_mask, mode="closed", action=action, klass=klass),
        node_cap,
    ).value
    open_in_x = cover_category(
        CatQuery(space, A=A_mask, action=action, klass=klass), node_cap
    ).value

    verdicts = {
        "cat_sub_ge_closed_sub": value_ge(value_in_sub, closed_in_sub),
        "closed_sub_ge_closed_in_space": value_ge(closed_in_sub, closed_in_x),
        "closed_in_space_eq_open_in_space": closed_in_x == open_in_x,
    }
    report = {
        "cat_of_subspace": value_in_sub,
        "closed_cat_of_subspace": closed_in_sub,
        "closed_cat_in_space": closed_in_x,
        "cat_in_space": open_in_x,
        "verdicts": verdicts,
        "asserted": space.is_discrete(),
    }
    if space.is_discrete() and not all(verdicts.values()):
        raise AssertionError(
            f"closed-category chain failed on a discrete space: {report}"
        )
    return report


def _induced(action, klass, sub, idx):
    pos = {p: k for k, p in enumerate(idx)}
    gens = []
    for g in action.generators:
        gens.append(tuple(pos[g[p]] for p in idx))
    sub_action = GroupAction(sub, gens)
    if klass.kind == "all":
        sub_klass = HomogeneousClass.all_types(sub_action)
    elif klass.kind == "free":
        sub_klass = HomogeneousClass.free_only(sub_action)
    else:
        sub_klass = HomogeneousClass.point_only(sub_action)
    return sub_action, sub_klass


def cuplength_lower_bound(space):
    """1 + mod-2 cup-length of the order complex; a lower bound for the
    plain category of the space (non-equivariant)."""
    from .simplicial import cuplength, order_complex

    return 1 + cuplength(order_complex(space))
