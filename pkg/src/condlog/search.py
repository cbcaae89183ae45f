"""Exhaustive small-frame enumeration and targeted searches.

Frames are enumerated up to world/domain relabeling via canonical-form
hashing: a frame is emitted only when its encoding is lexicographically
minimal among all permutation images.  The descending-sequence sweep and
the compactness search both replay any witness through the generic
evaluator before reporting it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .frameprops import check_selection_props
from .semantics import Model, ResourceGuard, SelectionFrame, _bits, evaluate
from .syntax import (
    Atom,
    Cond,
    Dia,
    F,
    Formula,
    Not,
    Or,
    Predicate,
    build_ds,
)

CLASSIFICATIONS = {
    "weaklyStalnakerian": ("Success", "WeakCentering", "Uniformity", "Uniqueness"),
    "Stalnakerian": ("Success", "WeakCentering", "LA", "Uniformity", "Uniqueness"),
}

_CONDITION_NAMES = (
    "Success",
    "WeakCentering",
    "StrongCentering",
    "LA",
    "WLA",
    "Uniformity",
    "Uniqueness",
    "RationalMonotonicity",
    "GloballyConstant",
)


@dataclass(frozen=True)
class EnumerationParams:
    max_worlds: int = 3
    max_domain: int = 2
    required_properties: frozenset[str] = frozenset()
    policy: str = "all"  # or "reflexive-only"
    hard_world_limit: int = 4

    def __post_init__(self) -> None:
        if self.policy not in ("all", "reflexive-only"):
            raise ValueError(f"unknown accessibility policy {self.policy!r}")
        unknown = set(self.required_properties) - set(_CONDITION_NAMES) - set(
            CLASSIFICATIONS
        )
        if unknown:
            raise ValueError(f"unknown properties {sorted(unknown)}")

    def conditions(self) -> frozenset[str]:
        out = set()
        for name in self.required_properties:
            out.update(CLASSIFICATIONS.get(name, (name,)))
        return frozenset(out)


@dataclass
class SearchOutcome:
    found: bool
    witness: Optional[dict] = None
    frames_enumerated: int = 0
    candidates_pruned: int = 0
    points_checked: int = 0

    def to_json(self) -> dict:
        out = {
            "found": self.found,
            "framesEnumerated": self.frames_enumerated,
            "candidatesPruned": self.candidates_pruned,
            "pointsChecked": self.points_checked,
        }
        if self.witness is not None:
            w = dict(self.witness)
            for key in ("frame", "model"):
                w.pop(key, None)
            out["witness"] = w
        return out


# ---------------------------------------------------------------------------
# Enumeration.


def _relations(n: int, policy: str) -> Iterator[tuple[int, ...]]:
    options = []
    for w in range(n):
        masks = []
        for mask in range(1 << n):
            if policy == "reflexive-only" and not mask & (1 << w):
                continue
            masks.append(mask)
        options.append(masks)
    yield from itertools.product(*options)


def _table_rows(
    n: int, w: int, r_mask: int, constrained: bool, success_only: bool
) -> Iterator[tuple[int, ...]]:
    """All selection rows f(., w): a value for every subset mask."""
    per_subset = []
    for p in range(1 << n):
        if constrained:
            if p == 0:
                choices: tuple[int, ...] = (0,)
            elif p & (1 << w):
                choices = ((1 << w),) if r_mask & (1 << w) else ()
            else:
                choices = (0,) + tuple(1 << v for v in _bits(p & r_mask))
            per_subset.append(choices)
        elif success_only:
            per_subset.append(_submasks(p & r_mask))
        else:
            per_subset.append(_submasks(r_mask))
    yield from itertools.product(*per_subset)


def _submasks(mask: int) -> tuple[int, ...]:
    subs = [0]
    for b in _bits(mask):
        subs.extend(s | (1 << b) for s in list(subs))
    return tuple(subs)


def _apply_world_perm(
    n: int, perm: Sequence[int], r: Sequence[int], rows: Sequence[Sequence[int]]
) -> tuple[list[int], list[list[int]]]:
    """perm maps old world index -> new index."""
    def pmask(mask: int) -> int:
        out = 0
        for b in _bits(mask):
            out |= 1 << perm[b]
        return out

    new_r = [0] * n
    new_rows = [[0] * (1 << n) for _ in range(n)]
    for w in range(n):
        new_r[perm[w]] = pmask(r[w])
    for w in range(n):
        for p in range(1 << n):
            new_rows[perm[w]][pmask(p)] = pmask(rows[w][p])
    return new_r, new_rows


def _apply_domain_perm(nd: int, perm: Sequence[int], local: Sequence[int]) -> list[int]:
    out = []
    for mask in local:
        m = 0
        for b in _bits(mask):
            m |= 1 << perm[b]
        out.append(m)
    return out


def _table_automorphisms(
    n: int, r: Sequence[int], rows: Sequence[Sequence[int]]
) -> Optional[list[tuple[int, ...]]]:
    """World permutations fixing (R, table); None when a smaller image
    exists (the table is not canonical)."""
    base = (tuple(r), tuple(tuple(row) for row in rows))
    auts = []
    for wperm in itertools.permutations(range(n)):
        new_r, new_rows = _apply_world_perm(n, wperm, r, rows)
        cand = (tuple(new_r), tuple(tuple(row) for row in new_rows))
        if cand < base:
            return None
        if cand == base:
            auts.append(wperm)
    return auts


def _local_canonical(
    n: int,
    nd: int,
    local: Sequence[int],
    auts: Sequence[tuple[int, ...]],
    dperms: Sequence[tuple[int, ...]],
) -> bool:
    base = tuple(local)
    for wperm in auts:
        permuted = [0] * n
        for w in range(n):
            permuted[wperm[w]] = local[w]
        for dperm in dperms:
            if tuple(_apply_domain_perm(nd, dperm, permuted)) < base:
                return False
    return True


def enumerate_frames(params: EnumerationParams) -> Iterator[SelectionFrame]:
    """Yield every selection frame up to relabeling that satisfies the
    required properties, for all world/domain counts within the bounds.

    Under Success, WeakCentering, and Uniqueness the table generation is
    constrained (w in P forces f(P,w) = {w}; otherwise singletons of
    P & R(w) or empty); remaining properties are post-filtered.  Frames are
    deduplicated canonically: tables must be lexicographically minimal
    under world permutation, local domains minimal under the table's
    automorphisms and domain permutation.
    """
    if params.max_worlds > params.hard_world_limit:
        raise ResourceGuard(
            f"enumeration ceiling is |W| <= {params.hard_world_limit}"
        )
    conditions = params.conditions()
    constrained = {"Success", "WeakCentering", "Uniqueness"} <= conditions
    success_only = not constrained and "Success" in conditions
    post = [c for c in conditions if c != "GloballyConstant"]
    for n in range(1, params.max_worlds + 1):
        for nd in range(1, params.max_domain + 1):
            if "GloballyConstant" in conditions:
                local_list = [((1 << nd) - 1,) * n]
            else:
                local_list = list(itertools.product(range(1 << nd), repeat=n))
            dperms = list(itertools.permutations(range(nd)))
            for r in _relations(n, params.policy):
                if constrained and any(not r[w] & (1 << w) for w in range(n)):
                    continue  # weak centering forces reflexivity
                for rows in itertools.product(
                    *(
                        _table_rows(n, w, r[w], constrained, success_only)
                        for w in range(n)
                    )
                ):
                    auts = _table_automorphisms(n, r, rows)
                    if auts is None:
                        continue
                    table = tuple(tuple(row) for row in rows)
                    if post:
                        probe = SelectionFrame(n, tuple(r), table, 1, ((1,) * n))
                        report = check_selection_props(probe)
                        if not all(report.verdicts.get(c, False) for c in post):
                            continue
                    for local in local_list:
                        if _local_canonical(n, nd, local, auts, dperms):
                            yield SelectionFrame(
                                n, tuple(r), table, nd, tuple(local)
                            )


# ---------------------------------------------------------------------------
# The descending-sequence sweep.


def _f_masks(interp_bits: Sequence[int], nd: int, n: int) -> list[int]:
    """Per domain element, the mask of worlds where F holds of it."""
    masks = [0] * nd
    for w in range(n):
        bits = interp_bits[w]
        for a in range(nd):
            if bits & (1 << a):
                masks[a] |= 1 << w
    return masks


def _ds_holds_fast(frame: SelectionFrame, masks: Sequence[int], w: int) -> bool:
    """Hand-compiled truth of the descending-sequence formula at w.

    Conjuncts: the local domain is nonempty; every element's F-extension
    selects something; every element has a partner whose disjunction
    selects only non-F(a) worlds.  Cross-validated against the generic
    evaluator in the tests.
    """
    local = frame.local[w]
    if not local:
        return False
    row = frame.table[w]
    for a in _bits(local):
        if not row[masks[a]]:
            return False
    for a in _bits(local):
        ma = masks[a]
        if not any(row[ma | masks[b]] & ma == 0 for b in _bits(local)):
            return False
    return True


def ds_model(frame: SelectionFrame, interp_bits: Sequence[int]) -> Model:
    nd = frame.n_domain
    interp = {
        F: {
            w: frozenset((a,) for a in range(nd) if interp_bits[w] & (1 << a))
            for w in range(frame.n_worlds)
        }
    }
    return Model(frame, interp)


def ds_sweep(params: EnumerationParams) -> SearchOutcome:
    """Search for a pointed model of the descending-sequence formula over
    the enumerated frames and every interpretation of F.

    Over weakly Stalnakerian frames no satisfying point should exist; the
    control runs drop conditions to confirm the sweep can find one."""
    outcome = SearchOutcome(found=False)
    ds = build_ds()
    for frame in enumerate_frames(params):
        outcome.frames_enumerated += 1
        n, nd = frame.n_worlds, frame.n_domain
        for interp_bits in itertools.product(range(1 << nd), repeat=n):
            masks = _f_masks(interp_bits, nd, n)
            for w in range(n):
                outcome.points_checked += 1
                if _ds_holds_fast(frame, masks, w):
                    model = ds_model(frame, interp_bits)
                    assert evaluate(model, w, {}, ds), "fast path disagrees"
                    outcome.found = True
                    outcome.witness = {
                        "frame": frame,
                        "model": model,
                        "world": frame.world_names[w],
                        "interpretation": {
                            frame.world_names[i]: sorted(
                                frame.domain_names[a] for a in _bits(interp_bits[i])
                            )
                            for i in range(n)
                        },
                    }
                    return outcome
    return outcome


def correspondence_sweep(params: EnumerationParams) -> dict:
    """Run the instance-family correspondence check over every enumerated
    frame; the two verdicts should agree on all of them."""
    from .frameprops import qc2_correspondence_check

    checked = 0
    disagreements = []
    for frame in enumerate_frames(params):
        checked += 1
        res = qc2_correspondence_check(
            frame, max_worlds=params.max_worlds, max_domain=params.max_domain
        )
        if not res.agree:
            disagreements.append(
                {
                    "frame": {
                        "r": list(frame.r),
                        "table": [list(row) for row in frame.table],
                        "local": list(frame.local),
                    },
                    "result": res.to_json(),
                }
            )
    return {
        "framesChecked": checked,
        "agreeEverywhere": not disagreements,
        "disagreements": disagreements[:10],
    }


# ---------------------------------------------------------------------------
# Compactness-failure witnesses.


def compactness_prefix(n: int) -> list[Formula]:
    """{dia A_i : i < n} plus {(A_i | A_i+1) > ~A_i : i < n-1} over
    nullary predicates."""
    atoms = [Atom(Predicate(i, 0)) for i in range(n)]
    family: list[Formula] = [Dia(a) for a in atoms]
    family.extend(
        Cond(Or(atoms[i], atoms[i + 1]), Not(atoms[i])) for i in range(n - 1)
    )
    return family


def compactness_witness(n: int) -> SearchOutcome:
    """Find a Stalnakerian pointed model of the n-prefix of the
    compactness-failure family, searching up to n+1 worlds.

    Any pointed model can be shrunk to one where the evaluation world sees
    every world in a linear order and other worlds see only themselves
    (worlds outside R(w0) are irrelevant to truth at w0, and closing the
    others off keeps the frame Stalnakerian), so the search walks linear
    orders with per-world label sets, pruning a branch as soon as a family
    member's first triggered world settles it.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    outcome = SearchOutcome(found=False)
    family = compactness_prefix(n)

    for m in range(1, n + 2):
        hit = _compactness_search(n, m, outcome)
        if hit is not None:
            model, w0 = hit
            res = all(evaluate(model, w0, {}, f) for f in family)
            assert res, "witness failed replay"
            outcome.found = True
            outcome.witness = {
                "model": model,
                "world": model.frame.world_names[w0],
                "labels": _describe_labels(model, n),
            }
            return outcome
    return outcome


def _describe_labels(model: Model, n: int) -> dict[str, list[str]]:
    out = {}
    for w in range(model.frame.n_worlds):
        out[model.frame.world_names[w]] = sorted(
            str(Predicate(i, 0)) for i in range(n) if model.holds(Predicate(i, 0), w, ())
        )
    return out


def _compactness_search(n: int, m: int, outcome: SearchOutcome):
    """Assign label sets to worlds 0..m-1 (world 0 the evaluation point,
    ordered 0 < 1 < ... in the similarity order at 0)."""

    def check_conditionals(labels: list[int]) -> bool:
        # (A_i | A_i+1) > ~A_i: the closest world carrying either label
        # must carry A_i+1 and not A_i
        for i in range(n - 1):
            first = next((lab for lab in labels if lab & (0b11 << i)), None)
            if first is not None and first & (1 << i):
                return False
        return True

    def dfs(labels: list[int]) -> Optional[list[int]]:
        outcome.points_checked += 1
        if not check_conditionals(labels):
            outcome.candidates_pruned += 1
            return None
        if len(labels) == m:
            seen = 0
            for lab in labels:
                seen |= lab
            if seen == (1 << n) - 1:
                return labels
            return None
        for lab in range(1 << n):
            got = dfs(labels + [lab])
            if got is not None:
                return got
        return None

    got = None
    for first in range(1 << n):
        got = dfs([first])
        if got is not None:
            break
    if got is None:
        return None
    labels = got
    frame = _chain_selection_frame(m)
    interp: dict[Predicate, dict[int, frozenset]] = {}
    for i in range(n):
        pred = Predicate(i, 0)
        interp[pred] = {
            w: frozenset([()]) if labels[w] & (1 << i) else frozenset()
            for w in range(m)
        }
    return Model(frame, interp), 0


def _chain_selection_frame(m: int) -> SelectionFrame:
    """World 0 sees everything ordered 0 < 1 < ... < m-1; the others see
    only themselves.  The induced table is Stalnakerian."""
    entries = {}
    full = (1 << m) - 1
    r = [1 << w for w in range(m)]
    r[0] = full
    for p in range(1 << m):
        if p:
            entries[(p, 0)] = 1 << next(_bits(p))
        else:
            entries[(p, 0)] = 0
    return SelectionFrame.build(
        m, r, entries, "centering", n_domain=1, world_names=tuple(str(w) for w in range(m))
    )
