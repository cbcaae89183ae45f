import itertools
import random

import pytest

from condlog.frameprops import check_selection_props
from condlog.search import (
    EnumerationParams,
    compactness_prefix,
    compactness_witness,
    ds_sweep,
    enumerate_frames,
    _ds_holds_fast,
    _f_masks,
    ds_model,
)
from condlog.semantics import Model, SelectionFrame, evaluate
from condlog.syntax import build_ds

from test_semantics import remark25_frame


def test_enumerate_includes_remark25_frame():
    params = EnumerationParams(
        max_worlds=2,
        max_domain=1,
        required_properties=frozenset({"weaklyStalnakerian"}),
        policy="reflexive-only",
    )
    target = remark25_frame()
    found = False
    for frame in enumerate_frames(params):
        if frame.n_worlds != 2 or frame.n_domain != 1:
            continue
        if frame.r == (0b11, 0b11) and frame.table == target.table:
            if frame.local == target.local:
                found = True
    assert found


def test_enumerate_single_world_stalnakerian():
    params = EnumerationParams(
        max_worlds=1,
        max_domain=1,
        required_properties=frozenset({"Stalnakerian", "GloballyConstant"}),
    )
    frames = list(enumerate_frames(params))
    assert len(frames) == 1
    frame = frames[0]
    assert frame.table[0] == (0, 1)  # f(empty) empty, f({w}) = {w}


def test_enumerated_frames_satisfy_required_properties():
    params = EnumerationParams(
        max_worlds=2,
        max_domain=2,
        required_properties=frozenset({"weaklyStalnakerian"}),
    )
    count = 0
    for frame in enumerate_frames(params):
        count += 1
        rep = check_selection_props(frame)
        assert rep.weakly_stalnakerian
    assert count > 0


def test_enumeration_completeness_against_brute_force():
    """At two worlds, one domain element, reflexive R: the canonical count
    must match an unpruned brute-force enumeration deduplicated by
    permutation images."""
    params = EnumerationParams(
        max_worlds=2,
        max_domain=1,
        required_properties=frozenset({"weaklyStalnakerian"}),
        policy="reflexive-only",
    )
    fast = [f for f in enumerate_frames(params) if f.n_worlds == 2]

    seen = set()
    count = 0
    n = 2
    for r in itertools.product([0b01, 0b11], [0b10, 0b11]):
        row_options = []
        for w in range(n):
            opts = []
            for row in itertools.product(*(_submasks_of(r[w]) for _ in range(4))):
                opts.append(row)
            row_options.append(opts)
        for rows in itertools.product(*row_options):
            for local in itertools.product([0, 1], repeat=2):
                try:
                    frame = SelectionFrame(n, r, rows, 1, local)
                except Exception:
                    continue
                rep = check_selection_props(frame)
                if not rep.weakly_stalnakerian:
                    continue
                key = min(_images(n, r, rows, local))
                if key in seen:
                    continue
                seen.add(key)
                count += 1
    assert len(fast) == count


def _submasks_of(mask):
    subs = [0]
    b = 0
    m = mask
    while m:
        if m & 1:
            subs.extend(s | (1 << b) for s in list(subs))
        m >>= 1
        b += 1
    return subs


def _images(n, r, rows, local):
    out = []
    for perm in itertools.permutations(range(n)):
        def pmask(mask):
            x = 0
            for b in range(n):
                if mask & (1 << b):
                    x |= 1 << perm[b]
            return x

        new_r = [0] * n
        new_rows = [[0] * (1 << n) for _ in range(n)]
        new_local = [0] * n
        for w in range(n):
            new_r[perm[w]] = pmask(r[w])
            new_local[perm[w]] = local[w]
            for p in range(1 << n):
                new_rows[perm[w]][pmask(p)] = pmask(rows[w][p])
        out.append(
            (tuple(new_r), tuple(tuple(row) for row in new_rows), tuple(new_local))
        )
    return out


def test_ds_fast_check_matches_generic_eval():
    rng = random.Random(7)
    ds = build_ds()
    params = EnumerationParams(max_worlds=2, max_domain=2)
    frames = []
    for frame in enumerate_frames(params):
        if rng.random() < 0.01:
            frames.append(frame)
        if len(frames) >= 40:
            break
    assert frames
    for frame in frames:
        n, nd = frame.n_worlds, frame.n_domain
        for _ in range(4):
            interp_bits = tuple(rng.randrange(1 << nd) for _ in range(n))
            masks = _f_masks(interp_bits, nd, n)
            model = ds_model(frame, interp_bits)
            for w in range(n):
                assert _ds_holds_fast(frame, masks, w) == evaluate(
                    model, w, {}, ds
                ), (frame, interp_bits, w)


def test_ds_sweep_weakly_stalnakerian_two_worlds_finds_nothing():
    params = EnumerationParams(
        max_worlds=2,
        max_domain=2,
        required_properties=frozenset({"weaklyStalnakerian"}),
    )
    outcome = ds_sweep(params)
    assert not outcome.found
    assert outcome.frames_enumerated > 0


def test_ds_sweep_control_finds_witness():
    """Dropping Uniformity (and the centering that forces minima) lets the
    sweep find a pointed model, confirming it is not vacuous."""
    params = EnumerationParams(
        max_worlds=2,
        max_domain=2,
        required_properties=frozenset({"Success", "Uniqueness"}),
    )
    outcome = ds_sweep(params)
    assert outcome.found
    model = outcome.witness["model"]
    w = next(
        i
        for i, name in enumerate(model.frame.world_names)
        if name == outcome.witness["world"]
    )
    assert evaluate(model, w, {}, build_ds())
    rep = check_selection_props(model.frame)
    assert not rep.verdicts["Uniformity"]


def test_compactness_witness_small():
    for n in (1, 2):
        outcome = compactness_witness(n)
        assert outcome.found
        model = outcome.witness["model"]
        assert model.frame.n_worlds <= n + 1
        family = compactness_prefix(n)
        w = 0
        for phi in family:
            assert evaluate(model, w, {}, phi)
        rep = check_selection_props(model.frame)
        assert rep.stalnakerian


def test_compactness_witness_replays_up_to_five():
    for n in range(1, 6):
        outcome = compactness_witness(n)
        assert outcome.found, n
        model = outcome.witness["model"]
        for phi in compactness_prefix(n):
            assert evaluate(model, 0, {}, phi)
