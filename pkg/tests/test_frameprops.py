import pytest

from condlog.frameprops import (
    check_domain_props,
    check_ordering_props,
    check_selection_props,
    qc2_correspondence_check,
    replay_witness,
)
from condlog.semantics import OrderingFrame, SelectionFrame

from test_semantics import chain_order, remark25_frame, single_world_frame


def test_remark25_weakly_but_not_stalnakerian():
    rep = check_selection_props(remark25_frame())
    assert rep.weakly_stalnakerian
    assert not rep.stalnakerian
    assert not rep.verdicts["LA"]
    # the witness is P = {2}, w = 1
    assert rep.witnesses["LA"] == (0b10, 0)


def test_single_world_centering_table_fully_stalnakerian():
    rep = check_selection_props(single_world_frame())
    for name in ("Success", "WeakCentering", "LA", "Uniformity", "Uniqueness"):
        assert rep.verdicts[name]
    assert rep.stalnakerian


def test_uniformity_and_uniqueness_imply_wla():
    # spot check on a small zoo of frames, including ones failing each side
    frames = [
        remark25_frame(),
        single_world_frame(),
        SelectionFrame.build(2, (0b11, 0b11), {}, "empty", 1),
        SelectionFrame.build(
            2, (0b11, 0b11), {(0b11, 0): 0b11}, "centering", 1
        ),
        SelectionFrame.build(
            2, (0b11, 0b11), {(0b10, 0): 0b10, (0b11, 0): 0b01}, "centering", 1
        ),
    ]
    for frame in frames:
        rep = check_selection_props(frame)
        if rep.verdicts["Uniformity"] and rep.verdicts["Uniqueness"]:
            assert rep.verdicts["WLA"], frame
        if rep.verdicts["LA"]:
            assert rep.verdicts["WLA"], frame


def test_witness_replay():
    frame = remark25_frame()
    rep = check_selection_props(frame)
    for cond, wit in rep.witnesses.items():
        assert replay_witness(frame, cond, wit), cond


def test_ordering_props_k_restriction():
    """The three-world restriction of the infinite model's order is a finite
    linear order, hence Lewisian and Stalnakerian."""
    frame = chain_order(3)
    rep = check_ordering_props(frame)
    assert rep.lewisian
    assert rep.stalnakerian
    assert rep.verdicts["SLA"]


def test_ordering_missing_reflexive_pair():
    pairs = {0: [(0, 1), (1, 1)], 1: [(1, 1)]}
    frame = OrderingFrame.build(2, (0b11, 0b10), pairs, 1)
    rep = check_ordering_props(frame)
    assert not rep.verdicts["StronglyConnected"] or not rep.verdicts["WeakCentering"]
    for cond, wit in rep.witnesses.items():
        assert replay_witness(frame, cond, wit), cond


def test_finite_linear_orders_satisfy_sla_two_cycle_does_not():
    # antisymmetric + transitive + finite forces SLA; a 2-cycle breaks it
    good = chain_order(3)
    assert check_ordering_props(good).verdicts["SLA"]
    pairs = {
        0: [(0, 0), (0, 1), (0, 2), (1, 1), (2, 2), (1, 2), (2, 1)],
        1: [(1, 1)],
        2: [(2, 2)],
    }
    cyc = OrderingFrame.build(3, (0b111, 0b010, 0b100), pairs, 1)
    rep = check_ordering_props(cyc)
    assert not rep.verdicts["SLA"]
    # conditions 1-5 hold here, so SLA is not implied by them alone
    assert rep.lewisian


def test_domain_props():
    rep = check_domain_props(remark25_frame())
    assert rep.verdicts["GloballyConstant"]

    grown = SelectionFrame.build(
        2, (0b01, 0b10), {}, "centering", 2, local=(0b01, 0b11),
    )
    # add accessibility w -> v to see growth
    grown = SelectionFrame.build(
        2, (0b11, 0b10), {}, "centering", 2, local=(0b01, 0b11),
    )
    rep = check_domain_props(grown)
    assert rep.verdicts["LocallyNonDecreasing"]
    assert not rep.verdicts["LocallyNonIncreasing"]
    assert not rep.verdicts["GloballyConstant"]

    impossibilia = SelectionFrame.build(
        2, (0b11, 0b11), {}, "centering", 2, local=(0b01, 0b01),
    )
    rep = check_domain_props(impossibilia)
    assert rep.verdicts["LocallyConstant"]
    assert not rep.verdicts["GloballyConstant"]


def test_correspondence_remark25():
    res = qc2_correspondence_check(remark25_frame())
    assert res.instance_valid
    assert res.properties_hold
    assert res.agree


def test_correspondence_two_element_selection():
    # a table selecting two worlds fails Uniqueness and the excluded-middle
    # instance together
    frame = SelectionFrame.build(
        2, (0b11, 0b11), {(0b11, 0): 0b11}, "centering", 1
    )
    rep = check_selection_props(frame)
    assert not rep.verdicts["Uniqueness"]
    res = qc2_correspondence_check(frame)
    assert not res.instance_valid
    assert not res.properties_hold
    assert res.agree
