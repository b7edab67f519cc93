import math
import random

import pytest

from adderbdd.circuits import (
    Circuit, Gate, GateKind, MalformedCircuitError, NetlistSyntaxError,
    adder_inputs, brent_kung_schedule, depth, evaluate, gate_count, gen_adder,
    gen_cla, gen_cosa, gen_full_adder, gen_half_adder, gen_rca, mutate,
    parse_netlist, serialize_netlist, topo_order,
)
from conftest import adder_mismatches

ARCHS = ["rca", "cosa", "cla"]

FA_NETLIST = """\
# hand-written full adder over the adder naming contract
.inputs cin a0 b0
.outputs s0 cout
s0 = XOR2(t, cin)      # sum
t = XOR2(a0, b0)
cout = OR2(g, u)
g = AND2(a0, b0)
u = AND2(t, cin)
"""


def test_half_adder_table():
    ha = gen_half_adder()
    assert gate_count(ha) == 2 and depth(ha) == 1
    rows = [evaluate(ha, {"a": a, "b": b}) for a in (0, 1) for b in (0, 1)]
    assert [(r["carry"], r["sum"]) for r in rows] == [(0, 0), (0, 1), (0, 1), (1, 0)]


def test_full_adder():
    fa = gen_full_adder()
    assert gate_count(fa) == 5
    assert evaluate(fa, {"a": 1, "b": 0, "c": 1}) == {"sum": 0, "carry": 1}
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                r = evaluate(fa, {"a": a, "b": b, "c": c})
                assert 2 * r["carry"] + r["sum"] == a + b + c


@pytest.mark.parametrize("arch", ARCHS)
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8])
def test_exhaustive_equivalence(arch, n):
    assert adder_mismatches(gen_adder(arch, n), n) == 0


@pytest.mark.parametrize("arch", ARCHS)
def test_interface_contract(arch):
    for n in (1, 5, 16):
        c = gen_adder(arch, n)
        c.validate()
        assert len(c.inputs) == 2 * n + 1
        assert c.output_names == [f"s{i}" for i in range(n)] + ["cout"]
        assert c.input_names[0] == "cin"


@pytest.mark.parametrize("gen", [gen_rca, gen_cosa, gen_cla])
def test_zero_width_rejected(gen):
    with pytest.raises(ValueError):
        gen(0)


def test_rca_structure():
    for n in (1, 4, 8, 33):
        assert gate_count(gen_rca(n)) == 5 * n
    rca1 = gen_rca(1)
    fa = gen_full_adder()
    assert [g.kind for g in rca1.gates] == [g.kind for g in fa.gates]
    # delay is linear: doubling the width doubles the depth (2 gates per FA)
    for k in (4, 8, 16):
        assert depth(gen_rca(2 * k)) - depth(gen_rca(k)) == 2 * k
        assert abs(depth(gen_rca(2 * k)) - 2 * depth(gen_rca(k))) <= 3


def test_cosa_structure():
    assert [g.kind for g in gen_cosa(1).gates] == [g.kind for g in gen_rca(1).gates]
    c8 = gen_cosa(8)
    assert depth(c8) <= depth(gen_rca(8))
    assert gate_count(c8) == 105
    assert gate_count(c8) <= 4.5 * 8 * 3
    counts = [gate_count(gen_cosa(n)) for n in (8, 16, 32, 64, 128, 256)]
    # O(n log n): per-(n log n) ratio does not grow
    ratios = [c / (n * math.log2(n)) for c, n in zip(counts, (8, 16, 32, 64, 128, 256))]
    assert ratios == sorted(ratios, reverse=True)
    for n in (8, 16, 32, 64, 128, 256):
        assert depth(gen_cosa(n)) <= 2 * math.log2(n)


def test_cosa_mux_per_upper_bit():
    c = gen_cosa(2)
    muxes = [g for g in c.gates if g.kind is GateKind.MUX]
    assert len(muxes) == 2   # s1 and cout
    consts = [g for g in c.gates if g.kind in (GateKind.CONST0, GateKind.CONST1)]
    assert len(consts) == 2


def test_cla_structure():
    for n in (8, 16, 32, 64):
        c = gen_cla(n)
        assert gate_count(c) <= 11 * n
        assert depth(c) <= 4 * math.log2(n)
    # n=1: c0 = g00 + p00.cin is the FA carry
    c1 = gen_cla(1)
    for x in range(8):
        a, b, cin = x & 1, x >> 1 & 1, x >> 2
        assert evaluate(c1, adder_inputs(1, a, b, cin))["cout"] == int(a + b + cin >= 2)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13, 16, 31, 64])
def test_brent_kung_schedule_covers_prefixes(n):
    lo = list(range(n))
    ops = 0
    for level in brent_kung_schedule(n):
        snap = list(lo)
        written = [j for j, _ in level]
        assert len(written) == len(set(written))
        for j, k in level:
            assert k == snap[j] - 1
            lo[j] = snap[k]
            ops += 1
    assert lo == [0] * n
    assert ops <= 2 * n
    assert len(brent_kung_schedule(n)) <= 2 * max(1, math.ceil(math.log2(n)))


def test_tags_present():
    rca = gen_rca(4)
    assert sorted(t for t in rca.tags.values() if t.startswith("carry")) == \
        [f"carry:{i}" for i in range(4)]
    cla = gen_cla(8)
    tags = set(cla.tags.values())
    assert "p:7:0" in tags and "g:7:0" in tags and "sum:7" in tags
    cosa = gen_cosa(8)
    tags = set(cosa.tags.values())
    assert {f"sum:{i}" for i in range(8)} <= tags
    assert "carry:7" in tags and "carry:3" in tags


@pytest.mark.parametrize("arch", ARCHS)
def test_topo_order_reads_only_driven_nets(arch):
    c = gen_adder(arch, 9)
    driven = set(c.inputs)
    for k in topo_order(c):
        g = c.gates[k]
        assert all(i in driven for i in g.inputs)
        driven.add(g.output)


def test_cycle_detected():
    c = Circuit("loop", ["a", "x", "y"], [0],
                [Gate(GateKind.AND2, (0, 2), 1), Gate(GateKind.OR2, (0, 1), 2)],
                [2])
    with pytest.raises(MalformedCircuitError, match="cycle"):
        topo_order(c)
    with pytest.raises(MalformedCircuitError):
        c.validate()


@pytest.mark.parametrize("arch", ARCHS)
def test_netlist_round_trip(arch):
    c = gen_adder(arch, 4)
    back = parse_netlist(serialize_netlist(c))
    assert back.structurally_equal(c)


def test_hand_written_fa_netlist():
    c = parse_netlist(FA_NETLIST)
    assert gate_count(c) == 5
    assert adder_mismatches(c, 1) == 0


@pytest.mark.parametrize("text, msg", [
    (".inputs a\n.outputs x\nx = AND(a)\n", "unknown gate kind"),
    (".inputs a\n.outputs x\nx = AND2(a)\n", "takes 2 inputs"),
    (".inputs a b\n.outputs x\nx = AND2(a, c)\n", "never driven"),
    (".inputs a b\n.outputs x\nx = AND2(a, b)\nx = OR2(a, b)\n", "more than one driver"),
    (".inputs a b\n.outputs x\nx = AND2(a, y)\ny = OR2(x, b)\n", "cycle"),
    (".inputs a\n.outputs x\nx = NOT a\n", "cannot parse"),
    (".inputs a\n.outputs z\nx = NOT(a)\n", "output 'z'"),
    (".outputs x\nx = CONST1()\n", "missing .inputs"),
])
def test_netlist_errors(text, msg):
    with pytest.raises(MalformedCircuitError, match=msg):
        parse_netlist(text)


def test_syntax_error_names_line():
    with pytest.raises(NetlistSyntaxError) as e:
        parse_netlist(".inputs a\n.outputs x\n\nx = AND2(a)\n")
    assert e.value.lineno == 4
    assert "line 4" in str(e.value)


def test_mutate_changes_one_gate():
    c = gen_rca(4)
    for seed in range(20):
        mc, desc = mutate(c, seed)
        diff = [k for k, (g, h) in enumerate(zip(c.gates, mc.gates)) if g != h]
        assert len(diff) == 1
        assert mc.net_names == c.net_names
    assert mutate(c, 3)[1] == mutate(c, 3)[1]


def test_evaluate_integers_match_random_additions():
    rng = random.Random(5)
    for arch in ARCHS:
        c = gen_adder(arch, 40)
        for _ in range(30):
            a, b, cin = rng.getrandbits(40), rng.getrandbits(40), rng.getrandbits(1)
            out = evaluate(c, adder_inputs(40, a, b, cin))
            got = sum(out[f"s{i}"] << i for i in range(40)) + (out["cout"] << 40)
            assert got == a + b + cin
