"""Gate-level combinational netlists and adder generators.

A :class:`Circuit` is a flat list of gates over integer net ids.  Nets are
driven either by a primary input or by exactly one gate.  Generators also
attach semantic tags to nets whose function is known by construction:

    ``sum:i``    the i-th sum bit of the whole adder
    ``carry:i``  the carry out of bit i
    ``p:j:i``    propagate over bits i..j
    ``g:j:i``    generate over bits i..j

The verifier checks tagged nets against closed-form BDD size bounds.
"""
import enum
import random
import re
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter


class GateKind(enum.Enum):
    AND2 = "AND2"
    OR2 = "OR2"
    XOR2 = "XOR2"
    NOT = "NOT"
    MUX = "MUX"  # MUX(sel, t, e) = sel ? t : e
    CONST0 = "CONST0"
    CONST1 = "CONST1"

    @property
    def arity(self):
        return _ARITY[self]


_ARITY = {
    GateKind.AND2: 2, GateKind.OR2: 2, GateKind.XOR2: 2, GateKind.NOT: 1,
    GateKind.MUX: 3, GateKind.CONST0: 0, GateKind.CONST1: 0,
}


class MalformedCircuitError(ValueError):
    """Structural problem in a circuit: cycle, undriven net, ..."""


class NetlistSyntaxError(MalformedCircuitError):
    def __init__(self, lineno, msg):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    inputs: tuple
    output: int


@dataclass
class Circuit:
    name: str
    net_names: list
    inputs: list
    gates: list
    outputs: list
    tags: dict = field(default_factory=dict)

    @property
    def input_names(self):
        return [self.net_names[i] for i in self.inputs]

    @property
    def output_names(self):
        return [self.net_names[o] for o in self.outputs]

    def net(self, name):
        return self.net_names.index(name)

    def structurally_equal(self, other):
        """Same names, inputs, outputs and gates (tags and title ignored)."""
        return (self.net_names == other.net_names
                and self.inputs == other.inputs
                and self.outputs == other.outputs
                and self.gates == other.gates)

    def validate(self):
        """Raise MalformedCircuitError unless every net has one driver,
        every gate input is driven and the gates are acyclic."""
        drivers = {}
        for i in self.inputs:
            if i in drivers:
                raise MalformedCircuitError(
                    f"input {self.net_names[i]!r} declared twice")
            drivers[i] = "input"
        for k, g in enumerate(self.gates):
            if len(g.inputs) != g.kind.arity:
                raise MalformedCircuitError(
                    f"gate {k} ({g.kind.name}) has {len(g.inputs)} inputs, "
                    f"expected {g.kind.arity}")
            if g.output in drivers:
                raise MalformedCircuitError(
                    f"net {self.net_names[g.output]!r} has more than one driver")
            drivers[g.output] = k
        for g in self.gates:
            for i in g.inputs:
                if i not in drivers:
                    raise MalformedCircuitError(
                        f"net {self.net_names[i]!r} is never driven")
        for o in self.outputs:
            if o not in drivers:
                raise MalformedCircuitError(
                    f"output {self.net_names[o]!r} is never driven")
        topo_order(self)


class CircuitBuilder:
    """Incremental construction of a :class:`Circuit` in topological order."""

    def __init__(self, name):
        self.name = name
        self.net_names = []
        self.inputs = []
        self.gates = []
        self.outputs = []
        self.tags = {}
        self._consts = {}

    def _new_net(self, name=None):
        nid = len(self.net_names)
        self.net_names.append(name if name is not None else f"n{nid}")
        return nid

    def input(self, name):
        nid = self._new_net(name)
        self.inputs.append(nid)
        return nid

    def gate(self, kind, *ins, tag=None):
        out = self._new_net()
        self.gates.append(Gate(kind, tuple(ins), out))
        if tag is not None:
            self.tags[out] = tag
        return out

    def const(self, value):
        """Shared CONST0/CONST1 net."""
        if value not in self._consts:
            kind = GateKind.CONST1 if value else GateKind.CONST0
            self._consts[value] = self.gate(kind)
        return self._consts[value]

    def tag(self, net, tag):
        self.tags.setdefault(net, tag)

    def output(self, net, name):
        self.net_names[net] = name
        self.outputs.append(net)

    def build(self):
        return Circuit(self.name, list(self.net_names), list(self.inputs),
                       list(self.gates), list(self.outputs), dict(self.tags))


def _adder_builder(name, n):
    if n < 1:
        raise ValueError(f"adder width must be >= 1, got {n}")
    b = CircuitBuilder(name)
    cin = b.input("cin")
    a, bb = [], []
    for i in range(n):
        a.append(b.input(f"a{i}"))
        bb.append(b.input(f"b{i}"))
    return b, cin, a, bb


def _full_adder(b, x, y, c, bit=None, carry_tag=None):
    """sum = XOR(XOR(x,y),c); carry = OR(AND(x,y), AND(XOR(x,y),c))."""
    p = b.gate(GateKind.XOR2, x, y,
               tag=None if bit is None else f"p:{bit}:{bit}")
    s = b.gate(GateKind.XOR2, p, c)
    g = b.gate(GateKind.AND2, x, y,
               tag=None if bit is None else f"g:{bit}:{bit}")
    t = b.gate(GateKind.AND2, p, c)
    co = b.gate(GateKind.OR2, g, t, tag=carry_tag)
    return s, co


def gen_half_adder():
    b = CircuitBuilder("ha")
    x, y = b.input("a"), b.input("b")
    carry = b.gate(GateKind.AND2, x, y)
    s = b.gate(GateKind.XOR2, x, y)
    b.output(s, "sum")
    b.output(carry, "carry")
    return b.build()


def gen_full_adder():
    b = CircuitBuilder("fa")
    x, y, c = b.input("a"), b.input("b"), b.input("c")
    s, co = _full_adder(b, x, y, c)
    b.output(s, "sum")
    b.output(co, "carry")
    return b.build()


def gen_rca(n):
    """Ripple-carry adder: n full adders chained through their carries."""
    b, cin, a, bb = _adder_builder(f"rca{n}", n)
    carry = cin
    sums = []
    for i in range(n):
        s, carry = _full_adder(b, a[i], bb[i], carry, bit=i,
                               carry_tag=f"carry:{i}")
        b.tag(s, f"sum:{i}")
        sums.append(s)
    for i, s in enumerate(sums):
        b.output(s, f"s{i}")
    b.output(carry, "cout")
    return b.build()


def gen_cosa(n):
    """Conditional-sum adder.

    The lower ceil(n/2) bits use a conditional-sum adder on the real carry;
    the upper half is computed twice, with carry-in tied to 0 and to 1, and
    a MUX stage driven by the lower carry-out picks the right copy.  Blocks
    over the same bit range with the same constant carry-in are built once
    and shared, which keeps the gate count at O(n log n).
    """
    b, cin, a, bb = _adder_builder(f"cosa{n}", n)
    memo = {}

    def block(lo, hi, c):
        key = (lo, hi, c)
        if key in memo:
            return memo[key]
        real = c == cin and lo == 0
        if hi - lo == 1:
            s, co = _full_adder(b, a[lo], bb[lo], c, bit=lo)
            sums = [s]
        else:
            mid = lo + (hi - lo + 1) // 2
            low_s, low_c = block(lo, mid, c)
            up0_s, up0_c = block(mid, hi, b.const(0))
            up1_s, up1_c = block(mid, hi, b.const(1))
            sums = list(low_s)
            for t, e in zip(up1_s, up0_s):
                sums.append(b.gate(GateKind.MUX, low_c, t, e))
            co = b.gate(GateKind.MUX, low_c, up1_c, up0_c)
        if real:
            for k, s in enumerate(sums):
                b.tag(s, f"sum:{k}")
            b.tag(co, f"carry:{hi - 1}")
        memo[key] = (sums, co)
        return sums, co

    sums, co = block(0, n, cin)
    for i, s in enumerate(sums):
        b.output(s, f"s{i}")
    b.output(co, "cout")
    return b.build()


def brent_kung_schedule(n):
    """Prefix operator schedule for a Brent-Kung tree over n positions.

    Returns a list of levels; each level is a list of (j, k) meaning the
    running range ending at j absorbs the running range ending at k (k < j).
    After all levels every position j covers 0..j.
    """
    levels = []
    d = 1
    while d < n:
        levels.append([(j, j - d) for j in range(2 * d - 1, n, 2 * d)])
        d *= 2
    d //= 2
    while d >= 1:
        ops = [(j, j - d) for j in range(3 * d - 1, n, 2 * d)]
        if ops:
            levels.append(ops)
        d //= 2
    return levels


def gen_cla(n):
    """Carry-look-ahead adder with a Brent-Kung prefix tree over (g, p)."""
    b, cin, a, bb = _adder_builder(f"cla{n}", n)
    p_ii = [b.gate(GateKind.XOR2, a[i], bb[i], tag=f"p:{i}:{i}")
            for i in range(n)]
    g_ii = [b.gate(GateKind.AND2, a[i], bb[i], tag=f"g:{i}:{i}")
            for i in range(n)]
    # position j -> (g net, p net, lowest bit covered)
    cur = [(g_ii[i], p_ii[i], i) for i in range(n)]
    for level in brent_kung_schedule(n):
        nxt = list(cur)
        for j, k in level:
            g_hi, p_hi, lo_hi = cur[j]
            g_lo, p_lo, lo = cur[k]
            if k != lo_hi - 1:
                raise AssertionError("prefix ranges do not abut")
            t = b.gate(GateKind.AND2, g_lo, p_hi)
            g = b.gate(GateKind.OR2, g_hi, t, tag=f"g:{j}:{lo}")
            p = b.gate(GateKind.AND2, p_lo, p_hi, tag=f"p:{j}:{lo}")
            nxt[j] = (g, p, lo)
        cur = nxt
    carries = []
    for i in range(n):
        g, p, lo = cur[i]
        if lo != 0:
            raise AssertionError("prefix tree left a gap")
        t = b.gate(GateKind.AND2, p, cin)
        carries.append(b.gate(GateKind.OR2, g, t, tag=f"carry:{i}"))
    sums = [b.gate(GateKind.XOR2, p_ii[i], cin if i == 0 else carries[i - 1],
                   tag=f"sum:{i}")
            for i in range(n)]
    for i, s in enumerate(sums):
        b.output(s, f"s{i}")
    b.output(carries[-1], "cout")
    return b.build()


GENERATORS = {"rca": gen_rca, "cosa": gen_cosa, "cla": gen_cla}


def gen_adder(arch, n):
    try:
        gen = GENERATORS[arch.lower()]
    except KeyError:
        raise ValueError(f"unknown architecture {arch!r}; "
                         f"choose from {sorted(GENERATORS)}")
    return gen(n)


# ---- structure ----------------------------------------------------------

def gate_count(c):
    return len(c.gates)


def topo_order(c):
    """Gate indices in an order where every net is driven before it is read."""
    driver = {g.output: k for k, g in enumerate(c.gates)}
    ts = TopologicalSorter()
    for k, g in enumerate(c.gates):
        ts.add(k, *(driver[i] for i in g.inputs if i in driver))
    try:
        return list(ts.static_order())
    except CycleError as e:
        names = [c.net_names[c.gates[k].output] for k in e.args[1]]
        raise MalformedCircuitError(f"combinational cycle through {names}")


def depth(c):
    """Longest input-to-output path counted in gates."""
    level = {i: 0 for i in c.inputs}
    for k in topo_order(c):
        g = c.gates[k]
        level[g.output] = 1 + max((level[i] for i in g.inputs), default=0)
    return max((level[o] for o in c.outputs), default=0)


# ---- plain evaluation ---------------------------------------------------

def evaluate(c, values):
    """Evaluate every net for input values keyed by input name.

    Values may be 0/1 ints or numpy integer arrays of 0/1 (one entry per
    test vector); gates use only bitwise operators so both work.
    Returns a dict of output name -> value.
    """
    nets = {}
    for i in c.inputs:
        nets[i] = values[c.net_names[i]]
    for k in topo_order(c):
        g = c.gates[k]
        x = [nets[i] for i in g.inputs]
        kind = g.kind
        if kind is GateKind.AND2:
            v = x[0] & x[1]
        elif kind is GateKind.OR2:
            v = x[0] | x[1]
        elif kind is GateKind.XOR2:
            v = x[0] ^ x[1]
        elif kind is GateKind.NOT:
            v = x[0] ^ 1
        elif kind is GateKind.MUX:
            v = (x[0] & x[1]) | ((x[0] ^ 1) & x[2])
        elif kind is GateKind.CONST0:
            v = 0
        else:
            v = 1
        nets[g.output] = v
    return {c.net_names[o]: nets[o] for o in c.outputs}


def adder_inputs(n, a, b, cin):
    """Input-name -> bit mapping for integer operands of an n-bit adder."""
    vals = {"cin": cin & 1}
    for i in range(n):
        vals[f"a{i}"] = (a >> i) & 1
        vals[f"b{i}"] = (b >> i) & 1
    return vals


# ---- mutation -----------------------------------------------------------

_BINARY = (GateKind.AND2, GateKind.OR2, GateKind.XOR2)


def mutate(c, seed):
    """Copy of `c` with one gate changed, chosen by `seed`.

    Two-input gates get a different two-input kind, MUXes swap their data
    inputs, NOT gates become a wire-through OR with themselves and
    constants flip.  Returns (circuit, description).
    """
    rng = random.Random(seed)
    k = rng.randrange(len(c.gates))
    g = c.gates[k]
    if g.kind in _BINARY:
        kind = rng.choice([x for x in _BINARY if x is not g.kind])
        new = Gate(kind, g.inputs, g.output)
    elif g.kind is GateKind.MUX:
        s, t, e = g.inputs
        new = Gate(GateKind.MUX, (s, e, t), g.output)
    elif g.kind is GateKind.NOT:
        new = Gate(GateKind.OR2, g.inputs * 2, g.output)
    elif g.kind is GateKind.CONST0:
        new = Gate(GateKind.CONST1, (), g.output)
    else:
        new = Gate(GateKind.CONST0, (), g.output)
    gates = list(c.gates)
    gates[k] = new
    desc = (f"gate {k} ({c.net_names[g.output]}): "
            f"{g.kind.name}{_fmt_ins(c, g)} -> {new.kind.name}{_fmt_ins(c, new)}")
    out = Circuit(f"{c.name}_mut{seed}", list(c.net_names), list(c.inputs),
                  gates, list(c.outputs), dict(c.tags))
    return out, desc


def _fmt_ins(c, g):
    return "(" + ", ".join(c.net_names[i] for i in g.inputs) + ")"


# ---- text format --------------------------------------------------------

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_GATE_RE = re.compile(rf"^({_NAME})\s*=\s*([A-Za-z0-9_]+)\s*\((.*)\)$")
_NAME_RE = re.compile(rf"^{_NAME}$")


def serialize_netlist(c):
    lines = [f"# {c.name}",
             ".inputs " + " ".join(c.input_names),
             ".outputs " + " ".join(c.output_names)]
    for g in c.gates:
        ins = ", ".join(c.net_names[i] for i in g.inputs)
        lines.append(f"{c.net_names[g.output]} = {g.kind.name}({ins})")
    return "\n".join(lines) + "\n"


def parse_netlist(text, name="netlist"):
    """Parse the line-oriented netlist format written by serialize_netlist.

    Gates may appear in any order; the result is validated (arity, single
    driver, no undriven nets, no cycles).
    """
    net_ids = {}
    net_names = []
    inputs = None
    output_names = None
    output_line = None
    gates = []
    gate_lines = []
    drivers = {}

    def net(nm, lineno):
        if not _NAME_RE.match(nm):
            raise NetlistSyntaxError(lineno, f"bad net name {nm!r}")
        if nm not in net_ids:
            net_ids[nm] = len(net_names)
            net_names.append(nm)
        return net_ids[nm]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith(".inputs"):
            if inputs is not None:
                raise NetlistSyntaxError(lineno, "duplicate .inputs")
            inputs = []
            for nm in line.split()[1:]:
                nid = net(nm, lineno)
                if nid in drivers:
                    raise NetlistSyntaxError(
                        lineno, f"net {nm!r} has more than one driver")
                drivers[nid] = lineno
                inputs.append(nid)
            continue
        if line.startswith(".outputs"):
            if output_names is not None:
                raise NetlistSyntaxError(lineno, "duplicate .outputs")
            output_names = line.split()[1:]
            output_line = lineno
            continue
        if line.startswith("."):
            raise NetlistSyntaxError(lineno, f"unknown directive {line.split()[0]!r}")
        m = _GATE_RE.match(line)
        if not m:
            raise NetlistSyntaxError(lineno, f"cannot parse {line!r}")
        out_name, kind_name, args = m.groups()
        try:
            kind = GateKind[kind_name.upper()]
        except KeyError:
            raise NetlistSyntaxError(lineno, f"unknown gate kind {kind_name!r}")
        args = [x.strip() for x in args.split(",")] if args.strip() else []
        if len(args) != kind.arity:
            raise NetlistSyntaxError(
                lineno, f"{kind.name} takes {kind.arity} inputs, "
                        f"got {len(args)}")
        out = net(out_name, lineno)
        if out in drivers:
            raise NetlistSyntaxError(
                lineno, f"net {out_name!r} has more than one driver")
        drivers[out] = lineno
        gates.append(Gate(kind, tuple(net(x, lineno) for x in args), out))
        gate_lines.append(lineno)

    if inputs is None:
        raise NetlistSyntaxError(1, "missing .inputs")
    if output_names is None:
        raise NetlistSyntaxError(1, "missing .outputs")
    for g, lineno in zip(gates, gate_lines):
        for i in g.inputs:
            if i not in drivers:
                raise NetlistSyntaxError(
                    lineno, f"net {net_names[i]!r} is never driven")
    outputs = []
    for nm in output_names:
        if nm not in net_ids or net_ids[nm] not in drivers:
            raise NetlistSyntaxError(output_line,
                                     f"output {nm!r} is never driven")
        outputs.append(net_ids[nm])
    c = Circuit(name, net_names, inputs, gates, outputs)
    c.validate()
    return c
