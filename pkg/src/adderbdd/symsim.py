"""Symbolic simulation of netlists into BDDs and adder verification."""
import contextlib
import csv
import gc
import io
import json
import time
from dataclasses import asdict, dataclass, field

from .adder_spec import bound_for_tag, interleaved_order, spec_outputs
from .bdd import ONE, ZERO
from .circuits import GateKind, evaluate, gen_adder, topo_order

ARCHITECTURES = ("rca", "cosa", "cla")


class GrowthError(AssertionError):
    """Peak node count grew faster than allowed across a doubling of n."""


@dataclass
class TraceSample:
    step: int
    gate: int
    net: int
    name: str
    tag: str
    size: int
    live_nodes: int
    operand_sizes: tuple


@dataclass
class SizeTrace:
    samples: list = field(default_factory=list)
    peak_live: int = 0

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "net", "tag", "size", "live_nodes"])
        for s in self.samples:
            w.writerow([s.step, s.name, s.tag, s.size, s.live_nodes])
        return buf.getvalue()


@dataclass
class BoundViolation:
    signal: str
    tag: str
    measured: int
    bound: int


@dataclass
class VerificationReport:
    circuit: str
    n: int
    equivalent: dict
    bound_violations: list
    trace: SizeTrace
    wall_time: float
    ite_calls: int = 0
    counterexample: dict = None

    @property
    def all_equivalent(self):
        return all(self.equivalent.values())

    @property
    def ok(self):
        return self.all_equivalent and not self.bound_violations

    @property
    def peak_live(self):
        return self.trace.peak_live

    def to_dict(self):
        """JSON-ready dict; wall_time sits under ``metadata`` only."""
        return {
            "circuit": self.circuit,
            "n": self.n,
            "equivalent": self.equivalent,
            "all_equivalent": self.all_equivalent,
            "bound_violations": [asdict(v) for v in self.bound_violations],
            "counterexample": self.counterexample,
            "peak_live": self.trace.peak_live,
            "ite_calls": self.ite_calls,
            "trace": [
                {"step": s.step, "net": s.name, "tag": s.tag,
                 "size": s.size, "live_nodes": s.live_nodes}
                for s in self.trace.samples
            ],
            "metadata": {"wall_time": self.wall_time},
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def simulate(circuit, vars, order=None):
    """Build a BDD for every net of `circuit` in the manager of `vars`.

    Inputs are matched to adder variables by name.  `order` may give any
    topological order of the gate indices; the default is topo_order().
    Returns ``(net -> NodeRef, SizeTrace)``.
    """
    m = vars.manager
    values = {}
    for i in circuit.inputs:
        name = circuit.net_names[i]
        try:
            values[i] = m.var(vars.var_for_input(name))
        except KeyError:
            raise ValueError(f"circuit input {name!r} has no adder variable")
    if order is None:
        order = topo_order(circuit)
    trace = SizeTrace()
    sizes = {}
    for step, k in enumerate(order):
        g = circuit.gates[k]
        x = [values[i] for i in g.inputs]
        kind = g.kind
        if kind is GateKind.AND2:
            r = m.apply_and(x[0], x[1])
        elif kind is GateKind.OR2:
            r = m.apply_or(x[0], x[1])
        elif kind is GateKind.XOR2:
            r = m.apply_xor(x[0], x[1])
        elif kind is GateKind.NOT:
            r = m.apply_not(x[0])
        elif kind is GateKind.MUX:
            r = m.ite(x[0], x[1], x[2])
        elif kind is GateKind.CONST0:
            r = ZERO
        else:
            r = ONE
        values[g.output] = r
        size = m.size(r)
        sizes[g.output] = size
        operand_sizes = tuple(sizes.get(i, 1) for i in g.inputs)
        live = m.live_nodes()
        trace.samples.append(TraceSample(
            step, k, g.output, circuit.net_names[g.output],
            circuit.tags.get(g.output, ""), size, live, operand_sizes))
        trace.peak_live = max(trace.peak_live, live)
    return values, trace


def step_bound(operand_sizes):
    """Generic per-gate bound: product of operand sizes, terminals included.

    Counting the two terminals keeps the bound sound for tiny operands
    (x0 xor x1 has 3 internal nodes while each operand has 1).
    """
    prod = 1
    for s in operand_sizes:
        prod *= s + 2
    return max(prod - 2, 0)


def check_bounds(trace):
    """Violations of the closed-form bounds on tagged nets and of the
    generic product bound on untagged ones."""
    out = []
    for s in trace.samples:
        bound = bound_for_tag(s.tag) if s.tag else None
        if bound is None:
            bound = step_bound(s.operand_sizes)
        if s.size > bound:
            out.append(BoundViolation(s.name, s.tag, s.size, bound))
    return out


def _counterexample(circuit, vars, name, got, want):
    m = vars.manager
    path = m.find_difference(got, want)
    bits = {}
    for nm in vars.input_names():
        bits[nm] = path.get(vars.var_for_input(nm), 0)
    a = sum(bits[f"a{i}"] << i for i in range(vars.n))
    b = sum(bits[f"b{i}"] << i for i in range(vars.n))
    full = {vars.var_for_input(nm): v for nm, v in bits.items()}
    return {
        "output": name,
        "inputs": bits,
        "a": a,
        "b": b,
        "cin": bits["cin"],
        "circuit_value": m.eval(got, full),
        "spec_value": m.eval(want, full),
    }


@contextlib.contextmanager
def _gc_paused():
    # the node pool holds no cycles; the collector only rescans its tuples
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def verify_circuit(circuit, n, vars=None, order=None):
    """Symbolically simulate an n-bit adder netlist and compare its outputs
    with the reference BDDs by handle equality."""
    t0 = time.perf_counter()
    if vars is None:
        vars = interleaved_order(n)
    elif vars.n != n:
        raise ValueError(f"variable universe is for {vars.n} bits, not {n}")
    expected_in = sorted(vars.input_names())
    if sorted(circuit.input_names) != expected_in:
        raise ValueError(f"circuit inputs {circuit.input_names} do not match "
                         f"an {n}-bit adder")
    if sorted(circuit.output_names) != sorted(vars.output_names()):
        raise ValueError(f"circuit outputs {circuit.output_names} do not "
                         f"match an {n}-bit adder")
    m = vars.manager
    calls0 = m.ite_calls
    if not circuit.tags:
        # a parsed netlist still has known output functions
        tags = {o: (f"sum:{nm[1:]}" if nm != "cout" else f"carry:{n - 1}")
                for o, nm in zip(circuit.outputs, circuit.output_names)}
        circuit = type(circuit)(circuit.name, circuit.net_names,
                                circuit.inputs, circuit.gates,
                                circuit.outputs, tags)
    with _gc_paused():
        values, trace = simulate(circuit, vars, order)
        spec = spec_outputs(vars)
    trace.peak_live = max(trace.peak_live, m.live_nodes())
    equivalent = {}
    cex = None
    for o, name in zip(circuit.outputs, circuit.output_names):
        equivalent[name] = values[o] == spec[name]
        if not equivalent[name] and cex is None:
            cex = _counterexample(circuit, vars, name, values[o], spec[name])
    violations = check_bounds(trace)
    return VerificationReport(
        circuit.name, n, equivalent, violations, trace,
        time.perf_counter() - t0, m.ite_calls - calls0, cex)


def verify_adder(arch, n, vars=None):
    """Generate the `arch` adder of width n and verify it."""
    t0 = time.perf_counter()
    circuit = gen_adder(arch, n)
    report = verify_circuit(circuit, n, vars)
    report.wall_time = time.perf_counter() - t0
    return report


def confirm_counterexample(circuit, n, cex):
    """True iff plain evaluation of the circuit on the counterexample
    disagrees with integer addition on the reported output."""
    outs = evaluate(circuit, cex["inputs"])
    total = cex["a"] + cex["b"] + cex["cin"]
    name = cex["output"]
    bit = n if name == "cout" else int(name[1:])
    return outs[name] != (total >> bit) & 1


@dataclass
class GrowthRow:
    n: int
    peak_live: int
    total_ops: int
    wall_time: float


def growth_fit(arch, n_list, max_ratio=4.5):
    """Verify `arch` for each width and tabulate the construction cost.

    Raises GrowthError if verification fails or if peak_live more than
    `max_ratio`-folds between consecutive widths that differ by a factor 2.
    """
    if list(n_list) != sorted(n_list):
        raise ValueError("n_list must be ascending")
    rows = []
    for n in n_list:
        rep = verify_adder(arch, n)
        if not rep.ok:
            raise GrowthError(f"{arch} n={n} failed verification")
        rows.append(GrowthRow(n, rep.peak_live, rep.ite_calls, rep.wall_time))
    for prev, cur in zip(rows, rows[1:]):
        if cur.n == 2 * prev.n and max_ratio is not None:
            ratio = cur.peak_live / prev.peak_live
            if ratio > max_ratio:
                raise GrowthError(
                    f"{arch}: peak_live grew {ratio:.2f}x from n={prev.n} "
                    f"to n={cur.n} (limit {max_ratio})")
    return rows


def growth_csv(rows, timing=False):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["n", "peak_live", "total_ops"]
    w.writerow(head + (["wall_time"] if timing else []))
    for r in rows:
        row = [r.n, r.peak_live, r.total_ops]
        w.writerow(row + ([f"{r.wall_time:.6f}"] if timing else []))
    return buf.getvalue()
