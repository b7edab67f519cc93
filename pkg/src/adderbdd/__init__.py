"""BDD engine, adder generators and symbolic-simulation verifier."""
from .adder_spec import (
    AdderVars, interleaved_order, spec_carry_bit, spec_carry_from_pg,
    spec_generate, spec_outputs, spec_propagate, spec_sum_bit,
)
from .bdd import ONE, ZERO, BddError, BddManager
from .circuits import (
    Circuit, GateKind, gen_adder, gen_cla, gen_cosa, gen_full_adder,
    gen_half_adder,
    gen_rca, parse_netlist, serialize_netlist,
)
from .symsim import simulate, verify_adder, verify_circuit

__version__ = "0.1.0"
