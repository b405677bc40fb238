"""Gate-level netlist generation for the on-chip triage decoder and its
cost evaluation against an ERSFQ cell library.

Construction per ancilla: the two-round persistence filter (two XOR2 for the
flip bits, two NOT and an AND2 pair for the stick check, DFFs storing the
round and flip state), a per-clique decision cone (neighbor parity tree and
the discharge special cases), one AND2 correction line per adjacent pair
plus a guarded line per dischargeable ancilla, and a global OR reduction to
the single COMPLEX flag.  Every multi-sink net is realized through a binary
SPLIT tree, and every logic gate's fanins are equalized in clocked-stage
depth with DFF padding (SPLITs are unclocked and add no stage).
"""

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .lattice import TYPES, Lattice

LOGIC = ("XOR2", "AND2", "OR2", "NOT", "DFF")
KINDS = LOGIC + ("SPLIT",)


@dataclass
class Cell:
    delay_ps: float
    area_um2: float
    jj_count: int


@dataclass
class CellLibrary:
    cells: dict

    def __post_init__(self):
        missing = [k for k in KINDS if k not in self.cells]
        if missing:
            raise ValueError(f"cell library missing kinds: {missing}")
        for kind, c in self.cells.items():
            if c.delay_ps <= 0 or c.area_um2 <= 0 or c.jj_count <= 0:
                raise ValueError(f"non-positive entry for {kind}")

    def __getitem__(self, kind) -> Cell:
        return self.cells[kind]


def load_library(path=None) -> CellLibrary:
    """Parse the whitespace-column cell table (kind delay area jj)."""
    if path is None:
        text = resources.files("cliquedec.data").joinpath("ersfq_cells.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    cells = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        kind, delay, area, jj = line.split()
        cells[kind] = Cell(float(delay), float(area), int(jj))
    return CellLibrary(cells)


@dataclass
class Gate:
    kind: str
    ins: list
    outs: list


@dataclass
class Netlist:
    gates: list
    inputs: dict  # name tuple -> net id
    outputs: dict  # name tuple -> net id
    n_nets: int

    def counts(self):
        out = {k: 0 for k in KINDS}
        for g in self.gates:
            out[g.kind] += 1
        return out


class _Builder:
    def __init__(self):
        self.gates = []
        self.inputs = {}
        self.outputs = {}
        self.n_nets = 0
        self.consumers = {}  # net -> list of (gate index, input slot)

    def net(self):
        self.n_nets += 1
        return self.n_nets - 1

    def input(self, name):
        n = self.net()
        self.inputs[name] = n
        return n

    def gate(self, kind, ins):
        gi = len(self.gates)
        outs = [self.net()] if kind != "SPLIT" else [self.net(), self.net()]
        self.gates.append(Gate(kind, list(ins), outs))
        for slot, n in enumerate(ins):
            self.consumers.setdefault(n, []).append((gi, slot))
        return outs[0]

    def output(self, name, net):
        self.outputs[name] = net

    def xor_tree(self, nets):
        while len(nets) > 1:
            nxt = [self.gate("XOR2", nets[i : i + 2]) if i + 1 < len(nets) else nets[i]
                   for i in range(0, len(nets), 2)]
            nets = nxt
        return nets[0]

    def or_tree(self, nets):
        while len(nets) > 1:
            nets = [self.gate("OR2", nets[i : i + 2]) if i + 1 < len(nets) else nets[i]
                    for i in range(0, len(nets), 2)]
        return nets[0]

    def and_chain(self, nets):
        acc = nets[0]
        for n in nets[1:]:
            acc = self.gate("AND2", [acc, n])
        return acc


def build_netlist(lat: Lattice, rounds=2) -> Netlist:
    """Combinational window form of the decoder: per ancilla the inputs are
    three consecutive raw rounds plus the stored previous flip bit."""
    if rounds != 2:
        raise ValueError("only the two-round filter is implemented")
    b = _Builder()

    eff = {}
    for t in TYPES:
        for aid in lat.type_ancillas[t]:
            i = lat.ancillas[aid].index
            m_prev = b.input(("m_prev", t, i))
            m_cur = b.input(("m_cur", t, i))
            m_next = b.input(("m_next", t, i))
            f_prev = b.input(("f_prev", t, i))
            f_cur = b.gate("XOR2", [m_cur, m_prev])
            f_next = b.gate("XOR2", [m_next, m_cur])
            nf_prev = b.gate("NOT", [f_prev])
            nf_next = b.gate("NOT", [f_next])
            e1 = b.gate("AND2", [f_cur, nf_prev])
            eff[aid] = b.gate("AND2", [e1, nf_next])
            b.gate("DFF", [m_cur])  # round storage for the next decision
            b.gate("DFF", [f_cur])  # flip storage for the next decision

    # lazy shared inverters of effective bits, for discharge guards
    not_eff = {}

    def neg(aid):
        if aid not in not_eff:
            not_eff[aid] = b.gate("NOT", [eff[aid]])
        return not_eff[aid]

    complex_locals = []
    for t in TYPES:
        for aid in lat.type_ancillas[t]:
            nbrs = sorted(lat.same_type_neighbors[aid])
            nb = [eff[x] for x in nbrs]
            disch = aid in lat.boundary_discharge
            if disch and len(nb) == 1:
                continue  # one-neighbor boundary clique is always trivial
            if disch and len(nb) == 2:
                # even and non-empty neighborhood means both neighbors set
                complex_locals.append(b.and_chain([eff[aid], nb[0], nb[1]]))
            elif disch:
                parity = b.xor_tree(list(nb))
                even = b.gate("NOT", [parity])
                any_nb = b.or_tree(list(nb))
                complex_locals.append(b.and_chain([eff[aid], even, any_nb]))
            else:
                parity = nb[0] if len(nb) == 1 else b.xor_tree(list(nb))
                even = b.gate("NOT", [parity])
                complex_locals.append(b.gate("AND2", [eff[aid], even]))
    b.output(("complex",), b.or_tree(complex_locals))

    for t in TYPES:
        seen = set()
        for aid in lat.type_ancillas[t]:
            for other in sorted(lat.same_type_neighbors[aid]):
                key = frozenset((aid, other))
                if key in seen:
                    continue
                seen.add(key)
                q = lat.shared_qubit[key]
                b.output(("corr", t, q), b.gate("AND2", [eff[aid], eff[other]]))
        for aid in lat.type_ancillas[t]:
            if aid not in lat.boundary_discharge:
                continue
            guards = [eff[aid]] + [neg(x) for x in sorted(lat.same_type_neighbors[aid])]
            q = lat.boundary_discharge[aid][0]
            b.output(("corr", t, q), b.and_chain(guards))

    _insert_splitters(b)
    _balance(b)
    return Netlist(gates=b.gates, inputs=b.inputs, outputs=b.outputs, n_nets=b.n_nets)


def _insert_splitters(b: _Builder):
    output_nets = set(b.outputs.values())
    for net in range(b.n_nets):
        takers = list(b.consumers.get(net, []))
        sinks = len(takers) + (1 if net in output_nets else 0)
        if sinks <= 1:
            continue
        # binary splitter tree: leaves feed the gate inputs, the final leaf
        # (when the net is also a primary output) keeps the original net id
        leaves_needed = len(takers)
        supply = [net]
        while len(supply) < leaves_needed + (1 if net in output_nets else 0):
            src = supply.pop(0)
            g = Gate("SPLIT", [src], [b.net(), b.net()])
            b.gates.append(g)
            supply.extend(g.outs)
        for (gi, slot), leaf in zip(takers, supply):
            b.gates[gi].ins[slot] = leaf
        if net in output_nets:
            leaf = supply[len(takers)]
            for name, n in b.outputs.items():
                if n == net:
                    b.outputs[name] = leaf


def _toposort(gates):
    produced = {}
    for gi, g in enumerate(gates):
        for n in g.outs:
            produced[n] = gi
    indeg = [0] * len(gates)
    dependents = [[] for _ in gates]
    for gi, g in enumerate(gates):
        for n in g.ins:
            if n in produced:
                indeg[gi] += 1
                dependents[produced[n]].append(gi)
    order = [gi for gi in range(len(gates)) if indeg[gi] == 0]
    pos = 0
    while pos < len(order):
        for dep in dependents[order[pos]]:
            indeg[dep] -= 1
            if indeg[dep] == 0:
                order.append(dep)
        pos += 1
    if len(order) != len(gates):
        raise RuntimeError("netlist has a cycle")
    return order


def _balance(b: _Builder):
    """DFF-pad every logic gate so all its fanins arrive at one stage."""
    stage = {n: 0 for n in b.inputs.values()}
    for gi in _toposort(b.gates):
        g = b.gates[gi]
        if g.kind == "SPLIT":
            s = stage[g.ins[0]]
            for n in g.outs:
                stage[n] = s
            continue
        depths = [stage[n] for n in g.ins]
        target = max(depths)
        for slot, (n, s) in enumerate(zip(list(g.ins), depths)):
            cur = n
            while s < target:
                pad = Gate("DFF", [cur], [b.net()])
                b.gates.append(pad)
                cur = pad.outs[0]
                stage[cur] = s + 1
                s += 1
            g.ins[slot] = cur
        stage[g.outs[0]] = target + 1


def stage_depths(netlist: Netlist):
    stage = {n: 0 for n in netlist.inputs.values()}
    for gi in _toposort(netlist.gates):
        g = netlist.gates[gi]
        if g.kind == "SPLIT":
            for n in g.outs:
                stage[n] = stage[g.ins[0]]
        else:
            stage[g.outs[0]] = 1 + max(stage[n] for n in g.ins)
    return stage


def check_balanced(netlist: Netlist) -> bool:
    stage = stage_depths(netlist)
    for g in netlist.gates:
        if g.kind == "SPLIT" or len(g.ins) < 2:
            continue
        if len({stage[n] for n in g.ins}) != 1:
            return False
    return True


def simulate(netlist: Netlist, input_values):
    """Boolean evaluation; values may be scalars or numpy bool arrays.
    DFF and SPLIT pass values through (a DFF is one stage of delay)."""
    values = {}
    for name, net in netlist.inputs.items():
        values[net] = input_values[name]
    for gi in _toposort(netlist.gates):
        g = netlist.gates[gi]
        a = values[g.ins[0]]
        if g.kind == "SPLIT":
            values[g.outs[0]] = a
            values[g.outs[1]] = a
            continue
        if g.kind == "DFF":
            out = a
        elif g.kind == "NOT":
            out = ~a if isinstance(a, np.ndarray) else not a
        else:
            bb = values[g.ins[1]]
            if g.kind == "XOR2":
                out = a ^ bb
            elif g.kind == "AND2":
                out = a & bb
            else:
                out = a | bb
        values[g.outs[0]] = out
    return {name: values[net] for name, net in netlist.outputs.items()}


def evaluate(netlist: Netlist, lib: CellLibrary):
    """Total JJ count and area plus the longest input-to-output delay path."""
    jj = sum(lib[g.kind].jj_count for g in netlist.gates)
    area = sum(lib[g.kind].area_um2 for g in netlist.gates)
    arrival = {n: 0.0 for n in netlist.inputs.values()}
    critical = 0.0
    for gi in _toposort(netlist.gates):
        g = netlist.gates[gi]
        t = max(arrival[n] for n in g.ins) + lib[g.kind].delay_ps
        for n in g.outs:
            arrival[n] = t
        critical = max(critical, t)
    if not netlist.gates:
        critical = 0.0
    return {"jj_count": jj, "area_um2": area, "critical_path_ps": critical}


def power_estimate(netlist: Netlist, lib: CellLibrary, clock_hz, energy_per_switch_j, activity):
    """Dynamic switching power: JJ count x activity x switch energy x clock
    (ERSFQ spends no static bias power)."""
    if clock_hz <= 0 or energy_per_switch_j <= 0 or not 0 <= activity <= 1:
        raise ValueError("bad power parameters")
    jj = sum(lib[g.kind].jj_count for g in netlist.gates)
    return jj * activity * energy_per_switch_j * clock_hz
