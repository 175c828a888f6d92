#!/usr/bin/env python3
"""Regenerates the built-in architecture documents under core/data/presets/.

The JSON files are the source of truth at build time; this script only exists
so the meshes do not have to be typed by hand.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "core" / "data" / "presets"
DIRS = ["n", "e", "s", "w"]
OPPOSITE = {"n": "s", "s": "n", "e": "w", "w": "e"}
COMPUTE = ["ADD", "SUB", "MUL", "AND", "OR", "XOR", "SHL", "SHR", "CMP", "CMPEQ",
           "CMPLT", "SELECT", "NOP", "CONST"]


def fu_module(name, memory):
    ops = {op: 1 for op in COMPUTE}
    ports = [{"name": "a", "dir": "in", "role": "left"},
             {"name": "b", "dir": "in", "role": "right"},
             {"name": "p", "dir": "in", "role": "pred"},
             {"name": "out", "dir": "out", "role": "result"}]
    if memory:
        ops.update({"LOAD": 1, "STORE": 1})
        ports.append({"name": "mem", "dir": "out", "role": "mem"})
    return {"name": name, "kind": "FU", "ports": ports, "opcodes": ops}


def reg_module():
    return {"name": "ireg", "kind": "RF", "registers": 1, "read_ports": 1, "write_ports": 1,
            "ports": [{"name": "in", "dir": "in"}, {"name": "out", "dir": "out"}]}


def pe_ports(memory):
    ports = [{"name": f"in_{d}", "dir": "in"} for d in DIRS]
    ports += [{"name": f"out_{d}", "dir": "out"} for d in DIRS]
    if memory:
        ports.append({"name": "mem", "dir": "out"})
    return ports


def operands(src):
    return [{"from": src, "to": f"fu.{o}"} for o in ("a", "b", "p")]


def hycube_pe(name, fu):
    """Crossbar PE: every input can bypass to every other output in the same
    cycle, and each input direction owns one register."""
    memory = fu.endswith("mem")
    insts = [{"name": "fu", "module": fu}] + [{"name": f"r_{d}", "module": "ireg"} for d in DIRS]
    conns = []
    for d in DIRS:
        conns.append({"from": f"in_{d}", "to": f"r_{d}.in"})
        conns += operands(f"in_{d}")
        conns += operands(f"r_{d}.out")
        for o in DIRS:
            if o != d:
                conns.append({"from": f"in_{d}", "to": f"out_{o}"})
                conns.append({"from": f"r_{d}.out", "to": f"out_{o}"})
        conns.append({"from": "fu.out", "to": f"out_{d}"})
        conns.append({"from": "fu.out", "to": f"r_{d}.in"})
    conns += operands("fu.out")
    if memory:
        conns.append({"from": "fu.mem", "to": "mem"})
    return {"name": name, "kind": "Composite", "ports": pe_ports(memory), "instances": insts,
            "connections": conns}


def n2n_pe(name, fu):
    """Neighbour-to-neighbour PE: inputs reach only the FU (directly or via
    their input register); outputs are driven by the FU or its local register,
    so forwarding a foreign value costs an FU slot."""
    memory = fu.endswith("mem")
    insts = [{"name": "fu", "module": fu}] + [{"name": f"r_{d}", "module": "ireg"} for d in DIRS]
    insts.append({"name": "r_loc", "module": "ireg"})
    conns = []
    for d in DIRS:
        conns.append({"from": f"in_{d}", "to": f"r_{d}.in"})
        conns += operands(f"in_{d}")
        conns += operands(f"r_{d}.out")
        conns.append({"from": "fu.out", "to": f"out_{d}"})
        conns.append({"from": "r_loc.out", "to": f"out_{d}"})
    conns += operands("fu.out")
    conns.append({"from": "fu.out", "to": "r_loc.in"})
    conns += operands("r_loc.out")
    if memory:
        conns.append({"from": "fu.mem", "to": "mem"})
    return {"name": name, "kind": "Composite", "ports": pe_ports(memory), "instances": insts,
            "connections": conns}


def mesh(name, rows, cols, style, word_width, hop_limit, banks, depth, config_bytes=None):
    make_pe = hycube_pe if style == "hycube" else n2n_pe
    modules = [fu_module("alu", False), fu_module("alu_mem", True), reg_module(),
               make_pe("pe", "alu"), make_pe("pe_mem", "alu_mem"),
               {"name": "spm", "kind": "MU", "banks": banks, "bank_depth": depth,
                "ports": [{"name": f"p{r}", "dir": "in"} for r in range(rows)]}]
    instances, connections = [], []
    for r in range(rows):
        for c in range(cols):
            instances.append({"name": f"pe_{r}_{c}", "module": "pe_mem" if c == 0 else "pe"})
    instances.append({"name": "spm", "module": "spm"})
    step = {"n": (-1, 0), "s": (1, 0), "e": (0, 1), "w": (0, -1)}
    for r in range(rows):
        for c in range(cols):
            for d in DIRS:
                rr, cc = r + step[d][0], c + step[d][1]
                if 0 <= rr < rows and 0 <= cc < cols:
                    connections.append({"from": f"pe_{r}_{c}.out_{d}",
                                        "to": f"pe_{rr}_{cc}.in_{OPPOSITE[d]}"})
        connections.append({"from": f"pe_{r}_0.mem", "to": f"spm.p{r}"})
    doc = {"name": name, "word_width": word_width, "hop_limit": hop_limit}
    if config_bytes:
        doc["config_bytes_per_pe"] = config_bytes
    doc["instruction_bytes"] = 8
    doc.update({"modules": modules, "instances": instances, "connections": connections})
    return doc


PRESETS = [
    mesh("n2n_2x2", 2, 2, "n2n", 32, 1, 2, 64),
    mesh("hycube_2x2", 2, 2, "hycube", 32, 2, 2, 64),
    mesh("n2n_4x4", 4, 4, "n2n", 32, 1, 4, 256),
    mesh("hycube_4x4", 4, 4, "hycube", 32, 4, 4, 256),
    mesh("pace_8x8", 8, 8, "hycube", 16, 4, 8, 512, config_bytes=256),
]

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for doc in PRESETS:
        (OUT / f"{doc['name']}.json").write_text(json.dumps(doc, indent=1) + "\n")
