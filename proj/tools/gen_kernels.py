#!/usr/bin/env python3
"""Regenerates the bundled loop kernels under core/data/kernels/."""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "core" / "data" / "kernels"
N = 16


class K:
    def __init__(self, name, tags=(), iterations=N):
        self.doc = {"name": name, "tags": list(tags), "iterations": iterations,
                    "variables": [], "live_in": [], "live_out": [], "nodes": [], "edges": []}

    def var(self, name, length=N, scalar=False, live_in=False, live_out=False):
        v = {"name": name, "length": length}
        if scalar:
            v["scalar"] = True
        self.doc["variables"].append(v)
        if live_in:
            self.doc["live_in"].append(name)
        if live_out:
            self.doc["live_out"].append(name)

    def node(self, nid, op, constant=None, variable=None, offset=0):
        n = {"id": nid, "opcode": op}
        if constant is not None:
            n["constant"] = constant
        if variable:
            n["variable"] = variable
        if offset:
            n["offset"] = offset
        self.doc["nodes"].append(n)
        return nid

    def edge(self, src, dst, slot="left", kind="data", distance=None, init=None):
        e = {"src": src, "dst": dst, "kind": kind, "slot": slot}
        if distance is not None:
            e["distance"] = distance
        if init is not None:
            e["init"] = init
        self.doc["edges"].append(e)

    def op(self, nid, op, left=None, right=None, constant=None):
        self.node(nid, op, constant)
        if left:
            self.edge(left, nid, "left")
        if right:
            self.edge(right, nid, "right")
        return nid

    def counter(self, nid="i"):
        self.node(nid, "ADD", 1)
        self.edge(nid, nid, "left", "recurrence", 1, -1)
        return nid

    def load(self, nid, var, index=None, offset=0):
        self.node(nid, "LOAD", variable=var, offset=offset)
        if index:
            self.edge(index, nid, "left")
        return nid

    def store(self, nid, var, data, index=None, offset=0):
        self.node(nid, "STORE", variable=var, offset=offset)
        if index:
            self.edge(index, nid, "left")
        self.edge(data, nid, "right")
        return nid

    def write(self):
        path = OUT / (self.doc["name"] + ".json")
        path.write_text(json.dumps(self.doc, indent=1) + "\n")


def vecadd():
    k = K("vecadd")
    k.var("a", live_in=True)
    k.var("b", live_in=True)
    k.var("c", live_out=True)
    i = k.counter()
    k.load("la", "a", i)
    k.load("lb", "b", i)
    k.op("add", "ADD", "la", "lb")
    k.store("st", "c", "add", i)
    return k


def accumulate():
    k = K("accumulate")
    k.var("x", live_in=True)
    k.var("out", 1, scalar=True, live_out=True)
    i = k.counter()
    k.load("lx", "x", i)
    k.node("acc", "ADD")
    k.edge("acc", "acc", "left", "recurrence", 1, 0)
    k.edge("lx", "acc", "right")
    k.store("st", "out", "acc")
    return k


def predicated_select():
    k = K("predicated-select")
    k.var("a", live_in=True)
    k.var("c", live_out=True)
    i = k.counter()
    k.load("la", "a", i)
    k.op("p", "CMP", "la", constant=0)
    k.op("q", "XOR", "p", constant=1)
    k.op("t", "NOP", "la")
    k.edge("p", "t", "pred", "predicate")
    k.node("f", "CONST", 0)
    k.edge("q", "f", "pred", "predicate")
    k.node("sel", "SELECT")
    k.edge("t", "sel", "left")
    k.edge("f", "sel", "right")
    k.edge("p", "sel", "pred", "predicate")
    k.store("st", "c", "sel", i)
    return k


def fir():
    k = K("fir")
    k.var("x", N + 2, live_in=True)
    k.var("y", live_out=True)
    i = k.counter()
    taps = [3, 5, 7]
    for t, c in enumerate(taps):
        k.load(f"l{t}", "x", i, offset=t)
        k.op(f"m{t}", "MUL", f"l{t}", constant=c)
    k.op("s0", "ADD", "m0", "m1")
    k.op("s1", "ADD", "s0", "m2")
    k.store("st", "y", "s1", i)
    return k


def gemm_tile():
    k = K("gemm-tile", iterations=8)
    k.var("A", 32, live_in=True)
    k.var("B", 32, live_in=True)
    k.var("C", 8, live_out=True)
    i = k.counter()
    k.op("i4", "SHL", i, constant=2)
    for t in range(4):
        k.load(f"a{t}", "A", "i4", offset=t)
        k.load(f"b{t}", "B", "i4", offset=t)
        k.op(f"p{t}", "MUL", f"a{t}", f"b{t}")
    k.op("s0", "ADD", "p0", "p1")
    k.op("s1", "ADD", "p2", "p3")
    k.op("s2", "ADD", "s0", "s1")
    k.store("st", "C", "s2", i)
    return k


def stencil():
    k = K("stencil-3pt")
    k.var("x", N + 2, live_in=True)
    k.var("y", live_out=True)
    i = k.counter()
    for t in range(3):
        k.load(f"l{t}", "x", i, offset=t)
    k.op("dbl", "SHL", "l1", constant=1)
    k.op("s0", "ADD", "l0", "dbl")
    k.op("s1", "ADD", "s0", "l2")
    k.store("st", "y", "s1", i)
    return k


def fig5():
    # Eight compute nodes whose adjacency has no two-per-PE embedding in a 2x2 mesh.
    k = K("fig5")
    k.node("n1", "ADD", 1)
    k.edge("n1", "n1", "left", "recurrence", 1, 0)
    k.op("n2", "MUL", "n1", constant=3)
    k.op("n3", "XOR", "n1", constant=5)
    k.op("n4", "ADD", "n2", "n3")
    k.op("n5", "SUB", "n1", "n2")
    k.op("n6", "OR", "n1", "n3")
    k.op("n7", "AND", "n5", "n6")
    k.op("n8", "ADD", "n4", "n7")
    return k


MIX_OPS = ["ADD", "XOR", "SUB", "OR", "ADD", "XOR", "SUB"]


def xor_reduce(k, words):
    level = 0
    while len(words) > 1:
        nxt = [k.op(f"x{level}_{j}", "XOR", words[j], words[j + 1]) for j in range(0, len(words) - 1, 2)]
        if len(words) % 2:
            nxt.append(words[-1])
        words = nxt
        level += 1
    return words[0]


def mix(m, taps):
    # m state words updated in lockstep; word j reads words j+taps[0] and
    # j+taps[1] from the previous iteration. Odd cycles cannot sit on a mesh
    # at one hop per cycle.
    k = K(f"mix-{m}", tags=["fanout"])
    k.var("out", 1, scalar=True, live_out=True)
    words = [f"v{j}" for j in range(m)]
    for j in range(m):
        k.node(words[j], MIX_OPS[j % len(MIX_OPS)])
    for j in range(m):
        for slot, t in zip(["left", "right"], taps):
            src = (j + t) % m
            k.edge(words[src], words[j], slot, "recurrence", 1, src + 1)
    k.store("st", "out", xor_reduce(k, words))
    return k


def hub(leaves):
    # One hub word broadcast to every leaf; leaves form a ring, leaf 0 feeds the hub.
    k = K(f"hub-{leaves}", tags=["fanout"])
    k.var("out", 1, scalar=True, live_out=True)
    k.node("h", "ADD")
    ring = [f"l{j}" for j in range(leaves)]
    for j, name in enumerate(ring):
        k.node(name, MIX_OPS[j % len(MIX_OPS)])
        k.edge("h", name, "left", "recurrence", 1, 1)
        k.edge(ring[(j + 1) % leaves], name, "right", "recurrence", 1, (j + 1) % leaves + 2)
    k.edge(ring[0], "h", "left", "recurrence", 1, 2)
    k.edge("h", "h", "right", "recurrence", 1, 1)
    k.store("st", "out", xor_reduce(k, ring))
    return k


def main():
    for make in [vecadd, accumulate, predicated_select, fir, gemm_tile, stencil, fig5]:
        make().write()
    for m, taps in [(3, [1, 2]), (5, [1, 3]), (7, [1, 3])]:
        mix(m, taps).write()
    for n in [4, 6]:
        hub(n).write()


if __name__ == "__main__":
    main()
