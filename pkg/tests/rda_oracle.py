"""Brute-force reaching definitions by walking concrete CFG paths.

This deliberately shares nothing with the worklist solver: it walks every
entry path in which each edge is taken at most ``k`` times, tracks which
definitions are live along that one path, and unions the result per node.
``k`` grows until the answer stops changing.
"""

from __future__ import annotations

from mvgraph.cfg import CALL, RETURN, CfgFunction
from mvgraph.diagnostics import View


def _walk(succ, entry, gen, kill, k):
    result: dict[int, set] = {}
    seen: set = set()
    stack = [(entry, frozenset(), ())]
    while stack:
        node, live_in, counts = stack.pop()
        state = (node, live_in, counts)
        if state in seen:
            continue
        seen.add(state)
        result.setdefault(node, set()).update(live_in)
        live_out = frozenset(gen.get(node, set()) | (live_in - kill.get(node, set())))
        for dst in succ.get(node, ()):
            used = dict(counts)
            if used.get((node, dst), 0) >= k:
                continue
            used[(node, dst)] = used.get((node, dst), 0) + 1
            stack.append((dst, live_out, tuple(sorted(used.items()))))
    return result


def oracle_in_sets(g, fn: CfgFunction, facts, max_k: int = 6) -> dict[int, frozenset]:
    nodes = set(fn.statement_nodes) | {fn.entry, fn.exit}
    succ: dict[int, list[int]] = {}
    for e in g.edges_of(View.CFG):
        if e.label in (CALL, RETURN) or e.src not in nodes:
            continue
        succ.setdefault(e.src, [])
        if e.dst not in succ[e.src]:
            succ[e.src].append(e.dst)
    previous = None
    for k in range(1, max_k + 1):
        current = _walk(succ, fn.entry, facts.gen, facts.kill, k)
        if current == previous:
            break
        previous = current
    else:
        raise AssertionError(f"oracle did not stabilize within k={max_k}")
    return {n: frozenset(current.get(n, ())) for n in nodes}
