"""Brute-force reference implementations for oracle-equivalence tests.

Everything here recomputes from the raw edge list with naive enumeration
and stays deliberately independent of the engine's index, kernels, and
metric code paths.
"""

LINEAGE = {"supports", "refines", "prerequisite"}


def lineage_pairs(graph):
    return [(e.src, e.dst) for e in graph.edge_list() if e.rel in LINEAGE]


def backward_closure(graph, claim_id):
    """Exhaustive backward BFS over reversed lineage edges."""
    preds = {}
    for u, v in lineage_pairs(graph):
        preds.setdefault(v, []).append(u)
    seen = {claim_id}
    frontier = [claim_id]
    while frontier:
        nxt = []
        for node in frontier:
            for p in preds.get(node, ()):
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    return seen


def is_complete(graph, claim_id):
    closure = backward_closure(graph, claim_id)
    if not any(graph.kind(n) == "source" for n in closure):
        return False
    indeg = dict.fromkeys(closure, 0)
    for u, v in lineage_pairs(graph):
        if v in indeg:
            indeg[v] += 1
    return all(indeg[n] > 0 for n in closure if graph.kind(n) == "reasoning")


def pcov(graph):
    claims = sorted(graph.claims)
    return sum(is_complete(graph, c) for c in claims) / len(claims)


def citation_pairs(graph):
    """All (claim, source) pairs by exhaustive closure enumeration."""
    pairs = []
    for claim_id in sorted(graph.claims):
        closure = backward_closure(graph, claim_id)
        for node_id in sorted(closure):
            if graph.kind(node_id) == "source":
                pairs.append((claim_id, node_id))
    return pairs


def pair_nu(graph, scorer, claim_id, source_id):
    for e in graph.edge_list():
        if e.src == source_id and e.dst == claim_id and e.rel == "supports":
            return e.strength
    return scorer.score(
        graph.claims[claim_id].statement,
        graph.sources[source_id].excerpt,
        "source_entails_claim",
    ).value


def psnd(graph, scorer, tau):
    pairs = citation_pairs(graph)
    if not pairs:
        return None
    hits = sum(1 for c, s in pairs if pair_nu(graph, scorer, c, s) > tau)
    return hits / len(pairs)


def ctran(graph, ground_truth):
    unique = {}
    for a in ground_truth:
        unique.setdefault((a.node_a, a.node_b, a.entity), a)
    if not unique:
        return 1.0
    contradicts = {
        frozenset((e.src, e.dst)) for e in graph.edge_list() if e.rel == "contradicts"
    }
    hits = sum(1 for (na, nb, _e) in unique if frozenset((na, nb)) in contradicts)
    return hits / len(unique)


def proxy(graph):
    totals = []
    for claim_id in sorted(graph.claims):
        closure = backward_closure(graph, claim_id)
        n_src = sum(1 for n in closure if graph.kind(n) == "source")
        n_rsn = sum(1 for n in closure if graph.kind(n) == "reasoning")
        totals.append(n_src + n_rsn)
    return sum(totals) / len(totals), totals


def has_lineage_cycle(graph):
    """Exhaustive DFS three-color cycle check over lineage edges."""
    succs = {}
    for u, v in lineage_pairs(graph):
        succs.setdefault(u, []).append(v)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {}
    for start in graph.node_ids():
        if color.get(start, WHITE) != WHITE:
            continue
        stack = [(start, iter(succs.get(start, ())))]
        color[start] = GRAY
        while stack:
            node, it = stack[-1]
            found = False
            for child in it:
                state = color.get(child, WHITE)
                if state == GRAY:
                    return True
                if state == WHITE:
                    color[child] = GRAY
                    stack.append((child, iter(succs.get(child, ()))))
                    found = True
                    break
            if not found:
                color[node] = BLACK
                stack.pop()
    return False
