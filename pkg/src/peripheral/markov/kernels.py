"""Graph kernels on CSR adjacency arrays.

Written in the subset of Python that numba compiles; ``accel`` decides
whether they run jitted or as plain Python.
"""

import numpy as np


def tarjan_scc(n, indptr, indices):
    """Iterative Tarjan. Returns (component label per vertex, component count)."""
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=np.bool_)
    comp = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    call_v = np.empty(n, dtype=np.int64)
    call_e = np.empty(n, dtype=np.int64)
    sp = 0
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        depth = 0
        call_v[0] = root
        call_e[0] = indptr[root]
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = True
        while depth >= 0:
            v = call_v[depth]
            e = call_e[depth]
            if e < indptr[v + 1]:
                call_e[depth] = e + 1
                w = indices[e]
                if index[w] < 0:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    on_stack[w] = True
                    depth += 1
                    call_v[depth] = w
                    call_e[depth] = indptr[w]
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            else:
                if low[v] == index[v]:
                    while True:
                        sp -= 1
                        w = stack[sp]
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
                depth -= 1
                if depth >= 0:
                    parent = call_v[depth]
                    if low[v] < low[parent]:
                        low[parent] = low[v]
    return comp, ncomp


def bottom_components(n, indptr, indices, comp, ncomp):
    """True for components with no edge leaving them."""
    bottom = np.ones(ncomp, dtype=np.bool_)
    for v in range(n):
        for e in range(indptr[v], indptr[v + 1]):
            if comp[indices[e]] != comp[v]:
                bottom[comp[v]] = False
    return bottom


def component_periods(n, indptr, indices, comp, ncomp, wanted):
    """Period of every wanted component: gcd of level(u) + 1 - level(v) over its edges.

    Levels come from a BFS tree rooted at the component's first vertex. A
    component without internal edges (an isolated transient vertex) gets 0.
    """
    level = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    period = np.zeros(ncomp, dtype=np.int64)
    seen = np.zeros(ncomp, dtype=np.bool_)
    for root in range(n):
        c = comp[root]
        if not wanted[c] or seen[c]:
            continue
        seen[c] = True
        level[root] = 0
        head = 0
        tail = 1
        queue[0] = root
        g = 0
        while head < tail:
            u = queue[head]
            head += 1
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                if comp[v] != c:
                    continue
                if level[v] < 0:
                    level[v] = level[u] + 1
                    queue[tail] = v
                    tail += 1
                else:
                    diff = level[u] + 1 - level[v]
                    if diff < 0:
                        diff = -diff
                    # gcd(g, diff), inlined so the kernel has no callees
                    a = g
                    b = diff
                    while b:
                        a, b = b, a % b
                    g = a
        period[c] = g
    return period
