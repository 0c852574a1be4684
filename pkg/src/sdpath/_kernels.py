"""Compiled inner loops.  Data arrive as flat CSR-style arrays built by
:class:`sdpath.graph.DescendGraph`."""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _less(key, a, b):
    return key[a] < key[b] or (key[a] == key[b] and a < b)


@njit(cache=True)
def _sift_up(heap, where, key, i):
    node = heap[i]
    while i > 0:
        p = (i - 1) >> 1
        other = heap[p]
        if _less(key, node, other):
            heap[i] = other
            where[other] = i
            i = p
        else:
            break
    heap[i] = node
    where[node] = i


@njit(cache=True)
def _sift_down(heap, where, key, i, size):
    node = heap[i]
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and _less(key, heap[c + 1], heap[c]):
            c += 1
        child = heap[c]
        if _less(key, child, node):
            heap[i] = child
            where[child] = i
            i = c
        else:
            break
    heap[i] = node
    where[node] = i


@njit(cache=True)
def _decrease(heap, where, key, size, node):
    """Insert ``node`` or restore order after its key dropped."""
    i = where[node]
    if i < 0:
        heap[size] = node
        where[node] = size
        _sift_up(heap, where, key, size)
        return size + 1
    _sift_up(heap, where, key, i)
    return size


@njit(cache=True)
def _pop(heap, where, key, size):
    top = heap[0]
    where[top] = -2
    size -= 1
    if size > 0:
        heap[0] = heap[size]
        where[heap[0]] = 0
        _sift_down(heap, where, key, 0, size)
    return top, size


@njit(cache=True)
def dijkstra_kernel(source, positions, heights, face_ptr, face_ids, face_pos,
                    face_h, face_allowed, role_ptr, role_face, role_kind,
                    chord_ptr, chord_ids):
    N = len(heights)
    dist = np.full(N, np.inf)
    parent = np.full(N, -1, dtype=np.int64)
    settled = np.zeros(N, dtype=np.bool_)
    order = np.empty(N, dtype=np.int64)
    n_order = 0
    # indexed heap keyed by dist; where[v] = -1 never queued, -2 settled
    heap = np.empty(N, dtype=np.int64)
    where = np.full(N, -1, dtype=np.int64)
    size = 0
    dist[source] = 0.0
    size = _decrease(heap, where, dist, size, source)
    while size > 0:
        u, size = _pop(heap, where, dist, size)
        du = dist[u]
        settled[u] = True
        order[n_order] = u
        n_order += 1
        hu = heights[u]
        ux, uy, uz = positions[u, 0], positions[u, 1], positions[u, 2]
        for r in range(role_ptr[u], role_ptr[u + 1]):
            f = role_face[r]
            kind = role_kind[r]
            # block heights are non-increasing: skip the entries above hu
            lo = face_ptr[f]
            hi = face_ptr[f + 1]
            while lo < hi:
                mid = (lo + hi) >> 1
                if face_h[mid] > hu:
                    lo = mid + 1
                else:
                    hi = mid
            for k in range(lo, face_ptr[f + 1]):
                if not face_allowed[k, kind]:
                    continue
                v = face_ids[k]
                if settled[v]:
                    continue
                dx = face_pos[k, 0] - ux
                dy = face_pos[k, 1] - uy
                dz = face_pos[k, 2] - uz
                nd = du + np.sqrt(dx * dx + dy * dy + dz * dz)
                if nd < dist[v]:
                    dist[v] = nd
                    parent[v] = u
                    size = _decrease(heap, where, dist, size, v)
        for k in range(chord_ptr[u], chord_ptr[u + 1]):
            v = chord_ids[k]
            if settled[v]:
                continue
            dx = positions[v, 0] - ux
            dy = positions[v, 1] - uy
            dz = positions[v, 2] - uz
            nd = du + np.sqrt(dx * dx + dy * dy + dz * dz)
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                size = _decrease(heap, where, dist, size, v)
    return dist, parent, order[:n_order]
