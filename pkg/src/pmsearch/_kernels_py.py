"""Pure-Python table kernels (fallback for the compiled ``_kernels`` module).

A tabulated set function is a flat sequence ``table`` of length ``2**n``
where ``table[mask]`` is the value of the subset encoded by ``mask``.

The enumeration order and the floating-point summation order here are the
contract that ``_kernels.pyx`` reproduces exactly, so both backends return
bit-identical values and witnesses.
"""


def smi(table, n, l_mask, k):
    """Minimum of phi(S, A) over A within ``l_mask`` and |S| <= k, S disjoint from A.

    Returns ``(value, s_mask, a_mask)``. A is visited in ascending mask
    order, S in lexicographic order of its ascending element list, and only a
    strictly smaller value replaces the current witness. S = {} gives
    phi = 0, so the result is never positive and ``(0.0, 0, 0)`` is what a
    submodular function yields.
    """
    t = table.tolist() if hasattr(table, "tolist") else list(table)
    best, best_s, best_a = 0.0, 0, 0
    if k < 2:
        return best, best_s, best_a
    a = 0
    while True:
        fa = t[a]
        outside = [x for x in range(n) if not (a >> x) & 1]
        bits = [1 << x for x in outside]
        gains = [t[a | b] - fa for b in bits]
        m = len(outside)
        # pre-order walk over index combinations: (next index, S mask, gain sum, |S|)
        stack = [(0, 0, 0.0, 0)]
        while stack:
            j, s, acc, size = stack.pop()
            if j >= m:
                continue
            # the sibling (skip index j) is resumed after the subtree of "take j"
            stack.append((j + 1, s, acc, size))
            s2 = s | bits[j]
            acc2 = acc + gains[j]
            if size >= 1:
                phi = acc2 - (t[a | s2] - fa)
                if phi < best:
                    best, best_s, best_a = phi, s2, a
            if size + 1 < k:
                stack.append((j + 1, s2, acc2, size + 1))
        if a == l_mask:
            break
        a = (a - l_mask) & l_mask
    return best, best_s, best_a


def submodular_violation(table, n, tol):
    """First (X, y, e) with f(X+e) - f(X) < f(X+y+e) - f(X+y) - tol, else None.

    Uses the local characterisation over pairs e < y outside X, which is
    equivalent to the diminishing-returns definition. Scan order: X ascending,
    then e, then y.
    """
    t = table.tolist() if hasattr(table, "tolist") else list(table)
    for x in range(1 << n):
        fx = t[x]
        for e in range(n):
            be = 1 << e
            if x & be:
                continue
            lhs = t[x | be] - fx
            for y in range(e + 1, n):
                by = 1 << y
                if x & by:
                    continue
                rhs = t[x | by | be] - t[x | by]
                if lhs < rhs - tol:
                    return x, y, e
    return None


def monotone_violation(table, n, tol):
    """First (X, e) with f(X+e) < f(X) - tol, else None (X ascending, then e)."""
    t = table.tolist() if hasattr(table, "tolist") else list(table)
    for x in range(1 << n):
        fx = t[x]
        for e in range(n):
            be = 1 << e
            if not x & be and t[x | be] < fx - tol:
                return x, e
    return None
