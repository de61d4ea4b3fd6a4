"""Independent brute-force oracles shared by the unit and acceptance tests."""

from fractions import Fraction
from itertools import product

from cogef.linalg import Matrix, det_exact, inverse


def in_lattice(Hinv, v) -> bool:
    return all(Fraction(c).denominator == 1 for c in Hinv @ tuple(v))


def brute_patterns(H, target_vec):
    """Omega by exhaustion: index sequences over nonzero cosets, checked with
    H^-1 integrality instead of the addition table."""
    from cogef.cosets import coset_representatives

    cs = coset_representatives(H, None)
    Hinv = inverse(H)
    delta = cs.delta
    reps = cs.reps
    found = set()
    for length in range(1, delta):
        for seq in product(range(1, delta), repeat=length):
            total = [sum(reps[t][i] for t in seq) for i in range(H.nrows)]
            if not in_lattice(Hinv, [a - b for a, b in zip(total, target_vec)]):
                continue
            ok = True
            for mask in range(1, 1 << length):
                sub = [sum(reps[seq[p]][i] for p in range(length) if mask >> p & 1) for i in range(H.nrows)]
                if in_lattice(Hinv, sub):
                    ok = False
                    break
            if ok:
                found.add(seq)
    return found


def hermite_forms(d: int, max_det: int):
    """All upper-triangular Hermite normal forms of size d with det <= max_det."""
    out = []

    def diags(k, left):
        if k == 0:
            yield ()
            return
        for v in range(1, left + 1):
            for rest in diags(k - 1, left // v):
                yield (v,) + rest

    for diag in diags(d, max_det):
        slots = [(i, j) for i in range(d) for j in range(i + 1, d)]
        ranges = [range(diag[j]) for i, j in slots]
        for vals in product(*ranges):
            rows = [[0] * d for _ in range(d)]
            for i in range(d):
                rows[i][i] = diag[i]
            for (i, j), v in zip(slots, vals):
                rows[i][j] = v
            H = Matrix(rows, d)
            if det_exact(H) > 1:
                out.append(H)
    return out
