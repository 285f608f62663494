"""Pure-Python duel-sampling loop, stream-compatible with the compiled one.

Draws one uniform per sample from the pair's BitGenerator (matching the
compiled loop and Generator.random() exactly) and compares the top two counts
against the precomputed stop table.
"""

from __future__ import annotations

import numpy as np


def run_duel(bit_generator, c1, c2, rev, counts, boundary, budget) -> int:
    """Sample the pair until the stop rule fires.

    counts is an int64[3] array carrying (S1, S2, S3) across calls; boundary
    the stop table; budget the max total samples (-1 for unlimited).  Returns
    1 when stopped, -1 on budget exhaustion, 0 when the runner-up count
    outgrew the stop table (caller extends and re-enters).
    """
    random = np.random.Generator(bit_generator).random
    s1 = int(counts[0])
    s2 = int(counts[1])
    s3 = int(counts[2])
    total = s1 + s2 + s3
    blen = len(boundary)
    table = boundary.tolist()
    status = 0
    while True:
        if 0 <= budget <= total:
            status = -1
            break
        u = random()
        if u < c1:
            k = 1
        elif u < c2:
            k = 2
        else:
            k = 3
        if rev:
            k = 4 - k
        if k == 1:
            s1 += 1
        elif k == 2:
            s2 += 1
        else:
            s3 += 1
        total += 1
        if s1 >= s2:
            if s2 >= s3:
                a, b = s1, s2
            elif s1 >= s3:
                a, b = s1, s3
            else:
                a, b = s3, s1
        elif s1 >= s3:
            a, b = s2, s1
        elif s2 >= s3:
            a, b = s2, s3
        else:
            a, b = s3, s2
        if b >= blen:
            break  # status 0: stop table too short
        if a >= table[b]:
            status = 1
            break
    counts[0] = s1
    counts[1] = s2
    counts[2] = s3
    return status
