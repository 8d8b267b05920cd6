"""Pure-Python sensing kernel.

Mirrors ``_kernels.pyx`` operation for operation (same loop order, same
squared-distance comparisons) so both backends produce bit-identical floats.
"""


def sense_all(rx, ry, tx, ty, tstate, obstacles, d_t, d_c):
    """Per-robot collision resultant and nearest on-ground target.

    ``rx, ry``: robot coordinates; ``tx, ty, tstate``: target coordinates and
    state (0 = on ground); ``obstacles``: rows ``(x0, y0, x1, y1)``.

    Returns ``(vcx, vcy, ncontact, fcx, fcy, nearest)`` as lists; ``nearest``
    is -1 when no on-ground target lies within ``d_t``. Ties on distance go to
    the lowest target index.
    """
    rx = rx.tolist()
    ry = ry.tolist()
    tx = tx.tolist()
    ty = ty.tolist()
    tstate = tstate.tolist()
    obs = obstacles.tolist()
    n = len(rx)
    m = len(tx)
    dt2 = d_t * d_t
    dc2 = d_c * d_c
    vcx = [0.0] * n
    vcy = [0.0] * n
    ncontact = [0] * n
    fcx = [0.0] * n
    fcy = [0.0] * n
    nearest = [-1] * n
    for i in range(n):
        px = rx[i]
        py = ry[i]
        sx = 0.0
        sy = 0.0
        count = 0
        for j in range(n):
            if j == i:
                continue
            dx = rx[j] - px
            dy = ry[j] - py
            if dx * dx + dy * dy <= dc2:
                if count == 0:
                    fcx[i] = dx
                    fcy[i] = dy
                sx += dx
                sy += dy
                count += 1
        for x0, y0, x1, y1 in obs:
            cx = x0 if px < x0 else (x1 if px > x1 else px)
            cy = y0 if py < y0 else (y1 if py > y1 else py)
            dx = cx - px
            dy = cy - py
            if dx * dx + dy * dy <= dc2:
                if count == 0:
                    fcx[i] = dx
                    fcy[i] = dy
                sx += dx
                sy += dy
                count += 1
        vcx[i] = sx
        vcy[i] = sy
        ncontact[i] = count

        best = -1
        best_d2 = dt2
        for k in range(m):
            if tstate[k] != 0:
                continue
            dx = tx[k] - px
            dy = ty[k] - py
            d2 = dx * dx + dy * dy
            if d2 < best_d2 or (d2 == best_d2 and best < 0):
                best = k
                best_d2 = d2
        nearest[i] = best
    return vcx, vcy, ncontact, fcx, fcy, nearest
