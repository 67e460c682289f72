"""Pure-Python LC kernels.  Same signatures as the compiled ``_ckernels`` module.

Arrays use the layout built by :class:`conflict_preorder.lc.LcProblem`:
triples ``(node p, B-state x)`` are flattened to ``p * nb + x``; ``level[p]``
is ``-1`` for nodes not (yet) in the LC set.
"""


def mc_closure(n, nb, pred_ptr, pred_src, pred_lab, rb_ptr, rb_src, member, level, base):
    """Backward closure of more-conflicting triples from the ``(∅, ω)`` base node."""
    pred_ptr = list(pred_ptr)
    pred_src = list(pred_src)
    pred_lab = list(pred_lab)
    rb_ptr = list(rb_ptr)
    rb_src = list(rb_src)
    mc = bytearray(n * nb)
    stack = []
    if base >= 0:
        off = base * nb
        for x in range(nb):
            mc[off + x] = 1
            stack.append(off + x)
    while stack:
        q, y = divmod(stack.pop(), nb)
        for k in range(pred_ptr[q], pred_ptr[q + 1]):
            p = pred_src[k]
            if level[p] >= 0:
                continue
            r = pred_lab[k] * nb + y
            off = p * nb
            for j in range(rb_ptr[r], rb_ptr[r + 1]):
                u = off + rb_src[j]
                if member[u] and not mc[u]:
                    mc[u] = 1
                    stack.append(u)
    return mc


def lc_iterate(n, nb, member, mc, level, b_subset, new_level, witness):
    """Promote every open node with a B-state outside ``mc``; return the count."""
    count = 0
    for p in range(n):
        if level[p] >= 0 or not b_subset[p]:
            continue
        off = p * nb
        for x in range(nb):
            if member[off + x] and not mc[off + x]:
                level[p] = new_level
                witness[p] = x
                count += 1
                break
    return count


def lc_fixpoint(n, nb, pred_ptr, pred_src, pred_lab, rb_ptr, rb_src, member, b_subset, level, witness, base):
    """Alternate closure and promotion until nothing changes; return the last round index."""
    rnd = 0
    while True:
        mc = mc_closure(n, nb, pred_ptr, pred_src, pred_lab, rb_ptr, rb_src, member, level, base)
        if not lc_iterate(n, nb, member, mc, level, b_subset, rnd + 1, witness):
            return rnd
        rnd += 1
