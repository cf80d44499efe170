"""Independent high-precision scalar evaluation of the divergence sums.

Pure-Python Decimal arithmetic over the defining formulas; shares no code
with the implementation under test. Decimal(float) is exact, so both routes
see the same inputs bit for bit.
"""

from decimal import Decimal, localcontext

PREC = 50


def dec_hellinger2(ps, qs, prec=PREC):
    with localcontext() as ctx:
        ctx.prec = prec
        acc = Decimal(0)
        for p, q in zip(ps, qs):
            d = Decimal(p).sqrt() - Decimal(q).sqrt()
            acc += d * d
        return acc / 2


def dec_kl(ps, qs, prec=PREC):
    with localcontext() as ctx:
        ctx.prec = prec
        acc = Decimal(0)
        for p, q in zip(ps, qs):
            if p == 0:
                continue
            if q == 0:
                return Decimal("Infinity")
            acc += Decimal(p) * (Decimal(p) / Decimal(q)).ln()
        return acc


def dec_symmetric_kl(ps, qs, prec=PREC):
    return dec_kl(ps, qs, prec) + dec_kl(qs, ps, prec)
