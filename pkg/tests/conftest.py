"""Shared hypothesis strategies for the test suite."""

from gmpy2 import mpq
from hypothesis import HealthCheck, settings, strategies as st

from padichi.exact import Mat, p_pow

settings.register_profile(
    "exactmath", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("exactmath")


def rationals(lo=-30, hi=30, max_den=20):
    return st.builds(lambda a, b: mpq(a, b), st.integers(lo, hi), st.integers(1, max_den))


def padic_rationals(p, lo=-12, hi=12, emin=-2, emax=2):
    """Rationals whose p-valuation actually moves around."""
    dens = st.integers(1, 12).filter(lambda b: b % p != 0)
    return st.builds(
        lambda a, b, e: mpq(a, b) * p_pow(p, e),
        st.integers(lo, hi), dens, st.integers(emin, emax),
    )


def zp_integers(p, lo=-12, hi=12):
    """Elements of Z_(p): denominator prime to p."""
    dens = st.integers(1, 12).filter(lambda b: b % p != 0)
    return st.builds(mpq, st.integers(lo, hi), dens)


def zp_units(p, lo=1, hi=12):
    """Units of Z_(p): numerator and denominator both prime to p."""
    nums = st.integers(lo, hi).filter(lambda a: a % p != 0)
    dens = st.integers(1, 12).filter(lambda b: b % p != 0)
    sign = st.sampled_from([1, -1])
    return st.builds(lambda a, b, s: mpq(s * a, b), nums, dens, sign)


def mats(nrows, ncols, entries):
    rows = st.lists(st.lists(entries, min_size=ncols, max_size=ncols),
                    min_size=nrows, max_size=nrows)
    return rows.map(lambda rr: Mat(rr, ncols=ncols))


def unimodular(p, n):
    """Random element of GL_n(Z_(p)): permutation * unit-diagonal * lower * upper."""
    lower = mats(n, n, zp_integers(p))
    upper = mats(n, n, zp_integers(p))
    diag = st.lists(zp_units(p), min_size=n, max_size=n)
    perm = st.permutations(range(n))

    def build(lo, up, dd, pe):
        eye = Mat.identity(n)
        ltri = Mat([[lo[i, j] if i > j else (1 if i == j else 0) for j in range(n)]
                    for i in range(n)])
        utri = Mat([[up[i, j] if i < j else (1 if i == j else 0) for j in range(n)]
                    for i in range(n)])
        pm = Mat([[1 if j == pe[i] else 0 for j in range(n)] for i in range(n)])
        return pm * Mat.diagonal(dd) * ltri * utri

    return st.builds(build, lower, upper, diag, perm)


primes = st.sampled_from([2, 3, 5, 7])
odd_primes = st.sampled_from([3, 5, 7])
