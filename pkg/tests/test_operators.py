"""Operator algebra: unit relations, Leibniz products, action semantics.

The load-bearing test here is the composition property: multiplying
operators and then acting on a state must equal acting twice.  That ties
the graded word product, the Leibniz rule and the canonical merge to the
concrete representation on polynomial-amplitude color states.
"""

import random
from fractions import Fraction

import pytest

from colorcs.errors import CapExceededError, MixedParityError
from colorcs.operators import AlgebraContext, term_budget


@pytest.fixture(scope="module")
def A11():
    return AlgebraContext(1, 1, 2)


@pytest.fixture(scope="module")
def A21():
    return AlgebraContext(2, 1, 2)


def eta(g, a, b, c, d):
    return (g.parity(a) + g.parity(b)) * (g.parity(c) + g.parity(d))


def test_unit_bracket_relation(A21):
    # [e(ab), e(cd)} = delta_bc e(ad) - (-1)^eta delta_ad e(cb), same site
    g = A21.grading
    cs = g.colors
    for a in cs:
        for b in cs:
            for c in cs:
                for d in cs:
                    lhs = A21.unit(1, a, b).bracket(A21.unit(1, c, d))
                    rhs = A21.zero()
                    if b == c:
                        rhs = rhs + A21.unit(1, a, d)
                    if a == d:
                        sgn = -1 if eta(g, a, b, c, d) % 2 else 1
                        rhs = rhs - A21.unit(1, c, b) * sgn
                    assert lhs == rhs, (a, b, c, d)


def test_units_supercommute_across_sites(A11):
    g = A11.grading
    cs = g.colors
    for a in cs:
        for b in cs:
            for c in cs:
                for d in cs:
                    assert A11.unit(1, a, b).bracket(A11.unit(2, c, d)).is_zero


def test_heisenberg_relation(A11):
    d1 = A11.deriv(1)
    x1 = A11.coord(1)
    x2 = A11.coord(2)
    assert d1.mul(x1) - x1.mul(d1) == A11.identity()
    assert d1.mul(x2) - x2.mul(d1) == A11.zero()


def test_leibniz_first_and_second_order(A11):
    f = A11.field.omega(1, 2)
    fo = A11.scalar(f)
    d1 = A11.deriv(1)
    assert d1.mul(fo) == fo.mul(d1) + A11.scalar(f.d_dx(1))
    d2 = A11.deriv(1, 2)
    expect = (
        fo.mul(d2)
        + A11.scalar(f.d_dx(1) * 2).mul(d1)
        + A11.scalar(f.d_dx(1).d_dx(1))
    )
    assert d2.mul(fo) == expect


def test_scalar_ops_multiply_pointwise(A11):
    f = A11.field.theta(1, 2)
    g = A11.field.omega(2, 1)
    assert A11.scalar(f).mul(A11.scalar(g)) == A11.scalar(f * g)
    assert A11.identity().mul(A11.scalar(f)) == A11.scalar(f)


def test_conjugation_by_function(A11):
    f = (A11.field.x(1) - A11.field.x(2)) ** 2
    finv = A11.field.one / f
    got = A11.scalar(finv).mul(A11.deriv(1)).mul(A11.scalar(f))
    expect = A11.deriv(1) + A11.scalar(f.d_dx(1) / f)
    assert got == expect


def test_swap_squares_to_identity(A11):
    p = A11.swap(1, 2)
    assert p.mul(p) == A11.identity()
    assert p.parity() == 0


def test_swap_conjugates_units(A21):
    p = A21.swap(1, 2)
    g = A21.grading
    for a in g.colors:
        for b in g.colors:
            got = p.mul(A21.unit(1, a, b)).mul(p)
            assert got == A21.unit(2, a, b), (a, b)


def test_swap_sites_relabeling(A11):
    e = A11.unit(1, 1, 2)
    assert e.swap_sites(1, 2) == A11.unit(2, 1, 2)
    w = A11.field.omega(1, 2)
    op = A11.unit(1, 2, 1, coeff=w)
    assert op.swap_sites(1, 2) == A11.unit(2, 2, 1, coeff=-w)
    # two odd units pay the reordering sign
    both = A11.unit(1, 1, 2).mul(A11.unit(2, 1, 2))
    assert both.swap_sites(1, 2) == -both


def test_parity_bookkeeping(A11):
    assert A11.unit(1, 1, 2).parity() == 1
    assert A11.unit(1, 2, 2).parity() == 0
    assert A11.zero().parity() == 0
    with pytest.raises(MixedParityError):
        (A11.unit(1, 1, 2) + A11.unit(1, 1, 1)).parity()


def test_odd_bracket_is_anticommutator(A11):
    # {e(12), e(21)} at one site = e(11) + e(22), the site identity
    lhs = A11.unit(1, 1, 2).bracket(A11.unit(1, 2, 1))
    ident_site = A11.unit(1, 1, 1) + A11.unit(1, 2, 2)
    assert lhs == ident_site


def test_substitute_lambda(A11):
    lam = A11.field.lam
    op = A11.deriv(1).scale(lam) + A11.coord(1)
    got = op.substitute_lambda(Fraction(1, 2))
    expect = A11.deriv(1).scale(Fraction(1, 2)) + A11.coord(1)
    assert got == expect


def test_term_budget_caps_products(A11):
    d1 = A11.deriv(1)
    x1 = A11.coord(1)
    with term_budget(3):
        with pytest.raises(CapExceededError):
            big = d1.mul(x1) + x1.mul(d1) + A11.swap(1, 2)
            big.mul(big)


def test_truncated_mul_matches_filtered_full(A11):
    f = A11.field.omega(1, 2)
    a = A11.deriv(1, 2).scale(f) + A11.coord(2).mul(A11.deriv(2))
    b = A11.deriv(2).scale(A11.field.theta(2, 1)) + A11.scalar(f)
    full = a.mul(b)
    for cut in (0, 1, 2, 3):
        assert a.mul(b, min_deriv=cut) == full.filtered(cut)


def rand_operator(ctx, rng, depth=0):
    pick = rng.randrange(7 if depth else 5)
    if pick == 0:
        return ctx.unit(
            rng.randint(1, ctx.N),
            rng.choice(ctx.grading.colors),
            rng.choice(ctx.grading.colors),
        )
    if pick == 1:
        return ctx.deriv(rng.randint(1, ctx.N), rng.randint(1, 2))
    if pick == 2:
        return ctx.coord(rng.randint(1, ctx.N))
    if pick == 3:
        return ctx.scalar(ctx.field.omega(*rng.sample(range(1, ctx.N + 1), 2)))
    if pick == 4:
        return ctx.swap(1, 2)
    a = rand_operator(ctx, rng, depth - 1)
    b = rand_operator(ctx, rng, depth - 1)
    return a + b if pick == 5 else a.mul(b)


def rand_state(ctx, rng, nterms=2):
    f = ctx.field
    st = {}
    for _ in range(nterms):
        colors = tuple(
            rng.choice(ctx.grading.colors) for _ in range(ctx.N)
        )
        amp = f.monomial(
            {i: rng.randint(0, 2) for i in range(ctx.N)},
            rng.randint(1, 3),
        )
        st[colors] = st.get(colors, f.zero) + amp
    return {k: v for k, v in st.items() if v}


def test_product_acts_as_composition(A11):
    rng = random.Random(61)
    for _ in range(40):
        a = rand_operator(A11, rng, depth=1)
        b = rand_operator(A11, rng, depth=1)
        st = rand_state(A11, rng)
        via_product = a.mul(b).apply_to(st)
        via_steps = a.apply_to(b.apply_to(st))
        assert via_product == via_steps


def test_associativity_random(A11):
    rng = random.Random(67)
    for _ in range(15):
        a = rand_operator(A11, rng)
        b = rand_operator(A11, rng)
        c = rand_operator(A11, rng)
        assert a.mul(b.mul(c)) == a.mul(b).mul(c)
        assert a.mul(b + c) == a.mul(b) + a.mul(c)


def test_apply_matches_unit_action(A11):
    f = A11.field
    st = {(1, 1): f.one, (2, 1): f.x(1)}
    got = A11.unit(2, 2, 1).apply_to(st)
    # e(2,2,1): site 2 color 1 -> 2; Koszul minus when site 1 holds color 2
    assert got == {(1, 2): f.one, (2, 2): -f.x(1)}
    got = A11.deriv(1).apply_to({(1, 1): f.x(1) * f.x(1)})
    assert got == {(1, 1): f.x(1) * 2}
