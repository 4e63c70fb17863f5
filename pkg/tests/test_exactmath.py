import fractions

from hypothesis import given, strategies as st

from quantkmeans.exactmath import Fraction, FractionVector, sq_dist_exact

# stdlib fractions serve as the independent arithmetic oracle throughout


def as_std(f: Fraction) -> fractions.Fraction:
    return fractions.Fraction(f.num, f.den)


nonzero = st.integers(min_value=-10**6, max_value=10**6).filter(lambda v: v != 0)
anyint = st.integers(min_value=-10**6, max_value=10**6)


class TestFraction:
    def test_equality_is_value_based(self):
        assert Fraction(6, 2) == Fraction(3, 1)
        assert Fraction(1, 3) == Fraction(2, 6)
        assert Fraction(1, 3) != Fraction(2, 5)

    def test_ordering(self):
        assert Fraction(1, 3) < Fraction(2, 5)
        assert Fraction(-1, 2) < Fraction(0, 1)
        assert not Fraction(4, 2) < Fraction(2, 1)

    def test_negative_denominator_is_normalized(self):
        f = Fraction(1, -2)
        assert f.den == 2 and f.num == -1

    def test_zero_denominator_rejected(self):
        import pytest
        with pytest.raises(ZeroDivisionError):
            Fraction(1, 0)

    def test_reduce(self):
        assert Fraction(6, 4).reduced().num == 3
        assert Fraction(6, 4).reduced().den == 2
        r = Fraction(0, 7).reduced()
        assert (r.num, r.den) == (0, 1)
        r = Fraction(-6, 3).reduced()
        assert (r.num, r.den) == (-2, 1)

    def test_str_is_reduced_canonical(self):
        assert str(Fraction(12, 3)) == "4/1"
        assert str(Fraction(-6, 4)) == "-3/2"

    def test_parse(self):
        assert Fraction.parse("7/2") == Fraction(7, 2)
        assert Fraction.parse("-3") == Fraction(-3, 1)

    @given(anyint, nonzero, anyint, nonzero)
    def test_comparisons_match_stdlib(self, a, b, c, d):
        x, y = Fraction(a, b), Fraction(c, d)
        sx, sy = as_std(x), as_std(y)
        assert (x == y) == (sx == sy)
        assert (x < y) == (sx < sy)
        assert (x <= y) == (sx <= sy)
        assert (x > y) == (sx > sy)

    @given(anyint, nonzero, anyint, nonzero)
    def test_add_sub_match_stdlib(self, a, b, c, d):
        x, y = Fraction(a, b), Fraction(c, d)
        assert as_std(x + y) == as_std(x) + as_std(y)
        assert as_std(x - y) == as_std(x) - as_std(y)

    @given(anyint, nonzero)
    def test_reduce_preserves_value_and_is_coprime(self, a, b):
        from math import gcd
        f = Fraction(a, b)
        r = f.reduced()
        assert r == f
        assert gcd(r.num, r.den) == 1
        assert r.den > 0

    @given(anyint, nonzero, anyint, nonzero)
    def test_strict_total_order_trichotomy(self, a, b, c, d):
        x, y = Fraction(a, b), Fraction(c, d)
        assert sum([x < y, y < x, x == y]) == 1


class TestFractionVector:
    def test_value_equality(self):
        assert FractionVector((9, 12), 3) == FractionVector((3, 4), 1)
        assert FractionVector((1,), 2) != FractionVector((1,), 3)

    def test_reduced(self):
        v = FractionVector((6, 9), 12).reduced()
        assert v.nums == (2, 3) and v.den == 4

    def test_components(self):
        v = FractionVector((9, 12), 3)
        assert v.component(0) == Fraction(3, 1)
        assert str(v) == "3/1 4/1"

    def test_elementwise_extrema(self):
        a = FractionVector((1, 5), 1)
        b = FractionVector((2, 3), 1)
        assert a.elementwise_max(b) == FractionVector((2, 5), 1)
        assert a.elementwise_min(b) == FractionVector((1, 3), 1)

    def test_elementwise_returns_dominating_input(self):
        a = FractionVector((5, 5), 1)
        b = FractionVector((1, 2), 1)
        assert a.elementwise_max(b) is a
        assert a.elementwise_min(b) is b

    @given(st.lists(st.tuples(anyint, anyint), min_size=1, max_size=4),
           nonzero, nonzero)
    def test_elementwise_matches_stdlib(self, pairs, da, db):
        xs = [p[0] for p in pairs]
        ys = [p[1] for p in pairs]
        a, b = FractionVector(xs, da), FractionVector(ys, db)
        top = a.elementwise_max(b)
        bot = a.elementwise_min(b)
        for i in range(len(pairs)):
            fa = fractions.Fraction(a.nums[i], a.den)
            fb = fractions.Fraction(b.nums[i], b.den)
            assert as_std(top.component(i)) == max(fa, fb)
            assert as_std(bot.component(i)) == min(fa, fb)


class TestSquaredDistance:
    def test_examples(self):
        assert sq_dist_exact((0, 0), FractionVector((1, 0), 1)) == Fraction(1, 1)
        assert sq_dist_exact((2, 2), FractionVector((1, 1), 1)) == Fraction(2, 1)
        assert sq_dist_exact((3,), FractionVector((7,), 2)) == Fraction(1, 4)

    def test_dimension_mismatch(self):
        import pytest
        with pytest.raises(ValueError):
            sq_dist_exact((1, 2), FractionVector((1,), 1))

    @given(st.lists(st.tuples(anyint, anyint), min_size=1, max_size=3))
    def test_symmetric_for_integer_points(self, pairs):
        x = tuple(p[0] for p in pairs)
        c = tuple(p[1] for p in pairs)
        forward = sq_dist_exact(x, FractionVector(c, 1))
        backward = sq_dist_exact(c, FractionVector(x, 1))
        assert forward == backward

    @given(st.lists(st.tuples(anyint, anyint), min_size=1, max_size=3))
    def test_zero_iff_equal(self, pairs):
        x = tuple(p[0] for p in pairs)
        c = tuple(p[1] for p in pairs)
        dist = sq_dist_exact(x, FractionVector(c, 1))
        assert (dist == Fraction(0, 1)) == (x == c)

    @given(st.lists(st.tuples(anyint, anyint), min_size=1, max_size=3), nonzero)
    def test_matches_stdlib(self, pairs, den):
        x = tuple(p[0] for p in pairs)
        c = FractionVector(tuple(p[1] for p in pairs), den)
        expected = sum(
            (fractions.Fraction(xi) - fractions.Fraction(ci, c.den)) ** 2
            for xi, ci in zip(x, c.nums))
        assert as_std(sq_dist_exact(x, c)) == expected
