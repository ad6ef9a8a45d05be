"""Tests for Dirichlet and modular L-values and the symmetric-square data."""
from fractions import Fraction

import pytest
from sympy import primerange

from banana.exceptions import DomainError
from banana.lfun import (
    afe_terms,
    bernoulli_one,
    catalan_series,
    clear_sign_cache,
    dirichlet_L,
    ec_ap,
    fricke_sign,
    grossen_qexp,
    is_fundamental_discriminant,
    modular_L,
    newform_data,
    psi_grossen_ap,
    rwz_closed,
    sym2_L_value,
    sym2_local_defect,
)
from banana.qseries import newform_qexp


class TestDirichlet:
    def test_fundamental_discriminants(self):
        assert is_fundamental_discriminant(-3)
        assert is_fundamental_discriminant(-4)
        assert is_fundamental_discriminant(8)
        assert not is_fundamental_discriminant(9)
        assert not is_fundamental_discriminant(-12 * 4)

    def test_bernoulli_one(self):
        assert bernoulli_one(-3) == Fraction(-1, 3)
        assert bernoulli_one(-4) == Fraction(-1, 2)

    def test_values_at_one(self, ctx):
        mp = ctx.mp
        assert dirichlet_L(-3, 1, ctx).matches(mp.pi / (3 * mp.sqrt(3)), 28)
        assert dirichlet_L(-4, 1, ctx).matches(mp.pi / 4, 28)

    def test_catalan(self, ctx):
        assert dirichlet_L(-4, 2, ctx).matches(ctx.mp.catalan, 28)
        assert catalan_series(ctx).matches(ctx.mp.catalan, 25)

    def test_even_character_at_one_rejected(self, ctx):
        with pytest.raises(DomainError):
            dirichlet_L(8, 1, ctx)

    def test_non_fundamental_rejected(self, ctx):
        with pytest.raises(DomainError):
            dirichlet_L(9, 2, ctx)


class TestModularL:
    def test_unknown_form(self):
        with pytest.raises(DomainError):
            newform_data('h99')

    def test_afe_terms_grow_with_digits(self):
        form = newform_data('f15')
        assert afe_terms(form, 100) > afe_terms(form, 30)
        assert afe_terms(form, 30, split=Fraction(3, 2)) > afe_terms(form, 30)

    @pytest.mark.parametrize('form_id', ['f15', 'g12', 'e14'])
    def test_fricke_sign_is_plus_or_minus_one(self, ctx, form_id):
        clear_sign_cache(form_id)
        assert fricke_sign(form_id, ctx) in (1, -1)

    @pytest.mark.parametrize('form_id', ['f15', 'g12'])
    def test_closed_forms(self, ctx, form_id):
        assert modular_L(form_id, 2, ctx).matches(rwz_closed(form_id, ctx), 20)

    def test_split_independence(self, ctx):
        a = modular_L('f15', 4, ctx)
        b = modular_L('f15', 4, ctx, split=Fraction(3, 2))
        assert a.matches(b, 20)

    def test_integer_s_required(self, ctx):
        with pytest.raises(DomainError):
            modular_L('f15', 0, ctx)

    def test_no_closed_form_for_e14(self, ctx):
        with pytest.raises(DomainError):
            rwz_closed('e14', ctx)


class TestEllipticCurve:
    def test_known_traces(self):
        assert ec_ap(7) == -4
        assert ec_ap(13) == 2

    def test_supersingular_primes(self):
        for p in primerange(5, 200):
            if p % 3 == 2:
                assert ec_ap(p) == 0, p

    def test_bad_primes_rejected(self):
        with pytest.raises(DomainError):
            ec_ap(3)
        with pytest.raises(DomainError):
            ec_ap(9)


class TestSymmetricSquare:
    def test_psi_start(self):
        psi = grossen_qexp('psi', 19)
        assert psi.coefficient(1) == 1
        assert psi.coefficient(7) == -4
        assert psi.coefficient(13) == 2

    def test_psi_matches_point_counts(self):
        for p in primerange(5, 120):
            assert psi_grossen_ap(p) == ec_ap(p), p

    def test_Psi_is_g12(self):
        Psi = grossen_qexp('Psi', 200)
        g = newform_qexp('g12', 199)
        assert [n for n in range(1, 199) if Psi.coefficient(n) != g.coefficient(n)] == []

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            grossen_qexp('phi', 10)

    def test_local_factorization(self):
        assert all(d == 0 for _, d in sym2_local_defect(400))

    def test_value_needs_s_at_least_two(self, ctx):
        with pytest.raises(DomainError):
            sym2_L_value(1, ctx)
