import itertools
from fractions import Fraction

import pytest

from psinv.core import Alphabet
from psinv.lattice2d import (GAMMA0, GAMMA2, SQUARE_CELLS, Shape, SquareJRM,
                             bold_z, bold_z_partial, bold_z_table,
                             check_bold_z_sufficient, check_multinomial_preservation,
                             check_product_2d, check_product_2d_incremental,
                             growth_difference, hypercube, line_balance_2d,
                             truncated_poisson, _anchors_meeting)
from psinv.oracle import TorusSpace, build_generator, product_measure, stationarity_residual
from psinv.models import ball_move_2d, flip_2d, pair_flip_2d, rotation_2d, three_colour_flip_2d

F = Fraction


def random_square(rng, kappa=2, entries=3):
    alphabet = Alphabet(kappa)
    words = list(alphabet.words(4))
    pairs = [(u, v) for u in words for v in words if u != v]
    chosen = rng.sample(pairs, entries)
    return SquareJRM(alphabet, {key: F(rng.randint(1, 9), rng.randint(1, 9))
                                for key in chosen})


def row_tasep_square():
    """Top-row exclusion: invariant products exist although the square
    balance table does not vanish."""
    rates = {}
    for w in (0, 1):
        for z in (0, 1):
            rates[((1, 0, w, z), (0, 1, w, z))] = F(1)
    return SquareJRM(Alphabet(2), rates)


class TestBoldZ:
    def test_zero_dynamics(self):
        T2 = SquareJRM(Alphabet(2), {})
        assert all(v == 0 for v in bold_z_table(T2, [F(1, 2), F(1, 2)]).values())

    def test_flip_model_balanced_at_half(self):
        T2 = flip_2d(1).square
        assert bold_z(T2, [F(1, 2), F(1, 2)], (0, 0, 0, 1)) == 0

    def test_flip_model_density_root(self):
        # the balance polynomial a p^2 - p^2 + 2p - 1 has root p = 1/(sqrt(a)+1)
        a, p = F(4), F(1, 3)
        assert a * p ** 2 - p ** 2 + 2 * p - 1 == 0
        T2 = flip_2d(a).square
        table = bold_z_table(T2, [1 - p, p])
        assert all(v == 0 for v in table.values())

    def test_full_support_required(self):
        with pytest.raises(ValueError):
            bold_z_table(flip_2d(1).square, [F(1), F(0)])


class TestBoldZPartial:
    def test_full_overlap_is_bold_z(self, rng):
        T2 = random_square(rng)
        rho = [F(1, 3), F(2, 3)]
        table = bold_z_table(T2, rho)
        for pattern in Alphabet(2).words(4):
            overlap = dict(zip(SQUARE_CELLS, pattern))
            assert bold_z_partial(T2, rho, overlap, table) == table[pattern]

    def test_zero_dynamics(self):
        T2 = SquareJRM(Alphabet(2), {})
        assert bold_z_partial(T2, [F(1, 2), F(1, 2)], {(0, 0): 1}) == 0

    def test_single_cell_matches_brute_force(self, rng):
        T2 = random_square(rng)
        rho = [F(1, 4), F(3, 4)]
        table = bold_z_table(T2, rho)
        for cell in SQUARE_CELLS:
            for letter in (0, 1):
                expected = F(0)
                free = [c for c in SQUARE_CELLS if c != cell]
                for letters in itertools.product((0, 1), repeat=3):
                    w = dict(zip(free, letters))
                    w[cell] = letter
                    pattern = tuple(w[c] for c in SQUARE_CELLS)
                    weight = F(1)
                    for c in free:
                        weight *= rho[w[c]]
                    expected += table[pattern] * weight
                assert bold_z_partial(T2, rho, {cell: letter}, table) == expected


class TestLineBalance2D:
    def test_zero_dynamics(self):
        T2 = SquareJRM(Alphabet(2), {})
        for x in Alphabet(2).words(3):
            assert line_balance_2d(T2, [F(1, 2), F(1, 2)], GAMMA0, x) == 0

    def test_corner_shape_has_eight_squares(self):
        assert len(_anchors_meeting(GAMMA0)) == 8

    def test_invariant_model_kills_all_subshapes(self):
        T2 = flip_2d(4).square
        rho = [F(2, 3), F(1, 3)]
        table = bold_z_table(T2, rho)
        for size in range(1, len(GAMMA2) + 1):
            for cells in itertools.combinations(GAMMA2.cells, size):
                shape = Shape(cells)
                for x in Alphabet(2).words(size):
                    assert line_balance_2d(T2, rho, shape, x, table) == 0

    def test_growth_difference_matches_balances(self, rng):
        # adding one cell changes the balance by the four-square difference
        block = hypercube(3)
        for _ in range(6):
            T2 = random_square(rng)
            rho = [F(1, 3), F(2, 3)]
            table = bold_z_table(T2, rho)
            cells = tuple(rng.sample(block.cells, rng.randint(1, 4)))
            shape = Shape(cells)
            outside = [c for c in block.cells if c not in shape]
            cell = rng.choice(outside)
            grown = Shape(cells + (cell,))
            for x in Alphabet(2).words(len(grown)):
                restriction = tuple(dict(zip(grown.cells, x))[c] for c in shape.cells)
                direct = line_balance_2d(T2, rho, grown, x, table) - \
                    line_balance_2d(T2, rho, shape, restriction, table)
                assert growth_difference(T2, rho, shape, cell, x, table) == direct


class TestCheckProduct2D:
    def test_flip_model_root_invariant(self):
        report = check_product_2d(flip_2d(4).square, [F(2, 3), F(1, 3)])
        assert report.invariant

    def test_flip_model_other_density_not(self):
        report = check_product_2d(flip_2d(4).square, [F(1, 2), F(1, 2)])
        assert not report.invariant

    def test_pair_flip_all_or_nothing(self):
        assert check_product_2d(pair_flip_2d(3, 3).square, [F(1, 5), F(4, 5)]).invariant
        assert not check_product_2d(pair_flip_2d(1, 2).square, [F(1, 2), F(1, 2)]).invariant

    def test_rotation_model(self):
        assert check_product_2d(rotation_2d(2, 2, 2, 2).square, [F(1, 3), F(2, 3)]).invariant
        assert not check_product_2d(rotation_2d(2, 1, 2, 2).square, [F(1, 2), F(1, 2)]).invariant

    def test_three_colour_quartic_family(self):
        # invariance requires a_i rho_i^4 constant: rates (1, 1, 16) with
        # marginals (2/5, 2/5, 1/5) satisfy it
        spec = three_colour_flip_2d(1, 1, 16)
        assert check_product_2d(spec.square, [F(2, 5), F(2, 5), F(1, 5)]).invariant
        assert not check_product_2d(spec.square, [F(1, 3), F(1, 3), F(1, 3)]).invariant

    def test_matches_torus_oracle(self, rng):
        cases = [
            (flip_2d(4).square, [F(2, 3), F(1, 3)]),
            (flip_2d(4).square, [F(1, 2), F(1, 2)]),
            (pair_flip_2d(1, 2).square, [F(1, 2), F(1, 2)]),
            (rotation_2d(1, 1, 1, 1).square, [F(1, 4), F(3, 4)]),
            (row_tasep_square(), [F(1, 3), F(2, 3)]),
            (random_square(rng), [F(1, 2), F(1, 2)]),
        ]
        for T2, rho in cases:
            report = check_product_2d(T2, rho)
            gen = build_generator(T2, TorusSpace(3))
            residual = stationarity_residual(gen, product_measure(rho, 9))
            assert report.invariant == (residual == 0)

    def test_matches_torus_oracle_n4(self):
        # 65536-state torus: the criterion verdicts survive the larger wrap
        good = flip_2d(4).square
        rho = [F(2, 3), F(1, 3)]
        assert check_product_2d(good, rho).invariant
        gen = build_generator(good, TorusSpace(4))
        assert stationarity_residual(gen, product_measure(rho, 16)) == 0
        bad = pair_flip_2d(1, 2).square
        uniform = [F(1, 2), F(1, 2)]
        assert not check_product_2d(bad, uniform).invariant
        gen_bad = build_generator(bad, TorusSpace(4))
        assert stationarity_residual(gen_bad, product_measure(uniform, 16)) != 0

    def test_incremental_variant_agrees(self, rng):
        cases = [
            (flip_2d(4).square, [F(2, 3), F(1, 3)]),
            (pair_flip_2d(1, 2).square, [F(1, 2), F(1, 2)]),
            (random_square(rng), [F(2, 5), F(3, 5)]),
        ]
        for T2, rho in cases:
            assert check_product_2d_incremental(T2, rho).invariant == \
                check_product_2d(T2, rho).invariant


class TestBoldZSufficient:
    def test_detailed_balance_instance(self):
        assert check_bold_z_sufficient(flip_2d(4).square, [F(2, 3), F(1, 3)])

    def test_sufficient_not_necessary(self):
        # row-wise exclusion flow: product invariant, balance table nonzero
        T2 = row_tasep_square()
        rho = [F(1, 3), F(2, 3)]
        assert not check_bold_z_sufficient(T2, rho)
        assert check_product_2d(T2, rho).invariant

    def test_zero_dynamics(self):
        assert check_bold_z_sufficient(SquareJRM(Alphabet(2), {}), [F(1, 2), F(1, 2)])


class TestMultinomial:
    def test_truncated_poisson_exact(self):
        rho = truncated_poisson(F(1), 3)
        assert rho == [F(2, 5), F(2, 5), F(1, 5)]

    def test_ball_move_interior_invariant(self):
        # undirected redistribution: dropped in- and out-jumps mirror each
        # other, so even the truncation boundary balances exactly
        spec = ball_move_2d(5)
        report = check_multinomial_preservation(spec.square, lam=F(1))
        assert report.interior_invariant
        assert not report.boundary_residuals

    def test_ball_cycle_truncation_residuals_reported(self):
        from psinv.models import ball_cycle_2d
        spec = ball_cycle_2d(4)
        report = check_multinomial_preservation(spec.square, lam=F(1))
        assert report.interior_invariant
        assert report.boundary_residuals  # directed moves leave a visible edge

    def test_ball_move_weighted(self):
        spec = ball_move_2d(4, weight=lambda m: F(m))
        report = check_multinomial_preservation(spec.square, lam=F(1, 2))
        assert report.interior_invariant

    def test_urn_shift_interior_invariant(self):
        from psinv.models import urn_shift_2d
        spec = urn_shift_2d(4)
        report = check_multinomial_preservation(spec.square, lam=F(2))
        assert report.interior_invariant

    def test_zero_weight_trivial(self):
        T2 = SquareJRM(Alphabet(3), {})
        report = check_multinomial_preservation(T2, lam=F(1))
        assert report.interior_invariant
        assert not report.boundary_residuals

    def test_mass_preservation_required(self):
        with pytest.raises(ValueError):
            check_multinomial_preservation(flip_2d(1).square, lam=F(1))
