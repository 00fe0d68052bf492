from fractions import Fraction

import pytest

from psinv.core import Alphabet, JumpRateMatrix, MarkovKernel
from psinv.criteria import check_product_line, product_context, z_table
from psinv.search import (TripleMeasure, candidate_kernels, find_markov, find_product,
                          kernel_from_ratios, ratio_table, solve_cycle3_system,
                          triple_from_kernel)
from psinv.models import kappa2_general, tasep, tasep3

from conftest import random_kernel

F = Fraction


def in_family(family, point):
    """Membership of a point in an affine family: solve for coefficients."""
    sol = family.solution
    if sol.status == "empty":
        return False
    diff = [p - q for p, q in zip(point, sol.particular)]
    if sol.dimension == 0:
        return all(d == 0 for d in diff)
    A = [[sol.basis[k][i] for k in range(sol.dimension)] for i in range(len(diff))]
    from psinv.linalg import solve_linear
    return solve_linear(A, diff).status != "empty"


class TestTripleMeasure:
    def test_rotation_validation(self):
        nu = {w: F(1, 8) for w in Alphabet(2).words(3)}
        TripleMeasure(2, nu)
        nu[(0, 0, 1)] = F(1, 4)
        nu[(0, 1, 1)] = F(0)
        with pytest.raises(ValueError):
            TripleMeasure(2, nu)

    def test_from_kernel_is_valid(self, rng):
        for _ in range(5):
            nu = triple_from_kernel(random_kernel(rng, kappa=3))
            assert nu.is_positive


class TestCycle3System:
    def test_zero_dynamics_allows_uniform(self):
        T = JumpRateMatrix(Alphabet(2), 2, {})
        family = solve_cycle3_system(T)
        uniform = tuple(F(1, 8) for _ in range(8))
        assert in_family(family, uniform)

    def test_tasep_contains_every_bernoulli(self):
        family = solve_cycle3_system(tasep().jrm)
        for p in (F(1, 5), F(1, 2), F(7, 9)):
            kernel = MarkovKernel.from_matrix([[1 - p, p], [1 - p, p]])
            nu = triple_from_kernel(kernel)
            point = tuple(nu.nu[w] for w in family.variables)
            assert in_family(family, point)

    def test_range_checked(self):
        with pytest.raises(ValueError):
            solve_cycle3_system(JumpRateMatrix(Alphabet(2), 3, {}))


class TestCandidateKernels:
    def test_round_trip_recovers_kernel(self, rng):
        for kappa in (2, 3):
            for _ in range(10):
                M = random_kernel(rng, kappa=kappa)
                nu = triple_from_kernel(M)
                result = candidate_kernels(JumpRateMatrix(Alphabet(kappa), 2, {}), nu)
                assert len(result.candidates) == 1
                cand = result.candidates[0]
                assert cand.exact
                assert cand.kernel.matrix() == M.matrix()

    def test_uniform_triple_gives_uniform_kernel(self):
        nu = TripleMeasure(2, {w: F(1, 8) for w in Alphabet(2).words(3)})
        result = candidate_kernels(tasep().jrm, nu)
        assert result.candidates[0].kernel.matrix() == \
            [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]

    def test_non_positive_triple_skipped(self):
        nu_map = {w: F(0) for w in Alphabet(2).words(3)}
        nu_map[(0, 0, 0)] = F(1, 2)
        nu_map[(1, 1, 1)] = F(1, 2)
        nu = TripleMeasure(2, nu_map)
        result = candidate_kernels(tasep().jrm, nu)
        assert not result.candidates

    def test_invalid_triple_rejected(self, rng):
        # perturbing one rotation class breaks the product structure: either
        # the eigenvalues split or the verification fails, never a bad kernel
        M = random_kernel(rng, kappa=2)
        nu = dict(triple_from_kernel(M).nu)
        eps = F(1, 50)
        for w in ((0, 0, 1), (0, 1, 0), (1, 0, 0)):
            nu[w] = nu[w] + eps
        for w in ((0, 1, 1), (1, 1, 0), (1, 0, 1)):
            nu[w] = nu[w] - eps
        measure = TripleMeasure(2, nu)
        result = candidate_kernels(tasep().jrm, measure)
        for cand in result.candidates:
            rebuilt = triple_from_kernel(cand.kernel)
            assert all(rebuilt.nu[w] == nu[w] for w in nu)


class TestFindMarkov:
    def test_zero_dynamics_all_kernels(self):
        report = find_markov(JumpRateMatrix(Alphabet(2), 2, {}))
        assert report.all_kernels

    def test_tasep_product_family(self):
        report = find_markov(tasep().jrm)
        invariant = [c for c in report.candidates if c.line_report.invariant]
        assert invariant
        for cand in invariant:
            rows = cand.kernel.matrix()
            assert rows[0] == rows[1]  # constant rows: an i.i.d. law
        assert any("Bernoulli" in note for note in report.notes)

    def test_emitted_kernels_kill_length3_cycles(self):
        report = find_markov(tasep().jrm)
        for cand in report.candidates:
            ctx_nu = triple_from_kernel(cand.kernel)
            family = solve_cycle3_system(tasep().jrm)
            point = tuple(ctx_nu.nu[w] for w in family.variables)
            assert in_family(family, point)

    def test_mass_preserving_two_colours_only_iid(self, rng):
        # exchange dynamics: the only invariant laws are the i.i.d. ones
        T = kappa2_general({1: {2: F(1)}, 2: {1: F(3)}}).jrm
        report = find_markov(T)
        for cand in report.candidates:
            if cand.line_report.invariant:
                rows = cand.kernel.matrix()
                assert rows[0] == rows[1]
        for cand in report.numeric_candidates:
            if cand.line_report.invariant:
                rows = cand.kernel.matrix()
                assert max(abs(a - b) for a, b in zip(rows[0], rows[1])) < 1e-8


class TestFindProduct:
    def test_tasep_all_bernoulli(self):
        report = find_product(tasep().jrm)
        assert report.bernoulli_all
        assert report.candidates
        for rho, line_report in report.candidates:
            assert line_report.invariant

    def test_output_closure(self):
        # every emitted marginal kills the symmetrized balance table and the
        # length-3 cycles of the original dynamics
        report = find_product(tasep().jrm)
        for rho, _ in report.candidates:
            table = z_table(product_context(report.symmetrized, list(rho)))
            assert all(v == 0 for v in table.values.values())
            assert check_product_line(tasep().jrm, list(rho)).invariant

    def test_three_colour_uniform_rates_empty(self):
        report = find_product(tasep3(1, 1, 1).jrm)
        assert not report.candidates

    def test_three_colour_conservative_rates_found(self):
        report = find_product(tasep3(1, 2, 1).jrm)
        assert report.candidates

    def test_zero_dynamics(self):
        report = find_product(JumpRateMatrix(Alphabet(2), 2, {}))
        assert report.bernoulli_all

    def test_bernoulli_root_extraction(self):
        # pair creation/annihilation balances only at a specific density:
        # 00 -> 11 at rate 1 and 11 -> 00 at rate 9 need p/(1-p) = 1/3
        T = JumpRateMatrix(Alphabet(2), 2, {((0, 0), (1, 1)): 1, ((1, 1), (0, 0)): 9})
        report = find_product(T)
        assert not report.bernoulli_all
        assert F(1, 4) in report.bernoulli_roots
        assert any(rho == (F(3, 4), F(1, 4)) for rho, _ in report.candidates)


class TestRatioTables:
    def test_round_trip(self, rng):
        for kappa in (2, 3):
            for _ in range(5):
                M = random_kernel(rng, kappa=kappa)
                F_table = ratio_table(M)
                rebuilt = kernel_from_ratios(F_table, kappa)
                assert rebuilt.matrix() == M.matrix()

    def test_all_ones_gives_uniform(self):
        kappa = 2
        table = {}
        for key in ratio_table(MarkovKernel.from_matrix(
                [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]])):
            table[key] = F(1)
        kernel = kernel_from_ratios(table, kappa)
        assert kernel.matrix() == [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]

    def test_inconsistent_table_rejected(self, rng):
        M = random_kernel(rng, kappa=2)
        table = ratio_table(M)
        key = ((0, 1, 1, 0), (0, 0))
        table[key] = table[key] * F(3, 2)
        with pytest.raises(ValueError):
            kernel_from_ratios(table, 2)

    def test_non_unit_diagonal_rejected(self, rng):
        M = random_kernel(rng, kappa=2)
        table = ratio_table(M)
        table[((0, 0, 0, 0), (0, 0))] = F(2)
        with pytest.raises(ValueError, match="must be 1"):
            kernel_from_ratios(table, 2)
