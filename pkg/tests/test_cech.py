import random
from fractions import Fraction

import pytest

from conftest import cn_data
from helpers import random_closed_cochain, random_cochain, random_polynomial
from toriclg import (
    SRPolynomial,
    constant_total_cohomology,
    cup,
    forms_total_cohomology,
    glue_sections,
    restrict,
    split_cocycle,
    split_cocycle_generic,
    verify_exactness,
    verify_quasi_iso,
)
from toriclg import linalg
from toriclg.cech import (
    TAG_CONST,
    TAG_FORMS,
    TAG_FUNCTIONS,
    CechError,
    CoverSimplex,
    cech_delta,
    const_total_blocks_from_vector,
    const_total_vector,
    total_cup,
)
from toriclg.fan import fan_from_data


@pytest.fixture(scope="module")
def covers(suite):
    return {name: CoverSimplex(fan) for name, fan in suite.items()}


class TestCoverValidation:
    def test_missing_max_cone_rejected(self, p2):
        with pytest.raises(CechError, match="misses"):
            CoverSimplex(p2, [p2.cone([1, 2]), p2.cone([2, 3])])

    def test_extra_cones_allowed(self, p2):
        cs = CoverSimplex(p2, list(p2.max_cones) + [p2.cone([1])])
        assert cs.size == 4

    def test_large_cover_guard(self, p1xp1):
        cones = list(p1xp1.all_cones)
        assert len(cones) == 9
        with pytest.raises(CechError, match="allow_large"):
            CoverSimplex(p1xp1, cones)
        cs = CoverSimplex(p1xp1, cones, allow_large=True)
        assert cs.size == 9


class TestDelta:
    def test_p1_degree2_is_zero_map(self, covers):
        mat = cech_delta(covers["p1"], TAG_FUNCTIONS, 0, 0, 2)
        assert mat.shape == (0, 2) and mat.is_zero()

    def test_p1_degree0(self, covers):
        mat = cech_delta(covers["p1"], TAG_FUNCTIONS, 0, 0, 0)
        assert mat.to_rows() == [[Fraction(-1), Fraction(1)]]

    def test_delta_squared_zero_all_tags(self, covers):
        for name, cs in covers.items():
            n = cs.fan.rank
            for tag, ks in ((TAG_FUNCTIONS, [0]), (TAG_FORMS, range(n + 1)),
                            (TAG_CONST, range(n + 1))):
                for k in ks:
                    for m in ((0, 2, 4) if tag != TAG_CONST else (0,)):
                        for p in range(cs.size - 1):
                            a = cs.delta_matrix(tag, p, k, m)
                            b = cs.delta_matrix(tag, p + 1, k, m)
                            assert (b @ a).is_zero(), (name, tag, p, k, m)

    def test_delta_commutes_with_vertical(self, covers):
        for name, cs in covers.items():
            n = cs.fan.rank
            for p in range(cs.size - 1):
                for k in range(1, n + 1):
                    for m in (0, 2):
                        left = cs.delta_matrix(TAG_FORMS, p, k - 1, m + 2) @ cs.vertical_matrix(p, k, m)
                        right = cs.vertical_matrix(p + 1, k, m) @ cs.delta_matrix(TAG_FORMS, p, k, m)
                        assert left == right, (name, p, k, m)


class TestExactness:
    def test_suite_small_degrees(self, covers):
        for name, cs in covers.items():
            rep = verify_exactness(cs, 4)
            assert rep.exact, name

    def test_forms_tag_slotwise(self, covers):
        cs = covers["p2"]
        for k in (1, 2):
            rep = verify_exactness(cs, 4, exterior_degree=k)
            assert rep.exact

    def test_single_cone_cover_trivial(self):
        fan = fan_from_data(**cn_data(2))
        cs = CoverSimplex(fan)
        rep = verify_exactness(cs, 6)
        assert rep.exact
        assert cs.size == 1

    def test_report_structure(self, covers):
        rep = verify_exactness(covers["p1"], 2)
        assert rep.augmentation[0]["injective"]
        assert rep.entries[(2, 1)]["exact"]


class TestGlue:
    def test_p1_example(self, p1, covers):
        one = SRPolynomial.one(p1)
        g1 = one + SRPolynomial.variable(p1, 1)
        g2 = one + SRPolynomial.variable(p1, 2)
        assert str(glue_sections(covers["p1"], [g1, g2])) == "z1 + z2 + 1"

    def test_constant_cochain(self, covers):
        for name, cs in covers.items():
            c = SRPolynomial.one(cs.fan).scale(Fraction(7, 3))
            comps = [restrict(c, cone) for cone in cs.cover]
            assert glue_sections(cs, comps) == c

    def test_cxp1_example(self, cxp1, covers):
        z1 = SRPolynomial.variable(cxp1, 1)
        z2 = SRPolynomial.variable(cxp1, 2)
        z3 = SRPolynomial.variable(cxp1, 3)
        glued = glue_sections(covers["c_x_p1"], [z1 + z2, z1 + z3])
        assert glued == z1 + z2 + z3

    def test_disagreement_rejected(self, p1, covers):
        one = SRPolynomial.one(p1)
        with pytest.raises(CechError, match="disagree"):
            glue_sections(covers["p1"], [one, SRPolynomial.zero(p1)])

    def test_random_global_sections_roundtrip(self, covers):
        rng = random.Random(61)
        for name, cs in covers.items():
            for _ in range(10):
                g = random_polynomial(rng, cs.fan)
                comps = [restrict(g, cone) for cone in cs.cover]
                glued = glue_sections(cs, comps)
                for comp, cone in zip(comps, cs.cover):
                    assert restrict(glued, cone) == comp


class TestSplit:
    def test_roundtrip_staged_and_generic(self, covers):
        rng = random.Random(67)
        for name, cs in covers.items():
            for p in range(1, min(3, cs.size - 1) + 1):
                for m in (0, 2, 4):
                    g = random_closed_cochain(rng, cs, TAG_FUNCTIONS, p, 0, m)
                    h = split_cocycle(cs, g)
                    assert cs.cochain_to_vector(cs.cochain_delta(h)) == cs.cochain_to_vector(g)
                    h2 = split_cocycle_generic(cs, g)
                    assert cs.cochain_to_vector(cs.cochain_delta(h2)) == cs.cochain_to_vector(g)

    def test_zero_maps_to_zero(self, covers):
        cs = covers["p2"]
        g = cs.zero_cochain(TAG_FUNCTIONS, 1, 0, 2)
        h = split_cocycle(cs, g)
        assert all(linalg.is_zero_vector(v) for v in h.components.values())

    def test_not_closed_rejected(self, covers):
        # at m = 0 the top Cech space of the three-cone cover is nonzero,
        # so non-closed 1-cochains exist
        cs = covers["p2"]
        rng = random.Random(71)
        g = None
        for _ in range(50):
            cand = random_cochain(rng, cs, TAG_FUNCTIONS, 1, 0, 0)
            if not linalg.is_zero_vector(cs.cochain_to_vector(cs.cochain_delta(cand))):
                g = cand
                break
        assert g is not None
        with pytest.raises(CechError, match="not closed"):
            split_cocycle(cs, g)


class TestTotals:
    def test_p1_constant_forms(self, covers):
        assert constant_total_cohomology(covers["p1"], 2).dims == (1, 0, 1)

    def test_zero_fan_full_exterior_algebra(self, covers):
        cs = covers["zero2"]
        assert constant_total_cohomology(cs, 3).dims == (1, 2, 1, 0)

    def test_cxp1(self, covers):
        assert constant_total_cohomology(covers["c_x_p1"], 2).dims == (1, 0, 1)

    def test_total_differentials_square_to_zero(self, covers):
        for name, cs in covers.items():
            for t in range(2 * cs.fan.rank + 2):
                assert (cs.forms_total_matrix(t + 1) @ cs.forms_total_matrix(t)).is_zero()
                assert (cs.const_total_matrix(t + 1) @ cs.const_total_matrix(t)).is_zero()

    def test_alternative_sign_convention_same_dims(self, covers):
        # D' = vertical + (-1)^k delta also squares to zero and yields the
        # same cohomology dimensions
        cs = covers["c_x_p1"]
        t_max = 6

        def alt_total(t):
            src = cs.forms_total_blocks(t)
            dst = cs.forms_total_blocks(t + 1)
            dst_pos = {b: i for i, b in enumerate(dst)}
            row_sizes = [cs.slot_layout(TAG_FORMS, *b)[0] for b in dst]
            col_sizes = [cs.slot_layout(TAG_FORMS, *b)[0] for b in src]
            blocks = {}
            for j, (p, k, m) in enumerate(src):
                if (p + 1, k, m) in dst_pos:
                    d = cs.delta_matrix(TAG_FORMS, p, k, m)
                    if k % 2:
                        d = d.scale(-1)
                    blocks[(dst_pos[(p + 1, k, m)], j)] = d
                if k >= 1 and (p, k - 1, m + 2) in dst_pos:
                    blocks[(dst_pos[(p, k - 1, m + 2)], j)] = cs.vertical_matrix(p, k, m)
            return linalg.block_matrix(row_sizes, col_sizes, blocks)

        for t in range(t_max):
            assert (alt_total(t + 1) @ alt_total(t)).is_zero()
        base = forms_total_cohomology(cs, t_max).dims
        alt = []
        for t in range(t_max + 1):
            d_in = alt_total(t - 1) if t else linalg.RationalMatrix.zeros(
                sum(cs.slot_layout(TAG_FORMS, *b)[0] for b in cs.forms_total_blocks(0)), 0)
            alt.append(linalg.cohomology_at(d_in, alt_total(t)).dim)
        assert tuple(alt) == base


class TestQuasiIso:
    def test_p1(self, covers):
        rep = verify_quasi_iso(covers["p1"])
        assert rep.agree
        assert rep.dims_twisted == (1, 0, 1, 0, 0)

    def test_cn(self):
        fan = fan_from_data(**cn_data(3))
        rep = verify_quasi_iso(CoverSimplex(fan))
        assert rep.agree
        assert rep.dims_twisted[0] == 1 and all(d == 0 for d in rep.dims_twisted[1:])

    def test_p2(self, covers):
        rep = verify_quasi_iso(covers["p2"])
        assert rep.agree
        assert rep.dims_twisted == (1, 0, 1, 0, 1, 0, 0)

    def test_repeated_intersection_cover(self, p2):
        # adding a face to the cover repeats simplex cones; nothing breaks
        cs = CoverSimplex(p2, list(p2.max_cones) + [p2.cone([1])])
        cones = [cs.cone_of(tau) for tau in cs.simplices(1)]
        assert len(set(cones)) < len(cones)
        assert verify_exactness(cs, 4).exact
        rep = verify_quasi_iso(cs)
        assert rep.agree
        assert rep.dims_const_total == (1, 0, 1, 0, 1, 0, 0)

    def test_rank_three_product_fan(self):
        # projective line times an affine plane
        fan = fan_from_data(3, [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, 0, 1]],
                            [[1, 3, 4], [2, 3, 4]])
        cs = CoverSimplex(fan)
        assert verify_exactness(cs, 6).exact
        rep = verify_quasi_iso(cs)
        assert rep.agree
        assert rep.dims_twisted == (1, 0, 1, 0, 0, 0, 0, 0, 0)

    def test_half_plane_fan(self):
        fan = fan_from_data(2, [[1, 0], [0, 1], [-1, 0]], [[1, 2], [2, 3]])
        rep = verify_quasi_iso(CoverSimplex(fan))
        assert rep.agree
        assert rep.dims_twisted == (1, 0, 1, 0, 0, 0, 0)


class TestCup:
    def test_unit_cochain_acts_trivially(self, covers):
        rng = random.Random(73)
        for name, cs in covers.items():
            unit = cs.functions_cochain(
                0, 0, {tau: SRPolynomial.one(cs.fan) for tau in cs.simplices(0)})
            beta = random_cochain(rng, cs, TAG_FUNCTIONS, min(1, cs.size - 1), 0, 2)
            prod = cup(cs, unit, beta)
            assert cs.cochain_to_vector(prod) == cs.cochain_to_vector(beta)

    def test_pointwise_products_degree_zero(self, covers, p1):
        cs = covers["p1"]
        z1 = SRPolynomial.variable(p1, 1)
        z2 = SRPolynomial.variable(p1, 2)
        a = cs.functions_cochain(0, 2, {(0,): z1, (1,): z2})
        prod = cup(cs, a, a)
        polys = cs.poly_components(prod)
        assert polys[(0,)] == restrict(z1 * z1, p1.cone([1]))
        assert polys[(1,)] == restrict(z2 * z2, p1.cone([2]))

    def test_leibniz_functions(self, covers):
        rng = random.Random(79)
        for name, cs in covers.items():
            if cs.size < 2:
                continue
            for (p, q, ma, mb) in ((0, 0, 2, 2), (0, 1, 2, 0), (1, 0, 0, 2)):
                a = random_cochain(rng, cs, TAG_FUNCTIONS, p, 0, ma)
                b = random_cochain(rng, cs, TAG_FUNCTIONS, q, 0, mb)
                lhs = cs.cochain_to_vector(cs.cochain_delta(cup(cs, a, b)))
                t1 = cs.cochain_to_vector(cup(cs, cs.cochain_delta(a), b))
                t2 = cs.cochain_to_vector(cup(cs, a, cs.cochain_delta(b)))
                sign = -1 if p % 2 else 1
                rhs = linalg.add_vectors(t1, linalg.scale_vector(sign, t2))
                assert lhs == rhs, (name, p, q)

    def test_leibniz_const(self, covers):
        rng = random.Random(83)
        cs = covers["p1xp1"]
        for (p, ka, q, kb) in ((0, 1, 0, 1), (0, 1, 1, 0), (1, 1, 0, 1)):
            a = random_cochain(rng, cs, TAG_CONST, p, ka, 0)
            b = random_cochain(rng, cs, TAG_CONST, q, kb, 0)
            lhs = cs.cochain_to_vector(cs.cochain_delta(cup(cs, a, b)))
            t1 = cs.cochain_to_vector(cup(cs, cs.cochain_delta(a), b))
            t2 = cs.cochain_to_vector(cup(cs, a, cs.cochain_delta(b)))
            sign = -1 if (p + ka) % 2 else 1
            rhs = linalg.add_vectors(t1, linalg.scale_vector(sign, t2))
            assert lhs == rhs

    def test_total_leibniz_forms(self, covers):
        # the full double-complex differential D = delta + (-1)^p vertical
        # is a derivation for the cup product with sign (-1)^(p + k)
        rng = random.Random(89)
        cs = covers["c_x_p1"]

        def total_d(c):
            out = {}
            d = cs.cochain_delta(c)
            out[(c.p + 1, c.k, c.m)] = d
            if c.k >= 1:
                vec = cs.vertical_matrix(c.p, c.k, c.m).mul_vec(cs.cochain_to_vector(c))
                if c.p % 2:
                    vec = linalg.scale_vector(-1, vec)
                out[(c.p, c.k - 1, c.m + 2)] = cs.cochain_from_vector(
                    TAG_FORMS, c.p, c.k - 1, c.m + 2, vec)
            return out

        def cup_blocks(xs, ys):
            acc = {}
            for x in xs.values():
                for y in ys.values():
                    if x.k + y.k > cs.fan.rank:
                        continue
                    prod = cup(cs, x, y)
                    key = (prod.p, prod.k, prod.m)
                    if key in acc:
                        prev = acc[key]
                        acc[key] = CechCochain(TAG_FORMS, prod.p, prod.k, prod.m, {
                            tau: linalg.add_vectors(prev.components[tau], prod.components[tau])
                            for tau in prev.components})
                    else:
                        acc[key] = prod
            return acc

        def as_vectors(blocks):
            return {key: cs.cochain_to_vector(c) for key, c in blocks.items()
                    if not linalg.is_zero_vector(cs.cochain_to_vector(c))}

        for (pa, ka, ma, pb, kb, mb) in ((0, 1, 0, 0, 1, 0), (0, 1, 2, 1, 1, 0),
                                         (1, 1, 0, 0, 2, 0), (0, 2, 0, 0, 1, 2)):
            a = random_cochain(rng, cs, TAG_FORMS, pa, ka, ma)
            b = random_cochain(rng, cs, TAG_FORMS, pb, kb, mb)
            left = as_vectors(total_d(cup(cs, a, b)))
            sign = -1 if (pa + ka) % 2 else 1
            right_acc = {}
            for src, coeff in ((cup_blocks(total_d(a), {0: b}), 1),
                               (cup_blocks({0: a}, total_d(b)), sign)):
                for key, c in src.items():
                    vec = linalg.scale_vector(coeff, cs.cochain_to_vector(c))
                    if key in right_acc:
                        right_acc[key] = linalg.add_vectors(right_acc[key], vec)
                    else:
                        right_acc[key] = vec
            right = {k2: v for k2, v in right_acc.items() if not linalg.is_zero_vector(v)}
            assert left == right, (pa, ka, ma, pb, kb, mb)

    def test_tag_mismatch_rejected(self, covers):
        cs = covers["p2"]
        a = cs.zero_cochain(TAG_FUNCTIONS, 0, 0, 0)
        b = cs.zero_cochain(TAG_CONST, 0, 1, 0)
        with pytest.raises(CechError, match="tags"):
            cup(cs, a, b)

    def test_p2_square_of_generator_spans_top(self, covers):
        cs = covers["p2"]
        coh = constant_total_cohomology(cs, 4)
        assert coh.dims == (1, 0, 1, 0, 1)
        rep = coh.slots[2].representatives[0]
        blocks = const_total_blocks_from_vector(cs, 2, rep)
        square = total_cup(cs, blocks, blocks)
        vec = const_total_vector(cs, 4, square)
        assert linalg.is_zero_vector(cs.const_total_matrix(4).mul_vec(vec))
        coords = coh.slots[4].reduce(vec)
        assert len(coords) == 1 and coords[0] != 0

    def test_p1xp1_mixed_products(self, covers):
        # two middle classes multiply to the top class; squares vanish
        cs = covers["p1xp1"]
        coh = constant_total_cohomology(cs, 4)
        assert coh.dims == (1, 0, 2, 0, 1)
        reps = coh.slots[2].representatives
        products = {}
        for i, ri in enumerate(reps):
            for j, rj in enumerate(reps):
                bi = const_total_blocks_from_vector(cs, 2, ri)
                bj = const_total_blocks_from_vector(cs, 2, rj)
                vec = const_total_vector(cs, 4, total_cup(cs, bi, bj))
                products[(i, j)] = coh.slots[4].reduce(vec)
        assert products[(0, 0)] == (0,)
        assert products[(1, 1)] == (0,)
        assert products[(0, 1)][0] != 0
        assert products[(0, 1)] == products[(1, 0)]  # even classes commute
