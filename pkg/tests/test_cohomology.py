import random

import pytest

from nilcert.cohomology import (
    ModuleAction,
    b1,
    coset_enumeration,
    h1,
    h1_brute,
    z1,
)
from nilcert.errors import EnumerationFailed, IllDefinedAction, TooLarge
from nilcert.linalg import AbelianStructure, IntMatrix

Z = AbelianStructure(1, ())
I1 = IntMatrix.identity(1)
NEG = IntMatrix([[-1]])

S3_RELATORS = ("aa", "bb", "ababab")


def act_cyclic(n, matrix, module):
    return ModuleAction(1, ("a" * n,), module, (matrix,))


class TestCosetEnumeration:
    @pytest.mark.parametrize(
        "ngens,relators,order",
        [
            (1, ("aa",), 2),
            (1, ("aaa",), 3),
            (1, ("aaaa",), 4),
            (2, ("aa", "bb", "abab"), 4),
            (2, S3_RELATORS, 6),
            (2, ("aaaa", "aabb", "abaB"), 8),  # quaternion group
            (0, (), 1),
        ],
    )
    def test_orders(self, ngens, relators, order):
        assert len(coset_enumeration(ngens, relators, 4096)) == order

    def test_infinite_group_guard(self):
        with pytest.raises(EnumerationFailed):
            coset_enumeration(2, ("abAB",), 64)

    def test_table_is_consistent(self):
        table = coset_enumeration(2, S3_RELATORS, 1024)
        for c, row in enumerate(table):
            for j in range(2):
                assert table[row[2 * j]][2 * j + 1] == c


class TestActionValidation:
    def test_relator_must_act_trivially(self):
        with pytest.raises(IllDefinedAction):
            ModuleAction(1, ("aa",), AbelianStructure(2, ()), (IntMatrix([[0, -1], [1, -1]]),))

    def test_torsion_respect(self):
        # Z -> Z/2 coordinate mixing that does not respect torsion
        bad = IntMatrix([[1, 1], [0, 1]])
        with pytest.raises(IllDefinedAction):
            ModuleAction(1, ("a",), AbelianStructure(1, (2,)), (bad,))

    def test_mod_torsion_relator_ok(self):
        # multiplication by 3 on Z/8 squares to 9 = 1 (mod 8)
        act = act_cyclic(2, IntMatrix([[3]]), AbelianStructure(0, (8,)))
        assert act.word_matrix("aa").data[0][0] % 8 == 1

    def test_json_round_trip(self):
        act = ModuleAction(2, ("aa", "bb", "abAB"), AbelianStructure(0, (2,)), (I1, I1))
        assert ModuleAction.from_json(act.to_json()) == act


class TestZ1:
    def test_trivial_action_on_z(self):
        assert z1(act_cyclic(2, I1, Z)).structure == AbelianStructure(0, ())

    def test_sign_action_on_z(self):
        # Fox derivative of g^2 is 1 + psi(g) = 0, so every value is a cocycle
        space = z1(act_cyclic(2, NEG, Z))
        assert space.structure == AbelianStructure(1, ())
        # verify the basis element really is a crossed homomorphism on Q
        act = act_cyclic(2, NEG, Z)
        c = space.basis[0]
        assert act.cocycle_defect(list(c), "aa") == (0,)

    def test_klein_four_on_z2(self):
        act = ModuleAction(2, ("aa", "bb", "abAB"), AbelianStructure(0, (2,)), (I1, I1))
        # oracle: brute-force enumeration of maps satisfying the identity
        space = z1(act)
        assert space.structure == AbelianStructure(0, (2, 2))

    def test_basis_satisfies_relators(self):
        rng = random.Random(5)
        rot = IntMatrix([[0, -1], [1, -1]])
        actions = [
            act_cyclic(3, rot, AbelianStructure(2, ())),
            ModuleAction(2, S3_RELATORS, AbelianStructure(0, (4,)), (IntMatrix([[3]]), IntMatrix([[3]]))),
            act_cyclic(4, NEG, Z),
        ]
        for act in actions:
            space = z1(act)
            for c in space.basis:
                for word in act.relators:
                    assert all(
                        x == 0 for x in act.cocycle_defect(list(c), word)
                    )


class TestB1:
    def test_trivial_action(self):
        assert b1(act_cyclic(2, I1, Z)).structure == AbelianStructure(0, ())

    def test_sign_action_gives_even_multiples(self):
        space = b1(act_cyclic(2, NEG, Z))
        assert space.structure == AbelianStructure(1, ())
        v = space.basis[0][0]
        assert v in ((2,), (-2,))

    def test_b1_inside_z1(self):
        # membership is solved inside b1 itself (assertion); spot check here
        act = ModuleAction(2, S3_RELATORS, AbelianStructure(0, (8,)), (IntMatrix([[3]]), IntMatrix([[3]])))
        zspace, bspace = z1(act), b1(act)
        zo, bo = zspace.structure.order(), bspace.structure.order()
        assert zo is not None and bo is not None and zo % bo == 0

    def test_finite_module_coboundary_count(self):
        # |B1| = |M| / |M^Q| via brute-force fixed points
        rng = random.Random(6)
        for d in (2, 3, 4, 6, 8):
            for m in range(1, d):
                mat = IntMatrix([[m]])
                try:
                    act = act_cyclic(4, mat, AbelianStructure(0, (d,)))
                except IllDefinedAction:
                    continue
                fixed = sum(1 for x in range(d) if (m * x - x) % d == 0)
                bo = b1(act).structure.order()
                assert bo == d // fixed


class TestH1:
    def test_sign_action(self):
        assert h1(act_cyclic(2, NEG, Z)) == AbelianStructure(0, (2,))

    def test_trivial_action_on_free_module(self):
        act = act_cyclic(4, IntMatrix.identity(3), AbelianStructure(3, ()))
        assert h1(act) == AbelianStructure(0, ())

    def test_rotation_action(self):
        # Z/3 acting on Z^2 by the hexagonal rotation: Z1 = Z^2 (the norm
        # element annihilates) and B1 has index 3 = |det(psi - 1)|, so
        # H1 = Z/3 (the three conjugacy classes of order-3 rotation centers).
        rot = IntMatrix([[0, -1], [1, -1]])
        act = act_cyclic(3, rot, AbelianStructure(2, ()))
        assert z1(act).structure == AbelianStructure(2, ())
        assert h1(act) == AbelianStructure(0, (3,))

    def test_functoriality_doubling(self):
        # doubling the module doubles the invariant-factor multiset
        for mat, module in [
            (NEG, Z),
            (IntMatrix([[3]]), AbelianStructure(0, (8,))),
        ]:
            act = act_cyclic(2, mat, module)
            single = h1(act)
            doubled_module = AbelianStructure(
                2 * module.free_rank, tuple(sorted(module.torsion * 2))
            )
            dim = act.dim
            big = IntMatrix(
                [
                    [
                        mat.data[i % dim][j % dim] if (i < dim) == (j < dim) else 0
                        for j in range(2 * dim)
                    ]
                    for i in range(2 * dim)
                ]
            )
            # block-diagonal embedding needs coordinate order free+torsion:
            # for these 1-dimensional modules the blocks are scalars
            act2 = act_cyclic(2, big, doubled_module)
            doubled = h1(act2)
            assert doubled.torsion == tuple(sorted(single.torsion * 2))


class TestH1Brute:
    def test_matches_h1_on_truncation(self):
        act = act_cyclic(2, NEG, AbelianStructure(0, (4,)))
        assert h1(act) == h1_brute(act) == AbelianStructure(0, (2,))

    def test_trivial_action_z2_on_z2(self):
        act = act_cyclic(2, I1, AbelianStructure(0, (2,)))
        assert h1_brute(act) == AbelianStructure(0, (2,))

    def test_trivial_group(self):
        act = ModuleAction(0, (), AbelianStructure(0, (4,)), ())
        assert h1_brute(act) == AbelianStructure(0, ())

    def test_trivial_module(self):
        act = ModuleAction(1, ("aa",), AbelianStructure(0, ()), (IntMatrix([], cols=0),))
        assert z1(act).structure == AbelianStructure(0, ())
        assert h1(act) == AbelianStructure(0, ())
        assert h1_brute(act) == AbelianStructure(0, ())

    def test_infinite_module_rejected(self):
        with pytest.raises(TooLarge):
            h1_brute(act_cyclic(2, NEG, Z))

    def test_guards(self):
        act = act_cyclic(2, I1, AbelianStructure(0, (2,)))
        with pytest.raises(TooLarge):
            h1_brute(act, max_module_order=1)

    def test_agreement_spot_checks(self):
        rng = random.Random(31337)
        presentations = [
            (1, ("aa",)),
            (1, ("aaa",)),
            (1, ("aaaa",)),
            (2, ("aa", "bb", "abAB")),
            (2, S3_RELATORS),
        ]
        checked = 0
        while checked < 40:
            ngens, rels = presentations[rng.randrange(len(presentations))]
            d = rng.choice([2, 3, 4, 5, 6, 8, 9, 12, 16])
            mats = tuple(
                IntMatrix([[rng.randrange(1, d)]]) for _ in range(ngens)
            )
            try:
                act = ModuleAction(ngens, rels, AbelianStructure(0, (d,)), mats)
            except IllDefinedAction:
                continue
            assert h1(act) == h1_brute(act), (rels, d, mats)
            checked += 1
