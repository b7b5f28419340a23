import math
import random

import pytest

from nilcert.certificates import SeriesCertificate
from nilcert.errors import (
    InvalidParameters,
    UnresolvableReference,
    UnsupportedGroupShape,
    ZeroEuler,
)
from nilcert.invariants import (
    DiscSym2Bound,
    discsym2_upper,
    euler_length_bound,
    minkowski_bound,
    verify_certificate,
)
from nilcert.linalg import IntMatrix, Lattice
from nilcert.nilpotent2 import (
    NilSublattice,
    TwoStepLattice,
    heisenberg_witness,
    subnormal_series,
)
from nilcert.semidirect import (
    SemidirectGroup,
    SemidirectLattice,
    sol3_gamma,
    sol3_tower,
)


class TestMinkowski:
    def test_values(self):
        assert [minkowski_bound(n) for n in (1, 2, 3, 4)] == [2, 24, 48, 5760]

    def test_signed_permutation_divisibility(self):
        # the signed permutation group of order 2^n n! embeds in GL(n, Z)
        for n in range(1, 5):
            assert minkowski_bound(n) % (2**n * math.factorial(n)) == 0

    def test_known_finite_subgroups_divide(self):
        # GL(2, Z) contains subgroups of orders 8 (square) and 12 (hexagon)
        assert minkowski_bound(2) % 8 == 0
        assert minkowski_bound(2) % 12 == 0

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidParameters):
            minkowski_bound(0)


class TestEulerBound:
    def test_examples(self):
        assert euler_length_bound(8) == 3
        assert euler_length_bound(1) == 0
        assert euler_length_bound(-12) == 3

    def test_zero_rejected(self):
        with pytest.raises(ZeroEuler):
            euler_length_bound(0)

    def test_sandwich_over_range(self):
        for chi in range(1, 1025):
            r = euler_length_bound(chi)
            assert 2**r <= chi < 2 ** (r + 1)
            assert euler_length_bound(-chi) == r


class TestDiscSym2Order:
    def test_lexicographic_rule_randomized(self):
        rng = random.Random(404)
        for _ in range(1000):
            a, b, c, d = (rng.randint(0, 6) for _ in range(4))
            left, right = DiscSym2Bound(a, b), DiscSym2Bound(c, d)
            # Def-style rule: (a, b) >= (c, d) iff a > c, or a = c and b >= d
            want_ge = a > c or (a == c and b >= d)
            assert (left >= right) == want_ge
            assert (left.as_pair() >= right.as_pair()) == want_ge

    def test_total_order(self):
        pairs = [DiscSym2Bound(f, b) for f in range(3) for b in range(3)]
        ordered = sorted(pairs)
        for x, y in zip(ordered, ordered[1:]):
            assert x <= y


class TestDiscSym2Upper:
    def test_heisenberg_all_k(self):
        for k in range(1, 11):
            assert discsym2_upper(TwoStepLattice.heisenberg(k)).as_pair() == (1, 2)

    def test_torus(self):
        assert discsym2_upper(TwoStepLattice.free_abelian(3, 0)).as_pair() == (3, 0)

    def test_sol3(self):
        assert discsym2_upper(sol3_gamma(0)).as_pair() == (0, 0)

    def test_klein_bottle_times_circle(self):
        K = SemidirectGroup(IntMatrix([[-1, 0], [0, 1]]))
        G = SemidirectLattice(K, Lattice.standard(2), 1)
        assert discsym2_upper(G).as_pair() == (2, 0)

    def test_torus_as_semidirect(self):
        T = SemidirectGroup(IntMatrix.identity(2))
        G = SemidirectLattice(T, Lattice.standard(2), 1)
        assert discsym2_upper(G).as_pair() == (3, 0)

    def test_finite_order_with_rotation(self):
        # order-4 rotation: center = 4Z translations only, Inn = Z^2 x| Z/4
        # whose center is trivial modulo torsion
        R = SemidirectGroup(IntMatrix([[0, -1], [1, 0]]))
        G = SemidirectLattice(R, Lattice.standard(2), 1)
        assert discsym2_upper(G).as_pair() == (1, 0)

    def test_degenerate_two_step(self):
        J = IntMatrix([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
        G = TwoStepLattice(1, 3, [J])
        # center rank 1 + 1, inner rank 3 - 1
        assert discsym2_upper(G).as_pair() == (2, 2)

    def test_unsupported_shape(self):
        with pytest.raises(UnsupportedGroupShape):
            discsym2_upper(42)


class TestVerifyCertificate:
    def test_sol3_round_trip(self):
        cert = sol3_tower(3)
        assert verify_certificate(cert) is True
        assert verify_certificate(cert.to_json_dict()) is True

    def test_witness_round_trip(self):
        cert = heisenberg_witness(1, 3, 2)
        assert verify_certificate(cert) is True
        assert verify_certificate(cert.to_json_dict()) is True

    def test_series_round_trip(self):
        H = TwoStepLattice.heisenberg(1)
        sub = NilSublattice(H, Lattice.scaled(2, 2), Lattice.scaled(1, 4))
        cert = subnormal_series(H, sub)
        assert verify_certificate(cert) is True
        assert verify_certificate(cert.to_json_dict()) is True

    def test_tampered_quotient_rejected(self):
        d = sol3_tower(2).to_json_dict()
        d["levels"][0]["quotient_factors"] = ["2", "4"]
        assert verify_certificate(d) is False

    def test_tampered_consistently_rejected(self):
        # keep the index product consistent but lie about one quotient
        d = sol3_tower(2).to_json_dict()
        d["levels"][0]["quotient_factors"] = ["4"]
        assert verify_certificate(d) is False

    def test_tampered_min_length_rejected(self):
        d = sol3_tower(3).to_json_dict()
        d["min_length"] = 2
        assert verify_certificate(d) is False

    def test_tampered_subgroup_rejected(self):
        d = sol3_tower(2).to_json_dict()
        d["levels"][1]["subgroup"]["sublattice"] = [["8", "0"], ["0", "8"]]
        assert verify_certificate(d) is False

    def test_tampered_witness_rejected(self):
        d = heisenberg_witness(1, 3, 2).to_json_dict()
        d["chain"][0]["quotient_factors"] = ["3"]
        assert verify_certificate(d) is False

    def test_unknown_kind(self):
        d = sol3_tower(1).to_json_dict()
        d["kind"] = "mystery"
        with pytest.raises(UnresolvableReference):
            verify_certificate(d)

    def test_malformed(self):
        with pytest.raises(UnresolvableReference):
            verify_certificate({"schema": "nilcert/1"})

    def test_json_round_trip_is_lossless(self):
        H = TwoStepLattice.heisenberg(1)
        sub = NilSublattice(H, Lattice.scaled(2, 2), Lattice.scaled(1, 4))
        for cert in (
            sol3_tower(3),
            heisenberg_witness(2, 5, 3),
            subnormal_series(H, sub),
        ):
            assert SeriesCertificate.from_json_dict(cert.to_json_dict()) == cert

    def test_structural_invariants_enforced(self):
        cert = sol3_tower(2)
        broken = SeriesCertificate(
            kind=cert.kind,
            group_ref=cert.group_ref,
            chain=cert.chain,
            total_index=32,
            min_length=cert.min_length,
            max_quotient_order=cert.max_quotient_order,
        )
        assert broken.structural_ok() is False
        assert verify_certificate(broken) is False
