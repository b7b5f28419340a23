"""Machine-checkable records of verified subnormal chains.

A :class:`SeriesCertificate` stores everything needed to re-derive its claims
from scratch: the ambient group description, each chain level's subgroup
description plus the verified quotient structure, and the certified length
data.  Certificates are plain JSON (integers as decimal strings) so they can
be archived and diffed; re-verification lives in :mod:`nilcert.invariants`.

Only the Sol3 tower kind carries a genuine lower bound on series length: the
normalizer-chain argument caps every quotient order at ``max_quotient_order``,
so any equivalent series needs at least ``min_length`` layers.  The witness
and two-step-series kinds realize a chain rather than bound all of them; they
report ``min_length`` 1 (or 0 for a trivial chain).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .linalg import AbelianStructure

SCHEMA = "nilcert/1"

KIND_SOL3 = "sol3-tower"
KIND_WITNESS = "heisenberg-witness"
KIND_TWO_STEP = "two-step-series"


@dataclass(frozen=True)
class ChainLevel:
    """One verified inclusion step: a subgroup with its quotient data."""

    subgroup: dict
    quotient: AbelianStructure
    index: int
    normality_verified: bool
    central: Optional[bool] = None

    def to_json_dict(self, flag_key: str = "normality_verified") -> dict:
        out = {
            "subgroup": self.subgroup,
            "quotient_factors": [str(d) for d in self.quotient.torsion],
            "index": str(self.index),
            flag_key: self.normality_verified,
        }
        if self.quotient.free_rank:
            out["quotient_free_rank"] = self.quotient.free_rank
        if self.central is not None:
            out["central"] = self.central
        return out

    @staticmethod
    def from_json_dict(obj: dict) -> "ChainLevel":
        quotient = AbelianStructure(
            int(obj.get("quotient_free_rank", 0)),
            tuple(int(d) for d in obj["quotient_factors"]),
        )
        flag = obj.get("normalizer_verified", obj.get("normality_verified"))
        return ChainLevel(
            subgroup=obj["subgroup"],
            quotient=quotient,
            index=int(obj["index"]),
            normality_verified=bool(flag),
            central=obj.get("central"),
        )


@dataclass(frozen=True)
class SeriesCertificate:
    """A verified subnormal chain with quotient structures and a length verdict."""

    kind: str
    group_ref: dict
    chain: tuple[ChainLevel, ...]
    total_index: int
    min_length: int
    max_quotient_order: int

    def structural_ok(self) -> bool:
        """Internal consistency: index product, flags, length bound."""
        prod = 1
        for level in self.chain:
            if not level.normality_verified:
                return False
            if level.quotient.order() != level.index:
                return False
            prod *= level.index
        if prod != self.total_index:
            return False
        if self.min_length > len(self.chain):
            return False
        if self.chain and self.max_quotient_order < max(l.index for l in self.chain):
            return False
        return True

    def to_json_dict(self) -> dict:
        levels_key = "chain" if self.kind == KIND_WITNESS else "levels"
        # the tower levels record a verified normalizer computation
        flag_key = "normalizer_verified" if self.kind == KIND_SOL3 else "normality_verified"
        out = {
            "schema": SCHEMA,
            "kind": self.kind,
            "group": self.group_ref,
            levels_key: [level.to_json_dict(flag_key) for level in self.chain],
            "total_index": str(self.total_index),
            "min_length": self.min_length,
            "max_quotient_order": str(self.max_quotient_order),
        }
        if self.kind == KIND_WITNESS:
            out["profile"] = self.group_ref.get("witness", {}).get("profile", [])
        return out

    @staticmethod
    def from_json_dict(obj: dict) -> "SeriesCertificate":
        levels = obj.get("levels", obj.get("chain", []))
        return SeriesCertificate(
            kind=obj["kind"],
            group_ref=obj["group"],
            chain=tuple(ChainLevel.from_json_dict(l) for l in levels),
            total_index=int(obj["total_index"]),
            min_length=int(obj["min_length"]),
            max_quotient_order=int(obj["max_quotient_order"]),
        )


def length_lower_bound(total_index: int, max_quotient_order: int) -> int:
    """Smallest n with max_quotient_order**n >= total_index."""
    n = 0
    reached = 1
    while reached < total_index:
        reached *= max_quotient_order
        n += 1
    return n
