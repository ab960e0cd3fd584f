"""
Built-in complexes and their quotient towers.

Each example knows how to build its towers at any number of levels and
carries the closed-form invariants the towers are expected to approach.
"""

from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence

from ..complex.cochain import EquivariantComplex, build_complex, presentation_complex
from ..errors import QuotientError, SchemaError
from ..group.quotients import QuotientSpec, is_trivial_in_quotient
from ..group.words import GroupModel, GroupWord
from ..ring.element import RingElement
from ..ring.matrix import RingMatrix
from ..utils.logger import get_logger

logger = get_logger(__name__)

TowerBuilder = Callable[[int], List[QuotientSpec]]


@dataclass
class NamedExample:
    name: str
    complex: EquivariantComplex
    towers: Dict[str, TowerBuilder]
    default_tower: str
    default_levels: Dict[str, int]
    known: Dict[str, object] = field(default_factory=dict)
    notes: str = ""

    def tower(self, name: Optional[str] = None, levels: Optional[int] = None) -> List[QuotientSpec]:
        name = name or self.default_tower
        if name not in self.towers:
            raise SchemaError(f"example '{self.name}' has no tower '{name}'; choose from {sorted(self.towers)}")
        if levels is None:
            levels = self.default_levels[name]
        if levels < 1:
            raise SchemaError(f"level count must be >= 1, got {levels}")
        return self.towers[name](levels)


# Tower builders

def cyclic_tower(moduli: Sequence[int], prefix: str = "Z/") -> List[QuotientSpec]:
    return [QuotientSpec.lattice([m], name=f"{prefix}{m}") for m in moduli]


def factorial_tower(levels: int) -> List[QuotientSpec]:
    """Z/n!, n = 1..levels; nested since n! divides (n+1)!"""
    return cyclic_tower([factorial(n) for n in range(1, levels + 1)])


def dyadic_tower(levels: int) -> List[QuotientSpec]:
    """Z/2^n, n = 1..levels"""
    return cyclic_tower([2 ** n for n in range(1, levels + 1)])


def square_tower(levels: int) -> List[QuotientSpec]:
    """(Z/2^n)^2, n = 1..levels"""
    return [QuotientSpec.lattice([2 ** n, 2 ** n], name=f"(Z/{2 ** n})^2") for n in range(1, levels + 1)]


def congruence_tower(levels: int) -> List[QuotientSpec]:
    """a -> [[1,1],[0,1]], b -> [[1,0],[1,1]] mod m for m = 3, 4, ...; images generate SL(2, Z/m)"""
    return [
        QuotientSpec.from_matrices([[[1, 1], [0, 1]], [[1, 0], [1, 1]]], m, name=f"SL(2,{m})")
        for m in range(3, 3 + levels)
    ]


def sanov_tower(levels: int) -> List[QuotientSpec]:
    """Reductions mod odd m of the free subgroup generated by [[1,2],[0,1]] and [[1,0],[2,1]]"""
    return [
        QuotientSpec.from_matrices([[[1, 2], [0, 1]], [[1, 0], [2, 1]]], m, name=f"sanov({m})")
        for m in range(3, 3 + 2 * levels, 2)
    ]


def affine_quotient(m: int, name: Optional[str] = None) -> QuotientSpec:
    """BS(1,2) -> Aff(Z/m): a acts as x -> 2x, b as x -> x + 1 (m odd)"""
    if m % 2 == 0:
        raise QuotientError(f"multiplication by 2 is not invertible mod {m}")
    double = [(2 * x) % m for x in range(m)]
    shift = [(x + 1) % m for x in range(m)]
    return QuotientSpec.from_permutations([double, shift], name=name or f"Aff(Z/{m})")


def verify_relators(relators: Sequence[GroupWord], tower: Sequence[QuotientSpec]) -> None:
    for q in tower:
        for r in relators:
            if not is_trivial_in_quotient(r, q):
                raise QuotientError(f"relator {r} is not trivial in '{q.name}'")


# Examples

def example_circle() -> NamedExample:
    """S^1 with one vertex and one edge; pi = Z acting on the line"""
    model = GroupModel.free_abelian(1)
    t = RingElement.from_word(model, model.generator(1))
    d1 = RingMatrix.from_rows(model, [[t - 1]])
    towers = {
        "cyclic": lambda levels: cyclic_tower(range(1, levels + 1)),
        "factorial": factorial_tower,
        "dyadic": dyadic_tower,
    }
    levels = {"cyclic": 8, "factorial": 5, "dyadic": 10}
    C = build_complex(model, [1, 1], [d1], name="circle",
                      towers={name: builder(levels[name]) for name, builder in towers.items()})
    return NamedExample(
        name="circle",
        complex=C,
        towers=towers,
        default_tower="dyadic",
        default_levels=levels,
        known={"b0": 0, "b1": 0, "logdet0": 0.0, "logdet1": 0.0, "K": 4},
        notes="Z/n levels: F(0) = 1/n, log det' = (2/n) log n.",
    )


def example_torus() -> NamedExample:
    """T^2 with cells (1, 2, 1) and the relator aba^-1b^-1"""
    model = GroupModel.free_abelian(2)
    a = RingElement.from_word(model, model.generator(1))
    b = RingElement.from_word(model, model.generator(2))
    d1 = RingMatrix.from_rows(model, [[a - 1, b - 1]])
    d2 = RingMatrix.from_rows(model, [[1 - b], [a - 1]])
    C = build_complex(model, [1, 2, 1], [d1, d2], name="torus", towers={"square": square_tower(4)})
    return NamedExample(
        name="torus",
        complex=C,
        towers={"square": square_tower},
        default_tower="square",
        default_levels={"square": 4},
        known={"b0": 0, "b1": 0, "b2": 0},
        notes="(Z/n)^2 levels: F(0) = 1/n^2, 2/n^2, 1/n^2.",
    )


def example_wedge2() -> NamedExample:
    """Wedge of two circles; pi = F_2, residually finite and not amenable"""
    model = GroupModel.free(2)
    a = RingElement.from_word(model, model.generator(1))
    b = RingElement.from_word(model, model.generator(2))
    d1 = RingMatrix.from_rows(model, [[a - 1, b - 1]])
    towers = {"congruence": congruence_tower, "sanov": sanov_tower}
    levels = {"congruence": 3, "sanov": 3}
    C = build_complex(model, [1, 2], [d1], name="wedge2",
                      towers={name: builder(levels[name]) for name, builder in towers.items()})
    return NamedExample(
        name="wedge2",
        complex=C,
        towers=towers,
        default_tower="congruence",
        default_levels=levels,
        known={"b0": 0, "b1": 1, "gap0": 4 - 2 * 3 ** 0.5},
        notes=(
            "Levels are finite quotients of F_2, so b1 of a level is |G| + 1. The sanov images "
            "generate a free subgroup of SL(2,Z), so the kernels of its reductions intersect "
            "trivially; congruence levels (orders 24, 48, 120) are not nested. Both are modeling "
            "assumptions, not machine-checked."
        ),
    )


BS12_RELATOR = GroupWord((-1, 2, 1, -2, -2))


def _bs12_odd(levels: int) -> List[QuotientSpec]:
    return [affine_quotient(m) for m in range(3, 3 + 2 * levels, 2)]


def _bs12_3adic(levels: int) -> List[QuotientSpec]:
    return [affine_quotient(3 ** n) for n in range(1, levels + 1)]


def example_bs12() -> NamedExample:
    """Presentation complex of BS(1,2) = <a, b | a^-1 b a = b^2>"""
    towers = {"odd": _bs12_odd, "3adic": _bs12_3adic}
    levels = {"odd": 3, "3adic": 3}
    quotients = [q for name, builder in towers.items() for q in builder(levels[name])]
    verify_relators([BS12_RELATOR], quotients)
    model = GroupModel.presented(2, [BS12_RELATOR], quotients)
    C = presentation_complex(model, name="bs12",
                             towers={name: builder(levels[name]) for name, builder in towers.items()})
    return NamedExample(
        name="bs12",
        complex=C,
        towers={name: _checked(builder) for name, builder in towers.items()},
        default_tower="odd",
        default_levels=levels,
        known={"b0": 0},
        notes=(
            "Levels are the affine groups generated by x -> 2x and x -> x + 1 on Z/m, of order "
            "m * ord_m(2). The 3-adic levels are nested with trivial intersection; b1 and b2 are "
            "reported empirically."
        ),
    )


def _checked(builder: TowerBuilder) -> TowerBuilder:
    def build(levels: int) -> List[QuotientSpec]:
        tower = builder(levels)
        verify_relators([BS12_RELATOR], tower)
        return tower
    return build


BUILDERS: Dict[str, Callable[[], NamedExample]] = {
    "circle": example_circle,
    "torus": example_torus,
    "wedge2": example_wedge2,
    "bs12": example_bs12,
}

# Known cases without a computable tower
DOCUMENTED_ONLY: Dict[str, str] = {
    "bs23": (
        "BS(2,3) = <a, b | a^-1 b^2 a = b^3> is residually solvable but not residually finite; "
        "its solvable quotients are infinite and non-abelian, which no backend here evaluates."
    ),
}


def list_examples() -> List[Dict[str, str]]:
    rows = []
    for name, builder in BUILDERS.items():
        example = builder()
        rows.append({"name": name, "towers": ", ".join(sorted(example.towers)), "status": "built-in"})
    rows += [{"name": name, "towers": "", "status": "documented only"} for name in DOCUMENTED_ONLY]
    return rows


def get_example(name: str) -> NamedExample:
    if name in DOCUMENTED_ONLY:
        raise SchemaError(f"example '{name}' has no numeric tower: {DOCUMENTED_ONLY[name]}")
    try:
        builder = BUILDERS[name]
    except KeyError:
        raise SchemaError(f"unknown example '{name}'; choose from {sorted(BUILDERS)}") from None
    logger.debug(f"Building example '{name}'")
    return builder()
