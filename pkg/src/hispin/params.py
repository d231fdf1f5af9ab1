from __future__ import annotations

from dataclasses import dataclass


class ParameterError(ValueError):
    """A construction needs a constant that vanishes at these (m, k)."""

    def __init__(self, constant: str, m: int, k: int):
        self.constant = constant
        self.m = m
        self.k = k
        super().__init__(f"{constant} = 0 at (m={m}, k={k})")


# Every denominator that appears in a construction, by name.
CONSTANTS = {
    "m-2": lambda m, k: m - 2,
    "m-4": lambda m, k: m - 4,
    "m+2k": lambda m, k: m + 2 * k,
    "m+2k-2": lambda m, k: m + 2 * k - 2,
    "m+2k-4": lambda m, k: m + 2 * k - 4,
    "m+6k-10": lambda m, k: m + 6 * k - 10,
}


@dataclass(frozen=True)
class SpaceParams:
    """Dimension m of the ambient space and homogeneity degree k in u."""

    m: int
    k: int

    def __post_init__(self):
        if not isinstance(self.m, int) or not isinstance(self.k, int):
            raise TypeError("m and k must be integers")
        # m = 2 is allowed for the polynomial spaces; operator builders
        # only guard their own denominators.
        if self.m < 2:
            raise ValueError(f"m must be at least 2, got {self.m}")
        if self.k < 0:
            raise ValueError(f"k must be nonnegative, got {self.k}")

    def value(self, name: str) -> int:
        return CONSTANTS[name](self.m, self.k)

    def require(self, *names: str) -> None:
        for name in names:
            if self.value(name) == 0:
                raise ParameterError(name, self.m, self.k)

    def vanishing(self, *names: str) -> list[str]:
        return [n for n in names if self.value(n) == 0]
