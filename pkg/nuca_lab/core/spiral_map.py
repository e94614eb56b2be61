"""
Square spiral enumeration of Z^2.

s(0) = (0, 0), s(1) = (1, 0), then counterclockwise: ring r >= 1 holds the
8r cells of Chebyshev norm r, entered at (r, -r + 1) and walked up the right
side, left along the top, down the left side and right along the bottom.

     4  3  2          12 ...
     5  0  1     ...  11
     6  7  8  9       10
"""
from math import isqrt
from typing import Iterator, Tuple

from nuca_lab.utils.errors import DomainError


class SpiralMap:
    """Index <-> cell conversion for the square spiral"""

    @staticmethod
    def ring_of_index(k: int) -> int:
        return (isqrt(k) + 1) // 2

    @staticmethod
    def cell(k: int) -> Tuple[int, int]:
        """
        Cell at spiral index k.

        Args:
            k: Non-negative spiral index

        Returns:
            Tuple[int, int]: The cell s(k)
        """
        if k < 0:
            raise DomainError(f"Spiral index must be non-negative, got {k}")
        if k == 0:
            return (0, 0)
        r = SpiralMap.ring_of_index(k)
        offset = k - (2 * r - 1) ** 2
        side, pos = divmod(offset, 2 * r)
        if side == 0:
            return (r, -r + 1 + pos)
        if side == 1:
            return (r - 1 - pos, r)
        if side == 2:
            return (-r, r - 1 - pos)
        return (-r + 1 + pos, -r)

    @staticmethod
    def index(cell) -> int:
        """
        Spiral index of a cell, computed from its ring without searching.

        Args:
            cell: A two-dimensional cell (x, y)

        Returns:
            int: The k with s(k) = cell
        """
        x, y = (int(v) for v in cell)
        r = max(abs(x), abs(y))
        if r == 0:
            return 0
        base = (2 * r - 1) ** 2
        if x == r and y > -r:
            return base + (y + r - 1)
        if y == r:
            return base + 2 * r + (r - 1 - x)
        if x == -r:
            return base + 4 * r + (r - 1 - y)
        return base + 6 * r + (x + r - 1)

    @staticmethod
    def walk(n: int) -> Iterator[Tuple[int, int]]:
        """Cells s(0), ..., s(n-1) by stepping, independent of the closed forms"""
        if n <= 0:
            return
        x, y = 0, 0
        yield (x, y)
        produced = 1
        leg = 1
        directions = ((1, 0), (0, 1), (-1, 0), (0, -1))
        turn = 0
        while produced < n:
            for _ in range(2):
                dx, dy = directions[turn % 4]
                for _ in range(leg):
                    if produced >= n:
                        return
                    x, y = x + dx, y + dy
                    yield (x, y)
                    produced += 1
                turn += 1
            leg += 1


def spiral(k: int) -> Tuple[int, int]:
    return SpiralMap.cell(k)


def spiral_index(cell) -> int:
    return SpiralMap.index(cell)
