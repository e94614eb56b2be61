import sys
from pathlib import Path
from typing import Sequence

import cv2
import numpy as np

from nuca_lab.utils.constants import PGM_MAX_GRAY, PNG_CELL_SIZE


class SpaceTimeRenderer:
    """
    Renders space-time diagrams: one row per time step, one column per cell.
    Gray level of state s is floor(255 * s / (q - 1)).
    """

    @staticmethod
    def to_gray(states: np.ndarray, q: int) -> np.ndarray:
        """
        Map states to gray levels.

        Args:
            states: (times, cells) array of states in [0, q)
            q: Number of states

        Returns:
            np.ndarray: uint8 gray levels
        """
        levels = (np.arange(q, dtype=np.int64) * PGM_MAX_GRAY) // (q - 1)
        return levels.astype(np.uint8)[np.asarray(states, dtype=np.int64)]

    @staticmethod
    def to_pgm(states: np.ndarray, q: int) -> str:
        """ASCII PGM (P2) with times as rows"""
        gray = SpaceTimeRenderer.to_gray(states, q)
        height, width = gray.shape
        lines = ['P2', f"{width} {height}", str(PGM_MAX_GRAY)]
        lines.extend(' '.join(str(int(v)) for v in row) for row in gray)
        return '\n'.join(lines) + '\n'

    @staticmethod
    def to_csv(states: np.ndarray, labels: Sequence[str]) -> str:
        """CSV with header t,<cell labels> and one line per time step"""
        lines = [','.join(['t', *labels])]
        for t, row in enumerate(np.asarray(states)):
            lines.append(','.join([str(t), *(str(int(v)) for v in row)]))
        return '\n'.join(lines) + '\n'

    @staticmethod
    def save_png(states: np.ndarray, q: int, output_path: Path, cell_size: int = PNG_CELL_SIZE) -> bool:
        """
        Write an upscaled PNG, keeping hard cell edges.

        Returns:
            bool: True if the image was written
        """
        gray = SpaceTimeRenderer.to_gray(states, q)
        height, width = gray.shape
        scaled = cv2.resize(gray, (width * cell_size, height * cell_size), interpolation=cv2.INTER_NEAREST)
        if not cv2.imwrite(str(output_path), scaled):
            print(f"Failed to write image: {output_path}", file=sys.stderr)
            return False
        return True
