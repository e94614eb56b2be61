import os
import sys

import psutil

from nuca_lab.utils.errors import MemoryBudgetError


class SystemMonitor:
    # Fraction of the currently available memory a single evolution may plan for
    BUDGET_FRACTION = 0.5

    @staticmethod
    def get_memory_usage() -> float:
        """Returns memory usage in MB"""
        process = psutil.Process(os.getpid())
        return process.memory_info().rss / 1024 / 1024

    @staticmethod
    def get_available_memory() -> float:
        """Returns available system memory in MB"""
        return psutil.virtual_memory().available / 1024 / 1024

    @staticmethod
    def print_memory_status(label: str = ''):
        """Prints current memory status to stderr"""
        memory_mb = SystemMonitor.get_memory_usage()
        total_memory = psutil.virtual_memory().total / 1024 / 1024
        prefix = f"[{label}] " if label else ''
        print(f"{prefix}Memory usage: {memory_mb:.1f} MB", file=sys.stderr)
        print(f"{prefix}Memory usage percentage: {(memory_mb / total_memory) * 100:.1f}%", file=sys.stderr)

    @staticmethod
    def check_budget(n_bytes: int):
        """
        Refuse a planned allocation that would not fit.

        Args:
            n_bytes: Planned size of the cone arrays and the output array

        Raises:
            MemoryBudgetError: if n_bytes exceeds the budget fraction of available memory
        """
        needed_mb = n_bytes / 1024 / 1024
        available_mb = SystemMonitor.get_available_memory()
        if needed_mb > available_mb * SystemMonitor.BUDGET_FRACTION:
            raise MemoryBudgetError(
                f"Planned evolution needs {needed_mb:.1f} MB, only {available_mb:.1f} MB available"
            )
