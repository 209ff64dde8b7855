"""Concurrent execution of benchmark grid cells."""

import asyncio
import logging
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence

from tqdm.asyncio import tqdm_asyncio

from src.benchmark.cell import CellResult, CellSpec, run_cell
from src.benchmark.conditions import Ablation
from src.errors import InputError
from src.training.trainer import TrainConfig

logger = logging.getLogger(__name__)


def build_grid(
    ds: Sequence[int],
    seeds: Sequence[int],
    train: TrainConfig,
    ablations: Sequence[Ablation] = (Ablation.NONE,),
    rank_ratios: Sequence[Optional[float]] = (None,),
    ks: Sequence[Optional[int]] = (None,),
    out_dir: Optional[Path] = None,
    **instance,
) -> List[CellSpec]:
    """Cartesian product of the grid axes; instance carries p, T, eta and friends."""
    if not ds or not seeds:
        raise InputError("grid needs at least one d and one seed")
    # per-cell progress bars would interleave across workers
    train = replace(train, progress=False)
    return [
        CellSpec(d=d, seed=seed, train=train, ablation=ablation, rank_ratio=ratio, k=k, out_dir=out_dir, **instance)
        for d in ds
        for ablation in ablations
        for ratio in rank_ratios
        for k in ks
        for seed in seeds
    ]


class BenchmarkOrchestrator:
    """Runs grid cells with at most ``jobs`` in flight."""

    def __init__(self, jobs: int = 1, progress: bool = True):
        if jobs < 1:
            raise InputError(f"jobs must be >= 1, got {jobs}")
        self.jobs = jobs
        self.progress = progress
        self.semaphore = asyncio.Semaphore(jobs)

    def _executor(self) -> Executor:
        if self.jobs > 1:
            return ProcessPoolExecutor(max_workers=self.jobs)
        return ThreadPoolExecutor(max_workers=1)

    async def run_cells(self, cells: Sequence[CellSpec], desc: str = "bench") -> List[CellResult]:
        """Run every cell; results come back in grid order."""
        loop = asyncio.get_running_loop()
        with self._executor() as executor:
            tasks = [self._run_single_cell(loop, executor, cell) for cell in cells]
            results = await tqdm_asyncio.gather(*tasks, desc=desc, disable=not self.progress)

        failed = sum(1 for r in results if r.status != "ok")
        if failed:
            logger.warning("%d of %d cells failed", failed, len(results))
        return list(results)

    async def _run_single_cell(
        self,
        loop: asyncio.AbstractEventLoop,
        executor: Executor,
        cell: CellSpec,
    ) -> CellResult:
        async with self.semaphore:
            try:
                return await loop.run_in_executor(executor, run_cell, cell)
            except Exception as exc:
                # worker crashes and pickling errors land here, not in run_cell
                logger.error("Cell %s crashed: %s", cell.name, exc)
                return CellResult.failed(cell, f"{type(exc).__name__}: {exc}")


def run_grid(cells: Sequence[CellSpec], jobs: int = 1, progress: bool = True, desc: str = "bench") -> List[CellResult]:
    """Synchronous entry point around the orchestrator."""

    async def _main() -> List[CellResult]:
        return await BenchmarkOrchestrator(jobs=jobs, progress=progress).run_cells(cells, desc)

    return asyncio.run(_main())
