"""
Thread pool for independent label tuples

Results come back in input order, so serial and parallel runs emit
identical tables.
"""

import queue
import threading
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Iterable, List, Optional

from tqdm import tqdm

from src.utils.logger import PsiLogger


class WorkStatus(Enum):
    """Work item status"""
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class WorkItem:
    """One unit of work and its outcome"""
    index: int
    payload: Any
    status: WorkStatus = WorkStatus.PENDING
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    result: Any = None
    error: Optional[BaseException] = field(default=None, repr=False)


class WorkerPool:
    """
    Fixed-size pool of worker threads pulling WorkItems from a queue

    max_workers = 1 runs everything inline on the calling thread.
    """

    def __init__(self, max_workers: int = 1, show_progress: bool = False, name: str = "pool"):
        if max_workers < 1:
            raise ValueError(f"max_workers must be at least 1, got {max_workers}")
        self.logger = PsiLogger("workers")
        self.max_workers = max_workers
        self.show_progress = show_progress
        self.name = name
        self._lock = threading.Lock()

    def _run_item(self, func: Callable[[Any], Any], item: WorkItem):
        item.status = WorkStatus.RUNNING
        item.started_at = datetime.now()
        try:
            item.result = func(item.payload)
            item.status = WorkStatus.COMPLETED
        except Exception as e:
            item.error = e
            item.status = WorkStatus.FAILED
            self.logger.debug(f"{self.name}: item {item.index} failed: {e}")
        item.completed_at = datetime.now()

    def _worker(self, func: Callable[[Any], Any], work_queue: "queue.Queue[WorkItem]", progress):
        while True:
            try:
                item = work_queue.get_nowait()
            except queue.Empty:
                return
            self._run_item(func, item)
            if progress is not None:
                with self._lock:
                    progress.update(1)
            work_queue.task_done()

    def run(self, func: Callable[[Any], Any], payloads: Iterable[Any]) -> List[WorkItem]:
        """Execute func on every payload; returns the WorkItems in input order"""
        items = [WorkItem(index, payload) for index, payload in enumerate(payloads)]
        progress = tqdm(total=len(items), desc=self.name, disable=not self.show_progress)
        try:
            if self.max_workers == 1 or len(items) <= 1:
                for item in items:
                    self._run_item(func, item)
                    progress.update(1)
            else:
                work_queue: "queue.Queue[WorkItem]" = queue.Queue()
                for item in items:
                    work_queue.put(item)
                workers = [
                    threading.Thread(
                        target=self._worker, args=(func, work_queue, progress), name=f"Worker-{i+1}", daemon=True
                    )
                    for i in range(min(self.max_workers, len(items)))
                ]
                for worker in workers:
                    worker.start()
                for worker in workers:
                    worker.join()
        finally:
            progress.close()
        failed = sum(1 for item in items if item.status is WorkStatus.FAILED)
        self.logger.log_event(
            "pool_run", {"pool": self.name, "items": len(items), "failed": failed, "workers": self.max_workers}
        )
        return items

    def map_ordered(self, func: Callable[[Any], Any], payloads: Iterable[Any]) -> List[Any]:
        """
        Results of func in input order

        Raises:
            The first failure (by input position) after all workers finish
        """
        items = self.run(func, payloads)
        for item in items:
            if item.status is WorkStatus.FAILED:
                raise item.error
        return [item.result for item in items]
