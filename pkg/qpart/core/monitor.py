"""
Run resource monitor
"""

import logging
import time
from typing import Any, Dict, Optional

import psutil

logger = logging.getLogger(__name__)


class RunMonitor:
    """Records wall time, CPU time and peak memory for one command"""

    def __init__(self, command: str):
        self.command = command
        self.process = psutil.Process()
        self._wall_start: Optional[float] = None
        self._cpu_start: Optional[float] = None
        self.stats: Dict[str, Any] = {}

    def __enter__(self) -> "RunMonitor":
        self.start()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.stop(failed=exc_type is not None)

    def start(self) -> None:
        """Start measuring"""
        self._wall_start = time.perf_counter()
        self._cpu_start = self._cpu_seconds()

    def stop(self, failed: bool = False) -> Dict[str, Any]:
        """Stop measuring and log the summary"""
        if self._wall_start is None:
            return self.stats
        self.stats = {
            "command": self.command,
            "wall_seconds": round(time.perf_counter() - self._wall_start, 3),
            "cpu_seconds": round(self._cpu_seconds() - self._cpu_start, 3),
            "peak_rss_mb": round(self._peak_rss() / (1024 * 1024), 1),
            "status": "failed" if failed else "ok",
        }
        logger.info(
            "%s finished (%s): wall %.3fs, cpu %.3fs, peak rss %.1f MB",
            self.command,
            self.stats["status"],
            self.stats["wall_seconds"],
            self.stats["cpu_seconds"],
            self.stats["peak_rss_mb"],
        )
        self._wall_start = None
        return self.stats

    def _cpu_seconds(self) -> float:
        times = self.process.cpu_times()
        return times.user + times.system

    def _peak_rss(self) -> int:
        info = self.process.memory_info()
        # Linux exposes the high-water mark through memory_full_info on some builds only
        peak = getattr(info, "peak_wset", None) or getattr(info, "rss", 0)
        try:
            import resource

            # ru_maxrss is KiB on Linux
            peak = max(peak, resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024)
        except ImportError:
            pass
        return peak
