"""Best-effort peak resident-memory sampling.

On Linux the per-process high-water mark (``VmHWM``) is read from
``/proc/self/status`` and can be reset between benchmark runs through
``/proc/self/clear_refs``. Where neither /proc nor ``getrusage`` is
usable, the probe reports 0 and warns once.
"""

import sys
import warnings

_warned = False


def reset_peak_rss() -> bool:
    """Try to reset the peak-RSS counter; returns True when it worked.

    Without a reset the reported peak is the process-lifetime high-water
    mark, which still upper-bounds the run.
    """
    try:
        with open("/proc/self/clear_refs", "w") as f:
            f.write("5")
        return True
    except OSError:
        return False


def peak_rss_bytes() -> int:
    """Peak resident set size in bytes, or 0 when unavailable."""
    global _warned
    try:
        with open("/proc/self/status") as f:
            for line in f:
                if line.startswith("VmHWM:"):
                    return int(line.split()[1]) * 1024
    except OSError:
        pass
    try:
        import resource

        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        # ru_maxrss is KiB on Linux, bytes on macOS
        return peak if sys.platform == "darwin" else peak * 1024
    except Exception:
        if not _warned:
            warnings.warn("peak memory unavailable on this platform; reporting 0")
            _warned = True
        return 0
