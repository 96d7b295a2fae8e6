"""
Console Report Utility
Handles presentation of command summaries on stdout:
- Channel banner (printed once per command)
- Solution, sweep, capacity, noise-free and simulation summaries
- Stage timings (uses StageTimer)
Library code logs through loguru; only the CLI calls these, and --quiet silences them.
"""

from typing import Any

from precoder.channel_model import ValidatedChannel
from precoder.utilities.timing import StageTimer

WIDTH = 60


def _banner(title: str) -> None:
    print("\n" + "=" * WIDTH)
    print(f"  {title}")
    print("=" * WIDTH)


def _close() -> None:
    print("=" * WIDTH + "\n")


def print_channel_report(ch: ValidatedChannel) -> None:
    """Print the channel once at the start of a command.

    Args:
        ch: Validated channel
    """
    _banner("CHANNEL")
    print(f"  Inputs x (M={ch.M}): {list(ch.x)}")
    print(f"  Interference s (Q={ch.Q}): {list(ch.s)}")
    print(f"  Interference pmf r: {list(ch.r)}  (H(S) = {ch.interference_entropy:.4f} bits)")
    snr = f"{ch.snr_db:.2f} dB" if ch.noise_power > 0 else "noise-free"
    print(f"  P_X = {ch.signal_power:.4g}, P_N = {ch.noise_power:.4g}, SNR = {snr}")
    _close()


def print_result_report(title: str, document: dict[str, Any], timer: StageTimer | None = None) -> None:
    """Print the scalar fields of a result document followed by stage timings.

    Args:
        title: Banner title
        document: Result document as written to --out
        timer: Optional stage timer
    """
    _banner(title)
    for key, value in document.items():
        if isinstance(value, float):
            print(f"  {key}: {value:.6f}")
        elif isinstance(value, (str, int, bool)) or value is None:
            print(f"  {key}: {value}")
        elif isinstance(value, list):
            print(f"  {key}: {len(value)} entries")
        elif isinstance(value, dict):
            fields = (f"{k}={v:.6f}" if isinstance(v, float) else f"{k}={v}" for k, v in value.items())
            print(f"  {key}: {', '.join(fields)}")
    if timer is not None and timer.seconds:
        print("\n  TIMINGS:")
        for name, seconds in timer.seconds.items():
            print(f"    {name}: {seconds:.3f}s ({timer.counts[name]}x)")
        print(f"    total: {timer.total:.3f}s")
    _close()


def print_sweep_report(rows: list[dict[str, Any]]) -> None:
    """Print one line per sweep row (snr, solver, rate)."""
    _banner(f"SWEEP ({len(rows)} rows)")
    for row in rows:
        rate = row.get("rate_bits")
        rate_str = f"{rate:.6f}" if isinstance(rate, float) and rate == rate else "n/a"
        print(f"  {row['snr_db']:8.3f} dB  {row['solver']:<10} rate {rate_str} bits")
    _close()
