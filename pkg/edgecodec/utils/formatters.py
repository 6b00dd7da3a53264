# edgecodec/utils/formatters.py
import math


def human_readable_size(size_bytes: int | None) -> str:
    """Converts a size in bytes to a human-readable string."""
    if size_bytes is None:
        return "N/A"
    if size_bytes == 0:
        return "0 B"
    size_name = ("B", "KiB", "MiB", "GiB", "TiB")
    num_bytes = abs(size_bytes)
    i = int(math.floor(math.log(num_bytes, 1024))) if num_bytes > 0 else 0
    if i >= len(size_name):
        i = len(size_name) - 1

    p = math.pow(1024, i)
    s = round(num_bytes / p, 1)
    # No decimal for bytes or whole values
    if i == 0 or s == math.floor(s):
        s = int(s)
    return f"{s} {size_name[i]}"


def format_db(value: float) -> str:
    """Decibels with four decimals; infinite PSNR renders as 'inf'."""
    if math.isinf(value):
        return "inf"
    if math.isnan(value):
        return "nan"
    return f"{value:.4f}"


def format_fields(**fields) -> str:
    """Single machine-parsable line of key=value pairs in the given order."""
    return " ".join(f"{key}={value}" for key, value in fields.items())


def encode_summary(bpp: float, cr: float, edge_pct: float, size_bytes: int) -> str:
    return format_fields(
        bpp=f"{bpp:.6f}",
        cr=f"{cr:.6f}",
        edge_blocks_pct=f"{edge_pct:.2f}",
        bytes=size_bytes,
    )


def metrics_summary(report) -> str:
    return format_fields(
        psnr_db=format_db(report.psnr_db),
        rgb_psnr_db=format_db(report.rgb_psnr_db),
        mse_y=f"{report.mse_y:.6f}",
        mse_cb=f"{report.mse_cb:.6f}",
        mse_cr=f"{report.mse_cr:.6f}",
    )
