# edgecodec/utils/bench.py
import concurrent.futures
import csv
import dataclasses
import logging
import os
import threading
import time

from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeRemainingColumn

from edgecodec.utils.codec import EncodeConfig, encode_image, evaluate
from edgecodec.utils.formatters import format_db
from edgecodec.utils.imageio import read_ppm_file
from edgecodec.utils.scheme import FORCE_ALL_EDGE, Scheme

logger = logging.getLogger('edgecodec.bench')

CSV_COLUMNS = ["image", "N", "scheme", "bpp", "psnr_db", "cr", "edge_block_pct", "rgb_psnr_db"]
AVERAGE_LABEL = "Average"
# Uniform JPEG-like coding: every block edge, every AC kept
BASELINE_LABEL = "jpeg"
IMAGE_EXTENSIONS = (".ppm", ".pnm")


@dataclasses.dataclass(frozen=True)
class BenchRow:
    image: str
    block_size: int
    scheme: str
    bpp: float
    psnr_db: float
    cr: float
    edge_block_pct: float
    rgb_psnr_db: float

    def as_csv(self) -> dict:
        return {
            "image": self.image,
            "N": self.block_size,
            "scheme": self.scheme,
            "bpp": f"{self.bpp:.6f}",
            "psnr_db": format_db(self.psnr_db),
            "cr": f"{self.cr:.6f}",
            "edge_block_pct": f"{self.edge_block_pct:.2f}",
            "rgb_psnr_db": format_db(self.rgb_psnr_db),
        }


def collect_images(paths) -> list:
    """Expands directories to their PPM files; returns a sorted, de-duplicated list."""
    found = set()
    for path in paths:
        if os.path.isdir(path):
            for name in os.listdir(path):
                full_path = os.path.join(path, name)
                if name.lower().endswith(IMAGE_EXTENSIONS) and os.path.isfile(full_path):
                    found.add(full_path)
        elif os.path.isfile(path):
            found.add(path)
        else:
            logger.warning(f"Skipping missing bench input: {path}")
    return sorted(found)


def image_label(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _scheme_order(label: str) -> int:
    labels = [s.label for s in Scheme] + [BASELINE_LABEL]
    return labels.index(label) if label in labels else len(labels)


def sort_rows(rows) -> list:
    return sorted(rows, key=lambda r: (r.image, r.block_size, _scheme_order(r.scheme)))


def average_rows(rows) -> list:
    """One row per (N, scheme) holding the plain mean of each column."""
    groups = {}
    for row in rows:
        groups.setdefault((row.block_size, row.scheme), []).append(row)
    averages = []
    for (block_size, scheme), members in groups.items():
        count = len(members)

        def mean(attr):
            return sum(getattr(m, attr) for m in members) / count

        averages.append(BenchRow(
            image=AVERAGE_LABEL,
            block_size=block_size,
            scheme=scheme,
            bpp=mean("bpp"),
            psnr_db=mean("psnr_db"),
            cr=mean("cr"),
            edge_block_pct=mean("edge_block_pct"),
            rgb_psnr_db=mean("rgb_psnr_db"),
        ))
    return sorted(averages, key=lambda r: (r.block_size, _scheme_order(r.scheme)))


def write_csv(rows, out) -> None:
    """Writes rows to a path or an open text stream."""
    if isinstance(out, (str, os.PathLike)):
        out_dir = os.path.dirname(os.fspath(out))
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
        with open(out, "w", newline="") as f:
            write_csv(rows, f)
        return
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_csv())


class BenchRunner:
    """Sweeps images x block sizes x schemes and reports one row per combination."""

    def __init__(self, config: EncodeConfig, block_sizes=(8, 16, 32), schemes=tuple(Scheme),
                 baseline: bool = False, show_progress: bool = True):
        self.config = config
        self.block_sizes = tuple(block_sizes)
        self.schemes = tuple(schemes)
        self.baseline = baseline
        self.show_progress = show_progress
        self.progress_columns = [
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeRemainingColumn(),
        ]

    def variants(self):
        """(label, EncodeConfig) for every combination measured per image."""
        out = []
        for block_size in self.block_sizes:
            for scheme in self.schemes:
                cfg = dataclasses.replace(self.config, block_size=block_size, scheme=scheme)
                out.append((scheme.label, cfg.validate()))
            if self.baseline:
                cfg = dataclasses.replace(self.config, block_size=block_size, scheme=Scheme.M1,
                                          force_classification=FORCE_ALL_EDGE)
                out.append((BASELINE_LABEL, cfg.validate()))
        return out

    def _bench_worker(self, path: str):
        """
        Measures one image under every variant.
        Returns: (bool: success, str: path, list: rows, str|None: error_message)
        """
        name = image_label(path)
        try:
            img = read_ppm_file(path)
            rows = []
            for label, cfg in self.variants():
                result = encode_image(img, cfg)
                report = evaluate(img, result.data)
                rows.append(BenchRow(
                    image=name,
                    block_size=cfg.block_size,
                    scheme=label,
                    bpp=report.bpp,
                    psnr_db=report.psnr_db,
                    cr=report.cr,
                    edge_block_pct=result.edge_block_pct,
                    rgb_psnr_db=report.rgb_psnr_db,
                ))
                logger.debug(
                    f"Worker {threading.current_thread().name}: {name} N={cfg.block_size} {label} "
                    f"bpp={report.bpp:.4f} psnr={format_db(report.psnr_db)}"
                )
            return True, path, rows, None
        except Exception as e:
            logger.error(f"Bench failed for '{path}': {e}")
            return False, path, [], str(e)

    def run(self, image_paths, parallel_count: int = 1):
        """
        Runs the sweep in a thread pool.

        Returns:
            (rows, failures): data rows sorted by (image, N, scheme) followed by
            the per-(N, scheme) averages; failures as (path, error) pairs.
        """
        image_paths = list(image_paths)
        data_rows = []
        failures = []
        start_time = time.time()

        with Progress(*self.progress_columns, transient=True, disable=not self.show_progress) as progress:
            overall_task = progress.add_task("Benchmarking", total=len(image_paths))
            with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, parallel_count),
                                                       thread_name_prefix='Bench') as executor:
                future_to_path = {executor.submit(self._bench_worker, p): p for p in image_paths}
                for future in concurrent.futures.as_completed(future_to_path):
                    path = future_to_path[future]
                    try:
                        success, _, rows, error_message = future.result()
                    except Exception as exc:
                        success, rows, error_message = False, [], f"Future exception: {exc}"
                        logger.error(f"Bench task for '{path}' generated an exception: {exc}", exc_info=True)
                    if success:
                        data_rows.extend(rows)
                    else:
                        failures.append((path, error_message))
                    progress.update(overall_task, advance=1)

        data_rows = sort_rows(data_rows)
        duration = time.time() - start_time
        logger.info("-" * 30 + " Bench Summary " + "-" * 30)
        logger.info(f"Sweep completed in {duration:.2f} seconds.")
        logger.info(f"Images attempted: {len(image_paths)}, variants per image: {len(self.variants())}")
        logger.info(f"Succeeded: {len(image_paths) - len(failures)}, rows: {len(data_rows)}")
        logger.info(f"Failed: {len(failures)}")
        if failures:
            logger.warning("Failed items:")
            for path, err in sorted(failures):
                logger.warning(f"  - {path}: {err}")
        logger.info("-" * (60 + len(" Bench Summary ")))
        return data_rows + average_rows(data_rows), sorted(failures)
