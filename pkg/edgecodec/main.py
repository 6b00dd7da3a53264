#!/usr/bin/env python3
import argparse
import logging
import multiprocessing
import os
import sys
import time

from edgecodec.utils.bench import BenchRunner, collect_images, write_csv
from edgecodec.utils.codec import EncodeConfig, compare, decode_image, edge_overlay, encode_image
from edgecodec.utils.entropy import BitstreamError
from edgecodec.utils.formatters import encode_summary, format_fields, human_readable_size, metrics_summary
from edgecodec.utils.imageio import PpmError, read_ppm_file, write_ppm_file
from edgecodec.utils.metrics import rate_from_bits
from edgecodec.utils.scheme import FORCE_AUTO, FORCE_MODES, Scheme
from edgecodec.utils.transform import BLOCK_SIZES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_BITSTREAM = 3
EXIT_INTERRUPTED = 130


class UsageArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; usage errors here exit with 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- Helper Functions ---
def setup_logging(log_file=None, verbose=False):
    """Configure logging format, level, and handlers."""
    log_level = logging.DEBUG if verbose else logging.INFO
    handlers = [logging.StreamHandler(sys.stderr)]
    log_formatter = logging.Formatter(
        '%(asctime)s [%(levelname)s] %(threadName)s %(name)s: %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir and not os.path.exists(log_dir):
            try:
                os.makedirs(log_dir)
            except OSError as e:
                print(f"Warning: Could not create log directory '{log_dir}': {e}", file=sys.stderr)
                log_file = None
        if log_file:
            try:
                file_handler = logging.FileHandler(log_file)
                file_handler.setFormatter(log_formatter)
                handlers.append(file_handler)
            except OSError as e:
                print(f"Warning: Could not open log file '{log_file}': {e}", file=sys.stderr)

    logging.basicConfig(
        level=log_level,
        format='%(asctime)s [%(levelname)s] %(threadName)s %(name)s: %(message)s',
        handlers=handlers,
        datefmt='%Y-%m-%d %H:%M:%S',
        force=True,
    )

    # Keep third-party loggers quiet unless debugging
    third_party_level = logging.DEBUG if verbose else logging.WARNING
    logging.getLogger('rich').setLevel(third_party_level)

    return logging.getLogger('edgecodec')


def parse_scheme(text: str) -> Scheme:
    try:
        return Scheme.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def parse_int_list(text: str):
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def parse_scheme_list(text: str):
    return [parse_scheme(part) for part in text.split(",") if part.strip()]


def config_from_args(args) -> EncodeConfig:
    """Builds and validates the encoder configuration from parsed flags."""
    return EncodeConfig(
        block_size=getattr(args, "block_size", 8),
        scheme=getattr(args, "scheme", Scheme.M3),
        quality=args.quality,
        sigma=args.sigma,
        canny_low=args.canny_low,
        canny_high=args.canny_high,
        min_edge_pixels=args.min_edge_pixels,
        force_classification=args.force_classification,
    ).validate()


def add_encoder_flags(parser, with_block_size=True, with_scheme=True):
    if with_block_size:
        parser.add_argument("--block-size", type=int, choices=BLOCK_SIZES, default=8,
                            help="DCT block size N (default: 8)")
    if with_scheme:
        parser.add_argument("--scheme", type=parse_scheme, default=Scheme.M3, metavar="{m1,m2,m3}",
                            help="AC retention for edge blocks: m1=100%%, m2=70%%, m3=50%% (default: m3)")
    parser.add_argument("--quality", type=int, default=50, help="Quantization quality 1..100 (default: 50)")
    parser.add_argument("--sigma", type=float, default=1.4, help="Canny Gaussian sigma (default: 1.4)")
    parser.add_argument("--canny-low", type=float, default=0.1,
                        help="Low hysteresis threshold, fraction of peak magnitude (default: 0.1)")
    parser.add_argument("--canny-high", type=float, default=0.3,
                        help="High hysteresis threshold, fraction of peak magnitude (default: 0.3)")
    parser.add_argument("--min-edge-pixels", type=int, default=1,
                        help="Edge pixels a block needs to count as an edge block (default: 1)")
    parser.add_argument("--force-classification", choices=FORCE_MODES, default=FORCE_AUTO,
                        help="Override Canny classification (default: auto)")


# --- Command Handlers ---
def handle_encode_command(args, logger: logging.Logger) -> int:
    cfg = config_from_args(args)
    img = read_ppm_file(args.input)
    logger.info(f"Encoding '{args.input}' ({img.width}x{img.height}) with N={cfg.block_size}, "
                f"scheme={cfg.scheme.label}, quality={cfg.quality}.")
    result = encode_image(img, cfg)
    out_dir = os.path.dirname(args.output)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    with open(args.output, "wb") as f:
        f.write(result.data)
    bpp, cr = rate_from_bits(result.size_bits, img.width, img.height)
    logger.info(f"Wrote '{args.output}' ({human_readable_size(len(result.data))}).")
    print(encode_summary(bpp, cr, result.edge_block_pct, len(result.data)))
    return EXIT_OK


def handle_decode_command(args, logger: logging.Logger) -> int:
    with open(args.input, "rb") as f:
        data = f.read()
    img = decode_image(data)
    write_ppm_file(args.output, img)
    logger.info(f"Decoded '{args.input}' -> '{args.output}' ({img.width}x{img.height}).")
    return EXIT_OK


def handle_metrics_command(args, logger: logging.Logger) -> int:
    orig = read_ppm_file(args.original)
    recon = read_ppm_file(args.reconstructed)
    if (orig.width, orig.height) != (recon.width, recon.height):
        logger.error(f"Image sizes differ: {orig.width}x{orig.height} vs {recon.width}x{recon.height}")
        return EXIT_USAGE
    report = compare(orig, recon)
    print(metrics_summary(report))
    return EXIT_OK


def handle_edges_command(args, logger: logging.Logger) -> int:
    cfg = config_from_args(args)
    img = read_ppm_file(args.input)
    overlay, classification = edge_overlay(img, cfg)
    write_ppm_file(args.output, overlay)
    edge_pct = 100.0 * float(classification.sum()) / classification.size
    logger.info(f"Wrote edge overlay '{args.output}'.")
    print(format_fields(edge_blocks_pct=f"{edge_pct:.2f}",
                        blocks=classification.size,
                        edge_blocks=int(classification.sum())))
    return EXIT_OK


def handle_bench_command(args, logger: logging.Logger) -> int:
    cfg = config_from_args(args)
    block_sizes = args.block_sizes
    invalid = [n for n in block_sizes if n not in BLOCK_SIZES]
    if invalid:
        logger.error(f"Invalid block sizes {invalid}; choose from {BLOCK_SIZES}.")
        return EXIT_USAGE
    images = collect_images(args.images)
    if not images:
        logger.error(f"No PPM images found in: {', '.join(args.images)}")
        return EXIT_IO
    logger.info(f"Benchmarking {len(images)} images with {args.parallel} parallel threads.")
    runner = BenchRunner(cfg, block_sizes=block_sizes, schemes=args.schemes,
                         baseline=args.baseline, show_progress=not args.no_progress)
    rows, failures = runner.run(images, parallel_count=args.parallel)
    if args.out == "-":
        write_csv(rows, sys.stdout)
    else:
        write_csv(rows, args.out)
        logger.info(f"Wrote {len(rows)} rows to '{args.out}'.")
    if failures and len(failures) == len(images):
        return EXIT_IO
    return EXIT_OK


# --- Main execution block ---
def build_parser() -> argparse.ArgumentParser:
    parser = UsageArgumentParser(
        prog="edgecodec",
        description="edgecodec: edge-adaptive block-DCT color image codec.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""Examples:
  edgecodec encode photo.ppm photo.edc --block-size 16 --scheme m2
  edgecodec decode photo.edc photo_out.ppm
  edgecodec metrics photo.ppm photo_out.ppm
  edgecodec bench --images corpus/ --out results.csv --baseline
  edgecodec edges photo.ppm photo_edges.ppm
"""
    )
    parser.add_argument("--log-file", type=str, help="File to write logs to")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging (DEBUG level)")

    subparsers = parser.add_subparsers(dest='command', required=True, metavar='COMMAND',
                                       help="Available commands: encode, decode, metrics, bench, edges")

    encode_parser = subparsers.add_parser('encode', help='Compress a PPM image into a bitstream.')
    encode_parser.add_argument("input", help="Input binary PPM (P6)")
    encode_parser.add_argument("output", help="Output bitstream path")
    add_encoder_flags(encode_parser)

    decode_parser = subparsers.add_parser('decode', help='Reconstruct a PPM image from a bitstream.')
    decode_parser.add_argument("input", help="Input bitstream")
    decode_parser.add_argument("output", help="Output binary PPM (P6)")

    metrics_parser = subparsers.add_parser('metrics', help='Compare an original and a reconstructed PPM.')
    metrics_parser.add_argument("original", help="Original PPM")
    metrics_parser.add_argument("reconstructed", help="Reconstructed PPM")

    bench_parser = subparsers.add_parser('bench', help='Sweep images x block sizes x schemes into a CSV.')
    bench_parser.add_argument("--images", nargs="+", required=True,
                              help="Directories of PPM images and/or PPM files")
    bench_parser.add_argument("--out", required=True, help="Output CSV path ('-' for stdout)")
    bench_parser.add_argument("--block-sizes", type=parse_int_list, default=list(BLOCK_SIZES),
                              help="Comma-separated block sizes (default: 8,16,32)")
    bench_parser.add_argument("--schemes", type=parse_scheme_list, default=list(Scheme),
                              help="Comma-separated schemes (default: m1,m2,m3)")
    bench_parser.add_argument("--baseline", action="store_true",
                              help="Also measure uniform JPEG-like coding (all blocks edge, all ACs kept)")
    bench_parser.add_argument("--parallel", type=int, default=multiprocessing.cpu_count(),
                              help="Number of images processed in parallel (default: number of CPUs)")
    bench_parser.add_argument("--no-progress", action="store_true", help="Hide the progress bar")
    add_encoder_flags(bench_parser, with_block_size=False, with_scheme=False)

    edges_parser = subparsers.add_parser('edges', help='Write a PPM showing edge pixels and edge blocks.')
    edges_parser.add_argument("input", help="Input binary PPM (P6)")
    edges_parser.add_argument("output", help="Output visualization PPM")
    add_encoder_flags(edges_parser, with_scheme=False)
    return parser


COMMAND_HANDLERS = {
    'encode': handle_encode_command,
    'decode': handle_decode_command,
    'metrics': handle_metrics_command,
    'bench': handle_bench_command,
    'edges': handle_edges_command,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logger = setup_logging(log_file=args.log_file, verbose=args.verbose)

    start_time = time.time()
    try:
        exit_code = COMMAND_HANDLERS[args.command](args, logger)
        logger.debug(f"Command '{args.command}' finished in {time.time() - start_time:.2f} seconds.")
    except BitstreamError as e:
        logger.error(f"Corrupt bitstream: {e}")
        exit_code = EXIT_BITSTREAM
    except PpmError as e:
        logger.error(f"Invalid PPM input: {e}")
        exit_code = EXIT_IO
    except ValueError as e:
        logger.error(f"Invalid configuration: {e}")
        exit_code = EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        exit_code = EXIT_IO
    except KeyboardInterrupt:
        logger.warning("Operation interrupted by user (Ctrl+C).")
        exit_code = EXIT_INTERRUPTED
    except Exception as ex:
        logger.error(f"An unexpected error occurred during command execution: {ex}", exc_info=args.verbose)
        exit_code = EXIT_USAGE
    sys.exit(exit_code)


if __name__ == "__main__":
    main()
