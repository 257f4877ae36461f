import json
import logging
import os
import sys

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def save_to_file(data, file_name):
    """Write a JSON document (the selftest report)."""
    with open(file_name, "w", encoding="utf-8") as write_file:
        json.dump(data, write_file, indent=4)
    logger.info("The file %s was successfully created.", file_name)


def header_lines(command, fields, numerics):
    """'#'-prefixed metadata lines; nothing run-dependent, so output is reproducible."""
    lines = [f"# conicqed {command}"]
    lines.extend(f"# {key}={_render(value)}" for key, value in fields.items())
    lines.append("# numerics " + " ".join(f"{k}={_render(v)}" for k, v in numerics.items()))
    return lines


def _render(value):
    if isinstance(value, (list, tuple)):
        return ",".join(_render(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_sweep_csv(frame, output_path, header):
    """Write ``frame`` as CSV (LF endings, 17 significant digits) after the header.

    ``output_path`` of None or '-' writes to stdout. A file that fails part
    way through is removed.
    """
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    body = "\n".join(header) + "\n" + text
    if output_path in (None, "-"):
        sys.stdout.write(body)
        sys.stdout.flush()
        return
    try:
        with open(output_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(body)
    except BaseException:
        remove_partial(output_path)
        raise
    logger.info("wrote %d rows to %s", len(frame), output_path)


def read_sweep_csv(path):
    """Read a sweep CSV back, skipping the comment header."""
    return pd.read_csv(path, comment="#")


def remove_partial(output_path):
    if output_path in (None, "-"):
        return
    try:
        os.remove(output_path)
        logger.warning("removed partial output %s", output_path)
    except FileNotFoundError:
        pass


def summary_frame(frame, axes=1):
    """describe() statistics of the value columns; the first ``axes`` columns are grid axes."""
    return frame.iloc[:, axes:].describe()


def write_summary(frame, output_path, axes=1):
    """Summary next to the output file, or on stderr when writing to stdout."""
    stats = summary_frame(frame, axes)
    if output_path in (None, "-"):
        sys.stderr.write(stats.to_csv(float_format=FLOAT_FORMAT, lineterminator="\n"))
        return None
    path = f"{output_path}.summary.csv"
    stats.to_csv(path, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote summary statistics to %s", path)
    return path
