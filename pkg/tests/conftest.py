import sys
import textwrap

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "srblend",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("srblend")


# Self-contained subprocess backends implementing the directory protocol
# (--input-dir / --output-dir / --scale), used to exercise the external
# backend path without any real model.

_PROTOCOL_PREAMBLE = """\
import argparse, os, sys
import numpy as np
from PIL import Image

ap = argparse.ArgumentParser()
ap.add_argument("--input-dir", required=True)
ap.add_argument("--output-dir", required=True)
ap.add_argument("--scale", type=int, required=True)
args = ap.parse_args()
names = sorted(n for n in os.listdir(args.input_dir) if n.endswith(".png"))
"""

NEAREST_BODY = _PROTOCOL_PREAMBLE + """\
for n in names:
    arr = np.array(Image.open(os.path.join(args.input_dir, n)))
    out = np.repeat(np.repeat(arr, args.scale, axis=0), args.scale, axis=1)
    Image.fromarray(out).save(os.path.join(args.output_dir, n))
"""

IDENTITY_BODY = _PROTOCOL_PREAMBLE + """\
assert args.scale == 1
for n in names:
    arr = np.array(Image.open(os.path.join(args.input_dir, n)))
    Image.fromarray(arr).save(os.path.join(args.output_dir, n))
"""

CONSTANT_BODY = _PROTOCOL_PREAMBLE + """\
for n in names:
    arr = np.array(Image.open(os.path.join(args.input_dir, n)))
    h, w = arr.shape[0] * args.scale, arr.shape[1] * args.scale
    out = np.full((h, w) + arr.shape[2:], 100, dtype=np.uint8)
    Image.fromarray(out).save(os.path.join(args.output_dir, n))
"""

EXIT_3_BODY = _PROTOCOL_PREAMBLE + """\
print("backend blew up on purpose", file=sys.stderr)
sys.exit(3)
"""

SKIP_LAST_BODY = _PROTOCOL_PREAMBLE + """\
for n in names[:-1]:
    arr = np.array(Image.open(os.path.join(args.input_dir, n)))
    out = np.repeat(np.repeat(arr, args.scale, axis=0), args.scale, axis=1)
    Image.fromarray(out).save(os.path.join(args.output_dir, n))
"""

WRONG_DIMS_BODY = _PROTOCOL_PREAMBLE + """\
for n in names:
    arr = np.array(Image.open(os.path.join(args.input_dir, n)))
    out = np.repeat(np.repeat(arr, args.scale, axis=0), args.scale, axis=1)
    out = out[:-1]  # drop one row: dimensions no longer scale * input
    Image.fromarray(out).save(os.path.join(args.output_dir, n))
"""

SLEEP_BODY = _PROTOCOL_PREAMBLE + """\
import time
time.sleep(30)
"""

ENV_CHECK_BODY = _PROTOCOL_PREAMBLE + """\
if os.environ.get("SRBLEND_TEST_MARKER") != "pass-through":
    print("environment variable not passed through", file=sys.stderr)
    sys.exit(9)
for n in names:
    arr = np.array(Image.open(os.path.join(args.input_dir, n)))
    out = np.repeat(np.repeat(arr, args.scale, axis=0), args.scale, axis=1)
    Image.fromarray(out).save(os.path.join(args.output_dir, n))
"""


@pytest.fixture
def write_backend_script(tmp_path):
    """Write a protocol backend script; returns its command vector."""

    def _write(body: str, name: str = "backend.py") -> tuple[str, ...]:
        path = tmp_path / name
        path.write_text(textwrap.dedent(body), encoding="utf-8")
        return (sys.executable, str(path))

    return _write


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
