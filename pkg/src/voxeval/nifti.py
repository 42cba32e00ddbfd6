"""File formats: a NIfTI-1 subset and a raw float32 fixture format.

NIfTI-1 support is deliberately narrow: single-file ``.nii`` (optionally
gzipped), 3-D grids, datatype codes 4 (int16) and 16 (float32), both
endiannesses on read.  The affine is written (diagonal spacing, sform code 1)
and preserved opaque on read, but only the spacing is consumed downstream.

The raw format is ``<name>.raw`` holding float32 little-endian voxels in
x-fastest order plus a ``<name>.json`` sidecar with dims, spacing, and the
intensity kind; it exists so fixtures and loss-evaluation inputs stay
trivially inspectable.
"""

from __future__ import annotations

import gzip
import json
import os
import struct
from typing import Sequence

import numpy as np

from .errors import IOFormatError, UnsupportedDatatypeError, ValidationError
from .volume import LabelMask, Volume

_HDR_SIZE = 348
_VOX_OFFSET = 352
_DT_INT16 = 4
_DT_FLOAT32 = 16


def _open_for_read(path: str):
    f = open(path, "rb")
    magic = f.read(2)
    f.seek(0)
    if magic == b"\x1f\x8b":
        f.close()
        return gzip.open(path, "rb")
    return f


class _DeterministicGzip(gzip.GzipFile):
    """Gzip writer with fixed mtime and no embedded name.

    Keeps repeated writes of the same volume byte-identical; also closes
    the underlying file, which plain GzipFile-over-fileobj does not.
    """

    def __init__(self, path: str) -> None:
        self._raw = open(path, "wb")
        super().__init__(filename="", mode="wb", fileobj=self._raw, mtime=0)

    def close(self) -> None:
        try:
            super().close()
        finally:
            self._raw.close()


def _open_for_write(path: str):
    if path.endswith(".gz"):
        return _DeterministicGzip(path)
    return open(path, "wb")


def _build_header(dims: Sequence[int], spacing: Sequence[float], datatype: int) -> bytes:
    nx, ny, nz = (int(d) for d in dims)
    sx, sy, sz = (float(s) for s in spacing)
    bitpix = {_DT_INT16: 16, _DT_FLOAT32: 32}[datatype]
    hdr = bytearray(_HDR_SIZE)
    struct.pack_into("<i", hdr, 0, _HDR_SIZE)
    struct.pack_into("<8h", hdr, 40, 3, nx, ny, nz, 1, 1, 1, 1)
    struct.pack_into("<h", hdr, 70, datatype)
    struct.pack_into("<h", hdr, 72, bitpix)
    struct.pack_into("<8f", hdr, 76, 1.0, sx, sy, sz, 0.0, 0.0, 0.0, 0.0)
    struct.pack_into("<f", hdr, 108, float(_VOX_OFFSET))
    struct.pack_into("<f", hdr, 112, 1.0)  # scl_slope
    struct.pack_into("<f", hdr, 116, 0.0)  # scl_inter
    hdr[123] = 2  # xyzt_units: millimetres
    struct.pack_into("<h", hdr, 252, 0)  # qform_code
    struct.pack_into("<h", hdr, 254, 1)  # sform_code: scanner anatomical
    struct.pack_into("<4f", hdr, 280, sx, 0.0, 0.0, 0.0)
    struct.pack_into("<4f", hdr, 296, 0.0, sy, 0.0, 0.0)
    struct.pack_into("<4f", hdr, 312, 0.0, 0.0, sz, 0.0)
    hdr[344:348] = b"n+1\x00"
    return bytes(hdr)


def write_nifti(obj: Volume | LabelMask, path: str) -> None:
    """Write a Volume as float32 or a LabelMask as int16 NIfTI-1.

    Gzip compression is chosen by a ``.gz`` suffix on ``path``.
    """
    if isinstance(obj, Volume):
        data = obj.values.astype("<f4", copy=False)
        datatype = _DT_FLOAT32
    elif isinstance(obj, LabelMask):
        if obj.labels.max(initial=0) > np.iinfo(np.int16).max:
            raise ValidationError("label values exceed int16 range")
        data = obj.labels.astype("<i2")
        datatype = _DT_INT16
    else:
        raise ValidationError(f"cannot write object of type {type(obj).__name__}")
    hdr = _build_header(obj.dims, obj.spacing, datatype)
    with _open_for_write(path) as f:
        f.write(hdr)
        f.write(b"\x00\x00\x00\x00")  # extension indicator
        f.write(np.asfortranarray(data).tobytes(order="F"))


def _read_nifti_arrays(path: str) -> tuple[np.ndarray, tuple[float, float, float]]:
    with _open_for_read(path) as f:
        raw = f.read()
    if len(raw) < _HDR_SIZE:
        raise IOFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    (sizeof_hdr,) = struct.unpack_from("<i", raw, 0)
    endian = "<"
    if sizeof_hdr != _HDR_SIZE:
        (sizeof_hdr,) = struct.unpack_from(">i", raw, 0)
        if sizeof_hdr != _HDR_SIZE:
            raise IOFormatError(f"{path}: not a NIfTI-1 file")
        endian = ">"
    magic = raw[344:348]
    if magic not in (b"n+1\x00", b"ni1\x00"):
        raise IOFormatError(f"{path}: bad NIfTI magic {magic!r}")
    dim = struct.unpack_from(endian + "8h", raw, 40)
    ndim = dim[0]
    if not 1 <= ndim <= 7:
        raise IOFormatError(f"{path}: implausible dim[0]={ndim}")
    shape = [max(1, d) for d in dim[1 : 1 + max(3, ndim)]]
    if ndim > 3 and any(d > 1 for d in dim[4 : 1 + ndim]):
        raise IOFormatError(f"{path}: only 3-D volumes are supported, dim={dim}")
    nx, ny, nz = shape[0], shape[1], shape[2] if len(shape) > 2 else 1
    (datatype,) = struct.unpack_from(endian + "h", raw, 70)
    if datatype not in (_DT_INT16, _DT_FLOAT32):
        raise UnsupportedDatatypeError(
            f"{path}: datatype code {datatype} not supported (want 4 or 16)"
        )
    pixdim = struct.unpack_from(endian + "8f", raw, 76)
    spacing = tuple(abs(p) if p != 0 else 1.0 for p in pixdim[1:4])
    (vox_offset,) = struct.unpack_from(endian + "f", raw, 108)
    (scl_slope,) = struct.unpack_from(endian + "f", raw, 112)
    (scl_inter,) = struct.unpack_from(endian + "f", raw, 116)
    offset = int(vox_offset) if vox_offset >= _HDR_SIZE else _VOX_OFFSET
    dtype = np.dtype(endian + ("i2" if datatype == _DT_INT16 else "f4"))
    count = nx * ny * nz
    need = offset + count * dtype.itemsize
    if len(raw) < need:
        raise IOFormatError(f"{path}: truncated data ({len(raw)} < {need} bytes)")
    arr = np.frombuffer(raw, dtype=dtype, count=count, offset=offset)
    arr = arr.reshape((nx, ny, nz), order="F")
    if scl_slope not in (0.0, 1.0) or scl_inter != 0.0:
        slope = scl_slope if scl_slope != 0.0 else 1.0
        arr = arr.astype(np.float64) * slope + scl_inter
    return np.ascontiguousarray(arr), spacing


def read_nifti(path: str, intensity_kind: str = "arbitrary") -> Volume:
    """Read a NIfTI-1 scalar volume.  The caller declares the intensity kind."""
    arr, spacing = _read_nifti_arrays(path)
    return Volume(arr.astype(np.float64, copy=False), spacing, intensity_kind)


def read_nifti_mask(path: str) -> LabelMask:
    """Read a NIfTI-1 label map (integer-valued voxels required)."""
    arr, spacing = _read_nifti_arrays(path)
    return LabelMask(arr, spacing)


# ---------------------------------------------------------------------------
# raw float32 + JSON sidecar
# ---------------------------------------------------------------------------

def _sidecar_path(path: str) -> str:
    base, _ = os.path.splitext(path)
    return base + ".json"


def write_raw(v: Volume, path: str) -> None:
    """Write float32 little-endian voxels (x-fastest) plus a JSON sidecar."""
    data = v.values.astype("<f4", copy=False)
    with open(path, "wb") as f:
        f.write(data.tobytes(order="F"))
    sidecar = {
        "dims": list(v.dims),
        "spacing": list(v.spacing),
        "intensity_kind": v.intensity_kind,
    }
    with open(_sidecar_path(path), "w", encoding="utf-8") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)
        f.write("\n")


def read_raw(path: str) -> Volume:
    """Read a raw float32 volume via its JSON sidecar."""
    sidecar = _sidecar_path(path)
    if not os.path.exists(sidecar):
        raise IOFormatError(f"{path}: missing sidecar {sidecar}")
    with open(sidecar, "r", encoding="utf-8") as f:
        meta = json.load(f)
    try:
        dims = tuple(int(d) for d in meta["dims"])
        spacing = tuple(float(s) for s in meta["spacing"])
        kind = str(meta.get("intensity_kind", "arbitrary"))
    except (KeyError, TypeError, ValueError) as exc:
        raise IOFormatError(f"{sidecar}: malformed sidecar: {exc}") from exc
    count = dims[0] * dims[1] * dims[2]
    data = np.fromfile(path, dtype="<f4")
    if data.size != count:
        raise IOFormatError(
            f"{path}: expected {count} float32 voxels, found {data.size}"
        )
    return Volume.from_flat(data.astype(np.float64), dims, spacing, kind)


def load_volume(path: str, intensity_kind: str = "arbitrary") -> Volume:
    """Dispatch on extension: .raw sidecar format, else NIfTI."""
    if path.endswith(".raw"):
        return read_raw(path)
    return read_nifti(path, intensity_kind)


def load_mask(path: str) -> LabelMask:
    if path.endswith(".raw"):
        v = read_raw(path)
        return LabelMask(np.round(v.values).astype(np.int32), v.spacing)
    return read_nifti_mask(path)
