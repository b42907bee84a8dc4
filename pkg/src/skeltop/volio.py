"""Volume I/O: single-file NIfTI-1 (plain or gzip) and a trivial RAW3D
format for tests.

Only the single-file v1 variant (magic "n+1\\0") is handled.  Endianness is
auto-detected from the 348 header-size field; unknown header bytes are kept
opaque and round-tripped unchanged.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import BinaryVolume, ScalarVolume

HEADER_SIZE = 348
MIN_OFFSET = 352
MAGIC = b"n+1\x00"

# NIfTI datatype codes.
DTYPES = {
    "uint8": (2, 8, np.uint8),
    "int16": (4, 16, np.int16),
    "float32": (16, 32, np.float32),
    "uint16": (512, 16, np.uint16),
}
_CODE_TO_NAME = {code: name for name, (code, _, _) in DTYPES.items()}


class VolumeFormatError(ValueError):
    pass


@dataclass
class VolumeHeader:
    dims: tuple[int, int, int]
    datatype: str = "uint8"
    spacing: tuple[float, float, float] = (1.0, 1.0, 1.0)
    offset: int = MIN_OFFSET
    big_endian: bool = False
    raw_header: bytes | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.datatype not in DTYPES:
            raise VolumeFormatError(f"unsupported datatype {self.datatype!r}")
        if any(d <= 0 for d in self.dims):
            raise VolumeFormatError(f"dims must be positive, got {self.dims}")
        if self.offset < MIN_OFFSET:
            raise VolumeFormatError(f"offset must be >= {MIN_OFFSET}")


def _is_gzip(path: Path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(2) == b"\x1f\x8b"


def _read_bytes(path: Path) -> bytes:
    if _is_gzip(path):
        with gzip.open(path, "rb") as fh:
            return fh.read()
    return path.read_bytes()


def _parse_header(blob: bytes) -> VolumeHeader:
    if len(blob) < MIN_OFFSET:
        raise VolumeFormatError("file too short for a header")
    if blob[344:348] != MAGIC:
        raise VolumeFormatError("bad magic; not a single-file v1 volume")
    (sizeof_hdr,) = struct.unpack_from("<i", blob, 0)
    if sizeof_hdr == HEADER_SIZE:
        end = "<"
        big = False
    elif struct.unpack_from(">i", blob, 0)[0] == HEADER_SIZE:
        end = ">"
        big = True
    else:
        raise VolumeFormatError(f"unrecognized header size field {sizeof_hdr}")
    dim = struct.unpack_from(end + "8h", blob, 40)
    if dim[0] < 3:
        raise VolumeFormatError(f"expected a 3D volume, got ndim={dim[0]}")
    nx, ny, nz = dim[1], dim[2], dim[3]
    (datatype_code,) = struct.unpack_from(end + "h", blob, 70)
    if datatype_code not in _CODE_TO_NAME:
        raise VolumeFormatError(f"unsupported datatype code {datatype_code}")
    pixdim = struct.unpack_from(end + "8f", blob, 76)
    (vox_offset,) = struct.unpack_from(end + "f", blob, 108)
    offset = int(vox_offset) if vox_offset else MIN_OFFSET
    return VolumeHeader(
        dims=(nx, ny, nz),
        datatype=_CODE_TO_NAME[datatype_code],
        spacing=(pixdim[1], pixdim[2], pixdim[3]),
        offset=max(offset, MIN_OFFSET),
        big_endian=big,
        raw_header=blob[:HEADER_SIZE],
    )


def _build_header(header: VolumeHeader) -> bytes:
    code, bitpix, _ = DTYPES[header.datatype]
    buf = bytearray(header.raw_header or bytes(HEADER_SIZE))
    if len(buf) != HEADER_SIZE:
        raise VolumeFormatError("raw_header must be 348 bytes")
    nx, ny, nz = header.dims
    sx, sy, sz = header.spacing
    struct.pack_into("<i", buf, 0, HEADER_SIZE)
    struct.pack_into("<8h", buf, 40, 3, nx, ny, nz, 1, 1, 1, 1)
    struct.pack_into("<h", buf, 70, code)
    struct.pack_into("<h", buf, 72, bitpix)
    struct.pack_into("<8f", buf, 76, 1.0, sx, sy, sz, 0.0, 0.0, 0.0, 0.0)
    struct.pack_into("<f", buf, 108, float(MIN_OFFSET))
    buf[344:348] = MAGIC
    return bytes(buf)


def read_volume(path, binary: bool = False):
    """Read a volume file; returns (BinaryVolume | ScalarVolume, header).

    With binary=True non-binary payloads are thresholded at > 0.5.
    """
    path = Path(path)
    blob = _read_bytes(path)
    header = _parse_header(blob)
    nx, ny, nz = header.dims
    _, bitpix, np_dtype = DTYPES[header.datatype]
    dtype = np.dtype(np_dtype).newbyteorder(">" if header.big_endian else "<")
    nbytes = nx * ny * nz * bitpix // 8
    payload = blob[header.offset:header.offset + nbytes]
    if len(payload) < nbytes:
        raise VolumeFormatError(
            f"truncated payload: expected {nbytes} bytes, got {len(payload)}")
    arr = np.frombuffer(payload, dtype=dtype).reshape(nz, ny, nx)
    arr = arr.astype(np_dtype)
    if binary:
        vol = BinaryVolume((arr > 0.5).astype(np.uint8), header.spacing)
    else:
        vol = ScalarVolume(np.clip(arr.astype(np.float32), 0.0, 1.0),
                           header.spacing)
    return vol, header


def write_volume(vol, path, header: VolumeHeader | None = None,
                 compress: bool | None = None) -> None:
    """Write a volume as single-file v1; '.gz' paths are gzip-compressed.

    Binary volumes default to uint8 payloads, scalar volumes to float32.
    """
    path = Path(path)
    if isinstance(vol, BinaryVolume):
        default_dt = "uint8"
        data = vol.data
    elif isinstance(vol, ScalarVolume):
        default_dt = "float32"
        data = vol.data
    else:
        raise TypeError(f"cannot write {type(vol).__name__}")
    if header is None:
        header = VolumeHeader(dims=vol.dims, datatype=default_dt,
                              spacing=vol.spacing)
    if header.dims != vol.dims:
        raise VolumeFormatError("header dims do not match volume dims")
    _, _, np_dtype = DTYPES[header.datatype]
    payload = np.ascontiguousarray(data.astype(np_dtype),
                                   dtype=np.dtype(np_dtype).newbyteorder("<"))
    blob = _build_header(header) + bytes(4) + payload.tobytes()
    if compress is None:
        compress = path.suffix == ".gz"
    if compress:
        with gzip.open(path, "wb") as fh:
            fh.write(blob)
    else:
        path.write_bytes(blob)


# ---------------------------------------------------------------------------
# RAW3D: text header line "RAW3D nx ny nz datatype\n" + little-endian payload.


def write_raw3d(vol, path) -> None:
    if isinstance(vol, BinaryVolume):
        dt = "uint8"
    elif isinstance(vol, ScalarVolume):
        dt = "float32"
    else:
        raise TypeError(f"cannot write {type(vol).__name__}")
    nx, ny, nz = vol.dims
    _, _, np_dtype = DTYPES[dt]
    payload = np.ascontiguousarray(
        vol.data.astype(np_dtype), dtype=np.dtype(np_dtype).newbyteorder("<"))
    with open(path, "wb") as fh:
        fh.write(f"RAW3D {nx} {ny} {nz} {dt}\n".encode("ascii"))
        fh.write(payload.tobytes())


def read_raw3d(path, binary: bool = False):
    with open(path, "rb") as fh:
        line = fh.readline().decode("ascii", errors="replace").split()
        if len(line) != 5 or line[0] != "RAW3D":
            raise VolumeFormatError("bad RAW3D header line")
        nx, ny, nz = int(line[1]), int(line[2]), int(line[3])
        dt = line[4]
        if dt not in DTYPES:
            raise VolumeFormatError(f"unsupported RAW3D datatype {dt!r}")
        _, bitpix, np_dtype = DTYPES[dt]
        nbytes = nx * ny * nz * bitpix // 8
        payload = fh.read(nbytes)
    if len(payload) < nbytes:
        raise VolumeFormatError("truncated RAW3D payload")
    arr = np.frombuffer(payload, dtype=np.dtype(np_dtype).newbyteorder("<"))
    arr = arr.astype(np_dtype).reshape(nz, ny, nx)
    if binary:
        return BinaryVolume((arr > 0.5).astype(np.uint8))
    return ScalarVolume(np.clip(arr.astype(np.float32), 0.0, 1.0))


def load_any(path, binary: bool = True):
    """Dispatch on file content: RAW3D text magic, else NIfTI-1."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(5)
    if head == b"RAW3D":
        return read_raw3d(path, binary=binary)
    vol, _ = read_volume(path, binary=binary)
    return vol
