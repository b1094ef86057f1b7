"""
Deterministic binary dumps of screens for debugging
"""
import struct
from pathlib import Path

import numpy as np

from photon_scintillation.api.exceptions import SimulationException
from photon_scintillation.api.turbulence import PhaseScreen, ScreenStack

MAGIC = b"TPSC"
HEADER = struct.Struct("<4sId")


class ScreenDumpException(SimulationException):
    pass


def write_screen(file_path: Path, screen: PhaseScreen) -> Path:
    """
    Write a screen as 16-byte header (magic, grid_n, spacing) followed by row-major little endian float64 values
    :param file_path: Target file
    :param screen: Screen to dump, the tilt is not part of the dump
    :return: Path of the written file
    """
    with file_path.open("wb") as file:
        file.write(HEADER.pack(MAGIC, screen.grid_n, screen.spacing))
        file.write(np.ascontiguousarray(screen.field, dtype="<f8").tobytes())
    return file_path


def read_screen(file_path: Path) -> PhaseScreen:
    data = file_path.read_bytes()
    if len(data) < HEADER.size:
        raise ScreenDumpException(f"{file_path} is too short for a screen header")

    magic, grid_n, spacing = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ScreenDumpException(f"{file_path} is not a screen dump")
    if len(data) != HEADER.size + grid_n * grid_n * 8:
        raise ScreenDumpException(f"{file_path} does not hold a {grid_n}x{grid_n} screen")

    field = np.frombuffer(data, dtype="<f8", offset=HEADER.size).reshape(grid_n, grid_n)
    return PhaseScreen(field=field.astype(float), spacing=spacing)


def write_stack(folder: Path, stack: ScreenStack) -> list[Path]:
    """
    Dump every screen of a stack as slab_<index>.tpsc and read each file back
    :param folder: Target folder, created if missing
    :param stack: Screens to dump
    :return: Written files in slab order
    """
    folder.mkdir(parents=True, exist_ok=True)
    files = []
    for index, screen in enumerate(stack):
        file_path = write_screen(folder / f"slab_{index:04d}.tpsc", screen)
        if not np.array_equal(read_screen(file_path).field, screen.field):
            raise ScreenDumpException(f"{file_path} does not read back as the dumped screen")
        files.append(file_path)
    return files
