import hashlib
import tempfile
from pathlib import Path

import numpy as np
import pytest

from photon_scintillation.api.meta import TurbulenceSpec
from photon_scintillation.api.turbulence import PhaseScreen, SynthesizedScreenStack
from photon_scintillation.screens import dump
from photon_scintillation.screens.dump import HEADER, ScreenDumpException, read_screen, write_screen, write_stack


def test_write_screen_is_deterministic():
    f = Path(tempfile.mkdtemp(), "slab.tpsc")
    write_screen(f, PhaseScreen(field=np.zeros((2, 2)), spacing=0.5))
    actual_hash = hashlib.sha256(f.read_bytes()).hexdigest()
    assert "c8256888202088e0bb341bab71be1584d3f470efb12f58fd8d3b9305e7f298aa" == actual_hash


def test_read_screen_restores_field():
    field = np.arange(16, dtype=float).reshape(4, 4) * 1e-9
    f = write_screen(Path(tempfile.mkdtemp(), "slab.tpsc"), PhaseScreen(field=field, spacing=1e-3, tilt=(1.0, 2.0)))
    screen = read_screen(f)
    np.testing.assert_array_equal(screen.field, field)
    assert screen.spacing == 1e-3
    assert screen.tilt == (0.0, 0.0)


@pytest.mark.parametrize("content", [
    b"TPSC",
    HEADER.pack(b"NOPE", 2, 0.5) + bytes(32),
    HEADER.pack(b"TPSC", 4, 0.5) + bytes(32),
])
def test_read_screen_rejects(content):
    f = Path(tempfile.mkdtemp(), "broken.tpsc")
    f.write_bytes(content)
    with pytest.raises(ScreenDumpException):
        read_screen(f)


def test_write_stack():
    stack = SynthesizedScreenStack(TurbulenceSpec(cn2=1e-14, l0=5e-3), 3, 100.0, 16, 1e-3, realization_seed=1)
    folder = Path(tempfile.mkdtemp(), "screens")
    files = write_stack(folder, stack)
    assert [f.name for f in files] == ["slab_0000.tpsc", "slab_0001.tpsc", "slab_0002.tpsc"]
    np.testing.assert_array_equal(read_screen(files[2]).field, stack[2].field)


def test_write_stack_rejects_unreadable_dump(monkeypatch):
    def truncated(file_path, screen):
        file_path.write_bytes(HEADER.pack(b"TPSC", screen.grid_n, screen.spacing))
        return file_path

    monkeypatch.setattr(dump, "write_screen", truncated)
    stack = SynthesizedScreenStack(TurbulenceSpec(cn2=1e-14, l0=5e-3), 1, 100.0, 16, 1e-3, realization_seed=1)
    with pytest.raises(ScreenDumpException, match="does not hold a 16x16 screen"):
        write_stack(Path(tempfile.mkdtemp(), "screens"), stack)
