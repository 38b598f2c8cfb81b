import numpy as np
import pytest

from sqw.analytic import ModeSpec, propagate_mode
from sqw.physics import ComplexField2D, Grid2D
from sqw.utils.errors import NumericalGuardError
from sqw.utils.raster import heatmap_pixels, read_pgm, render_heatmap


@pytest.fixture
def small_grid() -> Grid2D:
    return Grid2D(nx=16, ny=8, extent_x=4.0, extent_y=4.0)


def test_density_uses_the_full_sixteen_bit_range(small_grid):
    field = propagate_mode(ModeSpec.hg(1, 0), 0.2, 0.5, small_grid)
    pixels, maxval = heatmap_pixels(field, "density")
    assert maxval == 65535
    assert pixels.dtype == np.uint16
    assert pixels.max() == 65535
    assert pixels.shape == (8, 16)


def test_zero_phase_maps_to_mid_grey(small_grid):
    field = ComplexField2D(grid=small_grid, values=np.ones(small_grid.shape))
    pixels, maxval = heatmap_pixels(field, "phase")
    assert maxval == 255
    assert np.all(pixels == 128)


def test_top_row_is_the_largest_y(small_grid):
    _, Y = small_grid.mesh
    field = ComplexField2D(grid=small_grid, values=np.exp(Y))
    pixels, _ = heatmap_pixels(field, "density")
    assert np.all(pixels[0] == 65535)
    assert np.all(pixels[0] > pixels[-1])


def test_non_finite_fields_are_refused(small_grid):
    values = np.ones(small_grid.shape, dtype=complex)
    values[3, 4] = np.nan
    with pytest.raises(NumericalGuardError):
        heatmap_pixels(ComplexField2D(grid=small_grid, values=values), "density")


@pytest.mark.parametrize("kind", ["density", "phase"])
def test_written_pgm_reads_back(tmp_path, small_grid, kind):
    field = propagate_mode(ModeSpec.lg(1, 0), 0.0, 0.3, small_grid)
    path = render_heatmap(field, kind, tmp_path / f"{kind}.pgm")
    assert path.read_bytes().startswith(b"P5\n16 8\n")
    pixels, maxval = read_pgm(path)
    expected, expected_max = heatmap_pixels(field, kind)
    assert maxval == expected_max
    np.testing.assert_array_equal(pixels, expected)
