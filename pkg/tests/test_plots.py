import pytest
from matplotlib.axes import Axes

from wavekit.analysis.plots import plot_sweep, plot_wave, zero_marks
from wavekit.model.decomposition import decompose
from wavekit.wave.report import wave_report

from conftest import example_1


@pytest.fixture(scope="module")
def ex1_wave():
    return wave_report(example_1(0.25), speed_offset=0.5)


def test_zero_marks_are_the_zeros_of_D(ex1_wave):
    d = decompose(example_1(0.25))
    assert zero_marks(ex1_wave.glued) == pytest.approx(list(d.D0))
    assert zero_marks(ex1_wave.glued) == pytest.approx([0.75])


def test_wave_plot_marks_only_the_zeros_of_D(ex1_wave, tmp_path, monkeypatch):
    marked = []
    axvline = Axes.axvline

    def recording(self, x=0, *args, **kwargs):
        marked.append(x)
        return axvline(self, x, *args, **kwargs)

    monkeypatch.setattr(Axes, 'axvline', recording)
    path = plot_wave(ex1_wave.profile, ex1_wave.glued, str(tmp_path / "ex1.svg"))
    assert marked == pytest.approx([0.75])
    assert (tmp_path / "ex1.svg").read_text().lstrip().startswith('<?xml')
    assert path.endswith("ex1.svg")


def test_sweep_plot_marks_the_threshold(tmp_path, monkeypatch):
    marked = []
    axvline = Axes.axvline

    def recording(self, x=0, *args, **kwargs):
        marked.append(x)
        return axvline(self, x, *args, **kwargs)

    monkeypatch.setattr(Axes, 'axvline', recording)
    rows = [{'c': 1.0, 'exists': 'no'}, {'c': 2.0, 'exists': 'undetermined_at_c_hat'}, {'c': 3.0, 'exists': 'yes'}]
    plot_sweep(rows, str(tmp_path / "sweep.svg"), c_hat=2.0)
    assert marked == [2.0]
    assert (tmp_path / "sweep.svg").exists()
