import hashlib
import re

import pytest

from fusedetect.svgplot import bar_chart, scatter_plot


def default_bar():
    return bar_chart(
        ["mscn", "clip", "all"],
        [
            ("accuracy", [0.91, 0.83, 0.96], [0.01, 0.02, 0.0]),
            ("mcc", [0.82, 0.66, 0.93], [0.03, 0.05, 0.01]),
        ],
        title="toy run",
        y_label="score",
    )


def default_scatter():
    points = [(1.2, 0.8, "mscn"), (0.4, 0.55, "clip"), (2.1, 0.93, "all")]
    return scatter_plot(
        points, title="distance vs mcc", x_label="log10 d", y_label="mcc"
    )


def test_bar_chart_is_deterministic():
    a, b = default_bar(), default_bar()
    assert a == b
    assert hashlib.sha256(a.encode()).hexdigest() == hashlib.sha256(b.encode()).hexdigest()


def test_bar_chart_structure():
    svg = default_bar()
    assert svg.startswith("<svg ")
    assert svg.rstrip().endswith("</svg>")
    # background + 6 bars + 2 legend swatches
    assert svg.count("<rect ") == 9
    assert "toy run" in svg and "score" in svg
    # five whiskers (one std is zero) each with two caps
    assert svg.count('stroke="black"') >= 5 * 3


def test_bar_heights_follow_values():
    svg = bar_chart(["a", "b"], [("m", [0.2, 0.8], [0.0, 0.0])])
    # bar rects carry fractional widths; the legend swatch is a plain "10"
    tops = [
        float(m)
        for m in re.findall(r'<rect x="[\d.]+" y="([\d.]+)" width="\d+\.\d+"', svg)
    ]
    assert len(tops) == 2
    assert tops[1] < tops[0]  # taller bar starts higher on the canvas


def test_bar_chart_escapes_labels():
    svg = bar_chart(["a<b&c"], [('s"', [1.0], [0.0])], title="x<y")
    assert "a&lt;b&amp;c" in svg
    assert "x&lt;y" in svg
    assert "a<b" not in svg


def test_bar_chart_validation():
    with pytest.raises(ValueError):
        bar_chart([], [("s", [], [])])
    with pytest.raises(ValueError):
        bar_chart(["a"], [])
    with pytest.raises(ValueError, match="cover"):
        bar_chart(["a", "b"], [("s", [1.0], [0.0, 0.0])])
    with pytest.raises(ValueError, match="negative"):
        bar_chart(["a"], [("s", [1.0], [-0.5])])


def test_scatter_is_deterministic():
    assert default_scatter() == default_scatter()


def test_scatter_structure():
    svg = default_scatter()
    assert svg.count("<circle ") == 3
    for label in ("mscn", "clip", "all", "log10 d", "mcc"):
        assert label in svg


def test_scatter_single_point():
    svg = scatter_plot([(0.0, 0.0, "only")])
    assert svg.count("<circle ") == 1


def test_scatter_validation():
    with pytest.raises(ValueError):
        scatter_plot([])
    with pytest.raises(ValueError, match="finite"):
        scatter_plot([(float("nan"), 0.0, "p")])
