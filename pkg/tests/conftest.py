from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = FIXTURES / "corpus"

MATTHEWS_BIB = r"""
@article{matthews2019craft,
  title={Craft beautiful equations in Word with LaTeX},
  author={Matthews, David and others},
  journal={Nature},
  volume={570},
  number={7760},
  pages={263--264},
  year={2019},
  publisher={Nature}
}
"""

NERF_GRID = [
    ["Item", "Citation", "Year", "Movement", "Object"],
    ["NeRF", r"\cite{mildenhall2021nerf}", "2021", "Static", "Normal"],
    ["Mip-nerf", r"\cite{barron2021mip}", "2021", "Static", "Multiscale "],
    ["D-nerf", r"\cite{pumarola2021d}", "2021", "Dynamic", "Normal "],
    ["Instant-NGP", r"\cite{muller2022instant}", "2022", "Static", "Normal"],
]

NERF_PERIODS = [
    {"period": "2021", "color": "green", "items": [
        ["mildenhall2021nerf", "NeRF"], ["yu2021pixelnerf", "pixelnerf"], ["wang2021nerf", "NeRF--"],
        ["barron2021mip", "Mip-nerf"], ["pumarola2021d", "D-nerf"]]},
    {"period": "2022", "color": "yellow", "items": [
        ["hong2022headnerf", "Headnerf"], ["tancik2022block", "Block-nerf"], ["barron2022mip", "Mip-nerf 360"]]},
    {"period": "2023", "color": "pink", "items": [
        ["bian2023nope", "Nope-nerf"], ["bao2023sine", "Sine"]]},
]

NERF_FLOW = {
    "nodes": [
        {"id": "NeRF", "level": 0},
        {"id": "NGP", "level": 1}, {"id": "D-nerf", "level": 1},
        {"id": "Human", "level": 1}, {"id": "Fastnerf", "level": 1},
        {"id": "F2-NeRF", "level": 2}, {"id": "Nerfacc", "level": 2}, {"id": "Efficient", "level": 2},
    ],
    "edges": [
        ["NeRF", "NGP"], ["NeRF", "D-nerf"], ["NeRF", "Human"], ["NeRF", "Fastnerf"],
        ["NGP", "F2-NeRF"], ["NGP", "Nerfacc"], ["D-nerf", "Efficient"],
    ],
}

# label anchors of the 8-paper NeRF chip map, as fractions of image width
NERF_MAP_ANCHORS = [
    (0.17, 0.925, r"\cite{mildenhall2021nerf}: NeRF", 0),
    (0.545, 0.925, r"\cite{park2021nerfies}: Nerfies", 0),
    (0.17, 0.06, r"\cite{muller2022instant}: Instant-NGP", 0),
    (0.545, 0.06, r"\cite{pumarola2021d}: D-nerf", 0),
    (0.045, 0.455, r"\cite{chen2022tensorf}: Tensorf", -90),
    (0.045, 0.83, r"\cite{tancik2022block}: Block-nerf", -90),
    (0.925, 0.455, r"\cite{weng2022humannerf}: Humannerf", -90),
    (0.925, 0.83, r"\cite{tancik2023nerfstudio}: Nerfstudio", -90),
]

# the same eight lines with unrounded float products in the coordinates
NERF_MAP_UNROUNDED = [
    r"\put(0.06799999999999999\textwidth, 0.37000000000000005\textwidth){\cite{mildenhall2021nerf}: NeRF}",
    r"\put(0.21800000000000003\textwidth, 0.37000000000000005\textwidth){\cite{park2021nerfies}: Nerfies}",
    r"\put(0.06799999999999999\textwidth, 0.024\textwidth){\cite{muller2022instant}: Instant-NGP}",
    r"\put(0.21800000000000003\textwidth, 0.024\textwidth){\cite{pumarola2021d}: D-nerf}",
    r"\put(0.018\textwidth, 0.18200000000000002\textwidth){\rotatebox{-90}{\cite{chen2022tensorf}: Tensorf}}",
    r"\put(0.018\textwidth, 0.332\textwidth){\rotatebox{-90}{\cite{tancik2022block}: Block-nerf}}",
    r"\put(0.37000000000000005\textwidth, 0.18200000000000002\textwidth){\rotatebox{-90}{\cite{weng2022humannerf}: Humannerf}}",
    r"\put(0.37000000000000005\textwidth, 0.332\textwidth){\rotatebox{-90}{\cite{tancik2023nerfstudio}: Nerfstudio}}",
]


@pytest.fixture
def corpus_dir():
    return CORPUS


_acceptance: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion reported in the summary")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    name = report.user_properties and dict(report.user_properties).get("criterion")
    if name:
        _acceptance[name] = "PASS" if report.passed else "FAIL"


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("acceptance")
    if marker:
        item.user_properties.append(("criterion", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        terminalreporter.write_line(f"{outcome}  {name}")
