import xml.etree.ElementTree as ET

import numpy as np

from specoarse.matrix_core import gen_laplacian, gershgorin_discs
from specoarse.svg import gershgorin_svg, spectrum_svg

NS = "{http://www.w3.org/2000/svg}"


def test_spectrum_svg_is_wellformed():
    svg = spectrum_svg(np.array([0.1, 0.5, 1.0]), [([0.2, 0.9], [(0.2, 0.1), (0.9, 1.0)])],
                       title="a & b")
    root = ET.fromstring(svg.encode())
    assert root.tag == NS + "svg" and root.get("version") == "1.1"
    assert len(root.findall(f".//{NS}circle")) == 2
    arrows = [ln for ln in root.iter(NS + "line") if ln.get("marker-end")]
    assert len(arrows) == 2


def test_spectrum_svg_without_oracle_and_degenerate_range():
    root = ET.fromstring(spectrum_svg(None, [([1.0], [])]).encode())
    assert root.tag == NS + "svg"


def test_gershgorin_svg():
    discs = gershgorin_discs(gen_laplacian([3, 3]))
    svg = gershgorin_svg(discs, eigenvalues=np.array([1.0, 2.0 + 0.5j]))
    root = ET.fromstring(svg.encode())
    circles = root.findall(f".//{NS}circle")
    assert len(circles) == len(discs) + 2
    assert svg == gershgorin_svg(discs, eigenvalues=np.array([1.0, 2.0 + 0.5j]))
