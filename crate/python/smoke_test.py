"""Smoke test for the wickquant Python extension.

Build and install first, e.g. ``pip install --no-build-isolation ./crates/python``
or ``maturin develop -m crates/python/Cargo.toml``, then run
``python python/smoke_test.py``.
"""

import wickquant as wq


def main() -> None:
    y = wq.WickSeries.y(1, 4)
    yb = wq.WickSeries.ybar(1, 4)
    prod = y.star(yb)
    assert str(prod) == "y ȳ − ℏ", str(prod)
    assert yb.star(y) == wq.WickSeries(1, 4, [(0, [1], [1], "1")])
    assert prod.conjugate() == yb.conjugate().star(y.conjugate())

    fs = wq.BTContext.fubini_study(6)
    value = fs.star_eval([(0, [1], [0], "1")], [(0, [0], [1], "1")])
    assert value[0] == (2, "-1", "0"), value

    out = fs.rep_act([(0, [1], [1], "1")], wq.WickSeries.y(1, 6))
    assert str(out) == "2 ℏ y + 2 ℏ^2 y", str(out)

    varphi, coords, frame = wq.k_normalize(
        1, 5, [(0, [1], [1], "1"), (0, [1], [0], "3"), (0, [0], [1], "3")]
    )
    assert str(varphi) == "y ȳ", str(varphi)
    assert str(frame) == "3 y", str(frame)

    assert wq.cp1_norm_expansion(0, 4) == ["1", "-1", "1", "-1", "1"]
    assert all(ok for _, ok, _ in wq.cp1_peak_identity(3, 4))
    for _, _, slope in wq.cp1_composition_slopes([(0, 0), (1, 1)], [32, 64, 128, 256, 512], 2):
        assert slope is None or slope <= -2.7, slope

    try:
        wq.WickSeries(1, 2, [(0, [3], [0], "1")])
    except wq.WickquantError as e:
        assert "degree" in str(e)
    else:
        raise AssertionError("expected a degree-window error")

    print("wickquant smoke test: OK")


if __name__ == "__main__":
    main()
