"""Smoke test for the `nonherm` extension module.

Build with `maturin develop -m crates/python/Cargo.toml`, or copy
target/release/libnonherm.so to nonherm.so somewhere on PYTHONPATH.
"""

import sys

import nonherm


def main():
    w, z = 1.0 + 0.0j, 0.5 - 0.05j
    h = nonherm.hamiltonian(w, z)
    assert h[0][0] == 0 and h[1][1] == 2 * z

    v = nonherm.sheet_sqrt(w, z)
    assert abs(v * v - (abs(w) ** 2 + z * z)) < 1e-14

    f = nonherm.eigenframe(w, z)
    for a in range(2):
        r, e = f["r"][a], f["E"][a]
        hr = [h[0][0] * r[0] + h[0][1] * r[1], h[1][0] * r[0] + h[1][1] * r[1]]
        assert all(abs(hr[i] - e * r[i]) < 1e-12 for i in range(2))
        for b in range(2):
            lb = f["l"][b]
            ip = lb[0].conjugate() * r[0] + lb[1].conjugate() * r[1]
            assert abs(ip - (1.0 if a == b else 0.0)) < 1e-12
    assert abs(nonherm.ep_distance(w, z) - abs(f["E"][1] - f["E"][0])) < 1e-12

    names = [n for n, _ in nonherm.list_scenarios()]
    assert names[:2] == ["fig1", "fig2"], names

    run = nonherm.run_scenario("fig2", steps=2000)
    assert len(run["s"]) == 2001 and run["s"][-1] == 1.0
    assert "FALSE_INVERSION" in run["flags"], run["flags"]
    assert run["flip"] is None

    loop = nonherm.run_scenario("fig5", steps=4000)
    assert loop["flip"] == "ADIABATIC_FLIP", loop["flip"]

    try:
        nonherm.run_scenario("nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown scenario accepted")

    results = nonherm.check("hermitian")
    assert results and all(ok for _, ok, _ in results), results
    print("python smoke test ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
