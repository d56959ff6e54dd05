"""Smoke test for the Python extension. Run after installing crates/python."""

import math

import surface_poisson as sp


def main():
    phi = sp.Representation.sample("SU2", 2, seed=3)
    assert phi.relator_residual() <= 1e-10, phi
    assert phi.orbit_type() == (0, "irreducible")
    h0, h1, h2, complex_residual = phi.cohomology()
    assert (h0, h1, h2) == (0, 6, 0) and complex_residual <= 1e-9

    back = sp.Representation.from_json(phi.to_json())
    for a, b in zip(phi.images(), back.images()):
        for ra, rb in zip(a, b):
            assert max(abs(u - v) for u, v in zip(ra, rb)) <= 1e-15

    f = sp.Function("tr(x1*y1) + 0.5*tr(x2)^2")
    h = sp.Function("tr(x1)")
    k = sp.Function("tr(y2)")
    assert math.isfinite(f(phi)) and len(f.differential(phi)) == 12
    fh = sp.bracket(f, h, phi)
    assert abs(fh + sp.bracket(h, f, phi)) <= 1e-10
    assert abs(sp.bracket(h, sp.Function("tr(x2)"), phi)) <= 1e-8
    assert sp.jacobi_residual(f, h, k, phi) <= 1e-4

    rank, gap = sp.poisson_rank(phi)
    assert rank == 6 and gap >= 1e4

    passed, min_gap, records = sp.kummer_census(seed=1, abelian=4, irreducible=4)
    assert passed and min_gap >= 1e4 and len(records) == 24

    assert sp.dehn_twist_residual(f, h, phi) <= 1e-8

    end, drift, residual = sp.flow(f, phi, t_end=0.2, dt=1e-3)
    assert drift <= 1e-6 and residual <= 1e-8 and end.genus == 2

    u2 = sp.Representation.sample("U2", 2, seed=0)
    degenerate = sp.Form.diag("U2", [1.0, 1.0, 1.0, 0.0])
    assert degenerate.signature() == (3, 0, 1)
    casimir = sp.Function("redet(x1)")
    assert abs(sp.bracket(casimir, sp.Function("tr(x2*y1)"), u2, degenerate)) <= 1e-8

    try:
        sp.Function("tr(x1")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed expression accepted")

    print(f"surface_poisson {sp.__version__}: smoke test passed ({fh=:.6f}, {rank=}, {gap=:.2e})")


if __name__ == "__main__":
    main()
