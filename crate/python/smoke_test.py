"""Quick end-to-end check of the pymmwave extension module."""

import csv
import io
import math

import pymmwave as mm


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    s = mm.Squeezing.from_db(10.0)
    close(s.variance, 5.05, 1e-12)
    close(mm.Squeezing.from_variance(1.25).db, 10 * math.log10(2), 1e-12)

    lossless = mm.ThermalChannel(1.0, 0.0)
    close(mm.tmsv_log_negativity(s, lossless), 2 * s.r / math.log(2), 1e-9)

    nbar = mm.mean_photon_number(300.0, 300.0)
    ch = mm.ThermalChannel(0.99, nbar)
    tau_eb = mm.eb_transmissivity(ch.omega)
    close(tau_eb, (ch.omega - 1) / (ch.omega + 1), 1e-15)
    assert tau_eb < mm.eb_transmissivity(ch.omega, "direct_relay") < mm.eb_transmissivity(ch.omega, "swap_relay")

    link = mm.ThermalChannel.from_link(300.0, 300.0, 50.0)
    print(f"E_LN at 300 GHz over 50 m: {mm.tmsv_log_negativity(s, link):.4f}")
    print(f"eb distance at 300 GHz: {mm.eb_distance(300.0, 300.0):.1f} m")
    close(mm.half_beamwidth_deg(300.0, 1.0), 1 / 30, 1e-12)

    a = mm.ThermalChannel(0.999, nbar)
    direct = mm.direct_relay_log_negativity(s, a, a)
    swap = mm.swap_relay_log_negativity(s, a, a)
    assert direct >= swap

    v = mm.Squeezing.from_variance(1.25)
    rho = mm.FockState.tmsv(v, cutoff=24)
    close(rho.log_negativity(), 1.0, 1e-6)
    near = mm.ThermalChannel(0.995, nbar)
    out = rho.evolve(near, cutoff=24)
    close(out.log_negativity(), mm.tmsv_log_negativity(v, near), 1e-3)
    close(out.trace() + out.trace_deficit, 1.0, 1e-9)

    close(mm.FockState.noon(2).log_negativity(), 1.0, 1e-9)
    assert mm.noon_log_negativity(2, near) > mm.tmsv_log_negativity(v, near)
    pss = mm.FockState.pss(v).evolve(near)
    assert pss.log_negativity() > mm.tmsv_log_negativity(v, near)

    assert len(mm.scenario_names()) == 6
    text = mm.run_scenario("fig2", "points = 11\n[fig2]\nfreq_ghz = 300\n")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    assert rows[0][:3] == ["freq_ghz", "temp_k", "tau"], rows[0]
    assert len(rows) == 12
    assert text == mm.run_scenario("fig2", "points = 11\n[fig2]\nfreq_ghz = 300\n")

    try:
        mm.run_scenario("fig2", "[general]\npoints = 11\n")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown section accepted")

    try:
        mm.ThermalChannel(1.5, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("tau > 1 accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
