# Copyright 2026 The tofec Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import json
import os
import pathlib
import subprocess

import pytest

import tofec

ROOT = pathlib.Path(__file__).resolve().parents[2]
EXAMPLE = tofec.DelayParams(20, 20, 10, 15)


def example_class():
    return tofec.ClassSpec(3.0, EXAMPLE, k_max=6, r_max=2.0)


def test_service_delay_and_usage():
    c = example_class()
    # Two replicas of the 3 MB file, first of two completions: 80 + 55 / 2.
    assert tofec.expected_service_delay(c, tofec.CodeChoice(2, 1)) == pytest.approx(107.5)
    assert tofec.expected_usage(c, tofec.CodeChoice(2, 1)) == pytest.approx(2 * 80 + 55)


def test_solver_and_thresholds():
    c = example_class()
    code = tofec.solve_class_at_load(c, 8.0, 16)
    assert code.n == pytest.approx(code.r * code.k)
    table = tofec.build_thresholds(c, 16)
    assert table.interleaved()
    assert table.select_k(1e6) == 1
    assert table.select_k(0.0) == 6


def test_brute_force_returns_admissible_code():
    c = example_class()
    best = tofec.brute_force_best_static([c], 0.02, 16)
    assert best.codes[0] in tofec.admissible_codes(c)


def test_fit_round_trip():
    trace = tofec.generate_synthetic_trace(EXAMPLE, [0.5, 1.0, 1.5, 3.0], 5000, 3)
    params, warnings = tofec.fit_params(trace)
    assert not warnings
    for got, want in zip(
        (params.delta_base, params.delta_slope, params.psi_base, params.psi_slope),
        (20, 20, 10, 15),
    ):
        assert got == pytest.approx(want, rel=0.1)


def test_codec_round_trip():
    data = bytes(range(250)) * 4 + b"tail"
    coded = tofec.encode(data, 128, 2.0)
    assert coded.N == 2 * coded.K
    parity = [(s, coded.strip(s)) for s in range(coded.K + 1, 2 * coded.K + 1)]
    assert tofec.decode_strips(coded, parity) == data
    chunks = [(j, coded.chunk(2, j)) for j in (3, 4)]
    assert tofec.decode_chunks(coded, 2, chunks) == data
    again = tofec.CodedFile.deserialize(coded.serialize())
    assert again.original_size == len(data)


def test_simulate_scenario():
    config = {
        "scenario": "smoke",
        "system": {"L": 16},
        "classes": [
            {
                "file_size_mb": 3,
                "k_max": 6,
                "r_max": 2,
                "params": {"delta_base_ms": 20, "delta_slope_ms_per_mb": 20,
                           "psi_base_ms": 10, "psi_slope_ms_per_mb": 15},
            }
        ],
        "arrivals": {"kind": "poisson", "rate_per_s": 20},
        "horizon_ms": 100000,
        "seed": 5,
    }
    text = json.dumps(config)
    a = tofec.simulate(text, "tofec")
    b = tofec.simulate(text, "tofec")
    assert not a["overloaded"]
    assert a["summary"]["mean"] == b["summary"]["mean"]
    assert sum(a["k_fraction"]) == pytest.approx(1.0)
    fixed = tofec.simulate(text, "static(2,1)")
    assert set(fixed["codes"]) == {(2, 1)}


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        tofec.ClassSpec(3.0, tofec.DelayParams(-1, 0, 0, 0))


@pytest.mark.skipif("TOFEC_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_solve():
    out = subprocess.run(
        [os.environ["TOFEC_CLI"], "solve", "--params", str(ROOT / "scenarios" / "params_a.txt"),
         "-L", "16", "--file-size-mb", "3", "--k-max", "6", "--r-max", "2", "--load", "0.5"],
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.splitlines()[0].startswith("mode,value,class_id")
