import struct

import numpy as np
import pytest

import diracharmonic as dh
from diracharmonic.fieldio import _HEADER

from conftest import elliptic_pair


def test_map_round_trip_bit_identical(tmp_path):
    _, phi, _ = elliptic_pair(32)
    path = tmp_path / "phi.dhm"
    dh.write_field(path, phi)
    again = dh.read_field(path)
    assert np.array_equal(again.values, phi.values)
    assert again.chart.n == 32
    assert again.chart.topology == "torus"
    assert again.target.kind == "sphere"
    dh.write_field(tmp_path / "copy.dhm", again)
    assert (tmp_path / "copy.dhm").read_bytes() == path.read_bytes()


def test_spinor_round_trip(tmp_path):
    _, phi, psi = elliptic_pair(32)
    path = tmp_path / "psi.dhm"
    dh.write_field(path, psi)
    again = dh.read_field(path)
    assert np.array_equal(again.values, psi.values)


def test_header_fields(tmp_path):
    chart = dh.DomainChart.disk(48, side=2.4)
    phi = dh.MapField.constant(chart, dh.Sphere(2), (0, 0, 1))
    path = tmp_path / "d.dhm"
    dh.write_field(path, phi)
    hd = dh.read_header(path)
    assert (hd.topology, hd.kind, hd.ambient_dim, hd.n) == ("disk", "map", 3, 48)
    assert hd.side == 2.4
    assert hd.payload_bytes == 48 * 48 * 3 * 8


def test_payload_layout_is_documented_interleave(tmp_path):
    # Decode the spinor payload by hand straight from the documented bytes.
    chart = dh.DomainChart.torus(8, side=1.0)
    vals = np.zeros(chart.shape + (3, 2), dtype=complex)
    vals[0, 0, 0] = 1.0 + 2.0j
    vals[0, 0, 1] = complex(3.0, -4.0)
    phi = dh.MapField.constant(chart, dh.Sphere(2), (0, 0, 1))
    psi = dh.project_spinor(phi, vals)
    path = tmp_path / "s.dhm"
    dh.write_field(path, psi)
    blob = path.read_bytes()
    payload = np.frombuffer(blob[_HEADER.size:], dtype="<f8").reshape(8, 8, 3, 4)
    assert payload[0, 0, 0].tolist() == [psi.values[0, 0, 0, 0].real,
                                         psi.values[0, 0, 0, 0].imag,
                                         psi.values[0, 0, 0, 1].real,
                                         psi.values[0, 0, 0, 1].imag]


def _valid_blob(tmp_path):
    _, phi, _ = elliptic_pair(16)
    path = tmp_path / "ok.dhm"
    dh.write_field(path, phi)
    return bytearray(path.read_bytes())


@pytest.mark.parametrize("mutate,code", [
    (lambda b: b"XXXX" + bytes(b[4:]), "bad_magic"),
    (lambda b: bytes(b[:4]) + struct.pack("<I", 9) + bytes(b[8:]), "bad_version"),
    (lambda b: bytes(b[:-8]), "bad_size"),
    (lambda b: bytes(b[:60]) + bytes([b[60] ^ 0xFF]) + bytes(b[61:]), "bad_checksum"),
    (lambda b: bytes(b[:20]), "truncated"),
])
def test_malformed_files_have_distinct_codes(tmp_path, mutate, code):
    blob = _valid_blob(tmp_path)
    bad = tmp_path / "bad.dhm"
    bad.write_bytes(mutate(blob))
    with pytest.raises(dh.FieldFileError) as err:
        dh.read_field(bad)
    assert err.value.code == code


def test_chart_mismatch_rejected(tmp_path):
    _, phi, _ = elliptic_pair(16)
    path = tmp_path / "ok.dhm"
    dh.write_field(path, phi)
    with pytest.raises(dh.FieldFileError) as err:
        dh.read_field(path, chart=dh.DomainChart.torus(32))
    assert err.value.code == "chart_mismatch"


def test_flat_map_inferred(tmp_path):
    chart = dh.DomainChart.torus(16)
    flat = dh.Flat(3)
    phi = dh.MapField(chart, flat, np.full(chart.shape + (3,), 2.0))
    path = tmp_path / "flat.dhm"
    dh.write_field(path, phi)
    again = dh.read_field(path)
    assert again.target.kind == "flat"
