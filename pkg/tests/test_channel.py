import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lbcbeam.channel import (
    AngularChannel,
    ArrayGeometry,
    ChannelMatrix,
    PathCluster,
    db2lin,
    dbm2watt,
    dft_matrix,
    lin2db,
    sample_channel,
    snr_per_path,
    spatial_signature,
    to_angular,
    to_physical,
)


def test_geometry():
    g = ArrayGeometry(8, 0.5)
    assert g.l_norm == 4.0
    with pytest.raises(ValueError):
        ArrayGeometry(0)
    with pytest.raises(ValueError):
        ArrayGeometry(4, 0.0)


def test_signature_examples():
    e = spatial_signature(0.0, ArrayGeometry(5))
    assert np.allclose(e, np.ones(5) / np.sqrt(5))
    e = spatial_signature(1.0, ArrayGeometry(2, 0.5))
    assert np.allclose(e, np.array([1, -1]) / np.sqrt(2))


@given(st.floats(-1, 1), st.integers(1, 40))
def test_signature_unit_norm(omega, n):
    assert np.isclose(np.linalg.norm(spatial_signature(omega, ArrayGeometry(n))), 1.0)


def test_dft_examples():
    assert np.allclose(dft_matrix(ArrayGeometry(1)), [[1.0]])
    u = dft_matrix(ArrayGeometry(2))
    assert np.allclose(u[:, 0], np.array([1, 1]) / np.sqrt(2))
    assert np.allclose(u[:, 1], np.array([1, -1]) / np.sqrt(2))


@pytest.mark.parametrize("n", [1, 2, 7, 8, 15, 32])
def test_dft_unitary(n):
    u = dft_matrix(ArrayGeometry(n))
    assert np.linalg.norm(u.conj().T @ u - np.eye(n)) < 1e-10


def test_dft_columns_are_signatures():
    g = ArrayGeometry(6)
    u = dft_matrix(g)
    for i in range(6):
        assert np.allclose(u[:, i], spatial_signature(i / g.l_norm, g))


def test_sample_channel_contract():
    rng = np.random.default_rng(3)
    assert len(sample_channel(rng, 4, 4, 0)) == 0
    ch = sample_channel(rng, 32, 32, 3)
    assert len(ch) == 3
    assert len({c.rx_bin for c in ch.clusters}) == 3
    assert len({c.tx_bin for c in ch.clusters}) == 3
    with pytest.raises(ValueError):
        sample_channel(rng, 2, 5, 3)


def test_sample_channel_window():
    rng = np.random.default_rng(0)
    mags = []
    for _ in range(500):
        ch = sample_channel(rng, 15, 15, 1, 14.0, ref_amplitude=2.0)
        mags.append(abs(ch.clusters[0].gain))
    loss = -20 * np.log10(np.array(mags) / 2.0)
    assert loss.min() >= 0 and loss.max() <= 14.0
    # roughly uniform in dB
    assert abs(loss.mean() - 7.0) < 0.6


def test_presence_flag():
    rng = np.random.default_rng(1)
    sizes = [len(sample_channel(rng, 8, 8, 2, presence=0.5)) for _ in range(400)]
    assert set(sizes) <= {0, 1, 2}
    assert 0.8 < np.mean(sizes) < 1.2


def test_angular_validation():
    with pytest.raises(ValueError):
        AngularChannel(2, 2, (PathCluster(0, 0, 1), PathCluster(0, 0, 2)))
    with pytest.raises(ValueError):
        AngularChannel(2, 2, (PathCluster(2, 0, 1),))
    with pytest.raises(ValueError):
        AngularChannel(2, 2, (PathCluster(0, 0, 0),))


def test_dense_support_and_sparsity():
    ch = AngularChannel(3, 4, (PathCluster(1, 2, 0.5j), PathCluster(3, 0, -1)))
    d = ch.dense()
    assert d.shape == (3, 4)
    assert np.count_nonzero(d) == 2
    assert d[2, 1] == 0.5j and d[0, 3] == -1
    assert ch.support == {(1, 2), (3, 0)}


def test_to_physical_examples():
    u = dft_matrix(ArrayGeometry(4))
    z = to_physical(AngularChannel(4, 4), u, u)
    assert not z.entries.any()
    one = to_physical(AngularChannel(4, 4, (PathCluster(0, 0, 1),)), u, u)
    assert np.allclose(one.entries, np.outer(u[:, 0], u[:, 0].conj()))
    with pytest.raises(ValueError):
        to_physical(AngularChannel(3, 4), u, u)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_roundtrip(seed, L):
    rng = np.random.default_rng(seed)
    n_r, n_t = 8, 15
    ch = sample_channel(rng, n_t, n_r, L)
    u_r, u_t = dft_matrix(ArrayGeometry(n_r)), dft_matrix(ArrayGeometry(n_t))
    back = to_angular(to_physical(ch, u_r, u_t), u_r, u_t)
    assert np.linalg.norm(back - ch.dense()) < 1e-10
    off = np.abs(back[ch.dense() == 0])
    assert off.max() < 1e-9 * np.abs(ch.dense()).max()


def test_record_roundtrip():
    ch = sample_channel(np.random.default_rng(2), 8, 8, 2)
    rec = json.loads(ch.to_json())
    assert rec["n_r"] == 8 and len(rec["clusters"]) == 2
    assert AngularChannel.from_record(rec) == ch


def test_snr_examples():
    assert np.isclose(snr_per_path(2.0, 1.0, np.sqrt(0.5)), 1.0)
    assert np.isclose(snr_per_path(10.0, 1.0, np.sqrt(0.1)), 1.0)
    with pytest.raises(ValueError):
        snr_per_path(0, 1, 1)


def test_reference_power_budget():
    # N0 = -95 dBm and 136 dB path loss; power for 0 dB per-path SNR
    n0 = dbm2watt(-95)
    g = 10 ** (-136 / 20)
    p = n0 / g**2
    assert np.isclose(lin2db(p / 1e-3), -95 + 136)
    assert np.isclose(snr_per_path(p, n0, g), 1.0)
    assert np.isclose(db2lin(3.0), 10**0.3)


def test_channel_matrix_holds_entries():
    q = ChannelMatrix(np.eye(2))
    assert q.entries.shape == (2, 2)
