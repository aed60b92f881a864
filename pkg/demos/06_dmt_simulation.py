"""Rayleigh-fading simulation of the spherical lattice code.

First a SISO antipodal sanity check against the closed form, then the
Golden code at multiplexing gain r = 0.5 on a 2x2 channel, compared with
the union bound built from the determinant sum.
"""

import numpy as np

from cdalattice import SimConfig, build_lattice, dmt_reference, load_spec, run_simulation
from cdalattice.dmt import bpsk_rayleigh_error_rate, db_to_linear, union_bound

bpsk = np.array([[[1.0]], [[-1.0]]], dtype=complex)
res = run_simulation(None, SimConfig(1, 1, [10, 15, 20, 25, 30], 50_000, seed=1), bpsk)
for rec in res.records:
    print(f"SISO {rec.snr_db:>4} dB  Pe={rec.error_rate:.2e}  closed form {bpsk_rayleigh_error_rate(db_to_linear(rec.snr_db)):.2e}")
print(f"diversity slope {res.slope:.3f}, reference d*(0) = {dmt_reference(1, 1, 0)}")

lat = build_lattice(load_spec("golden"))
cfg = SimConfig(2, 2, [15, 20, 25, 30], 20_000, seed=1, rate_param=0.5)
res = run_simulation(lat, cfg)
for rec in res.records:
    ub = union_bound(lat, db_to_linear(rec.snr_db), 0.5, 2)
    print(f"2x2 {rec.snr_db:>4} dB  |C|={rec.codebook_size:<4} Pe={rec.error_rate:.2e}  union bound {ub:.2e}")
print("flags:", res.flags, " reference d*(0.5) =", dmt_reference(2, 2, 0.5))
