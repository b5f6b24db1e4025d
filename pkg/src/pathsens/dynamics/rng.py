"""Counter-based Gaussian noise.

Every half-kick draws from a Philox stream whose key is the run seed and whose
counter encodes (step, substep); atom ``i`` always receives rows ``i`` of that
stream. The noise at a given step is therefore a pure function of
(seed, step, substep, atom) and does not depend on how a run is segmented.
"""

import numpy as np


class CounterNoise:
    def __init__(self, seed: int):
        self.seed = int(seed) & (2**64 - 1)
        self._bitgen = np.random.Philox(key=self.seed)
        self._gen = np.random.Generator(self._bitgen)
        self._state = self._bitgen.state

    def normals(self, step: int, substep: int, n_atoms: int, dim: int = 3) -> np.ndarray:
        # word 0 is the one Philox increments while drawing; keep it free
        st = self._state
        st["state"]["counter"] = np.array([0, substep, step, 0], dtype=np.uint64)
        # drop any buffered output so the draw starts exactly at the counter
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bitgen.state = st
        return self._gen.standard_normal((n_atoms, dim))

    def generator(self, stream: int) -> np.random.Generator:
        """Independent generator for non-dynamical draws (initial momenta etc.)."""
        counter = np.array([0, stream, 0, 1], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self.seed, counter=counter))
