"""Unit conventions.

LJ fluid: reduced units (epsilon = sigma = m = 1, k_B = 1).
Methane: kcal/mol, Angstrom, amu; the derived time unit is
sqrt(amu * A^2 / (kcal/mol)) = 48.888 fs.
"""

import math

AVOGADRO = 6.02214076e23
KB_KCAL_PER_MOL_K = 0.0019872043
AMU_KG = 1.66053906660e-27
KCAL_J = 4184.0
ATM_PA = 101325.0

# seconds per internal time unit for the (kcal/mol, A, amu) system
TIME_UNIT_S = math.sqrt(AMU_KG * 1e-20 / (KCAL_J / AVOGADRO))
TIME_UNIT_FS = TIME_UNIT_S * 1e15
PS = 1e-12 / TIME_UNIT_S  # one picosecond in internal time units
FS = PS * 1e-3

# (kcal/mol)/A^3 -> atm
PRESSURE_ATM = KCAL_J / AVOGADRO / 1e-30 / ATM_PA


def beta_from_kelvin(T):
    return 1.0 / (KB_KCAL_PER_MOL_K * T)
