"""Physical constants and package-wide sign conventions.

Phasor convention: e^{+i omega t}. Impedances are i*omega*L, admittances are
i*omega*C, and passive loss appears as a positive real part of an impedance.

Complex mode frequencies are written omega_tilde = omega - i*delta_omega, so
delta_omega = -Im(omega_tilde) is positive for decay and negative for
anti-damping.

Refractive index and material parameters follow the lossy-medium notation
n = n' - i*n'', eps = eps' - i*eps'', mu = mu' - i*mu'': the double-primed
(loss) parts equal minus the imaginary part of the stored complex value and
are positive in passive media.
"""

import math

C_LIGHT = 299_792_458.0            # speed of light, m/s
MU0 = 1.25663706212e-6             # vacuum permeability, H/m
EPS0 = 1.0 / (MU0 * C_LIGHT**2)    # vacuum permittivity, F/m (eps0*mu0*c^2 = 1 exactly)
ETA0 = MU0 * C_LIGHT               # vacuum wave impedance, ohm
TWO_PI = 2.0 * math.pi
