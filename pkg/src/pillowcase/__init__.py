"""Numerical study of the perturbed traceless SU(2) character varieties of the
earring and bypass tangles, their restriction maps into a product of
pillowcases, and the induced operations (doubling, figure-eight) on immersed
curves.

Subpackage layout:

- ``quat``        unit-quaternion arithmetic over numpy arrays
- ``words``       group words, tangle presentations, the gauge slice, and the
                  defining functions of the two varieties
- ``variety``     per-fiber solving, fold circles, topology checks, and the
                  closed-form circles over the bottom edge
- ``projection``  pillowcase points, the two restriction maps, and all
                  symmetries / involutions
- ``curves``      immersed-curve calculus in the pillowcase
- ``compose``     correspondence composition via pseudo-arclength continuation
- ``cli``         command-line surface (trace / compose / scene / verify)

Hot kernels live in ``_kernels`` and are numba-compiled by default; set
``PILLOWCASE_NUMBA=0`` for the pure-numpy fallback.
"""

__version__ = "0.1.0"

EARRING = "earring"
BYPASS = "bypass"
VARIANTS = (EARRING, BYPASS)
