"""Kernel selection: compiled Cython speedups when available, pure Python otherwise.

``DFIREES_PURE=1`` in the environment forces the pure implementation.
"""

import os

if os.environ.get("DFIREES_PURE") == "1":
    from . import pure as impl
else:
    try:
        from . import _speedups as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as impl

IMPL = impl.IMPL
mono_divides = impl.mono_divides
primitive = impl.primitive
add_scaled = impl.add_scaled
s_polynomial = impl.s_polynomial
normal_form = impl.normal_form
normal_form_mod = impl.normal_form_mod
find_divisor = impl.find_divisor
