"""Select the compiled kernels when available, else the pure-Python ones.

Set ``JACSTRATA_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("JACSTRATA_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import (  # noqa: F401
        affine_equivariance,
        canonical_order,
        count_fixed_classes,
        label_preserving_automorphisms,
        reduce_vector,
    )
else:
    try:
        from ._kernels import (  # noqa: F401
            affine_equivariance,
            canonical_order,
            count_fixed_classes,
            label_preserving_automorphisms,
            reduce_vector,
        )

        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import (  # noqa: F401
            affine_equivariance,
            canonical_order,
            count_fixed_classes,
            label_preserving_automorphisms,
            reduce_vector,
        )
