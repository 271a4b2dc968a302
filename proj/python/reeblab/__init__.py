"""Numerical laboratory for Reeb dynamics near Zoll contact forms.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from ._reeblab import (  # noqa: F401
    ContactForm,
    ReeblabError,
    __version__,
    c3_distance,
    contact_volume,
    discmap_roundtrip,
    find_orbits,
    integrate,
    perturbed_form,
    ratios,
    reeb_at,
    rotation_family,
    run_sweep,
    scaled_form,
    section_suite,
    zoll_form,
)
