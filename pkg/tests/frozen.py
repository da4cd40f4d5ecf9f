"""Reference values produced once by ``tests/oracle.py`` and frozen here."""

from __future__ import annotations

# max over distinct pairs of p^2 tr(F_i F_j), r = 1 - p^-3
PERTURBED_MAX_SQ = {
    3: 0.3474299575199093,
    5: 0.21091486905474802,
    7: 0.1504415287980193,
    11: 0.09602031878356898,
    13: 0.08077795421747223,
}

# max cross-basis |<.|.>| for the polynomial AMUBs, and the constants C = max_n (max * n^e)
AMUB_POLY_MAX = {
    (4, 1): 0.8090169943749475,
    (4, 2): 0.9393474323917529,
    (6, 1): 0.5710842225089731,
    (6, 2): 0.9009688679024196,
    (10, 1): 0.48150958996389237,
    (10, 2): 0.6993383656909551,
    (12, 1): 0.42501375592516843,
    (12, 2): 0.6627733522342946,
}
AMUB_POLY_C = {1: 1.2842344279309423, 2: 1.4100924822801635}
AMUB_POLY_EXPONENT = {1: 1 / 3, 2: 1 / 4}

# approximate SIC: max |<psi_f|psi_g>|; slack above 2 n^{-1/2} (zero: all observed maxima sit below it)
APPROX_SIC_MAX = {
    7: 0.6772769730217715,
    8: 0.7971934608601943,
    11: 0.5351020626761753,
    12: 0.6627733522342945,
    13: 0.5348677097547332,
}
APPROX_SIC_SLACK = 0.0

# character AMUBs: (n, d) -> (p, max cross overlap)
AMUB_CHAR_MAX = {
    (4, 1): (5, 0.5590169943749476),
    (6, 1): (7, 0.4409585518440988),
    (10, 1): (11, 0.33166247903554025),
    (12, 1): (13, 0.3004626062886663),
    (6, 2): (7, 0.8021698245992225),
}

# construction I, prime q: max q^2 tr(F_i F_j)
PRUNED_MAX = {
    3: 0.3333333333333334,
    5: 0.25251883631726973,
    7: 0.1784296877526718,
    13: 0.09018236702023366,
}

# relative slack on frozen regression thresholds
FREEZE_RTOL = 1e-9

# |sum_{u=1}^{101} e_101(u^3) e_100(u)| / 101^{3/4}
MIXED_RATIO_101 = 0.2033088153723733
