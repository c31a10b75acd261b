#pragma once

#include <cstdint>
#include <stdexcept>

#include "logspace.hpp"

namespace xormmap {

// Quantized-weight embedding: a weight w <= M and a bit budget l determine
// which auxiliary bits y_i are forced to zero, namely every i with
// w/M <= 2^(i-1-l). The condition is monotone in i, so the forced set is the
// suffix {l-count+1, ..., l}; the unforced prefix has l-count free bits.
// Comparison runs in log space with a 1e-12 relative epsilon; ties (equality)
// force the bit, matching the "<=" in the defining condition. A zero weight
// forces the whole suffix, so its slice still has size one: that residual is
// the M*2^(n-l) slack in the sandwich bound, by construction not an error.
inline int forced_count(LogWeight w, LogWeight M, int l) {
    if (l < 1) throw std::invalid_argument("forced_count: need l >= 1");
    if (M.is_zero() || w > M) throw std::invalid_argument("forced_count: need 0 < M and w <= M");
    if (w.is_zero()) return l;
    const double ratio = w.log() - M.log();  // log(w/M) <= 0
    // smallest i in [1, l] with ratio <= (i-1-l) ln2
    for (int i = 1; i <= l; i++) {
        double rhs = double(i - 1 - l) * 0.6931471805599453094;
        double eps = 1e-12 * (rhs < 0 ? -rhs : 1.0);
        if (ratio <= rhs + eps) return l - i + 1;
    }
    return 0;
}

// |S_a(w,l,x)| = 2^(free bits); a power of two in [1, 2^l].
inline std::uint64_t slice_size(LogWeight w, LogWeight M, int l) {
    if (l > 62) throw std::invalid_argument("slice_size: l too large for exact integer");
    return std::uint64_t(1) << (l - forced_count(w, M, l));
}

}  // namespace xormmap
