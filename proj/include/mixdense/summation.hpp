#pragma once

#include <cstddef>
#include <span>

namespace mixdense {

/// Block size at which pairwise recursion falls back to a straight loop.
inline constexpr std::size_t pairwise_block = 128;

/// Sum term(0) + ... + term(n-1) by recursive halving.
///
/// The association order depends only on n, so any caller that evaluates the
/// same terms gets bit-identical results regardless of threading.
template <class Term>
double pairwise_accumulate(std::size_t begin, std::size_t end, const Term& term)
{
    const std::size_t n = end - begin;
    if (n <= pairwise_block) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = begin + n / 2;
    return pairwise_accumulate(begin, mid, term) + pairwise_accumulate(mid, end, term);
}

inline double pairwise_sum(std::span<const double> v)
{
    return pairwise_accumulate(0, v.size(), [&](std::size_t i) { return v[i]; });
}

/// Neumaier-compensated sum; used where a 1e-12 simplex tolerance must hold
/// for very long weight vectors.
inline double compensated_sum(std::span<const double> v)
{
    double s = 0.0;
    double c = 0.0;
    for (double x : v) {
        const double t = s + x;
        if ((s >= 0 ? s : -s) >= (x >= 0 ? x : -x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

}  // namespace mixdense
