#pragma once

#include <utility>
#include <vector>

#include "hofa/function.hpp"

namespace hofa {

/// Fourier coefficients indexed by character: coeff[chi] = E_x f(x) conj(chi(x)).
std::vector<cplx> fourier_coefficients(const GroupFunction& f);

/// Reconstructs f(x) = sum_chi coeff[chi] chi(x).
GroupFunction from_fourier(const FiniteAbelianGroup& g, const std::vector<cplx>& coeff);

/// Characters whose coefficient magnitude is at least tau, sorted by
/// decreasing magnitude with character index breaking ties.
std::vector<std::pair<long long, cplx>> dominant_spectrum(const GroupFunction& f, double tau);

} // namespace hofa
