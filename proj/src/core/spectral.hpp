#ifndef SMAGDA_CORE_SPECTRAL_HPP
#define SMAGDA_CORE_SPECTRAL_HPP

#include "core/common.hpp"

namespace smagda {

// Largest absolute eigenvalue of a symmetric matrix to ~1e-10 relative
// accuracy. Power iteration on A^2 (sign-proof for symmetric spectra) with a
// reseeded restart when the start vector lands orthogonal to the top
// eigenspace. Throws std::invalid_argument if the matrix is not symmetric
// (asymmetry above 1e-12 of its magnitude) and std::runtime_error if 1e5
// iterations do not converge. A zero matrix returns 0.
double spectral_norm(const Mat& a);

}  // namespace smagda

#endif  // SMAGDA_CORE_SPECTRAL_HPP
