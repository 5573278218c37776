#pragma once

#include "psq/core_arith.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <span>

namespace psq {

using cplx = std::complex<double>;

/// Pairwise (cascade) summation. The split points depend only on the length,
/// so the result is reproducible regardless of how the input was produced.
inline double pairwise_sum(std::span<const double> xs)
{
	if (xs.size() <= 16) {
		double s = 0.0;
		for (double x : xs)
			s += x;
		return s;
	}
	std::size_t half = xs.size() / 2;
	return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// e(x) = exp(2 pi i x), with x reduced mod 1 before the trig call.
inline cplx unit_phase(double x)
{
	double r = x - std::floor(x);
	double t = 2.0 * std::numbers::pi * r;
	return {std::cos(t), std::sin(t)};
}

/// e(num / den) computed from the exact residue num mod den.
inline cplx unit_phase(i64 num, i64 den)
{
	i64 r = mod_floor(num, den);
	double t = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den);
	return {std::cos(t), std::sin(t)};
}

/// Representative of x mod 1 in [-1/2, 1/2).
inline double centered_mod1(double x)
{
	double r = x - std::floor(x);
	return r >= 0.5 ? r - 1.0 : r;
}

} // namespace psq
