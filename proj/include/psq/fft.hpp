#pragma once

// Complex DFT of arbitrary length: iterative radix-2 for powers of two,
// Bluestein's chirp-z reduction otherwise. Twiddles come from exact integer
// residues so no angle is ever formed from a large product.

#include "psq/numeric.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

namespace psq::fft {

namespace detail {

inline cplx root(std::size_t k, std::size_t n, int sign)
{
	double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
	return {std::cos(t), sign * std::sin(t)};
}

/// In-place radix-2 transform, X_k = sum_j x_j exp(sign * 2 pi i jk/n), n a power of two.
inline void radix2(std::vector<cplx>& a, int sign)
{
	const std::size_t n = a.size();
	for (std::size_t i = 1, j = 0; i < n; ++i) {
		std::size_t bit = n >> 1;
		for (; j & bit; bit >>= 1)
			j ^= bit;
		j ^= bit;
		if (i < j)
			std::swap(a[i], a[j]);
	}
	std::vector<cplx> tw(n / 2);
	for (std::size_t k = 0; k < n / 2; ++k)
		tw[k] = root(k, n, sign);
	for (std::size_t len = 2; len <= n; len <<= 1) {
		const std::size_t step = n / len;
		for (std::size_t i = 0; i < n; i += len)
			for (std::size_t j = 0; j < len / 2; ++j) {
				cplx u = a[i + j];
				cplx v = a[i + j + len / 2] * tw[j * step];
				a[i + j] = u + v;
				a[i + j + len / 2] = u - v;
			}
	}
}

inline void bluestein(std::vector<cplx>& a, int sign)
{
	const std::size_t n = a.size();
	const std::size_t m = std::bit_ceil(2 * n - 1);
	// chirp[j] = exp(sign * pi i j^2 / n), with j^2 reduced mod 2n.
	std::vector<cplx> chirp(n);
	for (std::size_t j = 0; j < n; ++j) {
		u64 r = static_cast<u64>(static_cast<u128>(j) * j % (2 * n));
		chirp[j] = root(r, 2 * n, sign);
	}
	std::vector<cplx> x(m, 0.0), y(m, 0.0);
	for (std::size_t j = 0; j < n; ++j)
		x[j] = a[j] * chirp[j];
	y[0] = std::conj(chirp[0]);
	for (std::size_t j = 1; j < n; ++j)
		y[j] = y[m - j] = std::conj(chirp[j]);
	radix2(x, -1);
	radix2(y, -1);
	for (std::size_t i = 0; i < m; ++i)
		x[i] *= y[i];
	radix2(x, +1);
	const double scale = 1.0 / static_cast<double>(m);
	for (std::size_t k = 0; k < n; ++k)
		a[k] = x[k] * scale * chirp[k];
}

} // namespace detail

/// X_k = sum_j x_j exp(sign * 2 pi i jk / n), unnormalized.
inline void transform(std::vector<cplx>& a, int sign)
{
	if (a.size() <= 1)
		return;
	if (std::has_single_bit(a.size()))
		detail::radix2(a, sign);
	else
		detail::bluestein(a, sign);
}

} // namespace psq::fft
