#pragma once

// Level sets of |f^| on the grid n/N, the fourth-moment identity and its
// divisor-bound input, and L^q moments on oversampled grids.

#include "psq/core_arith.hpp"
#include "psq/error.hpp"
#include "psq/expsums.hpp"
#include "psq/fft.hpp"
#include "psq/numeric.hpp"
#include "psq/wtrick.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

namespace psq {

/// Sum over the grid of |f^|^4 (an exact discrete quantity when K = 1).
inline double grid_power_sum(const FourierGrid& grid, double exponent)
{
	std::vector<double> terms(grid.size());
	for (std::size_t k = 0; k < grid.size(); ++k)
		terms[k] = std::pow(std::abs(grid.values[k]), exponent);
	return pairwise_sum(terms);
}

struct LevelSetCurve {
	std::vector<double> u_values;       // decreasing
	std::vector<std::size_t> counts;    // f_*(u)
	std::vector<double> chebyshev_bound; // u^{-4} * sum|f^|^4 / N^4
};

/// f_*(u) = #{n in [N] : |f^(n/N)| >= u N} read off a K = 1 grid.
inline LevelSetCurve level_sets(const FourierGrid& grid, const std::vector<double>& u_list)
{
	if (grid.K != 1)
		fail(ErrorCode::InvalidArgument, "level sets are defined on the K = 1 grid");
	for (std::size_t i = 0; i < u_list.size(); ++i) {
		if (!(u_list[i] > 0.0))
			fail(ErrorCode::InvalidArgument, "level values must be positive");
		if (i > 0 && !(u_list[i] < u_list[i - 1]))
			fail(ErrorCode::InvalidArgument, "level values must be strictly decreasing");
	}
	const double Nd = static_cast<double>(grid.N);
	std::vector<double> mags(grid.size());
	for (std::size_t k = 0; k < grid.size(); ++k)
		mags[k] = std::abs(grid.values[k]);
	std::sort(mags.begin(), mags.end());
	const double m4 = grid_power_sum(grid, 4.0) / (Nd * Nd * Nd * Nd);

	LevelSetCurve curve;
	curve.u_values = u_list;
	for (double u : u_list) {
		const double thr = u * Nd;
		auto it = std::lower_bound(mags.begin(), mags.end(), thr);
		curve.counts.push_back(static_cast<std::size_t>(mags.end() - it));
		curve.chebyshev_bound.push_back(m4 / (u * u * u * u));
	}
	return curve;
}

inline LevelSetCurve level_sets(const WeightedSequence& seq, const std::vector<double>& u_list)
{
	return level_sets(dft_grid(seq, 1), u_list);
}

struct FourthMoment {
	double grid_route = 0.0;            // sum_{n in [N]} |f^(n/N)|^4
	double autocorrelation_route = 0.0; // N sum_{k mod N} |sum_{m-n=k} f(m) f(n)|^2
	double relative_gap = 0.0;
};

namespace detail {

/// Linear autocorrelation c(d) = sum_m f(m) f(m - d) for d = 0 .. N-1.
inline std::vector<double> linear_autocorrelation(const WeightedSequence& seq)
{
	const std::size_t N = seq.N;
	const auto supp = seq.support();
	std::vector<double> c(N, 0.0);
	if (supp.size() <= 8192) {
		for (std::size_t i = 0; i < supp.size(); ++i) {
			const double fi = seq.at(supp[i]);
			for (std::size_t j = 0; j <= i; ++j)
				c[supp[i] - supp[j]] += fi * seq.at(supp[j]);
		}
		return c;
	}
	// Dense input: zero-pad to at least 2N so the circular product is the linear one.
	const std::size_t L = std::bit_ceil(2 * N);
	std::vector<cplx> x(L, 0.0);
	for (std::size_t n = 0; n < N; ++n)
		x[n] = seq.values[n];
	fft::transform(x, -1);
	for (auto& v : x)
		v = std::norm(v);
	fft::transform(x, +1);
	for (std::size_t d = 0; d < N; ++d)
		c[d] = x[d].real() / static_cast<double>(L);
	return c;
}

} // namespace detail

/// Both sides of sum_{n in [N]} |f^(n/N)|^4 = N sum_k |sum_{m-n=k} f(m) f(n)|^2,
/// where on the grid n/N the gap k is read modulo N.
inline FourthMoment fourth_moment(const WeightedSequence& seq)
{
	FourthMoment fm;
	fm.grid_route = grid_power_sum(dft_grid(seq, 1), 4.0);

	const std::size_t N = seq.N;
	const auto lin = detail::linear_autocorrelation(seq);
	// Circular gap k collects the linear gaps k and k - N; linear gaps are symmetric.
	std::vector<double> terms(N);
	for (std::size_t k = 0; k < N; ++k) {
		const double ck = lin[k] + (k == 0 ? 0.0 : lin[N - k]);
		terms[k] = ck * ck;
	}
	fm.autocorrelation_route = static_cast<double>(N) * pairwise_sum(terms);
	const double scale = std::max(std::abs(fm.grid_route), std::abs(fm.autocorrelation_route));
	fm.relative_gap = scale == 0.0 ? 0.0 : std::abs(fm.grid_route - fm.autocorrelation_route) / scale;
	return fm;
}

struct PairGapTable {
	std::size_t N = 0;
	std::vector<u64> counts; // counts[k] for 1 <= k < N (index 0 unused); gap -k is symmetric
	std::vector<u64> tau;    // divisor_count(k)
	std::vector<std::size_t> violations;
	u64 W = 0;                             // when set, also compare with tau(W k)
	std::vector<std::size_t> wide_violations; // counts[k] > tau(W k)

	bool ok() const { return violations.empty(); }
};

/// Number of support pairs at each gap k, against the divisor bound tau(|k|).
/// A pair at gap k is a factorisation (x - y)(x + y) = W k, and x, y may lie
/// over different square roots of b mod W, so tau(W k) is the bound that
/// always holds; pass W to have that checked as well.
inline PairGapTable pair_difference_counts(const WeightedSequence& seq, u64 W = 0)
{
	PairGapTable t;
	t.N = seq.N;
	t.W = W;
	if (seq.N < 2)
		return t;
	t.counts.assign(seq.N, 0);
	t.tau.assign(seq.N, 0);
	const auto supp = seq.support();
	for (std::size_t i = 0; i < supp.size(); ++i)
		for (std::size_t j = 0; j < i; ++j)
			++t.counts[supp[i] - supp[j]];
	for (std::size_t k = 1; k < seq.N; ++k) {
		t.tau[k] = divisor_count(k);
		if (t.counts[k] > t.tau[k])
			t.violations.push_back(k);
		if (W != 0 && t.counts[k] > divisor_count(W * k))
			t.wide_violations.push_back(k);
	}
	return t;
}

struct MomentReport {
	std::size_t N = 0;
	std::size_t K = 1;
	double q_exponent = 0.0;
	double moment = 0.0;     // (1/(KN)) sum_grid |f^|^q
	double normalizer = 0.0; // N^{q-1}
	double ratio = 0.0;
};

inline MomentReport lq_moment(const FourierGrid& grid, double q_exponent)
{
	if (!(q_exponent > 4.0))
		fail(ErrorCode::InvalidArgument, "L^q moment needs q > 4");
	MomentReport r;
	r.N = grid.N;
	r.K = grid.K;
	r.q_exponent = q_exponent;
	r.moment = grid_power_sum(grid, q_exponent) / static_cast<double>(grid.size());
	r.normalizer = std::pow(static_cast<double>(grid.N), q_exponent - 1.0);
	r.ratio = r.moment / r.normalizer;
	return r;
}

inline MomentReport lq_moment(const WeightedSequence& seq, double q_exponent, std::size_t K = 4)
{
	if (!(q_exponent > 4.0))
		fail(ErrorCode::InvalidArgument, "L^q moment needs q > 4");
	return lq_moment(dft_grid(seq, K), q_exponent);
}

struct DyadicProfile {
	struct Level {
		int k = 0;
		double u = 0.0;
		std::size_t count = 0;
		double chebyshev_bound = 0.0;
	};
	std::size_t N = 0;
	std::vector<Level> levels; // k = 0, -1, -2, ...
	double slope = 0.0;        // least-squares d log f_* / d log u over the mid-range
	std::size_t fitted_levels = 0;
	static constexpr double reference_low = -4.0; // u^{-4} (log N)^8 regime
};

/// f_* at u = 2^k, k = 0 down to 2^k < 1/N. The mid-range used for the slope
/// fit is every level with 2 <= f_* <= N/4.
inline DyadicProfile dyadic_profile(const FourierGrid& grid)
{
	DyadicProfile prof;
	prof.N = grid.N;
	std::vector<double> us;
	const int kmin = -static_cast<int>(std::ceil(std::log2(static_cast<double>(grid.N)))) - 1;
	for (int k = 0; k >= kmin; --k)
		us.push_back(std::ldexp(1.0, k));
	const auto curve = level_sets(grid, us);
	double sx = 0, sy = 0, sxx = 0, sxy = 0;
	std::size_t n = 0;
	for (std::size_t i = 0; i < us.size(); ++i) {
		const int k = -static_cast<int>(i);
		prof.levels.push_back({k, us[i], curve.counts[i], curve.chebyshev_bound[i]});
		const std::size_t c = curve.counts[i];
		if (c >= 2 && c <= grid.N / 4) {
			const double x = static_cast<double>(k), y = std::log2(static_cast<double>(c));
			sx += x;
			sy += y;
			sxx += x * x;
			sxy += x * y;
			++n;
		}
	}
	prof.fitted_levels = n;
	if (n >= 2) {
		const double dn = static_cast<double>(n);
		const double denom = dn * sxx - sx * sx;
		prof.slope = denom != 0.0 ? (dn * sxy - sx * sy) / denom : 0.0;
	}
	return prof;
}

inline DyadicProfile dyadic_profile(const WeightedSequence& seq)
{
	return dyadic_profile(dft_grid(seq, 1));
}

/// Grid points with |f^| >= u N, greedily thinned to 1/N separation by
/// decreasing magnitude (ties to the smaller index). Exploration helper for
/// the large-value points t_r.
inline std::vector<std::size_t> large_values(const FourierGrid& grid, double u)
{
	const double thr = u * static_cast<double>(grid.N);
	std::vector<std::size_t> cand;
	for (std::size_t k = 0; k < grid.size(); ++k)
		if (std::abs(grid.values[k]) >= thr)
			cand.push_back(k);
	std::stable_sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) {
		return std::abs(grid.values[x]) > std::abs(grid.values[y]);
	});
	const std::size_t M = grid.size();
	const std::size_t sep = grid.K; // 1/N in grid steps
	std::vector<std::size_t> kept;
	for (std::size_t k : cand) {
		bool clear = true;
		for (std::size_t j : kept) {
			std::size_t d = k > j ? k - j : j - k;
			d = std::min(d, M - d);
			if (d < sep) {
				clear = false;
				break;
			}
		}
		if (clear)
			kept.push_back(k);
	}
	std::sort(kept.begin(), kept.end());
	return kept;
}

} // namespace psq
