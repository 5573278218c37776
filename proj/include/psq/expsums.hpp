#pragma once

// Exponential sums of weighted sequences, complete Gauss sums, the local
// factor S(q,a) (literal double sum and closed form), Farey-type arc
// partitions, and comparisons of the major-arc model with the data.
//
// Frequencies live in [0, 1). The arc around 1/1 is the arc around 0.

#include "psq/core_arith.hpp"
#include "psq/error.hpp"
#include "psq/fft.hpp"
#include "psq/numeric.hpp"
#include "psq/parallel.hpp"
#include "psq/wtrick.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace psq {

/// Nonzero entries of a sequence, for fast direct evaluation of its transform.
class SparseSpectrum {
public:
	explicit SparseSpectrum(const WeightedSequence& seq) : N_(seq.N)
	{
		for (std::size_t i = 0; i < seq.values.size(); ++i)
			if (seq.values[i] != 0.0) {
				index_.push_back(static_cast<u64>(i + 1));
				weight_.push_back(seq.values[i]);
			}
	}

	std::size_t N() const noexcept { return N_; }
	std::size_t support_size() const noexcept { return index_.size(); }
	bool all_zero() const noexcept { return index_.empty(); }

	/// sum_n f(n) e(n alpha).
	cplx at(double alpha) const
	{
		const double a = alpha - std::floor(alpha);
		cplx s = 0.0;
		for (std::size_t i = 0; i < index_.size(); ++i)
			s += weight_[i] * unit_phase(static_cast<double>(index_[i]) * a);
		return s;
	}

	/// sum_n f(n) e(n num / den) with exact phase reduction.
	cplx at_rational(i64 num, i64 den) const
	{
		const i64 r = mod_floor(num, den);
		cplx s = 0.0;
		for (std::size_t i = 0; i < index_.size(); ++i) {
			i64 ph = static_cast<i64>(mul_mod(index_[i] % static_cast<u64>(den), static_cast<u64>(r),
			                                   static_cast<u64>(den)));
			s += weight_[i] * unit_phase(ph, den);
		}
		return s;
	}

private:
	std::size_t N_ = 0;
	std::vector<u64> index_;
	std::vector<double> weight_;
};

/// Direct O(N) evaluation of f^(alpha) = sum_{n in [N]} f(n) e(n alpha).
inline cplx dft_at(const WeightedSequence& seq, double alpha)
{
	return SparseSpectrum(seq).at(alpha);
}

/// Values of f^ at k / (K N), k = 0 .. K N - 1.
struct FourierGrid {
	std::size_t N = 0;
	std::size_t K = 1;
	std::vector<cplx> values;

	std::size_t size() const noexcept { return values.size(); }
	double alpha(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(values.size()); }
};

inline constexpr std::size_t max_grid_size = std::size_t(1) << 26;

inline FourierGrid dft_grid(const WeightedSequence& seq, std::size_t K = 4)
{
	if (K < 1)
		fail(ErrorCode::InvalidArgument, "oversampling factor must be >= 1");
	if (seq.N == 0)
		fail(ErrorCode::InvalidArgument, "empty sequence");
	if (seq.N > max_grid_size / K)
		fail(ErrorCode::TooLarge, "grid of size K*N exceeds " + std::to_string(max_grid_size));
	const std::size_t M = K * seq.N;
	FourierGrid g;
	g.N = seq.N;
	g.K = K;
	g.values.assign(M, 0.0);
	for (std::size_t n = 1; n <= seq.N; ++n)
		g.values[n % M] += seq.values[n - 1];
	fft::transform(g.values, +1);
	return g;
}

/// G(k, r) = sum over l in [k]* of e(r l^2 / k).
inline cplx gauss_sum(u64 k, i64 r)
{
	if (k < 1)
		fail(ErrorCode::InvalidArgument, "gauss_sum needs k >= 1");
	const u64 rr = static_cast<u64>(mod_floor(r, static_cast<i64>(k)));
	if (std::gcd(rr, k) != 1)
		fail(ErrorCode::NotCoprime, "gcd(r, k) != 1 for k=" + std::to_string(k));
	cplx s = 0.0;
	for (u64 l = 1; l <= k; ++l) {
		if (std::gcd(l, k) != 1)
			continue;
		u64 ph = mul_mod(mul_mod(l, l, k), rr, k);
		s += unit_phase(static_cast<i64>(ph), static_cast<i64>(k));
	}
	return s;
}

struct LocalFactor {
	enum class Case { Coprime, GcdTwo, VanishingI, VanishingIV };

	u64 q = 1;
	u64 a = 1;
	cplx value = 0.0;
	Case case_tag = Case::Coprime;
};

inline const char* case_name(LocalFactor::Case c)
{
	switch (c) {
	case LocalFactor::Case::Coprime: return "Coprime";
	case LocalFactor::Case::GcdTwo: return "GcdTwo";
	case LocalFactor::Case::VanishingI: return "Vanishing-(i)";
	case LocalFactor::Case::VanishingIV: return "Vanishing-(iv)";
	}
	return "?";
}

namespace detail {

inline LocalFactor::Case classify_local(u64 q, u64 W)
{
	const u64 t = std::gcd(q, W);
	if (q == 2)
		return LocalFactor::Case::VanishingIV;
	if (t == 1)
		return LocalFactor::Case::Coprime;
	if (t == 2)
		return LocalFactor::Case::GcdTwo;
	return LocalFactor::Case::VanishingI;
}

inline void check_local_args(const WContext& ctx, u64 b, u64 q, u64 a)
{
	if (q < 1)
		fail(ErrorCode::InvalidArgument, "q must be >= 1");
	if (std::gcd(a % q, q) != 1)
		fail(ErrorCode::NotCoprime, "gcd(a, q) != 1 for q=" + std::to_string(q) + " a=" + std::to_string(a));
	if (!ctx.in_Z(b))
		fail(ErrorCode::InvalidArgument, std::to_string(b) + " is not in Z(W)");
}

/// ((h^2 - b)/W) mod q: the exact integer numerator of e((h^2-b)/(qW)).
inline u64 shifted_square(u64 h, u64 b, u64 W, u64 q)
{
	return static_cast<u64>((static_cast<u128>(h) * h - b) / W % q);
}

} // namespace detail

/// S(q,a) = (1/H) sum_{h in H(b)} e((h^2-b) a/(qW)) sum_{l in [q], (Wl+h, qW)=1} e((W l^2 + 2hl) a/q).
inline LocalFactor s_direct(const WContext& ctx, u64 b, u64 q, u64 a)
{
	detail::check_local_args(ctx, b, q, a);
	a %= q;
	const u64 W = ctx.W;
	const u64 qW = q * W;
	cplx total = 0.0;
	for (u64 h : ctx.roots_of(b)) {
		cplx inner = 0.0;
		for (u64 l = 1; l <= q; ++l) {
			if (std::gcd(W * l + h, qW) != 1)
				continue;
			u64 lq = l % q;
			u64 poly = (mul_mod(W % q, mul_mod(lq, lq, q), q) + mul_mod(2 * h % q, lq, q)) % q;
			inner += unit_phase(static_cast<i64>(mul_mod(poly, a, q)), static_cast<i64>(q));
		}
		u64 outer = mul_mod(detail::shifted_square(h, b, W, q), a, q);
		total += unit_phase(static_cast<i64>(outer), static_cast<i64>(q)) * inner;
	}
	LocalFactor lf;
	lf.q = q;
	lf.a = a == 0 ? q : a;
	lf.value = total / static_cast<double>(ctx.H);
	lf.case_tag = detail::classify_local(q, W);
	return lf;
}

/// S(q,a) through Gauss sums, dispatching on t = gcd(q, W).
inline LocalFactor s_closed(const WContext& ctx, u64 b, u64 q, u64 a)
{
	detail::check_local_args(ctx, b, q, a);
	a %= q;
	LocalFactor lf;
	lf.q = q;
	lf.a = a == 0 ? q : a;
	lf.case_tag = detail::classify_local(q, ctx.W);
	const u64 W = ctx.W;
	switch (lf.case_tag) {
	case LocalFactor::Case::VanishingI:
	case LocalFactor::Case::VanishingIV:
		lf.value = 0.0;
		break;
	case LocalFactor::Case::Coprime: {
		if (q == 1) {
			lf.value = 1.0;
			break;
		}
		const u64 w_inv = static_cast<u64>(mod_inverse(static_cast<i64>(W % q), static_cast<i64>(q)));
		const u64 r = mul_mod(w_inv, a, q);
		const u64 shift = mul_mod(r, b % q, q);
		lf.value = unit_phase(-static_cast<i64>(shift), static_cast<i64>(q)) * gauss_sum(q, static_cast<i64>(r));
		break;
	}
	case LocalFactor::Case::GcdTwo: {
		const u64 q0 = q / 2;
		const u64 inv2w = static_cast<u64>(mod_inverse(static_cast<i64>((2 * W) % q0), static_cast<i64>(q0)));
		const u64 r = mul_mod(inv2w, a, q0);
		cplx phases = 0.0;
		for (u64 h : ctx.roots_of(b)) {
			// e(x/q - y/q0) = e((x - 2y)/q)
			const i64 x = static_cast<i64>(mul_mod(detail::shifted_square(h, b, W, q), a, q));
			const i64 y = static_cast<i64>(mul_mod(mul_mod(h % q0, h % q0, q0), r, q0));
			phases += unit_phase(x - 2 * y, static_cast<i64>(q));
		}
		lf.value = 2.0 / static_cast<double>(ctx.H) * phases * gauss_sum(q0, static_cast<i64>(r));
		break;
	}
	}
	return lf;
}

struct MajorArc {
	u64 q;
	u64 a;
	double center;     // a/q in (0, 1]
	double half_width; // Q / (q N)
};

struct ArcPartition {
	std::size_t N = 0;
	double A = 0.0;
	double Q = 0.0;
	std::vector<MajorArc> arcs; // ordered by (q, a)
	bool disjoint = false;
	double major_measure = 0.0;
	double minor_measure = 0.0;
	static constexpr const char* log_base = "natural";

	/// Index of the major arc containing alpha, if any.
	std::optional<std::size_t> locate(double alpha) const
	{
		const double x = alpha - std::floor(alpha);
		std::optional<std::size_t> hit;
		for (std::size_t i = 0; i < arcs.size(); ++i) {
			const double c = arcs[i].q == 1 ? 0.0 : arcs[i].center;
			const double d = std::abs(centered_mod1(x - c));
			if (d <= arcs[i].half_width) {
				hit = i;
				break;
			}
		}
		return hit;
	}
};

/// Major arcs |alpha - a/q| <= Q/(qN) for q <= Q = (ln N)^A, a in [q]*.
inline ArcPartition arc_partition(std::size_t N, double A)
{
	if (!(A > 0.0))
		fail(ErrorCode::InvalidArgument, "A must be positive");
	if (N < 3)
		fail(ErrorCode::InvalidArgument, "N must be >= 3");
	ArcPartition part;
	part.N = N;
	part.A = A;
	part.Q = std::pow(std::log(static_cast<double>(N)), A);
	if (!(static_cast<double>(N) > 2.0 * part.Q * part.Q))
		fail(ErrorCode::QTooLarge, "need N > 2 Q^2, Q=" + std::to_string(part.Q));
	const u64 qmax = static_cast<u64>(std::floor(part.Q));
	const double Nd = static_cast<double>(N);
	for (u64 q = 1; q <= qmax; ++q)
		for (u64 a = 1; a <= q; ++a)
			if (std::gcd(a, q) == 1)
				part.arcs.push_back({q, a, static_cast<double>(a) / static_cast<double>(q),
				                     part.Q / (static_cast<double>(q) * Nd)});

	// Pairwise disjointness: neighbours in circular order must not overlap.
	std::vector<std::size_t> order(part.arcs.size());
	for (std::size_t i = 0; i < order.size(); ++i)
		order[i] = i;
	auto pos = [&](std::size_t i) { return part.arcs[i].q == 1 ? 0.0 : part.arcs[i].center; };
	std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pos(x) < pos(y); });
	part.disjoint = true;
	for (std::size_t j = 0; j < order.size() && order.size() > 1; ++j) {
		const std::size_t i0 = order[j], i1 = order[(j + 1) % order.size()];
		double gap = pos(i1) - pos(i0);
		if (gap <= 0.0)
			gap += 1.0;
		if (gap <= part.arcs[i0].half_width + part.arcs[i1].half_width)
			part.disjoint = false;
	}
	double total = 0.0;
	for (const auto& arc : part.arcs)
		total += 2.0 * arc.half_width;
	part.major_measure = total;
	part.minor_measure = 1.0 - total;
	return part;
}

/// For each grid point k / M, the index of its major arc or -1.
inline std::vector<int> arc_index_on_grid(const ArcPartition& part, std::size_t M)
{
	std::vector<int> idx(M, -1);
	const long double Ml = static_cast<long double>(M);
	for (std::size_t i = 0; i < part.arcs.size(); ++i) {
		const auto& arc = part.arcs[i];
		const long double c = arc.q == 1 ? 0.0L : static_cast<long double>(arc.a) / static_cast<long double>(arc.q);
		const long double hw = static_cast<long double>(part.Q) /
		                       (static_cast<long double>(arc.q) * static_cast<long double>(part.N));
		const long long lo = static_cast<long long>(std::ceil((c - hw) * Ml));
		const long long hi = static_cast<long long>(std::floor((c + hw) * Ml));
		for (long long k = lo; k <= hi; ++k) {
			long long km = k % static_cast<long long>(M);
			if (km < 0)
				km += static_cast<long long>(M);
			idx[static_cast<std::size_t>(km)] = static_cast<int>(i);
		}
	}
	return idx;
}

/// integral_0^N e(beta u) du.
inline cplx arc_integral(double beta, double N)
{
	if (std::abs(beta) < 1e-300)
		return N;
	return (unit_phase(beta * N) - 1.0) / cplx(0.0, 2.0 * std::numbers::pi * beta);
}

/// phi(W)/phi(qW) S(q,a) integral_0^N e((alpha - a/q) u) du.
inline cplx major_arc_model(const WContext& ctx, u64 b, u64 q, u64 a, double alpha, std::size_t N)
{
	const auto S = s_closed(ctx, b, q, a);
	const double coef = static_cast<double>(ctx.phi_W) / static_cast<double>(euler_phi(q * ctx.W));
	const double beta = centered_mod1(alpha - static_cast<double>(a) / static_cast<double>(q));
	return coef * S.value * arc_integral(beta, static_cast<double>(N));
}

struct MajorReport {
	struct PerQ {
		u64 q = 0;
		std::size_t arcs = 0;
		double max_abs_error = 0.0;
		double max_abs_error_over_N = 0.0;
		double max_abs_nuhat_over_N = 0.0;
		double max_abs_model_over_N = 0.0;
	};
	std::size_t N = 0;
	std::size_t arcs_evaluated = 0;
	double max_abs_error = 0.0;
	double max_abs_error_over_N = 0.0;
	double q1_center_rel_error = 0.0;
	bool degenerate_input = false; // all-zero sequence
	bool flagged_mismatch = false;  // degenerate input against a nonzero model
	std::vector<PerQ> per_q;
};

using ArcModel = std::function<cplx(u64 q, u64 a, double alpha)>;

/// Samples |f^(alpha) - model(alpha)| at the center and both edges of every
/// major arc with q <= qmax (0 means every arc).
inline MajorReport compare_major(const WeightedSequence& seq, const ArcPartition& part, const ArcModel& model,
                                 u64 qmax = 0)
{
	if (seq.N != part.N)
		fail(ErrorCode::InvalidArgument, "sequence and partition lengths differ");
	const SparseSpectrum spec(seq);
	std::vector<std::size_t> chosen;
	for (std::size_t i = 0; i < part.arcs.size(); ++i)
		if (qmax == 0 || part.arcs[i].q <= qmax)
			chosen.push_back(i);

	struct Sample {
		double err = 0.0, nu = 0.0, mod = 0.0, center_err = 0.0;
	};
	std::vector<Sample> samples(chosen.size());
	parallel_for(0, chosen.size(), [&](std::size_t j) {
		const auto& arc = part.arcs[chosen[j]];
		Sample s;
		const double pts[3] = {arc.center, arc.center - arc.half_width, arc.center + arc.half_width};
		for (int t = 0; t < 3; ++t) {
			cplx nu = t == 0 ? spec.at_rational(static_cast<i64>(arc.a), static_cast<i64>(arc.q)) : spec.at(pts[t]);
			cplx m = model(arc.q, arc.a, pts[t]);
			double e = std::abs(nu - m);
			s.err = std::max(s.err, e);
			s.nu = std::max(s.nu, std::abs(nu));
			s.mod = std::max(s.mod, std::abs(m));
			if (t == 0)
				s.center_err = e;
		}
		samples[j] = s;
	});

	MajorReport rep;
	rep.N = seq.N;
	rep.arcs_evaluated = chosen.size();
	rep.degenerate_input = spec.all_zero();
	const double Nd = static_cast<double>(seq.N);
	std::map<u64, MajorReport::PerQ> by_q;
	for (std::size_t j = 0; j < chosen.size(); ++j) {
		const auto& arc = part.arcs[chosen[j]];
		const auto& s = samples[j];
		auto& row = by_q[arc.q];
		row.q = arc.q;
		++row.arcs;
		row.max_abs_error = std::max(row.max_abs_error, s.err);
		row.max_abs_nuhat_over_N = std::max(row.max_abs_nuhat_over_N, s.nu / Nd);
		row.max_abs_model_over_N = std::max(row.max_abs_model_over_N, s.mod / Nd);
		rep.max_abs_error = std::max(rep.max_abs_error, s.err);
		if (arc.q == 1) {
			rep.q1_center_rel_error = s.center_err / Nd;
			if (rep.degenerate_input && s.mod > 0.0)
				rep.flagged_mismatch = true;
		}
	}
	for (auto& [q, row] : by_q) {
		row.max_abs_error_over_N = row.max_abs_error / Nd;
		rep.per_q.push_back(row);
	}
	rep.max_abs_error_over_N = rep.max_abs_error / Nd;
	return rep;
}

inline MajorReport compare_major(const WeightedSequence& seq, const ArcPartition& part, const WContext& ctx,
                                 u64 b, u64 qmax = 0)
{
	const std::size_t N = seq.N;
	return compare_major(
	    seq, part, [&ctx, b, N](u64 q, u64 a, double alpha) { return major_arc_model(ctx, b, q, a, alpha, N); },
	    qmax);
}

/// Last continued-fraction convergent a/q of num/den with q <= qbound.
inline std::pair<u64, u64> best_rational(u64 num, u64 den, u64 qbound)
{
	num %= den;
	u64 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
	u64 x = num, y = den;
	while (y != 0) {
		const u64 t = x / y;
		const u64 p2 = t * p1 + p0, q2 = t * q1 + q0;
		if (q2 > qbound)
			break;
		p0 = p1;
		q0 = q1;
		p1 = p2;
		q1 = q2;
		const u64 r = x % y;
		x = y;
		y = r;
	}
	// x/y begins as num/den < 1 so the first convergent is 0/1.
	if (q1 == 0)
		return {0, 1};
	return {p1, q1};
}

struct MinorReport {
	std::size_t N = 0;
	std::size_t K = 1;
	std::size_t minor_points = 0;
	double sup = 0.0;
	double sup_over_N = 0.0;
	std::size_t argmax = 0;
	double alpha = 0.0;
	u64 approx_a = 0;
	u64 approx_q = 1;
	double approx_distance = 0.0;
	double major_q1_sup_over_N = 0.0;
};

inline MinorReport minor_arc_scan(const FourierGrid& grid, const ArcPartition& part)
{
	if (grid.N != part.N)
		fail(ErrorCode::InvalidArgument, "grid and partition lengths differ");
	const std::size_t M = grid.size();
	const auto idx = arc_index_on_grid(part, M);
	MinorReport rep;
	rep.N = grid.N;
	rep.K = grid.K;
	double q1 = 0.0;
	for (std::size_t k = 0; k < M; ++k) {
		const double v = std::abs(grid.values[k]);
		if (idx[k] < 0) {
			++rep.minor_points;
			if (v > rep.sup) {
				rep.sup = v;
				rep.argmax = k;
			}
		} else if (part.arcs[static_cast<std::size_t>(idx[k])].q == 1) {
			q1 = std::max(q1, v);
		}
	}
	const double Nd = static_cast<double>(grid.N);
	rep.sup_over_N = rep.sup / Nd;
	rep.major_q1_sup_over_N = q1 / Nd;
	rep.alpha = static_cast<double>(rep.argmax) / static_cast<double>(M);
	const u64 qbound = std::max<u64>(1, static_cast<u64>(Nd / part.Q));
	auto [a, q] = best_rational(rep.argmax, M, qbound);
	rep.approx_a = a;
	rep.approx_q = q;
	rep.approx_distance = std::abs(centered_mod1(rep.alpha - static_cast<double>(a) / static_cast<double>(q)));
	return rep;
}

/// 1^_[N](k/M) = sum_{n=1}^N e(nk/M) by the geometric-sum formula.
inline cplx interval_transform(std::size_t N, std::size_t k, std::size_t M)
{
	const u64 kk = k % M;
	if (kk == 0)
		return static_cast<double>(N);
	const cplx z = unit_phase(static_cast<i64>(kk), static_cast<i64>(M));
	const cplx zN = unit_phase(static_cast<i64>(mul_mod(kk, N % M, M)), static_cast<i64>(M));
	return z * (zN - 1.0) / (z - 1.0);
}

struct PseudoReport {
	std::size_t N = 0;
	std::size_t K = 1;
	double sup = 0.0;
	double sup_over_N = 0.0;
	std::size_t argmax = 0;
};

/// max over the K N grid of |f^(alpha) - 1^_[N](alpha)|.
inline PseudoReport pseudorandom_sup(const FourierGrid& grid)
{
	PseudoReport rep;
	rep.N = grid.N;
	rep.K = grid.K;
	const std::size_t M = grid.size();
	for (std::size_t k = 0; k < M; ++k) {
		const double d = std::abs(grid.values[k] - interval_transform(grid.N, k, M));
		if (d > rep.sup) {
			rep.sup = d;
			rep.argmax = k;
		}
	}
	rep.sup_over_N = rep.sup / static_cast<double>(grid.N);
	return rep;
}

inline PseudoReport pseudorandom_sup(const WeightedSequence& seq, std::size_t K = 4)
{
	return pseudorandom_sup(dft_grid(seq, K));
}

} // namespace psq
