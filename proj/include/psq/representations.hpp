#pragma once

// Representations n = p_1^2 + ... + p_s^2 with every p_j in P: exact ordered
// counts, lexicographically smallest witnesses, the desk-scale density
// experiment, and witnesses routed through the W-trick variables W n_j + b_j.

#include "psq/core_arith.hpp"
#include "psq/error.hpp"
#include "psq/primes.hpp"
#include "psq/wtrick.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace psq {

/// Entry k is 1 iff k = p^2 for some p in P.
inline std::vector<std::uint8_t> square_indicator(u64 limit, const PrimeSubsetSpec& spec, const PrimeTable& table)
{
	const u64 root = isqrt(limit);
	if (table.limit() < root)
		fail(ErrorCode::TableTooSmall, "prime table does not reach sqrt(limit)=" + std::to_string(root));
	std::vector<std::uint8_t> ind(limit + 1, 0);
	for (u64 p : table.primes_between(2, root))
		if (spec.admits(p))
			ind[p * p] = 1;
	return ind;
}

namespace detail {

inline std::vector<u64> admitted_squares(u64 limit, const PrimeSubsetSpec& spec, const PrimeTable& table)
{
	const u64 root = isqrt(limit);
	if (table.limit() < root)
		fail(ErrorCode::TableTooSmall, "prime table does not reach sqrt(limit)=" + std::to_string(root));
	std::vector<u64> sq;
	for (u64 p : table.primes_between(2, root))
		if (spec.admits(p))
			sq.push_back(p * p);
	return sq;
}

} // namespace detail

struct ReprCountTable {
	u64 limit = 0;
	int s = 0;
	std::vector<u64> counts; // counts[n] = number of ordered s-tuples with sum of squares n

	u64 at(u64 n) const { return n <= limit ? counts[n] : 0; }
};

inline constexpr u64 max_count_limit = 30'000'000;

/// Ordered counts by s rounds of exact sparse convolution with the square
/// indicator. Integer arithmetic throughout; overflow is an error.
inline ReprCountTable count_representations(u64 limit, int s, const PrimeSubsetSpec& spec, const PrimeTable& table)
{
	if (s < 1)
		fail(ErrorCode::InvalidArgument, "s must be >= 1");
	if (limit > max_count_limit)
		fail(ErrorCode::TooLarge, "count limit exceeds " + std::to_string(max_count_limit));
	const auto squares = detail::admitted_squares(limit, spec, table);
	std::vector<u64> cur(limit + 1, 0), next(limit + 1, 0);
	cur[0] = 1;
	for (int round = 0; round < s; ++round) {
		std::fill(next.begin(), next.end(), 0);
		for (u64 m = 0; m <= limit; ++m) {
			const u64 c = cur[m];
			if (!c)
				continue;
			for (u64 sq : squares) {
				if (m + sq > limit)
					break;
				if (__builtin_add_overflow(next[m + sq], c, &next[m + sq]))
					fail(ErrorCode::Overflow, "representation count exceeds 64 bits");
			}
		}
		cur.swap(next);
	}
	ReprCountTable t;
	t.limit = limit;
	t.s = s;
	t.counts = std::move(cur);
	return t;
}

struct ReprWitness {
	u64 n = 0;
	std::vector<u64> primes;
	std::vector<u64> residues; // b_j, when routed through the W-trick
	std::vector<u64> indices;  // n_j with W n_j + b_j = p_j^2
	u64 m = 0;                 // (n - sum b_j) / W

	bool valid(const PrimeSubsetSpec& spec) const
	{
		u128 total = 0;
		for (u64 p : primes) {
			if (!is_prime(p) || !spec.admits(p))
				return false;
			total += static_cast<u128>(p) * p;
		}
		return total == n;
	}
};

namespace detail {

/// reach[k] has bit x set iff x is a sum of k admitted squares (x <= limit).
class ReachTable {
public:
	ReachTable(u64 limit, int depth, const std::vector<u64>& squares) : limit_(limit), words_((limit + 64) / 64)
	{
		reach_.assign(static_cast<std::size_t>(depth) + 1, std::vector<u64>(words_, 0));
		reach_[0][0] = 1;
		for (int k = 1; k <= depth; ++k)
			for (u64 sq : squares)
				shift_or(reach_[k], reach_[static_cast<std::size_t>(k - 1)], sq);
	}
	bool has(int k, u64 x) const
	{
		return x <= limit_ && ((reach_[static_cast<std::size_t>(k)][x / 64] >> (x % 64)) & 1);
	}

private:
	void shift_or(std::vector<u64>& dst, const std::vector<u64>& src, u64 shift) const
	{
		const std::size_t ws = shift / 64, bs = shift % 64;
		for (std::size_t i = words_; i-- > ws;) {
			u64 v = src[i - ws] << bs;
			if (bs && i - ws >= 1)
				v |= src[i - ws - 1] >> (64 - bs);
			dst[i] |= v;
		}
		// Bits past limit are harmless: has() checks the bound.
	}

	u64 limit_;
	std::size_t words_;
	std::vector<std::vector<u64>> reach_;
};

} // namespace detail

/// Lexicographically smallest ordered tuple (p_1, ..., p_s) with sum p_j^2 = n.
/// Sums of up to s-1 admitted squares are tabulated once; each position then
/// takes the smallest p whose complement is reachable by the remaining count.
inline std::optional<ReprWitness> find_witness(u64 n, int s, const PrimeSubsetSpec& spec, const PrimeTable& table)
{
	if (s < 1)
		fail(ErrorCode::InvalidArgument, "s must be >= 1");
	const auto squares = detail::admitted_squares(n, spec, table);
	const detail::ReachTable reach(n, s - 1, squares);
	ReprWitness w;
	w.n = n;
	u64 rest = n;
	for (int left = s; left >= 1; --left) {
		bool placed = false;
		for (u64 sq : squares) {
			if (sq > rest)
				break;
			if (reach.has(left - 1, rest - sq)) {
				w.primes.push_back(isqrt(sq));
				rest -= sq;
				placed = true;
				break;
			}
		}
		if (!placed)
			return std::nullopt;
	}
	return w;
}

struct ExperimentReport {
	int s = 0;
	PrimeSubsetSpec spec;
	double lambda_threshold = 0.0;
	double empirical_density = 0.0;
	u64 density_limit = 0;
	u64 lo = 0, hi = 0;
	bool exploratory = false; // s < 8
	std::size_t targets_checked = 0;
	std::vector<u64> exceptions;
	std::optional<u64> max_exception;
	std::vector<ReprWitness> sample_witnesses;
	u64 min_count = 0; // smallest nonzero count among the targets

	/// True when no exception lies strictly above `bound`.
	bool clear_above(u64 bound) const { return !max_exception || *max_exception <= bound; }
};

/// Scans every n = s (mod 24) in [lo, hi] for a representation.
inline ExperimentReport theorem_experiment(int s, const PrimeSubsetSpec& spec, u64 lo, u64 hi,
                                           const PrimeTable& table, std::size_t witness_samples = 3)
{
	if (lo > hi)
		fail(ErrorCode::InvalidArgument, "empty range");
	ExperimentReport rep;
	rep.s = s;
	rep.spec = spec;
	rep.lo = lo;
	rep.hi = hi;
	rep.exploratory = s < 8;
	rep.lambda_threshold = lambda_threshold(s);
	// Density over the primes that can take part in a representation below hi.
	rep.density_limit = std::max<u64>(isqrt(hi), 2);
	rep.empirical_density = empirical_density(spec, PrimeTable(rep.density_limit));

	const auto counts = count_representations(hi, s, spec, table);
	bool first = true;
	for (u64 n = lo; n <= hi; ++n) {
		if (mod_floor(static_cast<i64>(n) - s, 24) != 0)
			continue;
		++rep.targets_checked;
		const u64 c = counts.at(n);
		if (c == 0) {
			rep.exceptions.push_back(n);
			rep.max_exception = n;
		} else if (first || c < rep.min_count) {
			rep.min_count = c;
			first = false;
		}
	}
	// Witnesses at evenly spaced represented targets, including the top of the range.
	if (witness_samples > 0) {
		std::vector<u64> picks;
		for (std::size_t i = 1; i <= witness_samples; ++i) {
			u64 n = lo + (hi - lo) * i / witness_samples;
			auto represented = [&](u64 x) { return mod_floor(static_cast<i64>(x) - s, 24) == 0 && counts.at(x) > 0; };
			while (n > lo && !represented(n))
				--n;
			if (represented(n) && (picks.empty() || picks.back() != n))
				picks.push_back(n);
		}
		for (u64 n : picks)
			if (auto w = find_witness(n, s, spec, table))
				rep.sample_witnesses.push_back(*w);
	}
	return rep;
}

struct TransferResult {
	enum class Status { Found, Infeasible, NotFound };

	Status status = Status::NotFound;
	ResidueSelection selection;
	std::size_t N = 0; // floor(2n / (s W))
	u64 m = 0;
	double m_over_half_sN = 0.0; // m / (sN/2)
	std::optional<ReprWitness> witness;
	std::string reason;
};

inline const char* status_name(TransferResult::Status s)
{
	switch (s) {
	case TransferResult::Status::Found: return "Found";
	case TransferResult::Status::Infeasible: return "Infeasible";
	case TransferResult::Status::NotFound: return "NotFound";
	}
	return "?";
}

/// n -> residues b_j (by density), m = (n - sum b_j)/W, then indices n_j in
/// [N] with f_{b_j}(n_j) != 0 and sum n_j = m; p_j = sqrt(W n_j + b_j).
/// Index tuples are chosen lexicographically smallest via suffix-sum reachability.
inline TransferResult transfer_witness(const WContext& ctx, u64 n, int s, const PrimeSubsetSpec& spec,
                                       const PrimeTable& table, double kappa = 0.05)
{
	TransferResult res;
	res.N = static_cast<std::size_t>(2 * static_cast<u128>(n) / (static_cast<u128>(s) * ctx.W));
	if (res.N < 1) {
		res.status = TransferResult::Status::NotFound;
		res.reason = "n too small for this W";
		return res;
	}
	const auto dt = delta_table(ctx, res.N, spec, table);
	res.selection = select_residues(ctx, dt, static_cast<i64>(n), s, kappa);
	if (!res.selection.feasible) {
		res.status = TransferResult::Status::Infeasible;
		res.reason = res.selection.reason;
		return res;
	}
	const auto& bs = res.selection.residues;
	u64 bsum = 0;
	for (u64 b : bs)
		bsum += b;
	if (bsum > n) {
		res.status = TransferResult::Status::NotFound;
		res.reason = "sum of residues exceeds n";
		return res;
	}
	res.m = (n - bsum) / ctx.W;
	res.m_over_half_sN = static_cast<double>(res.m) / (static_cast<double>(s) * static_cast<double>(res.N) / 2.0);

	std::vector<std::vector<std::size_t>> supports;
	for (u64 b : bs)
		supports.push_back(f_sequence(ctx, b, res.N, spec, table).support());

	// suffix[j] marks sums reachable by indices j..s-1 (sums capped at m).
	const std::size_t S = bs.size();
	const u64 m = res.m;
	std::vector<std::vector<std::uint8_t>> suffix(S + 1, std::vector<std::uint8_t>(m + 1, 0));
	suffix[S][0] = 1;
	for (std::size_t j = S; j-- > 0;)
		for (u64 x = 0; x <= m; ++x) {
			if (!suffix[j + 1][x])
				continue;
			for (std::size_t idx : supports[j]) {
				if (x + idx > m)
					break;
				suffix[j][x + idx] = 1;
			}
		}
	if (!suffix[0][m]) {
		res.status = TransferResult::Status::NotFound;
		res.reason = "no index combination sums to m at this scale";
		return res;
	}
	ReprWitness w;
	w.n = n;
	w.m = m;
	w.residues = bs;
	u64 rest = m;
	for (std::size_t j = 0; j < S; ++j)
		for (std::size_t idx : supports[j]) {
			if (idx > rest)
				break;
			if (suffix[j + 1][rest - idx]) {
				w.indices.push_back(idx);
				w.primes.push_back(isqrt(ctx.W * idx + bs[j]));
				rest -= idx;
				break;
			}
		}
	// Chain checks: W n_j + b_j = p_j^2, sum n_j = m, sum p_j^2 = n.
	u64 idx_sum = 0;
	for (std::size_t j = 0; j < S; ++j) {
		if (w.primes[j] * w.primes[j] != ctx.W * w.indices[j] + bs[j])
			throw std::logic_error("transfer_witness: W n_j + b_j is not p_j^2");
		idx_sum += w.indices[j];
	}
	if (idx_sum != m || !w.valid(spec))
		throw std::logic_error("transfer_witness: witness chain does not close");
	res.witness = w;
	res.status = TransferResult::Status::Found;
	return res;
}

} // namespace psq
