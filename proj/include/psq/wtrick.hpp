#pragma once

// W-trick environment: the modulus W = 8 * prod_{2<p<w} p, its reduced
// quadratic residues Z(W), the root sets H(b), and the weighted sequences
// f_b <= nu_b living on {n in [N] : W n + b = p^2}.

#include "psq/core_arith.hpp"
#include "psq/error.hpp"
#include "psq/numeric.hpp"
#include "psq/primes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace psq {

struct WContext {
	int w = 0;
	u64 W = 0;
	u64 phi_W = 0;
	u64 H = 0;
	std::vector<u64> odd_primes;        // the primes 2 < p < w
	std::vector<u64> Z;                 // reduced quadratic residues, increasing
	std::vector<std::vector<u64>> roots; // roots[i] = H(Z[i]), increasing

	/// W / 24, coprime to 24.
	u64 W_prime() const { return W / 24; }

	std::optional<std::size_t> index_of(u64 b) const
	{
		auto it = std::lower_bound(Z.begin(), Z.end(), b);
		if (it == Z.end() || *it != b)
			return std::nullopt;
		return static_cast<std::size_t>(it - Z.begin());
	}
	bool in_Z(u64 b) const { return index_of(b).has_value(); }

	const std::vector<u64>& roots_of(u64 b) const
	{
		auto i = index_of(b);
		if (!i)
			fail(ErrorCode::InvalidArgument, std::to_string(b) + " is not in Z(W)");
		return roots[*i];
	}

	/// Weight attached to a prime p with p^2 = W n + b: (phi(W)/(W H)) * 2 p log p.
	double weight(u64 p) const
	{
		double pd = static_cast<double>(p);
		return static_cast<double>(phi_W) / (static_cast<double>(W) * static_cast<double>(H)) * 2.0 *
		       pd * std::log(pd);
	}
};

/// Moduli above this are refused; w <= 17 stays below it.
inline constexpr u64 max_W = 150000;

inline WContext build_context(int w)
{
	if (w < 4)
		fail(ErrorCode::InvalidArgument, "w must be >= 4, got " + std::to_string(w));
	WContext ctx;
	ctx.w = w;
	u64 W = 8;
	u64 root_count = 4;
	for (u64 p = 3; p < static_cast<u64>(w); p += 2) {
		if (!is_prime(p))
			continue;
		W *= p;
		root_count *= 2;
		ctx.odd_primes.push_back(p);
		if (W > max_W)
			fail(ErrorCode::WTooLarge, "W exceeds " + std::to_string(max_W) + " at w=" + std::to_string(w));
	}
	ctx.W = W;
	ctx.phi_W = euler_phi(W);

	std::vector<std::vector<u64>> by_square(W);
	for (u64 h = 1; h <= W; ++h)
		if (std::gcd(h, W) == 1)
			by_square[mul_mod(h, h, W)].push_back(h);
	for (u64 b = 0; b < W; ++b) {
		if (by_square[b].empty())
			continue;
		ctx.Z.push_back(b);
		ctx.roots.push_back(std::move(by_square[b]));
	}
	ctx.H = ctx.roots.front().size();

	// Structural facts that every later computation relies on.
	if (ctx.H != root_count)
		throw std::logic_error("build_context: H != 4 * 2^{#odd primes}");
	for (const auto& r : ctx.roots)
		if (r.size() != ctx.H)
			throw std::logic_error("build_context: |H(b)| not constant");
	if (ctx.H * ctx.Z.size() != ctx.phi_W)
		throw std::logic_error("build_context: H |Z(W)| != phi(W)");
	for (u64 b : ctx.Z)
		if (b % 24 != 1)
			throw std::logic_error("build_context: residue not 1 mod 24");
	return ctx;
}

struct WeightedSequence {
	enum class Kind { Majorant, Subset, Custom };

	Kind kind = Kind::Custom;
	u64 b = 0;
	std::size_t N = 0;
	std::vector<double> values; // values[n-1] holds the weight at n in [N]
	std::optional<PrimeSubsetSpec> spec;

	static WeightedSequence from_values(std::vector<double> v)
	{
		WeightedSequence s;
		s.N = v.size();
		s.values = std::move(v);
		return s;
	}

	double at(std::size_t n) const { return values.at(n - 1); }

	/// Indices n in [N] with a nonzero value, increasing.
	std::vector<std::size_t> support() const
	{
		std::vector<std::size_t> out;
		for (std::size_t i = 0; i < values.size(); ++i)
			if (values[i] != 0.0)
				out.push_back(i + 1);
		return out;
	}

	double sum() const { return pairwise_sum(values); }
};

namespace detail {

inline WeightedSequence build_weighted(const WContext& ctx, u64 b, std::size_t N, const PrimeTable& table,
                                       const PrimeSubsetSpec* spec)
{
	if (!ctx.in_Z(b))
		fail(ErrorCode::InvalidArgument, std::to_string(b) + " is not in Z(W) for W=" + std::to_string(ctx.W));
	if (N == 0)
		fail(ErrorCode::InvalidArgument, "sequence length must be positive");
	const u128 top = static_cast<u128>(ctx.W) * N + b;
	if (top > static_cast<u128>(UINT64_MAX))
		fail(ErrorCode::Overflow, "W*N+b exceeds 64 bits");
	const u64 root_limit = isqrt(static_cast<u64>(top));
	if (table.limit() < root_limit)
		fail(ErrorCode::TableTooSmall,
		     "prime table limit " + std::to_string(table.limit()) + " below sqrt(WN+b)=" + std::to_string(root_limit));

	WeightedSequence seq;
	seq.kind = spec ? WeightedSequence::Kind::Subset : WeightedSequence::Kind::Majorant;
	seq.b = b;
	seq.N = N;
	seq.values.assign(N, 0.0);
	if (spec)
		seq.spec = *spec;
	for (u64 p : table.primes_between(2, root_limit)) {
		const u64 sq = p * p;
		if (sq <= b || (sq - b) % ctx.W != 0)
			continue;
		const u64 n = (sq - b) / ctx.W;
		if (n < 1 || n > N)
			continue;
		if (spec && !spec->admits(p))
			continue;
		seq.values[n - 1] = ctx.weight(p);
	}
	return seq;
}

} // namespace detail

/// nu_b(n) = (phi(W)/(W H)) 2p log p when W n + b = p^2 with p prime, else 0.
inline WeightedSequence nu_sequence(const WContext& ctx, u64 b, std::size_t N, const PrimeTable& table)
{
	return detail::build_weighted(ctx, b, N, table, nullptr);
}

/// Same weight as nu_b, restricted to p in P.
inline WeightedSequence f_sequence(const WContext& ctx, u64 b, std::size_t N, const PrimeSubsetSpec& spec,
                                   const PrimeTable& table)
{
	return detail::build_weighted(ctx, b, N, table, &spec);
}

struct DensityTable {
	std::size_t N = 0;
	std::vector<u64> residues; // Z(W) order
	std::vector<double> delta; // delta(N; b) per residue

	double at(u64 b) const
	{
		auto it = std::lower_bound(residues.begin(), residues.end(), b);
		if (it == residues.end() || *it != b)
			fail(ErrorCode::InvalidArgument, std::to_string(b) + " not in density table");
		return delta[static_cast<std::size_t>(it - residues.begin())];
	}
	double mean() const { return pairwise_sum(delta) / static_cast<double>(delta.size()); }
};

/// delta(N; b) = (sum_{n in [N]} f_b(n)) / N for every b in Z(W).
inline DensityTable delta_table(const WContext& ctx, std::size_t N, const PrimeSubsetSpec& spec,
                                const PrimeTable& table)
{
	DensityTable dt;
	dt.N = N;
	dt.residues = ctx.Z;
	for (u64 b : ctx.Z)
		dt.delta.push_back(f_sequence(ctx, b, N, spec, table).sum() / static_cast<double>(N));
	return dt;
}

/// sqrt(1 - min(s,16)/32): the density threshold for s squares.
inline double lambda_threshold(int s)
{
	return std::sqrt(1.0 - static_cast<double>(std::min(s, 16)) / 32.0);
}

struct ResidueSelection {
	bool feasible = false;
	std::vector<u64> residues; // (s-8) copies of b0, then b_1..b_8 increasing
	u64 b0 = 0;
	double mu = 0.0;
	double lambda = 0.0;
	double threshold = 0.0;
	std::vector<u64> eligible; // residues with delta >= threshold
	std::string reason;
};

/// Chooses b_1..b_8 among residues of large density with
/// (s-8) b0 + b_1 + ... + b_8 = n (mod W). The 8-fold search runs
/// meet-in-the-middle on the W' = W/24 component; the mod-24 part is
/// automatic because every residue is 1 mod 24.
inline ResidueSelection select_residues(const WContext& ctx, const DensityTable& dt, i64 n, int s, double kappa)
{
	if (s < 8)
		fail(ErrorCode::InvalidArgument, "select_residues needs s >= 8");
	if (!(kappa > 0.0))
		fail(ErrorCode::InvalidArgument, "kappa must be positive");
	if (mod_floor(n - s, 24) != 0)
		fail(ErrorCode::InvalidArgument, "target n must satisfy n = s (mod 24)");
	if (dt.residues != ctx.Z)
		fail(ErrorCode::InvalidArgument, "density table does not match the context");

	ResidueSelection sel;
	sel.lambda = lambda_threshold(s);
	std::size_t best = 0;
	for (std::size_t i = 1; i < dt.delta.size(); ++i)
		if (dt.delta[i] > dt.delta[best])
			best = i;
	sel.b0 = dt.residues[best];
	sel.mu = dt.delta[best];
	sel.threshold = 2.0 * sel.lambda * sel.lambda - sel.mu + kappa / 4.0;
	for (std::size_t i = 0; i < dt.delta.size(); ++i)
		if (dt.delta[i] >= sel.threshold)
			sel.eligible.push_back(dt.residues[i]);
	if (sel.eligible.empty()) {
		sel.reason = "no residue meets the density threshold";
		return sel;
	}

	const i64 Wp = static_cast<i64>(ctx.W_prime());
	const i64 target = mod_floor(n - static_cast<i64>(s - 8) * static_cast<i64>(sel.b0), Wp);
	const auto& E = sel.eligible;
	const std::size_t m = E.size();

	// Left halves: nondecreasing index 4-tuples, first (lexicographic) hit per residue.
	std::vector<std::array<std::size_t, 4>> first_by_residue(static_cast<std::size_t>(Wp));
	std::vector<char> seen(static_cast<std::size_t>(Wp), 0);
	auto residue_of = [&](const std::array<std::size_t, 4>& t) {
		i64 r = 0;
		for (std::size_t i : t)
			r += static_cast<i64>(E[i] % static_cast<u64>(Wp));
		return mod_floor(r, Wp);
	};
	// Visits nondecreasing index 4-tuples in lexicographic order; stops when fn returns true.
	auto for_each_half = [m](auto&& fn) {
		for (std::size_t a = 0; a < m; ++a)
			for (std::size_t b = a; b < m; ++b)
				for (std::size_t c = b; c < m; ++c)
					for (std::size_t d = c; d < m; ++d)
						if (fn(std::array<std::size_t, 4>{a, b, c, d}))
							return true;
		return false;
	};
	for_each_half([&](const std::array<std::size_t, 4>& t) {
		auto r = static_cast<std::size_t>(residue_of(t));
		if (!seen[r]) {
			seen[r] = 1;
			first_by_residue[r] = t;
		}
		return false;
	});
	const bool found = for_each_half([&](const std::array<std::size_t, 4>& left) {
		auto need = static_cast<std::size_t>(mod_floor(target - residue_of(left), Wp));
		if (!seen[need])
			return false;
		const auto& right = first_by_residue[need];
		std::vector<u64> eight;
		for (std::size_t i : left)
			eight.push_back(E[i]);
		for (std::size_t i : right)
			eight.push_back(E[i]);
		std::sort(eight.begin(), eight.end());
		sel.residues.assign(static_cast<std::size_t>(s - 8), sel.b0);
		sel.residues.insert(sel.residues.end(), eight.begin(), eight.end());
		return true;
	});
	if (found) {
		i64 total = 0;
		for (u64 r : sel.residues)
			total = mod_floor(total + static_cast<i64>(r), static_cast<i64>(ctx.W));
		if (total != mod_floor(n, static_cast<i64>(ctx.W)))
			throw std::logic_error("select_residues: residues do not sum to n mod W");
		sel.feasible = true;
		return sel;
	}
	sel.reason = "eligible residues do not cover the target class";
	return sel;
}

} // namespace psq
