#pragma once

// Downsets in Z_q for squarefree q, bitset sumsets, and the 8-fold covering
// check for dense subsets of Z(W).

#include "psq/core_arith.hpp"
#include "psq/error.hpp"
#include "psq/wtrick.hpp"

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace psq {

/// CRT coordinates a^(p) = a mod p over the prime divisors of a squarefree q.
struct CoordinateVector {
	u64 q = 1;
	std::vector<u64> primes;
	std::vector<u64> coords;

	u64 reconstruct() const
	{
		std::vector<Congruence> sys;
		for (std::size_t i = 0; i < primes.size(); ++i)
			sys.push_back({static_cast<i64>(coords[i]), static_cast<i64>(primes[i])});
		return static_cast<u64>(crt_combine(sys));
	}
};

namespace detail {

inline std::vector<u64> squarefree_primes(u64 q)
{
	if (q == 0)
		fail(ErrorCode::InvalidArgument, "modulus must be positive");
	auto f = factorize(q);
	if (!f.squarefree())
		fail(ErrorCode::NotSquarefree, std::to_string(q) + " is not squarefree");
	std::vector<u64> ps;
	for (const auto& pp : f.prime_powers)
		ps.push_back(pp.prime);
	return ps;
}

/// Idempotents e_p with e_p = 1 (mod p) and 0 modulo the other primes.
inline std::vector<u64> crt_basis(u64 q, const std::vector<u64>& primes)
{
	std::vector<u64> basis;
	for (u64 p : primes) {
		u64 rest = q / p;
		u64 inv = static_cast<u64>(mod_inverse(static_cast<i64>(rest % p), static_cast<i64>(p)));
		basis.push_back(mul_mod(rest, inv, q));
	}
	return basis;
}

} // namespace detail

inline CoordinateVector coordinates(u64 a, u64 q)
{
	CoordinateVector cv;
	cv.q = q;
	cv.primes = detail::squarefree_primes(q);
	for (u64 p : cv.primes)
		cv.coords.push_back(a % q % p);
	return cv;
}

/// Subset of Z_q stored as a bitset.
class ResidueSet {
public:
	ResidueSet() = default;
	explicit ResidueSet(u64 q) : q_(q), words_((q + 63) / 64, 0)
	{
		if (q == 0)
			fail(ErrorCode::InvalidArgument, "modulus must be positive");
	}
	ResidueSet(u64 q, const std::vector<u64>& members) : ResidueSet(q)
	{
		for (u64 m : members)
			insert(m);
	}
	static ResidueSet full(u64 q)
	{
		ResidueSet s(q);
		for (u64 i = 0; i < q; ++i)
			s.insert(i);
		return s;
	}

	u64 modulus() const noexcept { return q_; }
	void insert(u64 x) { x %= q_; words_[x / 64] |= u64(1) << (x % 64); }
	bool contains(u64 x) const
	{
		x %= q_;
		return (words_[x / 64] >> (x % 64)) & 1;
	}
	std::size_t size() const
	{
		std::size_t c = 0;
		for (u64 w : words_)
			c += static_cast<std::size_t>(std::popcount(w));
		return c;
	}
	bool empty() const { return size() == 0; }
	std::vector<u64> members() const
	{
		std::vector<u64> out;
		for (u64 i = 0; i < q_; ++i)
			if (contains(i))
				out.push_back(i);
		return out;
	}
	friend bool operator==(const ResidueSet&, const ResidueSet&) = default;

	const std::vector<u64>& words() const noexcept { return words_; }
	std::vector<u64>& words() noexcept { return words_; }

private:
	u64 q_ = 0;
	std::vector<u64> words_;
};

/// D(a) = {b in Z_q : b^(p) <= a^(p) for every p | q}.
inline ResidueSet downset(u64 a, u64 q)
{
	const auto cv = coordinates(a, q);
	const auto basis = detail::crt_basis(q, cv.primes);
	ResidueSet out(q);
	std::vector<u64> digit(cv.primes.size(), 0);
	while (true) {
		u64 x = 0;
		for (std::size_t i = 0; i < digit.size(); ++i)
			x = (x + mul_mod(digit[i], basis[i], q)) % q;
		out.insert(x);
		std::size_t i = 0;
		while (i < digit.size() && digit[i] == cv.coords[i]) {
			digit[i] = 0;
			++i;
		}
		if (i == digit.size())
			break;
		++digit[i];
	}
	return out;
}

/// True when lowering any single coordinate of a member stays inside the set.
inline bool is_downset(const ResidueSet& A)
{
	const u64 q = A.modulus();
	const auto primes = detail::squarefree_primes(q);
	const auto basis = detail::crt_basis(q, primes);
	for (u64 a : A.members())
		for (std::size_t i = 0; i < primes.size(); ++i)
			if (a % primes[i] != 0 && !A.contains((a + q - basis[i]) % q))
				return false;
	return true;
}

/// {a + b mod q}: shift-or of A by every member of B into a 2q-bit buffer, then fold.
inline ResidueSet sumset(const ResidueSet& A, const ResidueSet& B)
{
	const u64 q = A.modulus();
	if (q != B.modulus())
		fail(ErrorCode::ModulusMismatch,
		     "sumset of sets mod " + std::to_string(q) + " and " + std::to_string(B.modulus()));
	const std::size_t nwords = (2 * q + 63) / 64 + 1;
	std::vector<u64> acc(nwords, 0);
	const auto& src = A.words();
	for (u64 shift : B.members()) {
		const std::size_t ws = shift / 64, bs = shift % 64;
		for (std::size_t i = 0; i < src.size(); ++i) {
			const u64 w = src[i];
			if (!w)
				continue;
			acc[i + ws] |= w << bs;
			if (bs)
				acc[i + ws + 1] |= w >> (64 - bs);
		}
	}
	ResidueSet out(q);
	for (u64 x = 0; x < 2 * q; ++x)
		if ((acc[x / 64] >> (x % 64)) & 1)
			out.insert(x);
	return out;
}

/// k-fold sumset A + ... + A (k >= 1), by binary powering.
inline ResidueSet k_fold(const ResidueSet& A, unsigned k)
{
	if (k == 0)
		fail(ErrorCode::InvalidArgument, "k_fold needs k >= 1");
	ResidueSet result;
	bool have = false;
	ResidueSet base = A;
	while (k) {
		if (k & 1) {
			result = have ? sumset(result, base) : base;
			have = true;
		}
		k >>= 1;
		if (k)
			base = sumset(base, base);
	}
	return result;
}

struct CoverReport {
	u64 W = 0;
	std::size_t target_classes = 0; // classes r mod W with r = 8 (mod 24)
	std::size_t covered = 0;
	std::vector<u64> missing;
	bool ok() const { return missing.empty() && covered == target_classes; }
};

/// 8-fold sumset of E mod W against every class r = 8 (mod 24).
inline CoverReport verify_cover(const WContext& ctx, const std::vector<u64>& E)
{
	for (u64 b : E)
		if (!ctx.in_Z(b))
			fail(ErrorCode::InvalidArgument, std::to_string(b) + " is not in Z(W)");
	CoverReport rep;
	rep.W = ctx.W;
	ResidueSet e(ctx.W, E);
	ResidueSet eight = E.empty() ? ResidueSet(ctx.W) : k_fold(e, 8);
	for (u64 r = 8; r < ctx.W; r += 24) {
		++rep.target_classes;
		if (eight.contains(r))
			++rep.covered;
		else
			rep.missing.push_back(r);
	}
	return rep;
}

/// The same statement seen through the reduction Z(W) -> Z_{W'}: 8E = Z_{W'}.
inline bool covers_mod_W_prime(const WContext& ctx, const std::vector<u64>& E)
{
	const u64 Wp = ctx.W_prime();
	if (E.empty())
		return false;
	ResidueSet e(Wp);
	for (u64 b : E)
		e.insert(b % Wp);
	return k_fold(e, 8).size() == Wp;
}

struct LemmaReport {
	int w = 0;
	u64 W = 0;
	std::size_t z_size = 0;
	std::size_t subsets_checked = 0;
	std::vector<std::vector<u64>> failures;
};

/// Every E within Z(W) with |E| > |Z(W)|/2 must cover all classes 8 mod 24.
inline LemmaReport exhaustive_lemma_check(const WContext& ctx)
{
	const std::size_t z = ctx.Z.size();
	if (z > 22)
		fail(ErrorCode::ZTooLarge, "|Z(W)| = " + std::to_string(z) + " is too large for exhaustive enumeration");
	LemmaReport rep;
	rep.w = ctx.w;
	rep.W = ctx.W;
	rep.z_size = z;
	for (u64 mask = 0; mask < (u64(1) << z); ++mask) {
		if (2 * static_cast<std::size_t>(std::popcount(mask)) <= z)
			continue;
		std::vector<u64> E;
		for (std::size_t i = 0; i < z; ++i)
			if ((mask >> i) & 1)
				E.push_back(ctx.Z[i]);
		++rep.subsets_checked;
		if (!verify_cover(ctx, E).ok())
			rep.failures.push_back(E);
	}
	return rep;
}

/// The element u of Z_{W'} with u^(p) = (p-1)/2 for every p | W'.
inline u64 half_point(u64 Wp)
{
	const auto primes = detail::squarefree_primes(Wp);
	std::vector<Congruence> sys;
	for (u64 p : primes)
		sys.push_back({static_cast<i64>((p - 1) / 2), static_cast<i64>(p)});
	return static_cast<u64>(crt_combine(sys));
}

} // namespace psq
