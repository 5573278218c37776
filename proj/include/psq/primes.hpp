#pragma once

// Prime tables and declarative prime subsets.

#include "psq/core_arith.hpp"
#include "psq/error.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace psq {

/// Sieve of Eratosthenes over [0, limit]; immutable once built.
class PrimeTable {
public:
	/// Sieve tables above this bound are refused (about 256 MiB of flags).
	static constexpr u64 max_limit = u64(1) << 28;

	explicit PrimeTable(u64 limit) : limit_(limit)
	{
		if (limit < 2)
			fail(ErrorCode::InvalidArgument, "sieve limit must be >= 2");
		if (limit > max_limit)
			fail(ErrorCode::LimitTooLarge,
			     "sieve limit " + std::to_string(limit) + " exceeds " + std::to_string(max_limit));
		is_prime_.assign(limit + 1, 1);
		is_prime_[0] = is_prime_[1] = 0;
		for (u64 i = 2; i * i <= limit; ++i)
			if (is_prime_[i])
				for (u64 j = i * i; j <= limit; j += i)
					is_prime_[j] = 0;
		for (u64 i = 2; i <= limit; ++i)
			if (is_prime_[i])
				primes_.push_back(i);
	}

	u64 limit() const noexcept { return limit_; }
	bool contains(u64 n) const noexcept { return n <= limit_ && is_prime_[n]; }
	const std::vector<u64>& primes() const noexcept { return primes_; }

	/// Primes in [lo, hi], clipped to the table.
	std::vector<u64> primes_between(u64 lo, u64 hi) const
	{
		auto first = std::lower_bound(primes_.begin(), primes_.end(), lo);
		auto last = std::upper_bound(primes_.begin(), primes_.end(), hi);
		return first < last ? std::vector<u64>(first, last) : std::vector<u64>{};
	}

private:
	u64 limit_;
	std::vector<std::uint8_t> is_prime_;
	std::vector<u64> primes_;
};

inline PrimeTable sieve(u64 limit)
{
	return PrimeTable(limit);
}

inline constexpr u64 splitmix64(u64 x) noexcept
{
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

/// Uniform draw in [0, 1) attached to the pair (seed, p): the splitmix64
/// output for p within the stream splitmix64(seed). Independent of the order
/// in which primes are visited.
inline constexpr double bernoulli_uniform(u64 seed, u64 p) noexcept
{
	u64 x = splitmix64(splitmix64(seed) ^ p);
	return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Declarative description of a subset P of the primes.
struct PrimeSubsetSpec {
	enum class Variant { All, ResidueClasses, BernoulliSample, ExplicitList };

	Variant variant = Variant::All;
	u64 modulus = 1;              // ResidueClasses
	std::vector<u64> classes;     // ResidueClasses: allowed residues mod modulus
	double rho = 1.0;             // BernoulliSample
	u64 seed = 0;                 // BernoulliSample
	std::vector<u64> primes;      // ExplicitList
	u64 min_prime = 5;

	static PrimeSubsetSpec all(u64 min_prime = 5)
	{
		PrimeSubsetSpec s;
		s.min_prime = min_prime;
		return s;
	}
	static PrimeSubsetSpec residue_classes(u64 q, std::vector<u64> allowed, u64 min_prime = 5)
	{
		PrimeSubsetSpec s;
		s.variant = Variant::ResidueClasses;
		s.modulus = q;
		s.classes = std::move(allowed);
		s.min_prime = min_prime;
		s.validate();
		return s;
	}
	/// All reduced classes mod q, i.e. every prime except those dividing q.
	static PrimeSubsetSpec nonzero_classes(u64 q, u64 min_prime = 5)
	{
		std::vector<u64> cls;
		for (u64 c = 1; c < q; ++c)
			if (std::gcd(c, q) == 1)
				cls.push_back(c);
		return residue_classes(q, std::move(cls), min_prime);
	}
	static PrimeSubsetSpec bernoulli(double rho, u64 seed, u64 min_prime = 5)
	{
		PrimeSubsetSpec s;
		s.variant = Variant::BernoulliSample;
		s.rho = rho;
		s.seed = seed;
		s.min_prime = min_prime;
		s.validate();
		return s;
	}
	static PrimeSubsetSpec explicit_list(std::vector<u64> ps, u64 min_prime = 5)
	{
		PrimeSubsetSpec s;
		s.variant = Variant::ExplicitList;
		s.primes = std::move(ps);
		s.min_prime = min_prime;
		s.validate();
		return s;
	}

	void validate()
	{
		switch (variant) {
		case Variant::All:
			break;
		case Variant::ResidueClasses:
			if (modulus < 1)
				fail(ErrorCode::InvalidArgument, "residue-class modulus must be positive");
			if (classes.empty())
				fail(ErrorCode::InvalidArgument, "residue-class allowed set is empty");
			for (u64& c : classes) {
				c %= modulus;
				if (std::gcd(c, modulus) != 1)
					fail(ErrorCode::InvalidArgument,
					     "class " + std::to_string(c) + " is not coprime to " + std::to_string(modulus));
			}
			std::sort(classes.begin(), classes.end());
			classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
			break;
		case Variant::BernoulliSample:
			if (!(rho > 0.0 && rho <= 1.0))
				fail(ErrorCode::InvalidArgument, "rho must lie in (0, 1]");
			break;
		case Variant::ExplicitList:
			std::sort(primes.begin(), primes.end());
			primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
			break;
		}
	}

	/// Membership for a number already known to be prime.
	bool admits(u64 p) const
	{
		if (p < min_prime)
			return false;
		switch (variant) {
		case Variant::All:
			return true;
		case Variant::ResidueClasses:
			return std::binary_search(classes.begin(), classes.end(), p % modulus);
		case Variant::BernoulliSample:
			return rho >= 1.0 || bernoulli_uniform(seed, p) < rho;
		case Variant::ExplicitList:
			return std::binary_search(primes.begin(), primes.end(), p);
		}
		return false;
	}
};

/// P intersected with the table range, in increasing order.
inline std::vector<u64> subset_members(const PrimeSubsetSpec& spec, const PrimeTable& table)
{
	std::vector<u64> out;
	for (u64 p : table.primes())
		if (spec.admits(p))
			out.push_back(p);
	return out;
}

/// |P ∩ [limit]| / |primes ∩ [limit]|, both restricted to p >= min_prime.
inline double empirical_density(const PrimeSubsetSpec& spec, const PrimeTable& table)
{
	u64 reference = 0, members = 0;
	for (u64 p : table.primes()) {
		if (p < spec.min_prime)
			continue;
		++reference;
		if (spec.admits(p))
			++members;
	}
	if (reference == 0)
		fail(ErrorCode::EmptyReference, "no primes >= min_prime below the table limit");
	return static_cast<double>(members) / static_cast<double>(reference);
}

} // namespace psq
