#pragma once

// Exact integer and modular arithmetic shared by every other module.
// Products that may leave 64 bits are formed in 128-bit intermediates.

#include "psq/error.hpp"

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace psq {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

struct PrimePower {
	u64 prime;
	unsigned exponent;
	friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Canonical factorization: primes strictly increasing, exponents >= 1.
struct Factorization {
	std::vector<PrimePower> prime_powers;

	u64 value() const
	{
		u64 v = 1;
		for (const auto& pp : prime_powers)
			for (unsigned e = 0; e < pp.exponent; ++e)
				v *= pp.prime;
		return v;
	}
	bool squarefree() const
	{
		for (const auto& pp : prime_powers)
			if (pp.exponent > 1)
				return false;
		return true;
	}
	std::size_t omega() const { return prime_powers.size(); }
};

/// Least nonnegative residue of a mod m (m > 0).
constexpr i64 mod_floor(i64 a, i64 m)
{
	i64 r = a % m;
	return r < 0 ? r + m : r;
}

constexpr u64 mul_mod(u64 a, u64 b, u64 m)
{
	return static_cast<u64>(static_cast<u128>(a) * b % m);
}

constexpr u64 pow_mod(u64 base, u64 exp, u64 m)
{
	u64 result = 1 % m;
	base %= m;
	while (exp > 0) {
		if (exp & 1)
			result = mul_mod(result, base, m);
		base = mul_mod(base, base, m);
		exp >>= 1;
	}
	return result;
}

/// Floor of the square root, exact for the full 64-bit range.
constexpr u64 isqrt(u64 n)
{
	if (n < 2)
		return n;
	u64 x = 1ULL << ((64 - __builtin_clzll(n) + 1) / 2);
	while (true) {
		u64 y = (x + n / x) / 2;
		if (y >= x)
			break;
		x = y;
	}
	while (static_cast<u128>(x) * x > n)
		--x;
	while (static_cast<u128>(x + 1) * (x + 1) <= n)
		++x;
	return x;
}

constexpr bool is_perfect_square(u64 n)
{
	u64 r = isqrt(n);
	return r * r == n;
}

/// Inverse of a modulo m, returned in [1, m-1] (or 0 when m == 1 is excluded by the contract).
inline i64 mod_inverse(i64 a, i64 m)
{
	if (m < 2)
		fail(ErrorCode::InvalidArgument, "mod_inverse requires m >= 2, got " + std::to_string(m));
	i128 old_r = mod_floor(a, m), r = m;
	i128 old_s = 1, s = 0;
	while (r != 0) {
		i128 q = old_r / r;
		i128 t = old_r - q * r;
		old_r = r;
		r = t;
		t = old_s - q * s;
		old_s = s;
		s = t;
	}
	if (old_r != 1)
		fail(ErrorCode::NonInvertible,
		     std::to_string(a) + " has no inverse modulo " + std::to_string(m));
	i128 x = old_s % m;
	if (x < 0)
		x += m;
	return static_cast<i64>(x);
}

struct Congruence {
	i64 residue;
	i64 modulus;
};

/// Unique x in [0, prod m) with x = r_i (mod m_i) for pairwise coprime moduli.
inline i64 crt_combine(std::span<const Congruence> system)
{
	i128 x = 0, M = 1;
	for (const auto& c : system) {
		if (c.modulus < 1)
			fail(ErrorCode::InvalidArgument, "modulus must be positive");
		if (std::gcd(static_cast<i64>(M), c.modulus) != 1)
			fail(ErrorCode::NonCoprimeModuli,
			     "modulus " + std::to_string(c.modulus) + " shares a factor with earlier moduli");
		i128 m = c.modulus;
		i128 r = mod_floor(c.residue, c.modulus);
		if (m == 1) {
			continue;
		}
		// x + M*t = r (mod m)  =>  t = (r - x) * M^{-1} (mod m)
		i128 inv = mod_inverse(static_cast<i64>(M % m), static_cast<i64>(m));
		i128 t = ((r - x % m) % m + m) % m * inv % m;
		x += M * t;
		M *= m;
		if (M > static_cast<i128>(INT64_MAX))
			fail(ErrorCode::Overflow, "product of moduli exceeds 63 bits");
	}
	return static_cast<i64>(x);
}

inline i64 crt_combine(std::initializer_list<Congruence> system)
{
	return crt_combine(std::span<const Congruence>(system.begin(), system.size()));
}

namespace detail {

/// Odd primes up to 2^16, enough to trial-divide anything below 2^32 completely.
inline const std::vector<std::uint32_t>& small_primes()
{
	static const std::vector<std::uint32_t> table = [] {
		constexpr std::uint32_t limit = 1u << 16;
		std::vector<bool> composite(limit + 1, false);
		std::vector<std::uint32_t> ps;
		for (std::uint32_t i = 2; i <= limit; ++i) {
			if (composite[i])
				continue;
			ps.push_back(i);
			for (std::uint64_t j = std::uint64_t(i) * i; j <= limit; j += i)
				composite[j] = true;
		}
		return ps;
	}();
	return table;
}

} // namespace detail

/// Trial division; complete for every 64-bit input whose second-largest prime factor is below 2^16
/// and always complete below 2^32.
inline Factorization factorize(u64 n)
{
	if (n == 0)
		fail(ErrorCode::InvalidArgument, "factorize(0)");
	Factorization f;
	for (std::uint32_t p : detail::small_primes()) {
		if (u64(p) * p > n)
			break;
		if (n % p != 0)
			continue;
		unsigned e = 0;
		while (n % p == 0) {
			n /= p;
			++e;
		}
		f.prime_powers.push_back({p, e});
	}
	if (n > 1) {
		// Past the table: continue with odd candidates (only reached for n > 2^32).
		u64 d = (u64(detail::small_primes().back()) + 2) | 1;
		while (static_cast<u128>(d) * d <= n) {
			if (n % d == 0) {
				unsigned e = 0;
				while (n % d == 0) {
					n /= d;
					++e;
				}
				f.prime_powers.push_back({d, e});
			}
			d += 2;
		}
		if (n > 1)
			f.prime_powers.push_back({n, 1});
	}
	return f;
}

inline u64 euler_phi(u64 n)
{
	if (n == 0)
		fail(ErrorCode::InvalidArgument, "euler_phi(0)");
	u64 phi = n;
	for (const auto& pp : factorize(n).prime_powers)
		phi = phi / pp.prime * (pp.prime - 1);
	return phi;
}

inline u64 divisor_count(u64 n)
{
	if (n == 0)
		fail(ErrorCode::InvalidArgument, "divisor_count(0)");
	u64 tau = 1;
	for (const auto& pp : factorize(n).prime_powers)
		tau *= pp.exponent + 1;
	return tau;
}

inline bool is_squarefree(u64 n)
{
	return n >= 1 && factorize(n).squarefree();
}

inline bool is_prime(u64 n)
{
	if (n < 2)
		return false;
	const auto f = factorize(n);
	return f.prime_powers.size() == 1 && f.prime_powers[0].exponent == 1;
}

/// Distinct prime divisors of n in increasing order.
inline std::vector<u64> prime_divisors(u64 n)
{
	std::vector<u64> out;
	for (const auto& pp : factorize(n).prime_powers)
		out.push_back(pp.prime);
	return out;
}

} // namespace psq
