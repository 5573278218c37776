#include "oracles.hpp"
#include "psq/wtrick.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace psq;

namespace {

// Units mod W squared, by brute force.
std::vector<u64> residues_by_enumeration(u64 W)
{
	std::vector<char> hit(W, 0);
	for (u64 h = 1; h < W; ++h)
		if (std::gcd(h, W) == 1)
			hit[h * h % W] = 1;
	std::vector<u64> out;
	for (u64 b = 0; b < W; ++b)
		if (hit[b])
			out.push_back(b);
	return out;
}

DensityTable flat_table(const WContext& ctx, double value)
{
	DensityTable dt;
	dt.N = 1;
	dt.residues = ctx.Z;
	dt.delta.assign(ctx.Z.size(), value);
	return dt;
}

} // namespace

TEST(Context, Examples)
{
	const auto c4 = build_context(4);
	EXPECT_EQ(c4.W, 24u);
	EXPECT_EQ(c4.phi_W, 8u);
	EXPECT_EQ(c4.H, 8u);
	EXPECT_EQ(c4.Z, (std::vector<u64>{1}));
	EXPECT_EQ(c4.roots_of(1), (std::vector<u64>{1, 5, 7, 11, 13, 17, 19, 23}));

	const auto c6 = build_context(6);
	EXPECT_EQ(c6.W, 120u);
	EXPECT_EQ(c6.phi_W, 32u);
	EXPECT_EQ(c6.H, 16u);
	EXPECT_EQ(c6.Z, (std::vector<u64>{1, 49}));

	const auto c8 = build_context(8);
	EXPECT_EQ(c8.W, 840u);
	EXPECT_EQ(c8.phi_W, 192u);
	EXPECT_EQ(c8.H, 32u);
	EXPECT_EQ(c8.Z.size(), 6u);
}

TEST(Context, StructureMatchesEnumeration)
{
	for (int w : {4, 5, 6, 7, 8, 10, 12}) {
		const auto ctx = build_context(w);
		u64 W = 8;
		for (u64 p = 3; p < static_cast<u64>(w); ++p)
			if (oracle::is_prime(p))
				W *= p;
		ASSERT_EQ(ctx.W, W) << w;
		EXPECT_EQ(ctx.phi_W, oracle::phi(W));
		EXPECT_EQ(ctx.Z, residues_by_enumeration(W));
		EXPECT_EQ(ctx.H * ctx.Z.size(), ctx.phi_W);
		for (std::size_t i = 0; i < ctx.Z.size(); ++i) {
			EXPECT_EQ(ctx.Z[i] % 24, 1u);
			ASSERT_EQ(ctx.roots[i].size(), ctx.H);
			for (u64 h : ctx.roots[i])
				EXPECT_EQ(h * h % W, ctx.Z[i]);
		}
	}
}

TEST(Context, Errors)
{
	EXPECT_THROW(build_context(3), Error);
	try {
		build_context(20);
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.code(), ErrorCode::WTooLarge);
	}
	EXPECT_THROW(build_context(6).roots_of(7), Error);
}

TEST(Sequences, NuExamples)
{
	const auto ctx = build_context(4);
	const auto table = sieve(1000);
	const auto one = nu_sequence(ctx, 1, 1, table);
	ASSERT_EQ(one.N, 1u);
	// (8 / (24 * 8)) * 2 * 5 * ln 5
	const double expected = 8.0 / (24.0 * 8.0) * 2.0 * 5.0 * std::log(5.0);
	EXPECT_NEAR(one.at(1), expected, 1e-12);
	EXPECT_NEAR(one.at(1), 0.670599, 1e-6);

	const auto two = nu_sequence(ctx, 1, 2, table);
	EXPECT_GT(two.at(2), 0.0); // 24*2 + 1 = 49
	EXPECT_EQ(two.support().size(), 2u);
}

TEST(Sequences, SupportIsExactlyPrimeSquares)
{
	const auto table = sieve(100000);
	for (int w : {4, 6, 8}) {
		const auto ctx = build_context(w);
		for (u64 b : ctx.Z) {
			const std::size_t N = 5000;
			const auto nu = nu_sequence(ctx, b, N, table);
			for (std::size_t n = 1; n <= N; ++n) {
				const u64 v = ctx.W * n + b;
				const u64 r = isqrt(v);
				const bool prime_square = r * r == v && oracle::is_prime(r);
				ASSERT_EQ(nu.at(n) != 0.0, prime_square) << "w=" << w << " b=" << b << " n=" << n;
				if (prime_square) {
					ASSERT_NEAR(nu.at(n), ctx.weight(r), 1e-12);
				}
			}
		}
	}
}

TEST(Sequences, SubsetIsDominatedByMajorant)
{
	const auto ctx = build_context(6);
	const auto table = sieve(100000);
	for (const auto& spec : {PrimeSubsetSpec::all(), PrimeSubsetSpec::nonzero_classes(11),
	                         PrimeSubsetSpec::bernoulli(0.5, 3), PrimeSubsetSpec::explicit_list({})})
		for (u64 b : ctx.Z) {
			const auto nu = nu_sequence(ctx, b, 20000, table);
			const auto f = f_sequence(ctx, b, 20000, spec, table);
			for (std::size_t n = 1; n <= 20000; ++n)
				ASSERT_LE(f.at(n), nu.at(n));
		}
}

TEST(Sequences, SubsetExamples)
{
	const auto ctx = build_context(4);
	const auto table = sieve(1000);
	const auto nu = nu_sequence(ctx, 1, 5, table);
	EXPECT_EQ(f_sequence(ctx, 1, 5, PrimeSubsetSpec::all(), table).values, nu.values);
	EXPECT_EQ(f_sequence(ctx, 1, 5, PrimeSubsetSpec::explicit_list({}), table).support().size(), 0u);
	const auto f11 = f_sequence(ctx, 1, 5, PrimeSubsetSpec::nonzero_classes(11), table);
	EXPECT_GT(nu.at(5), 0.0); // 121 = 11^2
	EXPECT_EQ(f11.at(5), 0.0);
	for (std::size_t n = 1; n <= 4; ++n)
		EXPECT_EQ(f11.at(n), nu.at(n));
}

TEST(Sequences, Errors)
{
	const auto ctx = build_context(6);
	try {
		nu_sequence(ctx, 1, 100000, sieve(100));
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.code(), ErrorCode::TableTooSmall);
	}
	EXPECT_THROW(nu_sequence(ctx, 7, 10, sieve(100)), Error);
	EXPECT_THROW(nu_sequence(ctx, 1, 0, sieve(100)), Error);
}

TEST(Density, TableMatchesSequenceMeans)
{
	const auto ctx = build_context(6);
	const auto table = sieve(100000);
	const auto spec = PrimeSubsetSpec::bernoulli(0.7, 9);
	const auto dt = delta_table(ctx, 10000, spec, table);
	for (u64 b : ctx.Z)
		EXPECT_DOUBLE_EQ(dt.at(b), f_sequence(ctx, b, 10000, spec, table).sum() / 10000.0);
	const auto zero = delta_table(ctx, 10000, PrimeSubsetSpec::explicit_list({}), table);
	for (double d : zero.delta)
		EXPECT_EQ(d, 0.0);
}

TEST(Density, MajorantMeanIsNearOne)
{
	const auto ctx = build_context(4);
	const std::size_t N = std::size_t(1) << 16;
	const auto dt = delta_table(ctx, N, PrimeSubsetSpec::all(), sieve(isqrt(24 * N + 1) + 1));
	EXPECT_NEAR(dt.at(1), 1.0, 0.15);
}

TEST(Density, DenseSubsetMeanAtLeastDensitySquared)
{
	// Averaged over Z(W) the mean is about the relative density d of P, which
	// is at least d^2.
	const auto ctx = build_context(6);
	const std::size_t N = std::size_t(1) << 18;
	const auto table = sieve(isqrt(ctx.W * N + ctx.W) + 1);
	for (double rho : {0.6, 0.9}) {
		const auto spec = PrimeSubsetSpec::bernoulli(rho, 17);
		const double d = empirical_density(spec, table);
		const double mean = delta_table(ctx, N, spec, table).mean();
		EXPECT_GE(mean, d * d - 0.1) << rho;
		EXPECT_NEAR(mean, d, 0.1) << rho;
	}
}

TEST(Lambda, Threshold)
{
	EXPECT_NEAR(lambda_threshold(8), std::sqrt(3.0) / 2.0, 1e-15);
	EXPECT_NEAR(lambda_threshold(16), 1.0 / std::sqrt(2.0), 1e-15);
	EXPECT_EQ(lambda_threshold(40), lambda_threshold(16));
}

TEST(SelectResidues, SingletonContext)
{
	const auto ctx = build_context(4);
	for (int s : {8, 9, 13}) {
		const i64 n = 24 * 1000 + s;
		const auto sel = select_residues(ctx, flat_table(ctx, 1.0), n, s, 0.1);
		ASSERT_TRUE(sel.feasible);
		EXPECT_EQ(sel.residues, std::vector<u64>(static_cast<std::size_t>(s), 1));
	}
	EXPECT_THROW(select_residues(ctx, flat_table(ctx, 1.0), 24 * 1000 + 9, 8, 0.1), Error);
}

TEST(SelectResidues, AllZeroIsInfeasible)
{
	const auto ctx = build_context(6);
	const auto sel = select_residues(ctx, flat_table(ctx, 0.0), 8, 8, 0.1);
	EXPECT_FALSE(sel.feasible);
	EXPECT_FALSE(sel.reason.empty());
}

TEST(SelectResidues, ArgumentErrors)
{
	const auto ctx = build_context(6);
	EXPECT_THROW(select_residues(ctx, flat_table(ctx, 1.0), 7, 7, 0.1), Error);
	EXPECT_THROW(select_residues(ctx, flat_table(ctx, 1.0), 8, 8, 0.0), Error);
	EXPECT_THROW(select_residues(ctx, flat_table(build_context(4), 1.0), 8, 8, 0.1), Error);
}

TEST(SelectResidues, AgreesWithExhaustiveTupleSearchW6)
{
	const auto ctx = build_context(6);
	const auto dt = flat_table(ctx, 1.0);
	// Oracle: every one of the 2^8 tuples over {1, 49}.
	std::vector<char> reachable(ctx.W, 0);
	for (unsigned mask = 0; mask < 256; ++mask) {
		u64 sum = 0;
		for (int j = 0; j < 8; ++j)
			sum += ((mask >> j) & 1) ? 49 : 1;
		reachable[sum % ctx.W] = 1;
	}
	for (i64 n = 8; n < 8 + 10 * 120; n += 24) {
		const auto sel = select_residues(ctx, dt, n, 8, 0.1);
		ASSERT_EQ(sel.feasible, static_cast<bool>(reachable[static_cast<u64>(n) % ctx.W])) << n;
		ASSERT_TRUE(sel.feasible);
		u64 sum = 0;
		for (u64 b : sel.residues) {
			ASSERT_TRUE(ctx.in_Z(b));
			sum += b;
		}
		ASSERT_EQ(sum % ctx.W, static_cast<u64>(n) % ctx.W);
	}
}

TEST(SelectResidues, AgreesWithExhaustiveSearchW8RandomDensities)
{
	const auto ctx = build_context(8);
	std::mt19937_64 rng(21);
	std::uniform_real_distribution<double> u(0.5, 1.0);
	for (int trial = 0; trial < 30; ++trial) {
		DensityTable dt = flat_table(ctx, 0.0);
		for (auto& d : dt.delta)
			d = u(rng);
		const int s = 8 + static_cast<int>(rng() % 5);
		const double kappa = 0.05;
		const double lam = lambda_threshold(s);
		const double mu = *std::max_element(dt.delta.begin(), dt.delta.end());
		const double thr = 2 * lam * lam - mu + kappa / 4;
		std::vector<u64> E;
		u64 b0 = 0;
		for (std::size_t i = 0; i < ctx.Z.size(); ++i) {
			if (dt.delta[i] >= thr)
				E.push_back(ctx.Z[i]);
			if (dt.delta[i] == mu && b0 == 0)
				b0 = ctx.Z[i];
		}
		// Oracle: all ordered 8-tuples over E.
		std::vector<char> reach(ctx.W, 0);
		if (!E.empty()) {
			std::vector<std::size_t> idx(8, 0);
			for (;;) {
				u64 sum = 0;
				for (std::size_t i : idx)
					sum += E[i];
				reach[sum % ctx.W] = 1;
				std::size_t pos = 0;
				while (pos < 8 && ++idx[pos] == E.size())
					idx[pos++] = 0;
				if (pos == 8)
					break;
			}
		}
		for (i64 n = s; n < static_cast<i64>(ctx.W) + s; n += 24) {
			const auto sel = select_residues(ctx, dt, n + 24 * 500, s, kappa);
			const u64 need = mod_floor(n + 24 * 500 - static_cast<i64>(s - 8) * static_cast<i64>(b0), ctx.W);
			ASSERT_EQ(sel.feasible, static_cast<bool>(reach[need])) << "trial " << trial << " n " << n;
			if (!sel.feasible)
				continue;
			ASSERT_EQ(sel.b0, b0);
			ASSERT_EQ(sel.residues.size(), static_cast<std::size_t>(s));
			u64 sum = 0;
			for (std::size_t j = 0; j < sel.residues.size(); ++j) {
				sum += sel.residues[j];
				if (j < static_cast<std::size_t>(s - 8))
					ASSERT_EQ(sel.residues[j], b0);
				else
					ASSERT_GE(dt.at(sel.residues[j]), thr);
			}
			ASSERT_EQ(sum % ctx.W, static_cast<u64>(n + 24 * 500) % ctx.W);
		}
	}
}

TEST(SelectResidues, TiesGoToSmallestResidue)
{
	const auto ctx = build_context(8);
	const auto sel = select_residues(ctx, flat_table(ctx, 0.9), 24 * 100 + 10, 10, 0.05);
	EXPECT_EQ(sel.b0, ctx.Z.front());
}
