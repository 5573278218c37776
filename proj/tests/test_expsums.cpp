#include "oracles.hpp"
#include "psq/expsums.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace psq;

namespace {

// (1/H) sum_{h in H(b)} sum_{l in [q], (Wl+h, qW)=1} e(a ((Wl+h)^2 - b) / (qW)),
// with ((Wl+h)^2 - b)/W reduced mod q in integers.
cplx literal_S(const WContext& ctx, u64 b, u64 q, u64 a)
{
	cplx s = 0;
	for (u64 h : ctx.roots_of(b))
		for (u64 l = 1; l <= q; ++l) {
			const u64 x = ctx.W * l + h;
			if (std::gcd(x, q * ctx.W) != 1)
				continue;
			const u64 t = static_cast<u64>((static_cast<u128>(x) * x - b) / ctx.W % q);
			s += oracle::e_frac(static_cast<long long>(a * t % q), static_cast<long long>(q));
		}
	return s / static_cast<double>(ctx.H);
}

WeightedSequence indicator(std::size_t N)
{
	return WeightedSequence::from_values(std::vector<double>(N, 1.0));
}

} // namespace

TEST(Dft, DirectExamples)
{
	EXPECT_EQ(dft_at(WeightedSequence::from_values(std::vector<double>(16, 0.0)), 0.3), cplx(0.0));
	EXPECT_NEAR(std::abs(dft_at(indicator(1000), 0.0) - 1000.0), 0.0, 1e-9);
	const auto ctx = build_context(6);
	const std::size_t N = 1 << 14;
	const auto table = sieve(isqrt(ctx.W * N + ctx.W) + 1);
	const auto nu = nu_sequence(ctx, 1, N, table);
	EXPECT_NEAR(dft_at(nu, 0.0).real(), nu.sum(), 1e-6);
	EXPECT_NEAR(dft_at(nu, 0.0).real() / N, delta_table(ctx, N, PrimeSubsetSpec::all(), table).at(1), 1e-9);
}

TEST(Dft, GridImpulse)
{
	std::vector<double> v(64, 0.0);
	v[0] = 1.0; // n = 1
	const auto g = dft_grid(WeightedSequence::from_values(v), 1);
	for (std::size_t k = 0; k < 64; ++k)
		ASSERT_LT(std::abs(g.values[k] - oracle::e_frac(static_cast<long long>(k), 64)), 1e-13);
}

TEST(Dft, GridMatchesDirectOnRandomSequences)
{
	std::mt19937_64 rng(2);
	for (std::size_t N : {1024u, 1000u, 777u})
		for (std::size_t K : {1u, 3u, 4u}) {
			std::vector<double> v(N);
			for (auto& x : v)
				x = static_cast<double>(rng() % 2);
			const auto seq = WeightedSequence::from_values(v);
			const auto g = dft_grid(seq, K);
			ASSERT_EQ(g.size(), K * N);
			double err = 0;
			for (std::size_t k = 0; k < g.size(); k += (g.size() > 2000 ? 3 : 1))
				err = std::max(err, std::abs(g.values[k] - oracle::dft(v, static_cast<double>(k) / g.size())));
			EXPECT_LT(err, 1e-9 * N) << "N=" << N << " K=" << K;
			EXPECT_NEAR(g.values[0].real(), seq.sum(), 1e-9);
			for (std::size_t k = 1; k < g.size(); ++k)
				ASSERT_LT(std::abs(g.values[k] - std::conj(g.values[g.size() - k])), 1e-9);
		}
}

TEST(Dft, Parseval)
{
	std::mt19937_64 rng(12);
	std::uniform_real_distribution<double> u(0, 3);
	for (std::size_t K : {1u, 2u, 4u}) {
		std::vector<double> v(4096);
		double sq = 0;
		for (auto& x : v) {
			x = u(rng);
			sq += x * x;
		}
		const auto g = dft_grid(WeightedSequence::from_values(v), K);
		double tot = 0;
		for (const auto& z : g.values)
			tot += std::norm(z);
		EXPECT_NEAR(tot / static_cast<double>(g.size()) / sq, 1.0, 1e-9);
	}
}

TEST(Dft, Errors)
{
	EXPECT_THROW(dft_grid(indicator(10), 0), Error);
	try {
		dft_grid(indicator(1 << 20), 128);
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.code(), ErrorCode::TooLarge);
	}
}

TEST(Gauss, Examples)
{
	EXPECT_LT(std::abs(gauss_sum(1, 1) - 1.0), 1e-15);
	EXPECT_LT(std::abs(gauss_sum(1, 17) - 1.0), 1e-15);
	EXPECT_LT(std::abs(gauss_sum(3, 1) - cplx(-1.0, std::sqrt(3.0))), 1e-12);
	EXPECT_NEAR(std::abs(gauss_sum(3, 1)), 2.0, 1e-12);
	EXPECT_LT(std::abs(gauss_sum(5, 1) - (std::sqrt(5.0) - 1.0)), 1e-12);
	EXPECT_LT(std::abs(gauss_sum(5, 1) - oracle::gauss(5, 1)), 1e-12);
	try {
		gauss_sum(9, 6);
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.code(), ErrorCode::NotCoprime);
	}
}

TEST(Gauss, MatchesOracleAndBound)
{
	for (u64 k = 1; k <= 400; k += 2) {
		if (!is_squarefree(k))
			continue;
		const double bound = std::ldexp(std::sqrt(static_cast<double>(k)), static_cast<int>(factorize(k).omega()));
		for (u64 r = 1; r <= k; ++r) {
			if (std::gcd(r, k) != 1)
				continue;
			const cplx g = gauss_sum(k, static_cast<i64>(r));
			ASSERT_LT(std::abs(g - oracle::gauss(k, static_cast<long long>(r))), 1e-9);
			ASSERT_LE(std::abs(g), bound + 1e-9) << k << "," << r;
		}
	}
}

TEST(Gauss, MultiplicativeOverCoprimeModuli)
{
	// l = l1 k2 + l2 k1 gives G(k1 k2, r) = G(k1, r k2) G(k2, r k1).
	for (u64 k1 : {3u, 5u, 7u, 9u, 15u})
		for (u64 k2 : {11u, 13u, 25u, 49u}) {
			if (std::gcd(k1, k2) != 1)
				continue;
			for (u64 r = 1; r < k1 * k2; r += 7) {
				if (std::gcd(r, k1 * k2) != 1)
					continue;
				const cplx lhs = gauss_sum(k1 * k2, static_cast<i64>(r));
				const cplx rhs = gauss_sum(k1, static_cast<i64>(r * k2)) * gauss_sum(k2, static_cast<i64>(r * k1));
				ASSERT_LT(std::abs(lhs - rhs), 1e-9) << k1 << "*" << k2 << " r=" << r;
				ASSERT_NEAR(std::abs(lhs), std::abs(gauss_sum(k1, static_cast<i64>(r * k2))) *
				                               std::abs(gauss_sum(k2, static_cast<i64>(r * k1))),
				            1e-9);
			}
		}
}

TEST(LocalFactor, DirectExamples)
{
	for (int w : {4, 6, 8}) {
		const auto ctx = build_context(w);
		for (u64 b : ctx.Z)
			EXPECT_LT(std::abs(s_direct(ctx, b, 1, 1).value - 1.0), 1e-12);
	}
	const auto c4 = build_context(4);
	EXPECT_LT(std::abs(s_direct(c4, 1, 2, 1).value), 1e-12);
	EXPECT_LT(std::abs(s_direct(c4, 1, 3, 1).value), 1e-12);
	EXPECT_THROW(s_direct(c4, 1, 4, 2), Error);
	EXPECT_THROW(s_direct(c4, 5, 4, 1), Error);
}

TEST(LocalFactor, DirectMatchesLiteralOracle)
{
	for (int w : {4, 6}) {
		const auto ctx = build_context(w);
		for (u64 b : ctx.Z)
			for (u64 q = 1; q <= 40; ++q)
				for (u64 a = 1; a <= q; ++a) {
					if (std::gcd(a, q) == 1) {
						ASSERT_LT(std::abs(s_direct(ctx, b, q, a).value - literal_S(ctx, b, q, a)), 1e-10)
						    << w << " b=" << b << " q=" << q << " a=" << a;
					}
				}
	}
}

TEST(LocalFactor, ClosedFormExamples)
{
	const auto c4 = build_context(4);
	const auto s5 = s_closed(c4, 1, 5, 1);
	EXPECT_EQ(s5.case_tag, LocalFactor::Case::Coprime);
	EXPECT_EQ(mod_inverse(24, 5), 4);
	const cplx expected = unit_phase(-4, 5) * gauss_sum(5, 4);
	EXPECT_LT(std::abs(s5.value - expected), 1e-12);
	EXPECT_LT(std::abs(s5.value - s_direct(c4, 1, 5, 1).value), 1e-12);

	const auto s6 = s_closed(c4, 1, 6, 1);
	EXPECT_EQ(s6.case_tag, LocalFactor::Case::VanishingI);
	EXPECT_EQ(s6.value, cplx(0.0));
	EXPECT_EQ(s_closed(c4, 1, 2, 1).case_tag, LocalFactor::Case::VanishingIV);

	const auto c6 = build_context(6);
	const auto s14 = s_closed(c6, 49, 14, 1);
	EXPECT_EQ(s14.case_tag, LocalFactor::Case::GcdTwo);
	EXPECT_LT(std::abs(s14.value - s_direct(c6, 49, 14, 1).value), 1e-12);
}

TEST(LocalFactor, ClosedAgreesWithDirectEverywhere)
{
	for (int w : {4, 6}) {
		const auto ctx = build_context(w);
		for (u64 b : ctx.Z)
			for (u64 q = 1; q <= 60; ++q)
				for (u64 a = 1; a <= q; ++a) {
					if (std::gcd(a, q) != 1)
						continue;
					const auto c = s_closed(ctx, b, q, a);
					const auto d = s_direct(ctx, b, q, a);
					ASSERT_LT(std::abs(c.value - d.value), 1e-9) << w << " " << b << " " << q << " " << a;
					const u64 t = std::gcd(q, ctx.W);
					if (q == 2 || (t != 1 && t != 2)) {
						ASSERT_LT(std::abs(d.value), 1e-9);
					}
					ASSERT_LE(std::abs(d.value), static_cast<double>(q) + 1e-9);
				}
	}
}

TEST(LocalFactor, CaseNames)
{
	EXPECT_STREQ(case_name(LocalFactor::Case::VanishingI), "Vanishing-(i)");
	EXPECT_STREQ(case_name(LocalFactor::Case::VanishingIV), "Vanishing-(iv)");
}

TEST(Arcs, Examples)
{
	const std::size_t N = 1 << 18;
	const auto part = arc_partition(N, 2.0);
	EXPECT_NEAR(part.Q, std::pow(std::log(static_cast<double>(N)), 2.0), 1e-9);
	EXPECT_NEAR(part.Q, 155.4, 0.5);
	EXPECT_TRUE(part.disjoint);
	EXPECT_STREQ(ArcPartition::log_base, "natural");

	// Pairwise gap oracle over all arcs.
	for (std::size_t i = 0; i < part.arcs.size(); ++i)
		for (std::size_t j = i + 1; j < part.arcs.size(); ++j) {
			const auto& x = part.arcs[i];
			const auto& y = part.arcs[j];
			const double d = std::abs(centered_mod1(x.center - y.center));
			ASSERT_GT(d, x.half_width + y.half_width);
		}

	double measure = 0;
	for (u64 q = 1; q <= static_cast<u64>(part.Q); ++q)
		measure += static_cast<double>(euler_phi(q)) * 2.0 * part.Q / (static_cast<double>(q) * N);
	EXPECT_NEAR(part.major_measure, measure, 1e-9);
	EXPECT_NEAR(part.minor_measure, 1.0 - measure, 1e-9);

	const auto tiny = arc_partition(N, 1e-9);
	ASSERT_EQ(tiny.arcs.size(), 1u);
	EXPECT_EQ(tiny.arcs[0].q, 1u);
	EXPECT_EQ(tiny.arcs[0].center, 1.0);
	EXPECT_TRUE(tiny.locate(0.0).has_value());
	EXPECT_TRUE(tiny.locate(1.0 - 0.5 / N).has_value());
	EXPECT_FALSE(tiny.locate(0.5).has_value());
}

TEST(Arcs, Errors)
{
	try {
		arc_partition(1000, 3.0);
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.code(), ErrorCode::QTooLarge);
	}
	EXPECT_THROW(arc_partition(1000, 0.0), Error);
}

TEST(Arcs, GridIndexAgreesWithLocate)
{
	const auto part = arc_partition(1 << 14, 1.5);
	const std::size_t M = 4 << 14;
	const auto idx = arc_index_on_grid(part, M);
	for (std::size_t k = 0; k < M; k += 5) {
		const auto hit = part.locate(static_cast<double>(k) / M);
		ASSERT_EQ(idx[k] >= 0, hit.has_value()) << k;
		if (hit) {
			ASSERT_EQ(static_cast<std::size_t>(idx[k]), *hit);
		}
	}
}

TEST(MajorModel, Examples)
{
	const std::size_t N = 4096;
	const auto c4 = build_context(4);
	EXPECT_LT(std::abs(major_arc_model(c4, 1, 1, 1, 1.0, N) - static_cast<double>(N)), 1e-9);
	EXPECT_EQ(major_arc_model(c4, 1, 3, 1, 1.0 / 3.0, N), cplx(0.0));
	const cplx half = major_arc_model(c4, 1, 1, 1, 1.0 + 0.5 / N, N);
	EXPECT_NEAR(std::abs(half), 2.0 * N / std::numbers::pi, 1e-6);
	EXPECT_LT(std::abs(half - static_cast<double>(N) * (unit_phase(0.5) - 1.0) / cplx(0, std::numbers::pi)), 1e-6);
}

TEST(MajorModel, CenterOfPrincipalArc)
{
	const auto ctx = build_context(6);
	const std::size_t N = 1 << 18;
	const auto table = sieve(isqrt(ctx.W * N + ctx.W) + 1);
	const auto nu = nu_sequence(ctx, 1, N, table);
	const auto part = arc_partition(N, 2.0);
	const auto rep = compare_major(nu, part, ctx, 1, 3);
	EXPECT_LT(rep.q1_center_rel_error, 0.1);
	EXPECT_FALSE(rep.degenerate_input);
	// q = 3 divides W, so S vanishes and the transform is small there.
	double q1 = 0.0;
	for (const auto& row : rep.per_q)
		if (row.q == 1)
			q1 = row.max_abs_nuhat_over_N;
	ASSERT_GT(q1, 0.5);
	for (const auto& row : rep.per_q)
		if (row.q == 3) {
			EXPECT_EQ(row.max_abs_model_over_N, 0.0);
			EXPECT_LT(row.max_abs_nuhat_over_N, 0.2 * q1);
		}
}

TEST(MajorModel, ZeroSequenceIsFlagged)
{
	const auto ctx = build_context(4);
	const std::size_t N = 1 << 12;
	const auto part = arc_partition(N, 1.0);
	const auto rep = compare_major(WeightedSequence::from_values(std::vector<double>(N, 0.0)), part, ctx, 1);
	EXPECT_TRUE(rep.degenerate_input);
	EXPECT_TRUE(rep.flagged_mismatch);
}

TEST(Minor, ScanExamples)
{
	const std::size_t N = 1 << 12;
	const auto part = arc_partition(N, 1.0);
	const auto zero = minor_arc_scan(dft_grid(WeightedSequence::from_values(std::vector<double>(N, 0.0)), 4), part);
	EXPECT_EQ(zero.sup, 0.0);

	const auto ctx = build_context(6);
	const std::size_t M = 1 << 18;
	const auto table = sieve(isqrt(ctx.W * M + ctx.W) + 1);
	const auto grid = dft_grid(nu_sequence(ctx, 1, M, table), 4);
	const auto big = arc_partition(M, 2.0);
	const auto rep = minor_arc_scan(grid, big);
	EXPECT_GT(rep.minor_points, 0u);
	EXPECT_LT(rep.sup_over_N, rep.major_q1_sup_over_N);
	EXPECT_FALSE(big.locate(rep.alpha).has_value());
	EXPECT_LE(rep.approx_q, static_cast<u64>(M / big.Q));
	// Dirichlet: |alpha - a/q| <= 1/(q Qbound).
	EXPECT_LE(rep.approx_distance, 1.0 / (static_cast<double>(rep.approx_q) * std::floor(M / big.Q)) + 1e-12);
}

TEST(Minor, BestRationalMatchesBruteForce)
{
	// Convergents are best approximations: q |x - a/q| <= ||q' x|| for all q' <= bound,
	// and Dirichlet's bound |x - a/q| < 1/(q (bound + 1)) holds.
	for (u64 den : {97u, 360u, 1024u})
		for (u64 num = 1; num < den; num += 7)
			for (u64 bound : {1u, 5u, 20u}) {
				auto [a, q] = best_rational(num, den, bound);
				ASSERT_LE(q, bound);
				const long long n = static_cast<long long>(num), d = static_cast<long long>(den);
				const long long got = std::llabs(n * static_cast<long long>(q) - static_cast<long long>(a) * d);
				for (u64 qq = 1; qq <= bound; ++qq) {
					const long long r = (n * static_cast<long long>(qq)) % d;
					ASSERT_LE(got, std::min(r, d - r)) << num << "/" << den << " bound " << bound;
				}
				ASSERT_LT(static_cast<double>(got) / d / q, 1.0 / (q * (bound + 1.0)) + 1e-12);
			}
}

TEST(Pseudo, IndicatorIsExact)
{
	for (std::size_t N : {1000u, 4096u}) {
		const auto r = pseudorandom_sup(indicator(N), 4);
		EXPECT_LT(r.sup, 1e-9 * N);
	}
	for (std::size_t k = 0; k < 50; ++k)
		EXPECT_LT(std::abs(interval_transform(100, k, 50) - oracle::dft(std::vector<double>(100, 1.0), k / 50.0)),
		          1e-9);
}

TEST(Pseudo, DecreasesWithW)
{
	const std::size_t N = 1 << 16;
	double prev = 1e9;
	for (int w : {4, 6, 8}) {
		const auto ctx = build_context(w);
		const auto table = sieve(isqrt(ctx.W * N + ctx.W) + 1);
		const double s = pseudorandom_sup(nu_sequence(ctx, ctx.Z.front(), N, table), 4).sup_over_N;
		EXPECT_LE(s, 1.1 * prev) << w;
		prev = s;
	}
}
