#pragma once

// JSON and CSV encodings for subset specs, contexts, sequences and reports.

#include "psq/error.hpp"
#include "psq/expsums.hpp"
#include "psq/primes.hpp"
#include "psq/representations.hpp"
#include "psq/restriction.hpp"
#include "psq/sumsets.hpp"
#include "psq/wtrick.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace psq::io {

using nlohmann::json;

inline const char* variant_name(PrimeSubsetSpec::Variant v)
{
	switch (v) {
	case PrimeSubsetSpec::Variant::All: return "All";
	case PrimeSubsetSpec::Variant::ResidueClasses: return "ResidueClasses";
	case PrimeSubsetSpec::Variant::BernoulliSample: return "BernoulliSample";
	case PrimeSubsetSpec::Variant::ExplicitList: return "ExplicitList";
	}
	return "?";
}

inline json to_json(const PrimeSubsetSpec& s)
{
	json j;
	j["variant"] = variant_name(s.variant);
	switch (s.variant) {
	case PrimeSubsetSpec::Variant::All:
		break;
	case PrimeSubsetSpec::Variant::ResidueClasses:
		j["modulus"] = s.modulus;
		j["classes"] = s.classes;
		break;
	case PrimeSubsetSpec::Variant::BernoulliSample:
		j["rho"] = s.rho;
		j["seed"] = s.seed;
		break;
	case PrimeSubsetSpec::Variant::ExplicitList:
		j["primes"] = s.primes;
		break;
	}
	j["min_prime"] = s.min_prime;
	return j;
}

inline PrimeSubsetSpec spec_from_json(const json& j)
try {
	if (!j.is_object() || !j.contains("variant"))
		fail(ErrorCode::InvalidArgument, "subset spec must be an object with a \"variant\" field");
	PrimeSubsetSpec s;
	const auto v = j.at("variant").get<std::string>();
	if (v == "All")
		s.variant = PrimeSubsetSpec::Variant::All;
	else if (v == "ResidueClasses") {
		s.variant = PrimeSubsetSpec::Variant::ResidueClasses;
		s.modulus = j.at("modulus").get<u64>();
		s.classes = j.at("classes").get<std::vector<u64>>();
	} else if (v == "BernoulliSample") {
		s.variant = PrimeSubsetSpec::Variant::BernoulliSample;
		s.rho = j.at("rho").get<double>();
		s.seed = j.value("seed", u64{0});
	} else if (v == "ExplicitList") {
		s.variant = PrimeSubsetSpec::Variant::ExplicitList;
		s.primes = j.value("primes", std::vector<u64>{});
	} else
		fail(ErrorCode::InvalidArgument, "unknown subset variant \"" + v + "\"");
	s.min_prime = j.value("min_prime", u64{5});
	s.validate();
	return s;
} catch (const json::exception& e) {
	fail(ErrorCode::InvalidArgument, std::string("malformed subset spec: ") + e.what());
}

namespace detail {
inline std::vector<std::string> split(const std::string& s, char sep)
{
	std::vector<std::string> out;
	std::stringstream ss(s);
	std::string item;
	while (std::getline(ss, item, sep))
		out.push_back(item);
	return out;
}
inline std::vector<u64> parse_list(const std::string& s)
{
	std::vector<u64> out;
	for (const auto& tok : split(s, ','))
		if (!tok.empty())
			out.push_back(std::stoull(tok));
	return out;
}
} // namespace detail

/// Accepts a JSON object, a path to a JSON file, or the inline forms
///   all | residue:<q>:<c1,c2,..|nonzero> | bernoulli:<rho>:<seed> | explicit:<p1,p2,..>
/// each optionally followed by @<min_prime>.
inline PrimeSubsetSpec parse_spec(const std::string& text)
{
	try {
		if (!text.empty() && text.front() == '{')
			return spec_from_json(json::parse(text));
		if (std::filesystem::exists(text)) {
			std::ifstream in(text);
			return spec_from_json(json::parse(in));
		}
	} catch (const json::exception& e) {
		fail(ErrorCode::InvalidArgument, std::string("subset spec is not valid JSON: ") + e.what());
	}
	std::string body = text;
	u64 min_prime = 5;
	try {
		if (auto at = body.find('@'); at != std::string::npos) {
			min_prime = std::stoull(body.substr(at + 1));
			body = body.substr(0, at);
		}
		const auto parts = detail::split(body, ':');
		if (parts.empty())
			fail(ErrorCode::InvalidArgument, "empty subset spec");
		if (parts[0] == "all" && parts.size() == 1)
			return PrimeSubsetSpec::all(min_prime);
		if (parts[0] == "residue" && parts.size() == 3) {
			const u64 q = std::stoull(parts[1]);
			if (parts[2] == "nonzero")
				return PrimeSubsetSpec::nonzero_classes(q, min_prime);
			return PrimeSubsetSpec::residue_classes(q, detail::parse_list(parts[2]), min_prime);
		}
		if (parts[0] == "bernoulli" && parts.size() == 3)
			return PrimeSubsetSpec::bernoulli(std::stod(parts[1]), std::stoull(parts[2]), min_prime);
		if (parts[0] == "explicit" && parts.size() <= 2)
			return PrimeSubsetSpec::explicit_list(parts.size() == 2 ? detail::parse_list(parts[1]) : std::vector<u64>{},
			                                      min_prime);
	} catch (const std::logic_error&) {
		fail(ErrorCode::InvalidArgument, "malformed number in subset spec \"" + text + "\"");
	}
	fail(ErrorCode::InvalidArgument, "unrecognised subset spec \"" + text + "\"");
}

inline json to_json(const WContext& ctx)
{
	json roots = json::object();
	for (std::size_t i = 0; i < ctx.Z.size(); ++i)
		roots[std::to_string(ctx.Z[i])] = ctx.roots[i];
	return {{"w", ctx.w}, {"W", ctx.W}, {"phi", ctx.phi_W}, {"H", ctx.H}, {"Z", ctx.Z}, {"roots", roots}};
}

inline json to_json(const DensityTable& dt)
{
	json entries = json::object();
	for (std::size_t i = 0; i < dt.residues.size(); ++i)
		entries[std::to_string(dt.residues[i])] = dt.delta[i];
	return {{"N", dt.N}, {"delta", entries}, {"mean", dt.mean()}};
}

inline json to_json(const ResidueSelection& s)
{
	return {{"feasible", s.feasible}, {"residues", s.residues}, {"b0", s.b0},         {"mu", s.mu},
	        {"lambda", s.lambda},     {"threshold", s.threshold}, {"eligible", s.eligible}, {"reason", s.reason}};
}

inline json to_json(const LemmaReport& r)
{
	return {{"w", r.w}, {"W", r.W}, {"z_size", r.z_size}, {"subsets_checked", r.subsets_checked},
	        {"failures", r.failures}};
}

inline json to_json(const CoverReport& r)
{
	return {{"W", r.W}, {"target_classes", r.target_classes}, {"covered", r.covered}, {"missing", r.missing}};
}

inline json to_json(const ArcPartition& p)
{
	return {{"N", p.N},
	        {"A", p.A},
	        {"Q", p.Q},
	        {"log_base", ArcPartition::log_base},
	        {"arcs", p.arcs.size()},
	        {"disjoint", p.disjoint},
	        {"major_measure", p.major_measure},
	        {"minor_measure", p.minor_measure}};
}

inline json to_json(const MajorReport& r)
{
	json rows = json::array();
	for (const auto& q : r.per_q)
		rows.push_back({{"q", q.q},
		                {"arcs", q.arcs},
		                {"max_abs_error", q.max_abs_error},
		                {"max_abs_error_over_N", q.max_abs_error_over_N},
		                {"max_abs_nuhat_over_N", q.max_abs_nuhat_over_N},
		                {"max_abs_model_over_N", q.max_abs_model_over_N}});
	return {{"N", r.N},
	        {"arcs_evaluated", r.arcs_evaluated},
	        {"max_abs_error", r.max_abs_error},
	        {"max_abs_error_over_N", r.max_abs_error_over_N},
	        {"q1_center_rel_error", r.q1_center_rel_error},
	        {"degenerate_input", r.degenerate_input},
	        {"flagged_mismatch", r.flagged_mismatch},
	        {"per_q", rows}};
}

inline json to_json(const MinorReport& r)
{
	return {{"N", r.N},
	        {"K", r.K},
	        {"minor_points", r.minor_points},
	        {"sup", r.sup},
	        {"sup_over_N", r.sup_over_N},
	        {"argmax", r.argmax},
	        {"alpha", r.alpha},
	        {"nearest_rational", {{"a", r.approx_a}, {"q", r.approx_q}, {"distance", r.approx_distance}}},
	        {"major_q1_sup_over_N", r.major_q1_sup_over_N}};
}

inline json to_json(const PseudoReport& r)
{
	return {{"N", r.N}, {"K", r.K}, {"sup", r.sup}, {"sup_over_N", r.sup_over_N}, {"argmax", r.argmax}};
}

inline json to_json(const MomentReport& r)
{
	return {{"N", r.N},
	        {"K", r.K},
	        {"q_exponent", r.q_exponent},
	        {"moment", r.moment},
	        {"normalizer", r.normalizer},
	        {"ratio", r.ratio}};
}

inline json to_json(const FourthMoment& f)
{
	return {{"grid_route", f.grid_route},
	        {"autocorrelation_route", f.autocorrelation_route},
	        {"relative_gap", f.relative_gap}};
}

inline json to_json(const DyadicProfile& p)
{
	json levels = json::array();
	for (const auto& l : p.levels)
		levels.push_back({{"k", l.k}, {"u", l.u}, {"count", l.count}, {"chebyshev_bound", l.chebyshev_bound}});
	return {{"N", p.N},
	        {"levels", levels},
	        {"slope", p.slope},
	        {"fitted_levels", p.fitted_levels},
	        {"reference_exponents", {DyadicProfile::reference_low}}};
}

inline json to_json(const ReprWitness& w)
{
	json j = {{"n", w.n}, {"primes", w.primes}};
	if (!w.residues.empty()) {
		j["residues"] = w.residues;
		j["indices"] = w.indices;
		j["m"] = w.m;
	}
	return j;
}

inline json to_json(const ExperimentReport& r)
{
	json witnesses = json::array();
	for (const auto& w : r.sample_witnesses)
		witnesses.push_back(to_json(w));
	return {{"s", r.s},
	        {"spec", to_json(r.spec)},
	        {"lambda_threshold", r.lambda_threshold},
	        {"empirical_density", r.empirical_density},
	        {"density_limit", r.density_limit},
	        {"range", {r.lo, r.hi}},
	        {"exploratory", r.exploratory},
	        {"targets_checked", r.targets_checked},
	        {"exceptions", r.exceptions},
	        {"max_exception", r.max_exception ? json(*r.max_exception) : json(nullptr)},
	        {"min_count", r.min_count},
	        {"sample_witnesses", witnesses}};
}

inline json to_json(const TransferResult& t)
{
	return {{"status", status_name(t.status)},
	        {"selection", to_json(t.selection)},
	        {"N", t.N},
	        {"m", t.m},
	        {"m_over_half_sN", t.m_over_half_sN},
	        {"witness", t.witness ? to_json(*t.witness) : json(nullptr)},
	        {"reason", t.reason}};
}

/// Writes through a temporary sibling and renames, so a failed run leaves no partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
	auto tmp = path;
	tmp += ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out)
			fail(ErrorCode::InvalidArgument, "cannot open " + tmp.string() + " for writing");
		out << content;
		out.flush();
		if (!out) {
			std::filesystem::remove(tmp);
			fail(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
		}
	}
	std::filesystem::rename(tmp, path);
}

inline std::string sequence_csv(const WeightedSequence& seq)
{
	std::ostringstream os;
	os.precision(17);
	os << "n,value\n";
	for (std::size_t n = 1; n <= seq.N; ++n)
		os << n << ',' << seq.values[n - 1] << '\n';
	return os.str();
}

inline std::string grid_csv(const FourierGrid& g)
{
	std::ostringstream os;
	os.precision(17);
	os << "k,re,im\n";
	for (std::size_t k = 0; k < g.size(); ++k)
		os << k << ',' << g.values[k].real() << ',' << g.values[k].imag() << '\n';
	return os.str();
}

} // namespace psq::io
