#include "aae/graphmodel.hpp"

#include "aae/error.hpp"
#include "aae/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aae
{
	namespace
	{
		constexpr std::array<std::string_view, kNumOperationKinds> kKindNames = {
			"addVertex", "addEdge", "addProperty", "getCount", "getProperty", "findProperty", "find",
			"setProperty", "removeVertex", "removeEdge", "removeProperty", "in", "out", "all",
			"TFilter", "allinPathBFS", "allinPathBFSLabeled", "shortPath", "shortPathLabeled"};

		constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
			"Create", "Read", "Update", "Delete", "Traverse"};

		struct DatasetCounts
		{
			std::uint64_t nodes, edges;
			std::uint32_t node_types, edge_types, property_types;
		};

		constexpr DatasetCounts kFreebaseSmall{480577, 314753, 1, 1814, 3};
		constexpr DatasetCounts kFreebaseMiddle{4264156, 3147537, 1, 2912, 3};
		constexpr DatasetCounts kLdbc{184328, 767894, 8, 15, 62};

		constexpr std::uint64_t kMinCardinality = 2;
		constexpr std::uint64_t kMaxCardinality = 10000;

		GraphStats from_counts(const DatasetCounts& c, Rng& rng)
		{
			GraphStats g;
			g.num_nodes = c.nodes;
			g.num_edges = c.edges;
			g.data_size = model_data_size(c.nodes, c.edges);
			g.num_node_types = c.node_types;
			g.num_edge_types = c.edge_types;
			g.num_property_types = c.property_types;
			g.property_cardinalities.resize(c.property_types);
			for (auto& card : g.property_cardinalities)
				card = static_cast<std::uint64_t>(rng.uniform_int(kMinCardinality, kMaxCardinality));
			return g;
		}
	} // namespace

	std::string_view to_string(OperationKind k) { return kKindNames[static_cast<std::size_t>(k)]; }
	std::string_view to_string(OperationCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

	void validate(const GraphStats& g)
	{
		if (g.num_node_types < 1 || g.num_edge_types < 1 || g.num_property_types < 1)
			throw ValidationError("graph stats: type counts must be >= 1");
		if (g.property_cardinalities.size() != g.num_property_types)
			throw ValidationError("graph stats: property_cardinalities has " + std::to_string(g.property_cardinalities.size())
								  + " entries, expected " + std::to_string(g.num_property_types));
		for (auto c : g.property_cardinalities)
			if (c < 1)
				throw ValidationError("graph stats: property cardinality must be >= 1");
	}

	void validate(const WorkloadProfile& w)
	{
		double sum = 0.0;
		for (double r : w.op_rates)
		{
			if (!(r >= 0.0 && r <= 1.0))
				throw ValidationError("workload: op rate outside [0,1]");
			sum += r;
		}
		if (std::abs(sum - 1.0) > 1e-9)
			throw ValidationError("workload: op rates sum to " + std::to_string(sum) + ", expected 1");
		for (double f : w.property_freq)
			if (!(f >= 0.0 && f <= 1.0))
				throw ValidationError("workload: property frequency outside [0,1]");
		if (w.total_queries < 1)
			throw ValidationError("workload: total_queries must be >= 1");
	}

	void validate(const WorkloadProfile& w, const GraphStats& g)
	{
		validate(w);
		if (w.property_freq.size() != g.num_property_types)
			throw ValidationError("workload: property_freq length does not match graph property count");
	}

	CategoryMix category_sums(const OpRates& rates)
	{
		CategoryMix sums{};
		for (std::size_t i = 0; i < kNumOperationKinds; ++i)
			sums[static_cast<std::size_t>(category_of(operation_kind(i)))] += rates[i];
		return sums;
	}

	GraphProfile parse_graph_profile(std::string_view name)
	{
		if (name == "freebase-small")
			return GraphProfile::freebase_small;
		if (name == "freebase-middle")
			return GraphProfile::freebase_middle;
		if (name == "ldbc")
			return GraphProfile::ldbc;
		if (name == "random")
			return GraphProfile::random;
		throw ConfigError("unknown graph profile '" + std::string(name) + "'");
	}

	std::string_view to_string(GraphProfile p)
	{
		switch (p)
		{
		case GraphProfile::freebase_small: return "freebase-small";
		case GraphProfile::freebase_middle: return "freebase-middle";
		case GraphProfile::ldbc: return "ldbc";
		case GraphProfile::random: return "random";
		}
		return "?";
	}

	GraphStats generate_graph_stats(GraphProfile profile, std::uint64_t seed)
	{
		Rng rng(seed);
		switch (profile)
		{
		case GraphProfile::freebase_small: return from_counts(kFreebaseSmall, rng);
		case GraphProfile::freebase_middle: return from_counts(kFreebaseMiddle, rng);
		case GraphProfile::ldbc: return from_counts(kLdbc, rng);
		case GraphProfile::random: break;
		}

		// log-uniform node count in [1e3, 1e7]
		const auto nodes = static_cast<std::uint64_t>(std::llround(std::pow(10.0, rng.uniform(3.0, 7.0))));
		const auto edges = static_cast<std::uint64_t>(std::llround(static_cast<double>(nodes) * rng.uniform(0.5, 5.0)));
		DatasetCounts c{nodes,
						edges,
						static_cast<std::uint32_t>(rng.uniform_int(1, 16)),
						static_cast<std::uint32_t>(rng.uniform_int(1, 64)),
						static_cast<std::uint32_t>(rng.uniform_int(1, 16))};
		return from_counts(c, rng);
	}

	GraphStats generate_graph_stats(std::string_view profile_name, std::uint64_t seed)
	{
		return generate_graph_stats(parse_graph_profile(profile_name), seed);
	}

	WorkloadProfile generate_workload(const GraphStats& g, const CategoryMix& mix, std::uint64_t seed,
									  std::uint64_t total_queries)
	{
		validate(g);
		double total = 0.0;
		for (double m : mix)
		{
			if (!(m >= 0.0))
				throw ValidationError("workload mix entries must be >= 0");
			total += m;
		}
		if (std::abs(total - 1.0) > 1e-9)
			throw ValidationError("workload mix sums to " + std::to_string(total) + ", expected 1");
		if (total_queries < 1)
			throw ValidationError("workload: total_queries must be >= 1");

		Rng rng(seed);
		WorkloadProfile w;
		w.total_queries = total_queries;

		std::size_t first = 0;
		for (std::size_t c = 0; c < kNumCategories; ++c)
		{
			std::size_t last = first;
			while (last < kNumOperationKinds && static_cast<std::size_t>(category_of(operation_kind(last))) == c)
				++last;
			std::array<double, kNumOperationKinds> draws{};
			double draw_sum = 0.0;
			for (std::size_t i = first; i < last; ++i)
			{
				draws[i] = rng.exponential();
				draw_sum += draws[i];
			}
			for (std::size_t i = first; i < last; ++i)
				w.op_rates[i] = draw_sum > 0.0 ? mix[c] * draws[i] / draw_sum : mix[c] / static_cast<double>(last - first);
			first = last;
		}

		const std::size_t np = g.num_property_types;
		std::vector<std::size_t> rank(np);
		std::iota(rank.begin(), rank.end(), std::size_t{0});
		rng.shuffle(std::span<std::size_t>(rank));

		w.property_freq.resize(np);
		double zipf_total = 0.0;
		for (std::size_t p = 0; p < np; ++p)
		{
			w.property_freq[p] = 1.0 / std::pow(static_cast<double>(rank[p] + 1), kZipfExponent);
			zipf_total += w.property_freq[p];
		}
		for (auto& f : w.property_freq)
			f /= zipf_total;
		return w;
	}
} // namespace aae
