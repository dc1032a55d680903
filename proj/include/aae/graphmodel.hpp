#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aae
{
	/// Summary statistics of a property graph. No adjacency is materialized.
	struct GraphStats
	{
		std::uint64_t num_nodes = 0;
		std::uint64_t num_edges = 0;
		std::uint64_t data_size = 0; ///< bytes, 64 * (nodes + edges)
		std::uint32_t num_node_types = 1;
		std::uint32_t num_edge_types = 1;
		std::uint32_t num_property_types = 1;
		/// Distinct-value count per property id; index == property id.
		std::vector<std::uint64_t> property_cardinalities;

		bool operator==(const GraphStats&) const = default;
	};

	/// Throws ValidationError if counts or cardinalities are inconsistent.
	void validate(const GraphStats& g);

	inline constexpr std::uint64_t kBytesPerElement = 64;

	inline std::uint64_t model_data_size(std::uint64_t nodes, std::uint64_t edges)
	{
		return kBytesPerElement * (nodes + edges);
	}

	// The basic graph operations, grouped by category. Serialized as 0..18 in
	// declaration order; the order is part of the feature layout.
	enum class OperationKind : std::uint8_t
	{
		addVertex,
		addEdge,
		addProperty,
		getCount,
		getProperty,
		findProperty,
		find,
		setProperty,
		removeVertex,
		removeEdge,
		removeProperty,
		in,
		out,
		all,
		TFilter,
		allinPathBFS,
		allinPathBFSLabeled,
		shortPath,
		shortPathLabeled,
	};

	inline constexpr std::size_t kNumOperationKinds = 19;

	enum class OperationCategory : std::uint8_t
	{
		Create,
		Read,
		Update,
		Delete,
		Traverse,
	};

	inline constexpr std::size_t kNumCategories = 5;

	constexpr OperationCategory category_of(OperationKind k)
	{
		const auto i = static_cast<std::size_t>(k);
		if (i < 3)
			return OperationCategory::Create;
		if (i < 7)
			return OperationCategory::Read;
		if (i < 8)
			return OperationCategory::Update;
		if (i < 11)
			return OperationCategory::Delete;
		return OperationCategory::Traverse;
	}

	/// Kinds whose cost depends on which property they touch.
	constexpr bool targets_property(OperationKind k)
	{
		switch (k)
		{
		case OperationKind::addProperty:
		case OperationKind::getProperty:
		case OperationKind::findProperty:
		case OperationKind::find:
		case OperationKind::setProperty:
		case OperationKind::removeProperty:
			return true;
		default:
			return false;
		}
	}

	std::string_view to_string(OperationKind k);
	std::string_view to_string(OperationCategory c);

	constexpr OperationKind operation_kind(std::size_t index) { return static_cast<OperationKind>(index); }

	using OpRates = std::array<double, kNumOperationKinds>;
	using CategoryMix = std::array<double, kNumCategories>;

	struct WorkloadProfile
	{
		OpRates op_rates{};
		std::vector<double> property_freq;
		std::uint64_t total_queries = 1;

		bool operator==(const WorkloadProfile&) const = default;
	};

	void validate(const WorkloadProfile& w);
	void validate(const WorkloadProfile& w, const GraphStats& g);

	CategoryMix category_sums(const OpRates& rates);

	enum class GraphProfile
	{
		freebase_small,
		freebase_middle,
		ldbc,
		random,
	};

	/// Throws ConfigError on an unknown name.
	GraphProfile parse_graph_profile(std::string_view name);
	std::string_view to_string(GraphProfile p);

	/// Named profiles reproduce the published dataset counts exactly; the seed
	/// only drives property cardinalities. `random` draws every count.
	GraphStats generate_graph_stats(GraphProfile profile, std::uint64_t seed);
	GraphStats generate_graph_stats(std::string_view profile_name, std::uint64_t seed);

	inline constexpr double kZipfExponent = 1.1;

	/// Spreads each category's mass over its kinds with a seeded Dirichlet(1)
	/// draw; property access follows a Zipf shape over a seeded property order.
	WorkloadProfile generate_workload(const GraphStats& g, const CategoryMix& mix, std::uint64_t seed,
									  std::uint64_t total_queries = 1000);
} // namespace aae
