#pragma once

#include "aae/graphmodel.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aae
{
	enum class Engine : std::uint8_t
	{
		native_graph,
		columnar,
	};

	std::string_view to_string(Engine e);
	Engine parse_engine(std::string_view name);

	struct StorageConfig
	{
		Engine engine = Engine::native_graph;
		std::vector<bool> index_bits; ///< one bit per property id

		std::size_t num_indexes() const;
		bool operator==(const StorageConfig&) const = default;
	};

	/// Stable identifier, e.g. "columnar:0101".
	std::string storage_id(const StorageConfig& s);

	void validate(const StorageConfig& s, const GraphStats& g);

	inline constexpr double kPadValue = -1.0;
	inline constexpr std::size_t kDefaultMaxLen = 256;
	inline constexpr std::size_t kLdbcMaxLen = 320;

	struct Provenance
	{
		std::string instance_id;
		std::string stats_id;
		std::string workload_id;
		std::string s_old_id;
		std::string s_new_id;

		bool operator==(const Provenance&) const = default;
	};

	struct EvaluationInstance
	{
		Eigen::VectorXd vector;
		std::vector<std::uint8_t> mask;
		std::optional<bool> label;
		Provenance provenance;

		std::size_t max_len() const { return static_cast<std::size_t>(vector.size()); }
		std::size_t unpadded_length() const;
	};

	// Block widths of the layout [dataset | workload | s_old | s_new].
	inline std::size_t dataset_block_size(std::size_t num_properties) { return 6 + num_properties; }
	inline std::size_t workload_block_size(std::size_t num_properties) { return kNumOperationKinds + num_properties; }
	inline std::size_t storage_block_size(std::size_t num_properties) { return 2 + num_properties; }
	inline std::size_t unpadded_length(std::size_t num_properties)
	{
		return dataset_block_size(num_properties) + workload_block_size(num_properties)
			+ 2 * storage_block_size(num_properties);
	}

	/// [log1p(data_size), log1p(nodes), log1p(edges), node types, edge types,
	///  property types, log1p(cardinality_0), ...]
	Eigen::VectorXd extract_dataset_features(const GraphStats& g);

	/// The 19 op rates in kind order, then property frequencies by property id.
	Eigen::VectorXd extract_workload_features(const WorkloadProfile& w);

	/// Engine one-hot followed by index bits as 0/1.
	Eigen::VectorXd encode_storage(const StorageConfig& s);

	/// Concatenates all blocks and right-pads with -1 up to max_len.
	/// Throws CapacityError when the blocks do not fit.
	EvaluationInstance assemble(const GraphStats& g, const WorkloadProfile& w, const StorageConfig& s_old,
								const StorageConfig& s_new, std::size_t max_len = kDefaultMaxLen);
} // namespace aae
