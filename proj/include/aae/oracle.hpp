#pragma once

#include "aae/features.hpp"
#include "aae/graphmodel.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>

namespace aae
{
	inline constexpr std::size_t kNumEngines = 2;

	/// Parameters of the closed-form workload cost model. Serialized into every
	/// corpus header so labels can be audited.
	struct CostParams
	{
		/// Model microseconds per operation, [engine][kind].
		std::array<std::array<double, kNumOperationKinds>, kNumEngines> base_cost;
		double index_speedup = 0.2;             ///< alpha, multiplier for indexed property access
		double traversal_native_discount = 0.5; ///< beta, multiplier on Traverse for native-graph
		double size_exponent = 1.0;             ///< gamma

		/// Read/Update/Delete 1.0, Create 2.0, Traverse 5.0 on both engines.
		/// The native-graph traversal advantage comes from beta.
		static CostParams defaults();

		double base(Engine e, OperationKind k) const
		{
			return base_cost[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)];
		}

		bool operator==(const CostParams&) const = default;
	};

	/// Per-index cost added to Create operations: factor 1 + 0.1 * indexes.
	inline constexpr double kIndexMaintenancePenalty = 0.1;

	void validate(const CostParams& p);

	double size_factor(const GraphStats& g, const CostParams& params);

	/// Frequency-weighted mean of (alpha if indexed else 1). Falls back to the
	/// unweighted mean when every frequency is zero.
	double index_factor(const StorageConfig& s, std::span<const double> prop_freq, const CostParams& params);

	double op_cost(OperationKind kind, const GraphStats& g, const StorageConfig& s, std::span<const double> prop_freq,
				   const CostParams& params);

	/// Sum over kinds (ascending) of rate * op_cost * total_queries.
	double workload_cost(const GraphStats& g, const WorkloadProfile& w, const StorageConfig& s, const CostParams& params);

	/// 1 iff the old storage is strictly more expensive than the new one.
	bool label(const GraphStats& g, const WorkloadProfile& w, const StorageConfig& s_old, const StorageConfig& s_new,
			   const CostParams& params);

	/// Measured runtimes keyed by (provenance id, storage id).
	class TraceTable
	{
	public:
		using Key = std::pair<std::string, std::string>;

		/// Throws ValidationError on a duplicate key.
		void insert(std::string provenance_id, std::string storage_id, double runtime_seconds);

		bool contains(const std::string& provenance_id, const std::string& storage_id) const;
		/// Throws ValidationError when the key is absent.
		double runtime(const std::string& provenance_id, const std::string& storage_id) const;

		std::size_t size() const { return runtimes_.size(); }
		bool empty() const { return runtimes_.empty(); }

	private:
		std::map<Key, double> runtimes_;
	};

	/// Reads "provenance_id,storage_id,runtime_seconds" lines. A header row with
	/// exactly those names and blank lines are skipped.
	TraceTable ingest_trace(const std::filesystem::path& path);
	TraceTable parse_trace(std::istream& in);

	/// Same rule as label(), using measured runtimes.
	bool label_from_trace(const TraceTable& trace, const std::string& provenance_id, const std::string& s_old_id,
						  const std::string& s_new_id);
} // namespace aae
