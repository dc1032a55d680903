#pragma once

#include "aae/features.hpp"
#include "aae/graphmodel.hpp"
#include "aae/oracle.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aae
{
	using Json = nlohmann::ordered_json;

	// Record encoders; field order is fixed and part of the file format.
	Json to_json(const GraphStats& g);
	Json to_json(const WorkloadProfile& w);
	Json to_json(const StorageConfig& s);
	Json to_json(const CostParams& p);
	Json to_json(const Provenance& p);

	GraphStats graph_stats_from_json(const Json& j);
	WorkloadProfile workload_from_json(const Json& j);
	StorageConfig storage_from_json(const Json& j);
	CostParams cost_params_from_json(const Json& j);
	Provenance provenance_from_json(const Json& j);

	/// Rounds to 9 significant digits, the precision corpus vectors are stored at.
	double round_feature(double v);

	/// The raw inputs an instance was assembled from, kept so a corpus can be
	/// relabeled (e.g. from measured runtimes).
	struct InstanceInputs
	{
		GraphStats stats;
		WorkloadProfile workload;
		StorageConfig s_old;
		StorageConfig s_new;
	};

	struct CorpusRecord
	{
		EvaluationInstance instance;
		std::optional<InstanceInputs> inputs;
	};

	struct CorpusHeader
	{
		std::string profile;
		std::uint64_t seed = 0;
		std::size_t count = 0;
		std::size_t max_len = kDefaultMaxLen;
		CostParams cost_params = CostParams::defaults();
		std::string label_source = "model"; ///< "model" or "trace"
	};

	struct Corpus
	{
		CorpusHeader header;
		std::vector<CorpusRecord> records;

		std::vector<EvaluationInstance> instances() const;
	};

	struct CorpusOptions
	{
		std::string profile = "freebase-small";
		std::uint64_t seed = 0;
		std::size_t count = 1000;
		std::size_t max_len = 0; ///< 0: 256, or 320 for the ldbc profile
		CostParams cost_params = CostParams::defaults();
		bool rebalance = false; ///< reject draws that would push a class past half
	};

	std::size_t default_max_len(GraphProfile profile);

	/// Trace key of an instance: "<stats_id>/<workload_id>".
	std::string trace_key(const Provenance& p);

	/// Draws (stats, workload, s_old, s_new) tuples and labels them with the
	/// cost model. s_new flips the engine and/or toggles index bits of s_old
	/// and always differs from it.
	Corpus generate_corpus(const CorpusOptions& options);

	/// Replaces every label with the trace comparison; throws ValidationError
	/// when a runtime is missing.
	void relabel_from_trace(Corpus& corpus, const TraceTable& trace);

	/// JSON lines: one header object, then one object per instance.
	void write_corpus(std::ostream& out, const Corpus& corpus);
	void write_corpus(const std::filesystem::path& path, const Corpus& corpus);
	Corpus read_corpus(std::istream& in);
	Corpus read_corpus(const std::filesystem::path& path);
} // namespace aae
