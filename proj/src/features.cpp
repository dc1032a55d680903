#include "aae/features.hpp"

#include "aae/error.hpp"

#include <algorithm>
#include <cmath>

namespace aae
{
	std::string_view to_string(Engine e) { return e == Engine::native_graph ? "native-graph" : "columnar"; }

	Engine parse_engine(std::string_view name)
	{
		if (name == "native-graph")
			return Engine::native_graph;
		if (name == "columnar")
			return Engine::columnar;
		throw ValidationError("unknown storage engine '" + std::string(name) + "'");
	}

	std::size_t StorageConfig::num_indexes() const
	{
		return static_cast<std::size_t>(std::count(index_bits.begin(), index_bits.end(), true));
	}

	std::string storage_id(const StorageConfig& s)
	{
		std::string id(to_string(s.engine));
		id += ':';
		for (bool b : s.index_bits)
			id += b ? '1' : '0';
		return id;
	}

	void validate(const StorageConfig& s, const GraphStats& g)
	{
		if (s.index_bits.size() != g.num_property_types)
			throw ValidationError("storage config has " + std::to_string(s.index_bits.size())
								  + " index bits, graph has " + std::to_string(g.num_property_types) + " properties");
	}

	std::size_t EvaluationInstance::unpadded_length() const
	{
		return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
	}

	Eigen::VectorXd extract_dataset_features(const GraphStats& g)
	{
		const auto np = static_cast<Eigen::Index>(g.num_property_types);
		Eigen::VectorXd v(6 + np);
		v << std::log1p(static_cast<double>(g.data_size)), std::log1p(static_cast<double>(g.num_nodes)),
			std::log1p(static_cast<double>(g.num_edges)), static_cast<double>(g.num_node_types),
			static_cast<double>(g.num_edge_types), static_cast<double>(g.num_property_types),
			Eigen::VectorXd::Zero(np);
		for (Eigen::Index p = 0; p < np; ++p)
			v[6 + p] = std::log1p(static_cast<double>(g.property_cardinalities[static_cast<std::size_t>(p)]));
		return v;
	}

	Eigen::VectorXd extract_workload_features(const WorkloadProfile& w)
	{
		const auto np = static_cast<Eigen::Index>(w.property_freq.size());
		Eigen::VectorXd v(static_cast<Eigen::Index>(kNumOperationKinds) + np);
		v.head<kNumOperationKinds>() = Eigen::Map<const Eigen::Matrix<double, kNumOperationKinds, 1>>(w.op_rates.data());
		v.tail(np) = Eigen::Map<const Eigen::VectorXd>(w.property_freq.data(), np);
		return v;
	}

	Eigen::VectorXd encode_storage(const StorageConfig& s)
	{
		const auto np = static_cast<Eigen::Index>(s.index_bits.size());
		Eigen::VectorXd v = Eigen::VectorXd::Zero(2 + np);
		v[s.engine == Engine::native_graph ? 0 : 1] = 1.0;
		for (Eigen::Index p = 0; p < np; ++p)
			v[2 + p] = s.index_bits[static_cast<std::size_t>(p)] ? 1.0 : 0.0;
		return v;
	}

	EvaluationInstance assemble(const GraphStats& g, const WorkloadProfile& w, const StorageConfig& s_old,
								const StorageConfig& s_new, std::size_t max_len)
	{
		validate(g);
		validate(w, g);
		validate(s_old, g);
		validate(s_new, g);

		const std::size_t required = unpadded_length(g.num_property_types);
		if (required > max_len)
			throw CapacityError(required, max_len);

		EvaluationInstance inst;
		inst.vector = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(max_len), kPadValue);
		inst.vector.head(static_cast<Eigen::Index>(required)) << extract_dataset_features(g),
			extract_workload_features(w), encode_storage(s_old), encode_storage(s_new);
		inst.mask.assign(max_len, 0);
		std::fill_n(inst.mask.begin(), required, std::uint8_t{1});
		inst.provenance.s_old_id = storage_id(s_old);
		inst.provenance.s_new_id = storage_id(s_new);
		return inst;
	}
} // namespace aae
