#include "aae/oracle.hpp"

#include "aae/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aae
{
	CostParams CostParams::defaults()
	{
		CostParams p;
		for (std::size_t e = 0; e < kNumEngines; ++e)
		{
			for (std::size_t k = 0; k < kNumOperationKinds; ++k)
			{
				switch (category_of(operation_kind(k)))
				{
				case OperationCategory::Create: p.base_cost[e][k] = 2.0; break;
				case OperationCategory::Traverse: p.base_cost[e][k] = 5.0; break;
				default: p.base_cost[e][k] = 1.0; break;
				}
			}
		}
		return p;
	}

	void validate(const CostParams& p)
	{
		for (const auto& row : p.base_cost)
			for (double c : row)
				if (!(c > 0.0) || !std::isfinite(c))
					throw ValidationError("cost params: base costs must be positive and finite");
		if (!(p.index_speedup > 0.0 && p.index_speedup <= 1.0))
			throw ValidationError("cost params: index_speedup must lie in (0,1]");
		if (!(p.traversal_native_discount > 0.0 && p.traversal_native_discount <= 1.0))
			throw ValidationError("cost params: traversal_native_discount must lie in (0,1]");
		if (!(p.size_exponent >= 0.0) || !std::isfinite(p.size_exponent))
			throw ValidationError("cost params: size_exponent must be >= 0");
	}

	double size_factor(const GraphStats& g, const CostParams& params)
	{
		const double elements = static_cast<double>(g.num_nodes) + static_cast<double>(g.num_edges);
		return std::pow(1.0 + std::log10(1.0 + elements), params.size_exponent);
	}

	double index_factor(const StorageConfig& s, std::span<const double> prop_freq, const CostParams& params)
	{
		double weighted = 0.0;
		double weight = 0.0;
		for (std::size_t p = 0; p < s.index_bits.size(); ++p)
		{
			const double f = s.index_bits[p] ? params.index_speedup : 1.0;
			weighted += prop_freq[p] * f;
			weight += prop_freq[p];
		}
		if (weight > 0.0)
			return weighted / weight;

		if (s.index_bits.empty())
			return 1.0;
		double sum = 0.0;
		for (bool b : s.index_bits)
			sum += b ? params.index_speedup : 1.0;
		return sum / static_cast<double>(s.index_bits.size());
	}

	double op_cost(OperationKind kind, const GraphStats& g, const StorageConfig& s, std::span<const double> prop_freq,
				   const CostParams& params)
	{
		double cost = params.base(s.engine, kind) * size_factor(g, params);
		const auto category = category_of(kind);
		if (category == OperationCategory::Create)
			cost *= 1.0 + kIndexMaintenancePenalty * static_cast<double>(s.num_indexes());
		else if (targets_property(kind))
			cost *= index_factor(s, prop_freq, params);
		if (category == OperationCategory::Traverse && s.engine == Engine::native_graph)
			cost *= params.traversal_native_discount;
		return cost;
	}

	double workload_cost(const GraphStats& g, const WorkloadProfile& w, const StorageConfig& s, const CostParams& params)
	{
		const auto n = static_cast<double>(w.total_queries);
		double total = 0.0;
		for (std::size_t k = 0; k < kNumOperationKinds; ++k)
			total += w.op_rates[k] * op_cost(operation_kind(k), g, s, w.property_freq, params) * n;
		return total;
	}

	bool label(const GraphStats& g, const WorkloadProfile& w, const StorageConfig& s_old, const StorageConfig& s_new,
			   const CostParams& params)
	{
		return workload_cost(g, w, s_old, params) > workload_cost(g, w, s_new, params);
	}

	void TraceTable::insert(std::string provenance_id, std::string storage_id, double runtime_seconds)
	{
		Key key{std::move(provenance_id), std::move(storage_id)};
		if (runtimes_.contains(key))
			throw ValidationError("trace: duplicate entry for (" + key.first + ", " + key.second + ")");
		runtimes_.emplace(std::move(key), runtime_seconds);
	}

	bool TraceTable::contains(const std::string& provenance_id, const std::string& storage_id) const
	{
		return runtimes_.contains(Key{provenance_id, storage_id});
	}

	double TraceTable::runtime(const std::string& provenance_id, const std::string& storage_id) const
	{
		auto it = runtimes_.find(Key{provenance_id, storage_id});
		if (it == runtimes_.end())
			throw ValidationError("trace: no runtime for (" + provenance_id + ", " + storage_id + ")");
		return it->second;
	}

	namespace
	{
		std::string_view trim(std::string_view s)
		{
			while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
				s.remove_prefix(1);
			while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
				s.remove_suffix(1);
			return s;
		}
	} // namespace

	TraceTable parse_trace(std::istream& in)
	{
		TraceTable table;
		std::string line;
		std::size_t line_no = 0;
		while (std::getline(in, line))
		{
			++line_no;
			const auto text = trim(line);
			if (text.empty())
				continue;
			if (line_no == 1 && text == "provenance_id,storage_id,runtime_seconds")
				continue;

			const auto c1 = text.find(',');
			const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
			if (c2 == std::string_view::npos || text.find(',', c2 + 1) != std::string_view::npos)
				throw ParseError("expected 3 comma-separated fields", line_no);

			const auto prov = trim(text.substr(0, c1));
			const auto storage = trim(text.substr(c1 + 1, c2 - c1 - 1));
			const auto rt_text = trim(text.substr(c2 + 1));
			if (prov.empty() || storage.empty())
				throw ParseError("empty identifier", line_no);

			double runtime = 0.0;
			const auto [ptr, ec] = std::from_chars(rt_text.data(), rt_text.data() + rt_text.size(), runtime);
			if (ec != std::errc{} || ptr != rt_text.data() + rt_text.size() || !std::isfinite(runtime) || runtime < 0.0)
				throw ParseError("invalid runtime '" + std::string(rt_text) + "'", line_no);

			table.insert(std::string(prov), std::string(storage), runtime);
		}
		return table;
	}

	TraceTable ingest_trace(const std::filesystem::path& path)
	{
		std::ifstream in(path);
		if (!in)
			throw IoError("cannot open trace file " + path.string());
		return parse_trace(in);
	}

	bool label_from_trace(const TraceTable& trace, const std::string& provenance_id, const std::string& s_old_id,
						  const std::string& s_new_id)
	{
		return trace.runtime(provenance_id, s_old_id) > trace.runtime(provenance_id, s_new_id);
	}
} // namespace aae
