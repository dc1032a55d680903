#include "aae/corpus.hpp"

#include "aae/error.hpp"
#include "aae/rng.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

namespace aae
{
	namespace
	{
		constexpr std::string_view kCorpusFormat = "aae-corpus";
		constexpr int kCorpusVersion = 1;

		template <typename T>
		T get(const Json& j, const char* key)
		{
			if (!j.is_object() || !j.contains(key))
				throw ValidationError(std::string("missing field '") + key + "'");
			return j.at(key).get<T>();
		}
	} // namespace

	double round_feature(double v)
	{
		char buf[32];
		std::snprintf(buf, sizeof buf, "%.9g", v);
		return std::strtod(buf, nullptr);
	}

	Json to_json(const GraphStats& g)
	{
		Json cards = Json::array();
		for (std::size_t p = 0; p < g.property_cardinalities.size(); ++p)
			cards.push_back(Json::array({p, g.property_cardinalities[p]}));
		return Json{{"num_nodes", g.num_nodes},
					{"num_edges", g.num_edges},
					{"data_size", g.data_size},
					{"num_node_types", g.num_node_types},
					{"num_edge_types", g.num_edge_types},
					{"num_property_types", g.num_property_types},
					{"property_cardinalities", cards}};
	}

	Json to_json(const WorkloadProfile& w)
	{
		return Json{{"op_rates", w.op_rates}, {"property_freq", w.property_freq}, {"total_queries", w.total_queries}};
	}

	Json to_json(const StorageConfig& s)
	{
		Json bits = Json::array();
		for (bool b : s.index_bits)
			bits.push_back(b ? 1 : 0);
		return Json{{"engine", to_string(s.engine)}, {"index_bits", bits}};
	}

	Json to_json(const CostParams& p)
	{
		return Json{{"base_cost", {{"native-graph", p.base_cost[0]}, {"columnar", p.base_cost[1]}}},
					{"index_speedup", p.index_speedup},
					{"traversal_native_discount", p.traversal_native_discount},
					{"size_exponent", p.size_exponent},
					{"index_maintenance_penalty", kIndexMaintenancePenalty}};
	}

	Json to_json(const Provenance& p)
	{
		return Json{{"instance_id", p.instance_id},
					{"stats_id", p.stats_id},
					{"workload_id", p.workload_id},
					{"s_old_id", p.s_old_id},
					{"s_new_id", p.s_new_id}};
	}

	GraphStats graph_stats_from_json(const Json& j)
	{
		GraphStats g;
		g.num_nodes = get<std::uint64_t>(j, "num_nodes");
		g.num_edges = get<std::uint64_t>(j, "num_edges");
		g.data_size = get<std::uint64_t>(j, "data_size");
		g.num_node_types = get<std::uint32_t>(j, "num_node_types");
		g.num_edge_types = get<std::uint32_t>(j, "num_edge_types");
		g.num_property_types = get<std::uint32_t>(j, "num_property_types");
		const auto& cards = j.at("property_cardinalities");
		for (std::size_t p = 0; p < cards.size(); ++p)
		{
			if (cards[p].at(0).get<std::size_t>() != p)
				throw ValidationError("property ids must be 0..n-1 in order");
			g.property_cardinalities.push_back(cards[p].at(1).get<std::uint64_t>());
		}
		validate(g);
		return g;
	}

	WorkloadProfile workload_from_json(const Json& j)
	{
		WorkloadProfile w;
		w.op_rates = get<OpRates>(j, "op_rates");
		w.property_freq = get<std::vector<double>>(j, "property_freq");
		w.total_queries = get<std::uint64_t>(j, "total_queries");
		validate(w);
		return w;
	}

	StorageConfig storage_from_json(const Json& j)
	{
		StorageConfig s;
		s.engine = parse_engine(get<std::string>(j, "engine"));
		for (int b : get<std::vector<int>>(j, "index_bits"))
			s.index_bits.push_back(b != 0);
		return s;
	}

	CostParams cost_params_from_json(const Json& j)
	{
		CostParams p;
		const auto& base = j.at("base_cost");
		p.base_cost[0] = base.at("native-graph").get<std::array<double, kNumOperationKinds>>();
		p.base_cost[1] = base.at("columnar").get<std::array<double, kNumOperationKinds>>();
		p.index_speedup = get<double>(j, "index_speedup");
		p.traversal_native_discount = get<double>(j, "traversal_native_discount");
		p.size_exponent = get<double>(j, "size_exponent");
		validate(p);
		return p;
	}

	Provenance provenance_from_json(const Json& j)
	{
		return {get<std::string>(j, "instance_id"), get<std::string>(j, "stats_id"), get<std::string>(j, "workload_id"),
				get<std::string>(j, "s_old_id"), get<std::string>(j, "s_new_id")};
	}

	std::vector<EvaluationInstance> Corpus::instances() const
	{
		std::vector<EvaluationInstance> out;
		out.reserve(records.size());
		for (const auto& r : records)
			out.push_back(r.instance);
		return out;
	}

	std::size_t default_max_len(GraphProfile profile)
	{
		return profile == GraphProfile::ldbc ? kLdbcMaxLen : kDefaultMaxLen;
	}

	std::string trace_key(const Provenance& p) { return p.stats_id + "/" + p.workload_id; }

	Corpus generate_corpus(const CorpusOptions& options)
	{
		if (options.count < 1)
			throw ValidationError("corpus count must be >= 1");
		validate(options.cost_params);
		const GraphProfile profile = parse_graph_profile(options.profile);
		const std::size_t max_len = options.max_len ? options.max_len : default_max_len(profile);

		Corpus corpus;
		corpus.header.profile = std::string(to_string(profile));
		corpus.header.seed = options.seed;
		corpus.header.count = options.count;
		corpus.header.max_len = max_len;
		corpus.header.cost_params = options.cost_params;

		// Named profiles describe one dataset, so every instance shares it.
		const std::uint64_t dataset_seed = derive_seed(options.seed, 0);
		const GraphStats shared_stats = generate_graph_stats(profile, dataset_seed);

		std::size_t positives = 0;
		std::size_t negatives = 0;
		const std::size_t half = (options.count + 1) / 2;
		for (std::uint64_t draw = 0; corpus.records.size() < options.count; ++draw)
		{
			const std::uint64_t instance_seed = derive_seed(options.seed, draw + 1);
			Rng rng(instance_seed);

			InstanceInputs in;
			std::uint64_t stats_seed = dataset_seed;
			if (profile == GraphProfile::random)
			{
				stats_seed = derive_seed(instance_seed, 1);
				in.stats = generate_graph_stats(profile, stats_seed);
			}
			else
			{
				in.stats = shared_stats;
			}

			CategoryMix mix{};
			double mix_total = 0.0;
			for (auto& m : mix)
			{
				m = rng.exponential();
				mix_total += m;
			}
			for (auto& m : mix)
				m /= mix_total;
			const auto total_queries = static_cast<std::uint64_t>(rng.uniform_int(100, 10000));
			in.workload = generate_workload(in.stats, mix, derive_seed(instance_seed, 2), total_queries);

			const std::size_t np = in.stats.num_property_types;
			in.s_old.engine = rng.bernoulli(0.5) ? Engine::columnar : Engine::native_graph;
			in.s_old.index_bits.resize(np);
			for (std::size_t p = 0; p < np; ++p)
				in.s_old.index_bits[p] = rng.bernoulli(0.5);

			in.s_new = in.s_old;
			if (rng.bernoulli(0.5))
				in.s_new.engine = in.s_new.engine == Engine::native_graph ? Engine::columnar : Engine::native_graph;
			for (std::size_t p = 0; p < np; ++p)
				if (rng.bernoulli(0.5))
					in.s_new.index_bits[p] = !in.s_new.index_bits[p];
			if (in.s_new == in.s_old)
			{
				const auto p = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(np) - 1));
				in.s_new.index_bits[p] = !in.s_new.index_bits[p];
			}

			const bool y = label(in.stats, in.workload, in.s_old, in.s_new, options.cost_params);
			if (options.rebalance && (y ? positives : negatives) >= half)
				continue;
			(y ? positives : negatives) += 1;

			CorpusRecord rec;
			rec.instance = assemble(in.stats, in.workload, in.s_old, in.s_new, max_len);
			rec.instance.vector = rec.instance.vector.unaryExpr([](double v) { return round_feature(v); });
			rec.instance.label = y;
			auto& prov = rec.instance.provenance;
			prov.instance_id = corpus.header.profile + "-" + std::to_string(options.seed) + "-" + std::to_string(draw);
			prov.stats_id = corpus.header.profile + "-" + std::to_string(stats_seed);
			prov.workload_id = "w" + std::to_string(instance_seed);
			rec.inputs = std::move(in);
			corpus.records.push_back(std::move(rec));
		}
		return corpus;
	}

	void relabel_from_trace(Corpus& corpus, const TraceTable& trace)
	{
		for (auto& rec : corpus.records)
		{
			const auto& p = rec.instance.provenance;
			rec.instance.label = label_from_trace(trace, trace_key(p), p.s_old_id, p.s_new_id);
		}
		corpus.header.label_source = "trace";
	}

	void write_corpus(std::ostream& out, const Corpus& corpus)
	{
		const auto& h = corpus.header;
		Json header{{"format", kCorpusFormat},
					{"version", kCorpusVersion},
					{"profile", h.profile},
					{"seed", h.seed},
					{"count", corpus.records.size()},
					{"max_len", h.max_len},
					{"label_source", h.label_source},
					{"cost_params", to_json(h.cost_params)}};
		out << header.dump() << '\n';

		for (const auto& rec : corpus.records)
		{
			const auto& inst = rec.instance;
			Json vec = Json::array();
			for (Eigen::Index i = 0; i < inst.vector.size(); ++i)
				vec.push_back(round_feature(inst.vector[i]));
			Json j{{"vector", std::move(vec)},
				   {"mask", inst.mask},
				   {"label", inst.label ? Json(*inst.label ? 1 : 0) : Json(nullptr)},
				   {"provenance", to_json(inst.provenance)}};
			if (rec.inputs)
				j["inputs"] = Json{{"stats", to_json(rec.inputs->stats)},
								   {"workload", to_json(rec.inputs->workload)},
								   {"s_old", to_json(rec.inputs->s_old)},
								   {"s_new", to_json(rec.inputs->s_new)}};
			out << j.dump() << '\n';
		}
	}

	void write_corpus(const std::filesystem::path& path, const Corpus& corpus)
	{
		std::ofstream out(path, std::ios::binary | std::ios::trunc);
		if (!out)
			throw IoError("cannot write corpus " + path.string());
		write_corpus(out, corpus);
		if (!out)
			throw IoError("failed writing corpus " + path.string());
	}

	Corpus read_corpus(std::istream& in)
	{
		Corpus corpus;
		std::string line;
		std::size_t line_no = 0;
		bool have_header = false;
		while (std::getline(in, line))
		{
			++line_no;
			if (line.empty() || line == "\r")
				continue;
			try
			{
				const Json j = Json::parse(line);
				if (!have_header)
				{
					if (get<std::string>(j, "format") != kCorpusFormat)
						throw ValidationError("not an aae corpus");
					if (get<int>(j, "version") != kCorpusVersion)
						throw ValidationError("unsupported corpus version");
					auto& h = corpus.header;
					h.profile = get<std::string>(j, "profile");
					h.seed = get<std::uint64_t>(j, "seed");
					h.count = get<std::size_t>(j, "count");
					h.max_len = get<std::size_t>(j, "max_len");
					h.label_source = get<std::string>(j, "label_source");
					h.cost_params = cost_params_from_json(j.at("cost_params"));
					have_header = true;
					continue;
				}

				CorpusRecord rec;
				auto& inst = rec.instance;
				const auto vec = get<std::vector<double>>(j, "vector");
				inst.mask = get<std::vector<std::uint8_t>>(j, "mask");
				if (vec.size() != corpus.header.max_len || inst.mask.size() != vec.size())
					throw ValidationError("vector/mask length differs from max_len " + std::to_string(corpus.header.max_len));
				inst.vector = Eigen::Map<const Eigen::VectorXd>(vec.data(), static_cast<Eigen::Index>(vec.size()));
				for (std::size_t i = 0; i < vec.size(); ++i)
				{
					if (inst.mask[i] > 1)
						throw ValidationError("mask entries must be 0 or 1");
					if (!inst.mask[i] && vec[i] != kPadValue)
						throw ValidationError("padded position " + std::to_string(i) + " is not -1");
				}
				const auto& lbl = j.at("label");
				if (!lbl.is_null())
					inst.label = lbl.get<int>() != 0;
				inst.provenance = provenance_from_json(j.at("provenance"));
				if (j.contains("inputs"))
				{
					const auto& ij = j.at("inputs");
					rec.inputs = InstanceInputs{graph_stats_from_json(ij.at("stats")), workload_from_json(ij.at("workload")),
												storage_from_json(ij.at("s_old")), storage_from_json(ij.at("s_new"))};
				}
				corpus.records.push_back(std::move(rec));
			}
			catch (const Json::exception& e)
			{
				throw ParseError(e.what(), line_no);
			}
			catch (const ValidationError& e)
			{
				throw ParseError(e.what(), line_no);
			}
		}
		if (!have_header)
			throw ParseError("corpus has no header", line_no == 0 ? 1 : line_no);
		if (corpus.records.size() != corpus.header.count)
			throw ParseError("header declares " + std::to_string(corpus.header.count) + " records, found "
								 + std::to_string(corpus.records.size()),
							 line_no);
		return corpus;
	}

	Corpus read_corpus(const std::filesystem::path& path)
	{
		std::ifstream in(path, std::ios::binary);
		if (!in)
			throw IoError("cannot open corpus " + path.string());
		return read_corpus(in);
	}
} // namespace aae
