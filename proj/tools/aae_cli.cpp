#include "aae/active.hpp"
#include "aae/classifiers.hpp"
#include "aae/corpus.hpp"
#include "aae/error.hpp"
#include "aae/oracle.hpp"
#include "aae/rng.hpp"

#include "CLI11.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

using namespace aae;

namespace
{
	enum Exit : int
	{
		ok = 0,
		other = 1,
		validation = 2,
		parse = 3,
		io = 4,
	};

	struct Common
	{
		std::uint64_t seed = 0;
		std::string out;
	};

	struct TrainFlags
	{
		double lr = 0.01;
		std::size_t epochs = 50;
		std::size_t batch_size = 32;
		Eigen::Index gru_hidden = kDefaultGruHidden;
		bool no_early_stop = false;

		TrainOptions options(std::uint64_t seed) const
		{
			TrainOptions t;
			t.learning_rate = lr;
			t.epochs = epochs;
			t.batch_size = batch_size;
			t.seed = seed;
			t.early_stop = !no_early_stop;
			return t;
		}
	};

	/// Writes to --out, or stdout when it is empty or "-".
	class Output
	{
	public:
		explicit Output(const std::string& path)
		{
			if (path.empty() || path == "-")
				return;
			file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
			if (!*file_)
				throw IoError("cannot write " + path);
			path_ = path;
		}

		std::ostream& stream() { return file_ ? *file_ : std::cout; }

		void close()
		{
			stream().flush();
			if (file_)
			{
				file_->close();
				if (!*file_)
					throw IoError("failed writing " + path_);
			}
		}

	private:
		std::unique_ptr<std::ofstream> file_;
		std::string path_;
	};

	void add_seed(CLI::App* cmd, Common& c)
	{
		cmd->add_option("--seed", c.seed, "Random seed")->envname("AAE_SEED");
	}

	void add_out(CLI::App* cmd, Common& c, const std::string& what)
	{
		cmd->add_option("--out", c.out, what + " (stdout when omitted)");
	}

	void add_train_flags(CLI::App* cmd, TrainFlags& t)
	{
		cmd->add_option("--lr", t.lr, "SGD learning rate")->capture_default_str();
		cmd->add_option("--epochs", t.epochs, "Epochs per training run")->capture_default_str();
		cmd->add_option("--batch-size", t.batch_size, "Mini-batch size")->capture_default_str();
		cmd->add_option("--gru-hidden", t.gru_hidden, "GRU hidden size")->capture_default_str();
		cmd->add_flag("--no-early-stop", t.no_early_stop, "Always run every epoch");
	}

	std::vector<EvaluationInstance> load_instances(const std::string& path)
	{
		auto instances = read_corpus(std::filesystem::path(path)).instances();
		if (instances.empty())
			throw ValidationError("corpus " + path + " has no instances");
		return instances;
	}

	std::vector<ArchitectureId> parse_archs(const std::vector<std::string>& names)
	{
		std::vector<ArchitectureId> archs;
		for (const auto& n : names)
			archs.push_back(parse_architecture(n));
		if (archs.empty())
			archs = {ArchitectureId::SCNN, ArchitectureId::DCNN, ArchitectureId::GRU};
		return archs;
	}

	std::string lower(std::string_view s)
	{
		std::string out(s);
		for (auto& c : out)
			c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
		return out;
	}

	std::string fmt(const char* spec, double v)
	{
		char buf[64];
		std::snprintf(buf, sizeof buf, spec, v);
		return buf;
	}
} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Active auto-estimator for graph storage configurations"};
	app.set_config("--config", "", "Read options from a TOML/INI file");
	app.require_subcommand(1);

	Common common;
	TrainFlags tf;
	std::string corpus_path;
	std::vector<std::string> arch_names;

	// gen
	CorpusOptions gen;
	auto* cmd_gen = app.add_subcommand("gen", "Generate an oracle-labeled corpus");
	cmd_gen->add_option("--profile", gen.profile, "freebase-small, freebase-middle, ldbc or random")->capture_default_str();
	cmd_gen->add_option("--count", gen.count, "Number of instances")->capture_default_str();
	cmd_gen->add_option("--max-len", gen.max_len, "Feature vector length (0: profile default)");
	cmd_gen->add_flag("--rebalance", gen.rebalance, "Reject draws that would unbalance the labels");
	add_seed(cmd_gen, common);
	add_out(cmd_gen, common, "Corpus file");

	// label
	std::string trace_path;
	auto* cmd_label = app.add_subcommand("label", "Relabel a corpus from measured runtimes");
	cmd_label->add_option("--corpus", corpus_path, "Input corpus")->required();
	cmd_label->add_option("--trace", trace_path, "CSV of provenance_id,storage_id,runtime_seconds")->required();
	add_out(cmd_label, common, "Relabeled corpus");

	// train
	std::string log_path;
	std::string arch_name = "scnn";
	auto* cmd_train = app.add_subcommand("train", "Train one classifier on a corpus");
	cmd_train->add_option("--corpus", corpus_path, "Training corpus")->required();
	cmd_train->add_option("--arch", arch_name, "scnn, dcnn or gru")->capture_default_str();
	cmd_train->add_option("--log", log_path, "Per-epoch training log (CSV)");
	add_train_flags(cmd_train, tf);
	add_seed(cmd_train, common);
	add_out(cmd_train, common, "Parameter file");

	// predict
	std::string params_path;
	auto* cmd_predict = app.add_subcommand("predict", "Score a corpus with trained parameters");
	cmd_predict->add_option("--corpus", corpus_path, "Corpus to score")->required();
	cmd_predict->add_option("--params", params_path, "Parameter file from train")->required();
	add_out(cmd_predict, common, "Predictions (CSV)");

	// active
	ActiveOptions ao;
	std::string sampling = "uniform";
	std::string active_params;
	auto* cmd_active = app.add_subcommand("active", "Run the active-learning loop over a corpus");
	cmd_active->add_option("--corpus", corpus_path, "Pool with hidden labels")->required();
	cmd_active->add_option("--arch", arch_name, "scnn, dcnn or gru")->capture_default_str();
	cmd_active->add_option("--threshold", ao.threshold, "Confidence threshold T")->capture_default_str();
	cmd_active->add_option("--sample-fraction", ao.sample_fraction, "Fraction of the pool sampled per round")
		->capture_default_str();
	cmd_active->add_option("--max-rounds", ao.max_rounds, "Round limit")->capture_default_str();
	cmd_active->add_option("--sampling", sampling, "uniform or least-confident")
		->check(CLI::IsMember({"uniform", "least-confident"}))
		->capture_default_str();
	cmd_active->add_option("--params", active_params, "Also save the final parameters here");
	add_train_flags(cmd_active, tf);
	add_seed(cmd_active, common);
	add_out(cmd_active, common, "Round report (CSV)");

	// sweep
	std::vector<double> fractions{0.41, 0.49, 0.58};
	auto* cmd_sweep = app.add_subcommand("sweep", "Accuracy on L and U for several training fractions");
	cmd_sweep->add_option("--corpus", corpus_path, "Labeled corpus")->required();
	cmd_sweep->add_option("--arch", arch_names, "Architectures (default: all three)")->delimiter(',');
	cmd_sweep->add_option("--fractions", fractions, "Comma-separated training fractions")->delimiter(',');
	add_train_flags(cmd_sweep, tf);
	add_seed(cmd_sweep, common);
	add_out(cmd_sweep, common, "Sweep table (CSV)");

	// cv
	std::size_t folds = 5;
	auto* cmd_cv = app.add_subcommand("cv", "k-fold cross-validation");
	cmd_cv->add_option("--corpus", corpus_path, "Labeled corpus")->required();
	cmd_cv->add_option("--arch", arch_names, "Architectures (default: all three)")->delimiter(',');
	cmd_cv->add_option("--folds", folds, "Number of folds k")->capture_default_str();
	add_train_flags(cmd_cv, tf);
	add_seed(cmd_cv, common);
	add_out(cmd_cv, common, "Per-fold report (CSV)");

	// bench
	std::size_t bench_count = 50;
	auto* cmd_bench = app.add_subcommand("bench", "Mean single-instance prediction latency");
	cmd_bench->add_option("--corpus", corpus_path, "Instances to time")->required();
	cmd_bench->add_option("--arch", arch_names, "Architectures (default: all three)")->delimiter(',');
	cmd_bench->add_option("--count", bench_count, "Instances timed per architecture (>= 50)")->capture_default_str();
	add_seed(cmd_bench, common);
	add_out(cmd_bench, common, "Latency report (CSV)");

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError& e)
	{
		const int code = app.exit(e);
		return code == 0 ? Exit::ok : Exit::validation;
	}

	try
	{
		Output out(common.out);
		auto& os = out.stream();

		if (cmd_gen->parsed())
		{
			gen.seed = common.seed;
			write_corpus(os, generate_corpus(gen));
		}
		else if (cmd_label->parsed())
		{
			auto corpus = read_corpus(std::filesystem::path(corpus_path));
			relabel_from_trace(corpus, ingest_trace(trace_path));
			write_corpus(os, corpus);
		}
		else if (cmd_train->parsed())
		{
			const auto arch = parse_architecture(arch_name);
			const auto instances = load_instances(corpus_path);
			Network net = build(arch, instances.front().vector.size(), derive_seed(common.seed, 1), tf.gru_hidden);
			const auto log = train(net, instances, tf.options(derive_seed(common.seed, 2)));
			if (!log_path.empty())
			{
				Output log_out(log_path);
				write_train_log(log_out.stream(), log);
				log_out.close();
			}
			save_params(os, net);
		}
		else if (cmd_predict->parsed())
		{
			std::ifstream in(params_path);
			if (!in)
				throw IoError("cannot open parameter file " + params_path);
			const Network net = load_network(in);
			const auto corpus = read_corpus(std::filesystem::path(corpus_path));
			os << "instance_id,probability,label\n";
			for (const auto& rec : corpus.records)
			{
				const double p = predict(net, rec.instance);
				os << rec.instance.provenance.instance_id << ',' << fmt("%.9f", p) << ',' << (hard_label(p) ? 1 : 0)
				   << '\n';
			}
		}
		else if (cmd_active->parsed())
		{
			const auto arch = parse_architecture(arch_name);
			const auto instances = load_instances(corpus_path);
			ao.seed = common.seed;
			ao.sampling = sampling == "uniform" ? SamplingMode::uniform : SamplingMode::least_confident;
			ao.train = tf.options(derive_seed(common.seed, 2));
			Network net = build(arch, instances.front().vector.size(), derive_seed(common.seed, 1), tf.gru_hidden);
			const auto result = active_loop(net, instances, ao);
			write_round_report(os, result.rounds);
			if (!active_params.empty())
			{
				Output p(active_params);
				save_params(p.stream(), net);
				p.close();
			}
		}
		else if (cmd_sweep->parsed())
		{
			const auto instances = load_instances(corpus_path);
			SweepTable table;
			table.archs = parse_archs(arch_names);
			for (auto arch : table.archs)
				table.rows.push_back(
					train_fraction_sweep(instances, arch, fractions, common.seed, tf.options(common.seed)));
			write_sweep_table(os, table);
		}
		else if (cmd_cv->parsed())
		{
			const auto instances = load_instances(corpus_path);
			bool first = true;
			for (auto arch : parse_archs(arch_names))
			{
				std::ostringstream block;
				write_cv_report(block, arch, cross_validate(instances, arch, folds, common.seed, tf.options(common.seed)));
				std::string text = block.str();
				if (!first)
					text.erase(0, text.find('\n') + 1);
				os << text;
				first = false;
			}
		}
		else if (cmd_bench->parsed())
		{
			if (bench_count < 50)
				throw ValidationError("bench: --count must be >= 50");
			const auto instances = load_instances(corpus_path);
			if (instances.size() < bench_count)
				throw ValidationError("bench: corpus has " + std::to_string(instances.size()) + " instances, need "
									  + std::to_string(bench_count));
			os << "arch,instances,mean_seconds\n";
			for (auto arch : parse_archs(arch_names))
			{
				const Network net = build(arch, instances.front().vector.size(), derive_seed(common.seed, 1));
				double sink = predict(net, instances.front());
				const auto t0 = std::chrono::steady_clock::now();
				for (std::size_t i = 0; i < bench_count; ++i)
					sink += predict(net, instances[i]);
				const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
				if (!(sink >= 0.0))
					throw Error("bench: non-finite prediction");
				os << lower(to_string(arch)) << ',' << bench_count << ','
				   << fmt("%.6f", dt.count() / static_cast<double>(bench_count)) << '\n';
			}
		}
		out.close();
		return Exit::ok;
	}
	catch (const ParseError& e)
	{
		std::cerr << "parse error: " << e.what() << '\n';
		return Exit::parse;
	}
	catch (const IoError& e)
	{
		std::cerr << "I/O error: " << e.what() << '\n';
		return Exit::io;
	}
	catch (const ValidationError& e)
	{
		std::cerr << "invalid input: " << e.what() << '\n';
		return Exit::validation;
	}
	catch (const ConfigError& e)
	{
		std::cerr << "invalid configuration: " << e.what() << '\n';
		return Exit::validation;
	}
	catch (const std::exception& e)
	{
		std::cerr << "error: " << e.what() << '\n';
		return Exit::other;
	}
}
