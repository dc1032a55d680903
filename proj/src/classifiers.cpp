#include "aae/classifiers.hpp"

#include "aae/error.hpp"
#include "aae/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace aae
{
	std::string_view to_string(ArchitectureId a)
	{
		switch (a)
		{
		case ArchitectureId::SCNN: return "SCNN";
		case ArchitectureId::DCNN: return "DCNN";
		case ArchitectureId::GRU: return "GRU";
		}
		return "?";
	}

	ArchitectureId parse_architecture(std::string_view name)
	{
		std::string lower(name);
		std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
		if (lower == "scnn")
			return ArchitectureId::SCNN;
		if (lower == "dcnn")
			return ArchitectureId::DCNN;
		if (lower == "gru")
			return ArchitectureId::GRU;
		throw ValidationError("unknown architecture '" + std::string(name) + "'");
	}

	std::vector<LayerSpec> layer_specs(ArchitectureId arch, Eigen::Index gru_hidden)
	{
		using nn::Activation;
		const auto conv = [](Activation act) { return LayerSpec::conv1d(kConvFilters, kConvKernel, act); };
		if (arch == ArchitectureId::GRU)
			return {LayerSpec::mask(kPadValue), LayerSpec::gru(gru_hidden), LayerSpec::dense(1, Activation::sigmoid)};

		std::vector<LayerSpec> specs = {
			conv(Activation::linear), conv(Activation::tanh), LayerSpec::maxpool1d(kPoolSize),
			conv(Activation::tanh), conv(Activation::tanh), LayerSpec::maxpool1d(kPoolSize),
		};
		if (arch == ArchitectureId::DCNN)
		{
			specs.push_back(conv(Activation::tanh));
			specs.push_back(conv(Activation::tanh));
			specs.push_back(LayerSpec::maxpool1d(kPoolSize));
		}
		specs.push_back(LayerSpec::flatten());
		specs.push_back(LayerSpec::dense(1, Activation::sigmoid));
		return specs;
	}

	Network build(ArchitectureId arch, Eigen::Index input_len, std::uint64_t seed, Eigen::Index gru_hidden)
	{
		return Network(layer_specs(arch, gru_hidden), input_len, seed, arch);
	}

	TrainLog train(Network& net, std::span<const EvaluationInstance> corpus, const TrainOptions& options)
	{
		if (corpus.empty())
			throw ValidationError("train: corpus is empty");
		if (options.batch_size < 1)
			throw ValidationError("train: batch_size must be >= 1");
		if (!(options.learning_rate >= 0.0) || !std::isfinite(options.learning_rate))
			throw ValidationError("train: learning rate must be finite and >= 0");
		for (const auto& inst : corpus)
		{
			if (inst.vector.size() != net.input_len())
				throw ValidationError("train: instance length " + std::to_string(inst.vector.size())
									  + " differs from network input length " + std::to_string(net.input_len()));
			if (!inst.label)
				throw ValidationError("train: instance " + inst.provenance.instance_id + " is unlabeled");
		}

		Rng rng(options.seed);
		std::vector<std::size_t> order(corpus.size());
		std::iota(order.begin(), order.end(), std::size_t{0});

		TrainLog log;
		auto& tensors = net.params().tensors;
		for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch)
		{
			rng.shuffle(std::span<std::size_t>(order));
			double loss_sum = 0.0;
			std::size_t correct = 0;
			for (std::size_t start = 0; start < order.size(); start += options.batch_size)
			{
				const std::size_t end = std::min(order.size(), start + options.batch_size);
				auto batch_grads = net.zero_gradients();
				for (std::size_t b = start; b < end; ++b)
				{
					const auto& inst = corpus[order[b]];
					auto lg = net.loss_and_gradient(inst.vector, *inst.label);
					loss_sum += lg.loss;
					correct += hard_label(lg.probability) == *inst.label ? 1 : 0;
					for (std::size_t i = 0; i < batch_grads.size(); ++i)
						batch_grads[i] += lg.grads[i];
				}
				const double scale = 1.0 / static_cast<double>(end - start);
				for (auto& g : batch_grads)
					g *= scale;
				nn::sgd_step(tensors, batch_grads, options.learning_rate);
			}

			const auto n = static_cast<double>(corpus.size());
			log.push_back({epoch, loss_sum / n, static_cast<double>(correct) / n});
			if (!options.early_stop)
				continue;
			if (correct == corpus.size())
				break;
			if (log.size() > 5)
			{
				double before = log.front().mean_loss;
				for (std::size_t e = 1; e + 5 < log.size(); ++e)
					before = std::min(before, log[e].mean_loss);
				double recent = log.back().mean_loss;
				for (std::size_t e = log.size() - 5; e < log.size(); ++e)
					recent = std::min(recent, log[e].mean_loss);
				if (before - recent < 1e-6)
					break;
			}
		}
		return log;
	}

	double predict(const Network& net, const EvaluationInstance& instance)
	{
		if (instance.vector.size() != net.input_len())
			throw ShapeError("predict: instance length " + std::to_string(instance.vector.size())
							 + " differs from network input length " + std::to_string(net.input_len()));
		const double p = net.probability(instance.vector);
		return std::clamp(p, 1e-15, 1.0 - 1e-15);
	}

	void write_train_log(std::ostream& out, const TrainLog& log)
	{
		out << "epoch,mean_loss,accuracy\n";
		char buf[96];
		for (const auto& r : log)
		{
			std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g\n", r.epoch, r.mean_loss, r.accuracy);
			out << buf;
		}
	}

	namespace
	{
		constexpr std::string_view kParamsMagic = "aae-params";
		constexpr int kParamsVersion = 1;

		template <typename T>
		T read_field(std::istream& in, std::string_view key)
		{
			std::string name;
			T value{};
			if (!(in >> name) || name != key || !(in >> value))
				throw ParseError("params: expected field '" + std::string(key) + "'", 0);
			return value;
		}
	} // namespace

	void save_params(std::ostream& out, const Network& net)
	{
		if (!net.architecture())
			throw ValidationError("save_params: only built architectures can be serialized");
		out << kParamsMagic << ' ' << kParamsVersion << '\n';
		out << "arch " << to_string(*net.architecture()) << '\n';
		out << "input_len " << net.input_len() << '\n';
		out << "seed " << net.params().seed << '\n';
		Eigen::Index hidden = 0;
		for (const auto& spec : net.layers())
			if (spec.kind == LayerKind::gru)
				hidden = spec.units;
		out << "gru_hidden " << hidden << '\n';
		const auto& tensors = net.params().tensors;
		out << "tensors " << tensors.size() << '\n';
		char buf[32];
		for (const auto& t : tensors)
		{
			out << t.rows() << ' ' << t.cols() << '\n';
			for (Eigen::Index r = 0; r < t.rows(); ++r)
			{
				for (Eigen::Index c = 0; c < t.cols(); ++c)
				{
					std::snprintf(buf, sizeof buf, "%.17g", t(r, c));
					out << (c ? " " : "") << buf;
				}
				out << '\n';
			}
		}
	}

	Network load_network(std::istream& in)
	{
		std::string magic;
		int version = 0;
		if (!(in >> magic >> version) || magic != kParamsMagic)
			throw ParseError("params: missing '" + std::string(kParamsMagic) + "' header", 1);
		if (version != kParamsVersion)
			throw ParseError("params: unsupported version " + std::to_string(version), 1);
		const auto arch = parse_architecture(read_field<std::string>(in, "arch"));
		const auto input_len = read_field<Eigen::Index>(in, "input_len");
		const auto seed = read_field<std::uint64_t>(in, "seed");
		auto hidden = read_field<Eigen::Index>(in, "gru_hidden");
		if (arch != ArchitectureId::GRU)
			hidden = kDefaultGruHidden;
		Network net = build(arch, input_len, seed, hidden);

		const auto count = read_field<std::size_t>(in, "tensors");
		ClassifierParams params;
		params.seed = seed;
		for (std::size_t i = 0; i < count; ++i)
		{
			Eigen::Index rows = 0, cols = 0;
			if (!(in >> rows >> cols) || rows < 0 || cols < 0)
				throw ParseError("params: bad shape for tensor " + std::to_string(i), 0);
			Eigen::MatrixXd t(rows, cols);
			for (Eigen::Index r = 0; r < rows; ++r)
				for (Eigen::Index c = 0; c < cols; ++c)
					if (!(in >> t(r, c)))
						throw ParseError("params: truncated tensor " + std::to_string(i), 0);
			params.tensors.push_back(std::move(t));
		}
		net.set_params(std::move(params));
		return net;
	}
} // namespace aae
