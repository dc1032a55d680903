#pragma once

#include "aae/features.hpp"
#include "aae/network.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aae
{
	std::string_view to_string(ArchitectureId a);
	/// Accepts scnn/dcnn/gru in any case; throws ValidationError otherwise.
	ArchitectureId parse_architecture(std::string_view name);

	inline constexpr Eigen::Index kConvFilters = 16;
	inline constexpr Eigen::Index kConvKernel = 3;
	inline constexpr Eigen::Index kPoolSize = 3;
	inline constexpr Eigen::Index kDefaultGruHidden = 32;

	std::vector<LayerSpec> layer_specs(ArchitectureId arch, Eigen::Index gru_hidden = kDefaultGruHidden);

	/// SCNN: conv(linear), conv(tanh), pool, conv(tanh), conv(tanh), pool,
	/// flatten, dense(1, sigmoid). DCNN adds conv(tanh) x2 + pool before the
	/// flatten. GRU: mask(-1), gru(H), dense(1, sigmoid).
	Network build(ArchitectureId arch, Eigen::Index input_len, std::uint64_t seed,
				  Eigen::Index gru_hidden = kDefaultGruHidden);

	struct TrainOptions
	{
		std::size_t epochs = 50;
		std::size_t batch_size = 32;
		double learning_rate = 0.01;
		std::uint64_t seed = 0;
		bool early_stop = true;
	};

	struct EpochRecord
	{
		std::size_t epoch = 0;
		double mean_loss = 0.0;
		double accuracy = 0.0;
	};

	using TrainLog = std::vector<EpochRecord>;

	/// Mini-batch SGD on a seeded shuffle, gradients averaged per batch. Loss
	/// and accuracy are accumulated during each epoch. Stops early once an epoch
	/// is fully correct or the best loss of the last 5 epochs beats the earlier best by < 1e-6.
	TrainLog train(Network& net, std::span<const EvaluationInstance> corpus, const TrainOptions& options);

	/// Sigmoid output, kept strictly inside (0, 1).
	double predict(const Network& net, const EvaluationInstance& instance);

	inline bool hard_label(double probability) { return probability >= 0.5; }

	void write_train_log(std::ostream& out, const TrainLog& log);

	/// Versioned text format: header (arch, input length, seed), then every
	/// tensor row-major with 17 significant digits.
	void save_params(std::ostream& out, const Network& net);
	Network load_network(std::istream& in);
} // namespace aae
