#pragma once

#include "aae/nn.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace aae
{
	enum class ArchitectureId : std::uint8_t
	{
		SCNN,
		DCNN,
		GRU,
	};

	enum class LayerKind : std::uint8_t
	{
		conv1d,
		maxpool1d,
		dense,
		activation,
		flatten,
		gru,
		mask,
	};

	std::string to_string(LayerKind k);

	struct LayerSpec
	{
		LayerKind kind = LayerKind::flatten;
		Eigen::Index filters = 0;
		Eigen::Index kernel_size = 0;
		Eigen::Index pool_size = 0;
		Eigen::Index units = 0; ///< dense units or GRU hidden size
		nn::Activation activation = nn::Activation::linear;
		double mask_value = -1.0;

		static LayerSpec conv1d(Eigen::Index filters, Eigen::Index kernel_size, nn::Activation act);
		static LayerSpec maxpool1d(Eigen::Index pool_size);
		static LayerSpec dense(Eigen::Index units, nn::Activation act);
		static LayerSpec activation_layer(nn::Activation act);
		static LayerSpec flatten();
		static LayerSpec gru(Eigen::Index hidden_size);
		static LayerSpec mask(double sentinel = -1.0);

		std::size_t num_param_tensors() const;
		bool operator==(const LayerSpec&) const = default;
	};

	/// (channels x length) of a layer's output; vectors are (n x 1).
	struct Shape
	{
		Eigen::Index channels = 0;
		Eigen::Index length = 0;
		bool operator==(const Shape&) const = default;
	};

	/// Shape after `spec`; throws ShapeError naming the layer when it would be empty.
	Shape output_shape(const LayerSpec& spec, const Shape& input, std::size_t layer_index);

	/// Trainable tensors in layer order; biases are (n x 1).
	struct ClassifierParams
	{
		std::vector<Eigen::MatrixXd> tensors;
		std::uint64_t seed = 0;
	};

	struct LayerCache
	{
		Eigen::MatrixXd output;
		nn::IndexMatrix argmax;
		nn::GruTrace<double> gru;
	};

	struct ForwardPass
	{
		Eigen::MatrixXd input;
		std::vector<LayerCache> layers;
		std::vector<std::uint8_t> mask; ///< set by a mask layer
		double logit = 0.0;
		double probability = 0.5;
	};

	struct LossGradient
	{
		double loss = 0.0;
		double probability = 0.5;
		std::vector<Eigen::MatrixXd> grads; ///< matches ClassifierParams::tensors
	};

	/// A chain of layers ending in Dense(1, sigmoid), applied to one feature
	/// vector treated as a single-channel sequence.
	class Network
	{
	public:
		/// Validates the chain and draws Glorot-uniform weights; biases start at zero.
		Network(std::vector<LayerSpec> layers, Eigen::Index input_len, std::uint64_t seed,
				std::optional<ArchitectureId> arch = std::nullopt);

		const std::vector<LayerSpec>& layers() const { return layers_; }
		const std::vector<Shape>& shapes() const { return shapes_; }
		Eigen::Index input_len() const { return input_len_; }
		std::optional<ArchitectureId> architecture() const { return arch_; }

		ClassifierParams& params() { return params_; }
		const ClassifierParams& params() const { return params_; }
		/// Index of the first tensor owned by layer i.
		std::size_t param_offset(std::size_t layer) const { return offsets_[layer]; }

		/// Replaces the parameters; throws ShapeError if any tensor shape differs.
		void set_params(ClassifierParams params);

		/// Zeroes the output layer so every prediction is exactly 0.5.
		void zero_output_layer();

		ForwardPass forward(const Eigen::VectorXd& x) const;
		double probability(const Eigen::VectorXd& x) const;

		/// Binary cross-entropy and its exact gradient for one example.
		LossGradient loss_and_gradient(const Eigen::VectorXd& x, bool target) const;

		std::vector<Eigen::MatrixXd> zero_gradients() const;

	private:
		ForwardPass run(const Eigen::VectorXd& x, bool keep_cache) const;

		std::vector<LayerSpec> layers_;
		std::vector<Shape> shapes_;
		std::vector<std::size_t> offsets_;
		Eigen::Index input_len_;
		std::optional<ArchitectureId> arch_;
		ClassifierParams params_;
	};
} // namespace aae
