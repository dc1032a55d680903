#include "aae/network.hpp"

#include "aae/error.hpp"
#include "aae/rng.hpp"

#include <cmath>

namespace aae
{
	std::string to_string(LayerKind k)
	{
		switch (k)
		{
		case LayerKind::conv1d: return "conv1d";
		case LayerKind::maxpool1d: return "maxpool1d";
		case LayerKind::dense: return "dense";
		case LayerKind::activation: return "activation";
		case LayerKind::flatten: return "flatten";
		case LayerKind::gru: return "gru";
		case LayerKind::mask: return "mask";
		}
		return "?";
	}

	LayerSpec LayerSpec::conv1d(Eigen::Index filters, Eigen::Index kernel_size, nn::Activation act)
	{
		LayerSpec s;
		s.kind = LayerKind::conv1d;
		s.filters = filters;
		s.kernel_size = kernel_size;
		s.activation = act;
		return s;
	}

	LayerSpec LayerSpec::maxpool1d(Eigen::Index pool_size)
	{
		LayerSpec s;
		s.kind = LayerKind::maxpool1d;
		s.pool_size = pool_size;
		return s;
	}

	LayerSpec LayerSpec::dense(Eigen::Index units, nn::Activation act)
	{
		LayerSpec s;
		s.kind = LayerKind::dense;
		s.units = units;
		s.activation = act;
		return s;
	}

	LayerSpec LayerSpec::activation_layer(nn::Activation act)
	{
		LayerSpec s;
		s.kind = LayerKind::activation;
		s.activation = act;
		return s;
	}

	LayerSpec LayerSpec::flatten() { return LayerSpec{}; }

	LayerSpec LayerSpec::gru(Eigen::Index hidden_size)
	{
		LayerSpec s;
		s.kind = LayerKind::gru;
		s.units = hidden_size;
		return s;
	}

	LayerSpec LayerSpec::mask(double sentinel)
	{
		LayerSpec s;
		s.kind = LayerKind::mask;
		s.mask_value = sentinel;
		return s;
	}

	std::size_t LayerSpec::num_param_tensors() const
	{
		switch (kind)
		{
		case LayerKind::conv1d:
		case LayerKind::dense: return 2;
		case LayerKind::gru: return 6;
		default: return 0;
		}
	}

	Shape output_shape(const LayerSpec& spec, const Shape& in, std::size_t layer_index)
	{
		const auto fail = [&](const std::string& why) -> Shape {
			throw ShapeError("layer " + std::to_string(layer_index) + " (" + to_string(spec.kind) + "): " + why);
		};
		switch (spec.kind)
		{
		case LayerKind::conv1d:
			if (spec.filters < 1 || spec.kernel_size < 1)
				return fail("filters and kernel_size must be >= 1");
			if (in.length < spec.kernel_size)
				return fail("input length " + std::to_string(in.length) + " < kernel " + std::to_string(spec.kernel_size));
			return {spec.filters, in.length - spec.kernel_size + 1};
		case LayerKind::maxpool1d:
			if (spec.pool_size < 1)
				return fail("pool_size must be >= 1");
			if (in.length < spec.pool_size)
				return fail("input length " + std::to_string(in.length) + " < pool size " + std::to_string(spec.pool_size));
			return {in.channels, in.length / spec.pool_size};
		case LayerKind::dense:
			if (spec.units < 1)
				return fail("units must be >= 1");
			if (in.length != 1)
				return fail("dense expects a flat vector input");
			return {spec.units, 1};
		case LayerKind::activation:
		case LayerKind::mask:
			return in;
		case LayerKind::flatten:
			return {in.channels * in.length, 1};
		case LayerKind::gru:
			if (spec.units < 1)
				return fail("hidden size must be >= 1");
			if (in.channels != 1)
				return fail("gru expects a single-channel sequence");
			return {spec.units, 1};
		}
		return in;
	}

	namespace
	{
		void glorot_fill(Eigen::MatrixXd& m, double fan_in, double fan_out, Rng& rng)
		{
			const double limit = std::sqrt(6.0 / (fan_in + fan_out));
			for (Eigen::Index r = 0; r < m.rows(); ++r)
				for (Eigen::Index c = 0; c < m.cols(); ++c)
					m(r, c) = rng.uniform(-limit, limit);
		}

		nn::GruParams<double> gru_view(const std::vector<Eigen::MatrixXd>& t, std::size_t off)
		{
			return {t[off], t[off + 2], t[off + 4], t[off + 1], t[off + 3], t[off + 5]};
		}
	} // namespace

	Network::Network(std::vector<LayerSpec> layers, Eigen::Index input_len, std::uint64_t seed,
					 std::optional<ArchitectureId> arch)
		: layers_(std::move(layers)), input_len_(input_len), arch_(arch)
	{
		if (layers_.empty())
			throw ShapeError("network has no layers");
		if (input_len_ < 1)
			throw ShapeError("network input length must be >= 1");
		const auto& head = layers_.back();
		if (head.kind != LayerKind::dense || head.units != 1 || head.activation != nn::Activation::sigmoid)
			throw ShapeError("network must end in Dense(1, sigmoid)");

		Rng rng(seed);
		params_.seed = seed;
		Shape shape{1, input_len_};
		for (std::size_t i = 0; i < layers_.size(); ++i)
		{
			const auto& spec = layers_[i];
			const Shape out = output_shape(spec, shape, i);
			offsets_.push_back(params_.tensors.size());
			switch (spec.kind)
			{
			case LayerKind::conv1d:
			{
				Eigen::MatrixXd w(spec.filters, shape.channels * spec.kernel_size);
				glorot_fill(w, static_cast<double>(shape.channels * spec.kernel_size),
							static_cast<double>(spec.filters * spec.kernel_size), rng);
				params_.tensors.push_back(std::move(w));
				params_.tensors.push_back(Eigen::MatrixXd::Zero(spec.filters, 1));
				break;
			}
			case LayerKind::dense:
			{
				Eigen::MatrixXd w(spec.units, shape.channels);
				glorot_fill(w, static_cast<double>(shape.channels), static_cast<double>(spec.units), rng);
				params_.tensors.push_back(std::move(w));
				params_.tensors.push_back(Eigen::MatrixXd::Zero(spec.units, 1));
				break;
			}
			case LayerKind::gru:
			{
				const Eigen::Index H = spec.units;
				for (int gate = 0; gate < 3; ++gate)
				{
					Eigen::MatrixXd w(H, H + 1);
					glorot_fill(w, static_cast<double>(H + 1), static_cast<double>(H), rng);
					params_.tensors.push_back(std::move(w));
					params_.tensors.push_back(Eigen::MatrixXd::Zero(H, 1));
				}
				break;
			}
			default: break;
			}
			shapes_.push_back(out);
			shape = out;
		}
	}

	void Network::set_params(ClassifierParams params)
	{
		if (params.tensors.size() != params_.tensors.size())
			throw ShapeError("expected " + std::to_string(params_.tensors.size()) + " parameter tensors, got "
							 + std::to_string(params.tensors.size()));
		for (std::size_t i = 0; i < params.tensors.size(); ++i)
			if (params.tensors[i].rows() != params_.tensors[i].rows() || params.tensors[i].cols() != params_.tensors[i].cols())
				throw ShapeError("parameter tensor " + std::to_string(i) + " has the wrong shape");
		params_ = std::move(params);
	}

	void Network::zero_output_layer()
	{
		const std::size_t off = offsets_.back();
		params_.tensors[off].setZero();
		params_.tensors[off + 1].setZero();
	}

	std::vector<Eigen::MatrixXd> Network::zero_gradients() const
	{
		std::vector<Eigen::MatrixXd> g;
		g.reserve(params_.tensors.size());
		for (const auto& t : params_.tensors)
			g.push_back(Eigen::MatrixXd::Zero(t.rows(), t.cols()));
		return g;
	}

	ForwardPass Network::run(const Eigen::VectorXd& x, bool keep_cache) const
	{
		if (x.size() != input_len_)
			throw ShapeError("input has length " + std::to_string(x.size()) + ", network expects "
							 + std::to_string(input_len_));
		ForwardPass pass;
		pass.input = x.transpose();
		pass.layers.resize(layers_.size());
		const auto& t = params_.tensors;

		for (std::size_t i = 0; i < layers_.size(); ++i)
		{
			const auto& spec = layers_[i];
			const Eigen::MatrixXd& in = i == 0 ? pass.input : pass.layers[i - 1].output;
			auto& cache = pass.layers[i];
			const std::size_t off = offsets_[i];
			const bool last = i + 1 == layers_.size();
			switch (spec.kind)
			{
			case LayerKind::conv1d:
				cache.output = nn::conv1d_forward<double>(in, t[off], t[off + 1], spec.kernel_size, spec.activation);
				break;
			case LayerKind::maxpool1d:
			{
				auto pooled = nn::maxpool1d_forward<double>(in, spec.pool_size);
				cache.output = std::move(pooled.output);
				cache.argmax = std::move(pooled.argmax);
				break;
			}
			case LayerKind::dense:
				if (last)
				{
					pass.logit = (t[off].row(0) * in.col(0))(0) + t[off + 1](0, 0);
					pass.probability = nn::sigmoid(pass.logit);
					cache.output = Eigen::MatrixXd::Constant(1, 1, pass.probability);
				}
				else
				{
					cache.output = nn::dense_forward<double>(in.col(0), t[off], t[off + 1].col(0), spec.activation);
				}
				break;
			case LayerKind::activation: cache.output = nn::apply_activation(in, spec.activation); break;
			case LayerKind::flatten:
				cache.output = Eigen::Map<const Eigen::MatrixXd>(in.data(), in.size(), 1);
				break;
			case LayerKind::mask:
				pass.mask.resize(static_cast<std::size_t>(in.cols()));
				for (Eigen::Index c = 0; c < in.cols(); ++c)
					pass.mask[static_cast<std::size_t>(c)] = (in.col(c).array() != spec.mask_value).any() ? 1 : 0;
				cache.output = in;
				break;
			case LayerKind::gru:
			{
				std::vector<std::uint8_t> ones;
				std::span<const std::uint8_t> mask = pass.mask;
				if (pass.mask.empty())
				{
					ones.assign(static_cast<std::size_t>(in.cols()), 1);
					mask = ones;
				}
				auto trace = nn::gru_forward<double>(in.row(0).transpose(), mask, gru_view(t, off), keep_cache);
				cache.output = trace.final_state;
				if (keep_cache)
					cache.gru = std::move(trace);
				break;
			}
			}
		}
		return pass;
	}

	ForwardPass Network::forward(const Eigen::VectorXd& x) const { return run(x, true); }

	double Network::probability(const Eigen::VectorXd& x) const { return run(x, false).probability; }

	LossGradient Network::loss_and_gradient(const Eigen::VectorXd& x, bool target) const
	{
		const ForwardPass pass = run(x, true);
		LossGradient result;
		result.loss = nn::bce_with_logit(pass.logit, target);
		result.probability = pass.probability;
		result.grads = zero_gradients();
		const auto& t = params_.tensors;

		Eigen::MatrixXd grad = Eigen::MatrixXd::Constant(1, 1, nn::bce_logit_gradient(pass.logit, target));
		for (std::size_t i = layers_.size(); i-- > 0;)
		{
			const auto& spec = layers_[i];
			const Eigen::MatrixXd& in = i == 0 ? pass.input : pass.layers[i - 1].output;
			const auto& cache = pass.layers[i];
			const std::size_t off = offsets_[i];
			const bool last = i + 1 == layers_.size();
			switch (spec.kind)
			{
			case LayerKind::conv1d:
			{
				const Eigen::MatrixXd grad_pre = nn::activation_backward<double>(cache.output, grad, spec.activation);
				auto g = nn::conv1d_backward<double>(in, t[off], spec.kernel_size, grad_pre);
				result.grads[off] = std::move(g.weights);
				result.grads[off + 1] = std::move(g.bias);
				grad = std::move(g.input);
				break;
			}
			case LayerKind::maxpool1d: grad = nn::maxpool1d_backward<double>(cache.argmax, in.cols(), grad); break;
			case LayerKind::dense:
			{
				// the head's incoming gradient is already w.r.t. its logit
				const Eigen::VectorXd grad_pre =
					last ? Eigen::VectorXd(grad.col(0))
						 : Eigen::VectorXd(nn::activation_backward<double>(cache.output, grad, spec.activation).col(0));
				auto g = nn::dense_backward<double>(in.col(0), t[off], grad_pre);
				result.grads[off] = std::move(g.weights);
				result.grads[off + 1] = std::move(g.bias);
				grad = std::move(g.input);
				break;
			}
			case LayerKind::activation: grad = nn::activation_backward<double>(cache.output, grad, spec.activation); break;
			case LayerKind::flatten: grad = Eigen::Map<const Eigen::MatrixXd>(grad.data(), in.rows(), in.cols()); break;
			case LayerKind::mask: break;
			case LayerKind::gru:
			{
				auto g = nn::gru_backward<double>(in.row(0).transpose(), gru_view(t, off), cache.gru, grad.col(0));
				result.grads[off] = std::move(g.params.w_update);
				result.grads[off + 1] = std::move(g.params.b_update);
				result.grads[off + 2] = std::move(g.params.w_reset);
				result.grads[off + 3] = std::move(g.params.b_reset);
				result.grads[off + 4] = std::move(g.params.w_candidate);
				result.grads[off + 5] = std::move(g.params.b_candidate);
				grad = g.input.transpose();
				break;
			}
			}
		}
		return result;
	}
} // namespace aae
