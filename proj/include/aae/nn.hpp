#pragma once

// Layer kernels for the classifiers: valid 1-D convolution, non-overlapping
// max pooling, dense, GRU and the sigmoid/BCE head. Every forward has a
// hand-derived backward. Activations are (channels x length) matrices; a plain
// vector is a (n x 1) matrix.

#include "aae/error.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aae::nn
{
	template <typename Scalar>
	using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
	template <typename Scalar>
	using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
	using IndexMatrix = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic>;

	enum class Activation : std::uint8_t
	{
		linear,
		tanh,
		sigmoid,
	};

	template <typename Scalar>
	Scalar sigmoid(Scalar x)
	{
		using std::exp;
		if (x >= Scalar(0))
			return Scalar(1) / (Scalar(1) + exp(-x));
		const Scalar e = exp(x);
		return e / (Scalar(1) + e);
	}

	template <typename Derived>
	auto apply_activation(const Eigen::MatrixBase<Derived>& pre, Activation act)
	{
		using Scalar = typename Derived::Scalar;
		Matrix<Scalar> out = pre;
		switch (act)
		{
		case Activation::linear: break;
		case Activation::tanh: out = pre.array().tanh(); break;
		case Activation::sigmoid: out = pre.unaryExpr([](Scalar v) { return sigmoid(v); }); break;
		}
		return out;
	}

	/// Gradient w.r.t. the pre-activation, given the activation output.
	template <typename Scalar>
	Matrix<Scalar> activation_backward(const Matrix<Scalar>& output, const Matrix<Scalar>& grad_output, Activation act)
	{
		switch (act)
		{
		case Activation::tanh: return grad_output.array() * (Scalar(1) - output.array().square());
		case Activation::sigmoid: return grad_output.array() * output.array() * (Scalar(1) - output.array());
		case Activation::linear: break;
		}
		return grad_output;
	}

	// ---------------------------------------------------------------- conv1d

	/// Weights are (filters x in_channels*kernel); column c*kernel + i multiplies
	/// input channel c at offset i.
	template <typename Scalar>
	struct Conv1dParams
	{
		Matrix<Scalar> weights;
		Vector<Scalar> bias;
		Eigen::Index kernel_size;
	};

	template <typename Scalar>
	Matrix<Scalar> im2col(const Matrix<Scalar>& input, Eigen::Index k)
	{
		const Eigen::Index channels = input.rows();
		const Eigen::Index out_len = input.cols() - k + 1;
		Matrix<Scalar> cols(channels * k, out_len);
		for (Eigen::Index c = 0; c < channels; ++c)
			for (Eigen::Index i = 0; i < k; ++i)
				cols.row(c * k + i) = input.row(c).segment(i, out_len);
		return cols;
	}

	/// Valid cross-correlation, stride 1: (C x L) -> (filters x L-k+1).
	template <typename Scalar>
	Matrix<Scalar> conv1d_forward(const Matrix<Scalar>& input, const Matrix<Scalar>& weights,
								  const Vector<Scalar>& bias, Eigen::Index kernel_size, Activation act)
	{
		if (kernel_size < 1)
			throw ShapeError("conv1d: kernel_size must be >= 1");
		if (input.cols() < kernel_size)
			throw ShapeError("conv1d: input length " + std::to_string(input.cols()) + " shorter than kernel "
							 + std::to_string(kernel_size));
		if (weights.cols() != input.rows() * kernel_size || bias.size() != weights.rows())
			throw ShapeError("conv1d: weight shape does not match input channels");
		Matrix<Scalar> pre = weights * im2col(input, kernel_size);
		pre.colwise() += bias;
		return apply_activation(pre, act);
	}

	template <typename Scalar>
	struct Conv1dGrads
	{
		Matrix<Scalar> weights;
		Vector<Scalar> bias;
		Matrix<Scalar> input;
	};

	/// `grad_pre` is the gradient w.r.t. the pre-activation output.
	template <typename Scalar>
	Conv1dGrads<Scalar> conv1d_backward(const Matrix<Scalar>& input, const Matrix<Scalar>& weights,
										Eigen::Index kernel_size, const Matrix<Scalar>& grad_pre)
	{
		const Matrix<Scalar> cols = im2col(input, kernel_size);
		Conv1dGrads<Scalar> g;
		g.weights = grad_pre * cols.transpose();
		g.bias = grad_pre.rowwise().sum();
		const Matrix<Scalar> grad_cols = weights.transpose() * grad_pre;
		g.input = Matrix<Scalar>::Zero(input.rows(), input.cols());
		const Eigen::Index out_len = grad_pre.cols();
		for (Eigen::Index c = 0; c < input.rows(); ++c)
			for (Eigen::Index i = 0; i < kernel_size; ++i)
				g.input.row(c).segment(i, out_len) += grad_cols.row(c * kernel_size + i);
		return g;
	}

	// ------------------------------------------------------------- maxpool1d

	template <typename Scalar>
	struct PoolResult
	{
		Matrix<Scalar> output;
		IndexMatrix argmax; ///< input column of each window's maximum
	};

	/// Non-overlapping windows of width p, stride p; the trailing remainder is
	/// dropped. Ties resolve to the lowest index.
	template <typename Scalar>
	PoolResult<Scalar> maxpool1d_forward(const Matrix<Scalar>& input, Eigen::Index pool_size)
	{
		if (pool_size < 1)
			throw ShapeError("maxpool1d: pool_size must be >= 1");
		if (input.cols() < pool_size)
			throw ShapeError("maxpool1d: input length " + std::to_string(input.cols()) + " shorter than pool size "
							 + std::to_string(pool_size));
		const Eigen::Index out_len = input.cols() / pool_size;
		PoolResult<Scalar> r{Matrix<Scalar>(input.rows(), out_len), IndexMatrix(input.rows(), out_len)};
		for (Eigen::Index c = 0; c < input.rows(); ++c)
		{
			for (Eigen::Index j = 0; j < out_len; ++j)
			{
				Eigen::Index best = j * pool_size;
				for (Eigen::Index i = best + 1; i < (j + 1) * pool_size; ++i)
					if (input(c, i) > input(c, best))
						best = i;
				r.output(c, j) = input(c, best);
				r.argmax(c, j) = best;
			}
		}
		return r;
	}

	template <typename Scalar>
	Matrix<Scalar> maxpool1d_backward(const IndexMatrix& argmax, Eigen::Index input_len, const Matrix<Scalar>& grad_output)
	{
		Matrix<Scalar> g = Matrix<Scalar>::Zero(argmax.rows(), input_len);
		for (Eigen::Index c = 0; c < argmax.rows(); ++c)
			for (Eigen::Index j = 0; j < argmax.cols(); ++j)
				g(c, argmax(c, j)) += grad_output(c, j);
		return g;
	}

	// ----------------------------------------------------------------- dense

	template <typename Scalar>
	Vector<Scalar> dense_forward(const Vector<Scalar>& input, const Matrix<Scalar>& weights, const Vector<Scalar>& bias,
								 Activation act)
	{
		if (weights.cols() != input.size() || bias.size() != weights.rows())
			throw ShapeError("dense: weights are " + std::to_string(weights.rows()) + "x" + std::to_string(weights.cols())
							 + " but input has length " + std::to_string(input.size()));
		const Vector<Scalar> pre = weights * input + bias;
		return apply_activation(pre, act);
	}

	template <typename Scalar>
	struct DenseGrads
	{
		Matrix<Scalar> weights;
		Vector<Scalar> bias;
		Vector<Scalar> input;
	};

	template <typename Scalar>
	DenseGrads<Scalar> dense_backward(const Vector<Scalar>& input, const Matrix<Scalar>& weights,
									  const Vector<Scalar>& grad_pre)
	{
		return {grad_pre * input.transpose(), grad_pre, weights.transpose() * grad_pre};
	}

	// ------------------------------------------------------------------- GRU

	/// Gate weights act on [h_{t-1}; x_t]: the first H columns on the state, the
	/// last column on the scalar input.
	template <typename Scalar>
	struct GruParams
	{
		Matrix<Scalar> w_update, w_reset, w_candidate; // H x (H+1)
		Vector<Scalar> b_update, b_reset, b_candidate; // H

		Eigen::Index hidden_size() const { return w_update.rows(); }
	};

	template <typename Scalar>
	struct GruStep
	{
		Vector<Scalar> h_prev, update, reset, candidate;
	};

	template <typename Scalar>
	struct GruTrace
	{
		Vector<Scalar> final_state;
		std::vector<GruStep<Scalar>> steps; ///< one per unmasked step
	};

	/// Number of leading ones; throws if the mask is not ones followed by zeros.
	inline std::size_t mask_prefix_length(std::span<const std::uint8_t> mask)
	{
		std::size_t n = 0;
		while (n < mask.size() && mask[n])
			++n;
		for (std::size_t i = n; i < mask.size(); ++i)
			if (mask[i])
				throw ValidationError("gru: mask must be a prefix of ones followed by zeros (1 at position "
									  + std::to_string(i) + " after padding)");
		return n;
	}

	/// Runs the recurrence from h_0 = 0; masked steps carry the state unchanged,
	/// so only the real prefix is evaluated.
	template <typename Scalar>
	GruTrace<Scalar> gru_forward(const Vector<Scalar>& sequence, std::span<const std::uint8_t> mask,
								 const GruParams<Scalar>& p, bool keep_steps = true)
	{
		if (static_cast<Eigen::Index>(mask.size()) != sequence.size())
			throw ShapeError("gru: mask length differs from sequence length");
		const Eigen::Index H = p.hidden_size();
		const std::size_t real = mask_prefix_length(mask);

		GruTrace<Scalar> trace;
		Vector<Scalar> h = Vector<Scalar>::Zero(H);
		if (keep_steps)
			trace.steps.reserve(real);
		for (std::size_t t = 0; t < real; ++t)
		{
			const Scalar x = sequence[static_cast<Eigen::Index>(t)];
			Vector<Scalar> z = p.w_update.leftCols(H) * h + p.w_update.col(H) * x + p.b_update;
			z = z.unaryExpr([](Scalar v) { return sigmoid(v); });
			Vector<Scalar> r = p.w_reset.leftCols(H) * h + p.w_reset.col(H) * x + p.b_reset;
			r = r.unaryExpr([](Scalar v) { return sigmoid(v); });
			const Vector<Scalar> rh = r.cwiseProduct(h);
			Vector<Scalar> c = p.w_candidate.leftCols(H) * rh + p.w_candidate.col(H) * x + p.b_candidate;
			c = c.array().tanh();
			Vector<Scalar> h_next = (Scalar(1) - z.array()) * h.array() + z.array() * c.array();
			if (keep_steps)
				trace.steps.push_back({std::move(h), std::move(z), std::move(r), std::move(c)});
			h = std::move(h_next);
		}
		trace.final_state = std::move(h);
		return trace;
	}

	template <typename Scalar>
	struct GruGrads
	{
		GruParams<Scalar> params;
		Vector<Scalar> input; ///< gradient w.r.t. each sequence element (zero where masked)
	};

	/// Backprop through time from the gradient on the final state.
	template <typename Scalar>
	GruGrads<Scalar> gru_backward(const Vector<Scalar>& sequence, const GruParams<Scalar>& p,
								  const GruTrace<Scalar>& trace, const Vector<Scalar>& grad_final)
	{
		const Eigen::Index H = p.hidden_size();
		GruGrads<Scalar> g;
		g.params.w_update = Matrix<Scalar>::Zero(H, H + 1);
		g.params.w_reset = Matrix<Scalar>::Zero(H, H + 1);
		g.params.w_candidate = Matrix<Scalar>::Zero(H, H + 1);
		g.params.b_update = Vector<Scalar>::Zero(H);
		g.params.b_reset = Vector<Scalar>::Zero(H);
		g.params.b_candidate = Vector<Scalar>::Zero(H);
		g.input = Vector<Scalar>::Zero(sequence.size());

		Vector<Scalar> dh = grad_final;
		for (std::size_t step = trace.steps.size(); step-- > 0;)
		{
			const auto& s = trace.steps[step];
			const Scalar x = sequence[static_cast<Eigen::Index>(step)];
			const auto z = s.update.array();
			const auto r = s.reset.array();
			const auto c = s.candidate.array();

			const Vector<Scalar> dc = dh.array() * z;
			const Vector<Scalar> dz = dh.array() * (c - s.h_prev.array());
			Vector<Scalar> dh_prev = dh.array() * (Scalar(1) - z);

			const Vector<Scalar> da_c = dc.array() * (Scalar(1) - c.square());
			const Vector<Scalar> rh = s.reset.cwiseProduct(s.h_prev);
			g.params.w_candidate.leftCols(H).noalias() += da_c * rh.transpose();
			g.params.w_candidate.col(H) += da_c * x;
			g.params.b_candidate += da_c;
			const Vector<Scalar> drh = p.w_candidate.leftCols(H).transpose() * da_c;
			const Vector<Scalar> dr = drh.cwiseProduct(s.h_prev);
			dh_prev += drh.cwiseProduct(s.reset);

			const Vector<Scalar> da_r = dr.array() * r * (Scalar(1) - r);
			g.params.w_reset.leftCols(H).noalias() += da_r * s.h_prev.transpose();
			g.params.w_reset.col(H) += da_r * x;
			g.params.b_reset += da_r;
			dh_prev.noalias() += p.w_reset.leftCols(H).transpose() * da_r;

			const Vector<Scalar> da_z = dz.array() * z * (Scalar(1) - z);
			g.params.w_update.leftCols(H).noalias() += da_z * s.h_prev.transpose();
			g.params.w_update.col(H) += da_z * x;
			g.params.b_update += da_z;
			dh_prev.noalias() += p.w_update.leftCols(H).transpose() * da_z;

			g.input[static_cast<Eigen::Index>(step)] =
				p.w_candidate.col(H).dot(da_c) + p.w_reset.col(H).dot(da_r) + p.w_update.col(H).dot(da_z);
			dh = std::move(dh_prev);
		}
		return g;
	}

	// -------------------------------------------------------------- BCE head

	/// Binary cross-entropy of sigmoid(logit), computed from the logit.
	template <typename Scalar>
	Scalar bce_with_logit(Scalar logit, bool target)
	{
		using std::abs;
		using std::exp;
		using std::log1p;
		using std::max;
		return max(logit, Scalar(0)) - (target ? logit : Scalar(0)) + log1p(exp(-abs(logit)));
	}

	/// d loss / d logit = sigmoid(logit) - target.
	template <typename Scalar>
	Scalar bce_logit_gradient(Scalar logit, bool target)
	{
		return sigmoid(logit) - (target ? Scalar(1) : Scalar(0));
	}

	// ---------------------------------------------------------------- update

	/// theta <- theta - lr * grad, tensor by tensor.
	template <typename Scalar>
	void sgd_step(std::vector<Matrix<Scalar>>& params, const std::vector<Matrix<Scalar>>& grads, Scalar learning_rate)
	{
		if (params.size() != grads.size())
			throw ShapeError("sgd: parameter and gradient tensor counts differ");
		for (std::size_t i = 0; i < params.size(); ++i)
		{
			if (params[i].rows() != grads[i].rows() || params[i].cols() != grads[i].cols())
				throw ShapeError("sgd: gradient shape mismatch at tensor " + std::to_string(i));
			params[i].noalias() -= learning_rate * grads[i];
		}
	}
} // namespace aae::nn
