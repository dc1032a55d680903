#pragma once

#include "aae/features.hpp"
#include "aae/rng.hpp"

#include <vector>

namespace aae::testing
{
	inline EvaluationInstance make_instance(const Eigen::VectorXd& v, std::optional<bool> label)
	{
		EvaluationInstance inst;
		inst.vector = v;
		inst.mask.assign(static_cast<std::size_t>(v.size()), 1);
		inst.label = label;
		inst.provenance.instance_id = "t";
		return inst;
	}

	/// Label is the sign of one feature, which sits well away from zero.
	/// The feature sits near the end; at len = 80 the SCNN, DCNN and GRU all see it
	/// (shorter inputs can lose it to a dropped pooling remainder).
	inline std::vector<EvaluationInstance> separable_corpus(std::size_t n, Eigen::Index len, std::uint64_t seed)
	{
		Rng rng(seed);
		std::vector<EvaluationInstance> out;
		for (std::size_t i = 0; i < n; ++i)
		{
			Eigen::VectorXd v(len);
			for (Eigen::Index j = 0; j < len; ++j)
				v[j] = rng.uniform(0.0, 1.0);
			const bool positive = rng.bernoulli(0.5);
			v[len - 4] = (positive ? 1.0 : -1.0) * rng.uniform(0.5, 1.0);
			out.push_back(make_instance(v, positive));
		}
		return out;
	}
} // namespace aae::testing
