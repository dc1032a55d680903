#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>

namespace aae
{
	/// SplitMix64 mix of (seed, stream); gives independent sub-seeds.
	constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
	{
		std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
		return z ^ (z >> 31);
	}

	/// Seeded generator with platform-independent draws.
	///
	/// std::mt19937_64 output is fixed by the standard, but the std::*_distribution
	/// adaptors are not, so all draws are derived from raw engine bits here.
	class Rng
	{
	public:
		explicit Rng(std::uint64_t seed) : engine_(seed) {}

		std::uint64_t bits() { return engine_(); }

		// Uniform in [0, 1).
		double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

		double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

		// Uniform integer in [lo, hi], unbiased by rejection.
		std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
		{
			const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
			if (span == 0)
				return static_cast<std::int64_t>(engine_());
			const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
			std::uint64_t x;
			do
			{
				x = engine_();
			} while (x >= limit);
			return lo + static_cast<std::int64_t>(x % span);
		}

		// Unit-rate exponential; used for Dirichlet(1) simplex draws.
		double exponential() { return -std::log1p(-uniform()); }

		bool bernoulli(double p) { return uniform() < p; }

		template <typename T>
		void shuffle(std::span<T> items)
		{
			for (std::size_t i = items.size(); i > 1; --i)
			{
				const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i - 1)));
				std::swap(items[i - 1], items[j]);
			}
		}

	private:
		std::mt19937_64 engine_;
	};
} // namespace aae
