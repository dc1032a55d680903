#pragma once

#include "aae/classifiers.hpp"
#include "aae/features.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace aae
{
	/// Fraction of hard-label matches. Throws ValidationError on an empty set.
	double evaluate(const Network& net, std::span<const EvaluationInstance> instances);

	/// max(p, 1 - p)
	inline double confidence(double probability) { return probability >= 0.5 ? probability : 1.0 - probability; }

	enum class SamplingMode
	{
		uniform,
		least_confident, ///< lowest max(p, 1-p) first, ties by pool order
	};

	struct ActiveOptions
	{
		double threshold = 0.9;        ///< T, retire u from U once confidence >= T
		double sample_fraction = 0.1;  ///< of the initial pool, per round
		std::size_t max_rounds = 20;
		std::uint64_t seed = 0;
		SamplingMode sampling = SamplingMode::uniform;
		TrainOptions train;            ///< used for every retraining on L
	};

	struct RoundReport
	{
		std::size_t round = 0;
		std::size_t labels_used = 0;
		std::size_t labeled = 0;
		std::size_t unlabeled = 0; ///< still in U after retirement
		std::size_t retired = 0;   ///< cumulative
		double accuracy_labeled = 0.0;
		double accuracy_unlabeled = 0.0; ///< on retired + remaining, against hidden labels; NaN when both are empty
	};

	struct ActiveResult
	{
		std::vector<RoundReport> rounds;
		std::size_t labels_used = 0;
		std::vector<std::size_t> labeled;   ///< pool indices in L
		std::vector<std::size_t> unlabeled; ///< pool indices never labeled (retired or remaining)
	};

	/// Sample from U, reveal and move to L, retrain on all of L, retire the
	/// confident part of U; until U is empty or max_rounds. Pool labels are
	/// only read for sampled instances and for the reported accuracies.
	ActiveResult active_loop(Network& net, std::span<const EvaluationInstance> pool, const ActiveOptions& options);

	/// Builds a fresh network of `arch` sized to the pool, then runs the loop.
	ActiveResult active_loop(ArchitectureId arch, std::span<const EvaluationInstance> pool, const ActiveOptions& options,
							 Network* trained = nullptr);

	void write_round_report(std::ostream& out, std::span<const RoundReport> rounds);

	struct CrossValidation
	{
		std::vector<double> fold_accuracy;
		std::vector<std::size_t> fold_size;
		double mean = 0.0;
		double stddev = 0.0; ///< population
	};

	/// Seeded shuffle, k contiguous folds (sizes differ by at most one).
	CrossValidation cross_validate(std::span<const EvaluationInstance> corpus, ArchitectureId arch, std::size_t k,
								   std::uint64_t seed, const TrainOptions& train);

	void write_cv_report(std::ostream& out, ArchitectureId arch, const CrossValidation& cv);

	struct SweepRow
	{
		double fraction = 0.0;
		std::size_t train_size = 0;
		double accuracy_labeled = 0.0;   ///< on the training split
		double accuracy_unlabeled = 0.0; ///< on the held-out remainder
	};

	/// For each fraction, trains on a seeded split of that size and scores both sides.
	std::vector<SweepRow> train_fraction_sweep(std::span<const EvaluationInstance> corpus, ArchitectureId arch,
											   std::span<const double> fractions, std::uint64_t seed,
											   const TrainOptions& train);

	struct SweepTable
	{
		std::vector<ArchitectureId> archs;
		std::vector<std::vector<SweepRow>> rows; ///< rows[arch][fraction]
	};

	/// One row per fraction with L/U accuracy columns per architecture.
	void write_sweep_table(std::ostream& out, const SweepTable& table);
} // namespace aae
