#include "aae/active.hpp"

#include "aae/error.hpp"
#include "aae/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace aae
{
	namespace
	{
		std::vector<EvaluationInstance> gather(std::span<const EvaluationInstance> pool, std::span<const std::size_t> idx)
		{
			std::vector<EvaluationInstance> out;
			out.reserve(idx.size());
			for (auto i : idx)
				out.push_back(pool[i]);
			return out;
		}

		double accuracy_of(const Network& net, std::span<const EvaluationInstance> pool, std::span<const std::size_t> idx)
		{
			if (idx.empty())
				return std::numeric_limits<double>::quiet_NaN();
			std::size_t correct = 0;
			for (auto i : idx)
				correct += hard_label(predict(net, pool[i])) == pool[i].label.value() ? 1 : 0;
			return static_cast<double>(correct) / static_cast<double>(idx.size());
		}

		void require_labeled(std::span<const EvaluationInstance> instances, const char* what)
		{
			for (const auto& inst : instances)
				if (!inst.label)
					throw ValidationError(std::string(what) + ": every instance needs a (hidden) label");
		}

		std::string fmt(double v)
		{
			char buf[32];
			std::snprintf(buf, sizeof buf, "%.6f", v);
			return buf;
		}
	} // namespace

	double evaluate(const Network& net, std::span<const EvaluationInstance> instances)
	{
		if (instances.empty())
			throw ValidationError("evaluate: empty instance set");
		require_labeled(instances, "evaluate");
		std::size_t correct = 0;
		for (const auto& inst : instances)
			correct += hard_label(predict(net, inst)) == *inst.label ? 1 : 0;
		return static_cast<double>(correct) / static_cast<double>(instances.size());
	}

	ActiveResult active_loop(Network& net, std::span<const EvaluationInstance> pool, const ActiveOptions& options)
	{
		if (pool.empty())
			throw ValidationError("active: pool is empty");
		if (!(options.threshold > 0.5 && options.threshold <= 1.0))
			throw ValidationError("active: threshold must lie in (0.5, 1]");
		if (!(options.sample_fraction > 0.0 && options.sample_fraction <= 1.0))
			throw ValidationError("active: sample_fraction must lie in (0, 1]");
		if (options.max_rounds < 1)
			throw ValidationError("active: max_rounds must be >= 1");
		require_labeled(pool, "active");

		const auto per_round = static_cast<std::size_t>(std::ceil(options.sample_fraction * static_cast<double>(pool.size())));
		Rng rng(options.seed);

		ActiveResult result;
		std::vector<std::size_t> unlabeled(pool.size());
		std::iota(unlabeled.begin(), unlabeled.end(), std::size_t{0});
		std::vector<std::size_t> retired;
		std::vector<std::size_t>& labeled = result.labeled;

		for (std::size_t round = 1; round <= options.max_rounds && !unlabeled.empty(); ++round)
		{
			const std::size_t take = std::min(per_round, unlabeled.size());
			if (options.sampling == SamplingMode::uniform)
			{
				rng.shuffle(std::span<std::size_t>(unlabeled));
			}
			else
			{
				std::vector<std::pair<double, std::size_t>> scored;
				scored.reserve(unlabeled.size());
				for (auto i : unlabeled)
					scored.emplace_back(confidence(predict(net, pool[i])), i);
				std::sort(scored.begin(), scored.end());
				for (std::size_t j = 0; j < scored.size(); ++j)
					unlabeled[j] = scored[j].second;
			}
			labeled.insert(labeled.end(), unlabeled.begin(), unlabeled.begin() + static_cast<std::ptrdiff_t>(take));
			unlabeled.erase(unlabeled.begin(), unlabeled.begin() + static_cast<std::ptrdiff_t>(take));
			std::sort(unlabeled.begin(), unlabeled.end());

			TrainOptions retrain = options.train;
			retrain.seed = derive_seed(options.train.seed, round);
			train(net, gather(pool, labeled), retrain);

			std::vector<std::size_t> keep;
			for (auto i : unlabeled)
			{
				if (confidence(predict(net, pool[i])) >= options.threshold)
					retired.push_back(i);
				else
					keep.push_back(i);
			}
			unlabeled = std::move(keep);

			std::vector<std::size_t> not_labeled = retired;
			not_labeled.insert(not_labeled.end(), unlabeled.begin(), unlabeled.end());
			RoundReport r;
			r.round = round;
			r.labels_used = labeled.size();
			r.labeled = labeled.size();
			r.unlabeled = unlabeled.size();
			r.retired = retired.size();
			r.accuracy_labeled = accuracy_of(net, pool, labeled);
			r.accuracy_unlabeled = accuracy_of(net, pool, not_labeled);
			result.rounds.push_back(r);
		}

		result.labels_used = labeled.size();
		result.unlabeled = retired;
		result.unlabeled.insert(result.unlabeled.end(), unlabeled.begin(), unlabeled.end());
		std::sort(result.unlabeled.begin(), result.unlabeled.end());
		return result;
	}

	ActiveResult active_loop(ArchitectureId arch, std::span<const EvaluationInstance> pool, const ActiveOptions& options,
							 Network* trained)
	{
		if (pool.empty())
			throw ValidationError("active: pool is empty");
		Network net = build(arch, pool.front().vector.size(), derive_seed(options.seed, 0x5eed));
		auto result = active_loop(net, pool, options);
		if (trained)
			*trained = std::move(net);
		return result;
	}

	void write_round_report(std::ostream& out, std::span<const RoundReport> rounds)
	{
		out << "round,labels_used,labeled,unlabeled,retired,accuracy_labeled,accuracy_unlabeled\n";
		for (const auto& r : rounds)
			out << r.round << ',' << r.labels_used << ',' << r.labeled << ',' << r.unlabeled << ',' << r.retired << ','
				<< fmt(r.accuracy_labeled) << ',' << fmt(r.accuracy_unlabeled) << '\n';
	}

	CrossValidation cross_validate(std::span<const EvaluationInstance> corpus, ArchitectureId arch, std::size_t k,
								   std::uint64_t seed, const TrainOptions& train_options)
	{
		if (k < 2)
			throw ValidationError("cross-validation: k must be >= 2");
		if (corpus.size() < k)
			throw ValidationError("cross-validation: corpus of " + std::to_string(corpus.size())
								  + " instances is smaller than k = " + std::to_string(k));
		require_labeled(corpus, "cross-validation");

		std::vector<std::size_t> order(corpus.size());
		std::iota(order.begin(), order.end(), std::size_t{0});
		Rng rng(seed);
		rng.shuffle(std::span<std::size_t>(order));

		CrossValidation cv;
		const std::size_t n = corpus.size();
		for (std::size_t f = 0; f < k; ++f)
		{
			const std::size_t lo = f * n / k;
			const std::size_t hi = (f + 1) * n / k;
			std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(lo));
			train_idx.insert(train_idx.end(), order.begin() + static_cast<std::ptrdiff_t>(hi), order.end());
			const std::span<const std::size_t> test_idx(order.data() + lo, hi - lo);

			Network net = build(arch, corpus.front().vector.size(), derive_seed(seed, 2 * f + 1));
			TrainOptions opts = train_options;
			opts.seed = derive_seed(seed, 2 * f + 2);
			train(net, gather(corpus, train_idx), opts);
			cv.fold_accuracy.push_back(evaluate(net, gather(corpus, test_idx)));
			cv.fold_size.push_back(test_idx.size());
		}

		cv.mean = std::accumulate(cv.fold_accuracy.begin(), cv.fold_accuracy.end(), 0.0) / static_cast<double>(k);
		double var = 0.0;
		for (double a : cv.fold_accuracy)
			var += (a - cv.mean) * (a - cv.mean);
		cv.stddev = std::sqrt(var / static_cast<double>(k));
		return cv;
	}

	void write_cv_report(std::ostream& out, ArchitectureId arch, const CrossValidation& cv)
	{
		out << "arch,fold,size,accuracy\n";
		for (std::size_t f = 0; f < cv.fold_accuracy.size(); ++f)
			out << to_string(arch) << ',' << f << ',' << cv.fold_size[f] << ',' << fmt(cv.fold_accuracy[f]) << '\n';
		out << to_string(arch) << ",mean,," << fmt(cv.mean) << '\n';
		out << to_string(arch) << ",std,," << fmt(cv.stddev) << '\n';
	}

	std::vector<SweepRow> train_fraction_sweep(std::span<const EvaluationInstance> corpus, ArchitectureId arch,
											   std::span<const double> fractions, std::uint64_t seed,
											   const TrainOptions& train_options)
	{
		require_labeled(corpus, "sweep");
		std::vector<SweepRow> rows;
		for (std::size_t fi = 0; fi < fractions.size(); ++fi)
		{
			const double fraction = fractions[fi];
			if (!(fraction > 0.0 && fraction < 1.0))
				throw ValidationError("sweep: fractions must lie in (0, 1)");
			const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(corpus.size())));
			if (n_train == 0 || n_train >= corpus.size())
				throw ValidationError("sweep: fraction " + std::to_string(fraction) + " leaves an empty split");

			std::vector<std::size_t> order(corpus.size());
			std::iota(order.begin(), order.end(), std::size_t{0});
			Rng rng(derive_seed(seed, 3 * fi));
			rng.shuffle(std::span<std::size_t>(order));
			const auto train_set = gather(corpus, std::span<const std::size_t>(order.data(), n_train));
			const auto test_set = gather(corpus, std::span<const std::size_t>(order.data() + n_train, order.size() - n_train));

			Network net = build(arch, corpus.front().vector.size(), derive_seed(seed, 3 * fi + 1));
			TrainOptions opts = train_options;
			opts.seed = derive_seed(seed, 3 * fi + 2);
			train(net, train_set, opts);
			rows.push_back({fraction, n_train, evaluate(net, train_set), evaluate(net, test_set)});
		}
		return rows;
	}

	void write_sweep_table(std::ostream& out, const SweepTable& table)
	{
		out << "fraction,train_size";
		for (auto arch : table.archs)
		{
			std::string name(to_string(arch));
			std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
			out << ',' << name << "_L," << name << "_U";
		}
		out << '\n';
		if (table.rows.empty())
			return;
		for (std::size_t r = 0; r < table.rows.front().size(); ++r)
		{
			out << fmt(table.rows.front()[r].fraction) << ',' << table.rows.front()[r].train_size;
			for (const auto& per_arch : table.rows)
				out << ',' << fmt(per_arch[r].accuracy_labeled) << ',' << fmt(per_arch[r].accuracy_unlabeled);
			out << '\n';
		}
	}
} // namespace aae
