// Acceptance suite: one PASS/FAIL line per criterion. Exit status 0 only when all pass.
//
// usage: aae_acceptance <path-to-aae-cli> <work-dir> [criterion ids...]

#include "aae/active.hpp"
#include "aae/classifiers.hpp"
#include "aae/corpus.hpp"
#include "aae/oracle.hpp"
#include "aae/rng.hpp"

#include "gradcheck.hpp"
#include "reference_cost.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace aae;
namespace fs = std::filesystem;

namespace
{
	using Clock = std::chrono::steady_clock;

	double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

	std::string fmt(const char* spec, double v)
	{
		char buf[64];
		std::snprintf(buf, sizeof buf, spec, v);
		return buf;
	}

	struct Verdict
	{
		bool pass = false;
		std::string detail;
	};

	constexpr std::uint64_t kSeed = 1;
	constexpr std::size_t kCorpusSize = 2000;
	constexpr std::size_t kTrainSize = 1200; // 60 %
	constexpr std::size_t kEpochBudget = 200;
	constexpr double kTargetAccuracy = 0.85;

	struct ArchPlan
	{
		ArchitectureId arch;
		double learning_rate;
		std::size_t batch_size;
	};

	const std::vector<ArchPlan> kPlans{
		{ArchitectureId::SCNN, 0.1, 32},
		{ArchitectureId::DCNN, 0.1, 32},
		{ArchitectureId::GRU, 0.1, 16},
	};

	std::string arch_name(ArchitectureId a) { return std::string(to_string(a)); }

	// ------------------------------------------------------------------ 1

	Verdict gradient_fidelity()
	{
		const auto t0 = Clock::now();
		double worst = 0.0;
		std::size_t checked = 0;
		std::string per_kind;
		bool pass = true;
		for (const auto& c : testing::gradient_cases())
		{
			const auto r = testing::run_gradient_case(c, 20, 4242);
			worst = std::max(worst, r.worst);
			checked += r.checked;
			pass = pass && r.worst < 1e-4 && r.checked > 0;
			per_kind += std::string(per_kind.empty() ? "" : ", ") + c.name + " " + fmt("%.1e", r.worst);
		}
		const double dt = seconds_since(t0);
		pass = pass && dt < 60.0;
		return {pass, "worst relative error " + fmt("%.2e", worst) + " over " + std::to_string(checked)
						  + " parameter checks, 20 instances per kind (" + per_kind + "); " + fmt("%.1f", dt) + " s"};
	}

	// ------------------------------------------------------------------ 2

	Verdict architecture_shapes()
	{
		Rng rng(7);
		Eigen::VectorXd x(256);
		for (Eigen::Index i = 0; i < x.size(); ++i)
			x[i] = rng.uniform(-1.0, 1.0);
		auto lengths = [&](ArchitectureId arch, std::size_t layers) {
			const auto pass = build(arch, 256, 1).forward(x);
			std::vector<Eigen::Index> out;
			for (std::size_t l = 0; l < layers; ++l)
				out.push_back(pass.layers[l].output.cols());
			out.push_back(pass.layers[layers].output.size());
			return out;
		};
		const auto scnn = lengths(ArchitectureId::SCNN, 6);
		const auto dcnn = lengths(ArchitectureId::DCNN, 9);
		const std::vector<Eigen::Index> want_scnn{254, 252, 84, 82, 80, 26, 416};
		const std::vector<Eigen::Index> want_dcnn{254, 252, 84, 82, 80, 26, 24, 22, 7, 112};
		auto show = [](const std::vector<Eigen::Index>& v) {
			std::string s;
			for (std::size_t i = 0; i < v.size(); ++i)
				s += (i ? (i + 1 == v.size() ? " | flat " : "/") : "") + std::to_string(v[i]);
			return s;
		};
		return {scnn == want_scnn && dcnn == want_dcnn, "SCNN " + show(scnn) + "; DCNN " + show(dcnn)};
	}

	// ------------------------------------------------------------------ 3

	Verdict oracle_properties()
	{
		Rng rng(2718);
		const auto p = CostParams::defaults();
		std::size_t antisym = 0, ties = 0, mono = 0, brute = 0, mono_checks = 0;
		double worst_rel = 0.0;
		for (int trial = 0; trial < 100; ++trial)
		{
			const auto g = generate_graph_stats("random", rng.bits());
			const std::size_t np = g.num_property_types;
			const auto cw = testing::random_counted_workload(np, rng);
			const auto& w = cw.profile;
			const auto a = testing::random_storage(np, rng);
			const auto b = testing::random_storage(np, rng);

			if (label(g, w, a, b, p) && label(g, w, b, a, p))
				++antisym;
			if (label(g, w, a, a, p))
				++ties;

			for (const auto& s : {a, b})
			{
				const double ref = testing::brute_force_workload_cost(cw.counts, g, s, w.property_freq, p);
				const double rel = std::abs(workload_cost(g, w, s, p) - ref) / ref;
				worst_rel = std::max(worst_rel, rel);
				if (!(rel <= 1e-12))
					++brute;
			}

			auto no_create = w;
			const double create_mass = no_create.op_rates[0] + no_create.op_rates[1] + no_create.op_rates[2];
			no_create.op_rates[0] = no_create.op_rates[1] = no_create.op_rates[2] = 0.0;
			no_create.op_rates[3] += create_mass;
			for (std::size_t i = 0; i < np; ++i)
			{
				if (a.index_bits[i])
					continue;
				auto more = a;
				more.index_bits[i] = true;
				++mono_checks;
				if (workload_cost(g, no_create, more, p) > workload_cost(g, no_create, a, p))
					++mono;
			}
		}
		const bool pass = antisym == 0 && ties == 0 && mono == 0 && brute == 0;
		return {pass, "100 random instances: antisymmetry violations " + std::to_string(antisym) + ", tie->1 labels "
						  + std::to_string(ties) + ", monotonicity violations " + std::to_string(mono) + "/"
						  + std::to_string(mono_checks) + ", per-query brute-force mismatches " + std::to_string(brute)
						  + " (worst relative difference " + fmt("%.1e", worst_rel) + ")"};
	}

	// ------------------------------------------------------------------ 4

	struct Learned
	{
		ArchPlan plan;
		std::optional<Network> net;
		std::size_t epochs = 0;
		double test_accuracy = 0.0;
		bool reached = false;
	};

	struct Shared
	{
		std::vector<EvaluationInstance> corpus;
		std::vector<EvaluationInstance> train_split;
		std::vector<EvaluationInstance> test_split;
		std::vector<Learned> learned;
		double learn_seconds = 0.0;
	};

	Shared& shared()
	{
		static Shared s = [] {
			Shared s;
			CorpusOptions co;
			co.profile = "freebase-small";
			co.seed = kSeed;
			co.count = kCorpusSize;
			s.corpus = generate_corpus(co).instances();
			s.train_split.assign(s.corpus.begin(), s.corpus.begin() + kTrainSize);
			s.test_split.assign(s.corpus.begin() + kTrainSize, s.corpus.end());
			return s;
		}();
		return s;
	}

	/// Trains epoch by epoch and stops at the first epoch whose held-out accuracy reaches the target.
	void learn_all()
	{
		auto& s = shared();
		if (!s.learned.empty())
			return;
		const auto t0 = Clock::now();
		for (const auto& plan : kPlans)
		{
			Learned l{plan, build(plan.arch, s.corpus.front().vector.size(), derive_seed(kSeed, 10))};
			TrainOptions opts;
			opts.epochs = 1;
			opts.learning_rate = plan.learning_rate;
			opts.batch_size = plan.batch_size;
			opts.early_stop = false;
			for (std::size_t e = 1; e <= kEpochBudget; ++e)
			{
				opts.seed = derive_seed(kSeed, 100 + e);
				train(*l.net, s.train_split, opts);
				l.epochs = e;
				l.test_accuracy = evaluate(*l.net, s.test_split);
				if (l.test_accuracy >= kTargetAccuracy)
				{
					l.reached = true;
					break;
				}
			}
			std::cout << "    " << arch_name(plan.arch) << ": test accuracy " << fmt("%.4f", l.test_accuracy)
					  << " after " << l.epochs << " epochs (lr " << plan.learning_rate << ", batch " << plan.batch_size
					  << ")" << std::endl;
			s.learned.push_back(std::move(l));
		}
		s.learn_seconds = seconds_since(t0);
	}

	Verdict learnability()
	{
		learn_all();
		const auto& s = shared();
		std::size_t positives = 0;
		for (const auto& inst : s.corpus)
			positives += *inst.label ? 1 : 0;
		bool pass = s.learn_seconds < 600.0;
		std::string detail = std::to_string(kCorpusSize) + " freebase-small instances (" + fmt("%.1f", 100.0 * positives / kCorpusSize)
							 + " % positive), train " + std::to_string(kTrainSize) + " / test "
							 + std::to_string(s.test_split.size()) + ":";
		for (const auto& l : s.learned)
		{
			pass = pass && l.reached;
			detail += " " + arch_name(l.plan.arch) + " " + fmt("%.4f", l.test_accuracy) + " @ epoch " + std::to_string(l.epochs) + ";";
		}
		detail += " " + fmt("%.1f", s.learn_seconds) + " s total";
		return {pass, detail};
	}

	// ------------------------------------------------------------------ 5

	Verdict label_savings(const fs::path& work)
	{
		learn_all();
		const auto& s = shared();
		const auto t0 = Clock::now();
		bool pass = true;
		std::string detail = "pool " + std::to_string(kTrainSize) + ", T=0.9, f=0.1, 20 rounds:";
		for (const auto& l : s.learned)
		{
			ActiveOptions opts;
			opts.threshold = 0.9;
			opts.sample_fraction = 0.1;
			opts.max_rounds = 20;
			opts.seed = derive_seed(kSeed, 500);
			opts.train.epochs = 50;
			opts.train.learning_rate = l.plan.learning_rate;
			opts.train.batch_size = l.plan.batch_size;
			opts.train.seed = derive_seed(kSeed, 501);
			Network net = build(l.plan.arch, s.corpus.front().vector.size(), derive_seed(kSeed, 10));
			const auto r = active_loop(net, s.train_split, opts);
			const double acc = evaluate(net, s.test_split);
			const double share = static_cast<double>(r.labels_used) / static_cast<double>(kTrainSize);
			const bool ok = share <= 0.60 && acc >= l.test_accuracy - 0.05;
			pass = pass && ok;
			detail += " " + arch_name(l.plan.arch) + " labels " + std::to_string(r.labels_used) + " ("
					  + fmt("%.0f", 100 * share) + " %), " + std::to_string(r.rounds.size()) + " rounds, test "
					  + fmt("%.4f", acc) + " vs baseline " + fmt("%.4f", l.test_accuracy) + ", U "
					  + fmt("%.4f", r.rounds.back().accuracy_unlabeled) + (ok ? ";" : " [miss];");
			std::ofstream report(work / ("active_" + arch_name(l.plan.arch) + ".csv"));
			write_round_report(report, r.rounds);
		}

		// Table-6-shaped sweep, reported alongside.
		const std::vector<double> fractions{0.41, 0.49, 0.58};
		SweepTable table;
		for (const auto& l : s.learned)
		{
			TrainOptions t;
			t.epochs = 40;
			t.learning_rate = l.plan.learning_rate;
			t.batch_size = l.plan.batch_size;
			table.archs.push_back(l.plan.arch);
			table.rows.push_back(train_fraction_sweep(s.corpus, l.plan.arch, fractions, derive_seed(kSeed, 600), t));
		}
		std::ostringstream sweep;
		write_sweep_table(sweep, table);
		std::ofstream(work / "sweep.csv") << sweep.str();
		std::istringstream lines(sweep.str());
		for (std::string line; std::getline(lines, line);)
			std::cout << "    " << line << '\n';
		detail += " " + fmt("%.1f", seconds_since(t0)) + " s";
		return {pass, detail};
	}

	// ------------------------------------------------------------------ 6

	Verdict latency()
	{
		CorpusOptions co;
		co.profile = "ldbc";
		co.seed = kSeed;
		co.count = 50;
		const auto instances = generate_corpus(co).instances();
		bool pass = instances.front().vector.size() <= 320;
		std::string detail = "50 ldbc instances at input length " + std::to_string(instances.front().vector.size()) + ":";
		for (auto arch : {ArchitectureId::SCNN, ArchitectureId::DCNN, ArchitectureId::GRU})
		{
			const Network net = build(arch, instances.front().vector.size(), 3);
			double sink = predict(net, instances.front());
			const auto t0 = Clock::now();
			for (const auto& inst : instances)
				sink += predict(net, inst);
			const double mean = seconds_since(t0) / static_cast<double>(instances.size());
			pass = pass && mean < 0.050 && std::isfinite(sink);
			detail += " " + arch_name(arch) + " " + fmt("%.3f", mean * 1e3) + " ms;";
		}
		return {pass, detail};
	}

	// ------------------------------------------------------------------ 7

	Verdict cross_validation(const fs::path& work)
	{
		const auto& s = shared();
		const auto t0 = Clock::now();
		const auto& plan = kPlans.front();
		TrainOptions t;
		t.epochs = 60;
		t.learning_rate = plan.learning_rate;
		t.batch_size = plan.batch_size;
		const auto cv = cross_validate(s.corpus, plan.arch, 5, derive_seed(kSeed, 700), t);
		std::ofstream report(work / "cv.csv");
		write_cv_report(report, plan.arch, cv);
		std::string folds;
		for (double a : cv.fold_accuracy)
			folds += (folds.empty() ? "" : " ") + fmt("%.4f", a);
		return {cv.mean >= 0.80 && cv.stddev <= 0.10,
				arch_name(plan.arch) + " k=5 on the learnability corpus: folds [" + folds + "], mean " + fmt("%.4f", cv.mean)
					+ ", std " + fmt("%.4f", cv.stddev) + "; " + fmt("%.1f", seconds_since(t0)) + " s"};
	}

	// ------------------------------------------------------------------ 8

	int run(const std::string& command) { return std::system(command.c_str()); }

	bool same_bytes(const fs::path& a, const fs::path& b)
	{
		std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
		const std::string sa((std::istreambuf_iterator<char>(fa)), {});
		const std::string sb((std::istreambuf_iterator<char>(fb)), {});
		return !sa.empty() && sa == sb;
	}

	Verdict determinism(const std::string& cli, const fs::path& work)
	{
		const fs::path dir = work / "determinism";
		fs::create_directories(dir);
		auto p = [&](const std::string& name) { return (dir / name).string(); };
		std::size_t compared = 0, identical = 0;
		bool ran = true;
		for (int rep : {1, 2})
		{
			const auto r = std::to_string(rep);
			ran = ran && run(cli + " gen --count 200 --seed 7 --out " + p("corpus" + r + ".jsonl")) == 0;
			for (const char* arch : {"scnn", "dcnn", "gru"})
				ran = ran
					  && run(cli + " train --corpus " + p("corpus1.jsonl") + " --arch " + arch
							 + " --epochs 3 --seed 7 --log " + p(std::string(arch) + "_log" + r + ".csv") + " --out "
							 + p(std::string(arch) + "_params" + r + ".txt"))
							 == 0;
		}
		std::vector<std::string> stems{"corpus%.jsonl"};
		for (const char* arch : {"scnn", "dcnn", "gru"})
		{
			stems.push_back(std::string(arch) + "_log%.csv");
			stems.push_back(std::string(arch) + "_params%.txt");
		}
		for (const auto& stem : stems)
		{
			auto name = [&](char c) {
				std::string n = stem;
				n[n.find('%')] = c;
				return dir / n;
			};
			++compared;
			identical += same_bytes(name('1'), name('2')) ? 1 : 0;
		}
		return {ran && identical == compared,
				"gen and train (3 architectures) rerun with seed 7: " + std::to_string(identical) + "/"
					+ std::to_string(compared) + " output files byte-identical"};
	}
} // namespace

int main(int argc, char** argv)
{
	if (argc < 3)
	{
		std::cerr << "usage: aae_acceptance <aae-cli> <work-dir> [criterion ...]\n";
		return 2;
	}
	const std::string cli = argv[1];
	const fs::path work = argv[2];
	fs::create_directories(work);
	std::set<int> only;
	for (int i = 3; i < argc; ++i)
		only.insert(std::atoi(argv[i]));

	struct Criterion
	{
		int id;
		const char* name;
		std::function<Verdict()> check;
	};
	const std::vector<Criterion> criteria{
		{1, "gradient fidelity", gradient_fidelity},
		{2, "architecture shapes", architecture_shapes},
		{3, "oracle properties", oracle_properties},
		{4, "learnability", learnability},
		{5, "active label savings", [&] { return label_savings(work); }},
		{6, "prediction latency", latency},
		{7, "cross-validation", [&] { return cross_validation(work); }},
		{8, "determinism", [&] { return determinism(cli, work); }},
	};

	std::vector<std::string> summary;
	bool all = true;
	for (const auto& c : criteria)
	{
		if (!only.empty() && !only.count(c.id))
			continue;
		std::cout << "criterion " << c.id << " (" << c.name << ") running" << std::endl;
		Verdict v;
		try
		{
			v = c.check();
		}
		catch (const std::exception& e)
		{
			v = {false, std::string("exception: ") + e.what()};
		}
		all = all && v.pass;
		const std::string line =
			std::string(v.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + " " + c.name + ": " + v.detail;
		std::cout << line << std::endl;
		summary.push_back(line);
	}
	std::cout << "\nacceptance summary\n";
	for (const auto& line : summary)
		std::cout << line << '\n';
	return all ? 0 : 1;
}
