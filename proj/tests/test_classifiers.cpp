#include "aae/active.hpp"
#include "aae/classifiers.hpp"
#include "aae/error.hpp"
#include "aae/rng.hpp"

#include "doctest.h"
#include "fixtures.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

using namespace aae;

using testing::make_instance;
using testing::separable_corpus;

namespace
{
	std::size_t count_kind(const Network& net, LayerKind k)
	{
		return static_cast<std::size_t>(
			std::count_if(net.layers().begin(), net.layers().end(), [&](const LayerSpec& s) { return s.kind == k; }));
	}
} // namespace

TEST_CASE("architecture names")
{
	CHECK(parse_architecture("scnn") == ArchitectureId::SCNN);
	CHECK(parse_architecture("DCNN") == ArchitectureId::DCNN);
	CHECK(parse_architecture("Gru") == ArchitectureId::GRU);
	CHECK(to_string(ArchitectureId::DCNN) == "DCNN");
	CHECK_THROWS_AS(parse_architecture("lstm"), ValidationError);
}

TEST_CASE("layer shapes at input length 256")
{
	Rng rng(1);
	Eigen::VectorXd x(256);
	for (Eigen::Index i = 0; i < x.size(); ++i)
		x[i] = rng.uniform(-1.0, 1.0);

	SUBCASE("SCNN")
	{
		const Network net = build(ArchitectureId::SCNN, 256, 1);
		CHECK(count_kind(net, LayerKind::conv1d) == 4);
		const auto pass = net.forward(x);
		const std::vector<Eigen::Index> lengths{254, 252, 84, 82, 80, 26};
		for (std::size_t l = 0; l < lengths.size(); ++l)
		{
			CAPTURE(l);
			CHECK(pass.layers[l].output.cols() == lengths[l]);
			CHECK(pass.layers[l].output.rows() == 16);
		}
		CHECK(pass.layers[6].output.size() == 416);
		CHECK(net.params().tensors.back().size() == 1);
		CHECK(net.params().tensors[net.params().tensors.size() - 2].cols() == 416);
	}
	SUBCASE("DCNN")
	{
		const Network net = build(ArchitectureId::DCNN, 256, 1);
		CHECK(count_kind(net, LayerKind::conv1d) == 6);
		const auto pass = net.forward(x);
		const std::vector<Eigen::Index> lengths{254, 252, 84, 82, 80, 26, 24, 22, 7};
		for (std::size_t l = 0; l < lengths.size(); ++l)
		{
			CAPTURE(l);
			CHECK(pass.layers[l].output.cols() == lengths[l]);
		}
		CHECK(pass.layers[9].output.size() == 112);
	}
	SUBCASE("GRU")
	{
		const Network net = build(ArchitectureId::GRU, 256, 1);
		CHECK(count_kind(net, LayerKind::gru) == 1);
		CHECK(net.forward(x).layers[1].output.size() == kDefaultGruHidden);
		CHECK(build(ArchitectureId::GRU, 256, 1, 8).forward(x).layers[1].output.size() == 8);
	}
}

TEST_CASE("too-short inputs fail with a shape error")
{
	CHECK_THROWS_AS(build(ArchitectureId::SCNN, 8, 1), ShapeError);
	CHECK_THROWS_AS(build(ArchitectureId::DCNN, 40, 1), ShapeError);
	CHECK_NOTHROW(build(ArchitectureId::DCNN, 79, 1));
	CHECK_THROWS_AS(build(ArchitectureId::DCNN, 78, 1), ShapeError);
	try
	{
		build(ArchitectureId::SCNN, 8, 1);
	}
	catch (const ShapeError& e)
	{
		CHECK(std::string(e.what()).find("layer") != std::string::npos);
	}
}

TEST_CASE("training memorizes a single instance")
{
	Rng rng(2);
	Eigen::VectorXd v(64);
	for (Eigen::Index i = 0; i < v.size(); ++i)
		v[i] = rng.uniform(-1.0, 1.0);
	for (bool label : {false, true})
	{
		CAPTURE(label);
		const std::vector<EvaluationInstance> corpus(8, make_instance(v, label));
		Network net = build(ArchitectureId::SCNN, 64, 3);
		TrainOptions opts;
		opts.epochs = 50;
		opts.early_stop = false;
		const auto log = train(net, corpus, opts);
		REQUIRE(log.size() == 50);
		CHECK(log.back().accuracy == 1.0);
		CHECK(hard_label(predict(net, corpus.front())) == label);
		for (std::size_t e = 1; e < log.size(); ++e)
			CHECK(log[e].mean_loss <= log[e - 1].mean_loss);
	}
}

TEST_CASE("training is deterministic")
{
	const auto corpus = separable_corpus(40, 32, 4);
	TrainOptions opts;
	opts.epochs = 5;
	opts.seed = 11;
	Network a = build(ArchitectureId::SCNN, 32, 5);
	Network b = build(ArchitectureId::SCNN, 32, 5);
	const auto la = train(a, corpus, opts);
	const auto lb = train(b, corpus, opts);
	REQUIRE(la.size() == lb.size());
	for (std::size_t e = 0; e < la.size(); ++e)
	{
		CHECK(la[e].mean_loss == lb[e].mean_loss);
		CHECK(la[e].accuracy == lb[e].accuracy);
	}
	std::ostringstream sa, sb;
	save_params(sa, a);
	save_params(sb, b);
	CHECK(sa.str() == sb.str());
}

TEST_CASE("a separable corpus is learned by every architecture")
{
	const Eigen::Index len = 80;
	const auto corpus = separable_corpus(200, len, 6);
	for (auto arch : {ArchitectureId::SCNN, ArchitectureId::DCNN, ArchitectureId::GRU})
	{
		CAPTURE(to_string(arch));
		Network net = build(arch, len, 7);
		TrainOptions opts;
		opts.epochs = 100;
		opts.learning_rate = 0.1;
		opts.seed = 8;
		const auto log = train(net, corpus, opts);
		CHECK(log.size() <= 100);
		CHECK(evaluate(net, corpus) >= 0.95);
	}
}

TEST_CASE("early stop on a flat loss")
{
	const auto corpus = separable_corpus(20, 32, 3);
	Network net = build(ArchitectureId::SCNN, 32, 4);
	TrainOptions opts;
	opts.epochs = 50;
	opts.learning_rate = 0.0;
	const auto log = train(net, corpus, opts);
	CHECK(log.size() == 6);
	opts.early_stop = false;
	CHECK(train(net, corpus, opts).size() == 50);
}

TEST_CASE("training input errors")
{
	Network net = build(ArchitectureId::SCNN, 32, 1);
	TrainOptions opts;
	CHECK_THROWS_AS(train(net, std::vector<EvaluationInstance>{}, opts), ValidationError);
	auto mixed = separable_corpus(3, 32, 1);
	mixed.push_back(separable_corpus(1, 33, 2).front());
	CHECK_THROWS_AS(train(net, mixed, opts), ValidationError);
	auto unlabeled = separable_corpus(3, 32, 1);
	unlabeled[1].label.reset();
	CHECK_THROWS_AS(train(net, unlabeled, opts), ValidationError);
}

TEST_CASE("prediction")
{
	const auto corpus = separable_corpus(5, 96, 9);
	SUBCASE("zeroed head gives one half")
	{
		for (auto arch : {ArchitectureId::SCNN, ArchitectureId::DCNN, ArchitectureId::GRU})
		{
			Network net = build(arch, 96, 10);
			net.zero_output_layer();
			for (const auto& inst : corpus)
				CHECK(predict(net, inst) == 0.5);
		}
	}
	SUBCASE("pure function and strictly inside (0, 1)")
	{
		const Network net = build(ArchitectureId::DCNN, 96, 11);
		for (const auto& inst : corpus)
		{
			const double p = predict(net, inst);
			CHECK(p == predict(net, inst));
			CHECK(p > 0.0);
			CHECK(p < 1.0);
		}
	}
	SUBCASE("length mismatch")
	{
		const Network net = build(ArchitectureId::SCNN, 64, 1);
		CHECK_THROWS_AS(predict(net, corpus.front()), ShapeError);
	}
}

TEST_CASE("parameters survive a save/load round trip")
{
	const auto corpus = separable_corpus(6, 96, 12);
	for (auto arch : {ArchitectureId::SCNN, ArchitectureId::DCNN, ArchitectureId::GRU})
	{
		CAPTURE(to_string(arch));
		Network net = build(arch, 96, 13, 6);
		TrainOptions opts;
		opts.epochs = 2;
		train(net, corpus, opts);
		std::stringstream buf;
		save_params(buf, net);
		const Network loaded = load_network(buf);
		CHECK(loaded.architecture() == arch);
		CHECK(loaded.input_len() == 96);
		CHECK(loaded.params().seed == net.params().seed);
		REQUIRE(loaded.params().tensors.size() == net.params().tensors.size());
		for (std::size_t i = 0; i < net.params().tensors.size(); ++i)
			CHECK(loaded.params().tensors[i] == net.params().tensors[i]);
		for (const auto& inst : corpus)
			CHECK(predict(loaded, inst) == predict(net, inst));
	}
	std::istringstream bad("not-a-params-file\n");
	CHECK_THROWS_AS(load_network(bad), ParseError);
}

TEST_CASE("training log format")
{
	TrainLog log{{1, 0.5, 0.25}, {2, 0.125, 1.0}};
	std::ostringstream out;
	write_train_log(out, log);
	CHECK(out.str() == "epoch,mean_loss,accuracy\n1,0.5,0.25\n2,0.125,1\n");
}

TEST_CASE("single prediction latency at the largest input length")
{
	const auto corpus = separable_corpus(50, kLdbcMaxLen, 14);
	for (auto arch : {ArchitectureId::SCNN, ArchitectureId::DCNN, ArchitectureId::GRU})
	{
		CAPTURE(to_string(arch));
		const Network net = build(arch, kLdbcMaxLen, 15);
		double sink = 0.0;
		const auto t0 = std::chrono::steady_clock::now();
		for (const auto& inst : corpus)
			sink += predict(net, inst);
		const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
		CHECK(sink > 0.0);
		CHECK(dt.count() / 50.0 < 0.050);
	}
}
