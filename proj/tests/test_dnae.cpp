#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "topicdrift/dnae.hpp"
#include "topicdrift/errors.hpp"
#include "topicdrift/nmf.hpp"
#include "topicdrift/rng.hpp"

using namespace topicdrift;

namespace {

SparseMatrix sparse_from_dense(const DenseMatrix& dense) {
    SparseMatrix s;
    s.cols = static_cast<std::size_t>(dense.cols());
    for (Eigen::Index r = 0; r < dense.rows(); ++r) {
        std::vector<SparseEntry> row;
        for (Eigen::Index c = 0; c < dense.cols(); ++c) {
            if (dense(r, c) != 0.0) row.push_back({static_cast<std::uint32_t>(c), dense(r, c)});
        }
        s.rows.push_back(std::move(row));
        s.row_labels.push_back("d" + std::to_string(r));
    }
    return s;
}

DenseMatrix random_nonneg(Eigen::Index n, Eigen::Index m, std::uint64_t seed, double lo = 0.0) {
    Rng rng(seed);
    DenseMatrix x(n, m);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) x(r, c) = lo + rng.uniform();
    }
    return x;
}

}  // namespace

TEST_CASE("init_model shapes follow the mirrored architecture") {
    DnaeConfig config;
    config.hidden_dims = {50, 20};
    config.seed = 1;
    const DnaeModel model = init_model(config, 17240);
    REQUIRE(model.encoder.size() == 2);
    REQUIRE(model.decoder.size() == 2);
    CHECK(model.encoder[0].rows() == 50);
    CHECK(model.encoder[0].cols() == 17240);
    CHECK(model.encoder[1].rows() == 20);
    CHECK(model.encoder[1].cols() == 50);
    CHECK(model.decoder[0].rows() == 50);
    CHECK(model.decoder[0].cols() == 20);
    CHECK(model.decoder[1].rows() == 17240);
    CHECK(model.decoder[1].cols() == 50);
    CHECK(model.min_weight() >= 0.0);
    CHECK(model.bottleneck() == 20);
}

TEST_CASE("init_model is deterministic for a fixed seed") {
    DnaeConfig config;
    config.hidden_dims = {2};
    config.seed = 77;
    const DnaeModel a = init_model(config, 3);
    const DnaeModel b = init_model(config, 3);
    CHECK(a.encoder[0] == b.encoder[0]);
    CHECK(a.decoder[0] == b.decoder[0]);
}

TEST_CASE("init_model rejects degenerate configs") {
    DnaeConfig config;
    config.hidden_dims = {2};
    config.init_scale = 0.0;
    CHECK_THROWS_AS(init_model(config, 3), ConfigError);
    config.init_scale = 0.1;
    config.hidden_dims = {3, 5};
    CHECK_THROWS_AS(init_model(config, 10), ConfigError);
    config.hidden_dims = {5};
    CHECK_THROWS_AS(init_model(config, 5), ConfigError);  // m must exceed bottleneck
}

TEST_CASE("warm_start copies weights and re-labels provenance") {
    DnaeConfig config;
    config.hidden_dims = {3};
    config.seed = 5;
    DnaeModel model = init_model(config, 10);
    model.provenance = "w1";
    const DnaeModel next = warm_start(model, 10, "w2");
    CHECK(next.encoder[0] == model.encoder[0]);
    CHECK(next.decoder[0] == model.decoder[0]);
    CHECK(next.provenance == "w2");

    const DnaeModel chained = warm_start(warm_start(next, 10, "w3"), 10, "w4");
    CHECK(chained.provenance == "w4");

    CHECK_THROWS_AS(warm_start(model, 9, "w2"), DataError);
}

TEST_CASE("forward with identity weights reproduces the input") {
    DnaeConfig config;
    config.hidden_dims = {4};
    config.seed = 2;
    DnaeModel model = init_model(config, 4 + 1);
    // hand-craft a square chain m=4: rebuild with identity blocks
    model.vocab_size = 4;
    model.encoder = {DenseMatrix::Identity(4, 4)};
    model.decoder = {DenseMatrix::Identity(4, 4)};
    const DenseMatrix x = random_nonneg(3, 4, 9);
    const ForwardTrace trace = forward(model, x);
    CHECK((trace.reconstruction() - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward of zero input is zero everywhere") {
    DnaeConfig config;
    config.hidden_dims = {3, 2};
    config.seed = 3;
    const DnaeModel model = init_model(config, 6);
    const ForwardTrace trace = forward(model, DenseMatrix::Zero(4, 6));
    for (const auto& w : trace.encoder_outputs) CHECK(w.cwiseAbs().maxCoeff() == 0.0);
    CHECK(trace.reconstruction().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward keeps activations non-negative") {
    DnaeConfig config;
    config.hidden_dims = {5, 2};
    config.seed = 4;
    const DnaeModel model = init_model(config, 9);
    const ForwardTrace trace = forward(model, random_nonneg(7, 9, 10));
    for (const auto& w : trace.encoder_outputs) CHECK(w.minCoeff() >= 0.0);
    for (const auto& w : trace.decoder_outputs) CHECK(w.minCoeff() >= 0.0);
}

TEST_CASE("forward is linear in the input") {
    DnaeConfig config;
    config.hidden_dims = {4, 2};
    config.seed = 8;
    const DnaeModel model = init_model(config, 7);
    const DenseMatrix x1 = random_nonneg(3, 7, 21);
    const DenseMatrix x2 = random_nonneg(3, 7, 22);
    const double a = 0.7, b = 1.9;
    const DenseMatrix combined = forward(model, a * x1 + b * x2).reconstruction();
    const DenseMatrix separate =
        a * forward(model, x1).reconstruction() + b * forward(model, x2).reconstruction();
    CHECK((combined - separate).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("forward rejects mismatched input width") {
    DnaeConfig config;
    config.hidden_dims = {2};
    const DnaeModel model = init_model(config, 5);
    CHECK_THROWS_AS(forward(model, DenseMatrix::Zero(3, 4)), DataError);
}

TEST_CASE("train reconstructs a planted low-rank matrix") {
    // X = A * B with A, B >= 0 and topic-blocked B admits an exact
    // bottleneck-4 reconstruction (pick the encoder as per-block column
    // indicators); training must get within 5% of the trivial all-zero rmse.
    Rng rng(31);
    DenseMatrix a(60, 4), b = DenseMatrix::Zero(4, 30);
    for (Eigen::Index j = 0; j < 4; ++j) {
        for (Eigen::Index c = j * 7; c < (j == 3 ? 30 : (j + 1) * 7); ++c) {
            b(j, c) = 0.5 + rng.uniform();
        }
    }
    for (Eigen::Index r = 0; r < 60; ++r) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            a(r, j) = (j == r % 4) ? 0.5 + rng.uniform() : 0.05 * rng.uniform();
        }
    }
    const DenseMatrix x = a * b;

    DnaeConfig config;
    config.hidden_dims = {4};
    config.learning_rate = 0.2;
    config.epochs = 1200;
    config.batch_size = 16;
    config.seed = 13;
    config.init_scale = 0.1;

    DnaeModel model = init_model(config, 30);
    const TrainReport report = train(model, sparse_from_dense(x), config);
    const double baseline = rmse(x, DenseMatrix::Zero(60, 30));
    CHECK(report.final_rmse < 0.05 * baseline);
    CHECK(model.min_weight() >= 0.0);
}

TEST_CASE("train with zero learning rate is a null step") {
    const DenseMatrix x = random_nonneg(8, 6, 41);
    DnaeConfig config;
    config.hidden_dims = {3};
    config.learning_rate = 0.0;
    config.epochs = 1;
    config.batch_size = 4;
    config.seed = 14;

    DnaeModel model = init_model(config, 6);
    const DnaeModel before = model;
    const TrainReport report = train(model, sparse_from_dense(x), config);
    CHECK(model.encoder[0] == before.encoder[0]);
    CHECK(model.decoder[0] == before.decoder[0]);
    REQUIRE(report.rmse_per_epoch.size() == 1);
    CHECK(report.rmse_per_epoch[0] ==
          doctest::Approx(rmse(x, forward(model, x).reconstruction())).epsilon(1e-12));
}

TEST_CASE("train keeps weights non-negative after every epoch") {
    const DenseMatrix x = random_nonneg(20, 10, 51);
    DnaeConfig config;
    config.hidden_dims = {5, 2};
    config.learning_rate = 0.05;  // aggressive on purpose
    config.epochs = 40;
    config.batch_size = 8;
    config.seed = 15;

    DnaeModel model = init_model(config, 10);
    const TrainReport report = train(model, sparse_from_dense(x), config);
    REQUIRE(report.min_weight_per_epoch.size() == 40);
    for (double w : report.min_weight_per_epoch) CHECK(w >= 0.0);
}

TEST_CASE("train is bitwise reproducible for a fixed seed") {
    const DenseMatrix x = random_nonneg(12, 8, 61);
    DnaeConfig config;
    config.hidden_dims = {3};
    config.learning_rate = 0.01;
    config.epochs = 20;
    config.batch_size = 5;
    config.seed = 16;

    DnaeModel m1 = init_model(config, 8);
    DnaeModel m2 = init_model(config, 8);
    const TrainReport r1 = train(m1, sparse_from_dense(x), config);
    const TrainReport r2 = train(m2, sparse_from_dense(x), config);
    CHECK(m1.encoder[0] == m2.encoder[0]);
    CHECK(m1.decoder[0] == m2.decoder[0]);
    CHECK(r1.rmse_per_epoch == r2.rmse_per_epoch);
}

TEST_CASE("train reports divergence with the epoch") {
    // squared residuals overflow double range -> non-finite loss
    const DenseMatrix x = 1e200 * random_nonneg(10, 8, 71);
    DnaeConfig config;
    config.hidden_dims = {3};
    config.learning_rate = 0.01;
    config.epochs = 5;
    config.batch_size = 4;
    config.seed = 17;
    config.init_scale = 1.0;

    DnaeModel model = init_model(config, 8);
    try {
        train(model, sparse_from_dense(x), config);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("epoch 0") != std::string::npos);
        CHECK(std::string(e.what()).find("learning_rate") != std::string::npos);
    }
}

TEST_CASE("gradient check against central finite differences") {
    DnaeConfig config;
    config.hidden_dims = {2};
    config.seed = 19;
    config.init_scale = 0.5;
    const DnaeModel model = init_model(config, 3);
    const DenseMatrix x = random_nonneg(3, 3, 81, 0.2);
    CHECK(gradient_check(model, x, 1e-5) < 1e-4);
}

TEST_CASE("gradient check is unchanged by zero-rate training") {
    DnaeConfig config;
    config.hidden_dims = {2};
    config.seed = 20;
    config.init_scale = 0.5;
    config.learning_rate = 0.0;
    config.epochs = 3;
    config.batch_size = 2;
    DnaeModel model = init_model(config, 4);
    const DenseMatrix x = random_nonneg(4, 4, 82, 0.2);
    const double before = gradient_check(model, x, 1e-5);
    train(model, sparse_from_dense(x), config);
    const double after = gradient_check(model, x, 1e-5);
    CHECK(before == after);
}

TEST_CASE("gradient check rejects a zero epsilon") {
    DnaeConfig config;
    config.hidden_dims = {2};
    const DnaeModel model = init_model(config, 3);
    CHECK_THROWS_AS(gradient_check(model, DenseMatrix::Ones(2, 3), 0.0), DataError);
}

TEST_CASE("extract_topic_term collapses the encoder chain") {
    DnaeConfig config;
    config.hidden_dims = {4, 2};
    config.seed = 23;
    const DnaeModel model = init_model(config, 9);
    const DenseMatrix u = extract_topic_term(model);
    CHECK(u.rows() == 2);
    CHECK(u.cols() == 9);
    CHECK(u.minCoeff() >= 0.0);
    CHECK((u - model.encoder[1] * model.encoder[0]).cwiseAbs().maxCoeff() == 0.0);

    DnaeConfig single;
    single.hidden_dims = {3};
    single.seed = 24;
    const DnaeModel one = init_model(single, 7);
    CHECK(extract_topic_term(one) == one.encoder[0]);
}

TEST_CASE("bottleneck activation equals X * U^T") {
    DnaeConfig config;
    config.hidden_dims = {5, 3};
    config.seed = 25;
    const DnaeModel model = init_model(config, 11);
    const DenseMatrix x = random_nonneg(6, 11, 91);
    const DenseMatrix u = extract_topic_term(model);
    const DenseMatrix via_chain = forward(model, x).bottleneck();
    const DenseMatrix via_u = x * u.transpose();
    const double rel = (via_chain - via_u).norm() / via_u.norm();
    CHECK(rel < 1e-8);
}

TEST_CASE("checkpoint round-trip is bitwise lossless") {
    DnaeConfig config;
    config.hidden_dims = {4, 2};
    config.seed = 27;
    config.learning_rate = 0.015;
    DnaeModel model = init_model(config, 9);
    model.provenance = "2016";
    const DenseMatrix x = random_nonneg(10, 9, 101);
    config.epochs = 5;
    config.batch_size = 4;
    train(model, sparse_from_dense(x), config);

    const auto bytes = save_checkpoint(model);
    const DnaeModel loaded = load_checkpoint(bytes);
    REQUIRE(loaded.encoder.size() == model.encoder.size());
    for (std::size_t i = 0; i < model.encoder.size(); ++i) {
        CHECK(loaded.encoder[i] == model.encoder[i]);
        CHECK(loaded.decoder[i] == model.decoder[i]);
    }
    CHECK(loaded.provenance == "2016");
    CHECK(loaded.config == model.config);
    CHECK(save_checkpoint(loaded) == bytes);
}

TEST_CASE("checkpoint rejects corruption") {
    DnaeConfig config;
    config.hidden_dims = {2};
    config.seed = 28;
    DnaeModel model = init_model(config, 5);
    auto bytes = save_checkpoint(model);

    SUBCASE("bad magic") {
        bytes[0] = 'X';
        CHECK_THROWS_AS(load_checkpoint(bytes), DataError);
    }
    SUBCASE("bad version") {
        bytes[4] = 9;
        CHECK_THROWS_AS(load_checkpoint(bytes), DataError);
    }
    SUBCASE("truncation never yields a partial model") {
        for (std::size_t cut : {5ul, 16ul, 40ul, bytes.size() - 3}) {
            std::vector<std::uint8_t> shortened(bytes.begin(),
                                                bytes.begin() + static_cast<long>(cut));
            CHECK_THROWS_AS(load_checkpoint(shortened), DataError);
        }
    }
}

TEST_CASE("checkpoint file round-trip and warm start vocab guard") {
    const auto dir = std::filesystem::temp_directory_path() / "topicdrift_test_ckpt";
    std::filesystem::create_directories(dir);
    const auto path = dir / "model.dnae";

    DnaeConfig config;
    config.hidden_dims = {3};
    config.seed = 29;
    DnaeModel model = init_model(config, 7);
    model.provenance = "w1";
    save_checkpoint_file(model, path);
    const DnaeModel loaded = load_checkpoint_file(path);
    CHECK(loaded.encoder[0] == model.encoder[0]);

    // checkpoint trained against a different dictionary cannot seed a window
    CHECK_THROWS_AS(warm_start(loaded, 12, "w2"), DataError);
    std::filesystem::remove_all(dir);
}
