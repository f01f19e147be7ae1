#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "topicdrift/diffusion.hpp"
#include "topicdrift/divergence.hpp"
#include "topicdrift/errors.hpp"
#include "topicdrift/hungarian.hpp"

using namespace topicdrift;

namespace {

TopicTermMatrix make_u(std::initializer_list<std::initializer_list<double>> rows,
                       std::string label = "w") {
    const auto k = rows.size();
    const auto m = rows.begin()->size();
    TopicTermMatrix u;
    u.window_label = std::move(label);
    u.values.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) u.values(r, c++) = v;
        ++r;
    }
    return u;
}

// Distribution series where one term's topic column is set per window.
std::vector<TermTopicDistribution> point_mass_series(const std::vector<int>& topic_per_window,
                                                     int k) {
    std::vector<TermTopicDistribution> windows;
    for (std::size_t w = 0; w < topic_per_window.size(); ++w) {
        TopicTermMatrix u;
        u.window_label = "w" + std::to_string(w);
        u.values = DenseMatrix::Zero(k, 1);
        u.values(topic_per_window[w], 0) = 3.0;
        windows.push_back(normalize_termwise(u));
    }
    return windows;
}

}  // namespace

TEST_CASE("normalize_termwise divides columns by their sums") {
    const auto u = make_u({{2.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}, {0.0, 3.0}});
    const auto dist = normalize_termwise(u);
    CHECK(dist.probs(0, 0) == doctest::Approx(0.5));
    CHECK(dist.probs(1, 0) == doctest::Approx(0.5));
    CHECK(dist.probs(2, 0) == 0.0);
    CHECK(dist.probs(2, 1) == doctest::Approx(0.25));
    CHECK(dist.probs(3, 1) == doctest::Approx(0.75));
    CHECK(dist.degenerate_terms.empty());
}

TEST_CASE("normalize_termwise uniform fallback for zero columns") {
    TopicTermMatrix u;
    u.values = DenseMatrix::Zero(20, 2);
    u.values.col(1).setConstant(1.0);
    const auto dist = normalize_termwise(u);
    REQUIRE(dist.degenerate_terms == std::vector<std::uint32_t>{0});
    for (Eigen::Index r = 0; r < 20; ++r) CHECK(dist.probs(r, 0) == doctest::Approx(0.05));
}

TEST_CASE("normalize_termwise is idempotent on normalized columns") {
    const auto u = make_u({{0.3, 0.7}, {0.7, 0.3}});
    const auto once = normalize_termwise(u);
    const auto twice = normalize_termwise(TopicTermMatrix{once.probs, "again"});
    CHECK((once.probs - twice.probs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalize_termwise columns always sum to 1") {
    const auto u = make_u({{0.0, 2.5, 1e-13}, {0.0, 1.5, 0.0}, {0.0, 4.0, 0.0}});
    const auto dist = normalize_termwise(u);
    for (Eigen::Index c = 0; c < 3; ++c) {
        CHECK(dist.probs.col(c).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(dist.degenerate_terms == std::vector<std::uint32_t>{0, 2});
}

TEST_CASE("default tau_mass sits strictly above uniform") {
    CHECK(default_tau_mass(4) == doctest::Approx(0.5));
    CHECK(default_tau_mass(13) == doctest::Approx(2.0 / 13.0));
    CHECK(default_tau_mass(20) == doctest::Approx(0.15));
    for (int k : {2, 3, 4, 10, 20, 50}) CHECK(default_tau_mass(k) > 1.0 / k);
}

TEST_CASE("diffusion series of a static term is all zero") {
    const auto windows = point_mass_series({1, 1, 1, 1}, 4);
    const auto series = diffusion_series(windows, 0, {});
    REQUIRE(series.scores.size() == 3);
    for (double s : series.scores) CHECK(s == 0.0);
    for (bool sig : series.significant) CHECK_FALSE(sig);
    CHECK(series.classification == TermClass::narrow);
}

TEST_CASE("diffusion series of a hard migration peaks at log_k 2") {
    // disjoint point masses: H(mix) = log_k 2, component entropies 0
    const auto windows = point_mass_series({0, 0, 2, 2}, 4);
    const auto series = diffusion_series(windows, 0, {});
    REQUIRE(series.scores.size() == 3);
    CHECK(series.scores[0] == 0.0);
    CHECK(series.scores[1] == doctest::Approx(std::log(2.0) / std::log(4.0)).epsilon(1e-12));
    CHECK(series.scores[2] == 0.0);
    CHECK(series.significant[1]);  // 0.5 > 0.3523 at k=4, t=2, alpha=0.05
    CHECK_FALSE(series.significant[0]);

    // with 2 topics the same move scores the full 1, clearing the 0.6927
    // threshold at alpha = 0.05
    const auto two = point_mass_series({0, 1}, 2);
    const auto swing = diffusion_series(two, 0, {});
    CHECK(swing.scores[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(swing.significant[0]);
}

TEST_CASE("five windows produce four scores") {
    const auto windows = point_mass_series({0, 1, 0, 1, 0}, 3);
    const auto series = diffusion_series(windows, 0, {});
    CHECK(series.scores.size() == 4);
    CHECK(series.support_per_window.size() == 5);
}

TEST_CASE("diffusion series validates the term index") {
    const auto windows = point_mass_series({0, 1}, 3);
    CHECK_THROWS_AS(diffusion_series(windows, 5, {}), DataError);
}

TEST_CASE("diffusion series honors custom pair weights") {
    const auto windows = point_mass_series({0, 1}, 3);
    // all mass on the first distribution: mixture equals it, divergence 0
    DiffusionOptions options;
    options.weights = std::vector<double>{1.0, 0.0};
    CHECK(diffusion_series(windows, 0, options).scores[0] == 0.0);
    options.weights = std::vector<double>{0.5, 0.25, 0.25};
    CHECK_THROWS_AS(diffusion_series(windows, 0, options), DataError);
}

TEST_CASE("classification rules fire in precedence order") {
    DiffusionSeries series;
    series.threshold = 0.35;

    SUBCASE("strictly rising support is divergent") {
        series.support_per_window = {1, 2, 3};
        series.scores = {0.1, 0.1};
        series.significant = {false, false};
        CHECK(classify_term(series) == TermClass::divergent);
    }
    SUBCASE("strictly falling support ending at 1 is convergent") {
        series.support_per_window = {3, 2, 1};
        series.scores = {0.1, 0.1};
        series.significant = {false, false};
        CHECK(classify_term(series) == TermClass::convergent);
    }
    SUBCASE("steady multi-topic support with rising scores is broad") {
        series.support_per_window = {2, 2, 2, 2};
        series.scores = {0.1, 0.2, 0.3};
        series.significant = {false, false, false};
        // least-squares slope oracle: symmetric points around the mean give
        // slope ((0.3-0.2) + (0.2-0.1)) / 2 = 0.1
        CHECK(classify_term(series) == TermClass::broad);
    }
    SUBCASE("single-topic support with nothing significant is narrow") {
        series.support_per_window = {1, 1, 1};
        series.scores = {0.05, 0.02};
        series.significant = {false, false};
        CHECK(classify_term(series) == TermClass::narrow);
    }
    SUBCASE("single-topic support with a significant spike is unclassified") {
        series.support_per_window = {1, 1, 1};
        series.scores = {0.9, 0.02};
        series.significant = {true, false};
        CHECK(classify_term(series) == TermClass::unclassified);
    }
    SUBCASE("too little history is an error") {
        series.support_per_window = {1, 1};
        series.scores = {0.1};
        series.significant = {false};
        CHECK_THROWS_AS(classify_term(series), DataError);
    }
}

TEST_CASE("history gjs spans all windows at once") {
    const auto windows = point_mass_series({0, 1, 2}, 3);
    // three disjoint point masses, uniform weights: H(mix)=1, components 0
    CHECK(history_gjs(windows, 0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto steady = point_mass_series({1, 1, 1}, 3);
    CHECK(history_gjs(steady, 0) == 0.0);
}

TEST_CASE("hungarian solves small cost matrices against brute force") {
    auto brute_force = [](const DenseMatrix& cost) {
        const int k = static_cast<int>(cost.rows());
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> best_perm;
        do {
            double total = 0.0;
            for (int i = 0; i < k; ++i) total += cost(i, perm[i]);
            if (total < best) {
                best = total;
                best_perm = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return std::pair{best_perm, best};
    };

    SUBCASE("diagonal-zero cost picks the identity") {
        DenseMatrix cost(3, 3);
        cost << 0, 1, 1, 1, 0, 1, 1, 1, 0;
        const auto [oracle_perm, oracle_cost] = brute_force(cost);
        double total = 0.0;
        const auto perm = min_cost_assignment(cost, &total);
        CHECK(perm == oracle_perm);
        CHECK(perm == std::vector<int>{0, 1, 2});
        CHECK(total == doctest::Approx(oracle_cost));
        CHECK(total == 0.0);
    }

    SUBCASE("random 4x4 matrices match the brute-force optimum") {
        std::uint64_t state = 99;
        auto next = [&state]() {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            return static_cast<double>(state >> 11) * 0x1.0p-53;
        };
        for (int trial = 0; trial < 50; ++trial) {
            DenseMatrix cost(4, 4);
            for (Eigen::Index i = 0; i < 4; ++i) {
                for (Eigen::Index j = 0; j < 4; ++j) cost(i, j) = next();
            }
            const auto [oracle_perm, oracle_cost] = brute_force(cost);
            double total = 0.0;
            min_cost_assignment(cost, &total);
            CHECK(total == doctest::Approx(oracle_cost).epsilon(1e-12));
        }
    }
}

TEST_CASE("align_topics on identical matrices is the identity") {
    const auto u = make_u({{1.0, 0.0, 2.0}, {0.0, 3.0, 0.0}, {4.0, 0.0, 1.0}});
    const auto alignment = align_topics(u, u);
    CHECK(alignment.permutation == std::vector<int>{0, 1, 2});
    CHECK(alignment.total_cost == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("align_topics recovers a row swap") {
    const auto u = make_u({{1.0, 0.0, 2.0}, {0.0, 3.0, 0.0}, {4.0, 0.0, 1.0}});
    TopicTermMatrix swapped = u;
    swapped.values.row(0) = u.values.row(1);
    swapped.values.row(1) = u.values.row(0);
    const auto alignment = align_topics(u, swapped);
    CHECK(alignment.permutation == std::vector<int>{1, 0, 2});
}

TEST_CASE("align_topics rejects mismatched shapes") {
    const auto a = make_u({{1.0, 0.0}, {0.0, 1.0}});
    const auto b = make_u({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
    CHECK_THROWS_AS(align_topics(a, b), DataError);
}
