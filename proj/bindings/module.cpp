#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "topicdrift/diffusion.hpp"
#include "topicdrift/divergence.hpp"
#include "topicdrift/dnae.hpp"
#include "topicdrift/errors.hpp"
#include "topicdrift/matrix.hpp"
#include "topicdrift/nmf.hpp"
#include "topicdrift/pipeline.hpp"
#include "topicdrift/weighting.hpp"

namespace py = pybind11;
using namespace topicdrift;

namespace {

DenseMatrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw DataError("expected a 2-D array");
    DenseMatrix m(a.shape(0), a.shape(1));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i) {
        for (py::ssize_t j = 0; j < a.shape(1); ++j) m(i, j) = r(i, j);
    }
    return m;
}

py::array_t<double> to_array(const DenseMatrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    auto w = a.mutable_unchecked<2>();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
    }
    return a;
}

SparseMatrix to_sparse(const DenseMatrix& dense) {
    SparseMatrix s;
    s.cols = static_cast<std::size_t>(dense.cols());
    for (Eigen::Index r = 0; r < dense.rows(); ++r) {
        std::vector<SparseEntry> row;
        for (Eigen::Index c = 0; c < dense.cols(); ++c) {
            if (dense(r, c) != 0.0) row.push_back({static_cast<std::uint32_t>(c), dense(r, c)});
        }
        s.rows.push_back(std::move(row));
        s.row_labels.push_back("row" + std::to_string(r));
    }
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Topic diffusion discovery: non-negative autoencoder topic models over "
              "time-sliced corpora with Jensen-Shannon drift scoring";
    m.attr("__version__") = std::string(kToolVersion);

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<NumericError>(m, "NumericError");

    // information measures
    m.def("entropy_kary", [](const std::vector<double>& p) { return entropy_kary(p); },
          py::arg("p"), "k-ary Shannon entropy of a probability vector (k = len(p))");
    m.def(
        "gjs",
        [](const std::vector<std::vector<double>>& dists, std::optional<std::vector<double>> w) {
            if (!w) w = std::vector<double>(dists.size(), 1.0 / static_cast<double>(dists.size()));
            return gjs(dists, *w);
        },
        py::arg("dists"), py::arg("weights") = py::none(),
        "Generalized Jensen-Shannon divergence (uniform weights by default)");
    m.def("chi_square_quantile", &chi_square_quantile, py::arg("df"), py::arg("prob"));
    m.def(
        "significance_threshold",
        [](int topics, int time_slices, double alpha, std::optional<double> cells) {
            return significance_threshold(ThresholdParams{topics, time_slices, alpha, cells});
        },
        py::arg("topics"), py::arg("time_slices") = 2, py::arg("alpha") = 0.05,
        py::arg("cells") = py::none());

    // factorization baselines
    m.def(
        "nmf",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, int k,
           int iters, std::uint64_t seed) {
            const NmfResult r = nmf(to_matrix(x), k, iters, seed);
            return py::make_tuple(to_array(r.w), to_array(r.h), r.objective_trace);
        },
        py::arg("x"), py::arg("k"), py::arg("iters") = 200, py::arg("seed") = 0,
        "Multiplicative-update NMF; returns (W, H, objective_trace)");
    m.def(
        "hnmf",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const std::vector<int>& dims, int iters_per_layer, std::uint64_t seed) {
            const HnmfResult r = hnmf(to_matrix(x), dims, iters_per_layer, seed);
            py::list w_layers;
            for (const auto& w : r.w_layers) w_layers.append(to_array(w));
            return py::make_tuple(w_layers, to_array(r.h_last), r.reconstruction_rmse);
        },
        py::arg("x"), py::arg("layer_dims"), py::arg("iters_per_layer") = 200, py::arg("seed") = 0);
    m.def(
        "rmse",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& xp) {
            return rmse(to_matrix(x), to_matrix(xp));
        },
        py::arg("x"), py::arg("xp"));
    m.def("tfidf",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& counts) {
              return to_array(tfidf(to_sparse(to_matrix(counts))).to_dense());
          },
          py::arg("counts"));

    // autoencoder
    py::class_<DnaeConfig>(m, "DnaeConfig")
        .def(py::init([](std::vector<int> hidden_dims, double learning_rate, int epochs,
                         int batch_size, std::uint64_t seed, double init_scale) {
                 DnaeConfig c{std::move(hidden_dims), learning_rate, epochs,
                              batch_size,             seed,          init_scale};
                 c.validate();
                 return c;
             }),
             py::arg("hidden_dims"), py::arg("learning_rate") = 1e-3, py::arg("epochs") = 200,
             py::arg("batch_size") = 64, py::arg("seed") = 0, py::arg("init_scale") = 0.1)
        .def_readwrite("hidden_dims", &DnaeConfig::hidden_dims)
        .def_readwrite("learning_rate", &DnaeConfig::learning_rate)
        .def_readwrite("epochs", &DnaeConfig::epochs)
        .def_readwrite("batch_size", &DnaeConfig::batch_size)
        .def_readwrite("seed", &DnaeConfig::seed)
        .def_readwrite("init_scale", &DnaeConfig::init_scale);

    py::class_<TrainReport>(m, "TrainReport")
        .def_readonly("rmse_per_epoch", &TrainReport::rmse_per_epoch)
        .def_readonly("min_weight_per_epoch", &TrainReport::min_weight_per_epoch)
        .def_readonly("final_rmse", &TrainReport::final_rmse);

    py::class_<DnaeModel>(m, "DnaeModel")
        .def_property_readonly("vocab_size", [](const DnaeModel& s) { return s.vocab_size; })
        .def_property_readonly("provenance", [](const DnaeModel& s) { return s.provenance; })
        .def_property_readonly("bottleneck", &DnaeModel::bottleneck)
        .def("min_weight", &DnaeModel::min_weight)
        .def("encoder_weights",
             [](const DnaeModel& s) {
                 py::list out;
                 for (const auto& w : s.encoder) out.append(to_array(w));
                 return out;
             })
        .def("decoder_weights",
             [](const DnaeModel& s) {
                 py::list out;
                 for (const auto& w : s.decoder) out.append(to_array(w));
                 return out;
             })
        .def("forward",
             [](const DnaeModel& s,
                const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
                 return to_array(forward(s, to_matrix(x)).reconstruction());
             },
             py::arg("x"))
        .def("train",
             [](DnaeModel& s,
                const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
                const DnaeConfig& config) { return train(s, to_sparse(to_matrix(x)), config); },
             py::arg("x"), py::arg("config"))
        .def("extract_topic_term", [](const DnaeModel& s) { return to_array(extract_topic_term(s)); })
        .def("save", &save_checkpoint_file, py::arg("path"))
        .def_static("load", &load_checkpoint_file, py::arg("path"));

    m.def("init_model", &init_model, py::arg("config"), py::arg("vocab_size"));
    m.def("warm_start", &warm_start, py::arg("prev"), py::arg("vocab_size"),
          py::arg("window_label"));
    m.def(
        "gradient_check",
        [](const DnaeModel& s,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           double epsilon) { return gradient_check(s, to_matrix(x), epsilon); },
        py::arg("model"), py::arg("x"), py::arg("epsilon") = 1e-5);

    // diffusion
    m.def(
        "normalize_termwise",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u) {
            const auto d = normalize_termwise(TopicTermMatrix{to_matrix(u), ""});
            return py::make_tuple(to_array(d.probs), d.degenerate_terms);
        },
        py::arg("u"), "Returns (column-stochastic matrix, degenerate term indices)");
    m.def(
        "diffusion_scores",
        [](const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& us,
           std::size_t term, double alpha, std::optional<double> tau_mass) {
            std::vector<TermTopicDistribution> windows;
            for (const auto& u : us) {
                windows.push_back(normalize_termwise(TopicTermMatrix{to_matrix(u), ""}));
            }
            DiffusionOptions options;
            options.alpha = alpha;
            options.tau_mass = tau_mass;
            const DiffusionSeries s = diffusion_series(windows, term, options);
            return py::make_tuple(s.scores, s.threshold, s.support_per_window,
                                  std::string(to_string(s.classification)));
        },
        py::arg("topic_term_matrices"), py::arg("term"), py::arg("alpha") = 0.05,
        py::arg("tau_mass") = py::none(),
        "Per-transition divergence for one term: (scores, threshold, support, class)");
    m.def(
        "history_gjs",
        [](const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& us,
           std::size_t term, std::optional<std::vector<double>> weights) {
            std::vector<TermTopicDistribution> windows;
            for (const auto& u : us) {
                windows.push_back(normalize_termwise(TopicTermMatrix{to_matrix(u), ""}));
            }
            return history_gjs(windows, term, weights.value_or(std::vector<double>{}));
        },
        py::arg("topic_term_matrices"), py::arg("term"), py::arg("weights") = py::none(),
        "Whole-history t-way divergence for one term");
    m.def(
        "align_topics",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& prev,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& curr) {
            const auto a = align_topics(TopicTermMatrix{to_matrix(prev), "prev"},
                                        TopicTermMatrix{to_matrix(curr), "curr"});
            return py::make_tuple(a.permutation, a.total_cost);
        },
        py::arg("u_prev"), py::arg("u_curr"));

    // pipeline
    m.def(
        "run_pipeline",
        [](const std::filesystem::path& config_path, bool force,
           const std::vector<std::string>& terms) {
            const auto config = PipelineConfig::load(config_path);
            RunOptions options;
            options.force = force;
            options.terms = terms;
            cmd_pipeline(config, options);
            return config.manifest_path();
        },
        py::arg("config_path"), py::arg("force") = false,
        py::arg("terms") = std::vector<std::string>{},
        "Run the full pipeline from a JSON config; returns the manifest path");
}
