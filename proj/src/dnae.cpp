#include "topicdrift/dnae.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "topicdrift/errors.hpp"
#include "topicdrift/rng.hpp"

namespace topicdrift {

namespace {

constexpr char kMagic[4] = {'D', 'N', 'A', 'E'};
constexpr std::uint32_t kFormatVersion = 1;

// All layers applied the same way: output = input * weights^T.
std::vector<DenseMatrix*> layer_chain(DnaeModel& model) {
    std::vector<DenseMatrix*> layers;
    for (auto& w : model.encoder) layers.push_back(&w);
    for (auto& w : model.decoder) layers.push_back(&w);
    return layers;
}

std::vector<const DenseMatrix*> layer_chain(const DnaeModel& model) {
    std::vector<const DenseMatrix*> layers;
    for (const auto& w : model.encoder) layers.push_back(&w);
    for (const auto& w : model.decoder) layers.push_back(&w);
    return layers;
}

DenseMatrix run_chain(const std::vector<const DenseMatrix*>& layers, const DenseMatrix& x) {
    DenseMatrix current = x;
    for (const auto* w : layers) current = current * w->transpose();
    return current;
}

}  // namespace

void DnaeConfig::validate() const {
    if (hidden_dims.empty()) throw ConfigError("dnae config: hidden_dims is empty");
    for (std::size_t i = 0; i < hidden_dims.size(); ++i) {
        if (hidden_dims[i] < 1) throw ConfigError("dnae config: hidden dims must be >= 1");
        if (i > 0 && hidden_dims[i] >= hidden_dims[i - 1]) {
            throw ConfigError("dnae config: hidden_dims must be strictly decreasing");
        }
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("dnae config: learning_rate must be finite and >= 0");
    }
    if (epochs < 0) throw ConfigError("dnae config: epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("dnae config: batch_size must be >= 1");
    if (!(init_scale > 0.0) || !std::isfinite(init_scale)) {
        throw ConfigError("dnae config: init_scale must be finite and > 0");
    }
}

int DnaeModel::bottleneck() const {
    return encoder.empty() ? 0 : static_cast<int>(encoder.back().rows());
}

double DnaeModel::min_weight() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& w : encoder) lo = std::min(lo, w.minCoeff());
    for (const auto& w : decoder) lo = std::min(lo, w.minCoeff());
    return lo;
}

void DnaeModel::validate() const {
    if (encoder.empty() || decoder.size() != encoder.size()) {
        throw DataError("dnae model: encoder/decoder layer counts invalid");
    }
    Eigen::Index expected_in = static_cast<Eigen::Index>(vocab_size);
    for (std::size_t i = 0; i < encoder.size(); ++i) {
        if (encoder[i].cols() != expected_in) {
            throw DataError("dnae model: encoder shape chain broken at layer " + std::to_string(i));
        }
        expected_in = encoder[i].rows();
    }
    for (std::size_t i = 0; i < decoder.size(); ++i) {
        if (decoder[i].cols() != expected_in) {
            throw DataError("dnae model: decoder shape chain broken at layer " + std::to_string(i));
        }
        expected_in = decoder[i].rows();
    }
    if (expected_in != static_cast<Eigen::Index>(vocab_size)) {
        throw DataError("dnae model: decoder does not map back to vocab size");
    }
    for (const auto* w : layer_chain(*this)) {
        if (!w->allFinite() || w->minCoeff() < 0.0) {
            throw DataError("dnae model: weights must be finite and non-negative");
        }
    }
}

DnaeModel init_model(const DnaeConfig& config, std::size_t vocab_size) {
    config.validate();
    if (vocab_size <= static_cast<std::size_t>(config.bottleneck())) {
        throw ConfigError("init_model: vocab size must exceed the bottleneck dim");
    }

    DnaeModel model;
    model.vocab_size = vocab_size;
    model.config = config;

    Rng rng(config.seed);
    auto fill = [&](Eigen::Index rows, Eigen::Index cols) {
        DenseMatrix w(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = rng.uniform(0.0, config.init_scale);
        }
        return w;
    };

    Eigen::Index in_dim = static_cast<Eigen::Index>(vocab_size);
    for (int dim : config.hidden_dims) {
        model.encoder.push_back(fill(dim, in_dim));
        in_dim = dim;
    }
    for (std::size_t i = config.hidden_dims.size(); i-- > 0;) {
        const Eigen::Index out =
            i == 0 ? static_cast<Eigen::Index>(vocab_size) : config.hidden_dims[i - 1];
        model.decoder.push_back(fill(out, in_dim));
        in_dim = out;
    }
    return model;
}

DnaeModel warm_start(const DnaeModel& prev, std::size_t vocab_size, std::string window_label) {
    if (prev.vocab_size != vocab_size) {
        std::ostringstream msg;
        msg << "warm_start: model was trained with vocab size " << prev.vocab_size
            << " but the window has " << vocab_size << " (the dictionary is fixed across slices)";
        throw DataError(msg.str());
    }
    DnaeModel next = prev;
    next.provenance = std::move(window_label);
    return next;
}

ForwardTrace forward(const DnaeModel& model, const DenseMatrix& x) {
    if (x.cols() != static_cast<Eigen::Index>(model.vocab_size)) {
        std::ostringstream msg;
        msg << "forward: input has " << x.cols() << " columns, model expects " << model.vocab_size;
        throw DataError(msg.str());
    }
    ForwardTrace trace;
    DenseMatrix current = x;
    for (const auto& w : model.encoder) {
        current = current * w.transpose();
        trace.encoder_outputs.push_back(current);
    }
    for (const auto& w : model.decoder) {
        current = current * w.transpose();
        trace.decoder_outputs.push_back(current);
    }
    return trace;
}

TrainReport train(DnaeModel& model, const SparseMatrix& x, const DnaeConfig& config) {
    config.validate();
    if (x.cols != model.vocab_size) {
        throw DataError("train: matrix columns do not match the model vocab size");
    }
    if (x.n_rows() == 0) {
        throw DataError("train: matrix has no documents");
    }
    model.config = config;

    const std::size_t n_rows = x.n_rows();
    const double m = static_cast<double>(x.cols);
    const std::size_t batch = static_cast<std::size_t>(config.batch_size);
    auto layers = layer_chain(model);
    const std::size_t n_layers = layers.size();

    auto full_rmse = [&]() {
        double sse = 0.0;
        std::vector<std::size_t> chunk;
        for (std::size_t start = 0; start < n_rows; start += batch) {
            chunk.clear();
            for (std::size_t r = start; r < std::min(start + batch, n_rows); ++r) chunk.push_back(r);
            const DenseMatrix xb = x.dense_rows(chunk);
            DenseMatrix current = xb;
            for (const auto* w : layers) current = current * w->transpose();
            sse += (current - xb).squaredNorm();
        }
        return std::sqrt(sse / (static_cast<double>(n_rows) * m));
    };

    TrainReport report;
    std::vector<std::size_t> order(n_rows);
    std::iota(order.begin(), order.end(), 0);

    std::vector<DenseMatrix> activations(n_layers + 1);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(Rng::derive(config.seed, static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);

        for (std::size_t start = 0; start < n_rows; start += batch) {
            const std::size_t end = std::min(start + batch, n_rows);
            const std::span<const std::size_t> chunk(order.data() + start, end - start);
            const double scale = static_cast<double>(chunk.size()) * m;

            activations[0] = x.dense_rows(chunk);
            for (std::size_t i = 0; i < n_layers; ++i) {
                activations[i + 1] = activations[i] * layers[i]->transpose();
            }

            const double loss = (activations[n_layers] - activations[0]).squaredNorm() / scale;
            if (!std::isfinite(loss)) {
                std::ostringstream msg;
                msg << "train: loss diverged at epoch " << epoch
                    << "; try a smaller learning_rate";
                throw NumericError(msg.str());
            }

            // Backprop through the old weights, then step + clamp at zero.
            DenseMatrix grad_out = (2.0 / scale) * (activations[n_layers] - activations[0]);
            for (std::size_t i = n_layers; i-- > 0;) {
                const DenseMatrix grad_w = grad_out.transpose() * activations[i];
                if (i > 0) grad_out = grad_out * (*layers[i]);
                *layers[i] -= config.learning_rate * grad_w;
                *layers[i] = layers[i]->cwiseMax(0.0);
            }
        }

        const double epoch_rmse = full_rmse();
        if (!std::isfinite(epoch_rmse)) {
            std::ostringstream msg;
            msg << "train: reconstruction diverged at epoch " << epoch
                << "; try a smaller learning_rate";
            throw NumericError(msg.str());
        }
        report.rmse_per_epoch.push_back(epoch_rmse);
        report.min_weight_per_epoch.push_back(model.min_weight());
    }

    report.final_rmse = report.rmse_per_epoch.empty() ? full_rmse() : report.rmse_per_epoch.back();
    return report;
}

double gradient_check(const DnaeModel& model, const DenseMatrix& x, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DataError("gradient_check: epsilon must be finite and > 0");
    }
    DnaeModel probe = model;
    auto layers = layer_chain(probe);
    auto const_layers = layer_chain(static_cast<const DnaeModel&>(probe));
    const std::size_t n_layers = layers.size();

    // Analytic gradient of f = 0.5 * ||X - X'||_F^2.
    std::vector<DenseMatrix> activations(n_layers + 1);
    activations[0] = x;
    for (std::size_t i = 0; i < n_layers; ++i) {
        activations[i + 1] = activations[i] * layers[i]->transpose();
    }
    std::vector<DenseMatrix> analytic(n_layers);
    DenseMatrix grad_out = activations[n_layers] - x;
    for (std::size_t i = n_layers; i-- > 0;) {
        analytic[i] = grad_out.transpose() * activations[i];
        if (i > 0) grad_out = grad_out * (*layers[i]);
    }

    auto loss = [&]() {
        return 0.5 * (run_chain(const_layers, x) - x).squaredNorm();
    };

    double max_rel = 0.0;
    for (std::size_t i = 0; i < n_layers; ++i) {
        DenseMatrix& w = *layers[i];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                const double saved = w(r, c);
                w(r, c) = saved + epsilon;
                const double f_plus = loss();
                w(r, c) = saved - epsilon;
                const double f_minus = loss();
                w(r, c) = saved;
                const double numeric = (f_plus - f_minus) / (2.0 * epsilon);
                const double a = analytic[i](r, c);
                const double rel =
                    std::abs(numeric - a) / std::max({std::abs(numeric), std::abs(a), 1e-8});
                max_rel = std::max(max_rel, rel);
            }
        }
    }
    return max_rel;
}

DenseMatrix extract_topic_term(const DnaeModel& model) {
    if (model.encoder.empty()) throw DataError("extract_topic_term: model has no encoder layers");
    DenseMatrix u = model.encoder.front();
    for (std::size_t i = 1; i < model.encoder.size(); ++i) {
        u = model.encoder[i] * u;
    }
    return u;
}

// ---------------------------------------------------------------------------
// Checkpoint serialization
// ---------------------------------------------------------------------------

namespace {

template <typename T>
void append_le(std::vector<std::uint8_t>& buf, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(raw, raw + sizeof(T));
    }
    buf.insert(buf.end(), raw, raw + sizeof(T));
}

template <typename T>
T read_le(const std::vector<std::uint8_t>& buf, std::size_t& pos) {
    if (pos + sizeof(T) > buf.size()) {
        throw DataError("checkpoint: truncated file");
    }
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, buf.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(raw, raw + sizeof(T));
    }
    pos += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
}

void append_matrix(std::vector<std::uint8_t>& buf, const DenseMatrix& w) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) append_le(buf, w(r, c));
    }
}

DenseMatrix read_matrix(const std::vector<std::uint8_t>& buf, std::size_t& pos, Eigen::Index rows,
                        Eigen::Index cols) {
    DenseMatrix w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = read_le<double>(buf, pos);
    }
    return w;
}

nlohmann::json config_to_json(const DnaeConfig& config) {
    return {{"hidden_dims", config.hidden_dims},
            {"learning_rate", config.learning_rate},
            {"epochs", config.epochs},
            {"batch_size", config.batch_size},
            {"seed", config.seed},
            {"init_scale", config.init_scale}};
}

DnaeConfig config_from_json(const nlohmann::json& j) {
    DnaeConfig config;
    config.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
    config.learning_rate = j.at("learning_rate").get<double>();
    config.epochs = j.at("epochs").get<int>();
    config.batch_size = j.at("batch_size").get<int>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.init_scale = j.at("init_scale").get<double>();
    return config;
}

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const DnaeModel& model) {
    model.validate();
    std::vector<std::uint8_t> buf;
    buf.insert(buf.end(), kMagic, kMagic + 4);
    append_le(buf, kFormatVersion);
    append_le(buf, static_cast<std::uint32_t>(model.vocab_size));
    append_le(buf, static_cast<std::uint32_t>(model.encoder.size()));
    for (const auto& w : model.encoder) {
        append_le(buf, static_cast<std::uint32_t>(w.rows()));
    }
    for (const auto& w : model.encoder) append_matrix(buf, w);
    for (const auto& w : model.decoder) append_matrix(buf, w);

    const nlohmann::json trailer = {{"config", config_to_json(model.config)},
                                    {"provenance", model.provenance}};
    const std::string text = trailer.dump();
    buf.insert(buf.end(), text.begin(), text.end());
    return buf;
}

DnaeModel load_checkpoint(const std::vector<std::uint8_t>& bytes) {
    std::size_t pos = 0;
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw DataError("checkpoint: bad magic bytes");
    }
    pos = 4;
    const auto version = read_le<std::uint32_t>(bytes, pos);
    if (version != kFormatVersion) {
        throw DataError("checkpoint: unsupported format version " + std::to_string(version));
    }
    const auto vocab_size = read_le<std::uint32_t>(bytes, pos);
    const auto n_layers = read_le<std::uint32_t>(bytes, pos);
    if (n_layers == 0 || n_layers > 64) {
        throw DataError("checkpoint: implausible layer count");
    }
    std::vector<Eigen::Index> dims(n_layers);
    for (auto& d : dims) {
        d = read_le<std::uint32_t>(bytes, pos);
        if (d == 0) throw DataError("checkpoint: zero layer dim");
    }

    DnaeModel model;
    model.vocab_size = vocab_size;
    Eigen::Index in_dim = static_cast<Eigen::Index>(vocab_size);
    for (auto d : dims) {
        model.encoder.push_back(read_matrix(bytes, pos, d, in_dim));
        in_dim = d;
    }
    for (std::size_t i = dims.size(); i-- > 0;) {
        const Eigen::Index out = i == 0 ? static_cast<Eigen::Index>(vocab_size) : dims[i - 1];
        model.decoder.push_back(read_matrix(bytes, pos, out, in_dim));
        in_dim = out;
    }

    const nlohmann::json trailer = nlohmann::json::parse(
        bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(), nullptr, false);
    if (trailer.is_discarded() || !trailer.is_object()) {
        throw DataError("checkpoint: invalid JSON trailer");
    }
    try {
        model.config = config_from_json(trailer.at("config"));
        model.provenance = trailer.at("provenance").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint: bad trailer: ") + e.what());
    }
    if (model.config.hidden_dims.size() != dims.size()) {
        throw DataError("checkpoint: trailer dims disagree with header");
    }
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (model.config.hidden_dims[i] != static_cast<int>(dims[i])) {
            throw DataError("checkpoint: trailer dims disagree with header");
        }
    }
    model.validate();
    return model;
}

void save_checkpoint_file(const DnaeModel& model, const std::filesystem::path& path) {
    const auto bytes = save_checkpoint(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write on checkpoint: " + path.string());
}

DnaeModel load_checkpoint_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return load_checkpoint(bytes);
}

}  // namespace topicdrift
