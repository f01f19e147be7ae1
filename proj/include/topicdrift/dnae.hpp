#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topicdrift/matrix.hpp"

namespace topicdrift {

struct DnaeConfig {
    std::vector<int> hidden_dims{50, 20};  // encoder dims, bottleneck last
    double learning_rate = 1e-3;
    int epochs = 200;
    int batch_size = 64;
    std::uint64_t seed = 0;
    double init_scale = 0.1;

    int bottleneck() const { return hidden_dims.empty() ? 0 : hidden_dims.back(); }
    void validate() const;  // throws ConfigError
    bool operator==(const DnaeConfig&) const = default;
};

// Bias-free, activation-free autoencoder with non-negative weights. Each
// layer is a pure matrix product, so the encoder chain collapses into a
// single topic-term matrix.
struct DnaeModel {
    // encoder[i] maps the previous width down: H_1 is d_1 x m, H_i is d_i x d_{i-1}.
    std::vector<DenseMatrix> encoder;
    // decoder mirrors the encoder back up, bottleneck first: d_{l-1} x k, ..., m x d_1.
    std::vector<DenseMatrix> decoder;
    std::size_t vocab_size = 0;
    std::string provenance;  // window label the model was (last) trained on
    DnaeConfig config;

    int bottleneck() const;
    double min_weight() const;
    void validate() const;  // shape chain, finiteness, non-negativity; throws DataError
};

struct ForwardTrace {
    std::vector<DenseMatrix> encoder_outputs;  // W_1 .. W_l
    std::vector<DenseMatrix> decoder_outputs;  // W'_1 .., last is the reconstruction

    const DenseMatrix& bottleneck() const { return encoder_outputs.back(); }
    const DenseMatrix& reconstruction() const { return decoder_outputs.back(); }
};

struct TrainReport {
    std::vector<double> rmse_per_epoch;        // on the full matrix, after each epoch
    std::vector<double> min_weight_per_epoch;  // across all layers, after each epoch
    double final_rmse = 0.0;
};

/// Fresh model with weights i.i.d. uniform on [0, init_scale), seeded.
DnaeModel init_model(const DnaeConfig& config, std::size_t vocab_size);

/// Copy of prev ready for training on the next window. The shared dictionary
/// is fixed across slices, so a vocab size mismatch is an error.
DnaeModel warm_start(const DnaeModel& prev, std::size_t vocab_size, std::string window_label);

/// W_1 = X H_1', W_{i+1} = W_i H_{i+1}', decoder symmetric. X needs m columns.
ForwardTrace forward(const DnaeModel& model, const DenseMatrix& x);

/// Projected mini-batch gradient descent on the mean squared reconstruction
/// error. After every step, negative weight entries are clamped to 0. Batch
/// order is a seeded shuffle derived from (config.seed, epoch). Throws
/// NumericError naming the epoch if the loss goes non-finite.
TrainReport train(DnaeModel& model, const SparseMatrix& x, const DnaeConfig& config);

/// Max relative error between the analytic gradient of 0.5*||X - X'||_F^2 and
/// central finite differences, over every weight entry. Meant for small
/// inputs at interior points (all weights strictly positive).
double gradient_check(const DnaeModel& model, const DenseMatrix& x, double epsilon);

/// U = H_l * ... * H_1, shape k x m.
DenseMatrix extract_topic_term(const DnaeModel& model);

// Checkpoint format: magic "DNAE", format version u32, vocab size u32,
// encoder layer count u32, per-layer dims u32 each, then row-major f64
// little-endian weights (encoder layers then decoder layers), then a JSON
// trailer with config and provenance. Round-trip is bit-exact.
std::vector<std::uint8_t> save_checkpoint(const DnaeModel& model);
DnaeModel load_checkpoint(const std::vector<std::uint8_t>& bytes);
void save_checkpoint_file(const DnaeModel& model, const std::filesystem::path& path);
DnaeModel load_checkpoint_file(const std::filesystem::path& path);

}  // namespace topicdrift
