#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "topicdrift/corpus.hpp"
#include "topicdrift/dnae.hpp"

namespace topicdrift {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct SliceSpec {
    std::string label;
    Date start;
    Date end;
};

// Parsed run configuration. Relative paths in the config file are resolved
// against the file's directory.
struct PipelineConfig {
    std::filesystem::path corpus_path;
    std::filesystem::path dictionary_path;
    std::optional<std::filesystem::path> alias_path;
    std::vector<SliceSpec> slices;
    std::size_t window = 2;
    DnaeConfig dnae;
    double alpha = 0.05;
    std::optional<double> tau_mass;
    int top_n = 5;
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;
    nlohmann::json snapshot;  // normalized config, recorded in the manifest

    /// Parses and validates a JSON config file. Errors name the offending
    /// path (e.g. "slices[2].start"). Throws ConfigError.
    static PipelineConfig load(const std::filesystem::path& path);
    static PipelineConfig parse(const nlohmann::json& j, const std::filesystem::path& base_dir);

    std::filesystem::path slices_dir() const { return output_dir / "slices"; }
    std::filesystem::path windows_dir() const { return output_dir / "windows"; }
    std::filesystem::path checkpoints_dir() const { return output_dir / "checkpoints"; }
    std::filesystem::path u_dir() const { return output_dir / "U"; }
    std::filesystem::path reports_dir() const { return output_dir / "reports"; }
    std::filesystem::path manifest_path() const { return reports_dir() / "manifest.json"; }

    /// Labels of the training windows implied by slices + window size.
    std::vector<std::string> window_labels() const;
};

struct RunOptions {
    bool force = false;
    bool deterministic = true;          // sequential mode; the only one implemented
    std::vector<std::string> terms;     // chart filter for the diffuse stage
};

// Stage entry points. Each stage reads the artifacts of the previous one from
// the output directory and updates reports/manifest.json atomically on
// completion. Errors: ConfigError for usage problems, DataError for missing
// or malformed inputs, NumericError for training divergence.
void cmd_ingest(const PipelineConfig& config, const RunOptions& options);
void cmd_train(const PipelineConfig& config, const RunOptions& options);
void cmd_topics(const PipelineConfig& config, const RunOptions& options);
void cmd_diffuse(const PipelineConfig& config, const RunOptions& options);

/// ingest -> train -> topics -> diffuse with a single manifest. Refuses to
/// run over an existing manifest unless options.force is set.
void cmd_pipeline(const PipelineConfig& config, const RunOptions& options);

}  // namespace topicdrift
