#include "topicdrift/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <numeric>
#include <set>
#include <unordered_map>

#include "topicdrift/diffusion.hpp"
#include "topicdrift/divergence.hpp"
#include "topicdrift/errors.hpp"
#include "topicdrift/io.hpp"
#include "topicdrift/rng.hpp"
#include "topicdrift/svg.hpp"
#include "topicdrift/vocabulary.hpp"
#include "topicdrift/weighting.hpp"

namespace topicdrift {

namespace {

using nlohmann::json;

// --- config parsing with path-labeled errors -------------------------------

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
    throw ConfigError("config." + path + ": " + what);
}

const json& require_field(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) config_fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) config_fail(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

std::string require_string(const json& j, const std::string& key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_string()) config_fail(path.empty() ? key : path + "." + key, "expected a string");
    return v.get<std::string>();
}

Date require_date(const json& j, const std::string& key, const std::string& path) {
    const std::string raw = require_string(j, key, path);
    auto date = Date::parse(raw);
    if (!date) config_fail(path + "." + key, "expected a YYYY-MM-DD date, got '" + raw + "'");
    return *date;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        config_fail(path.empty() ? key : path + "." + key, "wrong type");
    }
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError("config file " + path.string() + " is not valid JSON");
    }
    return parse(j, path.parent_path());
}

PipelineConfig PipelineConfig::parse(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    PipelineConfig config;

    auto resolve = [&](const std::string& raw) {
        std::filesystem::path p(raw);
        return p.is_absolute() ? p : base_dir / p;
    };

    config.corpus_path = resolve(require_string(j, "corpus", ""));
    config.dictionary_path = resolve(require_string(j, "dictionary", ""));
    if (j.contains("aliases") && !j["aliases"].is_null()) {
        if (!j["aliases"].is_string()) config_fail("aliases", "expected a string path");
        config.alias_path = resolve(j["aliases"].get<std::string>());
    }
    config.output_dir = resolve(require_string(j, "output_dir", ""));

    const json& slices = require_field(j, "slices", "");
    if (!slices.is_array() || slices.empty()) config_fail("slices", "expected a non-empty array");
    for (std::size_t i = 0; i < slices.size(); ++i) {
        const std::string path = "slices[" + std::to_string(i) + "]";
        SliceSpec spec;
        spec.label = require_string(slices[i], "label", path);
        spec.start = require_date(slices[i], "start", path);
        spec.end = require_date(slices[i], "end", path);
        if (!(spec.start < spec.end)) config_fail(path, "start must precede end");
        config.slices.push_back(std::move(spec));
    }
    for (std::size_t i = 1; i < config.slices.size(); ++i) {
        if (!(config.slices[i - 1].end < config.slices[i].start)) {
            config_fail("slices", "ranges must be ordered and non-overlapping");
        }
    }
    std::set<std::string> labels;
    for (const auto& s : config.slices) {
        if (!labels.insert(s.label).second) config_fail("slices", "duplicate label '" + s.label + "'");
    }

    config.window = get_or<std::size_t>(j, "window", 2, "");
    if (config.window < 1) config_fail("window", "must be >= 1");
    if (config.window > config.slices.size()) config_fail("window", "exceeds the slice count");

    config.seed = get_or<std::uint64_t>(j, "seed", 0, "");
    config.alpha = get_or<double>(j, "alpha", 0.05, "");
    if (!(config.alpha > 0.0) || !(config.alpha < 1.0)) config_fail("alpha", "must be in (0, 1)");
    if (j.contains("tau_mass") && !j["tau_mass"].is_null()) {
        config.tau_mass = get_or<double>(j, "tau_mass", 0.0, "");
        if (!(*config.tau_mass > 0.0) || !(*config.tau_mass <= 1.0)) {
            config_fail("tau_mass", "must be in (0, 1]");
        }
    }
    config.top_n = get_or<int>(j, "top_n", 5, "");
    if (config.top_n < 1) config_fail("top_n", "must be >= 1");

    if (j.contains("dnae")) {
        const json& d = j["dnae"];
        if (!d.is_object()) config_fail("dnae", "expected an object");
        config.dnae.hidden_dims =
            get_or<std::vector<int>>(d, "hidden_dims", config.dnae.hidden_dims, "dnae");
        config.dnae.learning_rate =
            get_or<double>(d, "learning_rate", config.dnae.learning_rate, "dnae");
        config.dnae.epochs = get_or<int>(d, "epochs", config.dnae.epochs, "dnae");
        config.dnae.batch_size = get_or<int>(d, "batch_size", config.dnae.batch_size, "dnae");
        config.dnae.init_scale = get_or<double>(d, "init_scale", config.dnae.init_scale, "dnae");
        config.dnae.seed = get_or<std::uint64_t>(d, "seed", config.seed, "dnae");
    } else {
        config.dnae.seed = config.seed;
    }
    try {
        config.dnae.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config.dnae: ") + e.what());
    }

    config.snapshot = {{"corpus", config.corpus_path.string()},
                       {"dictionary", config.dictionary_path.string()},
                       {"output_dir", config.output_dir.string()},
                       {"window", config.window},
                       {"seed", config.seed},
                       {"alpha", config.alpha},
                       {"top_n", config.top_n},
                       {"dnae",
                        {{"hidden_dims", config.dnae.hidden_dims},
                         {"learning_rate", config.dnae.learning_rate},
                         {"epochs", config.dnae.epochs},
                         {"batch_size", config.dnae.batch_size},
                         {"seed", config.dnae.seed},
                         {"init_scale", config.dnae.init_scale}}}};
    if (config.alias_path) config.snapshot["aliases"] = config.alias_path->string();
    if (config.tau_mass) config.snapshot["tau_mass"] = *config.tau_mass;
    json slice_json = json::array();
    for (const auto& s : config.slices) {
        slice_json.push_back(
            {{"label", s.label}, {"start", s.start.to_string()}, {"end", s.end.to_string()}});
    }
    config.snapshot["slices"] = std::move(slice_json);
    return config;
}

std::vector<std::string> PipelineConfig::window_labels() const {
    std::vector<std::string> labels;
    for (std::size_t t = window - 1; t < slices.size(); ++t) labels.push_back(slices[t].label);
    return labels;
}

// --- manifest helpers -------------------------------------------------------

namespace {

json manifest_load_or_create(const PipelineConfig& config, const RunOptions& options) {
    json manifest;
    if (std::filesystem::exists(config.manifest_path())) {
        manifest = json::parse(read_file(config.manifest_path()), nullptr, false);
        if (manifest.is_discarded() || !manifest.is_object()) manifest = json::object();
    } else {
        manifest = json::object();
    }
    manifest["tool_version"] = std::string(kToolVersion);
    manifest["config"] = config.snapshot;
    manifest["deterministic"] = options.deterministic;
    if (!manifest.contains("stages")) manifest["stages"] = json::object();
    return manifest;
}

void manifest_save(const PipelineConfig& config, const json& manifest) {
    std::filesystem::create_directories(config.reports_dir());
    write_file_atomic(config.manifest_path(), manifest.dump(2) + "\n");
}

class StageTimer {
public:
    explicit StageTimer(std::string stage)
        : stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}

    void finish(json& manifest) const {
        const auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start_);
        manifest["stages"][stage_] = {{"completed", true}, {"seconds", elapsed.count()}};
    }

private:
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

Vocabulary load_vocabulary_from_config(const PipelineConfig& config) {
    const auto keywords = read_term_list(config.dictionary_path);
    std::vector<std::pair<std::string, std::string>> aliases;
    if (config.alias_path) aliases = read_alias_csv(*config.alias_path);
    return Vocabulary::build(keywords, aliases);
}

std::filesystem::path slice_counts_path(const PipelineConfig& config, const std::string& label) {
    return config.slices_dir() / (label + ".counts.csv");
}

std::filesystem::path find_u_path(const PipelineConfig& config, const std::string& label) {
    const auto csv = config.u_dir() / (label + ".u.csv");
    if (std::filesystem::exists(csv)) return csv;
    const auto bin = config.u_dir() / (label + ".u.bin");
    if (std::filesystem::exists(bin)) return bin;
    throw DataError("missing topic-term matrix for window '" + label + "'; run train first");
}

std::vector<TopicTermMatrix> load_u_series(const PipelineConfig& config) {
    std::vector<TopicTermMatrix> series;
    for (const auto& label : config.window_labels()) {
        series.push_back(read_topic_term(find_u_path(config, label), label));
    }
    return series;
}

}  // namespace

// --- stages -----------------------------------------------------------------

void cmd_ingest(const PipelineConfig& config, const RunOptions& options) {
    json manifest = manifest_load_or_create(config, options);
    StageTimer timer("ingest");

    const Vocabulary vocab = load_vocabulary_from_config(config);
    const Corpus corpus = load_corpus(config.corpus_path);

    std::vector<TimeSlice> slice_defs;
    for (const auto& s : config.slices) slice_defs.push_back({s.label, s.start, s.end, {}});
    const SliceAssignment assignment = assign_slices(corpus, slice_defs);

    std::filesystem::create_directories(config.slices_dir());
    write_term_list(vocab.terms(), config.slices_dir() / "vocabulary.txt");

    json docs_per_slice = json::array();
    for (const auto& slice : assignment.slices) {
        if (slice.doc_indices.empty()) {
            std::cerr << "[ingest] warning: slice '" << slice.label << "' has zero documents\n";
        }
        std::vector<Document> docs;
        docs.reserve(slice.doc_indices.size());
        for (auto idx : slice.doc_indices) docs.push_back(corpus.documents[idx]);
        const SparseDocTermMatrix counts = count_matrix(docs, vocab);
        write_sparse_csv(counts, slice_counts_path(config, slice.label));
        docs_per_slice.push_back({{"label", slice.label}, {"documents", slice.doc_indices.size()}});
        std::cout << "[ingest] slice " << slice.label << ": " << slice.doc_indices.size()
                  << " documents\n";
    }

    json rejects = json::array();
    for (const auto& r : corpus.rejects) {
        rejects.push_back({{"line", r.line}, {"id", r.id}, {"reason", r.reason}});
    }
    for (const auto& r : assignment.out_of_range) {
        rejects.push_back({{"line", r.line}, {"id", r.id}, {"reason", r.reason}});
    }

    const json summary = {{"total_documents", corpus.documents.size()},
                          {"vocabulary_size", vocab.size()},
                          {"docs_per_slice", docs_per_slice},
                          {"rejected", rejects}};
    write_file_atomic(config.slices_dir() / "summary.json", summary.dump(2) + "\n");

    manifest["ingest"] = summary;
    timer.finish(manifest);
    manifest_save(config, manifest);
}

void cmd_train(const PipelineConfig& config, const RunOptions& options) {
    json manifest = manifest_load_or_create(config, options);
    StageTimer timer("train");

    const auto terms = read_term_list(config.slices_dir() / "vocabulary.txt");
    if (terms.empty()) throw DataError("vocabulary file missing or empty; run ingest first");
    const std::size_t m = terms.size();

    std::vector<LabeledMatrix> slice_counts;
    for (const auto& s : config.slices) {
        const auto path = slice_counts_path(config, s.label);
        if (!std::filesystem::exists(path)) {
            throw DataError("missing counts for slice '" + s.label + "'; run ingest first");
        }
        slice_counts.push_back({s.label, read_sparse_csv(path)});
    }

    const auto windows = window_stack(slice_counts, config.window);

    std::filesystem::create_directories(config.windows_dir());
    std::filesystem::create_directories(config.checkpoints_dir());
    std::filesystem::create_directories(config.u_dir());

    json window_records = json::array();
    std::vector<TopicTermMatrix> u_series;
    DnaeModel model;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& [label, weighted] = windows[i];
        write_sparse_csv(weighted, config.windows_dir() / (label + ".tfidf.csv"));

        DnaeConfig window_config = config.dnae;
        // Per-window batch-shuffle stream; window 0 keeps the configured seed
        // so a fresh init stays reproducible from the config alone.
        if (i > 0) window_config.seed = Rng::derive(config.dnae.seed, 1000 + i);

        if (i == 0) {
            model = init_model(window_config, m);
            model.provenance = label;
        } else {
            model = warm_start(model, m, label);
        }
        const TrainReport report = train(model, weighted, window_config);

        const auto checkpoint_path = config.checkpoints_dir() / (label + ".dnae");
        save_checkpoint_file(model, checkpoint_path);

        TopicTermMatrix u{extract_topic_term(model), label};
        const auto u_path = write_topic_term(u, terms, config.u_dir());
        u_series.push_back(std::move(u));

        std::cout << "[train] window " << label << ": rmse " << format_double(report.final_rmse)
                  << "\n";
        window_records.push_back({{"label", label},
                                  {"rmse", report.final_rmse},
                                  {"checkpoint", checkpoint_path.string()},
                                  {"topic_term_matrix", u_path.string()},
                                  {"min_weight_per_epoch", report.min_weight_per_epoch}});
    }

    json alignments = json::array();
    for (std::size_t i = 1; i < u_series.size(); ++i) {
        const TopicAlignment alignment = align_topics(u_series[i - 1], u_series[i]);
        alignments.push_back({{"from", u_series[i - 1].window_label},
                              {"to", u_series[i].window_label},
                              {"permutation", alignment.permutation},
                              {"total_cost", alignment.total_cost}});
    }
    std::filesystem::create_directories(config.reports_dir());
    write_file_atomic(config.reports_dir() / "alignment.json", alignments.dump(2) + "\n");

    manifest["train"] = {{"windows", window_records}};
    timer.finish(manifest);
    manifest_save(config, manifest);
}

void cmd_topics(const PipelineConfig& config, const RunOptions& options) {
    json manifest = manifest_load_or_create(config, options);
    StageTimer timer("topics");

    const auto terms = read_term_list(config.slices_dir() / "vocabulary.txt");
    if (terms.empty()) throw DataError("vocabulary file missing or empty; run ingest first");
    const auto u_series = load_u_series(config);

    std::string body = "window,topic,rank,term,weight\n";
    for (const auto& u : u_series) {
        const int top_n = std::min<int>(config.top_n, static_cast<int>(terms.size()));
        for (Eigen::Index topic = 0; topic < u.topics(); ++topic) {
            std::vector<std::size_t> order(terms.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return u.values(topic, static_cast<Eigen::Index>(a)) >
                       u.values(topic, static_cast<Eigen::Index>(b));
            });  // stable: ties stay in vocabulary order
            for (int rank = 0; rank < top_n; ++rank) {
                const std::size_t t = order[static_cast<std::size_t>(rank)];
                body += u.window_label;
                body += ',';
                body += std::to_string(topic + 1);
                body += ',';
                body += std::to_string(rank + 1);
                body += ',';
                body += terms[t];
                body += ',';
                body += format_double(u.values(topic, static_cast<Eigen::Index>(t)));
                body += '\n';
            }
        }
    }
    std::filesystem::create_directories(config.reports_dir());
    write_file_atomic(config.reports_dir() / "topics.csv", body);
    std::cout << "[topics] wrote " << (config.reports_dir() / "topics.csv").string() << "\n";

    manifest["topics"] = {{"top_n", config.top_n}};
    timer.finish(manifest);
    manifest_save(config, manifest);
}

void cmd_diffuse(const PipelineConfig& config, const RunOptions& options) {
    json manifest = manifest_load_or_create(config, options);
    StageTimer timer("diffuse");

    const auto terms = read_term_list(config.slices_dir() / "vocabulary.txt");
    if (terms.empty()) throw DataError("vocabulary file missing or empty; run ingest first");
    const auto u_series = load_u_series(config);
    if (u_series.size() < 2) {
        throw DataError("diffuse needs at least 2 windows; got " +
                        std::to_string(u_series.size()));
    }

    std::vector<TermTopicDistribution> windows;
    windows.reserve(u_series.size());
    for (const auto& u : u_series) windows.push_back(normalize_termwise(u));

    DiffusionOptions diffusion_options;
    diffusion_options.alpha = config.alpha;
    diffusion_options.tau_mass = config.tau_mass;

    std::vector<std::string> pair_labels;
    for (std::size_t w = 1; w < windows.size(); ++w) {
        pair_labels.push_back(windows[w - 1].window_label + "->" + windows[w].window_label);
    }

    std::string body = "term,window_pair,d_gjs,threshold,significant,support,classification\n";
    std::vector<DiffusionSeries> all_series;
    all_series.reserve(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
        DiffusionSeries series = diffusion_series(windows, t, diffusion_options);
        for (std::size_t p = 0; p < series.scores.size(); ++p) {
            body += terms[t];
            body += ',';
            body += pair_labels[p];
            body += ',';
            body += format_double(series.scores[p]);
            body += ',';
            body += format_double(series.threshold);
            body += ',';
            body += series.significant[p] ? "true" : "false";
            body += ',';
            body += std::to_string(series.support_per_window[p + 1]);
            body += ',';
            body += to_string(series.classification);
            body += '\n';
        }
        all_series.push_back(std::move(series));
    }
    std::filesystem::create_directories(config.reports_dir());
    write_file_atomic(config.reports_dir() / "diffusion.csv", body);
    std::cout << "[diffuse] wrote " << (config.reports_dir() / "diffusion.csv").string() << "\n";

    // Charts only for explicitly requested terms; unknown names are reported
    // and skipped, the run continues.
    std::vector<std::string> skipped;
    std::size_t charts = 0;
    if (!options.terms.empty()) {
        const auto charts_dir = config.reports_dir() / "charts";
        std::filesystem::create_directories(charts_dir);
        std::unordered_map<std::string, std::size_t> index;
        for (std::size_t t = 0; t < terms.size(); ++t) index.emplace(terms[t], t);
        for (const auto& requested : options.terms) {
            auto it = index.find(requested);
            if (it == index.end()) {
                skipped.push_back(requested);
                std::cerr << "[diffuse] warning: unknown term '" << requested << "' skipped\n";
                continue;
            }
            const auto& series = all_series[it->second];
            write_diffusion_chart(charts_dir / (term_slug(requested) + ".svg"), requested,
                                  pair_labels, series.scores, series.threshold);
            ++charts;
        }
        if (!skipped.empty()) {
            std::string text;
            for (const auto& s : skipped) {
                text += s;
                text += '\n';
            }
            write_file_atomic(config.reports_dir() / "skipped_terms.txt", text);
        }
    }

    manifest["diffuse"] = {{"terms", terms.size()},
                           {"window_pairs", pair_labels.size()},
                           {"charts", charts},
                           {"skipped_terms", skipped}};
    timer.finish(manifest);
    manifest_save(config, manifest);
}

void cmd_pipeline(const PipelineConfig& config, const RunOptions& options) {
    if (std::filesystem::exists(config.manifest_path()) && !options.force) {
        throw ConfigError("output directory already holds a completed run (" +
                          config.manifest_path().string() + "); pass --force to overwrite");
    }
    const char* stage = "ingest";
    try {
        cmd_ingest(config, options);
        stage = "train";
        cmd_train(config, options);
        stage = "topics";
        cmd_topics(config, options);
        stage = "diffuse";
        cmd_diffuse(config, options);
    } catch (const ConfigError& e) {
        throw ConfigError("stage " + std::string(stage) + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError("stage " + std::string(stage) + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("stage " + std::string(stage) + ": " + e.what());
    }
}

}  // namespace topicdrift
