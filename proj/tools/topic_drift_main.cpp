#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topicdrift/errors.hpp"
#include "topicdrift/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct Args {
    std::string config_path;
    bool force = false;
    bool deterministic = false;
    std::string terms;  // comma-separated chart filter
};

std::vector<std::string> split_terms(const std::string& csv) {
    std::vector<std::string> terms;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const auto end = comma == std::string::npos ? csv.size() : comma;
        if (end > start) terms.push_back(csv.substr(start, end - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return terms;
}

void add_common(CLI::App* cmd, Args& args) {
    cmd->add_option("--config", args.config_path, "Pipeline config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_flag("--force", args.force, "Overwrite outputs of a previous run");
    cmd->add_flag("--deterministic", args.deterministic,
                  "Sequential deterministic mode (the default; recorded in the manifest)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topic diffusion discovery over time-sliced corpora"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(topicdrift::kToolVersion));

    Args args;
    auto* ingest = app.add_subcommand("ingest", "Slice the corpus and write count matrices");
    auto* train = app.add_subcommand("train", "Train one autoencoder per window with warm starts");
    auto* topics = app.add_subcommand("topics", "Top-n keywords per topic per window");
    auto* diffuse = app.add_subcommand("diffuse", "Score and classify term diffusion");
    auto* pipeline = app.add_subcommand("pipeline", "Run ingest, train, topics, diffuse");
    for (auto* cmd : {ingest, train, topics, diffuse, pipeline}) add_common(cmd, args);
    diffuse->add_option("--terms", args.terms, "Comma-separated terms to chart");
    pipeline->add_option("--terms", args.terms, "Comma-separated terms to chart");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        const auto config = topicdrift::PipelineConfig::load(args.config_path);
        topicdrift::RunOptions options;
        options.force = args.force;
        options.deterministic = true;  // parallel mode is not implemented
        options.terms = split_terms(args.terms);

        if (ingest->parsed()) topicdrift::cmd_ingest(config, options);
        if (train->parsed()) topicdrift::cmd_train(config, options);
        if (topics->parsed()) topicdrift::cmd_topics(config, options);
        if (diffuse->parsed()) topicdrift::cmd_diffuse(config, options);
        if (pipeline->parsed()) topicdrift::cmd_pipeline(config, options);
        return kOk;
    } catch (const topicdrift::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const topicdrift::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const topicdrift::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
}
