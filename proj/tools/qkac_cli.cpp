// qkac <subcommand> --config <path> [--out <path>] [--format csv|json] [--seed <u64>] [--parallel <n>]
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qkac/error.hpp"
#include "qkac/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum Kac chaos experiments"};
    app.set_version_flag("--version", qkac::kToolVersion);
    app.require_subcommand(1);

    const std::map<std::string, qkac::ExperimentKind> kinds{
        {"chaos", qkac::ExperimentKind::chaos_sweep},
        {"propagate", qkac::ExperimentKind::propagation},
        {"bbgky", qkac::ExperimentKind::bbgky_verify},
        {"hartree", qkac::ExperimentKind::hartree_convergence},
        {"audit-bounds", qkac::ExperimentKind::bound_audit},
    };

    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> parallel;

    for (const auto& [name, kind] : kinds) {
        auto* sub = app.add_subcommand(name, "Run the " + qkac::to_string(kind) + " experiment");
        sub->add_option("--config", config_path, "Experiment config file")->required();
        sub->add_option("--out", out, "Output path ('-' for stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "Master seed override");
        sub->add_option("--parallel", parallel, "Concurrent N values")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const auto& chosen = app.get_subcommands().front()->get_name();
    qkac::ExperimentConfig cfg;
    try {
        cfg = qkac::load_config(config_path);
    } catch (const qkac::Error& e) {
        std::cerr << "qkac: " << e.what() << '\n';
        return kExitConfig;
    }
    if (cfg.kind != kinds.at(chosen)) {
        std::cerr << "qkac: config kind '" << qkac::to_string(cfg.kind) << "' does not match subcommand '"
                  << chosen << "'\n";
        return kExitConfig;
    }
    if (out) cfg.output = *out;
    if (format) cfg.format = *format == "json" ? qkac::OutputFormat::json : qkac::OutputFormat::csv;
    if (seed) cfg.seed = *seed;
    if (parallel) cfg.parallel = *parallel;

    const auto table = qkac::run_experiment(cfg);
    const auto& status = table.metadata.at("status");
    if (status == qkac::kStatusConfigError) {
        std::cerr << "qkac: " << table.metadata.at("error_message") << '\n';
        return kExitConfig;
    }
    try {
        qkac::write_table(table, cfg.output, cfg.format);
    } catch (const qkac::IoError& e) {
        std::cerr << "qkac: " << e.what() << '\n';
        return kExitConfig;
    }
    if (status != qkac::kStatusOk) {
        std::cerr << "qkac: " << table.metadata.at("error_type") << ": " << table.metadata.at("error_message")
                  << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
