#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qkac {

inline constexpr const char* kToolVersion = "0.3.0";

enum class ExperimentKind { chaos_sweep, propagation, bbgky_verify, hartree_convergence, bound_audit };
enum class OutputFormat { csv, json };
enum class StateFamily { product, mixture };

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(const std::string& text);

/// Declarative description of one experiment.
///
/// Text form is one `key = value` per line; `#` starts a comment; lists are
/// comma separated. Tolerance overrides use the single nesting level
/// `tol.<name> = value`.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::chaos_sweep;
    std::size_t d = 2;
    std::vector<std::size_t> n_list;
    std::vector<std::size_t> k_list{1};
    std::vector<double> times{0.5};
    double step = 1e-3;
    std::uint64_t seed = 0;
    double a_norm = 1.0;
    double v_norm = 1.0;
    /// Central-difference spacing for hierarchy residuals.
    double h = 1e-3;
    StateFamily state = StateFamily::product;
    /// Observables per chaos report (0 keeps the whole Weyl basis).
    std::size_t observables = 0;
    /// Random trials per N in bound_audit.
    std::size_t trials = 10;
    /// Trapezoid intervals for the Gronwall audit in propagation (0 disables it).
    std::size_t quad_intervals = 20;
    std::size_t parallel = 1;
    std::size_t max_total_dim = 4096;
    std::map<std::string, double> tolerances;
    std::string output;
    OutputFormat format = OutputFormat::csv;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

    /// Tolerance override or `fallback`.
    double tol(const std::string& name, double fallback) const;
};

/// Names accepted after `tol.`.
const std::vector<std::string>& known_tolerances();

/// Parses the text form; throws ParseError with line/field diagnostics.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Normalized text form; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& cfg);

/// Checks semantic constraints; throws ConfigInvalid.
void validate_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the normalized text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

using Cell = std::variant<double, std::int64_t, std::string>;

struct ResultTable {
    std::vector<std::string> schema;
    std::vector<std::vector<Cell>> rows;
    std::map<std::string, std::string> metadata;

    /// Throws DimensionMismatch unless the row has the schema's arity.
    void add_row(std::vector<Cell> row);
    bool ok() const;
};

/// RFC-4180 CSV preceded by `# key: value` metadata lines.
std::string to_csv(const ResultTable& table);
/// {"metadata": {...}, "schema": [...], "rows": [[...], ...]}
std::string to_json(const ResultTable& table);
/// Writes to `path`, or to stdout when the path is empty or "-". Throws IoError.
void write_table(const ResultTable& table, const std::string& path, OutputFormat format);

/// Outcome classes recorded under metadata["status"].
inline constexpr const char* kStatusOk = "ok";
inline constexpr const char* kStatusConfigError = "config_error";
inline constexpr const char* kStatusNumericalError = "numerical_error";

/// Runs the experiment. Module errors abort the run and are recorded in the
/// metadata (status, error_type, error_message); rows computed before the
/// failure are discarded. Identical configs give identical rows.
ResultTable run_experiment(const ExperimentConfig& cfg);

}  // namespace qkac
