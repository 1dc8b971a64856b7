#include "qkac/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qkac/chaos.hpp"
#include "qkac/dynamics.hpp"
#include "qkac/error.hpp"
#include "qkac/random.hpp"
#include "qkac/states.hpp"

namespace qkac {

// ---------------------------------------------------------------------------
// Config text form

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::chaos_sweep: return "chaos_sweep";
        case ExperimentKind::propagation: return "propagation";
        case ExperimentKind::bbgky_verify: return "bbgky_verify";
        case ExperimentKind::hartree_convergence: return "hartree_convergence";
        case ExperimentKind::bound_audit: return "bound_audit";
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_kind(const std::string& text) {
    for (auto k : {ExperimentKind::chaos_sweep, ExperimentKind::propagation, ExperimentKind::bbgky_verify,
                   ExperimentKind::hartree_convergence, ExperimentKind::bound_audit})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

const std::vector<std::string>& known_tolerances() {
    static const std::vector<std::string> names{"bound", "drift", "gronwall_slack", "psd", "trace"};
    return names;
}

double ExperimentConfig::tol(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct FieldParser {
    int line;
    const std::string& key;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line, key, what); }

    double real(const std::string& v) const {
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x))
            fail("expected a real number, got '" + v + "'");
        return x;
    }

    std::uint64_t u64(const std::string& v) const {
        std::uint64_t x = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc{} || ptr != v.data() + v.size()) fail("expected a non-negative integer, got '" + v + "'");
        return x;
    }

    std::size_t size(const std::string& v) const { return static_cast<std::size_t>(u64(v)); }

    template <class F>
    auto list(const std::string& v, F item) const {
        std::vector<decltype(item(std::string{}))> out;
        std::stringstream ss(v);
        std::string part;
        while (std::getline(ss, part, ',')) {
            part = trim(part);
            if (part.empty()) fail("empty list element");
            out.push_back(item(part));
        }
        if (out.empty()) fail("empty list");
        return out;
    }
};

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_floating_point_v<T>) out += format_double(xs[i]);
        else out += std::to_string(xs[i]);
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    bool have_kind = false;
    bool have_n = false;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, line, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        FieldParser p{line_no, key};
        if (key.empty()) p.fail("empty key");
        if (!seen.insert(key).second) p.fail("duplicate key");
        if (value.empty() && key != "output") p.fail("missing value");

        if (key == "kind") {
            const auto k = parse_kind(value);
            if (!k) p.fail("unknown experiment kind '" + value + "'");
            cfg.kind = *k;
            have_kind = true;
        } else if (key == "d") {
            cfg.d = p.size(value);
        } else if (key == "N_list") {
            cfg.n_list = p.list(value, [&](const std::string& s) { return p.size(s); });
            have_n = true;
        } else if (key == "k_list") {
            cfg.k_list = p.list(value, [&](const std::string& s) { return p.size(s); });
        } else if (key == "times") {
            cfg.times = p.list(value, [&](const std::string& s) { return p.real(s); });
        } else if (key == "step") {
            cfg.step = p.real(value);
        } else if (key == "seed") {
            cfg.seed = p.u64(value);
        } else if (key == "A_norm") {
            cfg.a_norm = p.real(value);
        } else if (key == "V_norm") {
            cfg.v_norm = p.real(value);
        } else if (key == "h") {
            cfg.h = p.real(value);
        } else if (key == "state") {
            if (value == "product") cfg.state = StateFamily::product;
            else if (value == "mixture") cfg.state = StateFamily::mixture;
            else p.fail("state must be 'product' or 'mixture'");
        } else if (key == "observables") {
            cfg.observables = p.size(value);
        } else if (key == "trials") {
            cfg.trials = p.size(value);
        } else if (key == "quad_intervals") {
            cfg.quad_intervals = p.size(value);
        } else if (key == "parallel") {
            cfg.parallel = p.size(value);
        } else if (key == "max_total_dim") {
            cfg.max_total_dim = p.size(value);
        } else if (key == "output") {
            cfg.output = value;
        } else if (key == "format") {
            if (value == "csv") cfg.format = OutputFormat::csv;
            else if (value == "json") cfg.format = OutputFormat::json;
            else p.fail("format must be 'csv' or 'json'");
        } else if (key.rfind("tol.", 0) == 0) {
            const std::string name = key.substr(4);
            const auto& names = known_tolerances();
            if (std::find(names.begin(), names.end(), name) == names.end()) p.fail("unknown tolerance");
            cfg.tolerances[name] = p.real(value);
        } else {
            p.fail("unknown key");
        }
    }
    if (!have_kind) throw ParseError(line_no, "kind", "required field missing");
    if (!have_n) throw ParseError(line_no, "N_list", "required field missing");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "kind = " << to_string(cfg.kind) << '\n';
    out << "d = " << cfg.d << '\n';
    out << "N_list = " << join(cfg.n_list) << '\n';
    out << "k_list = " << join(cfg.k_list) << '\n';
    out << "times = " << join(cfg.times) << '\n';
    out << "step = " << format_double(cfg.step) << '\n';
    out << "seed = " << cfg.seed << '\n';
    out << "A_norm = " << format_double(cfg.a_norm) << '\n';
    out << "V_norm = " << format_double(cfg.v_norm) << '\n';
    out << "h = " << format_double(cfg.h) << '\n';
    out << "state = " << (cfg.state == StateFamily::product ? "product" : "mixture") << '\n';
    out << "observables = " << cfg.observables << '\n';
    out << "trials = " << cfg.trials << '\n';
    out << "quad_intervals = " << cfg.quad_intervals << '\n';
    out << "parallel = " << cfg.parallel << '\n';
    out << "max_total_dim = " << cfg.max_total_dim << '\n';
    for (const auto& [name, value] : cfg.tolerances) out << "tol." << name << " = " << format_double(value) << '\n';
    out << "output = " << cfg.output << '\n';
    out << "format = " << (cfg.format == OutputFormat::csv ? "csv" : "json") << '\n';
    return out.str();
}

void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& what) { throw ConfigInvalid(what); };
    if (cfg.d < 1) fail("d must be positive");
    if (cfg.n_list.empty()) fail("N_list must not be empty");
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
        if (cfg.n_list[i] < 1) fail("N_list entries must be positive");
        if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) fail("N_list must be strictly ascending");
    }
    try {
        TensorShape(cfg.d, cfg.n_list.back(), cfg.max_total_dim);
    } catch (const MemoryBudgetExceeded& e) {
        fail(std::string("N_list: ") + e.what());
    }
    if (cfg.k_list.empty()) fail("k_list must not be empty");
    for (std::size_t k : cfg.k_list) {
        if (k < 1) fail("k_list entries must be positive");
        if (k > cfg.n_list.front()) fail("k_list entries must not exceed min(N_list)");
    }
    if (cfg.times.empty()) fail("times must not be empty");
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
        if (cfg.times[i] < 0.0) fail("times must be non-negative");
        if (i > 0 && cfg.times[i] < cfg.times[i - 1]) fail("times must be ascending");
    }
    if (cfg.a_norm < 0.0 || cfg.v_norm < 0.0) fail("operator norms must be non-negative");
    if (!(cfg.h > 0.0)) fail("h must be positive");
    if (cfg.parallel < 1) fail("parallel must be at least 1");
    const double cap = std::min(0.1, 1.0 / (40.0 * std::max(cfg.v_norm, 1.0)));
    if (!(cfg.step > 0.0) || cfg.step > cap * (1.0 + 1e-12))
        fail("step must lie in (0, " + format_double(cap) + "] for V_norm = " + format_double(cfg.v_norm));
    if (cfg.kind == ExperimentKind::propagation) {
        for (double t : cfg.times) {
            const double ratio = t / cfg.step;
            if (std::abs(ratio - std::round(ratio)) > 1e-6)
                fail("propagation times must be multiples of step (t = " + format_double(t) + ")");
        }
    }
    if (cfg.kind == ExperimentKind::bound_audit && cfg.trials < 1) fail("trials must be at least 1");
    for (const auto& [name, value] : cfg.tolerances)
        if (!(value >= 0.0)) fail("tol." + name + " must be non-negative");
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : format_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Result tables

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != schema.size()) {
        throw DimensionMismatch("ResultTable: row has " + std::to_string(row.size()) + " cells, schema has " +
                                std::to_string(schema.size()));
    }
    rows.push_back(std::move(row));
}

bool ResultTable::ok() const {
    const auto it = metadata.find("status");
    return it != metadata.end() && it->second == kStatusOk;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string cell_text(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (std::isnan(v)) return "nan";
                return format_double(v);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else {
                return v;
            }
        },
        cell);
}

}  // namespace

std::string to_csv(const ResultTable& table) {
    std::string out;
    for (const auto& [k, v] : table.metadata) out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < table.schema.size(); ++i) out += (i ? "," : "") + csv_escape(table.schema[i]);
    out += "\r\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(cell_text(row[i]));
        out += "\r\n";
    }
    return out;
}

std::string to_json(const ResultTable& table) {
    nlohmann::json j;
    j["metadata"] = table.metadata;
    j["schema"] = table.schema;
    auto rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        auto r = nlohmann::json::array();
        for (const auto& cell : row) std::visit([&](const auto& v) { r.push_back(v); }, cell);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

void write_table(const ResultTable& table, const std::string& path, OutputFormat format) {
    const std::string text = format == OutputFormat::csv ? to_csv(table) : to_json(table);
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string error_name(const Error& e) {
#define QKAC_ERROR_NAME(T) \
    if (dynamic_cast<const T*>(&e)) return #T;
    QKAC_ERROR_NAME(DimensionMismatch)
    QKAC_ERROR_NAME(NotHermitian)
    QKAC_ERROR_NAME(ConvergenceFailure)
    QKAC_ERROR_NAME(MemoryBudgetExceeded)
    QKAC_ERROR_NAME(BadSiteIndex)
    QKAC_ERROR_NAME(SameSite)
    QKAC_ERROR_NAME(NotPSD)
    QKAC_ERROR_NAME(TraceNotOne)
    QKAC_ERROR_NAME(PermutationBudgetExceeded)
    QKAC_ERROR_NAME(WeightsInvalid)
    QKAC_ERROR_NAME(StepTooLarge)
    QKAC_ERROR_NAME(DensityDriftExceeded)
    QKAC_ERROR_NAME(BoundViolation)
    QKAC_ERROR_NAME(IoError)
#undef QKAC_ERROR_NAME
    return "Error";
}

enum Stream : std::uint64_t { kStreamState = 1, kStreamSystem = 2, kStreamMixture = 3, kStreamAudit = 16 };

using Row = std::vector<Cell>;

Cell integer(std::size_t v) { return static_cast<std::int64_t>(v); }

/// Runs `task(N)` for each N; up to `parallel` at once. Output keeps N order.
std::vector<std::vector<Row>> per_n(const ExperimentConfig& cfg,
                                    const std::function<std::vector<Row>(std::size_t)>& task) {
    std::vector<std::vector<Row>> out(cfg.n_list.size());
    if (cfg.parallel <= 1) {
        for (std::size_t i = 0; i < cfg.n_list.size(); ++i) out[i] = task(cfg.n_list[i]);
        return out;
    }
    for (std::size_t start = 0; start < cfg.n_list.size(); start += cfg.parallel) {
        std::vector<std::future<std::vector<Row>>> batch;
        const std::size_t stop = std::min(cfg.n_list.size(), start + cfg.parallel);
        for (std::size_t i = start; i < stop; ++i)
            batch.push_back(std::async(std::launch::async, task, cfg.n_list[i]));
        for (std::size_t i = start; i < stop; ++i) out[i] = batch[i - start].get();
    }
    return out;
}

MeanFieldSystem seeded_system(const ExperimentConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, kStreamSystem));
    return MeanFieldSystem::random(cfg.d, rng, cfg.a_norm, cfg.v_norm);
}

DensityOperator seeded_state(const ExperimentConfig& cfg) {
    return random_density(cfg.d, derive_seed(cfg.seed, kStreamState));
}

struct InitialState {
    DensityOperator rho_n;
    DensityOperator target;
};

/// product: rho^{(x)N}. mixture: (1/2)(rho_1^{(x)N} + rho_2^{(x)N}) with
/// rho_m = (1 - e) rho + e sigma_m and e = 1/sqrt(N); rho is the target.
InitialState initial_state(const ExperimentConfig& cfg, std::size_t n) {
    const auto rho = seeded_state(cfg);
    if (cfg.state == StateFamily::product) return {tensor_power(rho, n, cfg.max_total_dim), rho};
    Rng rng(derive_seed(cfg.seed, kStreamMixture));
    const double e = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<DensityOperator> parts;
    for (int m = 0; m < 2; ++m) {
        const auto sigma = random_density(cfg.d, rng);
        parts.push_back(DensityOperator::from_trusted(rho.matrix() * Complex(1.0 - e) + sigma.matrix() * Complex(e),
                                                      rho.shape()));
    }
    const double w[2] = {0.5, 0.5};
    return {mixture_of_powers(w, parts, n), rho};
}

ResultTable chaos_sweep(const ExperimentConfig& cfg) {
    ResultTable table;
    table.schema = {"N", "k", "chaos_distance", "e_N_max", "C_kN_max", "corollary_bound",
                    "corollary_bound_unsquared", "bound_ok", "unsquared_bound_ok"};
    const auto observables = weyl_basis(cfg.d, cfg.observables);
    const double slack = cfg.tol("bound", 1e-9);
    auto blocks = per_n(cfg, [&](std::size_t n) {
        const auto init = initial_state(cfg, n);
        std::vector<Row> rows;
        for (std::size_t k : cfg.k_list) {
            const auto rep = chaos_report(init.rho_n, init.target, k, observables);
            double e_max = 0.0, c_max = 0.0;
            bool ok = true, ok_unsq = true;
            for (const auto& [_, e] : rep.e_n_values) e_max = std::max(e_max, e);
            for (const auto& t : rep.tuples) {
                c_max = std::max(c_max, t.c_kn);
                ok = ok && t.c_kn <= t.bound + slack;
                ok_unsq = ok_unsq && t.c_kn <= t.bound_unsquared + slack;
            }
            rows.push_back({integer(n), integer(k), rep.chaos_distance, e_max, c_max, rep.corollary_bound,
                            rep.corollary_bound_unsquared, integer(ok), integer(ok_unsq)});
        }
        return rows;
    });
    for (auto& b : blocks)
        for (auto& r : b) table.add_row(std::move(r));
    return table;
}

ResultTable propagation(const ExperimentConfig& cfg) {
    ResultTable table;
    table.schema = {"N", "t", "n", "E_norm", "eps_norm", "eps_bound", "gronwall_rhs", "gronwall_ok"};
    const auto sys = seeded_system(cfg);
    const auto rho0 = seeded_state(cfg);
    const double t_max = cfg.times.back();
    HartreeOptions hopts;
    hopts.drift_tol = cfg.tol("drift", 1e-7);
    const auto traj = integrate_hartree(rho0, sys, 0.0, t_max, cfg.step, hopts);
    const double slack = cfg.tol("gronwall_slack", 0.05);
    const double bound_slack = cfg.tol("bound", 1e-9);
    const std::size_t steps = traj.times.size() - 1;

    std::set<std::size_t> grid;
    for (double t : cfg.times) grid.insert(traj.index_of(t));
    if (cfg.quad_intervals > 0 && steps > 0) {
        for (std::size_t i = 0; i <= cfg.quad_intervals; ++i)
            grid.insert(static_cast<std::size_t>(std::llround(static_cast<double>(i * steps) /
                                                              static_cast<double>(cfg.quad_intervals))));
    }
    const std::vector<std::size_t> indices(grid.begin(), grid.end());
    const std::size_t k_max = *std::max_element(cfg.k_list.begin(), cfg.k_list.end());

    auto blocks = per_n(cfg, [&](std::size_t n) {
        const ExactPropagator prop(build_hamiltonian(sys, n, cfg.max_total_dim));
        const auto evolution = prop.prepare(tensor_power(rho0, n, cfg.max_total_dim));
        const bool with_gronwall = cfg.quad_intervals > 0;
        const std::size_t orders = std::min(n, with_gronwall ? k_max + 1 : k_max);

        // errors[g][m - 1] = ||E_{m,N}(t_g)||_1 on the sampling grid
        std::vector<double> times;
        std::vector<std::vector<double>> errors;
        std::map<std::size_t, DensityOperator> states;
        for (std::size_t g : indices) {
            const double t = traj.times[g];
            auto state = evolution.at(t);
            std::vector<double> e;
            for (std::size_t m = 1; m <= orders; ++m) e.push_back(chaos_distance(state, traj.states[g], m));
            times.push_back(t);
            errors.push_back(std::move(e));
            states.emplace(g, std::move(state));
        }

        std::vector<Row> rows;
        for (double t : cfg.times) {
            const std::size_t g = traj.index_of(t);
            const std::size_t pos = static_cast<std::size_t>(
                std::find(indices.begin(), indices.end(), g) - indices.begin());
            const auto& state = states.at(g);
            for (std::size_t order : cfg.k_list) {
                if (order > n) continue;
                double eps_norm = kNaN, eps_bound = kNaN, g_rhs = kNaN;
                std::int64_t g_ok = -1;
                if (order + 1 <= n) {
                    const auto eps = epsilon_term(state, sys, order, false);
                    if (eps.trace_norm > eps.bound + bound_slack) {
                        throw BoundViolation("propagation: ||eps_" + std::to_string(order) + "|| = " +
                                             format_double(eps.trace_norm) + " exceeds " + format_double(eps.bound));
                    }
                    eps_norm = eps.trace_norm;
                    eps_bound = eps.bound;
                    if (with_gronwall) {
                        std::vector<double> en, enext, ts;
                        for (std::size_t r = 0; r <= pos; ++r) {
                            ts.push_back(times[r]);
                            en.push_back(errors[r][order - 1]);
                            enext.push_back(errors[r][order]);
                        }
                        const auto pts = gronwall_check(ts, en, enext, order, n, sys.pair_norm());
                        g_rhs = pts.back().rhs;
                        g_ok = pts.back().lhs <= g_rhs * (1.0 + slack) ? 1 : 0;
                    }
                }
                rows.push_back({integer(n), t, integer(order), errors[pos][order - 1], eps_norm, eps_bound, g_rhs,
                                std::int64_t{g_ok}});
            }
        }
        return rows;
    });
    for (auto& b : blocks)
        for (auto& r : b) table.add_row(std::move(r));
    return table;
}

ResultTable bbgky_verify(const ExperimentConfig& cfg) {
    ResultTable table;
    table.schema = {"N", "n", "t", "h", "residual_h", "residual_h2", "ratio", "eps_norm", "eps_bound"};
    const auto sys = seeded_system(cfg);
    auto blocks = per_n(cfg, [&](std::size_t n) {
        const auto init = initial_state(cfg, n);
        const ExactPropagator prop(build_hamiltonian(sys, n, cfg.max_total_dim));
        const auto evolution = prop.prepare(init.rho_n);
        std::vector<Row> rows;
        for (std::size_t order : cfg.k_list) {
            if (order + 1 > n) continue;
            for (double t : cfg.times) {
                const auto r1 = bbgky_residual(evolution, sys, order, t, cfg.h);
                const auto r2 = bbgky_residual(evolution, sys, order, t, cfg.h / 2);
                const double ratio = r2.residual_trace_norm > 0.0 ? r1.residual_trace_norm / r2.residual_trace_norm : kNaN;
                rows.push_back({integer(n), integer(order), t, cfg.h, r1.residual_trace_norm, r2.residual_trace_norm,
                                ratio, r1.epsilon_norm, r1.epsilon_bound});
            }
        }
        return rows;
    });
    for (auto& b : blocks)
        for (auto& r : b) table.add_row(std::move(r));
    return table;
}

ResultTable hartree_convergence(const ExperimentConfig& cfg) {
    ResultTable table;
    table.schema = {"step", "t_end", "endpoint_change", "order_ratio", "max_trace_drift", "min_eigenvalue",
                    "closed_form_error", "hierarchy_residual_n"};
    const auto sys = seeded_system(cfg);
    const auto rho0 = seeded_state(cfg);
    const double t_end = cfg.times.back();
    HartreeOptions hopts;
    hopts.drift_tol = cfg.tol("drift", 1e-7);

    std::vector<HartreeTrajectory> trajs;
    for (int level = 0; level < 3; ++level)
        trajs.push_back(integrate_hartree(rho0, sys, 0.0, t_end, cfg.step / std::pow(2.0, level), hopts));

    std::vector<double> change(3, kNaN);
    for (int level = 0; level < 2; ++level)
        change[level] = trace_norm(trajs[level].states.back().matrix() - trajs[level + 1].states.back().matrix());

    for (int level = 0; level < 3; ++level) {
        const auto& traj = trajs[level];
        double drift = 0.0, lmin = std::numeric_limits<double>::infinity();
        for (const auto& s : traj.states) {
            drift = std::max(drift, std::abs(trace(s.matrix()) - 1.0));
            lmin = std::min(lmin, min_eigenvalue(s.matrix()));
        }
        double closed = kNaN;
        if (sys.pair_norm() == 0.0) {
            const auto u = herm_expm(sys.one_body(), t_end);
            closed = trace_norm(traj.states.back().matrix() - u * rho0.matrix() * adjoint(u));
        }
        const double ratio = level == 0 && change[1] > 0.0 ? change[0] / change[1] : kNaN;
        // Hierarchy residual at mid-trajectory for the largest requested order.
        double residual = kNaN;
        const std::size_t order = *std::max_element(cfg.k_list.begin(), cfg.k_list.end());
        const std::size_t mid = (traj.times.size() - 1) / 2;
        const std::size_t offset = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.h / traj.step_size)));
        if (mid >= offset && mid + offset < traj.times.size()) {
            residual = tensor_hierarchy_residual(traj, sys, order, traj.times[mid],
                                                 traj.times[mid + offset] - traj.times[mid]);
        }
        table.add_row({traj.step_size, t_end, change[level], ratio, drift, lmin, closed, residual});
    }
    return table;
}

ResultTable bound_audit(const ExperimentConfig& cfg) {
    ResultTable table;
    table.schema = {"N", "trial", "t", "k", "C_kN", "corollary_bound", "corollary_bound_unsquared", "bound_ok",
                    "unsquared_bound_ok", "eps_norm", "eps_bound", "eps_ok"};
    const double slack = cfg.tol("bound", 1e-9);
    auto blocks = per_n(cfg, [&](std::size_t n) {
        std::vector<Row> rows;
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            Rng rng(derive_seed(cfg.seed, kStreamAudit + n, trial));
            const std::size_t parts = 2 + trial % 2;
            std::vector<DensityOperator> states;
            std::vector<double> w;
            double wsum = 0.0;
            std::uniform_real_distribution<double> unit(0.05, 1.0);
            for (std::size_t m = 0; m < parts; ++m) {
                states.push_back(random_density(cfg.d, rng));
                w.push_back(unit(rng));
                wsum += w.back();
            }
            for (auto& x : w) x /= wsum;
            auto rho_n = mixture_of_powers(w, states, n);
            const double t = cfg.times[trial % cfg.times.size()];
            const auto sys = MeanFieldSystem::random(cfg.d, rng, cfg.a_norm, cfg.v_norm);
            if (t != 0.0) rho_n = evolve_exact(rho_n, sys, t);
            const auto target = marginal(rho_n, 1);

            for (std::size_t k : cfg.k_list) {
                if (k > n) continue;
                std::vector<ComplexMatrix> ops;
                std::vector<double> e_adj;
                for (std::size_t j = 0; j < k; ++j) {
                    ops.push_back(random_observable(cfg.d, rng, unit(rng)));
                    e_adj.push_back(empirical_variance(rho_n, target, adjoint(ops.back())));
                }
                const double c = factorization_error(rho_n, target, ops);
                const auto bound = corollary_bound(target, ops, e_adj, n);
                double eps_norm = kNaN, eps_bound = kNaN;
                std::int64_t eps_ok = -1;
                if (k + 1 <= n) {
                    const auto eps = epsilon_term(rho_n, sys, k, false);
                    eps_norm = eps.trace_norm;
                    eps_bound = eps.bound;
                    eps_ok = eps.trace_norm <= eps.bound + slack ? 1 : 0;
                }
                rows.push_back({integer(n), integer(trial), t, integer(k), c, bound.printed, bound.unsquared,
                                integer(c <= bound.printed + slack), integer(c <= bound.unsquared + slack), eps_norm,
                                eps_bound, std::int64_t{eps_ok}});
            }
        }
        return rows;
    });
    for (auto& b : blocks)
        for (auto& r : b) table.add_row(std::move(r));
    return table;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();
    ResultTable table;
    try {
        validate_config(cfg);
        switch (cfg.kind) {
            case ExperimentKind::chaos_sweep: table = chaos_sweep(cfg); break;
            case ExperimentKind::propagation: table = propagation(cfg); break;
            case ExperimentKind::bbgky_verify: table = bbgky_verify(cfg); break;
            case ExperimentKind::hartree_convergence: table = hartree_convergence(cfg); break;
            case ExperimentKind::bound_audit: table = bound_audit(cfg); break;
        }
        table.metadata["status"] = kStatusOk;
        if (cfg.kind == ExperimentKind::bound_audit) {
            // The proven (unsquared) corollary bound and the eps bound are invariants.
            const std::size_t unsq = 8, eps_ok = 11;
            for (const auto& row : table.rows) {
                if (std::get<std::int64_t>(row[unsq]) == 0 || std::get<std::int64_t>(row[eps_ok]) == 0) {
                    table.metadata["status"] = kStatusNumericalError;
                    table.metadata["error_type"] = "BoundViolation";
                    table.metadata["error_message"] = "bound_audit: a bound failed (see rows)";
                    break;
                }
            }
        }
    } catch (const ConfigInvalid& e) {
        table = ResultTable{};
        table.metadata["status"] = kStatusConfigError;
        table.metadata["error_type"] = "ConfigInvalid";
        table.metadata["error_message"] = e.what();
    } catch (const Error& e) {
        table.rows.clear();
        table.metadata["status"] = kStatusNumericalError;
        table.metadata["error_type"] = error_name(e);
        table.metadata["error_message"] = e.what();
    }
    table.metadata["kind"] = to_string(cfg.kind);
    table.metadata["config_hash"] = config_hash(cfg);
    table.metadata["seed"] = std::to_string(cfg.seed);
    table.metadata["tool_version"] = kToolVersion;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    table.metadata["wall_time_s"] = format_double(wall);
    return table;
}

}  // namespace qkac
