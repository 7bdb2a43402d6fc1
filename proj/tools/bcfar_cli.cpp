// bcfar command-line front end: compute thresholds, run false-alarm
// certification sweeps and detection-probability curves, and cross-check the
// closed-form evaluators against the quadrature path.
//
// Exit codes: 0 success, 1 validation failure (a validate check failed),
// 2 configuration error, 3 I/O error.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcfar/bcfar.hpp"

namespace {

using bcfar::ClutterRangeProfile;
using bcfar::DetectorSpec;
using bcfar::DetectorVariant;
using bcfar::InterferencePrior;

/// Unwritable output, unreadable input. Exit code 3.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration. Exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small string/number utilities
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, delim)) parts.push_back(trim(item));
    if (!s.empty() && s.back() == delim) parts.emplace_back();
    return parts;
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": not a number: '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw ConfigError(what + ": not a nonnegative integer: '" + s + "'");
    }
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> values;
    if (trim(s).empty()) return values;
    for (const auto& part : split(s, ',')) values.push_back(parse_double(part, what));
    return values;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Config file + flag merging. The config file is flat key=value text ('#'
// starts a comment); command-line flags always win over file values.
// ---------------------------------------------------------------------------

const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "variant",    "n_cells",     "design_pfa", "interferer_index",
        "prior",      "lambda_grid", "scr_grid_db", "icr_db",
        "trials",     "seed",        "out",         "format"};
    return keys;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::map<std::string, std::string> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (!known_config_keys().count(key)) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        values[key] = trim(line.substr(eq + 1));
    }
    return values;
}

/// One subcommand's config-file-backed options. Every value is kept as a
/// string until the command runs, so flag and file inputs share one parsing
/// and error path.
class KeyedOptions {
  public:
    explicit KeyedOptions(CLI::App& cmd) : cmd_(&cmd) {
        config_flag_ = cmd.add_option("--config", config_path_,
                                      "flat key=value config file; flags override its values");
    }

    void add(const std::string& key, std::string default_value, const std::string& help) {
        auto [it, inserted] = values_.emplace(key, std::move(default_value));
        (void)inserted;
        flags_[key] = cmd_->add_option("--" + key, it->second, help);
    }

    /// Overlay file values under already-set flags. Call once after parsing.
    void merge_config() {
        if (config_flag_->count() == 0) return;
        for (const auto& [key, value] : read_config_file(config_path_)) {
            const auto flag = flags_.find(key);
            if (flag == flags_.end()) continue;  // valid key, unused by this subcommand
            provided_.insert(key);
            if (flag->second->count() == 0) values_[key] = value;
        }
        for (const auto& [key, flag] : flags_) {
            if (flag->count() > 0) provided_.insert(key);
        }
    }

    [[nodiscard]] const std::string& get(const std::string& key) const { return values_.at(key); }

    /// True when the user supplied the key via flag or file (vs. default).
    [[nodiscard]] bool provided(const std::string& key) const {
        const auto flag = flags_.find(key);
        if (flag != flags_.end() && flag->second->count() > 0) return true;
        return provided_.count(key) > 0;
    }

  private:
    CLI::App* cmd_;
    CLI::Option* config_flag_ = nullptr;
    std::string config_path_;
    std::map<std::string, std::string> values_;
    std::map<std::string, CLI::Option*> flags_;
    std::set<std::string> provided_;
};

// ---------------------------------------------------------------------------
// Building detector specs and scenarios from resolved option strings
// ---------------------------------------------------------------------------

DetectorVariant parse_variant(const std::string& name) {
    if (name == "ca-cfar") return DetectorVariant::CaCfar;
    if (name == "case1") return DetectorVariant::Case1;
    if (name == "case2") return DetectorVariant::Case2;
    if (name == "case3") return DetectorVariant::Case3;
    throw ConfigError("unknown variant '" + name + "' (expected ca-cfar, case1, case2, case3)");
}

/// Accepted prior syntaxes: "uniform"; "geometric:<decay>"; "absent:<p0>,uniform";
/// or a comma list of weights (N entries, or N+1 with the absence mass first).
InterferencePrior parse_prior(const std::string& text, std::size_t n_cells) {
    const std::string s = trim(text);
    if (s == "uniform") return InterferencePrior::uniform(n_cells);
    if (s.rfind("geometric:", 0) == 0) {
        return InterferencePrior::geometric(n_cells, parse_double(s.substr(10), "prior decay"));
    }
    if (s.rfind("absent:", 0) == 0) {
        const auto parts = split(s.substr(7), ',');
        if (parts.size() != 2 || parts[1] != "uniform") {
            throw ConfigError("prior: expected absent:<p0>,uniform");
        }
        return InterferencePrior::absent_uniform(parse_double(parts[0], "prior absence mass"),
                                                 n_cells);
    }
    const std::vector<double> weights = parse_double_list(s, "prior weight");
    if (weights.size() == n_cells) return InterferencePrior(false, weights);
    if (weights.size() == n_cells + 1) return InterferencePrior(true, weights);
    throw ConfigError("prior: expected " + std::to_string(n_cells) + " weights (or " +
                      std::to_string(n_cells + 1) + " with an absence mass first), got " +
                      std::to_string(weights.size()));
}

DetectorSpec build_spec(const KeyedOptions& opts, std::size_t n_cells) {
    const DetectorVariant variant = parse_variant(opts.get("variant"));
    const double alpha = parse_double(opts.get("design_pfa"), "design_pfa");
    switch (variant) {
        case DetectorVariant::CaCfar: return DetectorSpec::ca_cfar(alpha);
        case DetectorVariant::Case1: {
            if (!opts.provided("interferer_index")) {
                throw ConfigError("case1 requires interferer_index");
            }
            const std::uint64_t idx = parse_u64(opts.get("interferer_index"), "interferer_index");
            return DetectorSpec::case1(alpha, static_cast<std::size_t>(idx));
        }
        case DetectorVariant::Case2: {
            auto prior = parse_prior(opts.get("prior"), n_cells);
            if (prior.has_absence_mass()) {
                throw ConfigError("case2 prior must not carry an absence mass");
            }
            return DetectorSpec::case2(alpha, std::move(prior));
        }
        case DetectorVariant::Case3: {
            auto prior = parse_prior(opts.get("prior"), n_cells);
            if (!prior.has_absence_mass()) {
                throw ConfigError(
                    "case3 prior needs an absence mass (absent:<p0>,uniform or an N+1 list)");
            }
            return DetectorSpec::case3(alpha, std::move(prior));
        }
    }
    throw ConfigError("unknown variant");
}

std::size_t parse_n_cells(const KeyedOptions& opts) {
    const std::uint64_t n = parse_u64(opts.get("n_cells"), "n_cells");
    if (n < 2) throw ConfigError("n_cells must be at least 2");
    return static_cast<std::size_t>(n);
}

/// Simulated interferer, shared by sweeps: present iff icr_db was given, in
/// which case interferer_index says where it sits.
std::optional<bcfar::sim::InterfererSpec> build_interferer(const KeyedOptions& opts) {
    if (!opts.provided("icr_db")) return std::nullopt;
    if (!opts.provided("interferer_index")) {
        throw ConfigError("icr_db requires interferer_index to place the interferer");
    }
    bcfar::sim::InterfererSpec spec;
    spec.cell_index =
        static_cast<std::size_t>(parse_u64(opts.get("interferer_index"), "interferer_index"));
    spec.icr_db = parse_double(opts.get("icr_db"), "icr_db");
    return spec;
}

// ---------------------------------------------------------------------------
// Output writing
// ---------------------------------------------------------------------------

void write_output(const std::string& out_path, const std::function<void(std::ostream&)>& writer) {
    if (out_path.empty()) {
        writer(std::cout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + out_path);
    writer(out);
    out.flush();
    if (!out) throw IoError("write failed: " + out_path);
}

enum class RowFormat { Csv, JsonLines };

RowFormat parse_format(const std::string& s) {
    if (s == "csv") return RowFormat::Csv;
    if (s == "json-lines") return RowFormat::JsonLines;
    throw ConfigError("unknown format '" + s + "' (expected csv or json-lines)");
}

/// pfa-sweep rows: variant, N, lambda, icr_db, interferer_cell, trials,
/// declared, pfa_hat, ci_low, ci_high, seed. Numbers use 17 significant
/// digits so CSV round-trips bit-faithfully; absent interferer fields are
/// empty in CSV and null in JSON.
void write_pfa_rows(std::ostream& os, const std::vector<bcfar::sim::MonteCarloReport>& reports,
                    RowFormat format) {
    if (format == RowFormat::Csv) {
        os << "variant,N,lambda,icr_db,interferer_cell,trials,declared,pfa_hat,ci_low,ci_high,"
              "seed\n";
        for (const auto& r : reports) {
            const auto& intf = r.scenario.interferer;
            os << bcfar::variant_name(r.spec.variant) << ',' << r.scenario.n_cells << ','
               << fmt17(r.scenario.clutter_rate) << ',' << (intf ? fmt17(intf->icr_db) : "") << ','
               << (intf ? std::to_string(intf->cell_index) : "") << ',' << r.trials << ','
               << r.declared << ',' << fmt17(r.estimate) << ',' << fmt17(r.ci_low) << ','
               << fmt17(r.ci_high) << ',' << r.master_seed << '\n';
        }
        return;
    }
    for (const auto& r : reports) {
        nlohmann::ordered_json row;
        row["variant"] = bcfar::variant_name(r.spec.variant);
        row["N"] = r.scenario.n_cells;
        row["lambda"] = r.scenario.clutter_rate;
        row["icr_db"] = r.scenario.interferer
                            ? nlohmann::ordered_json(r.scenario.interferer->icr_db)
                            : nlohmann::ordered_json(nullptr);
        row["interferer_cell"] = r.scenario.interferer
                                     ? nlohmann::ordered_json(r.scenario.interferer->cell_index)
                                     : nlohmann::ordered_json(nullptr);
        row["trials"] = r.trials;
        row["declared"] = r.declared;
        row["pfa_hat"] = r.estimate;
        row["ci_low"] = r.ci_low;
        row["ci_high"] = r.ci_high;
        row["seed"] = r.master_seed;
        os << row.dump() << '\n';
    }
}

/// pd-curve rows: variant, N, scr_db, icr_db, trials, pd_hat, ci_low,
/// ci_high, seed.
void write_pd_rows(std::ostream& os, const std::vector<bcfar::sim::MonteCarloReport>& reports,
                   RowFormat format) {
    if (format == RowFormat::Csv) {
        os << "variant,N,scr_db,icr_db,trials,pd_hat,ci_low,ci_high,seed\n";
        for (const auto& r : reports) {
            const auto& intf = r.scenario.interferer;
            os << bcfar::variant_name(r.spec.variant) << ',' << r.scenario.n_cells << ','
               << fmt17(r.scenario.scr_db) << ',' << (intf ? fmt17(intf->icr_db) : "") << ','
               << r.trials << ',' << fmt17(r.estimate) << ',' << fmt17(r.ci_low) << ','
               << fmt17(r.ci_high) << ',' << r.master_seed << '\n';
        }
        return;
    }
    for (const auto& r : reports) {
        nlohmann::ordered_json row;
        row["variant"] = bcfar::variant_name(r.spec.variant);
        row["N"] = r.scenario.n_cells;
        row["scr_db"] = r.scenario.scr_db;
        row["icr_db"] = r.scenario.interferer
                            ? nlohmann::ordered_json(r.scenario.interferer->icr_db)
                            : nlohmann::ordered_json(nullptr);
        row["trials"] = r.trials;
        row["pd_hat"] = r.estimate;
        row["ci_low"] = r.ci_low;
        row["ci_high"] = r.ci_high;
        row["seed"] = r.master_seed;
        os << row.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

ClutterRangeProfile load_crp(const std::string& crp_list, const std::string& crp_file) {
    if (!crp_list.empty() && !crp_file.empty()) {
        throw ConfigError("give either --crp or --crp_file, not both");
    }
    std::vector<double> cells;
    if (!crp_list.empty()) {
        cells = parse_double_list(crp_list, "crp cell");
    } else if (!crp_file.empty()) {
        std::ifstream in(crp_file);
        if (!in) throw IoError("cannot read CRP file: " + crp_file);
        double v = 0.0;
        while (in >> v) cells.push_back(v);
        if (!in.eof()) throw ConfigError("CRP file has non-numeric content: " + crp_file);
    } else {
        throw ConfigError("threshold needs --crp or --crp_file");
    }
    return ClutterRangeProfile(std::move(cells));
}

int run_threshold(const KeyedOptions& opts, const std::string& crp_list,
                  const std::string& crp_file) {
    const ClutterRangeProfile crp = load_crp(crp_list, crp_file);
    const DetectorSpec spec = build_spec(opts, crp.size());
    const double tau = bcfar::detector_threshold(spec, crp);
    const double pfa = bcfar::detector_pfa(tau, spec, crp);
    std::cout << "tau=" << fmt17(tau) << '\n' << "pfa=" << fmt17(pfa) << '\n';
    return 0;
}

int run_pfa_sweep(const KeyedOptions& opts, unsigned threads) {
    const std::size_t n_cells = parse_n_cells(opts);
    const DetectorSpec spec = build_spec(opts, n_cells);
    const auto interferer = build_interferer(opts);
    const std::vector<double> lambda_grid =
        parse_double_list(opts.get("lambda_grid"), "lambda_grid");

    std::vector<bcfar::sim::Scenario> grid;
    grid.reserve(lambda_grid.size());
    for (double lambda : lambda_grid) {
        bcfar::sim::Scenario sc;
        sc.n_cells = n_cells;
        sc.clutter_rate = lambda;
        sc.target_present = false;
        sc.interferer = interferer;
        sc.validate();
        grid.push_back(sc);
    }

    bcfar::sim::SweepOptions sweep_options;
    sweep_options.n_threads = threads;
    const auto reports =
        bcfar::sim::run_pfa_sweep(spec, grid, parse_u64(opts.get("trials"), "trials"),
                                  parse_u64(opts.get("seed"), "seed"), sweep_options);

    const RowFormat format = parse_format(opts.get("format"));
    write_output(opts.get("out"), [&](std::ostream& os) { write_pfa_rows(os, reports, format); });
    return 0;
}

int run_pd_curve(const KeyedOptions& opts, unsigned threads) {
    const std::size_t n_cells = parse_n_cells(opts);
    const DetectorSpec spec = build_spec(opts, n_cells);
    const std::vector<double> scr_grid = parse_double_list(opts.get("scr_grid_db"), "scr_grid_db");
    if (scr_grid.empty()) throw ConfigError("pd-curve needs a nonempty scr_grid_db");
    const std::vector<double> lambda_grid =
        parse_double_list(opts.get("lambda_grid"), "lambda_grid");

    bcfar::sim::Scenario base;
    base.n_cells = n_cells;
    base.clutter_rate = lambda_grid.empty() ? 1.0 : lambda_grid.front();
    base.target_present = true;
    base.interferer = build_interferer(opts);
    base.validate();

    bcfar::sim::SweepOptions sweep_options;
    sweep_options.n_threads = threads;
    const auto reports =
        bcfar::sim::run_pd_curve(spec, base, scr_grid, parse_u64(opts.get("trials"), "trials"),
                                 parse_u64(opts.get("seed"), "seed"), sweep_options);

    const RowFormat format = parse_format(opts.get("format"));
    write_output(opts.get("out"), [&](std::ostream& os) { write_pd_rows(os, reports, format); });
    return 0;
}

// ---------------------------------------------------------------------------
// validate: randomized cross-checks of the closed forms against quadrature
// and the reduction identities. Exit 0 iff every check passes.
// ---------------------------------------------------------------------------

struct CheckStats {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    double worst = 0.0;
    double limit = 0.0;

    void record(double rel_err) {
        ++cases;
        if (rel_err > worst) worst = rel_err;
        if (!(rel_err < limit)) ++failures;  // NaN counts as failure
    }
};

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

int run_validate(std::size_t instances, double rel_tol, std::uint64_t seed, bool inject_error) {
    bcfar::RngStream rng = bcfar::derive_stream(seed, 0);
    bcfar::oracle::QuadratureSettings settings;
    settings.rel_tol = rel_tol;

    CheckStats quad{"quadrature vs closed form", 0, 0, 0.0, 1e-6};
    CheckStats red1{"case2 point-mass -> case1", 0, 0, 0.0, 1e-12};
    CheckStats red2{"case3 pi0=0 -> case2", 0, 0, 0.0, 1e-12};
    CheckStats red3{"case3 pi0=1 -> ca-cfar", 0, 0, 0.0, 1e-12};

    static constexpr std::size_t kSizes[] = {4, 8, 16, 32};
    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t n = kSizes[i % 4];
        std::vector<double> cells(n);
        for (double& z : cells) z = bcfar::sample_exponential(1.0, rng);
        const ClutterRangeProfile crp(std::move(cells));

        // Random positive prior over the cells.
        std::vector<double> weights(n);
        double sum = 0.0;
        for (double& w : weights) {
            w = bcfar::sample_exponential(1.0, rng);
            sum += w;
        }
        for (double& w : weights) w /= sum;

        // Rotate through the variants; tau comes from inverting a random
        // design Pfa (log-uniform over [1e-6, 0.9]) so every check runs at an
        // operationally meaningful point of the curve.
        const double u = rng.next_uniform();
        const double alpha = std::exp(std::log(1e-6) + u * (std::log(0.9) - std::log(1e-6)));
        DetectorSpec spec;
        switch (i % 4) {
            case 0: spec = DetectorSpec::ca_cfar(alpha); break;
            case 1: spec = DetectorSpec::case1(alpha, 1 + (i % n)); break;
            case 2: spec = DetectorSpec::case2(alpha, InterferencePrior(false, weights)); break;
            default:
                spec = DetectorSpec::case3(
                    alpha, InterferencePrior::with_absence_mass(
                               0.5, std::vector<double>(n, 0.5 / static_cast<double>(n))));
        }
        const double tau = bcfar::detector_threshold(spec, crp);
        const double closed = bcfar::detector_pfa(tau, spec, crp);
        settings.scale = crp.total();
        double quad_value =
            bcfar::oracle::quadrature_pfa(bcfar::oracle::predictive_density(spec, crp), tau,
                                          settings);
        if (inject_error && i == 0) quad_value *= 1.0 + 1e-4;  // negative-control hook
        quad.record(rel_diff(quad_value, closed));

        // Reduction identities at the same tau.
        const std::size_t j = 1 + (i % n);
        red1.record(rel_diff(
            bcfar::case2_pfa(tau, crp, InterferencePrior::point_mass(j, n)),
            bcfar::case1_pfa(tau, crp, j)));
        red2.record(rel_diff(
            bcfar::case3_pfa(tau, crp, InterferencePrior::with_absence_mass(0.0, weights)),
            bcfar::case2_pfa(tau, crp, InterferencePrior(false, weights))));
        std::vector<double> only_absent(n + 1, 0.0);
        only_absent[0] = 1.0;
        red3.record(rel_diff(bcfar::case3_pfa(tau, crp, InterferencePrior(true, only_absent)),
                             bcfar::ca_cfar_pfa(tau, crp)));
    }

    bool all_pass = true;
    std::printf("%-28s %8s %14s %10s %8s\n", "check", "cases", "worst_rel_err", "limit",
                "result");
    for (const CheckStats* c : {&quad, &red1, &red2, &red3}) {
        const bool pass = c->failures == 0;
        all_pass = all_pass && pass;
        std::printf("%-28s %8zu %14.3e %10.0e %8s\n", c->name.c_str(), c->cases, c->worst,
                    c->limit, pass ? "pass" : "FAIL");
    }
    std::printf("overall: %s\n", all_pass ? "pass" : "FAIL");
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Sliding-window detection in exponential clutter with Bayesian interference "
        "compensation"};
    app.require_subcommand(1);

    // --- threshold ---
    CLI::App* threshold = app.add_subcommand(
        "threshold", "Compute the threshold multiplier for a given window and print tau and "
                     "its round-trip false-alarm probability");
    KeyedOptions threshold_opts(*threshold);
    threshold_opts.add("variant", "ca-cfar", "ca-cfar, case1, case2, or case3");
    threshold_opts.add("design_pfa", "0.01", "design false-alarm probability in (0,1)");
    threshold_opts.add("interferer_index", "", "assumed interferer cell (1-based; case1)");
    threshold_opts.add("prior", "uniform",
                       "interferer location prior: uniform, geometric:<decay>, "
                       "absent:<p0>,uniform, or a comma list of weights");
    std::string crp_list;
    std::string crp_file;
    threshold->add_option("--crp", crp_list, "reference cells as a comma list, e.g. 1,2,5");
    threshold->add_option("--crp_file", crp_file, "file of whitespace-separated reference cells");

    // --- pfa-sweep ---
    CLI::App* pfa_sweep = app.add_subcommand(
        "pfa-sweep", "Estimate the false-alarm rate over a clutter-rate grid (CFAR "
                     "certification)");
    KeyedOptions pfa_opts(*pfa_sweep);
    pfa_opts.add("variant", "ca-cfar", "ca-cfar, case1, case2, or case3");
    pfa_opts.add("n_cells", "16", "reference window size N");
    pfa_opts.add("design_pfa", "0.01", "design false-alarm probability in (0,1)");
    pfa_opts.add("interferer_index", "",
                 "interferer cell (1-based); assumed cell for case1, placement for icr_db");
    pfa_opts.add("prior", "uniform", "interferer location prior (case2/case3)");
    pfa_opts.add("lambda_grid", "0.1,1,10", "comma list of clutter rates to sweep");
    pfa_opts.add("icr_db", "", "inject an interferer at this ICR (dB) into each trial");
    pfa_opts.add("trials", "1000000", "Monte-Carlo trials per grid point");
    pfa_opts.add("seed", "1", "master seed");
    pfa_opts.add("out", "", "output path (default: stdout)");
    pfa_opts.add("format", "csv", "csv or json-lines");
    unsigned pfa_threads = 1;
    pfa_sweep->add_option("--threads", pfa_threads, "worker threads (results are identical)");

    // --- pd-curve ---
    CLI::App* pd_curve = app.add_subcommand(
        "pd-curve", "Estimate detection probability across an SCR grid");
    KeyedOptions pd_opts(*pd_curve);
    pd_opts.add("variant", "ca-cfar", "ca-cfar, case1, case2, or case3");
    pd_opts.add("n_cells", "16", "reference window size N");
    pd_opts.add("design_pfa", "0.01", "design false-alarm probability in (0,1)");
    pd_opts.add("interferer_index", "",
                "interferer cell (1-based); assumed cell for case1, placement for icr_db");
    pd_opts.add("prior", "uniform", "interferer location prior (case2/case3)");
    pd_opts.add("lambda_grid", "1", "clutter rate (first entry is used)");
    pd_opts.add("scr_grid_db", "", "comma list of target SCRs in dB");
    pd_opts.add("icr_db", "", "inject an interferer at this ICR (dB) into each trial");
    pd_opts.add("trials", "100000", "Monte-Carlo trials per SCR point");
    pd_opts.add("seed", "1", "master seed");
    pd_opts.add("out", "", "output path (default: stdout)");
    pd_opts.add("format", "csv", "csv or json-lines");
    unsigned pd_threads = 1;
    pd_curve->add_option("--threads", pd_threads, "worker threads (results are identical)");

    // --- validate ---
    CLI::App* validate = app.add_subcommand(
        "validate", "Cross-check closed-form evaluators against quadrature and reduction "
                    "identities on randomized instances");
    std::size_t instances = 100;
    double rel_tol = 1e-10;
    std::uint64_t validate_seed = 20260825;
    bool inject_error = false;
    validate->add_option("--instances", instances, "randomized instances to run");
    validate->add_option("--rel_tol", rel_tol, "quadrature relative tolerance");
    validate->add_option("--seed", validate_seed, "instance-generation seed");
    validate->add_flag("--inject-error", inject_error,
                       "deliberately perturb one check (negative control; forces exit 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (threshold->parsed()) {
            threshold_opts.merge_config();
            return run_threshold(threshold_opts, crp_list, crp_file);
        }
        if (pfa_sweep->parsed()) {
            pfa_opts.merge_config();
            return run_pfa_sweep(pfa_opts, pfa_threads);
        }
        if (pd_curve->parsed()) {
            pd_opts.merge_config();
            return run_pd_curve(pd_opts, pd_threads);
        }
        if (validate->parsed()) {
            return run_validate(instances, rel_tol, validate_seed, inject_error);
        }
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
