#include "catgen/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "catgen/generalization.hpp"

namespace catgen {

namespace {

Stimulus<double> point(std::initializer_list<double> values) {
    Stimulus<double> x(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) x(i++) = v;
    return x;
}

const std::map<std::string, StimulusSet<double>>& preset_stimuli() {
    static const std::map<std::string, StimulusSet<double>> presets = {
        {"base", {point({50, 0}), point({60, 0})}},
        {"numerosity", {point({50, 0}), point({53, 0}), point({55, 0}), point({57, 0}), point({59, 0}), point({60, 0})}},
        {"variability", {point({30, 0}), point({60, 0})}},
        {"set1", {point({30, 0}), point({40, 0}), point({60, 0})}},
        {"set2", {point({30, 0}), point({50, 0}), point({60, 0})}},
    };
    return presets;
}

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown field '" + key + "'");
    }
}

template <typename T>
void read_if_present(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

struct MeanAndError {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// Sample mean and standard error, accumulated in the order given.
MeanAndError summarize(const std::vector<double>& xs) {
    const auto n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (!std::isfinite(mean)) return {mean, std::numeric_limits<double>::infinity()};
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

std::size_t probe_index(const ConditionResult& r, double y) {
    for (std::size_t i = 0; i < r.probes.size(); ++i)
        if (std::abs(r.probes[i] - y) < 1e-9) return i;
    throw std::logic_error("probe " + format_double(y) + " not on the condition's probe grid");
}

}  // namespace

std::vector<double> ProbeGrid::values() const {
    std::vector<double> out;
    for (const auto& y : probe_line<double>(lo, hi, step, 1)) out.push_back(y(0));
    return out;
}

void ConditionSpec::validate() const {
    if (name.empty()) throw std::invalid_argument("ConditionSpec: empty name");
    detail::check_training_set(std::span<const Stimulus<double>>(stimuli));
    if (!(probe_grid.step > 0.0) || !(probe_grid.hi >= probe_grid.lo) || !std::isfinite(probe_grid.lo) ||
        !std::isfinite(probe_grid.hi))
        throw std::invalid_argument("ConditionSpec: invalid probe grid");
    som_config.validate();
    if (n_seeds == 0) throw std::invalid_argument("ConditionSpec: n_seeds must be positive");
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"base", "numerosity", "variability", "set1", "set2"};
    return names;
}

ConditionSpec preset(const std::string& name) {
    const auto& presets = preset_stimuli();
    const auto it = presets.find(name);
    if (it == presets.end()) throw std::invalid_argument("unknown preset '" + name + "'");
    ConditionSpec spec;
    spec.name = name;
    spec.stimuli = it->second;
    return spec;
}

ConditionSpec spec_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"name", "stimuli", "probe_grid", "som_config", "n_seeds", "keep_raw"}, "spec");
    if (!j.contains("name") || !j.contains("stimuli")) throw std::invalid_argument("spec: 'name' and 'stimuli' are required");

    ConditionSpec spec;
    spec.name = j.at("name").get<std::string>();
    for (const auto& row : j.at("stimuli")) {
        const auto values = row.get<std::vector<double>>();
        Stimulus<double> x(static_cast<Eigen::Index>(values.size()));
        for (std::size_t k = 0; k < values.size(); ++k) x(static_cast<Eigen::Index>(k)) = values[k];
        spec.stimuli.push_back(std::move(x));
    }
    if (j.contains("probe_grid")) {
        const auto& g = j.at("probe_grid");
        reject_unknown_keys(g, {"lo", "hi", "step"}, "probe_grid");
        read_if_present(g, "lo", spec.probe_grid.lo);
        read_if_present(g, "hi", spec.probe_grid.hi);
        read_if_present(g, "step", spec.probe_grid.step);
    }
    if (j.contains("som_config")) {
        const auto& c = j.at("som_config");
        reject_unknown_keys(c, {"rows", "cols", "eta", "sigma", "epochs", "seed", "init_margin", "shuffle", "eta_decay",
                                "sigma_decay"},
                            "som_config");
        auto& s = spec.som_config;
        read_if_present(c, "rows", s.rows);
        read_if_present(c, "cols", s.cols);
        read_if_present(c, "eta", s.eta);
        read_if_present(c, "sigma", s.sigma);
        read_if_present(c, "epochs", s.epochs);
        read_if_present(c, "seed", s.seed);
        read_if_present(c, "init_margin", s.init_margin);
        read_if_present(c, "shuffle", s.shuffle);
        read_if_present(c, "eta_decay", s.eta_decay);
        read_if_present(c, "sigma_decay", s.sigma_decay);
    }
    read_if_present(j, "n_seeds", spec.n_seeds);
    read_if_present(j, "keep_raw", spec.keep_raw);
    spec.validate();
    return spec;
}

nlohmann::json spec_to_json(const ConditionSpec& spec) {
    nlohmann::json stimuli = nlohmann::json::array();
    for (const auto& x : spec.stimuli) stimuli.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    const auto& s = spec.som_config;
    return {
        {"name", spec.name},
        {"stimuli", stimuli},
        {"probe_grid", {{"lo", spec.probe_grid.lo}, {"hi", spec.probe_grid.hi}, {"step", spec.probe_grid.step}}},
        {"som_config",
         {{"rows", s.rows}, {"cols", s.cols}, {"eta", s.eta}, {"sigma", s.sigma}, {"epochs", s.epochs},
          {"seed", s.seed}, {"init_margin", s.init_margin}, {"shuffle", s.shuffle}, {"eta_decay", s.eta_decay},
          {"sigma_decay", s.sigma_decay}}},
        {"n_seeds", spec.n_seeds},
        {"keep_raw", spec.keep_raw},
    };
}

ConditionSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file " + path.string());
    return spec_from_json(nlohmann::json::parse(in));
}

SeedRun run_seed(const ConditionSpec& spec, std::uint64_t seed) {
    SomConfig config = spec.som_config;
    config.seed = seed;
    const auto map = train(init_map(config, spec.stimuli), spec.stimuli);
    const auto rep = category_representation(map, spec.stimuli);
    const auto probes = probe_line<double>(spec.probe_grid.lo, spec.probe_grid.hi, spec.probe_grid.step,
                                           spec.stimuli.front().size());
    auto curve = generalization_curve(rep, probes);
    return {seed, rep.tolerance, std::move(curve.values)};
}

ConditionResult run_condition(const ConditionSpec& spec, std::uint64_t seed_base, unsigned threads) {
    spec.validate();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.n_seeds));

    std::vector<SeedRun> runs(spec.n_seeds);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i = next++; i < spec.n_seeds && !failed; i = next++) {
            try {
                runs[i] = run_seed(spec, spec.som_config.seed + seed_base + i);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ConditionResult result;
    result.spec = spec;
    result.seed_base = seed_base;
    result.probes = spec.probe_grid.values();
    const std::size_t n_probes = result.probes.size();

    std::vector<double> column(spec.n_seeds);
    for (std::size_t p = 0; p < n_probes; ++p) {
        for (std::size_t s = 0; s < spec.n_seeds; ++s) column[s] = runs[s].rd[p];
        const auto stats = summarize(column);
        result.mean_rd_curve.push_back(stats.mean);
        result.rd_stderr_curve.push_back(stats.stderr_);
    }
    for (std::size_t s = 0; s < spec.n_seeds; ++s) column[s] = runs[s].max_qe;
    const auto qe = summarize(column);
    result.mean_max_qe = qe.mean;
    result.max_qe_stderr = qe.stderr_;
    if (spec.keep_raw) result.raw = std::move(runs);
    return result;
}

std::uint64_t seed_base_from_env() {
    const char* raw = std::getenv("CATGEN_SEED_BASE");
    if (raw == nullptr || *raw == '\0') return 0;
    const std::string text(raw);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::invalid_argument("CATGEN_SEED_BASE must be a non-negative integer, got '" + text + "'");
    return value;
}

// ---------------------------------------------------------------------------

double pooled_stderr(double se_a, double se_b) { return std::hypot(se_a, se_b); }

double separation(double mean_a, double se_a, double mean_b, double se_b) {
    const double gap = mean_a - mean_b;
    const double se = pooled_stderr(se_a, se_b);
    if (se == 0.0) {
        if (gap == 0.0) return 0.0;
        return gap > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    return gap / se;
}

bool EffectReport::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass.value_or(false); });
}

EffectReport run_effect_report(std::size_t n_seeds, std::uint64_t seed_base, unsigned threads,
                               const SomConfig& som_config) {
    EffectReport report;
    report.n_seeds = n_seeds;
    report.seed_base = seed_base;
    const bool judged = n_seeds >= kMinReportSeeds;
    if (!judged) {
        report.warnings.push_back("insufficient sample: n_seeds=" + std::to_string(n_seeds) + " < " +
                                  std::to_string(kMinReportSeeds) + "; verdicts withheld");
    }

    std::map<std::string, const ConditionResult*> by_name;
    for (const auto& name : preset_names()) {
        ConditionSpec spec = preset(name);
        spec.som_config = som_config;
        spec.n_seeds = n_seeds;
        report.conditions.push_back(run_condition(spec, seed_base, threads));
    }
    for (const auto& c : report.conditions) by_name[c.spec.name] = &c;
    const auto& base = *by_name.at("base");
    const auto& num = *by_name.at("numerosity");
    const auto& var = *by_name.at("variability");
    const auto& set1 = *by_name.at("set1");
    const auto& set2 = *by_name.at("set2");

    auto rd_sep = [](const ConditionResult& a, const ConditionResult& b, double y) {
        const std::size_t i = probe_index(a, y);
        const std::size_t j = probe_index(b, y);
        return separation(a.mean_rd_curve[i], a.rd_stderr_curve[i], b.mean_rd_curve[j], b.rd_stderr_curve[j]);
    };
    auto decide = [&](Verdict v, bool ok) {
        if (judged) v.pass = ok;
        report.verdicts.push_back(std::move(v));
    };

    {
        const double lower = separation(base.mean_max_qe, base.max_qe_stderr, num.mean_max_qe, num.max_qe_stderr);
        const double upper = separation(var.mean_max_qe, var.max_qe_stderr, base.mean_max_qe, base.max_qe_stderr);
        Verdict v;
        v.property = "fig1_qe_ordering";
        v.statistic = std::min(lower, upper);
        v.detail = "mean max quantization error: numerosity < base < variability";
        v.extra = {{"mean_max_qe",
                    {{"numerosity", num.mean_max_qe}, {"base", base.mean_max_qe}, {"variability", var.mean_max_qe}}},
                   {"stderr", {{"numerosity", num.max_qe_stderr}, {"base", base.max_qe_stderr},
                               {"variability", var.max_qe_stderr}}},
                   {"z_base_minus_numerosity", lower},
                   {"z_variability_minus_base", upper}};
        decide(std::move(v), lower > kSeparationFactor && upper > kSeparationFactor);
    }
    {
        Verdict v;
        v.property = "numerosity_effect";
        v.statistic = std::numeric_limits<double>::infinity();
        v.detail = "mean RD numerosity > base at probes 65,70,75,80";
        for (double y : {65.0, 70.0, 75.0, 80.0}) {
            const double z = rd_sep(num, base, y);
            v.extra["z_at_" + format_double(y)] = z;
            v.statistic = std::min(v.statistic, z);
        }
        const bool ok = v.statistic > kSeparationFactor;
        decide(std::move(v), ok);
    }
    {
        Verdict v;
        v.property = "variability_effect";
        v.statistic = std::numeric_limits<double>::infinity();
        v.detail = "mean RD variability < base at probes 65,70,80";
        for (double y : {65.0, 70.0, 80.0}) {
            const double z = rd_sep(base, var, y);
            v.extra["z_at_" + format_double(y)] = z;
            v.statistic = std::min(v.statistic, z);
        }
        const bool ok = v.statistic > kSeparationFactor;
        decide(std::move(v), ok);
    }
    {
        Verdict v;
        v.property = "set_position";
        v.statistic = 0.0;
        v.detail = "SOM mean RD differs for set1 vs set2 at some probe; Bayes curves identical";
        double arg = set1.probes.front();
        for (std::size_t i = 0; i < set1.probes.size(); ++i) {
            const double z = std::abs(rd_sep(set1, set2, set1.probes[i]));
            if (z > v.statistic) {
                v.statistic = z;
                arg = set1.probes[i];
            }
        }
        const bayes::HypothesisSpace space(0.0, 100.0, 1.0);
        const auto grid = ProbeGrid{}.values();
        const auto b1 = bayes::bayes_curve(space, first_coordinates(set1.spec.stimuli), grid);
        const auto b2 = bayes::bayes_curve(space, first_coordinates(set2.spec.stimuli), grid);
        double bayes_diff = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) bayes_diff = std::max(bayes_diff, std::abs(b1.values[i] - b2.values[i]));
        v.extra = {{"argmax_probe", arg}, {"bayes_max_abs_diff", bayes_diff}};
        const bool ok = v.statistic > kSeparationFactor && bayes_diff == 0.0;
        decide(std::move(v), ok);
    }
    return report;
}

nlohmann::json report_to_json(const EffectReport& report) {
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& v : report.verdicts) {
        nlohmann::json j = {{"property", v.property},
                            {"statistic", v.statistic},
                            {"threshold", v.threshold},
                            {"pass", v.pass ? nlohmann::json(*v.pass) : nlohmann::json(nullptr)},
                            {"detail", v.detail}};
        for (const auto& [key, value] : v.extra.items()) j[key] = value;
        verdicts.push_back(std::move(j));
    }
    return {{"n_seeds", report.n_seeds},
            {"seed_base", report.seed_base},
            {"warnings", report.warnings},
            {"verdicts", verdicts},
            {"all_pass", report.all_pass()}};
}

// ---------------------------------------------------------------------------

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return {buf, ptr};
}

double parse_double(const std::string& text) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::invalid_argument("not a number: '" + text + "'");
    return v;
}

std::string to_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
        out += '\n';
    }
    return out;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_csv(table);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(s);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    if (!std::getline(in, line)) throw std::invalid_argument("CSV: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != table.header.size()) throw std::invalid_argument("CSV: row width does not match header");
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double(c));
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

CsvTable curve_table(const ConditionResult& result) {
    CsvTable t{{"probe", "mean_rd", "stderr_rd"}, {}};
    for (std::size_t i = 0; i < result.probes.size(); ++i)
        t.rows.push_back({result.probes[i], result.mean_rd_curve[i], result.rd_stderr_curve[i]});
    return t;
}

CsvTable raw_table(const ConditionResult& result) {
    CsvTable t{{"seed", "probe", "rd"}, {}};
    for (const auto& run : result.raw)
        for (std::size_t i = 0; i < result.probes.size(); ++i)
            t.rows.push_back({static_cast<double>(run.seed), result.probes[i], run.rd[i]});
    return t;
}

CsvTable bayes_table(const bayes::BayesCurve& curve) {
    CsvTable t{{"probe", "p_in_category"}, {}};
    for (std::size_t i = 0; i < curve.probes.size(); ++i) t.rows.push_back({curve.probes[i], curve.values[i]});
    return t;
}

void emit_csv(const ConditionResult& result, const std::filesystem::path& path) { write_csv(curve_table(result), path); }

void emit_csv(const bayes::BayesCurve& curve, const std::filesystem::path& path) { write_csv(bayes_table(curve), path); }

nlohmann::json summary_json(const ConditionResult& result) {
    return {{"spec", spec_to_json(result.spec)},
            {"seed_base", result.seed_base},
            {"mean_max_qe", result.mean_max_qe},
            {"max_qe_stderr", result.max_qe_stderr}};
}

std::vector<double> first_coordinates(const StimulusSet<double>& stimuli) {
    std::vector<double> xs;
    xs.reserve(stimuli.size());
    for (const auto& x : stimuli) xs.push_back(x(0));
    return xs;
}

}  // namespace catgen
