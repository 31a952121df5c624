// catgen: run category-generalization simulations from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catgen/bayes.hpp"
#include "catgen/experiments.hpp"

namespace fs = std::filesystem;
using namespace catgen;

namespace {

struct SomOverrides {
    std::optional<double> init_margin;
    std::optional<std::size_t> epochs;
    bool shuffle = false;

    void add_to(CLI::App* app) {
        app->add_option("--init-margin", init_margin, "Width of the weight initialization band above the data");
        app->add_option("--epochs", epochs, "Passes over the training set");
        app->add_flag("--shuffle", shuffle, "Seeded reshuffle of the presentation order each epoch");
    }
    void apply(SomConfig& c) const {
        if (init_margin) c.init_margin = *init_margin;
        if (epochs) c.epochs = *epochs;
        if (shuffle) c.shuffle = true;
    }
};

ConditionSpec resolve_condition(const std::string& what) {
    for (const auto& name : preset_names())
        if (name == what) return preset(name);
    if (fs::exists(what)) return load_spec(what);
    throw std::invalid_argument("'" + what + "' is neither a preset nor a spec file");
}

// "50,0;60,0" -> {[50,0],[60,0]}
StimulusSet<double> parse_stimuli(const std::string& text) {
    StimulusSet<double> out;
    std::istringstream points(text);
    std::string item;
    while (std::getline(points, item, ';')) {
        if (item.empty()) continue;
        std::vector<double> values;
        std::istringstream coords(item);
        std::string v;
        while (std::getline(coords, v, ',')) values.push_back(parse_double(v));
        Stimulus<double> x(static_cast<Eigen::Index>(values.size()));
        for (std::size_t k = 0; k < values.size(); ++k) x(static_cast<Eigen::Index>(k)) = values[k];
        out.push_back(std::move(x));
    }
    if (out.empty()) throw std::invalid_argument("--stimuli: no points given");
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_condition(const ConditionResult& result, const std::optional<fs::path>& out_dir) {
    if (!out_dir) {
        std::cout << to_csv(curve_table(result));
        return;
    }
    fs::create_directories(*out_dir);
    const fs::path csv = *out_dir / (result.spec.name + ".csv");
    emit_csv(result, csv);
    write_text(*out_dir / (result.spec.name + "_summary.json"), summary_json(result).dump(2) + "\n");
    if (result.spec.keep_raw) write_csv(raw_table(result), *out_dir / (result.spec.name + "_raw.csv"));
    std::cerr << result.spec.name << ": " << result.spec.n_seeds << " seeds, mean max QE "
              << format_double(result.mean_max_qe) << " (se " << format_double(result.max_qe_stderr) << ") -> "
              << csv.string() << "\n";
}

std::string verdict_text(const Verdict& v) {
    if (!v.pass) return "n/a ";
    return *v.pass ? "PASS" : "FAIL";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-organizing-map category generalization experiments"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

    // run
    auto* run = app.add_subcommand("run", "Run a preset or JSON spec over a seed ensemble");
    std::string run_target;
    std::optional<std::size_t> run_seeds;
    std::optional<fs::path> run_out;
    bool run_raw = false;
    SomOverrides run_som;
    run->add_option("condition", run_target, "Preset (base, numerosity, variability, set1, set2) or spec file")
        ->required();
    run->add_option("--seeds", run_seeds, "Number of seeds");
    run->add_option("--out", run_out, "Output directory (default: CSV to stdout)");
    run->add_flag("--raw", run_raw, "Also write per-seed curves");
    run_som.add_to(run);

    // report
    auto* report = app.add_subcommand("report", "Run all presets and judge the four effects");
    std::size_t report_seeds = 100;
    std::optional<fs::path> report_out;
    SomOverrides report_som;
    report->add_option("--seeds", report_seeds, "Number of seeds per condition")->capture_default_str();
    report->add_option("--out", report_out, "Directory for report.json and per-condition CSVs");
    report_som.add_to(report);

    // bayes
    auto* bayes_cmd = app.add_subcommand("bayes", "Bayesian generalization curve for a preset");
    std::string bayes_target;
    std::vector<double> grid{0.0, 100.0, 1.0};
    std::optional<fs::path> bayes_out;
    bayes_cmd->add_option("condition", bayes_target, "Preset or spec file")->required();
    bayes_cmd->add_option("--grid", grid, "Hypothesis grid LO HI STEP (also the probe grid)")->expected(3);
    bayes_cmd->add_option("--out", bayes_out, "Output directory (default: CSV to stdout)");

    // curve
    auto* curve = app.add_subcommand("curve", "Run an ad hoc stimulus set");
    std::string curve_stimuli;
    std::string curve_name = "custom";
    std::size_t curve_seeds = 100;
    std::vector<double> curve_probes{0.0, 100.0, 1.0};
    std::optional<fs::path> curve_out;
    bool curve_raw = false;
    SomOverrides curve_som;
    curve->add_option("--stimuli", curve_stimuli, "Points as \"x0,x1;y0,y1;...\"")->required();
    curve->add_option("--name", curve_name, "Condition name used for output files")->capture_default_str();
    curve->add_option("--seeds", curve_seeds, "Number of seeds")->capture_default_str();
    curve->add_option("--probes", curve_probes, "Probe grid LO HI STEP on dimension 0")->expected(3);
    curve->add_option("--out", curve_out, "Output directory (default: CSV to stdout)");
    curve->add_flag("--raw", curve_raw, "Also write per-seed curves");
    curve_som.add_to(curve);

    CLI11_PARSE(app, argc, argv);

    try {
        const std::uint64_t seed_base = seed_base_from_env();

        if (*run) {
            ConditionSpec spec = resolve_condition(run_target);
            if (run_seeds) spec.n_seeds = *run_seeds;
            if (run_raw) spec.keep_raw = true;
            run_som.apply(spec.som_config);
            write_condition(run_condition(spec, seed_base, threads), run_out);
            return 0;
        }

        if (*curve) {
            ConditionSpec spec;
            spec.name = curve_name;
            spec.stimuli = parse_stimuli(curve_stimuli);
            spec.n_seeds = curve_seeds;
            spec.probe_grid = {curve_probes[0], curve_probes[1], curve_probes[2]};
            spec.keep_raw = curve_raw;
            curve_som.apply(spec.som_config);
            write_condition(run_condition(spec, seed_base, threads), curve_out);
            return 0;
        }

        if (*bayes_cmd) {
            const ConditionSpec spec = resolve_condition(bayes_target);
            const bayes::HypothesisSpace space(grid[0], grid[1], grid[2]);
            std::vector<double> probes;
            for (std::size_t i = 0; i < space.grid_points(); ++i) probes.push_back(space.grid_value(i));
            const auto result = bayes::bayes_curve(space, first_coordinates(spec.stimuli), probes);
            if (bayes_out) {
                fs::create_directories(*bayes_out);
                const fs::path csv = *bayes_out / (spec.name + "_bayes.csv");
                emit_csv(result, csv);
                std::cerr << spec.name << ": " << space.size() << " hypotheses -> " << csv.string() << "\n";
            } else {
                std::cout << to_csv(bayes_table(result));
            }
            return 0;
        }

        if (*report) {
            SomConfig config;
            report_som.apply(config);
            const EffectReport r = run_effect_report(report_seeds, seed_base, threads, config);
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
            for (const auto& v : r.verdicts) {
                std::cout << std::left << std::setw(20) << v.property << " " << verdict_text(v)
                          << "  statistic=" << format_double(v.statistic) << "  threshold=" << format_double(v.threshold)
                          << "  (" << v.detail << ")\n";
            }
            const auto doc = report_to_json(r);
            if (report_out) {
                fs::create_directories(*report_out);
                write_text(*report_out / "report.json", doc.dump(2) + "\n");
                for (const auto& c : r.conditions) emit_csv(c, *report_out / (c.spec.name + ".csv"));
            }
            if (!r.warnings.empty()) return 0;
            return r.all_pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "catgen: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
