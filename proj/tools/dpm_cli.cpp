// Command-line front end. Talks to the simulator only through the C API.
#include "dpm/dpm.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CliError {
    int code;
    std::string message;
};

int exit_code_for(dpm_status s) {
    switch (s) {
        case DPM_OK: return kExitOk;
        case DPM_ERR_IO: return kExitIo;
        default: return kExitConfig;
    }
}

void check(dpm_status s, const std::string& context) {
    if (s != DPM_OK) throw CliError{exit_code_for(s), context + ": " + dpm_last_error()};
}

struct ScenarioDeleter {
    void operator()(dpm_scenario* s) const { dpm_scenario_free(s); }
};
struct ExperimentDeleter {
    void operator()(dpm_experiment* e) const { dpm_experiment_free(e); }
};
struct StringDeleter {
    void operator()(char* s) const { dpm_string_free(s); }
};
using ScenarioPtr = std::unique_ptr<dpm_scenario, ScenarioDeleter>;
using ExperimentPtr = std::unique_ptr<dpm_experiment, ExperimentDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

ScenarioPtr load_scenario(const std::string& preset, const std::string& path) {
    dpm_scenario* raw = nullptr;
    if (!preset.empty()) {
        check(dpm_scenario_from_preset(preset.c_str(), &raw), "preset " + preset);
    } else if (path == "-") {
        const std::string text{std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
        check(dpm_scenario_from_json(text.c_str(), &raw), "scenario from stdin");
    } else {
        check(dpm_scenario_from_file(path.c_str(), &raw), "scenario " + path);
    }
    return ScenarioPtr(raw);
}

ExperimentPtr run_experiment(const dpm_scenario* scenario, bool record_trace) {
    dpm_experiment* raw = nullptr;
    check(dpm_experiment_run(scenario, record_trace ? 1 : 0, &raw), std::string("run ") + dpm_scenario_name(scenario));
    return ExperimentPtr(raw);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw CliError{kExitIo, "cannot write " + path.string()};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw CliError{kExitIo, "cannot create output directory " + dir.string()};
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// -- run ------------------------------------------------------------------

struct RunArgs {
    std::string preset;
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    bool no_trace = false;
};

// Newline-separated warnings from the library, one prefixed line each.
void print_warnings(const char* text) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) std::cerr << "warning: " << line << '\n';
    }
}

int cmd_run(const RunArgs& a) {
    if (a.preset.empty() == a.scenario.empty())
        throw CliError{kExitConfig, "run needs exactly one of --preset NAME, --scenario PATH or '-'"};
    auto scenario = load_scenario(a.preset, a.scenario);
    if (a.seed) dpm_scenario_set_seed(scenario.get(), *a.seed);

    StringPtr warnings;
    {
        char* raw = nullptr;
        check(dpm_scenario_warnings(scenario.get(), &raw), "validate");
        warnings.reset(raw);
    }
    print_warnings(warnings.get());

    const fs::path out_dir(a.out);
    ensure_dir(out_dir);
    auto experiment = run_experiment(scenario.get(), !a.no_trace);

    const std::string name = dpm_scenario_name(scenario.get());
    std::string dpm_trace;
    std::string base_trace;
    if (!a.no_trace) {
        dpm_trace = (out_dir / (name + ".dpm.csv")).string();
        base_trace = (out_dir / (name + ".base.csv")).string();
        check(dpm_experiment_write_trace(experiment.get(), DPM_TRACE_DPM, dpm_trace.c_str()), "trace");
        check(dpm_experiment_write_trace(experiment.get(), DPM_TRACE_BASELINE, base_trace.c_str()), "trace");
    }
    char* raw = nullptr;
    check(dpm_experiment_report_json(experiment.get(), a.no_trace ? nullptr : dpm_trace.c_str(),
                                     a.no_trace ? nullptr : base_trace.c_str(), &raw),
          "report");
    StringPtr report(raw);
    const fs::path report_path = out_dir / (name + ".report.json");
    write_file(report_path, report.get());

    dpm_metrics m{};
    dpm_totals dpm_t{};
    dpm_totals base_t{};
    check(dpm_experiment_totals(experiment.get(), DPM_TRACE_DPM, &dpm_t), "totals");
    check(dpm_experiment_totals(experiment.get(), DPM_TRACE_BASELINE, &base_t), "totals");
    std::printf("scenario %s  seed %llu\n", name.c_str(),
                static_cast<unsigned long long>(dpm_scenario_seed(scenario.get())));
    std::printf("  %-10s %14s %12s %12s %10s %10s\n", "run", "energy [J]", "mean T [C]", "max T [C]", "completed",
                "pending");
    std::printf("  %-10s %14.6f %12.3f %12.3f %10zu %10zu\n", "baseline", base_t.total_energy_j, base_t.mean_temp_c,
                base_t.max_temp_c, base_t.tasks_completed, base_t.tasks_pending);
    std::printf("  %-10s %14.6f %12.3f %12.3f %10zu %10zu\n", "dpm", dpm_t.total_energy_j, dpm_t.mean_temp_c,
                dpm_t.max_temp_c, dpm_t.tasks_completed, dpm_t.tasks_pending);
    if (dpm_experiment_metrics(experiment.get(), &m) == DPM_OK) {
        std::printf("  energy saving %.2f %%  temperature reduction %.2f %%  delay overhead %.2f %%\n",
                    m.energy_saving_pct, m.temp_reduction_pct, m.avg_delay_overhead_pct);
    } else {
        std::printf("  metrics undefined: %s\n", dpm_last_error());
    }
    std::printf("  report %s\n", report_path.string().c_str());
    return kExitOk;
}

// -- table ----------------------------------------------------------------

struct Reference {
    const char* preset;
    double saving, temp, delay;
};

// Reference figures shown next to each row; not expected to be reproduced.
constexpr Reference kPublished[] = {
    {"A1", 39, 31, 30}, {"A2", 55, 21, 339}, {"A3", 39, 18, 37},
    {"A4", 55, 18, 339}, {"B", 65, 19, 242}, {"C", 64, 18, 253},
};

const Reference* published(const std::string& preset) {
    for (const auto& r : kPublished) {
        if (preset == r.preset) return &r;
    }
    return nullptr;
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd r;
    for (double x : v) r.mean += x;
    r.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return r;
}

struct TableArgs {
    std::string seeds;
    std::string presets = "A1,A2,A3,A4,B,C";
    std::string out;
    unsigned threads = 1;
};

int cmd_table(const TableArgs& a) {
    std::vector<std::uint64_t> seeds;
    for (const auto& s : split_csv(a.seeds)) {
        try {
            std::size_t used = 0;
            seeds.push_back(std::stoull(s, &used));
            if (used != s.size()) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw CliError{kExitConfig, "bad seed '" + s + "'"};
        }
    }
    if (seeds.empty()) throw CliError{kExitConfig, "table needs at least one seed (--seeds a,b,c)"};
    const auto presets = split_csv(a.presets);
    if (presets.empty()) throw CliError{kExitConfig, "table needs at least one preset"};

    struct Job {
        std::string preset;
        std::uint64_t seed;
        dpm_metrics metrics{};
        std::optional<CliError> error;
    };
    std::vector<Job> jobs;
    for (const auto& p : presets) {
        for (auto s : seeds) jobs.push_back({p, s, {}, std::nullopt});
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            auto& job = jobs[i];
            try {
                auto scenario = load_scenario(job.preset, "");
                dpm_scenario_set_seed(scenario.get(), job.seed);
                auto experiment = run_experiment(scenario.get(), false);
                check(dpm_experiment_metrics(experiment.get(), &job.metrics), "metrics");
            } catch (const CliError& e) {
                job.error = e;
            }
        }
    };
    const unsigned n_threads = std::max(1U, std::min<unsigned>(a.threads, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& job : jobs) {
        if (job.error) {
            throw CliError{job.error->code,
                           "preset " + job.preset + " seed " + std::to_string(job.seed) + " failed: " + job.error->message};
        }
    }

    nlohmann::json doc;
    doc["seeds"] = seeds;
    doc["rows"] = nlohmann::json::array();
    std::printf("%-6s %22s %22s %22s   %s\n", "preset", "energy saving %", "temp reduction %", "delay overhead %",
                "published (non-reproducible target)");
    for (const auto& p : presets) {
        std::vector<double> saving, temp, delay;
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& job : jobs) {
            if (job.preset != p) continue;
            saving.push_back(job.metrics.energy_saving_pct);
            temp.push_back(job.metrics.temp_reduction_pct);
            delay.push_back(job.metrics.avg_delay_overhead_pct);
            runs.push_back({{"seed", job.seed},
                            {"energy_saving_pct", job.metrics.energy_saving_pct},
                            {"temp_reduction_pct", job.metrics.temp_reduction_pct},
                            {"avg_delay_overhead_pct", job.metrics.avg_delay_overhead_pct}});
        }
        const auto s = mean_sd(saving);
        const auto t = mean_sd(temp);
        const auto d = mean_sd(delay);
        const auto* ref = published(p);
        char ref_text[64] = "-";
        if (ref) std::snprintf(ref_text, sizeof ref_text, "%g / %g / %g", ref->saving, ref->temp, ref->delay);
        std::printf("%-6s %12.2f +- %6.2f %12.2f +- %6.2f %12.2f +- %6.2f   %s\n", p.c_str(), s.mean, s.sd, t.mean,
                    t.sd, d.mean, d.sd, ref_text);
        nlohmann::json row = {{"preset", p},
                              {"energy_saving_pct", {{"mean", s.mean}, {"stddev", s.sd}}},
                              {"temp_reduction_pct", {{"mean", t.mean}, {"stddev", t.sd}}},
                              {"avg_delay_overhead_pct", {{"mean", d.mean}, {"stddev", d.sd}}},
                              {"runs", runs}};
        if (ref) {
            row["non_reproducible_target"] = {
                {"energy_saving_pct", ref->saving}, {"temp_reduction_pct", ref->temp}, {"avg_delay_overhead_pct", ref->delay}};
        }
        doc["rows"].push_back(row);
    }
    if (!a.out.empty()) {
        ensure_dir(a.out);
        write_file(fs::path(a.out) / "table.json", doc.dump(2) + "\n");
    }
    return kExitOk;
}

// -- preset ---------------------------------------------------------------

int cmd_preset_dump(const std::string& name, bool expanded) {
    if (expanded) {
        auto scenario = load_scenario(name, "");
        char* raw = nullptr;
        check(dpm_scenario_to_json(scenario.get(), &raw), "dump");
        StringPtr text(raw);
        std::fputs(text.get(), stdout);
        return kExitOk;
    }
    const char* doc = nullptr;
    check(dpm_preset_document(name.c_str(), &doc), "preset " + name);
    std::fputs(doc, stdout);
    return kExitOk;
}

int cmd_preset_list() {
    for (std::size_t i = 0; i < dpm_preset_count(); ++i) std::printf("%s\n", dpm_preset_name(i));
    return kExitOk;
}

int cmd_validate(const std::string& path) {
    auto scenario = load_scenario("", path);
    char* raw = nullptr;
    check(dpm_scenario_warnings(scenario.get(), &raw), "validate");
    StringPtr warnings(raw);
    print_warnings(warnings.get());
    std::printf("%s: ok\n", dpm_scenario_name(scenario.get()));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SoC dynamic power management simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    std::string source;
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "run baseline and managed simulation, write traces and report");
    auto* preset_opt = run->add_option("--preset", run_args.preset, "built-in preset (A1..A4, B, C)");
    auto* scenario_opt = run->add_option("--scenario", run_args.scenario, "scenario JSON file, '-' for stdin");
    run->add_option("source", source, "scenario file or '-' for stdin");
    auto* seed_opt = run->add_option("--seed", seed, "master seed (overrides the scenario)");
    run->add_option("-o,--out", run_args.out, "output directory");
    run->add_flag("--no-trace", run_args.no_trace, "skip the CSV traces");
    preset_opt->excludes(scenario_opt);

    TableArgs table_args;
    auto* table = app.add_subcommand("table", "sweep presets over seeds and print mean +- stddev metrics");
    table->add_option("--seeds", table_args.seeds, "comma-separated seeds")->required();
    table->add_option("--presets", table_args.presets, "comma-separated presets");
    table->add_option("-o,--out", table_args.out, "directory for table.json");
    table->add_option("--threads", table_args.threads, "worker threads")->check(CLI::PositiveNumber);

    auto* preset = app.add_subcommand("preset", "inspect built-in presets");
    preset->require_subcommand(1);
    std::string dump_name;
    bool expanded = false;
    auto* dump = preset->add_subcommand("dump", "print the embedded scenario document");
    dump->add_option("name", dump_name, "preset name")->required();
    dump->add_flag("--expanded", expanded, "print every section explicitly");
    auto* list = preset->add_subcommand("list", "list preset names");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a scenario document");
    validate->add_option("path", validate_path, "scenario file or '-'")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed()) {
            if (!source.empty()) {
                if (!run_args.scenario.empty() || !run_args.preset.empty())
                    throw CliError{kExitConfig, "give the scenario once"};
                run_args.scenario = source;
            }
            if (seed_opt->count() > 0) run_args.seed = seed;
            return cmd_run(run_args);
        }
        if (table->parsed()) return cmd_table(table_args);
        if (dump->parsed()) return cmd_preset_dump(dump_name, expanded);
        if (list->parsed()) return cmd_preset_list();
        if (validate->parsed()) return cmd_validate(validate_path);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    }
    return kExitOk;
}
