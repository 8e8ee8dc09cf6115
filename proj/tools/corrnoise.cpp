// corrnoise.cpp — command-line front end: run, detect, sweep-n, rates, presets

#include "corrnoise/errors.hpp"
#include "corrnoise/output.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

using namespace corrnoise;

namespace {

// Exit codes: 0 success, 1 usage or validation problem, 2 numerical failure.
constexpr int kUsage = 1;
constexpr int kNumerical = 2;

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw ValidationError("--n: '" + item + "' is not an integer");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError("--n: empty list");
    return out;
}

void print_summary(const RunResult& r, const std::string& dir) {
    const auto& st = r.trajectory.stats;
    std::cerr << "wrote " << dir << "  (" << r.trajectory.times.size() << " samples, step " << st.step
              << ", trace error " << st.max_trace_error << ", rate table " << r.timings.rate_table << " s, evolution "
              << r.timings.evolution << " s)\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Correlated-noise simulator for qubit registers"};
    app.require_subcommand(1);

    std::string target, out_dir, n_list;
    std::uint64_t seed = 0;
    int threads = 0;
    double t_query = 0.0;

    auto common = [&](CLI::App* sub, bool with_seed) {
        sub->add_option("--out", out_dir, "Output directory (default: the config's output.directory)");
        sub->add_option("--threads", threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
        if (with_seed) sub->add_option("--seed", seed, "Override the protocol sampling seed");
    };

    auto* run = app.add_subcommand("run", "Simulate a config file or bundled preset and write artifacts");
    run->add_option("config", target, "Config path or preset name")->required();
    common(run, true);

    auto* detect = app.add_subcommand("detect", "Detection report from a config (simulated) or a run directory");
    detect->add_option("source", target, "Config, preset or output directory")->required();
    common(detect, true);

    auto* sweep = app.add_subcommand("sweep-n", "Fit the dephasing-rate exponent over register sizes");
    sweep->add_option("config", target, "Config path or preset name")->required();
    sweep->add_option("--n", n_list, "Comma-separated register sizes, e.g. 2,3,4,5");
    common(sweep, true);

    auto* rates = app.add_subcommand("rates", "Print the dissipator coefficient table at one time");
    rates->add_option("config", target, "Config path or preset name")->required();
    rates->add_option("--t", t_query, "Time at which to evaluate the coefficients")->required();
    common(rates, false);

    auto* presets = app.add_subcommand("presets", "List bundled presets, or print one");
    std::string preset_name;
    presets->add_option("name", preset_name, "Preset to print");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    RunOptions opt;
    opt.threads = threads;
    auto seed_given = [&](CLI::App* sub) { return sub->count("--seed") > 0; };

    try {
        if (*run) {
            if (seed_given(run)) opt.seed = seed;
            const ExperimentConfig cfg = load_config(target);
            const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
            const RunResult r = run_experiment(cfg, opt);
            write_run(r, dir);
            print_summary(r, dir);
        } else if (*detect) {
            DetectionReport report;
            if (std::filesystem::is_directory(target)) {
                report = detect_directory(target);
            } else {
                if (seed_given(detect)) opt.seed = seed;
                ExperimentConfig cfg = load_config(target);
                cfg.analysis.detection = true;
                const RunResult r = run_experiment(cfg, opt);
                report = r.report;
                if (!out_dir.empty()) write_run(r, out_dir);
            }
            std::cout << report_json(report);
        } else if (*sweep) {
            if (seed_given(sweep)) opt.seed = seed;
            const ExperimentConfig cfg = load_config(target);
            const std::vector<int> ns = n_list.empty() ? cfg.sweep.n_values : parse_n_list(n_list);
            const SweepResult s = sweep_n(cfg, ns, opt);
            std::cout << sweep_csv(s);
            std::cout << "exponent " << s.fit.exponent << " +- " << s.fit.std_error << " (residual " << s.fit.residual
                      << ")\n";
            if (!out_dir.empty()) write_sweep(cfg, s, out_dir);
        } else if (*rates) {
            const ExperimentConfig cfg = load_config(target);
            const std::string csv = coefficients_csv(coefficients_for(cfg, t_query, opt));
            std::cout << csv;
        } else if (*presets) {
            if (preset_name.empty()) {
                for (const auto& n : preset_names()) std::cout << n << '\n';
            } else if (auto text = preset_text(preset_name)) {
                std::cout << *text << '\n';
            } else {
                throw ValidationError("no preset named '" + preset_name + "'");
            }
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return 0;
}
