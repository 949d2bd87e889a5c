#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "formality/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "formality: cohomological obstruction checks for conformal formality and uniform\n"
        "quasiregular ellipticity, with an optional numerical embedding search"};

    formality::RunConfig cfg;
    std::string preset, input, checks_list, search_mode, format = "human";
    int restarts = 100, iterations = 5000, threads = 0;

    auto* preset_opt = app.add_option("--preset", preset,
                                      "ring expression, e.g. connsum(prod(S2,S2),prod(S2,S2))");
    auto* input_opt = app.add_option("--input", input, "ring description JSON file");
    preset_opt->excludes(input_opt);
    app.add_option("--checks", checks_list,
                   "comma-separated check ids to run (default: all applicable)");
    app.add_option("--search", search_mode,
                   "run the embedding search: wedge-only | wedge+star | wedge+star+clifford");
    app.add_option("--restarts", restarts, "search restarts")->capture_default_str();
    app.add_option("--iterations", iterations, "search descent sweeps per restart")
        ->capture_default_str();
    app.add_option("--threads", threads, "search worker threads (0 = hardware)");
    app.add_option("--format", format, "human | json")->check(CLI::IsMember({"human", "json"}));
    app.add_option("--seed", cfg.seed, "random seed (recorded in JSON output)");

    CLI11_PARSE(app, argc, argv);

    if (!preset.empty()) cfg.preset = preset;
    if (!input.empty()) cfg.input_path = input;
    if (!checks_list.empty()) {
        size_t start = 0;
        while (start <= checks_list.size()) {
            const size_t comma = checks_list.find(',', start);
            const std::string id = checks_list.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!id.empty()) cfg.checks.push_back(id);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    if (!search_mode.empty()) {
        formality::SearchConfig sc;
        try {
            sc.mode = formality::embed_mode_from_string(search_mode);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        sc.restarts = restarts;
        sc.iterations = iterations;
        sc.threads = threads;
        cfg.search = sc;
    }
    cfg.format = (format == "json") ? formality::RunConfig::Format::json
                                    : formality::RunConfig::Format::human;

    return formality::run(cfg, std::cout, std::cerr);
}
