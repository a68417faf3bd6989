// Acceptance run: one PASS/FAIL line per criterion; tolerances live in src/acceptance.cpp.
// Exit status is 0 only when every criterion passes, unless --allow-fail is given.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "nct/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9};
    bool verbose = false, allow_fail = false;
    std::string json_path;
    app.add_option("--criteria", ids, "subset, e.g. 1,3")->delimiter(',')->check(CLI::Range(1, 9));
    app.add_flag("-v,--verbose", verbose, "print every check");
    app.add_flag("--allow-fail", allow_fail, "exit 0 even when a criterion fails");
    app.add_option("--json", json_path, "write the results as JSON");
    CLI11_PARSE(app, argc, argv);

    bool all = true;
    nlohmann::json out = nlohmann::json::array();
    for (int id : ids) {
        const auto r = nct::run_criterion(id);
        std::cout << nct::summary_line(r) << std::endl;
        if (verbose || !r.pass()) std::cout << nct::detail_lines(r) << std::flush;
        out.push_back(nct::to_json(r));
        all = all && r.pass();
    }
    if (!json_path.empty()) std::ofstream(json_path) << out.dump(2) << "\n";
    return all || allow_fail ? 0 : 1;
}
