// Command-line runner: symbolic derivation, function tables, verification suites,
// heat-trace experiments, log-determinants, curvature densities and gradient flow.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nct/acceptance.hpp"
#include "nct/curvature_functions.hpp"
#include "nct/errors.hpp"
#include "nct/heisenberg_rep.hpp"
#include "nct/rs_functional.hpp"
#include "nct/spectral_lab.hpp"
#include "nct/symbol_engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nct;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// JSON with every float printed to 17 significant digits.
void dump(std::ostream& os, const json& j, int indent = 0) {
    const std::string pad(std::size_t(indent + 2), ' '), end(std::size_t(indent), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                break;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                os << (first ? "" : ",\n") << pad << json(it.key()).dump() << ": ";
                dump(os, it.value(), indent + 2);
                first = false;
            }
            os << "\n" << end << "}";
            break;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                break;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                os << (i ? ",\n" : "") << pad;
                dump(os, j[i], indent + 2);
            }
            os << "\n" << end << "]";
            break;
        }
        case json::value_t::number_float:
            os << num(j.get<double>());
            break;
        default:
            os << j.dump();
    }
}

std::string dumps(const json& j) {
    std::ostringstream os;
    dump(os, j);
    os << "\n";
    return os.str();
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

ModuleGeometry default_geometry() { return {0, -1, 1, 0, Theta("0.70710678118654757"), cplx(0, 1)}; }

ModuleGeometry load_geometry(const std::string& path) {
    if (path.empty()) return default_geometry();
    try {
        return geometry_from_json(read_json(path));
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

FourierElement load_element(const std::string& path, const ModuleGeometry& geo) {
    FourierElement a;
    try {
        a = element_from_json(read_json(path));
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
    if (!(a.theta() == geo.theta)) throw UsageError(path + ": theta " + a.theta().str() + " does not match the geometry");
    return a;
}

Sign parse_sign(const std::string& s) {
    if (s == "+" || s == "plus") return Sign::plus;
    if (s == "-" || s == "minus") return Sign::minus;
    throw UsageError("sign must be + or -");
}

struct Output {
    std::string dir;

    fs::path path(const std::string& name) const {
        fs::create_directories(dir);
        return fs::path(dir) / name;
    }
    void write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
    }
};

std::string csv_row(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + num(xs[i]);
    return s + "\n";
}

// derive b4

int cmd_derive(const Output& out, const std::string& what, const std::string& e1, const std::string& e2, bool latex,
               bool as_json) {
    if (what != "b4") throw UsageError("derive: only b4 is available");
    if (e1.empty() != e2.empty()) throw UsageError("derive: give both --eps1 and --eps2 or neither");
    const bool symbolic = e1.empty();
    const auto v = symbolic ? sym::verify_theorem_resexp()
                            : sym::verify_theorem_resexp({}, sym::parse_q(e1), sym::parse_q(e2));
    const std::string verdict = v.equal ? "equal" : "different";
    json summands = json::array();
    for (const auto& [name, e] : sym::b4_closed_summands()) {
        const auto s = symbolic ? e : sym::substitute_eps(e, sym::parse_q(e1), sym::parse_q(e2));
        summands.push_back({{"name", name}, {"expr", latex ? s.latex() : s.str()}});
    }
    const json j{{"eps1", symbolic ? "eps1" : e1},
                 {"eps2", symbolic ? "eps2" : e2},
                 {"verification", verdict},
                 {"diff", v.diff.str()},
                 {"b4", latex ? v.recursion.latex() : v.recursion.str()},
                 {"closed_summands", summands}};
    out.write("derive_b4.json", dumps(j));
    if (as_json) {
        std::cout << dumps(j);
    } else {
        std::cout << "b4 = " << (latex ? v.recursion.latex() : v.recursion.str()) << "\n";
        std::cout << "verification: " << verdict << "\n";
        std::cout << "diff: " << v.diff.str() << "\n";
    }
    return v.equal ? 0 : 1;
}

// functions

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> p;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            p.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw UsageError("grid must be smin,smax,n");
        }
    }
    if (p.size() != 3 || p[2] < 1 || p[2] != std::floor(p[2]) || p[1] < p[0]) throw UsageError("grid must be smin,smax,n");
    const int n = int(p[2]);
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(n == 1 ? p[0] : p[0] + (p[1] - p[0]) * i / (n - 1));
    return xs;
}

int cmd_functions_table(const Output& out, const std::string& name, const std::string& grid, const std::string& e1,
                        const std::string& e2) {
    ModularFunctionPtr f;
    try {
        f = lookup(name, Rational::parse(e1), Rational::parse(e2));
    } catch (const RejectedInput& e) {
        throw UsageError(e.what());
    }
    const auto xs = parse_grid(grid);
    std::string csv = f->arity() == 1 ? "s,value\n" : "s,t,value\n";
    for (double s : xs) {
        if (f->arity() == 1) {
            csv += csv_row({s, f->eval_s(s)});
        } else {
            for (double t : xs) csv += csv_row({s, t, f->eval_st(s, t)});
        }
    }
    out.write("function_" + name + ".csv", csv);
    std::cout << csv;
    return 0;
}

int cmd_functions_list() {
    for (const auto& n : registered_names()) std::cout << n << (is_eps_family(n) ? " (eps1, eps2)" : "") << "\n";
    return 0;
}

// verify

json suite_json(const IdentityReport& rep) {
    json a = json::array();
    for (const auto& r : rep.results)
        a.push_back({{"name", r.name}, {"max_err", r.max_err}, {"tol", r.tol}, {"pass", r.pass}, {"informational", r.informational}});
    return a;
}

int cmd_verify(const Output& out, int n) {
    const auto grid = log_grid(0.2, 5.0, n);
    const auto q = quadrature_suite(grid), i = identity_suite(grid), l = limit_suite();
    const bool pass = q.all_pass() && i.all_pass() && l.all_pass();
    const json j{{"grid", {{"lo", 0.2}, {"hi", 5.0}, {"n", n}}},
                 {"quadrature", suite_json(q)},
                 {"identities", suite_json(i)},
                 {"limits", suite_json(l)},
                 {"pass", pass}};
    out.write("verify.json", dumps(j));
    for (const auto* rep : {&q, &i, &l})
        for (const auto& r : rep->results)
            std::cout << (r.pass ? "ok   " : (r.informational ? "info " : "FAIL ")) << r.name << "  " << num(r.max_err) << "\n";
    return pass ? 0 : 1;
}

// acceptance-backed suites

int cmd_criteria(const Output& out, const std::vector<int>& ids, const std::string& file) {
    json crit = json::array();
    bool pass = true;
    json sigma = nullptr;
    for (int id : ids) {
        const auto r = run_criterion(id);
        std::cout << summary_line(r) << "\n" << detail_lines(r);
        crit.push_back(to_json(r));
        pass = pass && r.pass();
        if (id == 7) sigma = r.notes["sigma"];
    }
    json j{{"criteria", crit}, {"pass", pass}};
    if (!sigma.is_null()) j["sigma"] = sigma;
    out.write(file, dumps(j));
    return pass ? 0 : 1;
}

// heat

int cmd_heat(const Output& out, const std::string& gpath, const std::string& kpath, const std::string& hpath,
             const std::string& apath, const std::string& sign, int M, double tmin, double tmax, int points, int terms) {
    const auto geo = load_geometry(gpath);
    if (kpath.empty() == hpath.empty()) throw UsageError("heat: give exactly one of --k and --h");
    const FourierElement h = hpath.empty() ? nct::log(load_element(kpath, geo)) * cplx(2.0) : load_element(hpath, geo);
    const FourierElement a = apath.empty() ? FourierElement::scalar(geo.theta, 1.0) : load_element(apath, geo);
    if (!(tmin > 0 && tmax > tmin)) throw UsageError("heat: need 0 < tmin < tmax");
    const auto x = heat_experiment(geo, h, a, parse_sign(sign), M, tmin, tmax, points, terms);
    std::string csv = "t,trace\n";
    for (std::size_t i = 0; i < x.fit.t.size(); ++i) csv += csv_row({x.fit.t[i], x.fit.values[i]});
    out.write("heat_trace.csv", csv);
    const json j{{"M", M},
                 {"tmin", tmin},
                 {"tmax", tmax},
                 {"sign", sign},
                 {"coeffs", x.fit.coeffs},
                 {"residual", x.fit.residual},
                 {"condition", x.fit.condition},
                 {"a0_expected", x.a0_expected},
                 {"a2_expected", x.a2_expected},
                 {"a0_rel_error", std::abs(x.fit.coeffs[0] - x.a0_expected) / std::abs(x.a0_expected)},
                 {"a2_rel_error", std::abs(x.fit.coeffs[1] - x.a2_expected) / std::abs(x.a2_expected)}};
    out.write("heat_fit.json", dumps(j));
    std::cout << dumps(j);
    return 0;
}

// logdet

int cmd_logdet(const Output& out, const std::string& gpath, const std::string& hpath, int M) {
    const auto geo = load_geometry(gpath);
    const FourierElement h = hpath.empty() ? FourierElement::scalar(geo.theta, 0.0) : load_element(hpath, geo);
    const auto A = build_twisted_laplacian(geo, nct::exp(h * cplx(0.5)), Sign::plus, M);
    const auto r = logdet_numeric(A);
    const double closed = rs_logdet_closed(h, geo);
    const json j{{"M", M},
                 {"logdet_numeric", r.value},
                 {"error_estimate", r.error},
                 {"zeta0_fit", r.zeta0},
                 {"logdet_closed", closed},
                 {"logdet_flat", logdet_flat(geo)},
                 {"difference", r.value - closed}};
    out.write("logdet.json", dumps(j));
    std::cout << dumps(j);
    return 0;
}

// curvature

int cmd_curvature(const Output& out, const std::string& gpath, const std::string& hpath, const std::string& sign) {
    const auto geo = load_geometry(gpath);
    const auto K = curvature_density(load_element(hpath, geo), geo, parse_sign(sign));
    const std::string text = dumps(to_json(K));
    out.write("curvature.json", text);
    std::cout << text;
    return 0;
}

// minimize

int cmd_minimize(const Output& out, const std::string& gpath, const std::string& hpath, int steps) {
    const auto geo = load_geometry(gpath);
    const auto h0 = load_element(hpath, geo);
    FlowOptions opt;
    opt.max_steps = steps;
    const int orientation = measured_orientation(geo.tau, geo.theta);
    const auto r = extremize(h0, geo, orientation, opt);
    json traj = json::array();
    for (const auto& s : r.trajectory)
        traj.push_back({{"step", s.step}, {"F", s.F}, {"grad_norm", s.grad_norm}, {"dist", s.dist}, {"rate", s.rate}});
    const json j{{"orientation", orientation}, {"converged", r.converged}, {"trajectory", traj}, {"h", to_json(r.h)}};
    out.write("minimize.json", dumps(j));
    std::cout << dumps(j);
    return r.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curvature, heat traces and log-determinants on noncommutative tori"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    const char* env = std::getenv("NCT_OUT");
    std::string outdir = env ? env : "nct_out";
    app.add_option("--out", outdir, "output directory (default $NCT_OUT or ./nct_out)");

    int rc = 0;
    std::function<int()> action;

    auto* derive = app.add_subcommand("derive", "symbolic resolvent expansion");
    std::string what, e1, e2;
    bool latex = false, as_json = false;
    derive->add_option("what", what, "b4")->required();
    derive->add_option("--eps1", e1, "rational eps1");
    derive->add_option("--eps2", e2, "rational eps2");
    auto* lflag = derive->add_flag("--latex", latex);
    derive->add_flag("--json", as_json)->excludes(lflag);
    derive->callback([&] { action = [&] { return cmd_derive(Output{outdir}, what, e1, e2, latex, as_json); }; });

    auto* functions = app.add_subcommand("functions", "curvature function tables");
    functions->require_subcommand(1);
    auto* table = functions->add_subcommand("table", "CSV table over a grid in s (and t)");
    std::string fname, grid = "-2,2,41", fe1 = "0", fe2 = "0";
    table->add_option("--name", fname)->required();
    table->add_option("--grid", grid, "smin,smax,n");
    table->add_option("--eps1", fe1);
    table->add_option("--eps2", fe2);
    table->callback([&] { action = [&] { return cmd_functions_table(Output{outdir}, fname, grid, fe1, fe2); }; });
    functions->add_subcommand("list", "registered names")->callback([&] { action = cmd_functions_list; });

    auto* verify = app.add_subcommand("verify", "identity, quadrature and limit suites");
    int vn = 20;
    verify->add_option("--n", vn, "grid points per axis")->check(CLI::Range(2, 200));
    verify->callback([&] { action = [&] { return cmd_verify(Output{outdir}, vn); }; });

    auto* heis = app.add_subcommand("heisenberg", "Heisenberg module suite");
    heis->callback([&] { action = [&] { return cmd_criteria(Output{outdir}, {4}, "heisenberg.json"); }; });

    auto* heat = app.add_subcommand("heat", "heat trace of the twisted Laplacian and expansion fit");
    std::string gpath, kpath, hpath, apath, sign = "+";
    int M = 600, points = 20, terms = 4;
    double tmin = 0.02, tmax = 0.2;
    heat->add_option("--geometry", gpath);
    heat->add_option("--k", kpath, "k = e^{h/2}");
    heat->add_option("--h", hpath);
    heat->add_option("--a", apath);
    heat->add_option("--sign", sign);
    heat->add_option("--M", M)->check(CLI::Range(8, 4000));
    heat->add_option("--tmin", tmin);
    heat->add_option("--tmax", tmax);
    heat->add_option("--points", points)->check(CLI::Range(4, 1000));
    heat->add_option("--terms", terms)->check(CLI::Range(1, 10));
    heat->callback([&] {
        action = [&] { return cmd_heat(Output{outdir}, gpath, kpath, hpath, apath, sign, M, tmin, tmax, points, terms); };
    });

    auto* logdet = app.add_subcommand("logdet", "numerical log-determinant against the closed form");
    int lM = 600;
    logdet->add_option("--geometry", gpath);
    logdet->add_option("--h", hpath);
    logdet->add_option("--M", lM)->check(CLI::Range(8, 4000));
    logdet->callback([&] { action = [&] { return cmd_logdet(Output{outdir}, gpath, hpath, lM); }; });

    auto* curv = app.add_subcommand("curvature", "curvature density of Delta^+ or Delta^-");
    curv->add_option("--geometry", gpath);
    curv->add_option("--h", hpath)->required();
    curv->add_option("--sign", sign);
    curv->callback([&] { action = [&] { return cmd_curvature(Output{outdir}, gpath, hpath, sign); }; });

    auto* mini = app.add_subcommand("minimize", "gradient flow of F toward its extremum");
    int steps = 200;
    mini->add_option("--geometry", gpath);
    mini->add_option("--h0", hpath)->required();
    mini->add_option("--steps", steps)->check(CLI::Range(1, 100000));
    mini->callback([&] { action = [&] { return cmd_minimize(Output{outdir}, gpath, hpath, steps); }; });

    auto* report = app.add_subcommand("report", "all acceptance checks as one JSON summary");
    std::vector<int> ids{1, 2, 3, 4, 5, 6, 7, 8, 9};
    report->add_option("--criteria", ids, "subset, e.g. 1,3")->delimiter(',')->check(CLI::Range(1, 9));
    report->callback([&] { action = [&] { return cmd_criteria(Output{outdir}, ids, "report.json"); }; });

    try {
        app.parse(argc, argv);
        rc = action();
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const nct::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
