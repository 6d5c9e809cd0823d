// Command-line front end: exact tables, envelope-oscillation series, seeded
// simulation, and the verification suite. All numeric output is CSV or JSON
// on stdout; diagnostics go to stderr. Exit codes: 0 success, 1 domain or
// usage error, 2 verification failure.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trielab/acceptance.hpp"
#include "trielab/asymptotics.hpp"
#include "trielab/exact_engine.hpp"
#include "trielab/montecarlo.hpp"
#include "trielab/output.hpp"

using namespace trielab;

namespace {

TableFormat parse_format(const std::string& f) {
    return f == "json" ? TableFormat::json : TableFormat::csv;
}

void add_seed_param(OutputRecord& rec, const SeedSpec& seed) {
    rec.param("seed", static_cast<long long>(seed.seed));
    rec.param("generator", seed.generator_name);
}

int cmd_exact(std::size_t n, const std::string& what, double t, const std::string& format) {
    OutputRecord rec("exact");
    rec.param("n", n);
    rec.param("what", what);
    if (what == "depth" || what == "distance") {
        DistributionEngine eng(n);
        const Pmf p = what == "depth" ? eng.depth_pmf(n) : eng.distance_pmf(n);
        rec.param("tail_bound", p.tail_bound);
        rec.columns({"k", "probability", "engine"});
        for (std::size_t i = 0; i < p.masses.size(); ++i) {
            if (p.masses[i] == 0.0 && i + 1 == p.masses.size()) break;
            rec.row({static_cast<long long>(p.support_offset + static_cast<long>(i)),
                     p.masses[i], "exact"});
        }
    } else if (what == "moments") {
        const MomentTable mt = moment_table(std::max<std::size_t>(n, 2));
        rec.columns({"n", "mean", "variance", "depth_mean", "depth_variance", "engine"});
        rec.row({n, mt.dist_mean[n], mt.dist_variance(n), mt.depth_mean[n],
                 mt.depth_variance(n), "exact"});
    } else if (what == "mgf") {
        rec.param("t", t);
        rec.columns({"n", "t", "mgf", "engine"});
        rec.row({n, t, exact_mgf(n, t), "exact"});
    } else {
        throw std::domain_error("exact: unknown --what '" + what + "'");
    }
    rec.write(std::cout, parse_format(format));
    return 0;
}

int cmd_oscillate(double t, std::size_t n_min, std::size_t n_max, const std::string& engine,
                  const std::string& format) {
    if (n_min < 2 || n_max < n_min) throw std::domain_error("oscillate: need 2 <= n-min <= n-max");
    const bool want_exact = engine == "exact" || engine == "both";
    const bool want_asym = engine == "asymptotic" || engine == "both";
    if (!want_exact && !want_asym)
        throw std::domain_error("oscillate: unknown --engine '" + engine + "'");
    OutputRecord rec("oscillate");
    rec.param("t", t);
    rec.param("n_min", n_min);
    rec.param("n_max", n_max);
    rec.param("engine", engine);
    std::vector<std::string> cols = {"n", "frac_2lg_n"};
    if (want_exact) cols.push_back("mgf_centered_exact");
    if (want_asym) cols.push_back("mgf_centered_asymptotic");
    cols.push_back("envelope_g");
    cols.push_back("envelope_sup");
    rec.columns(cols);
    std::vector<double> series;
    if (want_exact) series = mgf_series(n_max, t);
    const double g = envelope_g(t);
    const double sup = std::exp(t) * g;
    for (std::size_t n = n_min; n <= n_max; ++n) {
        std::vector<Cell> row = {n, frac_2lg(n)};
        if (want_exact) row.emplace_back(series[n] * std::exp(-t * floor_2lg(n)));
        if (want_asym) row.emplace_back(mgf_centered(n, t));
        row.emplace_back(g);
        row.emplace_back(sup);
        rec.row(std::move(row));
    }
    rec.write(std::cout, parse_format(format));
    return 0;
}

int cmd_simulate(std::size_t n, std::size_t trials, std::uint64_t seed_value,
                 const std::string& what, double eps, const std::string& format) {
    const SeedSpec seed{seed_value};
    OutputRecord rec("simulate");
    rec.param("n", n);
    rec.param("trials", trials);
    add_seed_param(rec, seed);
    rec.param("what", what);
    if (what == "distance") {
        const SimReport rep = simulate_distance(n, trials, seed);
        rec.param("mean", rep.mean);
        rec.param("variance", rep.variance);
        rec.param("std_error", rep.std_error);
        rec.columns({"distance", "probability", "engine"});
        for (std::size_t i = 0; i < rep.empirical_pmf.masses.size(); ++i)
            rec.row({static_cast<long long>(rep.empirical_pmf.support_offset +
                                            static_cast<long>(i)),
                     rep.empirical_pmf.masses[i], "simulated"});
    } else if (what == "wiener") {
        const SimReport rep = simulate_wiener(n, trials, seed);
        rec.columns({"n", "trials", "mean", "variance", "std_error", "engine"});
        rec.row({n, trials, rep.mean, rep.variance, rep.std_error, "simulated"});
    } else if (what == "concentration") {
        const ConcentrationReport rep = concentration_check(n, trials, seed, eps);
        rec.param("epsilon", eps);
        rec.columns({"n", "trials", "epsilon", "fraction", "mean_over_lg", "engine"});
        rec.row({n, trials, eps, rep.fraction, rep.mean, "simulated"});
    } else {
        throw std::domain_error("simulate: unknown --what '" + what + "'");
    }
    rec.write(std::cout, parse_format(format));
    return 0;
}

int cmd_verify(const std::string& suite) {
    const auto mode =
        suite == "full" ? acceptance::Suite::full : acceptance::Suite::fast;
    if (suite != "full" && suite != "fast")
        throw std::domain_error("verify: unknown --suite '" + suite + "'");
    const auto results = acceptance::run(mode, std::cout);
    return acceptance::exit_code(results);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-trie distance laboratory"};
    app.require_subcommand(1);

    std::size_t n = 2, trials = 1, n_min = 2, n_max = 2;
    double t = 0.0, eps = 0.5;
    std::uint64_t seed_value = 0;
    std::string what = "moments", format = "csv", engine = "exact", suite = "fast";

    auto* exact = app.add_subcommand("exact", "exact recurrence engine tables");
    exact->add_option("--n", n, "number of keys")->required();
    exact->add_option("--what", what, "depth | distance | moments | mgf");
    exact->add_option("--t", t, "mgf argument in [-0.1, 0.1]");
    exact->add_option("--format", format, "csv | json");

    auto* osc = app.add_subcommand("oscillate", "centered-MGF staircase between the envelopes");
    osc->add_option("--t", t, "mgf argument in [-0.1, 0.1]")->required();
    osc->add_option("--n-min", n_min, "smallest n")->required();
    osc->add_option("--n-max", n_max, "largest n")->required();
    osc->add_option("--engine", engine, "exact | asymptotic | both");
    osc->add_option("--format", format, "csv | json");

    auto* sim = app.add_subcommand("simulate", "seeded trie simulation");
    sim->add_option("--n", n, "number of keys")->required();
    sim->add_option("--trials", trials, "number of trials")->required();
    sim->add_option("--seed", seed_value, "64-bit seed (mandatory: runs must be replayable)")
        ->required();
    sim->add_option("--what", what, "distance | wiener | concentration")->required();
    sim->add_option("--eps", eps, "concentration band half-width");
    sim->add_option("--format", format, "csv | json");

    auto* ver = app.add_subcommand("verify", "acceptance criteria");
    ver->add_option("--suite", suite, "fast | full");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (exact->parsed()) return cmd_exact(n, what, t, format);
        if (osc->parsed()) return cmd_oscillate(t, n_min, n_max, engine, format);
        if (sim->parsed()) return cmd_simulate(n, trials, seed_value, what, eps, format);
        if (ver->parsed()) return cmd_verify(suite);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
