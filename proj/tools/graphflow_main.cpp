// graphflow: distances, geodesics and dual certificates for unbalanced
// transport on finite reversible Markov chains.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "graphflow/report_io.hpp"
#include "graphflow/suite.hpp"

namespace fs = std::filesystem;
using namespace graphflow;

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("GRAPHFLOW_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

// A measure argument is either a path to a JSON array or an inline
// comma-separated list.
Measure measure_arg(const std::string& arg, const MarkovChain& chain) {
    if (fs::exists(arg)) return load_measure_file(arg, chain);
    return parse_measure(arg, chain);
}

std::vector<double> parse_schedule(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw SchemaError("empty delta schedule");
    return out;
}

struct DistanceArgs {
    std::string chain_path, mu0_arg, mu1_arg, metric = "W", out;
    int steps = 64;
    std::string schedule;
    std::uint64_t seed = default_seed();
};

int run_distance(const DistanceArgs& args) {
    const auto chain = load_chain_file(args.chain_path);
    const Measure mu0 = measure_arg(args.mu0_arg, chain);
    const Measure mu1 = measure_arg(args.mu1_arg, chain);
    SolveOptions opts;
    opts.seed = args.seed;
    if (!args.schedule.empty()) opts.delta_schedule = parse_schedule(args.schedule);

    SolveReport report;
    if (args.metric == "W")
        report = distance_W(mu0, mu1, chain, args.steps, opts);
    else if (args.metric == "ME")
        report = distance_ME(mu0, mu1, chain, args.steps, opts);
    else if (args.metric == "D")
        report = distance_D(mu0, mu1, chain, args.steps, opts);
    else
        throw SchemaError("unknown metric " + args.metric);

    const std::string json = solve_report_to_json(report, chain, args.metric);
    if (args.out.empty()) {
        std::fputs(json.c_str(), stdout);
    } else {
        write_file(args.out + ".json", json);
        write_file(args.out + "_trajectory.csv", trajectory_to_csv(report.trajectory, chain));
        std::printf("wrote %s.json and %s_trajectory.csv\n", args.out.c_str(), args.out.c_str());
    }
    return report.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unbalanced transport distances on finite reversible Markov chains"};
    app.require_subcommand(1);

    // validate ------------------------------------------------------------
    std::string v_chain;
    auto* validate = app.add_subcommand("validate", "parse and validate a chain document");
    validate->add_option("--chain", v_chain, "chain JSON file")->required();

    // distance ------------------------------------------------------------
    DistanceArgs dargs;
    auto* distance = app.add_subcommand("distance", "compute a transport distance");
    distance->add_option("--chain", dargs.chain_path)->required();
    distance->add_option("--mu0", dargs.mu0_arg, "measure file or inline v1,v2,...")->required();
    distance->add_option("--mu1", dargs.mu1_arg)->required();
    distance->add_option("--metric", dargs.metric, "W | ME | D")
        ->check(CLI::IsMember({"W", "ME", "D"}));
    distance->add_option("--steps", dargs.steps, "time intervals (default 64)");
    distance->add_option("--delta-schedule", dargs.schedule, "comma-separated smoothing levels");
    distance->add_option("--seed", dargs.seed);
    distance->add_option("--out", dargs.out, "output prefix for JSON report + trajectory CSV");

    // geodesic ------------------------------------------------------------
    std::string g_chain, g_mu0, g_mu1, g_out;
    double g_bvp_tol = 1e-8;
    auto* geodesic = app.add_subcommand("geodesic", "two-point geodesic by shooting");
    geodesic->add_option("--chain", g_chain)->required();
    geodesic->add_option("--mu0", g_mu0)->required();
    geodesic->add_option("--mu1", g_mu1)->required();
    geodesic->add_option("--bvp-tol", g_bvp_tol);
    geodesic->add_option("--out", g_out);

    // rays ----------------------------------------------------------------
    std::string r_chain, r_start, r_out = "rays_out";
    int r_count = 72;
    IntegrateOptions r_opts;
    std::uint64_t r_seed = default_seed();
    auto* rays = app.add_subcommand("rays", "integrate a fan of geodesic rays");
    rays->add_option("--chain", r_chain)->required();
    rays->add_option("--start", r_start, "strictly positive start measure")->required();
    rays->add_option("--n-rays", r_count);
    rays->add_option("--t-max", r_opts.t_max);
    rays->add_option("--eps-bd", r_opts.eps_bd);
    rays->add_option("--dt-min", r_opts.dt_min);
    rays->add_option("--rtol", r_opts.rtol);
    rays->add_option("--seed", r_seed);
    rays->add_option("--out", r_out, "output directory");

    // dual ----------------------------------------------------------------
    std::string du_chain, du_mu0, du_mu1, du_out;
    int du_steps = 64;
    std::uint64_t du_seed = default_seed();
    auto* dual = app.add_subcommand("dual", "duality-gap report with a certificate");
    dual->add_option("--chain", du_chain)->required();
    dual->add_option("--mu0", du_mu0)->required();
    dual->add_option("--mu1", du_mu1)->required();
    dual->add_option("--steps", du_steps);
    dual->add_option("--seed", du_seed);
    dual->add_option("--out", du_out, "output prefix for gap JSON + certificate CSV");

    // compare ---------------------------------------------------------------
    std::string c_chain, c_mu0, c_mu1;
    int c_steps = 64;
    auto* compare = app.add_subcommand("compare", "run W, ME (if mass allows) and D");
    compare->add_option("--chain", c_chain)->required();
    compare->add_option("--mu0", c_mu0)->required();
    compare->add_option("--mu1", c_mu1)->required();
    compare->add_option("--steps", c_steps);

    // suite -----------------------------------------------------------------
    std::string s_out;
    std::uint64_t s_seed = default_seed();
    auto* suite = app.add_subcommand("suite", "run the acceptance battery");
    suite->add_option("--seed", s_seed);
    suite->add_option("--out", s_out, "write machine-readable summary JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (validate->parsed()) {
            const auto chain = load_chain_file(v_chain);
            std::printf("ok: %d states, reversible, pi = [", chain.n);
            for (int x = 0; x < chain.n; ++x)
                std::printf("%s%.12g", x ? ", " : "", chain.pi(x));
            std::printf("], a=%g b=%g\n", chain.a, chain.b);
            return 0;
        }
        if (distance->parsed()) return run_distance(dargs);
        if (geodesic->parsed()) {
            const auto chain = load_chain_file(g_chain);
            ShootOptions opts;
            opts.bvp_tol = g_bvp_tol;
            const auto rep =
                shoot(measure_arg(g_mu0, chain), measure_arg(g_mu1, chain), chain, opts);
            const std::string json = solve_report_to_json(rep, chain, "geodesic");
            if (g_out.empty()) {
                std::fputs(json.c_str(), stdout);
            } else {
                write_file(g_out + ".json", json);
                write_file(g_out + "_trajectory.csv", trajectory_to_csv(rep.trajectory, chain));
            }
            return 0;
        }
        if (rays->parsed()) {
            const auto chain = load_chain_file(r_chain);
            const Measure start = measure_arg(r_start, chain);
            const auto results = ray_fan(start, chain, r_count, r_opts, r_seed);
            fs::create_directories(r_out);
            for (size_t i = 0; i < results.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof(name), "ray_%03zu.csv", i);
                write_file((fs::path(r_out) / name).string(), ray_to_csv(results[i], chain));
            }
            write_file((fs::path(r_out) / "manifest.json").string(),
                       ray_manifest_to_json(results, chain));
            std::printf("wrote %zu rays + manifest to %s\n", results.size(), r_out.c_str());
            return 0;
        }
        if (dual->parsed()) {
            const auto chain = load_chain_file(du_chain);
            SolveOptions sopts;
            sopts.seed = du_seed;
            HjOptions hopts;
            hopts.seed = du_seed;
            const auto gap = duality_gap(measure_arg(du_mu0, chain), measure_arg(du_mu1, chain),
                                         chain, du_steps, sopts, hopts);
            const std::string json = gap_report_to_json(gap, chain);
            if (du_out.empty()) {
                std::fputs(json.c_str(), stdout);
            } else {
                write_file(du_out + ".json", json);
                write_file(du_out + "_certificate.csv",
                           certificate_to_csv(gap.certificate, chain));
            }
            return 0;
        }
        if (compare->parsed()) {
            const auto chain = load_chain_file(c_chain);
            const Measure mu0 = measure_arg(c_mu0, chain);
            const Measure mu1 = measure_arg(c_mu1, chain);
            const auto w = distance_W(mu0, mu1, chain, c_steps);
            const auto d = distance_D(mu0, mu1, chain, c_steps);
            std::printf("D  = %.9f\n", d.distance);
            std::printf("W  = %.9f\n", w.distance);
            const bool mass_match =
                std::abs(total_mass(mu0, chain) - total_mass(mu1, chain)) <= 1e-10;
            if (mass_match) {
                const auto me = distance_ME(mu0, mu1, chain, c_steps);
                std::printf("ME = %.9f\n", me.distance);
                std::printf("ordering: D <= W %s ME\n", w.distance <= me.distance ? "<=" : ">");
            } else {
                std::printf("ME skipped (total masses differ)\n");
                std::printf("ordering: D %s W\n", d.distance <= w.distance ? "<=" : ">");
            }
            return 0;
        }
        if (suite->parsed()) {
            const auto results = run_acceptance_suite(s_seed);
            bool all = true;
            for (const auto& r : results) {
                std::printf("criterion %d [%s] %s — %s\n", r.id, r.pass ? "PASS" : "FAIL",
                            r.name.c_str(), r.detail.c_str());
                all = all && r.pass;
            }
            if (!s_out.empty()) write_file(s_out, suite_to_json(results));
            return all ? 0 : 1;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
