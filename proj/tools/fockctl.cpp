// fockctl: scenario-driven front end to the Fock-space Toeplitz toolkit.
//
// Exit codes: 0 pass, 1 suite failure or runtime error, 2 configuration error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fock/carleson.hpp"
#include "fock/csv.hpp"
#include "fock/errors.hpp"
#include "fock/lattice.hpp"
#include "fock/scenario.hpp"
#include "fock/simd.hpp"
#include "fock/toeplitz.hpp"

namespace {

using namespace fock;

struct Globals {
    std::string config;
    std::string out;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string measure;
};

ScenarioConfig load(const Globals& g)
{
    if (g.config.empty()) {
        throw ConfigError("--config is required (or FOCKCTL_CONFIG)");
    }
    ScenarioConfig cfg = parse_config(g.config);
    if (!g.out.empty()) {
        cfg.output_dir = g.out;
    }
    if (g.workers) {
        cfg.workers = *g.workers;
    }
    if (g.seed) {
        cfg.seed = *g.seed;
        cfg.quad.seed = *g.seed;
    }
    if (g.tol) {
        cfg.check_tol = *g.tol;
    }
    validate_config(cfg);
    return cfg;
}

std::vector<NamedMeasure> selected(const ScenarioConfig& cfg, const Globals& g)
{
    if (g.measure.empty()) {
        return cfg.measures;
    }
    for (const auto& m : cfg.measures) {
        if (m.name == g.measure) {
            return {m};
        }
    }
    throw ConfigError("no measure named '" + g.measure + "' in " + g.config);
}

std::filesystem::path out_dir(const ScenarioConfig& cfg)
{
    std::filesystem::create_directories(cfg.output_dir);
    return cfg.output_dir;
}

int cmd_classify(const Globals& g)
{
    const ScenarioConfig cfg = load(g);
    const CarlesonSettings s = scenario_settings(cfg);
    const auto dir = out_dir(cfg);
    std::ofstream csv(dir / "classification.csv");
    csv << "measure,p,q,regime,criterion,bounded,compact,norm_proxy,norm_lower_bound,embedding_lower_bound\n";
    int status = 0;
    for (const auto& m : selected(cfg, g)) {
        for (const auto& [p, q] : cfg.exponents) {
            try {
                const auto r = classify_toeplitz(cfg.params, m.measure, p, q, s);
                csv << m.name << ',' << fmt(p) << ',' << fmt(q) << ',' << r.regime << ','
                    << criterion_name(r.criterion) << ',' << r.bounded << ',' << r.compact << ','
                    << fmt(r.norm_proxy) << ',' << fmt(r.norm_lower_bound) << ','
                    << fmt(r.embedding_lower_bound) << '\n';
                std::cout << m.name << " (" << fmt(p) << ',' << fmt(q) << "): bounded=" << r.bounded
                          << " compact=" << r.compact << " criterion=" << criterion_name(r.criterion)
                          << " proxy=" << fmt(r.norm_proxy) << " lower_bound=" << fmt(r.norm_lower_bound) << '\n';
            } catch (const Error& e) {
                std::cout << m.name << " (" << fmt(p) << ',' << fmt(q) << "): error: " << e.what() << '\n';
                status = 1;
            }
        }
    }
    return status;
}

int cmd_profile(const Globals& g, ProfileKind kind, std::optional<double> parameter)
{
    const ScenarioConfig cfg = load(g);
    const auto dir = out_dir(cfg);
    const auto grid = profile_grid(cfg.params, cfg.profiles);
    const bool ber = kind == ProfileKind::berezin;
    const double value = parameter ? *parameter : (ber ? cfg.profiles.t : cfg.profiles.delta);
    for (const auto& m : selected(cfg, g)) {
        const auto path = dir / ((ber ? "berezin_" : "averaging_") + m.name + ".csv");
        emit_profiles(cfg.params, m.measure, kind, grid, value, path, cfg.quad);
        std::cout << path.string() << '\n';
    }
    return 0;
}

int cmd_matrix(const Globals& g, int order)
{
    const ScenarioConfig cfg = load(g);
    const auto dir = out_dir(cfg);
    for (const auto& m : selected(cfg, g)) {
        const ToeplitzMatrix mat = matrix(cfg.params, m.measure, order, cfg.quad);
        std::ofstream mf(dir / ("matrix_" + m.name + ".csv"));
        write_matrix_csv(mat, mf);
        const auto sv = mat.singular_values();
        std::ofstream sf(dir / ("spectrum_" + m.name + ".csv"));
        write_spectrum_csv(sv, sf);
        const SpectralNorm hn = hilbert_norm(cfg.params, m.measure, order, cfg.quad);
        std::cout << m.name << ": order=" << order << " norm=" << fmt(hn.value) << " delta=" << fmt(hn.delta)
                  << " hermitian_defect=" << fmt(mat.hermitian_defect()) << '\n';
    }
    return 0;
}

int cmd_trace(const Globals& g, int order)
{
    const ScenarioConfig cfg = load(g);
    const auto dir = out_dir(cfg);
    std::ofstream csv(dir / "trace.csv");
    csv << "measure,order,trace,total_mass,diverges\n";
    int status = 0;
    for (const auto& m : selected(cfg, g)) {
        const TraceResult t = trace(cfg.params, m.measure, order, cfg.quad);
        const double mass = total_mass(cfg.params, m.measure);
        csv << m.name << ',' << order << ',' << fmt(t.value) << ',' << fmt(mass) << ',' << t.diverges << '\n';
        std::cout << m.name << ": trace=" << fmt(t.value) << " mass=" << fmt(mass)
                  << (t.diverges ? " (diverges)" : "") << '\n';
        if (!t.diverges && std::abs(t.value - mass) > cfg.check_tol * std::max(1.0, mass)) {
            status = 1;
        }
    }
    return status;
}

int cmd_norms(const Globals& g)
{
    const ScenarioConfig cfg = load(g);
    const auto dir = out_dir(cfg);
    const Lattice lat = build_lattice(cfg.params, cfg.lattice_r, cfg.bound_radius);
    const auto tests = default_tests(cfg.params, lat);
    std::ofstream csv(dir / "norms.csv");
    csv << "measure,p,q,op_norm_lb,op_witness,embedding_lb,embedding_witness\n";
    int status = 0;
    for (const auto& m : selected(cfg, g)) {
        for (const auto& [p, q] : cfg.exponents) {
            try {
                const auto op = op_norm_estimate(cfg.params, m.measure, p, q, tests, cfg.quad);
                const double eq = std::isinf(q) ? 1.0 : q;
                const auto emb = embedding_norm_estimate(cfg.params, m.measure, p, eq, tests, cfg.quad);
                csv << m.name << ',' << fmt(p) << ',' << fmt(q) << ',' << fmt(op.lower_bound) << ',' << op.witness
                    << ',' << fmt(emb.lower_bound) << ',' << emb.witness << '\n';
                std::cout << m.name << " (" << fmt(p) << ',' << fmt(q) << "): ||T|| >= " << fmt(op.lower_bound)
                          << "  ||I|| >= " << fmt(emb.lower_bound) << '\n';
            } catch (const Error& e) {
                std::cout << m.name << " (" << fmt(p) << ',' << fmt(q) << "): error: " << e.what() << '\n';
                status = 1;
            }
        }
    }
    return status;
}

int cmd_verify(const Globals& g)
{
    const ScenarioConfig cfg = load(g);
    const RunReport rep = run_scenario(cfg);
    for (const auto& s : rep.suites) {
        if (!s.passed) {
            std::cout << "FAIL " << s.suite << ' ' << s.subject << ' ' << s.detail << '\n';
        }
    }
    for (const auto& c : rep.cases) {
        if (!c.error.empty()) {
            std::cout << "ERROR " << c.measure << " (" << fmt(c.p) << ',' << fmt(c.q) << "): " << c.error << '\n';
        }
    }
    std::cout << (rep.passed() ? "PASS" : "FAIL") << ": " << rep.cases.size() << " combinations, "
              << rep.suites.size() << " suites, output in " << cfg.output_dir.string() << '\n';
    return rep.passed() ? 0 : 1;
}

int cmd_lattice(const Globals& g, std::optional<double> r, std::optional<double> bound)
{
    ScenarioConfig cfg;
    if (!g.config.empty()) {
        cfg = load(g);
    } else if (!g.out.empty()) {
        cfg.output_dir = g.out;
    }
    const double rr = r ? *r : cfg.lattice_r;
    const double bb = bound ? *bound : cfg.bound_radius;
    const Lattice lat = build_lattice(cfg.params, rr, bb);
    const auto dir = out_dir(cfg);
    std::ofstream csv(dir / "lattice.csv");
    write_lattice_csv(lat, csv);
    const auto samples = uniform_ball_samples(cfg.params.n(), bb - rr, 10000, cfg.seed);
    const CoveringReport cov = verify_covering(lat, samples);
    std::cout << "points=" << lat.size() << " min_distance=" << fmt(min_center_distance(lat))
              << " covering_radius=" << fmt(design_covering_radius(lat)) << " worst_gap=" << fmt(cov.worst_gap)
              << " covered=" << cov.covered << '\n';
    return cov.covered ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Toeplitz operators between Fock spaces: classification, norms and checks"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Scenario file (JSON)")->envname("FOCKCTL_CONFIG");
    app.add_option("--out", g.out, "Output directory")->envname("FOCKCTL_OUT");
    app.add_option("--workers", g.workers, "Worker threads")->envname("FOCKCTL_WORKERS");
    app.add_option("--seed", g.seed, "Seed of Monte Carlo and sampling paths")->envname("FOCKCTL_SEED");
    app.add_option("--tol", g.tol, "Tolerance of the invariant checks")->envname("FOCKCTL_TOL");
    app.add_option("--measure", g.measure, "Restrict to one configured measure")->envname("FOCKCTL_MEASURE");
    std::string simd;
    app.add_option("--simd", simd, "Kernel path: auto, scalar or avx2")
        ->envname("FOCKCTL_SIMD")
        ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    int order = kDefaultOrder;
    std::optional<double> t, delta, r, bound;
    auto* classify = app.add_subcommand("classify", "Boundedness and compactness for every measure and (p, q)");
    auto* berezin = app.add_subcommand("berezin", "Berezin transform profiles as CSV");
    berezin->add_option("--t", t, "Berezin parameter");
    auto* averaging = app.add_subcommand("averaging", "Averaging-function profiles as CSV");
    averaging->add_option("--delta", delta, "Averaging radius");
    auto* mat = app.add_subcommand("matrix", "Truncated Toeplitz matrix and its spectrum (n = 1)");
    mat->add_option("--order", order, "Truncation order")->check(CLI::PositiveNumber);
    auto* tr = app.add_subcommand("trace", "Truncated trace against the total mass (n = 1)");
    tr->add_option("--order", order, "Truncation order")->check(CLI::PositiveNumber);
    auto* norms = app.add_subcommand("norms", "Operator and embedding norm lower bounds");
    auto* verify = app.add_subcommand("verify", "Run every classification, family and invariant suite");
    auto* lattice = app.add_subcommand("lattice", "Build a lattice and check its covering");
    lattice->add_option("--r", r, "Lattice scale r");
    lattice->add_option("--bound", bound, "Truncation radius");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simd == "scalar") {
            simd::set_level(simd::Level::scalar);
        } else if (simd == "avx2") {
            simd::set_level(simd::Level::avx2);
        }
        if (*classify) return cmd_classify(g);
        if (*berezin) return cmd_profile(g, ProfileKind::berezin, t);
        if (*averaging) return cmd_profile(g, ProfileKind::averaging, delta);
        if (*mat) return cmd_matrix(g, order);
        if (*tr) return cmd_trace(g, order);
        if (*norms) return cmd_norms(g);
        if (*verify) return cmd_verify(g);
        if (*lattice) return cmd_lattice(g, r, bound);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
