// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fock/carleson.hpp"
#include "fock/lattice.hpp"
#include "fock/norms.hpp"
#include "fock/scenario.hpp"
#include "fock/toeplitz.hpp"

using namespace fock;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

const FockParams P(1.0, 1);

CPoint pt(cplx z) { return CPoint{z}; }

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Tracks the worst error against a bound; any failed check flips the verdict.
struct Tally {
    double worst = 0.0;
    bool pass = true;
    std::vector<std::string> notes;

    void error(double err, double bound, const std::string& what)
    {
        worst = std::max(worst, err);
        if (!(err < bound)) {
            pass = false;
            notes.push_back(what + " err=" + fmt_sci(err));
        }
    }
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
    static std::string fmt_sci(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2e", v);
        return buf;
    }
    Outcome done() const
    {
        std::string d = "max err " + fmt_sci(worst);
        for (std::size_t i = 0; i < notes.size() && i < 4; ++i) {
            d += "; " + notes[i];
        }
        return {pass, d};
    }
};

std::string zs(cplx z)
{
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

Outcome unit_kernel_norms()
{
    Tally t;
    for (cplx w : {cplx(0, 0), cplx(1, 0), cplx(1, 1), cplx(0, 3)}) {
        auto k = EntireFn::kernel_at(pt(w));
        for (double p : {1.0, 2.0, 4.0}) {
            t.error(std::abs(norm_p(P, k, p) - 1.0), 1e-6, "p=" + std::to_string(p) + " w=" + zs(w));
        }
        t.error(std::abs(norm_inf(P, k).value - 1.0), 1e-6, "inf w=" + zs(w));
    }
    return t.done();
}

Outcome reproducing_identity()
{
    Tally t;
    std::mt19937_64 rng(20240531);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> terms(1, 4);
    for (int f = 0; f < 20; ++f) {
        std::vector<cplx> wts;
        std::vector<CPoint> ctr;
        for (int j = terms(rng); j > 0; --j) {
            wts.emplace_back(u(rng), u(rng));
            ctr.push_back(pt(cplx(u(rng), u(rng))));
        }
        auto fn = EntireFn::combo(wts, ctr);
        for (int s = 0; s < 10; ++s) {
            CPoint z = pt(cplx(u(rng), u(rng)));
            t.error(std::abs(reproducing_residual(P, fn, z)), 1e-8, "f" + std::to_string(f));
        }
    }
    return t.done();
}

Outcome lebesgue_toeplitz()
{
    Tally t;
    auto leb = MeasureModel::lebesgue();
    for (int k = 0; k <= 8; ++k) {
        std::vector<cplx> a(static_cast<std::size_t>(k + 1), 0.0);
        a.back() = 1.0;
        auto f = EntireFn::monomial(a);
        for (cplx z : {cplx(0, 0), cplx(0.5, -0.5), cplx(1.2, 0.7), cplx(-2, 1)}) {
            cplx want = pi * eval_entire(P, f, pt(z));
            double err = std::abs(apply(P, leb, f, pt(z)) - want) / std::max(1.0, std::abs(want));
            t.error(err, 1e-8, "apply z^" + std::to_string(k) + " at " + zs(z));
        }
    }
    auto M = matrix(P, leb, 32);
    for (int j = 0; j < 32; ++j) {
        for (int k = 0; k < 32; ++k) {
            cplx want = j == k ? cplx(pi) : cplx(0.0);
            t.error(std::abs(M(j, k) - want), 1e-8, "entry");
        }
    }
    return t.done();
}

Outcome gaussian_diagonal()
{
    Tally t;
    auto g = MeasureModel::gaussian(1.0, pt(0.0));
    auto M = matrix(P, g, 32);
    for (int k = 0; k < 32; ++k) {
        t.error(std::abs(M(k, k) - pi / std::pow(2.0, k + 1)), 1e-8, "diag " + std::to_string(k));
    }
    t.error(std::abs(hilbert_norm(P, g, 32).value - pi / 2), 1e-6, "hilbert_norm");
    return t.done();
}

Outcome trace_identity()
{
    Tally t;
    std::vector<std::pair<std::string, MeasureModel>> mus = {
        {"gauss0.5", MeasureModel::gaussian(0.5, pt(0.0))},
        {"gauss1", MeasureModel::gaussian(1.0, pt(0.0))},
        {"gauss2", MeasureModel::gaussian(2.0, pt(0.0))},
        {"ball", MeasureModel::ball(pt(0.0), 1.0)},
        {"atoms", MeasureModel::atomic({{pt(0.0), 1.0}, {pt(1.0), 2.0}})},
    };
    for (const auto& [name, mu] : mus) {
        t.error(std::abs(trace(P, mu, 64).value - total_mass(P, mu)), 1e-6, name);
    }
    return t.done();
}

Outcome gg_identity()
{
    Tally t;
    std::vector<std::pair<std::string, MeasureModel>> mus = {
        {"atom(1)", MeasureModel::atomic({{pt(1.0), 1.0}})},
        {"gauss1", MeasureModel::gaussian(1.0, pt(0.0))},
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    std::vector<CPoint> zs;
    for (int i = 0; i < 10; ++i) {
        zs.push_back(pt(cplx(u(rng), u(rng))));
    }
    for (const auto& [name, mu] : mus) {
        for (const auto& z : zs) {
            t.error(std::abs(berezin_from_operator(P, mu, z) - berezin(P, mu, 2.0, z)), 1e-6, name);
        }
    }
    return t.done();
}

Outcome rank_one()
{
    Tally t;
    for (cplx a : {cplx(0, 0), cplx(1, 0), cplx(1, 1)}) {
        auto mu = MeasureModel::atomic({{pt(a), 1.0}});
        auto sv = matrix(P, mu, 48).singular_values();
        t.error(sv[1], 1e-8, "sigma_2 a=" + zs(a));
        t.error(std::abs(hilbert_norm(P, mu, 48).value - 1.0), 1e-5, "norm a=" + zs(a));
    }
    return t.done();
}

Outcome truth_table()
{
    Tally t;
    struct Row {
        std::string name;
        MeasureModel mu;
        double p, q;
        bool bounded;
        int compact; // -1: not asserted
    };
    std::vector<Row> rows = {
        {"(a) lebesgue 1->inf", MeasureModel::lebesgue(), 1.0, kInf, true, 0},
        {"(b) lebesgue inf->2", MeasureModel::lebesgue(), kInf, 2.0, false, -1},
        {"(c) ball inf->1", MeasureModel::ball(pt(0.0), 1.0), kInf, 1.0, true, 1},
        {"(d) gauss 2->inf", MeasureModel::gaussian(1.0, pt(0.0)), 2.0, kInf, true, 1},
        {"(e) atom 1->1", MeasureModel::atomic({{pt(0.0), 1.0}}), 1.0, 1.0, true, -1},
    };
    for (const auto& r : rows) {
        auto rep = classify_toeplitz(P, r.mu, r.p, r.q);
        t.require(rep.bounded == r.bounded, r.name + " bounded");
        if (r.compact >= 0) {
            t.require(rep.compact == (r.compact == 1), r.name + " compact");
        }
    }
    auto d = t.done();
    d.detail = t.pass ? "5/5 verdicts match" : d.detail;
    return d;
}

Outcome criterion_coherence()
{
    Tally t;
    auto cfg = parse_config(STANDARD_CONFIG);
    int disagreements = 0;
    for (const auto& nm : cfg.measures) {
        std::vector<bool> bz, av;
        for (double tt : {0.5, 1.0, 2.0, 4.0}) {
            bz.push_back(berezin_norm(cfg.params, nm.measure, tt, NormMode::sup).finite);
        }
        for (double d : {0.5, 1.0, 2.0}) {
            av.push_back(averaging_function_sup(cfg.params, nm.measure, d).finite);
        }
        for (const auto* v : {&bz, &av}) {
            for (bool b : *v) {
                if (b != v->front()) {
                    ++disagreements;
                    t.require(false, nm.name);
                    break;
                }
            }
        }
    }
    return {t.pass, std::to_string(cfg.measures.size()) + " fixtures, " + std::to_string(disagreements) +
                        " disagreements"};
}

Outcome equivalence_bands()
{
    Tally t;
    std::vector<MeasureModel> fam;
    std::vector<std::string> names;
    for (double b : {0.5, 1.0, 2.0}) {
        fam.push_back(MeasureModel::gaussian(b, pt(0.0)));
        names.push_back("beta=" + std::to_string(b));
    }
    CarlesonSettings s;
    double lo = kInf, hi = 0.0;
    for (auto [p, q] : {std::pair{kInf, 1.0}, std::pair{1.0, kInf}}) {
        auto table = equivalence_suite(P, fam, names, p, q, s);
        for (const auto& row : table.rows) {
            t.require(row.included, row.name + " excluded: " + row.note);
        }
        t.require(table.passes, "band (" + std::to_string(p) + "," + std::to_string(q) + ")");
        for (const auto& [key, range] : table.ratio_range) {
            lo = std::min(lo, range.first);
            hi = std::max(hi, range.second);
        }
        // scaling: every banded ratio must not move with c
        std::vector<MeasureModel> scaled;
        std::vector<std::string> snames;
        for (double c : {0.5, 1.0, 2.0, 4.0}) {
            scaled.push_back(fam[1].scaled(c));
            snames.push_back("c=" + std::to_string(c));
        }
        auto st = equivalence_suite(P, scaled, snames, p, q, s);
        t.require(st.passes, "scaling band");
        for (const auto& [key, range] : st.ratio_range) {
            double spread = (range.second - range.first) / std::max(std::abs(range.second), 1e-300);
            t.error(spread, 1e-6, "scaling " + key);
        }
    }
    auto d = t.done();
    d.detail = "ratios in [" + Tally::fmt_sci(lo) + ", " + Tally::fmt_sci(hi) + "], scaling spread " +
               Tally::fmt_sci(t.worst) + (t.pass ? "" : "; " + d.detail);
    return d;
}

Outcome lattice_axioms()
{
    Tally t;
    Lattice lat = build_lattice(P, 1.0, 6.0);
    double md = min_center_distance(lat);
    t.require(md >= 0.5, "min distance " + std::to_string(md));
    auto cov = verify_covering(lat, uniform_ball_samples(1, 5.0, 10000, 20240531));
    t.require(cov.covered && cov.worst_gap < 0.5, "covering gap " + std::to_string(cov.worst_gap));
    int m1 = covering_multiplicity(lat, 1.0, disc_grid_samples(4.0, 0.1));
    int m2 = covering_multiplicity(lat, 1.0, disc_grid_samples(4.0, 0.05));
    int m3 = covering_multiplicity(lat, 1.0, disc_grid_samples(4.0, 0.025));
    t.require(m1 > 0 && m1 == m2 && m2 == m3, "multiplicity unstable");
    return {t.pass, "min dist " + Tally::fmt_sci(md) + ", worst gap " + Tally::fmt_sci(cov.worst_gap) +
                        ", N_max " + std::to_string(m3) + (t.pass ? "" : "; " + t.done().detail)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism()
{
    Tally t;
    const fs::path base = fs::temp_directory_path() / "fock_acceptance";
    fs::remove_all(base);
    std::vector<fs::path> outs = {base / "run1", base / "run2"};
    for (const auto& out : outs) {
        std::string cmd = std::string(FOCKCTL_PATH) + " --config " + STANDARD_CONFIG + " --out " + out.string() +
                          " --seed 20240531 verify > " + (out.string() + ".log") + " 2>&1";
        fs::create_directories(base);
        int status = std::system(cmd.c_str());
        t.require(status == 0, "verify exited with status " + std::to_string(status));
    }
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(outs[0])) {
        if (e.path().extension() != ".csv") {
            continue;
        }
        auto rel = fs::relative(e.path(), outs[0]);
        t.require(fs::exists(outs[1] / rel) && slurp(e.path()) == slurp(outs[1] / rel), "differs: " + rel.string());
        ++files;
    }
    t.require(files > 0, "no CSV output");
    return {t.pass, std::to_string(files) + " CSV files compared" + (t.pass ? "" : "; " + t.done().detail)};
}

} // namespace

int main()
{
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"unit kernel norms", unit_kernel_norms},
        {"reproducing identity", reproducing_identity},
        {"Toeplitz of Lebesgue", lebesgue_toeplitz},
        {"Gaussian diagonal", gaussian_diagonal},
        {"trace identity", trace_identity},
        {"GG identity", gg_identity},
        {"rank-one atom", rank_one},
        {"classification truth table", truth_table},
        {"criterion coherence", criterion_coherence},
        {"equivalence bands", equivalence_bands},
        {"lattice axioms", lattice_axioms},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("%s %2zu %-28s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), sec);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
