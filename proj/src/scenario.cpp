#include "fock/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fock/csv.hpp"
#include "fock/errors.hpp"
#include "fock/lattice.hpp"
#include "fock/norms.hpp"
#include "fock/toeplitz.hpp"

namespace fock {

namespace {

using json = nlohmann::json;

// ---------------------------------------------------------------------------------------
// Source lines of every value, keyed by JSON pointer. Runs on text the parser accepted.

class LineIndex {
public:
    explicit LineIndex(const std::string& text) : s_(text)
    {
        ws();
        if (i_ < s_.size()) {
            value("");
        }
    }

    int line(std::string ptr) const
    {
        while (true) {
            const auto it = lines_.find(ptr);
            if (it != lines_.end()) {
                return it->second;
            }
            if (ptr.empty()) {
                return 1;
            }
            ptr.erase(ptr.rfind('/'));
        }
    }

private:
    void ws()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            line_ += s_[i_] == '\n';
            ++i_;
        }
    }

    std::string str()
    {
        std::string out;
        ++i_;
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\') {
                ++i_;
            }
            out += s_[i_++];
        }
        ++i_;
        return out;
    }

    void value(const std::string& ptr)
    {
        lines_[ptr] = line_;
        const char c = s_[i_];
        if (c == '{') {
            ++i_;
            ws();
            while (i_ < s_.size() && s_[i_] != '}') {
                const std::string key = str();
                ws();
                ++i_; // ':'
                ws();
                value(ptr + "/" + key);
                ws();
                if (s_[i_] == ',') {
                    ++i_;
                    ws();
                }
            }
            ++i_;
        } else if (c == '[') {
            ++i_;
            ws();
            int k = 0;
            while (i_ < s_.size() && s_[i_] != ']') {
                value(ptr + "/" + std::to_string(k++));
                ws();
                if (s_[i_] == ',') {
                    ++i_;
                    ws();
                }
            }
            ++i_;
        } else if (c == '"') {
            str();
        } else {
            while (i_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[i_]) == std::string_view::npos) {
                ++i_;
            }
        }
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

// ---------------------------------------------------------------------------------------
// Schema walking

struct Node {
    const json& j;
    std::string path;
    std::string ptr;
};

class Reader {
public:
    Reader(const LineIndex& idx, std::string origin) : idx_(idx), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const Node& n, const std::string& msg) const
    {
        std::string where = origin_ + ":" + std::to_string(idx_.line(n.ptr)) + ": ";
        if (!n.path.empty()) {
            where += n.path + ": ";
        }
        throw ConfigError(where + msg);
    }

    void object(const Node& n, std::initializer_list<std::string_view> allowed) const
    {
        if (!n.j.is_object()) {
            fail(n, "expected an object");
        }
        for (const auto& [key, _] : n.j.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(child(n, key), "unknown key '" + key + "'");
            }
        }
    }

    static Node child(const Node& n, const std::string& key)
    {
        return {n.j.at(key), n.path.empty() ? key : n.path + "." + key, n.ptr + "/" + key};
    }

    static Node item(const Node& n, std::size_t k)
    {
        return {n.j.at(k), n.path + "[" + std::to_string(k) + "]", n.ptr + "/" + std::to_string(k)};
    }

    bool has(const Node& n, const std::string& key) const { return n.j.contains(key); }

    Node required(const Node& n, const std::string& key) const
    {
        if (!n.j.contains(key)) {
            fail(n, "missing required key '" + key + "'");
        }
        return child(n, key);
    }

    double number(const Node& n) const
    {
        if (!n.j.is_number()) {
            fail(n, "expected a number");
        }
        return n.j.get<double>();
    }

    double number(const Node& n, const std::string& key, double fallback) const
    {
        return has(n, key) ? number(child(n, key)) : fallback;
    }

    double positive(const Node& n, const std::string& key, double fallback) const
    {
        if (!has(n, key)) {
            return fallback;
        }
        const Node c = child(n, key);
        const double v = number(c);
        if (!(v > 0.0) || !std::isfinite(v)) {
            fail(c, key + " must be positive");
        }
        return v;
    }

    long long integer(const Node& n) const
    {
        if (!n.j.is_number_integer()) {
            fail(n, "expected an integer");
        }
        return n.j.get<long long>();
    }

    std::string string(const Node& n) const
    {
        if (!n.j.is_string()) {
            fail(n, "expected a string");
        }
        return n.j.get<std::string>();
    }

    const Node& array(const Node& n) const
    {
        if (!n.j.is_array()) {
            fail(n, "expected an array");
        }
        return n;
    }

    double exponent(const Node& n) const
    {
        if (n.j.is_string()) {
            const auto s = n.j.get<std::string>();
            if (s == "inf" || s == "infinity") {
                return kInf;
            }
            fail(n, "exponent must be a number >= 1 or \"inf\"");
        }
        const double v = number(n);
        if (!(v >= 1.0) || !std::isfinite(v)) {
            fail(n, "exponent must be a number >= 1 or \"inf\"");
        }
        return v;
    }

    CPoint point(const Node& n, int dim) const
    {
        array(n);
        if (static_cast<int>(n.j.size()) != dim) {
            fail(n, "expected " + std::to_string(dim) + " coordinates given as [re, im] pairs");
        }
        std::vector<cplx> c;
        for (std::size_t k = 0; k < n.j.size(); ++k) {
            const Node e = item(n, k);
            if (!e.j.is_array() || e.j.size() != 2) {
                fail(e, "coordinate must be a [re, im] pair");
            }
            c.emplace_back(number(item(e, 0)), number(item(e, 1)));
        }
        return CPoint(std::move(c));
    }

    MeasureModel measure(const Node& n, int dim, bool named) const
    {
        if (!n.j.is_object()) {
            fail(n, "expected a measure object");
        }
        const std::string type = string(required(n, "type"));
        try {
            if (type == "gaussian") {
                named ? object(n, {"name", "type", "beta", "center", "scale"})
                      : object(n, {"type", "beta", "center", "scale"});
                const CPoint c = has(n, "center") ? point(child(n, "center"), dim) : CPoint::zero(dim);
                return MeasureModel::gaussian(positive(n, "beta", 1.0), c, number(n, "scale", 1.0));
            }
            if (type == "lebesgue") {
                named ? object(n, {"name", "type", "scale"}) : object(n, {"type", "scale"});
                return MeasureModel::lebesgue(number(n, "scale", 1.0));
            }
            if (type == "ball") {
                named ? object(n, {"name", "type", "center", "radius", "scale"})
                      : object(n, {"type", "center", "radius", "scale"});
                const CPoint c = has(n, "center") ? point(child(n, "center"), dim) : CPoint::zero(dim);
                return MeasureModel::ball(c, positive(n, "radius", 1.0), number(n, "scale", 1.0));
            }
            if (type == "radial_poly") {
                named ? object(n, {"name", "type", "m", "beta", "scale"})
                      : object(n, {"type", "m", "beta", "scale"});
                const long long m = integer(required(n, "m"));
                if (m < 0) {
                    fail(child(n, "m"), "m must be nonnegative");
                }
                return MeasureModel::radial_poly(static_cast<int>(m), positive(n, "beta", 1.0),
                                                 number(n, "scale", 1.0));
            }
            if (type == "atomic") {
                named ? object(n, {"name", "type", "atoms"}) : object(n, {"type", "atoms"});
                const Node list = array(required(n, "atoms"));
                std::vector<Atom> atoms;
                for (std::size_t k = 0; k < list.j.size(); ++k) {
                    const Node a = item(list, k);
                    object(a, {"point", "weight"});
                    atoms.push_back({point(required(a, "point"), dim), number(required(a, "weight"))});
                }
                return MeasureModel::atomic(std::move(atoms));
            }
            if (type == "mixture") {
                named ? object(n, {"name", "type", "components"}) : object(n, {"type", "components"});
                const Node list = array(required(n, "components"));
                std::vector<MeasureModel> parts;
                for (std::size_t k = 0; k < list.j.size(); ++k) {
                    parts.push_back(measure(item(list, k), dim, false));
                }
                return MeasureModel::mixture(std::move(parts));
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            fail(n, e.what());
        }
        fail(child(n, "type"), "unknown measure type '" + type +
                                   "' (gaussian, lebesgue, ball, radial_poly, atomic, mixture)");
    }

private:
    const LineIndex& idx_;
    std::string origin_;
};

std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (const char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
    }
    return out + "\"";
}

std::string pair_text(double p, double q) { return "(" + fmt(p) + "," + fmt(q) + ")"; }

// ---------------------------------------------------------------------------------------
// Invariant suites

std::vector<CPoint> disc_samples(int n, double radius, int count, std::uint64_t seed)
{
    return uniform_ball_samples(n, radius, static_cast<std::size_t>(count), seed);
}

CPoint first_axis(int n, cplx v)
{
    std::vector<cplx> c(static_cast<std::size_t>(n), 0.0);
    c[0] = v;
    return CPoint(std::move(c));
}

SuiteResult unit_kernel_suite(const ScenarioConfig& cfg)
{
    SuiteResult r{"unit_kernel_norms", "k_w", true, 0.0, ""};
    const int n = cfg.params.n();
    for (const cplx w : {cplx(0, 0), cplx(1, 0), cplx(1, 1), cplx(0, 3)}) {
        const EntireFn k = EntireFn::kernel_at(first_axis(n, w));
        for (const double p : {1.0, 2.0, 4.0}) {
            r.max_error = std::max(r.max_error, std::abs(norm_p(cfg.params, k, p, cfg.quad) - 1.0));
        }
        r.max_error = std::max(r.max_error, std::abs(norm_inf(cfg.params, k).value - 1.0));
    }
    r.passed = r.max_error <= cfg.check_tol;
    return r;
}

SuiteResult reproducing_suite(const ScenarioConfig& cfg)
{
    SuiteResult r{"reproducing_identity", "kernel_combos", true, 0.0, ""};
    const int n = cfg.params.n();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> terms(1, 5);
    std::normal_distribution<double> g;
    for (int f = 0; f < 20; ++f) {
        const int m = terms(rng);
        std::vector<cplx> w;
        double total = 0.0;
        for (int j = 0; j < m; ++j) {
            w.emplace_back(g(rng), g(rng));
            total += std::abs(w.back());
        }
        auto centers = disc_samples(n, 3.0, m, rng());
        const EntireFn fn = EntireFn::combo(std::move(w), std::move(centers));
        for (const auto& z : disc_samples(n, 3.0, 10, rng())) {
            const double res = std::abs(reproducing_residual(cfg.params, fn, z, cfg.quad)) / std::max(1.0, total);
            r.max_error = std::max(r.max_error, res);
        }
    }
    r.passed = r.max_error < cfg.reproducing_tol;
    return r;
}

SuiteResult lattice_suite(const ScenarioConfig& cfg)
{
    SuiteResult r{"lattice_axioms", "r=" + fmt(cfg.lattice_r), true, 0.0, ""};
    const Lattice lat = build_lattice(cfg.params, cfg.lattice_r, cfg.bound_radius);
    const double half = 0.5 * cfg.lattice_r;
    const double dmin = min_center_distance(lat);
    const double inner = cfg.bound_radius - cfg.lattice_r;
    const auto samples = disc_samples(cfg.params.n(), inner, 10000, cfg.seed);
    const CoveringReport cov = verify_covering(lat, samples);
    const double reach = cfg.bound_radius - 2.0 * cfg.lattice_r;
    const int mult = covering_multiplicity(lat, cfg.lattice_r, disc_samples(cfg.params.n(), reach, 10000, cfg.seed + 1));
    const int mult_fine =
        covering_multiplicity(lat, cfg.lattice_r, disc_samples(cfg.params.n(), reach, 40000, cfg.seed + 2));
    r.max_error = std::max(0.0, std::max(half - dmin, cov.worst_gap - half));
    r.passed = dmin >= half && cov.covered && cov.worst_gap < half && mult == mult_fine;
    r.detail = "points=" + std::to_string(lat.size()) + " min_distance=" + fmt(dmin) +
               " worst_gap=" + fmt(cov.worst_gap) + " multiplicity=" + std::to_string(mult) + "/" +
               std::to_string(mult_fine);
    return r;
}

std::vector<SuiteResult> measure_suites(const ScenarioConfig& cfg, const NamedMeasure& nm, std::size_t index)
{
    std::vector<SuiteResult> out;
    const auto& params = cfg.params;
    const auto& mu = nm.measure;
    const int n = params.n();
    auto guarded = [&](const std::string& suite, auto&& body) {
        SuiteResult r{suite, nm.name, true, 0.0, ""};
        try {
            body(r);
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = e.what();
        }
        out.push_back(std::move(r));
    };

    const double mass = total_mass(params, mu);
    const auto samples = disc_samples(n, 2.0, 10, cfg.seed + 17 * (index + 1));

    if (n == 1) {
        guarded("gg_identity", [&](SuiteResult& r) {
            for (const auto& z : samples) {
                const double want = berezin(params, mu, 2.0, z, cfg.quad);
                const double got = berezin_from_operator(params, mu, z, cfg.quad);
                r.max_error = std::max(r.max_error, std::abs(got - want) / std::max(1.0, want));
            }
            r.passed = r.max_error < cfg.check_tol;
        });
        guarded("trace_identity", [&](SuiteResult& r) {
            const TraceResult t64 = trace(params, mu, 64, cfg.quad);
            if (t64.diverges) {
                const double t32 = trace(params, mu, 32, cfg.quad).value;
                r.passed = t64.value > t32;
                r.detail = "infinite mass; trace(32)=" + fmt(t32) + " trace(64)=" + fmt(t64.value);
            } else {
                r.max_error = std::abs(t64.value - mass) / std::max(1.0, mass);
                r.passed = r.max_error < cfg.check_tol;
                r.detail = "trace(64)=" + fmt(t64.value) + " mass=" + fmt(mass);
            }
        });
    }
    guarded("admissibility", [&](SuiteResult& r) {
        const auto rep = admissibility(params, mu, samples, cfg.quad);
        r.passed = rep.finite;
    });
    guarded("criterion_coherence", [&](SuiteResult& r) {
        std::string verdicts;
        std::set<bool> sup;
        for (const double t : {0.5, 1.0, 2.0, 4.0}) {
            const bool fin = berezin_norm(params, mu, t, NormMode::sup, {}, cfg.quad).finite;
            sup.insert(fin);
            verdicts += "sup_t" + fmt(t) + "=" + (fin ? "1 " : "0 ");
        }
        std::set<bool> avg;
        for (const double d : {0.5, 1.0, 2.0}) {
            const auto v = averaging_function_sup(params, mu, d, {}, cfg.quad);
            const bool fin = v.finite && std::isfinite(v.value);
            avg.insert(fin);
            verdicts += "avg_d" + fmt(d) + "=" + (fin ? "1 " : "0 ");
        }
        const Lattice lat = build_lattice(params, cfg.lattice_r, cfg.bound_radius);
        const bool l1 = berezin_norm(params, mu, 2.0, NormMode::l1, {}, cfg.quad).finite;
        const bool seq = !averaging_sequence(params, mu, lat, cfg.lattice_r, {}, cfg.quad).infinite_tail;
        const bool fin_mass = std::isfinite(mass);
        verdicts += std::string("l1=") + (l1 ? "1" : "0") + " seq_l1=" + (seq ? "1" : "0") +
                    " mass=" + (fin_mass ? "1" : "0");
        r.passed = sup.size() == 1 && avg.size() == 1 && l1 == seq && seq == fin_mass;
        r.detail = verdicts;
    });
    return out;
}

// ---------------------------------------------------------------------------------------
// Outputs

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + path.string());
    }
    f << text;
    if (!f) {
        throw Error("cannot write " + path.string());
    }
}

std::string profile_csv(const FockParams& params, const MeasureModel& mu, ProfileKind kind,
                        const std::vector<CPoint>& grid, double parameter, const QuadratureOptions& opts)
{
    std::ostringstream os;
    emit_profiles(params, mu, kind, grid, parameter, os, opts);
    return os.str();
}

void run_pool(std::vector<std::function<void()>>& tasks, int workers)
{
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < tasks.size(); k = next++) {
            tasks[k]();
        }
    };
    const int count = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < count; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace

// ---------------------------------------------------------------------------------------

ScenarioConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError(path.string() + ": cannot open config file");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = text.substr(0, std::min(e.byte, text.size()));
        const auto line = 1 + std::count(upto.begin(), upto.end(), '\n');
        throw ConfigError(origin + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
    }
    const LineIndex idx(text);
    const Reader rd(idx, origin);
    const Node top{root, "", ""};
    rd.object(top, {"alpha", "n", "seed", "workers", "output", "lattice", "exponents", "tolerances", "measures",
                    "equivalence", "profiles"});

    ScenarioConfig cfg;
    const Node alpha = rd.required(top, "alpha");
    const double a = rd.number(alpha);
    if (!(a > 0.0) || !std::isfinite(a)) {
        rd.fail(alpha, "alpha must be positive");
    }
    long long n = 1;
    if (rd.has(top, "n")) {
        const Node nn = Reader::child(top, "n");
        n = rd.integer(nn);
        if (n < 1) {
            rd.fail(nn, "n must be a positive integer");
        }
    }
    cfg.params = FockParams(a, static_cast<int>(n));

    if (rd.has(top, "seed")) {
        const Node s = Reader::child(top, "seed");
        if (!s.j.is_number_unsigned()) {
            rd.fail(s, "seed must be a nonnegative integer");
        }
        cfg.seed = s.j.get<std::uint64_t>();
    }
    cfg.quad.seed = cfg.seed;
    if (rd.has(top, "workers")) {
        const Node w = Reader::child(top, "workers");
        const long long v = rd.integer(w);
        if (v < 1) {
            rd.fail(w, "workers must be at least 1");
        }
        cfg.workers = static_cast<int>(v);
    }
    if (rd.has(top, "output")) {
        cfg.output_dir = rd.string(Reader::child(top, "output"));
    }
    if (rd.has(top, "lattice")) {
        const Node l = Reader::child(top, "lattice");
        rd.object(l, {"r", "bound_radius"});
        cfg.lattice_r = rd.positive(l, "r", cfg.lattice_r);
        cfg.bound_radius = rd.positive(l, "bound_radius", cfg.bound_radius);
        if (cfg.bound_radius < 4.0 * cfg.lattice_r) {
            rd.fail(l, "bound_radius must be at least 4 r");
        }
    }
    if (rd.has(top, "tolerances")) {
        const Node t = Reader::child(top, "tolerances");
        rd.object(t, {"quadrature", "estimate", "absolute", "monte_carlo", "check", "reproducing", "band",
                      "refinements"});
        cfg.quad.rel_tol = rd.positive(t, "quadrature", cfg.quad.rel_tol);
        cfg.quad.abs_tol = rd.positive(t, "absolute", cfg.quad.abs_tol);
        cfg.quad.mc_rel_tol = rd.positive(t, "monte_carlo", cfg.quad.mc_rel_tol);
        cfg.estimate_tol = rd.positive(t, "estimate", cfg.estimate_tol);
        cfg.check_tol = rd.positive(t, "check", cfg.check_tol);
        cfg.reproducing_tol = rd.positive(t, "reproducing", cfg.reproducing_tol);
        cfg.band = rd.positive(t, "band", cfg.band);
        if (cfg.band < 1.0) {
            rd.fail(Reader::child(t, "band"), "band must be at least 1");
        }
        if (rd.has(t, "refinements")) {
            const Node r = Reader::child(t, "refinements");
            const long long v = rd.integer(r);
            if (v < 1 || v > 8) {
                rd.fail(r, "refinements must lie in [1, 8]");
            }
            cfg.quad.max_refinements = static_cast<int>(v);
        }
    }

    const Node ms = rd.array(rd.required(top, "measures"));
    if (ms.j.empty()) {
        rd.fail(ms, "at least one measure is required");
    }
    std::set<std::string> names;
    for (std::size_t k = 0; k < ms.j.size(); ++k) {
        const Node m = Reader::item(ms, k);
        if (!m.j.is_object()) {
            rd.fail(m, "expected a measure object");
        }
        const Node nm = rd.required(m, "name");
        const std::string name = rd.string(nm);
        if (name.empty() || name.find_first_of(",/\\\"\n ") != std::string::npos) {
            rd.fail(nm, "measure names must be nonempty and free of spaces, commas, quotes and slashes");
        }
        if (!names.insert(name).second) {
            rd.fail(nm, "duplicate measure name '" + name + "'");
        }
        MeasureModel mu = rd.measure(m, static_cast<int>(n), true);
        if (mu.dim() != 0 && mu.dim() != n) {
            rd.fail(m, "measure dimension differs from n");
        }
        cfg.measures.push_back({name, std::move(mu)});
    }

    const Node ex = rd.array(rd.required(top, "exponents"));
    if (ex.j.empty()) {
        rd.fail(ex, "at least one exponent pair is required");
    }
    for (std::size_t k = 0; k < ex.j.size(); ++k) {
        const Node e = Reader::item(ex, k);
        if (!e.j.is_array() || e.j.size() != 2) {
            rd.fail(e, "exponent pair must be [p, q]");
        }
        const std::pair<double, double> pq{rd.exponent(Reader::item(e, 0)), rd.exponent(Reader::item(e, 1))};
        if (std::find(cfg.exponents.begin(), cfg.exponents.end(), pq) != cfg.exponents.end()) {
            rd.fail(e, "duplicate exponent pair");
        }
        cfg.exponents.push_back(pq);
    }

    if (rd.has(top, "equivalence")) {
        const Node fams = rd.array(Reader::child(top, "equivalence"));
        std::set<std::string> fam_names;
        for (std::size_t k = 0; k < fams.j.size(); ++k) {
            const Node f = Reader::item(fams, k);
            rd.object(f, {"name", "p", "q", "members", "base", "scales"});
            FamilySpec spec;
            const Node fn = rd.required(f, "name");
            spec.name = rd.string(fn);
            if (!fam_names.insert(spec.name).second) {
                rd.fail(fn, "duplicate family name '" + spec.name + "'");
            }
            spec.p = rd.exponent(rd.required(f, "p"));
            spec.q = rd.exponent(rd.required(f, "q"));
            const bool by_members = rd.has(f, "members");
            const bool by_scale = rd.has(f, "base") || rd.has(f, "scales");
            if (by_members == by_scale) {
                rd.fail(f, "give either members or base with scales");
            }
            auto known = [&](const Node& node) {
                const std::string s = rd.string(node);
                if (!names.count(s)) {
                    rd.fail(node, "unknown measure '" + s + "'");
                }
                return s;
            };
            if (by_members) {
                const Node mem = rd.array(Reader::child(f, "members"));
                if (mem.j.empty()) {
                    rd.fail(mem, "family needs at least one member");
                }
                for (std::size_t i = 0; i < mem.j.size(); ++i) {
                    spec.members.push_back(known(Reader::item(mem, i)));
                }
            } else {
                spec.base = known(rd.required(f, "base"));
                const Node sc = rd.array(rd.required(f, "scales"));
                if (sc.j.empty()) {
                    rd.fail(sc, "family needs at least one scale");
                }
                for (std::size_t i = 0; i < sc.j.size(); ++i) {
                    const Node s = Reader::item(sc, i);
                    const double v = rd.number(s);
                    if (!(v > 0.0) || !std::isfinite(v)) {
                        rd.fail(s, "scales must be positive");
                    }
                    spec.scales.push_back(v);
                }
            }
            cfg.families.push_back(std::move(spec));
        }
    }

    if (rd.has(top, "profiles")) {
        const Node p = Reader::child(top, "profiles");
        rd.object(p, {"radius", "step", "t", "delta"});
        cfg.profiles.radius = rd.positive(p, "radius", cfg.profiles.radius);
        cfg.profiles.step = rd.positive(p, "step", cfg.profiles.step);
        cfg.profiles.t = rd.positive(p, "t", cfg.profiles.t);
        cfg.profiles.delta = rd.positive(p, "delta", cfg.profiles.delta);
    }
    return cfg;
}

void validate_config(const ScenarioConfig& cfg)
{
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError(std::string(what) + " must be positive");
        }
    };
    positive(cfg.params.alpha(), "alpha");
    positive(cfg.quad.rel_tol, "tolerances.quadrature");
    positive(cfg.quad.abs_tol, "tolerances.absolute");
    positive(cfg.quad.mc_rel_tol, "tolerances.monte_carlo");
    positive(cfg.estimate_tol, "tolerances.estimate");
    positive(cfg.check_tol, "tolerances.check");
    positive(cfg.reproducing_tol, "tolerances.reproducing");
    if (cfg.workers < 1) {
        throw ConfigError("workers must be at least 1");
    }
    if (cfg.measures.empty() || cfg.exponents.empty()) {
        throw ConfigError("a scenario needs at least one measure and one exponent pair");
    }
}

CarlesonSettings scenario_settings(const ScenarioConfig& cfg)
{
    CarlesonSettings s;
    s.r = cfg.lattice_r;
    s.bound_radius = cfg.bound_radius;
    s.band = cfg.band;
    s.quad = cfg.quad;
    s.quad.rel_tol = std::max(cfg.quad.rel_tol, cfg.estimate_tol);
    return s;
}

bool RunReport::passed() const
{
    for (const auto& c : cases) {
        if (!c.error.empty()) {
            return false;
        }
    }
    for (const auto& f : families) {
        if (!f.error.empty()) {
            return false;
        }
    }
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

RunReport run_scenario(const ScenarioConfig& cfg)
{
    validate_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    const CarlesonSettings settings = scenario_settings(cfg);
    const auto& params = cfg.params;

    RunReport rep;
    for (const auto& m : cfg.measures) {
        for (const auto& [p, q] : cfg.exponents) {
            rep.cases.push_back({m.name, p, q, std::nullopt, ""});
        }
    }
    rep.families.resize(cfg.families.size());
    std::vector<std::vector<SuiteResult>> per_measure(cfg.measures.size());
    std::vector<SuiteResult> global(3);
    std::vector<std::pair<std::string, std::string>> profiles(2 * cfg.measures.size());
    const auto grid = profile_grid(params, cfg.profiles);

    auto find_measure = [&](const std::string& name) -> const MeasureModel& {
        for (const auto& m : cfg.measures) {
            if (m.name == name) {
                return m.measure;
            }
        }
        throw ConfigError("unknown measure '" + name + "'");
    };

    std::vector<std::function<void()>> tasks;
    for (std::size_t k = 0; k < rep.cases.size(); ++k) {
        tasks.emplace_back([&, k] {
            auto& c = rep.cases[k];
            try {
                c.report = classify_toeplitz(params, find_measure(c.measure), c.p, c.q, settings);
            } catch (const std::exception& e) {
                c.error = e.what();
            }
        });
    }
    for (std::size_t k = 0; k < cfg.families.size(); ++k) {
        tasks.emplace_back([&, k] {
            const auto& spec = cfg.families[k];
            auto& out = rep.families[k];
            out.name = spec.name;
            try {
                std::vector<MeasureModel> fam;
                std::vector<std::string> names;
                if (spec.scales.empty()) {
                    for (const auto& m : spec.members) {
                        fam.push_back(find_measure(m));
                        names.push_back(m);
                    }
                } else {
                    for (const double c : spec.scales) {
                        fam.push_back(find_measure(spec.base).scaled(c));
                        names.push_back(spec.base + "*" + fmt(c));
                    }
                }
                out.table = equivalence_suite(params, fam, names, spec.p, spec.q, settings);
            } catch (const std::exception& e) {
                out.error = e.what();
            }
        });
    }
    for (std::size_t k = 0; k < cfg.measures.size(); ++k) {
        tasks.emplace_back([&, k] { per_measure[k] = measure_suites(cfg, cfg.measures[k], k); });
        for (int kind = 0; kind < 2; ++kind) {
            tasks.emplace_back([&, k, kind] {
                const auto& m = cfg.measures[k];
                auto& slot = profiles[2 * k + static_cast<std::size_t>(kind)];
                const bool ber = kind == 0;
                slot.first = std::string(ber ? "berezin_" : "averaging_") + m.name + ".csv";
                try {
                    slot.second = profile_csv(params, m.measure, ber ? ProfileKind::berezin : ProfileKind::averaging,
                                              grid, ber ? cfg.profiles.t : cfg.profiles.delta, cfg.quad);
                } catch (const std::exception& e) {
                    slot.second.clear();
                    slot.first = "!" + std::string(e.what());
                }
            });
        }
    }
    auto global_task = [&](std::size_t k, SuiteResult (*fn)(const ScenarioConfig&), const char* name) {
        tasks.emplace_back([&, k, fn, name] {
            try {
                global[k] = fn(cfg);
            } catch (const std::exception& e) {
                global[k] = {name, "", false, 0.0, e.what()};
            }
        });
    };
    global_task(0, unit_kernel_suite, "unit_kernel_norms");
    global_task(1, reproducing_suite, "reproducing_identity");
    global_task(2, lattice_suite, "lattice_axioms");

    run_pool(tasks, cfg.workers);

    rep.suites = global;
    for (std::size_t k = 0; k < cfg.measures.size(); ++k) {
        rep.suites.insert(rep.suites.end(), per_measure[k].begin(), per_measure[k].end());
        for (int kind = 0; kind < 2; ++kind) {
            const auto& slot = profiles[2 * k + static_cast<std::size_t>(kind)];
            if (!slot.first.empty() && slot.first[0] == '!') {
                rep.suites.push_back({kind == 0 ? "berezin_profile" : "averaging_profile", cfg.measures[k].name, false,
                                      0.0, slot.first.substr(1)});
            }
        }
    }
    for (const auto& c : rep.cases) {
        if (!c.report) {
            continue;
        }
        const auto& r = *c.report;
        SuiteResult s{"classification_invariants", c.measure + " " + pair_text(c.p, c.q), true, 0.0, ""};
        s.passed = (!r.compact || r.bounded) && (!std::isinf(c.p) || std::isinf(c.q) || r.bounded == r.compact);
        rep.suites.push_back(std::move(s));
    }
    for (std::size_t k = 0; k < cfg.families.size(); ++k) {
        const auto& f = rep.families[k];
        if (!f.table) {
            continue;
        }
        rep.suites.push_back({"equivalence_band", f.name, f.table->passes, 0.0, ""});
        if (!cfg.families[k].scales.empty()) {
            SuiteResult s{"scaling_linearity", f.name, true, 0.0, ""};
            for (const auto& [name, range] : f.table->ratio_range) {
                s.max_error = std::max(s.max_error, range.second / range.first - 1.0);
            }
            s.passed = s.max_error <= 1e-6;
            rep.suites.push_back(std::move(s));
        }
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    // Tables.
    std::filesystem::create_directories(cfg.output_dir / "profiles");
    std::ostringstream cls, chain, inv, eq, eqs;
    cls << "measure,p,q,regime,criterion,bounded,compact,norm_proxy,norm_lower_bound,embedding_lower_bound,error\n";
    chain << "measure,p,q,kind,name,value\n";
    for (const auto& c : rep.cases) {
        cls << c.measure << ',' << fmt(c.p) << ',' << fmt(c.q) << ',';
        if (c.report) {
            const auto& r = *c.report;
            cls << r.regime << ',' << criterion_name(r.criterion) << ',' << r.bounded << ',' << r.compact << ','
                << fmt(r.norm_proxy) << ',' << fmt(r.norm_lower_bound) << ',' << fmt(r.embedding_lower_bound) << ",\n";
            for (const auto& [name, v] : r.quantities) {
                chain << c.measure << ',' << fmt(c.p) << ',' << fmt(c.q) << ",quantity," << name << ',' << fmt(v) << '\n';
            }
            for (const auto& [name, v] : r.equivalence_ratios) {
                chain << c.measure << ',' << fmt(c.p) << ',' << fmt(c.q) << ",ratio," << name << ',' << fmt(v) << '\n';
            }
        } else {
            cls << ",,,,,,," << csv_text(c.error) << '\n';
        }
    }
    inv << "suite,subject,passed,max_error,detail\n";
    for (const auto& s : rep.suites) {
        inv << s.suite << ',' << csv_text(s.subject) << ',' << s.passed << ',' << fmt(s.max_error) << ','
            << csv_text(s.detail) << '\n';
    }
    eq << "family,member,included,kind,name,value,note\n";
    eqs << "family,p,q,band,ratio,min,max,passes,error\n";
    for (std::size_t k = 0; k < rep.families.size(); ++k) {
        const auto& f = rep.families[k];
        const auto& spec = cfg.families[k];
        if (!f.table) {
            eqs << f.name << ',' << fmt(spec.p) << ',' << fmt(spec.q) << ',' << fmt(cfg.band) << ",,,,0,"
                << csv_text(f.error) << '\n';
            continue;
        }
        for (const auto& row : f.table->rows) {
            for (const auto& [name, v] : row.quantities) {
                eq << f.name << ',' << csv_text(row.name) << ',' << row.included << ",quantity," << name << ','
                   << fmt(v) << ',' << csv_text(row.note) << '\n';
            }
            for (const auto& [name, v] : row.ratios) {
                eq << f.name << ',' << csv_text(row.name) << ',' << row.included << ",ratio," << name << ','
                   << fmt(v) << ',' << csv_text(row.note) << '\n';
            }
        }
        for (const auto& [name, range] : f.table->ratio_range) {
            eqs << f.name << ',' << fmt(spec.p) << ',' << fmt(spec.q) << ',' << fmt(f.table->band) << ',' << name << ','
                << fmt(range.first) << ',' << fmt(range.second) << ',' << f.table->passes << ",\n";
        }
    }
    write_file(cfg.output_dir / "classification.csv", cls.str());
    write_file(cfg.output_dir / "chain.csv", chain.str());
    write_file(cfg.output_dir / "invariants.csv", inv.str());
    write_file(cfg.output_dir / "equivalence.csv", eq.str());
    write_file(cfg.output_dir / "equivalence_summary.csv", eqs.str());
    for (const auto& [name, text] : profiles) {
        if (!name.empty() && name[0] != '!') {
            write_file(cfg.output_dir / "profiles" / name, text);
        }
    }

    std::ostringstream txt;
    txt << "alpha = " << fmt(params.alpha()) << "\nn = " << params.n() << "\nseed = " << cfg.seed
        << "\nworkers = " << cfg.workers << "\nmeasures = " << cfg.measures.size()
        << "\ncombinations = " << rep.cases.size() << "\nsuites = " << rep.suites.size();
    std::size_t failed = 0;
    for (const auto& s : rep.suites) {
        failed += !s.passed;
    }
    std::size_t errors = 0;
    for (const auto& c : rep.cases) {
        errors += !c.error.empty();
    }
    txt << "\nsuites_failed = " << failed << "\ncase_errors = " << errors
        << "\npassed = " << (rep.passed() ? "true" : "false") << "\nseconds = " << rep.seconds << '\n';
    for (const auto& c : rep.cases) {
        txt << "\n[" << c.measure << ' ' << pair_text(c.p, c.q) << "]\n";
        if (!c.report) {
            txt << "error = " << c.error << '\n';
            continue;
        }
        const auto& r = *c.report;
        txt << "regime = " << r.regime << "\ncriterion = " << criterion_name(r.criterion)
            << "\nbounded = " << (r.bounded ? "true" : "false") << "\ncompact = " << (r.compact ? "true" : "false")
            << "\nnorm_proxy = " << fmt(r.norm_proxy) << "\nnorm_lower_bound = " << fmt(r.norm_lower_bound)
            << "\nembedding_lower_bound = " << fmt(r.embedding_lower_bound) << '\n';
    }
    write_file(cfg.output_dir / "report.txt", txt.str());
    return rep;
}

std::vector<CPoint> profile_grid(const FockParams& params, const ProfileSpec& spec)
{
    const auto plane = disc_grid_samples(spec.radius, spec.step);
    if (params.n() == 1) {
        return plane;
    }
    std::vector<CPoint> out;
    out.reserve(plane.size());
    for (const auto& z : plane) {
        out.push_back(first_axis(params.n(), z[0]));
    }
    return out;
}

void emit_profiles(const FockParams& params, const MeasureModel& mu, ProfileKind kind,
                   const std::vector<CPoint>& grid, double parameter, std::ostream& out,
                   const QuadratureOptions& opts)
{
    require_dim(params, mu);
    if (grid.empty()) {
        throw PreconditionError("profile grid is empty");
    }
    const int n = params.n();
    if (n == 1) {
        out << "re,im,value\n";
    } else {
        for (int j = 1; j <= n; ++j) {
            out << "re_" << j << ",im_" << j << ',';
        }
        out << "value\n";
    }
    for (const auto& z : grid) {
        if (z.dim() != n) {
            throw DimensionMismatch("profile point dimension differs from n");
        }
        const double v = kind == ProfileKind::berezin ? berezin(params, mu, parameter, z, opts)
                                                      : ball_mass(params, mu, z, parameter, opts);
        for (int j = 0; j < n; ++j) {
            out << fmt(z[j].real()) << ',' << fmt(z[j].imag()) << ',';
        }
        out << fmt(v) << '\n';
    }
}

void emit_profiles(const FockParams& params, const MeasureModel& mu, ProfileKind kind,
                   const std::vector<CPoint>& grid, double parameter, const std::filesystem::path& out,
                   const QuadratureOptions& opts)
{
    std::ostringstream os;
    emit_profiles(params, mu, kind, grid, parameter, os, opts);
    write_file(out, os.str());
}

} // namespace fock
