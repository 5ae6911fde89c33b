#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sl2b/sl2b.hpp"

using namespace sl2b;
using nlohmann::json;

namespace {

struct RunConfig {
    int q = 3;
    int max_depth = -1;
    double tol = 1e-6;
    int threads = 0;
    double cap = 2e7;
    bool json_out = false;
    bool csv_out = false;
    std::string out;
    bool strict = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const RunConfig& c, const std::string& text)
{
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw UsageError("cannot open --out file " + c.out);
    f << text;
}

BudgetConfig budget(const RunConfig& c) { return {c.cap, c.tol}; }

int parse_half(const std::string& s)
{
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return 2 * std::stoi(s);
        if (s.substr(slash + 1) != "2") throw UsageError("--r must be k or k/2");
        return std::stoi(s.substr(0, slash));
    } catch (const std::logic_error&) {
        throw UsageError("--r must be k or k/2, got " + s);
    }
}

const CuspidalChar& find_sigma(const std::vector<CuspidalChar>& cusp, const std::string& omega)
{
    if (omega == "plus" || omega == "minus") {
        for (const auto& c : cusp)
            if (c.kind == (omega == "plus" ? CuspidalKind::SplitPlus : CuspidalKind::SplitMinus)) return c;
    }
    for (const auto& c : cusp)
        if (c.label == omega) return c;
    int j = 0;
    try {
        j = std::stoi(omega);
    } catch (const std::logic_error&) {
        throw UsageError("--omega must be an index, plus or minus");
    }
    for (const auto& c : cusp)
        if (c.kind == CuspidalKind::DL)
            for (int w : c.omegas)
                if (w == j) return c;
    throw UsageError("--omega " + omega + " does not give an irreducible cuspidal (use plus/minus for the quadratic character)");
}

struct Session {
    RunConfig c;
    FieldConfig K;
    std::shared_ptr<const SL2FqTable> T;
    std::vector<CuspidalChar> cusp;

    explicit Session(const RunConfig& rc) : c(rc), K(check_q(rc.q)) {}
    static int check_q(int q)
    {
        if (q < 3 || q % 2 == 0) throw UsageError("--q must be an odd prime power");
        return q;
    }
    const std::vector<CuspidalChar>& cuspidals()
    {
        if (!T) {
            T = std::make_shared<const SL2FqTable>(K.q());
            cusp = cuspidal_characters(*T, c.tol);
        }
        return cusp;
    }
    BranchingTable depth_zero(const std::string& omega, int vertex, int D)
    {
        const auto& s = find_sigma(cuspidals(), omega);
        return depth_zero_components(K, T, s, vertex, D, budget(c));
    }
    YuDatum datum(const std::string& torus, int r2, int phi, int gamma)
    {
        TorusDescriptor Td;
        try {
            Td = torus_by_id(K, torus);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        auto data = yu_data(K, Td, r2, gamma);
        if (phi < 0 || phi >= int(data.size()))
            throw UsageError("--phi out of range: " + std::to_string(data.size()) + " characters of this depth");
        return data[phi];
    }
    BranchingTable from_json(const json& j, int D)
    {
        const json& d = j.contains("datum") ? j["datum"] : j;
        if (d.contains("torus"))
            return positive_depth_components(datum(d["torus"], parse_half(d["r"].get<std::string>()), d.value("phi", 0),
                                                   d.value("gamma", 0)),
                                             D, budget(c));
        if (d.contains("sigma") || d.contains("omega")) {
            std::string om = d.contains("sigma") ? d["sigma"].get<std::string>()
                                                 : (d["omega"].is_string() ? d["omega"].get<std::string>()
                                                                            : std::to_string(d["omega"].get<int>()));
            return depth_zero(om, d.value("vertex", 0), D);
        }
        throw UsageError("datum file needs torus/r/phi or sigma/vertex");
    }
};

std::string render(const RunConfig& c, const BranchingTable& t)
{
    if (c.csv_out) return t.to_csv();
    return t.to_json().dump(2) + "\n";
}

int table_exit(const RunConfig& c, const std::vector<BranchingTable>& tabs)
{
    for (const auto& t : tabs)
        if (c.strict && t.budget_skipped()) return 4;
    return 0;
}

json chars_json(const SL2FqTable& T, const std::vector<CuspidalChar>& cusp)
{
    json j{{"q", T.K.q()}, {"classes", json::array()}, {"characters", json::array()}};
    for (const auto& k : T.classes) j["classes"].push_back({{"label", k.label}, {"size", k.size}});
    for (const auto& c : cusp) {
        json vals = json::array();
        for (auto v : c.values) vals.push_back({v.real(), v.imag()});
        j["characters"].push_back({{"label", c.label}, {"degree", c.degree}, {"central_sign", c.central_sign}, {"values", vals}});
    }
    return j;
}

std::string fmt(cplx v)
{
    std::ostringstream os;
    double re = std::abs(v.real()) < 1e-9 ? 0.0 : v.real(), im = std::abs(v.imag()) < 1e-9 ? 0.0 : v.imag();
    os.precision(6);
    os << re;
    if (im != 0) os << (im > 0 ? "+" : "") << im << "i";
    return os.str();
}

int cmd_chars(Session& s)
{
    const auto& cusp = s.cuspidals();
    const auto& T = *s.T;
    if (s.c.json_out) {
        emit(s.c, chars_json(T, cusp).dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    os << "class,size";
    for (const auto& c : cusp) os << ',' << c.label;
    os << '\n';
    for (size_t k = 0; k < T.classes.size(); ++k) {
        os << T.classes[k].label << ',' << T.classes[k].size;
        for (const auto& c : cusp) os << ',' << fmt(c.values[k]);
        os << '\n';
    }
    double worst = 0;
    for (size_t i = 0; i < cusp.size(); ++i)
        for (size_t j = 0; j < cusp.size(); ++j)
            worst = std::max(worst, std::abs(T.inner(cusp[i].values, cusp[j].values) - (i == j ? 1.0 : 0.0)));
    os << "# orthogonality: max deviation " << worst << (worst < s.c.tol ? " (ok)" : " (violated)") << '\n';
    emit(s.c, os.str());
    return worst < s.c.tol ? 0 : 3;
}

int cmd_intertwine(Session& s, const std::vector<std::string>& files)
{
    if (files.empty()) throw UsageError("intertwine needs at least one --datum FILE");
    int D = s.c.max_depth < 0 ? 2 : s.c.max_depth;
    std::vector<BranchingTable> tabs;
    json labels = json::array();
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) throw UsageError("cannot read datum file " + f);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError(f + ": " + e.what());
        }
        tabs.push_back(s.from_json(j, D));
        labels.push_back(tabs.back().datum);
    }
    auto M = intertwining_matrix(tabs, s.c.tol);
    auto rep = exhaustiveness(tabs, s.K.minus_one_is_square(), s.c.tol);
    json coincidences = json::array();
    for (const auto& p : rep.pairs) {
        if (p.ta == p.tb && p.ra == p.rb) continue;
        if (p.multiplicity == 0 && p.predicted != Prediction::Yes) continue;
        coincidences.push_back({{"a", {p.ta, p.ra}},
                                {"b", {p.tb, p.rb}},
                                {"d", p.d},
                                {"multiplicity", p.multiplicity},
                                {"predicted", prediction_name(p.predicted)}});
    }
    json out{{"q", s.K.q()},
             {"cutoff", D},
             {"data", labels},
             {"matrix", M},
             {"coincidences", coincidences},
             {"mismatches", rep.mismatches},
             {"outside_observed", rep.outside_observed}};
    emit(s.c, out.dump(2) + "\n");
    if (!rep.ok()) return 3;
    return table_exit(s.c, tabs);
}

struct Check {
    std::string name;
    bool ok;
    std::string detail;
};

int cmd_verify(Session& s, const std::string& filter)
{
    int q = s.K.q();
    int D = s.c.max_depth < 0 ? 2 : s.c.max_depth;
    std::vector<Check> checks;
    auto attempt = [&](const std::string& name, const std::function<std::string()>& f) {
        if (name.find(filter) == std::string::npos) return;
        try {
            checks.push_back({name, true, f()});
        } catch (const std::exception& e) {
            checks.push_back({name, false, e.what()});
        }
        std::printf("%-28s %s %s\n", checks.back().name.c_str(), checks.back().ok ? "PASS" : "FAIL", checks.back().detail.c_str());
        std::fflush(stdout);
    };
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw std::runtime_error(what);
    };
    attempt("fqchars.orthogonality", [&] {
        const auto& cusp = s.cuspidals();
        for (size_t i = 0; i < s.T->chars.size(); ++i)
            for (size_t j = 0; j < s.T->chars.size(); ++j)
                need(std::abs(s.T->inner(s.T->chars[i], s.T->chars[j]) - (i == j ? 1.0 : 0.0)) < s.c.tol, "row orthogonality");
        return std::to_string(cusp.size()) + " cuspidals";
    });
    attempt("shalika.theorem", [&] {
        size_t n = 0;
        for (int d = 1; d <= std::min(D, 2); ++d) {
            auto ctx = shalika_context(s.K, d, -s.K.pi_pow(-d), LocalElem::zero(s.K.F));
            auto data = shalika_data(ctx);
            for (size_t i = 0; i < data.size() && i < 3; ++i, ++n) {
                auto chi = shalika_character(data[i]);
                need(intertwining(*chi, *chi, s.c.tol) == 1, "norm");
                need(depth_of(*chi, s.c.tol) == d, "depth");
                need(std::abs(chi->degree() - double(shalika_degree(q, d))) < s.c.tol, "degree");
            }
        }
        return std::to_string(n) + " data";
    });
    attempt("depth-zero.lemma", [&] {
        size_t n = 0;
        for (int d = 1; d <= std::min(D, 2); ++d)
            for (int j1 = 1; j1 <= q; ++j1)
                for (int j2 = 1; j2 <= q; ++j2, ++n) {
                    bool same = j1 % 2 == j2 % 2;
                    auto a = dl_character(*s.T, j1), b = dl_character(*s.T, j2);
                    need(bk_intertwining(s.K, s.T, a, b, d, false) == (same ? 2 : 0), "BK_d inner product");
                    if (!same) need(bk_intertwining(s.K, s.T, a, b, d, true) == 2, "tau twist");
                }
        return std::to_string(n) + " pairs";
    });
    std::vector<BranchingTable> grid;
    attempt("depth-zero.branching", [&] {
        for (const auto& c : s.cuspidals())
            for (int v : {0, 1}) {
                grid.push_back(depth_zero_components(s.K, s.T, c, v, D, budget(s.c)));
                need(!s.c.strict || grid.back().all_certified(), c.label + " has unverified rows");
            }
        return std::to_string(grid.size()) + " tables";
    });
    attempt("positive-depth.branching", [&] {
        size_t n = 0;
        for (const auto& Td : torus_classes(s.K))
            for (int r2 : {1, 2}) {
                if ((r2 % 2 == 1) != Td.ramified || r2 > 2 * D) continue;
                for (const auto& Y : yu_data(s.K, Td, r2)) {
                    grid.push_back(positive_depth_components(Y, D, budget(s.c)));
                    need(!s.c.strict || grid.back().all_certified(), Y.describe() + " has unverified rows");
                    ++n;
                }
            }
        return std::to_string(n) + " data";
    });
    attempt("intertwining.exhaustiveness", [&] {
        auto rep = exhaustiveness(grid, s.K.minus_one_is_square(), s.c.tol);
        need(rep.diagonal_failures == 0, "diagonal multiplicity");
        need(rep.mismatches == 0, std::to_string(rep.mismatches) + " coincidences differ from prediction");
        return std::to_string(rep.pairs.size()) + " pairs, " + std::to_string(rep.outside_observed) + " outside";
    });
    int bad = 0;
    for (const auto& c : checks) bad += !c.ok;
    std::printf("%zu of %zu checks passed\n", checks.size() - bad, checks.size());
    return bad ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Branching rules for restrictions of SL2 supercuspidals to the maximal compact subgroup"};
    app.require_subcommand(1);
    RunConfig c;
    app.add_option("--q", c.q, "residue field order (odd)");
    app.add_option("--max-depth", c.max_depth, "depth cutoff D")->check(CLI::NonNegativeNumber);
    app.add_option("--tol", c.tol, "integrality tolerance")->check(CLI::Range(1e-15, 1e-3));
    app.add_option("--threads", c.threads, "worker threads (overrides SL2B_THREADS)")->check(CLI::NonNegativeNumber);
    app.add_option("--cap", c.cap, "largest |K/K_N| attempted")->check(CLI::PositiveNumber);
    auto* fj = app.add_flag("--json", c.json_out, "JSON output");
    auto* fc = app.add_flag("--csv", c.csv_out, "CSV output");
    fj->excludes(fc);
    app.add_option("--out", c.out, "output file");
    app.add_flag("--strict", c.strict, "treat budget-skipped rows as failure");
    app.fallthrough();

    auto* table = app.add_subcommand("table", "branching table");
    table->require_subcommand(1);
    auto* dz = table->add_subcommand("depth-zero", "depth-zero supercuspidal");
    std::string omega;
    int vertex = -1;
    dz->add_option("--omega", omega, "norm-one character index, or plus/minus")->required();
    dz->add_option("--vertex", vertex, "vertex 0 or 1")->required()->check(CLI::IsMember({0, 1}));
    auto* pos = table->add_subcommand("positive", "positive-depth supercuspidal");
    std::string torus, r = "1";
    int phi = 0, gamma = 0;
    pos->add_option("--torus", torus, "torus id")->required();
    pos->add_option("--r", r, "depth as k or k/2");
    pos->add_option("--phi", phi, "index into the characters of depth r");
    pos->add_option("--gamma", gamma, "index of the generic element");
    auto* inter = app.add_subcommand("intertwine", "Hom-dimension matrix");
    std::vector<std::string> datums;
    inter->add_option("--datum", datums, "datum JSON file (repeatable)")->required();
    auto* chars = app.add_subcommand("chars", "character data");
    chars->require_subcommand(1);
    auto* sl2fq = chars->add_subcommand("sl2fq", "cuspidal table of SL2(F_q)");
    auto* verify = app.add_subcommand("verify", "verification checks");
    verify->require_subcommand(1);
    auto* suite = verify->add_subcommand("suite", "run the verification suite");
    std::string filter;
    suite->add_option("--filter", filter, "run only checks whose name contains this string");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (c.threads > 0) set_thread_count(c.threads);
        Session s(c);
        if (dz->parsed()) {
            int D = c.max_depth < 0 ? 2 : c.max_depth;
            auto t = s.depth_zero(omega, vertex, D);
            emit(c, render(c, t));
            return table_exit(c, {t});
        }
        if (pos->parsed()) {
            int r2 = parse_half(r);
            int D = c.max_depth < 0 ? (r2 + 1) / 2 + 1 : c.max_depth;
            if (2 * D < r2) throw UsageError("--max-depth must be at least r");
            auto t = positive_depth_components(s.datum(torus, r2, phi, gamma), D, budget(c));
            emit(c, render(c, t));
            return table_exit(c, {t});
        }
        if (inter->parsed()) return cmd_intertwine(s, datums);
        if (sl2fq->parsed()) return cmd_chars(s);
        if (suite->parsed()) return cmd_verify(s, filter);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CertificationError& e) {
        std::cerr << "certification failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
