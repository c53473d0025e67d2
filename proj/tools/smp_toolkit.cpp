// Command-line front end: load subequation specs, run the analyses, and emit
// tables, verdict JSON, and witness bundles with reproducible seeds.
//
// Exit codes: 0 success, 2 input error, 3 precondition refusal, 4 internal
// numerical failure.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smp/toolkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240801u;

std::uint64_t env_seed() {
    if (const char* s = std::getenv("SMP_TOOLKIT_SEED")) {
        try {
            return std::stoull(s);
        } catch (...) {
            throw smp::input_error("SMP_TOOLKIT_SEED is not an integer");
        }
    }
    return kDefaultSeed;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, sep)) out.push_back(tok);
    return out;
}

// tags like "linear", "linear:2", "power:1:0.5", "log-linear:3.6:0.5"
smp::FFunction parse_ffunction(const std::string& tag) {
    const auto parts = split(tag, ':');
    const std::string& k = parts[0];
    auto arg = [&](std::size_t i, double dflt) {
        return parts.size() > i ? std::stod(parts[i]) : dflt;
    };
    if (k == "sqrt") return smp::FFunction::sqrt_fn();
    if (k == "linear") return smp::FFunction::linear(arg(1, 1.0));
    if (k == "zero") return smp::FFunction::zero();
    if (k == "power") return smp::FFunction::power(arg(1, 1.0), arg(2, 0.5));
    if (k == "pow-lin") return smp::FFunction::pow_lin(arg(1, 1.0), arg(2, 2.0), arg(3, 1.0));
    if (k == "log-linear") return smp::FFunction::log_linear(arg(1, 3.0), arg(2, 0.5));
    throw smp::input_error("unknown f tag '" + tag + "'");
}

smp::GFunction parse_gfunction(const std::string& tag) {
    const auto parts = split(tag, ':');
    const std::string& k = parts[0];
    auto arg = [&](std::size_t i, double dflt) {
        return parts.size() > i ? std::stod(parts[i]) : dflt;
    };
    if (k == "neg-sqrt") return smp::GFunction::neg_sqrt();
    if (k == "neg-linear") return smp::GFunction::neg_linear(arg(1, 1.0));
    if (k == "neg-power") return smp::GFunction::neg_power(arg(1, 1.0), arg(2, 2.0));
    if (k == "neg-ratio") return smp::GFunction::neg_ratio();
    if (k == "log-inverse") return smp::GFunction::log_inverse(arg(1, 2.0), arg(2, 0.5));
    throw smp::input_error("unknown g tag '" + tag + "'");
}

struct SpecFlags {
    std::string kind;
    std::string spec_file;
    int dim = 3;
    double alpha = 1.0, lam0 = 1.0, Lam = 1.0, delta = 1.0, a = 1.0, c = 0.0;
    int k = 1;
    std::string f_tag, g_tag;
    bool dual = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--kind", kind,
                        "catalog tag: pos|subaffine|minmax-cone|pucci|p-delta|sigma-psi-k|"
                        "minmax-f|min2-f|mg|halfspace|trace-zero|first-diag");
        cmd->add_option("--spec", spec_file, "spec JSON file (alternative to --kind)");
        cmd->add_option("--dim", dim, "matrix dimension n")->check(CLI::PositiveNumber);
        cmd->add_option("--alpha", alpha, "minmax-cone parameter");
        cmd->add_option("--lam0", lam0, "pucci lower weight");
        cmd->add_option("--Lam", Lam, "pucci upper weight");
        cmd->add_option("--delta", delta, "p-delta parameter");
        cmd->add_option("--a", a, "sigma-psi-k exponent");
        cmd->add_option("--k", k, "sigma-psi-k depth");
        cmd->add_option("--c", c, "halfspace level");
        cmd->add_option("--f", f_tag, "scalar f tag (minmax-f / min2-f)");
        cmd->add_option("--g", g_tag, "scalar g tag (mg)");
        cmd->add_flag("--dual", dual, "analyze the Dirichlet dual of the spec");
    }

    smp::SubequationSpec build() const {
        if (!spec_file.empty()) {
            std::ifstream is(spec_file);
            if (!is) throw smp::input_error("cannot open spec file " + spec_file);
            json j = json::parse(is);
            auto s = smp::SubequationSpec::from_json(j);
            return dual ? smp::SubequationSpec::dual_of(s) : s;
        }
        if (kind.empty()) throw smp::input_error("need --kind or --spec");
        auto base = [&]() -> smp::SubequationSpec {
            using S = smp::SubequationSpec;
            if (kind == "pos") return S::pos(dim);
            if (kind == "subaffine") return S::subaffine(dim);
            if (kind == "minmax-cone") return S::minmax_cone(alpha, dim);
            if (kind == "pucci") return S::pucci(lam0, Lam, dim);
            if (kind == "p-delta") return S::p_delta(delta, dim);
            if (kind == "sigma-psi-k") return S::sigma_psi_k(a, k, dim);
            if (kind == "minmax-f") return S::minmax_f(parse_ffunction(f_tag), dim);
            if (kind == "min2-f") return S::min_two_f(parse_ffunction(f_tag), dim);
            if (kind == "mg") return S::mg(parse_gfunction(g_tag), dim);
            if (kind == "halfspace") return S::halfspace(c, dim);
            if (kind == "trace-zero") return S::trace_zero_fixture(dim);
            if (kind == "first-diag") return S::first_diag_fixture(dim);
            throw smp::input_error("unknown spec kind '" + kind + "'");
        }();
        return dual ? smp::SubequationSpec::dual_of(base) : base;
    }
};

std::string timestamp() {
    char buf[32];
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const json& j, const std::optional<fs::path>& out, const std::string& name) {
    std::cout << j.dump(2) << "\n";
    if (out) {
        fs::create_directories(*out);
        std::ofstream os(*out / name);
        os << j.dump(2) << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"subequation analyzer: characteristic functions, strong maximum principle "
                 "verdicts, radial counterexamples, strong comparison reports"};
    app.require_subcommand(1);

    std::uint64_t seed = env_seed();
    app.add_option("--seed", seed, "RNG seed (also via SMP_TOOLKIT_SEED)")->capture_default_str();
    std::string out_dir;
    app.add_option("--out", out_dir, "output directory for files (default: stdout only)");

    // classify ---------------------------------------------------------------
    auto* c_classify = app.add_subcommand("classify", "three-case classification of a spec");
    SpecFlags cf;
    cf.attach(c_classify);

    // charfn -----------------------------------------------------------------
    auto* c_charfn = app.add_subcommand("charfn", "characteristic function table (CSV + meta)");
    SpecFlags hf;
    hf.attach(c_charfn);
    std::string side = "upper";
    double grid_min = 1e-8, grid_max = 10.0, mu_cap = 1e12, tol = 1e-10;
    int grid_points = 200, e_samples = 64;
    bool refine = false;
    c_charfn->add_option("--side", side, "upper|lower")->check(CLI::IsMember({"upper", "lower"}));
    c_charfn->add_option("--grid-min", grid_min, "smallest positive lambda");
    c_charfn->add_option("--grid-max", grid_max, "largest lambda");
    c_charfn->add_option("--grid-points", grid_points, "geometric grid size");
    c_charfn->add_option("--e-samples", e_samples, "random directions for non-invariant specs");
    c_charfn->add_option("--mu-cap", mu_cap, "mu at which the scan reports +inf");
    c_charfn->add_option("--tol", tol, "bisection tolerance in mu");
    c_charfn->add_flag("--refine", refine, "hill-climb the best direction");

    // smp --------------------------------------------------------------------
    auto* c_smp = app.add_subcommand("smp", "strong maximum principle verdict with rationale");
    SpecFlags sf;
    sf.attach(c_smp);

    // cone -------------------------------------------------------------------
    auto* c_cone = app.add_subcommand("cone", "cone invariants alpha, alpha*, Riesz p");
    SpecFlags nf;
    nf.attach(c_cone);

    // counterexample ----------------------------------------------------------
    auto* c_ctr = app.add_subcommand(
        "counterexample", "build the plateaued radial profile (or the exponential barrier)");
    std::string ctr_f = "sqrt";
    double ctr_m = 0.0, ctr_y0 = 1.0, ctr_beta = 10.0, ctr_R = 1.0, quad_tol = 1e-10;
    int ctr_points = 4096;
    c_ctr->add_option("--f", ctr_f, "characteristic tag (sqrt|linear|power:...|hopf)");
    c_ctr->add_option("--m", ctr_m, "plateau value");
    c_ctr->add_option("--y0", ctr_y0, "transport endpoint");
    c_ctr->add_option("--beta", ctr_beta, "hopf: exponent");
    c_ctr->add_option("--R", ctr_R, "hopf: zero radius");
    c_ctr->add_option("--points", ctr_points, "profile grid points");
    c_ctr->add_option("--quad-tol", quad_tol, "quadrature tolerance");

    // scp --------------------------------------------------------------------
    auto* c_scp = app.add_subcommand("scp", "strong comparison report for M(g)");
    std::string scp_g = "neg-linear:1";
    int scp_n = 2;
    c_scp->add_option("--g", scp_g, "g tag (neg-sqrt|neg-linear:d|neg-power:c:p|log-inverse:a:hi|neg-ratio)");
    c_scp->add_option("--dim", scp_n, "matrix dimension n")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::optional<fs::path> out =
        out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir);

    try {
        if (c_classify->parsed()) {
            const auto spec = cf.build();
            smp::ClassifyOptions o;
            o.seed = seed;
            json j = smp::classify(spec, o).to_json();
            j["spec"] = spec.id();
            j["seed"] = seed;
            j["generated_at"] = timestamp();
            emit(j, out, "classify.json");
        } else if (c_charfn->parsed()) {
            const auto spec = hf.build();
            smp::CharFnOptions o;
            o.e_samples = e_samples;
            o.mu_cap = mu_cap;
            o.tol = tol;
            o.seed = seed;
            o.refine = refine;
            const auto grid = smp::default_lambda_grid(grid_min, grid_max, grid_points);
            const auto tab =
                smp::char_fn(spec, side == "upper" ? smp::Side::Upper : smp::Side::Lower, grid, o);
            if (out) {
                fs::create_directories(*out);
                std::ofstream cs(*out / "charfn.csv");
                tab.to_csv(cs);
                json meta = tab.meta_json();
                meta["generated_at"] = timestamp();
                std::ofstream ms(*out / "charfn.meta.json");
                ms << meta.dump(2) << "\n";
                json j{{"csv", (*out / "charfn.csv").string()},
                       {"meta", (*out / "charfn.meta.json").string()},
                       {"points", tab.lambdas.size()}};
                std::cout << j.dump(2) << "\n";
            } else {
                tab.to_csv(std::cout);
            }
        } else if (c_smp->parsed()) {
            const auto spec = sf.build();
            smp::SmpOptions o;
            o.char_opts.seed = seed;
            o.classify_opts.seed = seed;
            json j = smp::smp_verdict(spec, o).to_json();
            j["spec"] = spec.id();
            j["seed"] = seed;
            j["generated_at"] = timestamp();
            emit(j, out, "smp.json");
        } else if (c_cone->parsed()) {
            const auto spec = nf.build();
            json j = smp::cone_invariants(spec, 32, seed).to_json();
            j["spec"] = spec.id();
            j["seed"] = seed;
            j["generated_at"] = timestamp();
            emit(j, out, "cone.json");
        } else if (c_ctr->parsed()) {
            const fs::path dir = out.value_or(fs::path("."));
            if (ctr_f == "hopf") {
                const auto rf = smp::hopf_function(ctr_beta, ctr_R, 1e-2, -1.0, ctr_points);
                const auto res = smp::radial_residual(smp::hopf_residual_fn(ctr_beta), rf);
                double max_abs = 0.0;
                for (double r : res.residual) max_abs = std::max(max_abs, std::abs(r));
                fs::create_directories(dir);
                std::ofstream os(dir / "psi.csv");
                rf.to_csv(os);
                json meta{{"kind", "hopf"},      {"beta", ctr_beta},
                          {"R", ctr_R},          {"points", ctr_points},
                          {"max_residual", max_abs}, {"generated_at", timestamp()}};
                std::ofstream ms(dir / "meta.json");
                ms << meta.dump(2) << "\n";
                json j{{"kind", "hopf"},
                       {"max_residual", max_abs},
                       {"psi_csv", (dir / "psi.csv").string()},
                       {"increasing_from_zero", rf.psi1.front() > 0.0}};
                std::cout << j.dump(2) << "\n";
            } else {
                const auto f = parse_ffunction(ctr_f);
                const auto rec = smp::build_counterexample(f, ctr_m, quad_tol, ctr_y0, ctr_points);
                rec.emit_bundle(dir);
                const auto res = smp::radial_residual(smp::CharEval(rec.f), rec.psi);
                double max_abs = 0.0;
                for (double r : res.residual) max_abs = std::max(max_abs, std::abs(r));
                const auto mono =
                    smp::verify_monotone_radial(smp::CharEval(rec.f), rec.psi, smp::Direction::Up, 1e-9);
                json j{{"f", rec.f.name()},
                       {"y0", rec.y0},
                       {"s0", rec.s0},
                       {"t0", rec.t0},
                       {"m", rec.m},
                       {"max_residual", max_abs},
                       {"monotone_up", mono.ok()},
                       {"smp_witness", smp::smp_witness_check(rec.psi)},
                       {"bundle", dir.string()}};
                std::cout << j.dump(2) << "\n";
            }
        } else if (c_scp->parsed()) {
            const auto g = parse_gfunction(scp_g);
            smp::ScpOptions o;
            o.seed = seed;
            o.classify_opts.seed = seed;
            json j = smp::scp_report(g, scp_n, o).to_json();
            j["seed"] = seed;
            j["generated_at"] = timestamp();
            emit(j, out, "scp.json");
        }
    } catch (const smp::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const smp::construction_refusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        std::cerr << e.verdict.to_json().dump(2) << "\n";
        return 3;
    } catch (const smp::precondition_error& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
