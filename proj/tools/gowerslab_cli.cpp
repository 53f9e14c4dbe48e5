#include <CLI11.hpp>

#include "gowerslab/arith.hpp"
#include "gowerslab/characters.hpp"
#include "gowerslab/decomp.hpp"
#include "gowerslab/errors.hpp"
#include "gowerslab/gowers.hpp"
#include "gowerslab/linsys.hpp"
#include "gowerslab/models.hpp"
#include "gowerslab/parallel.hpp"
#include "gowerslab/signal.hpp"
#include "gowerslab/version.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace gowerslab;

struct CommonOpts {
    std::string out;
    std::string config;
    int workers = 0;
    std::uint64_t seed = 1;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* config_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--out", c.out, "output path prefix (<out>.csv, <out>.manifest)")->required();
    c.workers_opt = cmd->add_option("--workers", c.workers,
                                    "worker threads (default: GOWERS_LAB_THREADS env, else 1)");
    cmd->add_option("--seed", c.seed, "sample sequence offset for quasirandom volume estimates");
    c.config_opt = cmd->add_option("--config", c.config, "key=value parameter file (keys N Q w z W b)");
}

void apply_workers(const CommonOpts& c) {
    if (c.workers_opt != nullptr && c.workers_opt->count() > 0) set_worker_count(c.workers);
}

bool have_config(const CommonOpts& c) {
    return c.config_opt != nullptr && c.config_opt->count() > 0;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// sorted key=value echo of every resolved parameter, plus library identity;
// worker count is excluded so reruns at any parallelism match byte for byte
void write_manifest(const std::string& out, const std::string& command,
                    std::map<std::string, std::string> kv) {
    kv["command"] = command;
    kv["library"] = std::string(k_library_name);
    kv["version"] = std::string(k_library_version);
    std::ofstream f(out + ".manifest");
    if (!f) throw std::runtime_error("cannot open manifest file " + out + ".manifest");
    for (const auto& [k, v] : kv) f << k << "=" << v << "\n";
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << content;
}

ArithSignal named_signal(const std::string& name, std::int64_t N, double z) {
    if (name == "one") return ones_signal(Domain::interval, N);
    if (name == "cramer") return cramer(z, N);
    FactorTable table = FactorTable::build(static_cast<std::uint64_t>(N));
    if (name == "mu") return mu_signal(table, N);
    if (name == "lambda") return lambda_signal(table, N);
    if (name == "lambda-prime") return lambda_signal(table, N, true);
    throw std::invalid_argument("unknown function name for --f: " + name);
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const resource_error& e) {
        std::fprintf(stderr, "resource error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid parameter: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "invalid parameter: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gowerslab: uniformity norms, prime models, and linear-system counts"};
    app.require_subcommand(1);
    std::function<void()> action;

    // norm: uniformity norm of a named arithmetic function over [N]
    auto* norm_cmd = app.add_subcommand("norm", "Gowers norm of a named function on an interval");
    static CommonOpts norm_common;
    static std::string norm_f = "one";
    static std::int64_t norm_N = 0;
    static int norm_k = 2;
    static double norm_z = 2.0;
    norm_cmd->add_option("--f", norm_f, "function: one|mu|lambda|lambda-prime|cramer")->required();
    auto* norm_N_opt = norm_cmd->add_option("--N", norm_N, "interval length");
    norm_cmd->add_option("--k", norm_k, "norm order k >= 1");
    auto* norm_z_opt = norm_cmd->add_option("--z", norm_z, "sieve cutoff for the cramer weight");
    add_common(norm_cmd, norm_common);
    norm_cmd->callback([&]() {
        action = [&]() {
            apply_workers(norm_common);
            if (have_config(norm_common)) {
                GlobalParams gp = GlobalParams::from_file(norm_common.config);
                if (norm_N_opt->count() == 0) norm_N = static_cast<std::int64_t>(gp.N);
                if (norm_z_opt->count() == 0) norm_z = gp.z;
            }
            if (norm_N < 1) throw std::invalid_argument("norm: --N must be a positive integer");
            ArithSignal f = named_signal(norm_f, norm_N, norm_z);
            NormResult r = norm_interval(f, norm_k);
            std::ostringstream csv;
            csv << "function,N,k,value\n"
                << norm_f << "," << norm_N << "," << norm_k << "," << fmt12(r.value) << "\n";
            write_text(norm_common.out + ".csv", csv.str());
            std::map<std::string, std::string> kv{{"f", norm_f},
                                                  {"N", std::to_string(norm_N)},
                                                  {"k", std::to_string(norm_k)}};
            if (norm_f == "cramer") kv["z"] = fmt_double(norm_z);
            write_manifest(norm_common.out, "norm", std::move(kv));
        };
    });

    // char-norm: Gowers norm of a real character over a full period
    auto* chn_cmd = app.add_subcommand("char-norm", "Gowers norm of a real Dirichlet character");
    static CommonOpts chn_common;
    static std::int64_t chn_q = 0;
    static int chn_k = 2;
    static std::uint64_t chn_budget = 4000000000ull;
    chn_cmd->add_option("--q", chn_q, "modulus (admissible real-character conductor)")->required();
    chn_cmd->add_option("--k", chn_k, "norm order");
    chn_cmd->add_option("--budget", chn_budget, "enumeration budget");
    add_common(chn_cmd, chn_common);
    chn_cmd->callback([&]() {
        action = [&]() {
            apply_workers(chn_common);
            DirichletCharacter chi = make_real_character(chn_q);
            double v = char_gowers_norm(chi, chn_k, chn_budget);
            std::ostringstream csv;
            csv << "q,D,k,value\n"
                << chn_q << "," << chi.D << "," << chn_k << "," << fmt12(v) << "\n";
            write_text(chn_common.out + ".csv", csv.str());
            write_manifest(chn_common.out, "char-norm",
                           {{"q", std::to_string(chn_q)}, {"k", std::to_string(chn_k)},
                            {"budget", std::to_string(chn_budget)}});
        };
    });

    // model-compare: uniformity distance between the von Mangoldt function and a model
    auto* mc_cmd = app.add_subcommand("model-compare",
                                      "U^k distance from the von Mangoldt function to a model");
    static CommonOpts mc_common;
    static std::string mc_model = "cramer";
    static std::vector<std::int64_t> mc_N;
    static int mc_k = 2;
    static double mc_z = 20.0;
    static double mc_c1 = 0.5;
    static std::int64_t mc_q = 5;
    static double mc_beta = 0.99;
    static double mc_Q = 50.0;
    static bool mc_plot = false;
    mc_cmd->add_option("--model", mc_model, "model: cramer|siegel|lambda-sharp")->required();
    auto* mc_N_opt = mc_cmd->add_option("--N", mc_N, "interval length (repeatable for a sweep)");
    mc_cmd->add_option("--k", mc_k, "norm order");
    auto* mc_z_opt = mc_cmd->add_option("--z", mc_z, "cramer sieve cutoff");
    mc_cmd->add_option("--c1", mc_c1, "divisor-sum truncation exponent");
    mc_cmd->add_option("--q", mc_q, "synthetic zero modulus");
    mc_cmd->add_option("--beta", mc_beta, "synthetic zero location");
    mc_cmd->add_option("--Q", mc_Q, "synthetic zero quality bound");
    mc_cmd->add_flag("--plot", mc_plot, "also write <out>.dat with N deviation pairs");
    add_common(mc_cmd, mc_common);
    mc_cmd->callback([&]() {
        action = [&]() {
            apply_workers(mc_common);
            if (have_config(mc_common)) {
                GlobalParams gp = GlobalParams::from_file(mc_common.config);
                if (mc_N_opt->count() == 0 && gp.N > 0)
                    mc_N = {static_cast<std::int64_t>(gp.N)};
                if (mc_z_opt->count() == 0) mc_z = gp.z;
            }
            if (mc_N.empty())
                throw std::invalid_argument("model-compare: --N is required (flag or config)");
            SiegelConfig cfg;
            if (mc_model == "siegel") cfg = make_siegel_config(mc_q, mc_beta, mc_Q);
            std::ostringstream csv, dat;
            csv << "model,N,k,param,deviation\n";
            for (std::int64_t N : mc_N) {
                FactorTable table = FactorTable::build(static_cast<std::uint64_t>(N));
                ArithSignal lam = lambda_signal(table, N);
                ArithSignal model;
                double param = 0.0;
                if (mc_model == "cramer") {
                    model = cramer(mc_z, N);
                    param = mc_z;
                } else if (mc_model == "siegel") {
                    model = lambda_siegel(cfg, N);
                    param = mc_beta;
                } else if (mc_model == "lambda-sharp") {
                    model = lambda_sharp(N, mc_c1);
                    param = mc_c1;
                } else {
                    throw std::invalid_argument("unknown model for --model: " + mc_model);
                }
                ArithSignal diff = make_interval_signal(N, lam.values - model.values);
                double dev = norm_interval(diff, mc_k).value;
                csv << mc_model << "," << N << "," << mc_k << "," << fmt12(param) << ","
                    << fmt12(dev) << "\n";
                dat << N << " " << fmt12(dev) << "\n";
            }
            write_text(mc_common.out + ".csv", csv.str());
            if (mc_plot) write_text(mc_common.out + ".dat", dat.str());
            std::map<std::string, std::string> kv{{"model", mc_model}, {"k", std::to_string(mc_k)}};
            std::string joined;
            for (std::size_t i = 0; i < mc_N.size(); ++i)
                joined += (i ? "," : "") + std::to_string(mc_N[i]);
            kv["N"] = joined;
            if (mc_model == "cramer") kv["z"] = fmt_double(mc_z);
            if (mc_model == "lambda-sharp") kv["c1"] = fmt_double(mc_c1);
            if (mc_model == "siegel") {
                kv["q"] = std::to_string(mc_q);
                kv["beta"] = fmt_double(mc_beta);
                kv["Q"] = fmt_double(mc_Q);
            }
            write_manifest(mc_common.out, "model-compare", std::move(kv));
        };
    });

    // siegel: resolve a synthetic zero configuration
    auto* sg_cmd = app.add_subcommand("siegel", "resolve a synthetic zero configuration");
    static CommonOpts sg_common;
    static std::int64_t sg_q = 0;
    static double sg_beta = 0.0;
    static double sg_Q = 0.0;
    sg_cmd->add_option("--q", sg_q, "real-character modulus")->required();
    sg_cmd->add_option("--beta", sg_beta, "zero location in (0,1)")->required();
    auto* sg_Q_opt = sg_cmd->add_option("--Q", sg_Q, "quality bound, q < Q");
    add_common(sg_cmd, sg_common);
    sg_cmd->callback([&]() {
        action = [&]() {
            apply_workers(sg_common);
            if (have_config(sg_common)) {
                GlobalParams gp = GlobalParams::from_file(sg_common.config);
                if (sg_Q_opt->count() == 0 && gp.Q > 0) sg_Q = gp.Q;
            }
            if (sg_Q <= 0)
                throw std::invalid_argument("siegel: --Q is required (flag or config)");
            SiegelConfig cfg = make_siegel_config(sg_q, sg_beta, sg_Q);
            std::ostringstream csv;
            csv << "q,beta,Q,alpha,l-prime\n"
                << sg_q << "," << fmt12(sg_beta) << "," << fmt12(sg_Q) << ","
                << fmt12(cfg.alpha) << "," << fmt12(cfg.l_prime_at_beta) << "\n";
            write_text(sg_common.out + ".csv", csv.str());
            write_manifest(sg_common.out, "siegel",
                           {{"q", std::to_string(sg_q)}, {"beta", fmt_double(sg_beta)},
                            {"Q", fmt_double(sg_Q)}});
        };
    });

    // linsys: weighted count vs prediction for a system file
    auto* ls_cmd = app.add_subcommand("linsys", "weighted lattice count vs local-factor prediction");
    static CommonOpts ls_common;
    static std::string ls_system;
    static std::int64_t ls_N = 0;
    static std::int64_t ls_P0 = 10000;
    static std::string ls_weight = "cramer";
    static double ls_z = 20.0;
    static std::uint64_t ls_budget = 300000000ull;
    static std::int64_t ls_samples = 100000;
    ls_cmd->add_option("--system", ls_system, "system file (psi/hs lines)")->required();
    auto* ls_N_opt = ls_cmd->add_option("--N", ls_N, "weight table length");
    ls_cmd->add_option("--P0", ls_P0, "singular-series truncation");
    ls_cmd->add_option("--weight", ls_weight, "weight: cramer|lambda|lambda-prime");
    auto* ls_z_opt = ls_cmd->add_option("--z", ls_z, "cramer sieve cutoff");
    ls_cmd->add_option("--budget", ls_budget, "lattice enumeration budget");
    ls_cmd->add_option("--samples", ls_samples, "volume samples for dimension >= 3");
    add_common(ls_cmd, ls_common);
    ls_cmd->callback([&]() {
        action = [&]() {
            apply_workers(ls_common);
            if (have_config(ls_common)) {
                GlobalParams gp = GlobalParams::from_file(ls_common.config);
                if (ls_N_opt->count() == 0) ls_N = static_cast<std::int64_t>(gp.N);
                if (ls_z_opt->count() == 0) ls_z = gp.z;
            }
            if (ls_N < 1) throw std::invalid_argument("linsys: --N must be a positive integer");
            auto [sys, body] = load_system_file(ls_system);
            ArithSignal weight = named_signal(ls_weight == "cramer" ? "cramer" : ls_weight,
                                              ls_N, ls_z);
            double count = count_weighted(sys, body, weight, ls_budget);
            SingularSeries series = singular_series(sys, ls_P0);
            auto vol = (sys.d <= 2)
                           ? archimedean_volume(sys, body, ls_samples)
                           : archimedean_volume_sampled(sys, body, ls_samples, ls_common.seed);
            double pred = vol.first * series.value;
            LinsysResult row;
            row.system_id = std::filesystem::path(ls_system).stem().string();
            row.N = ls_N;
            row.count = count;
            row.prediction = pred;
            row.ratio = pred != 0.0 ? count / pred : 0.0;
            row.tail_bound = series.tail_bound;
            write_results_csv({row}, ls_common.out + ".csv");
            std::map<std::string, std::string> kv{
                {"system", ls_system}, {"N", std::to_string(ls_N)},
                {"P0", std::to_string(ls_P0)}, {"weight", ls_weight},
                {"budget", std::to_string(ls_budget)}, {"samples", std::to_string(ls_samples)}};
            if (ls_weight == "cramer") kv["z"] = fmt_double(ls_z);
            if (sys.d > 2) kv["seed"] = std::to_string(ls_common.seed);
            write_manifest(ls_common.out, "linsys", std::move(kv));
        };
    });

    // ap-count: prime AP census against the product prediction
    auto* ap_cmd = app.add_subcommand("ap-count", "prime AP census vs singular-series prediction");
    static CommonOpts ap_common;
    static std::int64_t ap_N = 0;
    static int ap_k = 3;
    static std::int64_t ap_P0 = 10000;
    static std::uint64_t ap_budget = 300000000ull;
    auto* ap_N_opt = ap_cmd->add_option("--N", ap_N, "census range");
    ap_cmd->add_option("--k", ap_k, "progression length");
    ap_cmd->add_option("--P0", ap_P0, "singular-series truncation");
    ap_cmd->add_option("--budget", ap_budget, "census work budget");
    add_common(ap_cmd, ap_common);
    ap_cmd->callback([&]() {
        action = [&]() {
            apply_workers(ap_common);
            if (have_config(ap_common)) {
                GlobalParams gp = GlobalParams::from_file(ap_common.config);
                if (ap_N_opt->count() == 0) ap_N = static_cast<std::int64_t>(gp.N);
            }
            if (ap_N < 1) throw std::invalid_argument("ap-count: --N must be a positive integer");
            std::int64_t count = count_prime_aps(ap_N, ap_k, ap_budget);
            SingularSeries series = singular_series(ap_system(ap_k), ap_P0);
            double I = ap_log_integral(ap_N, ap_k);
            double pred = series.value * I;
            std::ostringstream csv;
            csv << "count,prediction,ratio,tail\n"
                << count << "," << fmt12(pred) << ","
                << fmt12(pred != 0.0 ? static_cast<double>(count) / pred : 0.0) << ","
                << fmt12(series.tail_bound) << "\n";
            write_text(ap_common.out + ".csv", csv.str());
            write_manifest(ap_common.out, "ap-count",
                           {{"N", std::to_string(ap_N)}, {"k", std::to_string(ap_k)},
                            {"P0", std::to_string(ap_P0)},
                            {"budget", std::to_string(ap_budget)}});
        };
    });

    // decomp-verify: reconstruct a decomposition and bound the pointwise error
    auto* dv_cmd = app.add_subcommand("decomp-verify", "pointwise check of a decomposition");
    static CommonOpts dv_common;
    static std::string dv_target = "lambda";
    static std::int64_t dv_N = 0;
    static std::int64_t dv_twist_q = 0;
    static double dv_twist_beta = 0.99;
    static double dv_twist_Q = 50.0;
    dv_cmd->add_option("--target", dv_target, "target: lambda|mu")->required();
    auto* dv_N_opt = dv_cmd->add_option("--N", dv_N, "decomposition scale");
    dv_cmd->add_option("--twist-q", dv_twist_q, "twist by the real character mod q (0 = none)");
    dv_cmd->add_option("--twist-beta", dv_twist_beta, "twist configuration zero location");
    dv_cmd->add_option("--twist-Q", dv_twist_Q, "twist configuration quality bound");
    add_common(dv_cmd, dv_common);
    dv_cmd->callback([&]() {
        action = [&]() {
            apply_workers(dv_common);
            if (have_config(dv_common)) {
                GlobalParams gp = GlobalParams::from_file(dv_common.config);
                if (dv_N_opt->count() == 0) dv_N = static_cast<std::int64_t>(gp.N);
            }
            if (dv_N < 2) throw std::invalid_argument("decomp-verify: --N must be at least 2");
            SiegelConfig cfg;
            const SiegelConfig* twist = nullptr;
            if (dv_twist_q > 0) {
                cfg = make_siegel_config(dv_twist_q, dv_twist_beta, dv_twist_Q);
                twist = &cfg;
            }
            VaughanDecomposition dec;
            if (dv_target == "lambda") dec = vaughan_lambda(dv_N, twist);
            else if (dv_target == "mu") dec = vaughan_mu(dv_N, twist);
            else throw std::invalid_argument("unknown target for --target: " + dv_target);
            double err = verify_decomposition(dec);
            double bound = 1e-9 * std::log(static_cast<double>(dv_N));
            bool ok = err <= bound;
            std::ostringstream csv;
            csv << "target,N,max-error,bound,ok\n"
                << dv_target << "," << dv_N << "," << fmt12(err) << "," << fmt12(bound) << ","
                << (ok ? 1 : 0) << "\n";
            write_text(dv_common.out + ".csv", csv.str());
            std::map<std::string, std::string> kv{{"target", dv_target},
                                                  {"N", std::to_string(dv_N)}};
            if (twist != nullptr) {
                kv["twist-q"] = std::to_string(dv_twist_q);
                kv["twist-beta"] = fmt_double(dv_twist_beta);
                kv["twist-Q"] = fmt_double(dv_twist_Q);
            }
            write_manifest(dv_common.out, "decomp-verify", std::move(kv));
            if (!ok) throw std::runtime_error("decomposition residual " + fmt12(err) +
                                              " exceeds bound " + fmt12(bound));
        };
    });

    // gy-moments: normalized majorant and its dual moments on a cyclic group
    auto* gy_cmd = app.add_subcommand("gy-moments", "dual moments of the normalized majorant");
    static CommonOpts gy_common;
    static std::int64_t gy_M = 0;
    static double gy_R = 0.0;
    static std::int64_t gy_W = 1;
    static std::int64_t gy_b = 1;
    static int gy_jmax = 2;
    static std::uint64_t gy_budget = 300000000ull;
    static bool gy_plot = false;
    gy_cmd->add_option("--M", gy_M, "cyclic group order")->required();
    gy_cmd->add_option("--R", gy_R, "divisor-sum truncation level")->required();
    auto* gy_W_opt = gy_cmd->add_option("--W", gy_W, "residue modulus");
    auto* gy_b_opt = gy_cmd->add_option("--b", gy_b, "residue class");
    gy_cmd->add_option("--jmax", gy_jmax, "largest dual moment order");
    gy_cmd->add_option("--budget", gy_budget, "moment evaluation budget");
    gy_cmd->add_flag("--plot", gy_plot, "also write <out>.dat with j moment pairs");
    add_common(gy_cmd, gy_common);
    gy_cmd->callback([&]() {
        action = [&]() {
            apply_workers(gy_common);
            if (have_config(gy_common)) {
                GlobalParams gp = GlobalParams::from_file(gy_common.config);
                if (gy_W_opt->count() == 0) gy_W = gp.W;
                if (gy_b_opt->count() == 0) gy_b = gp.b;
            }
            GYWeightParams params = make_gy_params(gy_W, gy_b, gy_R);
            ArithSignal nu = gy_majorant_cyclic(params, gy_M);
            double mean = 0.0;
            for (std::int64_t n = 0; n < gy_M; ++n) mean += nu.values[n].real();
            mean /= static_cast<double>(gy_M);
            if (mean == 0.0) throw std::runtime_error("gy-moments: majorant has zero mean");
            ArithSignal scaled = make_cyclic_signal(gy_M, nu.values / std::complex<double>(mean, 0.0));
            std::ostringstream csv, dat;
            csv << "M,R,W,b,mean,j,moment\n";
            for (int j = 0; j <= gy_jmax; ++j) {
                double m = dual_moment(scaled, 2, j, gy_budget);
                csv << gy_M << "," << fmt12(gy_R) << "," << gy_W << "," << gy_b << ","
                    << fmt12(mean) << "," << j << "," << fmt12(m) << "\n";
                dat << j << " " << fmt12(m) << "\n";
            }
            write_text(gy_common.out + ".csv", csv.str());
            if (gy_plot) write_text(gy_common.out + ".dat", dat.str());
            write_manifest(gy_common.out, "gy-moments",
                           {{"M", std::to_string(gy_M)}, {"R", fmt_double(gy_R)},
                            {"W", std::to_string(gy_W)}, {"b", std::to_string(gy_b)},
                            {"jmax", std::to_string(gy_jmax)},
                            {"budget", std::to_string(gy_budget)}});
        };
    });

    CLI11_PARSE(app, argc, argv);
    return run_guarded(action);
}
