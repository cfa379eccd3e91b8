#include "stepreg/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "stepreg/combinatorics.hpp"
#include "stepreg/complexity.hpp"
#include "stepreg/errors.hpp"
#include "stepreg/experiments.hpp"
#include "stepreg/serialize.hpp"
#include "stepreg/svg.hpp"
#include "stepreg/version.hpp"

namespace stepreg {

namespace {

namespace fs = std::filesystem;

struct GlobalOpts {
    std::string out_dir = ".";
    std::string format = "csv";  // csv | json
    std::uint64_t seed = 1;

    fs::path out_path(const std::string& name) const {
        fs::path p(name);
        if (p.is_absolute()) return p;
        return fs::path(out_dir) / p;
    }
};

// Every run records its resolved command line; re-running the stored argv
// reproduces the outputs byte for byte (--from-manifest does exactly that).
void write_manifest(const GlobalOpts& g, const std::vector<std::string>& args,
                    const std::string& subcommand) {
    fs::create_directories(g.out_dir);
    Json j;
    j["tool"] = "stepreg";
    j["version"] = kVersion;
    j["command"] = args;
    j["resolved"] = {{"subcommand", subcommand},
                     {"seed", g.seed},
                     {"out_dir", g.out_dir},
                     {"format", g.format}};
    write_text_file(g.out_path("manifest.json").string(), j.dump(2) + "\n");
}

Rat parse_rational(const std::string& s) {
    const std::size_t slash = s.find('/');
    if (slash == std::string::npos) return rat_from_double(std::stod(s));
    return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

StepFunction load_step_function(const std::string& path) {
    return step_function_from_json(Json::parse(read_text_file(path)));
}

std::optional<BalanceConstraint> make_bc(double cmin_sq, double cmax_sq) {
    if (cmin_sq <= 0.0) return std::nullopt;  // 0 disables the constraint
    return BalanceConstraint(cmin_sq, cmax_sq);
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const GlobalOpts& g, const std::string& f0_path, int n, double noise_sd) {
    const StepFunction f0 = load_step_function(f0_path);
    const Dataset d = simulate(f0, n, noise_sd, g.seed);
    fs::create_directories(g.out_dir);
    write_dataset_csv(d, g.out_path("data.csv").string());
    write_dataset_sidecar(d, g.out_path("data.json").string());
    write_text_file(g.out_path("f0.json").string(),
                    step_function_to_json(f0).dump(2) + "\n");
    std::cout << "wrote " << g.out_path("data.csv").string() << " (n=" << n << ")\n";
    return 0;
}

// ------------------------------------------------------------------- lemma

int cmd_lemma(const GlobalOpts& g, int n, int k_max, std::vector<int> a_grid,
              long long oracle_limit) {
    std::ostringstream csv;
    csv << "n,K,a,C,min_prob_num,min_prob_den,max_prob_num,max_prob_den,oracle_checked\n";
    Json rows = Json::array();
    for (int K = 2; K <= k_max; ++K) {
        std::vector<int> as = a_grid;
        if (as.empty())
            for (int a = 1; a <= n / K; ++a) as.push_back(a);
        for (int a : as) {
            if (a < 1 || a > n / K) continue;
            const Rat C(a, n);
            const ExactProbability pmin = prob_min_cell(n, K, C);
            const ExactProbability pmax = prob_max_cell(n, K, C);
            bool checked = false;
            if (binom(n - 1, K - 1) <= oracle_limit) {
                const SpacingProbs bf = brute_force_spacing_probs(n, K, C);
                if (bf.min_prob.num != pmin.num || bf.min_prob.den != pmin.den ||
                    bf.max_prob.num != pmax.num || bf.max_prob.den != pmax.den)
                    throw std::logic_error("lemma: closed form disagrees with enumeration");
                checked = true;
            }
            csv << n << ',' << K << ',' << a << ',' << format_double_short(C.to_double())
                << ',' << pmin.num.str() << ',' << pmin.den.str() << ',' << pmax.num.str()
                << ',' << pmax.den.str() << ',' << (checked ? "true" : "false") << '\n';
            Json r;
            r["n"] = n;
            r["K"] = K;
            r["a"] = a;
            r["C"] = C.to_double();
            r["min_prob"] = {{"num", pmin.num.str()}, {"den", pmin.den.str()}};
            r["max_prob"] = {{"num", pmax.num.str()}, {"den", pmax.den.str()}};
            r["oracle_checked"] = checked;
            rows.push_back(r);
        }
    }
    fs::create_directories(g.out_dir);
    if (g.format == "json")
        write_text_file(g.out_path("lemma.json").string(), rows.dump(2) + "\n");
    else
        write_text_file(g.out_path("lemma.csv").string(), csv.str());
    std::cout << csv.str();
    return 0;
}

// --------------------------------------------------------------- enumerate

int cmd_enumerate(const GlobalOpts& g, int n, int K, double cmin_sq, double cmax_sq) {
    const auto bc = make_bc(cmin_sq, cmax_sq);
    std::ostringstream out;
    PartitionEnumerator en(n, K, bc);
    long count = 0;
    while (auto p = en.next()) {
        for (std::size_t i = 0; i < p->splits.size(); ++i) {
            if (i) out << ',';
            out << p->splits[i];
        }
        out << '\n';
        ++count;
    }
    fs::create_directories(g.out_dir);
    write_text_file(g.out_path("partitions.txt").string(), out.str());
    std::cout << out.str();
    std::cerr << count << " partitions\n";
    return 0;
}

// -------------------------------------------------------------- complexity

int cmd_complexity(const GlobalOpts& g, const std::string& f0_path, int n, double cmin_sq,
                   double cmax_sq, int cap) {
    const StepFunction f0 = load_step_function(f0_path).canonicalize();
    const int effective_cap = cap > 0 ? cap : n;
    Json j;
    j["eb"] = complexity_result_to_json(complexity_eb(f0, n, effective_cap));
    j["bi"] = complexity_result_to_json(
        complexity_bi(f0, n, BalanceConstraint(cmin_sq, cmax_sq), effective_cap));
    fs::create_directories(g.out_dir);
    write_text_file(g.out_path("complexity.json").string(), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

// -------------------------------------------------------------------- fit

int cmd_fit(const GlobalOpts& g, const std::string& data_path, const std::string& sidecar,
            const std::string& klass, const std::string& engine, double ck, double cmin_sq,
            double cmax_sq, long iters, int k_limit, int n_samples, const std::string& out_name,
            const std::string& f0_path, bool svg) {
    const Dataset data = read_dataset(data_path, sidecar);
    const int n = data.grid.n;

    PriorConfig prior;
    prior.c_k = ck;
    prior.bc = BalanceConstraint(cmin_sq, cmax_sq);
    prior.partition_class = (klass == "eb") ? PartitionClass::EB : PartitionClass::BI;

    const int kl = k_limit > 0 ? std::min(k_limit, n) : std::min(n, 20);
    PosteriorSummary summary =
        (engine == "exact")
            ? exact_posterior(data, prior, kl, n_samples, g.seed)
            : mcmc_posterior(data, prior, iters, g.seed, n_samples);

    fs::create_directories(g.out_dir);
    write_text_file(g.out_path(out_name).string(),
                    posterior_summary_to_json(summary).dump(2) + "\n");

    // Posterior mean table with pointwise 95% sample bands.
    std::optional<StepFunction> f0;
    if (!f0_path.empty()) f0 = load_step_function(f0_path);
    const std::vector<double> f0x =
        f0 ? f0->values_on_grid(data.grid) : std::vector<double>(n, 0.0);
    std::vector<std::vector<double>> draws;
    draws.reserve(summary.samples.size());
    for (const StepFunction& f : summary.samples) draws.push_back(f.values_on_grid(data.grid));
    std::ostringstream csv;
    csv << "x,f0,posterior_mean,lo95,hi95\n";
    std::vector<double> col(draws.size());
    for (int i = 0; i < n; ++i) {
        double lo = 0.0, hi = 0.0;
        if (!draws.empty()) {
            for (std::size_t s = 0; s < draws.size(); ++s) col[s] = draws[s][i];
            std::sort(col.begin(), col.end());
            lo = col[static_cast<std::size_t>(0.025 * (col.size() - 1))];
            hi = col[static_cast<std::size_t>(0.975 * (col.size() - 1))];
        }
        csv << format_double(data.grid.points[i]) << ','
            << (f0 ? format_double_short(f0x[i]) : "nan") << ','
            << format_double_short(summary.mean_on_grid[i]) << ',' << format_double_short(lo)
            << ',' << format_double_short(hi) << '\n';
    }
    write_text_file(g.out_path("posterior_mean.csv").string(), csv.str());

    if (svg) {
        SvgPlot plot;
        std::vector<double> xs(data.grid.points);
        plot.add_series(xs, data.responses, "#bbbbbb", "data");
        if (f0) plot.add_series(xs, f0x, "#d62728", "truth");
        plot.add_series(xs, summary.mean_on_grid, "#1f77b4", "posterior mean");
        write_text_file(g.out_path("fit.svg").string(), plot.render());
    }

    std::cout << "k_mode=" << summary.k_mode() << "\n";
    return 0;
}

// ------------------------------------------------------------- concentrate

std::map<std::string, std::string> parse_kv_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

int cmd_concentrate(const GlobalOpts& g, const std::string& config_path) {
    const auto kv = parse_kv_config(read_text_file(config_path));
    auto get = [&](const std::string& key, const std::string& fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };
    if (!kv.count("f0")) throw std::invalid_argument("concentrate: config needs f0=<path>");

    ExperimentConfig cfg;
    cfg.f0 = load_step_function(get("f0", "")).canonicalize();
    cfg.n_list = parse_int_list(get("n_list", "128,256,512,1024"));
    cfg.reps = std::stoi(get("reps", "50"));
    cfg.noise_sd = std::stod(get("noise_sd", "1"));
    cfg.prior.c_k = std::stod(get("ck", "1"));
    cfg.prior.bc = BalanceConstraint(std::stod(get("cmin_sq", "0.5")),
                                     std::stod(get("cmax_sq", "2.0")));
    cfg.prior.partition_class = get("class", "eb") == "bi" ? PartitionClass::BI
                                                           : PartitionClass::EB;
    cfg.engine = get("engine", "exact") == "mcmc" ? ExperimentConfig::Engine::Mcmc
                                                  : ExperimentConfig::Engine::Exact;
    cfg.seed_base = std::stoull(get("seed", std::to_string(g.seed)));
    cfg.mcmc_iters = std::stol(get("iters", "200000"));
    cfg.n_samples = std::stoi(get("samples", "500"));
    cfg.k_limit = std::stoi(get("k_limit", "0"));
    cfg.rate_exponent_beta = std::stod(get("beta", "0.75"));
    const std::string mn = get("mn", "loglog");
    if (mn != "loglog") {
        const double fixed = std::stod(mn);
        cfg.radius_multiplier = [fixed](int) { return fixed; };
    }

    const std::vector<ConcentrationRow> rows = run_concentration(cfg);
    fs::create_directories(g.out_dir);
    write_text_file(g.out_path("concentration.csv").string(), concentration_rows_to_csv(rows));
    std::cout << concentration_rows_to_csv(rows);

    if (rows.size() >= 3) {
        const double slope = rate_slope(rows);
        std::cout << "rate_slope=" << format_double_short(slope) << "\n";
    }

    SvgPlot plot;
    plot.set_log_axes(true, true);
    std::vector<double> xs, err, eps;
    for (const ConcentrationRow& r : rows) {
        xs.push_back(r.n);
        err.push_back(std::max(r.median_error, 1e-12));
        eps.push_back(r.epsilon_n);
    }
    plot.add_series(xs, err, "#1f77b4", "median error");
    plot.add_series(xs, eps, "#d62728", "epsilon_n");
    write_text_file(g.out_path("concentration.svg").string(), plot.render());

    if (kv.count("ck_list")) {
        const auto table = ck_sensitivity(cfg, parse_double_list(kv.at("ck_list")));
        write_text_file(g.out_path("ck_sensitivity.csv").string(), ck_rows_to_csv(table));
        std::cout << ck_rows_to_csv(table);
    }
    return 0;
}

// -------------------------------------------------------------------- cover

int cmd_cover(const GlobalOpts& g, int n, int K, const std::string& arc, long trials,
              long long exact_limit) {
    const Rat len = parse_rational(arc);
    const CoverEstimate est = circle_cover_mc(n, K, len, trials, g.seed);
    Json j;
    j["n"] = n;
    j["k"] = K;
    j["arc_length"] = len.to_double();
    j["trials"] = est.trials;
    j["estimate"] = est.estimate;
    j["std_error"] = est.std_error;
    if (binom(n, K) <= exact_limit) {
        const ExactProbability p = circle_cover_exact(n, K, len);
        j["exact"] = {{"num", p.num.str()}, {"den", p.den.str()}, {"value", p.value()}};
    }
    fs::create_directories(g.out_dir);
    if (g.format == "json") {
        write_text_file(g.out_path("cover.json").string(), j.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        csv << "n,k,arc_length,trials,estimate,std_error\n"
            << n << ',' << K << ',' << format_double_short(len.to_double()) << ','
            << est.trials << ',' << format_double(est.estimate) << ','
            << format_double(est.std_error) << '\n';
        write_text_file(g.out_path("cover.csv").string(), csv.str());
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Bayesian histogram regression with step-function priors"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    std::string from_manifest;
    app.add_option("--seed", g.seed, "Base RNG seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--format", g.format, "Tabular output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--from-manifest", from_manifest,
                   "Re-run the command recorded in a manifest.json");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Draw a dataset from a step function");
    std::string sim_f0;
    int sim_n = 128;
    double sim_sd = 1.0;
    sim->add_option("--f0", sim_f0, "Step function JSON")->required();
    sim->add_option("--n", sim_n, "Sample size")->required();
    sim->add_option("--noise-sd", sim_sd, "Noise standard deviation")->capture_default_str();

    // lemma
    auto* lem = app.add_subcommand("lemma", "Exact spacing probability table");
    int lem_n = 10, lem_kmax = 3;
    std::vector<int> lem_as;
    long long lem_oracle = 100000;
    lem->add_option("--n", lem_n, "Grid size")->required();
    lem->add_option("--k-max", lem_kmax, "Largest K")->required();
    lem->add_option("--grid-of-C", lem_as,
                    "Thresholds C = a/n by their numerators a (default: all)");
    lem->add_option("--oracle-limit", lem_oracle,
                    "Verify rows by enumeration while C(n-1,K-1) stays below this")
        ->capture_default_str();

    // enumerate
    auto* en = app.add_subcommand("enumerate", "List split sets, one per line");
    int en_n = 10, en_k = 2;
    double en_cmin = 0.0, en_cmax = 2.0;
    en->add_option("--n", en_n, "Grid size")->required();
    en->add_option("--k", en_k, "Number of cells")->required();
    en->add_option("--cmin-sq", en_cmin, "Balance lower bound (0 disables the filter)")
        ->capture_default_str();
    en->add_option("--cmax-sq", en_cmax, "Balance upper bound")->capture_default_str();

    // complexity
    auto* cx = app.add_subcommand("complexity", "Complexity numbers for both classes");
    std::string cx_f0;
    int cx_n = 0, cx_cap = 0;
    double cx_cmin = 0.5, cx_cmax = 2.0;
    cx->add_option("--f0", cx_f0, "Step function JSON")->required();
    cx->add_option("--n", cx_n, "Grid size")->required();
    cx->add_option("--cmin-sq", cx_cmin, "Balance lower bound")->capture_default_str();
    cx->add_option("--cmax-sq", cx_cmax, "Balance upper bound")->capture_default_str();
    cx->add_option("--cap", cx_cap, "Search cap (default n)");

    // fit
    auto* fit = app.add_subcommand("fit", "Posterior over step functions");
    std::string fit_data, fit_sidecar, fit_class = "eb", fit_engine = "exact";
    std::string fit_out = "summary.json", fit_f0;
    double fit_ck = 1.0, fit_cmin = 0.5, fit_cmax = 2.0;
    long fit_iters = 200000;
    int fit_klimit = 0, fit_samples = 500;
    bool fit_svg = false;
    fit->add_option("--data", fit_data, "Dataset CSV (x,y)")->required();
    fit->add_option("--sidecar", fit_sidecar, "Dataset JSON sidecar");
    fit->add_option("--class", fit_class, "Partition class")
        ->check(CLI::IsMember({"eb", "bi"}))
        ->capture_default_str();
    fit->add_option("--engine", fit_engine, "Inference engine")
        ->check(CLI::IsMember({"exact", "mcmc"}))
        ->capture_default_str();
    fit->add_option("--ck", fit_ck, "Prior decay c_K")->capture_default_str();
    fit->add_option("--cmin-sq", fit_cmin, "Balance lower bound")->capture_default_str();
    fit->add_option("--cmax-sq", fit_cmax, "Balance upper bound")->capture_default_str();
    fit->add_option("--iters", fit_iters, "MCMC iterations")->capture_default_str();
    fit->add_option("--k-limit", fit_klimit, "Largest K evaluated (default min(n,20))");
    fit->add_option("--samples", fit_samples, "Posterior draws to keep")->capture_default_str();
    fit->add_option("--out", fit_out, "Summary JSON filename")->capture_default_str();
    fit->add_option("--f0", fit_f0, "True step function JSON (fills the f0 column)");
    fit->add_flag("--svg", fit_svg, "Also write fit.svg");

    // concentrate
    auto* con = app.add_subcommand("concentrate", "Concentration experiment from a config file");
    std::string con_config;
    con->add_option("--config", con_config, "key=value config file")->required();

    // cover
    auto* cov = app.add_subcommand("cover", "Circle covering probability, Monte Carlo");
    int cov_n = 12, cov_k = 3;
    std::string cov_arc = "5/12";
    long cov_trials = 100000;
    long long cov_exact = 1000000;
    cov->add_option("--n", cov_n, "Grid points on the circle")->required();
    cov->add_option("--k", cov_k, "Number of arcs")->required();
    cov->add_option("--arc-length", cov_arc, "Arc length (rational like 5/12 or decimal)")
        ->capture_default_str();
    cov->add_option("--trials", cov_trials, "Monte Carlo trials")->capture_default_str();
    cov->add_option("--exact-limit", cov_exact,
                    "Also enumerate exactly while C(n,K) stays below this")
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help/version or the usage error
        return code == 0 ? 0 : 1;
    }

    if (!from_manifest.empty()) {
        const Json m = Json::parse(read_text_file(from_manifest));
        return run_cli(m.at("command").get<std::vector<std::string>>());
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 1;
    }

    write_manifest(g, args, app.get_subcommands().front()->get_name());
    if (*sim) return cmd_simulate(g, sim_f0, sim_n, sim_sd);
    if (*lem) return cmd_lemma(g, lem_n, lem_kmax, lem_as, lem_oracle);
    if (*en) return cmd_enumerate(g, en_n, en_k, en_cmin, en_cmax);
    if (*cx) return cmd_complexity(g, cx_f0, cx_n, cx_cmin, cx_cmax, cx_cap);
    if (*fit)
        return cmd_fit(g, fit_data, fit_sidecar, fit_class, fit_engine, fit_ck, fit_cmin,
                       fit_cmax, fit_iters, fit_klimit, fit_samples, fit_out, fit_f0, fit_svg);
    if (*con) return cmd_concentrate(g, con_config);
    if (*cov) return cmd_cover(g, cov_n, cov_k, cov_arc, cov_trials, cov_exact);
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    try {
        return dispatch(args);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const TooLargeError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace stepreg
