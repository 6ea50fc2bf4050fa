// kloostpath command-line front end.  Talks to the shared library strictly
// through the C API; subcommands: eval | path | experiment.

#include <kloostpath/kloostpath.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;

[[noreturn]] void die(kp_status status, const std::string& context) {
    std::cerr << "error: " << context << ": " << kp_last_error_message()
              << " (status " << static_cast<int>(status) << ")\n";
    std::exit(status == KP_ERR_IO ? 3 : 1);
}

struct ModulusHandle {
    kp_modulus* m = nullptr;
    ~ModulusHandle() { kp_modulus_free(m); }
};

struct BranchHandle {
    kp_branch* br = nullptr;
    ~BranchHandle() { kp_branch_free(br); }
};

struct PathHandle {
    kp_path* path = nullptr;
    ~PathHandle() { kp_path_free(path); }
};

std::vector<unsigned> parse_grid(const std::string& csv) {
    std::vector<unsigned> grid;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) grid.push_back(static_cast<unsigned>(std::stoul(item)));
    return grid;
}

json parse_mu(const std::string& text) {
    // "0:2,1:1" -> {"0": 2, "1": 1}
    json mu = json::object();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--mu expects tau:multiplicity pairs");
        mu[item.substr(0, colon)] = std::stoul(item.substr(colon + 1));
    }
    return mu;
}

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

int run_eval(std::uint64_t p, unsigned n, std::uint64_t a, std::uint64_t b,
             const std::string& method) {
    ModulusHandle mod;
    if (kp_status s = kp_modulus_create(p, n, &mod.m)) die(s, "modulus");
    std::uint64_t q = kp_modulus_q(mod.m);

    std::optional<double> naive_re, naive_im, closed;
    bool want_naive = method == "both" || method == "naive";
    bool want_closed = (method == "both" || method == "closed") && n >= 2;

    if (want_naive) {
        if (q > 100000000ull) {
            if (method == "naive") {
                std::cerr << "error: naive evaluation limited to p^n <= 10^8\n";
                return 1;
            }
        } else {
            double re, im;
            if (kp_status s = kp_kloosterman_naive(mod.m, a, b, &re, &im))
                die(s, "naive evaluation");
            naive_re = re;
            naive_im = im;
        }
    }
    if (want_closed) {
        BranchHandle br;
        if (kp_status s = kp_branch_create_default(mod.m, &br.br)) die(s, "branch");
        double value;
        if (kp_status s = kp_kloosterman_closed(mod.m, br.br, a, b, &value))
            die(s, "closed-form evaluation");
        closed = value;
    }

    std::printf("Kl_{%llu^%u}(%llu, %llu)\n", static_cast<unsigned long long>(p), n,
                static_cast<unsigned long long>(a), static_cast<unsigned long long>(b));
    if (naive_re)
        std::printf("  naive      = %+.12f %+.12fi\n", *naive_re, *naive_im);
    if (closed) std::printf("  closed     = %+.12f\n", *closed);
    if (naive_re && closed) {
        double diff = std::hypot(*naive_re - *closed, *naive_im);
        std::printf("  difference = %.3e\n", diff);
        if (diff > 1e-6) {
            std::cerr << "error: naive and closed-form values disagree\n";
            return 2;
        }
    }
    return 0;
}

int run_path(std::uint64_t p, unsigned n, std::uint64_t a, std::uint64_t b,
             const std::string& variant, const std::string& format,
             const std::string& out) {
    ModulusHandle mod;
    if (kp_status s = kp_modulus_create(p, n, &mod.m)) die(s, "modulus");
    if (kp_modulus_q(mod.m) > 100000000ull) {
        std::cerr << "error: path construction limited to p^n <= 10^8\n";
        return 1;
    }

    kp_path_variant pv = KP_PATH_STANDARD;
    if (variant == "renormalized") pv = KP_PATH_RENORMALIZED;
    else if (variant == "rearranged") pv = KP_PATH_REARRANGED;
    else if (variant != "standard") {
        std::cerr << "error: unknown variant " << variant << "\n";
        return 1;
    }

    kp_path_format pf = KP_FORMAT_CSV;
    if (format == "json") pf = KP_FORMAT_JSON;
    else if (format == "svg") pf = KP_FORMAT_SVG;
    else if (format != "csv") {
        std::cerr << "error: unknown format " << format << "\n";
        return 1;
    }

    PathHandle path;
    if (kp_status s = kp_path_create(mod.m, a, b, pv, &path.path)) die(s, "path");

    if (out.empty()) {
        char* text = nullptr;
        if (kp_status s = kp_path_export(path.path, pf, &text)) die(s, "export");
        std::fputs(text, stdout);
        kp_string_free(text);
    } else {
        if (kp_status s = kp_path_export_file(path.path, pf, out.c_str()))
            die(s, "export");
        std::cerr << "wrote " << out << "\n";
    }
    return 0;
}

int run_experiment(const json& config, const std::string& out) {
    char* report_text = nullptr;
    if (kp_status s = kp_experiment_run(config.dump().c_str(), &report_text))
        die(s, "experiment");
    json report = json::parse(report_text);
    kp_string_free(report_text);

    bool pass = report.value("pass", false);
    report["timestamp"] = timestamp_now();

    std::string serialized = report.dump(2);
    if (out.empty()) {
        std::cout << serialized << "\n";
    } else {
        std::ofstream stream(out, std::ios::binary);
        if (!stream) {
            std::cerr << "error: cannot open " << out << "\n";
            return 3;
        }
        stream << serialized << "\n";
        std::cerr << "wrote " << out << "\n";
    }
    for (const auto& assertion : report.value("assertions", json::array()))
        std::cerr << (assertion.value("pass", false) ? "[ok]   " : "[FAIL] ")
                  << assertion.value("name", "") << ": "
                  << assertion.value("detail", "") << "\n";
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kloosterman sums and paths to prime-power moduli"};
    app.require_subcommand(1);

    // shared flags
    std::uint64_t p = 3, a = 1, b = 1, a1 = 1, b0 = 1, seed = 42;
    unsigned n = 2, H = 1000;
    double t = 0.5;

    auto* eval_cmd = app.add_subcommand("eval", "evaluate one Kloosterman sum");
    std::string method = "both";
    eval_cmd->add_option("-p", p, "odd prime");
    eval_cmd->add_option("-n", n, "exponent");
    eval_cmd->add_option("-a", a, "first argument");
    eval_cmd->add_option("-b", b, "second argument");
    eval_cmd->add_option("--method", method, "both|naive|closed");

    auto* path_cmd = app.add_subcommand("path", "emit a Kloosterman path");
    std::string variant = "standard", format = "csv", out;
    bool svg_flag = false;
    path_cmd->add_option("-p", p, "odd prime");
    path_cmd->add_option("-n", n, "exponent");
    path_cmd->add_option("-a", a, "first argument");
    path_cmd->add_option("-b", b, "second argument");
    path_cmd->add_option("--variant", variant, "standard|renormalized|rearranged");
    path_cmd->add_option("--format", format, "csv|json|svg");
    path_cmd->add_flag("--svg", svg_flag, "shorthand for --format svg");
    path_cmd->add_option("--out", out, "output file (stdout when omitted)");

    auto* exp_cmd = app.add_subcommand("experiment", "run a verification experiment");
    std::string kind, n_grid_csv, p_grid_csv, mu_csv, config_path;
    std::int64_t expected_distinct = -1;
    std::uint64_t samples = 100000;
    exp_cmd->add_option("kind", kind,
                        "equidist|moments|sumprod|census|series-compare");
    exp_cmd->add_option("-p", p, "odd prime");
    exp_cmd->add_option("-n", n, "exponent (census)");
    exp_cmd->add_option("-a", a, "first argument (census)");
    exp_cmd->add_option("-b", b, "second argument (census)");
    exp_cmd->add_option("--a1", a1, "ensemble class mod p");
    exp_cmd->add_option("--b0", b0, "fixed second argument");
    exp_cmd->add_option("--t", t, "evaluation time in [0,1]");
    exp_cmd->add_option("--H", H, "series truncation");
    exp_cmd->add_option("--seed", seed, "RNG seed");
    exp_cmd->add_option("--samples", samples, "Monte Carlo sample count");
    exp_cmd->add_option("--n-grid", n_grid_csv, "comma-separated exponents");
    exp_cmd->add_option("--p-grid", p_grid_csv, "comma-separated primes");
    exp_cmd->add_option("--mu", mu_csv, "shift multiset, e.g. 0:2,5:1");
    exp_cmd->add_option("--expected-distinct", expected_distinct,
                        "census assertion target");
    exp_cmd->add_option("--config", config_path,
                        "JSON config file (flags override)");
    exp_cmd->add_option("--out", out, "report file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    if (eval_cmd->parsed()) return run_eval(p, n, a, b, method);
    if (path_cmd->parsed())
        return run_path(p, n, a, b, variant, svg_flag ? "svg" : format, out);

    if (exp_cmd->parsed()) {
        json config = json::object();
        if (!config_path.empty()) {
            std::ifstream stream(config_path);
            if (!stream) {
                std::cerr << "error: cannot read " << config_path << "\n";
                return 3;
            }
            stream >> config;
        }
        // flags override config-file values
        if (!kind.empty()) config["kind"] = kind;
        auto set_if = [&](const CLI::Option* opt, const char* key, auto value) {
            if (opt->count() > 0 || !config.contains(key)) config[key] = value;
        };
        set_if(exp_cmd->get_option("-p"), "p", p);
        set_if(exp_cmd->get_option("--a1"), "a1", a1);
        set_if(exp_cmd->get_option("--b0"), "b0", b0);
        set_if(exp_cmd->get_option("--t"), "t", t);
        set_if(exp_cmd->get_option("--H"), "H", H);
        set_if(exp_cmd->get_option("--seed"), "seed", seed);
        set_if(exp_cmd->get_option("--samples"), "samples", samples);
        if (exp_cmd->get_option("-n")->count() > 0) config["n"] = n;
        if (exp_cmd->get_option("-a")->count() > 0) config["a"] = a;
        if (exp_cmd->get_option("-b")->count() > 0) config["b"] = b;
        if (!n_grid_csv.empty()) config["n_grid"] = parse_grid(n_grid_csv);
        if (!p_grid_csv.empty()) config["p_grid"] = parse_grid(p_grid_csv);
        if (!mu_csv.empty()) config["mu"] = parse_mu(mu_csv);
        if (expected_distinct >= 0) config["expected_distinct"] = expected_distinct;
        if (!config.contains("kind")) {
            std::cerr << "error: experiment kind required\n";
            return 1;
        }
        return run_experiment(config, out);
    }
    return 0;
}
