// dqlab command-line driver.
// Exit codes: 0 ok, 1 a check failed, 2 usage / guard / precondition, 3 I/O or schema.
#include "dqlab/checks.hpp"
#include "dqlab/dq_analysis.hpp"
#include "dqlab/errors.hpp"
#include "dqlab/serialize.hpp"
#include "dqlab/staircase.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace dqlab;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kGuard = 2, kIoSchema = 3;

int exit_code_for(ErrorKind k) {
    return (k == ErrorKind::kSchema || k == ErrorKind::kIo) ? kIoSchema : kGuard;
}

int depth_cap() {
    const char* env = std::getenv("DQLAB_MAX_DEPTH");
    if (!env) return 16;
    try {
        return std::stoi(env);
    } catch (const std::exception&) {
        throw Error(ErrorKind::kInvalidParameter, std::string("DQLAB_MAX_DEPTH is not an integer: ") + env);
    }
}

void guard_depth(int depth) {
    if (depth < 0) throw Error(ErrorKind::kInvalidParameter, "--depth must be >= 0");
    int cap = depth_cap();
    if (depth > cap)
        throw Error(ErrorKind::kInvalidParameter, "--depth " + std::to_string(depth) + " exceeds the cap " +
                                                      std::to_string(cap) + " (raise DQLAB_MAX_DEPTH)");
}

fs::path prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create output directory '" + dir + "'");
    return fs::path(dir);
}

Rat pow_rat(const Rat& b, int e) {
    Rat r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

struct Construct {
    int depth = 10;
    std::string gap = "paper-ledger";
    std::string out = ".";

    int run() const {
        guard_depth(depth);
        GapConvention c = parse_gap_convention(gap);
        StaircaseLedger led = build_ledger(depth, c);
        fs::path dir = prepare_out(out);
        write_atomic(dir / "staircase.json", to_json(led).dump(2) + "\n");
        write_atomic(dir / "geometry.csv", geometry_csv(led));

        if (c == GapConvention::kLiteralAffine)
            std::printf("== gap convention: literal-affine (each gap is 2 v_k s_k wide; the limit is not 1/4) ==\n");
        else
            std::printf("== gap convention: paper-ledger (each gap is v_k wide) ==\n");
        std::printf("%3s  %-40s  %-28s  %s\n", "k", "lambda(X_k)", "2^(k+1) t_k", "(2/3)^(k+1)");
        for (int k = 0; k <= depth; ++k) {
            std::string xm = led.x_measures[k].str();
            if (c == GapConvention::kPaperLedger)
                xm += " = 1/4 + 2^-" + std::to_string(k + 1);
            std::printf("%3d  %-40s  %-28.6g  %.6g\n", k, xm.c_str(), led.y_measure_bounds[k].to_double(),
                        pow_rat(Rat(2, 3), k + 1).to_double());
        }
        LimitBounds lim = x_limit_bounds(led);
        if (lim.lo == lim.hi)
            std::printf("limit lambda(X_inf) = %s\n", lim.lo.str().c_str());
        else
            std::printf("limit lambda(X_inf) in [%.12g, %.12g] (positive, != 1/4)\n", lim.lo.to_double(),
                        lim.hi.to_double());
        std::printf("wrote %s, %s\n", (dir / "staircase.json").c_str(), (dir / "geometry.csv").c_str());
        return kOk;
    }
};

struct Verify {
    std::vector<std::string> only;
    int depth = 10;
    std::uint64_t seed = 1;
    std::size_t samples = 100000;
    int bits = kDefaultPrecision;
    std::string out = ".";

    int run() const {
        guard_depth(depth);
        std::vector<std::string> names = only.empty() ? check_names() : only;
        for (const auto& n : names) check_budget(n);  // rejects unknown names before any work
        CheckConfig cfg{depth, seed, samples, bits};
        json checks = json::array();
        std::vector<std::string> failed;
        for (const auto& n : names) {
            auto t0 = std::chrono::steady_clock::now();
            CheckResult r = run_check(n, cfg);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::printf("[%s] %-18s %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", n.c_str(), r.summary.c_str(), secs);
            if (n == "staircase-image" && r.data.contains("rows"))
                for (const auto& row : r.data["rows"])
                    std::printf("       k=%-3d lambda(X_k) = %-24s >= 1/4   Y-bound %.6g <= (2/3)^(k+1) = %.6g\n",
                                row["k"].get<int>(), row["x_measure"].get<std::string>().c_str(),
                                Rat::parse(row["y_bound"].get<std::string>()).to_double(),
                                Rat::parse(row["cap"].get<std::string>()).to_double());
            std::fflush(stdout);
            if (!r.pass) failed.push_back(n);
            checks.push_back({{"name", r.name}, {"pass", r.pass}, {"summary", r.summary},
                              {"tolerance", r.tolerance}, {"data", r.data}});
        }
        json report = {{"config", {{"depth", depth}, {"seed", seed}, {"samples", samples}, {"precision_bits", bits}}},
                       {"pass", failed.empty()},
                       {"checks", checks}};
        fs::path dir = prepare_out(out);
        write_atomic(dir / "report.json", report.dump(2) + "\n");
        if (!failed.empty()) {
            std::string list;
            for (const auto& n : failed) list += (list.empty() ? "" : ", ") + n;
            std::fprintf(stderr, "failed checks: %s\n", list.c_str());
            return kCheckFailed;
        }
        std::printf("all %zu checks passed\n", names.size());
        return kOk;
    }
};

struct Cloud {
    std::string function, set, out = ".", format = "csv";
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    int bits = kDefaultPrecision;

    int run() const {
        PiecewiseFn f = load_function(function);
        IntervalSet e = load_set(set);
        DQCloud cloud = dq_cloud(f, e, samples, seed, bits);
        fs::path dir = prepare_out(out);
        fs::path file = dir / (format == "csv" ? "dqcloud.csv" : "dqcloud.json");
        write_atomic(file, format == "csv" ? dqcloud_csv(cloud) : to_json(cloud).dump(2) + "\n");
        const auto& s = cloud.summary;
        std::printf("%zu samples, DQ midpoints in [%.12g, %.12g], largest gap %.6g, %zu outside MVT range [%.6g, %.6g]\n",
                    cloud.samples.size(), s.min.to_double(), s.max.to_double(), s.largest_gap.length().to_double(),
                    s.outside_mvt, s.mvt.lo.to_double(), s.mvt.hi.to_double());
        std::printf("wrote %s\n", file.c_str());
        return kOk;
    }
};

struct Certificate {
    std::string function, set, out = ".", pair;
    std::optional<std::uint64_t> seed;
    int bits = kDefaultPrecision;

    int run() const {
        PiecewiseFn f = load_function(function);
        IntervalSet e = load_set(set);
        std::pair<Rat, Rat> p;
        if (!pair.empty()) {
            auto comma = pair.find(',');
            if (comma == std::string::npos)
                throw Error(ErrorKind::kInvalidParameter, "--pair expects \"x1,x2\"");
            p = {Rat::parse(pair.substr(0, comma)), Rat::parse(pair.substr(comma + 1))};
        } else if (seed) {
            p = find_admissible_pair(f, e, *seed);
        } else {
            throw Error(ErrorKind::kInvalidParameter, "give --pair or --seed");
        }
        RotationOptions opt;
        opt.precision_bits = bits;
        DQCertificate cert = dq_interior(f, e, p, opt);
        CertificateCheck chk = verify_certificate(f, e, cert, bits);
        fs::path dir = prepare_out(out);
        write_atomic(dir / "certificate.json", to_json(cert).dump(2) + "\n");
        std::printf("pair (%s, %s), DQ ~ %.12g\n", p.first.str().c_str(), p.second.str().c_str(),
                    cert.center_dq.mid.to_double());
        std::printf("certified open interval (%.12g, %.12g), %zu witnesses, re-verified: %s\n",
                    cert.certified_interval.lo.to_double(), cert.certified_interval.hi.to_double(),
                    cert.witnesses.size(), chk.ok ? "yes" : "NO");
        std::printf("wrote %s\n", (dir / "certificate.json").c_str());
        if (!chk.ok) {
            std::fprintf(stderr, "certificate re-verification failed: %s\n", chk.failures.front().c_str());
            return kCheckFailed;
        }
        return kOk;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dqlab: staircase construction and difference-quotient certificates"};
    app.require_subcommand(1);

    Construct con;
    auto* c = app.add_subcommand("construct", "build the staircase ledger, write staircase.json and geometry.csv");
    c->add_option("--depth", con.depth, "refinement depth")->capture_default_str();
    c->add_option("--gap-convention", con.gap, "paper-ledger | literal-affine")
        ->check(CLI::IsMember({"paper-ledger", "literal-affine"}))
        ->capture_default_str();
    c->add_option("--out", con.out, "output directory")->capture_default_str();

    Verify ver;
    auto* v = app.add_subcommand("verify", "run the named checks, write report.json");
    v->add_option("--only", ver.only, "run only this check (repeatable)")->check(CLI::IsMember(check_names()));
    v->add_option("--depth", ver.depth, "staircase depth")->capture_default_str();
    v->add_option("--seed", ver.seed, "seed for every sampled check")->capture_default_str();
    v->add_option("--samples", ver.samples, "porcupine pair count")->capture_default_str();
    v->add_option("--precision-bits", ver.bits, "enclosure precision")->check(CLI::Range(53, 4096))->capture_default_str();
    v->add_option("--out", ver.out, "output directory")->capture_default_str();

    Cloud cl;
    auto* d = app.add_subcommand("dqcloud", "sample difference quotients over E x E");
    d->add_option("--function", cl.function, "function JSON file")->required()->check(CLI::ExistingFile);
    d->add_option("--set", cl.set, "set JSON file")->required()->check(CLI::ExistingFile);
    d->add_option("--samples", cl.samples, "number of pairs")->capture_default_str();
    d->add_option("--seed", cl.seed, "sampling seed")->required();
    d->add_option("--precision-bits", cl.bits, "enclosure precision")->check(CLI::Range(53, 4096))->capture_default_str();
    d->add_option("--format", cl.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    d->add_option("--out", cl.out, "output directory")->capture_default_str();

    Certificate ce;
    auto* k = app.add_subcommand("certificate", "certify an open interval of DQ values around a pair");
    k->add_option("--function", ce.function, "function JSON file")->required()->check(CLI::ExistingFile);
    k->add_option("--set", ce.set, "set JSON file")->required()->check(CLI::ExistingFile);
    k->add_option("--pair", ce.pair, "explicit pair \"x1,x2\" (rationals)");
    k->add_option("--seed", ce.seed, "seed for the admissible pair search");
    k->add_option("--precision-bits", ce.bits, "enclosure precision")->check(CLI::Range(53, 4096))->capture_default_str();
    k->add_option("--out", ce.out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kGuard;
    }

    try {
        if (*c) return con.run();
        if (*v) return ver.run();
        if (*d) return cl.run();
        if (*k) return ce.run();
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIoSchema;
    }
    return kGuard;
}
