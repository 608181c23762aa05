// One line per criterion. Exit status is nonzero if any check fails or
// overruns its time budget.
#include "dqlab/checks.hpp"

#include <chrono>
#include <cstdio>

int main() {
    dqlab::CheckConfig cfg;
    int failed = 0;
    int index = 0;
    for (const std::string& name : dqlab::check_names()) {
        ++index;
        auto t0 = std::chrono::steady_clock::now();
        dqlab::CheckResult r = dqlab::run_check(name, cfg);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs <= r.budget_seconds;
        bool ok = r.pass && in_time;
        if (!ok) ++failed;
        std::printf("[%s] AC%-2d %-18s %s | tol: %s | %.2fs/%.0fs%s\n", ok ? "PASS" : "FAIL", index,
                    name.c_str(), r.summary.c_str(), r.tolerance.c_str(), secs, r.budget_seconds,
                    in_time ? "" : " OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", index - failed, dqlab::check_names().size());
    return failed == 0 ? 0 : 1;
}
