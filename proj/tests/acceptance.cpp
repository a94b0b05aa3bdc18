// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
#include <chrono>
#include <cstdio>
#include <string>

#include "commands.hpp"

using namespace nrw::cli;

namespace {

struct Criterion {
  int id;
  const char* title;
  const char* command;
  const char* config;
};

// Pinned instances and grids. Tolerances live in nrw::cli::tol.
const Criterion kCriteria[] = {
    {1, "equirepartition of channel limits, N = 3, 5", "verify-equirepartition",
     "dim = 3, 5\nh = 1/512\ndata = gaussian, bump[0.5,1.5], mixture[1], mixture[2], mixture[3]\n"},
    {2, "exterior bound equals the projection residual", "verify-exterior-bound",
     "dim = 3, 5\nh = 1/512\nR = 0.5, 1, 2\ndata = mixture[1], mixture[2], mixture[3], mixture[4], mixture[5], xi_tail\n"},
    {3, "even-N form positivity and constant ratio", "check-even-form", "dim = 4\nsamples = 100\nstates = 10\nseed = 1\n"},
    {4, "Hankel norm strictly below pi, truncated family, H = LL", "check-hankel",
     "samples = 1000\nfunctions = 50\nseed = 7\nT = 1e8\n"},
    {5, "ground state residual, tail coefficient, stationarity", "check-w", "dim = 5\nh = 1/512\nt_final = 2\n"},
    {6, "tail rates, exact tail instances, shell inequality", "check-rates", "dim = 3, 5, 7\nR0 = 32\nlevels = 6\n"},
    {7, "support law and the one-eighth bound", "check-support", "dim = 3, 4\nh = 1/512\namp = 0.3\n"},
    {8, "compact data radiate, zero does not", "check-compact",
     "dim = 3, 4, 5\nh = 1/256\namp = 0.2\ndata = bump[0.5,1.5], gaussian, mixture[3], zero\n"},
    {9, "sequence bounds on random and geometric parameters", "check-sequences", "trials = 10000\nseed = 1\n"},
    {10, "solver against d'Alembert, order, energy drift", "check-solver", "dim = 3, 5\nh = 1/512\nt_final = 2\n"},
};

constexpr double kCaseSeconds = 120.0;

}  // namespace

int main() {
  int failed = 0;
  for (const Criterion& c : kCriteria) {
    const auto start = std::chrono::steady_clock::now();
    CommandResult r = run_command(c.command, Config::parse(c.config, std::string("criterion ") + std::to_string(c.id)));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool pass = r.status == kPass;
    std::string note = std::to_string(r.rows.size()) + " checks";
    for (const auto& row : r.rows)
      if (!row.pass) {
        note = "first failure " + row.check + " [" + row.instance + "] observed " + std::to_string(row.observed) +
               ", tolerance " + std::to_string(row.tolerance);
        break;
      }
    if (!r.message.empty()) note = r.message;
    if (c.id == 1) {
      double worst = 0.0;
      for (double s : r.seconds) worst = std::max(worst, s);
      note += ", slowest case " + std::to_string(worst).substr(0, 5) + " s";
      if (r.seconds.empty() || worst >= kCaseSeconds) pass = false;
    }
    std::printf("criterion %2d %s: %s (%s; %.0f s)\n", c.id, pass ? "PASS" : "FAIL", c.title, note.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(kCriteria)) - failed, std::size(kCriteria));
  return failed == 0 ? 0 : 1;
}
