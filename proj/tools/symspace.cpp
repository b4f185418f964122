// symspace: run verification suites and emit JSON/CSV reports.
//
//   symspace verify <suite> [flags]
//   symspace run --suite <suite> [flags]
//   symspace list
//
// Exit status: 0 when no case failed, 1 when some case failed, 2 on usage
// errors, 3 on numerical or resource errors.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "symspace/symspace.hpp"

namespace {

struct Flags {
  std::string suite;
  int d = 0;
  std::size_t n = 0;
  double L = 0.0;
  int trials = 0;
  std::uint64_t seed = 1;
  std::string fn;
  std::string out;
  std::string csv;
  double tol = 0.0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--d", f.d, "dimension (1 or 2; kernel accepts 1..4)");
  cmd->add_option("--n", f.n, "samples per axis, a power of two");
  cmd->add_option("--L", f.L, "half width of the periodic box");
  cmd->add_option("--trials", f.trials, "number of random cases");
  cmd->add_option("--seed", f.seed, "seed of the 64-bit Mersenne twister")->capture_default_str();
  cmd->add_option("--fn", f.fn, "function specification, e.g. invphi:k=64 or power:-0.25,m=400");
  cmd->add_option("--out", f.out, "write the JSON report here instead of stdout");
  cmd->add_option("--csv", f.csv, "write the suite table as CSV");
  cmd->add_option("--tol", f.tol, "override the suite's principal tolerance");
}

symspace::SuiteOptions to_options(const CLI::App* cmd, const Flags& f) {
  symspace::SuiteOptions o;
  o.seed = f.seed;
  if (cmd->count("--d")) o.d = f.d;
  if (cmd->count("--n")) o.n = f.n;
  if (cmd->count("--L")) o.L = f.L;
  if (cmd->count("--trials")) o.trials = f.trials;
  if (cmd->count("--fn")) o.fn = f.fn;
  if (cmd->count("--tol")) o.tol = f.tol;
  return o;
}

int emit(const symspace::SuiteReport& r, const Flags& f) {
  const std::string json = r.to_json().dump(2);
  if (f.out.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream file(f.out);
    if (!file) throw symspace::UsageError("cannot write " + f.out);
    file << json << '\n';
    std::cout << r.suite << ": " << r.count(symspace::CheckStatus::pass) << " pass, "
              << r.count(symspace::CheckStatus::fail) << " fail, " << r.count(symspace::CheckStatus::inconclusive)
              << " inconclusive (" << r.wall_time << " s)\n";
  }
  if (!f.csv.empty()) {
    std::ofstream file(f.csv);
    if (!file) throw symspace::UsageError("cannot write " + f.csv);
    file << (r.csv.empty() ? symspace::cases_csv(r) : r.csv);
  }
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rearrangement-invariant norms, Hardy-type operators and Cwikel estimates: verification suites"};
  app.require_subcommand(1);
  app.set_version_flag("--version", symspace::version);

  Flags verify_flags;
  auto* verify = app.add_subcommand("verify", "run one suite");
  verify->add_option("suite", verify_flags.suite, "suite name (see 'list')")->required();
  add_common(verify, verify_flags);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "run one suite named by --suite");
  run->add_option("--suite", run_flags.suite, "suite name (see 'list')")->required();
  add_common(run, run_flags);

  auto* list = app.add_subcommand("list", "print the suite names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& s : symspace::suite_names()) std::cout << s << '\n';
      return 0;
    }
    auto* cmd = verify->parsed() ? verify : run;
    const Flags& f = verify->parsed() ? verify_flags : run_flags;
    return emit(symspace::run_suite(f.suite, to_options(cmd, f)), f);
  } catch (const symspace::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
