// Randomized property checks, 1000 cases per suite.
#include <CLI11.hpp>

#include <cstdio>

#include "property_suites.hpp"

int main(int argc, char** argv) {
  CLI::App app{"polx property suites"};
  std::uint64_t seed = 12345;
  int cases = 1000;
  app.add_option("--seed", seed);
  app.add_option("--cases", cases)->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const auto all = polx::props::suites();
  int failed_suites = 0;
  for (size_t s = 0; s < all.size(); ++s) {
    const int fails = polx::props::run_suite(all[s], seed + s, cases);
    std::printf("%s %s: %d/%d cases\n", fails ? "FAIL" : "PASS", all[s].name.c_str(),
                cases - fails, cases);
    if (fails) ++failed_suites;
  }
  return failed_suites ? 1 : 0;
}
